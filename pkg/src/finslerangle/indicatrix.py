"""Curvature of the indicatrix built from the Cartan tensor.

On a Finsleroid fiber the tensor S_nmij is proportional to
h_nj h_mi - h_ni h_mj (h the angular metric), and the indicatrix curvature
1 - C equals h^2 = 1 - g^2/4 at every point and direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .automorphism import conformal_factor, deformation_tensor, t_jacobian
from .finsleroid import cartan_mixed_jet, check_admissible, metric_data
from .sampling import rng_for, sample_x, sample_y


@dataclass(frozen=True)
class IndicatrixReport:
    S_tensor: list          # S_n^m_ij per sample, indexed [n, m, i, j]
    fitted_C: float         # mean over samples
    residual: float         # worst relative misfit of S against C (h wedge h)
    h_squared: float
    curvature: float        # 1 - fitted_C
    spread: float           # max |C_k - mean| / |mean| (absolute when the mean vanishes)
    p_residual: float       # conformal multiplier vs deformation tensor / t-Jacobian
    samples: int


def s_tensor_mixed(bp, y):
    """S_n^m_ij = (dC^m_ni/dy^j - dC^m_nj/dy^i + C^h_ni C^m_hj - C^h_nj C^m_hi) K^2."""
    y = np.asarray(y, dtype=float)
    check_admissible(bp, y)
    Cj = cartan_mixed_jet(bp, y)
    C, dC = Cj.val, Cj.d1                       # C[m, n, i], dC[m, n, i, j]
    K2 = metric_data(bp, y).K ** 2
    d = np.einsum("mnij->nmij", dC)
    cc = np.einsum("hni,mhj->nmij", C, C)
    return (d - d.transpose(0, 1, 3, 2) + cc - cc.transpose(0, 1, 3, 2)) * K2


def s_tensor(model_or_bp, x=None, y=None):
    """Covariant S_nmij = g_mh S_n^h_ij; accepts (model, x, y) or (bp, y)."""
    if y is None:
        bp, y = model_or_bp, x
    else:
        bp = model_or_bp.at(x)
    md = metric_data(bp, y)
    return np.einsum("mh,nhij->nmij", md.g, s_tensor_mixed(bp, y))


def wedge_basis(md):
    """P_nmij = h_nj h_mi - h_ni h_mj with h_ij = g_ij - l_i l_j."""
    hh = md.g - np.outer(md.l_lower, md.l_lower)
    return np.einsum("nj,mi->nmij", hh, hh) - np.einsum("ni,mj->nmij", hh, hh)


def fit_curvature(S, P):
    """Least-squares coefficient C in S ~ C P and the relative misfit."""
    pp = float(np.sum(P * P))
    C = float(np.sum(S * P)) / pp
    nS = float(np.linalg.norm(S))
    misfit = float(np.linalg.norm(S - C * P))
    return C, (misfit / nS if nS > 0.0 else misfit)


def antisymmetry_residual(S):
    s = max(np.abs(S).max(), 1.0)
    return (np.abs(S + S.transpose(0, 1, 3, 2)).max() / s,
            np.abs(S + S.transpose(1, 0, 2, 3)).max() / s)


def constant_curvature_check(model, x, sample_count, seed=0, points=None):
    """Fit the indicatrix curvature over random directions at x (and optional extra points)."""
    rng = rng_for(seed)
    xs = [np.asarray(x, dtype=float)] + [np.asarray(p, dtype=float) for p in (points or [])]
    Cs, res, Ss, pres = [], [], [], 0.0
    for xp in xs:
        bp = model.at(xp)
        for _ in range(sample_count):
            y = sample_y(rng, bp)
            md = metric_data(bp, y)
            S = np.einsum("mh,nhij->nmij", md.g, s_tensor_mixed(bp, y))
            C, r = fit_curvature(S, wedge_basis(md))
            Cs.append(C)
            res.append(r)
            Ss.append(s_tensor_mixed(bp, y))
            p = conformal_factor(md.K, bp.h)
            D = deformation_tensor(model, xp, y)
            T = t_jacobian(model, xp, y)
            pres = max(pres, np.abs(D - p * T).max() / np.abs(D).max())
    Cs = np.array(Cs)
    mean = float(Cs.mean())
    spread = float(np.abs(Cs - mean).max()) / (abs(mean) if abs(mean) > 1e-12 else 1.0)
    return IndicatrixReport(S_tensor=Ss, fitted_C=mean, residual=max(res), h_squared=model.h ** 2,
                            curvature=1.0 - mean, spread=spread, p_residual=pres, samples=len(Cs))


def random_points(model, count, seed=0, box=1.0):
    rng = rng_for(seed)
    return [sample_x(rng, model.dim, box) for _ in range(count)]


def curvature_value(model, x, y):
    """1 - C at a single (x, y)."""
    bp = model.at(x)
    md = metric_data(bp, y)
    C, _ = fit_curvature(s_tensor(bp, y), wedge_basis(md))
    return 1.0 - C

