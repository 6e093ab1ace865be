"""Two-vector angle of the Finsleroid space.

The angle is the Riemannian angle between the automorphism images, divided
by h:  alpha = arccos(lambda) / h with lambda = a(t1, t2) / (S1 S2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jets as J
from .automorphism import t_jet, t_vec
from .errors import ConfigError, NumericalInconsistency
from .finsleroid import check_admissible, fiber, metric_data

CLAMP_GUARD = 1e-9
G_STEP = 1e-6


@dataclass(frozen=True)
class AngleData:
    t1: np.ndarray
    t2: np.ndarray
    S1: float
    S2: float
    lam: float          # clamped into [-1, 1]
    lam_raw: float
    alpha: float
    sigma1: float
    sigma2: float
    z1: float
    z2: float
    v12: float


def _adot(a, u, v):
    if isinstance(u, J.Jet) or isinstance(v, J.Jet):
        return J.einsum("i,ij,j->", u, a, v)
    return float(u @ a @ v)


def lam_value(bp, y1, y2):
    """lambda(x, y1, y2); either vector may be a y-jet."""
    t1 = t_vec(bp, y1, fiber(bp, y1, guard=not isinstance(y1, J.Jet)))
    t2 = t_vec(bp, y2, fiber(bp, y2, guard=not isinstance(y2, J.Jet)))
    return _adot(bp.a, t1, t2) / J.sqrt(_adot(bp.a, t1, t1) * _adot(bp.a, t2, t2))


def _clamp(lam):
    if abs(lam) > 1.0 + CLAMP_GUARD:
        raise NumericalInconsistency(f"lambda = {lam!r} outside [-1, 1] beyond rounding")
    return min(1.0, max(-1.0, lam))


def _v12(bp, y1, y2):
    """r_in y1^i y2^n with r = a - bt bt (the part orthogonal to the axis)."""
    r = bp.a - np.outer(bp.bt, bp.bt)
    return float(y1 @ r @ y2)


def two_vector_angle(model, x, y1, y2):
    bp = model.at(x)
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    f1, f2 = fiber(bp, y1), fiber(bp, y2)
    t1, t2 = t_vec(bp, y1, f1), t_vec(bp, y2, f2)
    S1 = math.sqrt(t1 @ bp.a @ t1)
    S2 = math.sqrt(t2 @ bp.a @ t2)
    raw = float(t1 @ bp.a @ t2) / (S1 * S2)
    lam = _clamp(raw)
    h = f1.h
    sig1 = f1.q + 0.5 * f1.g * f1.b
    sig2 = f2.q + 0.5 * f2.g * f2.b
    n = bp.dim
    g = f1.g
    if g != 0.0:
        z1 = f1.q * f1.K ** 2 / (n * g * f1.B) * sig1
        z2 = f2.q * f2.K ** 2 / (n * g * f2.B) * sig2
    else:
        z1 = z2 = math.nan
    return AngleData(t1=t1, t2=t2, S1=S1, S2=S2, lam=lam, lam_raw=raw, alpha=math.acos(lam) / h,
                     sigma1=sig1, sigma2=sig2, z1=z1, z2=z2, v12=_v12(bp, y1, y2))


def angle_value(model, x, y1, y2):
    return two_vector_angle(model, x, y1, y2).alpha


def lam_closed(model, x, y1, y2):
    """lambda = (h^2 v12 + A1 A2) / sqrt(B1 B2), the scalar form of the image inner product."""
    bp = model.at(x)
    f1, f2 = fiber(bp, np.asarray(y1, float)), fiber(bp, np.asarray(y2, float))
    return (f1.h ** 2 * _v12(bp, y1, y2) + f1.A * f2.A) / math.sqrt(f1.B * f2.B)


def dlambda_dy_jet(model, x, y1, y2):
    """Both gradients of lambda by differentiating through the map with jets."""
    bp = model.at(x)
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    check_admissible(bp, y1)
    check_admissible(bp, y2)
    g1 = lam_value(bp, J.lift(y1, order=1), y2).d1
    g2 = lam_value(bp, y1, J.lift(y2, order=1)).d1
    return g1, g2


def dlambda_dy_generic(model, x, y1, y2):
    """Gradients assembled from the images and their Jacobians (valid for any automorphism)."""
    bp = model.at(x)
    a = bp.a
    j1 = t_jet(bp, y1, order=1)
    j2 = t_jet(bp, y2, order=1)
    t1, t2 = j1.val, j2.val
    S1 = math.sqrt(t1 @ a @ t1)
    S2 = math.sqrt(t2 @ a @ t2)
    lam = float(t1 @ a @ t2) / (S1 * S2)
    g1 = (a @ t2 / (S1 * S2) - a @ t1 / (S1 * S1) * lam) @ j1.d1
    g2 = (a @ t1 / (S2 * S1) - a @ t2 / (S2 * S2) * lam) @ j2.d1
    return g1, g2


def _require_unit_axis(model):
    if model.c != 1.0:
        raise ConfigError("closed Finsleroid angle formulas require c = 1")


def dlambda_dy_closed(model, x, y1, y2):
    """Closed Finsleroid forms of the two gradients of lambda (c = 1)."""
    _require_unit_axis(model)
    bp = model.at(x)
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    f1, f2 = fiber(bp, y1), fiber(bp, y2)
    r = bp.a - np.outer(bp.b, bp.b)
    v1, v2 = r @ y1, r @ y2
    v12 = float(y1 @ r @ y2)
    h2 = f1.h ** 2
    g = f1.g

    def one(fa, fb_, va, vb):
        num = (fa.B * vb + fa.q ** 2 * bp.b * fb_.A - fa.b * fb_.A * va
               - v12 * (h2 * va + (bp.b + 0.5 * g / fa.q * va) * fa.A))
        return h2 * num / (fa.B * math.sqrt(fa.B) * math.sqrt(fb_.B))

    return one(f1, f2, v1, v2), one(f2, f1, v2, v1)


def axis_contractions(model, x, y1, y2):
    """b^k dlambda/dy1^k and b^k dlambda/dy2^k in closed form (c = 1)."""
    _require_unit_axis(model)
    bp = model.at(x)
    f1, f2 = fiber(bp, np.asarray(y1, float)), fiber(bp, np.asarray(y2, float))
    v12 = _v12(bp, y1, y2)
    h2 = f1.h ** 2
    den = math.sqrt(f1.B) * math.sqrt(f2.B)
    return (h2 * (f1.q ** 2 * f2.A - v12 * f1.A) / (f1.B * den),
            h2 * (f2.q ** 2 * f1.A - v12 * f2.A) / (f2.B * den))


def dlambda_dg(model, x, y1, y2, step=G_STEP):
    """d lambda / d g by central differences in g, together with closed forms.

    Returns a dict with the finite-difference value ``fd``, the direct
    closed form ``direct``, the sigma-weighted axis form ``sigma_form`` and
    the Cartan-vector form ``z_form`` (the last needs g != 0).
    """
    _require_unit_axis(model)
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    g = model.g
    lp = lam_closed(model.with_g(g + step), x, y1, y2)
    lm = lam_closed(model.with_g(g - step), x, y1, y2)
    fd = (lp - lm) / (2.0 * step)

    bp = model.at(x)
    f1, f2 = fiber(bp, y1), fiber(bp, y2)
    v12 = _v12(bp, y1, y2)
    lam = lam_closed(model, x, y1, y2)
    den = 2.0 * math.sqrt(f1.B) * math.sqrt(f2.B)
    direct = (-0.5 * (f1.b * f1.q / f1.B + f2.b * f2.q / f2.B) * lam
              + (f1.q * f2.A + f2.q * f1.A - g * v12) / den)
    ad = two_vector_angle(model, x, y1, y2)
    s1, s2 = ad.sigma1, ad.sigma2
    expanded = (f1.q ** 2 * f2.A / f1.B * s1 + f2.q ** 2 * f1.A / f2.B * s2
                - v12 * (f1.A / f1.B * s1 + f2.A / f2.B * s2)) / den
    bk1, bk2 = axis_contractions(model, x, y1, y2)
    h2 = f1.h ** 2
    sigma_form = (s1 * bk1 + s2 * bk2) / (2.0 * h2)
    z_form = math.nan
    if g != 0.0:
        g1, g2 = dlambda_dy_jet(model, x, y1, y2)
        C1 = metric_data(bp, y1)
        C2 = metric_data(bp, y2)
        Cu1 = C1.ginv @ C1.C_vec
        Cu2 = C2.ginv @ C2.C_vec
        z_form = (ad.z1 * (Cu1 @ g1) + ad.z2 * (Cu2 @ g2)) / h2
    return {"fd": fd, "direct": direct, "expanded": expanded, "sigma_form": sigma_form,
            "z_form": z_form, "sigma_alt": (0.5 * g * f1.A + h2 * f1.q) - s1}
