"""The Finsleroid metric function K(x, y) and the fiber objects derived from it.

The scalar kernel :func:`fiber` is written with jet primitives, so it returns
plain floats for a plain ``y`` and jets in y for a lifted ``y``.  Metric
tensor, Cartan tensor and its y-derivative all come from jets of the closed
covariant vector y_i rather than from differentiating K^2/2 three times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np

from . import jets as J
from .errors import PoleProximity, ZeroVector

POLE_EPS = 1e-6
ZERO_EPS = 1e-300


@dataclass(frozen=True)
class FinsleroidEval:
    b: float
    q: float
    qt: float
    w: float
    wt: float
    A: float
    L: float
    B: float
    f: float
    chi: float
    J: float
    K: float
    h: float
    tau: float


@dataclass(frozen=True)
class MetricData:
    y_lower: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    l_lower: np.ndarray
    l_upper: np.ndarray
    C: np.ndarray        # C_ijk
    C_mixed: np.ndarray  # C^k_ij stored as [k, i, j]
    C_vec: np.ndarray    # C_i = g^jk C_ijk
    dC: np.ndarray       # dC_ijk / dy^l stored as [i, j, k, l]
    m: np.ndarray        # frame vector m^m
    Hproj: np.ndarray    # g^mj - l^m l^j - m^m m^j
    eta: np.ndarray      # a^kn - bt^k bt^n - vt^k vt^n / qt^2
    K: float


def _dot(v, y):
    if isinstance(y, J.Jet):
        return J.einsum("i,i->", v, y)
    return float(np.dot(v, y))


def _quad(a, y):
    if isinstance(y, J.Jet):
        return J.einsum("i,ij,j->", y, a, y)
    return float(y @ a @ y)


def check_admissible(bp, y):
    """Raise ZeroVector / PoleProximity for vectors outside the b-slit bundle."""
    y = np.asarray(J.value(y), dtype=float)
    s2 = float(y @ bp.a @ y)
    if not s2 > ZERO_EPS:
        raise ZeroVector("zero tangent vector")
    bt = float(bp.b @ y) / bp.c
    qt2 = s2 - bt * bt
    if qt2 < (POLE_EPS * POLE_EPS) * s2:
        raise PoleProximity(
            f"vector within the pole guard (qt/|y| = {math.sqrt(max(qt2, 0.0) / s2):.3e})")


def fiber(bp, y, g=None, guard=True):
    """Finsleroid scalars at (x, y) for a background point ``bp``.

    ``y`` may be an array or a jet vector; every field of the returned
    namespace is then a float or a jet accordingly.
    """
    if guard:
        check_admissible(bp, y)
    g = bp.g if g is None else g
    b = _dot(bp.b, y)
    if isinstance(y, J.Jet):
        return kernel(b, _quad(bp.a, y), bp.c, g)
    # qt^2 as the a-norm of the part of y off the axis; S^2 - bt^2 cancels badly near the pole
    v = y - (b / bp.c) * bp.bt_up
    return kernel(b, _quad(bp.a, y), bp.c, g, qt2=_quad(bp.a, v))


def kernel(b, S2, c, g, qt2=None):
    """Finsleroid scalars from the two invariants b = b_i y^i and S^2 = a_ij y^i y^j.

    The inputs may be floats or jets in any seed space (y or x).  ``qt2``
    optionally supplies S^2 - (b/c)^2 computed without cancellation.
    """
    h = math.sqrt(1.0 - g * g / 4.0)
    bt = b / c
    if qt2 is None:
        qt = J.sqrt(_clip_rounding(S2 - bt * bt, S2))
        q = J.sqrt(_clip_rounding(S2 - b * b, S2))
    else:
        qt = math.sqrt(qt2)
        q = math.sqrt(qt2 + b * b * (1.0 / (c * c) - 1.0))
    B = b * b + qt * b * g + qt * qt
    A = b + qt * (g / 2.0)
    L = qt + b * (g / 2.0)
    f = J.arctan2(qt * h, A)
    chi = f / h
    Jf = J.exp(chi * (-g / 2.0))
    K = J.sqrt(B) * Jf
    return SimpleNamespace(b=b, S2=S2, bt=bt, q=q, qt=qt, B=B, A=A, L=L, f=f, chi=chi,
                           J=Jf, K=K, h=h, g=g, c=c)


def _clip_rounding(d, S2):
    # on the axis itself S^2 - bt^2 can come out a few ulps below zero
    if isinstance(d, J.Jet) or d >= 0.0:
        return d
    return 0.0 if d > -1e-13 * S2 else d


def K_xgradient(bp, y):
    """Exact partials dK/dx^i at fixed y, through x-seeded jets of b and S^2."""
    y = np.asarray(y, dtype=float)
    check_admissible(bp, y)
    b = J.Jet._make(np.asarray(bp.b @ y), bp.db.T @ y)
    S2 = J.Jet._make(np.asarray(y @ bp.a @ y), np.einsum("i,ijn,j->n", y, bp.da, y))
    return kernel(b, S2, bp.c, bp.g).K.d1


def chi_branch(b, qt, g):
    """The two-branch arctangent form of chi; singular exactly at b = 0.

    Kept as an independent cross-check of the atan2 form used by :func:`fiber`.
    """
    h = math.sqrt(1.0 - g * g / 4.0)
    G = g / h
    L = qt + 0.5 * g * b
    base = -math.atan(G / 2.0) + math.atan(L / (h * b))
    if b < 0:
        base += math.pi
    return base / h


def eval_scalars(model, x, y):
    bp = model.at(x)
    fb = fiber(bp, np.asarray(y, dtype=float))
    b = fb.b
    wt = fb.qt / b if b != 0 else math.copysign(math.inf, fb.qt)
    w = fb.q / b if b != 0 else math.copysign(math.inf, fb.q)
    tau = 1.0 + fb.g * wt + wt * wt if b != 0 else math.inf
    return FinsleroidEval(b=b, q=fb.q, qt=fb.qt, w=w, wt=wt, A=fb.A, L=fb.L, B=fb.B, f=fb.f,
                          chi=fb.chi, J=fb.J, K=fb.K, h=fb.h, tau=tau)


def K_value(model, x, y):
    return fiber(model.at(x), np.asarray(y, dtype=float)).K


def covariant_vector(bp, y, fb=None):
    """y_i = (u_i + (1 - 1/c^2) b b_i + g qt b_i) J^2, as floats or jets."""
    if fb is None:
        fb = fiber(bp, y)
    c = bp.c
    if isinstance(y, J.Jet):
        u = J.einsum("ij,j->i", bp.a, y)
    else:
        u = bp.a @ y
    coef = fb.b * (1.0 - 1.0 / (c * c)) + fb.qt * fb.g
    return (u + coef * bp.b) * (fb.J * fb.J)


def frame_vector(bp, y, fb=None):
    """The g-unit vector m^m orthogonal to l, in the plane of y and the axis b.

    Equals C^m / |C| whenever g != 0.  For c < 1 the axis coefficient picks up
    a factor 1/c relative to the c = 1 expression.
    """
    if fb is None:
        fb = fiber(bp, y)
    bt_up = bp.bt_up
    v = y - fb.bt * bt_up
    scale = 1.0 / (fb.qt * fb.K)
    return (fb.qt * fb.qt * scale / bp.c) * bt_up - v * ((fb.b + fb.qt * fb.g) * scale)


def metric_data(model_or_bp, x=None, y=None):
    """Metric tensor, Cartan tensor and frame objects at (x, y).

    Accepts ``(model, x, y)`` or ``(background_point, y)``.
    """
    if y is None:
        bp, y = model_or_bp, x
    else:
        bp = model_or_bp.at(x)
    y = np.asarray(y, dtype=float)
    check_admissible(bp, y)
    yj = J.lift(y, order=3)
    fb = fiber(bp, yj, guard=False)
    yl = covariant_vector(bp, yj, fb)
    y_lower = yl.val
    g = 0.5 * (yl.d1 + yl.d1.T)
    C = yl.d2 * 0.5
    dC = yl.d3 * 0.5
    ginv = np.linalg.inv(g)
    K = float(fb.K.val)
    C_mixed = np.einsum("kl,lij->kij", ginv, C)
    C_vec = np.einsum("jk,ijk->i", ginv, C)
    m = frame_vector(bp, y)
    l_up = y / K
    Hproj = ginv - np.outer(l_up, l_up) - np.outer(m, m)
    qt = float(fb.qt.val)
    bt = float(fb.bt.val)
    vt = y - bt * bp.bt_up
    eta = bp.ainv - np.outer(bp.bt_up, bp.bt_up) - np.outer(vt, vt) / (qt * qt)
    return MetricData(y_lower=y_lower, g=g, ginv=ginv, l_lower=y_lower / K, l_upper=l_up,
                      C=C, C_mixed=C_mixed, C_vec=C_vec, dC=dC, m=m, Hproj=Hproj, eta=eta, K=K)


def cartan_mixed_jet(bp, y):
    """C^k_ij = g^kl C_lij as a first-order jet in y, indexed [k, i, j]."""
    yl = covariant_vector(bp, J.lift(np.asarray(y, dtype=float), order=3), None)
    g = J.Jet._make(yl.d1, yl.d2)
    C = J.Jet._make(yl.d2 * 0.5, yl.d3 * 0.5)
    return J.einsum("kl,lij->kij", J.inv(g), C)


def homogeneity_check(model, x, y, k):
    """Residuals of the positive-homogeneity laws of K, y_i, g_ij and C_ijk under y -> k y."""
    y = np.asarray(y, dtype=float)
    d0 = metric_data(model, x, y)
    dk = metric_data(model, x, k * y)
    return {
        "K": abs(dk.K - k * d0.K) / (k * d0.K),
        "y_lower": np.abs(dk.y_lower - k * d0.y_lower).max() / (k * np.abs(d0.y_lower).max()),
        "g": np.abs(dk.g - d0.g).max() / np.abs(d0.g).max(),
        "C": np.abs(k * dk.C - d0.C).max() / max(np.abs(d0.C).max(), 1e-300),
    }


def determinant_relation(model, x, y):
    """(det g, c^2 (K^2/B)^N det a); the factor c^2 is 1 on a unit-length axis."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    md = metric_data(bp, y)
    fb = fiber(bp, y)
    rhs = bp.c ** 2 * (fb.K ** 2 / fb.B) ** bp.dim * np.linalg.det(bp.a)
    return float(np.linalg.det(md.g)), float(rhs)


def cartan_vector_norm(model, x, y):
    """(A^i A_i with A_i = K C_i, N^2 g^2 / 4)."""
    md = metric_data(model, x, y)
    A = md.K * md.C_vec
    return float(A @ md.ginv @ A), model.dim ** 2 * model.g ** 2 / 4.0
