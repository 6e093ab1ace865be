"""The conformal automorphism y -> t(x, y) and its inverse.

The forward map sends the Finsleroid indicatrix onto the Riemannian unit
sphere; its y-Jacobian t^m_k makes the Finsleroid metric conformal to a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jets as J
from .errors import ConfigError, NoConvergence, PoleProximity
from .finsleroid import check_admissible, fiber, frame_vector, metric_data

NEWTON_MAXITER = 50
NEWTON_TOL = 1e-12


@dataclass(frozen=True)
class AutomorphismEval:
    t: np.ndarray
    t_jac: np.ndarray   # [m, k] = dt^m / dy^k
    S: float
    p: float
    defo: np.ndarray    # p * t_jac
    sin_rho: float
    cos_rho: float
    T1: float
    T2: float


@dataclass(frozen=True)
class InverseData:
    """Inverse map at a point: y(x, t), y^i_n = dy^i/dt^n and y^n_{ml}."""

    y: np.ndarray
    Y1: np.ndarray      # [i, n]
    Y2: np.ndarray      # [n, m, l]
    iterations: int


def t_vec(bp, y, fb=None):
    """t^m = [h (y^m - bt bt^m) + A bt^m] K^h / sqrt(B), for floats or jets."""
    if fb is None:
        fb = fiber(bp, y)
    h = fb.h
    bt_up = bp.bt_up
    v = y - fb.bt * bt_up
    scale = J.power(fb.K, h) / J.sqrt(fb.B)
    return v * (scale * h) + (fb.A * scale) * bt_up


def t_jet(bp, y, order=2):
    y = np.asarray(y, dtype=float)
    check_admissible(bp, y)
    yj = J.lift(y, order=order)
    return t_vec(bp, yj, fiber(bp, yj, guard=False))


def t_map(model, x, y):
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    return t_vec(bp, y)


def t_jacobian(model, x, y):
    return t_jet(model.at(x), y, order=1).d1


def background_norm(bp, t):
    return math.sqrt(float(t @ bp.a @ t))


def conformal_factor(K, h):
    """p = K^(1-h) / h, the multiplier turning t^m_k into the deformation tensor."""
    return K ** (1.0 - h) / h


def evaluate(model, x, y):
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    fb = fiber(bp, y)
    tj = t_jet(bp, y, order=1)
    p = conformal_factor(fb.K, fb.h)
    sq = math.sqrt(fb.B)
    T1 = T2 = math.nan
    if bp.c == 1.0:
        T1, T2 = _frame_coefficients(fb)
    return AutomorphismEval(t=tj.val, t_jac=tj.d1, S=background_norm(bp, tj.val), p=p,
                            defo=p * tj.d1, sin_rho=fb.h * fb.qt / sq, cos_rho=fb.A / sq,
                            T1=T1, T2=T2)


def deformation_tensor(model, x, y):
    """The conformal deformation tensor p t^m_k, indexed ``[m, k]``."""
    bp = model.at(x)
    fb = fiber(bp, np.asarray(y, dtype=float))
    return conformal_factor(fb.K, fb.h) * t_jet(bp, y, order=1).d1


def _frame_coefficients(fb):
    h, g, b, q, B = fb.h, fb.g, fb.b, fb.q, fb.B
    T1 = -(1.0 - h) * q * q + B + 0.5 * g * q * (b + g * q)
    T2 = ((1.0 - h) * b + 0.5 * g * q) * q
    return T1, T2


def frame_expansion(model, x, y):
    """Coefficients (T1, T2) of t in the frame {l, m}; only defined for c = 1.

    t^m = (T1 l^m + T2 m^m) (K^2/B) K^(h-1) / sqrt(B).
    """
    if model.c != 1.0:
        raise ConfigError("frame expansion requires c = 1")
    fb = fiber(model.at(x), np.asarray(y, dtype=float))
    return _frame_coefficients(fb)


def frame_reconstruction(model, x, y):
    """t rebuilt from the frame expansion (c = 1)."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    fb = fiber(bp, y)
    T1, T2 = frame_expansion(model, x, y)
    m = frame_vector(bp, y, fb)
    l_up = y / fb.K
    return (T1 * l_up + T2 * m) * (fb.K ** 2 / fb.B) * fb.K ** (fb.h - 1.0) / math.sqrt(fb.B)


# ----------------------------------------------------------------------- inverse

def _initial_guess(bp, t, g):
    """Closed-form inverse of the c = 1 map composed with the axis rescaling.

    The forward map keeps the plane of (y, axis) and sends the polar angle
    theta (measured from the axis in the rescaled vector) to f(theta).
    """
    h = math.sqrt(1.0 - g * g / 4.0)
    bt_lo = bp.bt
    bt_up = bp.bt_up
    S = background_norm(bp, t)
    tb = float(bt_lo @ t)
    tp = t - tb * bt_up
    tpn = background_norm(bp, tp)
    f = math.atan2(tpn, tb)
    theta = math.atan2(math.sin(f), h * math.cos(f) - 0.5 * g * math.sin(f))
    cs, sn = math.cos(theta), math.sin(theta)
    B1 = 1.0 + g * cs * sn
    K1 = math.sqrt(B1) * math.exp(-0.5 * g * f / h)
    z = cs * bt_up + (sn / tpn) * tp if tpn > 0 else cs * bt_up
    z = z * (S ** (1.0 / h) / K1)
    return z + (1.0 / bp.c - 1.0) * float(bt_lo @ z) * bt_up


def inverse_point(bp, t, maxiter=NEWTON_MAXITER, tol=NEWTON_TOL):
    """Solve t(x, y) = t for y by damped Newton iteration."""
    t = np.asarray(t, dtype=float)
    S = background_norm(bp, t)
    if S == 0.0:
        from .errors import ZeroVector
        raise ZeroVector("zero target vector")
    tb = float(bp.bt @ t)
    if S * S - tb * tb < (1e-6 * S) ** 2:
        raise PoleProximity("target vector within the pole guard")
    y = _initial_guess(bp, t, bp.g)
    tj = t_jet(bp, y, order=1)
    res = tj.val - t
    rnorm = np.linalg.norm(res)
    for it in range(1, maxiter + 1):
        step = np.linalg.solve(tj.d1, res)
        lam = 1.0
        while True:
            y_new = y - lam * step
            try:
                tj_new = t_jet(bp, y_new, order=1)
                res_new = tj_new.val - t
                rn_new = np.linalg.norm(res_new)
            except PoleProximity:
                rn_new = math.inf
            if rn_new <= rnorm or lam < 1e-4:
                break
            lam *= 0.5
        if not math.isfinite(rn_new):
            raise NoConvergence("Newton iterate entered the pole guard")
        rel = lam * np.linalg.norm(step) / np.linalg.norm(y_new)
        y, tj, res, rnorm = y_new, tj_new, res_new, rn_new
        if rel < tol or rnorm <= 1e-15 * S:
            return y, tj, it
    raise NoConvergence(f"inverse map did not converge in {maxiter} iterations")


def inverse_map(model, x, t):
    y, _, _ = inverse_point(model.at(x), t)
    return y


def inverse_data(bp, t):
    """Inverse map with its first two t-derivatives.

    y^i_n is the matrix inverse of t^m_k; y^n_{ml} follows from
    y^n_{ml} = -y^j_m y^n_k y^h_l t^k_{hj}.
    """
    y, _, it = inverse_point(bp, t)
    tj = t_jet(bp, y, order=2)
    Y1 = np.linalg.inv(tj.d1)
    Y2 = -np.einsum("jm,nk,hl,khj->nml", Y1, Y1, Y1, tj.d2)
    return InverseData(y=y, Y1=Y1, Y2=Y2, iterations=it)


def conformality_residual(model, x, y):
    """max |(1/h^2) a_mn t^m_k t^n_h - K^(2(h-1)) g_kh|, relative to |g|."""
    bp = model.at(x)
    md = metric_data(bp, y)
    T = t_jet(bp, y, order=1).d1
    h = bp.h
    lhs = T.T @ bp.a @ T / (h * h)
    rhs = md.K ** (2.0 * (h - 1.0)) * md.g
    return np.abs(lhs - rhs).max() / np.abs(rhs).max()
