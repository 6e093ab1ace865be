"""The angle-preserving nonlinear connection of the Finsleroid space.

Production coefficients come from a closed form in the Finsleroid scalars
and the covariant derivative of the unit axis form.  Two independent routes
serve as oracles: pulling the Riemannian connection back through the inverse
automorphism, and solving the angle equation with the forward map.

Array conventions: ``N[m, i] = N^m_i``; ``N2[k, m, n] = dN^k_m / dy^n``;
``N3[k, m, n, j] = d^2 N^k_m / dy^n dy^j``; ``D = -N2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets as J
from .automorphism import conformal_factor, inverse_data, inverse_point, t_jet
from .fd import xderiv
from .finsleroid import (K_xgradient, cartan_mixed_jet, check_admissible, fiber, frame_vector,
                         metric_data)


@dataclass(frozen=True)
class ConnectionData:
    N: np.ndarray
    D: np.ndarray
    N2: np.ndarray
    N3: np.ndarray
    s: np.ndarray       # s_i = y^h nabla_i bt_h
    beta: np.ndarray    # beta^m_i
    route: str


def _closed(bp, y, fb):
    h = fb.h
    bt_up = bp.bt_up
    nbt_up = bp.nabla_bt_up.T  # [m, i]
    if isinstance(y, J.Jet):
        s = J.einsum("ih,h->i", bp.nabla_bt, y)
        outer = lambda u, v: J.einsum("m,i->mi", u, v)
        ay = J.einsum("mih,h->mi", bp.gamma, y)
    else:
        s = bp.nabla_bt @ y
        outer = np.outer
        ay = np.einsum("mih,h->mi", bp.gamma, y)
    m = frame_vector(bp, y, fb)
    v = y - fb.bt * bt_up
    beta = nbt_up - outer(v, s) * (1.0 / (fb.qt * fb.qt))
    N = (outer(m, s) * (fb.K / (fb.qt * h)) - beta * (fb.A / h) - outer(bt_up, s)
         + fb.bt * nbt_up - ay)
    return N, s, beta


def n_closed_jet(bp, y, order=2):
    """Closed-form coefficients as a jet in y of the given order."""
    y = np.asarray(y, dtype=float)
    check_admissible(bp, y)
    yj = J.lift(y, order=order)
    N, _, _ = _closed(bp, yj, fiber(bp, yj, guard=False))
    return N


def n_coeffs_closed(model, x, y):
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    N, _, _ = _closed(bp, y, fiber(bp, y))
    return N


def n_coeffs_assembled(model, x, y):
    """The same coefficients in the form split along l, m and the projector H."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    fb = fiber(bp, y)
    md = metric_data(bp, y)
    h, K, B, qt, b = fb.h, fb.K, fb.B, fb.qt, fb.b
    dK = K_xgradient(bp, y)
    nbt = bp.nabla_bt  # [i, j]
    coef_H = (fb.bt - fb.A / h) * K * K / B
    coef_m = (1.0 / (h * qt) - (b * b + qt * qt) / (qt * B)) * K
    bracket = coef_H * md.Hproj + coef_m * np.outer(md.m, y)   # [m, j]
    hproj = np.eye(bp.dim) - np.outer(md.l_upper, md.l_lower)
    ay = np.einsum("tij,j->ti", bp.gamma, y)
    return -np.outer(md.l_upper, dK) + bracket @ nbt.T - hproj @ ay


def n_coeffs_transitivity(model, x, y):
    """N^n_i = dy^n(x, t)/dx^i at fixed t + y^n_h L^h_i, with t = t(x, y)."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    t = t_jet(bp, y, order=1).val
    dydx = xderiv(lambda z: inverse_point(model.at(z), t)[0], x)
    inv = inverse_data(bp, t)
    L = -np.einsum("kih,h->ki", bp.gamma, t)
    return dydx + inv.Y1 @ L


def n_coeffs_angle_solution(model, x, y):
    """N^m_n = -y^m_i (dt^i/dx^n + a^i_kn t^k), the solution of the angle equation."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    tj = t_jet(bp, y, order=1)
    dtdx = xderiv(lambda z: t_jet(model.at(z), y, order=1).val, x)
    Y1 = np.linalg.inv(tj.d1)
    return -Y1 @ (dtdx + np.einsum("ikn,k->in", bp.gamma, tj.val))


def connection_data(model, x, y):
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    check_admissible(bp, y)
    yj = J.lift(y, order=2)
    Nj, _, _ = _closed(bp, yj, fiber(bp, yj, guard=False))
    N, s, beta = _closed(bp, y, fiber(bp, y))
    return ConnectionData(N=Nj.val, D=-Nj.d1, N2=Nj.d1, N3=Nj.d2, s=s, beta=beta,
                          route="closed_form")


def n_derivatives(model, x, y):
    cd = connection_data(model, x, y)
    return cd.N2, cd.N3


# ----------------------------------------------------------------- covariant derivatives

def _d_operator(fn, model, x, y, N):
    """d_n F = dF/dx^n + N^m_n dF/dy^m for a y-jet valued field ``fn(bp, y_jet)``.

    Returns the array with the derivative index n appended last.
    """
    y = np.asarray(y, dtype=float)
    dx = xderiv(lambda z: J.value(fn(model.at(z), J.lift(y, order=1))), x)
    dy = fn(model.at(x), J.lift(y, order=1)).d1
    return dx + np.einsum("...m,mn->...n", dy, N)


def _K_field(bp, yj):
    return fiber(bp, yj, guard=False).K


def _ylower_field(bp, yj):
    from .finsleroid import covariant_vector
    return covariant_vector(bp, yj, fiber(bp, yj, guard=False))


def _g_field(bp, yj):
    yl = _ylower_field(bp, J.lift(yj.val, order=yj.order + 1))
    return J.Jet._make(yl.d1, yl.d2)


def _t_field(bp, yj):
    from .automorphism import t_vec
    return t_vec(bp, yj, fiber(bp, yj, guard=False))


def _tjac_field(bp, yj):
    y = yj.val
    tj = t_jet(bp, y, order=2)
    return J.Jet._make(tj.d1, tj.d2)


def _defo_field(bp, yj):
    y = yj.val
    tj = t_jet(bp, y, order=2)
    fb = fiber(bp, J.lift(y, order=1), guard=False)
    p = J.power(fb.K, 1.0 - fb.h) * (1.0 / fb.h)
    return J.Jet._make(tj.d1, tj.d2) * p


def _C_mixed_field(bp, yj):
    return cartan_mixed_jet(bp, yj.val)


def covariant_suite(model, x, y):
    """Residuals of every vanishing covariant derivative at (x, y).

    x-derivatives use the shared finite-difference policy; residuals are
    maxima of absolute values scaled by the size of the differentiated object.
    """
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    cd = connection_data(model, x, y)
    md = metric_data(bp, y)
    N, N2, D = cd.N, cd.N2, cd.D
    G = bp.gamma
    out = {}

    dK = _d_operator(_K_field, model, x, y, N)
    out["D_K"] = np.abs(dK).max() / md.K

    dyl = _d_operator(_ylower_field, model, x, y, N)        # [j, n]
    res = dyl - np.einsum("mnj,m->jn", D, md.y_lower)
    out["D_y_lower"] = np.abs(res).max() / np.abs(md.y_lower).max()

    dg = _d_operator(_g_field, model, x, y, N)               # [n, j, m]
    res = dg + np.einsum("kmj,kn->njm", N2, md.g) + np.einsum("kmn,kj->njm", N2, md.g)
    out["D_g"] = np.abs(res).max() / np.abs(md.g).max()

    tj = t_jet(bp, y, order=2)
    dt = _d_operator(_t_field, model, x, y, N)               # [i, n]
    res = dt + np.einsum("ikn,k->in", G, tj.val)
    out["D_t"] = np.abs(res).max() / np.abs(tj.val).max()

    dtj = _d_operator(_tjac_field, model, x, y, N)           # [i, m, n]
    res = (dtj - np.einsum("hnm,ih->imn", D, tj.d1)
           + np.einsum("inl,lm->imn", G, tj.d1))
    out["D_t_jac"] = np.abs(res).max() / np.abs(tj.d1).max()

    fb = fiber(bp, y)
    defo = conformal_factor(fb.K, fb.h) * tj.d1
    dd = _d_operator(_defo_field, model, x, y, N)            # [m, k, n]
    res = (dd - np.einsum("hnk,mh->mkn", D, defo)
           + np.einsum("mnl,lk->mkn", G, defo))
    out["D_deformation"] = np.abs(res).max() / np.abs(defo).max()

    out["D_y_jac"] = _inverse_jacobian_residual(model, x, y, D)

    dC = _d_operator(_C_mixed_field, model, x, y, N)         # [k, n, j, m]
    Cm = md.C_mixed
    DC = (dC - np.einsum("kmt,tnj->knjm", N2, Cm)
          + np.einsum("tmn,ktj->knjm", N2, Cm) + np.einsum("tmj,knt->knjm", N2, Cm))
    # N^k_{mnj} + D_m C^k_{nj}, with DC indexed [k, n, j, m]
    res = cd.N3 + DC.transpose(0, 3, 1, 2)
    scale = max(np.abs(cd.N3).max(), np.abs(Cm).max() / md.K, 1.0)
    out["N3_plus_DC"] = np.abs(res).max() / scale
    return out


def _inverse_jacobian_residual(model, x, y, D):
    """D_i y^n_k = d^Riem_i y^n_k + D^n_is y^s_k - a^h_ik y^n_h at t = t(x, y)."""
    bp = model.at(x)
    t = t_jet(bp, y, order=1).val
    inv = inverse_data(bp, t)

    def Y1_at(z):
        bz = model.at(z)
        yz, tjz, _ = inverse_point(bz, t)
        return np.linalg.inv(tjz.d1)

    dY = xderiv(Y1_at, x)                                      # [n, k, i]
    L = -np.einsum("lih,h->li", bp.gamma, t)
    res = (dY + np.einsum("nkl,li->nki", inv.Y2, L)
           + np.einsum("nis,sk->nki", D, inv.Y1)
           - np.einsum("hik,nh->nki", bp.gamma, inv.Y1))
    return np.abs(res).max() / np.abs(inv.Y1).max()


def contraction_identities(model, x, y):
    """Residuals of the contracted forms u_k N^k_n, b_k N^k_n, d_n b, d_n B (c = 1)."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    fb = fiber(bp, y)
    N = n_coeffs_closed(model, x, y)
    h, g, q, b = fb.h, fb.g, fb.q, fb.b
    u = bp.a @ y
    s = bp.nabla_b @ y                    # y^j nabla_n b_j
    ay = np.einsum("kij,j->ki", bp.gamma, y)
    out = {}
    out["u_N"] = np.abs(u @ N - (-(g * q / h) * s - u @ ay)).max()
    out["b_N"] = np.abs(bp.b @ N - ((1.0 - h) / h * s - bp.b @ ay)).max()
    db = bp.db.T @ y + bp.b @ N
    out["d_b"] = np.abs(db - s / h).max()
    yj = J.lift(y, order=1)
    Bj = fiber(bp, yj, guard=False).B
    dBx = xderiv(lambda z: fiber(model.at(z), y).B, x)
    dB = dBx + Bj.d1 @ N
    out["d_B"] = np.abs(dB + g / (q * h) * fb.B * s).max() / fb.B
    md = metric_data(bp, y)
    st = bp.nabla_bt @ y
    lhs = md.l_lower @ N
    rhs = -fb.K * g * fb.qt / fb.B * st - md.l_lower @ ay
    out["l_N"] = np.abs(lhs - rhs).max()
    return out


def orthogonality(model, x, y):
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    md = metric_data(bp, y)
    cd = connection_data(model, x, y)
    m_low = md.g @ md.m
    return {
        "m_l": abs(md.m @ md.l_lower),
        "beta_b": np.abs(bp.b @ cd.beta).max(),
        "beta_l": np.abs(md.l_lower @ cd.beta).max(),
        "beta_m": np.abs(m_low @ cd.beta).max(),
    }


def angle_equation_residual(model, x, y1, y2, N1=None, N2=None):
    """d_i lambda for the pair (y1, y2), each vector moved by its own N."""
    from .angle import lam_value

    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    if N1 is None:
        N1 = n_coeffs_closed(model, x, y1)
    if N2 is None:
        N2 = n_coeffs_closed(model, x, y2)
    dx = xderiv(lambda z: lam_value(model.at(z), y1, y2), x)
    bp = model.at(x)
    l1 = lam_value(bp, J.lift(y1, order=1), y2).d1
    l2 = lam_value(bp, y1, J.lift(y2, order=1)).d1
    return dx + l1 @ N1 + l2 @ N2


def second_derivative_identities(model, x, y):
    """y_k N^k_mnj = 0 and total symmetry of N_kmnj = g_kh N^h_mnj in (k, n, j)."""
    md = metric_data(model, x, y)
    cd = connection_data(model, x, y)
    N3l = np.einsum("kh,hmnj->kmnj", md.g, cd.N3)
    s = max(np.abs(N3l).max(), 1.0)
    sym = max(np.abs(N3l - N3l.transpose(2, 1, 0, 3)).max(),
              np.abs(N3l - N3l.transpose(3, 1, 2, 0)).max())
    return {
        "y_N3": np.abs(np.einsum("k,kmnj->mnj", md.y_lower, cd.N3)).max() / s,
        "N3_symmetry": sym / s,
    }
