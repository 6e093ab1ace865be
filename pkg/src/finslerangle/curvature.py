"""Curvature of the angle-preserving connection.

Index layouts (x-indices i, j, l last):

* ``M[n, i, j] = M^n_ij``
* ``E[k, n, i, j] = E_k^n_ij``
* ``rho[k, n, i, j] = rho_k^n_ij``; ``rho_lower[k, n, i, j] = g_nm rho_k^m_ij``
* ``T[k, n, h, m] = T_kn^hm``
* ``riemann[h, t, i, j] = a_h^t_ij`` (see :mod:`finslerangle.background`)

M, E and rho are available through several independent routes: the defining
formulas (x-derivatives of the connection by finite differences), and the
transitive forms built from the background Riemann tensor and the automorphism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets as J
from .automorphism import conformal_factor, t_jet
from .connection import connection_data, n_closed_jet
from .fd import xderiv
from .finsleroid import covariant_vector, fiber, metric_data


@dataclass(frozen=True)
class CurvatureData:
    M: np.ndarray
    E: np.ndarray
    rho: np.ndarray
    T: np.ndarray
    rho_lower: np.ndarray
    M_lower: np.ndarray


def _transitive_M_jet(bp, y, order=1):
    """M^n_ij = -y^n_t t^h a_h^t_ij as a jet in y (order <= 2)."""
    tj = t_jet(bp, y, order=order + 1)
    tjac = J.Jet._make(tj.d1, *([tj.d2] + ([tj.d3] if order >= 2 else [])))
    Y1 = J.inv(tjac)
    t = tj.truncate(order)
    Rt = J.einsum("h,htij->tij", t, bp.riemann)
    return -J.einsum("nt,tij->nij", Y1, Rt)


def m_transitive(model, x, y):
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    tj = t_jet(bp, y, order=1)
    Y1 = np.linalg.inv(tj.d1)
    return -np.einsum("nt,h,htij->nij", Y1, tj.val, bp.riemann)


def m_definition(model, x, y):
    """M^n_ij = dN^n_j/dx^i - dN^n_i/dx^j - N^h_i D^n_jh + N^h_j D^n_ih."""
    y = np.asarray(y, dtype=float)
    cd = connection_data(model, x, y)
    dN = xderiv(lambda z: connection_data(model, z, y).N, x)   # [n, j, i]
    N, D = cd.N, cd.D
    return (np.transpose(dN, (0, 2, 1)) - dN
            - np.einsum("hi,njh->nij", N, D) + np.einsum("hj,nih->nij", N, D))


def e_tensor(model, x, y):
    """E_k^n_ij = -dM^n_ij/dy^k through jets of the transitive M."""
    Mj = _transitive_M_jet(model.at(x), np.asarray(y, dtype=float), order=1)
    return -np.moveaxis(Mj.d1, -1, 0)


def e_definition(model, x, y):
    """E from its definition d_i D^n_jk - d_j D^n_ik + D^m_jk D^n_im - D^m_ik D^n_jm."""
    y = np.asarray(y, dtype=float)
    bp = model.at(x)
    Nj = n_closed_jet(bp, y, order=2)
    N = Nj.val
    D = -Nj.d1                      # [n, j, k]
    dDdy = -Nj.d2                   # [n, j, k, m]
    dDdx = xderiv(lambda z: -n_closed_jet(model.at(z), y, order=1).d1, x)  # [n, j, k, i]
    dD = dDdx + np.einsum("njkm,mi->njki", dDdy, N)               # d_i D^n_jk as [n, j, k, i]
    E = (np.einsum("njki->knij", dD) - np.einsum("nikj->knij", dD)
         + np.einsum("mjk,nim->knij", D, D) - np.einsum("mik,njm->knij", D, D))
    return E


def e_transitive(model, x, y):
    """E = y^n_h t^h_km M^m_ij + y^n_m a_h^m_ij t^h_k."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    tj = t_jet(bp, y, order=2)
    Y1 = np.linalg.inv(tj.d1)
    M = m_transitive(model, x, y)
    return (np.einsum("nh,hkm,mij->knij", Y1, tj.d2, M)
            + np.einsum("nm,hmij,hk->knij", Y1, bp.riemann, tj.d1))


def rho_definition(model, x, y, E=None, M=None):
    """rho_k^n_ij = E_k^n_ij - M^h_ij C^n_hk."""
    bp = model.at(x)
    md = metric_data(bp, y)
    if E is None:
        E = e_definition(model, x, y)
    if M is None:
        M = m_definition(model, x, y)
    return E - np.einsum("hij,nhk->knij", M, md.C_mixed)


def rho_closed(model, x, y):
    """rho_k^n_ij = -(1-h)/K (l_k delta^n_m - l^n g_mk) M^m_ij + y^n_m a_h^m_ij t^h_k."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    md = metric_data(bp, y)
    h = bp.h
    tj = t_jet(bp, y, order=1)
    Y1 = np.linalg.inv(tj.d1)
    M = m_transitive(model, x, y)
    n = bp.dim
    P = np.einsum("k,nm->knm", md.l_lower, np.eye(n)) - np.einsum("n,mk->knm", md.l_upper, md.g)
    return (-(1.0 - h) / md.K * np.einsum("knm,mij->knij", P, M)
            + np.einsum("nm,hmij,hk->knij", Y1, bp.riemann, tj.d1))


def t_tensor(bp, y):
    """T_kn^hm = p^2 [ (t^h_k t^m_n - t^m_k t^h_n)/2 + (1-h)/K^2 (y_k t^h t^m_n - y_n t^h t^m_k) ]."""
    y = np.asarray(y, dtype=float)
    fb = fiber(bp, y)
    h, K = fb.h, fb.K
    p2 = conformal_factor(K, h) ** 2
    tj = t_jet(bp, y, order=1)
    t, tk = tj.val, tj.d1
    yl = covariant_vector(bp, y, fb)
    skew = 0.5 * (np.einsum("hk,mn->knhm", tk, tk) - np.einsum("mk,hn->knhm", tk, tk))
    extra = (np.einsum("k,h,mn->knhm", yl, t, tk) - np.einsum("n,h,mk->knhm", yl, t, tk))
    return p2 * (skew + (1.0 - h) / (K * K) * extra)


def _T_jet(bp, y):
    """T as a first-order jet in y."""
    yj = J.lift(np.asarray(y, dtype=float), order=1)
    fb = fiber(bp, J.lift(np.asarray(y, dtype=float), order=2), guard=False)
    h = fb.h
    t2 = t_jet(bp, y, order=2)
    tk = J.Jet._make(t2.d1, t2.d2)
    t = t2.truncate(1)
    K = fb.K.truncate(1)
    p2 = J.power(K, 2.0 * (1.0 - h)) * (1.0 / (h * h))
    yl = covariant_vector(bp, yj, fiber(bp, yj, guard=False))
    skew = (J.einsum("hk,mn->knhm", tk, tk) - J.einsum("mk,hn->knhm", tk, tk)) * 0.5
    tt = J.einsum("h,mn->hmn", t, tk)
    ttk = J.einsum("h,mk->hmk", t, tk)
    extra = J.einsum("k,hmn->knhm", yl, tt) - J.einsum("n,hmk->knhm", yl, ttk)
    return (skew + extra * ((1.0 - h) * 1.0 / (K * K))) * p2


def rho_lower_tform(model, x, y):
    bp = model.at(x)
    return np.einsum("knhm,hmij->knij", t_tensor(bp, y), bp.riemann_lower)


def lower_rho(md, rho):
    return np.einsum("nm,kmij->knij", md.g, rho)


def curvature_data(model, x, y):
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    md = metric_data(bp, y)
    M = m_transitive(model, x, y)
    rho = rho_closed(model, x, y)
    return CurvatureData(M=M, E=e_tensor(model, x, y), rho=rho, T=t_tensor(bp, y),
                         rho_lower=lower_rho(md, rho), M_lower=np.einsum("nm,mij->nij", md.g, M))


def squared_norm(model, x, y):
    """(rho^knij rho_knij, right-hand side) with k, n raised by g and i, j by a."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    md = metric_data(bp, y)
    rl = lower_rho(md, rho_closed(model, x, y))
    ru = np.einsum("ka,nb,ic,jd,abcd->knij", md.ginv, md.ginv, bp.ainv, bp.ainv, rl)
    lhs = float(np.einsum("knij,knij->", ru, rl))
    Rl = bp.riemann_lower
    Ru = np.einsum("ka,nb,ic,jd,abcd->knij", bp.ainv, bp.ainv, bp.ainv, bp.ainv, Rl)
    t = t_jet(bp, y, order=1).val
    S2 = float(t @ bp.a @ t)
    h = bp.h
    # t^l a_l^{nij}: first index lowered, the rest raised
    tRu = np.einsum("l,lb,bnij->nij", t, bp.a, Ru)
    tRl = np.einsum("h,hnij->nij", t, Rl)
    rhs = (float(np.einsum("knij,knij->", Ru, Rl))
           + 2.0 / S2 * (1.0 / (h * h) - 1.0) * float(np.einsum("nij,nij->", tRu, tRl)))
    return lhs, rhs


def symmetry_residuals(model, x, y):
    bp = model.at(x)
    md = metric_data(bp, y)
    M = m_transitive(model, x, y)
    rl = lower_rho(md, rho_closed(model, x, y))
    sM = max(np.abs(M).max(), 1.0)
    sr = max(np.abs(rl).max(), 1.0)
    return {
        "M_skew_ij": np.abs(M + M.transpose(0, 2, 1)).max() / sM,
        "rho_skew_ij": np.abs(rl + rl.transpose(0, 1, 3, 2)).max() / sr,
        "rho_skew_kn": np.abs(rl + rl.transpose(1, 0, 2, 3)).max() / sr,
    }


def contraction_residuals(model, x, y):
    """y_n M^n_ij, y^k E_k^n_ij + M^n_ij, y_n E_k^n_ij - M_kij, and the symmetric part of E."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    md = metric_data(bp, y)
    M = m_transitive(model, x, y)
    E = e_tensor(model, x, y)
    Ml = np.einsum("nm,mij->nij", md.g, M)
    El = np.einsum("nm,kmij->knij", md.g, E)
    s = max(np.abs(M).max(), 1.0) * max(1.0, np.abs(md.y_lower).max())
    sE = max(np.abs(E).max(), np.abs(M).max(), 1.0)
    return {
        "yM": np.abs(np.einsum("n,nij->ij", md.y_lower, M)).max() / s,
        "yE_plus_M": np.abs(np.einsum("k,knij->nij", y, E) + M).max() / s,
        "ylowE_minus_M": np.abs(np.einsum("n,knij->kij", md.y_lower, E) - Ml).max() / s,
        "E_sym": np.abs(El + El.transpose(1, 0, 2, 3)
                        - 2.0 * np.einsum("mnh,hij->mnij", md.C, M)).max() / sE,
    }


def m_finsleroid_closed(model, x, y):
    """(B/K^2) M_nij in closed Finsleroid form (c = 1)."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    fb = fiber(bp, y)
    h, g, b, q = fb.h, fb.g, fb.b, fb.q
    v = (bp.a - np.outer(bp.b, bp.b)) @ y
    bR = np.einsum("l,nlij->nij", bp.b, bp.riemann)       # b_l a_n^l_ij
    Rl = bp.riemann_lower                                  # a_{tnij}
    return (((1.0 - h) * b + 0.5 * g * q) / h * bR
            - np.einsum("n,ij->nij", 0.5 * g / q * v + (1.0 - h) * bp.b, np.einsum("t,tij->ij", y, bR)) / h
            - np.einsum("t,tnij->nij", y, Rl))


def m_norm_closed(model, x, y):
    """(B/K^2) M^{nij} M_nij: direct contraction and closed Finsleroid form (c = 1)."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    fb = fiber(bp, y)
    md = metric_data(bp, y)
    M = m_transitive(model, x, y)
    Ml = np.einsum("nm,mij->nij", md.g, M)
    Mu = np.einsum("ia,jb,nab->nij", bp.ainv, bp.ainv, M)
    direct = fb.B / fb.K ** 2 * float(np.einsum("nij,nij->", Mu, Ml))
    h, g, b, q = fb.h, fb.g, fb.b, fb.q
    coef = ((1.0 - h) * b + 0.5 * g * q) / h
    Rl = bp.riemann_lower                                           # a_{hnij}, first index lowered
    Ru = np.einsum("ha,nb,ic,jd,abcd->hnij", bp.ainv, bp.ainv, bp.ainv, bp.ainv, Rl)
    bR_up = np.einsum("h,nhij->nij", bp.b, Ru)                      # b_h a^{nhij}
    aR_up = np.einsum("h,hnij->nij", y, np.einsum("hb,bnij->hnij", bp.a, Ru))  # a_h^{nij} y^h
    left = coef * bR_up - aR_up
    bR = np.einsum("l,nlij->nij", bp.b, bp.riemann)
    right = coef * bR - np.einsum("t,tnij->nij", y, Rl)
    return direct, float(np.einsum("nij,nij->", left, right))


# ----------------------------------------------------------------- derivative identities

def _rho_lower_field(model, z, y):
    md = metric_data(model.at(z), y)
    return lower_rho(md, rho_closed(model, z, y))


def cyclic_identities(model, x, y):
    """Residuals of the cyclic identities of M and rho and of the parallelism of T.

    The covariant derivatives of M and rho are evaluated both by their
    defining operators (x finite differences, y jets) and by the transitive
    forms built from the background derivative nabla a.
    """
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    cd = connection_data(model, x, y)
    N, D = cd.N, cd.D
    G = bp.gamma
    tj = t_jet(bp, y, order=1)
    Y1 = np.linalg.inv(tj.d1)
    nR = bp.nabla_riemann                                           # [l, h, t, i, j]
    out = {}

    # D_l M^n_ij, transitive form: -y^n_t t^h nabla_l a_h^t_ij  -> [n, i, j, l]
    DM_t = -np.einsum("nt,h,lhtij->nijl", Y1, tj.val, nR)
    M = m_transitive(model, x, y)
    E = e_tensor(model, x, y)
    dMx = xderiv(lambda z: m_transitive(model, z, y), x)            # [n, i, j, l]
    dM = dMx + np.einsum("knij,kl->nijl", -E, N)
    DM = (dM + np.einsum("nlt,tij->nijl", D, M)
          - np.einsum("sli,nsj->nijl", G, M) - np.einsum("slj,nis->nijl", G, M))
    sM = max(np.abs(DM_t).max(), 1.0)
    out["DM_routes"] = np.abs(DM - DM_t).max() / max(sM, np.abs(M).max())
    out["M_cyclic"] = np.abs(_cyclic_M(DM)).max() / max(sM, np.abs(M).max(), 1.0)
    out["M_cyclic_transitive"] = np.abs(_cyclic_M(DM_t)).max() / max(sM, np.abs(M).max(), 1.0)

    # rho: D_l rho_knij = T_kn^hm nabla_l a_hmij
    T = t_tensor(bp, y)
    nRl = np.einsum("mr,lhrij->lhmij", bp.a, nR)                    # nabla_l a_hmij
    Drho_t = np.einsum("knhm,lhmij->knijl", T, nRl)
    rl = _rho_lower_field(model, x, y)
    drx = xderiv(lambda z: _rho_lower_field(model, z, y), x)       # [k, n, i, j, l]
    drho_dy = _rho_lower_yjac(model, x, y)                          # [k, n, i, j, m]
    dr = drx + np.einsum("knijm,ml->knijl", drho_dy, N)
    Drho = (dr - np.einsum("tlk,tnij->knijl", D, rl) - np.einsum("tln,ktij->knijl", D, rl)
            - np.einsum("sli,knsj->knijl", G, rl) - np.einsum("slj,knis->knijl", G, rl))
    sr = max(np.abs(rl).max(), 1.0)
    out["Drho_routes"] = np.abs(Drho - Drho_t).max() / sr
    out["rho_cyclic"] = np.abs(_cyclic_rho(Drho)).max() / sr
    out["rho_cyclic_transitive"] = np.abs(_cyclic_rho(Drho_t)).max() / sr

    # parallelism of T (lower k, n with D; upper h, m with the background connection)
    Tj = _T_jet(bp, y)
    dTx = xderiv(lambda z: t_tensor(model.at(z), y), x)            # [k, n, h, m, l]
    dT = dTx + np.einsum("knhmr,rl->knhml", Tj.d1, N)
    DT = (dT - np.einsum("slk,snhm->knhml", D, T) - np.einsum("sln,kshm->knhml", D, T)
          + np.einsum("hls,knsm->knhml", G, T) + np.einsum("mls,knhs->knhml", G, T))
    out["DT"] = np.abs(DT).max() / max(np.abs(T).max(), 1.0)
    return out


def _cyclic_M(DM):
    # DM[n, i, j, k] = D_k M^n_ij; sum D_k M^n_ij + D_j M^n_ki + D_i M^n_jk
    return (DM + np.einsum("nkij->nijk", DM) + np.einsum("njki->nijk", DM))


def _cyclic_rho(Dr):
    # Dr[k, n, i, j, l] = D_l rho_knij; sum D_l rho_knij + D_j rho_knli + D_i rho_knjl
    return (Dr + np.einsum("knlij->knijl", Dr) + np.einsum("knjli->knijl", Dr))


def _rho_lower_yjac(model, x, y):
    """d rho_knij / dy^m from jets of the closed form."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    yj2 = J.lift(y, order=2)
    yl2 = covariant_vector(bp, J.lift(y, order=3), None)
    g = J.Jet._make(yl2.d1, yl2.d2)
    yj = yj2.truncate(1)
    fb = fiber(bp, yj, guard=False)
    K = fb.K
    l_lo = covariant_vector(bp, yj, fb) / K
    h = bp.h
    t2 = t_jet(bp, y, order=2)
    tk = J.Jet._make(t2.d1, t2.d2)
    Y1 = J.inv(tk)
    t = t2.truncate(1)
    M = -J.einsum("nt,tij->nij", Y1, J.einsum("h,htij->tij", t, bp.riemann))
    Ml = J.einsum("nm,mij->nij", g, M)
    n = bp.dim
    term1 = (J.einsum("k,nij->knij", l_lo, Ml) - J.einsum("n,kij->knij", l_lo, Ml)) \
        * ((h - 1.0) * 1.0 / K)
    p2 = J.power(K, 2.0 * (1.0 - h)) * (1.0 / (h * h))
    tRl = J.einsum("hk,hlij->klij", tk, bp.riemann_lower)
    term2 = J.einsum("klij,ln->knij", tRl, tk) * p2
    return (term1 + term2).d1


# ----------------------------------------------------------------- commutator and transitivity

def _test_field(z, y):
    """A (1,1) test tensor w^n_k(x, y): polynomial in y, trigonometric in x."""
    n = len(J.value(y))
    idx = np.arange(n)
    A0 = np.cos(0.3 * (idx[:, None] + 2.0 * idx[None, :]) + 0.1)
    A1 = np.sin(0.7 * (idx[:, None, None] - idx[None, :, None] + 0.5 * idx[None, None, :]) + 0.2)
    A2 = np.cos(0.5 * (idx[:, None, None, None] + idx[None, :, None, None]
                       - idx[None, None, :, None] + 1.3 * idx[None, None, None, :]))
    zv = z if isinstance(z, J.Jet) else np.asarray(z, dtype=float)
    s1 = J.sin(J.einsum("i,i->", 0.4 + 0.2 * idx, zv)) if isinstance(zv, J.Jet) \
        else np.sin(float(np.dot(0.4 + 0.2 * idx, zv)))
    c1 = J.cos(J.einsum("i,i->", 0.3 - 0.1 * idx, zv)) if isinstance(zv, J.Jet) \
        else np.cos(float(np.dot(0.3 - 0.1 * idx, zv)))
    if isinstance(y, J.Jet):
        lin = J.einsum("nkl,l->nk", A1, y)
        quad = J.einsum("nkl,l->nk", J.einsum("nklm,m->nkl", A2, y), y)
    else:
        lin = np.einsum("nkl,l->nk", A1, y)
        quad = np.einsum("nklm,l,m->nk", A2, y, y)
    return A0 * c1 + lin * s1 + quad * 0.3


def _field_Dw(model, z, y):
    """D_j w^n_k at (z, y) for the test field, as a first-order y-jet indexed [n, k, j]."""
    bp = model.at(z)
    wj = _test_field(z, J.lift(y, order=2))
    w = wj.truncate(1)
    dwdy = J.Jet._make(wj.d1, wj.d2)
    dwdx = xderiv(lambda zz: _test_field(zz, J.lift(y, order=1)), z)
    Nj = n_closed_jet(bp, y, order=2)
    Dj = J.Jet._make(-Nj.d1, -Nj.d2)
    return (dwdx + J.einsum("nkm,mj->nkj", dwdy, Nj.truncate(1))
            + J.einsum("njh,hk->nkj", Dj, w) - J.einsum("hjk,nh->nkj", Dj, w))


def commutator_residual(model, x, y):
    """Residual of the commutation formula for D on a (1,1) test tensor field."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)
    cd = connection_data(model, x, y)
    N, D = cd.N, cd.D
    md = metric_data(bp, y)
    V = _field_Dw(model, x, y)                                   # jet [n, k, j]
    dVx = xderiv(lambda z: J.value(_field_Dw(model, z, y)), x)   # [n, k, j, i]
    DV = (dVx + np.einsum("nkjm,mi->nkji", V.d1, N)
          + np.einsum("nih,hkj->nkji", D, V.val) - np.einsum("hik,nhj->nkji", D, V.val))
    lhs = DV.transpose(0, 1, 3, 2) - DV                             # [n, k, i, j]: D_i D_j - D_j D_i
    wj = _test_field(x, J.lift(y, order=1))
    w = wj.val
    Cm = md.C_mixed
    Sw = wj.d1 + np.einsum("nhl,lk->nkh", Cm, w) - np.einsum("mhk,nm->nkh", Cm, w)
    M = m_transitive(model, x, y)
    rho = rho_closed(model, x, y)
    rhs = (np.einsum("hij,nkh->nkij", M, Sw) - np.einsum("khij,nh->nkij", rho, w)
           + np.einsum("hnij,hk->nkij", rho, w))
    return np.abs(lhs - rhs).max() / max(np.abs(rhs).max(), np.abs(w).max())


def _W_field(z, t):
    """A (1,1) tensor W^h_j(x, t) on the background side."""
    return _test_field(z, t)


def transitivity_residual(model, x, y):
    """D_i w^n_m - y^n_h t^j_m nabla_i W^h_j for w = y^n_h t^j_m W^h_j."""
    bp = model.at(x)
    y = np.asarray(y, dtype=float)

    def w_of(z, yv):
        b = model.at(z)
        t2 = t_jet(b, yv.val if isinstance(yv, J.Jet) else yv,
                   order=(yv.order + 1) if isinstance(yv, J.Jet) else 1)
        if isinstance(yv, J.Jet):
            tk = J.Jet._make(t2.d1, *([t2.d2] if yv.order >= 1 else []))
            Y = J.inv(tk)
            W = _W_field(z, t2.truncate(yv.order))
            return J.einsum("nh,hm->nm", Y, J.einsum("hj,jm->hm", W, tk))
        Y = np.linalg.inv(t2.d1)
        return Y @ _W_field(z, t2.val) @ t2.d1

    cd = connection_data(model, x, y)
    N, D = cd.N, cd.D
    wj = w_of(x, J.lift(y, order=1))
    dwx = xderiv(lambda z: w_of(z, y), x)                           # [n, m, i]
    Dw = (dwx + np.einsum("nmk,ki->nmi", wj.d1, N)
          + np.einsum("nih,hm->nmi", D, wj.val) - np.einsum("him,nh->nmi", D, wj.val))
    tj = t_jet(bp, y, order=1)
    t = tj.val
    Wj = _W_field(x, J.lift(t, order=1))
    dWx = xderiv(lambda z: _W_field(z, t), x)                       # [h, j, i]
    L = -np.einsum("kih,h->ki", bp.gamma, t)
    G = bp.gamma
    nW = (dWx + np.einsum("hjk,ki->hji", Wj.d1, L)
          + np.einsum("hsi,sj->hji", G, Wj.val) - np.einsum("sji,hs->hji", G, Wj.val))
    Y1 = np.linalg.inv(tj.d1)
    rhs = np.einsum("nh,jm,hji->nmi", Y1, tj.d1, nW)
    return np.abs(Dw - rhs).max() / max(np.abs(rhs).max(), np.abs(wj.val).max())
