import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import MODEL_IDS, model
from finslerangle import background as B
from finslerangle.errors import ConfigError, SingularMetric

pts = st.tuples(*[st.floats(-0.5, 0.5) for _ in range(3)]).map(np.array)


def _christoffel_oracle(metric, x, h=1e-5):
    """Christoffel symbols a^i_kn from central differences of the metric alone."""
    n = len(x)
    da = np.zeros((n, n, n))
    for m in range(n):
        e = np.zeros(n)
        e[m] = h
        da[:, :, m] = (metric(x + e) - metric(x - e)) / (2 * h)
    ainv = np.linalg.inv(metric(x))
    low = 0.5 * (np.einsum("jkn->jkn", da) + np.einsum("jnk->jkn", da) - np.einsum("knj->jkn", da))
    return np.einsum("ij,jkn->ikn", ainv, low)


def test_flat_christoffel_zero():
    m = model("i")
    assert not B.christoffel(m, np.array([0.3, -0.2, 0.1])).any()
    assert not B.riemann(m, np.array([0.3, -0.2, 0.1])).any()


def _phi_metric(xj):
    # a = exp(2 phi) delta with phi = 0.1 x^1
    if isinstance(xj, B.J.Jet):
        return B.J.exp(xj[0] * 0.2) * np.eye(3)
    return math.exp(0.2 * xj[0]) * np.eye(3)


def _phi_bfield(xj):
    # b_i = exp(0.1 x^1) e_1 has unit a-norm
    if isinstance(xj, B.J.Jet):
        return B.J.stack([B.J.exp(xj[0] * 0.1), xj[1] * 0.0, xj[2] * 0.0])
    return np.array([math.exp(0.1 * xj[0]), 0.0, 0.0])


def test_conformal_christoffel_matches_oracle():
    m = B.BackgroundModel("phi", 3, 1.0, 0.5, _phi_metric, _phi_bfield)
    x = np.array([0.4, -0.1, 0.2])
    ref = _christoffel_oracle(lambda z: math.exp(0.2 * z[0]) * np.eye(3), x)
    assert np.allclose(B.christoffel(m, x), ref, atol=1e-8)
    # closed form: a^i_kn = 0.1 (delta^i_k e_n + delta^i_n e_k - delta_kn e^i) with e = e_1
    e = np.array([1.0, 0.0, 0.0])
    I = np.eye(3)
    closed = 0.1 * (np.einsum("ik,n->ikn", I, e) + np.einsum("in,k->ikn", I, e)
                    - np.einsum("kn,i->ikn", I, e))
    assert np.allclose(B.christoffel(m, x), closed, atol=1e-14)


@pytest.mark.parametrize("mid", MODEL_IDS)
@given(x=pts)
def test_christoffel_matches_metric_oracle(mid, x):
    m = model(mid)
    ref = _christoffel_oracle(m.metric, x)
    assert np.allclose(B.christoffel(m, x), ref, atol=1e-8)


@pytest.mark.parametrize("mid", MODEL_IDS)
@given(x=pts)
def test_axis_length_and_metricity(mid, x):
    m = model(mid, c=0.7)
    bp = m.at(x)
    assert float(bp.b @ bp.ainv @ bp.b) == pytest.approx(0.49, abs=1e-10)
    assert np.abs(B.nabla_metric(m, x)).max() < 1e-10
    assert np.all(np.linalg.eigvalsh(bp.a) > 0)


@given(x=pts)
def test_sphere_constant_curvature_and_parallel(x):
    kappa = 0.5
    m = model("iv", curvature=kappa)
    bp = m.at(x)
    a = bp.a
    R = bp.riemann_lower                                   # a_nikm = a_ir a_n^r_km
    ref = -kappa * (np.einsum("nk,im->nikm", a, a) - np.einsum("nm,ik->nikm", a, a))
    assert np.allclose(R, ref, atol=1e-10)
    assert np.abs(bp.nabla_riemann).max() < 1e-10


@pytest.mark.parametrize("mid", MODEL_IDS)
def test_riemann_symmetries_and_bianchi(mid):
    m = model(mid)
    x = np.array([0.21, -0.33, 0.12])
    R = m.at(x).riemann_lower
    s = max(1.0, np.abs(R).max())
    assert np.abs(R + R.transpose(1, 0, 2, 3)).max() < 1e-10 * s
    assert np.abs(R + R.transpose(0, 1, 3, 2)).max() < 1e-10 * s
    assert np.abs(R - R.transpose(2, 3, 0, 1)).max() < 1e-10 * s
    nR = m.at(x).nabla_riemann                            # [l, h, t, i, j]
    cyc = nR + np.einsum("lhtij->ihtjl", nR) + np.einsum("lhtij->jhtli", nR)
    assert np.abs(cyc).max() < 1e-9


@pytest.mark.parametrize("mid", ["iii", "iv"])
def test_nabla_riemann_analytic_vs_fd(mid):
    m = model(mid)
    x = np.array([0.1, 0.2, -0.3])
    a = B.nabla_riemann(m, x, "analytic")
    f = B.nabla_riemann(m, x, "fd")
    assert np.abs(a - f).max() < 1e-7


def test_riemannian_transport_preserves_norm_and_angle():
    m = model("iv")
    curve = B.circle([0.1, 0.0, 0.1], 0.4)
    T = np.array([[1.0, 0.2, -0.3], [0.1, -0.5, 0.9]])
    a0 = B.riemannian_angle(m, curve.x(0.0), T[0], T[1])
    S0 = float(T[0] @ m.at(curve.x(0.0)).a @ T[0])
    n = 400
    hs = 1.0 / n

    def f(s, T):
        return np.array([B.riem_transport_coeffs(m, curve.x(s), t) @ curve.xdot(s) for t in T])

    for k in range(n):
        s = k * hs
        k1 = f(s, T)
        k2 = f(s + hs / 2, T + hs / 2 * k1)
        k3 = f(s + hs / 2, T + hs / 2 * k2)
        k4 = f(s + hs, T + hs * k3)
        T = T + hs / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    a = m.at(curve.x(1.0)).a
    assert float(T[0] @ a @ T[0]) == pytest.approx(S0, rel=1e-9)
    assert B.riemannian_angle(m, curve.x(1.0), T[0], T[1]) == pytest.approx(a0, abs=1e-9)


def test_parameter_gates():
    with pytest.raises(ConfigError, match=r"g out of \(-2,2\)"):
        model("i", g=2.5)
    with pytest.raises(ConfigError):
        model("i", c=1.2)
    with pytest.raises(ConfigError):
        model("i", dim=2)
    with pytest.raises(ConfigError):
        B.make_model("v")


def test_singular_metric_detected():
    m = B.BackgroundModel("bad", 3, 1.0, 0.5, lambda xj: np.diag([1.0, -1.0, 1.0]) if not isinstance(
        xj, B.J.Jet) else B.J.constant(np.diag([1.0, -1.0, 1.0]), xj.n, xj.order),
        lambda xj: np.array([1.0, 0, 0]) if not isinstance(xj, B.J.Jet) else B.J.constant(
            np.array([1.0, 0, 0]), xj.n, xj.order))
    with pytest.raises(SingularMetric):
        m.at(np.zeros(3))


def test_curves_velocity_consistent():
    from finslerangle.transport import check_curve
    assert check_curve(B.circle([0.0, 0.1, 0.0], 0.7, (1, 2))) < 1e-8
    assert check_curve(B.segment([0, 0, 0], [1, 2, 3])) < 1e-8


def test_four_dimensional_models():
    for mid in MODEL_IDS:
        m = model(mid, dim=4)
        bp = m.at(np.array([0.1, 0.2, -0.1, 0.3]))
        assert float(bp.b @ bp.ainv @ bp.b) == pytest.approx(1.0, abs=1e-12)
