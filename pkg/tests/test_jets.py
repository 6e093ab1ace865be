import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslerangle import jets as J

coords = st.floats(-1.5, 1.5, allow_nan=False)


def _fd_grad(fn, v, h=1e-6):
    out = []
    for i in range(len(v)):
        e = np.zeros(len(v))
        e[i] = h
        out.append((fn(v + e) - fn(v - e)) / (2 * h))
    return np.array(out)


def _scalar_fn(y):
    r = J.sqrt(y[0] * y[0] + y[1] * y[1] + 1.0)
    return J.exp(y[2] * 0.3) * J.arctan2(y[1], y[0] + 2.0) / r + J.sin(y[0] * y[2])


def test_lift_identity_and_zero_higher():
    j = J.lift(np.array([1.0, 2.0, 3.0]), order=3)
    assert np.array_equal(j.d1, np.eye(3))
    assert not j.d2.any() and not j.d3.any()


def test_single_seed_lift():
    j = J.lift(np.array([1.0, 2.0]), seed=1)
    assert j.d1.shape == (2, 1)
    assert j.d1[1, 0] == 1.0 and j.d1[0, 0] == 0.0


def test_bad_order_rejected():
    with pytest.raises(ValueError):
        J.lift(np.zeros(3), order=4)


def test_constructor_checks_symmetry():
    d2 = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(AssertionError):
        J.Jet(1.0, np.zeros(2), d2)


def test_constructor_checks_shapes():
    with pytest.raises(ValueError):
        J.Jet(np.zeros(2), np.zeros(3))


def test_polynomial_derivatives_exact():
    # f = x^2 y + y^3 at (2, 3)
    j = J.lift(np.array([2.0, 3.0]), order=3)
    f = j[0] * j[0] * j[1] + j[1] * j[1] * j[1]
    assert f.val == 4 * 3 + 27
    assert np.allclose(f.d1, [2 * 2 * 3, 4 + 27])
    assert np.allclose(f.d2, [[6, 4], [4, 18]])
    d3 = np.zeros((2, 2, 2))
    d3[0, 0, 1] = d3[0, 1, 0] = d3[1, 0, 0] = 2
    d3[1, 1, 1] = 6
    assert np.allclose(f.d3, d3)


@given(st.tuples(coords, coords, coords))
def test_gradient_matches_finite_differences(v):
    v = np.array(v)
    f = _scalar_fn(J.lift(v, order=3))
    g = _fd_grad(lambda z: _scalar_fn(z), v)
    assert np.allclose(f.d1, g, atol=1e-7)
    H = _fd_grad(lambda z: _scalar_fn(J.lift(z, order=1)).d1, v)
    assert np.allclose(f.d2, H, atol=1e-6)
    T = _fd_grad(lambda z: _scalar_fn(J.lift(z, order=2)).d2, v)
    assert np.allclose(f.d3, T, atol=1e-5)


@given(st.floats(0.2, 3.0), st.floats(-2.0, 2.0))
def test_elementary_functions(u, p):
    x = J.lift(np.array([u]), order=3)[0]
    cases = [
        (J.exp(x), [math.exp(u)] * 4),
        (J.log(x), [math.log(u), 1 / u, -1 / u ** 2, 2 / u ** 3]),
        (J.sqrt(x), [u ** 0.5, 0.5 * u ** -0.5, -0.25 * u ** -1.5, 0.375 * u ** -2.5]),
        (J.power(x, p), [u ** p, p * u ** (p - 1), p * (p - 1) * u ** (p - 2),
                         p * (p - 1) * (p - 2) * u ** (p - 3)]),
        (J.sin(x), [math.sin(u), math.cos(u), -math.sin(u), -math.cos(u)]),
        (J.arctan(x), [math.atan(u), 1 / (1 + u * u), -2 * u / (1 + u * u) ** 2,
                       (6 * u * u - 2) / (1 + u * u) ** 3]),
    ]
    for jet, ref in cases:
        got = [float(jet.val), float(jet.d1[0]), float(jet.d2[0, 0]), float(jet.d3[0, 0, 0])]
        assert np.allclose(got, ref, rtol=1e-12, atol=1e-12)


def test_arccos_and_reciprocal():
    x = J.lift(np.array([0.3]), order=2)[0]
    a = J.arccos(x)
    assert a.val == pytest.approx(math.acos(0.3))
    assert a.d1[0] == pytest.approx(-1 / math.sqrt(1 - 0.09))
    r = J.reciprocal(x)
    assert r.d2[0, 0] == pytest.approx(2 / 0.3 ** 3)


def test_arctan2_all_quadrants():
    for y, x in [(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (0.5, -2.0)]:
        j = J.lift(np.array([y, x]), order=1)
        a = J.arctan2(j[0], j[1])
        assert float(a.val) == pytest.approx(math.atan2(y, x))
        r2 = x * x + y * y
        assert np.allclose(a.d1, [x / r2, -y / r2])


@given(st.tuples(coords, coords, coords), st.tuples(coords, coords, coords))
def test_product_rule(u, v):
    yj = J.lift(np.array(u) + 2.0, order=2)
    a = J.sin(yj[0]) + yj[1]
    b = J.exp(yj[2] * 0.5)
    p = a * b
    assert np.allclose(p.d1, a.d1 * b.val + a.val * b.d1)


def test_einsum_and_solve():
    rng = np.random.default_rng(0)
    v = rng.normal(size=3)
    yj = J.lift(v, order=2)
    M = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    q = J.einsum("i,ij,j->", yj, M, yj)
    assert np.allclose(q.d1, (M + M.T) @ v)
    assert np.allclose(q.d2, M + M.T)
    T = J.einsum("ij,j->i", M, yj) * 1.0
    A = J.einsum("i,j->ij", T, T) + constant_eye(3)
    x = J.solve(A, T)
    assert np.allclose(J.einsum("ij,j->i", A, x).val, T.val)
    Ainv = J.inv(A)
    assert np.allclose(J.einsum("ij,jk->ik", A, Ainv).val, np.eye(3))
    assert np.allclose(J.einsum("ij,jk->ik", A, Ainv).d1, 0, atol=1e-12)


def constant_eye(n):
    return J.constant(np.eye(n), n, 2)


def test_plain_inputs_pass_through():
    assert J.sqrt(4.0) == 2.0
    assert np.allclose(J.exp(np.array([0.0, 1.0])), [1.0, math.e])
    assert J.value(3.0) == 3.0


def test_stack_and_truncate():
    yj = J.lift(np.array([1.0, 2.0]), order=3)
    s = J.stack([yj[0] * yj[1], yj[0]])
    assert s.shape == (2,) and s.order == 3
    assert s.truncate(1).d2 is None
