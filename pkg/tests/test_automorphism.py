import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import MODEL_IDS, model, samples
from finslerangle import automorphism as A
from finslerangle import finsleroid as F
from finslerangle.errors import ConfigError, PoleProximity

vec3 = st.tuples(*[st.floats(-2.0, 2.0) for _ in range(3)]).map(np.array)


def _admissible(bp, y):
    s2 = float(y @ bp.a @ y)
    bt = float(bp.b @ y) / bp.c
    return s2 > 1e-2 and s2 - bt * bt > 1e-4 * s2


@pytest.mark.parametrize("mid", MODEL_IDS)
@pytest.mark.parametrize("c", [1.0, 0.6])
def test_conformality(mid, c):
    m = model(mid, c=c, g=1.3)
    for s in samples(m, 5):
        assert A.conformality_residual(m, s.x, s.y1) < 1e-12


@pytest.mark.parametrize("mid", MODEL_IDS)
@given(y=vec3, g=st.floats(-1.9, 1.9))
def test_norm_power_and_round_trip(mid, y, g):
    m = model(mid, g=g, c=0.8)
    x = np.array([0.2, -0.1, 0.15])
    bp = m.at(x)
    assume(_admissible(bp, y))
    t = A.t_map(m, x, y)
    K = F.K_value(m, x, y)
    assert A.background_norm(bp, t) == pytest.approx(K ** bp.h, rel=1e-13)
    y_back, _, it = A.inverse_point(bp, t)
    assert np.abs(y_back - y).max() < 1e-10 * max(1.0, np.abs(y).max())
    assert it <= 5


def test_unit_vectors_to_unit_vectors():
    m = model("iv", g=-1.4)
    for s in samples(m, 5):
        bp = m.at(s.x)
        y = s.y1 / F.K_value(m, s.x, s.y1)
        assert A.background_norm(bp, A.t_map(m, s.x, y)) == pytest.approx(1.0, abs=1e-13)


def test_identity_at_zero_charge():
    m = model("iii", g=0.0)
    for s in samples(m, 3):
        assert np.allclose(A.t_map(m, s.x, s.y1), s.y1, atol=1e-14)
        assert np.allclose(A.t_jacobian(m, s.x, s.y1), np.eye(3), atol=1e-13)


def test_zero_charge_short_axis_is_rescaled_riemannian():
    # g = 0, c < 1: K^2 = b^2 + qt^2 is quadratic but differs from a along the axis
    m = model("iii", g=0.0, c=0.7)
    for s in samples(m, 3):
        bp = m.at(s.x)
        md = F.metric_data(bp, s.y1)
        ref = bp.a + (1.0 - 1.0 / 0.49) * np.outer(bp.b, bp.b)
        assert np.allclose(md.g, ref, atol=1e-13)
        assert np.abs(md.C).max() < 1e-13


def test_t_homogeneous_of_degree_h():
    m = model("ii", g=1.2)
    x = np.array([0.1, 0.4, -0.2])
    y = np.array([0.3, -1.0, 0.8])
    assert np.allclose(A.t_map(m, x, 2.5 * y), 2.5 ** m.h * A.t_map(m, x, y), rtol=1e-13)


def test_frame_expansion_reconstructs_t():
    m = model("iv", g=0.9)
    for s in samples(m, 5):
        assert np.allclose(A.frame_reconstruction(m, s.x, s.y1), A.t_map(m, s.x, s.y1), atol=1e-12)


def test_frame_expansion_axis_coefficients():
    # y along the direction orthogonal to b on the flat model: b = 0, q = |y|
    m = model("i", g=1.2)
    T1, T2 = A.frame_expansion(m, np.zeros(3), np.array([0.0, 1.0, 0.0]))
    h, g = m.h, m.g
    assert T1 == pytest.approx(-(1 - h) + 1 + 0.5 * g * g)
    assert T2 == pytest.approx(0.5 * g)


def test_frame_expansion_requires_unit_axis():
    with pytest.raises(ConfigError):
        A.frame_expansion(model("i", c=0.5), np.zeros(3), np.array([0.1, 1.0, 0.0]))


def test_inverse_data_derivatives():
    m = model("iii", g=1.1)
    s = samples(m, 1)[0]
    bp = m.at(s.x)
    t = A.t_map(m, s.x, s.y1)
    inv = A.inverse_data(bp, t)
    h = 1e-5
    fd1 = np.stack([(A.inverse_map(m, s.x, t + h * e) - A.inverse_map(m, s.x, t - h * e)) / (2 * h)
                    for e in np.eye(3)], axis=1)
    assert np.allclose(inv.Y1, fd1, atol=1e-8)

    def Y1(tt):
        return A.inverse_data(bp, tt).Y1

    fd2 = np.stack([(Y1(t + h * e) - Y1(t - h * e)) / (2 * h) for e in np.eye(3)], axis=2)
    assert np.allclose(inv.Y2, fd2, atol=1e-7)


def test_deformation_tensor():
    m = model("iv", g=0.8)
    s = samples(m, 1)[0]
    K = F.K_value(m, s.x, s.y1)
    D = A.deformation_tensor(m, s.x, s.y1)
    assert np.allclose(D, K ** (1 - m.h) / m.h * A.t_jacobian(m, s.x, s.y1), rtol=1e-14)
    assert A.conformal_factor(K, m.h) == pytest.approx(K ** (1 - m.h) / m.h)


def test_inverse_rejects_axis_targets():
    m = model("i", g=0.5)
    with pytest.raises(PoleProximity):
        A.inverse_map(m, np.zeros(3), np.array([1.0, 0.0, 0.0]))


def test_evaluate_bundle():
    m = model("ii", g=1.0)
    s = samples(m, 1)[0]
    ev = A.evaluate(m, s.x, s.y1)
    assert ev.sin_rho ** 2 + ev.cos_rho ** 2 == pytest.approx(1.0)
    assert ev.S == pytest.approx(F.K_value(m, s.x, s.y1) ** m.h)
    assert math.isfinite(ev.T1) and math.isfinite(ev.T2)
