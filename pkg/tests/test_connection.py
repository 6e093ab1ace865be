import numpy as np
import pytest

from conftest import MODEL_IDS, model, samples
from finslerangle import connection as C
from finslerangle.errors import PoleProximity


def _scaled(a, b):
    return np.abs(a - b).max() / max(1.0, np.abs(b).max())


def test_flat_constant_axis_has_zero_coefficients():
    m = model("i", g=1.3)
    for s in samples(m, 3):
        assert not C.n_coeffs_closed(m, s.x, s.y1).any()
        cd = C.connection_data(m, s.x, s.y1)
        assert not cd.N3.any()


@pytest.mark.parametrize("mid", MODEL_IDS)
def test_zero_charge_is_levi_civita(mid):
    m = model(mid, g=0.0)
    for s in samples(m, 3):
        bp = m.at(s.x)
        ref = -np.einsum("mih,h->mi", bp.gamma, s.y1)
        assert np.allclose(C.n_coeffs_closed(m, s.x, s.y1), ref, atol=1e-13)


@pytest.mark.parametrize("mid", ["ii", "iii", "iv"])
@pytest.mark.parametrize("c", [1.0, 0.6])
def test_routes_agree(mid, c):
    m = model(mid, c=c, g=1.1)
    for s in samples(m, 4):
        N = C.n_coeffs_closed(m, s.x, s.y1)
        assert _scaled(N, C.n_coeffs_transitivity(m, s.x, s.y1)) < 1e-6
        assert _scaled(N, C.n_coeffs_angle_solution(m, s.x, s.y1)) < 1e-6


@pytest.mark.parametrize("mid", ["ii", "iv"])
def test_assembled_form_unit_axis(mid):
    m = model(mid, g=-0.9)
    for s in samples(m, 4):
        assert _scaled(C.n_coeffs_assembled(m, s.x, s.y1), C.n_coeffs_closed(m, s.x, s.y1)) < 1e-12


@pytest.mark.parametrize("mid", ["ii", "iii", "iv"])
@pytest.mark.parametrize("c", [1.0, 0.6])
def test_covariant_suite_vanishes(mid, c):
    m = model(mid, c=c, g=1.2)
    for s in samples(m, 2):
        res = C.covariant_suite(m, s.x, s.y1)
        assert set(res) == {"D_K", "D_y_lower", "D_g", "D_t", "D_t_jac", "D_deformation",
                            "D_y_jac", "N3_plus_DC"}
        assert max(res.values()) < 1e-6, res


@pytest.mark.parametrize("c", [1.0, 0.6])
def test_second_derivative_identities(c):
    m = model("iv", c=c, g=1.5)
    for s in samples(m, 4):
        res = C.second_derivative_identities(m, s.x, s.y1)
        assert res["y_N3"] < 1e-12
        assert res["N3_symmetry"] < 1e-12


def test_n_homogeneous_and_d_relation():
    m = model("iii", g=0.8)
    s = samples(m, 1)[0]
    N = C.n_coeffs_closed(m, s.x, s.y1)
    assert np.allclose(C.n_coeffs_closed(m, s.x, 1.7 * s.y1), 1.7 * N, atol=1e-13)
    cd = C.connection_data(m, s.x, s.y1)
    assert np.allclose(cd.D, -cd.N2)
    # Euler: N2 contracted with y returns N
    assert np.allclose(np.einsum("kmn,n->km", cd.N2, s.y1), N, atol=1e-13)
    assert np.allclose(np.einsum("kmnj,j->kmn", cd.N3, s.y1), 0, atol=1e-12)


def test_n_derivatives_against_finite_differences():
    m = model("ii", g=1.0)
    s = samples(m, 1)[0]
    N2, N3 = C.n_derivatives(m, s.x, s.y1)
    h = 1e-5
    fd = np.stack([(C.n_coeffs_closed(m, s.x, s.y1 + h * e) - C.n_coeffs_closed(m, s.x, s.y1 - h * e))
                   / (2 * h) for e in np.eye(3)], axis=-1)
    assert np.allclose(N2, fd, atol=1e-8)


@pytest.mark.parametrize("mid", ["ii", "iv"])
def test_contraction_identities_unit_axis(mid):
    m = model(mid, g=1.3)
    for s in samples(m, 3):
        res = C.contraction_identities(m, s.x, s.y1)
        assert max(v for k, v in res.items() if k != "d_B") < 1e-12
        assert res["d_B"] < 1e-7


@pytest.mark.parametrize("c", [1.0, 0.6])
def test_orthogonality(c):
    m = model("iv", c=c, g=1.0)
    for s in samples(m, 3):
        assert max(C.orthogonality(m, s.x, s.y1).values()) < 1e-12


@pytest.mark.parametrize("mid", MODEL_IDS)
def test_angle_equation(mid):
    m = model(mid, g=1.2)
    for s in samples(m, 3):
        assert np.abs(C.angle_equation_residual(m, s.x, s.y1, s.y2)).max() < 1e-6


def test_pole_guard():
    m = model("ii", g=0.5)
    bp = m.at(np.zeros(3))
    with pytest.raises(PoleProximity):
        C.n_coeffs_closed(m, np.zeros(3), bp.b_up)
