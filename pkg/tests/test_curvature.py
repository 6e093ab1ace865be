import numpy as np
import pytest

from conftest import model, samples
from finslerangle import curvature as Cu
from finslerangle.finsleroid import metric_data


def _scaled(a, b):
    return np.abs(a - b).max() / max(1.0, np.abs(b).max())


def test_flat_models_have_no_curvature():
    for mid in ("i", "ii"):
        m = model(mid, g=1.0)
        s = samples(m, 1)[0]
        assert np.abs(Cu.m_transitive(m, s.x, s.y1)).max() < 1e-14
        assert np.abs(Cu.rho_closed(m, s.x, s.y1)).max() < 1e-14
        assert np.abs(Cu.m_definition(m, s.x, s.y1)).max() < 1e-7


def test_zero_charge_reduces_to_riemann():
    m = model("iv", g=0.0)
    for s in samples(m, 3):
        bp = m.at(s.x)
        M = Cu.m_transitive(m, s.x, s.y1)
        assert np.allclose(M, -np.einsum("h,hnij->nij", s.y1, bp.riemann), atol=1e-13)
        rho = Cu.rho_closed(m, s.x, s.y1)
        assert np.allclose(rho, bp.riemann, atol=1e-13)


@pytest.mark.parametrize("mid", ["iii", "iv"])
@pytest.mark.parametrize("c", [1.0, 0.6])
def test_routes(mid, c):
    m = model(mid, c=c, g=1.1)
    for s in samples(m, 2):
        Mt = Cu.m_transitive(m, s.x, s.y1)
        assert _scaled(Cu.m_definition(m, s.x, s.y1), Mt) < 1e-6
        E = Cu.e_tensor(m, s.x, s.y1)
        assert _scaled(Cu.e_definition(m, s.x, s.y1), E) < 1e-6
        assert _scaled(Cu.e_transitive(m, s.x, s.y1), E) < 1e-10
        rho = Cu.rho_closed(m, s.x, s.y1)
        assert _scaled(Cu.rho_definition(m, s.x, s.y1), rho) < 1e-6
        md = metric_data(m, s.x, s.y1)
        assert _scaled(Cu.lower_rho(md, rho), Cu.rho_lower_tform(m, s.x, s.y1)) < 1e-12


@pytest.mark.parametrize("c", [1.0, 0.6])
def test_symmetries_and_contractions(c):
    m = model("iv", c=c, g=-1.3)
    for s in samples(m, 3):
        assert max(Cu.symmetry_residuals(m, s.x, s.y1).values()) < 1e-12
        assert max(Cu.contraction_residuals(m, s.x, s.y1).values()) < 1e-12


def test_squared_norm_relation():
    for c in (1.0, 0.6):
        m = model("iii", c=c, g=1.5)
        for s in samples(m, 3):
            lhs, rhs = Cu.squared_norm(m, s.x, s.y1)
            assert lhs == pytest.approx(rhs, rel=1e-10)


def test_closed_finsleroid_forms():
    m = model("iv", g=0.9)
    for s in samples(m, 3):
        bp = m.at(s.x)
        md = metric_data(bp, s.y1)
        from finslerangle.finsleroid import fiber
        fb = fiber(bp, s.y1)
        M = Cu.m_transitive(m, s.x, s.y1)
        lhs = fb.B / fb.K ** 2 * np.einsum("nm,mij->nij", md.g, M)
        assert _scaled(lhs, Cu.m_finsleroid_closed(m, s.x, s.y1)) < 1e-12
        d, cl = Cu.m_norm_closed(m, s.x, s.y1)
        assert d == pytest.approx(cl, rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("mid", ["iii", "iv"])
def test_cyclic_identities_and_parallel_T(mid):
    m = model(mid, g=1.2)
    s = samples(m, 1)[0]
    res = Cu.cyclic_identities(m, s.x, s.y1)
    assert res["DM_routes"] < 1e-6 and res["Drho_routes"] < 1e-6
    for key in ("M_cyclic", "M_cyclic_transitive", "rho_cyclic", "rho_cyclic_transitive", "DT"):
        assert res[key] < 1e-7, key


def test_sphere_parallel_curvature_gives_zero_D_M():
    m = model("iv", g=1.2)
    s = samples(m, 1)[0]
    res = Cu.cyclic_identities(m, s.x, s.y1)
    assert res["M_cyclic_transitive"] < 1e-12


@pytest.mark.parametrize("c", [1.0, 0.6])
def test_commutator_and_transitivity(c):
    m = model("iii", c=c, g=0.8)
    s = samples(m, 1)[0]
    assert Cu.commutator_residual(m, s.x, s.y1) < 1e-6
    assert Cu.transitivity_residual(m, s.x, s.y1) < 1e-6


def test_curvature_data_bundle():
    m = model("iv", g=1.0)
    s = samples(m, 1)[0]
    cd = Cu.curvature_data(m, s.x, s.y1)
    assert cd.M.shape == (3, 3, 3) and cd.E.shape == (3, 3, 3, 3)
    assert np.allclose(cd.rho, Cu.rho_closed(m, s.x, s.y1))
