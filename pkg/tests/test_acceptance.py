"""Acceptance criteria 1 to 11, one test each, at the stated tolerances.

Each test records a PASS/FAIL line; the lines are repeated in the terminal
summary.  Unit-axis statements (criteria 1, 2 and 10) are evaluated at c = 1.
"""

import math

import numpy as np

from conftest import MODEL_IDS, model, record_acceptance, samples
from finslerangle import automorphism as Au
from finslerangle import cli
from finslerangle import connection as Co
from finslerangle import curvature as Cu
from finslerangle import finsleroid as Fi
from finslerangle import indicatrix as In
from finslerangle import suites as Su
from finslerangle import transport as Tr
from finslerangle.angle import angle_value, two_vector_angle
from finslerangle.background import riemannian_angle
from finslerangle.sampling import rng_for, sample_y


def _worst(rows):
    r = max(rows, key=lambda r: r.max_residual / r.tolerance)
    return f"worst {r.module}.{r.name} = {r.max_residual:.2e} (tol {r.tolerance:.0e})"


def _selected(keys, mids, c, count, seed, tolerances):
    rows = []
    for mid in mids:
        rep = Su.run(model(mid, c=c), suites=tuple({k.split(".")[0] for k in keys}), samples=count,
                     seed=seed, only=set(keys), overrides=tolerances)
        assert not rep.skipped
        rows += rep.rows
    return rows


def test_criterion_01_normalization():
    worst_exact, worst_band = 0.0, 0.0
    for mid in MODEL_IDS:
        m = model(mid, c=1.0)
        for s in samples(m, 25, seed=101):
            bp = m.at(s.x)
            up = bp.ainv @ bp.b
            fp, fm = Fi.fiber(bp, up, guard=False), Fi.fiber(bp, -up, guard=False)
            worst_exact = max(worst_exact, abs(fp.K - 1.0), abs(fp.f), abs(fm.f - math.pi))
            # approach the pole along a-orthogonal rays with qt = eps
            e = s.y1 - (bp.b @ s.y1) * up
            e /= math.sqrt(e @ bp.a @ e)
            worst_exact = max(worst_exact, abs(Fi.fiber(bp, up + 1e-4 * e).K - 1.0))
            for eps in (1e-2, 1e-3):
                worst_band = max(worst_band, abs(Fi.fiber(bp, up + eps * e).K - 1.0))
    ok = worst_exact < 1e-8 and worst_band < 1e-3
    assert record_acceptance(1, "normalization K(b) = 1, f(b) = 0, f(-b) = pi", ok,
                             f"pole and q=1e-4 rays {worst_exact:.2e}, band {worst_band:.2e}")


def test_criterion_02_determinant_and_cartan_norm():
    worst = 0.0
    for mid in MODEL_IDS:
        for g in (0.0, 0.6, 1.2):
            m = model(mid, c=1.0, g=g)
            for s in samples(m, 200, seed=202):
                d, ref = Fi.determinant_relation(m, s.x, s.y1)
                worst = max(worst, abs(d - ref) / abs(ref))
                A2, ref2 = Fi.cartan_vector_norm(m, s.x, s.y1)
                worst = max(worst, abs(A2 - ref2) / ref2 if ref2 else abs(A2))
    assert record_acceptance(2, "det g and A^i A_i", worst < 1e-8,
                             f"max relative residual {worst:.2e} over 2400 samples")


def test_criterion_03_conformality():
    worst = 0.0
    for mid in MODEL_IDS:
        for c in (1.0, 0.6):
            for g in (-1.5, 0.6, 1.2):
                m = model(mid, c=c, g=g)
                for s in samples(m, 25, seed=303):
                    worst = max(worst, Au.conformality_residual(m, s.x, s.y1))
    assert record_acceptance(3, "conformality of the t-map", worst < 1e-8,
                             f"max relative residual {worst:.2e}")


def test_criterion_04_indicatrix_curvature():
    worst_err, worst_spread = 0.0, 0.0
    for mid in MODEL_IDS:
        for c in (1.0, 0.6):
            for g in (-0.8, 1.2, 1.9):
                m = model(mid, c=c, g=g)
                pts = In.random_points(m, 3, seed=404, box=0.5)
                rep = In.constant_curvature_check(m, np.zeros(3), 8, seed=405, points=pts)
                worst_err = max(worst_err, abs(rep.curvature - (1.0 - g * g / 4.0)))
                worst_spread = max(worst_spread, rep.spread)
    ok = worst_err < 1e-6 and worst_spread < 1e-6
    assert record_acceptance(4, "indicatrix curvature 1 - g^2/4", ok,
                             f"max error {worst_err:.2e}, spread {worst_spread:.2e}")


def test_criterion_05_route_agreement():
    keys = {"connection.route_transitivity"}
    rows = _selected(keys, MODEL_IDS, 1.0, 100, 505, {})
    rows += _selected(keys, MODEL_IDS, 0.6, 25, 506, {})
    ok = all(r.passed for r in rows) and max(r.max_residual for r in rows) < 1e-6
    assert record_acceptance(5, "closed N vs transitivity route", ok, _worst(rows))


METRICITY = {"connection.D_K", "connection.D_y_lower", "connection.D_g", "connection.D_t",
             "connection.D_t_jac", "connection.D_deformation", "connection.D_y_jac",
             "connection.route_angle_solution", "curvature.transitivity"}


def test_criterion_06_metricity_and_transitivity():
    tol = {k: 1e-6 for k in METRICITY}
    rows = _selected(METRICITY, MODEL_IDS, 1.0, 20, 606, tol)
    rows += _selected(METRICITY, MODEL_IDS, 0.6, 8, 607, tol)
    rows += _selected({"connection.homogeneity", "connection.orthogonality"}, MODEL_IDS, 1.0, 50,
                      608, {})
    ok = all(r.passed for r in rows)
    assert record_acceptance(6, "metricity and transitivity suite", ok, _worst(rows))


def test_criterion_07_second_derivatives():
    keys = {"connection.y_N3", "connection.N3_plus_DC", "connection.N3_symmetry"}
    tol = {k: 1e-6 for k in keys}
    rows = _selected(keys, MODEL_IDS, 1.0, 20, 707, tol)
    rows += _selected(keys, MODEL_IDS, 0.6, 8, 708, tol)
    ok = all(r.passed for r in rows)
    assert record_acceptance(7, "y_k N^k_mnj, N^k_mnj + D_m C^k_nj, symmetry", ok, _worst(rows))


def test_criterion_08_angle_preservation():
    worst = 0.0
    for mid in MODEL_IDS:
        m = model(mid)
        for s in samples(m, 100, seed=808):
            worst = max(worst, float(np.abs(Co.angle_equation_residual(m, s.x, s.y1, s.y2)).max()))
    detail = [f"|d lambda| {worst:.2e}"]
    ok = worst < 1e-6
    steps = [64, 128, 256, 512, 1024]
    for mid in MODEL_IDS:
        m = model(mid)
        loop = Su.default_loop(m)
        rng = rng_for(809)
        bp = m.at(loop.x(0.0))
        y0s = [sample_y(rng, bp), sample_y(rng, bp)]
        table, orders, _ = Tr.convergence_study(m, loop, y0s, steps)
        final = table["alpha"][-1]
        usable = [o for o, d in zip(orders["alpha"], table["alpha"][1:]) if d > Su.DRIFT_FLOOR]
        if mid == "i":
            # flat background: transport is exact and the drift is identically zero
            ok &= final == 0.0
            detail.append("i drift 0")
            continue
        order = min(usable) if usable else math.nan
        ok &= order >= 3.5 and final < 1e-8
        detail.append(f"{mid} order {order:.2f} drift {final:.1e}")
    assert record_acceptance(8, "angle preservation", ok, ", ".join(detail))


def test_criterion_09_curvature_identities():
    tol = {"curvature.M_routes": 1e-6, "curvature.E_routes": 1e-6, "curvature.E_transitive": 1e-6,
           "curvature.rho_routes": 1e-6, "curvature.rho_tform": 1e-6, "curvature.DM_routes": 1e-6,
           "curvature.skew_symmetry": 1e-8, "curvature.contractions": 1e-7,
           "curvature.squared_norm": 1e-6, "curvature.cyclic": 1e-7, "curvature.DT": 1e-7}
    rows = _selected(set(tol), MODEL_IDS, 1.0, 10, 909, tol)
    rows += _selected(set(tol), MODEL_IDS, 0.6, 5, 910, tol)
    ok = all(r.passed for r in rows)
    assert record_acceptance(9, "curvature identities", ok, _worst(rows))


def test_criterion_10_riemannian_limit():
    worst = {"t": 0.0, "N": 0.0, "rho": 0.0, "alpha": 0.0}
    for mid in MODEL_IDS:
        m = model(mid, c=1.0, g=0.0)
        for s in samples(m, 25, seed=1010):
            bp = m.at(s.x)
            worst["t"] = max(worst["t"], np.abs(Au.t_map(m, s.x, s.y1) - s.y1).max())
            N = Co.n_coeffs_closed(m, s.x, s.y1)
            worst["N"] = max(worst["N"], np.abs(N + np.einsum("mih,h->mi", bp.gamma, s.y1)).max())
            worst["rho"] = max(worst["rho"], np.abs(Cu.rho_closed(m, s.x, s.y1) - bp.riemann).max())
            a = angle_value(m, s.x, s.y1, s.y2)
            worst["alpha"] = max(worst["alpha"], abs(a - riemannian_angle(m, s.x, s.y1, s.y2)))
            assert two_vector_angle(m, s.x, s.y1, s.y2).S1 > 0
    ok = max(worst.values()) < 1e-9
    assert record_acceptance(10, "Riemannian limit at g = 0", ok,
                             ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_criterion_11_determinism(tmp_path):
    text = ("[model]\nid = iv\nc = 0.8\ng = 1.2\n[run]\nseed = 1111\nsamples = 4\n"
            "suites = metric, automorphism, connection, angle, curvature, indicatrix\n")
    path = tmp_path / "det.ini"
    path.write_text(text)
    outs = []
    for name in ("a.json", "b.json", "c.csv", "d.csv"):
        fmt = "csv" if name.endswith("csv") else "json"
        cli.main(["check", "--config", str(path), "--out", str(tmp_path / name), "--format", fmt])
        outs.append((tmp_path / name).read_bytes())
    ok = outs[0] == outs[1] and outs[2] == outs[3] and len(outs[0]) > 0
    assert record_acceptance(11, "determinism", ok, "JSON and CSV reports byte-identical")
