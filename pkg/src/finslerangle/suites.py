"""Named verification suites over seeded random samples.

Each check maps a sample (x, y1, y2) to a non-negative residual.  Checks are
graded ``analytic`` (jets and closed forms only) or ``fd`` (some finite
differences in x), which selects the default tolerance.  Reports are plain
data with a deterministic JSON and CSV rendering.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from . import angle as An
from . import automorphism as Au
from . import connection as Co
from . import curvature as Cu
from . import finsleroid as Fi
from . import indicatrix as In
from . import transport as Tr
from .background import circle
from .errors import FinslerError
from .sampling import rng_for, sample_x, sample_y

SUITES = ("metric", "automorphism", "connection", "angle", "curvature", "transport", "indicatrix")
TOL_ANALYTIC = 1e-8
TOL_FD = 1e-6
POLE_BAND = 1e-3
ORDER_MIN = 3.5
DRIFT_MAX = 1e-8
DRIFT_FLOOR = 1e-12


@dataclass(frozen=True)
class Sample:
    x: np.ndarray
    y1: np.ndarray
    y2: np.ndarray


@dataclass(frozen=True)
class Check:
    module: str
    name: str
    anchor: str
    grade: str
    fn: object
    unit_axis: bool = False     # only meaningful for c = 1
    tolerance: float = None     # fixed tolerance overriding the grade default


@dataclass
class CheckResult:
    module: str
    name: str
    anchor: str
    grade: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool
    comparison: str = "<="
    worst: dict = field(default_factory=dict)
    note: str = ""


CHECKS = []


def check(module, name, anchor, grade="analytic", unit_axis=False, tolerance=None):
    def deco(fn):
        CHECKS.append(Check(module, name, anchor, grade, fn, unit_axis, tolerance))
        return fn
    return deco


def _rel(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.abs(a - b).max()) / max(1.0, float(np.abs(b).max()))


def _max(d):
    return float(max(d.values()))


# ------------------------------------------------------------------ metric

@check("metric", "normalization", "K(x, b) = c^2, f(b) = 0, f(-b) = pi")
def _normalization(model, s):
    bp = model.at(s.x)
    c = bp.c
    top = Fi.kernel(c * c, c * c, c, bp.g)
    bottom = Fi.kernel(-c * c, c * c, c, bp.g)
    return max(abs(top.K - c * c), abs(top.f), abs(bottom.f - math.pi))


def _pole_offsets(bp, s):
    e = s.y1 - float(bp.bt @ s.y1) * bp.bt_up
    return e / math.sqrt(float(e @ bp.a @ e))


@check("metric", "pole_limit", "K continuous at the axis: |K(bt + eps e) - c| at eps = 1e-4")
def _pole_limit(model, s):
    bp = model.at(s.x)
    e = _pole_offsets(bp, s)
    return abs(Fi.fiber(bp, bp.bt_up + 1e-4 * e, guard=False).K - bp.c)


@check("metric", "pole_band", "K near the axis for eps in {1e-2, 1e-3}", tolerance=POLE_BAND)
def _pole_band(model, s):
    bp = model.at(s.x)
    e = _pole_offsets(bp, s)
    return max(abs(Fi.fiber(bp, bp.bt_up + eps * e, guard=False).K - bp.c) for eps in (1e-2, 1e-3))


@check("metric", "homogeneity", "K, y_i, g_ij, C_ijk homogeneous of degrees 1, 1, 0, -1")
def _homogeneity(model, s):
    return max(_max(Fi.homogeneity_check(model, s.x, s.y1, k)) for k in (0.37, 2.9))


@check("metric", "determinant", "det g = c^2 (K^2/B)^N det a")
def _determinant(model, s):
    lhs, rhs = Fi.determinant_relation(model, s.x, s.y1)
    return abs(lhs / rhs - 1.0)


@check("metric", "cartan_vector_norm", "A^i A_i = N^2 g^2 / 4 with A_i = K C_i")
def _cartan_norm(model, s):
    lhs, rhs = Fi.cartan_vector_norm(model, s.x, s.y1)
    return abs(lhs - rhs) / max(1.0, rhs)


@check("metric", "tensor_symmetry", "g symmetric, C totally symmetric, y^i C_ijk = 0")
def _tensor_symmetry(model, s):
    md = Fi.metric_data(model, s.x, s.y1)
    C = md.C
    sc = max(1.0, np.abs(C).max())
    return max(np.abs(md.g - md.g.T).max() / np.abs(md.g).max(),
               np.abs(C - C.transpose(1, 0, 2)).max() / sc,
               np.abs(C - C.transpose(0, 2, 1)).max() / sc,
               np.abs(np.einsum("i,ijk->jk", s.y1, C)).max() / sc)


@check("metric", "frame", "m g-unit, g(m, l) = 0, m = sign(g) C^m/|C|, H = (B/K^2) eta")
def _frame(model, s):
    bp = model.at(s.x)
    md = Fi.metric_data(bp, s.y1)
    fb = Fi.fiber(bp, s.y1)
    m = md.m
    out = [abs(m @ md.g @ m - 1.0), abs(m @ md.g @ md.l_upper),
           _rel(md.Hproj, fb.B / fb.K ** 2 * md.eta)]
    if bp.g != 0.0:
        Cu_ = md.ginv @ md.C_vec
        out.append(_rel(m, math.copysign(1.0, bp.g) * Cu_ / math.sqrt(Cu_ @ md.g @ Cu_)))
    return max(out)


@check("metric", "chi_forms", "atan2 and two-branch forms of chi agree")
def _chi_forms(model, s):
    fb = Fi.fiber(model.at(s.x), s.y1)
    if fb.b == 0.0:
        return 0.0
    return abs(Fi.chi_branch(fb.b, fb.qt, fb.g) - fb.chi)


# ------------------------------------------------------------ automorphism

@check("automorphism", "conformality", "(1/h^2) a t^m_k t^n_h = K^(2(h-1)) g_kh")
def _conformality(model, s):
    return Au.conformality_residual(model, s.x, s.y1)


@check("automorphism", "norm_power", "S(t(x, y)) = K(x, y)^h")
def _norm_power(model, s):
    bp = model.at(s.x)
    K = Fi.fiber(bp, s.y1).K
    return abs(Au.background_norm(bp, Au.t_map(model, s.x, s.y1)) / K ** bp.h - 1.0)


@check("automorphism", "unit_vectors", "K(x, y) = 1 implies S(x, t) = 1")
def _unit_vectors(model, s):
    bp = model.at(s.x)
    y = s.y1 / Fi.fiber(bp, s.y1).K
    return abs(Au.background_norm(bp, Au.t_map(model, s.x, y)) - 1.0)


@check("automorphism", "round_trip", "y -> t -> y through the Newton inverse")
def _round_trip(model, s):
    y = Au.inverse_map(model, s.x, Au.t_map(model, s.x, s.y1))
    return float(np.abs(y - s.y1).max() / np.abs(s.y1).max())


@check("automorphism", "inverse_jacobians", "y^i_n t^n_k = delta and y^n_ml against jets of t")
def _inverse_jacobians(model, s):
    bp = model.at(s.x)
    inv = Au.inverse_data(bp, Au.t_map(model, s.x, s.y1))
    tj = Au.t_jet(bp, s.y1, order=2)
    r1 = np.abs(inv.Y1 @ tj.d1 - np.eye(bp.dim)).max()
    # differentiate t^k_h y^h_m = delta in t once more
    r2 = np.abs(np.einsum("kh,hml->kml", tj.d1, inv.Y2)
                + np.einsum("khj,hm,jl->kml", tj.d2, inv.Y1, inv.Y1)).max()
    return max(r1, r2 / max(1.0, np.abs(inv.Y2).max()))


@check("automorphism", "frame_expansion", "t = (T1 l + T2 m)(K^2/B) K^(h-1)/sqrt(B)", unit_axis=True)
def _frame_expansion(model, s):
    return _rel(Au.frame_reconstruction(model, s.x, s.y1), Au.t_map(model, s.x, s.y1))


@check("automorphism", "deformation", "deformation tensor = K^(1-h)/h times t^m_k")
def _deformation(model, s):
    bp = model.at(s.x)
    K = Fi.fiber(bp, s.y1).K
    return _rel(Au.deformation_tensor(model, s.x, s.y1),
                K ** (1.0 - bp.h) / bp.h * Au.t_jacobian(model, s.x, s.y1))


# -------------------------------------------------------------- connection

@check("connection", "route_transitivity", "closed N vs pull-back of the Riemannian connection",
       grade="fd")
def _route_transitivity(model, s):
    return _rel(Co.n_coeffs_closed(model, s.x, s.y1), Co.n_coeffs_transitivity(model, s.x, s.y1))


@check("connection", "route_angle_solution", "closed N vs solution of the angle equation", grade="fd")
def _route_angle(model, s):
    return _rel(Co.n_coeffs_closed(model, s.x, s.y1),
                Co.n_coeffs_angle_solution(model, s.x, s.y1))


@check("connection", "route_assembled", "closed N vs the l, m, H assembled form", unit_axis=True)
def _route_assembled(model, s):
    return _rel(Co.n_coeffs_assembled(model, s.x, s.y1), Co.n_coeffs_closed(model, s.x, s.y1))


@check("connection", "homogeneity", "N^m_i(x, k y) = k N^m_i(x, y)")
def _n_homogeneity(model, s):
    k = 2.3
    return _rel(Co.n_coeffs_closed(model, s.x, k * s.y1), k * Co.n_coeffs_closed(model, s.x, s.y1))


@lru_cache(maxsize=4)
def _covariant_suite(model, xb, yb):
    return Co.covariant_suite(model, np.frombuffer(xb), np.frombuffer(yb))


@lru_cache(maxsize=4)
def _cyclic(model, xb, yb):
    return Cu.cyclic_identities(model, np.frombuffer(xb), np.frombuffer(yb))


def _suite_item(key):
    def fn(model, s):
        return float(_covariant_suite(model, s.x.tobytes(), s.y1.tobytes())[key])
    return fn


for _key, _anchor in [("D_K", "covariant derivative of K vanishes"),
                      ("D_y_lower", "covariant derivative of y_j vanishes"),
                      ("D_g", "covariant derivative of g_nj vanishes"),
                      ("D_t", "covariant derivative of t^i vanishes"),
                      ("D_t_jac", "covariant derivative of t^i_m vanishes"),
                      ("D_deformation", "covariant derivative of the deformation tensor vanishes"),
                      ("D_y_jac", "covariant derivative of y^n_k vanishes"),
                      ("N3_plus_DC", "N^k_mnj + D_m C^k_nj = 0")]:
    check("connection", _key, _anchor, grade="fd")(_suite_item(_key))


@check("connection", "y_N3", "y_k N^k_mnj = 0")
def _y_n3(model, s):
    return Co.second_derivative_identities(model, s.x, s.y1)["y_N3"]


@check("connection", "N3_symmetry", "N_kmnj totally symmetric in (k, n, j)")
def _n3_sym(model, s):
    return Co.second_derivative_identities(model, s.x, s.y1)["N3_symmetry"]


@check("connection", "orthogonality", "beta orthogonal to b, l, m and g(m, l) = 0")
def _orthogonality(model, s):
    return _max(Co.orthogonality(model, s.x, s.y1))


@check("connection", "contractions", "u_k N^k, b_k N^k, d b, l_k N^k closed forms", unit_axis=True)
def _contractions(model, s):
    d = Co.contraction_identities(model, s.x, s.y1)
    d.pop("d_B")
    return _max(d)


@check("connection", "d_B", "d_n B = -(g/(q h)) B y^j nabla_n b_j", grade="fd", unit_axis=True)
def _d_b(model, s):
    return float(Co.contraction_identities(model, s.x, s.y1)["d_B"])


# ------------------------------------------------------------------- angle

@check("angle", "angle_equation", "d_i lambda = 0 along the connection", grade="fd")
def _angle_equation(model, s):
    return float(np.abs(Co.angle_equation_residual(model, s.x, s.y1, s.y2)).max())


@check("angle", "lambda_closed", "lambda = (h^2 v12 + A1 A2)/sqrt(B1 B2)")
def _lambda_closed(model, s):
    bp = model.at(s.x)
    return abs(An.lam_closed(model, s.x, s.y1, s.y2) - An.lam_value(bp, s.y1, s.y2))


@check("angle", "gradient_generic", "dlambda/dy from image Jacobians vs jets")
def _gradient_generic(model, s):
    a = An.dlambda_dy_jet(model, s.x, s.y1, s.y2)
    b = An.dlambda_dy_generic(model, s.x, s.y1, s.y2)
    return max(_rel(b[0], a[0]), _rel(b[1], a[1]))


@check("angle", "gradient_closed", "closed Finsleroid dlambda/dy vs jets", unit_axis=True)
def _gradient_closed(model, s):
    a = An.dlambda_dy_jet(model, s.x, s.y1, s.y2)
    b = An.dlambda_dy_closed(model, s.x, s.y1, s.y2)
    return max(_rel(b[0], a[0]), _rel(b[1], a[1]))


@check("angle", "axis_contractions", "b^k dlambda/dy^k closed forms", unit_axis=True)
def _axis_contractions(model, s):
    bp = model.at(s.x)
    g1, g2 = An.dlambda_dy_jet(model, s.x, s.y1, s.y2)
    c1, c2 = An.axis_contractions(model, s.x, s.y1, s.y2)
    return max(abs(bp.b_up @ g1 - c1), abs(bp.b_up @ g2 - c2))


@check("angle", "g_derivative", "dlambda/dg: difference quotient vs closed forms", grade="fd",
       unit_axis=True)
def _g_derivative(model, s):
    d = An.dlambda_dg(model, s.x, s.y1, s.y2)
    ref = d["fd"]
    out = [abs(d[k] - ref) for k in ("direct", "expanded", "sigma_form")]
    if math.isfinite(d["z_form"]):
        out.append(abs(d["z_form"] - ref))
    out.append(abs(d["sigma_alt"]))
    return max(out)


# --------------------------------------------------------------- curvature

@check("curvature", "M_routes", "M from the connection vs transitive form", grade="fd")
def _m_routes(model, s):
    return _rel(Cu.m_definition(model, s.x, s.y1), Cu.m_transitive(model, s.x, s.y1))


@check("curvature", "E_routes", "E = -dM/dy vs its defining operator", grade="fd")
def _e_routes(model, s):
    return _rel(Cu.e_definition(model, s.x, s.y1), Cu.e_tensor(model, s.x, s.y1))


@check("curvature", "E_transitive", "E = -dM/dy vs the transitive form")
def _e_transitive(model, s):
    return _rel(Cu.e_transitive(model, s.x, s.y1), Cu.e_tensor(model, s.x, s.y1))


@check("curvature", "rho_routes", "rho = E - M C vs the closed form", grade="fd")
def _rho_routes(model, s):
    return _rel(Cu.rho_definition(model, s.x, s.y1), Cu.rho_closed(model, s.x, s.y1))


@check("curvature", "rho_tform", "rho_knij = T_kn^hm a_hmij")
def _rho_tform(model, s):
    md = Fi.metric_data(model, s.x, s.y1)
    return _rel(Cu.lower_rho(md, Cu.rho_closed(model, s.x, s.y1)),
                Cu.rho_lower_tform(model, s.x, s.y1))


@check("curvature", "skew_symmetry", "M and rho skew in (i, j); rho_knij skew in (k, n)")
def _skew(model, s):
    return _max(Cu.symmetry_residuals(model, s.x, s.y1))


@check("curvature", "contractions", "y_n M = 0, y^k E = -M, y_n E = M", tolerance=1e-7)
def _curv_contractions(model, s):
    return _max(Cu.contraction_residuals(model, s.x, s.y1))


@check("curvature", "squared_norm", "rho^2 in terms of the background Riemann tensor",
       tolerance=TOL_FD)
def _squared_norm(model, s):
    lhs, rhs = Cu.squared_norm(model, s.x, s.y1)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


@check("curvature", "M_closed_form", "(B/K^2) M_nij and its norm in Finsleroid scalars",
       unit_axis=True)
def _m_closed(model, s):
    bp = model.at(s.x)
    md = Fi.metric_data(bp, s.y1)
    fb = Fi.fiber(bp, s.y1)
    M = Cu.m_transitive(model, s.x, s.y1)
    lhs = fb.B / fb.K ** 2 * np.einsum("nm,mij->nij", md.g, M)
    direct, closed = Cu.m_norm_closed(model, s.x, s.y1)
    return max(_rel(lhs, Cu.m_finsleroid_closed(model, s.x, s.y1)),
               abs(direct - closed) / max(1.0, abs(closed)))


def _cyclic_item(keys):
    def fn(model, s):
        d = _cyclic(model, s.x.tobytes(), s.y1.tobytes())
        return float(max(d[k] for k in keys))
    return fn


check("curvature", "DM_routes", "D M by its operator vs nabla of the background curvature",
      grade="fd")(_cyclic_item(("DM_routes", "Drho_routes")))
check("curvature", "cyclic", "cyclic identities of D M and D rho", tolerance=1e-7)(
    _cyclic_item(("M_cyclic", "M_cyclic_transitive", "rho_cyclic", "rho_cyclic_transitive")))
check("curvature", "DT", "D T = 0", tolerance=1e-7)(_cyclic_item(("DT",)))


@check("curvature", "commutator", "commutator of covariant derivatives on a test field", grade="fd")
def _commutator(model, s):
    return Cu.commutator_residual(model, s.x, s.y1)


@check("curvature", "transitivity", "Finsler derivative of a pulled-back field equals the Riemannian one",
       grade="fd")
def _transitivity(model, s):
    return Cu.transitivity_residual(model, s.x, s.y1)


# -------------------------------------------------------------- indicatrix

@check("indicatrix", "curvature_value", "indicatrix curvature 1 - C = h^2")
def _ind_value(model, s):
    return abs(In.curvature_value(model, s.x, s.y1) - model.h ** 2)


@check("indicatrix", "wedge_fit", "S_nmij = C (h_nj h_mi - h_ni h_mj)")
def _ind_fit(model, s):
    bp = model.at(s.x)
    md = Fi.metric_data(bp, s.y1)
    return In.fit_curvature(In.s_tensor(bp, s.y1), In.wedge_basis(md))[1]


@check("indicatrix", "antisymmetry", "S_nmij skew in (i, j) and (n, m)")
def _ind_skew(model, s):
    return max(In.antisymmetry_residual(In.s_tensor(model, s.x, s.y1)))


# ------------------------------------------------------------------ running

def draw_samples(model, seed, count, box=0.5):
    rng = rng_for(seed)
    out = []
    for _ in range(count):
        x = sample_x(rng, model.dim, box)
        bp = model.at(x)
        out.append(Sample(x, sample_y(rng, bp), sample_y(rng, bp)))
    return out


def _coords(s):
    return {"x": [float(v) for v in s.x], "y1": [float(v) for v in s.y1],
            "y2": [float(v) for v in s.y2]}


def _tolerance(chk, overrides, tol_analytic, tol_fd):
    key = f"{chk.module}.{chk.name}"
    if key in overrides:
        return float(overrides[key])
    if chk.tolerance is not None:
        return chk.tolerance
    return tol_fd if chk.grade == "fd" else tol_analytic


class _Accumulator:
    """Running worst residual of one check over the samples."""

    def __init__(self, chk, tol):
        self.chk, self.tol = chk, tol
        self.worst, self.worst_s, self.note, self.count = -1.0, None, "", 0

    def add(self, model, s):
        if not math.isfinite(self.worst):
            return
        self.count += 1
        try:
            r = float(self.chk.fn(model, s))
        except FinslerError as exc:
            r, self.note = math.inf, f"{type(exc).__name__}: {exc}"
        if not math.isfinite(r) and not self.note:
            self.note = "non-finite residual"
        if not r <= self.worst:
            self.worst, self.worst_s = r, s

    def result(self, n):
        c = self.chk
        passed = math.isfinite(self.worst) and self.worst <= self.tol
        worst = _coords(self.worst_s) if self.worst_s is not None else {}
        return CheckResult(c.module, c.name, c.anchor, c.grade, n, self.worst, self.tol, passed,
                           worst=worst, note=self.note)


def run_check(chk, model, samples, tol):
    acc = _Accumulator(chk, tol)
    for s in samples:
        acc.add(model, s)
    return acc.result(len(samples))


def default_loop(model):
    return circle(np.zeros(model.dim), 0.5, (0, 1))


def transport_rows(model, seed, curve=None, steps=(128, 256, 512), final_steps=1024):
    """Order and drift checks from a step-halving study on a loop."""
    curve = curve if curve is not None else default_loop(model)
    rng = rng_for(seed)
    bp0 = model.at(curve.x(0.0))
    y0s = [sample_y(rng, bp0), sample_y(rng, bp0)]
    coords = {"x": [float(v) for v in curve.x(0.0)], "y1": [float(v) for v in y0s[0]],
              "y2": [float(v) for v in y0s[1]]}
    rows = []
    anchor_o = "observed convergence order of the drift under step halving"
    anchor_d = f"drift at {final_steps} steps"
    try:
        table, orders, _ = Tr.convergence_study(model, curve, y0s, list(steps))
        final = Tr.transport(model, curve, y0s, final_steps)
    except FinslerError as exc:
        note = f"{type(exc).__name__}: {exc}"
        return [CheckResult("transport", "run", "transport along the loop", "fd", 0, math.inf, 0.0,
                            False, worst=coords, note=note)]
    for key in ("K", "alpha", "transitivity"):
        usable = [o for o, d in zip(orders[key], table[key][1:]) if d > DRIFT_FLOOR]
        if usable:
            val, note = min(usable), ""
            ok = val >= ORDER_MIN
        else:
            val, note, ok = math.inf, "drift below the rounding floor at every step count", True
        rows.append(CheckResult("transport", f"order_{key}", anchor_o, "fd", len(steps), val,
                                ORDER_MIN, ok, ">=", coords, note))
        d = final.drift[key]
        rows.append(CheckResult("transport", f"drift_{key}", anchor_d, "fd", 1, d, DRIFT_MAX,
                                d <= DRIFT_MAX, "<=", coords))
    if curve.closed:
        hol = Tr.holonomy_report(model, curve, y0s, run=final)
        d = abs(hol["alpha_delta"])
        rows.append(CheckResult("transport", "holonomy_alpha", "angle unchanged around the loop",
                                "fd", 1, d, DRIFT_MAX, d <= DRIFT_MAX, "<=", coords))
    return rows


@dataclass
class ResidualReport:
    config: dict
    rows: list
    skipped: list

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    def to_dict(self):
        return {"config": self.config, "passed": self.passed, "skipped": self.skipped,
                "checks": [_clean(asdict(r)) for r in self.rows]}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["module", "check", "anchor", "grade", "samples", "max_residual", "comparison",
                    "tolerance", "passed", "worst_x", "worst_y1", "worst_y2", "note"])
        for r in self.rows:
            w.writerow([r.module, r.name, r.anchor, r.grade, r.samples, repr(r.max_residual),
                        r.comparison, repr(r.tolerance), r.passed,
                        " ".join(repr(v) for v in r.worst.get("x", [])),
                        " ".join(repr(v) for v in r.worst.get("y1", [])),
                        " ".join(repr(v) for v in r.worst.get("y2", [])), r.note])
        return buf.getvalue()

    def summary_lines(self):
        lines = []
        for r in self.rows:
            mark = "PASS" if r.passed else "FAIL"
            label = f"{r.module}.{r.name}"
            lines.append(f"{mark}  {label:<36} {r.max_residual:10.3e} "
                         f"{r.comparison} {r.tolerance:.1e}  ({r.samples} samples)"
                         + (f"  [{r.note}]" if r.note else ""))
        n_fail = sum(not r.passed for r in self.rows)
        lines.append(f"{len(self.rows) - n_fail}/{len(self.rows)} checks passed")
        return lines


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def run(model, suites=SUITES, samples=50, seed=0, box=0.5, tol_analytic=TOL_ANALYTIC, tol_fd=TOL_FD,
        overrides=None, curve=None, transport_steps=(128, 256, 512), config=None, only=None):
    """Run the named suites and return a :class:`ResidualReport`.

    ``only`` restricts the run to a set of ``"module.name"`` keys.
    """
    overrides = overrides or {}
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        from .errors import ConfigError
        raise ConfigError(f"unknown suites {unknown}; choose from {list(SUITES)}")
    pts = draw_samples(model, seed, samples, box)
    skipped = []
    accs = []
    for chk in CHECKS:
        if chk.module not in suites:
            continue
        if only is not None and f"{chk.module}.{chk.name}" not in only:
            continue
        if chk.unit_axis and model.c != 1.0:
            skipped.append(f"{chk.module}.{chk.name}")
            continue
        accs.append(_Accumulator(chk, _tolerance(chk, overrides, tol_analytic, tol_fd)))
    # sample-major order lets checks sharing an expensive evaluation reuse it
    for s in pts:
        for acc in accs:
            acc.add(model, s)
    rows = [acc.result(len(pts)) for acc in accs]
    if "transport" in suites and (only is None or any(k.startswith("transport.") for k in only)):
        for r in transport_rows(model, seed, curve, transport_steps):
            key = f"{r.module}.{r.name}"
            if key in overrides:
                r.tolerance = float(overrides[key])
                r.passed = (r.max_residual >= r.tolerance if r.comparison == ">="
                            else r.max_residual <= r.tolerance)
            rows.append(r)
    rows.sort(key=lambda r: (r.module, r.name))
    return ResidualReport(config=config or {}, rows=rows, skipped=sorted(skipped))
