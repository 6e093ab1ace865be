"""Parallel transport of tangent vectors along base curves.

A vector field y(s) along x(s) is parallel when dy^n/ds = N^n_j(x, y) xdot^j.
The images t(x(s), y(s)) then follow the Riemannian transport
dT^k/ds = -a^k_ih T^h xdot^i, and both K and the two-vector angle stay fixed.
Everything here is integrated with the classical fixed-step RK4 scheme.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .automorphism import t_vec
from .background import CurvePath, circle, segment
from .connection import _closed
from .errors import ConfigError, PoleCrossing, PoleProximity, StepTooLarge
from .finsleroid import fiber

MIN_STEPS = 16
K_STEP_LIMIT = 1e-3


@dataclass
class TransportRun:
    curve: CurvePath
    steps: int
    s: np.ndarray               # [steps + 1]
    x: np.ndarray               # [steps + 1, N]
    y_series: np.ndarray        # [steps + 1, P, N]
    T_series: np.ndarray        # Riemannian transport of the initial images
    K: np.ndarray               # [steps + 1, P]
    alpha: np.ndarray           # [steps + 1] angle between the first two vectors (nan if P < 2)
    transitivity: np.ndarray    # [steps + 1] max_p |t(x, y_p) - T_p| / S_p
    drift: dict = field(default_factory=dict)


def _angle(bp, t1, t2):
    a = bp.a
    lam = float(t1 @ a @ t2) / math.sqrt(float(t1 @ a @ t1) * float(t2 @ a @ t2))
    return math.acos(min(1.0, max(-1.0, lam))) / bp.h


def _rhs(model, curve, s, Y, T):
    x = curve.x(s)
    xd = curve.xdot(s)
    bp = model.at(x)
    dY = np.empty_like(Y)
    for p, y in enumerate(Y):
        N, _, _ = _closed(bp, y, fiber(bp, y))
        dY[p] = N @ xd
    G = np.einsum("kih,i->kh", bp.gamma, xd)
    dT = -T @ G.T
    return dY, dT


def _observe(model, x, Y, T):
    bp = model.at(x)
    K = np.empty(len(Y))
    trans = 0.0
    ts = []
    for p, y in enumerate(Y):
        fb = fiber(bp, y)
        K[p] = fb.K
        t = t_vec(bp, y, fb)
        ts.append(t)
        S = math.sqrt(float(T[p] @ bp.a @ T[p]))
        d = t - T[p]
        trans = max(trans, math.sqrt(float(d @ bp.a @ d)) / S)
    alpha = _angle(bp, ts[0], ts[1]) if len(ts) > 1 else math.nan
    return K, alpha, trans


def _summarize(run):
    K0 = run.K[0]
    run.drift = {
        "K": float(np.max(np.abs(run.K - K0) / K0)),
        "alpha": float(np.max(np.abs(run.alpha - run.alpha[0]))) if run.y_series.shape[1] > 1
        else math.nan,
        "transitivity": float(np.max(run.transitivity)),
    }
    return run


def _partial(curve, steps, s, xs, Ys, Ts, Ks, As, Tr):
    return _summarize(TransportRun(curve, steps, np.array(s), np.array(xs), np.array(Ys),
                                   np.array(Ts), np.array(Ks), np.array(As), np.array(Tr)))


def transport(model, curve, y0s, steps):
    """Transport the vectors ``y0s`` jointly along ``curve`` with ``steps`` RK4 steps."""
    if steps < MIN_STEPS:
        raise ConfigError(f"steps must be >= {MIN_STEPS}")
    Y = np.array([np.asarray(y, dtype=float) for y in y0s])
    x0 = curve.x(0.0)
    bp0 = model.at(x0)
    try:
        T = np.array([t_vec(bp0, y) for y in Y])
    except PoleProximity as exc:
        raise PoleCrossing(f"initial vector inside the pole guard: {exc}", None) from exc
    K, al, tr = _observe(model, x0, Y, T)
    s_hist, x_hist, Y_hist, T_hist = [0.0], [x0], [Y.copy()], [T.copy()]
    K_hist, A_hist, Tr_hist = [K], [al], [tr]
    hs = 1.0 / steps

    def partial():
        return _partial(curve, steps, s_hist, x_hist, Y_hist, T_hist, K_hist, A_hist, Tr_hist)

    for k in range(steps):
        s = k * hs
        try:
            k1 = _rhs(model, curve, s, Y, T)
            k2 = _rhs(model, curve, s + 0.5 * hs, Y + 0.5 * hs * k1[0], T + 0.5 * hs * k1[1])
            k3 = _rhs(model, curve, s + 0.5 * hs, Y + 0.5 * hs * k2[0], T + 0.5 * hs * k2[1])
            k4 = _rhs(model, curve, s + hs, Y + hs * k3[0], T + hs * k3[1])
            Y = Y + hs / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
            T = T + hs / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
            xk = curve.x(s + hs)
            K, al, tr = _observe(model, xk, Y, T)
        except PoleProximity as exc:
            raise PoleCrossing(f"step {k + 1}: {exc}", partial()) from exc
        jump = float(np.max(np.abs(K - K_hist[-1]) / K_hist[-1]))
        if jump > K_STEP_LIMIT:
            raise StepTooLarge(f"step {k + 1}: K changed by {jump:.3e} in one step", partial())
        s_hist.append(s + hs)
        x_hist.append(xk)
        Y_hist.append(Y.copy())
        T_hist.append(T.copy())
        K_hist.append(K)
        A_hist.append(al)
        Tr_hist.append(tr)
    return partial()


def observed_orders(steps, values):
    """log(d_k / d_{k+1}) / log(n_{k+1} / n_k) for consecutive step counts."""
    out = []
    for (n1, d1), (n2, d2) in zip(zip(steps, values), zip(steps[1:], values[1:])):
        if d1 > 0.0 and d2 > 0.0:
            out.append(math.log(d1 / d2) / math.log(n2 / n1))
        else:
            out.append(math.nan)
    return out


def convergence_study(model, curve, y0s, steps_list):
    """Drift table over several step counts with the observed orders between them."""
    steps_list = sorted(int(n) for n in steps_list)
    runs = [transport(model, curve, y0s, n) for n in steps_list]
    table = {
        "steps": steps_list,
        "K": [r.drift["K"] for r in runs],
        "alpha": [r.drift["alpha"] for r in runs],
        "transitivity": [r.drift["transitivity"] for r in runs],
    }
    orders = {key: observed_orders(steps_list, table[key]) for key in ("K", "alpha", "transitivity")}
    return table, orders, runs


def holonomy_report(model, curve, y0s, steps=1024, run=None):
    """Change of the transported vectors, of K and of the angle around a closed loop."""
    if not curve.closed:
        raise ConfigError("holonomy needs a closed curve")
    if run is None:
        run = transport(model, curve, y0s, steps)
    Y0, Y1 = run.y_series[0], run.y_series[-1]
    return {
        "steps": run.steps,
        "vector": [float(np.linalg.norm(b - a)) for a, b in zip(Y0, Y1)],
        "vector_relative": [float(np.linalg.norm(b - a) / np.linalg.norm(a)) for a, b in zip(Y0, Y1)],
        "K_delta": [float(d) for d in run.K[-1] - run.K[0]],
        "alpha_delta": float(run.alpha[-1] - run.alpha[0]),
    }


def check_curve(curve, samples=7, step=1e-5):
    """max |xdot - central difference of x| over interior sample points."""
    worst = 0.0
    for s in np.linspace(0.1, 0.9, samples):
        fd = (curve.x(s + step) - curve.x(s - step)) / (2.0 * step)
        worst = max(worst, float(np.abs(fd - curve.xdot(s)).max()))
    return worst


def parse_curve(spec, dim):
    """Parse ``circle:radius=R:center=x,y,..:plane=i,j`` or ``segment:start=..:end=..``."""
    parts = spec.strip().split(":")
    kind = parts[0].strip().lower()
    opts = {}
    for p in parts[1:]:
        if "=" not in p:
            raise ConfigError(f"bad curve option {p!r}")
        k, v = p.split("=", 1)
        opts[k.strip().lower()] = v.strip()

    def vec(key, default=None):
        if key not in opts:
            if default is None:
                raise ConfigError(f"curve option {key!r} missing")
            return np.asarray(default, dtype=float)
        try:
            v = np.array([float(u) for u in opts[key].split(",")])
        except ValueError as exc:
            raise ConfigError(f"bad numbers in curve option {key!r}") from exc
        if v.shape != (dim,):
            raise ConfigError(f"curve option {key!r} needs {dim} components")
        return v

    try:
        if kind == "circle":
            radius = float(opts.get("radius", "0.5"))
            plane = tuple(int(u) for u in opts.get("plane", "0,1").split(","))
            if radius <= 0 or len(plane) != 2 or plane[0] == plane[1] or max(plane) >= dim:
                raise ConfigError("bad circle radius or plane")
            return circle(vec("center", np.zeros(dim)), radius, plane)
        if kind == "segment":
            return segment(vec("start"), vec("end"))
    except ValueError as exc:
        raise ConfigError(f"bad curve spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown curve kind {kind!r}")


def trajectory_rows(run):
    P, N = run.y_series.shape[1], run.x.shape[1]
    header = ["s"] + [f"x{i}" for i in range(N)]
    header += [f"y{p}_{i}" for p in range(P) for i in range(N)]
    header += [f"K{p}" for p in range(P)] + ["alpha"]
    rows = []
    for k in range(len(run.s)):
        row = [run.s[k], *run.x[k], *run.y_series[k].ravel(), *run.K[k], run.alpha[k]]
        rows.append([repr(float(v)) for v in row])
    return header, rows


def write_csv(run, fh=None):
    """Write the trajectory as CSV to ``fh``; return the text when ``fh`` is None."""
    buf = io.StringIO() if fh is None else fh
    header, rows = trajectory_rows(run)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue() if fh is None else None
