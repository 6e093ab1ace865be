"""Command line driver: ``finslerangle check`` and ``finslerangle transport``.

Configuration is an INI file::

    [model]
    id = ii            ; i, ii, iii, iv or flat, rotating, conformal, sphere
    dim = 3
    c = 1.0
    g = 1.0
    rate = 0.7         ; any further keys are passed to the model builder

    [run]
    seed = 7
    samples = 50
    box = 0.5
    suites = all       ; or a comma separated subset

    [tolerance]
    analytic = 1e-8
    fd = 1e-6
    connection.route_transitivity = 1e-6

    [output]
    path = report.json
    format = json

    [transport]
    curve = circle:radius=0.5
    steps = 128,256,512
    vectors = 2

Exit status: 0 when every check passes, 1 when any fails, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import dataclass, field

from . import suites as Su
from . import transport as Tr
from .background import make_model
from .errors import ConfigError, FinslerError, PoleCrossing, StepTooLarge
from .sampling import rng_for, sample_y

FORMATS = ("json", "csv")


@dataclass(frozen=True)
class SuiteConfig:
    model_id: str = "i"
    dim: int = 3
    c: float = 1.0
    g: float = 0.6
    knobs: dict = field(default_factory=dict)
    seed: int = 0
    samples: int = 50
    box: float = 0.5
    suites: tuple = Su.SUITES
    tol_analytic: float = Su.TOL_ANALYTIC
    tol_fd: float = Su.TOL_FD
    overrides: dict = field(default_factory=dict)
    out_path: str = None
    out_format: str = "json"
    curve: str = None
    steps: tuple = (128, 256, 512)
    vectors: int = 2

    def model(self):
        try:
            return make_model(self.model_id, dim=self.dim, c=self.c, g=self.g, **self.knobs)
        except TypeError as exc:
            raise ConfigError(f"bad model parameter: {exc}") from exc

    def as_dict(self):
        return {"model": self.model_id, "dim": self.dim, "c": self.c, "g": self.g,
                "knobs": dict(sorted(self.knobs.items())), "seed": self.seed,
                "samples": self.samples, "box": self.box, "suites": list(self.suites),
                "tolerance": {"analytic": self.tol_analytic, "fd": self.tol_fd,
                              **dict(sorted(self.overrides.items()))}}


def _num(section, key, kind, default):
    if key not in section:
        return default
    raw = section[key]
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {key} = {raw!r} is not a valid {kind.__name__}") from exc


def parse_steps(text):
    try:
        steps = tuple(int(s) for s in str(text).split(",") if s.strip())
    except ValueError as exc:
        raise ConfigError(f"bad step list {text!r}") from exc
    if not steps or min(steps) < Tr.MIN_STEPS:
        raise ConfigError(f"step counts must be >= {Tr.MIN_STEPS}")
    return steps


def parse_suites(text):
    text = str(text).strip().lower()
    if text in ("", "all"):
        return Su.SUITES
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [s for s in names if s not in Su.SUITES]
    if bad:
        raise ConfigError(f"unknown suites {bad}; choose from {list(Su.SUITES)}")
    return names


def parse_config(text):
    """Build a validated :class:`SuiteConfig` from INI text."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    for sec in cp.sections():
        if sec not in ("model", "run", "tolerance", "output", "transport"):
            raise ConfigError(f"unknown section [{sec}]")
    m = cp["model"] if cp.has_section("model") else cp[cp.default_section]
    knobs = {}
    for key in m:
        if key not in ("id", "dim", "c", "g"):
            knobs[key] = _num(m, key, float, None)
    run = cp["run"] if cp.has_section("run") else cp[cp.default_section]
    tol = cp["tolerance"] if cp.has_section("tolerance") else cp[cp.default_section]
    overrides = {k: _num(tol, k, float, None) for k in tol if k not in ("analytic", "fd")}
    out = cp["output"] if cp.has_section("output") else cp[cp.default_section]
    tr = cp["transport"] if cp.has_section("transport") else cp[cp.default_section]
    cfg = SuiteConfig(
        model_id=m.get("id", "i").strip(),
        dim=_num(m, "dim", int, 3),
        c=_num(m, "c", float, 1.0),
        g=_num(m, "g", float, 0.6),
        knobs=knobs,
        seed=_num(run, "seed", int, 0),
        samples=_num(run, "samples", int, 50),
        box=_num(run, "box", float, 0.5),
        suites=parse_suites(run.get("suites", "all")),
        tol_analytic=_num(tol, "analytic", float, Su.TOL_ANALYTIC),
        tol_fd=_num(tol, "fd", float, Su.TOL_FD),
        overrides=overrides,
        out_path=out.get("path"),
        out_format=out.get("format", "json").strip().lower(),
        curve=tr.get("curve"),
        steps=parse_steps(tr.get("steps", "128,256,512")),
        vectors=_num(tr, "vectors", int, 2),
    )
    validate(cfg)
    return cfg


def validate(cfg):
    if cfg.samples < 1:
        raise ConfigError("samples must be >= 1")
    if cfg.box <= 0:
        raise ConfigError("box must be positive")
    if cfg.out_format not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    if cfg.vectors < 1:
        raise ConfigError("vectors must be >= 1")
    cfg.model()     # dimension, c and g gates live in the model constructor


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def run(cfg):
    """Run the configured suites; returns (report, exit status)."""
    model = cfg.model()
    curve = Tr.parse_curve(cfg.curve, cfg.dim) if cfg.curve else None
    report = Su.run(model, suites=cfg.suites, samples=cfg.samples, seed=cfg.seed, box=cfg.box,
                    tol_analytic=cfg.tol_analytic, tol_fd=cfg.tol_fd, overrides=cfg.overrides,
                    curve=curve, transport_steps=cfg.steps, config=cfg.as_dict())
    return report, 0 if report.passed else 1


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_check(args):
    cfg = load_config(args.config)
    updates = {}
    if args.suite:
        updates["suites"] = parse_suites(",".join(args.suite))
    if args.out:
        updates["out_path"] = args.out
    if args.format:
        updates["out_format"] = args.format
    if updates:
        cfg = SuiteConfig(**{**cfg.__dict__, **updates})
        validate(cfg)
    report, status = run(cfg)
    for line in report.summary_lines():
        print(line)
    if cfg.out_path:
        _write(cfg.out_path, report.to_csv() if cfg.out_format == "csv" else report.to_json())
    return status


def transport_cmd(cfg, curve_spec, steps, out=None, stream=None):
    """Transport ``cfg.vectors`` sampled vectors along the curve; print drifts and orders."""
    stream = sys.stdout if stream is None else stream
    model = cfg.model()
    curve = Tr.parse_curve(curve_spec, cfg.dim)
    rng = rng_for(cfg.seed)
    bp0 = model.at(curve.x(0.0))
    y0s = [sample_y(rng, bp0) for _ in range(cfg.vectors)]
    status = 0
    try:
        table, orders, runs = Tr.convergence_study(model, curve, y0s, steps)
    except (PoleCrossing, StepTooLarge) as exc:
        print(f"aborted: {type(exc).__name__}: {exc}", file=stream)
        if exc.partial is not None and out:
            _write(out, Tr.write_csv(exc.partial))
        return 1
    print(f"curve {curve.label}  vectors {len(y0s)}", file=stream)
    print(f"{'steps':>7} {'K drift':>12} {'alpha drift':>12} {'transitivity':>12}", file=stream)
    for i, n in enumerate(table["steps"]):
        print(f"{n:>7d} {table['K'][i]:12.3e} {table['alpha'][i]:12.3e} "
              f"{table['transitivity'][i]:12.3e}", file=stream)
    if len(steps) > 1:
        print("observed order", file=stream)
        for i in range(len(steps) - 1):
            a, b = table["steps"][i], table["steps"][i + 1]
            print(f"{a:>5d}->{b:<5d} {orders['K'][i]:12.2f} {orders['alpha'][i]:12.2f} "
                  f"{orders['transitivity'][i]:12.2f}", file=stream)
    if curve.closed:
        hol = Tr.holonomy_report(model, curve, y0s, run=runs[-1])
        print("holonomy", file=stream)
        print("  vector  " + " ".join(f"{v:.3e}" for v in hol["vector"]), file=stream)
        print("  K delta " + " ".join(f"{v:.3e}" for v in hol["K_delta"]), file=stream)
        print(f"  alpha delta {hol['alpha_delta']:.3e}", file=stream)
    if out:
        _write(out, Tr.write_csv(runs[-1]))
    return status


def cmd_transport(args):
    cfg = load_config(args.config)
    curve = args.curve or cfg.curve
    if not curve:
        raise ConfigError("no curve given (--curve or [transport] curve)")
    steps = parse_steps(args.steps) if args.steps else cfg.steps
    return transport_cmd(cfg, curve, steps, out=args.out)


def build_parser():
    p = argparse.ArgumentParser(prog="finslerangle",
                                description="Residual checks for the angle-preserving Finsleroid connection.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="run verification suites and write a residual report")
    c.add_argument("--config", required=True)
    c.add_argument("--suite", action="append", help="suite to run (repeatable)")
    c.add_argument("--out", help="report path ('-' for stdout)")
    c.add_argument("--format", choices=FORMATS)
    c.set_defaults(func=cmd_check)
    t = sub.add_parser("transport", help="parallel transport along a curve with a drift study")
    t.add_argument("--config", required=True)
    t.add_argument("--curve", help="circle:radius=R:center=..:plane=i,j or segment:start=..:end=..")
    t.add_argument("--steps", help="comma separated step counts")
    t.add_argument("--out", help="trajectory CSV for the finest step count")
    t.set_defaults(func=cmd_transport)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FinslerError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
