"""Command-line front end.

Examples
--------
::

    subordination propagation --alpha 1.5 --term 1 1 --t 1 --x 0:4:41
    subordination pdf --kind phi --alpha 1.9 --term 1.5 1 --t 2 --tau 0:4:81
    subordination eigenmodes --alpha 1.8 --term 1.5 1 --modes 4 --t 0:20:41
    subordination verify --suite normalization
    subordination figure 6 --out fig6.csv

A YAML config (``--config``) may hold the problem, grids, tolerances and
output settings; command-line flags override it.  Exit codes: 0 success,
2 invalid input, 3 quadrature failure, 4 failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import __version__
from ._errors import ConvergenceError, DegenerateIdentity, DomainError, ValidationError
from .figures import figure_6, figure_data
from .kernels import kernel_value
from .problem import MultiTermProblem, validate
from .quadrature import QuadratureConfig
from .solver import LineProblem, eigenmodes, solve_interval, solve_line
from .verification import SUITES, run_suite

EXIT_OK, EXIT_VALIDATION, EXIT_CONVERGENCE, EXIT_VERIFY = 0, 2, 3, 4
SCHEMA_VERSION = 1

_CONFIG_KEYS = {
    "schema_version": None,
    "problem": {"alpha", "c", "terms"},
    "quadrature": {"abs_tol", "rel_tol", "tail_eps", "max_panels", "grading_exponent",
                   "talbot_nodes", "talbot_dps"},
    "grids": {"x", "t", "tau"},
    "output": {"path", "format"},
    "options": {"kind", "modes", "initial", "width", "suite", "unsafe_allow_spread"},
}


class ConfigError(ValueError):
    """Malformed or unknown configuration entries."""


@dataclass
class RunManifest:
    """Everything that determines the payload of one run."""

    command: str
    problem: dict | None
    grids: dict
    quadrature: dict
    output: dict
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "package_version": __version__,
            "command": self.command,
            "problem": self.problem,
            "grids": self.grids,
            "quadrature": self.quadrature,
            "output": self.output,
            "options": self.options,
        }


# -- config ----------------------------------------------------------------------

def load_config(path: str) -> dict:
    """Read and check a YAML config; unknown keys are errors."""
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")
    for key, val in data.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        allowed = _CONFIG_KEYS[key]
        if allowed is None:
            continue
        if not isinstance(val, dict):
            raise ConfigError(f"section {key!r} must be a mapping")
        extra = set(val) - allowed
        if extra:
            raise ConfigError(f"unknown keys in {key!r}: {sorted(extra)}")
    return data


def parse_grid(spec) -> np.ndarray:
    """``"a:b:n"`` (``n`` equispaced points), ``"v1,v2,..."``, a number or a list."""
    if isinstance(spec, (int, float)):
        return np.array([float(spec)])
    if isinstance(spec, (list, tuple)):
        return np.array([float(v) for v in spec])
    text = str(spec).strip()
    try:
        if ":" in text:
            a, b, n = text.split(":")
            if int(n) < 1:
                raise ValueError
            return np.linspace(float(a), float(b), int(n))
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {spec!r}; use 'a:b:n' or 'v1,v2,...'") from exc


def _grid_text(spec) -> object:
    return spec if isinstance(spec, (int, float, str)) else [float(v) for v in spec]


# -- output ----------------------------------------------------------------------

def format_table(manifest: RunManifest, columns: dict, fmt: str, extra: dict | None = None) -> str:
    """Render named columns with the manifest as a provenance header."""
    head = manifest.to_dict()
    if extra:
        head["results"] = extra
    if fmt == "json":
        payload = {"manifest": head,
                   "columns": {k: [_num(v) for v in np.asarray(col, dtype=float)]
                               for k, col in columns.items()}}
        return json.dumps(payload, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    for key in sorted(head):
        buf.write(f"# {key}: {json.dumps(head[key], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(columns))
    arr = np.column_stack([np.asarray(c, dtype=float) for c in columns.values()])
    for row in arr:
        w.writerow(["%.17g" % v for v in row])
    return buf.getvalue()


def _num(v: float):
    # JSON has no inf / nan
    return float(v) if math.isfinite(v) else str(v)


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- initial data ----------------------------------------------------------------

def _line_initial(name: str, width: float):
    if name == "indicator":
        return (lambda x: (np.abs(np.asarray(x)) <= width).astype(float)), (-width, width), \
            (-width, width)
    if name == "gaussian":
        return (lambda x: np.exp(-(np.asarray(x) / width) ** 2)), (), None
    raise ConfigError(f"unknown line initial datum {name!r}; use indicator or gaussian")


def _interval_initial(name: str, width: float):
    if name == "mode1":
        return (lambda x: math.sqrt(2.0) * np.sin(np.pi * np.asarray(x))), ()
    if name == "hat":
        return (lambda x: np.maximum(0.0, 1.0 - np.abs(2.0 * np.asarray(x) - 1.0))), (0.5,)
    if name == "indicator":
        lo, hi = 0.5 - width / 2, 0.5 + width / 2
        return (lambda x: ((np.asarray(x) >= lo) & (np.asarray(x) <= hi)).astype(float)), (lo, hi)
    raise ConfigError(f"unknown interval initial datum {name!r}; use mode1, hat or indicator")


# -- argument parsing ------------------------------------------------------------

def _common(parser: argparse.ArgumentParser, problem: bool = True):
    parser.add_argument("--config", help="YAML run configuration")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    parser.add_argument("--tol", type=float, help="absolute and relative quadrature tolerance")
    if problem:
        parser.add_argument("--alpha", type=float, help="leading order in (1, 2]")
        parser.add_argument("--c", type=float, help="leading coefficient")
        parser.add_argument("--term", nargs=2, type=float, action="append",
                            metavar=("ORDER", "COEF"), help="lower-order term (repeatable)")
        parser.add_argument("--unsafe-allow-spread", action="store_true",
                            help="accept alpha - alpha_m > 1 (positivity not guaranteed)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subordination", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagation", help="w(x, t) along x at fixed t")
    _common(p)
    p.add_argument("--x", help="x grid")
    p.add_argument("--t", help="fixed t")
    p.add_argument("--no-cutoff", action="store_true", help="evaluate beyond the front too")

    p = sub.add_parser("pdf", help="phi(t, tau) or psi(t, tau) along tau")
    _common(p)
    p.add_argument("--kind", choices=("phi", "psi"))
    p.add_argument("--tau", help="tau grid")
    p.add_argument("--t", help="fixed t")

    p = sub.add_parser("fundamental", help="G_c along x at fixed t, or G_s along t at fixed x")
    _common(p)
    p.add_argument("--kind", choices=("G_c", "G_s"))
    p.add_argument("--x", help="x grid (G_c) or fixed x (G_s)")
    p.add_argument("--t", help="fixed t (G_c) or t grid (G_s)")

    p = sub.add_parser("eigenmodes", help="Dirichlet eigenmodes u_n(t) on (0, 1)")
    _common(p)
    p.add_argument("--modes", type=int, help="number of modes (default 4)")
    p.add_argument("--t", help="t grid")

    p = sub.add_parser("solve-line", help="u(x, t) on the whole line")
    _common(p)
    p.add_argument("--initial", help="indicator (default) or gaussian")
    p.add_argument("--width", type=float, help="half width of the initial datum (default 1)")
    p.add_argument("--x", help="x grid")
    p.add_argument("--t", help="t grid")

    p = sub.add_parser("solve-interval", help="u(x, t) on (0, 1) by eigenfunction expansion")
    _common(p)
    p.add_argument("--initial", help="mode1, hat (default) or indicator")
    p.add_argument("--width", type=float, help="width of the indicator datum (default 0.5)")
    p.add_argument("--modes", type=int, help="number of modes (default 64)")
    p.add_argument("--x", help="x grid")
    p.add_argument("--t", help="t grid")

    p = sub.add_parser("verify", help="run invariant suites")
    _common(p, problem=False)
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"])

    p = sub.add_parser("figure", help="data behind figure N (1..6)")
    _common(p, problem=False)
    p.add_argument("number", type=int, choices=range(1, 7))
    p.add_argument("--modes", type=int, help="eigenmodes in figure 6 (default 4)")
    return parser


# -- resolution of flags against the config ------------------------------------

class _Settings:
    def __init__(self, args, config: dict):
        self.args = args
        self.config = config

    def section(self, name):
        return self.config.get(name, {}) or {}

    def get(self, flag, section, key, default=None):
        val = getattr(self.args, flag, None)
        if val is not None:
            return val
        return self.section(section).get(key, default)

    def problem(self) -> MultiTermProblem:
        sec = self.section("problem")
        alpha = self.args.alpha if self.args.alpha is not None else sec.get("alpha")
        if alpha is None:
            raise ConfigError("the problem needs --alpha (or problem.alpha in the config)")
        c = self.args.c if self.args.c is not None else sec.get("c", 1.0)
        terms = self.args.term if self.args.term else sec.get("terms", [])
        unsafe = self.args.unsafe_allow_spread or bool(
            self.section("options").get("unsafe_allow_spread", False))
        return validate(alpha, c, terms, allow_spread=unsafe)

    def quadrature(self) -> QuadratureConfig:
        sec = dict(self.section("quadrature"))
        tol = getattr(self.args, "tol", None)
        if tol is not None:
            sec["abs_tol"] = sec["rel_tol"] = tol
        try:
            return QuadratureConfig(**sec)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def grid(self, name, default):
        raw = getattr(self.args, name, None)
        if raw is None:
            raw = self.section("grids").get(name, default)
        return _grid_text(raw), parse_grid(raw)

    def output(self):
        fmt = self.get("format", "output", "format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown output format {fmt!r}")
        return {"path": self.get("out", "output", "path"), "format": fmt}


def _scalar(values: np.ndarray, name: str) -> float:
    if values.size != 1:
        raise ConfigError(f"{name} must be a single value")
    return float(values[0])


def _kernel_columns(p, kind, coords, fixed, cfg, **kw):
    vals, errs, logs = [], [], []
    for co in coords:
        kv = kernel_value(p, kind, float(co), fixed, cfg, **kw)
        vals.append(kv.value)
        errs.append(kv.error_estimate)
        logs.append(kv.log_value if kv.log_value is not None
                    else (math.log(kv.value) if kv.value > 0 else -math.inf))
    return np.array(vals), np.array(errs), np.array(logs)


def run(args, config: dict) -> tuple[int, str]:
    """Execute one parsed command; returns the exit status and the payload."""
    st = _Settings(args, config)
    cfg = st.quadrature()
    out = st.output()
    cmd = args.command
    opts = st.section("options")

    if cmd == "verify":
        suite = args.suite or opts.get("suite", "all")
        rows = run_suite(suite, cfg, progress=lambda r: print(r.line(), file=sys.stderr))
        man = RunManifest(cmd, None, {}, cfg.to_dict(), out, {"suite": suite})
        cols = {"passed": [float(r.passed) for r in rows],
                "measured": [r.measured for r in rows],
                "threshold": [r.threshold for r in rows]}
        names = [f"{r.suite}/{r.name}" for r in rows]
        text = format_table(man, cols, out["format"], {"checks": names})
        return (EXIT_OK if all(r.passed for r in rows) else EXIT_VERIFY), text

    if cmd == "figure":
        n_modes = args.modes or 4
        fig = figure_6(cfg, n_modes) if args.number == 6 else figure_data(args.number, cfg)
        man = RunManifest(cmd, None, {}, cfg.to_dict(), out,
                          {"figure": args.number, "problems": fig.problems, **fig.meta})
        return EXIT_OK, format_table(man, fig.columns, out["format"])

    p = st.problem()
    if cmd == "propagation":
        xs, x = st.grid("x", "0.1:4:40")
        ts, t = st.grid("t", 1.0)
        t0 = _scalar(t, "t")
        vals, errs, logs = _kernel_columns(p, "propagation_w", x, t0, cfg,
                                           wavefront_cutoff=not args.no_cutoff)
        man = RunManifest(cmd, p.to_dict(), {"x": xs, "t": ts}, cfg.to_dict(), out,
                          {"cutoff": not args.no_cutoff})
        cols = {"x": x, "w": vals, "log_w": logs, "error_estimate": errs}
    elif cmd == "pdf":
        kind = args.kind or opts.get("kind", "phi")
        taus, tau = st.grid("tau", "0:4:41")
        ts, t = st.grid("t", 1.0)
        vals, errs, logs = _kernel_columns(p, kind, tau, _scalar(t, "t"), cfg)
        man = RunManifest(cmd, p.to_dict(), {"tau": taus, "t": ts}, cfg.to_dict(), out,
                          {"kind": kind})
        cols = {"tau": tau, kind: vals, "error_estimate": errs}
    elif cmd == "fundamental":
        kind = args.kind or opts.get("kind", "G_c")
        if kind == "G_c":
            xs, x = st.grid("x", "0.1:4:40")
            ts, t = st.grid("t", 1.0)
            vals, errs, _ = _kernel_columns(p, kind, x, _scalar(t, "t"), cfg)
            cols = {"x": x, kind: vals, "error_estimate": errs}
        else:
            xs, x = st.grid("x", 1.0)
            ts, t = st.grid("t", "0.1:10:100")
            vals, errs, _ = _kernel_columns(p, kind, t, _scalar(x, "x"), cfg)
            cols = {"t": t, kind: vals, "error_estimate": errs}
        man = RunManifest(cmd, p.to_dict(), {"x": xs, "t": ts}, cfg.to_dict(), out,
                          {"kind": kind})
    elif cmd == "eigenmodes":
        n = int(st.get("modes", "options", "modes", 4))
        if n < 1:
            raise ConfigError("--modes must be at least 1")
        ts, t = st.grid("t", "0:5:51")
        lam = (np.arange(1, n + 1) * np.pi) ** 2
        modes = eigenmodes(p, lam, t, cfg)
        man = RunManifest(cmd, p.to_dict(), {"t": ts}, cfg.to_dict(), out,
                          {"modes": n, "lambda_n": lam.tolist()})
        cols = {"t": t, **{f"u_{k + 1}": modes[k] for k in range(n)}}
    elif cmd == "solve-line":
        name = st.get("initial", "options", "initial", "indicator")
        width = float(st.get("width", "options", "width", 1.0))
        v, brk, support = _line_initial(name, width)
        xs, x = st.grid("x", "-3:3:61")
        ts, t = st.grid("t", "0.5,1,2")
        field_ = solve_line(p, LineProblem(v, x, t, brk, support), cfg)
        man = RunManifest(cmd, p.to_dict(), {"x": xs, "t": ts}, cfg.to_dict(), out,
                          {"initial": name, "width": width})
        tt, xx = np.meshgrid(t, x, indexing="ij")
        cols = {"t": tt.ravel(), "x": xx.ravel(), "u": field_.values.ravel()}
    elif cmd == "solve-interval":
        name = st.get("initial", "options", "initial", "hat")
        width = float(st.get("width", "options", "width", 0.5))
        n = int(st.get("modes", "options", "modes", 64))
        v, brk = _interval_initial(name, width)
        xs, x = st.grid("x", "0:1:21")
        ts, t = st.grid("t", "0:2:5")
        field_, exp = solve_interval(p, v, n, x, t, cfg, breakpoints=brk)
        man = RunManifest(cmd, p.to_dict(), {"x": xs, "t": ts}, cfg.to_dict(), out,
                          {"initial": name, "width": width, "modes": n,
                           "tail_estimate": exp.tail_estimate})
        tt, xx = np.meshgrid(t, x, indexing="ij")
        cols = {"t": tt.ravel(), "x": xx.ravel(), "u": field_.values.ravel()}
    else:  # pragma: no cover - argparse restricts the choices
        raise ConfigError(f"unknown command {cmd!r}")
    return EXIT_OK, format_table(man, cols, out["format"])


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if args.config else {}
        status, text = run(args, config)
        out_path = getattr(args, "out", None) or (config.get("output") or {}).get("path")
        _emit(text, out_path)
        return status
    except (ConfigError, ValidationError, DomainError, DegenerateIdentity) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
