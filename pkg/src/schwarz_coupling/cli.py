"""Command-line front end.

Subcommands: reference (full-domain solve), couple (one coupled run), sweep
(interface / epsilon / lambda studies), verify (built-in checks).  Scenarios
are configured through a flat key=value file layered over two built-in
presets; flags override file values.  All emitted CSV/JSON/plot files are
deterministic: fixed formatting (17 significant digits), fixed row ordering,
no timestamps, and every file carries the hash of the resolved configuration
so outputs can be traced back to their inputs.

Exit codes: 0 success, 1 verification/solver failure, 2 coupling
non-convergence, 64 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import (
    ErrorReport,
    LambdaTraceEntry,
    SweepRow,
    detect_threshold,
    sweep_epsilon,
    sweep_interface,
    sweep_lambda,
)
from .elliptic2d import Field2D, LinearSolveError, solve_reference
from .forcing import ConstantForcing, ForcingSpec, GaussianSine, forcing_field
from .geometry import Domain2D, build_funnel, build_rectangle, split_at_interface
from .reduced1d import Field1D
from .schwarz import (
    CoupledSolution,
    CouplingConfig,
    IterationTrace,
    SchwarzNonConvergenceError,
    lambda_opt,
    schwarz_solve,
)
from .verification import FAIL, run_verification

__all__ = ["RunConfig", "PRESETS", "resolve_config", "config_hash", "main"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NO_CONVERGENCE = 2
EXIT_USAGE = 64

DEFAULT_SHALLOW_CELLS = 10


class UsageError(Exception):
    """Bad invocation or configuration; maps to exit code 64."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run parameters (defaults < preset < file < flags)."""

    scenario: str = "rect"  # rect | funnel | custom
    shape: str = "rect"  # shape used when scenario == custom
    L: float = 20.0  # rectangle length
    H: float = 0.5  # shallow height
    channel_len: float = 2.0  # funnel channel length
    expansion_len: float | None = None  # funnel box length (default l/3)
    l: float = 3.0  # funnel box height
    kappa: float = 0.001
    forcing: str = "gaussian-sine"  # gaussian-sine | constant
    m: float = 1.0  # forcing amplitude
    x_star: float = 19.0  # gaussian center abscissa
    gamma1: float = 0.0  # left Dirichlet value
    gamma2: float = 0.0  # right Dirichlet value
    l0: float = 16.0  # interface abscissa
    lam: str = "opt"  # "opt" or a positive number
    tol: float = 1e-8
    max_iter: int = 50
    hx: float | None = None  # default: hz
    hz: float | None = None  # default: H / nz, or H / 10
    nx: int | None = None
    nz: int | None = None
    L1: float | None = None  # validity limit for the error bound
    sweep: str | None = None  # interface | epsilon | lambda
    sweep_values: tuple[float, ...] = ()
    jump_factor: float = 5.0
    out: str = "out"
    jobs: int = 0  # 0 -> number of processors


PRESETS: dict[str, dict] = {
    "rect1": {
        "scenario": "rect",
        "L": 20.0,
        "H": 0.5,
        "kappa": 0.001,
        "forcing": "gaussian-sine",
        "m": 1.0,
        "x_star": 19.0,
        "l0": 16.0,
        "L1": 17.0,
    },
    "funnel2": {
        "scenario": "funnel",
        "channel_len": 2.0,
        "H": 0.05,
        "expansion_len": None,
        "l": 3.0,
        "kappa": 0.001,
        "forcing": "constant",
        "m": 1.0,
        "l0": 1.5,
        "L1": 2.0,
    },
}


def _parse_opt_float(s: str) -> float | None:
    return None if s.lower() in ("", "none") else float(s)


def _parse_opt_int(s: str) -> int | None:
    return None if s.lower() in ("", "none") else int(s)


def _parse_opt_str(s: str) -> str | None:
    return None if s.lower() in ("", "none") else s


def _parse_floats(s: str) -> tuple[float, ...]:
    values = tuple(float(t) for t in s.split(",") if t.strip())
    if not values:
        raise ValueError("expected a comma-separated list of numbers")
    return values


_FIELD_PARSERS = {
    "scenario": str,
    "shape": str,
    "L": float,
    "H": float,
    "channel_len": float,
    "expansion_len": _parse_opt_float,
    "l": float,
    "kappa": float,
    "forcing": str,
    "m": float,
    "x_star": float,
    "gamma1": float,
    "gamma2": float,
    "l0": float,
    "lam": str,
    "tol": float,
    "max_iter": int,
    "hx": _parse_opt_float,
    "hz": _parse_opt_float,
    "nx": _parse_opt_int,
    "nz": _parse_opt_int,
    "L1": _parse_opt_float,
    "sweep": _parse_opt_str,
    "sweep_values": _parse_floats,
    "jump_factor": float,
    "out": str,
    "jobs": int,
}


def parse_config_file(path: Path) -> dict:
    """Flat key=value file; # starts a comment, blank lines are ignored."""
    try:
        text = path.read_text()
    except OSError as err:
        raise UsageError(f"cannot read config file {path}: {err}") from err
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _FIELD_PARSERS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _FIELD_PARSERS[key](val)
        except ValueError as err:
            raise UsageError(f"{path}:{lineno}: bad value for {key!r}: {err}") from err
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Layer defaults, preset, config file, and flags into a RunConfig."""
    data = {f.name: f.default for f in fields(RunConfig)}
    if args.preset is not None:
        data.update(PRESETS[args.preset])
    if args.config is not None:
        data.update(parse_config_file(Path(args.config)))
    for key in ("out", "lam", "l0", "jobs", "tol", "sweep", "sweep_values"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    cfg = RunConfig(**data)
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: RunConfig) -> None:
    if cfg.scenario not in ("rect", "funnel", "custom"):
        raise UsageError(f"scenario must be rect, funnel, or custom, got {cfg.scenario!r}")
    if cfg.scenario == "custom" and cfg.shape not in ("rect", "funnel"):
        raise UsageError(f"shape must be rect or funnel, got {cfg.shape!r}")
    if cfg.forcing not in ("gaussian-sine", "constant"):
        raise UsageError(f"forcing must be gaussian-sine or constant, got {cfg.forcing!r}")
    if cfg.sweep not in (None, "interface", "epsilon", "lambda"):
        raise UsageError(f"sweep must be interface, epsilon, or lambda, got {cfg.sweep!r}")
    if cfg.lam != "opt":
        try:
            lam = float(cfg.lam)
        except ValueError:
            raise UsageError(f"lambda must be 'opt' or a number, got {cfg.lam!r}") from None
        if not lam > 0.0:
            raise UsageError(f"lambda must be positive, got {lam}")
    if not cfg.tol > 0.0:
        raise UsageError(f"tol must be positive, got {cfg.tol}")
    if cfg.max_iter < 1:
        raise UsageError(f"max_iter must be >= 1, got {cfg.max_iter}")
    if cfg.jobs < 0:
        raise UsageError(f"jobs must be >= 0, got {cfg.jobs}")


def _canonical_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, tuple):
        return ",".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


# fields that do not influence computed numbers; kept out of the hash so
# reruns into a different directory (or with a different worker count)
# reproduce output files byte for byte
_HASH_EXCLUDED_FIELDS = ("out", "jobs")


def config_hash(cfg: RunConfig) -> str:
    """Hash of the resolved configuration (first 16 hex digits of sha256)."""
    text = "\n".join(
        f"{f.name}={_canonical_value(getattr(cfg, f.name))}"
        for f in fields(RunConfig)
        if f.name not in _HASH_EXCLUDED_FIELDS
    )
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# scenario construction


def _shape_kind(cfg: RunConfig) -> str:
    return cfg.shape if cfg.scenario == "custom" else cfg.scenario


def _total_length(cfg: RunConfig) -> float:
    if _shape_kind(cfg) == "rect":
        return cfg.L
    expansion = cfg.expansion_len if cfg.expansion_len is not None else cfg.l / 3.0
    return cfg.channel_len + expansion


def _resolve_spacings(cfg: RunConfig) -> tuple[float, float]:
    if cfg.hz is not None:
        hz = cfg.hz
    elif cfg.nz is not None:
        hz = cfg.H / cfg.nz
    else:
        hz = cfg.H / DEFAULT_SHALLOW_CELLS
    if cfg.hx is not None:
        hx = cfg.hx
    elif cfg.nx is not None:
        hx = _total_length(cfg) / cfg.nx
    else:
        hx = hz
    return hx, hz


def shallow_cells(cfg: RunConfig) -> int:
    _, hz = _resolve_spacings(cfg)
    return int(round(cfg.H / hz))


def build_domain(cfg: RunConfig) -> Domain2D:
    hx, hz = _resolve_spacings(cfg)
    if _shape_kind(cfg) == "rect":
        nx = int(round(cfg.L / hx))
        nz = int(round(cfg.H / hz))
        if not (math.isclose(nx * hx, cfg.L, rel_tol=1e-9) and math.isclose(nz * hz, cfg.H, rel_tol=1e-9)):
            raise UsageError(f"grid spacings ({hx}, {hz}) do not divide the extents ({cfg.L}, {cfg.H})")
        return build_rectangle(cfg.L, cfg.H, nx, nz)
    return build_funnel(cfg.channel_len, cfg.H, cfg.expansion_len, cfg.l, hx, hz)


def make_forcing(cfg: RunConfig) -> ForcingSpec:
    if cfg.forcing == "gaussian-sine":
        return GaussianSine(m=cfg.m, x_star=cfg.x_star)
    return ConstantForcing(cfg.m)


def _lam_value(cfg: RunConfig, height: float, l0: float) -> float:
    return lambda_opt(cfg.kappa, height, l0) if cfg.lam == "opt" else float(cfg.lam)


def make_coupling(cfg: RunConfig) -> CouplingConfig:
    domain = build_domain(cfg)
    split = split_at_interface(domain, cfg.l0)
    return CouplingConfig(
        split=split,
        kappa=cfg.kappa,
        lam=_lam_value(cfg, domain.shallow_height, cfg.l0),
        forcing=make_forcing(cfg),
        gamma1=cfg.gamma1,
        gamma2=cfg.gamma2,
        tol=cfg.tol,
        max_iter=cfg.max_iter,
    )


# ---------------------------------------------------------------------------
# deterministic emission


def _fmt(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.16e" % v


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return _fmt(v)
    if isinstance(v, tuple):
        return list(v)
    return v


def _write_lines(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n")


def _csv_lines(hash_hex: str, header: Sequence[str], rows: list[Sequence[str]]) -> list[str]:
    lines = [f"# config_hash={hash_hex}", ",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return lines


def write_field_csv(path: Path, field: Field2D, hash_hex: str) -> None:
    """Active nodes in row-major (x, then z) order as x,z,value."""
    grid = field.domain.grid
    ii, jj = np.nonzero(grid.active)
    xs = grid.x0 + grid.hx * ii
    zs = grid.z0 + grid.hz * jj
    vals = field.values[ii, jj]
    rows = [(_fmt(x), _fmt(z), _fmt(v)) for x, z, v in zip(xs, zs, vals)]
    _write_lines(path, _csv_lines(hash_hex, ("x", "z", "value"), rows))


def write_profile_csv(path: Path, u1: Field1D, hash_hex: str) -> None:
    rows = [(_fmt(x), _fmt(v)) for x, v in zip(u1.x, u1.values)]
    _write_lines(path, _csv_lines(hash_hex, ("x", "value"), rows))


def write_trace_csv(path: Path, trace: IterationTrace, hash_hex: str) -> None:
    rows = [
        (str(int(it)), _fmt(d1), _fmt(d2), _fmt(al), _fmt(rv), _fmt(rf))
        for it, d1, d2, al, rv, rf in trace.rows()
    ]
    _write_lines(path, _csv_lines(hash_hex, IterationTrace.COLUMNS, rows))


def write_report_csv(path: Path, report: ErrorReport, hash_hex: str) -> None:
    rows = []
    for r in report.rows:
        rows.append(
            (
                report.sweep_param,
                _fmt(r.sweep_value),
                _fmt(r.rel_h1_error),
                _fmt(r.rel_l2_error),
                _fmt(r.rel_linf_error),
                _fmt(r.bound_rhs),
                _fmt(r.delta),
                _fmt(r.epsilon),
                _fmt(r.epsilon_bound),
                str(int(r.iterations)),
                _fmt(r.lam),
                r.status.replace(",", ";"),
            )
        )
    _write_lines(path, _csv_lines(hash_hex, ErrorReport.COLUMNS, rows))


def write_meta(path: Path, cfg: RunConfig, hash_hex: str, command: str, extra: dict) -> None:
    meta = {
        "command": command,
        "config_hash": hash_hex,
        "config": {f.name: _json_safe(getattr(cfg, f.name)) for f in fields(RunConfig)},
    }
    meta.update({k: _json_safe(v) for k, v in extra.items()})
    path.write_text(json.dumps(meta, sort_keys=True, indent=2, allow_nan=False) + "\n")


def _plt_header(hash_hex: str, title: str) -> list[str]:
    return [
        f"# config_hash={hash_hex}",
        'set datafile separator ","',
        f'set title "{title}"',
    ]


def write_field_plt(path: Path, csv_name: str, hash_hex: str, title: str) -> None:
    lines = _plt_header(hash_hex, title) + [
        "set view map",
        'set xlabel "x"',
        'set ylabel "z"',
        "set size ratio -1",
        f'splot "{csv_name}" skip 1 using 1:2:3 with points pt 5 ps 0.5 palette notitle',
    ]
    _write_lines(path, lines)


def write_convergence_plt(path: Path, csv_names: list[str], labels: list[str], hash_hex: str, title: str) -> None:
    lines = _plt_header(hash_hex, title) + [
        "set logscale y",
        'set xlabel "iteration"',
        'set ylabel "successive difference (sup norm)"',
    ]
    parts = []
    for name, label in zip(csv_names, labels):
        parts.append(f'"{name}" skip 1 using 1:2 with linespoints title "{label} (1-D)"')
        parts.append(f'"{name}" skip 1 using 1:3 with linespoints title "{label} (2-D)"')
    lines.append("plot " + ", \\\n     ".join(parts))
    _write_lines(path, lines)


def write_sweep_plt(path: Path, csv_name: str, hash_hex: str, param: str) -> None:
    if param == "epsilon":
        lines = _plt_header(hash_hex, "relative H1 error vs aspect ratio") + [
            "set logscale xy",
            'set xlabel "epsilon = H/L"',
            'set ylabel "relative H1 error"',
            f'plot "{csv_name}" skip 1 using 2:3 with linespoints title "measured"',
        ]
    else:
        lines = _plt_header(hash_hex, "relative H1 error vs interface location") + [
            "set logscale y",
            'set xlabel "L0"',
            'set ylabel "relative H1 error"',
            f'plot "{csv_name}" skip 1 using 2:3 with linespoints title "measured", \\',
            f'     "{csv_name}" skip 1 using 2:6 with linespoints title "bound"',
        ]
    _write_lines(path, lines)


# ---------------------------------------------------------------------------
# subcommands


def cmd_reference(cfg: RunConfig, out: Path) -> int:
    domain = build_domain(cfg)
    hash_hex = config_hash(cfg)
    field = solve_reference(
        domain, forcing_field(domain, make_forcing(cfg)), cfg.gamma1, cfg.gamma2, cfg.kappa
    )
    write_field_csv(out / "field.csv", field, hash_hex)
    write_field_plt(out / "reference.plt", "field.csv", hash_hex, "reference solution")
    write_meta(out / "meta.json", cfg, hash_hex, "reference", {"n_active": domain.grid.n_active()})
    return EXIT_OK


def cmd_couple(cfg: RunConfig, out: Path) -> int:
    coupling = make_coupling(cfg)
    hash_hex = config_hash(cfg)
    code = EXIT_OK
    try:
        sol = schwarz_solve(coupling)
    except SchwarzNonConvergenceError as err:
        print(f"warning: {err}", file=sys.stderr)
        sol, code = err.solution, EXIT_NO_CONVERGENCE
    write_profile_csv(out / "u1.csv", sol.u1, hash_hex)
    write_field_csv(out / "u2.csv", sol.u2, hash_hex)
    write_trace_csv(out / "trace.csv", sol.trace, hash_hex)
    write_convergence_plt(
        out / "convergence.plt", ["trace.csv"], [f"lambda={sol.lam:.6g}"], hash_hex, "coupling convergence"
    )
    write_meta(
        out / "meta.json",
        cfg,
        hash_hex,
        "couple",
        {
            "converged": sol.trace.converged,
            "iterations": sol.trace.iterations,
            "lambda": sol.lam,
            "final_residuals": {
                "value": sol.trace.value_residual[-1],
                "flux": sol.trace.flux_residual[-1],
            },
        },
    )
    return code


def _default_sweep_values(cfg: RunConfig, base: CouplingConfig) -> tuple[float, ...]:
    kind = _shape_kind(cfg)
    if cfg.sweep == "interface":
        if kind == "rect":
            return (8.0, 10.0, 12.0, 14.0, 16.0, 17.0, 18.0, 18.5, 19.0)
        return (0.5, 1.0, 1.5, 1.9)
    if cfg.sweep == "epsilon":
        if kind == "rect":
            return (0.0125, 0.025, 0.05, 0.1)
        total = _total_length(cfg)
        return tuple(h / total for h in (0.0125, 0.025, 0.05))
    lam_ref = lambda_opt(cfg.kappa, base.H, cfg.l0)
    return (0.25 * lam_ref, 1.0, 4.0 * lam_ref)


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    if cfg.sweep is None:
        raise UsageError("sweep parameter not configured (set sweep=interface|epsilon|lambda)")
    base = make_coupling(cfg)
    values = cfg.sweep_values or _default_sweep_values(cfg, base)
    if len(values) == 0:
        raise UsageError("empty sweep value list")
    hash_hex = config_hash(cfg)
    lam_arg = None if cfg.lam == "opt" else float(cfg.lam)
    jobs = cfg.jobs if cfg.jobs > 0 else (os.cpu_count() or 1)

    if cfg.sweep == "lambda":
        return _run_lambda_sweep(cfg, base, values, out, hash_hex)

    if cfg.sweep == "interface":
        report = sweep_interface(base, values, lam=lam_arg, L1=cfg.L1, jobs=jobs)
    else:
        report = sweep_epsilon(base, values, lam=lam_arg, L1=cfg.L1, jobs=jobs)
    threshold = detect_threshold(report, cfg.jump_factor) if cfg.sweep == "interface" else None
    write_report_csv(out / "report.csv", report, hash_hex)
    write_sweep_plt(out / "sweep.plt", "report.csv", hash_hex, cfg.sweep)
    n_ok = len(report.ok_rows())
    write_meta(
        out / "meta.json",
        cfg,
        hash_hex,
        "sweep",
        {
            "sweep_values": tuple(values),
            "rows_ok": n_ok,
            "m_const": report.m_const,
            "threshold": threshold,
            "grid": report.grid,
        },
    )
    if n_ok == 0:
        print("error: every sweep row failed", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def _lambda_report(entries: list[LambdaTraceEntry], base: CouplingConfig, cfg: RunConfig) -> ErrorReport:
    rows = []
    for e in entries:
        rows.append(
            SweepRow(
                sweep_value=e.lam,
                rel_h1_error=math.nan,
                rel_l2_error=math.nan,
                rel_linf_error=math.nan,
                bound_rhs=math.nan,
                delta=math.nan,
                epsilon=base.H / (base.split.full.grid.nx * base.split.full.grid.hx),
                epsilon_bound=math.nan,
                iterations=e.trace.iterations,
                lam=e.lam,
                status=e.status,
            )
        )
    full = base.split.full.grid
    return ErrorReport(
        sweep_param="lambda",
        rows=rows,
        kappa=cfg.kappa,
        tol=cfg.tol,
        grid={"nx": full.nx, "nz": full.nz, "hx": full.hx, "hz": full.hz},
        L1=cfg.L1,
    )


def _run_lambda_sweep(
    cfg: RunConfig, base: CouplingConfig, values: Sequence[float], out: Path, hash_hex: str
) -> int:
    try:
        entries = sweep_lambda(base, values)
    except ValueError as err:
        raise UsageError(str(err)) from err
    names, labels = [], []
    for idx, entry in enumerate(entries):
        name = f"trace_lambda_{idx:02d}.csv"
        write_trace_csv(out / name, entry.trace, hash_hex)
        names.append(name)
        labels.append(f"lambda={entry.lam:.6g}")
    write_report_csv(out / "report.csv", _lambda_report(entries, base, cfg), hash_hex)
    write_convergence_plt(
        out / "convergence_lambda.plt", names, labels, hash_hex, "convergence for several Robin parameters"
    )
    write_meta(
        out / "meta.json",
        cfg,
        hash_hex,
        "sweep",
        {
            "sweep_values": tuple(e.lam for e in entries),
            "statuses": [e.status for e in entries],
            "trace_files": names,
        },
    )
    return EXIT_OK if any(e.status == "ok" for e in entries) else EXIT_FAILURE


def cmd_verify(cfg: RunConfig) -> int:
    results = run_verification(shallow_cells=shallow_cells(cfg))
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{r.status.upper():4s}  {r.name:<{width}s}  {r.detail}")
    n_fail = sum(1 for r in results if r.failed)
    print(f"{len(results)} checks, {n_fail} failed")
    return EXIT_OK if n_fail == 0 else EXIT_FAILURE


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schwarz-coupling", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("reference", "solve the full 2-D problem"),
        ("couple", "run the coupled 1-D/2-D iteration"),
        ("sweep", "run an interface, aspect-ratio, or Robin-parameter sweep"),
        ("verify", "run the built-in verification checks"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="key=value configuration file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="built-in scenario preset")
        p.add_argument("--out", metavar="DIR", help="output directory (created if missing)")
        p.add_argument("--lambda", dest="lam", metavar="OPT|VALUE", help="Robin parameter or 'opt'")
        p.add_argument("--l0", type=float, metavar="VALUE", help="interface abscissa")
        p.add_argument("--jobs", type=int, metavar="N", help="sweep worker count (default: processors)")
        p.add_argument("--tol", type=float, metavar="VALUE", help="coupling stop tolerance")
        if name == "sweep":
            p.add_argument("--sweep", choices=("interface", "epsilon", "lambda"), help="sweep parameter")
            p.add_argument(
                "--sweep-values",
                dest="sweep_values",
                type=_parse_floats,
                metavar="V1,V2,...",
                help="sweep values (default: preset list)",
            )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "verify":
            return cmd_verify(cfg)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "reference":
            return cmd_reference(cfg, out)
        if args.command == "couple":
            return cmd_couple(cfg, out)
        return cmd_sweep(cfg, out)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        # invalid geometry/parameters detected past config parsing
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except LinearSolveError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
