"""Command-line interface: analyze, simulate, verify, and sweep.

Parameters come from a flat JSON file (keys ``b, beta, nu, delta, p, alpha,
mu0, k``; all rates per unit time) and/or inline flags, inline winning.
Reports go to stdout or ``--out`` as JSON (analyze, verify) or CSV
(simulate, sweep) by default.

Exit codes: 0 success, 1 I/O failure, 2 validation or usage error,
3 certificate failure (verify only).

CSV is written with a header row, comma separators, ``\\n`` line endings and
17 significant digits, so files round-trip losslessly.  Metadata (tool
version, timestamp) lives in ``#``-prefixed header lines / a ``meta`` object
and is suppressed entirely by ``--no-meta`` so that identical invocations
produce byte-identical output.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from datetime import datetime, timezone
from typing import Optional, Sequence

from . import __version__
from .equilibria import (
    NoEndemicStateError,
    classify_regime,
    derived_quantities,
    disease_free_equilibrium,
    endemic_equilibrium,
    population_fate,
)
from .integrator import IntegrationSpec, SystemKind, Trajectory, integrate
from .lyapunov import Region, certify, l_ee, omega_invariance_check
from .model import (
    FractionState,
    FullState,
    ModelParams,
    ParameterValidationError,
    ReducedState,
    validate_params,
)
from .sweep import SWEEPABLE, TASKS, SweepSpec, run_sweep

__all__ = ["main"]

PARAM_KEYS = ("b", "beta", "nu", "delta", "p", "alpha", "mu0", "k")

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_CERTIFICATE = 3


class _CliError(Exception):
    """User-facing failure with an exit code."""

    def __init__(self, message: str, code: int = EXIT_VALIDATION):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return _fmt(value)
    if hasattr(value, "value"):      # enums carry their wire string
        return str(value.value)
    return str(value)


def _meta(command: str) -> dict:
    return {
        "tool": "sirsvp",
        "version": __version__,
        "command": command,
        "generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _emit_json(payload: dict, args) -> None:
    if args.no_meta:
        payload.pop("meta", None)
    _emit(json.dumps(payload, indent=2) + "\n", args.out)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence], meta: Optional[dict]) -> str:
    lines = []
    if meta is not None:
        for key, value in meta.items():
            lines.append(f"# {key}: {value}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


# ── parameter handling ───────────────────────────────────────────────────

def _load_params(args) -> ModelParams:
    raw: dict = {}
    if args.params is not None:
        with open(args.params, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise _CliError(f"{args.params}: expected a flat JSON object")
        raw.update({k: data[k] for k in PARAM_KEYS if k in data})
    for key in PARAM_KEYS:
        override = getattr(args, key)
        if override is not None:
            raw[key] = override
    missing = [k for k in PARAM_KEYS if k not in raw]
    if missing:
        raise _CliError(
            f"missing parameter(s) {', '.join(missing)}; supply --params FILE "
            f"or the corresponding flags")
    return validate_params(**{k: float(raw[k]) for k in PARAM_KEYS})


def _fail(message: str, code: int) -> int:
    print(f"sirsvp: error: {message}", file=sys.stderr)
    return code


# ── analyze ──────────────────────────────────────────────────────────────

def _analysis_payload(params: ModelParams) -> dict:
    d = derived_quantities(params)
    report = classify_regime(params)
    dfe = disease_free_equilibrium()
    payload = {
        "params": params.to_dict(),
        "derived": {"gamma": d.gamma, "r0": d.r0, "rho": d.rho, "i_u": d.i_u},
        "carrying_capacity": params.mortality.carrying_capacity(params.b),
        "disease_free_equilibrium": {"s": dfe.s_e, "i": dfe.i_e, "r": dfe.r_e},
        "endemic_equilibrium": None,
        "regime": {
            "r0": report.r0,
            "regime": report.regime.value,
            "certificate_basis": report.certificate_basis.value,
        },
        "population_fate": None,
    }
    if report.endemic is not None:
        eq = report.endemic
        payload["endemic_equilibrium"] = {
            "s_e": eq.s_e, "i_e": eq.i_e, "r_e": eq.r_e,
            "residuals": list(eq.residuals),
        }
        fate = population_fate(params)
        payload["population_fate"] = {
            "fate": fate.fate.value,
            "n_e": fate.n_e,
            "threshold_gap": fate.threshold_gap,
        }
    return payload


def _cmd_analyze(args) -> int:
    params = _load_params(args)
    payload = {"meta": _meta("analyze")}
    payload.update(_analysis_payload(params))
    if args.format == "csv":
        return _fail("analyze emits JSON only", EXIT_VALIDATION)
    _emit_json(payload, args)
    return EXIT_OK


# ── simulate ─────────────────────────────────────────────────────────────

def _initial_state(args, system: SystemKind):
    def need(names: list[str]) -> list[float]:
        missing = [n for n in names if getattr(args, n) is None]
        if missing:
            flags = ", ".join("--" + n.replace("_", "-") for n in missing)
            raise _CliError(f"{system.value} simulation needs {flags}")
        return [getattr(args, n) for n in names]

    if system is SystemKind.FULL:
        x0, y0, z0 = need(["x0", "y0", "z0"])
        return FullState(x0, y0, z0, x0 + y0 + z0)
    if system is SystemKind.REDUCED:
        i0, r0 = need(["i0", "r0fr"])
        return ReducedState(i0, r0)
    s0, i0, r0 = need(["s0", "i0", "r0fr"])
    state = FractionState(s0, i0, r0, args.n0)
    state.validate()                 # rejects drift beyond 1e-6
    return state.normalized()        # tolerate hand-typed near-simplex input


def _lyapunov_column(traj: Trajectory, params: ModelParams) -> list[float]:
    report = classify_regime(params)
    cols = traj.columns
    values: list[float] = []
    for row in traj.y:
        state = dict(zip(cols, row))
        if traj.system is SystemKind.FULL:
            n = state["n"]
            i, r = state["y"] / n, state["z"] / n
        else:
            i, r = state["i"], state["r"]
        if report.endemic is None:
            values.append(i)         # disease-free certificate
        elif i <= 0.0:
            values.append(math.nan)
        else:
            values.append(l_ee(ReducedState(i, r), report.endemic, params))
    return values


def _cmd_simulate(args) -> int:
    params = _load_params(args)
    system = {
        "full": SystemKind.FULL,
        "fraction": SystemKind.FRACTION,
        "reduced": SystemKind.REDUCED,
    }[args.system]
    state = _initial_state(args, system)
    if system is SystemKind.FRACTION and getattr(state, "n", None) is not None:
        system = SystemKind.FRACTION_WITH_N

    spec = IntegrationSpec(system=system, initial=state, t_end=args.t_end,
                           rtol=args.rtol, atol=args.atol)
    traj = integrate(spec, params)

    header = ["t", *traj.columns]
    columns = [traj.t] + [traj.y[:, j] for j in range(traj.y.shape[1])]
    if args.with_lyapunov:
        header.append("lyapunov")
        columns.append(_lyapunov_column(traj, params))
    rows = list(zip(*columns))

    meta = None if args.no_meta else {
        **_meta("simulate"),
        "params": json.dumps(params.to_dict()),
        "system": system.value,
        "terminal": f"{traj.terminal.kind.value}@{_fmt(traj.terminal.time)}",
        "steps": f"accepted={traj.stats.accepted} rejected={traj.stats.rejected} "
                 f"projections={traj.stats.projections}",
    }
    if args.format == "json":
        payload = {
            "meta": meta or {},
            "params": params.to_dict(),
            "columns": header,
            "rows": [[float(v) for v in row] for row in rows],
            "terminal": {"kind": traj.terminal.kind.value, "time": traj.terminal.time},
            "stats": dataclasses.asdict(traj.stats),
        }
        _emit_json(payload, args)
    else:
        _emit(_csv_text(header, rows, meta), args.out)
    return EXIT_OK


# ── verify ───────────────────────────────────────────────────────────────

def _cmd_verify(args) -> int:
    params = _load_params(args)
    d = derived_quantities(params)
    eq = endemic_equilibrium(params)
    if eq is None:
        return _fail(
            f"r0 = {d.r0:.6g} <= 1: no endemic state; the disease-free regime "
            f"needs no grid certificate", EXIT_VALIDATION)

    if args.region == "auto":
        region = Region.FULL_SIMPLEX if d.rho >= 1.0 else Region.OMEGA
    else:
        region = Region(args.region)
    report = certify(params, eq, region=region, resolution=args.resolution)
    omega = omega_invariance_check(params, eq)

    payload = {
        "meta": _meta("verify"),
        "params": params.to_dict(),
        "derived": {"gamma": d.gamma, "r0": d.r0, "rho": d.rho, "i_u": d.i_u},
        "endemic_equilibrium": {"s_e": eq.s_e, "i_e": eq.i_e, "r_e": eq.r_e},
        "certificate": {
            "region": report.region.value,
            "resolution": report.resolution,
            "n_points": report.n_points,
            "l_min": report.l_min,
            "orbital_max": report.orbital_max,
            "passed": report.passed,
            "n_violations": report.n_violations,
            "violations": [list(pt) for pt in report.violations],
        },
        "omega_invariance": {
            "rho": omega.rho,
            "i_u": omega.i_u,
            "trivially_invariant": omega.trivially_invariant,
            "predicate_iu_at_most_rho": omega.predicate_iu_at_most_rho,
            "attractivity_bound": omega.attractivity_bound,
            "boundary_flux_max": omega.boundary_flux_max,
            "invariant": omega.invariant,
        },
    }
    if args.format == "csv":
        return _fail("verify emits JSON only", EXIT_VALIDATION)
    _emit_json(payload, args)
    return EXIT_OK if report.passed else EXIT_CERTIFICATE


# ── sweep ────────────────────────────────────────────────────────────────

def _cmd_sweep(args) -> int:
    params = _load_params(args)
    tasks = tuple(t.strip() for t in args.tasks.split(",") if t.strip())
    spec = SweepSpec(base=params, param=args.sweep_param,
                     lo=args.lo, hi=args.hi, points=args.points, tasks=tasks)
    threads = int(os.environ.get("SIRSVP_THREADS", "1") or "1")
    if threads == 0:
        threads = os.cpu_count() or 1
    result = run_sweep(spec, threads=threads)

    header = ["value", "gamma", "r0", "rho", "i_u", "i_e", "r_e",
              "regime", "fate", "n_e", "probe", "note"]
    rows = [[getattr(row, name) for name in header] for row in result.rows]

    meta = None if args.no_meta else {**_meta("sweep"), **{
        k: (json.dumps(v) if isinstance(v, (dict, list)) else v)
        for k, v in result.meta.items() if k not in ("tool", "version")
    }}
    if args.format == "json":
        payload = {
            "meta": meta or {},
            "base_params": params.to_dict(),
            "swept": spec.param,
            "columns": header,
            "rows": [[_json_cell(v) for v in row] for row in rows],
        }
        _emit_json(payload, args)
    else:
        _emit(_csv_text(header, rows, meta), args.out)
    return EXIT_OK


def _json_cell(value):
    if hasattr(value, "value"):
        return value.value
    return value


# ── parser ───────────────────────────────────────────────────────────────

def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model parameters")
    group.add_argument("--params", metavar="FILE",
                       help="flat JSON file with keys b, beta, nu, delta, p, alpha, mu0, k")
    for key in PARAM_KEYS:
        group.add_argument(f"--{key}", type=float, default=None,
                           help=f"override parameter {key}")


def _add_output_flags(parser: argparse.ArgumentParser, default_format: str) -> None:
    group = parser.add_argument_group("output")
    group.add_argument("--out", metavar="PATH", default=None,
                       help="write to PATH instead of stdout")
    group.add_argument("--format", choices=("json", "csv"), default=default_format,
                       help=f"output format (default {default_format})")
    group.add_argument("--no-meta", action="store_true",
                       help="omit metadata (timestamps etc.) for byte-identical reruns")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sirsvp",
        description="SIRS-with-demography analysis: equilibria, stability regimes, "
                    "Lyapunov certificates, trajectories, and parameter sweeps.",
    )
    parser.add_argument("--version", action="version", version=f"sirsvp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="thresholds, equilibria, regime, population fate")
    _add_param_flags(p_an)
    _add_output_flags(p_an, "json")

    p_sim = sub.add_parser("simulate", help="integrate a trajectory and emit it as a table")
    _add_param_flags(p_sim)
    _add_output_flags(p_sim, "csv")
    p_sim.add_argument("--system", choices=("full", "fraction", "reduced"), required=True)
    p_sim.add_argument("--t-end", type=float, default=100.0, dest="t_end")
    p_sim.add_argument("--rtol", type=float, default=1e-8)
    p_sim.add_argument("--atol", type=float, default=1e-10)
    p_sim.add_argument("--x0", type=float, help="initial susceptible count (full)")
    p_sim.add_argument("--y0", type=float, help="initial infectious count (full)")
    p_sim.add_argument("--z0", type=float, help="initial removed count (full)")
    p_sim.add_argument("--s0", type=float, help="initial susceptible fraction (fraction)")
    p_sim.add_argument("--i0", type=float, help="initial infectious fraction")
    p_sim.add_argument("--r0fr", type=float, help="initial removed fraction")
    p_sim.add_argument("--n0", type=float, default=None,
                       help="initial population; couples the demographic equation (fraction)")
    p_sim.add_argument("--with-lyapunov", action="store_true", dest="with_lyapunov",
                       help="append the certificate value along the trajectory")

    p_ver = sub.add_parser("verify", help="grid-check the endemic Lyapunov certificate")
    _add_param_flags(p_ver)
    _add_output_flags(p_ver, "json")
    p_ver.add_argument("--resolution", type=int, default=200)
    p_ver.add_argument("--region", choices=("auto", "full-simplex", "omega"), default="auto")

    p_sw = sub.add_parser("sweep", help="sweep one parameter and tabulate the analysis")
    _add_param_flags(p_sw)
    _add_output_flags(p_sw, "csv")
    p_sw.add_argument("--sweep-param", choices=SWEEPABLE, required=True, dest="sweep_param")
    p_sw.add_argument("--lo", type=float, required=True)
    p_sw.add_argument("--hi", type=float, required=True)
    p_sw.add_argument("--points", type=int, required=True)
    p_sw.add_argument("--tasks", default="equilibria,regime,fate",
                      help=f"comma list from {', '.join(TASKS)}")

    return parser


_COMMANDS = {
    "analyze": _cmd_analyze,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _CliError as err:
        return _fail(str(err), err.code)
    except ParameterValidationError as err:
        return _fail(f"invalid parameters: {err}", EXIT_VALIDATION)
    except NoEndemicStateError as err:
        return _fail(str(err), EXIT_VALIDATION)
    except ValueError as err:
        return _fail(str(err), EXIT_VALIDATION)
    except OSError as err:
        return _fail(f"i/o failure: {err}", EXIT_IO)


if __name__ == "__main__":
    raise SystemExit(main())
