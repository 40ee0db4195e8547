"""One-dimensional parameter sweeps for bifurcation-style analysis.

A sweep varies one parameter over a grid, recomputing threshold quantities,
the equilibrium branch, the stability regime, and the demographic fate at
every point — optionally also probing convergence by integrating the planar
system and timing its approach to the predicted attractor.

Grid points that produce invalid parameters are recorded as skipped rows
with a reason rather than aborting: sweeping across a validity boundary
(say, ``b`` through the baseline mortality) is a normal use case.

Per-point work is independent; with ``threads > 1`` points are evaluated in
a thread pool but assembled in grid order, so results are identical to a
sequential run.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .equilibria import (
    Fate,
    Regime,
    classify_regime,
    derived_quantities,
    population_fate,
)
from .integrator import IntegrationSpec, SystemKind, detect_convergence, integrate
from .model import ModelParams, ParameterValidationError, validate_params

__all__ = [
    "AllPointsInvalidError",
    "SWEEPABLE",
    "SweepRow",
    "SweepResult",
    "SweepSpec",
    "run_sweep",
]

SWEEPABLE = ("b", "beta", "nu", "delta", "p", "alpha", "mu0", "k")
TASKS = ("equilibria", "regime", "fate", "convergence-probe")


class AllPointsInvalidError(ValueError):
    """Every grid point of the sweep produced invalid parameters."""


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep and which per-point tasks to run.

    Args:
        base: Parameter set supplying every non-swept value.
        param: Name of the swept parameter (one of ``SWEEPABLE``).
        lo, hi: Sweep range, ``lo < hi``; the grid is inclusive and uniform.
        points: Number of grid points (>= 1; a single point degenerates to
            one analysis call).
        tasks: Subset of ``TASKS``.  ``fate`` and ``regime`` imply the
            equilibrium computation where they need it.
        probe_initial: Starting point of the convergence probe in the planar
            system.
        probe_t_end: Probe horizon.
        probe_eps: Max-norm radius that counts as converged.
    """

    base: ModelParams
    param: str
    lo: float
    hi: float
    points: int
    tasks: tuple[str, ...] = ("equilibria", "regime", "fate")
    probe_initial: tuple[float, float] = (0.3, 0.3)
    probe_t_end: float = 500.0
    probe_eps: float = 1e-6

    def __post_init__(self) -> None:
        if self.param not in SWEEPABLE:
            raise ValueError(f"cannot sweep {self.param!r}; choose one of {SWEEPABLE}")
        if self.points < 1:
            raise ValueError("points must be at least 1")
        if self.points > 1 and not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo!r}, {self.hi!r}]")
        unknown = set(self.tasks) - set(TASKS)
        if unknown:
            raise ValueError(f"unknown tasks: {sorted(unknown)}")

    def grid(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.points)


# column order is the wire format the CLI writes
ROW_FIELDS = ("value", "gamma", "r0", "rho", "i_u", "i_e", "r_e",
              "regime", "fate", "n_e", "probe", "note")


@dataclass(frozen=True)
class SweepRow:
    """One grid point; analysis fields are ``None`` where undefined/skipped."""

    value: float
    gamma: Optional[float] = None
    r0: Optional[float] = None
    rho: Optional[float] = None
    i_u: Optional[float] = None
    i_e: Optional[float] = None
    r_e: Optional[float] = None
    regime: Optional[Regime] = None
    fate: Optional[Fate] = None
    n_e: Optional[float] = None
    probe: Optional[float] = None    # convergence time, None if not reached/run
    note: str = ""                   # skip reason or probe annotation

    @property
    def skipped(self) -> bool:
        return self.gamma is None


@dataclass
class SweepResult:
    """Rows in grid order plus reproducibility metadata."""

    spec: SweepSpec
    rows: list[SweepRow]
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        return [getattr(row, name) for row in self.rows]


def _with_value(base: ModelParams, param: str, value: float) -> ModelParams:
    d = base.to_dict()
    d[param] = float(value)
    return validate_params(**d)


def _analyze_point(spec: SweepSpec, value: float) -> SweepRow:
    try:
        params = _with_value(spec.base, spec.param, value)
    except ParameterValidationError as err:
        return SweepRow(value=float(value), note=f"skipped: {err}")

    d = derived_quantities(params)
    row = dict(value=float(value), gamma=d.gamma, r0=d.r0, rho=d.rho, i_u=d.i_u)

    report = classify_regime(params)
    eq = report.endemic
    if "regime" in spec.tasks:
        row["regime"] = report.regime
    if "equilibria" in spec.tasks and eq is not None:
        row["i_e"] = eq.i_e
        row["r_e"] = eq.r_e
    if "fate" in spec.tasks and d.r0 > 1.0:
        fate = population_fate(params)
        row["fate"] = fate.fate
        row["n_e"] = fate.n_e
    if "convergence-probe" in spec.tasks:
        target = (0.0, 0.0) if eq is None else (eq.i_e, eq.r_e)
        traj = integrate(
            IntegrationSpec(SystemKind.REDUCED, spec.probe_initial, spec.probe_t_end),
            params,
        )
        row["probe"] = detect_convergence(traj, target, spec.probe_eps)
        if report.regime is Regime.ENDEMIC_UNCERTIFIED:
            row["note"] = "probe target endemic; stability uncertified"
    return SweepRow(**row)


def run_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Run the sweep; deterministic for a given spec regardless of ``threads``.

    Raises:
        AllPointsInvalidError: when no grid point yields valid parameters.
    """
    values = spec.grid()
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda v: _analyze_point(spec, v), values))
    else:
        rows = [_analyze_point(spec, v) for v in values]

    if all(row.skipped for row in rows):
        raise AllPointsInvalidError(
            f"no valid parameter sets along {spec.param} in [{spec.lo}, {spec.hi}]")

    meta = {
        "tool": "sirsvp",
        "version": __version__,
        "swept": spec.param,
        "base_params": spec.base.to_dict(),
        "tasks": list(spec.tasks),
    }
    return SweepResult(spec=spec, rows=rows, meta=meta)
