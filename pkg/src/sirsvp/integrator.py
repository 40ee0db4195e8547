"""Adaptive explicit Runge-Kutta integration for the model's three systems.

The kernel is a Dormand-Prince 5(4) embedded pair with PI step-size control
and the standard quartic dense-output interpolant — the dynamics here are
smooth and non-stiff, so an explicit pair with error-based step control is
the right tool and keeps the inner loop free of array overhead.

:func:`solve` drives an arbitrary ``f(t, y)`` (used directly by the tests on
problems with known solutions); :func:`integrate` wraps it for the model
systems and additionally

* renormalizes fraction states onto the simplex when the drift exceeds
  1e-9 (counting every such projection),
* re-syncs ``n`` with ``x + y + z`` for count states under the same policy,
* watches for population collapse in full-system runs (``n`` falling below
  1e-6 of the disease-free carrying capacity), and
* optionally stops early once the state enters an ``eps``-ball around a
  target (steady-state detection).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .model import (
    FractionState,
    FullState,
    ModelParams,
    ReducedState,
    fraction_rhs,
    fraction_with_n_rhs,
    full_rhs,
    reduced_rhs,
)

__all__ = [
    "IntegrationSpec",
    "MaxStepsExceededError",
    "SolveResult",
    "StepStats",
    "SystemKind",
    "TerminalEvent",
    "TerminalKind",
    "Trajectory",
    "detect_convergence",
    "integrate",
    "solve",
]

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10
DRIFT_PROJECT_TOL = 1e-9      # renormalize fraction/count states past this
EXTINCTION_FACTOR = 1e-6      # n below this multiple of n* counts as collapse

# ── Dormand-Prince 5(4) tableau ──────────────────────────────────────────

C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                           49.0 / 176.0, -5103.0 / 18656.0)
A71, A73, A74, A75, A76 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
# 5th-order weights minus the embedded 4th-order ones
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
# dense-output coefficients
D1 = -12715105075.0 / 11282082432.0
D3 = 87487479700.0 / 32700410799.0
D4 = -10690763975.0 / 1880347072.0
D5 = 701980252875.0 / 199316789632.0
D6 = -1453857185.0 / 822651844.0
D7 = 69997945.0 / 29380423.0

SAFETY = 0.9
BETA_PI = 0.04                # PI stabilization exponent
EXPO = 0.2 - BETA_PI * 0.75
MIN_FACTOR, MAX_FACTOR = 0.2, 10.0


class SystemKind(Enum):
    FULL = "full"
    FRACTION = "fraction"
    FRACTION_WITH_N = "fraction-with-n"
    REDUCED = "reduced"


class TerminalKind(Enum):
    REACHED_T_END = "reached-t-end"
    CONVERGED = "converged"
    EXTINCTION_THRESHOLD = "extinction-threshold"
    STEP_FAILURE = "step-failure"


@dataclass(frozen=True)
class TerminalEvent:
    """Why and when an integration stopped."""

    kind: TerminalKind
    time: float
    target: Optional[tuple[float, ...]] = None


@dataclass
class StepStats:
    """Bookkeeping for one integration run."""

    accepted: int = 0
    rejected: int = 0
    rhs_evals: int = 0
    projections: int = 0
    max_drift: float = 0.0


class MaxStepsExceededError(RuntimeError):
    """Step budget exhausted before reaching ``t_end``."""


@dataclass(frozen=True)
class IntegrationSpec:
    """What to integrate and how accurately.

    ``initial`` may be a typed state matching ``system`` or a plain tuple in
    that system's component order.
    """

    system: SystemKind
    initial: Union[FullState, FractionState, ReducedState, Sequence[float]]
    t_end: float
    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL
    max_steps: int = 1_000_000

    def __post_init__(self) -> None:
        if not self.t_end > 0.0:
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        if not 1e-12 <= self.rtol <= 1e-3:
            raise ValueError(f"rtol must lie in [1e-12, 1e-3], got {self.rtol!r}")
        if not 1e-14 <= self.atol <= 1e-6:
            raise ValueError(f"atol must lie in [1e-14, 1e-6], got {self.atol!r}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


@dataclass
class _DenseSegment:
    t0: float
    h: float
    r1: tuple
    r2: tuple
    r3: tuple
    r4: tuple
    r5: tuple

    def eval(self, t: float) -> tuple:
        theta = (t - self.t0) / self.h
        omt = 1.0 - theta
        return tuple(
            r1 + theta * (r2 + omt * (r3 + theta * (r4 + omt * r5)))
            for r1, r2, r3, r4, r5 in zip(self.r1, self.r2, self.r3, self.r4, self.r5)
        )


@dataclass
class SolveResult:
    """Raw kernel output: accepted-step samples plus dense interpolant."""

    t: np.ndarray
    y: np.ndarray
    terminal: TerminalEvent
    stats: StepStats
    segments: list[_DenseSegment] = field(repr=False, default_factory=list)

    def sample(self, times: Union[float, Sequence[float]]) -> np.ndarray:
        """Interpolate the solution at the requested times (within the run)."""
        scalar = np.isscalar(times)
        ts = np.atleast_1d(np.asarray(times, dtype=float))
        if ts.size and (ts.min() < self.t[0] - 1e-12 or ts.max() > self.t[-1] + 1e-12):
            raise ValueError("requested sample time outside the integrated span")
        starts = [seg.t0 for seg in self.segments]
        out = np.empty((ts.size, self.y.shape[1]))
        for j, tq in enumerate(ts):
            if not self.segments or tq <= self.t[0]:
                out[j] = self.y[0]
                continue
            idx = min(bisect.bisect_right(starts, tq) - 1, len(self.segments) - 1)
            idx = max(idx, 0)
            out[j] = self.segments[idx].eval(min(tq, self.t[-1]))
        return out[0] if scalar else out


@dataclass
class Trajectory:
    """An integrated path of one of the model systems."""

    system: SystemKind
    columns: tuple[str, ...]
    t: np.ndarray
    y: np.ndarray
    terminal: TerminalEvent
    stats: StepStats
    _result: Optional[SolveResult] = field(repr=False, default=None)

    def sample(self, times: Union[float, Sequence[float]]) -> np.ndarray:
        return self._result.sample(times)

    def final_state(self) -> np.ndarray:
        return self.y[-1]

    def column(self, name: str) -> np.ndarray:
        return self.y[:, self.columns.index(name)]


def _error_norm(err: tuple, y0: tuple, y1: tuple, rtol: float, atol: float) -> float:
    acc = 0.0
    for e, a, b in zip(err, y0, y1):
        sc = atol + rtol * max(abs(a), abs(b))
        q = e / sc
        acc += q * q
    return math.sqrt(acc / len(err))


def _initial_step(f, t0, y0, f0, t_end, rtol, atol) -> float:
    """Hairer-style heuristic for the first trial step."""
    n = len(y0)
    sc = [atol + rtol * abs(v) for v in y0]
    d0 = math.sqrt(sum((y0[i] / sc[i]) ** 2 for i in range(n)) / n)
    d1 = math.sqrt(sum((f0[i] / sc[i]) ** 2 for i in range(n)) / n)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, t_end - t0)
    y1 = tuple(y0[i] + h0 * f0[i] for i in range(n))
    f1 = f(t0 + h0, y1)
    d2 = math.sqrt(sum(((f1[i] - f0[i]) / sc[i]) ** 2 for i in range(n)) / n) / h0
    dmax = max(d1, d2)
    h1 = (0.01 / dmax) ** 0.2 if dmax > 1e-15 else max(1e-6, h0 * 1e-3)
    return min(100.0 * h0, h1, t_end - t0)


def solve(f: Callable[[float, tuple], tuple],
          y0: Sequence[float],
          t_end: float,
          *,
          t0: float = 0.0,
          rtol: float = DEFAULT_RTOL,
          atol: float = DEFAULT_ATOL,
          max_steps: int = 1_000_000,
          h_max: Optional[float] = None,
          post_step: Optional[Callable[[float, tuple], tuple]] = None,
          stop: Optional[Callable[[float, tuple], Optional[TerminalEvent]]] = None,
          ) -> SolveResult:
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end``.

    Accepted steps keep the local error estimate below ``atol + rtol*|y|``
    componentwise (RMS); the step size is driven by a PI controller.

    Args:
        f: Right-hand side mapping ``(t, y_tuple) -> dy_tuple``.
        y0: Initial state.
        t_end: Final time (must exceed ``t0``).
        h_max: Optional cap on the step size.
        post_step: Hook applied to each accepted state; may return an adjusted
            state (used for simplex renormalization).  Returning a different
            object invalidates the first-same-as-last optimization for the
            next step, which is handled here.
        stop: Hook inspecting each accepted ``(t, y)``; returning a
            :class:`TerminalEvent` ends the run at that sample.

    Raises:
        MaxStepsExceededError: the combined accepted/rejected step budget ran
            out before reaching ``t_end``.
    """
    if t_end <= t0:
        raise ValueError("t_end must exceed t0")
    y = tuple(float(v) for v in y0)
    ndim = len(y)
    t = t0
    stats = StepStats()
    span = t_end - t0
    hmax = span if h_max is None else min(h_max, span)

    k1 = f(t, y)
    stats.rhs_evals += 1
    h = min(_initial_step(f, t0, y, k1, t_end, rtol, atol), hmax)
    stats.rhs_evals += 1

    ts = [t]
    ys = [y]
    segments: list[_DenseSegment] = []
    terminal: Optional[TerminalEvent] = None
    facold = 1e-4
    last_rejected = False
    tiny = 1e-14

    if stop is not None:
        terminal = stop(t, y)

    while terminal is None:
        if t >= t_end:
            terminal = TerminalEvent(TerminalKind.REACHED_T_END, t)
            break
        if stats.accepted + stats.rejected >= max_steps:
            raise MaxStepsExceededError(
                f"no convergence to t_end={t_end} within {max_steps} steps (t={t})")
        if h < tiny * max(1.0, abs(t)):
            terminal = TerminalEvent(TerminalKind.STEP_FAILURE, t)
            break
        final = 1.01 * h >= t_end - t   # stretch a hair rather than leave a sliver
        if final:
            h = t_end - t

        k2 = f(t + C2 * h, tuple(y[i] + h * (A21 * k1[i]) for i in range(ndim)))
        k3 = f(t + C3 * h, tuple(y[i] + h * (A31 * k1[i] + A32 * k2[i])
                                 for i in range(ndim)))
        k4 = f(t + C4 * h, tuple(y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
                                 for i in range(ndim)))
        k5 = f(t + C5 * h, tuple(y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i]
                                             + A54 * k4[i]) for i in range(ndim)))
        k6 = f(t + h, tuple(y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                        + A64 * k4[i] + A65 * k5[i]) for i in range(ndim)))
        ynew = tuple(y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i]
                                 + A75 * k5[i] + A76 * k6[i]) for i in range(ndim))
        k7 = f(t + h, ynew)
        stats.rhs_evals += 6

        err = tuple(h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                         + E6 * k6[i] + E7 * k7[i]) for i in range(ndim))
        enorm = _error_norm(err, y, ynew, rtol, atol)

        if enorm > 1.0:
            stats.rejected += 1
            h *= max(MIN_FACTOR, SAFETY * enorm ** -0.2)
            last_rejected = True
            continue

        # accepted: dense coefficients before any projection
        ydiff = tuple(ynew[i] - y[i] for i in range(ndim))
        bspl = tuple(h * k1[i] - ydiff[i] for i in range(ndim))
        seg = _DenseSegment(
            t0=t, h=h,
            r1=y,
            r2=ydiff,
            r3=bspl,
            r4=tuple(ydiff[i] - h * k7[i] - bspl[i] for i in range(ndim)),
            r5=tuple(h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i]
                          + D6 * k6[i] + D7 * k7[i]) for i in range(ndim)),
        )
        segments.append(seg)

        tnew = t_end if final else t + h
        projected = False
        if post_step is not None:
            adjusted = post_step(tnew, ynew)
            if adjusted is not None and adjusted != ynew:
                ynew = adjusted
                projected = True
                stats.projections += 1

        stats.accepted += 1
        t = tnew
        y = ynew
        ts.append(t)
        ys.append(y)

        if projected:
            k1 = f(t, y)   # first-same-as-last no longer valid
            stats.rhs_evals += 1
        else:
            k1 = k7

        if stop is not None:
            terminal = stop(t, y)
            if terminal is not None:
                break

        # PI controller (error per step, stabilized by the previous error)
        if enorm == 0.0:
            factor = MAX_FACTOR
        else:
            factor = SAFETY * enorm ** -EXPO * facold ** BETA_PI
            factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
        if last_rejected:
            factor = min(1.0, factor)
        h = min(h * factor, hmax)
        facold = max(enorm, 1e-4)
        last_rejected = False

    return SolveResult(
        t=np.array(ts), y=np.array(ys), terminal=terminal, stats=stats,
        segments=segments,
    )


# ── model-system wrapper ─────────────────────────────────────────────────

_COLUMNS = {
    SystemKind.FULL: ("x", "y", "z", "n"),
    SystemKind.FRACTION: ("s", "i", "r"),
    SystemKind.FRACTION_WITH_N: ("s", "i", "r", "n"),
    SystemKind.REDUCED: ("i", "r"),
}


def _coerce_initial(spec: IntegrationSpec) -> tuple:
    init = spec.initial
    if isinstance(init, (FullState, FractionState, ReducedState)):
        state = init
    else:
        vals = tuple(float(v) for v in init)
        want = len(_COLUMNS[spec.system])
        if len(vals) != want:
            raise ValueError(
                f"{spec.system.value} initial state needs {want} components, got {len(vals)}")
        if spec.system is SystemKind.FULL:
            state = FullState(*vals)
        elif spec.system is SystemKind.FRACTION:
            state = FractionState(*vals)
        elif spec.system is SystemKind.FRACTION_WITH_N:
            state = FractionState(*vals)
        else:
            state = ReducedState(*vals)

    if spec.system is SystemKind.FULL:
        if not isinstance(state, FullState):
            raise TypeError(f"full system expects FullState, got {type(state).__name__}")
        state.validate()
        if state.n <= 0.0:
            raise ValueError("full system requires a positive initial population")
    elif spec.system in (SystemKind.FRACTION, SystemKind.FRACTION_WITH_N):
        if not isinstance(state, FractionState):
            raise TypeError(f"fraction system expects FractionState, got {type(state).__name__}")
        state.validate()
        if spec.system is SystemKind.FRACTION_WITH_N and state.n is None:
            raise ValueError("fraction-with-n requires the initial state to carry n")
    else:
        if not isinstance(state, ReducedState):
            raise TypeError(f"reduced system expects ReducedState, got {type(state).__name__}")
        state.validate()

    vals = state.as_tuple()
    if spec.system is SystemKind.FRACTION and len(vals) == 4:
        vals = vals[:3]
    return vals


def _make_post_step(system: SystemKind, stats_drift: list) -> Callable[[float, tuple], tuple]:
    if system in (SystemKind.FRACTION, SystemKind.FRACTION_WITH_N):
        def project(t: float, y: tuple) -> tuple:
            s, i, r = y[0], y[1], y[2]
            # tiny negative undershoot near an absorbing axis is round-off
            if -1e-12 < s < 0.0:
                s = 0.0
            if -1e-12 < i < 0.0:
                i = 0.0
            if -1e-12 < r < 0.0:
                r = 0.0
            total = s + i + r
            drift = abs(total - 1.0)
            stats_drift[0] = max(stats_drift[0], drift)
            if drift > DRIFT_PROJECT_TOL:
                s, i, r = s / total, i / total, r / total
            if (s, i, r) == (y[0], y[1], y[2]):
                return y
            return (s, i, r) + tuple(y[3:])
        return project

    if system is SystemKind.FULL:
        def resync(t: float, y: tuple) -> tuple:
            x, yy, z, n = y
            if -1e-12 * max(1.0, n) < x < 0.0:
                x = 0.0
            if -1e-12 * max(1.0, n) < yy < 0.0:
                yy = 0.0
            if -1e-12 * max(1.0, n) < z < 0.0:
                z = 0.0
            total = x + yy + z
            drift = abs(total - n) / max(1.0, n)
            stats_drift[0] = max(stats_drift[0], drift)
            if drift > DRIFT_PROJECT_TOL:
                n = total
            if (x, yy, z, n) == y:
                return y
            return (x, yy, z, n)
        return resync

    def clamp(t: float, y: tuple) -> tuple:
        i, r = y
        drift = max(0.0, -i, -r, i + r - 1.0)
        stats_drift[0] = max(stats_drift[0], drift)
        if -1e-12 < i < 0.0 or -1e-12 < r < 0.0:
            return (max(i, 0.0), max(r, 0.0))
        return y
    return clamp


def integrate(spec: IntegrationSpec, params: ModelParams, *,
              stop_at_target: Optional[Sequence[float]] = None,
              stop_eps: float = 1e-9,
              h_max: Optional[float] = None) -> Trajectory:
    """Integrate one of the model systems per ``spec``.

    Fraction and reduced trajectories are kept inside their invariant sets
    (renormalization only past a drift of 1e-9, every event counted in the
    stats).  Full-system runs terminate with ``EXTINCTION_THRESHOLD`` when the
    population falls below 1e-6 of the disease-free carrying capacity.

    Args:
        spec: System choice, initial state, horizon, and tolerances.
        params: Validated model parameters.
        stop_at_target: Optional state (matching the system's dimension); the
            run ends with ``CONVERGED`` as soon as the sampled state is within
            ``stop_eps`` of it in the max norm.
        stop_eps: Radius for ``stop_at_target``.
        h_max: Optional step-size cap.

    Returns:
        A :class:`Trajectory` sampled at every accepted step.
    """
    y0 = _coerce_initial(spec)
    rhs_factory = {
        SystemKind.FULL: full_rhs,
        SystemKind.FRACTION: fraction_rhs,
        SystemKind.FRACTION_WITH_N: fraction_with_n_rhs,
        SystemKind.REDUCED: reduced_rhs,
    }[spec.system]
    f = rhs_factory(params)

    drift_box = [0.0]
    post = _make_post_step(spec.system, drift_box)

    target = None
    if stop_at_target is not None:
        target = tuple(float(v) for v in stop_at_target)
        if len(target) != len(y0):
            raise ValueError("stop_at_target dimension does not match the system")

    extinction_level = None
    if spec.system is SystemKind.FULL:
        extinction_level = EXTINCTION_FACTOR * params.mortality.carrying_capacity(params.b)

    def stop(t: float, y: tuple) -> Optional[TerminalEvent]:
        if extinction_level is not None and y[3] < extinction_level:
            return TerminalEvent(TerminalKind.EXTINCTION_THRESHOLD, t)
        if target is not None:
            if max(abs(a - b) for a, b in zip(y, target)) < stop_eps:
                return TerminalEvent(TerminalKind.CONVERGED, t, target)
        return None

    result = solve(f, y0, spec.t_end, rtol=spec.rtol, atol=spec.atol,
                   max_steps=spec.max_steps, h_max=h_max, post_step=post,
                   stop=stop)
    result.stats.max_drift = drift_box[0]
    return Trajectory(
        system=spec.system,
        columns=_COLUMNS[spec.system],
        t=result.t,
        y=result.y,
        terminal=result.terminal,
        stats=result.stats,
        _result=result,
    )


def detect_convergence(traj: Union[Trajectory, SolveResult],
                       target: Sequence[float],
                       eps: float) -> Optional[float]:
    """Earliest sample time after which the path stays within ``eps`` of ``target``.

    Distance is the max norm over state components.  Returns ``None`` when the
    trajectory does not end inside the ``eps``-ball.
    """
    tgt = np.asarray(tuple(float(v) for v in target))
    if tgt.shape != (traj.y.shape[1],):
        raise ValueError("target dimension does not match the trajectory")
    dist = np.max(np.abs(traj.y - tgt), axis=1)
    inside = dist < eps
    if not inside[-1]:
        return None
    # walk back over the trailing run of in-ball samples
    idx = len(inside) - 1
    while idx > 0 and inside[idx - 1]:
        idx -= 1
    return float(traj.t[idx])
