"""SIRS model with vertical transmission and density-dependent mortality.

Compartments are susceptible / infectious / removed; immunity wanes, a
fraction ``p`` of newborns of infectious parents is born infectious, and the
per-capita death rate ``mu(n)`` increases with total population ``n``, so the
population size is itself dynamic.

Three equivalent formulations of the dynamics are provided:

* ``vf_full``      counts ``(x, y, z)`` plus total population ``n``,
                   with frequency-dependent incidence ``beta*x*y/n``;
* ``vf_fraction``  prevalence fractions ``(s, i, r)`` on the unit simplex,
                   optionally coupled to the population equation for ``n``;
* ``vf_reduced``   the planar system in ``(i, r)`` obtained by eliminating
                   ``s = 1 - i - r``.

Everything in this module is a pure function of immutable value objects and
safe to call from any number of threads.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, ClassVar, Mapping, Optional, Sequence

import numpy as np

__all__ = [
    "AffineMortality",
    "DomainError",
    "FractionState",
    "FullState",
    "ModelParams",
    "MortalityLaw",
    "MortalityRangeError",
    "ParameterValidationError",
    "ReducedState",
    "SimplexViolationError",
    "Violation",
    "ZeroPopulationError",
    "fraction_rhs",
    "fraction_with_n_rhs",
    "full_rhs",
    "reduced_rhs",
    "validate_params",
    "vf_fraction",
    "vf_full",
    "vf_reduced",
]

# Input states may be off the simplex by this much (hand-typed data); past it
# we refuse.  Post-integration drift is policed much tighter (1e-9) by the
# integrator.
SIMPLEX_INPUT_TOL = 1e-6


# ----------------------------------------------------------------------
# errors
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """One violated parameter constraint."""

    code: str      # "non-positive-rate" | "p-out-of-range" | "birth-below-baseline-mortality"
    name: str      # offending field
    message: str

    def __str__(self) -> str:
        return f"{self.code}({self.name}): {self.message}"


class ParameterValidationError(ValueError):
    """Raised by :func:`validate_params`; lists every violated constraint."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations = tuple(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class ZeroPopulationError(ValueError):
    """Total population is zero or negative where an incidence term needs n > 0."""


class SimplexViolationError(ValueError):
    """Fraction state is too far from the unit simplex s + i + r = 1."""


class DomainError(ValueError):
    """State lies outside the admissible region of the requested operation."""


class MortalityRangeError(ValueError):
    """Requested rate is outside the range of the mortality law."""


# ----------------------------------------------------------------------
# mortality law
# ----------------------------------------------------------------------

class MortalityLaw(ABC):
    """Strictly increasing per-capita mortality ``mu(n)`` with an inverse.

    The affine law below is the one shipped; the base class is the extension
    point for other strictly increasing forms.
    """

    form: ClassVar[str]

    @abstractmethod
    def mu(self, n: float) -> float:
        """Per-capita death rate at population size ``n >= 0``."""

    @abstractmethod
    def inverse(self, rate: float) -> float:
        """Population size ``n`` with ``mu(n) == rate``."""


@dataclass(frozen=True)
class AffineMortality(MortalityLaw):
    """Affine mortality ``mu(n) = mu0 + k*n``.

    Strictly increasing for ``k > 0``, unbounded above, with the closed-form
    inverse ``mu^-1(rate) = (rate - mu0) / k``.  The disease-free population
    settles where births balance deaths, at ``n* = (b - mu0) / k``.

    Args:
        mu0: Baseline mortality ``mu(0)`` (1/time, > 0).
        k: Density slope (1/(time * population), > 0).
    """

    mu0: float
    k: float

    form: ClassVar[str] = "affine"

    def mu(self, n: float) -> float:
        return self.mu0 + self.k * n

    def inverse(self, rate: float) -> float:
        if rate <= self.mu0:
            raise MortalityRangeError(
                f"rate {rate!r} is not above the baseline mortality mu(0)={self.mu0!r}"
            )
        return (rate - self.mu0) / self.k

    def carrying_capacity(self, b: float) -> float:
        """Disease-free equilibrium population ``n*`` solving ``mu(n*) = b``."""
        return (b - self.mu0) / self.k

    def to_dict(self) -> dict:
        return {"form": self.form, "mu0": self.mu0, "k": self.k}


# ----------------------------------------------------------------------
# parameters
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """Validated epidemiological and demographic constants.

    Args:
        b: Birth rate (1/time, > 0).
        beta: Transmission rate (1/time, > 0).
        nu: Recovery rate (1/time, > 0).
        delta: Disease-induced mortality rate (1/time, > 0).
        p: Fraction of newborns of infectious parents born infectious,
            strictly inside (0, 1).
        alpha: Rate of immunity loss (1/time, > 0).
        mortality: Density-dependent mortality law with ``b > mu(0)`` and
            ``b < sup mu`` (automatic for the affine law).

    Use :func:`validate_params` to construct from raw numbers; the constructor
    itself performs no checks.
    """

    b: float
    beta: float
    nu: float
    delta: float
    p: float
    alpha: float
    mortality: AffineMortality

    def to_dict(self) -> dict:
        return {
            "b": self.b,
            "beta": self.beta,
            "nu": self.nu,
            "delta": self.delta,
            "p": self.p,
            "alpha": self.alpha,
            "mu0": self.mortality.mu0,
            "k": self.mortality.k,
        }

    @staticmethod
    def from_dict(d: Mapping[str, float]) -> "ModelParams":
        return validate_params(
            b=d["b"], beta=d["beta"], nu=d["nu"], delta=d["delta"],
            p=d["p"], alpha=d["alpha"], mu0=d["mu0"], k=d["k"],
        )


def validate_params(*, b: float, beta: float, nu: float, delta: float,
                    p: float, alpha: float, mu0: float, k: float) -> ModelParams:
    """Validate a raw numeric bundle and build :class:`ModelParams`.

    Every violated constraint is reported, not just the first one.

    Raises:
        ParameterValidationError: with one :class:`Violation` per failed
            constraint (codes ``non-positive-rate``, ``p-out-of-range``,
            ``birth-below-baseline-mortality``).
    """
    violations: list[Violation] = []
    for name, value in (("b", b), ("beta", beta), ("nu", nu), ("delta", delta),
                        ("alpha", alpha), ("mu0", mu0), ("k", k)):
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            violations.append(Violation(
                "non-positive-rate", name,
                f"must be a finite positive number, got {value!r}"))
    if not (isinstance(p, (int, float)) and math.isfinite(p) and 0.0 < p < 1.0):
        violations.append(Violation(
            "p-out-of-range", "p",
            f"must lie strictly inside (0, 1), got {p!r}"))
    if not violations and b <= mu0:
        violations.append(Violation(
            "birth-below-baseline-mortality", "b",
            f"birth rate b={b!r} must exceed baseline mortality mu(0)={mu0!r}"))
    if violations:
        raise ParameterValidationError(violations)
    return ModelParams(b=float(b), beta=float(beta), nu=float(nu), delta=float(delta),
                       p=float(p), alpha=float(alpha),
                       mortality=AffineMortality(mu0=float(mu0), k=float(k)))


# ----------------------------------------------------------------------
# states
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FullState:
    """Compartment counts ``(x, y, z)`` and total population ``n``.

    Consistent states satisfy ``x + y + z == n`` up to round-off and have
    nonnegative components.  The constructor does not check; call
    :meth:`validate` where consistency matters.
    """

    x: float   # susceptible count
    y: float   # infectious count
    z: float   # removed count
    n: float   # total population

    def validate(self, tol: float = 1e-9) -> None:
        if min(self.x, self.y, self.z, self.n) < 0.0:
            raise DomainError(f"negative component in {self}")
        if abs(self.x + self.y + self.z - self.n) > tol * max(1.0, self.n):
            raise DomainError(
                f"x + y + z = {self.x + self.y + self.z!r} inconsistent with n = {self.n!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.z, self.n)

    def fractions(self) -> "FractionState":
        """Map to prevalence fractions ``(x/n, y/n, z/n)``, keeping ``n``."""
        if self.n <= 0.0:
            raise ZeroPopulationError(f"cannot take fractions at n = {self.n!r}")
        return FractionState(self.x / self.n, self.y / self.n, self.z / self.n, self.n)


@dataclass(frozen=True)
class FractionState:
    """Prevalence fractions ``(s, i, r)`` on the unit simplex, optional ``n``.

    ``n`` is carried only when the coupled population equation is integrated
    alongside the epidemiological fractions.
    """

    s: float
    i: float
    r: float
    n: Optional[float] = None

    def simplex_drift(self) -> float:
        return abs(self.s + self.i + self.r - 1.0)

    def validate(self, tol: float = SIMPLEX_INPUT_TOL) -> None:
        if min(self.s, self.i, self.r) < -tol:
            raise DomainError(f"negative fraction in {self}")
        if self.simplex_drift() > tol:
            raise SimplexViolationError(
                f"s + i + r = {self.s + self.i + self.r!r} deviates from 1 by more than {tol}")
        if self.n is not None and self.n <= 0.0:
            raise ZeroPopulationError(f"population must be positive, got n = {self.n!r}")

    def normalized(self) -> "FractionState":
        """Project onto the simplex by rescaling; use on near-simplex inputs."""
        total = self.s + self.i + self.r
        if total <= 0.0:
            raise DomainError(f"cannot normalize {self}: nonpositive total")
        return FractionState(self.s / total, self.i / total, self.r / total, self.n)

    def as_tuple(self) -> tuple[float, ...]:
        if self.n is None:
            return (self.s, self.i, self.r)
        return (self.s, self.i, self.r, self.n)


@dataclass(frozen=True)
class ReducedState:
    """Planar state ``(i, r)`` with ``s = 1 - i - r`` implicit."""

    i: float
    r: float

    def validate(self, tol: float = SIMPLEX_INPUT_TOL) -> None:
        if self.i < -tol or self.r < -tol:
            raise DomainError(f"negative component in {self}")
        if self.i + self.r > 1.0 + tol:
            raise DomainError(f"i + r = {self.i + self.r!r} exceeds 1")

    def as_tuple(self) -> tuple[float, float]:
        return (self.i, self.r)


# ----------------------------------------------------------------------
# vector fields
# ----------------------------------------------------------------------
#
# The *_rhs factories return unchecked callables f(t, state_tuple) for the
# integrator's inner loop; the public vf_* wrappers validate their input and
# delegate to the same arithmetic, so there is a single source for each
# formula.

def full_rhs(params: ModelParams) -> Callable[[float, Sequence[float]], tuple]:
    """Right-hand side for counts ``(x, y, z, n)``; no input validation.

    x' = b (n - p y) - mu(n) x - beta x y / n + alpha z
    y' = b p y + beta x y / n - (mu(n) + nu + delta) y
    z' = nu y - (alpha + mu(n)) z
    n' = (b - mu(n)) n - delta y

    The identity ``x' + y' + z' == n'`` holds to round-off.
    """
    b, beta, nu, delta, p, alpha = (params.b, params.beta, params.nu,
                                    params.delta, params.p, params.alpha)
    mu = params.mortality.mu

    def f(t: float, state: Sequence[float]) -> tuple:
        x, y, z, n = state
        m = mu(n)
        inc = beta * x * y / n
        dx = b * (n - p * y) - m * x - inc + alpha * z
        dy = b * p * y + inc - (m + nu + delta) * y
        dz = nu * y - (alpha + m) * z
        dn = (b - m) * n - delta * y
        return (dx, dy, dz, dn)

    return f


def fraction_rhs(params: ModelParams) -> Callable[[float, Sequence[float]], tuple]:
    """Right-hand side for fractions ``(s, i, r)``; no input validation.

    s' = b (1 - s - p i) - (beta - delta) s i + alpha r
    i' = (beta s - gamma + delta i) i,   gamma = (1 - p) b + nu + delta
    r' = nu i - (b + alpha - delta i) r

    On the simplex the components sum to zero identically.
    """
    b, beta, nu, delta, p, alpha = (params.b, params.beta, params.nu,
                                    params.delta, params.p, params.alpha)
    gamma = (1.0 - p) * b + nu + delta

    def f(t: float, state: Sequence[float]) -> tuple:
        s, i, r = state
        ds = b * (1.0 - s - p * i) - (beta - delta) * s * i + alpha * r
        di = (beta * s - gamma + delta * i) * i
        dr = nu * i - (b + alpha - delta * i) * r
        return (ds, di, dr)

    return f


def fraction_with_n_rhs(params: ModelParams) -> Callable[[float, Sequence[float]], tuple]:
    """Fractions coupled to the population equation ``n' = (b - mu(n) - delta i) n``."""
    f3 = fraction_rhs(params)
    b, delta = params.b, params.delta
    mu = params.mortality.mu

    def f(t: float, state: Sequence[float]) -> tuple:
        s, i, r, n = state
        ds, di, dr = f3(t, (s, i, r))
        dn = (b - mu(n) - delta * i) * n
        return (ds, di, dr, dn)

    return f


def reduced_rhs(params: ModelParams) -> Callable[[float, Sequence[float]], tuple]:
    """Right-hand side for the planar system ``(i, r)``; no input validation.

    i' = (beta (1 - i - r) - gamma + delta i) i
    r' = nu i - delta (rho - i) r,   rho = (b + alpha) / delta

    Identical to the (i, r) components of :func:`fraction_rhs` under
    ``s = 1 - i - r``.
    """
    b, beta, nu, delta, p, alpha = (params.b, params.beta, params.nu,
                                    params.delta, params.p, params.alpha)
    gamma = (1.0 - p) * b + nu + delta
    rho = (b + alpha) / delta

    def f(t: float, state: Sequence[float]) -> tuple:
        i, r = state
        di = (beta * (1.0 - i - r) - gamma + delta * i) * i
        dr = nu * i - delta * (rho - i) * r
        return (di, dr)

    return f


def vf_full(state: FullState, params: ModelParams) -> np.ndarray:
    """Time derivative ``(x', y', z', n')`` of a :class:`FullState`.

    Raises:
        ZeroPopulationError: if ``state.n <= 0`` (the incidence term
            ``beta*x*y/n`` requires a positive population).
    """
    if state.n <= 0.0:
        raise ZeroPopulationError(f"vector field undefined at n = {state.n!r}")
    return np.array(full_rhs(params)(0.0, state.as_tuple()))


def vf_fraction(state: FractionState, params: ModelParams) -> np.ndarray:
    """Time derivative ``(s', i', r')`` — plus ``n'`` when the state carries ``n``.

    Raises:
        SimplexViolationError: if ``|s + i + r - 1|`` exceeds 1e-6.
    """
    if state.simplex_drift() > SIMPLEX_INPUT_TOL:
        raise SimplexViolationError(
            f"s + i + r = {state.s + state.i + state.r!r} deviates from 1 by more than "
            f"{SIMPLEX_INPUT_TOL}")
    if state.n is None:
        return np.array(fraction_rhs(params)(0.0, state.as_tuple()))
    return np.array(fraction_with_n_rhs(params)(0.0, state.as_tuple()))


def vf_reduced(state: ReducedState, params: ModelParams) -> np.ndarray:
    """Time derivative ``(i', r')`` of a :class:`ReducedState`."""
    state.validate()
    return np.array(reduced_rhs(params)(0.0, state.as_tuple()))
