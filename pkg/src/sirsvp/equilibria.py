"""Equilibria, threshold quantities, and stability-regime classification.

The fraction dynamics always admit the disease-free equilibrium
``(s, i, r) = (1, 0, 0)``.  The threshold quantity is

    r0 = beta / gamma,   gamma = (1 - p) b + nu + delta.

For ``r0 <= 1`` the disease-free state is globally attracting and no endemic
state exists.  For ``r0 > 1`` a unique endemic equilibrium appears; its
infectious fraction is the single root below ``rho = (b + alpha) / delta`` of
the quadratic

    P(i) = -delta (beta - delta) i^2
           + (delta rho (beta - delta) + (beta - gamma) delta + beta nu) i
           - delta rho (beta - gamma).

Global stability of the endemic state is certified when ``rho >= 1`` or when
``i_u = (beta - gamma)/(beta - delta) <= rho`` (the invariant-region
argument); otherwise stability is left open and reported as uncertified.

This module also settles the demographic fate under endemic disease: the
population either goes extinct (when ``b <= delta*i_e + mu(0)``) or is
regulated at ``n_e = mu^-1(b - delta*i_e)`` below its disease-free carrying
capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from .model import ModelParams

__all__ = [
    "CertificateBasis",
    "DerivedQuantities",
    "Equilibrium",
    "EquilibriumKind",
    "Fate",
    "NoEndemicStateError",
    "PopulationFate",
    "Regime",
    "RegimeReport",
    "check_constant_population_condition",
    "classify_regime",
    "derived_quantities",
    "disease_free_equilibrium",
    "endemic_equilibrium",
    "endemic_polynomial",
    "population_fate",
]


class NoEndemicStateError(ValueError):
    """Requested an endemic quantity but r0 <= 1 (no endemic state exists)."""


class EquilibriumKind(Enum):
    DISEASE_FREE = "disease-free"
    ENDEMIC = "endemic"


class Regime(Enum):
    DFE_GAS = "dfe-gas"
    ENDEMIC_CERTIFIED_GAS = "endemic-certified-gas"
    ENDEMIC_UNCERTIFIED = "endemic-uncertified"


class CertificateBasis(Enum):
    R0_AT_MOST_ONE = "r0-at-most-one"
    RHO_AT_LEAST_ONE = "rho-at-least-one"
    IU_AT_MOST_RHO = "iu-at-most-rho"
    NONE = "none"


class Fate(Enum):
    EXTINCTION = "extinction"
    REGULATION = "regulation"


@dataclass(frozen=True)
class DerivedQuantities:
    """Threshold quantities derived from the parameters.

    ``i_u`` is the infectious fraction where the ``i' = 0`` isocline meets
    ``r = 0``; it is defined only when ``beta > delta`` (always true for
    ``r0 > 1``) and satisfies ``0 < i_u < 1`` in that regime.
    """

    gamma: float
    r0: float
    rho: float
    i_u: Optional[float]


@dataclass(frozen=True)
class Equilibrium:
    """A fixed point of the fraction dynamics with its equation residuals.

    ``residuals`` are the absolute values of the two equilibrium equations

        beta (1 - i_e - r_e) - gamma + delta i_e = 0
        nu i_e - delta (rho - i_e) r_e          = 0

    evaluated at the stored point.
    """

    kind: EquilibriumKind
    s_e: float
    i_e: float
    r_e: float
    residuals: tuple[float, float]

    def as_reduced(self) -> tuple[float, float]:
        return (self.i_e, self.r_e)


@dataclass(frozen=True)
class RegimeReport:
    """Stability classification of the attracting state."""

    r0: float
    regime: Regime
    certificate_basis: CertificateBasis
    endemic: Optional[Equilibrium]


@dataclass(frozen=True)
class PopulationFate:
    """Demographic dichotomy under a globally attracting endemic state.

    ``threshold_gap = b - delta*i_e - mu(0)``: extinction iff the gap is
    nonpositive, otherwise the population is regulated at ``n_e``.
    """

    fate: Fate
    n_e: Optional[float]
    threshold_gap: float


def derived_quantities(params: ModelParams) -> DerivedQuantities:
    """Compute ``gamma``, ``r0``, ``rho`` and (when defined) ``i_u``."""
    gamma = (1.0 - params.p) * params.b + params.nu + params.delta
    r0 = params.beta / gamma
    rho = (params.b + params.alpha) / params.delta
    i_u = None
    if params.beta > params.delta:
        i_u = (params.beta - gamma) / (params.beta - params.delta)
    return DerivedQuantities(gamma=gamma, r0=r0, rho=rho, i_u=i_u)


def disease_free_equilibrium() -> Equilibrium:
    """The disease-free state ``(1, 0, 0)``; exists for every parameter set."""
    return Equilibrium(EquilibriumKind.DISEASE_FREE, 1.0, 0.0, 0.0, (0.0, 0.0))


def endemic_polynomial(params: ModelParams) -> Callable[[float], float]:
    """The quadratic ``P`` whose root below ``rho`` is the endemic ``i_e``."""
    d = derived_quantities(params)
    beta, delta, nu = params.beta, params.delta, params.nu
    a = -delta * (beta - delta)
    b = delta * d.rho * (beta - delta) + (beta - d.gamma) * delta + beta * nu
    c = -delta * d.rho * (beta - d.gamma)

    def poly(i: float) -> float:
        return (a * i + b) * i + c

    return poly


def _equilibrium_residuals(i_e: float, r_e: float, params: ModelParams,
                           d: DerivedQuantities) -> tuple[float, float]:
    res1 = params.beta * (1.0 - i_e - r_e) - d.gamma + params.delta * i_e
    res2 = params.nu * i_e - params.delta * (d.rho - i_e) * r_e
    return (abs(res1), abs(res2))


def endemic_equilibrium(params: ModelParams) -> Optional[Equilibrium]:
    """The unique endemic equilibrium, or ``None`` when ``r0 <= 1``.

    The infectious fraction is the root of ``P`` inside ``(0, rho)``, computed
    with the cancellation-free quadratic formula (larger-magnitude root first,
    the wanted one through the product of roots); the removed fraction follows
    from the second equilibrium equation.
    """
    d = derived_quantities(params)
    if d.r0 <= 1.0:
        return None
    beta, delta, nu = params.beta, params.delta, params.nu
    # r0 > 1 forces beta > gamma > delta, so the quadratic never degenerates.
    assert beta > d.gamma > delta

    a = -delta * (beta - delta)
    b = delta * d.rho * (beta - delta) + (beta - d.gamma) * delta + beta * nu
    c = -delta * d.rho * (beta - d.gamma)
    # a < 0 and c < 0 while b > 0: both roots are positive and exactly one
    # lies below rho (P(0) = c < 0, P(rho) = beta*nu*rho > 0).
    disc = b * b - 4.0 * a * c
    assert disc > 0.0, "endemic quadratic lost its real roots (validation bug)"
    q = -0.5 * (b + math.sqrt(disc))
    i_e = c / q          # smaller root, no cancellation
    other = q / a        # larger root, lies beyond rho
    assert 0.0 < i_e < d.rho < other, "root bracketing failed (validation bug)"
    assert i_e < 1.0, "endemic root escaped the unit interval (validation bug)"

    r_e = nu * i_e / (delta * (d.rho - i_e))
    s_e = 1.0 - i_e - r_e
    assert s_e > 0.0
    return Equilibrium(EquilibriumKind.ENDEMIC, s_e, i_e, r_e,
                       _equilibrium_residuals(i_e, r_e, params, d))


def classify_regime(params: ModelParams) -> RegimeReport:
    """Classify the attracting state per the threshold structure.

    * ``r0 <= 1``: disease-free state globally attracting.
    * ``r0 > 1`` and (``rho >= 1`` or ``i_u <= rho``): endemic state globally
      attracting, certificate in hand.
    * ``r0 > 1`` and ``rho < 1 < i_u/rho``: endemic state exists, global
      stability not certified (high-transmission corner); reported as open.
    """
    d = derived_quantities(params)
    if d.r0 <= 1.0:
        return RegimeReport(d.r0, Regime.DFE_GAS, CertificateBasis.R0_AT_MOST_ONE, None)

    eq = endemic_equilibrium(params)
    if d.rho >= 1.0:
        return RegimeReport(d.r0, Regime.ENDEMIC_CERTIFIED_GAS,
                            CertificateBasis.RHO_AT_LEAST_ONE, eq)

    assert d.i_u is not None
    uncertified = d.i_u > d.rho
    # Equivalent form of the same predicate (valid for rho < 1); the two may
    # only disagree within round-off of the boundary.
    margin = params.beta - d.gamma - d.rho * (params.beta - params.delta)
    alt = params.beta > d.gamma + d.rho * (d.gamma - params.delta) / (1.0 - d.rho)
    if abs(margin) > 1e-12 * max(1.0, params.beta):
        assert uncertified == (margin > 0.0) == alt

    if uncertified:
        return RegimeReport(d.r0, Regime.ENDEMIC_UNCERTIFIED,
                            CertificateBasis.NONE, eq)
    return RegimeReport(d.r0, Regime.ENDEMIC_CERTIFIED_GAS,
                        CertificateBasis.IU_AT_MOST_RHO, eq)


def population_fate(params: ModelParams) -> PopulationFate:
    """Extinction-or-regulation dichotomy once the endemic state attracts.

    Raises:
        NoEndemicStateError: when ``r0 <= 1``; the population then settles at
            its disease-free carrying capacity instead
            (``params.mortality.carrying_capacity(params.b)``).
    """
    eq = endemic_equilibrium(params)
    if eq is None:
        raise NoEndemicStateError(
            "population fate under endemic disease requires r0 > 1")
    gap = params.b - params.delta * eq.i_e - params.mortality.mu(0.0)
    if gap <= 0.0:
        return PopulationFate(Fate.EXTINCTION, None, gap)
    n_e = params.mortality.inverse(params.b - params.delta * eq.i_e)
    return PopulationFate(Fate.REGULATION, n_e, gap)


def check_constant_population_condition(params: ModelParams, mu_const: float) -> float:
    """Signed residual of the degenerate constant-population identity.

    With a constant death rate ``mu``, the total population stays constant
    only under the knife-edge condition

        beta (b - mu) (alpha + mu + nu)
            = delta (alpha + mu) ((p b + beta) - (mu + nu + delta)).

    Returns ``lhs - rhs``; zero (to round-off) iff the identity holds.
    """
    if mu_const <= 0.0:
        raise ValueError(f"constant mortality must be positive, got {mu_const!r}")
    b, beta, nu, delta, p, alpha = (params.b, params.beta, params.nu,
                                    params.delta, params.p, params.alpha)
    lhs = beta * (b - mu_const) * (alpha + mu_const + nu)
    rhs = delta * (alpha + mu_const) * ((p * b + beta) - (mu_const + nu + delta))
    return lhs - rhs
