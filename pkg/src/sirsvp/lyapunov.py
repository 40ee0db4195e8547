"""Lyapunov functions for both equilibria and numerical certificate checks.

Two scalar functions certify the two stability regimes:

* For the disease-free regime the infectious fraction itself works:
  ``l_dfe = i`` is nonnegative and, whenever ``r0 <= 1``, nonincreasing along
  solutions since

      i' = (gamma (r0 - 1) - beta r - (beta - delta) i) i.

* For the endemic regime, a Volterra term in ``i`` plus a quadratic in ``r``:

      l_ee = [i - i_e - i_e ln(i / i_e)]
             + beta / (2 (nu + delta r_e)) (r - r_e)^2,

  which vanishes exactly at ``(i_e, r_e)`` and is positive elsewhere.  Its
  orbital derivative (gradient dotted with the planar vector field) has the
  closed form

      l_ee' = -(beta - delta) (i - i_e)^2
              - beta delta (rho - i) / (nu + delta r_e) * (r - r_e)^2,

  nonpositive wherever ``i <= rho``.  The region ``omega = {i < rho}`` is
  positively invariant precisely when ``i_u <= rho``, which is what makes the
  certificate global in the certified regime; :func:`omega_invariance_check`
  probes that boundary condition directly.

:func:`certify` evaluates value and orbital derivative on a grid and reports
sign violations, giving an empirical check of the certificate on a chosen
region.  Grids are evaluated vectorized; reports are deterministic and
independent of evaluation order (violations sorted lexicographically).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .equilibria import (
    Equilibrium,
    NoEndemicStateError,
    derived_quantities,
    endemic_equilibrium,
)
from .model import DomainError, FractionState, ModelParams, ReducedState

__all__ = [
    "CertificateReport",
    "OmegaInvarianceReport",
    "Region",
    "RegionEmptyError",
    "certify",
    "l_dfe",
    "l_dfe_orbital",
    "l_ee",
    "l_ee_orbital",
    "omega_invariance_check",
]

DEFAULT_RESOLUTION = 200
DEFAULT_EXCLUSION_RADIUS = 1e-6
MAX_REPORTED_VIOLATIONS = 100


class Region(Enum):
    FULL_SIMPLEX = "full-simplex"
    OMEGA = "omega"


class RegionEmptyError(ValueError):
    """Requested certification region has no sample points (cannot occur for
    valid parameters; kept as an explicit guard)."""


# ── disease-free certificate ─────────────────────────────────────────────

def l_dfe(state: FractionState) -> float:
    """Certificate value for the disease-free regime: the infectious fraction."""
    return state.i


def l_dfe_orbital(state: FractionState, params: ModelParams) -> float:
    """Orbital derivative of :func:`l_dfe`; equals the ``i`` component of the
    fraction vector field on the simplex.

    Nonpositive at every simplex point whenever ``r0 <= 1``.
    """
    d = derived_quantities(params)
    i, r = state.i, state.r
    return (d.gamma * (d.r0 - 1.0) - params.beta * r
            - (params.beta - params.delta) * i) * i


# ── endemic certificate ──────────────────────────────────────────────────

def _require_endemic(eq: Equilibrium) -> None:
    if not (eq.i_e > 0.0 and eq.r_e > 0.0):
        raise NoEndemicStateError("certificate needs an interior endemic equilibrium")


def _l_ee_arrays(i, r, eq: Equilibrium, params: ModelParams):
    """Vectorized certificate value; ``i`` must be positive."""
    weight = params.beta / (2.0 * (params.nu + params.delta * eq.r_e))
    return (i - eq.i_e - eq.i_e * np.log(i / eq.i_e)
            + weight * (r - eq.r_e) ** 2)


def _l_ee_orbital_arrays(i, r, eq: Equilibrium, params: ModelParams):
    """Vectorized orbital derivative of the endemic certificate."""
    d = derived_quantities(params)
    coef = params.beta * params.delta / (params.nu + params.delta * eq.r_e)
    return (-(params.beta - params.delta) * (i - eq.i_e) ** 2
            - coef * (d.rho - i) * (r - eq.r_e) ** 2)


def l_ee(state: ReducedState, eq: Equilibrium, params: ModelParams) -> float:
    """Endemic certificate value at ``state``; zero exactly at the equilibrium.

    Raises:
        DomainError: when ``state.i <= 0`` (the logarithmic term needs i > 0).
    """
    _require_endemic(eq)
    if state.i <= 0.0:
        raise DomainError(f"endemic certificate needs i > 0, got i = {state.i!r}")
    return float(_l_ee_arrays(state.i, state.r, eq, params))


def l_ee_orbital(state: ReducedState, eq: Equilibrium, params: ModelParams) -> float:
    """Orbital derivative of :func:`l_ee` along the planar dynamics.

    Matches the chain rule (gradient of the certificate dotted with the
    vector field) to round-off; nonpositive wherever ``i <= rho``, strictly
    negative there away from the equilibrium.
    """
    _require_endemic(eq)
    if state.i <= 0.0:
        raise DomainError(f"endemic certificate needs i > 0, got i = {state.i!r}")
    return float(_l_ee_orbital_arrays(state.i, state.r, eq, params))


# ── grid certification ───────────────────────────────────────────────────

@dataclass(frozen=True)
class CertificateReport:
    """Outcome of a grid sign-check of the endemic certificate.

    Passing means the certificate value is positive at every sampled point
    away from the equilibrium and the orbital derivative is nonpositive
    everywhere sampled, strictly negative outside the exclusion ball of
    radius ``r_excl`` around the equilibrium.
    """

    region: Region
    resolution: int
    n_points: int
    l_min: float
    orbital_max: float
    passed: bool
    n_violations: int
    violations: tuple[tuple[float, float], ...] = field(repr=False)
    r_excl: float = DEFAULT_EXCLUSION_RADIUS


def certify(params: ModelParams,
            eq: Optional[Equilibrium] = None,
            region: Region = Region.FULL_SIMPLEX,
            resolution: int = DEFAULT_RESOLUTION,
            r_excl: float = DEFAULT_EXCLUSION_RADIUS) -> CertificateReport:
    """Check the endemic certificate's sign conditions on a grid.

    The grid covers ``resolution`` interior values of ``i`` times
    ``resolution`` values of ``r`` restricted to ``i + r <= 1`` (and, for
    ``Region.OMEGA``, to ``i < rho``).  Up to 100 violating points are
    reported, sorted lexicographically.

    Raises:
        NoEndemicStateError: when ``r0 <= 1`` (nothing to certify).
        RegionEmptyError: if the requested region contains no grid points.
    """
    if eq is None:
        eq = endemic_equilibrium(params)
        if eq is None:
            raise NoEndemicStateError("grid certification requires r0 > 1")
    _require_endemic(eq)
    if resolution < 2:
        raise ValueError("resolution must be at least 2")

    d = derived_quantities(params)
    i_hi = 1.0 if region is Region.FULL_SIMPLEX else min(1.0, d.rho)
    # strictly interior i levels (the log term excludes i = 0; omega is open)
    i_vals = i_hi * (np.arange(1, resolution + 1)) / (resolution + 1)
    r_vals = np.linspace(0.0, 1.0, resolution)
    ii, rr = np.meshgrid(i_vals, r_vals, indexing="ij")
    mask = ii + rr <= 1.0
    if region is Region.OMEGA:
        mask &= ii < d.rho
    if not mask.any():
        raise RegionEmptyError(f"region {region.value} contains no grid points")

    i_flat = ii[mask]
    r_flat = rr[mask]
    lvals = _l_ee_arrays(i_flat, r_flat, eq, params)
    ovals = _l_ee_orbital_arrays(i_flat, r_flat, eq, params)

    in_ball = ((i_flat - eq.i_e) ** 2 + (r_flat - eq.r_e) ** 2) <= r_excl ** 2
    bad = np.where(in_ball,
                   (lvals < 0.0) | (ovals > 0.0),
                   (lvals <= 0.0) | (ovals >= 0.0))

    outside = ~in_ball
    l_min = float(lvals[outside].min()) if outside.any() else float(lvals.min())
    orbital_max = float(ovals[outside].max()) if outside.any() else float(ovals.max())

    n_violations = int(bad.sum())
    if n_violations:
        pts = np.column_stack([i_flat[bad], r_flat[bad]])
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        pts = pts[order][:MAX_REPORTED_VIOLATIONS]
        violations = tuple((float(a), float(b)) for a, b in pts)
    else:
        violations = ()

    return CertificateReport(
        region=region,
        resolution=resolution,
        n_points=int(mask.sum()),
        l_min=l_min,
        orbital_max=orbital_max,
        passed=n_violations == 0,
        n_violations=n_violations,
        violations=violations,
        r_excl=r_excl,
    )


# ── invariance of omega = {i < rho} ──────────────────────────────────────

@dataclass(frozen=True)
class OmegaInvarianceReport:
    """Boundary check of the region ``omega = {i < rho}``.

    When ``rho >= 1`` the region already contains the whole reduced domain
    and the check is vacuous (``trivially_invariant``).  Otherwise the flow
    through the segment ``{i = rho, 0 <= r <= 1 - rho}`` is sampled: the
    region is positively invariant iff ``i' <= 0`` along it, which holds iff
    ``i_u <= rho`` iff ``beta - gamma - rho (beta - delta) <= 0`` (that same
    margin bounds ``i'`` above on ``rho <= i <= i_u``, giving attractivity).
    """

    rho: float
    i_u: Optional[float]
    trivially_invariant: bool
    predicate_iu_at_most_rho: Optional[bool]
    attractivity_bound: Optional[float]
    boundary_flux: Optional[np.ndarray] = field(repr=False, default=None)

    @property
    def boundary_flux_max(self) -> Optional[float]:
        if self.boundary_flux is None:
            return None
        return float(self.boundary_flux.max())

    @property
    def invariant(self) -> bool:
        if self.trivially_invariant:
            return True
        return bool(self.predicate_iu_at_most_rho)


def omega_invariance_check(params: ModelParams,
                           eq: Optional[Equilibrium] = None,
                           samples: int = 100) -> OmegaInvarianceReport:
    """Probe whether ``omega = {i < rho}`` traps the flow.

    Informative when ``r0 > 1`` and ``rho < 1``; for ``rho >= 1`` the report
    is trivially invariant.  ``eq`` is only used as a sanity anchor
    (``i_e < rho`` always holds) and may be omitted.
    """
    d = derived_quantities(params)
    if eq is not None:
        assert eq.i_e < d.rho, "endemic equilibrium outside omega (validation bug)"
    if d.rho >= 1.0:
        return OmegaInvarianceReport(
            rho=d.rho, i_u=d.i_u, trivially_invariant=True,
            predicate_iu_at_most_rho=None if d.i_u is None else bool(d.i_u <= d.rho),
            attractivity_bound=None,
        )

    margin = params.beta - d.gamma - d.rho * (params.beta - params.delta)
    r_vals = np.linspace(0.0, 1.0 - d.rho, samples)
    # i' on the boundary segment {i = rho}
    flux = (params.beta * (1.0 - d.rho - r_vals) - d.gamma
            + params.delta * d.rho) * d.rho
    predicate = d.i_u is not None and d.i_u <= d.rho
    return OmegaInvarianceReport(
        rho=d.rho, i_u=d.i_u, trivially_invariant=False,
        predicate_iu_at_most_rho=predicate,
        attractivity_bound=margin,
        boundary_flux=flux,
    )
