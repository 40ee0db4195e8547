"""SIRS epidemic dynamics with a varying population.

A numerical toolkit for the SIRS model with vertical transmission, waning
immunity, disease-induced mortality, and density-dependent background
mortality: threshold quantities and equilibria, stability-regime
classification, Lyapunov-certificate checking, adaptive trajectory
simulation, demographic-fate analysis, and one-dimensional parameter sweeps.
"""

__version__ = "0.1.0"

from .equilibria import (
    CertificateBasis,
    DerivedQuantities,
    Equilibrium,
    EquilibriumKind,
    Fate,
    NoEndemicStateError,
    PopulationFate,
    Regime,
    RegimeReport,
    check_constant_population_condition,
    classify_regime,
    derived_quantities,
    disease_free_equilibrium,
    endemic_equilibrium,
    endemic_polynomial,
    population_fate,
)
from .integrator import (
    IntegrationSpec,
    MaxStepsExceededError,
    StepStats,
    SystemKind,
    TerminalEvent,
    TerminalKind,
    Trajectory,
    detect_convergence,
    integrate,
    solve,
)
from .lyapunov import (
    CertificateReport,
    OmegaInvarianceReport,
    Region,
    certify,
    l_dfe,
    l_dfe_orbital,
    l_ee,
    l_ee_orbital,
    omega_invariance_check,
)
from .model import (
    AffineMortality,
    DomainError,
    FractionState,
    FullState,
    ModelParams,
    MortalityRangeError,
    ParameterValidationError,
    ReducedState,
    SimplexViolationError,
    ZeroPopulationError,
    validate_params,
    vf_fraction,
    vf_full,
    vf_reduced,
)
from .sweep import (
    AllPointsInvalidError,
    SweepResult,
    SweepRow,
    SweepSpec,
    run_sweep,
)

__all__ = [
    "AffineMortality",
    "AllPointsInvalidError",
    "CertificateBasis",
    "CertificateReport",
    "DerivedQuantities",
    "DomainError",
    "Equilibrium",
    "EquilibriumKind",
    "Fate",
    "FractionState",
    "FullState",
    "IntegrationSpec",
    "MaxStepsExceededError",
    "ModelParams",
    "MortalityRangeError",
    "NoEndemicStateError",
    "OmegaInvarianceReport",
    "ParameterValidationError",
    "PopulationFate",
    "ReducedState",
    "Regime",
    "RegimeReport",
    "Region",
    "SimplexViolationError",
    "StepStats",
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "SystemKind",
    "TerminalEvent",
    "TerminalKind",
    "Trajectory",
    "ZeroPopulationError",
    "certify",
    "check_constant_population_condition",
    "classify_regime",
    "derived_quantities",
    "detect_convergence",
    "disease_free_equilibrium",
    "endemic_equilibrium",
    "endemic_polynomial",
    "integrate",
    "l_dfe",
    "l_dfe_orbital",
    "l_ee",
    "l_ee_orbital",
    "omega_invariance_check",
    "population_fate",
    "run_sweep",
    "solve",
    "validate_params",
    "vf_fraction",
    "vf_full",
    "vf_reduced",
]
