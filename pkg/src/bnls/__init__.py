"""Pseudo-spectral toolkit for the fourth-order (biharmonic) nonlinear
Schrodinger equation: periodic-grid solver, Sobolev-norm machinery, an
exact-arithmetic regime classifier and the scaling-law experiment suite."""

from .dynamics import (
    ConservedPair,
    EquationParams,
    StepControl,
    Trajectory,
    conserved,
    duhamel_residual,
    evolve,
    linear_propagate,
    phase_flow,
    scattering_probe,
    strang_step,
)
from .regimes import (
    RegimeQuery,
    RegimeVerdict,
    classify,
    critical_exponent,
    gamma_pq,
    is_admissible,
    working_exponents,
)
from .spectral import (
    Field,
    Grid,
    SobolevSpec,
    WeightedSpec,
    apply_multiplier,
    field_from_function,
    lq_norm,
    make_grid,
    sobolev_norm,
    to_fourier,
    to_physical,
    weighted_norm,
)

__version__ = "0.1.0"

__all__ = [
    "Field", "Grid", "SobolevSpec", "WeightedSpec",
    "make_grid", "field_from_function", "to_fourier", "to_physical",
    "apply_multiplier", "lq_norm", "sobolev_norm", "weighted_norm",
    "EquationParams", "StepControl", "ConservedPair", "Trajectory",
    "linear_propagate", "phase_flow", "strang_step", "conserved",
    "evolve", "duhamel_residual", "scattering_probe",
    "RegimeQuery", "RegimeVerdict", "classify", "critical_exponent",
    "gamma_pq", "is_admissible", "working_exponents",
    "__version__",
]
