"""Spectra and eigenfunctions of the indefinite Laplacian -div(sgn grad) on a rectangle."""

__version__ = "0.1.0"

from .errors import (
    BracketNotFound,
    ContinuationStall,
    DegenerateInput,
    DeltaOutOfRange,
    DomainError,
    IndefSpecError,
    InvalidGrid,
    NewtonDivergence,
    NoConvergence,
    PoleProximity,
    RootResidualTooLarge,
)
from .numerics import SolverConfig
from .secular import eval_F, eval_F_prime, eval_G, eval_g, eval_H, compatibility_residuals
from .spectrum import (
    Eigenvalue,
    ModeIndex,
    Source,
    continue_to_delta,
    convergence_study,
    solve_unperturbed,
)
from .modes import ModeSpec, chi, f2d, kernel_function, mode_spec, normalization_constant, psi

__all__ = [
    "BracketNotFound",
    "ContinuationStall",
    "DegenerateInput",
    "DeltaOutOfRange",
    "DomainError",
    "Eigenvalue",
    "IndefSpecError",
    "InvalidGrid",
    "ModeIndex",
    "ModeSpec",
    "NewtonDivergence",
    "NoConvergence",
    "PoleProximity",
    "RootResidualTooLarge",
    "SolverConfig",
    "Source",
    "chi",
    "compatibility_residuals",
    "continue_to_delta",
    "convergence_study",
    "eval_F",
    "eval_F_prime",
    "eval_G",
    "eval_H",
    "eval_g",
    "f2d",
    "kernel_function",
    "mode_spec",
    "normalization_constant",
    "psi",
    "solve_unperturbed",
]
