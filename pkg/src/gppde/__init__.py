"""Gaussian process time stepping for PDEs.

Multi-output GP regression whose covariance structure encodes a time
discretization (linear multistep or Runge-Kutta), so that each step is a GP
posterior and initial-data uncertainty propagates through the whole horizon.
"""

from .errors import (
    FactorizationError,
    GpPdeError,
    KernelDomainError,
    OracleError,
    OrderError,
    StateMismatchError,
    TableauError,
    TrainingError,
    UndefinedNormError,
    UnknownLabelError,
)
from .kernels import (
    DerivOrder,
    KernelFamily,
    KernelSpec,
    apply_operator_pair,
    eval_nn1d,
    eval_se1d,
    eval_se2d,
    fd_kernel_value,
    kernel_value,
    validate_derivatives,
)
from .operators import DiffOp

__all__ = [
    "DerivOrder",
    "DiffOp",
    "FactorizationError",
    "GpPdeError",
    "KernelDomainError",
    "KernelFamily",
    "KernelSpec",
    "OracleError",
    "OrderError",
    "StateMismatchError",
    "TableauError",
    "TrainingError",
    "UndefinedNormError",
    "UnknownLabelError",
    "apply_operator_pair",
    "eval_nn1d",
    "eval_se1d",
    "eval_se2d",
    "fd_kernel_value",
    "kernel_value",
    "validate_derivatives",
]
