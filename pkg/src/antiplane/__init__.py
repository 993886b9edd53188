"""Monotone anti-plane shear fronts in a nonlinearly elastic strip.

Modules
-------
material        strain energy, body force, structural-condition audit
conjugate_flow  x-independent states, period map, flow force
spectrum        transversal linearized operator and kernel shooting
front_solver    2D discretization, Newton solves, pointwise diagnostics
continuation    pseudo-arclength branch tracing and termination tags
verification    acceptance checks and the shooting oracle
cli             command-line entry point
"""
from .errors import (
    AntiplaneError,
    DiscretizationError,
    DivergenceError,
    DomainError,
    EllipticityError,
    NoSolutionError,
    NonConvergenceError,
    PreconditionError,
    StepCountError,
)
from .material import BodyForce, MaterialModel, check_structural_conditions, leading_amplitude

__version__ = "0.1.0"

__all__ = [
    "AntiplaneError",
    "DiscretizationError",
    "DivergenceError",
    "DomainError",
    "EllipticityError",
    "NoSolutionError",
    "NonConvergenceError",
    "PreconditionError",
    "StepCountError",
    "BodyForce",
    "MaterialModel",
    "check_structural_conditions",
    "leading_amplitude",
]
