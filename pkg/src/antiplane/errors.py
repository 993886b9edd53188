"""Exception types raised by the solvers.

Domain-level failures (bad inputs, violated hypotheses, solver breakdown)
all derive from :class:`AntiplaneError` so callers such as the CLI can map
them to a single exit status.
"""


class AntiplaneError(Exception):
    """Base class for every solver failure."""


class DomainError(AntiplaneError, ValueError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(AntiplaneError, ValueError):
    """A structural precondition of the model does not hold."""


class NoSolutionError(AntiplaneError):
    """The requested solution does not exist for these parameters."""


class DivergenceError(AntiplaneError):
    """A bracket expansion or iteration ran away."""


class EllipticityError(AntiplaneError):
    """A coefficient that must stay positive became nonpositive."""


class StepCountError(AntiplaneError):
    """A fixed-step integration is too coarse to meet its tolerances."""


class NonConvergenceError(AntiplaneError):
    """Newton iteration exhausted its budget."""


class DiscretizationError(AntiplaneError):
    """The discrete object lost a property the continuum one must have."""
