"""Exception hierarchy shared by all solver modules."""


class PPIMEXError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(PPIMEXError):
    """Invalid run configuration or scenario definition."""


class SnapError(ConfigError):
    """Domain geometry does not align with the requested mesh spacing."""


class CoverageError(ConfigError):
    """A boundary face is not covered by any boundary segment."""


class UnsupportedOrder(PPIMEXError):
    """Requested quadrature order outside the supported range."""


class NumericalFailure(PPIMEXError):
    """Base class for failures of the numerical scheme itself."""


class NonAdmissible(NumericalFailure):
    """A state left the admissible set where the caller required it."""


class AverageNotAdmissible(NonAdmissible):
    """The limiter was handed a cell whose average is not admissible."""


class NonPositiveDensity(NonAdmissible):
    """Density is not strictly positive at a parabolic node."""


class NegativeEnergy(NumericalFailure):
    """The implicit energy solve produced a non-positive nodal value."""

    def __init__(self, node, value):
        super().__init__(f"non-positive internal energy {value:.3e} at node {node}")
        self.node = node
        self.value = value


class MaxHalvings(NumericalFailure):
    """Algorithm H could not accept a step within the halving budget."""


class BudgetExceeded(NumericalFailure):
    """The time-step doubling budget of the splitting driver ran out."""


class LinearSolveFailure(NumericalFailure):
    """A linear solve did not produce an acceptable solution."""


class SingularMatrix(LinearSolveFailure):
    """Sparse factorization found the matrix singular."""


class NoConvergence(LinearSolveFailure):
    def __init__(self, iterations, residual):
        super().__init__(f"Krylov solver stopped after {iterations} iterations, "
                         f"relative residual {residual:.3e}")
        self.iterations = iterations
        self.residual = residual


class TooLarge(PPIMEXError):
    """Dense diagnostic requested on a matrix above the size limit."""
