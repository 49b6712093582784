"""Exception hierarchy.

Every domain failure raised by the library derives from :class:`AnacalcError`,
which the command line maps to exit code 2.
"""


class AnacalcError(ValueError):
    """Base class for all domain errors raised by anacalc."""


# realfun
class NonFinite(AnacalcError):
    pass


class BudgetExceeded(AnacalcError):
    pass


class InvalidP(AnacalcError):
    pass


class GridMismatch(AnacalcError):
    pass


class NotProbabilityDomain(AnacalcError):
    pass


class ThetaOutOfRange(AnacalcError):
    pass


class EmptyInput(AnacalcError):
    pass


# fixpoint_ode
class NotContracting(AnacalcError):
    pass


class MaxIter(AnacalcError):
    pass


class WindowTooLarge(AnacalcError):
    pass


class StepNonPositive(AnacalcError):
    pass


class BetaNonPositive(AnacalcError):
    pass


class LNonPositive(AnacalcError):
    pass


# convolution
class SpacingMismatch(AnacalcError):
    pass


class GridTooNarrow(AnacalcError):
    pass


class UnsupportedP(AnacalcError):
    pass


# fourier
class GridTooCoarse(AnacalcError):
    pass


class OrderExceeded(AnacalcError):
    pass


class OmegaZero(AnacalcError):
    pass


class NotDecayed(AnacalcError):
    pass


class NegativeX(AnacalcError):
    pass


# complexint
class NonFiniteOnTrace(AnacalcError):
    pass


class PointOnTrace(AnacalcError):
    pass


class OrderMismatch(AnacalcError):
    pass


class MissingPole(AnacalcError):
    pass


class ZeroOnTrace(AnacalcError):
    pass


class NotNearInteger(AnacalcError):
    pass


class ArcNotNegligible(AnacalcError):
    pass


# sobolev_fem
class NotCoercive(AnacalcError):
    pass


class SingularSystem(AnacalcError):
    pass


class NotZeroBoundary(AnacalcError):
    pass


class DegenerateInterval(AnacalcError):
    pass


# integral_eq
class FredholmAlternative(AnacalcError):
    """The homogeneous equation ``u = lam * T u`` has nontrivial solutions.

    Attributes
    ----------
    basis : ndarray, shape (k, n)
        Orthonormal (Euclidean, on the quadrature nodes) estimate of the
        discrete kernel of ``I - lam*T``, one row per basis vector.
    nodes : ndarray
        Quadrature nodes the basis vectors are sampled on.
    cond : float
        Condition number estimate that triggered the branch.
    """

    def __init__(self, basis, nodes, cond):
        self.basis = basis
        self.nodes = nodes
        self.cond = cond
        super().__init__(
            f"I - lam*T is singular (cond ~ {cond:.3g}); "
            f"kernel dimension estimate {len(basis)}"
        )


class ZeroFunction(AnacalcError):
    pass


class BoundViolated(AnacalcError):
    pass


class NotSymmetric(AnacalcError):
    pass
