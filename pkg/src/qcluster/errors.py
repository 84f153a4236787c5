"""Exception types shared across the package."""


class QClusterError(Exception):
    """Base class for all errors raised by this package."""


class CycleError(QClusterError):
    """The arrow set contains a directed cycle, so no admissible vertex
    order exists."""


class ConventionError(QClusterError):
    """An internal convention self-check failed (e.g. the standard skew
    matrix of a framed quiver did not invert the expected block matrix)."""


class RankMismatch(QClusterError):
    """Matrix or exponent-vector sizes do not line up."""


class IncompatibleError(QClusterError):
    """Lambda * (-Btilde) does not have the block shape [D; 0]."""


class CompatibilityBroken(QClusterError):
    """A mutation produced a pair that is no longer compatible, or changed
    the diagonal matrix D.  This indicates a bug, not bad input."""


class NotDivisible(QClusterError):
    """Exact division in the quantum torus left a remainder."""


class NotFPolynomialShaped(QClusterError):
    """The support of an element is not of the form g + Btilde * (finite
    subset of N^n containing 0)."""


class CutoffExceeded(QClusterError):
    """A degree-graded back substitution did not stabilise inside the
    requested window."""


class DimensionError(QClusterError):
    """A quiver representation has inconsistent dimension data."""


class NotCoefficientFree(QClusterError):
    """The dominant pair has a nonzero pure-coefficient part, so the
    requested construction does not apply directly."""


class InterpolationMismatch(QClusterError):
    """A held-out prime disagreed with the interpolated counting
    polynomial."""


class EliminationStuck(QClusterError):
    """Leading-term elimination met a monomial that no basis element can
    produce."""


class RecursionFailure(QClusterError):
    """The bar-invariance recursion has no solution with coefficients in
    negative powers of t."""


class PositivityViolation(QClusterError):
    """A quantity that must lie in N[q^(1/2), q^(-1/2)] (times frozen
    monomials) has a negative coefficient."""


class NotFrozen(QClusterError):
    """An exponent vector that must be supported on frozen coordinates has
    a nonzero principal part."""


class NoSolution(QClusterError):
    """An exact integer linear system has no solution."""


class NegativeU(QClusterError):
    """The displacement vector solved from g-vectors has a negative entry."""


class PrincipalMismatch(QClusterError):
    """Two exchange patterns that must share their principal part do not."""


class DeltaMismatch(QClusterError):
    """The diagonal matrices of source and target are not related by the
    requested integer factor."""
