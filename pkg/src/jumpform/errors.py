"""Exception hierarchy.

Every error carries enough context to diagnose which invariant failed;
callers that only care about "bad input" can catch :class:`JumpformError`.
"""


class JumpformError(Exception):
    """Base class for all errors raised by jumpform."""


class DimensionMismatch(JumpformError, ValueError):
    pass


class DetailedBalanceViolation(JumpformError, ValueError):
    def __init__(self, i, j, residual):
        self.pair = (int(i), int(j))
        self.residual = float(residual)
        super().__init__(
            f"detailed balance m_i R_ij = m_j R_ji fails at (i, j) = ({i}, {j}); "
            f"relative residual {residual:.3e}"
        )


class NegativeRate(JumpformError, ValueError):
    pass


class NegativeKilling(JumpformError, ValueError):
    pass


class NonSymmetric(JumpformError, ValueError):
    pass


class EigSolverFailure(JumpformError, RuntimeError):
    pass


class NegativeTime(JumpformError, ValueError):
    pass


class NotConservative(JumpformError, ValueError):
    pass


class DegeneratePair(JumpformError, ValueError):
    pass


class DivergentIntegral(JumpformError, ArithmeticError):
    pass


class ToleranceNotMet(JumpformError, RuntimeError):
    pass


class BadExponent(JumpformError, ValueError):
    pass


class GridTooCoarse(JumpformError, ValueError):
    pass


class BadWindow(JumpformError, ValueError):
    pass


class HypothesisViolation(JumpformError, ValueError):
    pass


class BadConfig(JumpformError, ValueError):
    pass


class VerificationFailure(JumpformError, AssertionError):
    pass
