"""
Exceptions raised by the latticewire library
"""


class LatticeWireError(Exception):
    """Base class for every error raised by latticewire"""


class DimensionMismatch(LatticeWireError, ValueError):
    """Operand shapes do not conform"""


class SingularMatrix(LatticeWireError):
    """Matrix is rank deficient or beyond the condition cap"""


class ConvergenceFailure(LatticeWireError):
    """Iterative factorization did not converge"""


class DimensionCap(LatticeWireError):
    """Exact search refused: the problem is intentionally exponential"""


class ReductionFailure(LatticeWireError):
    """Column reduction mod p could not reach the required form"""


class NonPositiveVariance(LatticeWireError, ValueError):
    pass


class InvalidParameters(LatticeWireError, ValueError):
    """Parameters or inputs violate their invariants"""


class NoSolution(LatticeWireError):
    pass


class KernelTooLarge(LatticeWireError):
    pass


class SizeCap(LatticeWireError):
    pass


class CandidateCap(LatticeWireError):
    pass


class ConditioningFailure(LatticeWireError):
    """Channel sampler could not produce a well-conditioned matrix"""


class AllBelowThreshold(LatticeWireError):
    """No singular value exceeds the gain threshold"""


class ZeroPower(LatticeWireError):
    pass


class EmptyInput(LatticeWireError, ValueError):
    pass


class InsufficientTrials(LatticeWireError):
    """Confidence intervals are too wide to decide an acceptance check"""


class ConfigError(LatticeWireError, ValueError):
    """Experiment configuration is invalid"""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        location = []
        if field:
            location.append(f"field '{field}'")
        if line:
            location.append(f"line {line}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class MalformedRecords(LatticeWireError, ValueError):
    """records.csv is missing columns or holds unparsable values"""


class CheckFailed(LatticeWireError):
    """A self-test check found a violated property"""
