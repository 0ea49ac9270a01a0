"""Exception hierarchy.  Every error carries the CLI exit code it maps to."""


class QPadicError(Exception):
    exit_code = 1


class ValidationError(QPadicError, ValueError):
    """Malformed input or configuration."""
    exit_code = 2


class InvalidArgument(ValidationError):
    pass


class PreconditionViolated(QPadicError):
    """A mathematical hypothesis of the requested operation fails."""
    exit_code = 3


class DivisionByZero(PreconditionViolated, ZeroDivisionError):
    pass


class ConvergenceViolation(PreconditionViolated):
    pass


class NotAQDisk(PreconditionViolated):
    pass


class PoleOnOrbit(PreconditionViolated):
    def __init__(self, k, msg=None):
        self.k = k
        super().__init__(msg or f"pole of the matrix at q^{k} * xi")


class SingularDet(PreconditionViolated):
    def __init__(self, k, msg=None):
        self.k = k
        super().__init__(msg or f"determinant vanishes at q^{k} * xi")


class SingularGauge(PreconditionViolated):
    pass


class NotSmallRadius(PreconditionViolated):
    pass


class ResonantAlpha(PreconditionViolated):
    pass


class ResonantSpectrum(PreconditionViolated):
    pass


class SpectrumNotSplit(PreconditionViolated):
    pass


class NoKernelVector(PreconditionViolated):
    pass


class HypothesisUnverifiable(PreconditionViolated):
    pass


class NotInNormalForm(PreconditionViolated):
    pass


class ClassViolation(PreconditionViolated):
    pass


class InvariantViolation(QPadicError):
    """A computed result fails an identity it must satisfy."""
    exit_code = 4


class LatticeResidual(InvariantViolation):
    pass


class PrecisionExhausted(QPadicError, ArithmeticError):
    exit_code = 5


class TailNotDominated(PrecisionExhausted):
    pass
