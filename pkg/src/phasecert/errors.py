"""Exception types raised by the phasecert library."""


class PhasecertError(Exception):
    """Base class for all phasecert errors."""


class NotHermitian(PhasecertError):
    pass


class NotDefinite(PhasecertError):
    pass


class ConvergenceFailure(PhasecertError):
    pass


class ZeroMatrix(PhasecertError):
    pass


class NotQuasiSectorial(PhasecertError):
    pass


class DegenerateRotation(PhasecertError):
    pass


class DimensionMismatch(PhasecertError):
    pass


class SolverStall(PhasecertError):
    """The LMI solver could not certify the optimality gap within its
    iteration cap.  Distinct from plain infeasibility."""


class NonSimpleEigenvalue(PhasecertError):
    pass


class IllConditionedPair(PhasecertError):
    pass


class SingularScattering(PhasecertError):
    pass


class FrequencyAtPole(PhasecertError):
    pass


class IllPosed(PhasecertError):
    pass


class InvalidParameter(PhasecertError):
    pass


class StructureViolation(PhasecertError):
    pass


class CertificateFailure(PhasecertError):
    pass


class CalibrationFailure(PhasecertError):
    pass


class ConfigError(PhasecertError):
    """Raised for malformed or inconsistent analysis configuration input."""
