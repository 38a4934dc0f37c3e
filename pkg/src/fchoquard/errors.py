"""Exception and warning types."""


class ChoquardError(Exception):
    pass


class InvalidGrid(ChoquardError, ValueError):
    pass


class InvalidParams(ChoquardError, ValueError):
    pass


class SpectralLeak(ChoquardError):
    """Imaginary residue of a spectral round trip exceeded the tolerance."""


class DomainError(ChoquardError, ValueError):
    pass


class UnknownModel(ChoquardError, ValueError):
    pass


class NonlinearityOverflow(ChoquardError, OverflowError):
    pass


class DilationRange(ChoquardError, ValueError):
    pass


class NoPohozaevTime(ChoquardError):
    pass


class SeedFailure(ChoquardError):
    def __init__(self, message, tried=()):
        super().__init__(message)
        self.tried = list(tried)


class SolverError(ChoquardError):
    pass


class MaxIters(SolverError):
    pass


class LineSearchStall(SolverError):
    pass


class Stagnation(SolverError):
    pass


class NotAdmissible(ChoquardError, ValueError):
    pass


class WindowTooSmall(ChoquardError, ValueError):
    pass


class NegativeTail(ChoquardError, ValueError):
    pass


class TooLarge(ChoquardError, ValueError):
    pass


class UnsupportedDim(ChoquardError, ValueError):
    pass


class SnapshotError(ChoquardError, IOError):
    pass


class ConfigError(ChoquardError, ValueError):
    pass


class BoundaryContamination(UserWarning):
    """A field has not decayed in the outer shell of the box."""
