class SuWitnessError(ValueError):
    """Base class for all errors raised by this package."""


class OutOfRangeIndex(SuWitnessError):
    pass


class ZeroNorm(SuWitnessError):
    pass


class SpaceMismatch(SuWitnessError):
    pass


class NonHermitianInput(SuWitnessError):
    pass


class InvalidState(SuWitnessError):
    pass


class RepresentationError(SuWitnessError):
    """Pure state passed where a density matrix is required, or vice versa."""


class ParameterOutOfRange(SuWitnessError):
    pass


class InsufficientCutoff(SuWitnessError):
    pass


class MissingPhaseSetting(SuWitnessError):
    pass


class InconsistentSpace(SuWitnessError):
    pass
