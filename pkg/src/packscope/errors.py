"""Exception types shared across the toolkit."""


class PackscopeError(Exception):
    """Base class for all toolkit errors."""


class EmptyInputError(PackscopeError, ValueError):
    """A byte sequence, row list, or matrix that must be non-empty was empty."""


class InputTooLargeError(PackscopeError, ValueError):
    """Input file exceeds the 256 MiB conversion limit."""


class FormatError(PackscopeError, ValueError):
    """An on-disk artifact is not in the expected format."""


class InvalidParamsError(PackscopeError, ValueError):
    """Filter or model parameters violate their invariants."""


class EmptyTrainingSetError(PackscopeError, ValueError):
    """Training requires at least one row."""


class KTooLargeError(PackscopeError, ValueError):
    """KNN neighbor count exceeds the training-set size."""


class NonBinaryLabelsError(PackscopeError, ValueError):
    """Labels outside {0, 1} were supplied to a binary classifier."""


class NonFiniteLossError(PackscopeError, ArithmeticError):
    """Training loss became NaN or infinite (divergence guard)."""


class DimensionMismatchError(PackscopeError, ValueError):
    """Input vector length differs from the model's training dimensionality."""


class VersionMismatchError(PackscopeError, ValueError):
    """Persisted artifact carries an unsupported format version."""


class CorruptModelError(PackscopeError, ValueError):
    """Model file failed magic, tag, or length validation."""


class SizeTooSmallError(PackscopeError, ValueError):
    """Requested synthetic sample is below the 1 KiB minimum."""


class EmptyPayloadError(PackscopeError, ValueError):
    """The toy packer requires a non-empty payload."""


class CorruptPackedError(PackscopeError, ValueError):
    """A toy-packed blob failed header or body validation on unpack."""


class ClassTooSmallError(PackscopeError, ValueError):
    """Stratified splitting needs at least 3 samples per class."""


class SingleClassInputError(PackscopeError, ValueError):
    """Oversampling needs both classes present."""


class ScoreOutOfRangeError(PackscopeError, ValueError):
    """A confidence score fell outside [0, 1]."""


class EmptyMatrixError(PackscopeError, ValueError):
    """Metric computation requires a non-empty confusion matrix."""


class NonBinaryValueError(PackscopeError, ValueError):
    """A label or prediction outside {0, 1} was supplied."""


class ConfigError(PackscopeError, ValueError):
    """Run configuration failed validation (unknown key, bad value)."""
