"""Exception hierarchy for the trainer."""


class CnnTrainerError(Exception):
    """Base class for all trainer errors."""


class InvalidParamsError(CnnTrainerError):
    pass


class FormatError(CnnTrainerError):
    """A consumed file does not match its documented layout."""


class BackboneUnavailableError(CnnTrainerError):
    """Pretrained backbone weights were requested but cannot be loaded."""


class MissingImageError(CnnTrainerError):
    pass


class SplitEmptyError(CnnTrainerError):
    pass


class DivergedLossError(CnnTrainerError):
    pass
