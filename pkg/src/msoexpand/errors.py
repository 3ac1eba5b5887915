"""Exception hierarchy shared by all engines."""


class MsoError(Exception):
    """Base class for every error raised by the package."""


class FormulaSyntaxError(MsoError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class UnknownPredicateError(MsoError):
    pass


class UnboundVariableError(MsoError):
    pass


class FormulaError(MsoError):
    """A formula is ill-formed for the requested operation."""


class TypeMismatchError(MsoError):
    """Two types of different level or signature were combined."""


class ResourceError(MsoError):
    """A configured cap or search horizon was exhausted.

    ``level`` names the homogeneity level (or type level) at which the
    search gave up, when that is meaningful.
    """

    def __init__(self, message, level=None):
        self.level = level
        if level is not None:
            message = f"{message} [level {level}]"
        super().__init__(message)


class UnsupportedPresentationError(MsoError):
    pass


class SpecFileError(MsoError):
    pass
