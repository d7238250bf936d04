"""Exception and warning types raised by mvfuse."""


class MvfuseError(Exception):
    """Base class for all mvfuse errors."""


class ValidationError(MvfuseError, ValueError):
    """Invalid user input (data, hyperparameters or configuration)."""


class MismatchedSampleCount(ValidationError):
    pass


class DomainViolation(ValidationError):
    pass


class NonFiniteEntry(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NonPositiveTau(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, path, line, column, message):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}:{line}:{column}: {message}")


class RaggedRow(ValidationError):
    def __init__(self, path, line, expected, found):
        self.path = path
        self.line = line
        super().__init__(
            f"{path}:{line}: expected {expected} fields, found {found}")


class EmptyFile(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class TooLarge(ValidationError):
    """Exhaustive oracle requested on an input that is too big to enumerate."""


class NonFiniteIterate(MvfuseError, ArithmeticError):
    pass


class FactorizationFailure(MvfuseError, ArithmeticError):
    pass


class IoError(MvfuseError, OSError):
    """Writing an output file failed."""


class NoSelection(MvfuseError):
    """No grid point satisfies the model-selection rule."""


class DegenerateDatasetWarning(UserWarning):
    pass


class ConvergenceWarning(UserWarning):
    """The solver hit ``max_iter`` before both residual tests passed."""


class ViewWeightWarning(UserWarning):
    pass
