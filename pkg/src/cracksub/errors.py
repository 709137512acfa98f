"""Exception types raised across the package."""


class CrackSubError(Exception):
    """Base class for all package errors."""


class InvalidArgument(CrackSubError, ValueError):
    pass


class DegenerateInput(InvalidArgument):
    pass


class DegenerateGeometry(CrackSubError):
    pass


class UnsupportedGeometry(CrackSubError):
    pass


class AmbiguousTrace(CrackSubError):
    """A point on the crack surface was evaluated without choosing a side."""


class InvalidState(CrackSubError, ValueError):
    pass


class UnsupportedModel(CrackSubError):
    pass


class UnsupportedOperation(CrackSubError):
    pass


class InvalidModel(CrackSubError, ValueError):
    pass


class StencilViolation(CrackSubError):
    """A finite-difference stencil would straddle the crack surface."""


class UndefinedKinetics(CrackSubError):
    pass


class InvalidMotion(CrackSubError, ValueError):
    pass


class ConfigError(CrackSubError):
    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class UnreliableTraceWarning(UserWarning):
    pass


class ConvergenceWarning(UserWarning):
    pass
