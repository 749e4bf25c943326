"""Exception hierarchy shared by every module of the package."""


class H1Error(Exception):
    """Base class for all library errors."""


class ExprSyntaxError(H1Error):
    """Malformed expression text.

    ``offset`` is the byte offset (UTF-8) of the offending token.
    """

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class UnboundVariableError(H1Error):
    pass


class EvalDomainError(H1Error):
    """Evaluation left the domain of an operation (log of nonpositive, x/0, ...)."""

    def __init__(self, message: str, subexpression: str):
        self.subexpression = subexpression
        super().__init__(f"{message} in '{subexpression}'")


class CharacteristicPointError(H1Error):
    """Raised when a computation needs W > 0 but hit the characteristic locus."""

    def __init__(self, message: str, W: float):
        self.W = W
        super().__init__(f"{message} (W = {W:.3e})")


class NotOnSurfaceError(H1Error):
    pass


class SingularSurfaceError(H1Error):
    """The defining function of an implicit surface has zero gradient."""


class NotMinimalError(H1Error):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual = {residual:.3e})")


class NotStrictError(H1Error):
    def __init__(self, message: str, worst: float):
        self.worst = worst
        super().__init__(message)


class OutOfDomainError(H1Error):
    pass


class InjectivityError(H1Error):
    def __init__(self, message: str, pair: tuple[float, float]):
        self.pair = pair
        super().__init__(f"{message}: s = {pair[0]!r}, s' = {pair[1]!r}")


class NumericalFailure(H1Error):
    """Base for numerical (not mathematical) failures."""


class QuadratureError(NumericalFailure):
    def __init__(self, message: str, estimate, error):
        self.estimate = estimate
        self.error = error
        super().__init__(f"{message}; best estimate {estimate!r} +/- {error!r}")


class TraceError(NumericalFailure):
    """Integral-curve tracing stopped early; ``partial`` holds what was traced."""

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class SearchFailure(NumericalFailure):
    pass
