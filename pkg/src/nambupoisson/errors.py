"""Exception types shared across the package."""


class NambuError(Exception):
    """Base class for all errors raised by nambupoisson."""


class DomainError(NambuError, ValueError):
    """An argument lies outside the range an operation accepts."""


class SingularEvaluationError(NambuError, ArithmeticError):
    """A scalar field or derived quantity could not be evaluated at a point.

    ``point`` and ``field`` are filled in as the error propagates outward, so
    the innermost raiser does not need to know either.
    """

    def __init__(self, message, point=None, field=None, span=None):
        super().__init__(message)
        self.message = message
        self.point = point
        self.field = field
        self.span = span

    def __str__(self):
        parts = [self.message]
        if self.field is not None:
            parts.append(f"field={self.field}")
        if self.span is not None:
            parts.append(f"span={self.span[0]}:{self.span[1]}")
        if self.point is not None:
            parts.append("point=(" + ", ".join(f"{v:.17g}" for v in self.point) + ")")
        return "; ".join(parts)


class NonDifferentiableError(SingularEvaluationError):
    """Evaluation hit a kink (e.g. ``abs`` at zero)."""


class SingularPointError(SingularEvaluationError):
    """The Nambu construction degenerates at this point (zero volume density,
    dependent gradients, vanishing velocity, or a closed form's pole)."""


class InconsistentRatioError(SingularPointError):
    """The gradient cross product is not parallel to the canonical velocity."""


class ExprSyntaxError(NambuError, ValueError):
    def __init__(self, message, offset, expected=None, source=None):
        self.offset = offset
        self.expected = expected
        self.source = source
        text = f"{message} at offset {offset}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)


class ExprNameError(NambuError, NameError):
    """Unknown identifier or function, or wrong call arity."""


class ClockUndefinedError(NambuError, ValueError):
    pass


class TooManySingularPointsError(NambuError, RuntimeError):
    pass


class UnwrapError(NambuError, RuntimeError):
    """Clock increments are too coarse to detect branch jumps reliably."""


class SystemFileError(NambuError, ValueError):
    pass
