"""Second-order forward-mode automatic differentiation.

A :class:`Jet2` carries the value, gradient and Hessian of a scalar at a
point. Arithmetic and the elementary functions below propagate all three
exactly (up to floating point), so composing them yields exact Hessians of
closed-form expressions without any finite differencing.

>>> x = jet_var(0, 3.0, 1)
>>> (x * x).hess
array([[2.]])
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import DomainError, NonDifferentiableError, SingularEvaluationError

__all__ = [
    "Jet2",
    "Jet1",
    "lift_gradient",
    "jet_var",
    "jet_const",
    "jet_arith",
    "jet_func",
    "UNARY_FUNCTIONS",
    "BINARY_FUNCTIONS",
]


class Jet2:
    """Truncated second-order Taylor expansion of a scalar.

    ``grad`` has shape ``(dim,)`` and ``hess`` shape ``(dim, dim)``. Every
    constructor path builds ``hess`` from symmetric pieces, so it is exactly
    symmetric.
    """

    __slots__ = ("value", "grad", "hess")
    __array_priority__ = 1000  # keep numpy scalars from hijacking the operators

    def __init__(self, value: float, grad: np.ndarray, hess: np.ndarray):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @property
    def dim(self) -> int:
        return self.grad.shape[0]

    def __repr__(self):
        return f"Jet2(value={self.value!r}, grad={self.grad.tolist()!r}, hess={self.hess.tolist()!r})"

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            if other.dim != self.dim:
                raise DomainError(f"jet dimension mismatch: {self.dim} vs {other.dim}")
            return other
        return jet_const(float(other), self.dim)

    def __add__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value + float(other), self.grad, self.hess)
        o = self._coerce(other)
        return Jet2(self.value + o.value, self.grad + o.grad, self.hess + o.hess)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value - float(other), self.grad, self.hess)
        o = self._coerce(other)
        return Jet2(self.value - o.value, self.grad - o.grad, self.hess - o.hess)

    def __rsub__(self, other):
        return Jet2(float(other) - self.value, -self.grad, -self.hess)

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            c = float(other)
            return Jet2(self.value * c, self.grad * c, self.hess * c)
        o = self._coerce(other)
        cross = np.outer(self.grad, o.grad)
        return Jet2(
            self.value * o.value,
            self.value * o.grad + o.value * self.grad,
            self.value * o.hess + o.value * self.hess + (cross + cross.T),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            c = float(other)
            if c == 0.0:
                raise SingularEvaluationError("division by zero")
            return Jet2(self.value / c, self.grad / c, self.hess / c)
        return self * _reciprocal(self._coerce(other))

    def __rtruediv__(self, other):
        return _reciprocal(self) * float(other)

    def __pow__(self, exponent):
        if isinstance(exponent, Jet2):
            # jet-valued exponents go through exp(b log a)
            return jet_func("exp", exponent * jet_func("log", self))
        return _pow_const(self, float(exponent))

    def __rpow__(self, base):
        return jet_func("exp", self * math.log(float(base)))

    def __abs__(self):
        return jet_func("abs", self)


def _chain(a: Jet2, f: float, d1: float, d2: float) -> Jet2:
    return Jet2(f, d1 * a.grad, d1 * a.hess + d2 * np.outer(a.grad, a.grad))


def _chain2(a: Jet2, b: Jet2, f, fa, fb, faa, fab, fbb) -> Jet2:
    ab = np.outer(a.grad, b.grad)
    hess = (
        fa * a.hess
        + fb * b.hess
        + faa * np.outer(a.grad, a.grad)
        + fab * (ab + ab.T)
        + fbb * np.outer(b.grad, b.grad)
    )
    return Jet2(f, fa * a.grad + fb * b.grad, hess)


def _reciprocal(a: Jet2) -> Jet2:
    v = a.value
    if v == 0.0:
        raise SingularEvaluationError("division by a jet with zero value")
    r = 1.0 / v
    return _chain(a, r, -r * r, 2.0 * r * r * r)


def _pow_const(a: Jet2, p: float) -> Jet2:
    v = a.value
    if p == 0.0:
        return jet_const(1.0, a.dim)
    if p == 1.0:
        return a
    if float(p).is_integer():
        if v == 0.0 and p < 0:
            raise SingularEvaluationError("zero raised to a negative power")
        ip = int(p)
        f = v**ip
        d1 = ip * v ** (ip - 1) if ip != 0 else 0.0
        d2 = ip * (ip - 1) * v ** (ip - 2) if ip not in (0, 1) else 0.0
        return _chain(a, f, d1, d2)
    if v < 0.0:
        raise SingularEvaluationError(f"negative base {v!r} with non-integer exponent {p!r}")
    if v == 0.0:
        if p < 2.0:
            raise SingularEvaluationError(f"derivative of x**{p!r} is unbounded at 0")
        return _chain(a, 0.0, 0.0, 2.0 if p == 2.0 else 0.0)
    f = v**p
    return _chain(a, f, p * f / v, p * (p - 1.0) * f / (v * v))


class Jet1:
    """First-order jet: a value with its gradient.

    Used one level up from :class:`Jet2`: lifting the gradient of a Jet2
    (its Hessian rows become the tangents) lets quantities assembled from
    gradients, such as Poisson tensor entries, be differentiated exactly.
    """

    __slots__ = ("value", "grad")
    __array_priority__ = 1000

    def __init__(self, value: float, grad: np.ndarray):
        self.value = float(value)
        self.grad = grad

    def __repr__(self):
        return f"Jet1(value={self.value!r}, grad={self.grad.tolist()!r})"

    def __add__(self, other):
        if isinstance(other, Jet1):
            return Jet1(self.value + other.value, self.grad + other.grad)
        return Jet1(self.value + float(other), self.grad)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet1):
            return Jet1(self.value - other.value, self.grad - other.grad)
        return Jet1(self.value - float(other), self.grad)

    def __rsub__(self, other):
        return Jet1(float(other) - self.value, -self.grad)

    def __neg__(self):
        return Jet1(-self.value, -self.grad)

    def __mul__(self, other):
        if isinstance(other, Jet1):
            return Jet1(self.value * other.value, self.value * other.grad + other.value * self.grad)
        c = float(other)
        return Jet1(self.value * c, self.grad * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet1):
            if other.value == 0.0:
                raise SingularEvaluationError("division by a jet with zero value")
            q = self.value / other.value
            return Jet1(q, (self.grad - q * other.grad) / other.value)
        c = float(other)
        if c == 0.0:
            raise SingularEvaluationError("division by zero")
        return Jet1(self.value / c, self.grad / c)

    def __rtruediv__(self, other):
        if self.value == 0.0:
            raise SingularEvaluationError("division by a jet with zero value")
        q = float(other) / self.value
        return Jet1(q, -q * self.grad / self.value)


def lift_gradient(j: Jet2) -> list[Jet1]:
    """Gradient components of ``j`` as first-order jets."""
    return [Jet1(j.grad[i], j.hess[i].copy()) for i in range(j.dim)]


def jet_var(index: int, value: float, dim: int) -> Jet2:
    """Seed coordinate ``index`` of a ``dim``-dimensional space."""
    if not 0 <= index < dim:
        raise DomainError(f"coordinate index {index} out of range for dim {dim}")
    grad = np.zeros(dim)
    grad[index] = 1.0
    return Jet2(value, grad, np.zeros((dim, dim)))


def jet_const(value: float, dim: int) -> Jet2:
    return Jet2(value, np.zeros(dim), np.zeros((dim, dim)))


def jet_arith(kind: str, a: Jet2, b: Jet2) -> Jet2:
    if a.dim != b.dim:
        raise DomainError(f"jet dimension mismatch: {a.dim} vs {b.dim}")
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise DomainError(f"unknown arithmetic kind {kind!r}")


# -- elementary functions ---------------------------------------------------


def _sin(a):
    s, c = math.sin(a.value), math.cos(a.value)
    return _chain(a, s, c, -s)


def _cos(a):
    s, c = math.sin(a.value), math.cos(a.value)
    return _chain(a, c, -s, -c)


def _tan(a):
    c = math.cos(a.value)
    if abs(c) < 1e-300:
        raise SingularEvaluationError("tan evaluated at a pole")
    t = math.tan(a.value)
    d1 = 1.0 + t * t
    return _chain(a, t, d1, 2.0 * t * d1)


def _atan(a):
    v = a.value
    d1 = 1.0 / (1.0 + v * v)
    return _chain(a, math.atan(v), d1, -2.0 * v * d1 * d1)


def _sqrt(a):
    v = a.value
    if v < 0.0:
        raise SingularEvaluationError(f"sqrt of negative value {v!r}")
    if v == 0.0:
        raise SingularEvaluationError("sqrt is not differentiable at 0")
    s = math.sqrt(v)
    return _chain(a, s, 0.5 / s, -0.25 / (s * v))


def _exp(a):
    try:
        e = math.exp(a.value)
    except OverflowError:
        raise SingularEvaluationError(f"exp overflow at {a.value!r}") from None
    return _chain(a, e, e, e)


def _log(a):
    v = a.value
    if v <= 0.0:
        raise SingularEvaluationError(f"log of non-positive value {v!r}")
    return _chain(a, math.log(v), 1.0 / v, -1.0 / (v * v))


def _abs(a):
    v = a.value
    if v == 0.0:
        raise NonDifferentiableError("abs is not differentiable at 0")
    s = 1.0 if v > 0 else -1.0
    return _chain(a, abs(v), s, 0.0)


def _atan2(y, x):
    yv, xv = y.value, x.value
    r2 = xv * xv + yv * yv
    if r2 == 0.0:
        raise SingularEvaluationError("atan2 undefined at the origin")
    r4 = r2 * r2
    # partials w.r.t. (y, x)
    return _chain2(
        y,
        x,
        math.atan2(yv, xv),
        xv / r2,
        -yv / r2,
        -2.0 * xv * yv / r4,
        (yv * yv - xv * xv) / r4,
        2.0 * xv * yv / r4,
    )


UNARY_FUNCTIONS: dict[str, Callable[[Jet2], Jet2]] = {
    "sin": _sin,
    "cos": _cos,
    "tan": _tan,
    "atan": _atan,
    "sqrt": _sqrt,
    "exp": _exp,
    "log": _log,
    "abs": _abs,
}
BINARY_FUNCTIONS: dict[str, Callable[[Jet2, Jet2], Jet2]] = {"atan2": _atan2}


def jet_func(name: str, *args, exponent: float | None = None) -> Jet2:
    """Apply elementary function ``name`` to jet arguments.

    ``pow`` takes a single jet and a constant real ``exponent``.
    ``atan2`` follows the ``atan2(y, x)`` argument order.
    """
    if name == "pow":
        if len(args) != 1 or exponent is None:
            raise DomainError("pow takes one jet and a constant exponent")
        return _pow_const(args[0], float(exponent))
    if name in UNARY_FUNCTIONS:
        if len(args) != 1:
            raise DomainError(f"{name} takes 1 argument, got {len(args)}")
        return UNARY_FUNCTIONS[name](args[0])
    if name in BINARY_FUNCTIONS:
        if len(args) != 2:
            raise DomainError(f"{name} takes 2 arguments, got {len(args)}")
        a, b = args
        if a.dim != b.dim:
            raise DomainError(f"jet dimension mismatch: {a.dim} vs {b.dim}")
        return BINARY_FUNCTIONS[name](a, b)
    raise DomainError(f"unknown function {name!r}")
