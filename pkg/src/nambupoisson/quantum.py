"""Operator vector fields built from the degenerate brackets and the clock.

For each bracket ``alpha`` the clock ``H^{2n}`` defines the vector field
``X_alpha^B = sum_A J_alpha^{AB} dH^{2n}/dX^A``; the quantum operator is
``(hbar/i) X_alpha . grad``. The prefactor is kept as metadata and all
numerics stay real: acting on ``Phi = exp(i S / hbar)`` the eigenvalue
problem reduces to ``X_alpha . grad S = lambda_alpha``.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import DomainError
from .nambu import NambuFrame, frame, split_vector
from .phase import SystemDefinition, field_jet, phase_point, seed_jets

__all__ = [
    "VectorField",
    "OperatorField",
    "EigenState",
    "operator_field",
    "self_operator_field",
    "lie_bracket_field",
    "commutation_residual",
    "eigen_phase",
    "eigen_residual",
    "eigenfunction_value",
]


class VectorField(Protocol):
    def evaluate(self, pt) -> tuple[np.ndarray, np.ndarray]:
        """Components and Jacobian ``jac[C, M] = d X^C / d X^M`` at ``pt``."""


@dataclass(frozen=True)
class OperatorField:
    sys: SystemDefinition
    alpha: int
    prefactor: str = "hbar/i"

    def __post_init__(self):
        if self.sys.clock is None:
            raise DomainError(f"system {self.sys.name!r} has no clock; operators need one")
        if not 1 <= self.alpha <= self.sys.dim - 1:
            raise DomainError(f"alpha must lie in 1..{self.sys.dim - 1}, got {self.alpha}")

    def __call__(self, pt) -> np.ndarray:
        return operator_field(self.sys, self.alpha, pt)

    def evaluate(self, pt) -> tuple[np.ndarray, np.ndarray]:
        fr = frame(self.sys, pt, derivatives=True)
        return split_vector(fr.operator_components(self.alpha), fr.dim)


@dataclass(frozen=True)
class EigenState:
    lam: tuple[float, ...]
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(float(v) for v in self.lam))
        if not all(np.isfinite(self.lam)):
            raise DomainError("eigenvalues must be finite")
        if not self.hbar > 0:
            raise DomainError("hbar must be positive")


def operator_field(sys: SystemDefinition, alpha: int, pt) -> np.ndarray:
    """``X_alpha`` at ``pt``: the clock gradient contracted on the first index of ``J_alpha``."""
    if sys.clock is None:
        raise DomainError(f"system {sys.name!r} has no clock")
    fr = frame(sys, pt)
    return fr.clock_gradient() @ fr.tensor(alpha)


def self_operator_field(sys: SystemDefinition, alpha: int, pt) -> np.ndarray:
    """``sum_A J_alpha^{AB} dH^alpha/dX^A``; the same field for every alpha."""
    fr = frame(sys, pt)
    return fr.integral_jets[alpha - 1].grad @ fr.tensor(alpha)


def lie_bracket_field(A: VectorField, B: VectorField, pt) -> np.ndarray:
    """``[A, B]^C = A^M d_M B^C - B^M d_M A^C``."""
    a, ja = A.evaluate(pt)
    b, jb = B.evaluate(pt)
    return jb @ a - ja @ b


def _lie_terms(a, ja, b, jb):
    res = jb @ a - ja @ b
    scale = np.abs(jb) @ np.abs(a) + np.abs(ja) @ np.abs(b)
    return float(np.max(np.abs(res))), float(np.max(scale))


def _commutation_from(fr: NambuFrame, alpha: int, beta: int) -> tuple[float, float]:
    a, ja = split_vector(fr.operator_components(alpha), fr.dim)
    b, jb = split_vector(fr.operator_components(beta), fr.dim)
    return _lie_terms(a, ja, b, jb)


def commutation_residual(sys: SystemDefinition, pt, return_scale: bool = False):
    """Largest Lie-bracket component over all pairs of operator fields."""
    if sys.clock is None:
        raise DomainError(f"system {sys.name!r} has no clock")
    fr = frame(sys, pt, derivatives=True)
    res, scale = 0.0, 0.0
    for a, b in itertools.combinations(range(1, sys.dim), 2):
        r, s = _commutation_from(fr, a, b)
        res, scale = max(res, r), max(scale, s)
    return (res, scale) if return_scale else res


def eigen_phase(sys: SystemDefinition, state: EigenState, pt) -> float:
    """``S = sum_alpha lambda_alpha H^alpha``."""
    if len(state.lam) != sys.dim - 1:
        raise DomainError(f"need {sys.dim - 1} eigenvalues, got {len(state.lam)}")
    pt = phase_point(pt, sys.n)
    seeds = seed_jets(pt)
    return float(sum(l * field_jet(f, sys, pt, seeds).value for l, f in zip(state.lam, sys.integrals)))


def eigen_residual(sys: SystemDefinition, state: EigenState, alpha: int, pt) -> float:
    """``|X_alpha . grad S - lambda_alpha|``."""
    if len(state.lam) != sys.dim - 1:
        raise DomainError(f"need {sys.dim - 1} eigenvalues, got {len(state.lam)}")
    fr = frame(sys, pt)
    grad_s = sum(l * j.grad for l, j in zip(state.lam, fr.integral_jets))
    x = fr.clock_gradient() @ fr.tensor(alpha)
    return float(abs(x @ grad_s - state.lam[alpha - 1]))


def eigenfunction_value(sys: SystemDefinition, state: EigenState, pt) -> complex:
    """``Phi = exp(i S / hbar)``."""
    return cmath.exp(1j * eigen_phase(sys, state, pt) / state.hbar)
