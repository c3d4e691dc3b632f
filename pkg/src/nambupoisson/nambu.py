"""Nambu form of the flow and the maximally degenerate Poisson tensors.

For a system with ``2n - 1`` independent first integrals the gradients
determine the flow direction through their generalized cross product
(signed maximal minors of the gradient matrix). The volume density ``sqrt g``
is the factor relating that cross product to the true Hamiltonian velocity,
and each integral ``H^alpha`` generates the same flow through its own rank-2
Poisson tensor ``J_alpha``, whose kernel holds the remaining integrals.

Tensor entries use the single-ordering (minor) normalization::

    J_alpha^{AB} = (-1)^(alpha-1) * sign(A, B, C...) * det(minor) / sqrt g

where the minor keeps the gradients of the other integrals (in order) over
the columns ``C... not in {A, B}``. This reproduces the closed-form oscillator
tables, e.g. ``[x, p_x]_1 = [x, p_x]_2 = 1/2``.

Everything here is written against a small generic algebra so the same code
runs on floats and on :class:`~nambupoisson.jets.Jet1` lifts; the latter
yields the exact first derivatives of tensor entries needed by the Jacobi
and Lie-bracket checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InconsistentRatioError, SingularPointError
from .jets import Jet1, Jet2, lift_gradient
from .phase import ScalarField, SystemDefinition, canonical_tensor, field_jet, phase_point, seed_jets

__all__ = [
    "PoissonMatrix",
    "NambuFrame",
    "frame",
    "gradient_matrix",
    "raw_cross_product",
    "volume_density",
    "degenerate_tensor",
    "poisson_tensor",
    "degenerate_bracket",
    "nambu_velocity",
    "nambu_form_velocity",
    "det",
    "cross_product",
    "tensor_from_gradients",
    "split_vector",
    "RATIO_RTOL",
]

RATIO_RTOL = 1e-8


@dataclass(frozen=True)
class PoissonMatrix:
    """One bracket structure at a point; ``label`` 0 is the canonical tensor."""

    entries: np.ndarray
    label: int

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def bracket(self, grad_f, grad_g) -> float:
        return float(np.asarray(grad_f) @ self.entries @ np.asarray(grad_g))


# -- generic algebra ----------------------------------------------------------


def _val(x) -> float:
    return x.value if isinstance(x, (Jet1, Jet2)) else float(x)


def det(rows: Sequence[Sequence]):
    """Determinant of a small square matrix of floats or jets.

    Partial-pivot elimination. If a pivot column vanishes exactly the value
    is zero but, for jets, its derivative need not be; that case falls back
    to cofactor expansion, which is exact for any entry type.
    """
    k = len(rows)
    if k == 0:
        return 1.0
    if k == 1:
        return rows[0][0]
    if k == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    a = [list(r) for r in rows]
    out = 1.0
    for c in range(k):
        p = max(range(c, k), key=lambda r: abs(_val(a[r][c])))
        if _val(a[p][c]) == 0.0:
            if any(isinstance(x, Jet1) for r in rows for x in r):
                return _cofactor_det(rows)
            return 0.0
        if p != c:
            a[c], a[p] = a[p], a[c]
            out = -out
        piv = a[c][c]
        out = out * piv
        for r in range(c + 1, k):
            f = a[r][c] / piv
            if _val(f) == 0.0 and not isinstance(f, Jet1):
                continue
            a[r] = [a[r][j] - f * a[c][j] if j > c else 0.0 for j in range(k)]
    return out


def _cofactor_det(rows):
    k = len(rows)
    if k <= 2:
        return det(rows)
    total = 0.0
    for j in range(k):
        sub = [[row[i] for i in range(k) if i != j] for row in rows[1:]]
        term = rows[0][j] * _cofactor_det(sub)
        total = total + term if j % 2 == 0 else total - term
    return total


def cross_product(grads: Sequence[Sequence]) -> list:
    """Generalized cross product of ``2n-1`` row vectors in ``2n`` dimensions.

    Component ``A`` is ``(-1)^A * det(grads without column A)`` (0-based),
    i.e. the Jacobian determinant of the integrals with ``X^A`` omitted.
    """
    d = len(grads[0])
    if len(grads) != d - 1:
        raise DomainError(f"need {d - 1} vectors in dimension {d}, got {len(grads)}")
    out = []
    for A in range(d):
        cols = [c for c in range(d) if c != A]
        m = det([[g[c] for c in cols] for g in grads])
        out.append(m if A % 2 == 0 else -m)
    return out


def tensor_from_gradients(grads: Sequence[Sequence], sqrtg, alpha: int) -> list[list]:
    """Entries of ``J_alpha`` (1-based alpha) as a nested list."""
    d = len(grads[0])
    if not 1 <= alpha <= d - 1:
        raise DomainError(f"bracket index alpha must lie in 1..{d - 1}, got {alpha}")
    others = [g for i, g in enumerate(grads) if i != alpha - 1]
    J = [[0.0] * d for _ in range(d)]
    for A, B in itertools.combinations(range(d), 2):
        cols = [c for c in range(d) if c != A and c != B]
        m = det([[g[c] for c in cols] for g in others])
        # sign of the permutation (A, B, C...) times the position sign of alpha
        if (A + B - 1 + alpha - 1) % 2:
            m = -m
        e = m / sqrtg
        J[A][B] = e
        J[B][A] = -e
    return J


def _ratio(raw: Sequence, vel: Sequence, validate: bool):
    vv = [_val(v) for v in vel]
    A = int(np.argmax(np.abs(vv)))
    if vv[A] == 0.0:
        raise SingularPointError("canonical velocity vanishes; volume density undefined")
    s = raw[A] / vel[A]
    if _val(s) == 0.0:
        raise SingularPointError("volume density vanishes (integrals are dependent here)")
    if validate:
        rv = np.array([_val(r) for r in raw])
        sv = _val(s)
        mismatch = np.max(np.abs(rv - sv * np.array(vv)))
        if mismatch > RATIO_RTOL * np.max(np.abs(rv)):
            raise InconsistentRatioError(
                "gradient cross product is not parallel to the canonical velocity "
                f"(mismatch {mismatch:.3g} vs scale {np.max(np.abs(rv)):.3g})"
            )
    return s


def _to_arrays(J, d):
    """Split a nested list of floats/Jet1 into values and derivatives.

    ``dJ[A, B, M]`` is the derivative of entry ``(A, B)`` along ``X^M``.
    """
    vals = np.zeros((d, d))
    ders = np.zeros((d, d, d))
    for A in range(d):
        for B in range(d):
            e = J[A][B]
            if isinstance(e, Jet1):
                vals[A, B] = e.value
                ders[A, B] = e.grad
            else:
                vals[A, B] = float(e)
    return vals, ders


def split_vector(components: Sequence, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Values and Jacobian ``jac[C, M] = d v^C / d X^M`` of a vector of lifts."""
    vals = np.zeros(d)
    jac = np.zeros((len(components), d))
    for i, e in enumerate(components):
        if isinstance(e, Jet1):
            vals[i] = e.value
            jac[i] = e.grad
        else:
            vals[i] = float(e)
    return vals, jac


# -- per-point evaluation -----------------------------------------------------


@dataclass
class NambuFrame:
    """Everything the construction needs at one phase point.

    With ``derivatives=True`` the gradient entries are :class:`Jet1` lifts,
    and :meth:`tensor_derivative` and :func:`split_vector` give exact first
    derivatives.
    """

    sys: SystemDefinition
    point: np.ndarray
    integral_jets: list[Jet2]
    clock_jet: Jet2 | None
    derivatives: bool
    validate: bool = True
    _grads: list = field(default=None, repr=False)
    _clock_grad: list | None = field(default=None, repr=False)
    _velocity: list = field(default=None, repr=False)
    _raw: list | None = field(default=None, repr=False)
    _sqrtg: object = field(default=None, repr=False)
    _tensors: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.derivatives:
            self._grads = [lift_gradient(j) for j in self.integral_jets]
            self._clock_grad = lift_gradient(self.clock_jet) if self.clock_jet is not None else None
        else:
            self._grads = [list(j.grad) for j in self.integral_jets]
            self._clock_grad = list(self.clock_jet.grad) if self.clock_jet is not None else None
        g1 = self._grads[0]
        n = self.sys.n
        self._velocity = [g1[n + i] for i in range(n)] + [-g1[i] for i in range(n)]

    @property
    def dim(self) -> int:
        return self.sys.dim

    def gradient_matrix(self) -> np.ndarray:
        return np.array([j.grad for j in self.integral_jets])

    def clock_gradient(self) -> np.ndarray:
        if self.clock_jet is None:
            raise DomainError(f"system {self.sys.name!r} has no clock")
        return self.clock_jet.grad.copy()

    def velocity(self) -> np.ndarray:
        return np.array([_val(v) for v in self._velocity])

    def raw(self) -> list:
        if self._raw is None:
            self._raw = cross_product(self._grads)
        return self._raw

    def raw_cross_product(self) -> np.ndarray:
        return np.array([_val(v) for v in self.raw()])

    def sqrtg(self):
        if self._sqrtg is None:
            self._sqrtg = _ratio(self.raw(), self._velocity, self.validate)
        return self._sqrtg

    def volume_density(self) -> float:
        return _val(self.sqrtg())

    def _tensor(self, alpha: int):
        # cached as (values, derivatives, nested entries)
        if alpha not in self._tensors:
            if alpha == 0:
                J0 = canonical_tensor(self.sys.n)
                self._tensors[0] = (J0, np.zeros((self.dim,) * 3), J0.tolist())
            else:
                entries = tensor_from_gradients(self._grads, self.sqrtg(), alpha)
                self._tensors[alpha] = (*_to_arrays(entries, self.dim), entries)
        return self._tensors[alpha]

    def tensor(self, alpha: int) -> np.ndarray:
        """``J_alpha`` at the point; ``alpha=0`` is the canonical tensor."""
        return self._tensor(alpha)[0]

    def tensor_derivative(self, alpha: int) -> np.ndarray:
        """``dJ[A, B, M] = d J_alpha^{AB} / d X^M``."""
        if not self.derivatives and alpha != 0:
            raise DomainError("frame was built without derivatives")
        return self._tensor(alpha)[1]

    def operator_components(self, alpha: int) -> list:
        """``sum_A J_alpha^{AB} dH^{2n}/dX^A`` as floats or Jet1 (first-index contraction)."""
        if self._clock_grad is None:
            raise DomainError(f"system {self.sys.name!r} has no clock")
        return self._contract_first(alpha, self._clock_grad)

    def self_operator_components(self, alpha: int) -> list:
        return self._contract_first(alpha, self._grads[alpha - 1])

    def _contract_first(self, alpha, vec):
        if alpha == 0:
            raise DomainError("operator fields are defined for degenerate brackets only")
        entries = self._tensor(alpha)[2]
        d = self.dim
        out = []
        for B in range(d):
            acc = 0.0
            for A in range(d):
                if A != B:
                    acc = acc + entries[A][B] * vec[A]
            out.append(acc)
        return out


def frame(sys: SystemDefinition, pt, derivatives: bool = False, validate: bool = True) -> NambuFrame:
    pt = phase_point(pt, sys.n)
    seeds = seed_jets(pt)
    jets = [field_jet(f, sys, pt, seeds) for f in sys.integrals]
    clock = field_jet(sys.clock, sys, pt, seeds) if sys.clock is not None else None
    return NambuFrame(sys, pt, jets, clock, derivatives, validate)


def _integrals_frame(sys, pt, validate=True) -> NambuFrame:
    pt = phase_point(pt, sys.n)
    seeds = seed_jets(pt)
    jets = [field_jet(f, sys, pt, seeds) for f in sys.integrals]
    return NambuFrame(sys, pt, jets, None, False, validate)


def gradient_matrix(sys: SystemDefinition, pt) -> np.ndarray:
    """Row ``alpha`` is the gradient of ``H^alpha`` at ``pt``."""
    return _integrals_frame(sys, pt).gradient_matrix()


def raw_cross_product(sys: SystemDefinition, pt) -> np.ndarray:
    return _integrals_frame(sys, pt).raw_cross_product()


def volume_density(sys: SystemDefinition, pt, validate: bool = True) -> float:
    """Signed ``sqrt g``: the factor with ``raw_cross_product = sqrt g * velocity``.

    The ratio is taken on the largest velocity component and, when
    ``validate`` is set, checked on all components to relative 1e-8.
    """
    return _integrals_frame(sys, pt, validate).volume_density()


def degenerate_tensor(sys: SystemDefinition, alpha: int, pt) -> PoissonMatrix:
    return PoissonMatrix(_integrals_frame(sys, pt).tensor(alpha), alpha)


def poisson_tensor(sys: SystemDefinition, alpha: int, pt) -> np.ndarray:
    """``J_alpha`` as an array; ``alpha = 0`` gives the canonical tensor."""
    if alpha == 0:
        return canonical_tensor(sys.n)
    return degenerate_tensor(sys, alpha, pt).entries


def degenerate_bracket(F: ScalarField, G: ScalarField, alpha: int, sys: SystemDefinition, pt) -> float:
    """``[F, G]_alpha = grad F . J_alpha . grad G``."""
    pt = phase_point(pt, sys.n)
    seeds = seed_jets(pt)
    gf = field_jet(F, sys, pt, seeds).grad
    gg = field_jet(G, sys, pt, seeds).grad
    return float(gf @ poisson_tensor(sys, alpha, pt) @ gg)


def nambu_velocity(sys: SystemDefinition, alpha: int, pt) -> np.ndarray:
    """Flow generated by ``H^alpha`` through its own bracket.

    Component ``A`` is ``sum_B J_alpha^{AB} dH^alpha/dX^B``, the same index
    placement as Hamilton's equations ``X'^A = J_0^{AB} dH^1/dX^B``.
    """
    fr = _integrals_frame(sys, pt)
    return fr.tensor(alpha) @ fr.integral_jets[alpha - 1].grad


def nambu_form_velocity(sys: SystemDefinition, pt) -> np.ndarray:
    """Velocity in Nambu form: the gradient cross product over ``sqrt g``."""
    fr = _integrals_frame(sys, pt)
    return fr.raw_cross_product() / fr.volume_density()
