"""System definitions, phase points and the canonical Poisson structure.

Coordinates are always ordered ``(q1..qn, p1..pn)``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping, Sequence

import numpy as np

from . import expr as _expr
from .errors import DomainError, SingularEvaluationError
from .jets import Jet2, jet_var

__all__ = [
    "ScalarField",
    "SystemDefinition",
    "phase_point",
    "seed_jets",
    "field_jet",
    "gradient",
    "canonical_tensor",
    "canonical_velocity",
]

JetFunction = Callable[[Sequence[Jet2], Mapping[str, float]], Jet2]


@dataclass(frozen=True)
class ScalarField:
    """A named scalar on phase space, evaluated through jets.

    ``func`` receives the seeded coordinate jets (in coordinate order) and the
    parameter mapping.
    """

    name: str
    func: JetFunction
    source: str | None = None

    @classmethod
    def from_expr(cls, name, source, coordinates, parameters=()):
        ast = _expr.bind(_expr.parse(source), coordinates, parameters)
        coords = tuple(coordinates)

        def func(X, params):
            return _expr.eval_jet(ast, dict(zip(coords, X)), params)

        return cls(name, func, source)

    def jet(self, sys: "SystemDefinition", pt) -> Jet2:
        return field_jet(self, sys, pt)


@dataclass(frozen=True)
class SystemDefinition:
    """A super-integrable system: ``2n`` coordinates and ``2n-1`` integrals.

    ``clock`` is the time-like coordinate with unit rate along the flow;
    ``volume_density`` is an optional closed form that is cross-checked,
    never trusted. ``clock_branch_period`` is the jump size of the clock's
    branch cuts, used when unwrapping it along orbits; when it depends on the
    parameters, ``metadata["branch_period_rule"]`` maps parameters to it.
    """

    name: str
    n: int
    coordinates: tuple[str, ...]
    parameters: Mapping[str, float]
    integrals: tuple[ScalarField, ...]
    clock: ScalarField | None = None
    volume_density: ScalarField | None = None
    clock_branch_period: float | None = None
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"need n >= 1 degrees of freedom, got {self.n}")
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        object.__setattr__(self, "integrals", tuple(self.integrals))
        object.__setattr__(self, "parameters", MappingProxyType(dict(self.parameters)))
        if len(self.coordinates) != 2 * self.n:
            raise DomainError(f"{self.name}: expected {2 * self.n} coordinate names, got {len(self.coordinates)}")
        if len(set(self.coordinates)) != len(self.coordinates):
            raise DomainError(f"{self.name}: duplicate coordinate names")
        if len(self.integrals) != 2 * self.n - 1:
            raise DomainError(
                f"{self.name}: a super-integrable system with n={self.n} needs "
                f"{2 * self.n - 1} integrals, got {len(self.integrals)}"
            )

    @property
    def dim(self) -> int:
        return 2 * self.n

    def with_params(self, **updates) -> "SystemDefinition":
        unknown = set(updates) - set(self.parameters)
        if unknown:
            raise DomainError(f"{self.name}: unknown parameter(s) {sorted(unknown)}")
        params = {**self.parameters, **updates}
        period = self.clock_branch_period
        rule = self.metadata.get("branch_period_rule")
        if rule is not None:
            # the period depends on the parameters; recompute it
            period = rule(params)
        return dataclasses.replace(self, parameters=params, clock_branch_period=period)

    def fields(self) -> tuple[ScalarField, ...]:
        """Integrals followed by the clock, when there is one."""
        return self.integrals + ((self.clock,) if self.clock is not None else ())


def phase_point(coords, n: int | None = None) -> np.ndarray:
    """Validate and return a phase point as a float array."""
    pt = np.array(coords, dtype=float)
    if pt.ndim != 1:
        raise DomainError("a phase point is a flat vector")
    if n is not None and pt.shape[0] != 2 * n:
        raise DomainError(f"expected {2 * n} coordinates, got {pt.shape[0]}")
    if not np.all(np.isfinite(pt)):
        raise DomainError("phase point has non-finite entries")
    return pt


def seed_jets(pt) -> list[Jet2]:
    d = len(pt)
    return [jet_var(i, float(v), d) for i, v in enumerate(pt)]


def field_jet(f: ScalarField, sys: SystemDefinition, pt, seeds=None) -> Jet2:
    """Value, gradient and Hessian of ``f`` at ``pt``."""
    if seeds is None:
        seeds = seed_jets(phase_point(pt, sys.n))
    try:
        return f.func(seeds, sys.parameters)
    except SingularEvaluationError as err:
        if err.field is None:
            err.field = f.name
        if err.point is None:
            err.point = tuple(float(s.value) for s in seeds)
        raise


def gradient(f: ScalarField, sys: SystemDefinition, pt) -> np.ndarray:
    return field_jet(f, sys, pt).grad.copy()


def canonical_tensor(n: int) -> np.ndarray:
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def canonical_velocity(sys: SystemDefinition, pt) -> np.ndarray:
    """Hamilton's equations: ``J0 @ grad H^1``."""
    g = gradient(sys.integrals[0], sys, pt)
    n = sys.n
    return np.concatenate([g[n:], -g[:n]])
