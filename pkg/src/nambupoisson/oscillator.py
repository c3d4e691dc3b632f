"""The two-dimensional isotropic harmonic oscillator, with closed forms.

Coordinates are ``(x, y, px, py)``. The integrals are the energy ``H1``,
the Cartesian energy difference ``H2``, half the squared angular momentum
``H3 = L^2/2`` and the clock ``H4 = atan(m w (x+y)/(px+py))/w``, where
``L = x py - y px``, ``M = px py/m + k x y`` and ``w^2 = k/m``. The volume
density is ``sqrt g = 2 L M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ClockUndefinedError, DomainError, SingularPointError
from .jets import jet_func
from .phase import ScalarField, SystemDefinition, phase_point, seed_jets

__all__ = [
    "OscillatorParams",
    "COORDINATES",
    "PAIRS",
    "build_oscillator",
    "angular_momentum",
    "separation_constant",
    "golden_brackets",
    "golden_operators",
    "hietarinta_field",
    "HietarintaField",
    "privileged_metric",
    "free_particle_limit",
]

COORDINATES = ("x", "y", "px", "py")
# bracket-table pairs in print order
PAIRS = (("x", "y"), ("px", "py"), ("x", "px"), ("y", "py"), ("x", "py"), ("y", "px"))


@dataclass(frozen=True)
class OscillatorParams:
    m: float = 1.0
    k: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise DomainError(f"mass must be positive, got {self.m}")
        if not self.k >= 0:
            raise DomainError(f"spring constant must be non-negative, got {self.k}")

    @property
    def omega2(self) -> float:
        return self.k / self.m

    @property
    def omega(self) -> float:
        return math.sqrt(self.omega2)

    @property
    def free_particle(self) -> bool:
        return self.k == 0.0


def _energy(X, p):
    x, y, px, py = X
    return (px * px + py * py) * (0.5 / p["m"]) + (x * x + y * y) * (0.5 * p["k"])


def _energy_difference(X, p):
    x, y, px, py = X
    return (px * px - py * py) * (0.5 / p["m"]) + (x * x - y * y) * (0.5 * p["k"])


def _half_l_squared(X, p):
    L = X[0] * X[3] - X[1] * X[2]
    return L * L * 0.5


def _clock(X, p):
    x, y, px, py = X
    w = math.sqrt(p["k"] / p["m"])
    return jet_func("atan", (x + y) * (p["m"] * w) / (px + py)) * (1.0 / w)


def _sqrtg(X, p):
    x, y, px, py = X
    L = x * py - y * px
    M = px * py * (1.0 / p["m"]) + x * y * p["k"]
    return L * M * 2.0


def build_oscillator(params: OscillatorParams = OscillatorParams(), clock: bool | None = None) -> SystemDefinition:
    """The oscillator as a :class:`SystemDefinition`.

    ``clock`` defaults to on unless ``k == 0``, where the clock degenerates;
    requesting it explicitly in that case raises :class:`ClockUndefinedError`.
    """
    if clock is None:
        clock = not params.free_particle
    if clock and params.free_particle:
        raise ClockUndefinedError("the oscillator clock H4 is undefined for k = 0")
    return SystemDefinition(
        name="free2d" if params.free_particle else "harmonic2d",
        n=2,
        coordinates=COORDINATES,
        parameters={"m": params.m, "k": params.k},
        integrals=(
            ScalarField("H1", _energy, "0.5*(px^2+py^2)/m + 0.5*k*(x^2+y^2)"),
            ScalarField("H2", _energy_difference, "0.5*(px^2-py^2)/m + 0.5*k*(x^2-y^2)"),
            ScalarField("H3", _half_l_squared, "0.5*(x*py - y*px)^2"),
        ),
        clock=ScalarField("H4", _clock, "atan(sqrt(k*m)*(x+y)/(px+py))/sqrt(k/m)") if clock else None,
        volume_density=ScalarField("sqrtg", _sqrtg, "2*(x*py - y*px)*(px*py/m + k*x*y)"),
        clock_branch_period=math.pi / params.omega if clock else None,
        metadata={"branch_period_rule": _branch_period} if clock else {},
    )


def _branch_period(p) -> float:
    if not p["k"] > 0 or not p["m"] > 0:
        raise ClockUndefinedError("the oscillator clock needs m > 0 and k > 0")
    return math.pi / math.sqrt(p["k"] / p["m"])


def _params(sys_or_params) -> OscillatorParams:
    if isinstance(sys_or_params, OscillatorParams):
        return sys_or_params
    if isinstance(sys_or_params, SystemDefinition):
        return OscillatorParams(sys_or_params.parameters["m"], sys_or_params.parameters["k"])
    return OscillatorParams(**sys_or_params)


def angular_momentum(pt) -> float:
    x, y, px, py = phase_point(pt, 2)
    return x * py - y * px


def separation_constant(params: OscillatorParams, pt) -> float:
    """``M = px py / m + k x y``; ``M^2 = H1^2 - H2^2 - 2 w^2 H3``."""
    x, y, px, py = phase_point(pt, 2)
    return px * py / params.m + params.k * x * y


def _require_nonzero(L, M, need_L=True):
    if M == 0.0:
        raise SingularPointError("closed form is singular: M = px*py/m + k*x*y vanishes")
    if need_L and L == 0.0:
        raise SingularPointError("closed form is singular: L = x*py - y*px vanishes")


def golden_brackets(params: OscillatorParams, pt) -> dict[int, dict[tuple[str, str], float]]:
    """The three closed-form bracket tables at ``pt``.

    ``table[alpha][(a, b)]`` is ``[a, b]_alpha`` for the six pairs in
    :data:`PAIRS`.
    """
    params = _params(params)
    x, y, px, py = phase_point(pt, 2)
    m, k, w2 = params.m, params.k, params.omega2
    L = x * py - y * px
    M = px * py / m + k * x * y
    _require_nonzero(L, M)
    u, v = x * px - y * py, x * px + y * py
    return {
        1: {
            ("x", "y"): u / (2 * m * M),
            ("px", "py"): -k / (2 * M) * u,
            ("x", "px"): 0.5,
            ("y", "py"): 0.5,
            ("x", "py"): (px**2 / m + k * y**2) / (2 * M),
            ("y", "px"): (py**2 / m + k * x**2) / (2 * M),
        },
        2: {
            ("x", "y"): -v / (2 * m * M),
            ("px", "py"): k / (2 * M) * v,
            ("x", "px"): 0.5,
            ("y", "py"): -0.5,
            ("x", "py"): -(px**2 / m - k * y**2) / (2 * M),
            ("y", "px"): (py**2 / m - k * x**2) / (2 * M),
        },
        3: {
            ("x", "y"): -px * py / (m**2 * L * M),
            ("px", "py"): -(k**2) * x * y / (L * M),
            ("x", "px"): 0.0,
            ("y", "py"): 0.0,
            ("x", "py"): w2 * y * px / (L * M),
            ("y", "px"): -w2 * x * py / (L * M),
        },
    }


def golden_operators(params: OscillatorParams, alpha: int, pt) -> np.ndarray:
    """Coefficients of the reference clock operators, ``hbar/i`` factored out.

    Component ``B`` multiplies ``d/dX^B``. The formulas are transcribed
    verbatim, including the ``1/L`` prefactor of the first operator.
    """
    params = _params(params)
    x, y, px, py = phase_point(pt, 2)
    m, k = params.m, params.k
    L = x * py - y * px
    M = px * py / m + k * x * y
    H1 = (px**2 + py**2) / (2 * m) + k * (x**2 + y**2) / 2
    if alpha == 1:
        _require_nonzero(L, M)
        return np.array([y, x, py, px]) / (2 * L * M)
    if alpha == 2:
        _require_nonzero(L, M, need_L=False)
        if H1 + M == 0.0:
            raise SingularPointError("closed form is singular: H1 + M vanishes")
        s, q = x + y, px + py
        c = (
            -(px**2 - py**2) / m * np.array([y, x, 0.0, 0.0])
            + k * s**2 * np.array([y, -x, 0.0, 0.0])
            - k * (x**2 - y**2) * np.array([0.0, 0.0, py, px])
            + 2 / m * px * py * s * np.array([1.0, -1.0, 0.0, 0.0])
            + 2 * k * x * y * q * np.array([0.0, 0.0, 1.0, -1.0])
            + q**2 / m * np.array([0.0, 0.0, py, -px])
        )
        return c / (4 * M * (H1 + M))
    if alpha == 3:
        _require_nonzero(L, M)
        if H1 + M == 0.0:
            raise SingularPointError("closed form is singular: H1 + M vanishes")
        s = x + y
        a = k * y * s + py * (px + py) / m
        b = k * x * s + px * (px + py) / m
        c = a * np.array([px / m, 0.0, -k * x, 0.0]) - b * np.array([0.0, py / m, 0.0, -k * y])
        return c / (2 * L * M * (H1 + M))
    raise DomainError(f"oscillator operator index must be 1, 2 or 3, got {alpha}")


def _hietarinta_components(X, params: OscillatorParams, alpha: int):
    x, y, px, py = X
    m, k = params.m, params.k
    if alpha == 1:
        return [-px * (1 / m), -py * (1 / m), x * k, y * k]
    if alpha == 2:
        return [-px * (1 / m), py * (1 / m), x * k, -y * k]
    if alpha == 3:
        L = x * py - y * px
        return [L * y, -L * x, L * py, -L * px]
    raise DomainError(f"Hietarinta field index must be 1, 2 or 3, got {alpha}")


def hietarinta_field(params: OscillatorParams, alpha: int, pt) -> np.ndarray:
    """Coefficients of the reference canonical Hamiltonian vector fields."""
    params = _params(params)
    comps = _hietarinta_components(phase_point(pt, 2), params, alpha)
    return np.array([float(c) for c in comps])


@dataclass(frozen=True)
class HietarintaField:
    """The reference canonical vector field for ``H^alpha``, differentiable through jets."""

    params: OscillatorParams
    alpha: int

    def evaluate(self, pt) -> tuple[np.ndarray, np.ndarray]:
        comps = _hietarinta_components(seed_jets(phase_point(pt, 2)), self.params, self.alpha)
        vals = np.array([c.value for c in comps])
        jac = np.array([c.grad for c in comps])
        return vals, jac


def privileged_metric(params: OscillatorParams, h) -> tuple[np.ndarray, float]:
    """Metric in the privileged coordinates ``(H1, H2, H3, H4)`` and its determinant.

    Cross terms of the line element are split symmetrically, so
    ``2 H1 dH1 dH3`` becomes ``g13 = g31 = H1``.
    """
    params = _params(params)
    H1, H2, H3, _ = np.asarray(h, dtype=float)
    g = np.zeros((4, 4))
    g[0, 0] = H3
    g[1, 1] = -H3
    g[2, 2] = 2 * params.omega2
    g[3, 3] = 1.0
    g[0, 2] = g[2, 0] = H1
    g[1, 2] = g[2, 1] = H2
    return g, float(np.linalg.det(g))


def free_particle_limit(pt, m: float = 1.0) -> dict[tuple[str, str], float]:
    """Third bracket table at ``k = 0``: only ``[x, y]_3 = -1/(m L)`` survives."""
    L = angular_momentum(pt)
    if L == 0.0:
        raise SingularPointError("free-particle limit is singular: L vanishes")
    table = {pair: 0.0 for pair in PAIRS}
    table[("x", "y")] = -1.0 / (m * L)
    return table
