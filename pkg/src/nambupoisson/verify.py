"""Residual checks for the structural identities of the degenerate brackets.

Every residual is paired with a scale assembled from the magnitudes of the
terms that should cancel, and a check passes when
``residual <= tolerance * scale``.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Sequence

import numpy as np

from .errors import DomainError, SingularEvaluationError, TooManySingularPointsError
from .nambu import NambuFrame, frame
from .phase import SystemDefinition, field_jet, seed_jets

log = logging.getLogger(__name__)

__all__ = [
    "ResidualCheck",
    "VerificationReport",
    "VerifyConfig",
    "pfaffian",
    "symplectic_pfaffian",
    "numerical_rank",
    "jacobi_residual",
    "canonical_compatibility_residual",
    "degeneracy_report",
    "casimir_residual",
    "heisenberg_matrix",
    "is_generic_point",
    "sample_points",
    "run_verification",
]

RANK_RTOL = 1e-9


@dataclass
class ResidualCheck:
    name: str
    alpha: int | None
    beta: int | None
    point: list[float] | None
    residual: float
    scale: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.residual <= self.tolerance * self.scale)

    @property
    def ratio(self) -> float:
        return self.residual / self.scale if self.scale > 0 else math.inf


@dataclass
class VerificationReport:
    system: str
    params: dict[str, float]
    seed: int
    samples: int
    tolerance: float
    checks: list[ResidualCheck]
    warnings: list[str] = field(default_factory=list)
    generated_at: str = ""

    @property
    def summary_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[ResidualCheck]:
        return [c for c in self.checks if not c.passed]

    def by_name(self, name: str) -> list[ResidualCheck]:
        return [c for c in self.checks if c.name == name]


@dataclass(frozen=True)
class VerifyConfig:
    samples: int = 200
    seed: int = 0
    tol: float = 1e-8
    box: Sequence[tuple[float, float]] | float = 2.0
    retry_budget: int = 16


# -- linear algebra -----------------------------------------------------------


def pfaffian(A) -> float:
    """Pfaffian of an antisymmetric matrix by expansion along the first row."""
    A = np.asarray(A, dtype=float)
    k = A.shape[0]
    if A.shape != (k, k):
        raise DomainError("pfaffian needs a square matrix")
    if k % 2:
        return 0.0
    if k == 0:
        return 1.0
    if k == 2:
        return float(A[0, 1])
    total = 0.0
    rest = list(range(1, k))
    for j in range(1, k):
        if A[0, j] == 0.0:
            continue
        keep = [r for r in rest if r != j]
        sign = 1.0 if j % 2 else -1.0
        total += sign * A[0, j] * pfaffian(A[np.ix_(keep, keep)])
    return total


def numerical_rank(A, rtol: float = RANK_RTOL) -> int:
    s = np.linalg.svd(np.asarray(A, dtype=float), compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


# -- identity residuals -------------------------------------------------------


def _cyclic(Ja, dJb):
    """Cyclic sum ``J_a^{MA} d_M J_b^{BC} + cyc(ABC)`` and its term magnitudes."""
    # T[A, B, C] = sum_M Ja[M, A] dJb[B, C, M]
    T = np.einsum("ma,bcm->abc", Ja, dJb)
    Tabs = np.einsum("ma,bcm->abc", np.abs(Ja), np.abs(dJb))
    S = T + np.transpose(T, (1, 2, 0)) + np.transpose(T, (2, 0, 1))
    Sabs = Tabs + np.transpose(Tabs, (1, 2, 0)) + np.transpose(Tabs, (2, 0, 1))
    return S, Sabs


def _jacobi_from(fr: NambuFrame, alpha: int, beta: int) -> tuple[float, float]:
    S, Sabs = _cyclic(fr.tensor(alpha), fr.tensor_derivative(beta))
    if alpha != beta:
        # compatibility of two tensors is the symmetrized (Schouten) sum
        S2, Sabs2 = _cyclic(fr.tensor(beta), fr.tensor_derivative(alpha))
        S, Sabs = S + S2, Sabs + Sabs2
    return float(np.max(np.abs(S))), float(np.max(Sabs))


def jacobi_residual(sys: SystemDefinition, alpha: int, beta: int, pt, return_scale: bool = False):
    """Jacobi residual of ``J_alpha`` (``alpha == beta``) or pencil residual.

    For ``alpha == beta`` this is ``max |J^{M[A} d_M J^{BC]}|`` over the
    cyclic sum. For ``alpha != beta`` it is the Schouten bracket of the two
    tensors, ``J_a d J_b + J_b d J_a`` cyclically summed, which vanishes
    exactly when every combination ``J_a + c J_b`` is again Poisson. Index
    0 denotes the canonical tensor.
    """
    fr = frame(sys, pt, derivatives=True)
    res, scale = _jacobi_from(fr, alpha, beta)
    return (res, scale) if return_scale else res


def canonical_compatibility_residual(sys: SystemDefinition, alpha: int, pt, return_scale: bool = False):
    """Schouten bracket of the canonical tensor with ``J_alpha``."""
    return jacobi_residual(sys, 0, alpha, pt, return_scale)


def symplectic_pfaffian(J) -> float:
    """Pfaffian with coordinates reordered to ``(q1, p1, q2, p2, ...)``.

    In that orientation the canonical tensor has Pfaffian +1 for every n.
    """
    J = np.asarray(J, dtype=float)
    n = J.shape[0] // 2
    order = [i for pair in zip(range(n), range(n, 2 * n)) for i in pair]
    return pfaffian(J[np.ix_(order, order)])


def _degeneracy_from(J: np.ndarray, n: int) -> tuple[float, int, float]:
    scale = float(np.max(np.abs(J))) ** n
    return symplectic_pfaffian(J), numerical_rank(J), scale


def degeneracy_report(sys: SystemDefinition, alpha: int, pt) -> tuple[float, int]:
    """Symplectic-orientation Pfaffian and numerical rank of ``J_alpha``
    (``alpha = 0``: canonical)."""
    fr = frame(sys, pt)
    pf, rank, _ = _degeneracy_from(fr.tensor(alpha), sys.n)
    return pf, rank


def _casimir_from(fr: NambuFrame, alpha: int) -> tuple[float, float]:
    J = fr.tensor(alpha)
    res, scale = 0.0, 0.0
    for beta, j in enumerate(fr.integral_jets, start=1):
        if beta == alpha:
            continue
        v = J @ j.grad
        res = max(res, float(np.max(np.abs(v))))
        scale = max(scale, float(np.max(np.abs(J) @ np.abs(j.grad))))
    return res, scale


def casimir_residual(sys: SystemDefinition, alpha: int, pt, return_scale: bool = False):
    """``max_{beta != alpha} ||J_alpha grad H^beta||_inf``."""
    res, scale = _casimir_from(frame(sys, pt), alpha)
    return (res, scale) if return_scale else res


def _heisenberg_from(fr: NambuFrame) -> tuple[np.ndarray, np.ndarray]:
    g4 = fr.clock_gradient()
    k = fr.dim - 1
    Hm = np.zeros((k, k))
    Habs = np.zeros((k, k))
    for a in range(k):
        ga = fr.integral_jets[a].grad
        for b in range(k):
            J = fr.tensor(b + 1)
            Hm[a, b] = g4 @ J @ ga
            Habs[a, b] = np.abs(g4) @ np.abs(J) @ np.abs(ga)
    return Hm, Habs


def heisenberg_matrix(sys: SystemDefinition, pt) -> np.ndarray:
    """Entry ``(alpha, beta)`` is ``[H^{2n}, H^alpha]_beta``; ideally the identity."""
    if sys.clock is None:
        raise DomainError(f"system {sys.name!r} has no clock")
    return _heisenberg_from(frame(sys, pt))[0]


# -- sampling -----------------------------------------------------------------


def _box_bounds(box, d):
    if np.isscalar(box):
        b = float(box)
        return np.full(d, -b), np.full(d, b)
    arr = np.asarray(box, dtype=float)
    if arr.shape != (d, 2):
        raise DomainError(f"sampling box must be a half-width or {d} (lo, hi) pairs")
    return arr[:, 0], arr[:, 1]


def is_generic_point(sys: SystemDefinition, pt, rtol: float = 1e-6) -> bool:
    """Whether the construction is well conditioned at ``pt``.

    Rejects points where any field fails to evaluate, the velocity vanishes,
    or the gradient cross product is small relative to the product of the
    gradient norms (near functional dependence, ``sqrt g`` close to 0).
    """
    try:
        seeds = seed_jets(pt)
        jets = [field_jet(f, sys, pt, seeds) for f in sys.fields()]
        fr = NambuFrame(sys, np.asarray(pt, float), jets[: sys.dim - 1], None, False, validate=False)
        raw = fr.raw_cross_product()
        norms = np.prod([np.linalg.norm(j.grad) for j in fr.integral_jets])
        if not np.linalg.norm(raw) > rtol * norms:
            return False
        if not np.any(fr.velocity() != 0.0):
            return False
        fr.volume_density()
    except SingularEvaluationError:
        return False
    return True


def sample_points(sys: SystemDefinition, samples: int, seed: int, box=2.0, retry_budget: int = 16):
    """Deterministic generic sample points, rejecting singular draws.

    Returns ``(points, rejected)``.
    """
    rng = np.random.default_rng(seed)
    lo, hi = _box_bounds(box, sys.dim)
    pts, rejected = [], 0
    for i in range(samples):
        for _ in range(retry_budget):
            p = rng.uniform(lo, hi)
            if is_generic_point(sys, p):
                pts.append(p)
                break
            rejected += 1
        else:
            raise TooManySingularPointsError(
                f"{sys.name}: no generic point found for sample {i} within {retry_budget} draws"
            )
    drawn = len(pts) + rejected
    if drawn and rejected / drawn > 0.9:
        raise TooManySingularPointsError(f"{sys.name}: rejected {rejected} of {drawn} draws")
    return pts, rejected


# -- battery ------------------------------------------------------------------


def _point_checks(sys: SystemDefinition, pt, tol: float) -> list[ResidualCheck]:
    from .quantum import _commutation_from

    out = []
    p = [float(v) for v in pt]
    k, n = sys.dim - 1, sys.n
    loose = 10.0 * tol
    fr = frame(sys, pt, derivatives=True, validate=False)

    def add(name, alpha, beta, res, scale, t):
        out.append(ResidualCheck(name, alpha, beta, p, float(res), float(scale), t))

    v = fr.velocity()
    raw = fr.raw_cross_product()
    s = fr.volume_density()
    add("volume_density_ratio", None, None, np.max(np.abs(raw - s * v)), np.max(np.abs(raw)), tol)
    if sys.volume_density is not None:
        closed = field_jet(sys.volume_density, sys, pt).value
        add("volume_density_closed_form", None, None, abs(s - closed), max(abs(s), abs(closed)), tol)

    for a in range(1, k + 1):
        J = fr.tensor(a)
        jmax = float(np.max(np.abs(J)))
        add("antisymmetry", a, None, np.max(np.abs(J + J.T)), jmax, tol)
        ga = fr.integral_jets[a - 1].grad
        va = J @ ga
        add("velocity_agreement", a, None, np.max(np.abs(va - v)), np.max(np.abs(J) @ np.abs(ga)), tol)
        add("casimir", a, None, *_casimir_from(fr, a), tol)
        pf, rank, pscale = _degeneracy_from(J, n)
        if n > 1:
            # a single bracket on a 2D phase space is nondegenerate
            add("pfaffian", a, None, abs(pf), pscale, tol / 10.0)
        add("rank", a, None, abs(rank - 2), 1.0, 0.0)

    for a, b in itertools.combinations_with_replacement(range(1, k + 1), 2):
        add("jacobi", a, b, *_jacobi_from(fr, a, b), loose)

    if sys.clock is not None:
        g4 = fr.clock_gradient()
        add("clock_rate", None, None, abs(g4 @ v - 1.0), np.abs(g4) @ np.abs(v), tol)
        Hm, Habs = _heisenberg_from(fr)
        add("heisenberg", None, None, np.max(np.abs(Hm - np.eye(k))), np.max(Habs), tol)
        for a, b in itertools.combinations(range(1, k + 1), 2):
            add("commutation", a, b, *_commutation_from(fr, a, b), loose)
    return out


def _aggregate(per_point: list[list[ResidualCheck]]) -> list[ResidualCheck]:
    worst: dict[tuple, ResidualCheck] = {}
    for checks in per_point:
        for c in checks:
            key = (c.name, c.alpha, c.beta)
            cur = worst.get(key)
            if cur is None or (c.passed, -c.ratio) < (cur.passed, -cur.ratio):
                worst[key] = c
    return list(worst.values())


def run_verification(sys: SystemDefinition, config: VerifyConfig = VerifyConfig()) -> VerificationReport:
    """Run the whole battery at seeded generic points.

    Each check in the report is the worst case over all sample points for one
    ``(name, alpha, beta)``.
    """
    if config.samples < 0:
        raise DomainError("samples must be non-negative")
    notes = []
    if config.samples == 0:
        msg = "no samples requested; report passes vacuously"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    pts, rejected = sample_points(sys, config.samples, config.seed, config.box, config.retry_budget)
    if rejected:
        log.info("%s: rejected %d singular draws", sys.name, rejected)
    per_point = []
    for pt in pts:
        try:
            per_point.append(_point_checks(sys, pt, config.tol))
        except SingularEvaluationError as err:
            per_point.append([ResidualCheck("evaluation", None, None, [float(v) for v in pt], 1.0, 1.0, 0.0)])
            notes.append(f"evaluation failed: {err}")
    return VerificationReport(
        system=sys.name,
        params=dict(sys.parameters),
        seed=config.seed,
        samples=config.samples,
        tolerance=config.tol,
        checks=_aggregate(per_point),
        warnings=notes,
        generated_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


def report_to_dict(report: VerificationReport) -> dict:
    return {
        "system": report.system,
        "params": dict(report.params),
        "seed": report.seed,
        "samples": report.samples,
        "tolerance": report.tolerance,
        "checks": [
            {
                "name": c.name,
                "alpha": c.alpha,
                "beta": c.beta,
                "max_residual": c.residual,
                "scale": c.scale,
                "tolerance": c.tolerance,
                "point": c.point,
                "pass": c.passed,
            }
            for c in report.checks
        ],
        "summary_pass": report.summary_pass,
        "warnings": list(report.warnings),
        "generated_at": report.generated_at,
    }
