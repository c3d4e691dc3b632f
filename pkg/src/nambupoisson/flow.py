"""Fixed-step RK4 orbits of Hamilton's equations, drift and clock winding."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SingularEvaluationError, UnwrapError
from .nambu import volume_density
from .phase import SystemDefinition, canonical_velocity, field_jet, phase_point, seed_jets

__all__ = [
    "Trajectory",
    "integrate_orbit",
    "conservation_drift",
    "clock_winding",
    "write_csv",
    "csv_header",
    "UNWRAP_FRACTION",
]

# max per-step clock increment after unwrapping, as a fraction of the branch period
UNWRAP_FRACTION = 0.4


@dataclass
class Trajectory:
    system: str
    initial: np.ndarray
    h: float
    times: np.ndarray
    points: np.ndarray  # shape (samples, 2n)
    error: str | None = None
    notes: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.points[-1]


def integrate_orbit(sys: SystemDefinition, pt0, t_end: float, steps: int) -> Trajectory:
    """Classical RK4 on ``X' = J0 grad H^1`` with ``steps`` uniform steps.

    A singular evaluation mid-orbit truncates the trajectory and records the
    message in ``error`` instead of raising.
    """
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")
    if not t_end > 0:
        raise DomainError(f"t_end must be positive, got {t_end}")
    x = phase_point(pt0, sys.n)
    h = t_end / steps
    times = [0.0]
    points = [x.copy()]
    error = None

    def f(p):
        return canonical_velocity(sys, p)

    try:
        for i in range(steps):
            k1 = f(x)
            k2 = f(x + 0.5 * h * k1)
            k3 = f(x + 0.5 * h * k2)
            k4 = f(x + h * k3)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            times.append((i + 1) * h)
            points.append(x.copy())
    except SingularEvaluationError as err:
        error = str(err)
    return Trajectory(sys.name, points[0], h, np.array(times), np.array(points), error)


def _phase_values(sys, traj, state):
    from .quantum import eigenfunction_value

    return np.array([eigenfunction_value(sys, state, p) for p in traj.points])


def conservation_drift(sys: SystemDefinition, traj: Trajectory, state=None) -> dict[str, float]:
    """Max ``|value(t) - value(0)|`` for each integral, ``sqrtg`` and, with an
    :class:`~nambupoisson.quantum.EigenState`, the eigenfunction ``phi``."""
    if len(traj) == 0:
        raise DomainError("empty trajectory")
    out = {}
    for f in sys.integrals:
        vals = np.array([field_jet(f, sys, p).value for p in traj.points])
        out[f.name] = float(np.max(np.abs(vals - vals[0])))
    try:
        g = np.array([volume_density(sys, p, validate=False) for p in traj.points])
        out["sqrtg"] = float(np.max(np.abs(g - g[0])))
    except SingularEvaluationError:
        out["sqrtg"] = math.nan
    if state is not None:
        phi = _phase_values(sys, traj, state)
        out["phi"] = float(np.max(np.abs(phi - phi[0])))
    return out


def clock_winding(sys: SystemDefinition, traj: Trajectory, branch_period: float | None = None) -> tuple[float, int]:
    """Unwrapped increment of the clock along ``traj`` and the number of branch jumps.

    A per-step increment more than half a branch period away from zero is
    read as a jump and shifted by a whole number of periods. If what remains
    still exceeds 40% of the period the step is too coarse to tell a jump
    from motion, and :class:`UnwrapError` is raised.
    """
    if sys.clock is None:
        raise DomainError(f"system {sys.name!r} has no clock")
    P = branch_period if branch_period is not None else sys.clock_branch_period
    vals = np.array([field_jet(sys.clock, sys, p).value for p in traj.points])
    if len(vals) < 2:
        return 0.0, 0
    total, jumps = 0.0, 0
    for i, d in enumerate(np.diff(vals)):
        if P is not None:
            if abs(d) > 0.5 * P:
                d -= P * round(d / P)
                jumps += 1
            if abs(d) >= UNWRAP_FRACTION * P:
                raise UnwrapError(
                    f"clock increment {d:.3g} at step {i} exceeds {UNWRAP_FRACTION:.0%} of the branch period {P:.3g}"
                )
        total += d
    return float(total), jumps


def csv_header(sys: SystemDefinition) -> list[str]:
    cols = ["t", *sys.coordinates, *(f.name for f in sys.fields()), "sqrtg"]
    return cols


def write_csv(sys: SystemDefinition, traj: Trajectory, path_or_file) -> None:
    """One row per sample, 17 significant digits; ``nan`` where a value is singular."""
    fields = sys.fields()

    def fmt(v):
        return format(float(v), ".17g")

    def rows():
        for t, p in zip(traj.times, traj.points):
            seeds = seed_jets(p)
            row = [fmt(t), *(fmt(v) for v in p)]
            for f in fields:
                try:
                    row.append(fmt(field_jet(f, sys, p, seeds).value))
                except SingularEvaluationError:
                    row.append("nan")
            try:
                row.append(fmt(volume_density(sys, p, validate=False)))
            except SingularEvaluationError:
                row.append("nan")
            yield row

    if hasattr(path_or_file, "write"):
        w = csv.writer(path_or_file, lineterminator="\n")
        w.writerow(csv_header(sys))
        w.writerows(rows())
    else:
        with open(path_or_file, "w", newline="") as fh:
            write_csv(sys, traj, fh)
