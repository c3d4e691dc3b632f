import itertools
import math
import random
import sys
from pathlib import Path

import numpy as np
import pytest

from nambupoisson.oscillator import OscillatorParams, build_oscillator
from nambupoisson.verify import sample_points

ROOT = Path(__file__).resolve().parents[1]
SYSTEMS = ROOT / "systems"

P0 = np.array([1.0, 1.0, 1.0, 0.0])


@pytest.fixture
def osc():
    return build_oscillator(OscillatorParams(1.0, 1.0))


@pytest.fixture
def p0():
    return P0.copy()


@pytest.fixture(scope="session")
def osc_points():
    """100 seeded generic points of the unit oscillator."""
    pts, _ = sample_points(build_oscillator(), 100, seed=2024)
    return pts


def fd_gradient(f, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def fd_jacobian(F, x, h=1e-5):
    """``jac[C, M] = dF^C/dx^M`` by central differences."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((np.asarray(F(x + e)) - np.asarray(F(x - e))) / (2 * h))
    return np.stack(cols, axis=-1)


def perm_sign(seq):
    s = 1
    seq = list(seq)
    for i, j in itertools.combinations(range(len(seq)), 2):
        if seq[i] > seq[j]:
            s = -s
    return s


def levi_civita_tensor(G, sqrtg, alpha):
    """Brute-force double permutation-symbol sum for ``J_alpha``.

    Sums over every ordering of the other integrals and of the remaining
    columns, then divides by ``(2n-2)!`` to land on the single-ordering
    normalization.
    """
    G = np.asarray(G)
    k, d = G.shape
    others = [b for b in range(k) if b != alpha - 1]
    J = np.zeros((d, d))
    for A in range(d):
        for B in range(d):
            if A == B:
                continue
            cols = [c for c in range(d) if c not in (A, B)]
            total = 0.0
            for bs in itertools.permutations(others):
                eb = perm_sign([alpha - 1, *bs])
                for cs in itertools.permutations(cols):
                    ec = perm_sign([A, B, *cs])
                    total += eb * ec * np.prod([G[b, c] for b, c in zip(bs, cs)])
            J[A, B] = total / math.factorial(d - 2) / sqrtg
    return J


def levi_civita_cross(G):
    G = np.asarray(G)
    k, d = G.shape
    out = np.zeros(d)
    for A in range(d):
        cols = [c for c in range(d) if c != A]
        total = 0.0
        for bs in itertools.permutations(range(k)):
            eb = perm_sign(bs)
            for cs in itertools.permutations(cols):
                total += eb * perm_sign([A, *cs]) * np.prod([G[b, c] for b, c in zip(bs, cs)])
        out[A] = total / math.factorial(k)
    return out


# -- random expressions over (x, y, px, py) and a parameter k -------------------

_LEAVES = ["x", "y", "px", "py", "k", "1.5", "2", "0.25"]


def random_expr(rng: random.Random, depth: int) -> str:
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(_LEAVES)
    kind = rng.randrange(8)
    a = random_expr(rng, depth - 1)
    b = random_expr(rng, depth - 1)
    if kind == 0:
        return f"({a}) + ({b})"
    if kind == 1:
        return f"({a}) - {b}"
    if kind == 2:
        return f"{a} * ({b})"
    if kind == 3:
        return f"({a}) / (1.5 + ({b})^2)"
    if kind == 4:
        return f"({a})^{rng.choice([2, 3])}"
    if kind == 5:
        return f"{rng.choice(['sin', 'cos', 'atan', 'exp'])}(0.3*({a}))"
    if kind == 6:
        return f"sqrt(1 + ({a})^2)"
    return f"-({a})"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"CRITERION {n:2d} {'PASS' if ok else 'FAIL'}: {detail}")
