"""Command-line front end.

Exit codes: 0 all checks pass, 1 checks failed, 2 usage or configuration
error, 3 singular input.
"""

from __future__ import annotations

import argparse
import logging
import sys as _sys
from pathlib import Path

import numpy as np

from .errors import (
    ClockUndefinedError,
    DomainError,
    ExprNameError,
    ExprSyntaxError,
    SingularEvaluationError,
    SystemFileError,
    TooManySingularPointsError,
    UnwrapError,
)
from .files import dumps_report, resolve_system
from .flow import clock_winding, conservation_drift, integrate_orbit, write_csv
from .nambu import frame
from .oscillator import COORDINATES, PAIRS, golden_brackets
from .verify import VerifyConfig, run_verification

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SINGULAR = 0, 1, 2, 3
GOLDEN_RTOL = 1e-8


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _kv(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number in {text!r}") from None


def parse_point(text: str, coordinates) -> np.ndarray:
    """``"x=1,y=1,px=1,py=0"`` to a point in coordinate order."""
    vals = {}
    for part in text.split(","):
        if not part.strip():
            continue
        try:
            k, v = _kv(part)
        except argparse.ArgumentTypeError as err:
            raise _UsageError(f"malformed point: {err}") from None
        if k in vals:
            raise _UsageError(f"malformed point: {k} given twice")
        vals[k] = v
    missing = [c for c in coordinates if c not in vals]
    extra = [k for k in vals if k not in coordinates]
    if missing or extra:
        raise _UsageError(f"malformed point: missing {missing}, unknown {extra}")
    return np.array([vals[c] for c in coordinates])


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nambupoisson", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--system", required=True, help="built-in id (harmonic2d, free2d) or JSON system file")
        sp.add_argument("--param", action="append", type=_kv, default=[], metavar="NAME=VALUE")

    v = sub.add_parser("verify", help="run the identity battery at random points")
    common(v)
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--box", type=float, default=2.0, help="sampling half-width per coordinate")
    v.add_argument("--out", type=Path)

    b = sub.add_parser("brackets", help="print the degenerate bracket tables at a point")
    common(b)
    b.add_argument("--point", required=True)
    b.add_argument("--golden", action="store_true", help="compare with the oscillator closed forms")

    f = sub.add_parser("flow", help="integrate an orbit and write it as CSV")
    common(f)
    f.add_argument("--point", required=True)
    f.add_argument("--t", type=float, required=True)
    f.add_argument("--steps", type=int, required=True)
    f.add_argument("--out", type=Path)
    return p


def _cmd_verify(args, system, out, err) -> int:
    if args.samples < 0:
        raise _UsageError("--samples must be non-negative")
    cfg = VerifyConfig(samples=args.samples, seed=args.seed, tol=args.tol, box=args.box)
    report = run_verification(system, cfg)
    text = dumps_report(report)
    if args.out is not None:
        args.out.write_text(text)
    for c in report.checks:
        tag = "PASS" if c.passed else "FAIL"
        idx = ",".join(str(i) for i in (c.alpha, c.beta) if i is not None)
        print(f"{tag} {c.name}[{idx}] residual={c.residual:.3e} scale={c.scale:.3e} tol={c.tolerance:.1e}", file=out)
    for w in report.warnings:
        print(f"warning: {w}", file=err)
    print(f"summary: {'PASS' if report.summary_pass else 'FAIL'} ({len(report.failed())} failing)", file=out)
    return EXIT_OK if report.summary_pass else EXIT_FAIL


def _cmd_brackets(args, system, out, err) -> int:
    pt = parse_point(args.point, system.coordinates)
    fr = frame(system, pt)
    names = system.coordinates
    golden = None
    if args.golden:
        if system.name not in ("harmonic2d", "free2d") or tuple(names) != COORDINATES:
            raise _UsageError("--golden is only available for the built-in oscillator systems")
        golden = golden_brackets(system, pt)
    print(f"# sqrtg = {fr.volume_density():.17g}", file=out)
    worst = 0.0
    for alpha in range(1, system.dim):
        J = fr.tensor(alpha)
        pairs = PAIRS if golden else [(names[i], names[j]) for i in range(len(names)) for j in range(i + 1, len(names))]
        for a, b in pairs:
            val = J[names.index(a), names.index(b)]
            if golden:
                g = golden[alpha][(a, b)]
                diff = abs(val - g)
                worst = max(worst, diff / max(1.0, abs(g)))
                print(f"[{a},{b}]_{alpha} constructed={val:.17g} golden={g:.17g} diff={diff:.3e}", file=out)
            else:
                print(f"[{a},{b}]_{alpha} = {val:.17g}", file=out)
    if golden:
        ok = worst <= GOLDEN_RTOL
        print(f"max relative diff = {worst:.3e} ({'PASS' if ok else 'FAIL'})", file=out)
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_OK


def _cmd_flow(args, system, out, err) -> int:
    pt = parse_point(args.point, system.coordinates)
    traj = integrate_orbit(system, pt, args.t, args.steps)
    if args.out is not None:
        write_csv(system, traj, args.out)
        drift = conservation_drift(system, traj)
        for k, v in drift.items():
            print(f"drift {k} = {v:.3e}", file=out)
        if system.clock is not None and traj.error is None:
            delta, jumps = clock_winding(system, traj)
            print(f"clock winding delta = {delta:.17g} branch_jumps = {jumps}", file=out)
    else:
        write_csv(system, traj, out)
    if traj.error:
        print(f"error: trajectory truncated at t={traj.times[-1]:.6g}: {traj.error}", file=err)
        return EXIT_SINGULAR
    return EXIT_OK


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or _sys.stdout
    err = err or _sys.stderr
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=err)
        system = resolve_system(args.system, dict(args.param))
        handler = {"verify": _cmd_verify, "brackets": _cmd_brackets, "flow": _cmd_flow}[args.command]
        return handler(args, system, out, err)
    except (_UsageError, SystemFileError, DomainError, ExprSyntaxError, ExprNameError, ClockUndefinedError) as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except (SingularEvaluationError, TooManySingularPointsError, UnwrapError) as e:
        print(f"singular input: {e}", file=err)
        return EXIT_SINGULAR
    except OSError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE


def main() -> None:
    raise SystemExit(run_cli())
