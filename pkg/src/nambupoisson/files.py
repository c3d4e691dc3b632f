"""System-definition files, the built-in registry and report JSON.

A system file is a JSON document::

    {
      "name": "harmonic2d-expr",
      "n": 2,
      "coordinates": ["x", "y", "px", "py"],
      "parameters": {"m": 1.0, "k": 1.0},
      "integrals": ["0.5*(px^2+py^2)/m + 0.5*k*(x^2+y^2)", "...", "..."],
      "clock": "atan(sqrt(k*m)*(x+y)/(px+py))/sqrt(k/m)",
      "volume_density": "2*(x*py - y*px)*(px*py/m + k*x*y)",
      "clock_branch_period": "pi/sqrt(k/m)"
    }

``clock``, ``volume_density`` and ``clock_branch_period`` are optional; the
last may be a number or an expression over the parameters.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Mapping

from . import expr as _expr
from .errors import ExprNameError, ExprSyntaxError, SystemFileError
from .oscillator import OscillatorParams, build_oscillator
from .phase import ScalarField, SystemDefinition
from .verify import ResidualCheck, VerificationReport, report_to_dict

__all__ = [
    "BUILTIN_SYSTEMS",
    "load_system",
    "system_from_dict",
    "resolve_system",
    "dumps_report",
    "loads_report",
]


def _oscillator(params: Mapping[str, float]) -> SystemDefinition:
    return build_oscillator(OscillatorParams(params.get("m", 1.0), params.get("k", 1.0)))


def _free(params: Mapping[str, float]) -> SystemDefinition:
    if params.get("k", 0.0) != 0.0:
        raise SystemFileError("free2d has k = 0; use harmonic2d for k != 0")
    return build_oscillator(OscillatorParams(params.get("m", 1.0), 0.0), clock=False)


BUILTIN_SYSTEMS = {"harmonic2d": _oscillator, "free2d": _free}


def system_from_dict(doc: Mapping, origin: str = "<dict>") -> SystemDefinition:
    try:
        n = int(doc["n"])
        coords = [str(c) for c in doc["coordinates"]]
        params = {str(k): float(v) for k, v in doc.get("parameters", {}).items()}
        integrals = list(doc["integrals"])
    except (KeyError, TypeError, ValueError) as err:
        raise SystemFileError(f"{origin}: malformed system document ({err})") from None
    name = str(doc.get("name", Path(origin).stem))
    if len(coords) != 2 * n:
        raise SystemFileError(f"{origin}: n={n} needs {2 * n} coordinates, got {len(coords)}")
    if len(integrals) != 2 * n - 1:
        raise SystemFileError(f"{origin}: n={n} needs {2 * n - 1} integrals, got {len(integrals)}")
    clash = set(coords) & (set(params) | set(_expr.CONSTANTS))
    if clash:
        raise SystemFileError(f"{origin}: names used as both coordinate and parameter: {sorted(clash)}")

    def field(label, text):
        try:
            return ScalarField.from_expr(label, str(text), coords, params)
        except (ExprSyntaxError, ExprNameError) as err:
            raise SystemFileError(f"{origin}: {label}: {err}") from None

    ints = tuple(field(f"H{i + 1}", text) for i, text in enumerate(integrals))
    clock = field(f"H{2 * n}", doc["clock"]) if doc.get("clock") else None
    vol = field("sqrtg", doc["volume_density"]) if doc.get("volume_density") else None
    period = doc.get("clock_branch_period")
    meta = {"source": origin}
    if isinstance(period, str):
        try:
            ast = _expr.bind(_expr.parse(period), (), params)
        except (ExprSyntaxError, ExprNameError) as err:
            raise SystemFileError(f"{origin}: clock_branch_period: {err}") from None

        def rule(p, ast=ast):
            return _expr.eval_float(ast, {**p, **_expr.CONSTANTS})

        meta["branch_period_rule"] = rule
        period = rule(params)
    return SystemDefinition(
        name=name,
        n=n,
        coordinates=tuple(coords),
        parameters=params,
        integrals=ints,
        clock=clock,
        volume_density=vol,
        clock_branch_period=float(period) if period is not None else None,
        metadata=meta,
    )


def load_system(path) -> SystemDefinition:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as err:
        raise SystemFileError(f"cannot read system file {path}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise SystemFileError(f"{path}: invalid JSON ({err})") from None
    return system_from_dict(doc, str(path))


def resolve_system(name_or_path: str, params: Mapping[str, float] | None = None) -> SystemDefinition:
    """A built-in id or a path to a system file, with parameter overrides."""
    params = dict(params or {})
    if name_or_path in BUILTIN_SYSTEMS:
        unknown = set(params) - {"m", "k"}
        if unknown:
            raise SystemFileError(f"{name_or_path}: unknown parameter(s) {sorted(unknown)}")
        return BUILTIN_SYSTEMS[name_or_path](params)
    if not Path(name_or_path).exists():
        raise SystemFileError(f"unknown system id or missing file: {name_or_path}")
    sys = load_system(name_or_path)
    if params:
        unknown = set(params) - set(sys.parameters)
        if unknown:
            raise SystemFileError(f"{name_or_path}: unknown parameter(s) {sorted(unknown)}")
        sys = sys.with_params(**params)
    return sys


# -- report JSON --------------------------------------------------------------


def _emit(obj, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            out.append(json.dumps(str(obj)))
        else:
            out.append(format(obj, ".17g"))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k))}: ")
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            parts = []
            for v in obj:
                sub: list[str] = []
                _emit(v, sub, indent, level)
                parts.append("".join(sub))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_report(report: VerificationReport | dict, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    doc = report_to_dict(report) if isinstance(report, VerificationReport) else report
    out: list[str] = []
    _emit(doc, out, indent, 0)
    return "".join(out) + "\n"


def loads_report(text: str) -> VerificationReport:
    doc = json.loads(text)
    checks = []
    for c in doc["checks"]:
        rc = ResidualCheck(
            c["name"], c["alpha"], c["beta"], c.get("point"), c["max_residual"], c["scale"], c["tolerance"]
        )
        if rc.passed != c["pass"]:
            raise ValueError(f"check {c['name']} pass flag disagrees with its residual")
        checks.append(rc)
    report = VerificationReport(
        system=doc["system"],
        params=doc["params"],
        seed=doc["seed"],
        samples=doc["samples"],
        tolerance=doc["tolerance"],
        checks=checks,
        warnings=doc.get("warnings", []),
        generated_at=doc.get("generated_at", ""),
    )
    if report.summary_pass != doc["summary_pass"]:
        raise ValueError("summary_pass disagrees with the checks")
    return report
