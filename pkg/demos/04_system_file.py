"""
A system from a file
====================

Any super-integrable system can be described in JSON with expression
strings. This runs the full identity battery on the bundled three degree of
freedom isotropic oscillator.
"""

from pathlib import Path

from nambupoisson import load_system
from nambupoisson.verify import VerifyConfig, run_verification

here = Path(__file__).resolve().parent
iso = load_system(here.parent / "systems" / "isotropic3d.json")
print(iso.name, "n =", iso.n, "integrals:", [f.source for f in iso.integrals])

report = run_verification(iso, VerifyConfig(samples=40, seed=1))
for c in sorted(report.checks, key=lambda c: (c.name, c.alpha or 0, c.beta or 0)):
    idx = ",".join(str(i) for i in (c.alpha, c.beta) if i is not None)
    print(f"{'ok ' if c.passed else 'BAD'} {c.name}[{idx}]  {c.residual:.1e} / {c.scale:.1e}")
print("summary:", "PASS" if report.summary_pass else "FAIL")
