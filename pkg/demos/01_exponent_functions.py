"""Tour of the variable exponent functions.

The diffusion coefficient xi * v**p(v) is controlled by an exponent
p(.) that must stay inside [1/2, 1] and keep a bounded derivative near
zero. This script evaluates the three built-in exponents, shows their
analytic derivatives, and runs the numerical admissibility check,
including two constants that violate the range condition.
"""

import numpy as np

from varexp_cir import constant_exponent, eval_dp, eval_p, make_builtin, validate_hypotheses

states = np.array([0.0, 0.05, 0.5, 2.0, 10.0])

print("exponent values p(v)")
print(f"{'v':>8}", *[f"{name:>10}" for name in ("p1", "p2", "p3", "const:0.5")])
fns = [make_builtin(n) for n in ("p1", "p2", "p3", "const:0.5")]
for v in states:
    print(f"{v:8.2f}", *[f"{eval_p(fn, float(v)):10.5f}" for fn in fns])

print("\nderivatives p'(v) near zero (analytic)")
for fn in fns:
    print(f"  {fn.kind:>10}: p'(1e-8) = {eval_dp(fn, 1e-8):.6f}")

print("\nadmissibility checks")
for fn in fns:
    report = validate_hypotheses(fn)
    print(
        f"  {fn.kind:>10}: {report.verdict:6s} "
        f"range=[{report.observed_inf:.4f}, {report.observed_sup:.4f}] "
        f"sup|p'| near 0 = {report.observed_dsup_near_zero:.3f}"
    )

print("\nout-of-range constants are diagnosed, not silently accepted")
for c in (1.2, 0.4):
    report = validate_hypotheses(constant_exponent(c))
    print(f"  const:{c}: {report.verdict}")
