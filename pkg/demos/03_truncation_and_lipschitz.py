"""Band truncation and its Lipschitz constants.

The raw diffusion xi * x**p(x) is not Lipschitz at the origin. The
radial truncation clamps states into [1/n, n] (with C^1 bridges over
tiny gap intervals), which makes both coefficients globally Lipschitz
with computable constants; on the middle band they coincide with the
originals. The empirical column is the largest difference quotient
observed over ten thousand random pairs, always dominated by the
closed-form constant.
"""

from varexp_cir import (
    ModelParams,
    TruncationParams,
    gm_model,
    lipschitz_constants,
    make_builtin,
    rho_n,
    theta_n,
)

params = ModelParams(kappa=2.0, theta=0.05, xi=0.3, v0=0.05)
model = gm_model(params, make_builtin("p1"))

tp = TruncationParams(10)
print(f"truncation level n=10 (gap width eps={tp.epsilon})")
print("radial clamp theta_n and odd extension rho_n:")
for r in (0.0, 0.05, 0.1, 0.5, 5.0, 9.999, 50.0):
    print(f"  r={r:8.3f}  theta_n={theta_n(tp, r):8.4f}  rho_n(-r)={rho_n(tp, -r):9.4f}")

print("\nLipschitz constants by level (drift Lf = kappa*L, diffusion Lg = xi*L*C):")
header = f"{'n':>4} {'L_n':>10} {'C_n':>10} {'Lf_n':>10} {'Lg_n':>12} {'empirical':>10}"
print(header)
for n in (2, 10, 100):
    rep = lipschitz_constants(TruncationParams(n), model)
    print(
        f"{n:4d} {rep.L_n:10.3g} {rep.C_n:10.3g} {rep.Lf_n:10.3g} "
        f"{rep.Lg_n:12.3g} {rep.empirical_sup_quotient:10.3g}"
    )

print("\nthe constants are conservative by design: they certify the")
print("contraction argument, they do not chase the sharpest slope.")
