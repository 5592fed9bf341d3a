"""Band truncation of the model coefficients and its Lipschitz constants.

The radial truncation maps the whole line into [-n, -1/n] u {0} u
[1/n, n]; composing the drift and diffusion with it yields globally
Lipschitz coefficients that agree with the originals on the middle band
[1/n + eps, n - eps]. The gap intervals are bridged with a monotone C^1
cubic Hermite so the truncation has a computable derivative bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exponent import ExponentFunction
from .model import Model, coefficients

__all__ = [
    "LipschitzReport",
    "TruncationParams",
    "lipschitz_constants",
    "rho_n",
    "theta_n",
    "theta_n_deriv",
    "truncated_drift",
    "truncated_diffusion",
]


@dataclass(frozen=True)
class TruncationParams:
    """Band index n >= 1 and gap width 0 < eps < 1/n**2.

    The default eps = 1/(2 n**2) satisfies the constraint with margin;
    the bands must be well ordered (1/n + eps < n - eps), which for the
    default requires n >= 2.
    """

    n: int
    epsilon: float | None = None

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"band index n must be an integer >= 1, got {self.n}")
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", 1.0 / (2.0 * self.n**2))
        eps, n = self.epsilon, self.n
        if not (0.0 < eps < 1.0 / n**2):
            raise ValueError(f"gap width must satisfy 0 < eps < 1/n^2, got {eps}")
        if not (1.0 / n + eps < n - eps):
            raise ValueError(f"bands collapse for n={n}, eps={eps}")

    @property
    def lower(self) -> float:
        return 1.0 / self.n

    @property
    def band(self) -> tuple[float, float]:
        """Interval on which the truncated coefficients equal the originals."""
        return (1.0 / self.n + self.epsilon, self.n - self.epsilon)


def _check_r(r) -> np.ndarray:
    ra = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(ra)):
        raise ValueError("truncation argument must be finite")
    if np.any(ra < 0.0):
        raise ValueError("radial truncation argument must be nonnegative")
    return ra


def _scalar_like(x, out):
    if np.ndim(x) == 0:
        return float(out)
    return out


def theta_n(tp: TruncationParams, r) -> float | np.ndarray:
    """Radial clamp onto [1/n, n]: constant 1/n below, identity on the
    middle band, constant n above, monotone C^1 Hermite bridges on the
    two gap intervals (value-matching, slope 0 on the flat side and 1
    on the identity side)."""
    ra = _check_r(r)
    n, eps = tp.n, tp.epsilon
    lo = 1.0 / n

    t1 = np.clip((ra - lo) / eps, 0.0, 1.0)
    bridge_lo = lo + eps * t1**2 * (2.0 - t1)
    t2 = np.clip((ra - (n - eps)) / eps, 0.0, 1.0)
    bridge_hi = (n - eps) + eps * t2 * (1.0 + t2 - t2**2)

    out = np.select(
        [ra <= lo, ra < lo + eps, ra <= n - eps, ra < n],
        [lo, bridge_lo, ra, bridge_hi],
        default=float(n),
    )
    return _scalar_like(r, out)


def theta_n_deriv(tp: TruncationParams, r) -> float | np.ndarray:
    """Analytic derivative of theta_n (0 on the flats, 1 on the band,
    t(4-3t) and (1-t)(1+3t) on the lower/upper bridges; both peak at 4/3)."""
    ra = _check_r(r)
    n, eps = tp.n, tp.epsilon
    lo = 1.0 / n
    t1 = np.clip((ra - lo) / eps, 0.0, 1.0)
    t2 = np.clip((ra - (n - eps)) / eps, 0.0, 1.0)
    out = np.select(
        [ra <= lo, ra < lo + eps, ra <= n - eps, ra < n],
        [0.0, t1 * (4.0 - 3.0 * t1), 1.0, (1.0 - t2) * (1.0 + 3.0 * t2)],
        default=0.0,
    )
    return _scalar_like(r, out)


def rho_n(tp: TruncationParams, x) -> float | np.ndarray:
    """Odd extension theta_n(|x|) * sgn(x); zero at zero, |rho_n| <= n."""
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("truncation argument must be finite")
    out = theta_n(tp, np.abs(xa)) * np.sign(xa)
    return _scalar_like(x, out)


def _require_gm(model: Model):
    if model.kind == "pkm":
        raise ValueError("band truncation is defined for the variable-exponent model only")


def truncated_drift(tp: TruncationParams, model: Model, x) -> float | np.ndarray:
    """kappa * (theta - rho_n(x)); defined and Lipschitz on all of R."""
    _require_gm(model)
    return _scalar_like(x, model.params.kappa * (model.params.theta - rho_n(tp, x)))


def truncated_diffusion(tp: TruncationParams, model: Model, x) -> float | np.ndarray:
    """xi * rho_n(x)**p(rho_n(x)) for x >= 0.

    Negative inputs are rejected: the exponent is only defined on
    nonnegative states and a fractional power of a negative base has no
    principled value here. Solvers that need a globally defined
    diffusion clamp the state to the band floor first (the map is
    constant on (0, 1/n], so that clamp is a continuous extension).
    """
    _require_gm(model)
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("truncation argument must be finite")
    if np.any(xa < 0.0):
        raise ValueError("truncated diffusion requires x >= 0")
    z = theta_n(tp, xa)
    z = np.where(xa == 0.0, 0.0, z)  # rho_n(0) = 0
    _, g = coefficients(model)
    return _scalar_like(x, g(z))


@dataclass(frozen=True)
class LipschitzReport:
    """Closed-form Lipschitz constants of the truncated coefficients.

    L_n bounds the radial truncation (1 + n * sup|phi'| with
    phi(r) = theta_n(r)/r measured on [1/n, n]); C_n bounds the
    derivative of z -> z**p(z) on [1/n, n]; the drift and diffusion
    constants follow as kappa*L_n and xi*L_n*C_n. The empirical
    quotient is the largest observed difference quotient of the
    truncated diffusion over random pairs in the band.
    """

    n: int
    epsilon: float
    L_n: float
    C_n: float
    Lf_n: float
    Lg_n: float
    Lhat_n: float
    empirical_sup_quotient: float
    phi_deriv_sup: float
    p_deriv_sup: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "L_n": self.L_n,
            "C_n": self.C_n,
            "Lf_n": self.Lf_n,
            "Lg_n": self.Lg_n,
            "Lhat_n": self.Lhat_n,
            "empirical_sup_quotient": self.empirical_sup_quotient,
        }


def _phi_deriv_sup(tp: TruncationParams, n_grid: int = 10_000) -> float:
    """Numerical sup of |phi'| on [1/n, n], phi(r) = theta_n(r)/r.

    Dense log grid plus linear refinement of the two gap intervals,
    where the bridge makes phi' largest.
    """
    n, eps = tp.n, tp.epsilon
    lo = 1.0 / n
    grids = [
        np.geomspace(lo, n, n_grid),
        np.linspace(lo, lo + eps, 2001),
        np.linspace(n - eps, n, 2001),
    ]
    r = np.concatenate(grids)
    th = np.asarray(theta_n(tp, r))
    dth = np.asarray(theta_n_deriv(tp, r))
    phi_prime = (dth * r - th) / r**2
    return float(np.max(np.abs(phi_prime)))


def _p_deriv_sup(fn: ExponentFunction, tp: TruncationParams, n_grid: int = 10_000) -> float:
    """Numerical sup of |p'| on [1/n, n] (where the mean-value bound is applied)."""
    grid = np.geomspace(1.0 / tp.n, tp.n, n_grid)
    return float(np.max(np.abs(np.asarray(fn.deriv(grid), dtype=float))))


def lipschitz_constants(
    tp: TruncationParams,
    model: Model,
    n_pairs: int = 10_000,
    pair_seed: int = 0,
) -> LipschitzReport:
    """Compute the closed-form constants and an empirical cross-check."""
    _require_gm(model)
    kappa, xi = model.params.kappa, model.params.xi
    exp_fn = model.effective_exponent
    n = tp.n

    p_plus = exp_fn.declared_pplus
    dp_sup = _p_deriv_sup(exp_fn, tp)
    C_n = n**p_plus * (n * p_plus + dp_sup * math.log(n))

    phi_sup = _phi_deriv_sup(tp)
    L_n = 1.0 + n * phi_sup
    Lf_n = kappa * L_n
    Lg_n = xi * L_n * C_n
    Lhat_n = max(Lf_n**2, Lg_n**2)

    rng = np.random.default_rng(pair_seed)
    x = rng.uniform(1.0 / n, n, size=n_pairs)
    y = rng.uniform(1.0 / n, n, size=n_pairs)
    keep = x != y
    x, y = x[keep], y[keep]
    gx = np.asarray(truncated_diffusion(tp, model, x))
    gy = np.asarray(truncated_diffusion(tp, model, y))
    empirical = float(np.max(np.abs(gx - gy) / np.abs(x - y)))

    return LipschitzReport(
        n=n,
        epsilon=tp.epsilon,
        L_n=L_n,
        C_n=C_n,
        Lf_n=Lf_n,
        Lg_n=Lg_n,
        Lhat_n=Lhat_n,
        empirical_sup_quotient=empirical,
        phi_deriv_sup=phi_sup,
        p_deriv_sup=dp_sup,
    )
