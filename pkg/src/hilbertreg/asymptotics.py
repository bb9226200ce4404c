"""Closed-form large-sample predictions and their quadrature building blocks.

Every quantity the Monte Carlo harness estimates has a closed-form
asymptotic equivalent computed here:

* weight moments ``E[w^beta]`` in all three exponent regimes,
* the weight-distribution scale ``W_n`` solving ``W ln(1/W) = 1/n``,
* the expected-Lagrange-function limit ``1/(1+Z)`` and its scale ``Z``,
* variance, bias, regression-risk and classification-risk rates,
* the extrapolation limit outside the support and the ``rho(x) = 0`` bias
  limit, both ratios of singular integrals.

The singular integrals ``kappa_beta``, ``kappa`` and ``lambda_weight`` share
one radial-angular quadrature: the domain is split at the singular point and
the radial direction is integrated in ``r = exp(s)``, which turns an
integrable power singularity into a smooth exponentially-decaying integrand.
In one dimension the two radial directions are summed before integrating,
so odd singular parts cancel pointwise.  Dimensions 1 and 2 use
deterministic adaptive quadrature; d >= 3 falls back to Monte Carlo with a
reported standard error.

Densities enter through a small structural interface: ``dim``, ``pdf``,
``sample``, ``classify_location``, ``max_radius`` and ``radial_breakpoints``
(see :mod:`hilbertreg.densities`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

__all__ = [
    "ScaleWn",
    "AsymptoticPrediction",
    "QuadratureError",
    "DivergenceError",
    "unit_ball_volume",
    "solve_wn",
    "kappa_beta",
    "kappa",
    "lambda_weight",
    "predict_moment",
    "predict_variance",
    "predict_bias",
    "predict_regression_risk",
    "predict_classification_bound",
    "lagrange_prediction",
    "lagrange_scale_Z",
    "extrapolation_limit",
    "rho_zero_limit",
    "scaling_pdf",
    "scaling_cdf",
    "predict_exceedance",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested accuracy."""


class DivergenceError(ValueError):
    """The requested integral or prediction is infinite in this regime."""


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in d dimensions, pi^(d/2) / Gamma(d/2 + 1)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return math.exp(0.5 * d * math.log(math.pi) - gammaln(0.5 * d + 1.0))


# ---------------------------------------------------------------------------
# Scale of the weight distribution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaleWn:
    """Root of ``W ln(1/W) = 1/n`` with its two explicit approximations.

    ``first_order = 1/(n ln n)`` and ``second_order = 1/(n ln(n ln n))``.
    Numerically the exact root sits below both, with ``second_order`` the
    closer of the two.
    """

    n: int
    exact: float
    first_order: float
    second_order: float

    @property
    def residual(self) -> float:
        return abs(self.exact * math.log(1.0 / self.exact) - 1.0 / self.n) * self.n


def solve_wn(n: int, max_iter: int = 100, rel_tol: float = 1e-14) -> ScaleWn:
    """Newton solve of ``W ln(1/W) = 1/n`` on (0, 1/e).

    Starts from the second-order approximation; ``g`` is smooth and strictly
    increasing on the bracket so a handful of damped Newton steps converge
    far below the 1e-14 relative-residual contract.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    target = 1.0 / n
    w = 1.0 / (n * math.log(n * math.log(n)))
    hi = math.exp(-1.0) * (1.0 - 1e-12)
    for _ in range(max_iter):
        g = w * math.log(1.0 / w) - target
        if abs(g) <= rel_tol * target:
            break
        dg = math.log(1.0 / w) - 1.0
        w = min(max(w - g / dg, 1e-308), hi)
    else:
        raise QuadratureError(f"W_n Newton iteration did not converge for n={n}")
    return ScaleWn(
        n=n,
        exact=w,
        first_order=1.0 / (n * math.log(n)),
        second_order=1.0 / (n * math.log(n * math.log(n))),
    )


# ---------------------------------------------------------------------------
# Singular quadrature
# ---------------------------------------------------------------------------

_MC_SAMPLES = 1_000_000
_MC_SEED = 20240917


def _angular_factor(density, x: np.ndarray, g, r: float, epsabs: float) -> float:
    """Integral over directions of ``rho(x + r u) g(x + r u)``.

    d = 1 sums the two directions (this is the symmetric-pair evaluation
    that cancels odd singular parts); d = 2 integrates over the circle.
    """
    d = density.dim
    if d == 1:
        total = 0.0
        for u in (1.0, -1.0):
            y = x + r * u
            rho = float(density.pdf(y))
            if rho != 0.0:
                total += rho * (float(g(y)) if g is not None else 1.0)
        return total

    def theta_integrand(theta: float) -> float:
        y = x + r * np.array([math.cos(theta), math.sin(theta)])
        rho = float(density.pdf(y))
        if rho == 0.0:
            return 0.0
        return rho * (float(g(y)) if g is not None else 1.0)

    val, _ = quad(theta_integrand, 0.0, 2.0 * math.pi, limit=200, epsabs=epsabs, epsrel=1e-10)
    return val


def _singular_integral(
    density,
    x: np.ndarray,
    power: float,
    g=None,
    low_power: float = 1.0,
    epsabs: float = 1e-9,
) -> float:
    """``integral rho(x+y) g(x+y) ||y||^-power d^dy`` for d in {1, 2}.

    ``low_power`` is a lower bound on the exponent q such that the radial
    integrand behaves like r^(q-1) near 0; it fixes where the log-substituted
    integral may be truncated with relative error below e^-40.
    """
    d = density.dim
    if d > 2:
        value, _ = _singular_integral_mc(density, x, power, g)
        return value
    if low_power <= 0:
        raise DivergenceError(f"radial integrand power {low_power} <= 0 does not converge")

    tail_mass = 1e-20 if power < 0 else 1e-13
    r_max = float(density.max_radius(x, tail_mass))
    if r_max <= 0.0:
        return 0.0
    inner_eps = epsabs * 1e-3

    def h(s: float) -> float:
        r = math.exp(s)
        ang = _angular_factor(density, x, g, r, inner_eps)
        if ang == 0.0:
            return 0.0
        return ang * math.exp(s * (d - power)) if d - power != 0.0 else ang

    s_hi = math.log(r_max)
    s_lo = max(s_hi - max(40.0, 40.0 / low_power), -690.0)
    pts = sorted(
        math.log(b)
        for b in density.radial_breakpoints(x)
        if math.exp(s_lo) < b < r_max
    )
    value, err = quad(
        h, s_lo, s_hi, points=pts or None, limit=400, epsabs=epsabs * 0.5, epsrel=1e-10
    )
    if err > max(epsabs, 1e-7 * abs(value)):
        raise QuadratureError(
            f"singular quadrature error estimate {err:.3e} exceeds target {epsabs:.1e} "
            f"(value {value:.6e}, power {power}, d={d})"
        )
    return float(value)


def _singular_integral_mc(
    density, x: np.ndarray, power: float, g=None, n_samples: int = _MC_SAMPLES, seed: int = _MC_SEED
) -> tuple[float, float]:
    """Monte Carlo fallback for d >= 3: mean of g(Y) ||Y - x||^-power, Y ~ rho.

    Returns (value, stderr).  The stderr is only meaningful when the
    integrand is square-integrable (power < d/2 relative singularities).
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    y = density.sample(n_samples, rng)
    r = np.linalg.norm(y - np.asarray(x, dtype=float)[None, :], axis=1)
    vals = r ** (-power)
    if g is not None:
        vals = vals * np.asarray(g(y), dtype=float)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_samples))


def kappa_beta(x, density, beta: float, epsabs: float = 1e-9) -> float:
    """``integral rho(x+y) ||y||^(-beta d) d^dy`` for -1 < beta < 1, beta != 0.

    For 0 < beta < 1 the singularity at 0 is integrable; for negative beta
    the kernel is a positive power and only the density's tail matters.
    """
    if not -1.0 < beta < 1.0 or beta == 0.0:
        raise ValueError(f"beta must be in (-1, 0) or (0, 1), got {beta}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = density.dim
    return _singular_integral(
        density, x, power=beta * d, low_power=d * (1.0 - beta), epsabs=epsabs
    )


def kappa(x, density, target, epsabs: float = 1e-7) -> float:
    """``integral rho(x+y) (f(x+y) - f(x)) ||y||^-d d^dy``.

    Integrable because the catalogued targets are locally Hoelder; the
    paired directional evaluation cancels the odd part of the integrand
    before the radial integration sees it.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    fx = float(target(x))

    def g(y):
        return float(target(y)) - fx

    return _singular_integral(density, x, power=density.dim, g=g, low_power=1.0, epsabs=epsabs)


def lambda_weight(x, density, epsabs: float = 1e-9) -> float:
    """``integral rho(x+y) ||y||^-d d^dy``; finite only when ``rho(x) = 0``.

    Raises :class:`DivergenceError` when the density is positive at ``x``
    (the integral is then logarithmically divergent).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if float(density.pdf(x)) > 0.0:
        raise DivergenceError("lambda(x) diverges where the density is positive")
    return _singular_integral(density, x, power=density.dim, low_power=1.0, epsabs=epsabs)


# ---------------------------------------------------------------------------
# Theorem-level predictions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticPrediction:
    quantity: str
    value: float
    validity_note: str = ""
    extras: dict = field(default_factory=dict)


def predict_moment(beta: float, n: int, x, density) -> AsymptoticPrediction:
    """Large-n equivalent of ``E[w_0(x)^beta]`` at a point with rho(x) > 0.

    beta > 1 is universal, ``1/((beta-1) n ln n)``; 0 < beta < 1 depends on
    the local geometry through ``kappa_beta``; -1 < beta < 0 uses the same
    formula but is flagged as a conjecture; beta <= -1 moments are infinite.
    beta = 1 returns the exact identity ``1/(n+1)`` rather than an
    asymptotic equivalent.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    if beta == 0.0:
        raise ValueError("beta = 0 gives the trivial moment 1; no prediction defined")
    if beta == 1.0:
        return AsymptoticPrediction(
            quantity="moment", value=1.0 / (n + 1), validity_note="exact: E[w] = 1/(n+1)"
        )
    if beta <= -1.0:
        return AsymptoticPrediction(
            quantity="moment",
            value=math.inf,
            validity_note="moments of order beta <= -1 are infinite",
        )
    if beta > 1.0:
        return AsymptoticPrediction(
            quantity="moment", value=1.0 / ((beta - 1.0) * n * math.log(n))
        )

    x = np.atleast_1d(np.asarray(x, dtype=float))
    rho = float(density.pdf(x))
    if rho <= 0.0:
        raise ValueError("moment prediction requires rho(x) > 0")
    kb = kappa_beta(x, density, beta)
    vd = unit_ball_volume(density.dim)
    value = kb / (vd * rho * n * math.log(n)) ** beta
    note = "conjectured equivalent (unproven for -1 < beta < 0)" if beta < 0 else ""
    return AsymptoticPrediction(
        quantity="moment", value=value, validity_note=note, extras={"kappa_beta": kb}
    )


def predict_variance(x, n: int, noise, density, target=None) -> AsymptoticPrediction:
    """Variance-term equivalent ``sigma^2(x) / ln n``."""
    sigma2 = float(noise.sigma2(x, target))
    if sigma2 == 0.0:
        return AsymptoticPrediction(
            quantity="variance",
            value=0.0,
            validity_note="sigma(x) = 0: only the o(1/ln n) upper-bound regime applies",
        )
    return AsymptoticPrediction(quantity="variance", value=sigma2 / math.log(n))


def predict_bias(x, n: int, density, target) -> AsymptoticPrediction:
    """Mean-shift equivalent ``kappa(x) / (omega_x V_d rho(x) ln n)``.

    ``extras`` carries kappa and the squared-bias prediction.  When kappa
    vanishes within the quadrature noise floor the value is 0 and the note
    records that only order-of-magnitude higher-order rates apply.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rho = float(density.pdf(x))
    if rho <= 0.0:
        raise ValueError("bias prediction requires rho(x) > 0; see rho_zero_limit")
    k = kappa(x, density, target)
    fx = float(target(x))
    if abs(k) < 1e-7 * (1.0 + abs(fx)):
        return AsymptoticPrediction(
            quantity="bias",
            value=0.0,
            validity_note="kappa(x) = 0 (non-generic): bias is higher order in 1/ln n",
            extras={"kappa": k, "squared_bias": 0.0},
        )
    loc = density.classify_location(x)
    omega = loc.solid_angle if loc.solid_angle is not None else 1.0
    shift = k / (omega * unit_ball_volume(density.dim) * rho * math.log(n))
    return AsymptoticPrediction(
        quantity="bias",
        value=shift,
        extras={"kappa": k, "squared_bias": shift * shift, "solid_angle": omega},
    )


def predict_regression_risk(x, n: int, density, target, noise) -> AsymptoticPrediction:
    """Excess-risk equivalent: variance plus squared bias, led by sigma^2/ln n."""
    var = predict_variance(x, n, noise, density, target)
    bias = predict_bias(x, n, density, target)
    sq = bias.extras.get("squared_bias", bias.value**2)
    return AsymptoticPrediction(
        quantity="regression_risk",
        value=var.value + sq,
        extras={"variance": var.value, "squared_bias": sq, "mean_shift": bias.value},
    )


def predict_classification_bound(
    x, n: int, alpha: float, target, noise, epsilon: float = 0.0
) -> AsymptoticPrediction:
    """Upper bound on the plugin classifier's excess risk.

    alpha = 1 gives ``2 (1+eps) sigma(x) / sqrt(ln n)``; alpha in (0, 1)
    gives ``2 |f - 1/2|^(1-alpha) (1+eps)^alpha sigma^alpha (ln n)^(-alpha/2)``,
    which vanishes at f(x) = 1/2.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    fx = float(target(np.atleast_1d(np.asarray(x, dtype=float))))
    if not 0.0 <= fx <= 1.0:
        raise ValueError("classification requires target values in [0, 1]")
    sigma = math.sqrt(float(noise.sigma2(x, target)))
    ln_n = math.log(n)
    if alpha == 1.0:
        value = 2.0 * (1.0 + epsilon) * sigma / math.sqrt(ln_n)
    else:
        value = (
            2.0
            * abs(fx - 0.5) ** (1.0 - alpha)
            * (1.0 + epsilon) ** alpha
            * sigma**alpha
            * ln_n ** (-0.5 * alpha)
        )
    return AsymptoticPrediction(quantity="classification_bound", value=value)


def lagrange_prediction(Z: float) -> float:
    """Scaling limit of the expected Lagrange function, ``1/(1+Z)``."""
    if Z < 0:
        raise ValueError("Z must be nonnegative")
    return 1.0 / (1.0 + Z)


def lagrange_scale_Z(x, x0, n: int, density, mode: str = "implicit_wn") -> float:
    """Scaling variable ``V_d rho(x) ||x - x0||^d * s_n``.

    ``mode="theorem"`` uses ``s_n = n ln n``; ``mode="implicit_wn"`` uses
    ``s_n = 1/W_n`` with the exact root, the better finite-n choice.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    rho = float(density.pdf(x))
    if rho <= 0.0:
        raise ValueError("Lagrange scaling requires rho(x) > 0")
    base = unit_ball_volume(density.dim) * rho * float(np.linalg.norm(x - x0)) ** density.dim
    if mode == "theorem":
        return base * n * math.log(n)
    if mode == "implicit_wn":
        return base / solve_wn(n).exact
    raise ValueError(f"unknown mode {mode!r}")


def extrapolation_limit(x, density, target, epsabs: float = 1e-8) -> float:
    """Large-n mean of the estimator strictly outside the closed support.

    The ratio of the f-weighted to the unweighted inverse-distance integral
    of the density; both integrands are smooth because the query is at a
    positive distance from the support.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    loc = density.classify_location(x)
    if loc.location_class != "exterior":
        raise ValueError("extrapolation limit requires a query strictly outside the support")

    den = _singular_integral(density, x, power=density.dim, low_power=1.0, epsabs=epsabs)
    num = _singular_integral(
        density, x, power=density.dim, g=lambda y: float(target(y)), low_power=1.0, epsabs=epsabs
    )
    return num / den


def rho_zero_limit(x, density, target) -> float:
    """Limit bias ``kappa(x)/lambda(x)`` at a support point where rho vanishes."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if float(density.pdf(x)) > 0.0:
        raise ValueError("rho_zero_limit requires rho(x) = 0")
    return kappa(x, density, target) / lambda_weight(x, density)


def scaling_pdf(w):
    """Model density ``1/(1+w)^2`` of the scaled weight w = W/W_n."""
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ValueError("scaled weight must be nonnegative")
    out = 1.0 / (1.0 + w) ** 2
    return float(out) if out.ndim == 0 else out


def scaling_cdf(w):
    """CDF ``w/(1+w)`` of the model scaled-weight density."""
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ValueError("scaled weight must be nonnegative")
    out = w / (1.0 + w)
    return float(out) if out.ndim == 0 else out


def predict_exceedance(
    epsilon: float, n: int, chebyshev_delta: float = 0.0
) -> AsymptoticPrediction:
    """Heuristic tail probability ``P(w_0 > eps) ~ (1-eps)/(eps n ln n)``.

    ``extras`` carries the two rigorous ceilings: the Chebyshev bound
    ``(1+delta)/(eps^2 n ln n)`` (valid for n past an unknown constant) and
    the always-valid Markov bound ``1/(eps n)``.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must be in (0, 1)")
    if n < 3:
        raise ValueError("n must be >= 3")
    ln_n = math.log(n)
    return AsymptoticPrediction(
        quantity="exceedance",
        value=(1.0 - epsilon) / (epsilon * n * ln_n),
        extras={
            "chebyshev": (1.0 + chebyshev_delta) / (epsilon**2 * n * ln_n),
            "markov": 1.0 / (epsilon * n),
        },
    )
