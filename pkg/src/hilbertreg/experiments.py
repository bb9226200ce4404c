"""Seeded, replicated Monte Carlo estimation of every predicted quantity.

Each experiment draws ``replicates`` independent datasets, computes the
empirical counterpart of a closed-form prediction (weight moments, tail
exceedance, the averaged Lagrange function, variance and bias terms,
regression and classification excess risk, extrapolation means), and pairs
the two into :class:`EstimateRecord` rows.

Replicate ``r`` always uses the stream ``replicate_stream(master_seed, r)``
and results are reduced in replicate order, so output is bit-identical for
a fixed spec regardless of thread count.  Within one run the same replicate
streams are reused across the ``n`` grid and across query points (common
random numbers), which stabilizes trend comparisons without biasing any
single cell.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import asymptotics
from .densities import BernoulliFromTarget, RadialHeavyTail, replicate_stream
from .geometry import Dataset, weights_on_grid

__all__ = [
    "ExperimentSpec",
    "EstimateRecord",
    "Histogram",
    "WeightDistributionResult",
    "mc_stderr",
    "log_binned_histogram",
    "fit_loglog_slope",
    "cdf_sup_distance",
    "run_moments",
    "run_exceedance",
    "run_weight_distribution",
    "run_lagrange",
    "run_variance_bias",
    "run_regression_risk",
    "run_classification",
    "run_extrapolation",
]

KINDS = (
    "demo",
    "moments",
    "weight_distribution",
    "exceedance",
    "lagrange",
    "variance_bias",
    "regression_risk",
    "classification",
    "extrapolation",
)


@dataclass
class ExperimentSpec:
    """Declarative description of one Monte Carlo experiment."""

    kind: str
    density: object
    target: object
    noise: object
    n_grid: Sequence[int]
    replicates: int
    query_points: object = None  # array-like (Q, d)
    beta_list: Sequence[float] = ()
    epsilon_list: Sequence[float] = ()
    hold_point: object = None  # lagrange only
    lagrange_grid: object = None  # lagrange only
    master_seed: int = 0
    weight_scale_mode: str = "second_order"  # weight_distribution: W_n choice
    lagrange_mode: str = "implicit_wn"  # lagrange: Z choice
    estimator_mode: str = "all_weights"  # moments/exceedance: statistic over all weights or w_0 only
    all_weights: bool = False  # weight_distribution: histogram all n+1 weights
    threads: int = 1
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.query_points is not None:
            q = np.asarray(self.query_points, dtype=float)
            if q.ndim == 1:
                q = q[:, None]
            self.query_points = q
        if self.hold_point is not None:
            self.hold_point = np.atleast_1d(np.asarray(self.hold_point, dtype=float))
        if self.lagrange_grid is not None:
            g = np.asarray(self.lagrange_grid, dtype=float)
            if g.ndim == 1:
                g = g[:, None]
            self.lagrange_grid = g
        self.n_grid = [int(n) for n in self.n_grid]
        self.validate()

    def validate(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if not self.n_grid:
            raise ValueError("n_grid must be non-empty")
        if any(n < 3 for n in self.n_grid):
            raise ValueError("every n must be >= 3")
        if any(b > a for a, b in zip(self.n_grid[1:], self.n_grid[:-1])):
            raise ValueError("n_grid must be ascending")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.weight_scale_mode not in ("second_order", "exact"):
            raise ValueError("weight_scale_mode must be 'second_order' or 'exact'")
        if self.lagrange_mode not in ("implicit_wn", "theorem"):
            raise ValueError("lagrange_mode must be 'implicit_wn' or 'theorem'")
        if self.estimator_mode not in ("all_weights", "index0"):
            raise ValueError("estimator_mode must be 'all_weights' or 'index0'")

        if self.kind in ("moments", "exceedance", "variance_bias", "regression_risk",
                         "classification", "extrapolation", "weight_distribution"):
            if self.query_points is None or len(self.query_points) == 0:
                raise ValueError(f"{self.kind} needs at least one query point")
            if self.query_points.shape[1] != self.density.dim:
                raise ValueError("query dimension does not match the density")
        if self.kind == "moments":
            if not self.beta_list:
                raise ValueError("moments needs a beta_list")
            for b in self.beta_list:
                if b <= -1.0 or b == 0.0:
                    raise ValueError(f"beta {b} outside (-1,0) u (0,inf)")
            self._require_positive_density()
        if self.kind == "exceedance":
            if not self.epsilon_list:
                raise ValueError("exceedance needs an epsilon_list")
            if any(not 0.0 < e < 1.0 for e in self.epsilon_list):
                raise ValueError("epsilons must lie in (0, 1)")
            self._require_positive_density()
        if self.kind == "lagrange":
            if self.hold_point is None or self.lagrange_grid is None:
                raise ValueError("lagrange needs hold_point and lagrange_grid")
            for x in self.lagrange_grid:
                if float(self.density.pdf(x)) <= 0.0:
                    raise ValueError("lagrange grid must lie where the density is positive")
        if self.kind == "extrapolation":
            for x in self.query_points:
                if self.density.classify_location(x).location_class != "exterior":
                    raise ValueError(f"extrapolation query {x} is not outside the support")
        if self.kind in ("regression_risk", "classification"):
            self._require_positive_density()
        if self.kind == "classification" and not isinstance(self.noise, BernoulliFromTarget):
            raise ValueError("classification requires BernoulliFromTarget noise")

    def _require_positive_density(self):
        for x in self.query_points:
            if float(self.density.pdf(x)) <= 0.0:
                raise ValueError(f"query {x} needs rho(x) > 0 for kind {self.kind!r}")


@dataclass(frozen=True)
class EstimateRecord:
    """One (n, query, quantity) cell: MC estimate next to its prediction."""

    kind: str
    n: int
    query: tuple
    quantity: str
    mc_mean: float
    mc_stderr: float
    prediction: Optional[float]
    ratio: Optional[float]
    replicates_used: int
    seed: int


def _make_record(spec, n, query, quantity, mc_mean, se, prediction) -> EstimateRecord:
    ratio = None
    if prediction is not None and prediction != 0.0 and math.isfinite(prediction):
        ratio = mc_mean / prediction
    return EstimateRecord(
        kind=spec.kind,
        n=n,
        query=tuple(float(v) for v in np.atleast_1d(query)),
        quantity=quantity,
        mc_mean=float(mc_mean),
        mc_stderr=float(se),
        prediction=None if prediction is None else float(prediction),
        ratio=ratio,
        replicates_used=spec.replicates,
        seed=spec.master_seed,
    )


# ---------------------------------------------------------------------------
# Replicate machinery and statistics helpers
# ---------------------------------------------------------------------------


def _run_replicates(worker: Callable, replicates: int, master_seed: int, threads: int = 1) -> np.ndarray:
    """Stack ``worker(rng_r)`` over replicates; row r uses stream (seed, r).

    The result is independent of ``threads`` because streams are keyed by
    replicate index and rows are assembled in index order.
    """

    def one(r: int) -> np.ndarray:
        return np.atleast_1d(np.asarray(worker(replicate_stream(master_seed, r)), dtype=float))

    if threads <= 1:
        rows = [one(r) for r in range(replicates)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(one, range(replicates)))
    return np.vstack(rows)


def mc_stderr(samples) -> float:
    """Standard error of the mean; zero for constant or single samples."""
    a = np.asarray(samples, dtype=float)
    if a.size < 2:
        return 0.0
    return float(a.std(ddof=1) / math.sqrt(a.size))


def _point_weights(points: np.ndarray, query: np.ndarray, exponent: float) -> np.ndarray:
    diff = points - query[None, :]
    dists = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    np.maximum(dists, 1e-300, out=dists)
    s = np.log(dists)
    s *= -exponent
    s -= s.max()
    w = np.exp(s)
    w /= w.sum()
    return w


@dataclass(frozen=True)
class Histogram:
    """Counts over geometric (log-spaced) bins."""

    edges: np.ndarray  # (B+1,)
    counts: np.ndarray  # (B,)

    @property
    def centers(self) -> np.ndarray:
        return np.sqrt(self.edges[:-1] * self.edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def densities(self) -> np.ndarray:
        total = self.counts.sum()
        return self.counts / (total * self.widths)


def log_binned_histogram(values, decades=None, bins_per_decade: int = 8) -> Histogram:
    """Histogram positive values on log-spaced bins covering all of them.

    ``decades`` is an optional (lo, hi) pair of base-10 exponents; by
    default it is widened to the data so the total count is conserved.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0 or np.any(v <= 0.0) or not np.all(np.isfinite(v)):
        raise ValueError("values must be positive and finite")
    if decades is None:
        lo = math.floor(math.log10(v.min()))
        hi = math.ceil(math.log10(v.max()))
        if hi == lo:
            hi += 1
    else:
        lo, hi = decades
        if v.min() < 10.0**lo or v.max() > 10.0**hi:
            raise ValueError("given decade range does not cover all values")
    n_bins = int(round((hi - lo) * bins_per_decade))
    edges = np.logspace(lo, hi, n_bins + 1)
    counts, _ = np.histogram(v, bins=edges)
    return Histogram(edges=edges, counts=counts)


def fit_loglog_slope(hist: Histogram, window: tuple = (10.0, 1e3)) -> tuple[float, float]:
    """Least-squares slope of log10(density) vs log10(center) inside ``window``.

    Returns (slope, stderr) with the stderr taken from the fit residuals.
    Requires at least three nonempty bins in the window.
    """
    centers = hist.centers
    dens = hist.densities()
    mask = (centers >= window[0]) & (centers <= window[1]) & (hist.counts > 0)
    if mask.sum() < 3:
        raise ValueError(
            f"only {int(mask.sum())} nonempty bins in window {window}; "
            "raise the replicate count for a usable tail fit"
        )
    x = np.log10(centers[mask])
    y = np.log10(dens[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    m = x.size
    sxx = float(((x - x.mean()) ** 2).sum())
    stderr = math.sqrt(float((resid**2).sum()) / (m - 2) / sxx) if m > 2 else 0.0
    return float(slope), stderr


def cdf_sup_distance(samples, cdf: Callable) -> float:
    """Kolmogorov-Smirnov sup distance between sample ECDF and a model CDF."""
    s = np.sort(np.asarray(samples, dtype=float))
    m = s.size
    f = np.asarray(cdf(s), dtype=float)
    i = np.arange(m)
    return float(np.maximum(np.abs(f - i / m), np.abs(f - (i + 1) / m)).max())


# ---------------------------------------------------------------------------
# Weight-level experiments
# ---------------------------------------------------------------------------


def _weight_statistics(spec: ExperimentSpec, n: int, query: np.ndarray, fns) -> np.ndarray:
    """Per-replicate statistics of the weight vector at ``query``, one column per fn."""
    density = spec.density
    exponent = float(density.dim)

    def worker(rng):
        pts = density.sample(n + 1, rng)
        w = _point_weights(pts, query, exponent)
        return [fn(w) for fn in fns]

    return _run_replicates(worker, spec.replicates, spec.master_seed, spec.threads)


def _moment_stat(beta: float, index0: bool):
    # max() keeps a fully underflowed weight from turning a negative power
    # into inf; E[w^beta] is finite for beta > -1.
    if index0:
        if beta >= 0:
            return lambda w: w[0] ** beta
        return lambda w: max(w[0], 1e-300) ** beta
    if beta >= 0:
        return lambda w: float(np.mean(w**beta))
    return lambda w: float(np.mean(np.maximum(w, 1e-300) ** beta))


def run_moments(spec: ExperimentSpec) -> list[EstimateRecord]:
    """Empirical E[w_0^beta(x)] against the moment predictions.

    By exchangeability ``mean_i w_i(x)^beta`` is unbiased for
    ``E[w_0^beta(x)]``; averaging over all n+1 weights per replicate
    (the default ``estimator_mode="all_weights"``) cuts the variance by
    roughly a factor n, which is what makes the higher moments estimable
    at desk scale.  ``estimator_mode="index0"`` keeps the literal
    single-weight protocol.  All betas of one cell reuse the same replicate
    weights (common random numbers); beta = 1 is paired with the exact
    identity 1/(n+1).
    """
    records = []
    index0 = spec.estimator_mode == "index0"
    fns = [_moment_stat(beta, index0) for beta in spec.beta_list]
    for n in spec.n_grid:
        for x in spec.query_points:
            stats = _weight_statistics(spec, n, x, fns)
            for bi, beta in enumerate(spec.beta_list):
                vals = stats[:, bi]
                pred = asymptotics.predict_moment(beta, n, x, spec.density).value
                records.append(
                    _make_record(
                        spec, n, x, f"moment[beta={beta:g}]",
                        vals.mean(), mc_stderr(vals), pred,
                    )
                )
    return records


def run_exceedance(spec: ExperimentSpec) -> list[EstimateRecord]:
    """Empirical P(w_0 > eps) against the heuristic tail estimate.

    With ``estimator_mode="all_weights"`` the per-replicate statistic is the
    fraction of the n+1 weights above eps, unbiased for the same tail
    probability by exchangeability.  The rigorous Chebyshev/Markov ceilings
    are recomputable from :func:`hilbertreg.asymptotics.predict_exceedance`.
    """
    records = []
    index0 = spec.estimator_mode == "index0"
    if index0:
        fns = [lambda w, e=eps: float(w[0] > e) for eps in spec.epsilon_list]
    else:
        fns = [lambda w, e=eps: float(np.mean(w > e)) for eps in spec.epsilon_list]
    for n in spec.n_grid:
        for x in spec.query_points:
            stats = _weight_statistics(spec, n, x, fns)
            for ei, eps in enumerate(spec.epsilon_list):
                vals = stats[:, ei]
                pred = asymptotics.predict_exceedance(eps, n).value
                records.append(
                    _make_record(
                        spec, n, x, f"exceedance[eps={eps:g}]",
                        vals.mean(), mc_stderr(vals), pred,
                    )
                )
    return records


@dataclass(frozen=True)
class WeightDistributionResult:
    """Scaled-weight histogram with its tail fit and CDF distance."""

    n: int
    replicates: int
    scale_mode: str
    scale_value: float
    histogram: Histogram
    tail_slope: float
    tail_slope_stderr: float
    cdf_sup_distance: float
    records: list = field(default_factory=list)


def run_weight_distribution(spec: ExperimentSpec, fit_window=(10.0, 1e3)) -> list[WeightDistributionResult]:
    """Distribution of the scaled weight w = w_0(x) / W_n.

    By default one weight per replicate is histogrammed; ``all_weights``
    histograms the full weight vector of each replicate (correlated samples,
    flagged in the quantity label).  For the radial heavy-tail density the
    weights are formed directly from the radial inverse-CDF transform.
    """
    results = []
    density = spec.density
    radial = isinstance(density, RadialHeavyTail)
    for n in spec.n_grid:
        wn = asymptotics.solve_wn(n)
        scale = wn.second_order if spec.weight_scale_mode == "second_order" else wn.exact
        query = spec.query_points[0]
        exponent = float(density.dim)

        def worker(rng):
            if radial:
                a = rng.random(n + 1)
                np.clip(a, 1e-300, None, out=a)
                inv_rd = (1.0 - a) / a  # r^-d for r = (a/(1-a))^(1/d)
                if spec.all_weights:
                    return inv_rd / inv_rd.sum()
                return inv_rd[0] / inv_rd.sum()
            pts = density.sample(n + 1, rng)
            w = _point_weights(pts, query, exponent)
            return w if spec.all_weights else w[0]

        if spec.all_weights and spec.replicates * (n + 1) > 2 * 10**7:
            raise ValueError("all_weights mode with this many replicate-weights would not fit in memory")
        raw = _run_replicates(worker, spec.replicates, spec.master_seed, spec.threads).ravel()
        scaled = raw / scale
        hist = log_binned_histogram(scaled)
        try:
            slope, slope_se = fit_loglog_slope(hist, window=fit_window)
        except ValueError as exc:
            raise ValueError(f"tail fit failed at n={n}: {exc}") from exc
        sup = cdf_sup_distance(scaled, asymptotics.scaling_cdf)
        label = "all_weights(correlated)" if spec.all_weights else "w0"
        recs = [
            _make_record(spec, n, query, f"tail_slope[{label}]", slope, slope_se, -2.0),
            _make_record(spec, n, query, f"cdf_sup_distance[{label}]", sup, 0.0, None),
        ]
        results.append(
            WeightDistributionResult(
                n=n,
                replicates=spec.replicates,
                scale_mode=spec.weight_scale_mode,
                scale_value=scale,
                histogram=hist,
                tail_slope=slope,
                tail_slope_stderr=slope_se,
                cdf_sup_distance=sup,
                records=recs,
            )
        )
    return results


def run_lagrange(spec: ExperimentSpec) -> list[EstimateRecord]:
    """Averaged Lagrange function of a held point against 1/(1+Z).

    Per replicate the other n points are redrawn, the held point stays
    fixed, and the weight of the held point is evaluated on the query grid.
    """
    records = []
    x0 = spec.hold_point
    grid = spec.lagrange_grid
    density = spec.density
    for n in spec.n_grid:
        def worker(rng):
            pts = density.sample(n, rng)
            all_pts = np.vstack([x0[None, :], pts])
            ds = Dataset(points=all_pts, labels=np.zeros(n + 1))
            return weights_on_grid(grid, ds)[:, 0]

        curves = _run_replicates(worker, spec.replicates, spec.master_seed, spec.threads)
        for j, x in enumerate(grid):
            if np.allclose(x, x0):
                z = 0.0
            else:
                z = asymptotics.lagrange_scale_Z(x, x0, n, density, mode=spec.lagrange_mode)
            pred = asymptotics.lagrange_prediction(z)
            records.append(
                _make_record(
                    spec, n, x, "lagrange", curves[:, j].mean(), mc_stderr(curves[:, j]), pred
                )
            )
    return records


# ---------------------------------------------------------------------------
# Risk-level experiments
# ---------------------------------------------------------------------------


def run_variance_bias(spec: ExperimentSpec) -> list[EstimateRecord]:
    """Variance term, mean shift and squared bias from noiseless labels.

    Per replicate: V-hat = sum_i w_i^2 sigma^2(x_i) with the known noise
    scale, and the mean shift sum_i w_i f(x_i) - f(x).  Queries where the
    density vanishes are paired with the kappa/lambda limit instead of the
    1/ln n bias rate.
    """
    density, target, noise = spec.density, spec.target, spec.noise
    queries = spec.query_points
    exponent = float(density.dim)
    f_at = [float(target(x)) for x in queries]
    records = []
    for n in spec.n_grid:
        def worker(rng):
            pts = density.sample(n + 1, rng)
            fvals = np.asarray(target(pts), dtype=float)
            s2 = noise.sigma2_points(pts, target)
            out = np.empty(2 * len(queries))
            for qi, x in enumerate(queries):
                w = _point_weights(pts, x, exponent)
                out[2 * qi] = float(np.dot(w * w, s2)) if np.ndim(s2) else float(np.dot(w, w)) * float(s2)
                out[2 * qi + 1] = float(np.dot(w, fvals)) - f_at[qi]
            return out

        stats = _run_replicates(worker, spec.replicates, spec.master_seed, spec.threads)
        for qi, x in enumerate(queries):
            vhat = stats[:, 2 * qi]
            shift = stats[:, 2 * qi + 1]
            if float(density.pdf(x)) > 0.0:
                var_pred = asymptotics.predict_variance(x, n, noise, density, target)
                bias_pred = asymptotics.predict_bias(x, n, density, target)
                records.append(
                    _make_record(spec, n, x, "variance", vhat.mean(), mc_stderr(vhat), var_pred.value)
                )
                records.append(
                    _make_record(spec, n, x, "mean_shift", shift.mean(), mc_stderr(shift), bias_pred.value)
                )
                sq = shift**2
                records.append(
                    _make_record(
                        spec, n, x, "squared_bias", sq.mean(), mc_stderr(sq),
                        bias_pred.extras.get("squared_bias", bias_pred.value**2),
                    )
                )
            else:
                limit = asymptotics.rho_zero_limit(x, density, target)
                records.append(
                    _make_record(spec, n, x, "rho_zero_mean_shift", shift.mean(), mc_stderr(shift), limit)
                )
    return records


def run_regression_risk(spec: ExperimentSpec) -> list[EstimateRecord]:
    """MC excess regression risk (f-hat(x) - f(x))^2 with noisy labels.

    Alongside the per-n risk rows, one aggregate row per query reports the
    least-squares slope of 1/risk against ln n, predicted to be 1/sigma^2(x).
    """
    density, target, noise = spec.density, spec.target, spec.noise
    queries = spec.query_points
    exponent = float(density.dim)
    f_at = [float(target(x)) for x in queries]
    records = []
    risks = np.empty((len(spec.n_grid), len(queries)))
    for ni, n in enumerate(spec.n_grid):
        def worker(rng):
            pts = density.sample(n + 1, rng)
            y = noise.sample_labels(rng, pts, target)
            return [
                (float(np.dot(_point_weights(pts, x, exponent), y)) - f_at[qi]) ** 2
                for qi, x in enumerate(queries)
            ]

        stats = _run_replicates(worker, spec.replicates, spec.master_seed, spec.threads)
        for qi, x in enumerate(queries):
            sq = stats[:, qi]
            pred = asymptotics.predict_regression_risk(x, n, density, target, noise)
            risks[ni, qi] = sq.mean()
            records.append(
                _make_record(spec, n, x, "excess_risk", sq.mean(), mc_stderr(sq), pred.value)
            )
    if len(spec.n_grid) >= 2:
        ln_n = np.log(np.asarray(spec.n_grid, dtype=float))
        for qi, x in enumerate(queries):
            slope, intercept = np.polyfit(ln_n, 1.0 / risks[:, qi], 1)
            resid = 1.0 / risks[:, qi] - (slope * ln_n + intercept)
            m = ln_n.size
            se = (
                math.sqrt(float((resid**2).sum()) / (m - 2) / float(((ln_n - ln_n.mean()) ** 2).sum()))
                if m > 2
                else 0.0
            )
            sigma2 = float(noise.sigma2(x, target))
            pred = 1.0 / sigma2 if sigma2 > 0 else None
            records.append(
                _make_record(spec, spec.n_grid[-1], x, "inv_risk_vs_ln_n_slope", slope, se, pred)
            )
    return records


def run_classification(spec: ExperimentSpec) -> list[EstimateRecord]:
    """Plugin-classifier excess risk via the (2f-1) P[wrong side] identity.

    The identity-based estimator multiplies |2f(x)-1| by the frequency of
    the regression estimate landing on the wrong side of 1/2 (tie broken as
    class 1), which has far lower variance than comparing predicted labels
    against fresh draws; the naive estimator is emitted too as a cross-check.
    Both are paired with the closed-form bounds at alpha = 1 and 1/2.
    """
    density, target, noise = spec.density, spec.target, spec.noise
    queries = spec.query_points
    exponent = float(density.dim)
    f_at = [float(target(x)) for x in queries]
    for fx in f_at:
        if not 0.0 <= fx <= 1.0:
            raise ValueError("classification target must map into [0, 1]")
    records = []
    for n in spec.n_grid:
        def worker(rng):
            pts = density.sample(n + 1, rng)
            y = noise.sample_labels(rng, pts, target)
            test = rng.random(len(queries))  # fresh labels for the naive estimator
            out = np.empty(2 * len(queries))
            for qi, x in enumerate(queries):
                fhat = float(np.dot(_point_weights(pts, x, exponent), y))
                predicted = 1.0 if fhat >= 0.5 else 0.0
                if f_at[qi] > 0.5:
                    wrong = 1.0 if fhat < 0.5 else 0.0
                elif f_at[qi] < 0.5:
                    wrong = 1.0 if fhat >= 0.5 else 0.0
                else:
                    wrong = 0.0
                y_test = 1.0 if test[qi] < f_at[qi] else 0.0
                out[2 * qi] = wrong
                out[2 * qi + 1] = 1.0 if predicted != y_test else 0.0
            return out

        stats = _run_replicates(worker, spec.replicates, spec.master_seed, spec.threads)
        for qi, x in enumerate(queries):
            fx = f_at[qi]
            coeff = abs(2.0 * fx - 1.0)
            wrong = stats[:, 2 * qi]
            naive = stats[:, 2 * qi + 1]
            bayes_risk = min(fx, 1.0 - fx)
            bound1 = asymptotics.predict_classification_bound(x, n, 1.0, target, noise).value
            bound_half = asymptotics.predict_classification_bound(x, n, 0.5, target, noise).value
            records.append(
                _make_record(
                    spec, n, x, "excess_risk_identity|bound_alpha=1",
                    coeff * wrong.mean(), coeff * mc_stderr(wrong), bound1,
                )
            )
            records.append(
                _make_record(
                    spec, n, x, "excess_risk_identity|bound_alpha=0.5",
                    coeff * wrong.mean(), coeff * mc_stderr(wrong), bound_half,
                )
            )
            records.append(
                _make_record(
                    spec, n, x, "excess_risk_naive|bound_alpha=1",
                    naive.mean() - bayes_risk, mc_stderr(naive), bound1,
                )
            )
    return records


def run_extrapolation(spec: ExperimentSpec) -> list[EstimateRecord]:
    """MC mean of the noiseless estimator at exterior queries vs its limit."""
    density, target = spec.density, spec.target
    queries = spec.query_points
    exponent = float(density.dim)
    limits = [asymptotics.extrapolation_limit(x, density, target) for x in queries]
    records = []
    for n in spec.n_grid:
        def worker(rng):
            pts = density.sample(n + 1, rng)
            fvals = np.asarray(target(pts), dtype=float)
            return [float(np.dot(_point_weights(pts, x, exponent), fvals)) for x in queries]

        stats = _run_replicates(worker, spec.replicates, spec.master_seed, spec.threads)
        for qi, x in enumerate(queries):
            vals = stats[:, qi]
            records.append(
                _make_record(
                    spec, n, x, "extrapolation_mean", vals.mean(), mc_stderr(vals), limits[qi]
                )
            )
    return records
