"""Numerically stable Hilbert kernel weights (Lagrange functions).

The weight of sample ``x_i`` at a query ``x`` is
``w_i(x) = ||x - x_i||^-p / sum_j ||x - x_j||^-p`` with ``p = d`` for the
Hilbert kernel and any ``p > 0`` for the Shepard generalization.  All
arithmetic runs in log-distance space (a softmax over ``-p * log r_i``), so
distance ratios spanning hundreds of orders of magnitude neither overflow
nor underflow.  A query that coincides with a sample point (distance below
``EXACT_HIT_TOL``) short-circuits to the indicator vector, which makes the
interpolation property ``w_i(x_j) = delta_ij`` exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

# Distances at or below this are treated as an exact coincidence with a data
# point.  Any larger distance is representable and safe in log space.
EXACT_HIT_TOL = 1e-300

__all__ = [
    "EXACT_HIT_TOL",
    "Dataset",
    "WeightVector",
    "hilbert_weights",
    "lagrange_value",
    "pairwise_min_distance",
    "weights_on_grid",
]


def as_query(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float vector, optionally checking its dimension."""
    q = np.atleast_1d(np.asarray(x, dtype=float))
    if q.ndim != 1:
        raise ValueError(f"query must be a 1-D coordinate vector, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValueError("query has non-finite coordinates")
    if dim is not None and q.shape[0] != dim:
        raise ValueError(f"query dimension {q.shape[0]} != dataset dimension {dim}")
    return q


@dataclass(frozen=True)
class Dataset:
    """An immutable labelled sample: ``n+1`` points in R^d with real labels."""

    points: np.ndarray  # (n+1, d)
    labels: np.ndarray  # (n+1,)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        y = np.asarray(self.labels, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("points must be a non-empty (n+1, d) array")
        if y.shape != (pts.shape[0],):
            raise ValueError(
                f"labels shape {y.shape} incompatible with {pts.shape[0]} points"
            )
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite coordinates")
        if not np.all(np.isfinite(y)):
            raise ValueError("labels contain non-finite values")
        pts = pts.copy()
        y = y.copy()
        pts.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", y)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class WeightVector:
    """Simplex-constrained weights at one query point.

    ``exact_hit`` is the index of the coinciding data point when the query
    lies on top of one, in which case the weights are the indicator vector.
    """

    weights: np.ndarray
    query: np.ndarray
    exact_hit: Optional[int] = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)


def _distances(query: np.ndarray, points: np.ndarray) -> np.ndarray:
    diff = points - query[None, :]
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _softmax_weights(dists: np.ndarray, exponent: float) -> np.ndarray:
    s = -exponent * np.log(dists)
    s -= s.max()
    w = np.exp(s)
    w /= w.sum()
    return w


def hilbert_weights(query, dataset: Dataset, exponent: float | None = None) -> WeightVector:
    """Normalized inverse-power-distance weights of every data point at ``query``.

    Parameters
    ----------
    query : array-like, shape (d,)
        Query location.
    dataset : Dataset
    exponent : float, optional
        Power of the singular kernel; defaults to the ambient dimension
        ``d`` (the Hilbert kernel).  Other positive values give Shepard
        weights.

    Returns
    -------
    WeightVector
        Weights in [0, 1] summing to one.  If the query coincides with a
        data point (lowest index wins on ties) the result is the exact
        indicator vector with ``exact_hit`` set.
    """
    q = as_query(query, dataset.dimension)
    if exponent is None:
        exponent = float(dataset.dimension)
    if not exponent > 0:
        raise ValueError(f"exponent must be positive, got {exponent}")

    dists = _distances(q, dataset.points)
    hit = np.flatnonzero(dists <= EXACT_HIT_TOL)
    if hit.size:
        i = int(hit[0])
        w = np.zeros(dataset.n_points)
        w[i] = 1.0
        return WeightVector(weights=w, query=q, exact_hit=i)

    return WeightVector(weights=_softmax_weights(dists, exponent), query=q)


def lagrange_value(query, hold_index: int, dataset: Dataset, exponent: float | None = None) -> float:
    """The weight of data point ``hold_index`` viewed as a function of the query."""
    if not 0 <= hold_index < dataset.n_points:
        raise IndexError(f"hold_index {hold_index} out of range [0, {dataset.n_points})")
    return float(hilbert_weights(query, dataset, exponent).weights[hold_index])


def pairwise_min_distance(query, dataset: Dataset) -> tuple[int, float]:
    """Index and value of the minimum Euclidean distance to the data (lowest index on ties)."""
    q = as_query(query, dataset.dimension)
    dists = _distances(q, dataset.points)
    i = int(np.argmin(dists))
    return i, float(dists[i])


def weights_on_grid(grid: np.ndarray, dataset: Dataset, exponent: float | None = None) -> np.ndarray:
    """Weights for a batch of queries, one row per query.

    Vectorized over the grid; each row matches ``hilbert_weights`` on the
    same query, including the exact-hit indicator path.
    """
    g = np.asarray(grid, dtype=float)
    if g.ndim == 1:
        g = g[:, None]
    if g.shape[1] != dataset.dimension:
        raise ValueError(f"grid dimension {g.shape[1]} != dataset dimension {dataset.dimension}")
    if not np.all(np.isfinite(g)):
        raise ValueError("grid has non-finite coordinates")
    if exponent is None:
        exponent = float(dataset.dimension)

    diff = g[:, None, :] - dataset.points[None, :, :]
    dists = np.sqrt(np.einsum("qij,qij->qi", diff, diff))
    hits = dists <= EXACT_HIT_TOL

    # Rows with an exact hit produce inf/nan here and are overwritten below.
    with np.errstate(divide="ignore", invalid="ignore"):
        s = -exponent * np.log(dists)
        s -= s.max(axis=1, keepdims=True)
        w = np.exp(s)
        w /= w.sum(axis=1, keepdims=True)

    hit_rows = np.flatnonzero(hits.any(axis=1))
    for r in hit_rows:
        i = int(np.flatnonzero(hits[r])[0])
        w[r] = 0.0
        w[r, i] = 1.0
    return w
