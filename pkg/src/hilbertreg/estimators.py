"""Regression and classification estimators built on the singular-kernel weights.

Three memory-based regressors share one weight kernel:

* Hilbert: exponent fixed at the ambient dimension ``d``; parameter-free.
* Shepard: any positive exponent, all points.
* wiNN: exponent ``delta`` restricted to the ``k`` nearest neighbors
  (consistent regime ``delta < d/2``).

Each interpolates its training data exactly.  A plugin classifier
thresholds the Hilbert regression estimate at 1/2 with the convention
``theta(0) = 1``, i.e. a tie is classified as 1.

Both a functional API (operating on :class:`~hilbertreg.geometry.Dataset`)
and scikit-learn compatible estimator classes are provided.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .geometry import (
    Dataset,
    EXACT_HIT_TOL,
    WeightVector,
    as_query,
    hilbert_weights,
    weights_on_grid,
)

__all__ = [
    "Prediction",
    "HilbertKind",
    "ShepardKind",
    "WiNNKind",
    "EstimatorKind",
    "hilbert_regress",
    "shepard_regress",
    "winn_regress",
    "plugin_classify",
    "evaluate_on_grid",
    "HilbertRegressor",
    "ShepardRegressor",
    "WiNNRegressor",
    "HilbertPluginClassifier",
]


@dataclass(frozen=True)
class Prediction:
    value: float
    weights_used: Optional[WeightVector] = None


@dataclass(frozen=True)
class HilbertKind:
    pass


@dataclass(frozen=True)
class ShepardKind:
    exponent: float

    def __post_init__(self):
        if not self.exponent > 0:
            raise ValueError("Shepard exponent must be positive")


@dataclass(frozen=True)
class WiNNKind:
    k: int
    delta: float

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    def delta_in_consistency_regime(self, d: int) -> bool:
        """Whether ``delta < d/2``, the regime with proven consistency."""
        return self.delta < d / 2


EstimatorKind = Union[HilbertKind, ShepardKind, WiNNKind]


def _clip_to_label_range(value: float, labels: np.ndarray) -> float:
    # The estimate is a convex combination; clipping only removes the last
    # few ulps of rounding so range containment holds exactly.
    return float(min(max(value, labels.min()), labels.max()))


def hilbert_regress(query, dataset: Dataset) -> Prediction:
    """Hilbert kernel regression estimate at ``query`` (interpolates the data)."""
    wv = hilbert_weights(query, dataset)
    value = _clip_to_label_range(wv.weights @ dataset.labels, dataset.labels)
    if wv.exact_hit is not None:
        value = float(dataset.labels[wv.exact_hit])
    return Prediction(value=value, weights_used=wv)


def shepard_regress(query, dataset: Dataset, exponent: float) -> Prediction:
    """Shepard regression: same form as Hilbert with a free kernel exponent."""
    wv = hilbert_weights(query, dataset, exponent=exponent)
    value = _clip_to_label_range(wv.weights @ dataset.labels, dataset.labels)
    if wv.exact_hit is not None:
        value = float(dataset.labels[wv.exact_hit])
    return Prediction(value=value, weights_used=wv)


def winn_regress(query, dataset: Dataset, k: int, delta: float) -> Prediction:
    """Weighted interpolating nearest-neighbor estimate using ``k`` neighbors.

    Weights are ``r^-delta`` normalized over the k nearest points only; the
    log-space path of the full kernel is reused.  Ties at the k-th distance
    keep the lowest-index point (stable argsort).
    """
    if not 1 <= k <= dataset.n_points:
        raise ValueError(f"k={k} out of range [1, {dataset.n_points}]")
    if not delta > 0:
        raise ValueError("delta must be positive")
    q = as_query(query, dataset.dimension)
    diff = dataset.points - q[None, :]
    dists = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    neighbors = np.argsort(dists, kind="stable")[:k]

    sub = dists[neighbors]
    w = np.zeros(dataset.n_points)
    hit = np.flatnonzero(sub <= EXACT_HIT_TOL)
    exact_hit = None
    if hit.size:
        exact_hit = int(neighbors[hit[0]])
        w[exact_hit] = 1.0
        value = float(dataset.labels[exact_hit])
    else:
        s = -delta * np.log(sub)
        s -= s.max()
        ws = np.exp(s)
        ws /= ws.sum()
        w[neighbors] = ws
        value = _clip_to_label_range(w @ dataset.labels, dataset.labels[neighbors])
    wv = WeightVector(weights=w, query=q, exact_hit=exact_hit)
    return Prediction(value=value, weights_used=wv)


def plugin_classify(query, dataset: Dataset) -> int:
    """Threshold the Hilbert regression estimate at 1/2 (``theta(0) = 1``).

    Labels must all be 0 or 1.
    """
    y = dataset.labels
    if not np.all((y == 0.0) | (y == 1.0)):
        raise ValueError("plugin classifier requires binary {0, 1} labels")
    return 1 if hilbert_regress(query, dataset).value >= 0.5 else 0


def evaluate_on_grid(grid, dataset: Dataset, kind: EstimatorKind) -> list[Prediction]:
    """Apply the chosen estimator to every grid point, preserving order."""
    g = np.asarray(grid, dtype=float)
    if g.ndim == 1:
        g = g[:, None]
    if g.shape[0] == 0:
        raise ValueError("grid must be non-empty")

    if isinstance(kind, WiNNKind):
        return [winn_regress(x, dataset, kind.k, kind.delta) for x in g]

    exponent = kind.exponent if isinstance(kind, ShepardKind) else None
    W = weights_on_grid(g, dataset, exponent=exponent)
    values = W @ dataset.labels
    lo, hi = dataset.labels.min(), dataset.labels.max()
    np.clip(values, lo, hi, out=values)
    out = []
    for r in range(g.shape[0]):
        hit = None
        if W[r].max() == 1.0:
            i = int(np.argmax(W[r]))
            if np.linalg.norm(g[r] - dataset.points[i]) <= EXACT_HIT_TOL:
                hit = i
                values[r] = dataset.labels[i]
        wv = WeightVector(weights=W[r], query=g[r], exact_hit=hit)
        out.append(Prediction(value=float(values[r]), weights_used=wv))
    return out


# ---------------------------------------------------------------------------
# scikit-learn style estimators
# ---------------------------------------------------------------------------


class _KernelRegressorBase(BaseEstimator):
    """Shared fit/predict plumbing for the memory-based regressors."""

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        self.dataset_ = Dataset(points=X, labels=y)
        self.n_features_in_ = X.shape[1]
        return self

    def _predictions(self, X) -> list[Prediction]:
        raise NotImplementedError

    def predict(self, X):
        check_is_fitted(self, "dataset_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, estimator was fitted with {self.n_features_in_}"
            )
        return np.array([p.value for p in self._predictions(X)])


class HilbertRegressor(RegressorMixin, _KernelRegressorBase):
    """Parameter-free interpolating kernel regressor (exponent = dimension)."""

    def _predictions(self, X):
        return evaluate_on_grid(X, self.dataset_, HilbertKind())


class ShepardRegressor(RegressorMixin, _KernelRegressorBase):
    """Inverse-distance-weighting regressor with a free kernel exponent."""

    def __init__(self, exponent: float = 2.0):
        self.exponent = exponent

    def fit(self, X, y):
        if not self.exponent > 0:
            raise ValueError("exponent must be positive")
        return super().fit(X, y)

    def _predictions(self, X):
        return evaluate_on_grid(X, self.dataset_, ShepardKind(self.exponent))


class WiNNRegressor(RegressorMixin, _KernelRegressorBase):
    """Interpolating k-nearest-neighbor regressor with kernel exponent ``delta``.

    After ``fit``, ``in_consistency_regime_`` records whether
    ``delta < d/2`` holds; values outside that regime are allowed for
    ablation but flagged.
    """

    def __init__(self, k: int = 5, delta: float = 0.4):
        self.k = k
        self.delta = delta

    def fit(self, X, y):
        kind = WiNNKind(self.k, self.delta)  # validates parameters
        super().fit(X, y)
        if kind.k > self.dataset_.n_points:
            raise ValueError(f"k={kind.k} exceeds number of samples {self.dataset_.n_points}")
        self.in_consistency_regime_ = kind.delta_in_consistency_regime(self.dataset_.dimension)
        return self

    def _predictions(self, X):
        return evaluate_on_grid(X, self.dataset_, WiNNKind(self.k, self.delta))


class HilbertPluginClassifier(ClassifierMixin, BaseEstimator):
    """Binary classifier thresholding the Hilbert regression estimate at 1/2."""

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        y = np.asarray(y, dtype=float)
        if not np.all((y == 0.0) | (y == 1.0)):
            raise ValueError("labels must be binary {0, 1}")
        self.classes_ = np.array([0, 1])
        self.dataset_ = Dataset(points=X, labels=y)
        self.n_features_in_ = X.shape[1]
        return self

    def regression_estimate(self, X):
        check_is_fitted(self, "dataset_")
        X = check_array(X)
        return np.array(
            [p.value for p in evaluate_on_grid(X, self.dataset_, HilbertKind())]
        )

    def predict_proba(self, X):
        f = np.clip(self.regression_estimate(X), 0.0, 1.0)
        return np.column_stack([1.0 - f, f])

    def predict(self, X):
        return (self.regression_estimate(X) >= 0.5).astype(int)
