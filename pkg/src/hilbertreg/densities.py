"""Sampling densities, target functions and noise models.

Each density knows its exact pdf, an inverse-transform or rejection-free
sampler, a support classifier returning the local solid angle, and the two
geometric quantities the singular quadrature needs (a bounding radius and
the radii where a sphere around a query can cross a support feature).

Random streams follow a counter-based contract: replicate ``r`` of a run
with master seed ``s`` uses the Philox generator keyed by
``SeedSequence(s, spawn_key=(r,))``, so replicates are independent,
reproducible, and safe to compute in parallel in any order.
"""

from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit

from .asymptotics import unit_ball_volume
from .geometry import Dataset

BOUNDARY_TOL = 1e-12

__all__ = [
    "BOUNDARY_TOL",
    "SupportQuery",
    "DensityModel",
    "UniformBox",
    "UniformBall",
    "Triangular1D",
    "RadialHeavyTail",
    "TargetFunction",
    "Constant",
    "Linear",
    "Sine1D",
    "ClampedLogistic",
    "NoiseModel",
    "GaussianConstant",
    "GaussianHetero",
    "BernoulliFromTarget",
    "replicate_stream",
    "sample_dataset",
]


def replicate_stream(master_seed: int, index: int) -> np.random.Generator:
    """Independent counter-based generator for one replicate of a seeded run."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(index,)))
    )


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


@dataclass(frozen=True)
class SupportQuery:
    """Location of a point relative to a support, with its local solid angle.

    ``solid_angle`` is the fraction of an infinitesimal ball around the
    point that lies inside the support: 1 in the interior, 1/2 on a face or
    sphere surface, 2^-m on a box corner with m active constraints, and
    absent (None) outside.
    """

    location_class: str  # "interior" | "boundary" | "exterior"
    solid_angle: Optional[float]


class DensityModel(ABC):
    """A sampling density with exact pdf and support geometry."""

    dim: int

    @abstractmethod
    def pdf(self, x):
        """Density value(s) at x, shape (..., d) -> (...)."""

    @abstractmethod
    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n i.i.d. points, shape (n, d); consumes rng in a fixed order."""

    @abstractmethod
    def classify_location(self, x) -> SupportQuery: ...

    @abstractmethod
    def max_radius(self, x, tail_mass: float = 1e-13) -> float:
        """Radius around x beyond which the density carries mass <= tail_mass.

        Exact (tail mass zero) for bounded supports.
        """

    def radial_breakpoints(self, x) -> tuple[float, ...]:
        """Radii at which a sphere around x can cross a support feature."""
        return ()

    def _point(self, x) -> np.ndarray:
        p = np.atleast_1d(np.asarray(x, dtype=float))
        if p.shape != (self.dim,):
            raise ValueError(f"point shape {p.shape} incompatible with dimension {self.dim}")
        return p


class UniformBox(DensityModel):
    """Uniform density on an axis-aligned box [lo, hi] per dimension."""

    def __init__(self, lo, hi):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise ValueError("lo and hi must be vectors of equal length")
        if not np.all(self.hi > self.lo):
            raise ValueError("box must have positive volume")
        self.dim = self.lo.shape[0]
        self._density = 1.0 / float(np.prod(self.hi - self.lo))

    def pdf(self, x):
        pts = np.asarray(x, dtype=float)
        scalar = pts.ndim == 1
        pts = np.atleast_2d(pts)
        inside = np.all((pts >= self.lo) & (pts <= self.hi), axis=1)
        out = np.where(inside, self._density, 0.0)
        return float(out[0]) if scalar else out

    def sample(self, n, rng):
        return self.lo + (self.hi - self.lo) * rng.random((n, self.dim))

    def classify_location(self, x):
        p = self._point(x)
        if np.any(p < self.lo - BOUNDARY_TOL) or np.any(p > self.hi + BOUNDARY_TOL):
            return SupportQuery("exterior", None)
        active = int(
            np.sum((np.abs(p - self.lo) <= BOUNDARY_TOL) | (np.abs(p - self.hi) <= BOUNDARY_TOL))
        )
        if active == 0:
            return SupportQuery("interior", 1.0)
        return SupportQuery("boundary", 0.5**active)

    def max_radius(self, x, tail_mass=1e-13):
        p = self._point(x)
        corners = itertools.product(*zip(self.lo, self.hi))
        return max(float(np.linalg.norm(np.array(c) - p)) for c in corners)

    def radial_breakpoints(self, x):
        p = self._point(x)
        radii = set()
        for i in range(self.dim):
            radii.add(abs(p[i] - self.lo[i]))
            radii.add(abs(p[i] - self.hi[i]))
        for c in itertools.product(*zip(self.lo, self.hi)):
            radii.add(float(np.linalg.norm(np.array(c) - p)))
        return tuple(sorted(r for r in radii if r > 0.0))


class UniformBall(DensityModel):
    """Uniform density on a d-dimensional ball."""

    def __init__(self, center, radius: float):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        self.radius = float(radius)
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        self.dim = self.center.shape[0]
        self._density = 1.0 / (unit_ball_volume(self.dim) * self.radius**self.dim)

    def pdf(self, x):
        pts = np.asarray(x, dtype=float)
        scalar = pts.ndim == 1
        pts = np.atleast_2d(pts)
        inside = np.linalg.norm(pts - self.center, axis=1) <= self.radius
        out = np.where(inside, self._density, 0.0)
        return float(out[0]) if scalar else out

    def sample(self, n, rng):
        u = rng.standard_normal((n, self.dim))
        norms = np.maximum(np.linalg.norm(u, axis=1, keepdims=True), 1e-300)
        r = self.radius * rng.random(n) ** (1.0 / self.dim)
        return self.center + r[:, None] * u / norms

    def classify_location(self, x):
        p = self._point(x)
        gap = float(np.linalg.norm(p - self.center)) - self.radius
        if gap > BOUNDARY_TOL:
            return SupportQuery("exterior", None)
        if gap >= -BOUNDARY_TOL:
            return SupportQuery("boundary", 0.5)
        return SupportQuery("interior", 1.0)

    def max_radius(self, x, tail_mass=1e-13):
        p = self._point(x)
        return float(np.linalg.norm(p - self.center)) + self.radius

    def radial_breakpoints(self, x):
        p = self._point(x)
        rc = float(np.linalg.norm(p - self.center))
        return tuple(sorted(r for r in (abs(self.radius - rc), self.radius + rc) if r > 0.0))


class Triangular1D(DensityModel):
    """Density 2y on [0, 1]: vanishes linearly at the left edge."""

    dim = 1

    def pdf(self, x):
        pts = np.asarray(x, dtype=float)
        scalar = pts.ndim == 1
        pts = np.atleast_2d(pts)
        v = pts[:, 0]
        out = np.where((v >= 0.0) & (v <= 1.0), 2.0 * np.clip(v, 0.0, None), 0.0)
        return float(out[0]) if scalar else out

    def sample(self, n, rng):
        return np.sqrt(rng.random((n, 1)))

    def classify_location(self, x):
        v = float(self._point(x)[0])
        if v < -BOUNDARY_TOL or v > 1.0 + BOUNDARY_TOL:
            return SupportQuery("exterior", None)
        if abs(v) <= BOUNDARY_TOL or abs(v - 1.0) <= BOUNDARY_TOL:
            return SupportQuery("boundary", 0.5)
        return SupportQuery("interior", 1.0)

    def max_radius(self, x, tail_mass=1e-13):
        v = float(self._point(x)[0])
        return max(abs(v), abs(1.0 - v))

    def radial_breakpoints(self, x):
        v = float(self._point(x)[0])
        return tuple(sorted(r for r in (abs(v), abs(1.0 - v)) if r > 0.0))


class RadialHeavyTail(DensityModel):
    """Isotropic density ``1/(V_d (1 + ||x||^d)^2)`` on all of R^d.

    The radius has CDF ``r^d / (1 + r^d)``, so ``r = (a/(1-a))^(1/d)`` with
    uniform ``a``; directions are drawn isotropically.
    """

    def __init__(self, dim: int = 1):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = int(dim)
        self._vd = unit_ball_volume(self.dim)

    def pdf(self, x):
        pts = np.asarray(x, dtype=float)
        scalar = pts.ndim == 1
        pts = np.atleast_2d(pts)
        r = np.linalg.norm(pts, axis=1)
        out = 1.0 / (self._vd * (1.0 + r**self.dim) ** 2)
        return float(out[0]) if scalar else out

    def radius_from_uniform(self, a):
        """Inverse-CDF transform of the radial law."""
        a = np.asarray(a, dtype=float)
        return (a / (1.0 - a)) ** (1.0 / self.dim)

    def sample(self, n, rng):
        r = self.radius_from_uniform(rng.random(n))
        u = rng.standard_normal((n, self.dim))
        norms = np.maximum(np.linalg.norm(u, axis=1, keepdims=True), 1e-300)
        return r[:, None] * u / norms

    def classify_location(self, x):
        self._point(x)
        return SupportQuery("interior", 1.0)

    def max_radius(self, x, tail_mass=1e-13):
        p = self._point(x)
        tail_radius = (1.0 / tail_mass - 1.0) ** (1.0 / self.dim)
        return float(np.linalg.norm(p)) + tail_radius


# ---------------------------------------------------------------------------
# Targets and noise
# ---------------------------------------------------------------------------


class TargetFunction(ABC):
    """Regression function f(x); evaluates on (..., d) arrays."""

    required_dim: Optional[int] = None

    @abstractmethod
    def __call__(self, x): ...

    def _first_coord(self, x):
        pts = np.asarray(x, dtype=float)
        if pts.ndim == 1:
            return float(pts[0]), True
        return pts[..., 0], False


class Constant(TargetFunction):
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, x):
        pts = np.asarray(x, dtype=float)
        if pts.ndim == 1:
            return self.value
        return np.full(pts.shape[:-1], self.value)


class Linear(TargetFunction):
    def __init__(self, slope, intercept: float = 0.0):
        self.slope = np.atleast_1d(np.asarray(slope, dtype=float))
        self.intercept = float(intercept)
        self.required_dim = self.slope.shape[0]

    def __call__(self, x):
        pts = np.asarray(x, dtype=float)
        out = pts @ self.slope + self.intercept
        return float(out) if out.ndim == 0 else out


class Sine1D(TargetFunction):
    """``sin(2 pi x)`` on the first (and only) coordinate."""

    required_dim = 1

    def __call__(self, x):
        v, scalar = self._first_coord(x)
        out = np.sin(2.0 * math.pi * np.asarray(v))
        return float(out) if scalar else out


class ClampedLogistic(TargetFunction):
    """Logistic ramp with range inside [lo, hi] (a subset of [0, 1])."""

    required_dim = 1

    def __init__(self, center: float = 0.0, rate: float = 1.0, lo: float = 0.0, hi: float = 1.0):
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError("requires 0 <= lo < hi <= 1")
        self.center = float(center)
        self.rate = float(rate)
        self.lo = float(lo)
        self.hi = float(hi)

    def __call__(self, x):
        v, scalar = self._first_coord(x)
        out = self.lo + (self.hi - self.lo) * expit(self.rate * (np.asarray(v) - self.center))
        return float(out) if scalar else out


class NoiseModel(ABC):
    """Conditional label law around the regression function."""

    is_classification = False

    @abstractmethod
    def sample_labels(self, rng, points, target) -> np.ndarray: ...

    @abstractmethod
    def sigma2(self, x, target=None) -> float:
        """Conditional variance sigma^2(x)."""

    def sigma2_points(self, points, target=None):
        """Vectorized sigma^2 over (n, d) points; may return a scalar."""
        return np.array([self.sigma2(p, target) for p in points])


class GaussianConstant(NoiseModel):
    def __init__(self, sigma: float):
        if sigma < 0:
            raise ValueError("sigma must be nonnegative")
        self.sigma = float(sigma)

    def sample_labels(self, rng, points, target):
        y = np.asarray(target(points), dtype=float)
        if self.sigma == 0.0:
            return y.copy()
        return y + self.sigma * rng.standard_normal(points.shape[0])

    def sigma2(self, x, target=None):
        return self.sigma**2

    def sigma2_points(self, points, target=None):
        return self.sigma**2


class GaussianHetero(NoiseModel):
    """Gaussian noise with position-dependent scale sigma(x) >= 0."""

    def __init__(self, sigma_fn: TargetFunction):
        self.sigma_fn = sigma_fn

    def sample_labels(self, rng, points, target):
        s = np.asarray(self.sigma_fn(points), dtype=float)
        if np.any(s < 0):
            raise ValueError("sigma(x) must be nonnegative everywhere")
        return np.asarray(target(points), dtype=float) + s * rng.standard_normal(points.shape[0])

    def sigma2(self, x, target=None):
        return float(self.sigma_fn(np.atleast_1d(np.asarray(x, dtype=float)))) ** 2

    def sigma2_points(self, points, target=None):
        return np.asarray(self.sigma_fn(points), dtype=float) ** 2


class BernoulliFromTarget(NoiseModel):
    """Binary labels with P(y=1 | x) = f(x); requires f mapping into [0, 1]."""

    is_classification = True

    def sample_labels(self, rng, points, target):
        f = np.asarray(target(points), dtype=float)
        if np.any(f < -1e-12) or np.any(f > 1.0 + 1e-12):
            raise ValueError("Bernoulli labels need target values in [0, 1]")
        f = np.clip(f, 0.0, 1.0)
        return (rng.random(points.shape[0]) < f).astype(float)

    def sigma2(self, x, target=None):
        if target is None:
            raise ValueError("Bernoulli variance needs the target function")
        f = float(target(np.atleast_1d(np.asarray(x, dtype=float))))
        return f * (1.0 - f)

    def sigma2_points(self, points, target=None):
        if target is None:
            raise ValueError("Bernoulli variance needs the target function")
        f = np.asarray(target(points), dtype=float)
        return f * (1.0 - f)


def sample_dataset(density, target, noise, n_plus_1: int, seed) -> Dataset:
    """Draw a labelled dataset: points i.i.d. from the density, labels from the noise model.

    The same seed reproduces the dataset bit for bit.  ``seed`` may be an
    int, a SeedSequence, or an existing Generator (consumed in place).
    """
    if n_plus_1 < 1:
        raise ValueError("need at least one sample")
    if target.required_dim is not None and target.required_dim != density.dim:
        raise ValueError(
            f"target requires dimension {target.required_dim}, density has {density.dim}"
        )
    rng = _as_generator(seed)
    points = density.sample(n_plus_1, rng)
    labels = noise.sample_labels(rng, points, target)
    return Dataset(points=points, labels=labels)
