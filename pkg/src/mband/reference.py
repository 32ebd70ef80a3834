"""Closed-form reference values, counting utilities and simulation models."""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Curve, FunctionalSample, TimeGrid
from .errors import InputError


def wendel_probability(dim, j):
    """Probability that the origin lies in the convex hull of j i.i.d. draws
    of an absolutely continuous, angularly symmetric random vector in R^dim.

    Equals 1 - 2^(1-j) * sum_{i<dim} C(j-1, i), clamped at 0 (the formula is
    nonpositive in the degenerate regime j <= dim).
    """
    if dim < 1 or j < 1:
        raise InputError("dim and j must be positive")
    tail = sum(math.comb(j - 1, i) for i in range(dim))
    value = 1 - Fraction(tail, 2 ** (j - 1))
    if value < 0:
        return 0.0
    return float(value)


def two_sided_band_depth(p_pos, p_neg, j):
    """Scalar translation-model band depth 1 - p_pos^j - p_neg^j.

    ``p_pos``/``p_neg`` are the probabilities that the additive noise is
    strictly above/below zero.
    """
    if p_pos < 0 or p_neg < 0 or p_pos + p_neg > 1 + 1e-12:
        raise InputError("need p_pos, p_neg >= 0 with p_pos + p_neg <= 1")
    if j < 1:
        raise InputError("j must be positive")
    return 1.0 - p_pos**j - p_neg**j


def td_center_value(d, m, j):
    """Time-share depth attained at the center of an angularly symmetric,
    absolutely continuous distribution (Wendel value in dimension d*m)."""
    return wendel_probability(d * m, j)


def surjection_count(m, a):
    """Number of ordered m-tuples whose distinct-value set is exactly a given
    a-element set (surjections m -> a, by inclusion-exclusion)."""
    if a < 1 or m < 1:
        raise InputError("m and a must be positive")
    if a > m:
        return 0
    return sum((-1) ** i * math.comb(a, i) * (a - i) ** m for i in range(a + 1))


# --- simulation models --------------------------------------------------------


@dataclass(frozen=True)
class Gaussian:
    """Centered normal noise."""

    sigma: float

    def draw(self, rng, count):
        return rng.normal(0.0, self.sigma, count) if self.sigma > 0 else np.zeros(count)


@dataclass(frozen=True)
class Uniform:
    """Uniform noise on [-width/2, width/2] (symmetric about 0)."""

    width: float

    def draw(self, rng, count):
        half = self.width / 2.0
        return rng.uniform(-half, half, count)


@dataclass(frozen=True)
class QuantileTable:
    """Noise sampled by inverse-CDF interpolation of a quantile table.

    ``quantiles`` holds the quantile function on an equispaced probability
    grid over [0, 1].
    """

    quantiles: tuple

    def draw(self, rng, count):
        q = np.asarray(self.quantiles, dtype=np.float64)
        u = rng.random(count)
        return np.interp(u, np.linspace(0.0, 1.0, len(q)), q)


@dataclass(frozen=True)
class TranslationScalar:
    """Curves a(t) + X with one scalar noise draw per curve."""

    a: Curve
    noise: object
    seed: int = 0

    def draw_values(self, rng, count):
        x = self.noise.draw(rng, count)
        return self.a.values[None, :, :] + x[:, None, None]


@dataclass(frozen=True)
class TranslationVector:
    """Curves a(t) + X with one spherical Gaussian d-vector per curve."""

    a: Curve
    sigma: float
    seed: int = 0

    def draw_values(self, rng, count):
        d = self.a.d
        x = rng.normal(0.0, self.sigma, (count, d)) if self.sigma > 0 else np.zeros((count, d))
        return self.a.values[None, :, :] + x[:, None, :]


@dataclass(frozen=True)
class IidGaussianPaths:
    """Independent centered Gaussian values at every grid point."""

    sigma: float
    k: int
    d: int = 1
    seed: int = 0

    def draw_values(self, rng, count):
        if self.sigma > 0:
            return rng.normal(0.0, self.sigma, (count, self.k, self.d))
        return np.zeros((count, self.k, self.d))


def model_grid_size(model):
    if isinstance(model, (TranslationScalar, TranslationVector)):
        return model.a.k
    return model.k


def simulate(model, n, grid=None):
    """Draw ``n`` curves from the model; deterministic given the model seed."""
    if n < 1:
        raise InputError("n must be positive")
    k = model_grid_size(model)
    if grid is None:
        grid = TimeGrid.regular(k)
    if grid.k != k:
        raise InputError(f"grid has {grid.k} points, model expects {k}")
    rng = np.random.default_rng(model.seed)
    values = model.draw_values(rng, n)
    width = len(str(n))
    curves = tuple(
        Curve(f"c{i + 1:0{width}d}", values[i]) for i in range(n)
    )
    return FunctionalSample(grid, curves)
