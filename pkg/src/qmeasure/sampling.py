"""Simulated trial series and their factual estimators.

Positions are drawn from the density, momenta from the momentum density of
the rebuilt wavefunction. Both use inverse-transform sampling against the
piecewise-linear cumulative distribution on the grid. Factual estimators use
divisor ``N`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import SamplingError
from .state_fields import (
    NATURAL_UNITS,
    Constants,
    ProbabilityFields,
    momentum_density,
    wavefunction_from_fields,
)

Z_MEAN_MAX = 5.0
REL_STD_MAX = 0.03


@dataclass(frozen=True, eq=False)
class SampleBatch:
    values: np.ndarray
    seed: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise SamplingError("a batch needs at least two trial values")
        if not np.all(np.isfinite(values)):
            raise SamplingError("trial values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n_trials(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class FactualEstimators:
    mean: float
    std: float
    eps_mean: float
    eps_std: float
    n_trials: int


@dataclass(frozen=True, eq=False)
class SpectrumHistogram:
    bin_values: np.ndarray
    frequencies: np.ndarray
    edges: np.ndarray

    def mean(self) -> float:
        return float(np.dot(self.frequencies, self.bin_values))

    def std(self) -> float:
        mean = self.mean()
        return math.sqrt(float(np.dot(self.frequencies, (self.bin_values - mean) ** 2)))

    def quantize(self, values: np.ndarray) -> np.ndarray:
        """Replace each value by the midpoint of its bin."""
        nbins = len(self.edges) - 1
        idx = np.clip(np.searchsorted(self.edges, values, side="right") - 1, 0, nbins - 1)
        mids = 0.5 * (self.edges[:-1] + self.edges[1:])
        return mids[idx]


@dataclass(frozen=True)
class Comparison:
    z_mean: float
    rel_std: float
    passed: bool
    degenerate: bool = False


def _inverse_transform(points: np.ndarray, density: np.ndarray, n_trials: int, seed: int) -> SampleBatch:
    if n_trials < 2:
        raise SamplingError(f"need at least two trials, got {n_trials}")
    cdf = cumulative_trapezoid(density, points, initial=0.0)
    if not cdf[-1] > 0:
        raise SamplingError("density has no mass to sample from")
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    u = rng.random(n_trials)
    return SampleBatch(np.interp(u, cdf, points), seed)


def draw_position_samples(fields: ProbabilityFields, n_trials: int, seed: int) -> SampleBatch:
    return _inverse_transform(fields.grid.points, fields.rho, n_trials, seed)


def draw_momentum_samples(
    fields: ProbabilityFields,
    n_trials: int,
    seed: int,
    constants: Constants = NATURAL_UNITS,
) -> SampleBatch:
    psi = wavefunction_from_fields(fields, constants)
    p, dens = momentum_density(psi, constants)
    return _inverse_transform(p, dens, n_trials, seed)


def factual_estimators(batch: SampleBatch) -> FactualEstimators:
    """Sample mean and spread with their statistical uncertainties.

    ``eps_mean = std / sqrt(N)``; ``eps_std = Var[s^2]^(1/4)`` with the
    large-N estimate ``Var[s^2] = (m4 - m2^2) / N`` from central moments.
    """
    v = batch.values
    n = v.size
    mean = float(v.mean())
    dev = v - mean
    m2 = float(np.mean(dev**2))
    m4 = float(np.mean(dev**4))
    std = math.sqrt(m2)
    var_s2 = max(m4 - m2 * m2, 0.0) / n
    return FactualEstimators(mean, std, std / math.sqrt(n), var_s2**0.25, n)


def joint_correlation(batch_a: SampleBatch, batch_b: SampleBatch) -> float:
    if batch_a.n_trials != batch_b.n_trials:
        raise SamplingError(f"batch lengths differ: {batch_a.n_trials} vs {batch_b.n_trials}")
    a = batch_a.values - batch_a.values.mean()
    b = batch_b.values - batch_b.values.mean()
    return float(np.mean(a * b))


def spectrum_estimators(batch: SampleBatch, n_bins: int) -> SpectrumHistogram:
    """Frequencies of ``n_bins`` uniform bins over the sample range (empty bins dropped).

    A batch with a single distinct value gets one bin centred on it.
    """
    if n_bins < 1:
        raise SamplingError("need at least one bin")
    v = batch.values
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        edges = np.array([lo - 0.5, lo + 0.5])
    else:
        edges = np.linspace(lo, hi, n_bins + 1)
    counts, _ = np.histogram(v, bins=edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    keep = counts > 0
    return SpectrumHistogram(mids[keep], counts[keep] / v.size, edges)


def compare_fac_vs_prd(
    fac: FactualEstimators,
    prd_mean: float,
    prd_std: float,
    z_max: float = Z_MEAN_MAX,
    rel_std_max: float = REL_STD_MAX,
) -> Comparison:
    diff = abs(fac.mean - prd_mean)
    if fac.eps_mean > 0:
        z_mean = diff / fac.eps_mean
    else:
        z_mean = 0.0 if diff == 0 else math.inf
    if prd_std == 0:
        degenerate = fac.std != 0
        rel_std = math.inf if degenerate else 0.0
        return Comparison(z_mean, rel_std, passed=(not degenerate and z_mean <= z_max), degenerate=degenerate)
    rel_std = abs(fac.std - prd_std) / prd_std
    return Comparison(z_mean, rel_std, passed=bool(z_mean <= z_max and rel_std <= rel_std_max))
