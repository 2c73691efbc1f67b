"""Probabilistic estimators of x, p and H computed from density and current.

Position moments are plain quadratures of ``rho``. Momentum enters through

    psi* dpsi/dx = rho'/2 + i (m/hbar) j

so ``<p> = m int j`` and the centred second moment is

    (Delta p)^2 = hbar^2 int (sqrt(rho)')^2 + int (m j - <p> rho)^2 / rho,

the integrated-by-parts (manifestly non-negative) form. The energy needs
``H psi`` and is evaluated on the wavefunction rebuilt from the fields.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateDensityError, MissingObservableError
from .state_fields import (
    NATURAL_UNITS,
    Constants,
    ProbabilityFields,
    WaveFunction,
    momentum_density,
    wavefunction_from_fields,
)

FLOW_CUTOFF = 1e-12
FLOW_CURRENT_TOL = 1e-6


@dataclass(frozen=True)
class EstimatorSet:
    mean_x: float
    mean_p: float
    std_x: float
    std_p: float
    corr_xp: complex
    mean_H: float | None = None
    std_H: float | None = None

    @property
    def has_energy(self) -> bool:
        return self.mean_H is not None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["corr_xp"] = {"re": self.corr_xp.real, "im": self.corr_xp.imag}
        return d


@dataclass(frozen=True)
class UncertaintyIndicators:
    eps_mean_x: float
    eps_mean_p: float
    eps_corr_xp: float
    eps_std_x: float
    eps_std_p: float
    w: float
    eps_mean_H: float | None = None
    eps_std_H: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def max_value(self) -> float:
        return max(v for v in asdict(self).values() if v is not None)


def _normalized(fields: ProbabilityFields) -> tuple[np.ndarray, np.ndarray]:
    norm = fields.grid.integrate(fields.rho)
    if not norm > 0:
        raise DegenerateDensityError("density integrates to zero")
    return fields.rho / norm, fields.j / norm


def _flow_term(rho: np.ndarray, flux: np.ndarray, grid) -> float:
    """``int flux^2 / rho`` over the region where rho is resolvable."""
    support = rho >= FLOW_CUTOFF * rho.max()
    flux_max = np.abs(flux).max(initial=0.0)
    if flux_max > 0 and np.any(np.abs(flux[~support]) > FLOW_CURRENT_TOL * flux_max):
        raise DegenerateDensityError("current is non-negligible where the density vanishes")
    integrand = np.zeros_like(rho)
    integrand[support] = flux[support] ** 2 / rho[support]
    return grid.integrate(integrand)


def hamiltonian_apply(psi: WaveFunction, omega: float, constants: Constants = NATURAL_UNITS) -> np.ndarray:
    """``H psi`` for the oscillator ``-hbar^2/2m d^2/dx^2 + m omega^2 x^2 / 2``."""
    samples = psi.samples
    x = psi.grid.points
    m, hbar = constants.mass, constants.hbar
    return -(hbar**2) / (2 * m) * psi.grid.derivative(samples, deriv=2) + 0.5 * m * omega**2 * x**2 * samples


def energy_moments(psi: WaveFunction, omega: float, constants: Constants = NATURAL_UNITS) -> tuple[float, float]:
    """``<H>`` and ``Delta H = ||(H - <H>) psi||`` for a normalized ``psi``."""
    grid = psi.grid
    samples = psi.samples
    h_psi = hamiltonian_apply(psi, omega, constants)
    mean = grid.integrate(np.conj(samples) * h_psi).real
    spread = h_psi - mean * samples
    return mean, math.sqrt(grid.integrate(np.abs(spread) ** 2))


def estimate(fields: ProbabilityFields, constants: Constants = NATURAL_UNITS, oscillator: float | None = None) -> EstimatorSet:
    """Estimators of x and p (and H when an oscillator pulsation is given)."""
    grid = fields.grid
    x = grid.points
    rho, j = _normalized(fields)
    hbar, m = constants.hbar, constants.mass

    mean_x = grid.integrate(x * rho)
    dx_ = x - mean_x
    std_x = math.sqrt(grid.integrate(dx_**2 * rho))

    mean_p = m * grid.integrate(j)
    amp_slope = grid.derivative(np.sqrt(rho))
    kinetic = hbar**2 * grid.integrate(amp_slope**2)
    flow = _flow_term(rho, m * j - mean_p * rho, grid)
    std_p = math.sqrt(kinetic + flow)

    integrand = dx_ * (-0.5j * hbar * grid.derivative(rho) + m * j)
    corr = complex(grid.integrate(integrand)) - mean_p * grid.integrate(dx_ * rho)

    mean_H = std_H = None
    if oscillator is not None:
        psi = wavefunction_from_fields(ProbabilityFields(grid, rho, j), constants)
        mean_H, std_H = energy_moments(psi, oscillator, constants)
    return EstimatorSet(mean_x, mean_p, std_x, std_p, corr, mean_H, std_H)


def momentum_second_moment_spectral(fields: ProbabilityFields, constants: Constants = NATURAL_UNITS) -> float:
    """``<p^2>`` from the momentum density of the rebuilt wavefunction.

    Independent of the density/current route in :func:`estimate`; used to
    cross-check it.
    """
    rho, j = _normalized(fields)
    psi = wavefunction_from_fields(ProbabilityFields(fields.grid, rho, j), constants)
    p, dens = momentum_density(psi, constants)
    dp = p[1] - p[0]
    return float(np.sum(p**2 * dens) * dp)


def uncertainty_indicators(in_set: EstimatorSet, out_set: EstimatorSet, constants: Constants = NATURAL_UNITS) -> UncertaintyIndicators:
    """Absolute in/out differences of every estimator, plus ``W``."""
    if in_set.has_energy != out_set.has_energy:
        raise MissingObservableError("energy estimators present in only one reading")
    eps_std_x = abs(out_set.std_x - in_set.std_x)
    eps_std_p = abs(out_set.std_p - in_set.std_p)
    eps_mean_H = eps_std_H = None
    if in_set.has_energy:
        eps_mean_H = abs(out_set.mean_H - in_set.mean_H)
        eps_std_H = abs(out_set.std_H - in_set.std_H)
    return UncertaintyIndicators(
        eps_mean_x=abs(out_set.mean_x - in_set.mean_x),
        eps_mean_p=abs(out_set.mean_p - in_set.mean_p),
        eps_corr_xp=abs(out_set.corr_xp - in_set.corr_xp),
        eps_std_x=eps_std_x,
        eps_std_p=eps_std_p,
        w=eps_std_x * eps_std_p / constants.hbar,
        eps_mean_H=eps_mean_H,
        eps_std_H=eps_std_H,
    )


def rsur_margin(est: EstimatorSet, constants: Constants = NATURAL_UNITS) -> float:
    """``std_x * std_p - hbar / 2``; non-negative for any physical state."""
    return est.std_x * est.std_p - 0.5 * constants.hbar
