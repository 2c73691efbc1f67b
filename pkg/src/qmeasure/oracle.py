"""Closed-form fields and estimators for a Gaussian packet seen through Gaussian kernels.

For a packet of width ``sigma`` and wavenumber ``k`` measured with density
width ``gamma`` and current width ``lam``, the out-density is a Gaussian of
variance ``sigma^2 + gamma^2`` and the out-current a Gaussian of variance
``sigma^2 + lam^2`` carrying total current ``hbar k / m``.

The momentum spread has two closed forms. ``"derived"`` is what the density
and current above actually give:

    (Delta p / hbar)^2 = k^2 (s^2+g^2) / sqrt((s^2+l^2)(s^2+2g^2-l^2)) - k^2 + 1/(4(s^2+g^2))

``"printed"`` replaces the inner radicand with ``s^4 - g^4 + 2 g^2 (s^2 + l^2)``.
The two agree only when ``lam == gamma``; the printed form is kept for
comparison, never as a test reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidSpecError, OracleDomainError
from .estimators import EstimatorSet, UncertaintyIndicators, uncertainty_indicators
from .state_fields import Constants

MOMENTUM_FORMS = ("derived", "printed")


@dataclass(frozen=True)
class ScenarioParams:
    x0: float = 0.0
    sigma: float = 1.0
    k: float = 0.0
    gamma: float = 0.0
    lam: float = 0.0
    hbar: float = 1.0
    mass: float = 1.0
    omega: float | None = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidSpecError("sigma must be positive")
        if self.gamma < 0 or self.lam < 0:
            raise InvalidSpecError("kernel widths must be non-negative")
        Constants(self.hbar, self.mass)

    @classmethod
    def oscillator(cls, omega: float, gamma: float = 0.0, lam: float = 0.0, hbar: float = 1.0, mass: float = 1.0) -> "ScenarioParams":
        sigma = math.sqrt(hbar / (2.0 * mass * omega))
        return cls(0.0, sigma, 0.0, gamma, lam, hbar, mass, omega)

    @property
    def constants(self) -> Constants:
        return Constants(self.hbar, self.mass)

    def ideal(self) -> "ScenarioParams":
        return replace(self, gamma=0.0, lam=0.0)

    def is_oscillator_ground(self) -> bool:
        if self.omega is None:
            return False
        sigma = math.sqrt(self.hbar / (2.0 * self.mass * self.omega))
        return self.x0 == 0 and self.k == 0 and math.isclose(self.sigma, sigma, rel_tol=1e-12)


def analytic_out_fields(p: ScenarioParams, x):
    """``(rho_out(x), j_out(x))``; widths of zero give the in-fields."""
    x = np.asarray(x, dtype=float)
    var_rho = p.sigma**2 + p.gamma**2
    var_j = p.sigma**2 + p.lam**2
    d2 = (x - p.x0) ** 2
    rho = np.exp(-d2 / (2 * var_rho)) / np.sqrt(2 * np.pi * var_rho)
    j = p.hbar * p.k * np.exp(-d2 / (2 * var_j)) / np.sqrt(2 * np.pi * p.mass**2 * var_j)
    if x.ndim == 0:
        return float(rho), float(j)
    return rho, j


def momentum_spread(p: ScenarioParams, form: str = "derived") -> float:
    s2 = p.sigma**2
    g2, l2 = p.gamma**2, p.lam**2
    if form == "derived":
        inner = (s2 + l2) * (s2 + 2 * g2 - l2)
    elif form == "printed":
        inner = s2**2 - g2**2 + 2 * g2 * (s2 + l2)
    else:
        raise ValueError(f"unknown momentum form {form!r}; expected one of {MOMENTUM_FORMS}")
    if not inner > 0:
        raise OracleDomainError(
            f"{form} momentum spread undefined: inner radicand {inner:.6g} <= 0 "
            f"(requires lam^2 < sigma^2 + 2 gamma^2)"
        )
    k2 = p.k**2
    outer = k2 * (s2 + g2) / math.sqrt(inner) - k2 + 1.0 / (4.0 * (s2 + g2))
    if outer < 0:
        raise OracleDomainError(f"{form} momentum variance is negative ({outer:.6g})")
    return p.hbar * math.sqrt(outer)


def oscillator_energy(p: ScenarioParams) -> tuple[float, float]:
    """``(<H>_out, Delta_out H)`` for the oscillator ground state under ``gamma``."""
    if not p.is_oscillator_ground():
        raise OracleDomainError("energy closed forms need the oscillator ground state (x0=0, k=0)")
    hbar, m, w, g2 = p.hbar, p.mass, p.omega, p.gamma**2
    a = hbar + 2 * m * w * g2
    mean = w * (hbar**2 + a**2) / (4 * a)
    spread = math.sqrt(2) * m * w**2 * g2 * (hbar + m * w * g2) / a
    return mean, spread


def analytic_estimators(p: ScenarioParams, momentum_form: str = "derived") -> EstimatorSet:
    """Out-reading estimators; pass ``p.ideal()`` for the in-reading."""
    mean_H = std_H = None
    if p.omega is not None:
        mean_H, std_H = oscillator_energy(p)
    return EstimatorSet(
        mean_x=p.x0,
        mean_p=p.hbar * p.k,
        std_x=math.sqrt(p.sigma**2 + p.gamma**2),
        std_p=momentum_spread(p, momentum_form),
        corr_xp=0.5j * p.hbar,
        mean_H=mean_H,
        std_H=std_H,
    )


def analytic_indicators(p: ScenarioParams, momentum_form: str = "derived") -> UncertaintyIndicators:
    return uncertainty_indicators(
        analytic_estimators(p.ideal(), momentum_form),
        analytic_estimators(p, momentum_form),
        p.constants,
    )
