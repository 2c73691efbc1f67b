"""Grids, states, and the wavefunction <-> (density, current) conversion.

A state is carried either as a wavefunction ``psi = |psi| exp(i phi)`` or as
the pair of real fields ``rho = |psi|^2`` and ``j = (hbar/m) rho dphi/dx``.
Everything lives on a uniform 1D grid; integrals use the trapezoidal rule and
derivatives the high-order stencils of :mod:`qmeasure._numerics`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from . import _numerics as num
from .errors import (
    GridTooSmallError,
    IllDefinedPhaseError,
    InvalidBoundsError,
    InvalidSpecError,
)

DEFAULT_POINTS = 4096
MIN_POINTS = 16
SPAN_FACTOR = 10.0
COVERAGE_SIGMAS = 8.0

RHO_FLOOR = 1e-300
# density (relative to its max) below which the phase is not advanced
PHASE_CUTOFF = 1e-24
# current (relative to its max) tolerated where the phase is undefined
PHASE_CURRENT_TOL = 1e-6


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid ``x_min, x_min + dx, ..., x_max`` with ``n`` points."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise InvalidBoundsError("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise InvalidBoundsError(f"x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise InvalidBoundsError(f"grid needs an integer n >= {MIN_POINTS}, got {self.n}")
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))
        object.__setattr__(self, "n", int(self.n))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    def integrate(self, f) -> float | complex:
        return num.trapezoid(f, self.dx)

    def derivative(self, f, deriv: int = 1, accuracy: int = num.DEFAULT_ACCURACY) -> np.ndarray:
        return num.derivative(f, self.dx, deriv=deriv, accuracy=accuracy)

    def cumulative_integral(self, f, accuracy: int = num.DEFAULT_ACCURACY, anchor: int = 0) -> np.ndarray:
        return num.cumulative_integral(f, self.dx, accuracy=accuracy, anchor=anchor)


@dataclass(frozen=True)
class Constants:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidSpecError(f"{name} must be positive and finite, got {value}")


NATURAL_UNITS = Constants()


@dataclass(frozen=True)
class GaussianPacket:
    x0: float = 0.0
    sigma: float = 1.0
    k: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidSpecError(f"sigma must be positive, got {self.sigma}")
        if not (math.isfinite(self.x0) and math.isfinite(self.k)):
            raise InvalidSpecError("x0 and k must be finite")

    def as_packet(self, constants: Constants = NATURAL_UNITS) -> "GaussianPacket":
        return self


@dataclass(frozen=True)
class OscillatorGround:
    """Ground state of ``H = p^2/2m + m omega^2 x^2 / 2``."""

    omega: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise InvalidSpecError(f"omega must be positive, got {self.omega}")

    def as_packet(self, constants: Constants = NATURAL_UNITS) -> GaussianPacket:
        sigma = math.sqrt(constants.hbar / (2.0 * constants.mass * self.omega))
        return GaussianPacket(x0=0.0, sigma=sigma, k=0.0)


StateSpec = Union[GaussianPacket, OscillatorGround]


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Samples of ``psi`` kept in polar form (modulus and unwrapped phase)."""

    grid: Grid1D
    modulus: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        mod = np.asarray(self.modulus, dtype=float)
        ph = np.asarray(self.phase, dtype=float)
        if mod.shape != (self.grid.n,) or ph.shape != (self.grid.n,):
            raise ValueError("modulus and phase must have one sample per grid point")
        if not (np.all(np.isfinite(mod)) and np.all(np.isfinite(ph))):
            raise ValueError("wavefunction samples must be finite")
        if np.any(mod < 0):
            raise ValueError("modulus must be non-negative")
        object.__setattr__(self, "modulus", mod)
        object.__setattr__(self, "phase", ph)

    @classmethod
    def from_samples(cls, grid: Grid1D, samples) -> "WaveFunction":
        samples = np.asarray(samples, dtype=complex)
        return cls(grid, np.abs(samples), np.unwrap(np.angle(samples)))

    @property
    def samples(self) -> np.ndarray:
        return self.modulus * np.exp(1j * self.phase)

    def norm(self) -> float:
        return self.grid.integrate(self.modulus**2)


@dataclass(frozen=True, eq=False)
class ProbabilityFields:
    """Density ``rho`` and current ``j`` sampled on a grid."""

    grid: Grid1D
    rho: np.ndarray
    j: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        j = np.array(self.j, dtype=float)
        if rho.shape != (self.grid.n,) or j.shape != (self.grid.n,):
            raise ValueError("rho and j must have one sample per grid point")
        if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(j))):
            raise ValueError("fields must be finite")
        scale = rho.max(initial=0.0)
        if np.any(rho < -1e-14 * scale):
            raise ValueError("density must be non-negative")
        np.clip(rho, 0.0, None, out=rho)
        rho.flags.writeable = False
        j.flags.writeable = False
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "j", j)

    @property
    def x(self) -> np.ndarray:
        return self.grid.points

    def scaled(self, factor: float) -> "ProbabilityFields":
        return ProbabilityFields(self.grid, factor * self.rho, factor * self.j)


def make_grid(x_min: float, x_max: float, n: int) -> Grid1D:
    return Grid1D(x_min, x_max, n)


def _next_pow2(value: float) -> int:
    return 1 << max(0, math.ceil(math.log2(value)))


def auto_grid(
    spec: StateSpec,
    kernel_widths: Iterable[float] = (),
    constants: Constants = NATURAL_UNITS,
    n: int = DEFAULT_POINTS,
    span_factor: float = SPAN_FACTOR,
) -> Grid1D:
    """Grid centred on the packet, wide enough for the broadest kernel.

    The half-span is ``span_factor * sqrt(sigma^2 + max_width^2)``. ``n`` is
    rounded up to a power of two (at least 1024) and doubled further if the
    narrowest non-zero kernel width would be under-resolved.
    """
    packet = spec.as_packet(constants)
    widths = [float(w) for w in kernel_widths if w and w > 0]
    max_w = max(widths, default=0.0)
    half = span_factor * math.hypot(packet.sigma, max_w)
    half = max(half, COVERAGE_SIGMAS * packet.sigma)
    npts = _next_pow2(max(n, 1024))
    if widths:
        # a kernel needs at least two grid steps per width
        need = 2 * half / (min(widths) / 2.0) + 1
        if need > npts:
            npts = _next_pow2(need)
    return Grid1D(packet.x0 - half, packet.x0 + half, npts)


def synthesize(spec: StateSpec, grid: Grid1D, constants: Constants = NATURAL_UNITS) -> WaveFunction:
    """Sample the normalized Gaussian packet ``(2 pi sigma^2)^(-1/4) exp(-(x-x0)^2/4sigma^2) exp(ikx)``."""
    packet = spec.as_packet(constants)
    reach = COVERAGE_SIGMAS * packet.sigma
    if grid.x_min > packet.x0 - reach or grid.x_max < packet.x0 + reach:
        raise GridTooSmallError(
            f"grid [{grid.x_min}, {grid.x_max}] must cover x0 +- {COVERAGE_SIGMAS:g} sigma "
            f"= [{packet.x0 - reach}, {packet.x0 + reach}]"
        )
    x = grid.points
    amp = (2.0 * math.pi * packet.sigma**2) ** -0.25
    modulus = amp * np.exp(-((x - packet.x0) ** 2) / (4.0 * packet.sigma**2))
    return WaveFunction(grid, modulus, packet.k * x)


def fields_from_wavefunction(psi: WaveFunction, constants: Constants = NATURAL_UNITS) -> ProbabilityFields:
    rho = psi.modulus**2
    j = (constants.hbar / constants.mass) * rho * psi.grid.derivative(psi.phase)
    return ProbabilityFields(psi.grid, rho, j)


def phase_gradient(
    fields: ProbabilityFields,
    constants: Constants = NATURAL_UNITS,
    cutoff: float = PHASE_CUTOFF,
) -> np.ndarray:
    """``(m/hbar) j / rho`` on the supported region, zero elsewhere.

    Raises
    ------
    IllDefinedPhaseError
        If the current is non-negligible where the density is below the cutoff.
    """
    rho, j = fields.rho, fields.j
    rho_max = rho.max(initial=0.0)
    support = rho > max(cutoff * rho_max, RHO_FLOOR)
    j_max = np.abs(j).max(initial=0.0)
    if j_max > 0 and np.any(np.abs(j[~support]) > PHASE_CURRENT_TOL * j_max):
        raise IllDefinedPhaseError("current is non-negligible where the density vanishes")
    v = np.zeros_like(rho)
    v[support] = (constants.mass / constants.hbar) * j[support] / np.maximum(rho[support], RHO_FLOOR)
    return v


def wavefunction_from_fields(
    fields: ProbabilityFields,
    constants: Constants = NATURAL_UNITS,
    cutoff: float = PHASE_CUTOFF,
) -> WaveFunction:
    """Rebuild ``psi`` from ``(rho, j)``.

    The phase is the running integral of ``(m/hbar) j / rho``. Its global
    offset is fixed to zero at the density maximum: anchoring at the grid
    edge would make the phase across the bulk a large number whose round-off
    survives differentiation.
    """
    v = phase_gradient(fields, constants, cutoff)
    phase = fields.grid.cumulative_integral(v, anchor=int(np.argmax(fields.rho)))
    return WaveFunction(fields.grid, np.sqrt(fields.rho), phase)


def total_probability(fields: ProbabilityFields) -> float:
    return fields.grid.integrate(fields.rho)


def total_current(fields: ProbabilityFields) -> float:
    return fields.grid.integrate(fields.j)


def momentum_density(
    psi: WaveFunction,
    constants: Constants = NATURAL_UNITS,
    oversample: int = 16,
) -> tuple[np.ndarray, np.ndarray]:
    """Momentum-space probability density of ``psi`` on an ascending momentum grid.

    ``psi`` is zero-padded to ``oversample`` times its length before the FFT so
    the momentum grid is fine enough for interpolation and sampling. The
    density is normalized to unit trapezoidal integral.
    """
    grid = psi.grid
    nfft = _next_pow2(oversample * grid.n)
    spectrum = np.fft.fft(psi.samples, n=nfft)
    p = 2.0 * math.pi * constants.hbar * np.fft.fftfreq(nfft, d=grid.dx)
    order = np.argsort(p)
    p = p[order]
    dens = np.abs(spectrum[order]) ** 2
    dens /= num.trapezoid(dens, p[1] - p[0])
    return p, dens
