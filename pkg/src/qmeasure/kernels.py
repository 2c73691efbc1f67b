"""Measurement-channel kernels and their discretization.

A translation-invariant kernel on a uniform grid is stored as a symmetric
stencil ``g[m]`` (``|m| <= half_bandwidth``) plus one scale factor per row.
The weight matrix is ``w[i, j] = row_scale[i] * g[i - j]`` for in-range
``j``; the row scale renormalizes rows truncated by the grid edge so every
row integrates to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidSpecError, NoPointwiseFormError, UnderResolvedKernelError
from .state_fields import Grid1D

BAND_WIDTHS = 8.0
MIN_STEPS_PER_WIDTH = 2.0


@dataclass(frozen=True)
class GaussianKernel:
    width: float

    def __post_init__(self):
        if not (math.isfinite(self.width) and self.width > 0):
            raise InvalidSpecError(f"kernel width must be positive and finite, got {self.width}")


@dataclass(frozen=True)
class IdealKernel:
    """Dirac kernel: the output reading equals the input reading."""


KernelSpec = Union[GaussianKernel, IdealKernel]


def kernel_from_width(width: float) -> KernelSpec:
    """Width 0 encodes the ideal kernel."""
    if width == 0:
        return IdealKernel()
    return GaussianKernel(float(width))


def evaluate_kernel(spec: KernelSpec, x, x_prime):
    if isinstance(spec, IdealKernel):
        raise NoPointwiseFormError("the ideal kernel has no pointwise density")
    d = np.asarray(x, dtype=float) - np.asarray(x_prime, dtype=float)
    w = spec.width
    value = np.exp(-(d**2) / (2.0 * w * w)) / (w * math.sqrt(2.0 * math.pi))
    return value if value.ndim else float(value)


@dataclass(frozen=True, eq=False)
class DiscretizedKernel:
    grid: Grid1D
    spec: KernelSpec
    stencil: np.ndarray
    row_scale: np.ndarray

    @property
    def half_bandwidth(self) -> int:
        return (len(self.stencil) - 1) // 2

    @property
    def is_ideal(self) -> bool:
        return isinstance(self.spec, IdealKernel)

    def dense(self) -> np.ndarray:
        """Materialize the full ``n x n`` weight matrix (for checks on small grids)."""
        n, b = self.grid.n, self.half_bandwidth
        offsets = np.arange(n)[:, None] - np.arange(n)[None, :]
        inside = np.abs(offsets) <= b
        w = np.zeros((n, n))
        w[inside] = self.stencil[offsets[inside] + b]
        return w * self.row_scale[:, None]

    def row_sums(self) -> np.ndarray:
        """``sum_j w[i, j] * dx`` for every row."""
        return self.row_scale * _band_sum(np.ones(self.grid.n), self.stencil) * self.grid.dx

    def column_sums(self) -> np.ndarray:
        """``sum_i w[i, j] * dx`` for every column."""
        # the stencil is symmetric, so correlation equals convolution
        return _band_sum(self.row_scale, self.stencil) * self.grid.dx


def _band_sum(f: np.ndarray, stencil: np.ndarray) -> np.ndarray:
    """``out[i] = sum_j stencil[i - j + b] * f[j]`` over in-range ``j``."""
    b = (len(stencil) - 1) // 2
    full = np.convolve(f, stencil, mode="full")
    return full[b:b + len(f)]


def discretize(spec: KernelSpec, grid: Grid1D) -> DiscretizedKernel:
    """Sample a kernel onto ``grid`` and renormalize each row to unit integral.

    Gaussian kernels are cut at ``BAND_WIDTHS`` widths. The ideal kernel
    becomes ``identity / dx``.

    Raises
    ------
    UnderResolvedKernelError
        If a Gaussian width is below two grid steps.
    """
    dx = grid.dx
    if isinstance(spec, IdealKernel):
        return DiscretizedKernel(grid, spec, np.array([1.0 / dx]), np.ones(grid.n))

    if spec.width < MIN_STEPS_PER_WIDTH * dx * (1 - 1e-12):
        raise UnderResolvedKernelError(
            f"kernel width {spec.width} is below {MIN_STEPS_PER_WIDTH:g} grid steps (dx={dx})"
        )
    b = min(int(math.ceil(BAND_WIDTHS * spec.width / dx)), grid.n - 1)
    m = np.arange(-b, b + 1)
    stencil = evaluate_kernel(spec, m * dx, 0.0)
    raw_rows = _band_sum(np.ones(grid.n), stencil) * dx
    return DiscretizedKernel(grid, spec, stencil, 1.0 / raw_rows)


@dataclass(frozen=True)
class NormalizationReport:
    max_row_defect: float
    max_col_defect: float
    max_edge_col_defect: float


def verify_normalization(k: DiscretizedKernel) -> NormalizationReport:
    """Row and column normalization defects ``|sum * dx - 1|``.

    ``max_col_defect`` covers columns farther than one band from either edge;
    ``max_edge_col_defect`` covers the rest and is informational only.
    """
    rows = np.abs(k.row_sums() - 1.0)
    cols = np.abs(k.column_sums() - 1.0)
    b = k.half_bandwidth
    n = k.grid.n
    interior = np.zeros(n, dtype=bool)
    interior[b:n - b] = True
    return NormalizationReport(
        max_row_defect=float(rows.max()),
        max_col_defect=float(cols[interior].max(initial=0.0)),
        max_edge_col_defect=float(cols[~interior].max(initial=0.0)),
    )
