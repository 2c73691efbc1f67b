"""Apply measurement kernels to the density and the current."""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve

from .errors import GridMismatchError
from .kernels import DiscretizedKernel, KernelSpec, discretize
from .state_fields import Grid1D, ProbabilityFields

METHODS = ("direct", "fft")


def apply_kernel(kernel: DiscretizedKernel, values: np.ndarray, method: str = "direct") -> np.ndarray:
    """``out[i] = sum_j w[i, j] * values[j] * dx``.

    ``"direct"`` sums the band explicitly and is the reference path; ``"fft"``
    uses an FFT convolution and is only trusted where tests show agreement.
    The ideal kernel returns a copy of ``values``.
    """
    values = np.asarray(values, dtype=float)
    if kernel.is_ideal:
        return values.copy()
    b = kernel.half_bandwidth
    if method == "direct":
        full = np.convolve(values, kernel.stencil, mode="full")
    elif method == "fft":
        full = fftconvolve(values, kernel.stencil, mode="full")
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return kernel.row_scale * full[b:b + len(values)] * kernel.grid.dx


def _same_grid(kernel: DiscretizedKernel, fields: ProbabilityFields) -> None:
    if kernel.grid != fields.grid:
        raise GridMismatchError(f"kernel grid {kernel.grid} differs from field grid {fields.grid}")


def transform_density(gamma_kernel: DiscretizedKernel, fields_in: ProbabilityFields, method: str = "direct") -> np.ndarray:
    _same_grid(gamma_kernel, fields_in)
    rho = apply_kernel(gamma_kernel, fields_in.rho, method)
    # the direct sum of non-negative terms cannot go negative; fft round-off can
    return np.clip(rho, 0.0, None)


def transform_current(lambda_kernel: DiscretizedKernel, fields_in: ProbabilityFields, method: str = "direct") -> np.ndarray:
    _same_grid(lambda_kernel, fields_in)
    return apply_kernel(lambda_kernel, fields_in.j, method)


def measure(
    fields_in: ProbabilityFields,
    gamma: KernelSpec,
    lam: KernelSpec,
    grid: Grid1D | None = None,
    method: str = "direct",
) -> ProbabilityFields:
    """Out-reading fields: ``gamma`` smooths the density, ``lam`` the current.

    The output shares the input grid.
    """
    grid = fields_in.grid if grid is None else grid
    if grid != fields_in.grid:
        raise GridMismatchError("measurement grid differs from the field grid")
    rho_out = transform_density(discretize(gamma, grid), fields_in, method)
    j_out = transform_current(discretize(lam, grid), fields_in, method)
    return ProbabilityFields(grid, rho_out, j_out)
