"""Uniform-grid quadrature and finite-difference helpers.

Derivatives use centered stencils of configurable accuracy in the interior and
one-sided stencils of the same width near the edges. The cumulative integral is
built from per-cell integrals of a local interpolating polynomial with the same
stencil width, so that differentiating a cumulative integral returns the
integrand to the scheme's order.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial

import numpy as np

DEFAULT_ACCURACY = 8


@lru_cache(maxsize=None)
def fd_weights(offsets: tuple[int, ...], deriv: int) -> np.ndarray:
    """Weights ``c`` with ``f^(deriv)(0) ~ sum(c[m] * f(offsets[m]))`` for unit spacing."""
    offs = np.asarray(offsets, dtype=float)
    npts = len(offs)
    if deriv >= npts:
        raise ValueError(f"need more than {deriv} points for derivative order {deriv}")
    vander = np.vander(offs, npts, increasing=True).T
    rhs = np.zeros(npts)
    rhs[deriv] = factorial(deriv)
    w = np.linalg.solve(vander, rhs)
    w.flags.writeable = False
    return w


@lru_cache(maxsize=None)
def cell_weights(offsets: tuple[int, ...]) -> np.ndarray:
    """Weights ``c`` with ``int_0^1 f(t) dt ~ sum(c[m] * f(offsets[m]))``."""
    offs = np.asarray(offsets, dtype=float)
    npts = len(offs)
    vander = np.vander(offs, npts, increasing=True).T
    moments = 1.0 / np.arange(1, npts + 1)
    w = np.linalg.solve(vander, moments)
    w.flags.writeable = False
    return w


def _check_accuracy(accuracy: int) -> int:
    if accuracy < 2 or accuracy % 2:
        raise ValueError("accuracy must be an even integer >= 2")
    return accuracy


def derivative(f: np.ndarray, dx: float, deriv: int = 1, accuracy: int = DEFAULT_ACCURACY) -> np.ndarray:
    """Finite-difference derivative of samples ``f`` on a uniform grid.

    Parameters
    ----------
    f : ndarray
        Real or complex samples.
    dx : float
        Grid spacing.
    deriv : int
        Derivative order (1 or 2).
    accuracy : int
        Formal order of the centered interior stencil.

    Returns
    -------
    ndarray
        Derivative samples, same shape and dtype kind as ``f``.
    """
    if deriv not in (1, 2):
        raise ValueError("only first and second derivatives are supported")
    _check_accuracy(accuracy)
    f = np.asarray(f)
    n = f.shape[0]
    half = accuracy // 2
    # one-sided stencils need one extra point to keep the order for deriv=2
    width = 2 * half + 1 + (deriv - 1)
    if n < width:
        raise ValueError(f"need at least {width} samples, got {n}")

    out = np.zeros_like(f, dtype=np.result_type(f.dtype, float))
    centre = fd_weights(tuple(range(-half, half + 1)), deriv)
    # differences against the centre sample annihilate constants exactly
    mid = f[half:n - half]
    for m in range(1, half + 1):
        right = f[half + m:n - half + m]
        left = f[half - m:n - half - m]
        if deriv == 1:
            out[half:n - half] += 0.5 * (centre[half + m] - centre[half - m]) * (right - left)
        else:
            out[half:n - half] += 0.5 * (centre[half + m] + centre[half - m]) * ((right - mid) + (left - mid))

    for i in list(range(half)) + list(range(n - half, n)):
        start = min(max(i - half, 0), n - width)
        offsets = tuple(range(start - i, start - i + width))
        w = fd_weights(offsets, deriv)
        out[i] = np.dot(w, f[start:start + width] - f[i])
    return out / dx**deriv


def cumulative_integral(
    f: np.ndarray, dx: float, accuracy: int = DEFAULT_ACCURACY, anchor: int = 0
) -> np.ndarray:
    """Running integral of ``f``, zero at sample ``anchor``.

    Each cell ``[x_i, x_{i+1}]`` is integrated exactly for the degree
    ``accuracy - 1`` polynomial through the nearest ``accuracy`` samples.
    Sums accumulate outward from ``anchor``, so values near the anchor carry
    no round-off from distant cells.
    """
    _check_accuracy(accuracy)
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    if n < accuracy:
        raise ValueError(f"need at least {accuracy} samples, got {n}")
    half = accuracy // 2
    cells = np.zeros(n - 1)

    lo, hi = half - 1, n - half  # cells with a centered stencil
    w = cell_weights(tuple(range(-(half - 1), half + 1)))
    if hi > lo:
        for m, c in zip(range(-(half - 1), half + 1), w):
            cells[lo:hi] += c * f[lo + m:hi + m]
    for i in list(range(0, min(lo, n - 1))) + list(range(max(hi, 0), n - 1)):
        start = min(max(i - (half - 1), 0), n - accuracy)
        offsets = tuple(range(start - i, start - i + accuracy))
        cells[i] = np.dot(cell_weights(offsets), f[start:start + accuracy])

    if not 0 <= anchor < n:
        raise ValueError(f"anchor {anchor} outside [0, {n})")
    cells *= dx
    out = np.zeros(n)
    np.cumsum(cells[anchor:], out=out[anchor + 1:])
    out[:anchor] = -np.cumsum(cells[:anchor][::-1])[::-1]
    return out


def trapezoid(f: np.ndarray, dx: float) -> float | complex:
    """Trapezoidal rule on a uniform grid."""
    f = np.asarray(f)
    total = f.sum() - 0.5 * (f[0] + f[-1])
    return (total * dx).item()
