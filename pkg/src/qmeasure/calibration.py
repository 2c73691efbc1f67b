"""Recover kernel widths from out-reading spreads of a known in-state.

``gamma`` follows algebraically from the position spread. ``lam`` enters the
momentum spread only through ``(s^2 + l^2)(s^2 + 2 g^2 - l^2)``, which is
symmetric in ``l^2`` about ``g^2``: the spread falls on ``[0, gamma]`` and
rises on ``[gamma, sqrt(sigma^2 + 2 gamma^2))``. A target value can therefore
have one root on each branch; the caller chooses the branch when it matters.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
from scipy.optimize import bisect

from .errors import (
    AmbiguousWidthError,
    InfeasibleObservationError,
    OutOfRangeError,
    UnidentifiableError,
)
from .oracle import ScenarioParams, momentum_spread

RESIDUAL_TOL = 1e-10
BRANCHES = ("lower", "upper")


def fit_gamma(std_x_out: float, sigma: float) -> float:
    if std_x_out < sigma * (1 - 1e-9):
        raise InfeasibleObservationError(
            f"observed position spread {std_x_out} is below the intrinsic width {sigma}"
        )
    return math.sqrt(max(std_x_out**2 - sigma**2, 0.0))


def _spread(p: ScenarioParams, lam: float) -> float:
    return momentum_spread(replace(p, lam=lam), "derived")


def _branch_bracket(p: ScenarioParams, branch: str) -> tuple[float, float]:
    lam_max = 10.0 * p.sigma
    if branch == "lower":
        return 0.0, min(p.gamma, lam_max)
    # stay strictly inside the domain, where the spread diverges
    edge = math.sqrt(p.sigma**2 + 2 * p.gamma**2)
    return min(p.gamma, lam_max), min(edge * (1 - 1e-9), lam_max)


def _check_monotone(p: ScenarioParams, lo: float, hi: float, increasing: bool) -> None:
    probe = np.array([_spread(p, lam) for lam in np.linspace(lo, hi, 65)])
    steps = np.diff(probe)
    slack = 1e-12 * np.abs(probe).max()
    ok = np.all(steps >= -slack) if increasing else np.all(steps <= slack)
    if not ok:
        raise UnidentifiableError(f"momentum spread is not monotone on [{lo}, {hi}]")


def _solve_branch(p: ScenarioParams, target: float, branch: str) -> float | None:
    lo, hi = _branch_bracket(p, branch)
    if hi <= lo:
        return lo if abs(_spread(p, lo) - target) <= RESIDUAL_TOL else None
    _check_monotone(p, lo, hi, increasing=(branch == "upper"))
    f_lo, f_hi = _spread(p, lo) - target, _spread(p, hi) - target
    if abs(f_lo) <= RESIDUAL_TOL:
        return lo
    if abs(f_hi) <= RESIDUAL_TOL:
        return hi
    if f_lo * f_hi > 0:
        return None
    root = bisect(lambda lam: _spread(p, lam) - target, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    if abs(_spread(p, root) - target) > RESIDUAL_TOL:
        return None
    return root


def fit_lambda(std_p_out: float, p: ScenarioParams, branch: str | None = None) -> float:
    """Current-kernel width reproducing ``std_p_out`` for the fixed ``p.gamma``.

    Parameters
    ----------
    std_p_out : float
        Observed out-reading momentum spread.
    p : ScenarioParams
        In-state and density-kernel width; ``p.lam`` is ignored.
    branch : {"lower", "upper"}, optional
        Restrict the search to ``lam <= gamma`` or ``lam >= gamma``.

    Raises
    ------
    UnidentifiableError
        If ``k == 0`` (the spread does not depend on ``lam``).
    AmbiguousWidthError
        If no branch is given and both branches hold distinct roots.
    OutOfRangeError
        If no width in range reproduces the observation.
    """
    if p.k == 0:
        raise UnidentifiableError("with k = 0 the momentum spread does not depend on lam")
    if branch is not None and branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    branches = BRANCHES if branch is None else (branch,)
    roots = {b: _solve_branch(p, std_p_out, b) for b in branches}
    found = [r for r in roots.values() if r is not None]
    if not found:
        raise OutOfRangeError(f"no current-kernel width reproduces std_p = {std_p_out}")
    if len(found) == 2 and abs(found[0] - found[1]) > 1e-6 * p.sigma:
        raise AmbiguousWidthError(
            f"std_p = {std_p_out} is matched by lam = {found[0]:.10g} and lam = {found[1]:.10g}; "
            "pass branch='lower' or branch='upper'",
            found,
        )
    return found[0]
