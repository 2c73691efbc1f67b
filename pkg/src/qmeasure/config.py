"""Flat ``section.key = value`` scenario configuration.

Example::

    # reference packet through two half-width kernels
    state.kind = gaussian
    state.sigma = 1
    state.k = 2
    kernel.gamma = 0.5
    kernel.lambda = 0.5
    sampling.n_trials = 100000
    sampling.seed = 7

Blank lines and ``#`` comments are ignored. Unknown keys are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError, QMeasureError
from .kernels import KernelSpec, kernel_from_width
from .state_fields import Constants, GaussianPacket, OscillatorGround, StateSpec


def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def _int(text: str) -> int:
    return int(text)


def _kind(text: str) -> str:
    if text not in ("gaussian", "oscillator"):
        raise ValueError("must be 'gaussian' or 'oscillator'")
    return text


def _float_list(text: str) -> tuple[float, ...]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(_float(t) for t in items)


def _branch(text: str) -> str:
    if text not in ("lower", "upper"):
        raise ValueError("must be 'lower' or 'upper'")
    return text


SCHEMA = {
    "state.kind": _kind,
    "state.x0": _float,
    "state.sigma": _float,
    "state.k": _float,
    "state.omega": _float,
    "constants.hbar": _float,
    "constants.mass": _float,
    "kernel.gamma": _float,
    "kernel.lambda": _float,
    "grid.n": _int,
    "grid.span_factor": _float,
    "sampling.n_trials": _int,
    "sampling.seed": _int,
    "sampling.n_bins": _int,
    "output.dir": str,
    "sweep.gamma": _float_list,
    "sweep.lambda": _float_list,
    "calibrate.std_x_out": _float,
    "calibrate.std_p_out": _float,
    "calibrate.branch": _branch,
}


@dataclass(frozen=True)
class SamplingConfig:
    n_trials: int = 100_000
    seed: int = 0
    n_bins: int = 64


@dataclass(frozen=True)
class ScenarioConfig:
    state: StateSpec = field(default_factory=GaussianPacket)
    constants: Constants = field(default_factory=Constants)
    gamma: float = 0.0
    lam: float = 0.0
    grid_n: int | None = None
    span_factor: float = 10.0
    sampling: SamplingConfig | None = None
    output_dir: str | None = None
    sweep_gamma: tuple[float, ...] | None = None
    sweep_lambda: tuple[float, ...] | None = None
    observed_std_x: float | None = None
    observed_std_p: float | None = None
    branch: str | None = None

    @property
    def omega(self) -> float | None:
        return self.state.omega if isinstance(self.state, OscillatorGround) else None

    @property
    def gamma_kernel(self) -> KernelSpec:
        return kernel_from_width(self.gamma)

    @property
    def lambda_kernel(self) -> KernelSpec:
        return kernel_from_width(self.lam)

    def with_widths(self, gamma: float, lam: float) -> "ScenarioConfig":
        return replace(self, gamma=gamma, lam=lam)


def parse_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = SCHEMA[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return values


def build_config(values: dict) -> ScenarioConfig:
    kind = values.get("state.kind", "gaussian")
    state_keys = {k for k in values if k.startswith("state.") and k != "state.kind"}
    allowed = {"state.omega"} if kind == "oscillator" else {"state.x0", "state.sigma", "state.k"}
    extra = state_keys - allowed
    if extra:
        raise ConfigError(f"keys {sorted(extra)} do not apply to state.kind = {kind}")
    try:
        if kind == "oscillator":
            state = OscillatorGround(values.get("state.omega", 1.0))
        else:
            state = GaussianPacket(
                values.get("state.x0", 0.0), values.get("state.sigma", 1.0), values.get("state.k", 0.0)
            )
        constants = Constants(values.get("constants.hbar", 1.0), values.get("constants.mass", 1.0))
        gamma = values.get("kernel.gamma", 0.0)
        lam = values.get("kernel.lambda", 0.0)
        for width in (gamma, lam, *values.get("sweep.gamma", ()), *values.get("sweep.lambda", ())):
            if width < 0:
                raise ConfigError(f"kernel widths must be non-negative, got {width}")
            kernel_from_width(width)
    except QMeasureError as exc:
        raise ConfigError(str(exc)) from None

    sampling = None
    if any(k.startswith("sampling.") for k in values):
        sampling = SamplingConfig(
            values.get("sampling.n_trials", SamplingConfig.n_trials),
            values.get("sampling.seed", SamplingConfig.seed),
            values.get("sampling.n_bins", SamplingConfig.n_bins),
        )
        if sampling.n_trials < 2 or sampling.n_bins < 1:
            raise ConfigError("sampling needs n_trials >= 2 and n_bins >= 1")
    grid_n = values.get("grid.n")
    if grid_n is not None and grid_n < 16:
        raise ConfigError("grid.n must be at least 16")
    span = values.get("grid.span_factor", 10.0)
    if span <= 0:
        raise ConfigError("grid.span_factor must be positive")

    return ScenarioConfig(
        state=state,
        constants=constants,
        gamma=gamma,
        lam=lam,
        grid_n=grid_n,
        span_factor=span,
        sampling=sampling,
        output_dir=values.get("output.dir"),
        sweep_gamma=values.get("sweep.gamma"),
        sweep_lambda=values.get("sweep.lambda"),
        observed_std_x=values.get("calibrate.std_x_out"),
        observed_std_p=values.get("calibrate.std_p_out"),
        branch=values.get("calibrate.branch"),
    )


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return build_config(parse_text(text))
