"""Quantum measurement modeled as linear transforms of probability density and current."""

from .calibration import fit_gamma, fit_lambda
from .estimators import (
    EstimatorSet,
    UncertaintyIndicators,
    estimate,
    rsur_margin,
    uncertainty_indicators,
)
from .kernels import GaussianKernel, IdealKernel, discretize, evaluate_kernel, kernel_from_width, verify_normalization
from .oracle import ScenarioParams, analytic_estimators, analytic_indicators, analytic_out_fields
from .sampling import (
    compare_fac_vs_prd,
    draw_momentum_samples,
    draw_position_samples,
    factual_estimators,
    joint_correlation,
    spectrum_estimators,
)
from .state_fields import (
    Constants,
    GaussianPacket,
    Grid1D,
    OscillatorGround,
    ProbabilityFields,
    WaveFunction,
    auto_grid,
    fields_from_wavefunction,
    make_grid,
    synthesize,
    total_probability,
    wavefunction_from_fields,
)
from .transform import measure, transform_current, transform_density

__version__ = "0.1.0"
