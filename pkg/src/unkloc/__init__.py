"""Estimation of periodic bandlimited fields from noise-corrupted samples
taken at unknown locations generated by a renewal process."""

from .bandwidth import BandwidthConfig, DetectionOutcome, detect_bandwidth, threshold_coefficient
from .errors import ConfigError
from .estimator import (
    CoefficientEstimate,
    energy_estimate,
    estimate_coefficient,
    estimate_field,
    riemann_coefficient,
)
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    FieldSource,
    RenewalFamily,
    SlopeFit,
    fit_loglog_slope,
    run,
    run_trial,
)
from .field import BandlimitedField, distortion, random_field, reference_field
from .noise import NoiseSpec, draw, moments
from .sampling import (
    RenewalSpec,
    SampleTrace,
    acquire,
    draw_spacing,
    generate_trace,
    grid_deviation,
    spawn_rngs,
    trial_seed,
)

__version__ = "0.1.0"

__all__ = [
    "BandlimitedField",
    "BandwidthConfig",
    "CoefficientEstimate",
    "ConfigError",
    "DetectionOutcome",
    "ExperimentConfig",
    "ExperimentResult",
    "FieldSource",
    "NoiseSpec",
    "RenewalFamily",
    "RenewalSpec",
    "SampleTrace",
    "SlopeFit",
    "acquire",
    "detect_bandwidth",
    "distortion",
    "draw",
    "draw_spacing",
    "energy_estimate",
    "estimate_coefficient",
    "estimate_field",
    "fit_loglog_slope",
    "generate_trace",
    "grid_deviation",
    "moments",
    "random_field",
    "reference_field",
    "riemann_coefficient",
    "run",
    "run_trial",
    "spawn_rngs",
    "threshold_coefficient",
    "trial_seed",
]
