"""Joint beampattern and waveform synthesis for MIMO radar with low-resolution phase-only DACs."""

__version__ = "0.1.0"

from .config import (
    ConfigError,
    Constellation,
    DesiredPattern,
    RadarConfig,
    build_constellation,
    build_flat_pattern,
    load_config,
    make_config,
    validate_config,
)
from .estimator import WaveformSynthesizer
from .gamp import DivergenceError, SynthesisResult, cost, gamp_step, initial_state, optimal_beta, optimal_s, solve
from .metrics import MetricsReport, compute_report, correlations, directional_psd, directional_waveforms, psd, radiation_pattern
from .operator import BeamOperator, build_operator, build_steering_set, steering_vector

__all__ = [
    "__version__",
    "ConfigError",
    "Constellation",
    "DesiredPattern",
    "RadarConfig",
    "build_constellation",
    "build_flat_pattern",
    "load_config",
    "make_config",
    "validate_config",
    "WaveformSynthesizer",
    "DivergenceError",
    "SynthesisResult",
    "cost",
    "gamp_step",
    "initial_state",
    "optimal_beta",
    "optimal_s",
    "solve",
    "MetricsReport",
    "compute_report",
    "correlations",
    "directional_psd",
    "directional_waveforms",
    "psd",
    "radiation_pattern",
    "BeamOperator",
    "build_operator",
    "build_steering_set",
    "steering_vector",
]
