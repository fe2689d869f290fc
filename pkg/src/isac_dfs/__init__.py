"""Sensing-assisted Doppler shift estimation for OFDM ISAC links."""

from .core import (ConfigError, EstimateRecord, Mode, OfdmConfig, PreambleSpec,
                   RngStream, db_to_linear, gaussian_noise, validate_config)
from .estimator import (CorrelationSet, NoEstimateError, compensate, correlate,
                        crlb, estimate_pipeline, fine_estimate, generate_preamble,
                        log_likelihood, total_estimate, total_range)

__all__ = [
    "ConfigError", "CorrelationSet", "EstimateRecord", "Mode", "NoEstimateError",
    "OfdmConfig", "PreambleSpec", "RngStream", "compensate", "correlate", "crlb",
    "db_to_linear", "estimate_pipeline", "fine_estimate", "gaussian_noise",
    "generate_preamble", "log_likelihood", "total_estimate", "total_range",
    "validate_config",
]
