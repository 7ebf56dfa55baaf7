"""Hologram-based channel sensing for holographic interference surfaces."""

from ._core import (
    ConfigError,
    DomainError,
    EstimationError,
    Error,
    Geometry,
    PairingError,
    User,
    __version__,
    beamscan,
    noise_sigma_for_snr,
    nmse_db,
    pattern,
    prony,
    psis,
    received_field,
    record,
    run_experiment,
    segment,
    separation_threshold,
    steering_vector,
    user_channel,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "EstimationError",
    "Error",
    "Geometry",
    "PairingError",
    "User",
    "__version__",
    "beamscan",
    "noise_sigma_for_snr",
    "nmse_db",
    "pattern",
    "prony",
    "psis",
    "received_field",
    "record",
    "run_experiment",
    "segment",
    "separation_threshold",
    "steering_vector",
    "user_channel",
]
