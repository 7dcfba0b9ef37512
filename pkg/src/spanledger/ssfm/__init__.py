"""Single-channel split-step Fourier oracle for SPM accumulation."""
from .experiment import (
    CoherenceExtractionWarning,
    SimConfig,
    SimRun,
    SpmCalibration,
    calibrate_single_span_spm,
    extract_coherence,
    run_accumulation,
    run_averaged,
)
from .propagation import AdaptiveStep, FixedStep, amplify_noiseless, propagate_span, step_plan
from .receiver import equalize, measure_snr, receive_and_measure
from .transmitter import Signal, generate_waveform, random_symbols, rrc_response

__all__ = [
    "AdaptiveStep",
    "CoherenceExtractionWarning",
    "FixedStep",
    "Signal",
    "SimConfig",
    "SimRun",
    "SpmCalibration",
    "amplify_noiseless",
    "calibrate_single_span_spm",
    "equalize",
    "extract_coherence",
    "generate_waveform",
    "measure_snr",
    "propagate_span",
    "random_symbols",
    "receive_and_measure",
    "rrc_response",
    "run_accumulation",
    "run_averaged",
    "step_plan",
]
