"""Analytic and Monte Carlo symbol-error evaluation of reflecting-surface links."""

from .analytic import (
    AnalyticModel,
    QuadratureSpec,
    Regime,
    SaturationLaw,
    WaterfallLaw,
    asymptote,
    average_snr,
    cpep,
    db_to_linear,
    linear_to_db,
    mgf,
    qfunc,
    required_snr_db,
    sep_mpsk,
    sep_mqam,
    sep_upper_bound,
)
from .modulation import Constellation, ConstellationKind, DetectionResult, build_constellation, detect_ml
from .montecarlo import SweepPoint, SweepSpec, confidence_interval, run_sweep
from .rng import ChannelRealization, RngStream, sample_channel, sample_noise
from .schemes import EffectiveGain, Scheme, SchemeConfig, instantaneous_snr, reflector_phases, transmit

__version__ = "0.1.0"
