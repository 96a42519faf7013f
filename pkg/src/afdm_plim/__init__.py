"""AFDM with subcarrier power-level index modulation: transmit chain,
doubly dispersive channel, detectors and radar-sensing metrics."""
from .afdm import AfdmParams, afdm_demodulate, afdm_modulate, daft_matrix, select_c1
from .channel import (
    ChannelRealization,
    PathSpec,
    RandomChannelProfile,
    apply_channel,
    channel_matrix,
    effective_channel,
)
from .detect import DetectionResult, count_errors, lc_detect, lmmse_equalize, ml_detect
from .errors import CapabilityError, ConfigError, DomainError, InputLengthError
from .plim import (
    PlimCodeword,
    PlimConfig,
    RateReport,
    balanced_pattern_rank,
    balanced_pattern_unrank,
    data_rates,
    plim_encode,
    psk_demodulate,
    psk_modulate,
)
from .sensing import (
    AmbiguitySurface,
    SensingScenario,
    ambiguity_function,
    estimate_range,
    fmcw_waveform,
    nmae,
    zero_delay_cut,
    zero_doppler_cut,
)
from .waveforms import TxFrame, make_waveform, transmit

__version__ = "0.1.0"
