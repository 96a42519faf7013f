"""Chirp-domain payload formats compared in the experiments.

* ``AFDM``: plain M-PSK on every subcarrier.
* ``AFDM-IM``: on-off index modulation, ``Z`` active subcarriers chosen by a
  combinadic index and scaled by ``sqrt(L / Z)`` so the frame keeps unit
  average power.
* ``AFDM-PLIM``: power-level index modulation.

Each format draws random bits, builds ``x`` and detects from an equalized
vector with the ``"ml"`` or ``"lc"`` rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .afdm import AfdmParams, afdm_modulate
from .detect import DetectionResult, lc_detect, ml_detect, nearest_psk, select_smallest
from .errors import ConfigError, InputLengthError
from .plim import (
    PlimConfig,
    bits_per_symbol,
    bits_to_int,
    int_to_bits,
    pattern_rank,
    pattern_unrank,
    plim_encode,
    psk_constellation,
    psk_demodulate,
    psk_modulate,
    random_bits,
)

__all__ = [
    "WAVEFORMS",
    "TxFrame",
    "PskWaveform",
    "OnOffImWaveform",
    "PlimWaveform",
    "make_waveform",
    "transmit",
]

WAVEFORMS = ("AFDM", "AFDM-IM", "AFDM-PLIM", "FMCW")
DETECTORS = ("ml", "lc")


@dataclass(frozen=True)
class TxFrame:
    im_bits: np.ndarray
    psk_bits: np.ndarray
    x: np.ndarray
    y: np.ndarray


def _check_detector(detector: str):
    if detector not in DETECTORS:
        raise ConfigError(f"unknown detector {detector!r}; expected one of {DETECTORS}")


def _scored(z, im_hat, psk_hat, im_bits, psk_bits) -> DetectionResult:
    res = DetectionResult(z_hat=z, im_bits_hat=im_hat, psk_bits_hat=psk_hat)
    if im_bits is None:
        return res
    return res.scored(im_bits, psk_bits)


@dataclass(frozen=True)
class PskWaveform:
    L: int
    M: int
    name = "AFDM"

    @property
    def n_im_bits(self) -> int:
        return 0

    @property
    def n_psk_bits(self) -> int:
        return self.L * bits_per_symbol(self.M)

    def encode(self, im_bits, psk_bits) -> np.ndarray:
        if np.size(im_bits):
            raise InputLengthError("plain AFDM carries no IM bits")
        return psk_modulate(psk_bits, self.M)

    def detect(self, x_hat, detector: str = "ml", im_bits=None, psk_bits=None) -> DetectionResult:
        _check_detector(detector)
        empty = np.zeros(0, dtype=np.uint8)
        z = np.ones(self.L, dtype=np.uint8)
        return _scored(z, empty, psk_demodulate(x_hat, self.M),
                       None if psk_bits is None else empty, psk_bits)


@dataclass(frozen=True)
class OnOffImWaveform:
    L: int
    M: int
    Z: Optional[int] = None
    name = "AFDM-IM"

    def __post_init__(self):
        if self.Z is None:
            object.__setattr__(self, "Z", self.L // 2)
        if not 1 <= self.Z <= self.L:
            raise ConfigError(f"active count Z={self.Z} outside [1, {self.L}]")

    @property
    def n_im_bits(self) -> int:
        return math.comb(self.L, self.Z).bit_length() - 1

    @property
    def n_psk_bits(self) -> int:
        return self.Z * bits_per_symbol(self.M)

    @property
    def amplitude(self) -> float:
        return math.sqrt(self.L / self.Z)

    def encode(self, im_bits, psk_bits) -> np.ndarray:
        im_bits = np.asarray(im_bits, dtype=np.uint8).ravel()
        if im_bits.size != self.n_im_bits:
            raise InputLengthError(f"expected {self.n_im_bits} IM bits, got {im_bits.size}")
        active = pattern_unrank(bits_to_int(im_bits), self.L, self.Z).astype(bool)
        x = np.zeros(self.L, dtype=complex)
        x[active] = self.amplitude * psk_modulate(psk_bits, self.M)
        return x

    def detect(self, x_hat, detector: str = "ml", im_bits=None, psk_bits=None) -> DetectionResult:
        _check_detector(detector)
        x = np.asarray(x_hat, dtype=complex).ravel()
        if detector == "ml":
            cost_on, idx = nearest_psk(x, self.amplitude, self.M)
            z = select_smallest(cost_on - np.abs(x) ** 2, 1, self.Z)
            s = psk_constellation(self.M)[idx[z == 1]]
        else:
            z = select_smallest(-np.abs(x) ** 2, 1, self.Z)
            s = x[z == 1]
        top = (1 << self.n_im_bits) - 1
        im_hat = int_to_bits(min(pattern_rank(z), top), self.n_im_bits)
        return _scored(z, im_hat, psk_demodulate(s, self.M), im_bits, psk_bits)


@dataclass(frozen=True)
class PlimWaveform:
    cfg: PlimConfig
    lc_rule: str = "sort"
    name = "AFDM-PLIM"

    @property
    def L(self) -> int:
        return self.cfg.L

    @property
    def n_im_bits(self) -> int:
        return self.cfg.n_im_bits

    @property
    def n_psk_bits(self) -> int:
        return self.cfg.n_psk_bits

    def encode(self, im_bits, psk_bits) -> np.ndarray:
        return plim_encode(im_bits, psk_bits, self.cfg)[1]

    def detect(self, x_hat, detector: str = "ml", im_bits=None, psk_bits=None) -> DetectionResult:
        _check_detector(detector)
        truth = None if im_bits is None else (im_bits, psk_bits)
        if detector == "ml":
            return ml_detect(x_hat, self.cfg, truth)
        return lc_detect(x_hat, self.cfg, truth, rule=self.lc_rule)


def make_waveform(name: str, plim: PlimConfig, Z: Optional[int] = None, lc_rule: str = "sort"):
    """Payload format by name; ``FMCW`` carries no data and is rejected here."""
    if name == "AFDM":
        return PskWaveform(plim.L, plim.M)
    if name == "AFDM-IM":
        return OnOffImWaveform(plim.L, plim.M, Z)
    if name == "AFDM-PLIM":
        return PlimWaveform(plim, lc_rule)
    raise ConfigError(f"{name!r} is not a data-bearing AFDM waveform; expected one of {WAVEFORMS[:3]}")


def transmit(waveform, params: AfdmParams, rng: np.random.Generator) -> TxFrame:
    """Draw random payload bits and build the chirp-domain and time-domain frame."""
    im_bits = random_bits(rng, waveform.n_im_bits)
    psk_bits = random_bits(rng, waveform.n_psk_bits)
    x = waveform.encode(im_bits, psk_bits)
    return TxFrame(im_bits, psk_bits, x, afdm_modulate(x, params))
