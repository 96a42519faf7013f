"""Doubly dispersive (delay + Doppler) channel model.

Delays are integer samples applied cyclically, which stands in for an ideal
chirp-periodic prefix.  Doppler shifts are in cycles per sample; the digital
Doppler used when choosing chirp rates is ``doppler_norm * L``.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .afdm import AfdmParams, afdm_demodulate
from .errors import ConfigError, DomainError

__all__ = [
    "PathSpec",
    "ChannelRealization",
    "RandomChannelProfile",
    "channel_matrix",
    "complex_normal",
    "apply_channel",
    "effective_channel",
    "realize_channel",
    "normalize_gains",
    "parse_path_line",
    "paths_from_section",
    "load_channel_profile",
]


@dataclass(frozen=True)
class PathSpec:
    gain: complex
    delay_samples: int
    doppler_norm: float = 0.0


@dataclass
class ChannelRealization:
    paths: tuple
    H: np.ndarray
    H_eff: np.ndarray
    noise_var: float = 0.0


@dataclass(frozen=True)
class RandomChannelProfile:
    """Random ``n_paths`` channel: uniform integer delays in ``[0, max_delay]``,
    uniform digital Doppler in ``[-nu_max, nu_max]`` and unit-energy complex
    Gaussian gains."""

    n_paths: int = 3
    max_delay: int = 8
    nu_max: float = 2.0

    def draw(self, rng: np.random.Generator, L: int) -> list[PathSpec]:
        if self.max_delay >= L:
            raise ConfigError(f"max_delay {self.max_delay} must be below L={L}")
        delays = rng.integers(0, self.max_delay + 1, size=self.n_paths)
        dopplers = rng.uniform(-self.nu_max, self.nu_max, size=self.n_paths) / L
        gains = normalize_gains(complex_normal(rng, self.n_paths))
        return [PathSpec(complex(g), int(d), float(f)) for g, d, f in zip(gains, delays, dopplers)]


def normalize_gains(gains) -> np.ndarray:
    gains = np.asarray(gains, dtype=complex)
    energy = np.sum(np.abs(gains) ** 2)
    if energy == 0:
        raise DomainError("channel has zero energy")
    return gains / np.sqrt(energy)


def channel_matrix(paths: Sequence[PathSpec], L: int) -> np.ndarray:
    """``H = sum_q gain_q * diag(exp(j 2 pi nu_q k)) * cyclic_shift(tau_q)``."""
    if len(paths) == 0:
        raise DomainError("at least one path is required")
    k = np.arange(L)
    H = np.zeros((L, L), dtype=complex)
    for p in paths:
        if not 0 <= p.delay_samples < L:
            raise DomainError(f"path delay {p.delay_samples} outside [0, {L})")
        if abs(p.doppler_norm) >= 0.5:
            raise DomainError(f"path Doppler {p.doppler_norm} must satisfy |nu| < 0.5")
        H[k, (k - p.delay_samples) % L] += p.gain * np.exp(2j * np.pi * p.doppler_norm * k)
    return H


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance circularly symmetric complex Gaussian samples."""
    w = rng.standard_normal((2,) + tuple(np.atleast_1d(shape)))
    return (w[0] + 1j * w[1]) * np.sqrt(0.5)


def apply_channel(H: np.ndarray, y, noise_var: float, rng: np.random.Generator) -> np.ndarray:
    """``r = H y + n`` with ``n ~ CN(0, noise_var I)``."""
    if noise_var < 0:
        raise DomainError(f"noise variance must be non-negative, got {noise_var}")
    y = np.asarray(y, dtype=complex)
    return H @ y + np.sqrt(noise_var) * complex_normal(rng, y.shape)


def effective_channel(H: np.ndarray, params: AfdmParams) -> np.ndarray:
    """Chirp-domain channel ``A H A^H``."""
    AH = afdm_demodulate(np.asarray(H, dtype=complex).T, params).T
    return np.conj(afdm_demodulate(np.conj(AH), params))


def realize_channel(paths: Sequence[PathSpec], params: AfdmParams,
                    noise_var: float = 0.0) -> ChannelRealization:
    H = channel_matrix(paths, params.L)
    return ChannelRealization(tuple(paths), H, effective_channel(H, params), noise_var)


# --- profile files -----------------------------------------------------------

def parse_path_line(text: str) -> PathSpec:
    """Parse ``"gain_re, gain_im, delay, doppler"`` into a :class:`PathSpec`."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ConfigError(f"path entry needs 4 comma-separated fields, got {text!r}")
    try:
        re_, im_, delay, doppler = float(parts[0]), float(parts[1]), int(parts[2]), float(parts[3])
    except ValueError as exc:
        raise ConfigError(f"bad path entry {text!r}: {exc}") from None
    return PathSpec(complex(re_, im_), delay, doppler)


def paths_from_section(section: Mapping[str, str]) -> list[PathSpec]:
    keys = sorted((k for k in section if k.startswith("path")), key=lambda k: (len(k), k))
    return [parse_path_line(section[k]) for k in keys]


def load_channel_profile(path, normalize: bool = True) -> list[PathSpec]:
    """Read a fixed path list from the ``[channel]`` section of an INI file.

    Each ``pathN`` key holds ``gain_re, gain_im, delay_samples, doppler``
    with Doppler in cycles per sample.
    """
    parser = configparser.ConfigParser()
    if not parser.read(Path(path)):
        raise ConfigError(f"cannot read channel profile {path}")
    if "channel" not in parser:
        raise ConfigError(f"{path}: missing [channel] section")
    paths = paths_from_section(parser["channel"])
    if not paths:
        raise ConfigError(f"{path}: no pathN entries in [channel]")
    if normalize:
        gains = normalize_gains([p.gain for p in paths])
        paths = [PathSpec(complex(g), p.delay_samples, p.doppler_norm) for g, p in zip(gains, paths)]
    return paths
