"""Discrete affine Fourier transform (DAFT) and AFDM (de)modulation.

The DAFT matrix is ``A = Lambda(c1) F Lambda(c2)`` with the unitary DFT ``F``
and chirp diagonals ``Lambda(c) = diag(exp(-j 2 pi c n^2))``.  Modulation
applies ``A^H`` and demodulation applies ``A``; both run as one FFT plus two
elementwise phase multiplies and act along the last axis, so a stack of
frames can be passed as a 2-D array.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InputLengthError

__all__ = [
    "AfdmParams",
    "select_c1",
    "chirp_phases",
    "daft_matrix",
    "afdm_modulate",
    "afdm_demodulate",
]


def select_c1(nu_max: float, xi: int, L: int) -> float:
    """First chirp rate ``(2 (nu_max + xi) + 1) / (2 L)``.

    ``nu_max`` is the maximum digital Doppler (Doppler in cycles/sample
    times ``L``) and ``xi`` the Doppler guard.
    """
    if nu_max < 0:
        raise DomainError(f"nu_max must be non-negative, got {nu_max}")
    if not 0 <= xi < 5:
        raise DomainError(f"guard xi must satisfy 0 <= xi < 5, got {xi}")
    return (2.0 * (nu_max + xi) + 1.0) / (2.0 * L)


@dataclass(frozen=True)
class AfdmParams:
    L: int
    c1: float
    c2: float

    def __post_init__(self):
        if self.L < 2:
            raise DomainError(f"AFDM needs L >= 2, got {self.L}")

    @classmethod
    def for_channel(cls, L: int, nu_max: float = 2.0, xi: int = 1,
                    c2: Optional[float] = None) -> "AfdmParams":
        """Chirp rates tuned to a channel with maximum digital Doppler ``nu_max``.

        ``c2`` defaults to 0: with cyclic channel delays only an L-periodic
        time-side chirp keeps the effective channel exact, and 0 is the only
        such rate below ``1 / (2 L)``.
        """
        if c2 is None:
            c2 = 0.0
        return cls(L=L, c1=select_c1(nu_max, xi, L), c2=c2)


def chirp_phases(c: float, L: int) -> np.ndarray:
    """Diagonal of ``Lambda(c)``."""
    n = np.arange(L, dtype=np.float64)
    # reduce the cycle count before exponentiating to keep full precision
    return np.exp(-2j * np.pi * np.mod(c * n * n, 1.0))


def daft_matrix(params: AfdmParams) -> np.ndarray:
    """Dense ``L x L`` DAFT matrix; the fast routines are preferred for signals."""
    L = params.L
    k = np.arange(L)
    F = np.exp(-2j * np.pi * np.outer(k, k) / L) / np.sqrt(L)
    return chirp_phases(params.c1, L)[:, None] * F * chirp_phases(params.c2, L)[None, :]


def _check(v, L: int) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim == 0 or v.shape[-1] != L:
        raise InputLengthError(f"expected trailing length {L}, got shape {v.shape}")
    return v


def afdm_modulate(x, params: AfdmParams) -> np.ndarray:
    """Chirp domain to time domain: ``y = A^H x``."""
    L = params.L
    x = _check(x, L)
    inner = np.conj(chirp_phases(params.c1, L)) * x
    return np.conj(chirp_phases(params.c2, L)) * np.fft.ifft(inner, norm="ortho", axis=-1)


def afdm_demodulate(r, params: AfdmParams) -> np.ndarray:
    """Time domain to chirp domain: ``A r``."""
    L = params.L
    r = _check(r, L)
    inner = chirp_phases(params.c2, L) * r
    return chirp_phases(params.c1, L) * np.fft.fft(inner, norm="ortho", axis=-1)
