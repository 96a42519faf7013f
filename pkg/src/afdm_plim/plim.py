"""Power-level index modulation (PLIM) mapping and data-rate bookkeeping.

Each subcarrier carries one Gray-coded M-PSK symbol scaled by an amplitude
``sqrt(1 + beta)`` (IM bit 1) or ``sqrt(1 - beta)`` (IM bit 0).  In grouped
mode the subcarriers are split into blocks of ``U`` and every block holds
exactly ``U/2`` high-power entries; the block's IM bits select one of the
``C(U, U/2)`` balanced patterns through a lexicographic combinadic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import DomainError, InputLengthError

__all__ = [
    "PlimConfig",
    "PlimCodeword",
    "RateReport",
    "bits_per_symbol",
    "psk_constellation",
    "psk_modulate",
    "psk_demodulate",
    "pattern_rank",
    "pattern_unrank",
    "balanced_pattern_rank",
    "balanced_pattern_unrank",
    "bits_to_int",
    "int_to_bits",
    "plim_encode",
    "plim_decode_im",
    "data_rates",
    "random_bits",
]


def bits_per_symbol(M: int) -> int:
    k = int(M).bit_length() - 1
    if M < 2 or (1 << k) != M:
        raise DomainError(f"PSK order must be a power of two >= 2, got {M}")
    return k


@dataclass(frozen=True)
class PlimConfig:
    """Static parameters of an AFDM-PLIM frame.

    ``group_size=None`` selects ungrouped mode (one free IM bit per
    subcarrier).  Otherwise ``group_size`` is the block size ``U``.
    """

    L: int = 128
    M: int = 4
    beta: float = 0.5
    group_size: Optional[int] = None

    def __post_init__(self):
        if self.L < 1:
            raise DomainError(f"subcarrier count must be positive, got {self.L}")
        bits_per_symbol(self.M)
        if not 0.0 < self.beta < 1.0:
            raise DomainError(f"beta must lie in (0, 1), got {self.beta}")
        U = self.group_size
        if U is not None:
            if U < 2 or U % 2 or U > self.L or self.L % U:
                raise DomainError(
                    f"group size must be even, 2 <= U <= L and divide L; got U={U}, L={self.L}"
                )

    @property
    def grouped(self) -> bool:
        return self.group_size is not None

    @property
    def n_groups(self) -> int:
        return self.L // self.group_size if self.grouped else self.L

    @property
    def block_size(self) -> int:
        return self.group_size if self.grouped else 1

    @property
    def im_bits_per_block(self) -> int:
        if not self.grouped:
            return 1
        U = self.group_size
        return math.comb(U, U // 2).bit_length() - 1

    @property
    def n_im_bits(self) -> int:
        return self.n_groups * self.im_bits_per_block

    @property
    def n_psk_bits(self) -> int:
        return self.L * bits_per_symbol(self.M)

    @property
    def n_bits(self) -> int:
        return self.n_im_bits + self.n_psk_bits

    @property
    def amplitudes(self) -> tuple[float, float]:
        """(low, high) subcarrier amplitudes."""
        return math.sqrt(1.0 - self.beta), math.sqrt(1.0 + self.beta)


@dataclass(frozen=True)
class PlimCodeword:
    z: np.ndarray
    alpha: np.ndarray


@dataclass(frozen=True)
class RateReport:
    """Bits per frame for the three waveforms compared in the rate study."""

    r_gamma: float
    r_gamma_ungrouped: float
    r_gamma_stirling: float
    r_beta: float
    r_alpha: float
    im_payload_bits: int
    total_payload_bits: int


# --- PSK ---------------------------------------------------------------------

def _gray(m):
    return m ^ (m >> 1)


def psk_constellation(M: int) -> np.ndarray:
    """Points ``exp(j 2 pi m / M)`` indexed by phase index ``m``."""
    bits_per_symbol(M)
    return np.exp(2j * np.pi * np.arange(M) / M)


def _index_from_gray_table(M: int) -> np.ndarray:
    table = np.empty(M, dtype=np.int64)
    table[_gray(np.arange(M))] = np.arange(M)
    return table


def psk_modulate(bits, M: int) -> np.ndarray:
    """Gray-coded M-PSK mapping, ``log2(M)`` bits per symbol, MSB first."""
    k = bits_per_symbol(M)
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size % k:
        raise InputLengthError(f"{bits.size} bits is not a multiple of log2(M)={k}")
    words = bits.reshape(-1, k) @ (1 << np.arange(k - 1, -1, -1))
    return psk_constellation(M)[_index_from_gray_table(M)[words]]


def psk_demodulate(symbols, M: int) -> np.ndarray:
    """Nearest-point hard decision; ties go to the lower phase index."""
    k = bits_per_symbol(M)
    symbols = np.asarray(symbols, dtype=complex).ravel()
    dist = np.abs(symbols[:, None] - psk_constellation(M)[None, :])
    words = _gray(np.argmin(dist, axis=1))
    shifts = np.arange(k - 1, -1, -1)
    return ((words[:, None] >> shifts) & 1).astype(np.uint8).ravel()


# --- combinadic ----------------------------------------------------------------

def pattern_unrank(rank: int, n: int, k: int) -> np.ndarray:
    """The ``rank``-th length-``n`` pattern with ``k`` ones, lexicographic with 1 before 0."""
    total = math.comb(n, k)
    if not 0 <= rank < total:
        raise DomainError(f"rank {rank} outside [0, {total})")
    out = np.zeros(n, dtype=np.uint8)
    ones = k
    for pos in range(n):
        if ones == 0:
            break
        with_one = math.comb(n - pos - 1, ones - 1)
        if rank < with_one:
            out[pos] = 1
            ones -= 1
        else:
            rank -= with_one
    return out


def pattern_rank(pattern) -> int:
    """Inverse of :func:`pattern_unrank` for any binary pattern."""
    pattern = [int(b) for b in np.asarray(pattern).ravel()]
    if any(b not in (0, 1) for b in pattern):
        raise DomainError("pattern must be binary")
    n = len(pattern)
    ones = sum(pattern)
    rank = 0
    for pos, b in enumerate(pattern):
        if ones == 0:
            break
        if b:
            ones -= 1
        else:
            rank += math.comb(n - pos - 1, ones - 1)
    return rank


def balanced_pattern_unrank(rank: int, U: int) -> np.ndarray:
    if U < 2 or U % 2:
        raise DomainError(f"block size must be even and >= 2, got {U}")
    return pattern_unrank(rank, U, U // 2)


def balanced_pattern_rank(pattern) -> int:
    pattern = np.asarray(pattern).ravel()
    if pattern.size % 2 or int(np.sum(pattern)) * 2 != pattern.size:
        raise DomainError(f"pattern {pattern.tolist()} is not balanced")
    return pattern_rank(pattern)


# block sizes whose pattern counts fit comfortably in int64
_VECTOR_MAX_U = 64


@lru_cache(maxsize=None)
def _comb_table(U: int) -> np.ndarray:
    """``table[n, k] = C(n, k)`` for ``n < U``, ``k <= U/2`` (read-only, cached)."""
    table = np.array([[math.comb(n, k) for k in range(U // 2 + 1)] for n in range(U)], dtype=np.int64)
    table.flags.writeable = False
    return table


# block sizes small enough for full pattern lookup tables
_TABLE_MAX_U = 16


@lru_cache(maxsize=None)
def _pattern_tables(U: int) -> tuple[np.ndarray, np.ndarray]:
    """All balanced patterns in rank order and a packed-key -> rank map (-1 if unbalanced)."""
    patterns = _block_unrank_loop(np.arange(math.comb(U, U // 2)), U)
    lookup = np.full(1 << U, -1, dtype=np.int64)
    lookup[patterns.astype(np.int64) @ _bit_weights(U)] = np.arange(patterns.shape[0])
    patterns.flags.writeable = False
    lookup.flags.writeable = False
    return patterns, lookup


def _block_unrank(ranks: np.ndarray, U: int) -> np.ndarray:
    """Vectorized :func:`balanced_pattern_unrank` over a batch of ranks."""
    if U <= _TABLE_MAX_U:
        return _pattern_tables(U)[0][ranks]
    return _block_unrank_loop(ranks, U)


def _block_rank(blocks: np.ndarray) -> np.ndarray:
    """Vectorized :func:`pattern_rank` over the rows of a balanced block array."""
    U = blocks.shape[-1]
    if U <= _TABLE_MAX_U:
        return _pattern_tables(U)[1][blocks.astype(np.int64) @ _bit_weights(U)]
    return _block_rank_loop(blocks)


def _block_unrank_loop(ranks: np.ndarray, U: int) -> np.ndarray:
    table = _comb_table(U)
    rank = ranks.astype(np.int64).copy()
    ones = np.full(rank.shape, U // 2, dtype=np.int64)
    out = np.zeros(rank.shape + (U,), dtype=np.uint8)
    for pos in range(U):
        live = ones > 0
        with_one = np.where(live, table[U - pos - 1, np.maximum(ones - 1, 0)], 0)
        take = live & (rank < with_one)
        out[..., pos] = take
        rank -= np.where(live & ~take, with_one, 0)
        ones -= take
    return out


def _block_rank_loop(blocks: np.ndarray) -> np.ndarray:
    U = blocks.shape[-1]
    table = _comb_table(U)
    ones = blocks.sum(axis=-1).astype(np.int64)
    rank = np.zeros(blocks.shape[:-1], dtype=np.int64)
    for pos in range(U):
        b = blocks[..., pos].astype(bool)
        live = ones > 0
        rank += np.where(live & ~b, table[U - pos - 1, np.maximum(ones - 1, 0)], 0)
        ones -= b
    return rank


def _bit_weights(k: int) -> np.ndarray:
    return np.left_shift(np.int64(1), np.arange(k - 1, -1, -1, dtype=np.int64))


def bits_to_int(bits) -> int:
    value = 0
    for b in np.asarray(bits).ravel():
        value = (value << 1) | int(b)
    return value


def int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> s) & 1 for s in range(width - 1, -1, -1)], dtype=np.uint8)


# --- frame mapping -------------------------------------------------------------

def _check_len(name: str, bits: np.ndarray, expected: int):
    if bits.size != expected:
        raise InputLengthError(f"{name}: expected {expected} bits, got {bits.size}")


def plim_encode(im_bits, psk_bits, cfg: PlimConfig) -> tuple[PlimCodeword, np.ndarray]:
    """Map IM and PSK bits to the chirp-domain vector ``x = sqrt(alpha) * s``."""
    im_bits = np.asarray(im_bits, dtype=np.uint8).ravel()
    psk_bits = np.asarray(psk_bits, dtype=np.uint8).ravel()
    _check_len("psk_bits", psk_bits, cfg.n_psk_bits)
    _check_len("im_bits", im_bits, cfg.n_im_bits)

    if cfg.grouped and cfg.group_size <= _VECTOR_MAX_U:
        U, k = cfg.group_size, cfg.im_bits_per_block
        ranks = im_bits.reshape(cfg.n_groups, k).astype(np.int64) @ _bit_weights(k)
        z = _block_unrank(ranks, U).ravel()
    elif cfg.grouped:
        U, k = cfg.group_size, cfg.im_bits_per_block
        z = np.concatenate([
            balanced_pattern_unrank(bits_to_int(chunk), U)
            for chunk in im_bits.reshape(cfg.n_groups, k)
        ])
    else:
        z = im_bits.copy()

    alpha = np.where(z == 1, 1.0 + cfg.beta, 1.0 - cfg.beta)
    s = psk_modulate(psk_bits, cfg.M)
    return PlimCodeword(z=z, alpha=alpha), np.sqrt(alpha) * s


def plim_decode_im(z_hat, cfg: PlimConfig) -> np.ndarray:
    """Recover IM payload bits from a detected indicator vector.

    In grouped mode every block must be balanced.  A balanced pattern whose
    rank lies beyond the payload range (``rank >= 2**k``) decodes to the
    largest payload value.
    """
    z_hat = np.asarray(z_hat, dtype=np.uint8).ravel()
    if z_hat.size != cfg.L:
        raise InputLengthError(f"expected {cfg.L} indicators, got {z_hat.size}")
    if not cfg.grouped:
        return z_hat.copy()
    k = cfg.im_bits_per_block
    top = (1 << k) - 1
    blocks = z_hat.reshape(cfg.n_groups, cfg.group_size)
    if np.any(blocks.sum(axis=1) * 2 != cfg.group_size):
        raise DomainError("detected indicator blocks are not balanced")
    if cfg.group_size <= _VECTOR_MAX_U:
        ranks = np.minimum(_block_rank(blocks), top)
        return ((ranks[:, None] >> np.arange(k - 1, -1, -1)) & 1).astype(np.uint8).ravel()
    return np.concatenate([int_to_bits(min(balanced_pattern_rank(b), top), k) for b in blocks])


# --- rates ---------------------------------------------------------------------

def data_rates(cfg: PlimConfig, Z: Optional[int] = None) -> RateReport:
    """Evaluate the AFDM, on-off AFDM-IM and AFDM-PLIM rate expressions.

    ``Z`` is the active-subcarrier count of the on-off baseline (default
    ``L/2``).  In ungrouped mode ``r_gamma`` and ``r_gamma_stirling`` both
    equal ``L log2 M + L``.
    """
    L, M = cfg.L, cfg.M
    Z = L // 2 if Z is None else Z
    if not 0 <= Z <= L:
        raise DomainError(f"active count Z={Z} outside [0, {L}]")
    log_m = math.log2(M)
    r_alpha = L * log_m
    r_ungrouped = L * log_m + L
    r_beta = Z * log_m + math.log2(math.comb(L, Z))
    if cfg.grouped:
        U, G = cfg.group_size, cfg.n_groups
        r_gamma = r_alpha + G * math.log2(math.comb(U, U // 2))
        r_stirling = r_ungrouped - 0.5 * G * math.log2(math.pi * U / 2)
    else:
        r_gamma = r_stirling = r_ungrouped
    return RateReport(
        r_gamma=r_gamma,
        r_gamma_ungrouped=r_ungrouped,
        r_gamma_stirling=r_stirling,
        r_beta=r_beta,
        r_alpha=r_alpha,
        im_payload_bits=cfg.n_im_bits,
        total_payload_bits=cfg.n_bits,
    )


def random_bits(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=n, dtype=np.uint8)

