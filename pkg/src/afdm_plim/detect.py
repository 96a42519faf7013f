"""LMMSE equalization and PLIM symbol detection.

Two detectors recover ``(z, s)`` from the equalized chirp-domain vector:

* ``ml_detect`` minimizes ``||x(z, s) - x_hat||^2`` exactly over all valid
  codewords.  The squared distance splits over subcarriers, so the best PSK
  point is found per subcarrier for each power level and the power pattern
  then reduces to picking the subcarriers with the smallest
  ``cost_high - cost_low`` margin (``U/2`` of them per block in grouped
  mode).
* ``lc_detect`` thresholds received power against its mean (ungrouped) or
  marks the ``U/2`` strongest subcarriers of each block as high (grouped),
  then rescales and demodulates the PSK symbols.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import CapabilityError, DomainError, InputLengthError
from .plim import PlimConfig, plim_decode_im, psk_constellation, psk_demodulate

__all__ = [
    "DetectionResult",
    "lmmse_equalize",
    "ml_detect",
    "lc_detect",
    "count_errors",
    "nearest_psk",
    "select_smallest",
    "ML_MAX_GROUP",
]

# largest block size accepted by ml_detect; larger blocks go to lc_detect
ML_MAX_GROUP = 16


@dataclass(frozen=True)
class DetectionResult:
    z_hat: np.ndarray
    im_bits_hat: np.ndarray
    psk_bits_hat: np.ndarray
    im_errors: Optional[int] = None
    psk_errors: Optional[int] = None
    total_errors: Optional[int] = None
    erased_blocks: int = 0

    def scored(self, im_bits, psk_bits) -> "DetectionResult":
        """Copy with error counts against the transmitted bits."""
        im_err = count_errors(im_bits, self.im_bits_hat)
        psk_err = count_errors(psk_bits, self.psk_bits_hat)
        return replace(self, im_errors=im_err, psk_errors=psk_err, total_errors=im_err + psk_err)


def count_errors(tx_bits, rx_bits) -> int:
    """Hamming distance between two equal-length bit sequences."""
    a = np.asarray(tx_bits).ravel()
    b = np.asarray(rx_bits).ravel()
    if a.shape != b.shape:
        raise InputLengthError(f"length mismatch: {a.size} vs {b.size}")
    return int(np.count_nonzero(a != b))


def lmmse_equalize(H_eff: np.ndarray, r_daft, noise_var: float) -> np.ndarray:
    """``(H^H H + noise_var I)^{-1} H^H r`` via a linear solve.

    ``r_daft`` may be a single vector or a stack of frames (one per row)
    sharing the same channel.
    """
    if noise_var < 0:
        raise DomainError(f"noise variance must be non-negative, got {noise_var}")
    H_eff = np.asarray(H_eff, dtype=complex)
    r = np.asarray(r_daft, dtype=complex)
    L = H_eff.shape[1]
    if r.shape[-1] != H_eff.shape[0]:
        raise InputLengthError(f"received length {r.shape[-1]} does not match channel {H_eff.shape}")
    Hh = H_eff.conj().T
    gram = Hh @ H_eff
    gram[np.diag_indices(L)] += noise_var
    rhs = Hh @ r.T
    # singular gram at zero noise raises LinAlgError for the caller
    x_hat = scipy.linalg.solve(gram, rhs, assume_a="pos" if noise_var > 0 else "gen")
    return x_hat.T


def nearest_psk(x_hat, amplitude: float, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-entry minimum ``|x - amplitude * c_m|^2`` over the PSK points and its index."""
    x = np.asarray(x_hat, dtype=complex)
    dist = np.abs(x[..., None] - amplitude * psk_constellation(M)) ** 2
    idx = np.argmin(dist, axis=-1)
    return np.take_along_axis(dist, idx[..., None], axis=-1)[..., 0], idx


def select_smallest(score: np.ndarray, n_blocks: int, k: int) -> np.ndarray:
    """Indicator of the ``k`` smallest scores in each block; ties keep the earlier index."""
    score = np.asarray(score).reshape(n_blocks, -1)
    order = np.argsort(score, axis=1, kind="stable")[:, :k]
    z = np.zeros(score.shape, dtype=np.uint8)
    np.put_along_axis(z, order, 1, axis=1)
    return z.ravel()


def _check_frame(x_hat, cfg: PlimConfig) -> np.ndarray:
    x = np.asarray(x_hat, dtype=complex).ravel()
    if x.size != cfg.L:
        raise InputLengthError(f"expected {cfg.L} equalized symbols, got {x.size}")
    return x


def _result(z_hat, psk_bits, cfg, truth, im_bits=None, erased=0) -> DetectionResult:
    if im_bits is None:
        im_bits = plim_decode_im(z_hat, cfg)
    res = DetectionResult(z_hat=z_hat, im_bits_hat=im_bits, psk_bits_hat=psk_bits,
                          erased_blocks=erased)
    return res.scored(*truth) if truth is not None else res


def ml_detect(x_hat, cfg: PlimConfig, truth=None) -> DetectionResult:
    """Maximum-likelihood PLIM detection on the equalized vector.

    ``truth=(im_bits, psk_bits)`` fills in the error counts.  Grouped
    configurations with ``U > ML_MAX_GROUP`` raise :class:`CapabilityError`.
    """
    if cfg.grouped and cfg.group_size > ML_MAX_GROUP:
        raise CapabilityError(
            f"ml_detect supports group sizes up to {ML_MAX_GROUP}, got U={cfg.group_size}; "
            "use lc_detect for larger blocks"
        )
    x = _check_frame(x_hat, cfg)
    a_lo, a_hi = cfg.amplitudes
    cost_lo, idx_lo = nearest_psk(x, a_lo, cfg.M)
    cost_hi, idx_hi = nearest_psk(x, a_hi, cfg.M)
    margin = cost_hi - cost_lo
    if cfg.grouped:
        z = select_smallest(margin, cfg.n_groups, cfg.group_size // 2)
    else:
        z = (margin <= 0).astype(np.uint8)
    idx = np.where(z == 1, idx_hi, idx_lo)
    psk_bits = psk_demodulate(psk_constellation(cfg.M)[idx], cfg.M)
    return _result(z, psk_bits, cfg, truth)


def lc_detect(x_hat, cfg: PlimConfig, truth=None, rule: str = "sort") -> DetectionResult:
    """Low-complexity power-threshold detection.

    ``rule="sort"`` (grouped mode) declares the ``U/2`` strongest entries of
    each block high.  ``rule="global"`` applies the mean-power threshold to
    every subcarrier regardless of grouping; grouped blocks that come out
    unbalanced are erased (their IM bits decode as zeros).
    """
    if rule not in ("sort", "global"):
        raise DomainError(f"unknown threshold rule {rule!r}")
    x = _check_frame(x_hat, cfg)
    p = np.abs(x) ** 2
    im_bits, erased = None, 0
    if cfg.grouped and rule == "sort":
        z = select_smallest(-p, cfg.n_groups, cfg.group_size // 2)
    else:
        z = (p >= p.mean()).astype(np.uint8)
        if cfg.grouped:
            blocks = z.reshape(cfg.n_groups, cfg.group_size)
            ok = blocks.sum(axis=1) * 2 == cfg.group_size
            erased = int(np.count_nonzero(~ok))
            k = cfg.im_bits_per_block
            im_bits = np.zeros(cfg.n_im_bits, dtype=np.uint8)
            for g in np.flatnonzero(ok):
                sub = PlimConfig(cfg.group_size, cfg.M, cfg.beta, cfg.group_size)
                im_bits[g * k:(g + 1) * k] = plim_decode_im(blocks[g], sub)
    a_lo, a_hi = cfg.amplitudes
    s_hat = x / np.where(z == 1, a_hi, a_lo)
    return _result(z, psk_demodulate(s_hat, cfg.M), cfg, truth, im_bits, erased)
