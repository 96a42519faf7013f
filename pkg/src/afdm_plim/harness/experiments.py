"""Seeded Monte Carlo runners for the rate, BER, ambiguity and range studies.

Every trial draws from its own random streams, keyed by ``(seed, trial,
purpose)``, so results do not depend on how trials are split across
workers.  Streams for channel, noise and payload are separate: waveforms
and detectors compared under the same seed see identical channels and
noise, and every sweep point reuses the same draws.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from ..afdm import afdm_demodulate
from ..channel import RandomChannelProfile, channel_matrix, complex_normal, effective_channel
from ..detect import ML_MAX_GROUP, lmmse_equalize
from ..errors import CapabilityError, ConfigError
from ..plim import PlimConfig, data_rates
from ..sensing import (
    AmbiguityCut,
    AmbiguitySurface,
    ambiguity_function,
    average_surfaces,
    estimate_range,
    fmcw_waveform,
    nmae,
    zero_delay_cut,
    zero_doppler_cut,
)
from ..waveforms import WAVEFORMS, make_waveform, transmit
from .config import ExperimentConfig, worker_count

__all__ = [
    "ResultRow",
    "AfResult",
    "trial_rng",
    "run_rate_table",
    "run_ber_sweep",
    "run_af",
    "run_range_sweep",
    "range_estimates",
    "snr_at_ber",
]

CHANNEL, NOISE, PAYLOAD = 0, 1, 2


@dataclass(frozen=True)
class ResultRow:
    label: str
    sweep_value: float
    metric: str
    value: float
    trials: int
    stderr: float


def trial_rng(seed: int, trial: int, purpose: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, purpose)))


def _stderr(samples: np.ndarray) -> float:
    samples = np.asarray(samples, dtype=float)
    if samples.size < 2:
        return 0.0
    return float(np.std(samples, ddof=1) / math.sqrt(samples.size))


def _map_trials(fn: Callable, cfg: ExperimentConfig, n_trials: int,
                workers: Optional[int]) -> list:
    """``[fn(cfg, t) for t in range(n_trials)]``, optionally across processes."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or n_trials < 2:
        return [fn(cfg, t) for t in range(n_trials)]
    chunk = max(1, n_trials // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, [cfg] * n_trials, range(n_trials), chunksize=chunk))


# --- rates -------------------------------------------------------------------

def run_rate_table(cfg: ExperimentConfig) -> list[ResultRow]:
    """Rate expressions over the configured PSK orders and block sizes.

    ``sweep_value`` is the block size (0 for ungrouped).  Each ``(M, U)``
    also gets an ``ordering_ok`` row (1 when ``r_beta < r_alpha < r_gamma``).
    """
    L = cfg.plim.L
    rows = []
    for M in cfg.rate.psk_orders:
        for U in (None,) + tuple(cfg.rate.group_sizes):
            if U is not None and (U > L or L % U or U % 2):
                raise ConfigError(f"group size {U} is invalid for L={L}")
            pc = PlimConfig(L, M, cfg.plim.beta, U)
            rep = data_rates(pc, cfg.z_active)
            label = f"M={M}"
            u = 0 if U is None else U
            for metric in ("r_gamma", "r_gamma_ungrouped", "r_gamma_stirling", "r_beta", "r_alpha"):
                rows.append(ResultRow(label, u, metric, getattr(rep, metric), 1, 0.0))
            rows.append(ResultRow(label, u, "im_payload_bits", float(rep.im_payload_bits), 1, 0.0))
            rows.append(ResultRow(label, u, "total_payload_bits", float(rep.total_payload_bits), 1, 0.0))
            ok = rep.r_beta < rep.r_alpha < rep.r_gamma
            rows.append(ResultRow(label, u, "ordering_ok", 1.0 if ok else 0.0, 1, 0.0))
    return rows


# --- BER -----------------------------------------------------------------------

def _noise_var(snr_db: float) -> float:
    return 0.0 if math.isinf(snr_db) and snr_db > 0 else 10.0 ** (-snr_db / 10.0)


def _draw_paths(cfg: ExperimentConfig, trial: int):
    if isinstance(cfg.channel, RandomChannelProfile):
        return cfg.channel.draw(trial_rng(cfg.seed, trial, CHANNEL), cfg.plim.L)
    return list(cfg.channel)


def _ber_trial(cfg: ExperimentConfig, trial: int) -> np.ndarray:
    """IM and PSK error counts, shape ``(len(sweep), 2)``, for one channel draw."""
    params = cfg.afdm
    wf = make_waveform(cfg.waveform, cfg.plim, cfg.z_active, cfg.lc_rule)
    payload_rng = trial_rng(cfg.seed, trial, PAYLOAD)
    frames = [transmit(wf, params, payload_rng) for _ in range(cfg.frames_per_trial)]
    H = channel_matrix(_draw_paths(cfg, trial), cfg.plim.L)
    H_eff = effective_channel(H, params)
    noise = complex_normal(trial_rng(cfg.seed, trial, NOISE), (cfg.frames_per_trial, cfg.plim.L))
    clean = np.stack([f.y for f in frames]) @ H.T

    sweep = cfg.sweep_for("ber")
    counts = np.zeros((len(sweep), 2), dtype=np.int64)
    for i, snr_db in enumerate(sweep):
        nv = _noise_var(snr_db)
        r = clean + math.sqrt(nv) * noise
        x_hat = lmmse_equalize(H_eff, afdm_demodulate(r, params), nv)
        for f, xh in zip(frames, x_hat):
            res = wf.detect(xh, cfg.detector, f.im_bits, f.psk_bits)
            counts[i, 0] += res.im_errors
            counts[i, 1] += res.psk_errors
    return counts


def run_ber_sweep(cfg: ExperimentConfig, workers: Optional[int] = None) -> list[ResultRow]:
    """BER of the configured waveform and detector over the SNR sweep.

    SNR is the per-subcarrier symbol energy over the noise variance
    (``1 / noise_var``; ``inf`` means noiseless).  Rows carry ``ber_im``,
    ``ber_psk`` and ``ber_total`` with per-trial standard errors.
    """
    if cfg.waveform == "FMCW":
        raise ConfigError("BER sweeps need a data-bearing AFDM waveform")
    U = cfg.plim.group_size
    if cfg.waveform == "AFDM-PLIM" and cfg.detector == "ml" and U is not None and U > ML_MAX_GROUP:
        raise CapabilityError(f"ml detector supports group sizes up to {ML_MAX_GROUP}, got {U}; use lc")
    wf = make_waveform(cfg.waveform, cfg.plim, cfg.z_active, cfg.lc_rule)
    cfg.afdm  # validates chirp parameters before any trial runs
    counts = np.stack(_map_trials(_ber_trial, cfg, cfg.trials, workers))  # (T, P, 2)
    n_im = wf.n_im_bits * cfg.frames_per_trial
    n_psk = wf.n_psk_bits * cfg.frames_per_trial
    label = f"{cfg.waveform}/{cfg.detector}"
    rows = []
    for i, snr in enumerate(cfg.sweep_for("ber")):
        im, psk = counts[:, i, 0], counts[:, i, 1]
        per_trial = {"ber_im": (im, n_im), "ber_psk": (psk, n_psk), "ber_total": (im + psk, n_im + n_psk)}
        for metric, (errs, nbits) in per_trial.items():
            if nbits == 0:
                continue
            rates = errs / nbits
            rows.append(ResultRow(label, snr, metric, float(errs.sum() / (nbits * cfg.trials)),
                                  cfg.trials, _stderr(rates)))
    return rows


def snr_at_ber(rows: Sequence[ResultRow], target: float, metric: str = "ber_total") -> float:
    """First SNR where the curve crosses ``target`` (log-BER linear interpolation); ``nan`` if never."""
    pts = sorted((r.sweep_value, r.value) for r in rows if r.metric == metric)
    for (s0, b0), (s1, b1) in zip(pts, pts[1:]):
        if b0 >= target > b1:
            if b1 <= 0:
                return s1
            t = (math.log10(b0) - math.log10(target)) / (math.log10(b0) - math.log10(b1))
            return s0 + t * (s1 - s0)
    return float("nan")


# --- ambiguity -----------------------------------------------------------------

@dataclass
class AfResult:
    surfaces: dict
    delay_cuts: dict
    doppler_cuts: dict
    per_payload: dict
    rows: list


def _frame(cfg: ExperimentConfig, waveform: str, trial: int) -> np.ndarray:
    s = cfg.sensing
    L = cfg.plim.L
    if waveform == "FMCW":
        return fmcw_waveform(s.bandwidth_hz, L / s.sample_rate_hz, s.sample_rate_hz)
    wf = make_waveform(waveform, cfg.plim, cfg.z_active, cfg.lc_rule)
    return transmit(wf, cfg.afdm, trial_rng(cfg.seed, trial, PAYLOAD)).y


def _af_trial(cfg: ExperimentConfig, trial: int) -> dict:
    a = cfg.af
    out = {}
    for name in WAVEFORMS:
        if name == "FMCW" and trial > 0:
            continue
        surf = ambiguity_function(_frame(cfg, name, trial), a.max_delay_bins, a.doppler_bins,
                                  a.doppler_zoom, cfg.sensing.sample_rate_hz)
        out[name] = surf
    return out


def run_af(cfg: ExperimentConfig, workers: Optional[int] = None) -> AfResult:
    """Ambiguity surfaces of all four waveforms.

    Data-bearing waveforms average ``|psi|`` over ``cfg.af.payloads`` random
    payloads (paired by payload index); FMCW is deterministic.  Rows hold
    per-payload sidelobe statistics of both cuts (mean over payloads with
    standard error) and ``sweep_value`` is unused (0).
    """
    if cfg.af.payloads < 1:
        raise ConfigError("af.payloads must be >= 1")
    if not 0 <= cfg.af.max_delay_bins < cfg.plim.L:
        raise ConfigError(f"af.max_delay_bins must lie in [0, {cfg.plim.L})")
    per_trial = _map_trials(_af_trial, cfg, cfg.af.payloads, workers)
    surfaces, dcuts, fcuts, per_payload, rows = {}, {}, {}, {}, []
    for name in WAVEFORMS:
        runs: list[AmbiguitySurface] = [t[name] for t in per_trial if name in t]
        avg = average_surfaces(runs)
        surfaces[name] = avg
        dcuts[name] = zero_doppler_cut(avg)
        fcuts[name] = zero_delay_cut(avg)
        stats = {
            "delay_mean_sidelobe_db": [], "delay_peak_sidelobe_db": [], "delay_sidelobe_std_db": [],
            "doppler_mean_sidelobe_db": [], "doppler_peak_sidelobe_db": [],
        }
        for s in runs:
            dc: AmbiguityCut = zero_doppler_cut(s)
            fc: AmbiguityCut = zero_delay_cut(s)
            stats["delay_mean_sidelobe_db"].append(dc.mean_sidelobe_db)
            stats["delay_peak_sidelobe_db"].append(dc.peak_sidelobe_db)
            stats["delay_sidelobe_std_db"].append(dc.sidelobe_std_db)
            stats["doppler_mean_sidelobe_db"].append(fc.mean_sidelobe_db)
            stats["doppler_peak_sidelobe_db"].append(fc.peak_sidelobe_db)
        per_payload[name] = {k: np.asarray(v) for k, v in stats.items()}
        for metric, vals in per_payload[name].items():
            rows.append(ResultRow(name, 0.0, metric, float(np.mean(vals)), len(runs), _stderr(vals)))
    return AfResult(surfaces, dcuts, fcuts, per_payload, rows)


# --- range -----------------------------------------------------------------------

def _range_trial(cfg: ExperimentConfig, trial: int) -> np.ndarray:
    """Range estimates, shape ``(len(WAVEFORMS), len(sweep))``."""
    base = cfg.sensing
    L = cfg.plim.L
    noise = complex_normal(trial_rng(cfg.seed, trial, NOISE), L * base.listen_factor)
    sweep = cfg.sweep_for("range")
    out = np.empty((len(WAVEFORMS), len(sweep)))
    for w, name in enumerate(WAVEFORMS):
        tx = base.tx_buffer(_frame(cfg, name, trial))
        for i, p_db in enumerate(sweep):
            scen = _with_power(base, p_db)
            out[w, i] = estimate_range(tx, scen.echo(tx, noise), base.sample_rate_hz)
    return out


def _with_power(s, p_db: float):
    return replace(s, tx_power_scale=10.0 ** (p_db / 20.0))


def run_range_sweep(cfg: ExperimentConfig, workers: Optional[int] = None) -> list[ResultRow]:
    """NMAE of the range estimate for every waveform over the transmit-power sweep (dB amplitude
    scale relative to unit noise variance).  All waveforms share noise draws per trial."""
    s = cfg.sensing
    if s.delay_samples >= cfg.plim.L:
        raise ConfigError(
            f"target at {s.true_range_m} m is {s.delay_samples} samples away, beyond the {cfg.plim.L}-sample frame")
    if s.true_range_m <= 0:
        raise ConfigError("range sweep needs a positive target range")
    est = range_estimates(cfg, workers)
    rows = []
    for w, name in enumerate(WAVEFORMS):
        for i, p_db in enumerate(cfg.sweep_for("range")):
            e = est[:, w, i]
            rel = np.abs(e - s.true_range_m) / s.true_range_m
            rows.append(ResultRow(name, p_db, "nmae", nmae(e, s.true_range_m), cfg.trials, _stderr(rel)))
    return rows


def range_estimates(cfg: ExperimentConfig, workers: Optional[int] = None) -> np.ndarray:
    """Raw range estimates in meters, shape ``(trials, len(WAVEFORMS), len(sweep))``."""
    return np.stack(_map_trials(_range_trial, cfg, cfg.trials, workers))
