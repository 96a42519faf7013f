"""Experiment configuration and its INI-file representation.

A config file is plain ``key = value`` INI.  Every key is optional::

    [experiment]
    seed = 2025
    waveform = AFDM-PLIM          ; AFDM | AFDM-IM | AFDM-PLIM | FMCW
    detector = lc                 ; ml | lc
    lc_rule = sort                ; sort | global
    trials = 500
    frames_per_trial = 1
    sweep = 0:20:2                ; start:stop:step (inclusive) or a comma list, dB
                                  ; default: 0:20:2 for ber, -20:10:5 for range
    z_active = 64                 ; AFDM-IM active subcarriers (default L/2)

    [plim]
    L = 128
    M = 4
    beta = 0.5
    group_size = 8                ; or "none" for ungrouped

    [afdm]
    nu_max = 2.0
    xi = 1
    c2 = auto                     ; auto -> 0

    [channel]
    model = random                ; random | fixed
    n_paths = 3
    max_delay = 8
    path0 = 0.8, 0.0, 0, 0.0      ; fixed model: gain_re, gain_im, delay, doppler

    [sensing]
    range_m = 150
    sample_rate_hz = 100e6
    bandwidth_hz = 100e6
    carrier_hz = 2.4e9
    noise_var = 1.0
    listen_factor = 2

    [af]
    payloads = 100
    max_delay_bins = 127
    doppler_bins = 128
    doppler_zoom = 1.0

    [rate]
    group_sizes = 2, 4, 8, 16, 32, 64, 128
    psk_orders = 2, 4, 8
"""
from __future__ import annotations

import configparser
import math
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..afdm import AfdmParams
from ..channel import PathSpec, RandomChannelProfile, normalize_gains, paths_from_section
from ..errors import ConfigError, DomainError
from ..plim import PlimConfig
from ..sensing import SensingScenario
from ..waveforms import DETECTORS, WAVEFORMS

__all__ = [
    "ExperimentConfig",
    "AfSettings",
    "RateSettings",
    "WORKERS_ENV",
    "DEFAULT_SWEEPS",
    "parse_sweep",
    "load_config",
    "worker_count",
]

WORKERS_ENV = "AFDM_PLIM_WORKERS"

DEFAULT_SWEEPS = {
    "ber": tuple(float(v) for v in range(0, 21, 2)),
    "range": (-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0),
}


@dataclass(frozen=True)
class AfSettings:
    payloads: int = 100
    max_delay_bins: int = 127
    doppler_bins: int = 128
    doppler_zoom: float = 1.0


@dataclass(frozen=True)
class RateSettings:
    group_sizes: tuple = (2, 4, 8, 16, 32, 64, 128)
    psk_orders: tuple = (2, 4, 8)


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 2025
    waveform: str = "AFDM-PLIM"
    detector: str = "lc"
    lc_rule: str = "sort"
    plim: PlimConfig = field(default_factory=lambda: PlimConfig(128, 4, 0.5, 8))
    z_active: Optional[int] = None
    nu_max: float = 2.0
    xi: int = 1
    c2: Optional[float] = None
    channel: Union[RandomChannelProfile, tuple] = field(default_factory=RandomChannelProfile)
    sweep: Optional[tuple] = None
    trials: int = 200
    frames_per_trial: int = 1
    sensing: SensingScenario = field(default_factory=SensingScenario)
    af: AfSettings = field(default_factory=AfSettings)
    rate: RateSettings = field(default_factory=RateSettings)

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.frames_per_trial < 1:
            raise ConfigError("frames_per_trial must be >= 1")
        if self.sweep is not None:
            if not self.sweep:
                raise ConfigError("sweep must not be empty")
            if any(b <= a for a, b in zip(self.sweep, self.sweep[1:])):
                raise ConfigError(f"sweep must be strictly increasing, got {self.sweep}")
        if self.waveform not in WAVEFORMS:
            raise ConfigError(f"unknown waveform {self.waveform!r}; expected one of {WAVEFORMS}")
        if self.detector not in DETECTORS:
            raise ConfigError(f"unknown detector {self.detector!r}; expected one of {DETECTORS}")
        if self.lc_rule not in ("sort", "global"):
            raise ConfigError(f"unknown lc_rule {self.lc_rule!r}")
        if isinstance(self.channel, tuple):
            if not self.channel:
                raise ConfigError("fixed channel needs at least one path")
            for p in self.channel:
                if not 0 <= p.delay_samples < self.plim.L:
                    raise ConfigError(f"path delay {p.delay_samples} outside [0, {self.plim.L})")
        elif self.channel.max_delay >= self.plim.L:
            raise ConfigError(f"max_delay {self.channel.max_delay} must be below L={self.plim.L}")

    def sweep_for(self, experiment: str) -> tuple:
        """The configured sweep, or the experiment's default grid."""
        if self.sweep is not None:
            return tuple(self.sweep)
        return DEFAULT_SWEEPS[experiment]

    @property
    def afdm(self) -> AfdmParams:
        try:
            return AfdmParams.for_channel(self.plim.L, self.nu_max, self.xi, self.c2)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    def with_overrides(self, **kw) -> "ExperimentConfig":
        """Copy with top-level fields replaced; ``beta``/``group_size``/``L``/``M`` reach into ``plim``."""
        plim_kw = {k: kw.pop(k) for k in ("L", "M", "beta", "group_size") if k in kw}
        cfg = self
        if plim_kw:
            try:
                cfg = replace(cfg, plim=replace(cfg.plim, **plim_kw))
            except DomainError as exc:
                raise ConfigError(str(exc)) from None
        return replace(cfg, **kw) if kw else cfg

    def to_dict(self) -> dict:
        d = asdict(self)
        if isinstance(self.channel, tuple):
            d["channel"] = {"model": "fixed", "paths": [
                [p.gain.real, p.gain.imag, p.delay_samples, p.doppler_norm] for p in self.channel]}
        else:
            d["channel"] = {"model": "random", **asdict(self.channel)}
        if self.sweep is not None:
            d["sweep"] = [_json_float(v) for v in self.sweep]
        return d


def _json_float(v: float):
    return "inf" if math.isinf(v) else v


def parse_sweep(text: str) -> tuple:
    """``"a:b:step"`` (inclusive of ``b``) or ``"v1, v2, ..."``; ``inf`` is allowed in lists."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0:
                raise ValueError("expected start:stop:step with step > 0")
            start, stop, step = parts
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = tuple(float(np.round(start + i * step, 12)) for i in range(max(n, 0)))
        else:
            values = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"bad sweep {text!r}: {exc}") from None
    if not values:
        raise ConfigError(f"sweep {text!r} is empty")
    return values


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}: {exc}") from None


def _optional_int(text: str) -> Optional[int]:
    return None if text.strip().lower() in ("none", "", "ungrouped") else int(text)


def _optional_float(text: str) -> Optional[float]:
    return None if text.strip().lower() in ("auto", "none", "") else float(text)


def load_config(path) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from an INI file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    path = Path(path)
    if not parser.read(path):
        raise ConfigError(f"cannot read config file {path}")
    try:
        return _from_parser(parser)
    except (ValueError, DomainError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from None


def _from_parser(p: configparser.ConfigParser) -> ExperimentConfig:
    base = ExperimentConfig()
    kw = {}
    if p.has_section("experiment"):
        s = p["experiment"]
        if "seed" in s:
            kw["seed"] = int(s["seed"])
        for key in ("waveform", "detector", "lc_rule"):
            if key in s:
                kw[key] = s[key].strip()
        if "trials" in s:
            kw["trials"] = int(s["trials"])
        if "frames_per_trial" in s:
            kw["frames_per_trial"] = int(s["frames_per_trial"])
        if "sweep" in s:
            kw["sweep"] = parse_sweep(s["sweep"])
        if "z_active" in s:
            kw["z_active"] = _optional_int(s["z_active"])

    plim = base.plim
    if p.has_section("plim"):
        s = p["plim"]
        plim = PlimConfig(
            L=int(s.get("L", plim.L)),
            M=int(s.get("M", plim.M)),
            beta=float(s.get("beta", plim.beta)),
            group_size=_optional_int(s["group_size"]) if "group_size" in s else plim.group_size,
        )
    kw["plim"] = plim

    if p.has_section("afdm"):
        s = p["afdm"]
        if "nu_max" in s:
            kw["nu_max"] = float(s["nu_max"])
        if "xi" in s:
            kw["xi"] = int(s["xi"])
        if "c2" in s:
            kw["c2"] = _optional_float(s["c2"])

    nu_max = kw.get("nu_max", base.nu_max)
    channel = RandomChannelProfile(nu_max=nu_max)
    if p.has_section("channel"):
        s = p["channel"]
        model = s.get("model", "random").strip()
        if model == "fixed":
            paths = paths_from_section(s)
            if not paths:
                raise ConfigError("fixed channel model needs pathN entries")
            if s.getboolean("normalize", True):
                gains = normalize_gains([q.gain for q in paths])
                paths = [PathSpec(complex(g), q.delay_samples, q.doppler_norm) for g, q in zip(gains, paths)]
            channel = tuple(paths)
        elif model == "random":
            channel = RandomChannelProfile(
                n_paths=int(s.get("n_paths", channel.n_paths)),
                max_delay=int(s.get("max_delay", channel.max_delay)),
                nu_max=float(s.get("nu_max", nu_max)),
            )
        else:
            raise ConfigError(f"unknown channel model {model!r}")
    kw["channel"] = channel

    if p.has_section("sensing"):
        s = p["sensing"]
        d = base.sensing
        kw["sensing"] = SensingScenario(
            true_range_m=float(s.get("range_m", d.true_range_m)),
            sample_rate_hz=float(s.get("sample_rate_hz", d.sample_rate_hz)),
            bandwidth_hz=float(s.get("bandwidth_hz", d.bandwidth_hz)),
            carrier_hz=float(s.get("carrier_hz", d.carrier_hz)),
            noise_var=float(s.get("noise_var", d.noise_var)),
            listen_factor=int(s.get("listen_factor", d.listen_factor)),
        )
    if p.has_section("af"):
        s = p["af"]
        d = base.af
        kw["af"] = AfSettings(
            payloads=int(s.get("payloads", d.payloads)),
            max_delay_bins=int(s.get("max_delay_bins", d.max_delay_bins)),
            doppler_bins=int(s.get("doppler_bins", d.doppler_bins)),
            doppler_zoom=float(s.get("doppler_zoom", d.doppler_zoom)),
        )
    if p.has_section("rate"):
        s = p["rate"]
        d = base.rate
        kw["rate"] = RateSettings(
            group_sizes=_int_list(s["group_sizes"]) if "group_sizes" in s else d.group_sizes,
            psk_orders=_int_list(s["psk_orders"]) if "psk_orders" in s else d.psk_orders,
        )
    return ExperimentConfig(**kw)


def worker_count(default: int = 1) -> int:
    """Worker processes requested through ``AFDM_PLIM_WORKERS``."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or not raw.strip():
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1, got {n}")
    return n
