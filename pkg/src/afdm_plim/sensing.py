"""Radar-side metrics: discrete ambiguity function, FMCW reference chirp,
matched-filter range estimation and the normalized mean absolute error."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.signal

from .errors import DomainError, InputLengthError

__all__ = [
    "SPEED_OF_LIGHT",
    "AmbiguitySurface",
    "AmbiguityCut",
    "SensingScenario",
    "ambiguity_function",
    "average_surfaces",
    "zero_doppler_cut",
    "zero_delay_cut",
    "fmcw_waveform",
    "estimate_range",
    "nmae",
    "write_surface_csv",
    "delay_signal",
]

SPEED_OF_LIGHT = 299_792_458.0

_MAINLOBE_DB = -3.0
_DB_FLOOR = -300.0


@dataclass(frozen=True)
class AmbiguitySurface:
    """``|psi[d, m]|`` with delays (samples) on axis 0 and Doppler (cycles/sample) on axis 1."""

    magnitudes: np.ndarray
    delay_axis: np.ndarray
    doppler_axis: np.ndarray
    peak_value: float
    sample_rate_hz: Optional[float] = None

    @property
    def delay_seconds(self) -> np.ndarray:
        if self.sample_rate_hz is None:
            raise DomainError("surface has no sample rate")
        return self.delay_axis / self.sample_rate_hz

    @property
    def doppler_hz(self) -> np.ndarray:
        if self.sample_rate_hz is None:
            raise DomainError("surface has no sample rate")
        return self.doppler_axis * self.sample_rate_hz


@dataclass(frozen=True)
class AmbiguityCut:
    axis: np.ndarray
    values_db: np.ndarray
    mainlobe: np.ndarray
    mainlobe_width: float
    peak_sidelobe_db: float
    mean_sidelobe_db: float
    sidelobe_std_db: float


def ambiguity_function(x, max_delay_bins: int, doppler_bins: int, zoom: float = 1.0,
                       sample_rate_hz: Optional[float] = None) -> AmbiguitySurface:
    """Discrete ambiguity function ``sum_n x[n] conj(x[n-d]) exp(j 2 pi f_m n)``.

    Delays run over ``-max_delay_bins..max_delay_bins`` without wrap-around.
    Doppler bins sit at ``f_m = zoom * m / doppler_bins`` cycles/sample for
    ``m = -(doppler_bins // 2) .. doppler_bins // 2``, so an even bin count
    gains one bin to keep the grid symmetric about zero.
    """
    x = np.asarray(x, dtype=complex).ravel()
    N = x.size
    if N < 2:
        raise DomainError("ambiguity function needs at least two samples")
    if not 0 <= max_delay_bins < N:
        raise DomainError(f"max_delay_bins must lie in [0, {N}), got {max_delay_bins}")
    if doppler_bins < 1:
        raise DomainError("doppler_bins must be positive")

    delays = np.arange(-max_delay_bins, max_delay_bins + 1)
    half = doppler_bins // 2
    freqs = zoom * np.arange(-half, half + 1) / doppler_bins

    padded = np.concatenate([np.zeros(max_delay_bins, complex), x, np.zeros(max_delay_bins, complex)])
    n = np.arange(N)
    # lagged[i, n] = x[n - delays[i]] with zeros outside the frame
    lagged = padded[max_delay_bins + n[None, :] - delays[:, None]]
    products = x[None, :] * np.conj(lagged)
    steering = np.exp(2j * np.pi * np.outer(n, freqs))
    mags = np.abs(products @ steering)
    return AmbiguitySurface(
        magnitudes=mags,
        delay_axis=delays,
        doppler_axis=freqs,
        peak_value=float(mags[max_delay_bins, half]),
        sample_rate_hz=sample_rate_hz,
    )


def average_surfaces(surfaces: Sequence[AmbiguitySurface]) -> AmbiguitySurface:
    """Mean magnitude over surfaces sharing the same grid."""
    if not surfaces:
        raise DomainError("nothing to average")
    first = surfaces[0]
    mags = np.mean([s.magnitudes for s in surfaces], axis=0)
    d0 = int(np.flatnonzero(first.delay_axis == 0)[0])
    m0 = int(np.flatnonzero(first.doppler_axis == 0)[0])
    return AmbiguitySurface(mags, first.delay_axis, first.doppler_axis, float(mags[d0, m0]),
                            first.sample_rate_hz)


def _to_db(v: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.maximum(20.0 * np.log10(v), _DB_FLOOR)


def _crossing(lin: np.ndarray, origin: int, step: int, level: float) -> float:
    """Distance from the origin to where ``lin`` falls below ``level`` (linear interpolation)."""
    i = origin
    while 0 <= i + step < lin.size and lin[i + step] >= level:
        i += step
    if not 0 <= i + step < lin.size:
        return float(abs(i - origin))
    a, b = lin[i], lin[i + step]
    return abs(i - origin) + (a - level) / (a - b)


def _cut(axis: np.ndarray, profile: np.ndarray, peak: float) -> AmbiguityCut:
    if peak <= 0:
        raise DomainError("ambiguity peak is zero")
    lin = profile / peak
    origin = int(np.flatnonzero(axis == 0)[0])
    level = 10.0 ** (_MAINLOBE_DB / 20.0)
    lo = origin
    while lo - 1 >= 0 and lin[lo - 1] >= level:
        lo -= 1
    hi = origin
    while hi + 1 < lin.size and lin[hi + 1] >= level:
        hi += 1
    mainlobe = np.zeros(lin.size, dtype=bool)
    mainlobe[lo:hi + 1] = True
    width = _crossing(lin, origin, -1, level) + _crossing(lin, origin, 1, level)
    side = lin[~mainlobe]
    values_db = _to_db(lin)
    if side.size:
        peak_sl = float(values_db[~mainlobe].max())
        mean_sl = float(10.0 * np.log10(max(np.mean(side ** 2), 1e-30)))
        std_sl = float(np.std(values_db[~mainlobe]))
    else:
        peak_sl = mean_sl = -math.inf
        std_sl = 0.0
    return AmbiguityCut(axis, values_db, mainlobe, width, peak_sl, mean_sl, std_sl)


def zero_doppler_cut(surface: AmbiguitySurface) -> AmbiguityCut:
    """Delay profile at zero Doppler, normalized to 0 dB at the origin.

    The mainlobe is the contiguous run above -3 dB around zero delay; the
    sidelobe statistics cover every other bin (mean is taken over power).
    """
    m0 = np.flatnonzero(surface.doppler_axis == 0)
    if m0.size == 0:
        raise DomainError("surface has no zero-Doppler bin")
    return _cut(surface.delay_axis, surface.magnitudes[:, m0[0]], surface.peak_value)


def zero_delay_cut(surface: AmbiguitySurface) -> AmbiguityCut:
    """Doppler profile at zero delay, normalized like :func:`zero_doppler_cut`."""
    d0 = np.flatnonzero(surface.delay_axis == 0)
    if d0.size == 0:
        raise DomainError("surface has no zero-delay bin")
    return _cut(surface.doppler_axis, surface.magnitudes[d0[0], :], surface.peak_value)


def write_surface_csv(surface: AmbiguitySurface, path, label: Optional[str] = None) -> None:
    """Write ``delay_bin, doppler_bin, magnitude_db`` rows (0 dB at the origin)."""
    db = _to_db(surface.magnitudes / surface.peak_value)
    half = surface.doppler_axis.size // 2
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow((["waveform"] if label else []) + ["delay_bin", "doppler_bin", "magnitude_db"])
        for i, d in enumerate(surface.delay_axis):
            for j in range(surface.doppler_axis.size):
                w.writerow(([label] if label else []) + [int(d), j - half, f"{db[i, j]:.6f}"])


def fmcw_waveform(bandwidth_hz: float, duration_s: float, sample_rate_hz: float) -> np.ndarray:
    """Centered linear up-chirp ``exp(j pi (B / T) t^2)`` sampled at ``sample_rate_hz``."""
    if sample_rate_hz < bandwidth_hz:
        raise DomainError(f"sample rate {sample_rate_hz} Hz is below the sweep bandwidth {bandwidth_hz} Hz")
    if duration_s <= 0:
        raise DomainError("chirp duration must be positive")
    n = int(round(duration_s * sample_rate_hz))
    t = np.arange(n) / sample_rate_hz - duration_s / 2.0
    return np.exp(1j * np.pi * (bandwidth_hz / duration_s) * t * t)


def estimate_range(tx, rx, sample_rate_hz: float) -> float:
    """Matched-filter range estimate in meters.

    The correlation peak is searched over non-negative lags and refined with
    a three-point parabola on ``|correlation|``.
    """
    tx = np.asarray(tx, dtype=complex).ravel()
    rx = np.asarray(rx, dtype=complex).ravel()
    if tx.size != rx.size:
        raise InputLengthError(f"tx and rx lengths differ: {tx.size} vs {rx.size}")
    if not np.any(tx):
        raise DomainError("transmit buffer is all zeros")
    N = tx.size
    mag = np.abs(scipy.signal.correlate(rx, tx, mode="full", method="fft"))
    zero = N - 1  # index of lag 0
    k = zero + int(np.argmax(mag[zero:]))
    offset = 0.0
    if k + 1 < mag.size:
        y_m, y_0, y_p = mag[k - 1], mag[k], mag[k + 1]
        denom = y_m - 2.0 * y_0 + y_p
        if denom < 0:
            offset = 0.5 * (y_m - y_p) / denom
    tau = (k - zero + offset) / sample_rate_hz
    return SPEED_OF_LIGHT * tau / 2.0


def nmae(estimates, true_range: float) -> float:
    """``sum |estimate - true_range| / (N * true_range)``."""
    est = np.asarray(estimates, dtype=float).ravel()
    if true_range <= 0:
        raise DomainError("true range must be positive")
    if est.size == 0:
        raise DomainError("no estimates")
    return float(np.sum(np.abs(est - true_range)) / (est.size * true_range))


@dataclass(frozen=True)
class SensingScenario:
    """Single-target monostatic geometry.

    The receive window is ``listen_factor`` frames long; the transmit
    buffer is the frame followed by silence so that both buffers match.
    The echo sits at the exact round-trip delay, applied as a band-limited
    (FFT phase-ramp) shift of the padded buffer; whole-sample delays reduce
    to a plain zero-filled shift.
    """

    true_range_m: float = 150.0
    sample_rate_hz: float = 100e6
    bandwidth_hz: float = 100e6
    carrier_hz: float = 2.4e9
    tx_power_scale: float = 1.0
    noise_var: float = 1.0
    listen_factor: int = 2

    def __post_init__(self):
        if self.true_range_m < 0:
            raise DomainError("target range must be non-negative")
        if self.listen_factor < 1:
            raise DomainError("listen_factor must be >= 1")

    @property
    def range_bin_m(self) -> float:
        return SPEED_OF_LIGHT / (2.0 * self.sample_rate_hz)

    @property
    def delay_samples(self) -> float:
        return 2.0 * self.true_range_m / SPEED_OF_LIGHT * self.sample_rate_hz

    def tx_buffer(self, frame) -> np.ndarray:
        frame = np.asarray(frame, dtype=complex).ravel()
        out = np.zeros(frame.size * self.listen_factor, dtype=complex)
        out[:frame.size] = frame
        return out

    def echo(self, tx_buffer, noise) -> np.ndarray:
        """``a * delay(tx) + sqrt(noise_var) * noise``."""
        tx_buffer = np.asarray(tx_buffer, dtype=complex)
        return self.tx_power_scale * delay_signal(tx_buffer, self.delay_samples) + \
            math.sqrt(self.noise_var) * np.asarray(noise)


def delay_signal(x, delay: float) -> np.ndarray:
    """Delay ``x`` by ``delay`` samples inside its own buffer.

    Integer delays shift with zero fill; fractional delays use a linear
    phase ramp across the FFT of the buffer, which assumes the buffer has
    enough trailing silence to absorb the shift.
    """
    x = np.asarray(x, dtype=complex)
    if not 0 <= delay < x.size:
        raise DomainError(f"delay {delay} samples outside the {x.size}-sample window")
    d = int(delay)
    if d == delay:
        out = np.zeros_like(x)
        out[d:] = x[:x.size - d]
        return out
    f = np.fft.fftfreq(x.size)
    return np.fft.ifft(np.fft.fft(x) * np.exp(-2j * np.pi * f * delay))
