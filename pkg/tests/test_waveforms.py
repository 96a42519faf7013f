import math

import numpy as np
import pytest

from afdm_plim.afdm import AfdmParams, afdm_demodulate
from afdm_plim.errors import ConfigError, InputLengthError
from afdm_plim.plim import PlimConfig
from afdm_plim.waveforms import OnOffImWaveform, make_waveform, transmit

PLIM = PlimConfig(64, 4, 0.5, 8)


@pytest.mark.parametrize("name", ["AFDM", "AFDM-IM", "AFDM-PLIM"])
@pytest.mark.parametrize("detector", ["ml", "lc"])
def test_noiseless_loopback(name, detector):
    wf = make_waveform(name, PLIM)
    p = AfdmParams.for_channel(64)
    rng = np.random.default_rng(0)
    for _ in range(50):
        f = transmit(wf, p, rng)
        assert np.allclose(afdm_demodulate(f.y, p), f.x)
        res = wf.detect(afdm_demodulate(f.y, p), detector, f.im_bits, f.psk_bits)
        assert res.total_errors == 0


def test_on_off_frame_shape():
    wf = OnOffImWaveform(128, 4)
    assert wf.Z == 64
    assert wf.n_im_bits == math.comb(128, 64).bit_length() - 1 == 124
    f = transmit(wf, AfdmParams.for_channel(128), np.random.default_rng(1))
    assert np.count_nonzero(f.x) == 64
    assert np.mean(np.abs(f.x) ** 2) == pytest.approx(1.0)


def test_unit_average_power_all_formats():
    rng = np.random.default_rng(2)
    for name in ("AFDM", "AFDM-IM", "AFDM-PLIM"):
        wf = make_waveform(name, PLIM)
        p = np.mean([np.mean(np.abs(transmit(wf, AfdmParams.for_channel(64), rng).x) ** 2)
                     for _ in range(200)])
        assert p == pytest.approx(1.0, abs=0.02)


def test_make_waveform_rejects_fmcw():
    with pytest.raises(ConfigError):
        make_waveform("FMCW", PLIM)


def test_bad_detector_and_lengths():
    wf = make_waveform("AFDM-PLIM", PLIM)
    with pytest.raises(ConfigError):
        wf.detect(np.ones(64), "zf")
    with pytest.raises(InputLengthError):
        make_waveform("AFDM", PLIM).encode([1], np.zeros(128))
    with pytest.raises(ConfigError):
        OnOffImWaveform(16, 4, Z=0)
