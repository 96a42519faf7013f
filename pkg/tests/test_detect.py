import itertools

import numpy as np
import pytest
import scipy.linalg

from afdm_plim.afdm import AfdmParams, afdm_demodulate, afdm_modulate, daft_matrix
from afdm_plim.channel import RandomChannelProfile, channel_matrix, effective_channel
from afdm_plim.detect import (
    ML_MAX_GROUP,
    count_errors,
    lc_detect,
    lmmse_equalize,
    ml_detect,
)
from afdm_plim.errors import CapabilityError, ConfigError, DomainError, InputLengthError
from afdm_plim.plim import PlimConfig, plim_encode, psk_constellation, psk_demodulate


def brute_force_codebook(U, M, beta):
    """Every (z, phase-index) codeword of one balanced block and its vector."""
    zs = [z for z in itertools.product((1, 0), repeat=U) if sum(z) == U // 2]
    pts = psk_constellation(M)
    amps = {1: np.sqrt(1 + beta), 0: np.sqrt(1 - beta)}
    entries = []
    for z in zs:
        for idx in itertools.product(range(M), repeat=U):
            entries.append((z, idx, np.array([amps[b] * pts[i] for b, i in zip(z, idx)])))
    return entries


def rand_bits(rng, cfg):
    return rng.integers(0, 2, cfg.n_im_bits), rng.integers(0, 2, cfg.n_psk_bits)


# --- LMMSE ---------------------------------------------------------------------

def test_lmmse_identity():
    r = np.random.default_rng(0).standard_normal(8) + 1j
    assert np.allclose(lmmse_equalize(np.eye(8), r, 0.0), r)


def test_lmmse_unitary_inverts():
    p = AfdmParams.for_channel(32)
    U = daft_matrix(p)
    x = np.random.default_rng(1).standard_normal(32) + 0j
    assert np.allclose(lmmse_equalize(U, U @ x, 0.0), x, atol=1e-8)


def test_lmmse_matches_dense_oracle():
    rng = np.random.default_rng(2)
    H = np.eye(16) + 0.2 * (rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16)))
    r = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    oracle = np.linalg.inv(H.conj().T @ H + 0.01 * np.eye(16)) @ H.conj().T @ r
    assert np.allclose(lmmse_equalize(H, r, 0.01), oracle, atol=1e-8)


def test_lmmse_stacked_rows():
    rng = np.random.default_rng(3)
    H = np.eye(8) + 0.1 * rng.standard_normal((8, 8))
    R = rng.standard_normal((4, 8)) + 0j
    out = lmmse_equalize(H, R, 0.05)
    for r, o in zip(R, out):
        assert np.allclose(lmmse_equalize(H, r, 0.05), o)


def test_lmmse_singular_surfaces():
    H = np.zeros((4, 4))
    H[0, 0] = 1
    with pytest.raises(np.linalg.LinAlgError):
        lmmse_equalize(H, np.ones(4), 0.0)


def test_lmmse_errors():
    with pytest.raises(DomainError):
        lmmse_equalize(np.eye(4), np.ones(4), -0.1)
    with pytest.raises(InputLengthError):
        lmmse_equalize(np.eye(4), np.ones(5), 0.1)


def test_lmmse_through_doubly_dispersive_channel():
    L = 64
    p = AfdmParams.for_channel(L)
    H = channel_matrix(RandomChannelProfile().draw(np.random.default_rng(6), L), L)
    cfg = PlimConfig(L, 4, 0.5, 8)
    _, x = plim_encode(*rand_bits(np.random.default_rng(7), cfg), cfg)
    r = afdm_demodulate(H @ afdm_modulate(x, p), p)
    x_hat = lmmse_equalize(effective_channel(H, p), r, 0.0)
    assert np.allclose(x_hat, x, atol=1e-8)


# --- ML ------------------------------------------------------------------------

def test_ml_single_subcarrier_example():
    cfg = PlimConfig(L=1, M=4, beta=0.5)
    x_hat = 1.2 * np.exp(1j * np.pi / 2)
    hyps = [(z, m) for z in (0, 1) for m in range(4)]
    amps = {0: np.sqrt(0.5), 1: np.sqrt(1.5)}
    best = min(hyps, key=lambda h: abs(x_hat - amps[h[0]] * psk_constellation(4)[h[1]]))
    assert best == (1, 1)
    res = ml_detect([x_hat], cfg)
    assert res.z_hat.tolist() == [1]
    assert res.psk_bits_hat.tolist() == psk_demodulate([1j], 4).tolist()


@pytest.mark.parametrize("U, M", [(2, 2), (2, 4), (4, 2), (4, 4)])
def test_ml_equals_exhaustive_search(U, M):
    cfg = PlimConfig(L=U, M=M, beta=0.5, group_size=U)
    book = brute_force_codebook(U, M, cfg.beta)
    vecs = np.stack([v for _, _, v in book])
    rng = np.random.default_rng(100 * U + M)
    for _ in range(200):
        _, x = plim_encode(*rand_bits(rng, cfg), cfg)
        x_hat = x + 0.6 * (rng.standard_normal(U) + 1j * rng.standard_normal(U))
        d = np.sum(np.abs(vecs - x_hat) ** 2, axis=1)
        z_ref, idx_ref, _ = book[int(np.argmin(d))]
        res = ml_detect(x_hat, cfg)
        assert res.z_hat.tolist() == list(z_ref)
        assert res.psk_bits_hat.tolist() == psk_demodulate(psk_constellation(M)[list(idx_ref)], M).tolist()


def test_ml_capability_gate():
    cfg = PlimConfig(L=64, M=4, beta=0.5, group_size=32)
    with pytest.raises(CapabilityError, match="lc_detect"):
        ml_detect(np.ones(64), cfg)
    assert issubclass(CapabilityError, ConfigError)
    ml_detect(np.ones(ML_MAX_GROUP), PlimConfig(ML_MAX_GROUP, 4, 0.5, ML_MAX_GROUP))


def test_ml_noiseless_ungrouped_loopback():
    cfg = PlimConfig(L=128, M=4, beta=0.5)
    rng = np.random.default_rng(21)
    for _ in range(1000):
        im, psk = rand_bits(rng, cfg)
        _, x = plim_encode(im, psk, cfg)
        assert ml_detect(x, cfg, truth=(im, psk)).total_errors == 0


# --- LC ------------------------------------------------------------------------

def test_lc_noiseless_grouped_loopback():
    cfg = PlimConfig(L=128, M=4, beta=0.5, group_size=8)
    rng = np.random.default_rng(22)
    for _ in range(1000):
        im, psk = rand_bits(rng, cfg)
        _, x = plim_encode(im, psk, cfg)
        assert lc_detect(x, cfg, truth=(im, psk)).total_errors == 0


def test_lc_two_entry_example():
    cfg = PlimConfig(L=2, M=2, beta=0.5, group_size=2)
    res = lc_detect(np.array([1.3, 0.6]), cfg)
    assert res.z_hat.tolist() == [1, 0]
    s = np.array([1.3 / np.sqrt(1.5), 0.6 / np.sqrt(0.5)])
    assert res.psk_bits_hat.tolist() == psk_demodulate(s, 2).tolist()


def test_lc_ties():
    flat = np.ones(16, dtype=complex)
    assert lc_detect(flat, PlimConfig(16, 4, 0.5)).z_hat.tolist() == [1] * 16
    z = lc_detect(flat, PlimConfig(16, 4, 0.5, 4)).z_hat
    assert z.tolist() == [1, 1, 0, 0] * 4


def test_lc_global_rule_erases_unbalanced_blocks():
    cfg = PlimConfig(L=4, M=2, beta=0.5, group_size=2)
    x = np.array([2.0, 1.9, 0.1, 0.2])
    res = lc_detect(x, cfg, rule="global")
    assert res.z_hat.tolist() == [1, 1, 0, 0]
    assert res.erased_blocks == 2
    assert res.im_bits_hat.tolist() == [0, 0]
    balanced = lc_detect(np.array([2.0, 0.1, 0.2, 1.9]), cfg, rule="global")
    assert balanced.erased_blocks == 0 and balanced.im_bits_hat.tolist() == [0, 1]


def test_lc_unknown_rule():
    with pytest.raises(DomainError):
        lc_detect(np.ones(4), PlimConfig(4, 2, 0.5), rule="median")


@pytest.mark.parametrize("U", [2, 8, 64])
def test_grouped_outputs_balanced_under_noise(U):
    cfg = PlimConfig(L=128, M=4, beta=0.5, group_size=U)
    rng = np.random.default_rng(U)
    _, x = plim_encode(*rand_bits(rng, cfg), cfg)
    x_hat = x + rng.standard_normal(128) + 1j * rng.standard_normal(128)
    dets = [lc_detect] + ([ml_detect] if U <= ML_MAX_GROUP else [])
    for det in dets:
        z = det(x_hat, cfg).z_hat.reshape(-1, U)
        assert np.all(z.sum(axis=1) == U // 2)


def test_detector_length_errors():
    cfg = PlimConfig(8, 4, 0.5)
    for det in (ml_detect, lc_detect):
        with pytest.raises(InputLengthError):
            det(np.ones(7), cfg)


def test_result_error_totals():
    cfg = PlimConfig(L=8, M=4, beta=0.5, group_size=4)
    rng = np.random.default_rng(30)
    im, psk = rand_bits(rng, cfg)
    _, x = plim_encode(im, psk, cfg)
    res = lc_detect(x + 0.8 * rng.standard_normal(8), cfg, truth=(im, psk))
    assert res.total_errors == res.im_errors + res.psk_errors


# --- count_errors ------------------------------------------------------------

def test_count_errors():
    assert count_errors([0, 1, 1], [0, 1, 1]) == 0
    assert count_errors([0, 1, 1], [1, 1, 0]) == 2
    a, b = [1, 0, 0, 1, 1], [0, 0, 1, 1, 0]
    assert count_errors(a, b) == count_errors(b, a)
    with pytest.raises(InputLengthError):
        count_errors([0, 1], [0])


def test_solve_is_used_not_inverse():
    # the equalizer must agree with a factorization-based solve on an ill-conditioned system
    rng = np.random.default_rng(40)
    Q = scipy.linalg.qr(rng.standard_normal((12, 12)))[0]
    H = Q @ np.diag(np.logspace(0, -6, 12))
    r = rng.standard_normal(12)
    ref = scipy.linalg.lstsq(H, r)[0]
    assert np.allclose(lmmse_equalize(H, r, 0.0), ref, atol=1e-6)
