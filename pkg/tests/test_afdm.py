import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from afdm_plim.afdm import (
    AfdmParams,
    afdm_demodulate,
    afdm_modulate,
    chirp_phases,
    daft_matrix,
    select_c1,
)
from afdm_plim.errors import DomainError, InputLengthError


def dft_oracle(L):
    """Unitary DFT built entry by entry."""
    F = np.empty((L, L), dtype=complex)
    for m in range(L):
        for n in range(L):
            F[m, n] = np.exp(-2j * np.pi * m * n / L) / np.sqrt(L)
    return F


def test_zero_chirps_give_dft():
    assert np.allclose(daft_matrix(AfdmParams(16, 0.0, 0.0)), dft_oracle(16), atol=1e-13)


def test_l2_quarter_chirp_by_hand():
    A = daft_matrix(AfdmParams(2, 0.25, 0.0))
    expected = np.array([[1, 1], [-1j, 1j]]) / np.sqrt(2)
    assert np.allclose(A, expected, atol=1e-14)


@pytest.mark.parametrize("L", [2, 64, 128, 256])
@pytest.mark.parametrize("c2", [0.0, None])
def test_unitarity(L, c2):
    c2 = 1.0 / (4 * L * L) if c2 is None else c2
    A = daft_matrix(AfdmParams(L, select_c1(2.0, 1, L), c2))
    assert np.linalg.norm(A @ A.conj().T - np.eye(L)) < 1e-10


def test_impulse_modulates_to_flat_vector():
    L = 32
    x = np.zeros(L)
    x[0] = 1
    assert np.allclose(afdm_modulate(x, AfdmParams(L, 0.0, 0.0)), np.full(L, 1 / np.sqrt(L)), atol=1e-14)


@pytest.mark.parametrize("L", [8, 128, 256])
@pytest.mark.parametrize("c2", [0.0, 1e-4])
def test_fast_path_matches_dense(L, c2):
    p = AfdmParams(L, select_c1(2.0, 1, L), c2)
    rng = np.random.default_rng(L)
    x = rng.standard_normal(L) + 1j * rng.standard_normal(L)
    A = daft_matrix(p)
    assert np.allclose(afdm_modulate(x, p), A.conj().T @ x, atol=1e-10)
    assert np.allclose(afdm_demodulate(x, p), A @ x, atol=1e-10)


def test_dft_reduction_fast_path():
    L = 64
    p = AfdmParams(L, 0.0, 0.0)
    x = np.random.default_rng(1).standard_normal(L) + 0j
    assert np.allclose(afdm_demodulate(x, p), np.fft.fft(x, norm="ortho"), atol=1e-14)
    assert np.allclose(afdm_modulate(x, p), np.fft.ifft(x, norm="ortho"), atol=1e-14)


def test_stacked_frames_transform_rowwise():
    p = AfdmParams.for_channel(32)
    X = np.random.default_rng(2).standard_normal((5, 32)) + 0j
    Y = afdm_modulate(X, p)
    for row_x, row_y in zip(X, Y):
        assert np.allclose(afdm_modulate(row_x, p), row_y)


@settings(max_examples=50)
@given(st.integers(2, 300), st.integers(0, 2**32 - 1))
def test_round_trip_and_parseval(L, seed):
    p = AfdmParams.for_channel(L)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(L) + 1j * rng.standard_normal(L)
    y = afdm_modulate(x, p)
    assert np.allclose(afdm_demodulate(y, p), x, atol=1e-10)
    assert np.linalg.norm(y) ** 2 == pytest.approx(np.linalg.norm(x) ** 2, rel=1e-12)


def test_length_errors():
    p = AfdmParams(8, 0.1, 0.0)
    with pytest.raises(InputLengthError):
        afdm_modulate(np.ones(7), p)
    with pytest.raises(InputLengthError):
        afdm_demodulate(np.ones(9), p)
    with pytest.raises(InputLengthError):
        afdm_modulate(1.0, p)


def test_select_c1_examples():
    assert select_c1(0, 0, 128) == 1 / 256 == 0.00390625
    assert select_c1(2, 1, 128) == pytest.approx(7 / 256, abs=1e-15)


@pytest.mark.parametrize("nu, xi", [(-0.1, 1), (2, 5), (2, -1)])
def test_select_c1_domain(nu, xi):
    with pytest.raises(DomainError):
        select_c1(nu, xi, 128)


def test_params_defaults_and_validation():
    p = AfdmParams.for_channel(128)
    assert p.c1 == pytest.approx(7 / 256) and p.c2 == 0.0
    assert AfdmParams.for_channel(128, c2=1e-5).c2 == 1e-5
    with pytest.raises(DomainError):
        AfdmParams(1, 0.0, 0.0)


def test_chirp_phase_precision_for_large_arguments():
    L = 4096
    n = np.arange(L)
    c = 7 / (2 * L)
    exact = np.exp(-2j * np.pi * np.array([(7 * k * k) % (2 * L) for k in n]) / (2 * L))
    assert np.allclose(chirp_phases(c, L), exact, atol=1e-12)


def test_select_c1_increases_with_doppler():
    c = [select_c1(nu, 1, 128) for nu in np.linspace(0, 4, 17)]
    assert all(b > a for a, b in zip(c, c[1:]))
