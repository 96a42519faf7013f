import numpy as np
import pytest

from afdm_plim.afdm import AfdmParams
from afdm_plim.channel import (
    PathSpec,
    RandomChannelProfile,
    apply_channel,
    channel_matrix,
    complex_normal,
    effective_channel,
    load_channel_profile,
    parse_path_line,
    realize_channel,
)
from afdm_plim.errors import ConfigError, DomainError


def test_identity_channel():
    assert np.array_equal(channel_matrix([PathSpec(1, 0)], 16), np.eye(16))


def test_unit_delay_is_cyclic_shift():
    L = 8
    H = channel_matrix([PathSpec(1, 1)], L)
    for n in range(L):
        e = np.zeros(L)
        e[n] = 1
        out = H @ e
        assert out[(n + 1) % L] == 1 and np.count_nonzero(out) == 1


def test_pure_doppler_is_diagonal_exponential():
    L, nu = 32, 0.05
    H = channel_matrix([PathSpec(1, 0, nu)], L)
    assert np.allclose(H, np.diag(np.diag(H)))
    assert np.allclose(H @ np.ones(L), np.exp(2j * np.pi * nu * np.arange(L)))


def test_channel_domain_errors():
    with pytest.raises(DomainError):
        channel_matrix([PathSpec(1, 16)], 16)
    with pytest.raises(DomainError):
        channel_matrix([PathSpec(1, -1)], 16)
    with pytest.raises(DomainError):
        channel_matrix([], 16)


def test_noiseless_identity_passthrough():
    y = np.random.default_rng(0).standard_normal(16) + 0j
    assert np.array_equal(apply_channel(np.eye(16), y, 0.0, np.random.default_rng(1)), y)


def test_noise_power_law_of_large_numbers():
    r = apply_channel(np.zeros((1, 1)), np.zeros((1, 1_000_000)), 1.0, np.random.default_rng(7))
    assert np.mean(np.abs(r) ** 2) == pytest.approx(1.0, abs=0.01)


def test_complex_normal_is_circular():
    w = complex_normal(np.random.default_rng(3), 400_000)
    assert np.var(w.real) == pytest.approx(0.5, abs=0.01)
    assert np.var(w.imag) == pytest.approx(0.5, abs=0.01)
    assert abs(np.mean(w.real * w.imag)) < 0.01


def test_negative_noise_rejected():
    with pytest.raises(DomainError):
        apply_channel(np.eye(2), np.ones(2), -1.0, np.random.default_rng(0))


def test_apply_channel_deterministic_per_seed():
    H = channel_matrix(RandomChannelProfile().draw(np.random.default_rng(5), 32), 32)
    y = np.ones(32, dtype=complex)
    a = apply_channel(H, y, 0.3, np.random.default_rng(9))
    b = apply_channel(H, y, 0.3, np.random.default_rng(9))
    assert np.array_equal(a, b)


def test_effective_channel_of_identity():
    p = AfdmParams.for_channel(64)
    assert np.allclose(effective_channel(np.eye(64), p), np.eye(64), atol=1e-10)


def test_effective_channel_matches_dense_similarity():
    from afdm_plim.afdm import daft_matrix

    p = AfdmParams(48, 0.03, 1e-4)
    H = channel_matrix(RandomChannelProfile().draw(np.random.default_rng(4), 48), 48)
    A = daft_matrix(p)
    assert np.allclose(effective_channel(H, p), A @ H @ A.conj().T, atol=1e-10)


def test_unitary_single_path_preserves_energy():
    H = channel_matrix([PathSpec(np.exp(0.7j), 5, 0.01)], 64)
    y = np.random.default_rng(0).standard_normal(64) + 1j
    assert np.linalg.norm(H @ y) == pytest.approx(np.linalg.norm(y), rel=1e-12)


@pytest.mark.parametrize("delay", [0, 1, 3, 8])
@pytest.mark.parametrize("doppler_bins", [-2, -1, 0, 1, 2])
def test_chirp_domain_sparsity(delay, doppler_bins):
    L = 128
    p = AfdmParams.for_channel(L, nu_max=2.0, xi=1)
    H = channel_matrix([PathSpec(1, delay, doppler_bins / L)], L)
    Heff = np.abs(effective_channel(H, p)) ** 2
    dominance = Heff.max(axis=1) / Heff.sum(axis=1)
    assert dominance.min() > 0.99


def test_eigenvalues_preserved():
    L = 24
    p = AfdmParams.for_channel(L)
    H = channel_matrix(RandomChannelProfile(n_paths=3, max_delay=4).draw(np.random.default_rng(8), L), L)
    ev_h = np.sort_complex(np.linalg.eigvals(H))
    ev_eff = np.sort_complex(np.linalg.eigvals(effective_channel(H, p)))
    # match each eigenvalue to its nearest counterpart to avoid ordering ties
    d = np.abs(ev_h[:, None] - ev_eff[None, :]).min(axis=1)
    assert d.max() < 1e-8


def test_random_profile_draws_within_bounds():
    prof = RandomChannelProfile()
    paths = prof.draw(np.random.default_rng(11), 128)
    assert len(paths) == 3
    assert sum(abs(p.gain) ** 2 for p in paths) == pytest.approx(1.0)
    assert all(0 <= p.delay_samples <= 8 for p in paths)
    assert all(abs(p.doppler_norm) * 128 <= 2.0 for p in paths)


def test_random_profile_delay_too_large():
    with pytest.raises(ConfigError):
        RandomChannelProfile(max_delay=16).draw(np.random.default_rng(0), 16)


def test_realize_channel_bundle():
    p = AfdmParams.for_channel(16)
    ch = realize_channel([PathSpec(1, 2)], p, noise_var=0.1)
    assert ch.noise_var == 0.1 and ch.H.shape == ch.H_eff.shape == (16, 16)


def test_parse_path_line():
    p = parse_path_line(" 0.5, -0.5 , 3, 0.01")
    assert p == PathSpec(complex(0.5, -0.5), 3, 0.01)
    with pytest.raises(ConfigError):
        parse_path_line("1, 0, 2")
    with pytest.raises(ConfigError):
        parse_path_line("1, 0, x, 0")


def test_load_channel_profile(tmp_path):
    f = tmp_path / "ch.ini"
    f.write_text("[channel]\npath1 = 1, 0, 0, 0\npath2 = 0, 1, 2, 0.01\n")
    paths = load_channel_profile(f)
    assert [p.delay_samples for p in paths] == [0, 2]
    assert abs(paths[0].gain) == pytest.approx(1 / np.sqrt(2))
    raw = load_channel_profile(f, normalize=False)
    assert raw[1].gain == 1j
    with pytest.raises(ConfigError):
        load_channel_profile(tmp_path / "missing.ini")
