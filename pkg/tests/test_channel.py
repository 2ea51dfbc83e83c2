import math

import numpy as np
import pytest

from oiasim.channel import (
    SystemConfig,
    UserChannels,
    achievable_rate,
    capacity_joint,
    draw_group,
    interference_gram,
    rate_minus,
    rate_plus,
)
from oiasim.errors import ConfigError
from oiasim.linalg import herm, hermitian_eigen, random_gaussian_matrix

from conftest import random_semi_unitary, random_user


def _zero_interference(user):
    return UserChannels(user.h1, np.zeros_like(user.h2), np.zeros_like(user.h3))


# -- config / draws -----------------------------------------------------------

def test_config_defaults_and_validation():
    cfg = SystemConfig(M=2, K=10, P=100.0)
    assert cfg.N_R == 4
    with pytest.raises(ConfigError):
        SystemConfig(M=2, K=10, P=1.0, N_R=3)
    with pytest.raises(ConfigError):
        SystemConfig(M=1, K=0, P=1.0)
    with pytest.raises(ConfigError):
        SystemConfig(M=1, K=1, P=0.0)
    with pytest.raises(ConfigError):
        SystemConfig(M=0, K=1, P=1.0)


def test_draw_group_length_and_shape():
    g = draw_group(SystemConfig(M=2, K=1, P=1.0, seed=3))
    assert len(g) == 1
    assert g[0].h1.shape == (4, 2)
    assert len(list(g)) == 1


def test_draw_group_deterministic():
    cfg = SystemConfig(M=2, K=5, P=1.0, seed=42)
    a, b = draw_group(cfg), draw_group(cfg)
    for f in ("h1", "h2", "h3"):
        assert np.array_equal(getattr(a, f), getattr(b, f))


def test_draw_group_energy():
    g = draw_group(SystemConfig(M=2, K=10_000, P=1.0, seed=0))
    energy = np.sum(np.abs(g.h1) ** 2, axis=(-2, -1))
    # 8 unit-variance entries; std error of the mean is sqrt(8/1e4) ~ 0.028
    assert abs(energy.mean() - 8.0) < 0.15


def test_user_channels_validation():
    with pytest.raises(ValueError):
        UserChannels(np.zeros((4, 2)), np.zeros((4, 2)), np.zeros((4, 1)))
    with pytest.raises(ValueError):
        UserChannels(np.full((2, 1), np.nan), np.zeros((2, 1)), np.zeros((2, 1)))


# -- interference gram --------------------------------------------------------

def test_gram_zero_and_single(rng):
    u = random_user(rng, 2)
    z = UserChannels(u.h1, np.zeros_like(u.h2), np.zeros_like(u.h3))
    assert np.all(interference_gram(z) == 0)
    single = UserChannels(u.h1, u.h2, np.zeros_like(u.h3))
    b = interference_gram(single)
    np.testing.assert_allclose(b, u.h2 @ herm(u.h2))
    assert np.count_nonzero(hermitian_eigen(b).eigenvalues > 1e-9) == 2


def test_gram_full_rank(rng):
    for _ in range(20):
        w = hermitian_eigen(interference_gram(random_user(rng, 2))).eigenvalues
        assert np.all(w > 1e-9)


# -- rates --------------------------------------------------------------------

def test_rate_vanishes_at_low_power(rng):
    u = random_user(rng, 2)
    f = random_semi_unitary(rng, 2, 4)
    assert 0 <= achievable_rate(f, u, 1e-9) < 1e-6


def test_rate_interference_free_siso(rng):
    u = _zero_interference(random_user(rng, 1))
    h = u.h1[:, 0]
    f = (h / np.linalg.norm(h)).conj()[None, :]
    P = 10.0
    assert achievable_rate(f, u, P) == pytest.approx(math.log2(1 + P * np.linalg.norm(h) ** 2), rel=1e-12)


@pytest.mark.parametrize("M", [1, 2, 3])
def test_rate_split_identity(rng, M):
    for P in (0.1, 10.0, 1e5):
        for _ in range(30):
            u = random_user(rng, M)
            f = random_semi_unitary(rng, M, 2 * M)
            assert abs(achievable_rate(f, u, P) - (rate_plus(f, u, P) - rate_minus(f, u, P))) < 1e-9


def test_rate_terms_trivial(rng):
    u = random_user(rng, 2)
    z = _zero_interference(u)
    f = random_semi_unitary(rng, 2, 4)
    assert rate_minus(f, z, 10.0) == 0.0
    f0 = np.eye(4)[:2].astype(complex)
    zero = UserChannels(np.zeros((4, 2)), np.zeros((4, 2)), np.zeros((4, 2)))
    assert rate_plus(f0, zero, 10.0) == 0.0 and rate_minus(f0, zero, 10.0) == 0.0
    assert rate_plus(f, u, 10.0) >= rate_minus(f, u, 10.0) >= 0


def test_capacity_trivial_cases(rng):
    u = random_user(rng, 1)
    no_signal = UserChannels(np.zeros_like(u.h1), u.h2, u.h3)
    assert capacity_joint(no_signal, 10.0) == pytest.approx(0.0, abs=1e-12)
    z = _zero_interference(u)
    P = 10.0
    assert capacity_joint(z, P) == pytest.approx(math.log2(1 + P * np.linalg.norm(u.h1) ** 2), rel=1e-12)


@pytest.mark.parametrize("M", [1, 2])
def test_capacity_dominates_projection(rng, M):
    for _ in range(10):
        u = random_user(rng, M)
        for P in (1.0, 100.0):
            best = max(achievable_rate(random_semi_unitary(rng, M, 2 * M), u, P) for _ in range(50))
            assert capacity_joint(u, P) - best >= -1e-9


def test_rates_monotone_in_power(rng):
    grid = np.logspace(-2, 5, 15)
    for _ in range(10):
        u = random_user(rng, 2)
        f = random_semi_unitary(rng, 2, 4)
        r = [achievable_rate(f, u, P) for P in grid]
        c = [capacity_joint(u, P) for P in grid]
        assert np.all(np.diff(r) >= -1e-12)
        assert np.all(np.diff(c) >= -1e-12)
        assert np.all(np.isfinite(r)) and min(r) >= 0


def test_rates_broadcast_over_batch(rng):
    h = random_gaussian_matrix(4, 2, rng, batch=(6, 3))
    users = UserChannels(h[:, 0], h[:, 1], h[:, 2])
    f = np.stack([random_semi_unitary(rng, 2, 4) for _ in range(6)])
    batched = achievable_rate(f, users, 30.0)
    single = [achievable_rate(f[i], users[i], 30.0) for i in range(6)]
    np.testing.assert_allclose(batched, single, rtol=1e-12)
