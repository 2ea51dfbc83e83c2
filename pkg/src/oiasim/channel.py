"""System model: configuration, channel draws and rate formulas.

Noise covariance is the identity, so ``P`` is the linear SNR and each of the
M streams carries ``P / M``. Rates are in bits per channel use and are
computed straight from the channel matrices through log-determinants; no
symbols or noise samples are ever generated.

Rate functions broadcast over leading batch axes of the channel arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .linalg import herm, random_gaussian_matrix

__all__ = [
    "SystemConfig",
    "UserChannels",
    "achievable_rate",
    "capacity_joint",
    "draw_group",
    "interference_gram",
    "log2det_eye_plus",
    "rate_minus",
    "rate_plus",
]


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions and operating point of one experiment.

    ``N_R`` defaults to ``2 * M``; any other value is rejected.
    """

    M: int
    K: int
    P: float
    seed: int = 0
    N_R: int | None = None

    def __post_init__(self):
        if self.M < 1:
            raise ConfigError(f"M must be >= 1, got {self.M}")
        if self.N_R is None:
            object.__setattr__(self, "N_R", 2 * self.M)
        if self.N_R != 2 * self.M:
            raise ConfigError(f"N_R must equal 2M = {2 * self.M}, got {self.N_R}")
        if self.K < 1:
            raise ConfigError(f"K must be >= 1, got {self.K}")
        if not self.P > 0:
            raise ConfigError(f"P must be > 0, got {self.P}")


@dataclass(frozen=True)
class UserChannels:
    """Desired channel ``h1`` and interfering channels ``h2``, ``h3``.

    Each array has shape ``(..., N_R, M)``. A group of K users is simply a
    ``UserChannels`` whose arrays carry a leading axis of length K; indexing
    and iteration walk that axis.
    """

    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray

    def __post_init__(self):
        shapes = {self.h1.shape, self.h2.shape, self.h3.shape}
        if len(shapes) != 1:
            raise ValueError(f"channel shapes differ: {sorted(shapes)}")
        if not all(np.all(np.isfinite(h)) for h in (self.h1, self.h2, self.h3)):
            raise ValueError("channel matrices must be finite")

    @property
    def M(self) -> int:
        return self.h1.shape[-1]

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.h1.shape[:-2]

    def __len__(self) -> int:
        if not self.batch_shape:
            raise TypeError("a single user has no length")
        return self.batch_shape[0]

    def __getitem__(self, idx) -> UserChannels:
        return UserChannels(self.h1[idx], self.h2[idx], self.h3[idx])

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    @classmethod
    def stack(cls, users) -> UserChannels:
        users = list(users)
        return cls(*(np.stack([getattr(u, f) for u in users]) for f in ("h1", "h2", "h3")))


def _draw_users(n_r: int, m: int, k: int, rng: np.random.Generator) -> UserChannels:
    # One call so that user k only depends on the first k draws of the stream.
    h = random_gaussian_matrix(n_r, m, rng, batch=(k, 3))
    return UserChannels(h[:, 0], h[:, 1], h[:, 2])


def draw_group(config: SystemConfig, rng: np.random.Generator | None = None) -> UserChannels:
    """K independent users with i.i.d. CN(0, 1) channels.

    Without ``rng`` a generator seeded from ``config.seed`` is used.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    return _draw_users(config.N_R, config.M, config.K, rng)


def interference_gram(user: UserChannels) -> np.ndarray:
    """``h2 h2^H + h3 h3^H``."""
    return user.h2 @ herm(user.h2) + user.h3 @ herm(user.h3)


def log2det_eye_plus(x: np.ndarray) -> np.ndarray | float:
    """``log2 det(I + X)`` for Hermitian PSD ``X`` via its eigenvalues."""
    lam = np.clip(np.linalg.eigvalsh(x), 0.0, None)
    out = np.sum(np.log2(1.0 + lam), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _projected(f: np.ndarray, h: np.ndarray, p: float) -> np.ndarray:
    fh = f @ h
    return (p / h.shape[-1]) * (fh @ herm(fh))


def rate_plus(f: np.ndarray, user: UserChannels, P: float):
    """``log2 det(I + (P/M) sum_{i=1..3} F h_i h_i^H F^H)``."""
    s = _projected(f, user.h1, P) + _projected(f, user.h2, P) + _projected(f, user.h3, P)
    return log2det_eye_plus(s)


def rate_minus(f: np.ndarray, user: UserChannels, P: float):
    """Rate-loss term: as :func:`rate_plus` but over the interferers only."""
    return log2det_eye_plus(_projected(f, user.h2, P) + _projected(f, user.h3, P))


def _whitened_rate(signal: np.ndarray, noise: np.ndarray):
    # log2 det(I + S (I + N)^{-1}) = log2 det(I + L^{-1} S L^{-H}), (I + N) = L L^H.
    eye = np.eye(noise.shape[-1])
    chol = np.linalg.cholesky(eye + noise)
    linv = np.linalg.solve(chol, np.broadcast_to(eye, chol.shape))
    w = linv @ signal @ herm(linv)
    return log2det_eye_plus(0.5 * (w + herm(w)))


def achievable_rate(f: np.ndarray, user: UserChannels, P: float):
    """Rate after projecting onto the rows of the postprocessor ``f``.

    Treats the projected interference as coloured noise; evaluated by
    whitening with the Cholesky factor of the interference-plus-noise
    covariance.
    """
    signal = _projected(f, user.h1, P)
    noise = _projected(f, user.h2, P) + _projected(f, user.h3, P)
    return _whitened_rate(signal, noise)


def capacity_joint(user: UserChannels, P: float):
    """Rate with joint decoding over all ``N_R`` receive antennas (no projection)."""
    m = user.M
    signal = (P / m) * (user.h1 @ herm(user.h1))
    noise = (P / m) * interference_gram(user)
    return _whitened_rate(signal, noise)
