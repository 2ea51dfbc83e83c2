"""Subspace geometry on the complex Grassmann manifold.

Subspaces are represented by generator matrices: tall ``N x M`` arrays with
orthonormal columns. All distances here depend only on the spanned
subspaces, never on which generator was chosen.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import InvalidParams, ShapeMismatch
from .linalg import herm, hermitian_eigvals, orthonormal_basis, random_gaussian_matrix, trial_stream

__all__ = [
    "DistortionBoundParams",
    "chordal_distance_sq",
    "complement_basis",
    "min_chordal_samples",
    "min_chordal_statistic",
    "min_tail_eigensum",
    "pair_gram_spectrum",
    "principal_angles",
    "quantization_bound",
    "quantization_eta",
    "rotation_onto",
]


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-2:] != b.shape[-2:]:
        raise ShapeMismatch(f"generator shapes differ: {a.shape[-2:]} vs {b.shape[-2:]}")


def _half_dimension(a: np.ndarray, b: np.ndarray) -> int:
    _same_shape(a, b)
    n, m = a.shape[-2:]
    if n != 2 * m:
        raise ShapeMismatch(f"expected N = 2M, got N={n}, M={m}")
    return m


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Principal angles between span(a) and span(b), ascending, in radians.

    The cosines are the singular values of ``a^H b``; they are clamped to
    [0, 1] before ``arccos`` to absorb rounding.
    """
    _same_shape(a, b)
    mu = np.linalg.svd(herm(a) @ b, compute_uv=False)
    return np.arccos(np.clip(mu, 0.0, 1.0))


def chordal_distance_sq(a: np.ndarray, b: np.ndarray) -> np.ndarray | float:
    """Squared chordal distance ``M - tr(a^H b b^H a)``, clamped to [0, M]."""
    _same_shape(a, b)
    m = a.shape[-1]
    cross = herm(a) @ b
    d = m - np.sum(np.abs(cross) ** 2, axis=(-2, -1))
    d = np.clip(d, 0.0, m)
    return float(d) if np.ndim(d) == 0 else d


def pair_gram_spectrum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Descending eigenvalues of ``a a^H + b b^H`` (length 2M).

    For ``N = 2M`` these are ``1 + cos(t_m)`` followed by ``1 - cos(t_m)``,
    with ``t_m`` the principal angles: the non-zero spectrum coincides with
    that of ``[[I, a^H b], [b^H a, I]]``.
    """
    _half_dimension(a, b)
    return hermitian_eigvals(a @ herm(a) + b @ herm(b))


def min_tail_eigensum(a: np.ndarray, b: np.ndarray) -> np.ndarray | float:
    """Sum of the M smallest eigenvalues of ``a a^H + b b^H``.

    Equals ``sum_m (1 - cos(t_m))``, which lies between half of and all of
    :func:`chordal_distance_sq`.
    """
    m = _half_dimension(a, b)
    tail = np.sum(pair_gram_spectrum(a, b)[..., m:], axis=-1)
    return float(tail) if np.ndim(tail) == 0 else tail


def complement_basis(a: np.ndarray) -> np.ndarray:
    """Generator of the orthogonal complement of span(a)."""
    m = a.shape[-1]
    q, _ = np.linalg.qr(a, mode="complete")
    return q[..., m:]


def rotation_onto(h: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Unitary ``R = [a, a_perp][h, h_perp]^H`` with ``R h = a``.

    Both inputs must be generator matrices of shape ``2M x M``.
    """
    _half_dimension(h, a)
    left = np.concatenate([a, complement_basis(a)], axis=-1)
    right = np.concatenate([h, complement_basis(h)], axis=-1)
    return left @ herm(right)


@dataclass(frozen=True)
class DistortionBoundParams:
    """Inputs of the random-codebook distortion bound.

    ``a`` trades the two terms of the bound off against each other and must
    lie strictly inside (0, 1); ``eta * K >= 1`` is required.
    """

    M: int
    K: int
    a: float = 0.5

    def __post_init__(self):
        if self.M < 1 or self.K < 1:
            raise InvalidParams(f"M and K must be >= 1, got M={self.M}, K={self.K}")
        if not 0.0 < self.a < 1.0:
            raise InvalidParams(f"a must lie in (0, 1), got {self.a}")
        if quantization_eta(self.M) * self.K < 1.0:
            raise InvalidParams(
                f"eta*K = {quantization_eta(self.M) * self.K:.4g} < 1 for M={self.M}, K={self.K}"
            )


def quantization_eta(M: int) -> float:
    """``prod_{i=1..M} Gamma(2M-i+1)/Gamma(M-i+1) / Gamma(M^2+1)``, in log space."""
    log_eta = -gammaln(M * M + 1)
    for i in range(1, M + 1):
        log_eta += gammaln(2 * M - i + 1) - gammaln(M - i + 1)
    return float(np.exp(log_eta))


def quantization_bound(params: DistortionBoundParams | int, K: int | None = None, a: float = 0.5) -> float:
    """Upper bound D on the mean min squared chordal distance to K random subspaces.

    Accepts either a :class:`DistortionBoundParams` or ``(M, K, a)``.
    Both terms of the bound are kept.
    """
    if not isinstance(params, DistortionBoundParams):
        params = DistortionBoundParams(int(params), int(K), a)
    M, a = params.M, params.a
    ek = quantization_eta(M) * params.K
    inv = 1.0 / (M * M)
    first = math.exp(gammaln(inv)) / (M * M) * ek ** (-inv)
    second = M * math.exp(-(ek ** (1.0 - a)))
    return first + second


def min_chordal_samples(M: int, K: int, trials: int, seed: int) -> np.ndarray:
    """Per-trial ``min_k d_c^2`` between K i.i.d. Gaussian interferer pairs.

    Trial ``t`` draws from its own stream keyed by ``(seed, t)``; users are
    drawn in order, so the K users of a trial extend the K' < K users of the
    same trial. The per-trial minimum is therefore non-increasing in K.
    """
    if trials < 1:
        raise InvalidParams("trials must be >= 1")
    n = 2 * M
    out = np.empty(trials)
    for t in range(trials):
        rng = trial_stream(seed, t)
        pair = random_gaussian_matrix(n, M, rng, batch=(K, 2))
        g = orthonormal_basis(pair)
        out[t] = np.min(chordal_distance_sq(g[:, 0], g[:, 1]))
    return out


def min_chordal_statistic(M: int, K: int, trials: int, seed: int) -> float:
    """Monte-Carlo estimate of ``E[min_k d_c^2]`` (see :func:`min_chordal_samples`)."""
    return float(np.mean(min_chordal_samples(M, K, trials, seed)))
