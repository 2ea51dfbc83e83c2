"""Dense complex linear-algebra primitives.

Every routine accepts stacked inputs: the trailing two axes are the matrix
axes and any leading axes are treated as a batch. Matrices here are tiny
(at most 2M x 2M with small M), so the batched LAPACK drivers behind
``numpy.linalg`` do all the heavy lifting.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NotHermitian, RankDeficient

__all__ = [
    "HermitianEigen",
    "hermitian_eigen",
    "hermitian_eigvals",
    "herm",
    "min_singular_value",
    "orthonormal_basis",
    "random_gaussian_matrix",
    "trial_stream",
]

HERMITIAN_TOL = 1e-10
RANK_TOL = 1e-12


class HermitianEigen(NamedTuple):
    """Eigenvalues in descending order and the matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def herm(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def trial_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one Monte-Carlo trial.

    Streams for distinct ``key`` tuples under the same ``seed`` are
    statistically independent, and each stream depends only on
    ``(seed, key)``. This is what makes sweeps reproducible regardless of
    execution order.
    """
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def random_gaussian_matrix(
    rows: int, cols: int, rng: np.random.Generator, batch: tuple[int, ...] = ()
) -> np.ndarray:
    """Matrix of i.i.d. CN(0, 1) entries.

    Real and imaginary parts are independent N(0, 1/2). With ``batch`` a
    stack of shape ``batch + (rows, cols)`` is returned; the draws fill the
    stack in C order, so the first ``n`` matrices of a larger stack equal a
    stack of ``n`` drawn from the same stream.
    """
    shape = tuple(batch) + (rows, cols)
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def _check_hermitian(a: np.ndarray) -> None:
    if a.shape[-1] != a.shape[-2]:
        raise NotHermitian(f"matrix is not square: shape {a.shape[-2:]}")
    if a.size == 0:
        return
    asym = np.max(np.abs(a - herm(a)))
    scale = max(1.0, float(np.max(np.abs(a))))
    if asym > HERMITIAN_TOL * scale:
        raise NotHermitian(f"max |A - A^H| = {asym:.3e} exceeds tolerance")


def hermitian_eigen(a: np.ndarray) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Ties keep the solver's relative order (stable sort).

    Raises
    ------
    NotHermitian
        If ``a`` is not square or deviates from its conjugate transpose.
    """
    a = np.asarray(a)
    _check_hermitian(a)
    w, v = np.linalg.eigh(a)
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return HermitianEigen(w, v)


def hermitian_eigvals(a: np.ndarray) -> np.ndarray:
    """Descending eigenvalues only; skips the symmetry check (hot path)."""
    return np.linalg.eigvalsh(a)[..., ::-1]


def min_singular_value(h: np.ndarray) -> np.ndarray:
    """Smallest singular value of each tall matrix in a stack."""
    if h.shape[-1] == 1:
        return np.linalg.norm(h[..., 0], axis=-1)
    gram = herm(h) @ h
    lam = np.linalg.eigvalsh(gram)[..., 0]
    return np.sqrt(np.clip(lam, 0.0, None))


def orthonormal_basis(h: np.ndarray) -> np.ndarray:
    """Generator matrix (orthonormal columns) for the column span of ``h``.

    Uses the reduced QR factorisation.

    Raises
    ------
    RankDeficient
        If any matrix in the stack has smallest singular value below 1e-12.
    """
    h = np.asarray(h)
    if h.shape[-2] < h.shape[-1]:
        raise RankDeficient(f"need rows >= cols, got shape {h.shape[-2:]}")
    if np.any(min_singular_value(h) <= RANK_TOL):
        raise RankDeficient("matrix is (numerically) column-rank deficient")
    if h.shape[-1] == 1:
        return h / np.linalg.norm(h, axis=-2, keepdims=True)
    q, _ = np.linalg.qr(h)
    return q
