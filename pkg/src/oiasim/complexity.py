"""Analytic flop counts for feedback computation.

Counts follow the usual convention: a real add, multiply or divide is one
flop, so a complex add costs 2 and a complex multiply 6. The model is purely
symbolic; nothing here instruments the numerical code.
"""
from __future__ import annotations

import enum

from .errors import InvalidShape
from .schemes import SchemeId

__all__ = ["FlopOp", "complexity_ratio", "op_flops", "scheme_flops"]


class FlopOp(str, enum.Enum):
    SCALE_OR_ADD = "scale_or_add"
    FROBENIUS_NORM = "frobenius_norm"
    GRAM = "gram"
    GRAM_SCHMIDT = "gram_schmidt"
    SVD = "svd"


def op_flops(op: FlopOp | str, m: int, n: int) -> int:
    """Flops of one operation on an ``m x n`` complex matrix (``m >= n >= 1``)."""
    op = FlopOp(op)
    if not (isinstance(m, int) and isinstance(n, int)) or n < 1 or m < n:
        raise InvalidShape(f"need integers m >= n >= 1, got m={m}, n={n}")
    if op is FlopOp.SCALE_OR_ADD:
        return 2 * m * n
    if op is FlopOp.FROBENIUS_NORM:
        return 4 * m * n
    if op in (FlopOp.GRAM, FlopOp.GRAM_SCHMIDT):
        return 8 * m * n * n - 2 * m * n
    return 24 * m * m * n + 48 * m * n * n + 54 * n ** 3


_COSTED = (SchemeId.MAX_SNR, SchemeId.OIA1, SchemeId.OIA2)


def scheme_flops(scheme: SchemeId | str, K: int, n_r: int) -> int:
    """Total feedback-computation flops for a group of K users with ``n_r`` antennas.

    Only MAX_SNR, OIA1 and OIA2 are costed. ``n_r`` must be even, so the
    ``3/2 n_r`` term (``3M`` scalar operations) is an exact integer.
    """
    scheme = SchemeId(scheme)
    if scheme not in _COSTED:
        raise InvalidShape(f"no flop model for {scheme.value}")
    if K < 1 or n_r < 2 or n_r % 2:
        raise InvalidShape(f"need K >= 1 and even n_r >= 2, got K={K}, n_r={n_r}")
    scalar = 3 * n_r // 2
    if scheme is SchemeId.MAX_SNR:
        return K * (128 * n_r ** 3 - n_r ** 2 + scalar)
    if scheme is SchemeId.OIA1:
        return K * (130 * n_r ** 3 + 3 * n_r ** 2 + scalar)
    # The selected user alone builds its postprocessor.
    return K * (8 * n_r ** 3 + 2 * n_r ** 2) + (130 * n_r ** 3 + 3 * n_r ** 2)


def complexity_ratio(a: SchemeId | str, b: SchemeId | str, K: int, n_r: int) -> float:
    return scheme_flops(a, K, n_r) / scheme_flops(b, K, n_r)
