"""User-selection schemes at transmitter 1.

Each scheme has a per-user scalar feedback, a selection direction and a
rule for the realised rate of the selected user. The batched entry point
:func:`evaluate` runs a scheme over a stack of groups shaped ``(T, K, ...)``;
:func:`run_scheme` is the single-group convenience wrapper.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import UserChannels, achievable_rate, capacity_joint, interference_gram
from .errors import EmptyGroup
from .grassmann import chordal_distance_sq
from .linalg import herm, orthonormal_basis

__all__ = [
    "SchemeId",
    "SchemeOutcome",
    "evaluate",
    "maxsnr_feedback",
    "oia1_feedback",
    "oia2_feedback",
    "run_scheme",
    "select_user",
    "tdm2_feedback",
]


class SchemeId(str, enum.Enum):
    OIA1 = "OIA1"
    OIA2 = "OIA2"
    MAX_SNR = "MAX_SNR"
    TDM1 = "TDM1"
    TDM2 = "TDM2"
    OPT = "OPT"

    @classmethod
    def parse(cls, name: str) -> SchemeId:
        key = name.strip().upper().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown scheme {name!r}; choose from {[s.value for s in cls]}") from None


@dataclass(frozen=True)
class SchemeOutcome:
    selected: int
    feedback: float
    postprocessor: np.ndarray | None
    rate: float


def _eig_ascending(a: np.ndarray):
    w, v = np.linalg.eigh(a)
    return np.clip(w, 0.0, None), v


def _tail_postprocessor(gram: np.ndarray, m: int):
    """Feedback product and rows spanning the M weakest eigen-directions."""
    # eigh is ascending: the first M columns are v_{M+1..2M} in descending labels.
    w, v = _eig_ascending(gram)
    f = herm(v[..., :, :m][..., :, ::-1])
    return w[..., :m], f


def oia1_feedback(user: UserChannels, P: float):
    """Minimised rate-loss product and its postprocessor.

    Returns ``(prod_{m>M} (1 + (P/M) lambda_m(B)), F)`` with ``B`` the
    interference Gram matrix and ``F`` the conjugate-transposed eigenvectors
    of its M smallest eigenvalues.
    """
    m = user.M
    tail, f = _tail_postprocessor(interference_gram(user), m)
    fb = np.prod(1.0 + (P / m) * tail, axis=-1)
    return fb, f


def oia2_feedback(user: UserChannels):
    """Squared chordal distance between the two interfering subspaces.

    Independent of ``P``. Raises ``RankDeficient`` on a degenerate draw.
    """
    return chordal_distance_sq(orthonormal_basis(user.h2), orthonormal_basis(user.h3))


def maxsnr_feedback(user: UserChannels, P: float):
    """Interference-blind rate product and the top-M eigen postprocessor."""
    m = user.M
    w, v = _eig_ascending(user.h1 @ herm(user.h1))
    top = w[..., ::-1][..., :m]
    f = herm(v[..., :, ::-1][..., :, :m])
    return np.prod(1.0 + (P / m) * top, axis=-1), f


def tdm2_feedback(user: UserChannels, P: float):
    """Single-interferer rate-loss product; ``F`` spans the null space of ``h2^H``.

    ``h2 h2^H`` has rank M, so the product is 1 up to rounding.
    """
    m = user.M
    tail, f = _tail_postprocessor(user.h2 @ herm(user.h2), m)
    return np.prod(1.0 + (P / m) * tail, axis=-1), f


def select_user(feedbacks, direction: str = "argmin"):
    """Index of the extremal feedback along the last axis; ties go to the lowest index."""
    fb = np.asarray(feedbacks, dtype=float)
    if fb.ndim == 0 or fb.shape[-1] == 0:
        raise EmptyGroup("cannot select from an empty group")
    if direction == "argmin":
        idx = np.argmin(fb, axis=-1)
    elif direction == "argmax":
        idx = np.argmax(fb, axis=-1)
    else:
        raise ValueError(f"direction must be 'argmin' or 'argmax', got {direction!r}")
    return int(idx) if np.ndim(idx) == 0 else idx


def _take(arr: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Pick entry ``idx[t]`` along axis 1 of ``arr`` for every batch row ``t``."""
    return arr[np.arange(arr.shape[0]), idx]


def _silenced(user: UserChannels, h2: bool = False, h3: bool = False) -> UserChannels:
    return UserChannels(
        user.h1,
        np.zeros_like(user.h2) if h2 else user.h2,
        np.zeros_like(user.h3) if h3 else user.h3,
    )


def evaluate(scheme: SchemeId | str, groups: UserChannels, P: float):
    """Run a scheme on a stack of groups with channel arrays shaped ``(T, K, N_R, M)``.

    Returns ``(selected, feedback, postprocessor, rate)``; the first, second
    and fourth are length-T arrays, ``postprocessor`` is ``(T, M, N_R)`` or
    ``None`` for OPT. Rates include TDM duty-cycle factors.
    """
    scheme = SchemeId(scheme)
    if len(groups.batch_shape) != 2:
        raise ValueError("groups must have batch shape (T, K)")
    if groups.batch_shape[1] == 0:
        raise EmptyGroup("cannot select from an empty group")

    if scheme is SchemeId.OPT:
        cap = capacity_joint(groups, P)
        sel = select_user(cap, "argmax")
        best = _take(cap, sel)
        return sel, best, None, best

    if scheme is SchemeId.OIA1:
        fb, f = oia1_feedback(groups, P)
        sel = select_user(fb, "argmin")
        f_sel = _take(f, sel)
        chosen = groups[np.arange(len(sel)), sel]
        rate = achievable_rate(f_sel, chosen, P)
    elif scheme is SchemeId.OIA2:
        fb = oia2_feedback(groups)
        sel = select_user(fb, "argmin")
        chosen = groups[np.arange(len(sel)), sel]
        # Only the selected user computes its postprocessor.
        _, f_sel = oia1_feedback(chosen, P)
        rate = achievable_rate(f_sel, chosen, P)
    elif scheme in (SchemeId.MAX_SNR, SchemeId.TDM1):
        fb, f = maxsnr_feedback(groups, P)
        sel = select_user(fb, "argmax")
        f_sel = _take(f, sel)
        chosen = groups[np.arange(len(sel)), sel]
        if scheme is SchemeId.MAX_SNR:
            rate = achievable_rate(f_sel, chosen, P)
        else:
            rate = achievable_rate(f_sel, _silenced(chosen, h2=True, h3=True), P) / 3.0
    elif scheme is SchemeId.TDM2:
        fb, f = tdm2_feedback(groups, P)
        sel = select_user(fb, "argmin")
        f_sel = _take(f, sel)
        chosen = groups[np.arange(len(sel)), sel]
        rate = 2.0 * achievable_rate(f_sel, _silenced(chosen, h3=True), P) / 3.0
    else:  # pragma: no cover - closed enumeration
        raise ValueError(scheme)

    return sel, _take(fb, sel), f_sel, np.asarray(rate)


def run_scheme(scheme: SchemeId | str, group: UserChannels, P: float) -> SchemeOutcome:
    """Select a user from one group of K users and report its realised rate."""
    if not group.batch_shape or group.batch_shape[0] == 0:
        raise EmptyGroup("cannot select from an empty group")
    batched = UserChannels(group.h1[None], group.h2[None], group.h3[None])
    sel, fb, f, rate = evaluate(scheme, batched, P)
    return SchemeOutcome(
        selected=int(sel[0]),
        feedback=float(fb[0]),
        postprocessor=None if f is None else f[0],
        rate=float(rate[0]),
    )
