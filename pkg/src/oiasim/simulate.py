"""Monte-Carlo harness: SNR sweeps, user scaling and DoF slope estimation.

Every trial draws from its own stream keyed by ``(seed, snr_index, trial)``
so results do not depend on chunking or on the number of worker threads.
Groups are drawn user by user from that stream, which makes the group of K
users a prefix of any larger group drawn under the same key.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import UserChannels, _draw_users, log2det_eye_plus
from .errors import ConfigError, RankDeficient, WindowTooNarrow
from .linalg import herm, min_singular_value, random_gaussian_matrix, trial_stream, RANK_TOL
from .schemes import SchemeId, evaluate

__all__ = [
    "SweepRecord",
    "SweepResult",
    "SweepSpec",
    "dof_slope",
    "interference_free_reference",
    "interference_free_samples",
    "run_sweep",
    "users_for_power",
]

log = logging.getLogger(__name__)

MAX_REDRAWS = 10
# Upper bound on users evaluated in one vectorised batch.
CHUNK_USERS = 200_000


def db_to_linear(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def users_for_power(P: float, M: int, c: float = 1.0, dof_m: float = 1.0) -> int:
    """``max(1, round(c * P**(dof_m * M)))``."""
    return max(1, int(round(c * P ** (dof_m * M))))


@dataclass(frozen=True)
class SweepSpec:
    """One scheme swept over SNR.

    Either ``K`` is fixed, or ``dof_m`` is given and the group size follows
    ``K(P) = max(1, round(c * P**(dof_m * M)))``.
    """

    scheme: SchemeId
    M: int
    snr_db: tuple[float, ...]
    trials: int = 2000
    seed: int = 0
    K: int | None = None
    c: float = 1.0
    dof_m: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", SchemeId(self.scheme))
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        if self.M < 1:
            raise ConfigError(f"M must be >= 1, got {self.M}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.snr_db:
            raise ConfigError("SNR list is empty")
        if any(b <= a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ConfigError("SNR list must be strictly increasing")
        if self.dof_m is None:
            if self.K is None or self.K < 1:
                raise ConfigError(f"K must be >= 1, got {self.K}")
        else:
            if not 0.0 <= self.dof_m <= self.M:
                raise ConfigError(f"dof_m must lie in [0, M], got {self.dof_m}")
            if not self.c > 0:
                raise ConfigError(f"c must be > 0, got {self.c}")

    def users_at(self, P: float) -> int:
        if self.dof_m is None:
            return int(self.K)
        return users_for_power(P, self.M, self.c, self.dof_m)


@dataclass(frozen=True)
class SweepRecord:
    snr_db: float
    K: int
    mean_rate: float
    std_error: float
    trials: int


@dataclass
class SweepResult:
    spec: SweepSpec
    records: list[SweepRecord] = field(default_factory=list)
    redraws: int = 0

    @property
    def snr_db(self) -> np.ndarray:
        return np.array([r.snr_db for r in self.records])

    @property
    def mean_rate(self) -> np.ndarray:
        return np.array([r.mean_rate for r in self.records])


def _draw_trial(M: int, K: int, seed: int, snr_index: int, trial: int) -> tuple[UserChannels, int]:
    rng = trial_stream(seed, snr_index, trial)
    for attempt in range(MAX_REDRAWS + 1):
        users = _draw_users(2 * M, M, K, rng)
        sv = min_singular_value(np.stack([users.h1, users.h2, users.h3]))
        if np.all(sv > RANK_TOL):
            return users, attempt
    raise RankDeficient(f"trial {trial} stayed rank deficient after {MAX_REDRAWS} redraws")


def _trial_rates(scheme: SchemeId, M: int, K: int, P: float, seed: int, snr_index: int, trials: range):
    drawn = [_draw_trial(M, K, seed, snr_index, t) for t in trials]
    groups = UserChannels.stack(u for u, _ in drawn)
    _, _, _, rate = evaluate(scheme, groups, P)
    return rate, sum(r for _, r in drawn)


def simulate_point(
    scheme: SchemeId | str,
    M: int,
    K: int,
    P: float,
    trials: int,
    seed: int,
    snr_index: int = 0,
    workers: int = 1,
) -> tuple[np.ndarray, int]:
    """Per-trial realised rates at one operating point, plus the redraw count."""
    scheme = SchemeId(scheme)
    per_chunk = max(1, CHUNK_USERS // max(K, 1))
    chunks = [range(s, min(s + per_chunk, trials)) for s in range(0, trials, per_chunk)]

    def job(r):
        return _trial_rates(scheme, M, K, P, seed, snr_index, r)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, chunks))
    else:
        parts = [job(r) for r in chunks]
    rates = np.concatenate([p[0] for p in parts])
    return rates, sum(p[1] for p in parts)


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Average transmitter-1 rate at each SNR point of ``spec``."""
    result = SweepResult(spec)
    for j, snr in enumerate(spec.snr_db):
        P = db_to_linear(snr)
        K = spec.users_at(P)
        rates, redraws = simulate_point(spec.scheme, spec.M, K, P, spec.trials, spec.seed, j, workers)
        result.redraws += redraws
        std_err = float(np.std(rates, ddof=1) / math.sqrt(spec.trials)) if spec.trials > 1 else 0.0
        result.records.append(SweepRecord(snr, K, float(np.mean(rates)), std_err, spec.trials))
        log.debug("%s snr=%g K=%d mean=%.6g", spec.scheme.value, snr, K, result.records[-1].mean_rate)
    if result.redraws:
        log.warning("%d rank-deficient draws were redrawn", result.redraws)
    return result


def dof_slope(result: SweepResult, snr_lo_db: float = 20.0, snr_hi_db: float = 40.0) -> float:
    """Least-squares slope of mean rate against ``log2 P`` inside the window."""
    snr = result.snr_db
    rate = result.mean_rate
    inside = (snr >= snr_lo_db - 1e-9) & (snr <= snr_hi_db + 1e-9)
    if np.count_nonzero(inside) < 2:
        raise WindowTooNarrow(f"fewer than two SNR points in [{snr_lo_db}, {snr_hi_db}] dB")
    x = snr[inside] / 10.0 * math.log2(10.0)
    slope, _ = np.polyfit(x, rate[inside], 1)
    return float(slope)


def interference_free_samples(M: int, P: float, trials: int, seed: int) -> np.ndarray:
    """Samples of ``log2 det(I + (P/M) H H^H)`` for ``M x M`` i.i.d. CN(0,1) ``H``."""
    rng = np.random.default_rng(seed)
    h = random_gaussian_matrix(M, M, rng, batch=(trials,))
    return log2det_eye_plus((P / M) * (h @ herm(h)))


def interference_free_reference(M: int, P: float, trials: int, seed: int) -> float:
    """Ergodic capacity of the interference-free ``M x M`` link (Monte Carlo)."""
    return float(np.mean(interference_free_samples(M, P, trials, seed)))
