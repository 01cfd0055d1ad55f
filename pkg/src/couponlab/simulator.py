"""Seeded Monte Carlo simulation of the collection processes.

Four processes are supported:

``keep_fewest``
    ``d`` distinct offers; keep one copy of the offered type held fewest
    times (ties broken uniformly).  Nothing is kept if every offered type is
    already complete.  This is the process the exact solver models.
``first_useful``
    ``d`` independent offers (repetition allowed), scanned in order; keep the
    first whose type has fewer than ``m`` copies.
``keep_all_distinct``
    ``d`` distinct offers, all kept.
``keep_all_repetition``
    ``d`` independent offers, all kept.

Counts are capped at ``m``.

Random numbers
--------------
Replication ``k`` of a run with seed ``s`` draws from its own xoshiro256**
generator.  Its 256-bit state is four consecutive SplitMix64 outputs started
from the key ``mix64(s + (k + 1) * 0x9E3779B97F4A7C15 mod 2^64)``, where
``mix64`` is the SplitMix64 output function.  Bounded integers use Lemire's
multiply-shift rejection on the upper 32 bits.  Results therefore depend
only on ``(seed, k)``, not on thread count or scheduling.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass

import numba as nb
import numpy as np

from .errors import InputError, SimulationError

__all__ = [
    "GENERATOR",
    "Policy",
    "RUN_CAP",
    "SimulationResult",
    "compare_policies",
    "simulate",
    "simulate_once",
    "simulate_samples",
    "substream_draws",
]

if "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is often too old and only produces a warning
    nb.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

GENERATOR = "xoshiro256** (SplitMix64-keyed substreams)"
RUN_CAP = 10**9

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_LOW32 = np.uint64(0xFFFFFFFF)
_TWO32 = np.uint64(1 << 32)


class Policy(str, enum.Enum):
    KEEP_FEWEST = "keep_fewest"
    FIRST_USEFUL = "first_useful"
    KEEP_ALL_DISTINCT = "keep_all_distinct"
    KEEP_ALL_REPETITION = "keep_all_repetition"

    @property
    def keeps_all(self) -> bool:
        return self in (Policy.KEEP_ALL_DISTINCT, Policy.KEEP_ALL_REPETITION)

    @property
    def code(self) -> int:
        return _POLICY_CODES[self]

    def min_runs(self, n: int, m: int, d: int) -> int:
        """Fewest runs in which the process can possibly finish."""
        return -(-m * n // d) if self.keeps_all else m * n

    @classmethod
    def parse(cls, text: str | Policy) -> Policy:
        if isinstance(text, Policy):
            return text
        key = text.strip().lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(p.value for p in cls)
            raise InputError(f"unknown policy {text!r}; expected one of {names}") from None


_POLICY_CODES = {p: i for i, p in enumerate(Policy)}


@nb.njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@nb.njit(cache=True)
def _seed_state(seed, k, state):
    x = _mix64(seed + (np.uint64(k) + np.uint64(1)) * _GOLDEN)
    for i in range(4):
        x += _GOLDEN
        state[i] = _mix64(x)


@nb.njit(cache=True, inline="always")
def _rotl(x, r):
    return (x << np.uint64(r)) | (x >> np.uint64(64 - r))


@nb.njit(cache=True, inline="always")
def _next(s):
    result = _rotl(s[1] * np.uint64(5), 7) * np.uint64(9)
    t = s[1] << np.uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@nb.njit(cache=True, inline="always")
def _bounded(s, bound):
    # uniform in [0, bound), bound < 2^32
    b = np.uint64(bound)
    prod = (_next(s) >> np.uint64(32)) * b
    low = prod & _LOW32
    if low < b:
        threshold = (_TWO32 - b) % b
        while low < threshold:
            prod = (_next(s) >> np.uint64(32)) * b
            low = prod & _LOW32
    return np.int64(prod >> np.uint64(32))


@nb.njit(cache=True)
def _run_once(n, m, d, policy, s, counts, perm, run_cap):
    for t in range(n):
        counts[t] = 0
        perm[t] = t
    missing = n * m
    runs = 0
    while missing > 0:
        runs += 1
        if runs > run_cap:
            return -1
        if policy == 0 or policy == 2:
            # partial Fisher-Yates: perm[:d] is a uniform ordered d-subset
            for j in range(d):
                r = j + _bounded(s, n - j)
                tmp = perm[j]
                perm[j] = perm[r]
                perm[r] = tmp
            if policy == 0:
                best = -1
                best_count = m
                for j in range(d):
                    c = counts[perm[j]]
                    if c < best_count:
                        best_count = c
                        best = perm[j]
                # first minimum in a uniformly random order: uniform tie-break
                if best >= 0:
                    counts[best] += 1
                    missing -= 1
            else:
                for j in range(d):
                    t = perm[j]
                    if counts[t] < m:
                        counts[t] += 1
                        missing -= 1
        elif policy == 1:
            for j in range(d):
                t = _bounded(s, n)
                if counts[t] < m:
                    counts[t] += 1
                    missing -= 1
                    break
        else:
            for j in range(d):
                t = _bounded(s, n)
                if counts[t] < m:
                    counts[t] += 1
                    missing -= 1
    return runs


@nb.njit(cache=True, parallel=True)
def _run_batch(n, m, d, policy, seed, start, count, run_cap):
    out = np.empty(count, dtype=np.int64)
    for i in nb.prange(count):
        s = np.empty(4, dtype=np.uint64)
        _seed_state(seed, start + i, s)
        counts = np.empty(n, dtype=np.int64)
        perm = np.empty(n, dtype=np.int64)
        out[i] = _run_once(n, m, d, policy, s, counts, perm, run_cap)
    return out


@nb.njit(cache=True)
def _draws(seed, k, count):
    s = np.empty(4, dtype=np.uint64)
    _seed_state(seed, k, s)
    out = np.empty(count, dtype=np.uint64)
    for i in range(count):
        out[i] = _next(s)
    return out


def _check_seed(seed: int) -> np.uint64:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise InputError(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) < 2**64:
        raise InputError(f"seed must be in [0, 2^64), got {seed}")
    return np.uint64(int(seed))


def _check_params(n: int, m: int, d: int) -> None:
    if n < 1 or m < 1:
        raise InputError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    if not 1 <= d <= n:
        raise InputError(f"need 1 <= d <= n, got d={d}, n={n}")
    if n >= 2**32:
        raise InputError(f"n must be below 2^32, got {n}")


def substream_draws(seed: int, k: int, draws: int = 4) -> list[int]:
    """First ``draws`` raw 64-bit outputs of replication ``k``'s generator."""
    return [int(x) for x in _draws(_check_seed(seed), int(k), int(draws))]


def simulate_once(
    n: int, m: int, d: int, policy: Policy | str, seed: int, replication: int = 0, *, run_cap: int = RUN_CAP
) -> int:
    """Runs needed in one replication (substream ``replication`` of ``seed``)."""
    return int(simulate_samples(n, m, d, policy, 1, seed, start=replication, run_cap=run_cap)[0])


def simulate_samples(
    n: int,
    m: int,
    d: int,
    policy: Policy | str,
    replications: int,
    seed: int,
    *,
    start: int = 0,
    run_cap: int = RUN_CAP,
) -> np.ndarray:
    """Completion times of replications ``start .. start + replications - 1``."""
    _check_params(n, m, d)
    policy = Policy.parse(policy)
    if replications < 1:
        raise InputError(f"replications must be >= 1, got {replications}")
    if start < 0:
        raise InputError(f"start must be >= 0, got {start}")
    out = _run_batch(n, m, d, policy.code, _check_seed(seed), start, replications, run_cap)
    if (out < 0).any():
        k = start + int(np.argmax(out < 0))
        raise SimulationError(f"replication {k} exceeded {run_cap} runs (n={n}, m={m}, d={d}, {policy.value})")
    return out


@dataclass(frozen=True)
class SimulationResult:
    n: int
    m: int
    d: int
    policy: Policy
    mean: float
    std_dev: float
    std_err: float
    replications: int
    seed: int
    generator: str = GENERATOR

    def interval(self, k: float = 3.0) -> tuple[float, float]:
        """``mean -/+ k * std_err``."""
        return self.mean - k * self.std_err, self.mean + k * self.std_err


def simulate(
    n: int, m: int, d: int, policy: Policy | str, replications: int, seed: int, *, run_cap: int = RUN_CAP
) -> SimulationResult:
    """Sample mean, standard deviation and standard error of the completion
    time.  Moments are accumulated in exact integer arithmetic, so the result
    is bit-identical for identical inputs."""
    if replications < 2:
        raise InputError(f"replications must be >= 2, got {replications}")
    policy = Policy.parse(policy)
    samples = simulate_samples(n, m, d, policy, replications, seed, run_cap=run_cap)
    total = int(samples.sum())
    total_sq = sum(int(x) * int(x) for x in samples.tolist())
    r = replications
    var = (r * total_sq - total * total) / (r * (r - 1))
    std = math.sqrt(max(var, 0.0))
    return SimulationResult(
        n=n,
        m=m,
        d=d,
        policy=policy,
        mean=total / r,
        std_dev=std,
        std_err=std / math.sqrt(r),
        replications=r,
        seed=int(seed),
    )


def compare_policies(n: int, m: int, d: int, replications: int, seed: int) -> list[SimulationResult]:
    """All four processes on the same seed, sorted by mean (fastest first)."""
    results = [simulate(n, m, d, p, replications, seed) for p in Policy]
    return sorted(results, key=lambda r: (r.mean, r.policy.code))
