"""Exact expected collection time by dynamic programming over states.

States are visited in ascending rank (the nested ``n_0, n_1, ...`` loop
order).  Every advance lowers the rank, so when a state is reached all of
its successors already hold their final value and a single pass over a
dense ``C(n + m, n)``-entry array suffices.  The self-loop is solved out:

    E(c) = [1 + sum_i p_i E(c advanced at level i)] / (1 - self_loop)
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numba as nb
import numpy as np

from .combinatorics import CompositionCodec, binomial_ratio_table
from .errors import CapacityError, InputError

__all__ = [
    "DEFAULT_STATE_CAP",
    "ORACLE_STATE_LIMIT",
    "SolveResult",
    "solve",
    "solve_exact_rational",
    "solve_profile",
    "state_cap",
    "state_values",
]

DEFAULT_STATE_CAP = 10**8
ORACLE_STATE_LIMIT = 10**4
STATE_CAP_ENV = "COUPONLAB_STATE_CAP"


@dataclass(frozen=True)
class SolveResult:
    n: int
    m: int
    d: int
    expected_runs: float
    state_count: int
    peak_values_stored: int
    wall_time: float
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def memory_bytes(self) -> int:
        return 8 * self.peak_values_stored


def state_cap() -> int:
    """State cap from ``COUPONLAB_STATE_CAP``, else ``DEFAULT_STATE_CAP``."""
    raw = os.environ.get(STATE_CAP_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_STATE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise InputError(f"{STATE_CAP_ENV} must be an integer, got {raw!r}") from None
    if cap < 1:
        raise InputError(f"{STATE_CAP_ENV} must be positive, got {cap}")
    return cap


def _check_params(n: int, m: int, d: int) -> None:
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if m < 1:
        raise InputError(f"m must be >= 1, got {m}")
    if not 1 <= d <= n:
        raise InputError(f"need 1 <= d <= n, got d={d}, n={n}")


def _check_cap(n: int, m: int, cap: int | None) -> int:
    if cap is None:
        cap = state_cap()
    count = math.comb(n + m, n)
    if count > cap:
        raise CapacityError(
            f"state space C({n + m}, {n}) = {count} exceeds cap {cap} "
            f"(would need {8 * count} bytes of values)",
            required=count,
            limit=cap,
        )
    return count


@nb.njit(cache=True)
def _rank(c, n, m, count):
    idx = 0
    left = n
    for j in range(m):
        k = m - j
        idx += count[left, k] - count[left - c[j], k]
        left -= c[j]
    return idx


@nb.njit(cache=True)
def _next_state(c, m):
    # lexicographic successor on (c_0..c_{m-1}); c_m absorbs the remainder
    j = m - 1
    tail = c[m]
    while tail == 0:
        tail += c[j]
        j -= 1
    c[j] += 1
    for t in range(j + 1, m):
        c[t] = 0
    c[m] = tail - 1


@nb.njit(cache=True)
def _dp_pass(n, m, ratio, count, values, check_order):
    """Fill ``values`` in rank order.  Returns -1, or the first rank whose
    ordering check failed."""
    size = values.shape[0]
    c = np.zeros(m + 1, dtype=np.int64)
    c[m] = n
    suffix = np.zeros(m + 2, dtype=np.int64)
    for idx in range(size):
        if idx > 0:
            _next_state(c, m)
        if check_order and _rank(c, n, m, count) != idx:
            return idx
        if c[m] == n:
            values[idx] = 0.0
            continue
        for i in range(m, -1, -1):
            suffix[i] = suffix[i + 1] + c[i]
        inv = 1.0 / (1.0 - ratio[c[m]])
        acc = 1.0
        for i in range(m):
            if c[i] == 0:
                continue
            p = ratio[suffix[i]] - ratio[suffix[i + 1]]
            c[i] -= 1
            c[i + 1] += 1
            r = _rank(c, n, m, count)
            c[i] += 1
            c[i + 1] -= 1
            if check_order and r >= idx:
                return idx
            acc += p * values[r]
        values[idx] = acc * inv
    return -1


@nb.njit(cache=True)
def _transition_pass(n, m, ratio, count, size):
    # same traversal and probability arithmetic as _dp_pass, no value reads
    c = np.zeros(m + 1, dtype=np.int64)
    c[m] = n
    suffix = np.zeros(m + 2, dtype=np.int64)
    checksum = 0.0
    for idx in range(size):
        if idx > 0:
            _next_state(c, m)
        for i in range(m, -1, -1):
            suffix[i] = suffix[i + 1] + c[i]
        for i in range(m):
            checksum += ratio[suffix[i]] - ratio[suffix[i + 1]]
    return checksum


def _run(n: int, m: int, d: int, cap: int | None, check_order: bool) -> tuple[np.ndarray, float]:
    _check_params(n, m, d)
    count = _check_cap(n, m, cap)
    t0 = time.perf_counter()
    codec = CompositionCodec(n, m)
    ratio = binomial_ratio_table(d, n)
    values = np.empty(count, dtype=np.float64)
    bad = _dp_pass(n, m, ratio, codec.count_array(), values, check_order)
    if bad != -1:
        raise AssertionError(f"dependency order violated at rank {bad} for (n={n}, m={m})")
    return values, time.perf_counter() - t0


def solve(
    n: int,
    m: int,
    d: int,
    *,
    cap: int | None = None,
    check_order: bool = __debug__,
) -> SolveResult:
    """Exact ``E(D^d_{m,n})``.

    ``cap`` limits the number of states (default: ``state_cap()``).  With
    ``check_order`` every successor rank is asserted to be smaller than the
    current rank; it is on unless Python runs with ``-O``.
    """
    values, elapsed = _run(n, m, d, cap, check_order)
    return SolveResult(
        n=n,
        m=m,
        d=d,
        expected_runs=float(values[-1]),
        state_count=values.shape[0],
        peak_values_stored=values.shape[0],
        wall_time=elapsed,
    )


def state_values(n: int, m: int, d: int, *, cap: int | None = None) -> dict[tuple[int, ...], float]:
    """Expected remaining runs from every state, keyed by composition."""
    values, _ = _run(n, m, d, cap, True)
    codec = CompositionCodec(n, m)
    return {c: float(v) for c, v in zip(codec, values)}


def _warm_up() -> None:
    # keep JIT compilation out of profiled timings
    codec = CompositionCodec(1, 1)
    ratio = binomial_ratio_table(1, 1)
    _transition_pass(1, 1, ratio, codec.count_array(), 2)
    _dp_pass(1, 1, ratio, codec.count_array(), np.empty(2), False)


def solve_profile(n: int, m: int, d: int, *, cap: int | None = None) -> SolveResult:
    """``solve`` plus a timing split.

    ``timings`` holds ``setup`` (codec and ratio tables), ``transitions``
    (a pass that only evaluates transition probabilities), ``traversal``
    (full pass minus the transition-only pass, floored at 0) and ``total``.
    """
    _check_params(n, m, d)
    count = _check_cap(n, m, cap)
    _warm_up()
    t0 = time.perf_counter()
    codec = CompositionCodec(n, m)
    ratio = binomial_ratio_table(d, n)
    count_arr = codec.count_array()
    t1 = time.perf_counter()
    _transition_pass(n, m, ratio, count_arr, count)
    t2 = time.perf_counter()
    values = np.empty(count, dtype=np.float64)
    _dp_pass(n, m, ratio, count_arr, values, False)
    t3 = time.perf_counter()
    timings = {
        "setup": t1 - t0,
        "transitions": t2 - t1,
        "traversal": max(t3 - t2 - (t2 - t1), 0.0),
        "total": (t1 - t0) + (t3 - t2),
    }
    return SolveResult(
        n=n,
        m=m,
        d=d,
        expected_runs=float(values[-1]),
        state_count=count,
        peak_values_stored=count,
        wall_time=timings["total"],
        timings=timings,
    )


def solve_exact_rational(n: int, m: int, d: int) -> Fraction:
    """Exact expectation as a ``Fraction``, for tiny instances only.

    Evaluates the same first-step equations by memoized recursion on state
    tuples with ``math.comb`` probabilities; it shares no code with
    ``solve`` and serves as its oracle.
    """
    _check_params(n, m, d)
    size = math.comb(n + m, n)
    if size > ORACLE_STATE_LIMIT:
        raise CapacityError(
            f"oracle limited to {ORACLE_STATE_LIMIT} states, (n={n}, m={m}) has {size}",
            required=size,
            limit=ORACLE_STATE_LIMIT,
        )
    total = math.comb(n, d)

    @lru_cache(maxsize=None)
    def expect(state: tuple[int, ...]) -> Fraction:
        if state[m] == n:
            return Fraction(0)
        stay = math.comb(state[m], d)
        acc = Fraction(total)
        for i in range(m):
            if state[i] == 0:
                continue
            weight = math.comb(sum(state[i:]), d) - math.comb(sum(state[i + 1 :]), d)
            nxt = list(state)
            nxt[i] -= 1
            nxt[i + 1] += 1
            acc += weight * expect(tuple(nxt))
        return acc / (total - stay)

    return expect((n,) + (0,) * m)
