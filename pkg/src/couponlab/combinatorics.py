"""Exact and overflow-safe combinatorial primitives.

Binomial coefficients are kept as exact Python integers in a Pascal
triangle.  Probabilities built from binomial ratios are evaluated as
products of small ratios so that nothing larger than a double is formed.

Collector states are weak compositions ``(n_0, ..., n_m)`` of ``n``.  They
are ranked in ascending lexicographic order of ``(n_0, ..., n_{m-1})``,
which is the nested-loop order of the exact solver, so the solver can use
the rank as a dense array index.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence

import numpy as np

from .errors import CapacityError, InputError

__all__ = [
    "BinomialTable",
    "CompositionCodec",
    "binomial",
    "binomial_ratio",
    "binomial_ratio_table",
    "harmonic",
    "iter_compositions",
]


class BinomialTable:
    """Pascal triangle of exact binomial coefficients.

    Rows ``0..max_n`` are stored up to column ``max_k``; queries use the
    symmetry ``C(a, b) = C(a, a - b)`` so any ``b`` with ``min(b, a - b) <=
    max_k`` is answered.  ``C(a, b)`` for ``b > a`` is 0.
    """

    def __init__(self, max_n: int, max_k: int | None = None):
        if max_n < 0:
            raise InputError(f"max_n must be non-negative, got {max_n}")
        if max_k is None:
            max_k = max_n
        if max_k < 0:
            raise InputError(f"max_k must be non-negative, got {max_k}")
        self.max_n = max_n
        self.max_k = min(max_k, max_n)
        rows: list[tuple[int, ...]] = [(1,)]
        for a in range(1, max_n + 1):
            prev = rows[-1]
            width = min(a, self.max_k) + 1
            row = [1] * width
            for b in range(1, width):
                left = prev[b - 1]
                right = prev[b] if b < len(prev) else 0
                row[b] = left + right
            rows.append(tuple(row))
        self._rows = tuple(rows)

    def binomial(self, a: int, b: int) -> int:
        if a < 0 or b < 0:
            raise InputError(f"binomial arguments must be non-negative, got ({a}, {b})")
        if b > a:
            return 0
        if a > self.max_n:
            raise CapacityError(
                f"C({a}, {b}) exceeds table capacity max_n={self.max_n}",
                required=a,
                limit=self.max_n,
            )
        b = min(b, a - b)
        if b > self.max_k:
            raise CapacityError(
                f"C({a}, {b}) exceeds table column capacity max_k={self.max_k}",
                required=b,
                limit=self.max_k,
            )
        return self._rows[a][b]

    __call__ = binomial

    def row(self, a: int) -> tuple[int, ...]:
        """Stored prefix ``C(a, 0..min(a, max_k))`` of row ``a``."""
        if not 0 <= a <= self.max_n:
            raise CapacityError(f"row {a} outside table 0..{self.max_n}", required=a, limit=self.max_n)
        return self._rows[a]


_DEFAULT_MAX_N = 1024
_DEFAULT_MAX_K = 64
_default_table: BinomialTable | None = None


def binomial(a: int, b: int) -> int:
    """``C(a, b)`` from a shared table (rows up to 1024, columns up to 64)."""
    global _default_table
    if _default_table is None:
        _default_table = BinomialTable(_DEFAULT_MAX_N, _DEFAULT_MAX_K)
    return _default_table.binomial(a, b)


def _check_ratio_args(i: int, d: int, n: int) -> None:
    if not 1 <= d <= n:
        raise InputError(f"need 1 <= d <= n, got d={d}, n={n}")
    if not 0 <= i <= n:
        raise InputError(f"need 0 <= i <= n, got i={i}, n={n}")


def binomial_ratio(i: int, d: int, n: int) -> float:
    """``C(i, d) / C(n, d)`` as a product of ``d`` ratios ``(i - k)/(n - k)``."""
    _check_ratio_args(i, d, n)
    if i < d:
        return 0.0
    if i == n:
        return 1.0
    r = 1.0
    for k in range(d):
        r *= (i - k) / (n - k)
    return r


def binomial_ratio_table(d: int, n: int) -> np.ndarray:
    """``binomial_ratio(s, d, n)`` for every ``s`` in ``0..n``, as float64.

    Elementwise identical to the scalar function (same operations in the
    same order).
    """
    _check_ratio_args(0, d, n)
    s = np.arange(n + 1, dtype=np.float64)
    r = np.ones(n + 1, dtype=np.float64)
    for k in range(d):
        r *= (s - k) / (n - k)
    r[:d] = 0.0
    r[n] = 1.0
    return r


def harmonic(n: int) -> float:
    """``H_n``, accumulated from the smallest term upward."""
    if n < 1:
        raise InputError(f"harmonic number needs n >= 1, got {n}")
    total = 0.0
    for k in range(n, 0, -1):
        total += 1.0 / k
    return total


def iter_compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of ``n`` into ``m + 1`` parts, in rank order."""
    if n < 0 or m < 0:
        raise InputError(f"need n >= 0 and m >= 0, got n={n}, m={m}")
    counts = [0] * (m + 1)

    def rec(j: int, left: int) -> Iterator[tuple[int, ...]]:
        if j == m:
            counts[m] = left
            yield tuple(counts)
            return
        for v in range(left + 1):
            counts[j] = v
            yield from rec(j + 1, left - v)

    yield from rec(0, n)


class CompositionCodec:
    """Constant-time (for fixed ``m``) rank/unrank of weak compositions.

    ``count(r, k)`` is ``C(r + k, k)``: the number of weak compositions of
    ``r`` into ``k + 1`` parts.  The rank of ``(n_0, ..., n_m)`` is

        sum_j count(r_j, m - j) - count(r_j - n_j, m - j),   j = 0..m-1

    with ``r_j = n - n_0 - ... - n_{j-1}``: the j-th term counts the states
    sharing the prefix ``n_0..n_{j-1}`` whose ``j``-th entry is smaller.
    """

    def __init__(self, n: int, m: int):
        if n < 1:
            raise InputError(f"n must be >= 1, got {n}")
        if m < 1:
            raise InputError(f"m must be >= 1, got {m}")
        self.n = n
        self.m = m
        self.parts = m + 1
        table = BinomialTable(n + m, m)
        self._count = tuple(
            tuple(table.binomial(r + k, k) for k in range(m + 1)) for r in range(n + 1)
        )
        self.size = self._count[n][m]

    def count_array(self) -> np.ndarray:
        """The ``count`` table as an ``(n + 1, m + 1)`` int64 array."""
        if self.size >= 2**63:
            raise CapacityError(f"state count {self.size} does not fit int64", required=self.size)
        return np.array(self._count, dtype=np.int64)

    def _validate(self, c: Sequence[int]) -> tuple[int, ...]:
        c = tuple(int(x) for x in c)
        if len(c) != self.parts:
            raise InputError(f"composition needs {self.parts} parts, got {len(c)}")
        if any(x < 0 for x in c):
            raise InputError(f"negative component in {c}")
        if sum(c) != self.n:
            raise InputError(f"components of {c} sum to {sum(c)}, expected {self.n}")
        return c

    def rank(self, c: Sequence[int]) -> int:
        counts = getattr(c, "counts", c)
        counts = self._validate(counts)
        m = self.m
        cnt = self._count
        idx = 0
        left = self.n
        for j in range(m):
            k = m - j
            idx += cnt[left][k] - cnt[left - counts[j]][k]
            left -= counts[j]
        return idx

    def unrank(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise InputError(f"index {index} outside 0..{self.size - 1}")
        m = self.m
        cnt = self._count
        out = [0] * self.parts
        left = self.n
        rem = index
        for j in range(m):
            k = m - j
            total = cnt[left][k]
            # largest v with (states whose entry j is < v) <= rem
            lo, hi = 0, left
            while lo < hi:
                mid = (lo + hi + 1) // 2
                if total - cnt[left - mid][k] <= rem:
                    lo = mid
                else:
                    hi = mid - 1
            out[j] = lo
            rem -= total - cnt[left - lo][k]
            left -= lo
        out[m] = left
        return tuple(out)

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter_compositions(self.n, self.m)
