"""Collector states and the one-run transition law of the keep-fewest chain.

A state records, for each level ``i = 0..m``, how many coupon types the
collector currently holds exactly ``i`` times.  In one run the collector is
offered ``d`` distinct types and keeps one copy of the offered type it has
the fewest of; the state moves one type from level ``i`` to ``i + 1``, or
stays put when every offered type is already complete.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .combinatorics import binomial_ratio
from .errors import InputError, InvalidTransitionError

__all__ = [
    "Composition",
    "TransitionDistribution",
    "apply_advance",
    "phi",
    "transitions",
]


@dataclass(frozen=True)
class Composition:
    """Counts ``(n_0, ..., n_m)``: ``n_i`` types are held exactly ``i`` times."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        counts = tuple(int(x) for x in self.counts)
        object.__setattr__(self, "counts", counts)
        if len(counts) < 2:
            raise InputError("a state needs m >= 1, i.e. at least two levels")
        if any(x < 0 for x in counts):
            raise InputError(f"negative level count in {counts}")
        if sum(counts) < 1:
            raise InputError("a state needs at least one coupon type")

    @classmethod
    def start(cls, n: int, m: int) -> Composition:
        """Nothing collected yet: ``(n, 0, ..., 0)``."""
        return cls((n,) + (0,) * m)

    @classmethod
    def complete(cls, n: int, m: int) -> Composition:
        """Every type held ``m`` times: ``(0, ..., 0, n)``."""
        return cls((0,) * m + (n,))

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def m(self) -> int:
        return len(self.counts) - 1

    @property
    def is_complete(self) -> bool:
        return self.counts[-1] == self.n

    def __iter__(self):
        return iter(self.counts)

    def __len__(self) -> int:
        return len(self.counts)

    def __getitem__(self, i: int) -> int:
        return self.counts[i]


def _as_composition(c: Composition | Sequence[int]) -> Composition:
    return c if isinstance(c, Composition) else Composition(tuple(c))


@dataclass(frozen=True)
class TransitionDistribution:
    """One-run law: stay with ``self_loop``; move a type from level ``i`` to
    ``i + 1`` with ``advance[i]``."""

    self_loop: float
    advance: tuple[float, ...]

    @property
    def total(self) -> float:
        return self.self_loop + sum(self.advance)


def phi(c: Composition | Sequence[int]) -> int:
    """Potential ``sum_i (1 + n)^(m - i) * n_i``; strictly decreases along
    every advance, so it certifies that the solver's order is sound."""
    c = _as_composition(c)
    base = 1 + c.n
    m = c.m
    return sum(base ** (m - i) * x for i, x in enumerate(c.counts))


def transitions(c: Composition | Sequence[int], d: int) -> TransitionDistribution:
    """Transition law from ``c`` when ``d`` distinct types are offered.

    With ``S_i = n_i + ... + n_m`` (types held at least ``i`` times), the
    kept coupon lands on level ``i`` exactly when every offered type is at
    level ``>= i`` and at least one is at level ``i``:

        p_i = [C(S_i, d) - C(S_{i+1}, d)] / C(n, d),   self_loop = C(n_m, d) / C(n, d)
    """
    c = _as_composition(c)
    n, m = c.n, c.m
    if not 1 <= d <= n:
        raise InputError(f"need 1 <= d <= n, got d={d}, n={n}")
    # suffix[i] = S_i, built right to left
    suffix = [0] * (m + 2)
    for i in range(m, -1, -1):
        suffix[i] = suffix[i + 1] + c.counts[i]
    ratio = [binomial_ratio(s, d, n) for s in suffix[: m + 1]]
    self_loop = ratio[m]
    advance = tuple(ratio[i] - ratio[i + 1] for i in range(m))
    return TransitionDistribution(self_loop=self_loop, advance=advance)


def apply_advance(c: Composition | Sequence[int], i: int) -> Composition:
    """State after one type moves from level ``i`` to level ``i + 1``."""
    c = _as_composition(c)
    if not 0 <= i < c.m:
        raise InputError(f"level {i} outside 0..{c.m - 1}")
    if c.counts[i] == 0:
        raise InvalidTransitionError(f"no type held {i} times in {c.counts}")
    counts = list(c.counts)
    counts[i] -= 1
    counts[i + 1] += 1
    return Composition(tuple(counts))
