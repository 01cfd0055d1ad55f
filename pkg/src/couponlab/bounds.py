"""Lower/upper bounds and the large-``n`` estimate for ``E(D^d_{m,n})``.

Both bounds are expressed through ``e1 = E(D^1_{m,n})``, the single-offer
expectation:

* lower: ``C(n, d) / n^d * e1 / d``  (keep-all-distinct collector, compared
  against keeping ``d`` independent draws; the prefactor is the unordered
  count ``C(n, d)``, not the all-distinct probability ``d! C(n, d) / n^d``)
* upper: ``e1 / d + m n (1 - 1/d)``  (first-useful collector with
  repetition)

All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .closed_forms import expected_runs_d1
from .errors import CapacityError, InputError
from .exact_solver import solve, state_cap

__all__ = [
    "BoundsReport",
    "asymptotic_estimate",
    "bounds_report",
    "f_lemma",
    "f_lemma_curve",
    "lower_prefactor",
    "lower_bound",
    "single_offer_expectation",
    "upper_bound",
]


def _check(n: int, m: int, d: int, e1: float) -> None:
    if n < 1 or m < 1:
        raise InputError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    if not 1 <= d <= n:
        raise InputError(f"need 1 <= d <= n, got d={d}, n={n}")
    if not e1 > 0 or math.isinf(e1):
        raise InputError(f"e1 must be a positive finite expectation, got {e1}")


def lower_prefactor(n: int, d: int) -> float:
    """``C(n, d) / n^d`` as ``prod_{k<d} (n - k) / ((k + 1) n)``; never forms
    ``n^d``."""
    if not 1 <= d <= n:
        raise InputError(f"need 1 <= d <= n, got d={d}, n={n}")
    r = 1.0
    for k in range(d):
        r *= (n - k) / ((k + 1) * n)
    return r


def lower_bound(n: int, m: int, d: int, e1: float) -> float:
    _check(n, m, d, e1)
    return lower_prefactor(n, d) * e1 / d


def upper_bound(n: int, m: int, d: int, e1: float) -> float:
    _check(n, m, d, e1)
    return e1 / d + m * n * (1.0 - 1.0 / d)


def asymptotic_estimate(n: int, m: int, d: int) -> float:
    """``n ln n / d + n (m - 1) ln ln n / d`` (the ``O(mn)`` term is dropped,
    so this need not lie between the bounds)."""
    if n < 3:
        raise InputError(f"asymptotic estimate needs n >= 3 so that ln ln n > 0, got {n}")
    if m < 1 or d < 1:
        raise InputError(f"need m >= 1 and d >= 1, got m={m}, d={d}")
    log_n = math.log(n)
    return n * log_n / d + n * (m - 1) * math.log(log_n) / d


def f_lemma(i: int, n: int, d: int) -> float:
    """``n / (d i) - 1 / (1 - (1 - i/n)^d)``.

    Evaluated as ``(n / i) * (1/d - 1 / sum_{k<d} y^k)`` with ``y = 1 - i/n``,
    using ``1 - y^d = (i/n) sum_{k<d} y^k``; this is exact at ``d = 1`` and
    at ``i = n`` and avoids cancellation elsewhere.
    """
    if not 1 <= d <= n:
        raise InputError(f"need 1 <= d <= n, got d={d}, n={n}")
    if not 1 <= i <= n:
        raise InputError(f"need 1 <= i <= n, got i={i}, n={n}")
    y = (n - i) / n
    geom = 0.0
    power = 1.0
    for _ in range(d):
        geom += power
        power *= y
    return (n / i) * (1.0 / d - 1.0 / geom)


def f_lemma_curve(n: int, d: int) -> np.ndarray:
    """``f_lemma(i, n, d)`` for ``i = 1..n`` (same arithmetic, vectorized)."""
    if not 1 <= d <= n:
        raise InputError(f"need 1 <= d <= n, got d={d}, n={n}")
    i = np.arange(1, n + 1, dtype=np.float64)
    y = (n - i) / n
    geom = np.zeros(n)
    power = np.ones(n)
    for _ in range(d):
        geom += power
        power *= y
    return (n / i) * (1.0 / d - 1.0 / geom)


def single_offer_expectation(n: int, m: int, *, cap: int | None = None) -> float:
    """``E(D^1_{m,n})``: exact solver when the state space fits, else the
    Newman-Shepp quadrature."""
    try:
        return solve(n, m, 1, cap=cap).expected_runs
    except CapacityError:
        return expected_runs_d1(n, m)


@dataclass(frozen=True)
class BoundsReport:
    n: int
    m: int
    d: int
    lower: float
    upper: float
    asymptotic: float | None
    exact: float | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        if self.exact is None:
            del out["exact"]
        if self.asymptotic is None:
            del out["asymptotic"]
        return out


def bounds_report(n: int, m: int, d: int, *, cap: int | None = None, include_exact: bool = True) -> BoundsReport:
    """Bounds, estimate and (when the state space fits ``cap``) the exact value."""
    e1 = single_offer_expectation(n, m, cap=cap)
    exact = None
    if include_exact:
        if d == 1:
            exact = e1 if _fits(n, m, cap) else None
        else:
            try:
                exact = solve(n, m, d, cap=cap).expected_runs
            except CapacityError:
                exact = None
    return BoundsReport(
        n=n,
        m=m,
        d=d,
        lower=lower_bound(n, m, d, e1),
        upper=upper_bound(n, m, d, e1),
        asymptotic=asymptotic_estimate(n, m, d) if n >= 3 else None,
        exact=exact,
    )


def _fits(n: int, m: int, cap: int | None) -> bool:
    return math.comb(n + m, n) <= (state_cap() if cap is None else cap)
