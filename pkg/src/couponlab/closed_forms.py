"""Special cases with known expressions.

* ``d = 1, m = 1``: ``n * H_n``.
* ``d = 1, m >= 1``: ``n * int_0^inf 1 - (1 - S_m(t) e^-t)^n dt`` with
  ``S_m(t) = sum_{k<m} t^k / k!`` (Newman and Shepp), evaluated by
  adaptive Simpson quadrature on a truncated range.
* ``d >= 1, m = 1``: ``sum_{i<n} 1 / (1 - C(i, d) / C(n, d))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .combinatorics import binomial_ratio_table, harmonic
from .errors import ConvergenceError, InputError

__all__ = [
    "QuadratureSettings",
    "expected_runs_d1",
    "expected_runs_d1_m1",
    "expected_runs_m1",
    "newman_shepp_integral",
    "poisson_below",
]


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    truncation_eps: float = 1e-14
    max_depth: int = 60
    initial_panels: int = 16

    def __post_init__(self) -> None:
        for name in ("rel_tol", "abs_tol", "truncation_eps"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_depth < 1 or self.initial_panels < 1:
            raise InputError("max_depth and initial_panels must be >= 1")


def expected_runs_d1_m1(n: int) -> float:
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    return n * harmonic(n)


def expected_runs_m1(n: int, d: int) -> float:
    """One full set, best of ``d`` distinct offers per run."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if not 1 <= d <= n:
        raise InputError(f"need 1 <= d <= n, got d={d}, n={n}")
    ratio = binomial_ratio_table(d, n)
    total = 0.0
    for r in ratio[:n].tolist():
        total += 1.0 / (1.0 - r)
    return total


def poisson_below(t: float, m: int) -> float:
    """``S_m(t) e^-t``, i.e. ``P(Poisson(t) < m)``, by the running term
    ``term_{k+1} = term_k * t / (k + 1)``."""
    term = math.exp(-t)
    total = term
    for k in range(1, m):
        term *= t / k
        total += term
    return total


def _integrand(t: float, n: int, m: int) -> float:
    q = poisson_below(t, m)
    if q >= 1.0:
        return 1.0
    # 1 - (1 - q)^n without cancellation for small q
    return -math.expm1(n * math.log1p(-q))


def _tail_bound(T: float, n: int, m: int) -> float:
    # int_T^inf n q(t) dt = n e^-T sum_{k<m} S_{k+1}(T)
    term = math.exp(-T)
    partial = term
    total = partial
    for k in range(1, m):
        term *= T / k
        partial += term
        total += partial
    return n * total


def _truncation_point(n: int, m: int, eps: float) -> float:
    T = 1.0
    while n * poisson_below(T, m) >= eps:
        T *= 2.0
        if T > 1e6:
            raise ConvergenceError(f"no truncation point found for n={n}, m={m}")
    return T


def _adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int) -> tuple[float, float]:
    def simpson(fa, fm, fb, h):
        return h / 6.0 * (fa + 4.0 * fm + fb)

    def refine(a, b, fa, fm, fb, whole, tol, depth):
        mid = 0.5 * (a + b)
        lm = 0.5 * (a + mid)
        rm = 0.5 * (mid + b)
        flm = f(lm)
        frm = f(rm)
        left = simpson(fa, flm, fm, mid - a)
        right = simpson(fm, frm, fb, b - mid)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0, abs(delta) / 15.0
        if depth >= max_depth:
            raise ConvergenceError(
                f"adaptive Simpson hit depth {max_depth} on [{a}, {b}]; "
                f"local error {abs(delta) / 15.0:.3e} > tolerance {tol:.3e}",
                achieved=abs(delta) / 15.0,
            )
        lv, le = refine(a, mid, fa, flm, fm, left, 0.5 * tol, depth + 1)
        rv, re = refine(mid, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
        return lv + rv, le + re

    fa, fb = f(a), f(b)
    fm = f(0.5 * (a + b))
    return refine(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 0)


def newman_shepp_integral(
    n: int, m: int, settings: QuadratureSettings | None = None
) -> tuple[float, float]:
    """``n * int_0^inf [1 - (1 - S_m(t) e^-t)^n] dt`` and an error budget.

    The range is cut at the first ``T`` (by doubling) with
    ``n S_m(T) e^-T < truncation_eps``; the integrand is at most
    ``n S_m(t) e^-t``, whose integral beyond ``T`` is added to the budget.
    """
    if n < 1 or m < 1:
        raise InputError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    s = settings or QuadratureSettings()
    T = _truncation_point(n, m, s.truncation_eps)

    def f(t: float) -> float:
        return _integrand(t, n, m)

    edges = [T * k / s.initial_panels for k in range(s.initial_panels + 1)]
    # rough composite Simpson to scale the relative tolerance
    rough = sum(
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b)) for a, b in zip(edges, edges[1:])
    )
    tol = max(s.abs_tol, s.rel_tol * abs(rough)) / s.initial_panels
    value = 0.0
    err = 0.0
    for a, b in zip(edges, edges[1:]):
        v, e = _adaptive_simpson(f, a, b, tol, s.max_depth)
        value += v
        err += e
    return n * value, n * (err + _tail_bound(T, n, m))


def expected_runs_d1(n: int, m: int, settings: QuadratureSettings | None = None) -> float:
    """``m`` full sets with a single offer per run."""
    value, _ = newman_shepp_integral(n, m, settings)
    return value
