import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from couponlab.combinatorics import iter_compositions
from couponlab.errors import InputError, InvalidTransitionError
from couponlab.state_space import Composition, apply_advance, phi, transitions


def enumerated_transitions(counts, d):
    """Level-hit frequencies found by listing every d-subset of concrete types."""
    m = len(counts) - 1
    held = [level for level, k in enumerate(counts) for _ in range(k)]
    subsets = list(itertools.combinations(range(len(held)), d))
    hits = [0] * (m + 1)
    for s in subsets:
        hits[min(held[t] for t in s)] += 1
    total = len(subsets)
    return Fraction(hits[m], total), [Fraction(h, total) for h in hits[:m]]


def test_composition_validation():
    assert Composition((2, 0, 1)).n == 3
    assert Composition((2, 0, 1)).m == 2
    with pytest.raises(InputError):
        Composition((3,))
    with pytest.raises(InputError):
        Composition((1, -1, 2))
    with pytest.raises(InputError):
        Composition((0, 0))


@pytest.mark.parametrize("n", [1, 2, 6, 17])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_phi_endpoints(n, m):
    assert phi(Composition.start(n, m)) == n * (1 + n) ** m
    assert phi(Composition.complete(n, m)) == n


def test_phi_worked_example():
    assert phi((6, 0, 0)) == 294


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("m", range(1, 4))
def test_phi_injective_and_decreasing(n, m):
    states = list(iter_compositions(n, m))
    assert len({phi(c) for c in states}) == len(states)
    for c in states:
        for i in range(m):
            if c[i] > 0:
                nxt = apply_advance(c, i)
                assert phi(nxt) < phi(c)
                assert phi(c) - phi(nxt) == (1 + n) ** (m - i) - (1 + n) ** (m - i - 1)


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("m", range(1, 4))
def test_transitions_match_subset_enumeration(n, m):
    for c in iter_compositions(n, m):
        for d in range(1, n + 1):
            stay, adv = enumerated_transitions(c, d)
            t = transitions(c, d)
            assert t.self_loop == pytest.approx(float(stay), abs=1e-15)
            for got, want in zip(t.advance, adv):
                assert got == pytest.approx(float(want), abs=1e-15)


def test_transition_examples():
    absorbing = transitions((0, 0, 5), 3)
    assert absorbing.self_loop == 1.0 and absorbing.advance == (0.0, 0.0)
    fresh = transitions((5, 0, 0), 2)
    assert fresh.self_loop == 0.0 and fresh.advance == (1.0, 0.0)
    half = transitions((1, 1), 1)
    assert half.self_loop == 0.5 and half.advance == (0.5,)


@st.composite
def state_and_d(draw):
    n = draw(st.integers(1, 50))
    m = draw(st.integers(1, 4))
    cuts = sorted(draw(st.lists(st.integers(0, n), min_size=m, max_size=m)))
    bounds = [0] + cuts + [n]
    counts = tuple(b - a for a, b in zip(bounds, bounds[1:]))
    return counts, draw(st.integers(1, n))


@given(state_and_d())
def test_probability_conservation(args):
    counts, d = args
    t = transitions(counts, d)
    assert abs(t.total - 1.0) <= 1e-12
    assert all(0.0 <= p <= 1.0 for p in (t.self_loop, *t.advance))
    for i, p in enumerate(t.advance):
        if counts[i] == 0:
            assert p == 0.0


@given(state_and_d())
def test_d_equals_n_is_deterministic(args):
    counts, _ = args
    n = sum(counts)
    t = transitions(counts, n)
    if counts[-1] == n:
        assert t.self_loop == 1.0
        return
    lowest = min(i for i, k in enumerate(counts) if k > 0)
    assert t.self_loop == 0.0
    assert t.advance[lowest] == 1.0
    assert sum(p for i, p in enumerate(t.advance) if i != lowest) == 0.0


def test_transitions_bad_d():
    with pytest.raises(InputError):
        transitions((2, 1), 0)
    with pytest.raises(InputError):
        transitions((2, 1), 4)


def test_apply_advance():
    assert apply_advance((2, 0, 0), 0).counts == (1, 1, 0)
    assert apply_advance((1, 1), 0).counts == (0, 2)
    with pytest.raises(InvalidTransitionError):
        apply_advance((0, 2, 1), 0)
    with pytest.raises(InputError):
        apply_advance((1, 1), 1)


@given(state_and_d())
def test_advance_preserves_total_and_lowers_phi(args):
    counts, _ = args
    c = Composition(counts)
    for i in range(c.m):
        if counts[i]:
            nxt = apply_advance(c, i)
            assert nxt.n == c.n
            assert phi(c) - phi(nxt) == (1 + c.n) ** (c.m - i) - (1 + c.n) ** (c.m - i - 1) > 0
