import math

import numba
import numpy as np
import pytest

from couponlab.bounds import lower_prefactor
from couponlab.closed_forms import expected_runs_d1_m1
from couponlab.errors import InputError, SimulationError
from couponlab.exact_solver import solve
from couponlab.simulator import (
    Policy,
    compare_policies,
    simulate,
    simulate_once,
    simulate_samples,
    substream_draws,
)

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def splitmix64(seed, count):
    out = []
    for _ in range(count):
        seed = (seed + GOLDEN) & MASK
        out.append(mix64(seed))
    return out


def xoshiro_reference(seed, k, count):
    rotl = lambda x, r: ((x << r) | (x >> (64 - r))) & MASK  # noqa: E731
    key = mix64((seed + (k + 1) * GOLDEN) & MASK)
    s = splitmix64(key, 4)
    out = []
    for _ in range(count):
        out.append((rotl((s[1] * 5) & MASK, 7) * 9) & MASK)
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
    return out


def test_splitmix_reference_vector():
    # published first output of SplitMix64 seeded with 0
    assert splitmix64(0, 1)[0] == 0xE220A8397B1DCDAF


@pytest.mark.parametrize("seed,k", [(0, 0), (42, 7), (2**64 - 1, 123456), (12345, 0)])
def test_generator_matches_reference(seed, k):
    assert substream_draws(seed, k, 16) == xoshiro_reference(seed, k, 16)


def test_policy_parsing():
    assert Policy.parse("keep-fewest") is Policy.KEEP_FEWEST
    assert Policy.parse(Policy.FIRST_USEFUL) is Policy.FIRST_USEFUL
    with pytest.raises(InputError):
        Policy.parse("greedy")


@pytest.mark.parametrize("n,m", [(1, 1), (5, 3), (30, 2)])
def test_d_equals_n_keep_fewest_is_deterministic(n, m):
    samples = simulate_samples(n, m, n, Policy.KEEP_FEWEST, 200, seed=9)
    assert (samples == m * n).all()


@pytest.mark.parametrize("policy", list(Policy))
@pytest.mark.parametrize("m", [1, 4])
def test_single_type(policy, m):
    assert (simulate_samples(1, m, 1, policy, 50, seed=1) == m).all()


def test_two_types_matches_harmonic():
    res = simulate(2, 1, 1, Policy.KEEP_FEWEST, 100_000, seed=2024)
    target = expected_runs_d1_m1(2)
    assert abs(res.mean - target) <= 3 * res.std_err


def test_result_fields_and_determinism():
    a = simulate(30, 2, 3, "keep_fewest", 5000, seed=77)
    b = simulate(30, 2, 3, "keep_fewest", 5000, seed=77)
    assert a == b
    assert a.std_err == a.std_dev / math.sqrt(a.replications)
    assert a.replications == 5000 and a.seed == 77
    assert simulate(30, 2, 3, "keep_fewest", 5000, seed=78) != a


def test_replications_are_independent_of_batching():
    whole = simulate_samples(25, 2, 2, Policy.FIRST_USEFUL, 300, seed=5)
    parts = np.concatenate(
        [simulate_samples(25, 2, 2, Policy.FIRST_USEFUL, 100, seed=5, start=s) for s in (0, 100, 200)]
    )
    assert (whole == parts).all()
    assert simulate_once(25, 2, 2, Policy.FIRST_USEFUL, seed=5, replication=137) == whole[137]


def test_thread_count_does_not_change_results():
    full = simulate_samples(40, 2, 3, Policy.KEEP_FEWEST, 2000, seed=11)
    before = numba.get_num_threads()
    try:
        numba.set_num_threads(1)
        single = simulate_samples(40, 2, 3, Policy.KEEP_FEWEST, 2000, seed=11)
    finally:
        numba.set_num_threads(before)
    assert (full == single).all()


@pytest.mark.parametrize("policy", list(Policy))
@pytest.mark.parametrize("n,m,d", [(10, 2, 3), (12, 1, 12), (20, 3, 2)])
def test_minimum_completion_time(policy, n, m, d):
    samples = simulate_samples(n, m, d, policy, 2000, seed=3)
    assert samples.min() >= policy.min_runs(n, m, d)


@pytest.mark.parametrize("n", [10, 50])
@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_keep_fewest_matches_dp(n, m, d):
    res = simulate(n, m, d, Policy.KEEP_FEWEST, 20_000, seed=1000 + 100 * n + 10 * m + d)
    exact = solve(n, m, d).expected_runs
    assert abs(res.mean - exact) <= 4 * res.std_err


def test_policies_coincide_when_d_is_1():
    results = compare_policies(15, 2, 1, 50_000, seed=21)
    for a in results:
        for b in results:
            assert abs(a.mean - b.mean) <= 3 * math.hypot(a.std_err, b.std_err)


def test_policy_ordering():
    by_policy = {r.policy: r for r in compare_policies(20, 2, 3, 50_000, seed=8)}
    fewest = by_policy[Policy.KEEP_FEWEST]
    keep_all = by_policy[Policy.KEEP_ALL_DISTINCT]
    first = by_policy[Policy.FIRST_USEFUL]
    assert keep_all.interval(3)[1] < fewest.interval(3)[0]
    assert fewest.mean <= first.mean + 3 * first.std_err


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("m", [1, 2])
def test_keep_all_lemma(d, m):
    t1 = simulate(10, m, d, Policy.KEEP_ALL_DISTINCT, 50_000, seed=31)
    t2 = simulate(10, m, d, Policy.KEEP_ALL_REPETITION, 50_000, seed=32)
    assert t1.mean + 3 * t1.std_err >= lower_prefactor(10, d) * (t2.mean - 3 * t2.std_err)


def test_errors():
    with pytest.raises(InputError):
        simulate(10, 1, 2, "keep_fewest", 1, seed=1)
    with pytest.raises(InputError):
        simulate(10, 1, 11, "keep_fewest", 10, seed=1)
    with pytest.raises(InputError):
        simulate(10, 1, 2, "keep_fewest", 10, seed=-1)
    with pytest.raises(InputError):
        simulate(10, 1, 2, "keep_fewest", 10, seed=1.5)
    with pytest.raises(SimulationError, match="exceeded"):
        simulate(50, 2, 1, "keep_fewest", 10, seed=1, run_cap=20)
