import math

import pytest

from sievelab import (
    chowla_sum,
    liouville_at_shifted_primes,
    longest_twin_ap,
    pair_density,
    twin_count,
)
from sievelab.diagnostics import twin_starters

import oracles


def test_twin_count_tiny(table_small):
    assert twin_count(10, 2, table_small).count == 2  # (3,5), (5,7)
    assert twin_count(100, 2, table_small).count == 8


def test_twin_count_matches_bruteforce(table_small):
    for N in (50, 500, 2000):
        for h in (2, 4, 6):
            rep = twin_count(N, h, table_small)
            assert rep.count == oracles.twin_count_ref(N, h), (N, h)


def test_twin_count_paths_agree(table_million):
    a = twin_count(10**6, 2, table_million, method="bitmap")
    b = twin_count(10**6, 2, table_million, method="intersection")
    assert a.count == b.count


def test_twin_count_monotone_in_N(table_small):
    counts = [twin_count(N, 2, table_small).count for N in range(10, 2000, 97)]
    assert all(b >= a for a, b in zip(counts, counts[1:]))


def test_twin_count_rejects_odd_h(table_small):
    with pytest.raises(ValueError):
        twin_count(100, 3, table_small)
    with pytest.raises(ValueError):
        twin_count(100, -2, table_small)


def test_prediction_scaling(table_small):
    # prediction(N, h) / prediction(N, 2) depends only on the densities
    for h in (4, 6, 10):
        for N in (100, 1000):
            a = twin_count(N, h, table_small).hl_prediction
            b = twin_count(N, 2, table_small).hl_prediction
            assert a / b == pytest.approx(pair_density(h) / pair_density(2),
                                          rel=1e-12)


def test_chowla_hand_values(table_small):
    assert chowla_sum(10, 2, table_small) == -4
    assert chowla_sum(1, 2, table_small) == -1  # lam(1) * lam(3)


def test_chowla_matches_bruteforce(table_small):
    for x, h in ((50, 2), (321, 2), (200, 6)):
        assert chowla_sum(x, h, table_small) == oracles.chowla_ref(x, h)


def test_chowla_increment_consistency(table_small):
    for x in range(20, 60):
        step = chowla_sum(x + 1, 2, table_small) - chowla_sum(x, 2, table_small)
        assert step in (-1, 1)
        assert step == table_small.lam_of(x + 1) * table_small.lam_of(x + 3)


def test_shifted_liouville_hand_case(table_small):
    # primes 2,3,5,7: lam at 4,5,7,9 is +,-,-,+
    assert liouville_at_shifted_primes(10, 2, table_small) == (2, 2)


def test_shifted_liouville_partition(table_small):
    minus, plus = liouville_at_shifted_primes(1000, 2, table_small)
    pi = int(table_small.isprime_values(2, 1001).sum())
    assert minus + plus == pi
    assert (minus, plus) == oracles.shifted_liouville_ref(1000, 2)


def test_shifted_liouville_negative_shift(table_small):
    got = liouville_at_shifted_primes(500, -2, table_small)
    assert got == oracles.shifted_liouville_ref(500, -2)


def test_shifted_liouville_rejects_odd(table_small):
    with pytest.raises(ValueError):
        liouville_at_shifted_primes(100, 3, table_small)
    with pytest.raises(ValueError):
        liouville_at_shifted_primes(100, 0, table_small)


def test_negative_witness_for_small_shifts(table_million):
    # every even shift up to 18 shows lam(p + d) = -1 infinitely-looking often
    for d in range(2, 19, 2):
        minus, _ = liouville_at_shifted_primes(10**6, d, table_million)
        assert minus > 0, d


def test_ap_hand_case(table_small):
    assert longest_twin_ap(20, 2, table_small) == (3, 5, 6)


def test_ap_degenerate_cases(table_small):
    assert longest_twin_ap(2, 2, table_small) == (0, 0, 0)
    assert longest_twin_ap(3, 2, table_small) == (1, 3, 0)
    assert longest_twin_ap(6, 2, table_small) == (2, 3, 2)


def test_ap_matches_quadratic_oracle_small(table_small):
    starters = [int(p) for p in twin_starters(3000, 2, table_small)]
    got = longest_twin_ap(3000, 2, table_small)
    ref = oracles.longest_ap_ref(starters)
    assert got.length == ref[0]
    assert (got.first_term, got.common_difference) == (ref[1], ref[2])


def test_ap_matches_quadratic_oracle_100k(table_million):
    starters = [int(p) for p in twin_starters(10**5, 2, table_million)]
    got = longest_twin_ap(10**5, 2, table_million)
    ref = oracles.longest_ap_ref(starters)
    assert (got.length, got.first_term, got.common_difference) == ref


def test_ap_members_are_starters(table_million):
    got = longest_twin_ap(10**5, 2, table_million)
    starters = set(int(p) for p in twin_starters(10**5, 2, table_million))
    for i in range(got.length):
        assert got.first_term + i * got.common_difference in starters
