import math
import random

import numpy as np
import pytest

from sievelab import CacheError, MemoryBudgetError, RangeError, build_table
from sievelab.sieve import load_table, primes_up_to, save_table

import oracles


def test_liouville_sign_examples(table_small):
    # lam = (-1)**Omega with multiplicity
    assert table_small.lam_of(1) == 1
    assert table_small.lam_of(2) == -1
    assert table_small.lam_of(4) == 1


def test_mu_lambda_at_12(table_small):
    # 12 = 2**2 * 3: Omega = 3, squared factor
    assert table_small.mu_of(12) == 0
    assert table_small.lam_of(12) == -1


def test_first_values_match_trial_division(table_small):
    for n in range(1, 2000):
        assert table_small.lam_of(n) == oracles.lam_ref(n), n
        assert table_small.mu_of(n) == oracles.mu_ref(n), n
        assert table_small.is_prime(n) == oracles.isprime_ref(n), n
        assert table_small.spf_of(n) == oracles.spf_ref(n), n


def test_high_window_matches_trial_division():
    n0 = 10**6
    table = build_table(n0, 10**3)
    for n in range(n0, n0 + 10**3):
        assert table.lam_of(n) == oracles.lam_ref(n), n
        assert table.mu_of(n) == oracles.mu_ref(n), n
        assert table.is_prime(n) == oracles.isprime_ref(n), n
        assert table.spf_of(n) == oracles.spf_ref(n), n


def test_value_invariants(table_small):
    assert set(np.unique(table_small.lam)) <= {-1, 1}
    assert set(np.unique(table_small.mu)) <= {-1, 0, 1}
    nonzero = table_small.mu != 0
    assert np.array_equal(table_small.mu[nonzero], table_small.lam[nonzero])


def test_prime_rows_are_consistent(table_small):
    for p in (2, 3, 5, 97, 3571):
        assert table_small.is_prime(p)
        assert table_small.lam_of(p) == -1
        assert table_small.mu_of(p) == -1
        assert table_small.spf_of(p) == p


def test_liouville_complete_multiplicativity(table_small):
    rng = random.Random(7)
    for _ in range(300):
        a = rng.randrange(2, 80)
        b = rng.randrange(2, 70)
        assert table_small.lam_of(a * b) == table_small.lam_of(a) * table_small.lam_of(b)


def test_theta_examples(table_small):
    assert table_small.theta(7) == math.log(7)
    assert table_small.theta(8) == 0.0
    assert table_small.theta(1) == 0.0
    with pytest.raises(RangeError):
        table_small.theta(6001)


def test_theta_values_match_scalars(table_small):
    vec = table_small.theta_values(90, 130)
    for i, n in enumerate(range(90, 130)):
        assert vec[i] == table_small.theta(n)


def test_segment_boundary_independence():
    whole = build_table(1000, 700)
    left = build_table(1000, 300)
    right = build_table(1300, 400)
    for field in ("spf", "lam", "mu", "isprime"):
        merged = np.concatenate([getattr(left, field), getattr(right, field)])
        assert np.array_equal(getattr(whole, field), merged), field


@pytest.mark.parametrize("segment_size", [64, 1001, 1 << 20])
def test_segment_size_independence(segment_size):
    a = build_table(500, 2500)
    b = build_table(500, 2500, segment_size=segment_size)
    for field in ("spf", "lam", "mu", "isprime"):
        assert np.array_equal(getattr(a, field), getattr(b, field))


def test_threaded_build_identical():
    a = build_table(1, 50000, segment_size=4096, threads=1)
    b = build_table(1, 50000, segment_size=4096, threads=4)
    for field in ("spf", "lam", "mu", "isprime"):
        assert np.array_equal(getattr(a, field), getattr(b, field))


def test_squarefree_density_trend(table_million):
    x = 10**6
    density = np.count_nonzero(table_million.mu[:x]) / x
    assert abs(density - 6 / math.pi**2) < 0.01


def test_prime_flags_on_random_samples(table_million):
    rng = random.Random(20260810)
    samples = [rng.randrange(1, 10**6) for _ in range(10**4)]
    for n in samples:
        assert table_million.is_prime(n) == oracles.isprime_ref(n), n


def test_range_validation():
    with pytest.raises(RangeError):
        build_table(0, 10)
    with pytest.raises(RangeError):
        build_table(2**63 - 5, 10)
    with pytest.raises(MemoryBudgetError):
        build_table(1, 10**7, memory_budget=10**6)


def test_tables_are_immutable(table_small):
    with pytest.raises(ValueError):
        table_small.lam[0] = 5


def test_cache_roundtrip(tmp_path):
    table = build_table(977, 4321)
    path = tmp_path / "window.gpyt"
    save_table(table, path)
    back = load_table(path)
    assert (back.n0, back.length) == (table.n0, table.length)
    for field in ("spf", "lam", "mu", "isprime"):
        assert np.array_equal(getattr(back, field), getattr(table, field))


def test_cache_detects_corruption(tmp_path):
    table = build_table(1, 2000)
    path = tmp_path / "window.gpyt"
    save_table(table, path)
    raw = bytearray(path.read_bytes())
    raw[100] ^= 0xFF
    path.write_bytes(bytes(raw))
    with pytest.raises(CacheError):
        load_table(path)


def test_cache_rejects_bad_magic(tmp_path):
    path = tmp_path / "bogus.gpyt"
    path.write_bytes(b"NOPE" + b"\x00" * 40)
    with pytest.raises(CacheError):
        load_table(path)


def test_primes_up_to():
    assert list(primes_up_to(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(primes_up_to(1)) == 0
