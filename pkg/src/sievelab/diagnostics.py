"""Unconditional desk-scale measurements on primes and Liouville values.

Counting conventions here follow p <= N (cumulative), unlike the
correlation functionals which average over the dyadic window [N, 2N);
each call site says which convention it uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .sieve import SieveTable
from .tuples import KTuple, singular_series

DEFAULT_TRUNCATION = 100_000


@dataclass
class TwinCountReport:
    """Count of p <= N with p + h prime, next to its first-order prediction."""

    N: int
    h: int
    count: int
    hl_prediction: float
    ratio: float

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "h": self.h,
            "count": self.count,
            "hl_prediction": self.hl_prediction,
            "ratio": self.ratio,
        }


class ApResult(NamedTuple):
    """Longest arithmetic progression found among twin starters."""

    length: int
    first_term: int
    common_difference: int


def pair_density(h: int, truncation_prime: int = DEFAULT_TRUNCATION) -> float:
    """The pair density constant for {0, h} (e.g. ~1.3203 for h = 2)."""
    return singular_series(KTuple((0, h)), truncation_prime).value


def _require_even_h(h: int) -> None:
    if h <= 0 or h % 2:
        raise ValueError("h must be a positive even integer")


def twin_count(
    N: int, h: int, table: SieveTable,
    method: str = "bitmap",
    truncation_prime: int = DEFAULT_TRUNCATION,
) -> TwinCountReport:
    """Count primes p <= N with p + h also prime.

    Two independent counting paths are provided: "bitmap" ANDs the
    shifted primality masks, "intersection" matches the explicit prime
    list against its shift. They must agree exactly.
    """
    _require_even_h(h)
    table.require_cover(2, N + h + 1)
    if method == "bitmap":
        flags = table.isprime_values(2, N + h + 1)
        count = int(np.count_nonzero(flags[: N - 1] & flags[h:]))
    elif method == "intersection":
        starters = table.primes_in(2, N + 1)
        all_primes = table.primes_in(2, N + h + 1)
        pos = np.searchsorted(all_primes, starters + h)
        pos = np.minimum(pos, len(all_primes) - 1)
        count = int(np.count_nonzero(all_primes[pos] == starters + h))
    else:
        raise ValueError(f"unknown counting method {method!r}")

    prediction = pair_density(h, truncation_prime) * N / math.log(N) ** 2
    return TwinCountReport(N, h, count, prediction, count / prediction)


def chowla_sum(x: int, h: int, table: SieveTable) -> int:
    """Exact integer value of sum_{n <= x} lam(n) * lam(n + h)."""
    if h <= 0:
        raise ValueError("h must be positive")
    table.require_cover(1, x + h + 1)
    lo = 1 - table.n0
    a = table.lam[lo : lo + x].astype(np.int64)
    b = table.lam[lo + h : lo + h + x].astype(np.int64)
    return int(np.sum(a * b))


def liouville_at_shifted_primes(
    x: int, d: int, table: SieveTable
) -> tuple[int, int]:
    """Counts of primes p <= x with lam(p + d) = -1 and = +1.

    d may be negative (shift below the prime); primes with p + d < 1 are
    skipped, which is the boundary adjustment in the partition identity
    count_minus + count_plus = pi(x).
    """
    if d == 0 or d % 2:
        raise ValueError("d must be a nonzero even integer")
    lo = max(2, 1 - d)
    if lo > x:
        return 0, 0
    table.require_cover(min(lo, lo + d), max(x + 1, x + d + 1))
    primes = table.primes_in(lo, x + 1)
    if len(primes) == 0:
        return 0, 0
    shifted = primes + d
    lam = table.lam[shifted - table.n0]
    minus = int(np.count_nonzero(lam == -1))
    return minus, len(primes) - minus


def twin_starters(N: int, h: int, table: SieveTable) -> np.ndarray:
    """All primes p <= N with p + h prime, ascending."""
    _require_even_h(h)
    table.require_cover(2, N + h + 1)
    flags = table.isprime_values(2, N + h + 1)
    return np.nonzero(flags[: N - 1] & flags[h:])[0].astype(np.int64) + 2


def longest_twin_ap(N: int, h: int, table: SieveTable) -> ApResult:
    """Longest arithmetic progression inside the twin-starter set.

    Exhaustive scan over starter pairs as the first two progression
    terms, with an early cutoff once the remaining span cannot beat the
    incumbent. Ties resolve to the smallest first term, then the
    smallest difference, which the ascending scan order yields for free.
    With fewer than 3 starters the degenerate progression is returned.
    """
    starters = [int(p) for p in twin_starters(N, h, table)]
    count = len(starters)
    if count < 3:
        if count == 0:
            return ApResult(0, 0, 0)
        if count == 1:
            return ApResult(1, starters[0], 0)
        return ApResult(2, starters[0], starters[1] - starters[0])

    member = set(starters)
    top = starters[-1]
    best = ApResult(2, starters[0], starters[1] - starters[0])
    for i in range(count - 1):
        first = starters[i]
        if 1 + (top - first) // (starters[i + 1] - first) <= best.length:
            continue  # even the tightest difference cannot beat the incumbent
        for j in range(i + 1, count):
            diff = starters[j] - first
            if 1 + (top - first) // diff <= best.length:
                break  # differences only grow within the inner loop
            length = 2
            nxt = starters[j] + diff
            while nxt in member:
                length += 1
                nxt += diff
            if length > best.length:
                best = ApResult(length, first, diff)
    return best
