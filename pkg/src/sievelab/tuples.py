"""Admissible offset tuples, residue counts, CRT roots, and singular series.

An offset tuple H = {h_1 < ... < h_k} occupies nu_p(H) residue classes
modulo each prime p; it is admissible when nu_p < p for every p. The
associated Euler product over (1 - nu_p/p) / (1 - 1/p)**k measures the
local solubility density of the pattern and vanishes exactly on
inadmissible tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iter_product

from .sieve import is_prime_int, primes_up_to


@dataclass(frozen=True)
class KTuple:
    """Strictly increasing non-negative offsets h_1 < ... < h_k."""

    offsets: tuple[int, ...]

    def __post_init__(self):
        offs = tuple(int(h) for h in self.offsets)
        if not offs:
            raise ValueError("offset tuple must be non-empty")
        if offs[0] < 0:
            raise ValueError("offsets must be non-negative")
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise ValueError("offsets must be strictly increasing")
        object.__setattr__(self, "offsets", offs)

    @classmethod
    def parse(cls, text: str) -> "KTuple":
        """Parse a comma-separated offset list such as "0,2" or "0,4,6"."""
        try:
            offs = tuple(int(part) for part in text.split(","))
        except ValueError as exc:
            raise ValueError(f"cannot parse tuple {text!r}") from exc
        return cls(offs)

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def span(self) -> int:
        """The largest offset h_k."""
        return self.offsets[-1]

    def polynomial_at(self, n: int) -> int:
        """The product (n + h_1) * ... * (n + h_k)."""
        out = 1
        for h in self.offsets:
            out *= n + h
        return out


@dataclass(frozen=True)
class SingularSeriesValue:
    """Truncated Euler product with a certified relative tail bound."""

    value: float
    truncation_prime: int
    tail_bound: float


def nu_p(H: KTuple, p: int) -> int:
    """Number of residue classes occupied by H modulo the prime p."""
    if not is_prime_int(p):
        raise ValueError(f"{p} is not prime")
    if p > H.span:
        # offsets in [0, h_k] are pairwise distinct mod p once p > h_k
        return H.k
    return len({h % p for h in H.offsets})


def is_admissible(H: KTuple) -> bool:
    """True when H misses a residue class modulo every prime.

    Only p <= k needs checking: for p > k, nu_p <= k < p holds anyway.
    """
    return all(nu_p(H, int(p)) < p for p in primes_up_to(H.k))


def squarefree_prime_factors(m: int) -> list[int]:
    """Prime factors of squarefree m >= 1, ascending; rejects other m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    out = []
    rest = m
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            rest //= p
            if rest % p == 0:
                raise ValueError(f"{m} is not squarefree")
            out.append(p)
        p += 1 if p == 2 else 2
    if rest > 1:
        out.append(rest)
    return out


def nu_m(H: KTuple, m: int) -> int:
    """Multiplicative extension of nu_p to squarefree moduli."""
    count = 1
    for p in squarefree_prime_factors(m):
        count *= nu_p(H, p)
    return count


def residue_roots_from_factors(H: KTuple, prime_factors, d: int) -> list[int]:
    """CRT-combined roots of prod(n + h_i) = 0 mod squarefree d.

    prime_factors must be the ascending prime factorization of d. Roots
    are enumerated in mixed-radix order over the per-prime root sets and
    then sorted, so the output order is deterministic.
    """
    if d == 1:
        return [0]
    per_prime = [sorted({(-h) % p for h in H.offsets}) for p in prime_factors]
    # CRT basis element for each prime: (d/p) times its inverse mod p.
    bases = []
    for p in prime_factors:
        m_p = d // p
        bases.append(m_p * pow(m_p, -1, p))
    roots = []
    for combo in iter_product(*per_prime):
        r = 0
        for residue, base in zip(combo, bases):
            r += residue * base
        roots.append(r % d)
    roots.sort()
    return roots


def residue_roots(H: KTuple, d: int) -> list[int]:
    """Sorted residues r mod squarefree d with d | prod(r + h_i)."""
    return residue_roots_from_factors(H, squarefree_prime_factors(d), d)


def singular_series(H: KTuple, truncation_prime: int) -> SingularSeriesValue:
    """Euler product over p <= truncation_prime with a certified tail.

    The omitted factors for p beyond the truncation satisfy
    |log((1 - nu_p/p) * (1 - 1/p)**-k)| <= k(k+1)/p**2 once p exceeds both
    h_k (so nu_p = k) and 2k(k+1); summing that bound against the integral
    of 1/t**2 certifies the tail. Factors between the truncation and that
    threshold, if any, are bounded term by term.

    Inadmissible tuples yield value 0 with tail_bound 0.
    """
    k = H.k
    if truncation_prime < 2 * k + 1:
        raise ValueError("truncation_prime must be at least 2k + 1")
    if not is_admissible(H):
        return SingularSeriesValue(0.0, truncation_prime, 0.0)

    span = H.span
    value = 1.0
    for p in primes_up_to(truncation_prime):
        p = int(p)
        nu = k if p > span else len({h % p for h in H.offsets})
        value *= (1.0 - nu / p) / (1.0 - 1.0 / p) ** k

    # Tail: exact |log factor| for primes up to the safe threshold, then
    # the k(k+1)/p**2 bound compared against the integral of dt/t**2.
    threshold = max(truncation_prime, span, 2 * k * (k + 1))
    log_tail = 0.0
    if threshold > truncation_prime:
        for p in primes_up_to(threshold):
            p = int(p)
            if p <= truncation_prime:
                continue
            nu = k if p > span else len({h % p for h in H.offsets})
            log_tail += abs(
                math.log(1.0 - nu / p) - k * math.log(1.0 - 1.0 / p)
            )
    log_tail += k * (k + 1) / threshold
    return SingularSeriesValue(value, truncation_prime, math.expm1(log_tail))
