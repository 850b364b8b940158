"""Segmented sieve tables of per-integer arithmetic data.

A SieveTable holds, for every n in a contiguous window [n0, n0 + length),
the smallest prime factor, the Liouville value (-1)**Omega(n), the Mobius
value, and a primality flag. All other modules read from these tables.

The Liouville and Mobius columns are derived during the sieve pass by
repeated division, never from stored factorizations. Smallest prime
factors are stored as 32-bit integers: a composite n < 2**63 always has a
factor below 2**32, and primes are flagged separately (their stored entry
is 0 when they exceed the base-prime bound).
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import CacheError, MemoryBudgetError, RangeError
from .segments import DEFAULT_SEGMENT_SIZE, iter_segments, run_ordered

MAX_N = 2**63 - 1
DEFAULT_MEMORY_BUDGET = 8 << 30

SIEVE_MAGIC = b"GPYT"
SIEVE_VERSION = 1


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (plain Eratosthenes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.nonzero(flags)[0].astype(np.int64)


def is_prime_int(n: int) -> bool:
    """Deterministic trial-division primality test for scalar arguments."""
    if n < 2:
        return False
    for p in (2, 3, 5):
        if n % p == 0:
            return n == p
    f = 7
    while f * f <= n:
        for step in (0, 4, 6, 10, 12, 16, 22, 24):
            if n % (f + step) == 0:
                return False
        f += 30
    return True


@dataclass
class SieveTable:
    """Arithmetic data for every integer in [n0, n0 + length).

    Attributes:
        n0: First integer covered (>= 1).
        length: Number of covered integers.
        spf: uint32 smallest prime factor; 0 means no factor <= sqrt(hi),
            i.e. the entry is 1 or a prime above the base-prime bound.
        lam: int8 Liouville values, always +-1.
        mu: int8 Mobius values in {-1, 0, +1}.
        isprime: bool primality flags.
        base_primes: int64 primes up to sqrt(n0 + length - 1), kept for
            factoring arbitrary integers inside the window.

    Tables are immutable after construction (arrays are write-protected)
    and may be shared freely across threads.
    """

    n0: int
    length: int
    spf: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    isprime: np.ndarray
    base_primes: np.ndarray

    @property
    def hi(self) -> int:
        """One past the last covered integer."""
        return self.n0 + self.length

    def covers(self, lo: int, hi: int) -> bool:
        """True if the half-open range [lo, hi) lies inside the table."""
        return self.n0 <= lo and hi <= self.hi

    def require_cover(self, lo: int, hi: int) -> None:
        if not self.covers(lo, hi):
            raise RangeError(
                f"table covers [{self.n0}, {self.hi}) but [{lo}, {hi}) is needed"
            )

    def index(self, n: int) -> int:
        if not (self.n0 <= n < self.hi):
            raise RangeError(f"{n} outside table range [{self.n0}, {self.hi})")
        return n - self.n0

    def spf_of(self, n: int) -> int:
        """Smallest prime factor of n (returns n for primes, 1 for n = 1)."""
        stored = int(self.spf[self.index(n)])
        if stored:
            return stored
        return n if n > 1 else 1

    def lam_of(self, n: int) -> int:
        return int(self.lam[self.index(n)])

    def mu_of(self, n: int) -> int:
        return int(self.mu[self.index(n)])

    def is_prime(self, n: int) -> bool:
        return bool(self.isprime[self.index(n)])

    def theta(self, n: int) -> float:
        """log n for prime n, else 0 (natural logarithm throughout)."""
        return math.log(n) if self.is_prime(n) else 0.0

    def n_values(self, lo: int, hi: int) -> np.ndarray:
        self.require_cover(lo, hi)
        return np.arange(lo, hi, dtype=np.int64)

    def lam_values(self, lo: int, hi: int) -> np.ndarray:
        """Liouville values over [lo, hi) as float64."""
        self.require_cover(lo, hi)
        return self.lam[lo - self.n0 : hi - self.n0].astype(np.float64)

    def isprime_values(self, lo: int, hi: int) -> np.ndarray:
        self.require_cover(lo, hi)
        return self.isprime[lo - self.n0 : hi - self.n0]

    def theta_values(self, lo: int, hi: int) -> np.ndarray:
        """theta(n) over [lo, hi) as float64."""
        self.require_cover(lo, hi)
        flags = self.isprime[lo - self.n0 : hi - self.n0]
        out = np.zeros(hi - lo, dtype=np.float64)
        if flags.any():
            idx = np.nonzero(flags)[0]
            out[idx] = np.log((idx + lo).astype(np.float64))
        return out

    def primes_in(self, lo: int, hi: int) -> np.ndarray:
        """All primes in [lo, hi) as int64."""
        self.require_cover(lo, hi)
        flags = self.isprime[lo - self.n0 : hi - self.n0]
        return np.nonzero(flags)[0].astype(np.int64) + lo


def _fill_segment(lo, seg_len, base_primes, spf, lam, mu, isprime, offset):
    """Sieve one segment [lo, lo + seg_len) into the output slices."""
    n = np.arange(lo, lo + seg_len, dtype=np.int64)
    rem = n.copy()
    s_spf = spf[offset : offset + seg_len]
    s_lam = lam[offset : offset + seg_len]
    s_mu = mu[offset : offset + seg_len]

    s_lam[:] = 1
    s_mu[:] = 1
    for p in base_primes:
        p = int(p)
        start = (-lo) % p
        if start >= seg_len:
            continue
        sl = slice(start, seg_len, p)
        view = s_spf[sl]
        view[view == 0] = p
        s_lam[sl] = -s_lam[sl]
        s_mu[sl] = -s_mu[sl]
        rview = rem[sl]
        rview //= p
        extra = rview % p == 0
        if extra.any():
            # p**2 divides the original n: Mobius dies, Liouville keeps
            # flipping once per remaining power of p.
            cur = start + np.nonzero(extra)[0] * p
            s_mu[cur] = 0
            while cur.size:
                rem[cur] //= p
                s_lam[cur] = -s_lam[cur]
                cur = cur[rem[cur] % p == 0]

    big = rem > 1  # one leftover prime factor above the base-prime bound
    s_lam[big] = -s_lam[big]
    s_mu[big] = -s_mu[big]
    isprime[offset : offset + seg_len] = (n > 1) & (
        (s_spf == 0) | (s_spf.astype(np.int64) == n)
    )


def build_table(
    n0: int,
    length: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int = 1,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> SieveTable:
    """Sieve [n0, n0 + length) into a SieveTable.

    Args:
        n0: Range start, >= 1.
        length: Number of integers to cover; n0 + length <= 2**63.
        segment_size: Entries sieved per pass (cache-residency tunable;
            output never depends on it).
        threads: Worker threads; segments are disjoint so output never
            depends on this either.
        memory_budget: Upper bound in bytes for the estimated working
            set; exceeding it raises instead of silently truncating.

    Raises:
        RangeError: Invalid bounds or 64-bit overflow.
        MemoryBudgetError: Estimated allocation exceeds memory_budget.
    """
    if n0 < 1:
        raise RangeError("n0 must be >= 1")
    if length < 0:
        raise RangeError("length must be >= 0")
    hi = n0 + length
    if hi - 1 > MAX_N:
        raise RangeError(f"n0 + length must stay below 2**63; got {hi}")

    root = math.isqrt(hi - 1) if length else 1
    est = 7 * length + 17 * min(segment_size, max(length, 1)) * max(1, threads)
    est += root + 1  # sieve flags for the base primes
    if est > memory_budget:
        raise MemoryBudgetError(
            f"estimated {est} bytes for length={length} exceeds budget {memory_budget}"
        )

    base_primes = primes_up_to(root)
    spf = np.zeros(length, dtype=np.uint32)
    lam = np.empty(length, dtype=np.int8)
    mu = np.empty(length, dtype=np.int8)
    isprime = np.empty(length, dtype=bool)

    def work(seg):
        lo, seg_len = seg
        _fill_segment(lo, seg_len, base_primes, spf, lam, mu, isprime, lo - n0)

    run_ordered(work, iter_segments(n0, length, segment_size), threads)

    for arr in (spf, lam, mu, isprime, base_primes):
        arr.flags.writeable = False
    return SieveTable(n0, length, spf, lam, mu, isprime, base_primes)


# ---------------------------------------------------------------------------
# Binary cache: magic "GPYT", u32 version, u64 n0, u64 length, then the
# arrays in field order (spf as u32, lam as i8, mu as i8, isprime packed
# little-endian bit order), finally a CRC32 trailer over all prior bytes.
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<4sIQQ")


def save_table(table: SieveTable, path) -> None:
    """Write a SieveTable to the GPYT binary cache format."""
    parts = [
        _HEADER.pack(SIEVE_MAGIC, SIEVE_VERSION, table.n0, table.length),
        np.ascontiguousarray(table.spf, dtype="<u4").tobytes(),
        np.ascontiguousarray(table.lam, dtype=np.int8).tobytes(),
        np.ascontiguousarray(table.mu, dtype=np.int8).tobytes(),
        np.packbits(table.isprime, bitorder="little").tobytes(),
    ]
    body = b"".join(parts)
    with open(path, "wb") as fh:
        fh.write(body)
        fh.write(struct.pack("<I", zlib.crc32(body)))


def load_table(path) -> SieveTable:
    """Read a GPYT cache file, verifying structure and checksum."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size + 4:
        raise CacheError(f"{path}: truncated cache file")
    body, (crc,) = raw[:-4], struct.unpack("<I", raw[-4:])
    if zlib.crc32(body) != crc:
        raise CacheError(f"{path}: checksum mismatch")
    magic, version, n0, length = _HEADER.unpack_from(body)
    if magic != SIEVE_MAGIC:
        raise CacheError(f"{path}: bad magic {magic!r}")
    if version != SIEVE_VERSION:
        raise CacheError(f"{path}: unsupported version {version}")
    packed = (length + 7) // 8
    expected = _HEADER.size + 4 * length + length + length + packed
    if len(body) != expected:
        raise CacheError(f"{path}: wrong payload size")

    off = _HEADER.size
    spf = np.frombuffer(body, dtype="<u4", count=length, offset=off)
    off += 4 * length
    lam = np.frombuffer(body, dtype=np.int8, count=length, offset=off)
    off += length
    mu = np.frombuffer(body, dtype=np.int8, count=length, offset=off)
    off += length
    bits = np.frombuffer(body, dtype=np.uint8, count=packed, offset=off)
    isprime = np.unpackbits(bits, count=length, bitorder="little").astype(bool)
    isprime.flags.writeable = False

    root = math.isqrt(n0 + length - 1) if length else 1
    return SieveTable(
        int(n0), int(length), spf, lam, mu, isprime, primes_up_to(root)
    )
