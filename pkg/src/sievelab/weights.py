"""Truncated divisor-sum sieve weights over integer windows.

The base weight at level R with polynomial degree k + l is

    w(n) = 1/(k+l)! * sum_{d <= R, d | prod(n + h_i)} mu(d) * log(R/d)**(k+l)

computed by two independent algorithms: a per-n "direct" path that
factors each n + h_i and enumerates squarefree divisors, and a "scatter"
path that walks squarefree d <= R once and adds each d's contribution to
every n in the window hitting one of its CRT residue roots. The two must
agree to high precision; tests hold them against each other.

Derived tables square the base weight (kind "a"), attach the Liouville
twist factors (kind "b"), or mix the degree-0 and degree-1 weights with a
parameter u before squaring (kinds "a_prime", "b_prime").
"""

from __future__ import annotations

import math
import struct
import warnings
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import CacheError
from .segments import DEFAULT_SEGMENT_SIZE, iter_segments, run_ordered
from .sieve import SieveTable
from .tuples import KTuple, residue_roots_from_factors

KINDS = ("lambdaR", "a", "b", "a_prime", "b_prime")
ALGORITHMS = ("direct", "scatter")
MAX_L = 8


@dataclass(frozen=True)
class WeightParams:
    """Parameters of a weight family: tuple H, level R, degree offset l.

    The optional mixing parameter u only matters for the primed kinds.
    """

    H: KTuple
    R: int
    l: int = 0
    u: float | None = None

    def __post_init__(self):
        if self.R < 1:
            raise ValueError("R must be >= 1")
        if not 0 <= self.l <= MAX_L:
            raise ValueError(f"l must be in [0, {MAX_L}]")
        if self.u is not None and not self.u > -1:
            raise ValueError("u must be > -1")


@dataclass
class WeightTable:
    """Weight values for every n in [n0, n0 + length)."""

    n0: int
    length: int
    values: np.ndarray
    kind: str
    params: WeightParams
    algorithm: str

    @property
    def hi(self) -> int:
        return self.n0 + self.length


def _distinct_primes(table: SieveTable, m: int) -> list[int]:
    """Distinct prime factors of m, ascending.

    The first factor comes straight from the table's spf entry; the
    cofactor usually leaves the window, so the remainder is peeled by
    trial division over the table's base primes.
    """
    if m <= 1:
        return []
    first = table.spf_of(m)
    out = [first]
    while m % first == 0:
        m //= first
    base = table.base_primes
    i = int(np.searchsorted(base, first)) + 1
    while m > 1:
        p = 0
        while i < len(base):
            q = int(base[i])
            if q * q > m:
                break
            if m % q == 0:
                p = q
                break
            i += 1
        if p == 0:
            out.append(m)  # prime cofactor
            break
        out.append(p)
        while m % p == 0:
            m //= p
        i += 1
    return out


def lambda_R_direct(n: int, params: WeightParams, table: SieveTable) -> float:
    """Base weight at a single n, by explicit divisor enumeration.

    Factors each n + h_i through the sieve table, then walks every
    squarefree product of the distinct primes that stays <= R. Terms are
    combined with exact summation; this is the slow reference path.
    """
    H, R, l = params.H, params.R, params.l
    if n + H.offsets[0] < 1:
        raise ValueError("n + h_1 must be >= 1")
    table.require_cover(n + H.offsets[0], n + H.span + 1)

    primes = sorted({p for h in H.offsets for p in _distinct_primes(table, n + h)})
    kl = H.k + l
    terms: list[float] = []

    def descend(i: int, d: int, sign: float) -> None:
        terms.append(sign * math.log(R / d) ** kl)
        for j in range(i, len(primes)):
            nd = d * primes[j]
            if nd > R:
                break  # primes ascend, so later products only grow
            descend(j + 1, nd, -sign)

    descend(0, 1, 1.0)
    return math.fsum(terms) / math.factorial(kl)


def _spf_upto(limit: int) -> np.ndarray:
    """Smallest prime factor for every d <= limit (0 for d < 2)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if spf[p] == 0:
            view = spf[p::p]
            view[view == 0] = p
    return spf


def _squarefree_factorization(d: int, spf: np.ndarray):
    """(prime_factors, mu) for d, or (None, 0) when d is not squarefree."""
    factors = []
    while d > 1:
        p = int(spf[d])
        d //= p
        if d % p == 0:
            return None, 0
        factors.append(p)
    return factors, -1 if len(factors) % 2 else 1


def _kahan_add(values: np.ndarray, comp: np.ndarray, sl: slice, term: float) -> None:
    """Compensated in-place add of a scalar to a strided slice."""
    v = values[sl]
    c = comp[sl]
    y = term - c
    t = v + y
    comp[sl] = (t - v) - y
    values[sl] = t


def lambda_R_range(
    n0: int,
    length: int,
    params: WeightParams,
    table: SieveTable | None = None,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int = 1,
) -> WeightTable:
    """Base weights over [n0, n0 + length) by the scatter algorithm.

    For each squarefree d <= R the per-d coefficient is added, with
    compensated accumulation, to every n in the window congruent to one
    of d's residue roots. Root lists live only for the current d. The
    sieve table is not consulted (the residue roots carry all the
    divisibility information); the parameter is accepted for interface
    symmetry with the direct path.
    """
    H, R, l = params.H, params.R, params.l
    if n0 + H.offsets[0] < 1:
        raise ValueError("window start + h_1 must be >= 1")
    if length and R * R > n0 + length:
        warnings.warn(
            f"R={R} exceeds sqrt of the window top; asymptotic regime does not apply",
            stacklevel=2,
        )

    kl = H.k + l
    norm = 1.0 / math.factorial(kl)
    spf = _spf_upto(R)
    values = np.zeros(length, dtype=np.float64)

    def work(seg):
        lo, seg_len = seg
        off = lo - n0
        vals = values[off : off + seg_len]
        comp = np.zeros(seg_len, dtype=np.float64)
        for d in range(1, R + 1):
            factors, mu = _squarefree_factorization(d, spf)
            if mu == 0:
                continue
            term = mu * math.log(R / d) ** kl * norm
            for r in residue_roots_from_factors(H, factors, d):
                start = (r - lo) % d
                if start < seg_len:
                    _kahan_add(vals, comp, slice(start, seg_len, d), term)

    run_ordered(work, iter_segments(n0, length, segment_size), threads)
    return WeightTable(n0, length, values, "lambdaR", params, "scatter")


def lambda_R_range_direct(
    n0: int, length: int, params: WeightParams, table: SieveTable
) -> WeightTable:
    """Base weights over a window via the per-n direct path (reference)."""
    values = np.array(
        [lambda_R_direct(n, params, table) for n in range(n0, n0 + length)],
        dtype=np.float64,
    )
    return WeightTable(n0, length, values, "lambdaR", params, "direct")


def _require_pair(H: KTuple) -> int:
    if H.k != 2 or H.offsets[0] != 0:
        raise ValueError("this weight kind needs a pair tuple {0, h}")
    return H.span


def derive_weights(
    kind: str,
    w0: WeightTable,
    table: SieveTable | None = None,
    w1: WeightTable | None = None,
    u: float | None = None,
) -> WeightTable:
    """Pointwise algebraic combinations of base weight tables.

    kind "a":        w0**2
    kind "b":        w0**2 * (1 - lam(n)) * (1 - lam(n + h))
    kind "a_prime":  (w0 + u*(k+1)/log R * w1)**2   with w0 at l=0, w1 at l=1
    kind "b_prime":  a_prime * (1 - lam(n)) * (1 - lam(n + h))

    The twist kinds need a pair tuple {0, h} and a sieve table covering
    [n0, n0 + length + h); the primed kinds need matching (H, R) between
    the two inputs and a mixing parameter u > -1.
    """
    if kind not in ("a", "b", "a_prime", "b_prime"):
        raise ValueError(f"unknown derived kind {kind!r}")
    if w0.kind != "lambdaR":
        raise ValueError("w0 must be a base lambdaR table")
    params = w0.params
    H, R = params.H, params.R

    if kind in ("a_prime", "b_prime"):
        if w1 is None or w1.kind != "lambdaR":
            raise ValueError("primed kinds need a second base table at l = 1")
        if (w1.params.H, w1.params.R) != (H, R):
            raise ValueError("mismatched tuple or level between base tables")
        if (params.l, w1.params.l) != (0, 1):
            raise ValueError("primed kinds need degrees l = 0 and l = 1")
        if (w1.n0, w1.length) != (w0.n0, w0.length):
            raise ValueError("mismatched windows between base tables")
        if u is None:
            u = params.u
        if u is None or not u > -1:
            raise ValueError("mixing parameter u > -1 required")
        mixed = w0.values + (u * (H.k + 1) / math.log(R)) * w1.values
        squared = mixed * mixed
        params = WeightParams(H, R, 0, u)
    else:
        squared = w0.values * w0.values

    if kind in ("a", "a_prime"):
        return WeightTable(w0.n0, w0.length, squared, kind, params, w0.algorithm)

    h = _require_pair(H)
    if table is None:
        raise ValueError("twist kinds need a sieve table for Liouville values")
    lam_n = table.lam_values(w0.n0, w0.hi)
    lam_h = table.lam_values(w0.n0 + h, w0.hi + h)
    values = squared * (1.0 - lam_n) * (1.0 - lam_h)
    return WeightTable(w0.n0, w0.length, values, kind, params, w0.algorithm)


# ---------------------------------------------------------------------------
# Binary cache: magic "GPYW", u32 version, u64 n0, u64 length, then kind
# and algorithm tags (u8 each), k (u16), R (u64), l (u16), u (f64, NaN when
# absent), the k offsets (u64 each), the values (f64), and a CRC32 trailer.
# ---------------------------------------------------------------------------

WEIGHT_MAGIC = b"GPYW"
WEIGHT_VERSION = 1

_W_HEADER = struct.Struct("<4sIQQ")
_W_META = struct.Struct("<BBHQHd")


def save_weight_table(wt: WeightTable, path) -> None:
    """Write a WeightTable to the GPYW binary cache format."""
    p = wt.params
    u = math.nan if p.u is None else float(p.u)
    parts = [
        _W_HEADER.pack(WEIGHT_MAGIC, WEIGHT_VERSION, wt.n0, wt.length),
        _W_META.pack(
            KINDS.index(wt.kind), ALGORITHMS.index(wt.algorithm),
            p.H.k, p.R, p.l, u,
        ),
        struct.pack(f"<{p.H.k}Q", *p.H.offsets),
        np.ascontiguousarray(wt.values, dtype="<f8").tobytes(),
    ]
    body = b"".join(parts)
    with open(path, "wb") as fh:
        fh.write(body)
        fh.write(struct.pack("<I", zlib.crc32(body)))


def load_weight_table(path) -> WeightTable:
    """Read a GPYW cache file, verifying structure and checksum."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _W_HEADER.size + _W_META.size + 4:
        raise CacheError(f"{path}: truncated cache file")
    body, (crc,) = raw[:-4], struct.unpack("<I", raw[-4:])
    if zlib.crc32(body) != crc:
        raise CacheError(f"{path}: checksum mismatch")
    magic, version, n0, length = _W_HEADER.unpack_from(body)
    if magic != WEIGHT_MAGIC:
        raise CacheError(f"{path}: bad magic {magic!r}")
    if version != WEIGHT_VERSION:
        raise CacheError(f"{path}: unsupported version {version}")
    off = _W_HEADER.size
    kind_tag, algo_tag, k, R, l, u = _W_META.unpack_from(body, off)
    off += _W_META.size
    if kind_tag >= len(KINDS) or algo_tag >= len(ALGORITHMS) or k < 1:
        raise CacheError(f"{path}: bad metadata")
    if len(body) != off + 8 * k + 8 * length:
        raise CacheError(f"{path}: wrong payload size")
    offsets = struct.unpack_from(f"<{k}Q", body, off)
    off += 8 * k
    values = np.frombuffer(body, dtype="<f8", count=length, offset=off)
    params = WeightParams(KTuple(offsets), R, l, None if math.isnan(u) else u)
    return WeightTable(
        int(n0), int(length), values, KINDS[kind_tag], params, ALGORITHMS[algo_tag]
    )


def weight_table_to_csv(wt: WeightTable, stream) -> None:
    """Dump a WeightTable as CSV rows with columns n, value."""
    stream.write("n,value\n")
    for i in range(wt.length):
        stream.write(f"{wt.n0 + i},{wt.values[i]:.15g}\n")
