"""Empirical residue-class error sums over dyadic windows.

For a sequence f supported on n in [N, 2N), the per-modulus error is the
largest absolute class sum E(q) = max_a |sum_{n = a mod q} f(n)|, taken
over all residues a. The prime-log sequence is the exception: there the
maximum runs over reduced residues only and each class sum has the mass
share T/phi(q) subtracted first, T being the window's total prime-log
mass (using the measured mass rather than a theoretical one removes the
window's own fluctuation from every class).

These are measurements, not certificates: no distribution level can be
certified from finite data, so sweeps only report totals and a
log-squared normalization for eyeballing trends across N.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .segments import run_ordered
from .sieve import SieveTable

SEQUENCE_TAGS = (
    "theta",                  # log p at primes
    "liouville",              # lam(n)
    "liouville_pair",         # lam(n) * lam(n + h)
    "liouville_shift_theta",  # lam(p + h) log p
    "theta_shift_liouville",  # lam(p - h) log p
)

_NEEDS_H = ("liouville_pair", "liouville_shift_theta", "theta_shift_liouville")


@dataclass(frozen=True)
class SequenceKind:
    """A sequence selector plus its shift h where one applies."""

    tag: str
    h: int | None = None

    def __post_init__(self):
        if self.tag not in SEQUENCE_TAGS:
            raise ValueError(f"unknown sequence tag {self.tag!r}")
        if self.tag in _NEEDS_H:
            if self.h is None or self.h <= 0 or self.h % 2:
                raise ValueError(f"{self.tag} needs a positive even h")


@dataclass
class EquidistReport:
    kind: SequenceKind
    N: int
    Q: int
    rows: list = field(default_factory=list)  # (q, E(q)) pairs
    total: float = 0.0
    normalized_total: float = 0.0
    truncated: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.tag,
            "h": self.kind.h,
            "N": self.N,
            "Q": self.Q,
            "rows": [[q, e] for q, e in self.rows],
            "total": self.total,
            "normalized_total": self.normalized_total,
            "truncated": self.truncated,
        }


def window_for(kind: SequenceKind, N: int) -> tuple[int, int]:
    """The [lo, hi) sieve coverage a sequence needs over n in [N, 2N)."""
    lo, hi = N, 2 * N
    if kind.tag in ("liouville_pair", "liouville_shift_theta"):
        hi += kind.h
    elif kind.tag == "theta_shift_liouville":
        lo -= kind.h
        if lo < 1:
            raise ValueError("N - h must be >= 1 for the p - h sequence")
    return lo, hi


def sequence_values(kind: SequenceKind, N: int, table: SieveTable) -> np.ndarray:
    """The sequence f(n) for n in [N, 2N) as float64."""
    lo, hi = window_for(kind, N)
    table.require_cover(lo, hi)
    tag, h = kind.tag, kind.h
    if tag == "theta":
        return table.theta_values(N, 2 * N)
    if tag == "liouville":
        return table.lam_values(N, 2 * N)
    if tag == "liouville_pair":
        return table.lam_values(N, 2 * N) * table.lam_values(N + h, 2 * N + h)
    if tag == "liouville_shift_theta":
        return table.theta_values(N, 2 * N) * table.lam_values(N + h, 2 * N + h)
    return table.theta_values(N, 2 * N) * table.lam_values(N - h, 2 * N - h)


def _phi(q: int) -> int:
    return sum(1 for a in range(1, q + 1) if math.gcd(a, q) == 1)


def _error_for_modulus(values: np.ndarray, N: int, q: int, is_theta: bool) -> float:
    residues = (np.arange(len(values), dtype=np.int64) + N) % q
    sums = np.bincount(residues, weights=values, minlength=q)
    if not is_theta:
        return float(np.abs(sums).max())
    total = float(np.sum(values))
    share = total / _phi(q)
    best = 0.0
    for a in range(q):
        if math.gcd(a, q) == 1:
            best = max(best, abs(float(sums[a]) - share))
    return best


def residue_error(kind: SequenceKind, N: int, q: int, table: SieveTable) -> float:
    """E(q) for one modulus. q above N is allowed but mostly hits empty classes."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if q > N:
        warnings.warn(f"q={q} exceeds N={N}; most residue classes are empty",
                      stacklevel=2)
    values = sequence_values(kind, N, table)
    return _error_for_modulus(values, N, q, kind.tag == "theta")


def level_sweep(
    kind: SequenceKind, N: int, Q: int, table: SieveTable,
    threads: int = 1, time_budget: float | None = None,
) -> EquidistReport:
    """E(q) for every q <= Q, with the running total and its normalization.

    A time budget (seconds) may be set; when it runs out the report is
    returned with the rows computed so far and the truncated flag set.
    """
    if Q > N:
        raise ValueError("Q must be <= N")
    values = sequence_values(kind, N, table)
    is_theta = kind.tag == "theta"
    report = EquidistReport(kind, N, Q)
    start = time.monotonic()

    qs = list(range(1, Q + 1))
    chunk = 64  # budget check granularity
    for lo in range(0, len(qs), chunk):
        batch = qs[lo : lo + chunk]
        errs = run_ordered(
            lambda q: _error_for_modulus(values, N, q, is_theta), batch, threads
        )
        report.rows.extend(zip(batch, errs))
        if time_budget is not None and time.monotonic() - start > time_budget:
            report.truncated = len(report.rows) < Q
            break

    report.total = math.fsum(e for _, e in report.rows)
    report.normalized_total = report.total * math.log(N) ** 2 / N
    return report
