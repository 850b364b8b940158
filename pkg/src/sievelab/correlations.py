"""Weighted correlation sums: computed value vs. predicted main term.

Every functional here averages a product of weight values (and possibly a
prime indicator or Liouville twist) over the dyadic window n in [N, 2N),
then reports the average next to the corresponding first-order prediction
and their ratio. No pass/fail verdicts are made here; thresholds belong
to the test suite. All report quantities are per-n averages.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .segments import DEFAULT_SEGMENT_SIZE, iter_segments, run_ordered
from .sieve import SieveTable
from .tuples import KTuple, singular_series
from .weights import WeightParams, derive_weights, lambda_R_range

DEFAULT_TRUNCATION = 100_000

LEMMA3_SELECTORS = (
    "one",             # degenerate hook: reduces to the pure weight average
    "liouville",       # lam(n)
    "liouville_pair",  # lam(n) * lam(n + h)
    "theta_liouville",  # theta(n) * lam(n + h)
    "liouville_theta",  # lam(n) * theta(n + h)
)


@dataclass
class CorrelationReport:
    """One functional evaluation: computed sum, main term, and ratio."""

    functional: str
    N: int
    R: int
    H: KTuple
    l1: int
    l2: int
    u: float | None
    computed: float
    main_term: float
    ratio: float
    margin: float | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        """JSON-ready mapping; top-level names mirror the report fields."""
        out = {
            "functional": self.functional,
            "N": self.N,
            "R": self.R,
            "params": {
                "H": list(self.H.offsets),
                "l1": self.l1,
                "l2": self.l2,
                "u": self.u,
            },
            "computed": self.computed,
            "main_term": self.main_term,
            "ratio": self.ratio,
            "margin": self.margin,
        }
        if self.details:
            out["details"] = dict(self.details)
        return out

    def csv_row(self) -> list:
        return [
            self.functional, self.N, self.R,
            " ".join(str(h) for h in self.H.offsets),
            self.l1, self.l2,
            "" if self.u is None else self.u,
            self.computed, self.main_term, self.ratio,
            "" if self.margin is None else self.margin,
        ]


CSV_HEADER = [
    "functional", "N", "R", "H", "l1", "l2", "u",
    "computed", "main_term", "ratio", "margin",
]


def _mean(arrays, N: int, segment_size: int, threads: int) -> float:
    """Mean over [0, N) of the pointwise product of the given arrays.

    Per-segment sums are combined with exact summation in segment order,
    so the result is independent of thread count.
    """

    def work(seg):
        lo, seg_len = seg
        acc = arrays[0][lo : lo + seg_len]
        for arr in arrays[1:]:
            acc = acc * arr[lo : lo + seg_len]
        return float(np.sum(acc))

    partials = run_ordered(work, iter_segments(0, N, segment_size), threads)
    return math.fsum(partials) / N


def _weight_pair(N, R, H, l1, l2, segment_size, threads):
    w1 = lambda_R_range(N, N, WeightParams(H, R, l1),
                        segment_size=segment_size, threads=threads)
    if l2 == l1:
        return w1.values, w1.values
    w2 = lambda_R_range(N, N, WeightParams(H, R, l2),
                        segment_size=segment_size, threads=threads)
    return w1.values, w2.values


def _check_window(N: int, R: int, H: KTuple, table: SieveTable) -> None:
    table.require_cover(N, 2 * N + H.span)
    if R * R > N:
        warnings.warn(
            f"R={R} exceeds sqrt(N={N}); the first-order prediction degrades",
            stacklevel=3,
        )


def _pure_main_term(S: float, k: int, l1: int, l2: int, R: int) -> float:
    return (
        S * math.comb(l1 + l2, l1)
        * math.log(R) ** (k + l1 + l2) / math.factorial(k + l1 + l2)
    )


def _prime_main_term(S: float, k: int, l1: int, l2: int, R: int) -> float:
    return (
        S * math.comb(l1 + l2 + 2, l1 + 1)
        * math.log(R) ** (k + l1 + l2 + 1) / math.factorial(k + l1 + l2 + 1)
    )


def lemma1_check(
    N: int, R: int, H: KTuple, l1: int, l2: int, table: SieveTable,
    segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int = 1,
    truncation_prime: int = DEFAULT_TRUNCATION,
) -> CorrelationReport:
    """Average of w_{l1}(n) * w_{l2}(n) over n in [N, 2N) vs. prediction."""
    _check_window(N, R, H, table)
    v1, v2 = _weight_pair(N, R, H, l1, l2, segment_size, threads)
    computed = _mean([v1, v2], N, segment_size, threads)
    S = singular_series(H, truncation_prime).value
    main = _pure_main_term(S, H.k, l1, l2, R)
    return CorrelationReport(
        "lemma1", N, R, H, l1, l2, None, computed, main,
        computed / main if main else math.nan,
    )


def lemma2_check(
    N: int, R: int, H: KTuple, l1: int, l2: int, h_index: int,
    table: SieveTable,
    segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int = 1,
    truncation_prime: int = DEFAULT_TRUNCATION,
) -> CorrelationReport:
    """Prime-weighted average w_{l1} * w_{l2} * theta(n + h) vs. prediction."""
    _check_window(N, R, H, table)
    h = H.offsets[h_index]
    v1, v2 = _weight_pair(N, R, H, l1, l2, segment_size, threads)
    th = table.theta_values(N + h, 2 * N + h)
    computed = _mean([v1, v2, th], N, segment_size, threads)
    S = singular_series(H, truncation_prime).value
    main = _prime_main_term(S, H.k, l1, l2, R)
    return CorrelationReport(
        "lemma2", N, R, H, l1, l2, None, computed, main,
        computed / main if main else math.nan,
        details={"h": h},
    )


def lemma3_sum(
    N: int, R: int, H: KTuple, l1: int, l2: int, selector: str,
    table: SieveTable,
    segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int = 1,
    truncation_prime: int = DEFAULT_TRUNCATION,
) -> CorrelationReport:
    """Twisted average w_{l1} * w_{l2} * f(n) for a hypothesis sequence f.

    The main_term field carries the untwisted prediction so the ratio
    reads as a normalized cancellation measure; under the distribution
    hypotheses the ratio should sink toward zero.
    """
    if selector not in LEMMA3_SELECTORS:
        raise ValueError(f"unknown selector {selector!r}")
    _check_window(N, R, H, table)
    h = H.span
    v1, v2 = _weight_pair(N, R, H, l1, l2, segment_size, threads)
    factors = [v1, v2]
    if selector == "liouville":
        factors.append(table.lam_values(N, 2 * N))
    elif selector == "liouville_pair":
        factors.append(table.lam_values(N, 2 * N))
        factors.append(table.lam_values(N + h, 2 * N + h))
    elif selector == "theta_liouville":
        factors.append(table.theta_values(N, 2 * N))
        factors.append(table.lam_values(N + h, 2 * N + h))
    elif selector == "liouville_theta":
        factors.append(table.lam_values(N, 2 * N))
        factors.append(table.theta_values(N + h, 2 * N + h))
    computed = _mean(factors, N, segment_size, threads)
    S = singular_series(H, truncation_prime).value
    main = _pure_main_term(S, H.k, l1, l2, R)
    return CorrelationReport(
        "lemma3", N, R, H, l1, l2, None, computed, main,
        computed / main if main else math.nan,
        details={"selector": selector, "h": h},
    )


def _pair_margin_report(
    functional: str, N: int, R: int, h: int, u: float, table: SieveTable,
    segment_size: int, threads: int, truncation_prime: int,
) -> CorrelationReport:
    """Shared positivity-margin machinery for the pair weights.

    computed is the raw prime-pair mass P, main_term is B * log(3N) (the
    threshold the mass must clear for a weighted n to carry two primes),
    margin their difference, everything fully measured. details adds the
    hypothesis-filtered variant: the Liouville-twisted prime sums (not
    negligible at desk scale, conditionally vanishing in theory) are
    zeroed and the weight mass is taken at its hypothesis value B0, so
    the filtered normalized margin isolates the prime-mass bookkeeping
    from the slowly converging weight-mass average. The predictions for
    every piece ride along.
    """
    if h <= 0 or h % 2:
        raise ValueError("h must be a positive even integer")
    if not u > -1:
        raise ValueError("u must be > -1")
    H = KTuple((0, h))
    table.require_cover(N, 2 * N + h)
    if R * R > N:
        warnings.warn(
            f"R={R} exceeds sqrt(N={N}); the first-order prediction degrades",
            stacklevel=3,
        )

    logR = math.log(R)
    w0 = lambda_R_range(N, N, WeightParams(H, R, 0),
                        segment_size=segment_size, threads=threads)
    if u == 0.0:
        base = w0.values
    else:
        w1 = lambda_R_range(N, N, WeightParams(H, R, 1),
                            segment_size=segment_size, threads=threads)
        base = w0.values + (u * (H.k + 1) / logR) * w1.values
    a = base * base
    lam_n = table.lam_values(N, 2 * N)
    lam_h = table.lam_values(N + h, 2 * N + h)
    th_n = table.theta_values(N, 2 * N)
    th_h = table.theta_values(N + h, 2 * N + h)
    b = a * (1.0 - lam_n) * (1.0 - lam_h)
    th_sum = th_n + th_h

    mean = lambda arrays: _mean(arrays, N, segment_size, threads)
    A = mean([a])
    B = mean([b])
    P_raw = mean([b, th_sum])
    P_filtered = 2.0 * mean([a, th_sum])
    cross_theta_lam = 2.0 * mean([a, lam_h, th_n])
    cross_lam_theta = 2.0 * mean([a, lam_n, th_h])

    log3N = math.log(3 * N)
    S0 = singular_series(H, truncation_prime).value
    B0 = S0 * logR**2 / 2.0
    B_main = B0 * (1.0 + 2.0 * u + 1.5 * u * u)
    P_main = 4.0 * B0 * logR * (2.0 / 3.0 + 1.5 * u + 0.9 * u * u)

    main_term = B * log3N
    return CorrelationReport(
        functional, N, R, H, 0, 0, u, P_raw, main_term,
        P_raw / main_term if main_term else math.nan,
        margin=P_raw - main_term,
        details={
            "h": h,
            "A": A,
            "B": B,
            "P_raw": P_raw,
            "P_filtered": P_filtered,
            "cross_theta_liouville": cross_theta_lam,
            "cross_liouville_theta": cross_lam_theta,
            "margin_raw": P_raw - B * log3N,
            "margin_filtered": P_filtered - B_main * log3N,
            "normalized_margin_raw": P_raw / (B * log3N) - 1.0,
            "normalized_margin_filtered":
                P_filtered / (B_main * log3N) - 1.0,
            "predicted_normalized_margin":
                P_main / (B_main * log3N) - 1.0,
            "B0": B0,
            "B_main": B_main,
            "P_main": P_main,
        },
    )


def theorem1_report(
    N: int, R: int, h: int, table: SieveTable,
    segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int = 1,
    truncation_prime: int = DEFAULT_TRUNCATION,
) -> CorrelationReport:
    """Positivity margin for the plain squared weight (no mixing)."""
    rep = _pair_margin_report(
        "theorem1", N, R, h, 0.0, table, segment_size, threads, truncation_prime
    )
    rep.u = None
    return rep


def theorem2_report(
    N: int, R: int, h: int, u: float, table: SieveTable,
    segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int = 1,
    truncation_prime: int = DEFAULT_TRUNCATION,
) -> CorrelationReport:
    """Positivity margin for the u-mixed weight; u = 0 reduces to theorem1."""
    return _pair_margin_report(
        "theorem2", N, R, h, float(u), table, segment_size, threads,
        truncation_prime,
    )
