"""Distribution-level threshold for the mixed weight family.

The positivity criterion for the u-mixed pair weight reduces to the sign
of a polynomial in the level exponent theta:

    g_u(theta) = theta * (4/3 + 3u + 9u**2/5) - (1 + 2u + 3u**2/2)

The zero in theta is a ratio of two quadratics in u; minimizing it over u
gives the best threshold the family can reach. Both a closed form (via
the stationarity quadratic 27u**2 + 12u - 10 = 0) and a derivative-free
golden-section search are implemented, each serving as the other's check.

Coefficients are kept as explicit rationals in the source so the
polynomial is reproduced bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

# g_u(theta) = theta * gain(u) - cost(u), coefficients by ascending power.
GAIN_COEFFS = (Fraction(4, 3), Fraction(3), Fraction(9, 5))
COST_COEFFS = (Fraction(1), Fraction(2), Fraction(3, 2))

_GAIN = tuple(float(c) for c in GAIN_COEFFS)
_COST = tuple(float(c) for c in COST_COEFFS)


@dataclass
class ThresholdResult:
    u0: float
    theta1: float
    g_at: float
    curve: list = field(default_factory=list)  # (u, theta_root(u)) samples

    def to_dict(self) -> dict:
        return {
            "u0": self.u0,
            "theta1": self.theta1,
            "g_at": self.g_at,
            "curve": [[u, t] for u, t in self.curve],
        }


def g(u: float, theta: float) -> float:
    """The positivity polynomial g_u(theta)."""
    gain = _GAIN[0] + _GAIN[1] * u + _GAIN[2] * u * u
    cost = _COST[0] + _COST[1] * u + _COST[2] * u * u
    return theta * gain - cost


def theta_root(u: float) -> float:
    """The unique zero of g_u in theta: cost(u) / gain(u)."""
    gain = _GAIN[0] + _GAIN[1] * u + _GAIN[2] * u * u
    if not gain > 0:
        raise ValueError(f"degenerate gain polynomial at u={u}")
    return (_COST[0] + _COST[1] * u + _COST[2] * u * u) / gain


def stationarity_residual(u: float) -> float:
    """27u**2 + 12u - 10, the numerator of d/du theta_root(u) up to scale.

    Differentiating the quadratic ratio cost/gain gives
    cost' * gain - cost * gain' = (1/30) * (27u**2 + 12u - 10),
    so the minimizer is this quadratic's positive root.
    """
    return 27.0 * u * u + 12.0 * u - 10.0


def golden_section_u0(lo: float = 0.0, hi: float = 2.0, tol: float = 1e-12) -> float:
    """Derivative-free minimizer of theta_root on [lo, hi].

    Runs in 40-digit arithmetic: in double precision the objective is
    flat to rounding within ~1e-8 of the minimum, which would cap the
    attainable accuracy of any comparison-based search.
    """
    with mpmath.workdps(40):
        gain = [mpmath.mpf(c.numerator) / c.denominator for c in GAIN_COEFFS]
        cost = [mpmath.mpf(c.numerator) / c.denominator for c in COST_COEFFS]

        def f(u):
            return (cost[0] + cost[1] * u + cost[2] * u * u) / (
                gain[0] + gain[1] * u + gain[2] * u * u
            )

        inv_phi = (mpmath.sqrt(5) - 1) / 2
        a, b = mpmath.mpf(lo), mpmath.mpf(hi)
        c = b - inv_phi * (b - a)
        d = a + inv_phi * (b - a)
        fc, fd = f(c), f(d)
        while b - a > tol:
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - inv_phi * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + inv_phi * (b - a)
                fd = f(d)
        return float((a + b) / 2)


def optimize(curve_points=None) -> ThresholdResult:
    """Best mixing parameter and the threshold level it yields.

    The closed form (sqrt(34) - 2) / 9 is the positive root of the
    stationarity quadratic; it is verified against that quadratic and
    against the golden-section search before being returned.
    """
    u0 = (math.sqrt(34.0) - 2.0) / 9.0
    if abs(stationarity_residual(u0)) > 1e-12:
        raise RuntimeError("closed-form minimizer fails the stationarity check")
    numeric = golden_section_u0()
    if abs(u0 - numeric) > 1e-8:
        raise RuntimeError(
            f"closed form {u0!r} and golden-section {numeric!r} disagree"
        )
    theta1 = theta_root(u0)
    if curve_points is None:
        curve_points = [i / 20.0 for i in range(41)]  # u in [0, 2] step 0.05
    curve = [(float(u), theta_root(float(u))) for u in curve_points]
    return ThresholdResult(u0, theta1, g(u0, theta1), curve)
