"""Bregman divergence of a -> |a|^p and the chi weight.

All functions broadcast over numpy arrays.
"""
from __future__ import annotations

import numpy as np

from .errors import BadExponent, DegeneratePair


def check_exponent(p: float) -> float:
    p = float(p)
    if not (1.0 < p < np.inf):
        raise BadExponent(f"p must lie in (1, oo), got {p}")
    return p


def french_power(a, gamma):
    """|a|^gamma * sgn(a), with 0 mapped to 0 for every gamma."""
    a = np.asarray(a, dtype=float)
    return np.sign(a) * np.abs(a) ** gamma


def bregman_F(p: float, a, b):
    """F_p(a, b) = |b|^p - |a|^p - p a^<p-1> (b - a); nonnegative."""
    p = check_exponent(p)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if p == 2.0:
        return (b - a) ** 2
    val = np.abs(b) ** p - np.abs(a) ** p - p * french_power(a, p - 1.0) * (b - a)
    # cancellation can leave tiny negatives
    return np.maximum(val, 0.0)


def chi(s, t, *, rtol: float = 0.0, atol: float = 0.0):
    """1 if |s| > |t|, 1/2 on ties, 0 otherwise.

    ``rtol``/``atol`` widen the tie set to ``||s|-|t|| <= rtol*max + atol`` so
    that ties that hold exactly in exact arithmetic survive rounding.
    """
    s = np.abs(np.asarray(s, dtype=float))
    t = np.abs(np.asarray(t, dtype=float))
    tie = np.abs(s - t) <= rtol * np.maximum(s, t) + atol
    return np.where(tie, 0.5, np.where(s > t, 1.0, 0.0))


def comparability_ratio(p: float, a, b, *, denominator: str = "max"):
    """F_p(a, b) / (|b-a|^2 (|a| v |b|)^(p-2)).

    ``denominator="sum"`` uses (|a| + |b|) instead of the maximum.  Scalars
    with a == b raise :class:`DegeneratePair`; arrays get NaN there.
    """
    p = check_exponent(p)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    degenerate = a == b
    if a.ndim == 0 and b.ndim == 0 and degenerate:
        raise DegeneratePair(f"ratio undefined for a = b = {float(a)}")
    if denominator == "max":
        s = np.maximum(np.abs(a), np.abs(b))
    elif denominator == "sum":
        s = np.abs(a) + np.abs(b)
    else:
        raise ValueError(f"unknown denominator {denominator!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        r = bregman_F(p, a, b) / ((b - a) ** 2 * s ** (p - 2.0))
    r = np.where(degenerate, np.nan, r)
    return float(r) if r.ndim == 0 else r


def power_sum_ratio(p: float, a, b):
    """F_p(a, b) / (|b-a|^2 (|a|^(p-2) + |b|^(p-2))).

    Bounded above for every p > 1; bounded below only for p >= 2.  A zero
    endpoint with p < 2 makes the denominator infinite and the ratio 0.
    """
    p = check_exponent(p)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = (b - a) ** 2 * (np.abs(a) ** (p - 2.0) + np.abs(b) ** (p - 2.0))
        r = bregman_F(p, a, b) / denom
    return np.where(a == b, np.nan, r)


def taylor_bound_constant(p: float) -> float:
    """K_p with F_p(a, b) <= K_p |b-a|^2 (|a| v |b|)^(p-2) for p >= 2,
    and F_p(a, b) <= K_p |b-a|^p for 1 < p < 2.

    Both follow from the integral form of the Taylor remainder.
    """
    p = check_exponent(p)
    if p >= 2:
        return 0.5 * p * (p - 1.0)
    return p * 2.0 ** (2.0 - p)
