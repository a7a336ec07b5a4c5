"""Composite Gauss-Legendre quadrature on [0, oo) for decaying integrands.

The integrands met in this package are finite sums of decaying exponentials,
possibly passed through non-smooth maps (|.|^p, the chi weight).  Panels are
geometric, [0, w], [w, 2w], [2w, 4w], ..., and stop as soon as a caller-supplied
tail bound drops below ``rel_tol`` times the running integral.  Non-smooth
points are located as sign changes of exponential sums, refined with brentq,
and become panel boundaries; sub-intervals ending at such a point use a
quadratic change of variables so that power-type singularities there are
integrated to full accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import ToleranceNotMet


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    panel_order: int = 32
    max_panels: int = 64

    def __post_init__(self):
        if not (0 < self.rel_tol <= 1e-2):
            raise ValueError(f"rel_tol must lie in (0, 1e-2], got {self.rel_tol}")
        if self.panel_order < 4:
            raise ValueError("panel_order must be at least 4")
        if self.max_panels < 1:
            raise ValueError("max_panels must be positive")


@dataclass(frozen=True)
class QuadResult:
    value: np.ndarray
    T_cut: float
    tail_bound: float
    tail_rel: float
    panel_error: float
    panels: int
    breakpoints: int

    @property
    def tol_achieved(self) -> float:
        return max(self.tail_rel, self.panel_error)


@lru_cache(maxsize=None)
def gauss_legendre01(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def mapped_nodes(a, b, sing_a, sing_b, order):
    """Nodes/weights on [a, b], graded quadratically toward flagged ends."""
    u, w = gauss_legendre01(order)
    h = b - a
    if sing_a and sing_b:
        t = a + 0.5 * h * (1.0 - np.cos(np.pi * u))
        jac = 0.5 * np.pi * h * np.sin(np.pi * u)
    elif sing_a:
        t = a + h * u**2
        jac = 2.0 * h * u
    elif sing_b:
        t = b - h * (1.0 - u) ** 2
        jac = 2.0 * h * (1.0 - u)
    else:
        t = a + h * u
        jac = np.full_like(u, h)
    return t, w * jac


@dataclass(frozen=True)
class Crossings:
    """Exponential sums g_r(t) = sum_k B[r, k] exp(-rates[k] t) whose zeros
    are breakpoints of the integrand."""

    B: np.ndarray
    rates: np.ndarray
    samples: int = 129
    noise: float = 1e-11

    def roots(self, a: float, b: float) -> np.ndarray:
        if self.B.size == 0:
            return np.empty(0)
        ts = np.linspace(a, b, self.samples)
        E = np.exp(-np.outer(self.rates, ts))
        G = self.B @ E
        floor = self.noise * np.abs(G).max(initial=0.0)
        big = np.maximum(np.abs(G[:, :-1]), np.abs(G[:, 1:])) > floor
        rows, cols = np.nonzero((G[:, :-1] * G[:, 1:] < 0) & big)
        out = []
        for r, k in zip(rows, cols):
            coeff = self.B[r]
            g = lambda t, coeff=coeff: float(coeff @ np.exp(-self.rates * t))
            out.append(brentq(g, ts[k], ts[k + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps))
        if not out:
            return np.empty(0)
        out = np.unique(np.asarray(out))
        span = b - a
        out = out[(out > a + 1e-13 * span) & (out < b - 1e-13 * span)]
        if out.size > 1:
            keep = np.r_[True, np.diff(out) > 1e-13 * span]
            out = out[keep]
        return out


def integrate_decaying(
    integrand: Callable[[np.ndarray], np.ndarray],
    *,
    first_width: float,
    tail_bound: Callable[[float], float],
    norm: Callable[[np.ndarray], float],
    config: QuadratureConfig = QuadratureConfig(),
    crossings: Crossings | None = None,
) -> QuadResult:
    """Integrate ``integrand`` over [0, oo).

    ``integrand(ts)`` returns an array whose first axis follows ``ts``.
    ``tail_bound(T)`` must bound ``norm`` of the integral over [T, oo).
    ``norm`` maps a partial integral to a nonnegative scalar.
    """
    order = config.panel_order
    half = max(order // 2, 2)
    if tail_bound(0.0) == 0.0:
        probe = integrand(np.zeros(1))
        zero = np.zeros(probe.shape[1:])
        return QuadResult(zero, 0.0, 0.0, 0.0, 0.0, 0, 0)
    if not np.isfinite(first_width) or first_width <= 0:
        raise ValueError(f"first panel width must be positive, got {first_width}")

    total = None
    err = 0.0
    nbreak = 0
    a, b = 0.0, first_width
    for panel in range(1, config.max_panels + 1):
        cuts = crossings.roots(a, b) if crossings is not None else np.empty(0)
        nbreak += cuts.size
        pts = np.r_[a, cuts, b]
        sing = np.r_[False, np.ones(cuts.size, bool), False]
        for k in range(pts.size - 1):
            lo, hi, sl, sh = pts[k], pts[k + 1], sing[k], sing[k + 1]
            t_hi, w_hi = mapped_nodes(lo, hi, sl, sh, order)
            t_lo, w_lo = mapped_nodes(lo, hi, sl, sh, half)
            vals = integrand(np.r_[t_hi, t_lo])
            fine = np.tensordot(w_hi, vals[:order], axes=1)
            coarse = np.tensordot(w_lo, vals[order:], axes=1)
            total = fine if total is None else total + fine
            err += norm(np.abs(fine - coarse))
        tb = tail_bound(b)
        scale = norm(total)
        if tb <= config.rel_tol * scale or tb == 0.0:
            rel = tb / scale if scale > 0 else 0.0
            return QuadResult(total, b, tb, rel, err / scale if scale > 0 else 0.0, panel, nbreak)
        a, b = b, 2.0 * b
    raise ToleranceNotMet(
        f"tail bound {tb:.3e} still above rel_tol*integral {config.rel_tol * scale:.3e} "
        f"after {config.max_panels} panels (T = {a:.3e})"
    )
