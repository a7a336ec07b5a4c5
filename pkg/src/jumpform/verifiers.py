"""Numerical checks of the identities and L^p estimates.

Each check computes both sides by independent routes and returns the pieces,
so callers can decide what to assert.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .bregman import bregman_F, check_exponent, taylor_bound_constant
from .errors import BadWindow, HypothesisViolation
from .model import Chain, random_chain, random_field
from .parallel import pmap
from .quadrature import Crossings, QuadratureConfig, QuadResult, integrate_decaying
from .spectral import apply_semigroup, stationary_part
from .squarefns import (
    active_coefficients,
    carre_gamma,
    default_t_grid,
    evaluate,
    maximal_function,
    weighted_p_norm,
)


# -- Hardy-Stein -------------------------------------------------------------

@dataclass(frozen=True)
class HardySteinResult:
    lhs: float
    rhs: float
    rel_err: float
    quad: QuadResult | None


def _hs_tail(chain: Chain, c: np.ndarray, p: float):
    spec = chain.spec
    lam = spec.lambdas
    pos = lam > 0
    c2 = c[pos] ** 2
    kappa = chain.gen.kappa
    if p >= 2:
        K = max(p * (p - 1.0), p)

        def bound(T):
            sup = np.abs(spec.synthesize(np.exp(-lam * T) * c)).max()
            return 0.5 * K * sup ** (p - 2.0) * float(np.sum(c2 * np.exp(-2.0 * lam[pos] * T)))

        return bound

    i, _ = chain.kernel.edges
    jump_mass = float(np.sum(chain.kernel.edge_rates * chain.m[i]))
    kill_mass = float(np.sum(kappa * chain.m))
    coef = taylor_bound_constant(p) * 2.0**p * jump_mass + p * kill_mass
    mmin = chain.m.min()
    gap = spec.gap

    def bound(T):
        sigma = np.sqrt(float(np.sum(c2 * np.exp(-2.0 * lam[pos] * T))) / mmin)
        return coef * sigma**p / (p * gap) if sigma > 0 else 0.0

    return bound


def hardy_stein_rhs(
    chain: Chain, f, p: float, config: QuadratureConfig = QuadratureConfig()
) -> QuadResult:
    """int_0^oo [sum_ij F_p(P_t f(i), P_t f(j)) R_ij m_i + p sum_i kappa_i |P_t f(i)|^p m_i] dt.

    The killing term vanishes on conservative chains.  Zeros of every
    P_t f(i) become panel breakpoints, where F_p has power singularities.
    """
    p = check_exponent(p)
    spec, kernel = chain.spec, chain.kernel
    c = active_coefficients(spec, f)
    i, j = kernel.edges
    w = kernel.edge_rates * chain.m[i]
    kw = chain.gen.kappa * chain.m

    def integrand(ts):
        U = (np.exp(-np.outer(ts, spec.lambdas)) * c) @ spec.basis.T
        val = bregman_F(p, U[:, i], U[:, j]) @ w
        if kw.any():
            val = val + p * (np.abs(U) ** p) @ kw
        return val

    return integrate_decaying(
        integrand,
        first_width=0.5 / spec.lambda_max if spec.lambda_max > 0 else 1.0,
        tail_bound=_hs_tail(chain, c, p),
        norm=lambda v: float(np.abs(v)),
        config=config,
        crossings=Crossings(spec.basis * c, spec.lambdas),
    )


def hardy_stein_check(
    chain: Chain, f, p: float, config: QuadratureConfig = QuadratureConfig()
) -> HardySteinResult:
    """||f||_p^p - ||fbar||_p^p against the time-integrated Bregman energy."""
    p = check_exponent(p)
    f = np.asarray(f, dtype=float)
    fbar = stationary_part(chain.spec, f)
    lhs = weighted_p_norm(chain.m, f, p) ** p - weighted_p_norm(chain.m, fbar, p) ** p
    q = hardy_stein_rhs(chain, f, p, config)
    rhs = float(q.value)
    scale = max(abs(lhs), abs(rhs))
    rel = abs(lhs - rhs) / scale if scale > 0 else 0.0
    return HardySteinResult(lhs, rhs, rel, q)


def bregman_energy_ratio(chain: Chain, f, p: float, ts) -> np.ndarray:
    """sum_ij F_p(u_i, u_j) R_ij m_i  /  sum_i Gamma[u](i) |u_i|^(p-2) m_i
    with u = P_t f, one entry per t.

    Bounded above and below for p >= 2; only bounded above for 1 < p < 2.
    """
    p = check_exponent(p)
    spec, kernel = chain.spec, chain.kernel
    i, j = kernel.edges
    w = kernel.edge_rates * chain.m[i]
    out = []
    for t in np.asarray(ts, dtype=float):
        u = apply_semigroup(spec, t, f)
        with np.errstate(divide="ignore"):
            weight = np.abs(u) ** (p - 2.0)
        out.append(float(bregman_F(p, u[i], u[j]) @ w) / float(carre_gamma(kernel, u) * weight @ chain.m))
    return np.asarray(out)


# -- L^p derivative identity ----------------------------------------------------

@dataclass(frozen=True)
class DerivativeResult:
    finite_difference: np.ndarray
    analytic: np.ndarray
    rel_err: float
    h: float


def derivative_check(chain: Chain, f, T: float, t: float, h: float | None = None) -> DerivativeResult:
    """Central difference of s -> P_s[(P_{T-s} f)^2] at s = t against
    2 P_t Gamma[P_{T-t} f] (+ P_t(kappa u^2) when there is killing).

    Errors are measured in the weighted 1-norm.
    """
    spec = chain.spec
    if h is None:
        margin = min(t, T - t)
        h = 1e-4 * min(margin, 1.0 / spec.gap if np.isfinite(spec.gap) else margin)
    if not (0 <= t - h and t + h <= T and h > 0):
        raise BadWindow(f"need 0 <= t-h < t+h <= T; got t={t}, h={h}, T={T}")

    def phi(s):
        u = apply_semigroup(spec, T - s, f)
        return apply_semigroup(spec, s, u * u)

    fd = (phi(t + h) - phi(t - h)) / (2.0 * h)
    u = apply_semigroup(spec, T - t, f)
    inner = 2.0 * carre_gamma(chain.kernel, u) + chain.gen.kappa * u * u
    exact = apply_semigroup(spec, t, inner)
    denom = weighted_p_norm(chain.m, exact, 1)
    diff = weighted_p_norm(chain.m, fd - exact, 1)
    return DerivativeResult(fd, exact, diff / denom if denom > 0 else diff, h)


# -- Stein maximal inequality ------------------------------------------------

@dataclass(frozen=True)
class SteinResult:
    lhs: float
    rhs: float
    ok: bool


def stein_maximal_check(chain: Chain, f, p: float, t_grid=None) -> SteinResult:
    """||f*||_p <= p/(p-1) ||f||_p (constant 1 at p = oo), f* on a grid."""
    spec = chain.spec
    grid = default_t_grid(spec) if t_grid is None else t_grid
    fstar = maximal_function(spec, f, grid)
    p = float(p)
    lhs = weighted_p_norm(chain.m, fstar, p)
    const = 1.0 if np.isinf(p) else p / (p - 1.0)
    rhs = const * weighted_p_norm(chain.m, f, p)
    return SteinResult(lhs, rhs, bool(lhs <= rhs * (1 + 1e-12)))


# -- L^p estimate scans -------------------------------------------------------

@dataclass(frozen=True)
class ScanSpec:
    square_function: str
    bound_kind: str  # "upper" or "lower"
    p_lo: float
    p_hi: float
    lo_closed: bool
    needs: frozenset


SCANS = {
    "G_tilde_upper_12": ScanSpec("G_tilde", "upper", 1.0, 2.0, False, frozenset()),
    "G_tilde_lower_2inf": ScanSpec("G_tilde", "lower", 2.0, np.inf, True, frozenset({"strong_stability"})),
    "H_upper_2inf": ScanSpec("H", "upper", 2.0, np.inf, True, frozenset({"conservative"})),
    "H_lower_12": ScanSpec("H", "lower", 1.0, 2.0, False, frozenset({"conservative", "strong_stability"})),
    "H_lower_3inf": ScanSpec("H", "lower", 3.0, np.inf, True, frozenset({"strong_stability"})),
    "H_tilde_upper_2inf": ScanSpec("H_tilde", "upper", 2.0, np.inf, True, frozenset({"conservative"})),
    "H_tilde_lower_3inf": ScanSpec("H_tilde", "lower", 3.0, np.inf, True, frozenset({"strong_stability"})),
}


@dataclass(frozen=True, eq=False)
class Instance:
    seed: int
    chain: Chain
    f: np.ndarray


@dataclass(frozen=True)
class ScanRow:
    scan_name: str
    seed: int
    n: int
    p: float
    ratio: float
    bound_kind: str


def random_family(n: int, seeds: Iterable[int], *, mean_zero: bool = True,
                  killing: float | None = None) -> Iterator[Instance]:
    for s in seeds:
        chain = random_chain(n, s, killing=killing)
        yield Instance(s, chain, random_field(chain, s + 10_000, mean_zero=mean_zero))


def brown_family(n_list: Iterable[int]) -> Iterator[Instance]:
    from .brown import build_brown_chain

    for n in n_list:
        chain, b = build_brown_chain(n)
        yield Instance(n, chain, b.f)


def strongly_stable(chain: Chain, f, rtol: float = 1e-10) -> bool:
    fbar = stationary_part(chain.spec, f)
    return bool(np.abs(fbar).max() <= rtol * max(np.abs(f).max(), 1e-300))


def _p_allowed(scan: ScanSpec, p: float) -> bool:
    lo_ok = p >= scan.p_lo if scan.lo_closed else p > scan.p_lo
    return lo_ok and p <= scan.p_hi


def lp_estimate_scan(
    family: Iterable[Instance],
    p_list,
    which: str,
    *,
    config: QuadratureConfig = QuadratureConfig(),
    exploratory: bool = False,
) -> list[ScanRow]:
    """||S f||_p / ||f||_p for the square function behind ``which``.

    Requesting p outside the estimate's range, or an instance that violates
    its hypotheses, raises :class:`HypothesisViolation`.  With
    ``exploratory=True`` out-of-range p values are computed anyway and tagged
    ``bound_kind="exploratory"``.
    """
    if which not in SCANS:
        raise HypothesisViolation(f"unknown scan {which!r}; choose from {sorted(SCANS)}")
    scan = SCANS[which]
    p_list = [float(p) for p in p_list]
    kinds = {}
    for p in p_list:
        if _p_allowed(scan, p):
            kinds[p] = scan.bound_kind
        elif exploratory:
            kinds[p] = "exploratory"
        else:
            raise HypothesisViolation(f"{which} does not cover p = {p}")

    def run(inst: Instance) -> list[ScanRow]:
        if "conservative" in scan.needs and not inst.chain.gen.conservative:
            raise HypothesisViolation(f"{which} needs a conservative chain ({inst.chain.label})")
        if "strong_stability" in scan.needs and not strongly_stable(inst.chain, inst.f):
            raise HypothesisViolation(f"{which} needs P_T f -> 0 ({inst.chain.label})")
        vals = evaluate(inst.chain.spec, inst.chain.kernel, inst.f, scan.square_function, config).values
        return [
            ScanRow(which, inst.seed, inst.chain.n, p,
                    weighted_p_norm(inst.chain.m, vals, p) / weighted_p_norm(inst.chain.m, inst.f, p),
                    kinds[p])
            for p in p_list
        ]

    return [row for rows in pmap(run, family) for row in rows]


def strictly_increasing(values) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) > 0))


# -- baselines ------------------------------------------------------------------

BASELINE_VERSION = 1


def summarize(rows: Iterable[ScanRow]) -> dict:
    out: dict = {}
    for r in rows:
        slot = out.setdefault(r.scan_name, {}).setdefault(
            repr(r.p), {"min": np.inf, "max": -np.inf, "count": 0, "bound_kind": r.bound_kind}
        )
        slot["min"] = min(slot["min"], r.ratio)
        slot["max"] = max(slot["max"], r.ratio)
        slot["count"] += 1
    return out


def write_baseline(rows: Iterable[ScanRow], path) -> dict:
    data = {"version": BASELINE_VERSION, "scans": summarize(rows)}
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return data


def load_baseline(path) -> dict:
    data = json.loads(Path(path).read_text())
    if data.get("version") != BASELINE_VERSION:
        raise ValueError(f"baseline version {data.get('version')} != {BASELINE_VERSION}")
    return data


def compare_to_baseline(rows: Iterable[ScanRow], baseline: dict, tol: float = 0.01) -> list[str]:
    """Regressions beyond ``tol`` relative to the recorded extremes.

    Upper-estimate scans regress when the largest ratio grows; lower-estimate
    scans when the smallest ratio shrinks.  Exploratory rows are ignored.
    """
    problems = []
    for name, per_p in summarize(rows).items():
        ref = baseline["scans"].get(name, {})
        for p, cur in per_p.items():
            if p not in ref or cur["bound_kind"] == "exploratory":
                continue
            if cur["bound_kind"] == "upper" and cur["max"] > ref[p]["max"] * (1 + tol):
                problems.append(f"{name} p={p}: max ratio {cur['max']:.6g} > baseline {ref[p]['max']:.6g}")
            if cur["bound_kind"] == "lower" and cur["min"] < ref[p]["min"] * (1 - tol):
                problems.append(f"{name} p={p}: min ratio {cur['min']:.6g} < baseline {ref[p]['min']:.6g}")
    return problems


def rows_as_dicts(rows) -> list[dict]:
    return [asdict(r) for r in rows]
