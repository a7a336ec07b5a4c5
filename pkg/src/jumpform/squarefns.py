"""Carre du champ operators and the four Littlewood-Paley square functions.

    G(x)^2  = int_0^oo Gamma[P_t f](x) dt
    G~(x)^2 = int_0^oo Gamma~[P_t f](x) dt
    H(x)^2  = int_0^oo P_t Gamma[P_t f](x) dt
    H~(x)^2 = int_0^oo P_t Gamma~[P_t f](x) dt

G and H have closed forms as double/triple sums over the eigenbasis.  The
chi-weighted pair only has a closed form when f is an eigenfunction, so in
general they go through :func:`jumpform.quadrature.integrate_decaying`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bregman import chi
from .errors import BadExponent, DimensionMismatch, DivergentIntegral, GridTooCoarse, NotConservative
from .model import Generator, JumpKernel
from .quadrature import Crossings, QuadratureConfig, QuadResult, integrate_decaying
from .spectral import SpectralData, semigroup_path

TIE_RTOL = 1e-10
TIE_ATOL = 1e-14
ACTIVE_RTOL = 1e-14
TRIPLE_SUM_MAX_N = 512
EIGEN_RTOL = 1e-9

SQUARE_FUNCTIONS = ("G", "G_tilde", "H", "H_tilde")


def _check(kernel: JumpKernel, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape[-1:] != (kernel.n,):
        raise DimensionMismatch(f"field of length {kernel.n} expected, got shape {u.shape}")
    return u


def _to_states(kernel: JumpKernel, per_edge: np.ndarray) -> np.ndarray:
    return (kernel.gather @ per_edge.T).T


def carre_gamma(kernel: JumpKernel, u) -> np.ndarray:
    """Gamma[u](i) = 1/2 sum_j (u_j - u_i)^2 R_ij.  Accepts (n,) or (T, n)."""
    u = _check(kernel, u)
    i, j = kernel.edges
    return _to_states(kernel, 0.5 * kernel.edge_rates * (u[..., j] - u[..., i]) ** 2)


def carre_gamma_tilde(kernel: JumpKernel, u, *, tie_rtol: float = 0.0) -> np.ndarray:
    """Gamma~[u](i) = sum_j (u_j - u_i)^2 chi(u_i, u_j) R_ij.

    ``tie_rtol`` treats |u_i| and |u_j| as equal when they agree to that
    relative tolerance (plus an absolute floor of 1e-14 max|u|).
    """
    u = _check(kernel, u)
    i, j = kernel.edges
    s, t = u[..., i], u[..., j]
    atol = TIE_ATOL * np.abs(u).max(axis=-1, keepdims=True) if tie_rtol > 0 else 0.0
    w = chi(s, t, rtol=tie_rtol, atol=atol)
    return _to_states(kernel, kernel.edge_rates * (t - s) ** 2 * w)


def gamma_via_generator(gen: Generator, u) -> np.ndarray:
    """Gamma[u] = 1/2 A(u^2) - u Au, valid without killing."""
    if not gen.conservative:
        raise NotConservative("Gamma = A(u^2)/2 - u Au needs kappa = 0")
    u = np.asarray(u, dtype=float)
    if u.shape != (gen.A.shape[0],):
        raise DimensionMismatch("field length does not match the generator")
    return 0.5 * gen.A @ (u * u) - u * (gen.A @ u)


def weighted_p_norm(m, g, p: float) -> float:
    m = getattr(m, "m", m)
    g = np.asarray(g, dtype=float)
    if g.shape != np.shape(m):
        raise DimensionMismatch("field and weights differ in length")
    p = float(p)
    if not p >= 1:
        raise BadExponent(f"p must be >= 1, got {p}")
    if np.isinf(p):
        return float(np.abs(g).max(initial=0.0))
    a = np.abs(g)
    s = a.max(initial=0.0)
    if s == 0:
        return 0.0
    return float(s * np.sum((a / s) ** p * m) ** (1.0 / p))


def maximal_function(spec: SpectralData, f, t_grid) -> np.ndarray:
    """Grid lower bound of f*(x) = sup_t |P_t f(x)|, the t -> oo limit included."""
    t_grid = np.asarray(t_grid, dtype=float)
    if not np.any(t_grid == 0):
        raise GridTooCoarse("t_grid must contain t = 0")
    f = np.asarray(f, dtype=float)
    U = semigroup_path(spec, t_grid[t_grid > 0], f)
    c = spec.coefficients(f)
    z = spec.zero_modes
    limit = spec.basis[:, z] @ c[z]
    # P_0 f is f itself, not its spectral resynthesis
    return np.maximum(np.abs(U).max(axis=0, initial=0.0), np.maximum(np.abs(f), np.abs(limit)))


def default_t_grid(spec: SpectralData, points: int = 400) -> np.ndarray:
    """0 plus log-spaced times from the fastest scale to 50/gap."""
    lo = 1e-3 / max(spec.lambda_max, 1e-300)
    hi = 50.0 / spec.gap if np.isfinite(spec.gap) else 1.0
    if spec.lambda_max == 0:
        return np.array([0.0])
    return np.r_[0.0, np.geomspace(lo, max(hi, 2 * lo), points)]


# -- spectral helpers -------------------------------------------------------

def _edge_mode_diffs(spec: SpectralData, kernel: JumpKernel) -> np.ndarray:
    i, j = kernel.edges
    return spec.basis[j] - spec.basis[i]


def _check_zero_modes(spec: SpectralData, kernel: JumpKernel, c: np.ndarray):
    z = spec.zero_modes
    if z.size == 0 or kernel.edges[0].size == 0:
        return
    D = _edge_mode_diffs(spec, kernel)
    jump = np.abs(D[:, z] @ c[z]).max()
    scale = np.abs(c).sum() * np.abs(spec.basis).max()
    if jump > 1e-10 * max(scale, 1e-300):
        raise DivergentIntegral(
            "an invariant (zero-mode) part of f changes across a jump; the time "
            "integral diverges (strong stability fails for this f)"
        )


def tail_energy(spec: SpectralData, c: np.ndarray, T: float) -> float:
    """int_T^oo E[P_t f] dt = 1/2 sum_k c_k^2 exp(-2 lambda_k T), nonzero modes."""
    lam = spec.lambdas
    pos = lam > 0
    return 0.5 * float(np.sum(c[pos] ** 2 * np.exp(-2.0 * lam[pos] * T)))


def eigen_rate(spec: SpectralData, f, rtol: float = EIGEN_RTOL) -> float | None:
    """lambda if f is (numerically) an eigenfunction of -A with lambda > 0."""
    c = spec.coefficients(f)
    c2 = c**2
    tot = c2.sum()
    if tot == 0:
        return None
    lam_hat = float(np.sum(spec.lambdas * c2) / tot)
    if lam_hat <= 0:
        return None
    resid = np.sqrt(np.sum((spec.lambdas - lam_hat) ** 2 * c2))
    return lam_hat if resid <= rtol * lam_hat * np.sqrt(tot) else None


def _first_width(spec: SpectralData) -> float:
    return 0.5 / spec.lambda_max if spec.lambda_max > 0 else 1.0


def _apply_rows(spec: SpectralData, ts: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Row k of the result is P_{ts[k]} applied to row k of G."""
    C = (G * spec.m) @ spec.basis
    C *= np.exp(-np.outer(ts, spec.lambdas))
    return C @ spec.basis.T


def chi_crossings(spec: SpectralData, kernel: JumpKernel, c: np.ndarray) -> Crossings:
    """Times where |P_t f(i)| = |P_t f(j)| along some edge."""
    i, j = kernel.undirected_edges
    Bi = spec.basis[i] * c
    Bj = spec.basis[j] * c
    return Crossings(np.vstack([Bi - Bj, Bi + Bj]), spec.lambdas)


# -- square functions -------------------------------------------------------

def square_G_sq(spec: SpectralData, kernel: JumpKernel, f) -> np.ndarray:
    """G^2 via sum_{k,l} c_k c_l / (lambda_k + lambda_l) * Gamma_kl."""
    c = spec.coefficients(f)
    _check_zero_modes(spec, kernel, c)
    lam = spec.lambdas
    den = lam[:, None] + lam[None, :]
    K = np.divide(1.0, den, out=np.zeros_like(den), where=den > 0)
    W = _edge_mode_diffs(spec, kernel) * c
    q = np.einsum("ek,ek->e", W @ K, W)
    return np.maximum(_to_states(kernel, 0.5 * kernel.edge_rates * q), 0.0)


def square_H_sq(spec: SpectralData, kernel: JumpKernel, f) -> np.ndarray:
    """H^2 via the triple eigen-sum.

    Modes with |c_k| <= 1e-14 max|c| are dropped; this keeps eigenfunction
    inputs cheap at large n and changes results at the 1e-14 level.
    """
    c = spec.coefficients(f)
    _check_zero_modes(spec, kernel, c)
    lam = spec.lambdas
    active = np.abs(c) > ACTIVE_RTOL * np.abs(c).max(initial=0.0)
    if not active.any():
        return np.zeros(spec.n)
    la = lam[active]
    W = _edge_mode_diffs(spec, kernel)[:, active] * c[active]
    i, _ = kernel.edges
    # per-edge weight 1/2 R_e m_i phi_m(i), one row per output mode m
    src = 0.5 * kernel.edge_rates * spec.m[i]
    Phi_src = spec.basis[i].T * src
    pair = la[:, None] + la[None, :]
    B = np.empty(spec.n)
    for mode in range(spec.n):
        den = lam[mode] + pair
        K = np.divide(1.0, den, out=np.zeros_like(den), where=den > 0)
        q = np.einsum("ek,ek->e", W @ K, W)
        B[mode] = Phi_src[mode] @ q
    return np.maximum(spec.basis @ B, 0.0)


def active_coefficients(spec: SpectralData, f) -> np.ndarray:
    """Eigen-coefficients of f with rounding-level entries set to zero.

    Left in place, a 1e-16 component along a slow mode eventually dominates
    P_t f and breaks exact ties such as |f(x)| = |f(y)|.
    """
    c = spec.coefficients(f)
    return np.where(np.abs(c) > ACTIVE_RTOL * np.abs(c).max(initial=0.0), c, 0.0)


def _integrand(spec, kernel, c, kind: str):

    def fn(ts):
        U = (np.exp(-np.outer(ts, spec.lambdas)) * c) @ spec.basis.T
        if kind in ("G", "H"):
            G = carre_gamma(kernel, U)
        else:
            G = carre_gamma_tilde(kernel, U, tie_rtol=TIE_RTOL)
        if kind in ("H", "H_tilde"):
            G = _apply_rows(spec, ts, G)
        return G

    return fn


def square_quadrature(
    spec: SpectralData,
    kernel: JumpKernel,
    f,
    kind: str,
    config: QuadratureConfig = QuadratureConfig(),
) -> QuadResult:
    """Squared square function ``kind`` by time quadrature."""
    if kind not in SQUARE_FUNCTIONS:
        raise ValueError(f"unknown square function {kind!r}")
    c = active_coefficients(spec, f)
    _check_zero_modes(spec, kernel, c)
    crossings = chi_crossings(spec, kernel, c) if kind.endswith("tilde") else None
    res = integrate_decaying(
        _integrand(spec, kernel, c, kind),
        first_width=_first_width(spec),
        tail_bound=lambda T: tail_energy(spec, c, T),
        norm=lambda v: float(np.sum(spec.m * v)),
        config=config,
        crossings=crossings,
    )
    return QuadResult(
        np.maximum(res.value, 0.0), res.T_cut, res.tail_bound, res.tail_rel,
        res.panel_error, res.panels, res.breakpoints,
    )


@dataclass
class Evaluation:
    """A squared square function together with how it was obtained."""

    sq: np.ndarray
    method: str
    quad: QuadResult | None = None
    discrepancy: float | None = None

    @property
    def values(self) -> np.ndarray:
        return np.sqrt(self.sq)


def _rel_discrepancy(m, a, b) -> float:
    scale = float(np.sum(m * np.abs(b)))
    return float(np.sum(m * np.abs(a - b))) / scale if scale > 0 else float(np.abs(a - b).max())


def evaluate(
    spec: SpectralData,
    kernel: JumpKernel,
    f,
    kind: str,
    config: QuadratureConfig = QuadratureConfig(),
    method: str = "auto",
) -> Evaluation:
    """Evaluate one squared square function.

    ``method`` is ``"closed_form"``, ``"quadrature"``, ``"both"`` (closed form
    returned, quadrature discrepancy recorded) or ``"auto"``.  Closed forms
    exist for G and H always (H only up to 512 states) and for G~, H~ when f
    is an eigenfunction.
    """
    f = np.asarray(f, dtype=float)
    closed = None
    if method != "quadrature":
        if kind == "G":
            closed = lambda: square_G_sq(spec, kernel, f)
        elif kind == "H" and (spec.n <= TRIPLE_SUM_MAX_N or method == "closed_form"):
            closed = lambda: square_H_sq(spec, kernel, f)
        elif kind == "G_tilde":
            lam = eigen_rate(spec, f)
            if lam is not None:
                closed = lambda: carre_gamma_tilde(kernel, f, tie_rtol=TIE_RTOL) / (2.0 * lam)
        if closed is None and method in ("closed_form", "both"):
            raise ValueError(f"no closed form available for {kind} with this f")
    if closed is None:
        q = square_quadrature(spec, kernel, f, kind, config)
        return Evaluation(q.value, "quadrature", q)
    sq = closed()
    if method == "both":
        q = square_quadrature(spec, kernel, f, kind, config)
        return Evaluation(sq, "both", q, _rel_discrepancy(spec.m, q.value, sq))
    return Evaluation(sq, "closed_form")


def square_G(spec, kernel, f, config=QuadratureConfig(), method="closed_form"):
    return evaluate(spec, kernel, f, "G", config, method).values


def square_G_tilde(spec, kernel, f, config=QuadratureConfig(), method="auto"):
    return evaluate(spec, kernel, f, "G_tilde", config, method).values


def square_H(spec, kernel, f, config=QuadratureConfig(), method="auto"):
    return evaluate(spec, kernel, f, "H", config, method).values


def square_H_tilde(spec, kernel, f, config=QuadratureConfig()):
    return evaluate(spec, kernel, f, "H_tilde", config, "quadrature").values


@dataclass
class SquareFunctionReport:
    G: np.ndarray
    G_tilde: np.ndarray
    H: np.ndarray
    H_tilde: np.ndarray
    p_norms: dict[float, dict[str, float]]
    method: dict[str, str]
    quad_tolerance_achieved: float
    T_cut: float
    discrepancies: dict[str, float] = field(default_factory=dict)

    def values(self, kind: str) -> np.ndarray:
        return getattr(self, kind)


def square_function_report(
    spec: SpectralData,
    kernel: JumpKernel,
    f,
    p_list=(2.0,),
    config: QuadratureConfig = QuadratureConfig(),
    cross_check: bool = False,
) -> SquareFunctionReport:
    """All four square functions of f plus their weighted p-norms."""
    evals = {}
    for kind in SQUARE_FUNCTIONS:
        method = "auto"
        if cross_check and kind in ("G", "H"):
            method = "both"
        if cross_check and kind == "G_tilde" and eigen_rate(spec, f) is not None:
            method = "both"
        evals[kind] = evaluate(spec, kernel, f, kind, config, method)
    quads = [e.quad for e in evals.values() if e.quad is not None]
    norms = {
        float(p): {k: weighted_p_norm(spec.m, e.values, p) for k, e in evals.items()}
        for p in p_list
    }
    return SquareFunctionReport(
        G=evals["G"].values,
        G_tilde=evals["G_tilde"].values,
        H=evals["H"].values,
        H_tilde=evals["H_tilde"].values,
        p_norms=norms,
        method={k: e.method for k, e in evals.items()},
        quad_tolerance_achieved=max((q.tol_achieved for q in quads), default=0.0),
        T_cut=max((q.T_cut for q in quads), default=0.0),
        discrepancies={k: e.discrepancy for k, e in evals.items() if e.discrepancy is not None},
    )
