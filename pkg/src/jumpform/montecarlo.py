"""Path simulation and Monte Carlo checks of the parabolic martingale.

For a horizon T the martingale is M_t = P_{T-t} f(X_t) - P_T f(X_0).  Its
predictable bracket is

    <M>_T = int_0^T 2 Gamma[P_{T-s} f](X_s) ds,

and since the chain is pure jump its square bracket is the sum of squared
jumps of M.  Both brackets have expectation E M_T^2.

Paths are simulated in lockstep: step k of every path draws its holding
time and destination from the Philox counter (path, k), so a path does not
depend on the batch it was simulated in.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadConfig, NotConservative
from .model import Chain
from .parallel import pmap
from .quadrature import gauss_legendre01
from .rng import uniforms
from .spectral import SpectralData, apply_semigroup

CHUNK = 32768
START_LANE = 1  # counter lane reserved for the initial-state draw


@dataclass(frozen=True)
class McConfig:
    T: float
    paths: int
    seed: int = 0
    start_state: int | str = 0
    gauss_order: int = 8

    def __post_init__(self):
        if not (np.isfinite(self.T) and self.T > 0):
            raise BadConfig(f"T must be positive, got {self.T}")
        if int(self.paths) < 1:
            raise BadConfig(f"paths must be at least 1, got {self.paths}")
        if not (0 <= int(self.seed) < 2**64):
            raise BadConfig("seed must be a 64-bit unsigned integer")
        if self.start_state != "stationary" and not isinstance(self.start_state, (int, np.integer)):
            raise BadConfig(f"start_state must be an index or 'stationary', got {self.start_state!r}")
        if self.gauss_order < 1:
            raise BadConfig("gauss_order must be positive")


@dataclass(frozen=True)
class McReport:
    est_M2: float
    se_M2: float
    est_sharp: float
    se_sharp: float
    est_square: float
    se_square: float
    est_M: float
    se_M: float
    paths_used: int

    def identity_gaps(self) -> dict:
        """Each gap against <M> in units of the summed standard errors."""
        def z(a, sa):
            se = sa + self.se_sharp
            d = abs(a - self.est_sharp)
            return d / se if se > 0 else (0.0 if d == 0 else np.inf)

        return {"M2": z(self.est_M2, self.se_M2), "square": z(self.est_square, self.se_square)}

    def identities_hold(self, k: float = 3.0) -> bool:
        return all(v <= k for v in self.identity_gaps().values())


@dataclass(frozen=True, eq=False)
class Path:
    """Jump times (first entry 0), states visited, and the killing time.

    ``states[k]`` is occupied on [times[k], times[k+1]) with the last
    interval running to T; ``killed_at`` is None if the path survives.
    """

    T: float
    times: np.ndarray
    states: np.ndarray
    killed_at: float | None

    @property
    def jumps(self) -> int:
        return self.times.size - 1 + (self.killed_at is not None)


def _jump_tables(chain: Chain):
    R = np.asarray(chain.kernel.R)
    table = np.concatenate([R, chain.gen.kappa[:, None]], axis=1)
    return table.sum(axis=1), np.cumsum(table, axis=1)


def _start_states(chain: Chain, cfg: McConfig, idx: np.ndarray) -> np.ndarray:
    if cfg.start_state == "stationary":
        cum = np.cumsum(chain.m)
        u = uniforms(cfg.seed, idx, 0, lane=START_LANE)[:, 0]
        return np.minimum(np.searchsorted(cum, u * cum[-1], side="right"), chain.n - 1)
    x = int(cfg.start_state)
    if not 0 <= x < chain.n:
        raise BadConfig(f"start_state {x} outside 0..{chain.n - 1}")
    return np.full(idx.size, x)


def _next_states(cum: np.ndarray, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    rows = cum[x]
    # thresholds use the row's own last entry so rounding never selects a zero-rate slot
    return np.sum(rows <= (u * rows[:, -1])[:, None], axis=1)


def simulate_path(chain: Chain, cfg: McConfig, path_index: int = 0) -> Path:
    """Path ``path_index`` of the ensemble described by ``cfg``."""
    q, cum = _jump_tables(chain)
    x = int(_start_states(chain, cfg, np.array([path_index]))[0])
    times, states = [0.0], [x]
    s, k = 0.0, 0
    while True:
        k += 1
        if q[x] == 0:
            return Path(cfg.T, np.array(times), np.array(states), None)
        u1, u2 = uniforms(cfg.seed, path_index, k)
        s = s - np.log(u1) / q[x]
        if s >= cfg.T:
            return Path(cfg.T, np.array(times), np.array(states), None)
        y = int(_next_states(cum, np.array([x]), np.array([u2]))[0])
        if y == chain.n:
            return Path(cfg.T, np.array(times), np.array(states), s)
        x = y
        times.append(s)
        states.append(x)


# -- pathwise functionals -----------------------------------------------------

def _gamma_modes(chain: Chain) -> np.ndarray:
    """W[x, k, l] = 1/2 sum_j R_xj (phi_k(j)-phi_k(x)) (phi_l(j)-phi_l(x))."""
    phi = chain.spec.basis
    D = phi[None, :, :] - phi[:, None, :]  # D[x, j, k]
    return 0.5 * np.einsum("xj,xjk,xjl->xkl", np.asarray(chain.kernel.R), D, D)


def _sharp_increment(spec: SpectralData, W, c, T, x, s0, s1, order) -> np.ndarray:
    """int_{s0}^{s1} 2 Gamma[P_{T-s} f](x) ds for arrays x, s0, s1."""
    u, w = gauss_legendre01(order)
    h = s1 - s0
    s = s0[:, None] + h[:, None] * u[None, :]
    E = c * np.exp(-np.multiply.outer(T - s, spec.lambdas))  # (B, order, modes)
    vals = np.sum((E @ W[x]) * E, axis=2)
    return 2.0 * h * (vals @ w)


def sharp_bracket(chain: Chain, f, T: float, path: Path, gauss_order: int = 8,
                  upto: float | None = None) -> float:
    """<M>_t along one path, t = ``upto`` (default T)."""
    spec = chain.spec
    c = spec.coefficients(f)
    W = _gamma_modes(chain)
    stop = T if upto is None else min(upto, T)
    end = path.killed_at if path.killed_at is not None else T
    bounds = np.r_[path.times, end]
    s0 = np.minimum(bounds[:-1], stop)
    s1 = np.minimum(bounds[1:], stop)
    return float(np.sum(_sharp_increment(spec, W, c, T, path.states, s0, s1, gauss_order)))


def square_bracket(chain: Chain, f, T: float, path: Path) -> float:
    """Sum of squared jumps of M; a killing jump lands on f = 0."""
    spec = chain.spec
    total = 0.0
    for k in range(1, path.times.size):
        v = apply_semigroup(spec, T - path.times[k], f)
        total += (v[path.states[k]] - v[path.states[k - 1]]) ** 2
    if path.killed_at is not None:
        v = apply_semigroup(spec, T - path.killed_at, f)
        total += v[path.states[-1]] ** 2
    return total


def parabolic_martingale_terminal(chain: Chain, f, T: float, path: Path) -> float:
    """M_T = f(X_T) - P_T f(X_0), with f = 0 on a killed path."""
    f = np.asarray(f, dtype=float)
    end = 0.0 if path.killed_at is not None else f[path.states[-1]]
    return float(end - apply_semigroup(chain.spec, T, f)[path.states[0]])


# -- ensembles ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Ensemble:
    """Per-path samples, in path order."""

    M: np.ndarray
    sharp: np.ndarray
    square: np.ndarray
    jumps: np.ndarray
    occupation: np.ndarray  # (paths, n) time spent in each state


def _simulate_chunk(chain: Chain, f, cfg: McConfig, idx: np.ndarray) -> Ensemble:
    spec = chain.spec
    T = cfg.T
    c = spec.coefficients(f)
    W = _gamma_modes(chain)
    q, cum = _jump_tables(chain)
    n = chain.n
    B = idx.size

    x = _start_states(chain, cfg, idx)
    PTf = apply_semigroup(spec, T, f)
    M0 = PTf[x]
    s = np.zeros(B)
    sharp = np.zeros(B)
    square = np.zeros(B)
    jumps = np.zeros(B, dtype=np.int64)
    occ = np.zeros((B, n))
    end_val = np.zeros(B)
    active = np.arange(B)
    k = 0
    while active.size:
        k += 1
        xa = x[active]
        qa = q[xa]
        u = uniforms(cfg.seed, idx[active], k)
        with np.errstate(divide="ignore"):
            tau = np.where(qa > 0, -np.log(u[:, 0]) / np.where(qa > 0, qa, 1.0), np.inf)
        s0 = s[active]
        s1 = np.minimum(s0 + tau, T)
        sharp[active] += _sharp_increment(spec, W, c, T, xa, s0, s1, cfg.gauss_order)
        occ[active, xa] += s1 - s0

        jumping = s0 + tau < T
        done = active[~jumping]
        end_val[done] = np.asarray(f)[x[done]]

        ja = active[jumping]
        if ja.size:
            sj = s0[jumping] + tau[jumping]
            y = _next_states(cum, x[ja], u[jumping, 1])
            uT = np.exp(-np.multiply.outer(T - sj, spec.lambdas)) * c
            killed = y == n
            y_safe = np.where(killed, 0, y)
            before = np.einsum("bk,bk->b", uT, spec.basis[x[ja]])
            after = np.where(killed, 0.0, np.einsum("bk,bk->b", uT, spec.basis[y_safe]))
            square[ja] += (after - before) ** 2
            jumps[ja] += 1
            s[ja] = sj
            x[ja] = np.where(killed, x[ja], y)
            active = ja[~killed]
        else:
            active = ja
    return Ensemble(end_val - M0, sharp, square, jumps, occ)


def simulate_ensemble(chain: Chain, f, cfg: McConfig) -> Ensemble:
    """All ``cfg.paths`` paths, chunked; chunks may run on threads."""
    f = np.asarray(f, dtype=float)
    chunks = [np.arange(a, min(a + CHUNK, cfg.paths), dtype=np.uint64)
              for a in range(0, int(cfg.paths), CHUNK)]
    parts = pmap(lambda idx: _simulate_chunk(chain, f, cfg, idx), chunks)
    return Ensemble(*(np.concatenate([getattr(p, name) for p in parts])
                      for name in ("M", "sharp", "square", "jumps", "occupation")))


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    if x.size < 2:
        return float(x.mean()), float("nan")
    return float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size))


def run_mc(chain: Chain, f, cfg: McConfig) -> McReport:
    """Estimates of E M_T^2, E<M>_T and E[M]_T from one ensemble."""
    if not chain.gen.conservative:
        raise NotConservative("the martingale identity suite runs on conservative chains only")
    ens = simulate_ensemble(chain, f, cfg)
    m2 = _mean_se(ens.M**2)
    sh = _mean_se(ens.sharp)
    sq = _mean_se(ens.square)
    mm = _mean_se(ens.M)
    return McReport(m2[0], m2[1], sh[0], sh[1], sq[0], sq[1], mm[0], mm[1], int(cfg.paths))


def exact_second_moment(chain: Chain, f, T: float, start_state=0) -> float:
    """E M_T^2 = P_T(f^2)(x) - (P_T f(x))^2, averaged over m for "stationary"."""
    f = np.asarray(f, dtype=float)
    spec = chain.spec
    v = apply_semigroup(spec, T, f * f) - apply_semigroup(spec, T, f) ** 2
    if start_state == "stationary":
        return float(np.sum(v * chain.m) / chain.m.sum())
    return float(v[int(start_state)])


@dataclass(frozen=True)
class BdgRow:
    p: float
    moment_M: float
    moment_square: float
    moment_sharp: float
    se_M: float
    se_square: float
    se_sharp: float
    ratio_M_square: float
    ratio_sharp_square: float


def bdg_ratio_study(chain: Chain, f, p_list, cfg: McConfig) -> list[BdgRow]:
    """E|M_T|^p, E[M]_T^{p/2} and E<M>_T^{p/2} with their ratios.

    No constants are asserted; rows only record the sizes.
    """
    if not chain.gen.conservative:
        raise NotConservative("the martingale identity suite runs on conservative chains only")
    ens = simulate_ensemble(chain, f, cfg)
    rows = []
    for p in p_list:
        p = float(p)
        if not p > 1:
            raise BadConfig(f"p must exceed 1, got {p}")
        a = _mean_se(np.abs(ens.M) ** p)
        b = _mean_se(ens.square ** (p / 2))
        d = _mean_se(ens.sharp ** (p / 2))
        rows.append(BdgRow(p, a[0], b[0], d[0], a[1], b[1], d[1],
                           a[0] / b[0] if b[0] > 0 else float("nan"),
                           d[0] / b[0] if b[0] > 0 else float("nan")))
    return rows
