"""Finite-state pure-jump Dirichlet forms.

A chain lives on states ``0..n-1`` with reference weights ``m``.  The jump
intensities ``R[i, j]`` play the role of ``J(x_i, {x_j})``; symmetry of the
jumping measure becomes detailed balance ``m_i R_ij = m_j R_ji``.  Killing is a
diagonal rate vector, never an extra cemetery state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    DetailedBalanceViolation,
    DimensionMismatch,
    NegativeKilling,
    NegativeRate,
)

BALANCE_RTOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateSpace:
    m: np.ndarray

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.m, dtype=float))
        if m.ndim != 1 or m.size < 1:
            raise DimensionMismatch(f"m must be a non-empty vector, got shape {m.shape}")
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise ValueError("reference weights m must be finite and strictly positive")
        object.__setattr__(self, "m", _frozen(m))

    @property
    def n(self) -> int:
        return self.m.size

    @classmethod
    def counting(cls, n: int) -> "StateSpace":
        return cls(np.ones(n))


@dataclass(frozen=True, eq=False)
class JumpKernel:
    """Validated jump-rate matrix; build through :func:`build_kernel`."""

    R: np.ndarray

    @property
    def n(self) -> int:
        return self.R.shape[0]

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Ordered pairs (i, j) with R_ij > 0."""
        i, j = np.nonzero(self.R)
        return i, j

    @cached_property
    def edge_rates(self) -> np.ndarray:
        i, j = self.edges
        return self.R[i, j]

    @cached_property
    def gather(self) -> csr_matrix:
        """Sparse n x E matrix summing per-edge values onto the source state."""
        i, _ = self.edges
        E = i.size
        return csr_matrix((np.ones(E), (i, np.arange(E))), shape=(self.n, E))

    @cached_property
    def undirected_edges(self) -> tuple[np.ndarray, np.ndarray]:
        i, j = self.edges
        keep = i < j
        return i[keep], j[keep]

    @cached_property
    def components(self) -> np.ndarray:
        """Jump-connected component label of every state."""
        _, labels = connected_components(csr_matrix(self.R), directed=False)
        return labels


@dataclass(frozen=True, eq=False)
class Generator:
    A: np.ndarray
    kappa: np.ndarray
    conservative: bool


def _as_field(n: int, u, name: str = "field") -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (n,):
        raise DimensionMismatch(f"{name} must have shape ({n},), got {u.shape}")
    return u


def build_kernel(space: StateSpace, R) -> JumpKernel:
    R = np.array(R, dtype=float)
    n = space.n
    if R.shape != (n, n):
        raise DimensionMismatch(f"R must be {n}x{n}, got {R.shape}")
    if not np.all(np.isfinite(R)):
        raise NegativeRate("jump rates must be finite")
    if np.any(R < 0):
        i, j = np.argwhere(R < 0)[0]
        raise NegativeRate(f"R[{i}, {j}] = {R[i, j]} is negative")
    if np.any(np.diag(R) != 0):
        i = int(np.flatnonzero(np.diag(R))[0])
        raise NegativeRate(f"R must have zero diagonal; R[{i}, {i}] = {R[i, i]}")

    flux = space.m[:, None] * R
    scale = np.maximum(flux, flux.T)
    resid = np.abs(flux - flux.T)
    rel = np.divide(resid, scale, out=np.zeros_like(resid), where=scale > 0)
    if rel.max(initial=0.0) > BALANCE_RTOL:
        i, j = np.unravel_index(np.argmax(rel), rel.shape)
        raise DetailedBalanceViolation(i, j, rel[i, j])
    return JumpKernel(_frozen(R))


def build_generator(space: StateSpace, kernel: JumpKernel, kappa=None) -> Generator:
    n = space.n
    if kernel.n != n:
        raise DimensionMismatch("kernel and state space sizes differ")
    kappa = np.zeros(n) if kappa is None else _as_field(n, kappa, "kappa")
    if np.any(kappa < 0) or not np.all(np.isfinite(kappa)):
        raise NegativeKilling("killing rates must be finite and nonnegative")
    A = np.array(kernel.R, dtype=float)
    A[np.diag_indices(n)] = -kernel.R.sum(axis=1) - kappa
    return Generator(_frozen(A), _frozen(kappa), bool(np.all(kappa == 0)))


def dirichlet_energy(space: StateSpace, kernel: JumpKernel, u, v=None) -> float:
    """Jump part of the form: 1/2 sum_ij (u_j-u_i)(v_j-v_i) R_ij m_i."""
    u = _as_field(space.n, u, "u")
    v = u if v is None else _as_field(space.n, v, "v")
    i, j = kernel.edges
    w = kernel.R[i, j] * space.m[i]
    return 0.5 * float(np.sum((u[j] - u[i]) * (v[j] - v[i]) * w))


@dataclass(frozen=True, eq=False)
class Chain:
    """A state space, kernel and generator kept together.

    The spectral decomposition is computed on first use and cached.
    """

    space: StateSpace
    kernel: JumpKernel
    gen: Generator
    label: str = field(default="")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def m(self) -> np.ndarray:
        return self.space.m

    @cached_property
    def spec(self):
        from .spectral import spectral_decompose

        return spectral_decompose(self.gen, self.space)


def make_chain(m, R, kappa=None, label: str = "") -> Chain:
    space = StateSpace(m)
    kernel = build_kernel(space, R)
    return Chain(space, kernel, build_generator(space, kernel, kappa), label)


def random_chain(n: int, seed: int, *, killing: float | None = None) -> Chain:
    """Seeded Erdos-Renyi chain used by the verification scans.

    Edges appear with probability 3/n on top of a spanning path, rates are
    uniform on [0.1, 2] and masses uniform on [0.5, 2].  The lower triangle is
    then overwritten so that m_i R_ij = m_j R_ji holds.  With ``killing`` set,
    every state also gets a killing rate uniform on [0, killing].
    """
    rng = np.random.default_rng(seed)
    m = rng.uniform(0.5, 2.0, n)
    mask = np.triu(rng.random((n, n)) < min(1.0, 3.0 / n), k=1)
    idx = np.arange(n - 1)
    mask[idx, idx + 1] = True
    rates = rng.uniform(0.1, 2.0, (n, n))
    R = np.where(mask, rates, 0.0)
    R = R + (m[:, None] * R).T / m[:, None]
    kappa = None if killing is None else rng.uniform(0.0, killing, n)
    return make_chain(m, R, kappa, label=f"random(n={n}, seed={seed})")


def random_field(chain: Chain, seed: int, *, mean_zero: bool = False) -> np.ndarray:
    rng = np.random.default_rng(seed)
    f = rng.normal(size=chain.n)
    if mean_zero:
        f = f - np.sum(f * chain.m) / chain.m.sum()
    return f
