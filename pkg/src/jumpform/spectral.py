"""Spectral realization of the semigroup P_t = exp(tA).

With D = diag(m), the matrix S = D^{1/2} (-A) D^{-1/2} is symmetric whenever A
is m-symmetric, so one call to ``eigh`` gives every P_t:

    P_t f = sum_k exp(-lambda_k t) <f, phi_k>_m phi_k,   phi = D^{-1/2} V.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg

from .errors import EigSolverFailure, NegativeTime, NonSymmetric, NotConservative
from .model import Generator, StateSpace, _as_field, _frozen

ZERO_MODE_RTOL = 1e-12
SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class SpectralData:
    lambdas: np.ndarray
    basis: np.ndarray
    zero_modes: np.ndarray
    gap: float
    m: np.ndarray
    conservative: bool

    @property
    def n(self) -> int:
        return self.m.size

    @property
    def lambda_max(self) -> float:
        return float(self.lambdas[-1])

    def coefficients(self, f) -> np.ndarray:
        """<f, phi_k>_m for every mode k."""
        f = _as_field(self.n, f, "f")
        return self.basis.T @ (self.m * f)

    def synthesize(self, coeffs) -> np.ndarray:
        return self.basis @ coeffs


def _fix_signs(V: np.ndarray) -> np.ndarray:
    tol = 1e-12 * np.abs(V).max(axis=0)
    first = np.argmax(np.abs(V) > tol, axis=0)
    signs = np.sign(V[first, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def spectral_decompose(gen: Generator, space: StateSpace) -> SpectralData:
    A = gen.A
    m = space.m
    if A.shape != (space.n, space.n):
        raise NonSymmetric("generator and state space sizes differ")
    amax = float(np.abs(A).max(initial=0.0))
    sq = np.sqrt(m)
    S = -(sq[:, None] * A / sq[None, :])
    asym = float(np.abs(S - S.T).max(initial=0.0))
    if asym > SYMMETRY_RTOL * max(amax, np.finfo(float).tiny):
        raise NonSymmetric(f"generator is not m-symmetric (residual {asym:.3e})")
    S = 0.5 * (S + S.T)
    try:
        lam, V = linalg.eigh(S)
    except linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigSolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(lam)):
        raise EigSolverFailure("non-finite eigenvalues")

    thresh = ZERO_MODE_RTOL * amax
    if lam[0] < -max(thresh, 1e-12):
        raise EigSolverFailure(f"-A has a negative eigenvalue {lam[0]:.3e}")
    zero = np.abs(lam) <= thresh
    lam = np.where(zero, 0.0, np.maximum(lam, 0.0))
    pos = lam[~zero]
    gap = float(pos.min()) if pos.size else float("inf")
    basis = _fix_signs(V) / sq[:, None]
    return SpectralData(
        lambdas=_frozen(lam),
        basis=_frozen(basis),
        zero_modes=_frozen(np.flatnonzero(zero)).astype(int),
        gap=gap,
        m=_frozen(m),
        conservative=gen.conservative,
    )


def apply_semigroup(spec: SpectralData, t: float, f) -> np.ndarray:
    if t < 0:
        raise NegativeTime(f"t must be nonnegative, got {t}")
    f = _as_field(spec.n, f, "f")
    if t == 0:
        return f.copy()
    return spec.synthesize(np.exp(-spec.lambdas * t) * spec.coefficients(f))


def semigroup_path(spec: SpectralData, ts, f) -> np.ndarray:
    """P_t f for every t in ``ts``; rows follow ``ts``."""
    ts = np.asarray(ts, dtype=float)
    if np.any(ts < 0):
        raise NegativeTime("times must be nonnegative")
    c = spec.coefficients(f)
    return (np.exp(-np.outer(ts, spec.lambdas)) * c) @ spec.basis.T


def stationary_part(spec: SpectralData, f) -> np.ndarray:
    """Projection of f onto the zero modes, i.e. lim_{T->oo} P_T f."""
    c = spec.coefficients(f)
    z = spec.zero_modes
    return spec.basis[:, z] @ c[z]


def duality_check(
    spec: SpectralData,
    phi: Callable[[float], np.ndarray],
    T: float,
    *,
    panels: int = 16,
    order: int = 32,
) -> float:
    """Relative residual of the self-duality identity for phi(t, .).

    Compares sum_i m_i int_0^T P_t[phi(T-t)](i) dt with
    sum_i m_i int_0^T P_t[phi(t)](i) dt using two separate quadratures.
    ``phi(t)`` must return the field phi(t, .).
    """
    if not spec.conservative:
        raise NotConservative("the duality identity without killing needs a conservative chain")
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, T, panels + 1)
    lhs = rhs = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        ts = 0.5 * (b - a) * x + 0.5 * (a + b)
        ws = 0.5 * (b - a) * w
        for t, wt in zip(ts, ws):
            lhs += wt * np.sum(spec.m * apply_semigroup(spec, t, phi(T - t)))
        for t, wt in zip(ts[::-1], ws[::-1]):
            rhs += wt * np.sum(spec.m * apply_semigroup(spec, t, phi(t)))
    return abs(lhs - rhs) / (abs(lhs) + abs(rhs) + 1e-300)
