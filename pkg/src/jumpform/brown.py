"""The 2n-state "reflected walk with a removed segment" chain.

States 1..n sample [0, pi/4], states n+1..2n sample [3pi/4, pi].  Nearest
neighbours jump at rate 1; the two states next to the removed segment jump
across it at rate alpha_n = 1 / (1 + cot(pi/8n)), which makes

    f(k) = cos((2k-1) pi / 8n)          k <= n
    f(k) = cos((2k-1+4n) pi / 8n)       k >  n

an eigenfunction with eigenvalue lambda_n = 4 sin^2(pi/8n).  Because f is an
eigenfunction the chi weights are frozen in time and G~ is explicit; its
p-norm grows like n^(1/2 - 1/p) while ||f||_p grows like n^(1/p).

Indices in docstrings are 1-based as above; arrays are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Chain, make_chain
from .quadrature import gauss_legendre01
from .squarefns import evaluate, weighted_p_norm


def alpha(n: int) -> float:
    return 1.0 / (1.0 + 1.0 / np.tan(np.pi / (8 * n)))


def eigenvalue(n: int) -> float:
    return 4.0 * np.sin(np.pi / (8 * n)) ** 2


def eigenfunction(n: int) -> np.ndarray:
    k = np.arange(1, 2 * n + 1)
    return np.where(
        k <= n,
        np.cos((2 * k - 1) * np.pi / (8 * n)),
        np.cos((2 * k - 1 + 4 * n) * np.pi / (8 * n)),
    )


@dataclass(frozen=True, eq=False)
class BrownChainSpec:
    n: int
    alpha_n: float
    lambda_n: float
    f: np.ndarray
    m: np.ndarray


def build_brown_chain(n: int) -> tuple[Chain, BrownChainSpec]:
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    a = alpha(n)
    N = 2 * n
    R = np.zeros((N, N))
    idx = np.arange(N - 1)
    R[idx, idx + 1] = 1.0
    R[idx + 1, idx] = 1.0
    R[n - 1, n] = R[n, n - 1] = a
    chain = make_chain(np.ones(N), R, label=f"brown(n={n})")
    return chain, BrownChainSpec(n, a, eigenvalue(n), eigenfunction(n), chain.m)


def verify_eigenpair(chain: Chain, bspec: BrownChainSpec) -> float:
    """max_k |(A f)(k) + lambda_n f(k)|."""
    return float(np.abs(chain.gen.A @ bspec.f + bspec.lambda_n * bspec.f).max())


def closed_form_G_tilde_sq(n: int) -> np.ndarray:
    """Exact G~(k)^2 for the chain's eigenfunction.

    For k < n only the right neighbour has the smaller |f| value, giving
    sin^2(k pi/4n) / 2; at k = n the jump across the gap is a tie
    (|f(n)| = |f(n+1)|), giving (1 + cot(pi/8n)) / 8.  Both values are half of
    the ones obtained with int_0^oo e^{-lambda t} dt in place of
    int_0^oo e^{-2 lambda t} dt; see :func:`uncorrected_G_tilde_sq`.
    G~(2n+1-k) = G~(k).
    """
    return 0.5 * uncorrected_G_tilde_sq(n)


def closed_form_G_tilde(chain) -> np.ndarray:
    """G~ itself; ``chain`` is n, a :class:`BrownChainSpec`, or a brown chain."""
    if isinstance(chain, BrownChainSpec):
        n = chain.n
    elif isinstance(chain, Chain):
        n = chain.n // 2
    else:
        n = int(chain)
    return np.sqrt(closed_form_G_tilde_sq(n))


def uncorrected_G_tilde_sq(n: int) -> np.ndarray:
    """sin^2(k pi/4n) for k < n and (1 + cot(pi/8n))/4 at k = n, mirrored.

    These forms are the acceptance targets; they equal twice the true G~^2.
    """
    k = np.arange(1, n)
    half = np.r_[np.sin(k * np.pi / (4 * n)) ** 2, (1.0 + 1.0 / np.tan(np.pi / (8 * n))) / 4.0]
    return np.r_[half, half[::-1]]


def cos_power_constant(p: float, order: int = 64) -> float:
    """c_2 = 2 int_0^1 cos(pi x / 4)^p dx by Gauss-Legendre."""
    x, w = gauss_legendre01(order)
    return 2.0 * float(np.sum(w * np.cos(np.pi * x / 4.0) ** p))


def asymptotic_constant(p: float) -> float:
    """2^(1/p + 1/2) / (pi^(1/2) c_2^(1/p)), the target limit of
    ||G~||_p / ||f||_p / n^(1/2 - 1/p)."""
    return 2.0 ** (1.0 / p + 0.5) / (np.sqrt(np.pi) * cos_power_constant(p) ** (1.0 / p))


def f_norm_p(n: int, p: float) -> float:
    """||f||_p^p = 2 sum_{k<=n} cos^p((2k-1) pi/8n), as an exact finite sum."""
    k = np.arange(1, n + 1)
    return float(2.0 * np.sum(np.cos((2 * k - 1) * np.pi / (8 * n)) ** p)) ** (1.0 / p)


@dataclass(frozen=True)
class RatioRow:
    n: int
    p: float
    ratio_G_tilde: float
    normalized: float
    target_constant: float
    ratio_H: float
    share_at_gap: float


def ratio_scan(p: float, n_list, *, with_H: bool = True) -> list[RatioRow]:
    """||G~||_p/||f||_p and ||H||_p/||f||_p along the chain family.

    G~ uses the computed closed form (eigenfunction path of
    :func:`jumpform.squarefns.evaluate`); H uses its triple eigen-sum.
    ``share_at_gap`` is the fraction of ||G~||_p^p carried by the two states
    adjacent to the removed segment.
    """
    target = asymptotic_constant(p)
    rows = []
    for n in n_list:
        chain, b = build_brown_chain(int(n))
        spec, kernel = chain.spec, chain.kernel
        gt = evaluate(spec, kernel, b.f, "G_tilde").values
        nf = weighted_p_norm(chain.m, b.f, p)
        ratio = weighted_p_norm(chain.m, gt, p) / nf
        rh = float("nan")
        if with_H:
            rh = weighted_p_norm(chain.m, evaluate(spec, kernel, b.f, "H").values, p) / nf
        share = 2.0 * gt[n - 1] ** p / np.sum(gt**p)
        rows.append(RatioRow(int(n), float(p), ratio, ratio / n ** (0.5 - 1.0 / p), target, rh, share))
    return rows
