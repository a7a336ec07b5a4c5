"""Symmetric pure-jump Dirichlet forms on finite state spaces.

Spectral semigroups, Littlewood-Paley square functions, the Hardy-Stein
identity, and Monte Carlo checks of the parabolic martingale.
"""
from .bregman import bregman_F, chi, comparability_ratio, french_power, power_sum_ratio
from .brown import build_brown_chain, closed_form_G_tilde, ratio_scan
from .errors import *  # noqa: F401,F403
from .model import (
    Chain,
    JumpKernel,
    StateSpace,
    build_generator,
    build_kernel,
    dirichlet_energy,
    make_chain,
    random_chain,
    random_field,
)
from .montecarlo import McConfig, McReport, run_mc, simulate_ensemble, simulate_path
from .quadrature import QuadratureConfig
from .spectral import SpectralData, apply_semigroup, spectral_decompose, stationary_part
from .squarefns import (
    carre_gamma,
    carre_gamma_tilde,
    square_function_report,
    square_G,
    square_G_tilde,
    square_H,
    square_H_tilde,
    weighted_p_norm,
)
from .verifiers import derivative_check, hardy_stein_check, lp_estimate_scan, stein_maximal_check

__version__ = "0.1.0"
