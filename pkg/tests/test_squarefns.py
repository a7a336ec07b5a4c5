import numpy as np
import pytest

from jumpform.errors import BadExponent, DivergentIntegral, GridTooCoarse, NotConservative, ToleranceNotMet
from jumpform.model import dirichlet_energy, make_chain, random_chain, random_field
from jumpform.quadrature import QuadratureConfig
from jumpform.squarefns import (
    carre_gamma,
    carre_gamma_tilde,
    default_t_grid,
    evaluate,
    gamma_via_generator,
    maximal_function,
    square_function_report,
    square_G,
    square_G_tilde,
    square_H,
    square_H_tilde,
    weighted_p_norm,
)


def test_gamma_examples(two_state):
    k = two_state.kernel
    np.testing.assert_array_equal(carre_gamma(k, [4.0, 4.0]), 0.0)
    np.testing.assert_array_equal(carre_gamma(k, [0.0, 1.0]), [0.5, 0.5])
    np.testing.assert_array_equal(carre_gamma_tilde(k, [0.0, 1.0]), [0.0, 1.0])
    np.testing.assert_array_equal(carre_gamma_tilde(k, [1.0, -1.0]), [2.0, 2.0])
    np.testing.assert_array_equal(carre_gamma(k, [1.0, -1.0]), [2.0, 2.0])
    np.testing.assert_array_equal(carre_gamma_tilde(k, [3.0, 3.0]), 0.0)


def test_gamma_via_generator_examples(two_state):
    np.testing.assert_allclose(gamma_via_generator(two_state.gen, [0.0, 1.0]), [0.5, 0.5], rtol=1e-15)
    np.testing.assert_array_equal(gamma_via_generator(two_state.gen, [2.0, 2.0]), 0.0)
    with pytest.raises(NotConservative):
        gamma_via_generator(random_chain(5, 0, killing=1.0).gen, np.ones(5))


@pytest.mark.parametrize("seed", range(20))
def test_gamma_identities(seed):
    ch = random_chain(20, seed)
    u = random_field(ch, seed + 1)
    g, gt = carre_gamma(ch.kernel, u), carre_gamma_tilde(ch.kernel, u)
    assert np.abs(g - gamma_via_generator(ch.gen, u)).max() <= 1e-12 * np.abs(g).max()
    E = dirichlet_energy(ch.space, ch.kernel, u)
    assert g @ ch.m == pytest.approx(E, rel=1e-12)
    assert gt @ ch.m == pytest.approx(E, rel=1e-12)
    assert np.all(gt <= 2 * g + 1e-15)
    assert np.all(g >= 0) and np.all(gt >= 0)


def test_weighted_norm_examples():
    assert weighted_p_norm([1, 1], [1, 1], 2) == pytest.approx(np.sqrt(2))
    assert weighted_p_norm([1, 1], [3, 4], np.inf) == 4
    with pytest.raises(BadExponent):
        weighted_p_norm([1, 1], [3, 4], 0.5)
    r = np.random.default_rng(0)
    m = r.uniform(0.5, 2, 10)
    for _ in range(50):
        x, y = r.normal(size=(2, 10))
        for p in (1, 1.5, 3, np.inf):
            assert weighted_p_norm(m, x + y, p) <= weighted_p_norm(m, x, p) + weighted_p_norm(m, y, p) + 1e-12


def test_constant_field_gives_zero():
    ch = random_chain(10, 2)
    f = np.full(10, 1.7)
    for fn in (square_G, square_G_tilde, square_H, square_H_tilde):
        np.testing.assert_allclose(fn(ch.spec, ch.kernel, f), 0.0, atol=1e-7)


def test_eigenfunction_closed_forms():
    ch = random_chain(12, 4)
    k = 5
    f = ch.spec.basis[:, k]
    lam = ch.spec.lambdas[k]
    g = carre_gamma(ch.kernel, f)
    G = square_G(ch.spec, ch.kernel, f)
    np.testing.assert_allclose(G**2, g / (2 * lam), rtol=1e-12)
    Gq = square_G(ch.spec, ch.kernel, f, method="quadrature")
    np.testing.assert_allclose(Gq**2, g / (2 * lam), rtol=1e-9)
    # H~ for an eigenfunction: the chi weights are frozen, so spectrally
    # H~^2 = sum_m <Gamma~[f], phi_m> phi_m / (2 lam + lam_m)
    gt = carre_gamma_tilde(ch.kernel, f, tie_rtol=1e-10)
    d = ch.spec.coefficients(gt)
    expected = ch.spec.synthesize(d / (2 * lam + ch.spec.lambdas))
    Ht = square_H_tilde(ch.spec, ch.kernel, f)
    np.testing.assert_allclose(Ht**2, expected, rtol=1e-10)


def test_two_state_H():
    ch = make_chain([1, 1], [[0, 1], [1, 0]])
    np.testing.assert_allclose(square_H(ch.spec, ch.kernel, [1.0, -1.0]) ** 2, [0.5, 0.5], rtol=1e-14)


@pytest.mark.parametrize("seed", range(8))
def test_closed_form_matches_quadrature(seed):
    ch = random_chain(15, seed, killing=0.4 if seed % 2 else None)
    f = random_field(ch, seed + 3, mean_zero=True)
    for kind in ("G", "H"):
        ev = evaluate(ch.spec, ch.kernel, f, kind, method="both")
        assert ev.discrepancy <= 1e-9
        np.testing.assert_allclose(ev.quad.value, ev.sq, rtol=1e-8)


@pytest.mark.parametrize("seed", range(8))
def test_pointwise_sqrt2_bounds(seed):
    ch = random_chain(15, seed)
    f = random_field(ch, seed)
    rep = square_function_report(ch.spec, ch.kernel, f)
    assert np.all(rep.G_tilde <= np.sqrt(2) * rep.G + 1e-10)
    assert np.all(rep.H_tilde <= np.sqrt(2) * rep.H + 1e-10)
    for arr in (rep.G, rep.G_tilde, rep.H, rep.H_tilde):
        assert np.all(np.isfinite(arr)) and np.all(arr >= 0)


@pytest.mark.parametrize("seed", range(5))
def test_p2_norm_equalities(seed):
    ch = random_chain(20, seed)
    f = random_field(ch, seed, mean_zero=True)
    rep = square_function_report(ch.spec, ch.kernel, f, p_list=(2.0, 4.0))
    target = weighted_p_norm(ch.m, f, 2) / np.sqrt(2)
    for v in rep.p_norms[2.0].values():
        assert v == pytest.approx(target, rel=1e-8)
    assert rep.quad_tolerance_achieved <= 1e-8
    assert rep.method["G"] == "closed_form" and rep.method["H_tilde"] == "quadrature"


def test_weakly_coupled_zero_mode_diverges():
    # Two clusters joined by a rate below the zero-mode clamp: the slow mode is
    # treated as invariant but is not constant across the joining edge.
    R = np.zeros((4, 4))
    R[0, 1] = R[1, 0] = R[2, 3] = R[3, 2] = 1.0
    R[1, 2] = R[2, 1] = 1e-14
    ch = make_chain(np.ones(4), R)
    assert ch.spec.zero_modes.size == 2
    with pytest.raises(DivergentIntegral):
        square_G(ch.spec, ch.kernel, [1.0, 1.0, -1.0, -1.0])


def test_tolerance_not_met():
    ch = random_chain(10, 1)
    f = random_field(ch, 1, mean_zero=True)
    with pytest.raises(ToleranceNotMet):
        square_H_tilde(ch.spec, ch.kernel, f, QuadratureConfig(max_panels=2))


def test_maximal_function_examples():
    killed = random_chain(10, 3, killing=1.0)
    ground = killed.spec.basis[:, 0]
    assert np.all(ground > 0)
    fs = maximal_function(killed.spec, ground, default_t_grid(killed.spec))
    np.testing.assert_allclose(fs, ground, rtol=1e-14)
    ch = random_chain(10, 3)
    np.testing.assert_allclose(maximal_function(ch.spec, np.ones(10), default_t_grid(ch.spec)), 1.0, rtol=1e-12)
    f = random_field(ch, 9)
    assert np.all(maximal_function(ch.spec, f, default_t_grid(ch.spec)) >= np.abs(f))
    with pytest.raises(GridTooCoarse):
        maximal_function(ch.spec, f, np.linspace(0.1, 10, 5))
