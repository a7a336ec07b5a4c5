import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jumpform.errors import NegativeTime, NotConservative
from jumpform.model import make_chain, random_chain, random_field
from jumpform.spectral import apply_semigroup, duality_check, semigroup_path, stationary_part
from jumpform.squarefns import weighted_p_norm


def test_two_state_decomposition(two_state):
    s = two_state.spec
    np.testing.assert_allclose(s.lambdas, [0.0, 2.0], atol=1e-15)
    r = 1 / np.sqrt(2)
    np.testing.assert_allclose(s.basis, [[r, r], [r, -r]], atol=1e-15)
    assert s.gap == pytest.approx(2.0)


def test_brown_n1_gap():
    a1 = 1 - np.sqrt(2) / 2
    ch = make_chain([1, 1], [[0, a1], [a1, 0]])
    assert ch.spec.gap == pytest.approx(2 - np.sqrt(2), rel=1e-14)
    assert ch.spec.gap == pytest.approx(4 * np.sin(np.pi / 8) ** 2, rel=1e-14)


@pytest.mark.parametrize("seed", range(50))
def test_reconstruction_and_orthonormality(seed):
    ch = random_chain(20, seed, killing=0.2 if seed % 3 == 0 else None)
    s = ch.spec
    B = s.basis
    recon = B @ np.diag(s.lambdas) @ B.T @ np.diag(ch.m)
    assert np.abs(recon + ch.gen.A).max() <= 1e-10 * np.abs(ch.gen.A).max()
    assert np.abs(B.T @ (ch.m[:, None] * B) - np.eye(20)).max() <= 1e-12
    assert np.all(s.lambdas >= 0) and np.all(np.diff(s.lambdas) >= 0)


def test_single_constant_zero_mode():
    ch = random_chain(12, 3)
    z = ch.spec.zero_modes
    assert z.size == 1
    phi = ch.spec.basis[:, z[0]]
    np.testing.assert_allclose(phi, phi[0], rtol=1e-12)
    assert phi[0] > 0


def test_apply_examples(two_state):
    f = np.array([1.0, -1.0])
    np.testing.assert_array_equal(apply_semigroup(two_state.spec, 0.0, f), f)
    np.testing.assert_allclose(apply_semigroup(two_state.spec, 0.5, f), [0.36787944, -0.36787944], rtol=1e-8)
    np.testing.assert_allclose(apply_semigroup(two_state.spec, 3.0, [1.0, 1.0]), [1.0, 1.0], rtol=1e-14)
    with pytest.raises(NegativeTime):
        apply_semigroup(two_state.spec, -1.0, f)


def test_semigroup_path_matches_apply():
    ch = random_chain(10, 1)
    f = random_field(ch, 2)
    ts = [0.0, 0.3, 2.0]
    P = semigroup_path(ch.spec, ts, f)
    for row, t in zip(P, ts):
        np.testing.assert_allclose(row, apply_semigroup(ch.spec, t, f), rtol=1e-13, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 200), st.floats(0, 3), st.floats(0, 3))
def test_semigroup_laws(seed, s, t):
    ch = random_chain(10, seed, killing=0.5 if seed % 2 else None)
    sp = ch.spec
    r = np.random.default_rng(seed)
    f, g = r.normal(size=(2, 10))
    two = apply_semigroup(sp, t, apply_semigroup(sp, s, f))
    one = apply_semigroup(sp, t + s, f)
    assert np.abs(two - one).max() <= 1e-10 * max(np.abs(one).max(), 1e-300) + 1e-14
    lhs = np.sum(apply_semigroup(sp, t, f) * g * ch.m)
    rhs = np.sum(f * apply_semigroup(sp, t, g) * ch.m)
    assert abs(lhs - rhs) <= 1e-12 * (np.abs(f).max() * np.abs(g).max() * ch.m.sum())
    for p in (1, 1.5, 2, 3, np.inf):
        assert weighted_p_norm(ch.m, apply_semigroup(sp, t, f), p) <= weighted_p_norm(ch.m, f, p) * (1 + 1e-12)
    u = r.uniform(0, 1, 10)
    Pu = apply_semigroup(sp, t, u)
    assert Pu.min() >= -1e-12 and Pu.max() <= 1 + 1e-12
    assert np.all(apply_semigroup(sp, t, u + np.abs(f)) - Pu >= -1e-12)


def test_stationary_part_examples(two_state):
    np.testing.assert_allclose(stationary_part(two_state.spec, [3.0, 3.0]), [3.0, 3.0], rtol=1e-14)
    np.testing.assert_allclose(stationary_part(two_state.spec, [1.0, -1.0]), [0.0, 0.0], atol=1e-15)
    killed = random_chain(8, 0, killing=1.0)
    assert killed.spec.zero_modes.size == 0
    np.testing.assert_array_equal(stationary_part(killed.spec, random_field(killed, 1)), 0.0)


def test_stationary_part_is_weighted_mean_and_limit():
    ch = random_chain(12, 5)
    f = random_field(ch, 6)
    fbar = stationary_part(ch.spec, f)
    np.testing.assert_allclose(fbar, np.sum(f * ch.m) / ch.m.sum(), rtol=1e-12)
    T = 50 / ch.spec.gap
    assert np.abs(apply_semigroup(ch.spec, T, f) - fbar).max() <= 1e-12 * np.abs(f).max()


def test_duality_examples(two_state):
    f = np.array([0.3, -1.2])
    assert duality_check(two_state.spec, lambda t: f, 1.0) == 0.0
    assert duality_check(two_state.spec, lambda t: np.exp(-t) * f, 1.0) <= 1e-10
    for seed in range(5):
        ch = random_chain(10, seed)
        g = random_field(ch, seed)
        assert duality_check(ch.spec, lambda t: t * g, 2.0) <= 1e-10
    with pytest.raises(NotConservative):
        duality_check(random_chain(5, 0, killing=1.0).spec, lambda t: np.ones(5), 1.0)
