import json

import numpy as np
import pytest

from jumpform.errors import BadWindow, HypothesisViolation
from jumpform.model import make_chain, random_chain, random_field
from jumpform.squarefns import weighted_p_norm
from jumpform.verifiers import (
    ScanRow,
    bregman_energy_ratio,
    brown_family,
    compare_to_baseline,
    derivative_check,
    hardy_stein_check,
    load_baseline,
    lp_estimate_scan,
    random_family,
    stein_maximal_check,
    strictly_increasing,
    summarize,
    write_baseline,
)


def test_hardy_stein_constant_field():
    ch = random_chain(8, 0)
    r = hardy_stein_check(ch, np.full(8, 2.5), 3.0)
    assert abs(r.lhs) <= 1e-12 and r.rhs == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_hardy_stein_p2(seed):
    ch = random_chain(20, seed)
    f = random_field(ch, seed, mean_zero=True)
    r = hardy_stein_check(ch, f, 2.0)
    assert r.lhs == pytest.approx(weighted_p_norm(ch.m, f, 2) ** 2, rel=1e-12)
    assert r.rel_err <= 1e-10


@pytest.mark.parametrize("p", [1.2, 1.5, 2.5, 3.0, 5.0])
@pytest.mark.parametrize("seed", range(4))
def test_hardy_stein_general(seed, p):
    ch = random_chain(20, 100 + seed)
    r = hardy_stein_check(ch, random_field(ch, seed), p)
    assert r.rel_err <= 1e-8


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_hardy_stein_with_killing(p):
    ch = random_chain(15, 7, killing=0.5)
    f = random_field(ch, 8)
    r = hardy_stein_check(ch, f, p)
    assert r.lhs == pytest.approx(weighted_p_norm(ch.m, f, p) ** p)
    assert r.rel_err <= 1e-8


def test_derivative_examples(two_state):
    r = derivative_check(two_state, [3.0, 3.0], 1.0, 0.25, 1e-4)
    np.testing.assert_allclose(r.analytic, 0.0, atol=1e-15)
    np.testing.assert_allclose(r.finite_difference, 0.0, atol=1e-8)
    r = derivative_check(two_state, [1.0, -1.0], 1.0, 0.25, 1e-4)
    # u = e^{-1.5} f, Gamma[u] = 2 e^{-3} at both states, P_t keeps constants
    np.testing.assert_allclose(r.analytic, 4 * np.exp(-3.0) * np.ones(2), rtol=1e-14)
    np.testing.assert_allclose(r.analytic, [0.199148, 0.199148], atol=1e-6)
    assert r.rel_err <= 1e-6


@pytest.mark.parametrize("seed", range(6))
def test_derivative_second_order(seed):
    ch = random_chain(20, seed, killing=0.3 if seed % 2 else None)
    f = random_field(ch, seed)
    a = derivative_check(ch, f, 2.0, 0.7, 1e-4)
    b = derivative_check(ch, f, 2.0, 0.7, 5e-5)
    assert a.rel_err <= 1e-6
    assert 3.6 <= a.rel_err / b.rel_err <= 4.4


def test_derivative_default_step_and_window():
    ch = random_chain(10, 1)
    f = random_field(ch, 1)
    r = derivative_check(ch, f, 1.0, 0.5)
    assert r.h <= 1e-4 * 0.5 and r.rel_err <= 1e-6
    with pytest.raises(BadWindow):
        derivative_check(ch, f, 1.0, 0.99, 0.05)
    with pytest.raises(BadWindow):
        derivative_check(ch, f, 1.0, 0.0, 1e-4)


def test_stein_examples():
    killed = random_chain(10, 4, killing=1.0)
    ground = killed.spec.basis[:, 0]
    r = stein_maximal_check(killed, ground, 3.0)
    assert r.lhs == pytest.approx(weighted_p_norm(killed.m, ground, 3.0), rel=1e-14) and r.ok
    ch = random_chain(10, 4)
    f = random_field(ch, 4)
    r = stein_maximal_check(ch, f, np.inf)
    assert r.ok and r.rhs == pytest.approx(np.abs(f).max())


@pytest.mark.parametrize("p", [2.0, 3.0, 4.0])
def test_bregman_energy_two_sided(p):
    vals = np.concatenate([
        bregman_energy_ratio(random_chain(12, s), random_field(random_chain(12, s), s), p, [0.0, 0.5, 3.0])
        for s in range(10)
    ])
    assert vals.min() > 0 and vals.max() < np.inf
    if p == 2.0:
        np.testing.assert_allclose(vals, 2.0, rtol=1e-12)


def test_bregman_energy_below_two_bounded_above():
    vals = np.concatenate([
        bregman_energy_ratio(random_chain(12, s), random_field(random_chain(12, s), s), 1.5, [0.0, 0.5, 3.0])
        for s in range(10)
    ])
    assert np.all(np.isfinite(vals)) and vals.max() < 10


def test_scan_p2_gives_inverse_sqrt2():
    fam = list(random_family(12, range(3)))
    for name in ("G_tilde_upper_12", "H_upper_2inf", "H_tilde_upper_2inf", "H_lower_12"):
        rows = lp_estimate_scan(fam, [2.0], name)
        for r in rows:
            assert r.ratio == pytest.approx(1 / np.sqrt(2), rel=1e-8)
            assert r.bound_kind in ("upper", "lower")


def test_scan_hypotheses():
    fam = list(random_family(10, range(2)))
    with pytest.raises(HypothesisViolation):
        lp_estimate_scan(fam, [3.0], "G_tilde_upper_12")
    with pytest.raises(HypothesisViolation):
        lp_estimate_scan(fam, [2.5], "H_tilde_lower_3inf")
    with pytest.raises(HypothesisViolation):
        lp_estimate_scan(list(random_family(10, [0], killing=0.5)), [3.0], "H_upper_2inf")
    with pytest.raises(HypothesisViolation):
        lp_estimate_scan(list(random_family(10, [0], mean_zero=False)), [3.0], "H_lower_3inf")
    with pytest.raises(HypothesisViolation):
        lp_estimate_scan(fam, [3.0], "no_such_scan")
    rows = lp_estimate_scan(fam, [2.5], "H_tilde_lower_3inf", exploratory=True)
    assert {r.bound_kind for r in rows} == {"exploratory"}


def test_scan_brown_family_grows():
    rows = lp_estimate_scan(brown_family([8, 16, 32, 64]), [4.0], "G_tilde_lower_2inf")
    assert strictly_increasing([r.ratio for r in rows])


def test_baseline_roundtrip_and_regressions(tmp_path):
    rows = [
        ScanRow("H_upper_2inf", 0, 10, 3.0, 0.60, "upper"),
        ScanRow("H_upper_2inf", 1, 10, 3.0, 0.65, "upper"),
        ScanRow("H_lower_3inf", 0, 10, 3.0, 0.55, "lower"),
    ]
    path = tmp_path / "b.json"
    write_baseline(rows, path)
    base = load_baseline(path)
    assert base["scans"]["H_upper_2inf"]["3.0"]["max"] == 0.65
    assert compare_to_baseline(rows, base) == []
    worse = [ScanRow("H_upper_2inf", 2, 10, 3.0, 0.66, "upper"), ScanRow("H_lower_3inf", 1, 10, 3.0, 0.54, "lower")]
    probs = compare_to_baseline(worse, base)
    assert len(probs) == 2
    within = [ScanRow("H_upper_2inf", 2, 10, 3.0, 0.6549, "upper")]
    assert compare_to_baseline(within, base) == []
    path.write_text(json.dumps({"version": 99, "scans": {}}))
    with pytest.raises(ValueError):
        load_baseline(path)


def test_summary_counts():
    s = summarize([ScanRow("x", 0, 3, 2.0, 1.0, "upper"), ScanRow("x", 1, 3, 2.0, 2.0, "upper")])
    assert s["x"]["2.0"]["count"] == 2


def test_two_state_chain_fixture_is_conservative(two_state):
    assert two_state.gen.conservative
