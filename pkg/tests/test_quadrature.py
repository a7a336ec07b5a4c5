import numpy as np
import pytest

from jumpform.errors import ToleranceNotMet
from jumpform.quadrature import Crossings, QuadratureConfig, gauss_legendre01, integrate_decaying, mapped_nodes


def test_config_validation():
    for bad in (dict(rel_tol=0.0), dict(rel_tol=0.1), dict(panel_order=3), dict(max_panels=0)):
        with pytest.raises(ValueError):
            QuadratureConfig(**bad)


def test_gauss_legendre_exact_on_polynomials():
    x, w = gauss_legendre01(8)
    assert np.sum(w) == pytest.approx(1.0, rel=1e-15)
    assert np.sum(w * x**15) == pytest.approx(1 / 16, rel=1e-14)


@pytest.mark.parametrize("flags", [(False, False), (True, False), (False, True), (True, True)])
def test_mapped_nodes_integrate_smooth_functions(flags):
    t, w = mapped_nodes(1.0, 3.0, *flags, 32)
    assert np.sum(w * np.exp(-t)) == pytest.approx(np.exp(-1) - np.exp(-3), rel=1e-13)


def test_graded_map_handles_sqrt_endpoint():
    t, w = mapped_nodes(0.0, 1.0, True, False, 32)
    assert np.sum(w * np.sqrt(t)) == pytest.approx(2 / 3, rel=1e-13)


def test_exponential_sum_integral():
    rates = np.array([0.5, 2.0, 7.0])
    coef = np.array([1.0, -3.0, 2.0])
    exact = np.sum(coef / rates)
    res = integrate_decaying(
        lambda ts: np.exp(-np.outer(ts, rates)) @ coef,
        first_width=0.1,
        tail_bound=lambda T: float(np.sum(np.abs(coef) * np.exp(-rates * T) / rates)),
        norm=lambda v: float(abs(v)),
    )
    assert res.value == pytest.approx(exact, rel=1e-10)
    assert res.tail_rel <= 1e-10


def test_kink_located_and_integrated():
    # |e^{-t} - 0.5 e^{-0.2 t}| has a kink where the sum changes sign
    B = np.array([[1.0, -0.5]])
    rates = np.array([1.0, 0.2])
    cr = Crossings(B, rates)
    roots = cr.roots(0.0, 5.0)
    assert roots.size == 1
    assert roots[0] == pytest.approx(np.log(2) / 0.8, rel=1e-14)
    res = integrate_decaying(
        lambda ts: np.abs(np.exp(-np.outer(ts, rates)) @ B[0]),
        first_width=0.25,
        tail_bound=lambda T: np.exp(-T) + 2.5 * np.exp(-0.2 * T),
        norm=lambda v: float(abs(v)),
        crossings=cr,
    )
    t0 = np.log(2) / 0.8
    G = lambda t: -np.exp(-t) + 2.5 * np.exp(-0.2 * t)  # antiderivative, G(oo) = 0
    assert res.value == pytest.approx(2 * G(t0) - G(0.0), rel=1e-10)


def test_panel_budget_exhaustion():
    with pytest.raises(ToleranceNotMet):
        integrate_decaying(
            lambda ts: np.exp(-1e-6 * ts),
            first_width=1e-3,
            tail_bound=lambda T: 1e6 * np.exp(-1e-6 * T),
            norm=lambda v: float(abs(v)),
            config=QuadratureConfig(max_panels=5),
        )
