"""Quadrature, finite differences, Richardson order and solver configuration."""

import math

import numpy as np
import pytest

from indefspec.errors import DegenerateInput, NoConvergence
from indefspec.numerics import (
    SolverConfig,
    central_difference,
    gauss_legendre_rule,
    integrate,
    one_sided_derivative,
    richardson_order,
    second_difference,
)


def test_midpoint_rule():
    r = gauss_legendre_rule(1, -1.0, 1.0)
    assert r.nodes.tolist() == [0.0]
    assert r.weights.tolist() == [2.0]


def test_polynomial_exactness():
    r = gauss_legendre_rule(5)
    assert r(lambda x: x**8) == pytest.approx(2 / 9, rel=1e-14)


def test_sine_square_on_unit_interval():
    r = gauss_legendre_rule(20, 0.0, 1.0)
    assert abs(r(lambda y: np.sin(math.pi * y) ** 2) - 0.5) < 1e-14


@pytest.mark.parametrize("order", [2, 7, 32, 101, 400])
def test_rule_matches_reference_table(order):
    r = gauss_legendre_rule(order)
    x, w = np.polynomial.legendre.leggauss(order)
    assert np.max(np.abs(r.nodes - x)) < 1e-13
    assert np.max(np.abs(r.weights - w)) < 1e-13
    assert abs(r.weights.sum() - 2.0) < 1e-13


def test_rule_maps_interval():
    r = gauss_legendre_rule(8, 2.0, 5.0)
    assert np.all((r.nodes > 2.0) & (r.nodes < 5.0))
    assert r.weights.sum() == pytest.approx(3.0, rel=1e-14)


def test_integrate_constant():
    assert integrate(lambda x: np.ones_like(x), 0.0, 1.0) == pytest.approx(1.0, rel=1e-15)


def test_integrate_kink_at_origin():
    # |x|^3 e^x has a kink in its third derivative at 0; splitting keeps full accuracy
    exact = (6.0 - 16.0 / math.e) + (6.0 - 2.0 * math.e)
    got = integrate(lambda x: np.abs(x) ** 3 * np.exp(x), -1.0, 1.0, rel_tol=1e-13)
    assert abs(got - exact) < 1e-12


def test_integrate_complex():
    got = integrate(lambda x: np.exp(1j * x), 0.0, math.pi)
    assert abs(got - 2j) < 1e-12


def test_integrate_no_convergence():
    with pytest.raises(NoConvergence):
        integrate(lambda x: np.sin(1.0 / (np.abs(x - 0.3) + 1e-9)), -1.0, 1.0, max_order=64)


def test_derivative_stencils():
    f = np.sin
    assert abs(central_difference(f, 0.4, 1e-5) - math.cos(0.4)) < 1e-9
    assert abs(one_sided_derivative(f, 0.4, 1e-3) - math.cos(0.4)) < 1e-10
    assert abs(one_sided_derivative(f, 0.4, -1e-3) - math.cos(0.4)) < 1e-10
    assert abs(second_difference(f, 0.4, 1e-3) + math.sin(0.4)) < 1e-8


def test_richardson_synthetic_square():
    errors = [(h, 3.7 * h**2) for h in (0.1, 0.05, 0.025)]
    assert richardson_order(errors) == pytest.approx(2.0, abs=1e-6)


def test_richardson_single_pair():
    assert richardson_order([(0.2, 0.08), (0.1, 0.01)]) == pytest.approx(3.0, abs=1e-12)


def test_richardson_zero_error_is_degenerate():
    with pytest.raises(DegenerateInput):
        richardson_order([(0.1, 1e-3), (0.05, 0.0)])


def test_richardson_input_validation():
    with pytest.raises(ValueError):
        richardson_order([(0.1, 1.0)])
    with pytest.raises(ValueError):
        richardson_order([(0.05, 1.0), (0.1, 2.0)])


def test_config_defaults_and_validation():
    c = SolverConfig()
    assert c.as_dict()["fd_grid_sizes"] == [400, 800, 1600]
    with pytest.raises(ValueError):
        SolverConfig(residual_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(fd_grid_sizes=(401,))
    with pytest.raises(ValueError):
        SolverConfig(continuation_steps=0)
