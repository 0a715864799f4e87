import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import eval_legendre

from empvix.exceptions import DomainError
from empvix.legendre import (
    LegendreSeries,
    gauss_rule,
    inner_product,
    inner_products,
    legendre_eval,
    legendre_series,
    legendre_vander,
    monomial_to_legendre,
    monomial_to_shifted_legendre,
    shifted_legendre_to_monomial,
)

GRID = np.linspace(-1.0, 1.0, 1001)
coeff_lists = st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=25)


def test_low_orders():
    assert legendre_eval(0, 0.3) == 1.0
    assert legendre_eval(1, 0.3) == 0.3
    assert legendre_eval(2, 0.5) == pytest.approx(-0.125, abs=1e-15)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 17, 40, 100])
def test_matches_scipy(n):
    np.testing.assert_allclose(legendre_eval(n, GRID), eval_legendre(n, GRID), atol=1e-12)


def test_endpoint_values_and_bound():
    for n in range(41):
        assert legendre_eval(n, 1.0) == pytest.approx(1.0, abs=1e-12)
        assert legendre_eval(n, -1.0) == pytest.approx((-1) ** n, abs=1e-12)
    assert np.max(np.abs(legendre_vander(100, GRID))) <= 1 + 1e-12


def test_domain_errors():
    with pytest.raises(DomainError):
        legendre_eval(3, 1.0001)
    with pytest.raises(DomainError):
        legendre_eval(-1, 0.0)


def test_vander_columns():
    V = legendre_vander(6, GRID)
    assert V.shape == (GRID.size, 7)
    for n in range(7):
        np.testing.assert_allclose(V[:, n], legendre_eval(n, GRID), atol=1e-15)


def test_gauss_small_rules():
    r1 = gauss_rule(1)
    assert r1.nodes.tolist() == [0.0] and r1.weights.tolist() == [2.0]
    r2 = gauss_rule(2)
    np.testing.assert_allclose(r2.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    np.testing.assert_allclose(r2.weights, [1.0, 1.0], atol=1e-15)


@pytest.mark.parametrize("m", [3, 5, 20, 64, 100, 256])
def test_gauss_matches_numpy(m):
    x, w = np.polynomial.legendre.leggauss(m)
    rule = gauss_rule(m)
    np.testing.assert_allclose(rule.nodes, x, atol=1e-14)
    np.testing.assert_allclose(rule.weights, w, atol=1e-14)
    assert rule.weights.sum() == pytest.approx(2.0, abs=1e-13)
    np.testing.assert_array_equal(rule.nodes, -rule.nodes[::-1])


@pytest.mark.parametrize("m", [4, 16, 64])
def test_gauss_exact_to_degree_2m_minus_1(m):
    rule = gauss_rule(m)
    for d in (0, m, 2 * m - 1, 2 * m - 2):
        exact = 0.0 if d % 2 else 2.0 / (d + 1)
        assert float(rule.weights @ rule.nodes**d) == pytest.approx(exact, abs=1e-13)


def test_mapped_rule():
    s, w = gauss_rule(10).mapped(0.0, 3.0)
    assert float(w @ s**2) == pytest.approx(9.0, rel=1e-14)


def test_gauss_rejects_zero_nodes():
    with pytest.raises(DomainError):
        gauss_rule(0)


def test_orthogonality_and_norms():
    assert inner_product(lambda x: legendre_eval(2, x) ** 2, 0) == pytest.approx(0.4, abs=1e-14)
    assert inner_product(lambda x: legendre_eval(1, x) * legendre_eval(3, x), 0) == pytest.approx(0, abs=1e-15)


def test_kinked_inner_product():
    assert inner_product(lambda x: np.maximum(x, 0.0), 0, kinks=[0.0]) == pytest.approx(0.5, abs=1e-15)
    # off-grid kink: the split rule is exact, a single rule is not
    f = lambda x: np.maximum(x - 0.3, 0.0)
    exact = 0.5 * 0.7**2
    assert inner_product(f, 0, gauss_rule(16), kinks=[0.3]) == pytest.approx(exact, abs=1e-15)
    assert abs(inner_product(f, 0, gauss_rule(16)) - exact) > 1e-6


def test_inner_products_vector():
    ip = inner_products(lambda x: x**2, 4)
    np.testing.assert_allclose(ip, [2 / 3, 0, 4 / 15, 0, 0], atol=1e-15)


def test_monomial_to_legendre_examples():
    np.testing.assert_allclose(monomial_to_legendre([0, 0, 1]).coeffs, [1 / 3, 0, 2 / 3], atol=1e-15)
    np.testing.assert_allclose(monomial_to_legendre([2.5]).coeffs, [2.5])


def test_monomial_to_legendre_degree_30():
    rng = np.random.default_rng(3)
    c = rng.normal(size=31)
    series = monomial_to_legendre(c)
    mono = np.polynomial.polynomial.polyval(GRID, c)
    assert np.max(np.abs(series(GRID) - mono)) < 1e-10


@given(coeff_lists)
def test_monomial_to_legendre_agrees_with_numpy(c):
    ours = monomial_to_legendre(c).coeffs
    # numpy trims trailing zeros
    ref = np.zeros(len(ours))
    trimmed = np.polynomial.legendre.poly2leg(c)
    ref[:len(trimmed)] = trimmed
    np.testing.assert_allclose(ours, ref, atol=1e-9 * (1 + np.abs(c).max()))


@given(coeff_lists)
def test_shifted_round_trip(c):
    back = shifted_legendre_to_monomial(monomial_to_shifted_legendre(c).coeffs)
    scale = 1 + np.abs(c).max()
    np.testing.assert_allclose(back[: len(c)], c, atol=1e-8 * scale)


def test_shifted_basis_on_unit_interval():
    # P_n(2u - 1) expanded in u
    u = np.linspace(0, 1, 11)
    for n in range(6):
        e = np.zeros(n + 1)
        e[n] = 1.0
        mono = shifted_legendre_to_monomial(e)
        np.testing.assert_allclose(np.polynomial.polynomial.polyval(u, mono), eval_legendre(n, 2 * u - 1),
                                   atol=1e-12)


@given(coeff_lists)
def test_clenshaw_matches_vander(c):
    c = np.asarray(c)
    direct = legendre_vander(c.size - 1, GRID) @ c
    np.testing.assert_allclose(legendre_series(c, GRID), direct, atol=1e-11 * (1 + np.abs(c).sum()))


def test_series_object():
    s = LegendreSeries([1.0, 2.0, 3.0])
    assert s.degree == 2
    assert s(1.0) == pytest.approx(6.0)
