"""Legendre polynomials, Gauss-Legendre quadrature and basis changes on [-1, 1]."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .exceptions import DomainError

DEFAULT_QUAD_ORDER = 64


def _check_domain(x: np.ndarray) -> None:
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise DomainError("Legendre evaluation requires |x| <= 1")


def legendre_eval(n: int, x):
    """Value of P_n at ``x`` from the three-term recurrence.

    Parameters
    ----------
    n : int
        Polynomial order, ``n >= 0``.
    x : float or array_like
        Evaluation point(s) in [-1, 1].

    Returns
    -------
    float or ndarray
        P_n(x), with the same shape as ``x``.
    """
    if n < 0:
        raise DomainError(f"order must be nonnegative, got {n}")
    x_arr = np.asarray(x, dtype=float)
    _check_domain(x_arr)
    p_prev = np.ones_like(x_arr)
    if n == 0:
        return p_prev if x_arr.ndim else float(p_prev)
    p = x_arr.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x_arr * p - k * p_prev) / (k + 1)
    return p if x_arr.ndim else float(p)


def legendre_vander(n_max: int, x) -> np.ndarray:
    """Matrix of P_0..P_{n_max} at the points ``x``, shape ``(len(x), n_max + 1)``."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    _check_domain(x_arr)
    out = np.empty((x_arr.size, n_max + 1))
    out[:, 0] = 1.0
    if n_max >= 1:
        out[:, 1] = x_arr
    for k in range(1, n_max):
        out[:, k + 1] = ((2 * k + 1) * x_arr * out[:, k] - k * out[:, k - 1]) / (k + 1)
    return out


def legendre_series(coeffs, x):
    """Evaluate sum_n coeffs[n] P_n(x) by Clenshaw summation."""
    a = np.asarray(coeffs, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    _check_domain(x_arr)
    n_max = a.size - 1
    if n_max == 0:
        out = np.full_like(x_arr, a[0])
        return out if x_arr.ndim else float(out)
    b1 = np.zeros_like(x_arr)
    b2 = np.zeros_like(x_arr)
    for k in range(n_max, 0, -1):
        # b_k = a_k + alpha_k(x) b_{k+1} + beta_{k+1} b_{k+2}
        b1, b2 = a[k] + (2 * k + 1) / (k + 1) * x_arr * b1 - (k + 1) / (k + 2) * b2, b1
    out = a[0] + x_arr * b1 - 0.5 * b2
    return out if x_arr.ndim else float(out)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return self.nodes.size

    def mapped(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights affinely transported to [a, b]."""
        half = 0.5 * (b - a)
        return half * self.nodes + 0.5 * (a + b), half * self.weights


@lru_cache(maxsize=None)
def gauss_rule(m: int = DEFAULT_QUAD_ORDER) -> QuadratureRule:
    """Gauss-Legendre rule of order ``m`` via Newton iteration on P_m.

    The rule integrates polynomials of degree ``2m - 1`` exactly.
    """
    if m < 1:
        raise DomainError(f"quadrature order must be >= 1, got {m}")
    i = np.arange(1, m + 1)
    x = np.cos(np.pi * (i - 0.25) / (m + 0.5))
    for _ in range(100):
        p_prev = np.ones_like(x)
        p = x.copy()
        for k in range(1, m):
            p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
        dp = m * (x * p - p_prev) / (x * x - 1.0) if m > 1 else np.ones_like(x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-14:
            break
    # final derivative at the converged nodes
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(1, m):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = m * (x * p - p_prev) / (x * x - 1.0) if m > 1 else np.ones_like(x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w)


def _segments(kinks) -> np.ndarray:
    pts = [-1.0]
    for c in sorted(kinks or ()):
        if not -1.0 < c < 1.0:
            raise DomainError(f"kink {c} must lie strictly inside (-1, 1)")
        pts.append(float(c))
    pts.append(1.0)
    return np.asarray(pts)


def inner_products(f, n_max: int, rule: QuadratureRule | None = None, kinks=()) -> np.ndarray:
    """Vector of <f, P_n> for n = 0..n_max, splitting the integral at ``kinks``."""
    rule = rule or gauss_rule()
    out = np.zeros(n_max + 1)
    pts = _segments(kinks)
    for a, b in zip(pts[:-1], pts[1:]):
        if b <= a:
            continue
        nodes, weights = rule.mapped(a, b)
        vals = np.asarray(f(nodes), dtype=float) * weights
        out += vals @ legendre_vander(n_max, nodes)
    return out


def inner_product(f, n: int, rule: QuadratureRule | None = None, kinks=()) -> float:
    """<f, P_n> = integral over [-1, 1] of f(x) P_n(x)."""
    return float(inner_products(f, n, rule, kinks)[n])


@dataclass(frozen=True)
class LegendreSeries:
    """Coefficients a_n of sum_n a_n P_n(x) on [-1, 1]."""

    coeffs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coeffs, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("LegendreSeries needs a nonempty 1-D coefficient vector")
        if not np.all(np.isfinite(a)):
            raise ValueError("LegendreSeries coefficients must be finite")
        object.__setattr__(self, "coeffs", a)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return legendre_series(self.coeffs, x)


@lru_cache(maxsize=None)
def _monomial_matrix(degree: int) -> np.ndarray:
    # row m holds the Legendre coefficients of x**m; x P_n = ((n+1) P_{n+1} + n P_{n-1}) / (2n+1)
    mat = np.zeros((degree + 1, degree + 1))
    mat[0, 0] = 1.0
    for m in range(1, degree + 1):
        prev = mat[m - 1]
        row = mat[m]
        for n in range(m):
            if prev[n] == 0.0:
                continue
            row[n + 1] += prev[n] * (n + 1) / (2 * n + 1)
            if n >= 1:
                row[n - 1] += prev[n] * n / (2 * n + 1)
    mat.setflags(write=False)
    return mat


def monomial_to_legendre(coeffs) -> LegendreSeries:
    """Exact change of basis from sum_m c_m x**m to Legendre coefficients."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    return LegendreSeries(c @ _monomial_matrix(c.size - 1))


def shifted_legendre_to_monomial(coeffs) -> np.ndarray:
    """Monomial coefficients in u of sum_n a_n P_n(2u - 1)."""
    a = np.asarray(coeffs, dtype=float)
    deg = a.size - 1
    out = np.zeros(deg + 1)
    for n in range(deg + 1):
        for j in range(n + 1):
            out[j] += a[n] * (-1) ** (n + j) * comb(n, j) * comb(n + j, j)
    return out


def monomial_to_shifted_legendre(coeffs) -> LegendreSeries:
    """Legendre coefficients in x = 2u - 1 of the polynomial sum_j c_j u**j."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    deg = c.size - 1
    in_x = np.zeros(deg + 1)
    # u**j = ((x + 1) / 2)**j
    for j in range(deg + 1):
        if c[j] == 0.0:
            continue
        scale = c[j] / 2.0**j
        for i in range(j + 1):
            in_x[i] += scale * comb(j, i)
    return monomial_to_legendre(in_x)
