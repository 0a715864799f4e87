"""scikit-learn style wrappers around the quantile map, pricer and calibrators."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .calibration import K_BOUNDS, CalibrationProblem, calibrate_32, calibrate_k
from .data import OptionObservation
from .empirical import FIT_GRID_SIZE, MONOTONE_TOL, QuantileMap, ecdf, fit_quantile_polynomial, h_inverse
from .pricing import DEFAULT_TERMS, INSTRUMENTS, PricingParams, price, project
from .three_halves import DEFAULT_QUAD_POINTS, ThreeHalvesParams, price_call_32


def _levels(X) -> np.ndarray:
    if hasattr(X, "levels"):
        X = X.levels
    arr = check_array(X, ensure_2d=False, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"expected a single column of VIX levels, got {arr.shape[1]}")
        arr = arr[:, 0]
    return arr


def _resolve_map(quantile_map) -> QuantileMap:
    if isinstance(quantile_map, QuantileMap):
        return quantile_map
    if isinstance(quantile_map, EmpiricalQuantileMap):
        check_is_fitted(quantile_map, "map_")
        return quantile_map.map_
    raise TypeError("quantile_map must be a QuantileMap or a fitted EmpiricalQuantileMap")


def _observations(X, y=None) -> list[OptionObservation]:
    # X columns: VIX level, time to expiry
    if y is None:
        X = check_array(X, dtype=float)
        y = np.zeros(X.shape[0])
    else:
        X, y = check_X_y(X, y, dtype=float)
    if X.shape[1] != 2:
        raise ValueError("X must have two columns: VIX level and time to expiry")
    return [OptionObservation(0.0, v, c, tau) for (v, tau), c in zip(X, y)]


class EmpiricalQuantileMap(TransformerMixin, BaseEstimator):
    """Map VIX levels to factor values through the fitted quantile polynomial.

    ``fit`` builds the empirical CDF and fits h; ``transform`` returns
    x = 2 h^{-1}(vix) - 1 and ``inverse_transform`` returns h((x + 1) / 2).

    Parameters
    ----------
    degree : int, default=30
        Polynomial degree of h.
    grid_size : int, default=2001
        Number of uniform probability levels used in the least-squares fit.
    monotone_tol : float, default=1e-6
        Largest admissible decrease of h between adjacent grid points, as a
        fraction of h(1) - h(0).
    """

    def __init__(self, degree=30, grid_size=FIT_GRID_SIZE, monotone_tol=MONOTONE_TOL):
        self.degree = degree
        self.grid_size = grid_size
        self.monotone_tol = monotone_tol

    def fit(self, X, y=None):
        levels = _levels(X)
        self.cdf_ = ecdf(levels)
        self.map_ = fit_quantile_polynomial(self.cdf_, self.degree, self.grid_size, self.monotone_tol)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "map_")
        return np.asarray(h_inverse(self.map_, _levels(X))).reshape(-1, 1)

    def inverse_transform(self, X):
        check_is_fitted(self, "map_")
        return np.asarray(self.map_.tilde(_levels(X))).reshape(-1, 1)


class SpectralVIXPricer(RegressorMixin, BaseEstimator):
    """Legendre-series VIX derivative pricer with least-squares calibration of k.

    ``X`` has two columns, the observed VIX level and the time to expiry in
    years; ``y`` holds observed call prices. ``fit`` estimates ``k_`` and
    ``predict`` prices with ``k_`` when fitted, else with ``k``.
    """

    def __init__(self, quantile_map=None, k=1.0, strike=0.2, r=0.0, instrument="call",
                 n_terms=DEFAULT_TERMS, k_bounds=K_BOUNDS):
        self.quantile_map = quantile_map
        self.k = k
        self.strike = strike
        self.r = r
        self.instrument = instrument
        self.n_terms = n_terms
        self.k_bounds = k_bounds

    def fit(self, X, y):
        if self.instrument != "call":
            raise ValueError("calibration is defined on call prices only")
        problem = CalibrationProblem(
            _observations(X, y), _resolve_map(self.quantile_map), self.strike, self.r,
            tuple(self.k_bounds), self.n_terms,
        )
        self.calibration_ = calibrate_k(problem)
        self.k_ = self.calibration_.k_hat
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        if self.instrument not in INSTRUMENTS:
            raise ValueError(f"unknown instrument {self.instrument!r}")
        qmap = _resolve_map(self.quantile_map)
        k = getattr(self, "k_", self.k)
        X = check_array(X, dtype=float)
        coeffs = project(qmap, self.instrument, self.strike, self.n_terms)
        x = h_inverse(qmap, X[:, 0])
        return np.array([
            price(0.0, xi, coeffs, PricingParams(k=k, T=tau, r=self.r, K=self.strike))
            for xi, tau in zip(x, X[:, 1])
        ])


class ThreeHalvesPricer(RegressorMixin, BaseEstimator):
    """3/2-model VIX call pricer with a least-squares fit of (alpha, beta).

    Same ``X`` layout as :class:`SpectralVIXPricer`.
    """

    def __init__(self, k32=2.04, strike=0.2, r=0.0, alpha=None, beta=None, quad_points=DEFAULT_QUAD_POINTS):
        self.k32 = k32
        self.strike = strike
        self.r = r
        self.alpha = alpha
        self.beta = beta
        self.quad_points = quad_points

    def fit(self, X, y):
        fit = calibrate_32(_observations(X, y), self.k32, self.strike, self.r, quad_points=self.quad_points)
        self.alpha_, self.beta_, self.sse_ = fit.alpha, fit.beta, fit.sse
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        alpha = getattr(self, "alpha_", self.alpha)
        beta = getattr(self, "beta_", self.beta)
        if alpha is None or beta is None:
            raise ValueError("set alpha and beta or call fit first")
        X = check_array(X, dtype=float)
        return np.array([
            price_call_32(v, ThreeHalvesParams(alpha, beta, self.k32, self.strike, T=tau, t=0.0, r=self.r),
                          self.quad_points)
            for v, tau in X
        ])
