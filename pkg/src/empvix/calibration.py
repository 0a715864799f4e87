"""Least-squares calibration of the model speed k and of the 3/2 benchmark."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .data import OptionObservation
from .empirical import QuantileMap, h_inverse
from .exceptions import CalibrationError, DomainError, EmpVixError, NumericalError
from .legendre import legendre_vander
from .pricing import DEFAULT_TERMS, PricingParams, price_call, project_call
from .three_halves import DEFAULT_QUAD_POINTS, ThreeHalvesParams, price_call_32

K_BOUNDS = (1e-3, 50.0)


@dataclass(eq=False)
class CalibrationProblem:
    """Observed calls on one strike, priced off a fitted quantile map.

    Each observation keeps its own time to expiry, so the series for row i
    decays over ``tau_i``. Everything except the exponential decay factors
    is precomputed here.
    """

    observations: list[OptionObservation]
    qmap: QuantileMap
    K: float
    r: float = 0.0
    k_bounds: tuple[float, float] = K_BOUNDS
    n_terms: int = DEFAULT_TERMS
    x: np.ndarray = field(init=False)
    nu: np.ndarray = field(init=False)

    def __post_init__(self):
        if not self.observations:
            raise DomainError("calibration needs at least one observation")
        lo, hi = self.k_bounds
        if not 0 < lo < hi:
            raise DomainError(f"k bounds must satisfy 0 < k_lo < k_hi, got {self.k_bounds}")
        self.tau = np.array([o.tau for o in self.observations])
        self.observed = np.array([o.call_price for o in self.observations])
        self.x = h_inverse(self.qmap, np.array([o.vix for o in self.observations]))
        self.coeffs = project_call(self.qmap, self.K, self.n_terms)
        # nu[i, n] = b_n P_n(x_i) with b_n = (2n+1)/2 <(h~ - K)^+, P_n>
        self.nu = legendre_vander(self.n_terms - 1, self.x) * self.coeffs.b
        self.disc = np.exp(-self.r * self.tau)
        n = np.arange(self.n_terms)
        self._rate_tau = np.outer(self.tau, 0.5 * n * (n + 1))


def model_prices(k: float, problem: CalibrationProblem) -> np.ndarray:
    if not k > 0:
        raise DomainError(f"speed k must be positive, got {k}")
    return problem.disc * np.sum(problem.nu * np.exp(-k * problem._rate_tau), axis=1)


def objective_k(k: float, problem: CalibrationProblem) -> float:
    """Sum of squared differences between model and observed call prices."""
    resid = model_prices(k, problem) - problem.observed
    return float(resid @ resid)


def direct_prices(k: float, problem: CalibrationProblem) -> np.ndarray:
    """Same prices as :func:`model_prices`, through the generic pricer."""
    out = np.empty(len(problem.observations))
    for i, (x, tau) in enumerate(zip(problem.x, problem.tau)):
        params = PricingParams(k=k, T=tau, r=problem.r, K=problem.K)
        out[i] = price_call(0.0, x, problem.coeffs, params)
    return out


@dataclass
class KFit:
    k_hat: float
    sse: float
    residuals: np.ndarray
    at_bound: bool
    n_evals: int

    def to_dict(self) -> dict:
        return {
            "k_hat": self.k_hat,
            "sse": self.sse,
            "residuals": self.residuals.tolist(),
            "at_bound": self.at_bound,
        }


def calibrate_k(problem: CalibrationProblem, scan_points: int = 400, xatol: float = 1e-10) -> KFit:
    """Minimize :func:`objective_k` over ``problem.k_bounds``.

    A log-spaced scan locates the best basin, then bounded Brent (golden
    section with parabolic steps) polishes the minimum inside it.
    """
    lo, hi = problem.k_bounds
    grid = np.geomspace(lo, hi, scan_points)
    values = np.array([objective_k(k, problem) for k in grid])
    if not np.all(np.isfinite(values)):
        raise NumericalError("calibration objective is not finite on the k scan")
    i = int(np.argmin(values))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, scan_points - 1)]
    res = optimize.minimize_scalar(
        objective_k, bounds=(a, b), args=(problem,), method="bounded", options={"xatol": xatol}
    )
    k_hat, sse = float(res.x), float(res.fun)
    if values[i] < sse:
        k_hat, sse = float(grid[i]), float(values[i])
    if not math.isfinite(sse):
        raise NumericalError("calibration objective is not finite at the optimum")
    at_bound = k_hat <= lo * (1 + 1e-6) or k_hat >= hi * (1 - 1e-6)
    resid = model_prices(k_hat, problem) - problem.observed
    return KFit(k_hat, sse, resid, at_bound, scan_points + int(res.nfev))


@dataclass
class ThreeHalvesFit:
    alpha: float
    beta: float
    sse: float
    residuals: np.ndarray

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "sse": self.sse,
                "residuals": self.residuals.tolist()}


def prices_32(alpha: float, beta: float, observations, k32: float, K: float, r: float,
              quad_points: int = DEFAULT_QUAD_POINTS) -> np.ndarray:
    out = np.empty(len(observations))
    for i, o in enumerate(observations):
        prm = ThreeHalvesParams(alpha, beta, k32, K, T=o.tau, t=0.0, r=r)
        out[i] = price_call_32(o.vix, prm, quad_points)
    return out


_STARTS = ((0.5, -2.0), (2.0, -5.0), (5.0, -15.0))


def calibrate_32(observations, k32: float, K: float, r: float = 0.0, starts=None,
                 quad_points: int = DEFAULT_QUAD_POINTS) -> ThreeHalvesFit:
    """Fit (alpha, beta) of the 3/2 model by Nelder-Mead on squared price errors.

    beta is searched as ``-exp(s)`` so it stays negative.
    """
    observed = np.array([o.call_price for o in observations])
    n_bad = 0
    n_calls = 0

    def sse(theta):
        nonlocal n_bad, n_calls
        n_calls += 1
        alpha, beta = theta[0], -math.exp(theta[1])
        try:
            resid = prices_32(alpha, beta, observations, k32, K, r, quad_points) - observed
        except (EmpVixError, OverflowError, ValueError):
            n_bad += 1
            return 1e10
        val = float(resid @ resid)
        if not math.isfinite(val):
            n_bad += 1
            return 1e10
        return val

    opts = {"xatol": 1e-9, "fatol": 1e-18, "maxfev": 1500}
    best = None
    for a0, b0 in starts or _STARTS:
        res = optimize.minimize(sse, [a0, math.log(-b0)], method="Nelder-Mead", options=opts)
        if best is None or res.fun < best.fun:
            best = res
    # restart from the winner to escape a collapsed simplex
    best = optimize.minimize(sse, best.x, method="Nelder-Mead", options=opts)
    if n_bad == n_calls or best.fun >= 1e10:
        raise NumericalError("3/2 prices were not finite for any candidate parameters")
    alpha, beta = float(best.x[0]), -math.exp(best.x[1])
    resid = prices_32(alpha, beta, observations, k32, K, r, quad_points) - observed
    return ThreeHalvesFit(alpha, beta, float(resid @ resid), resid)


def synthetic_observations(qmap: QuantileMap, k: float, K: float, r: float, vix, tau,
                           noise: float = 0.0, rng=None) -> list[OptionObservation]:
    """Call observations priced by the model itself, optionally with Gaussian noise."""
    vix = np.asarray(vix, dtype=float)
    tau = np.asarray(tau, dtype=float)
    x = h_inverse(qmap, vix)
    coeffs = project_call(qmap, K, DEFAULT_TERMS)
    prices = np.array([
        price_call(0.0, xi, coeffs, PricingParams(k=k, T=ti, r=r, K=K)) for xi, ti in zip(x, tau)
    ])
    if noise:
        prices = prices + np.random.default_rng(rng).normal(0.0, noise, prices.size)
    t = tau.max() - tau
    if np.any(prices < 0):
        raise CalibrationError("noise drove a synthetic price negative; lower the noise level")
    return [OptionObservation(float(a), float(v), float(c), float(b)) for a, v, c, b in zip(t, vix, prices, tau)]
