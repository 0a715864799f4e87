"""3/2-model benchmark: dV = (alpha V + beta V^2) dt + k V^{3/2} dW.

Y = 1/V is a square-root process with speed ``alpha``, so the call value is
the integral of (1/u - K) against the noncentral chi-square density of
Y_T over (0, 1/K].
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .exceptions import DomainError, NumericalError
from .legendre import gauss_rule

SERIES_SWITCH = 30.0
DEFAULT_QUAD_POINTS = 256


class BesselOverflowWarning(RuntimeWarning):
    pass


def _log_series(nu: float, z: np.ndarray) -> np.ndarray:
    # log of sum_m (z/2)^(2m+nu) / (m! Gamma(m+nu+1)); every term is positive
    out = np.empty_like(z)
    zero = z == 0
    out[zero] = 0.0 if nu == 0 else -np.inf
    zz = z[~zero]
    if zz.size == 0:
        return out
    log_half = np.log(0.5 * zz)
    log_t = nu * log_half - gammaln(nu + 1.0)
    acc = log_t.copy()
    m = 0
    while True:
        log_t = log_t + 2.0 * log_half - math.log(m + 1.0) - math.log(m + nu + 1.0)
        m += 1
        acc = np.logaddexp(acc, log_t)
        # terms peak near m ~ z/2 and then decay geometrically
        if m > 0.5 * zz.max() + 2 and np.all(log_t - acc < math.log(1e-17)):
            break
    out[~zero] = acc
    return out


def _log_asymptotic(nu: float, z: np.ndarray) -> np.ndarray:
    # I_nu(z) ~ e^z / sqrt(2 pi z) * sum_k (-1)^k a_k(nu) / z^k
    mu = 4.0 * nu * nu
    total = np.ones_like(z)
    term = np.ones_like(z)
    prev = np.full_like(z, np.inf)
    for k in range(1, 60):
        term = -term * (mu - (2 * k - 1) ** 2) / (8.0 * k * z)
        mag = np.abs(term)
        active = mag < prev
        if not np.any(active):
            break
        total = np.where(active, total + term, total)
        prev = np.where(active, mag, 0.0)
        if np.all(mag < 1e-17 * np.abs(total)):
            break
    return z - 0.5 * np.log(2.0 * np.pi * z) + np.log(total)


def log_bessel_i(nu: float, z):
    """log I_nu(z) for nu >= 0, z >= 0, without overflow."""
    if nu < 0:
        raise DomainError(f"order must be >= 0, got {nu}")
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0) or np.any(np.isnan(z_arr)):
        raise DomainError("argument must be >= 0")
    flat = np.atleast_1d(z_arr).ravel()
    out = np.empty_like(flat)
    # the asymptotic series is only accurate once z dominates nu^2
    asym = (flat > SERIES_SWITCH) & (flat > 2.0 * nu * nu)
    if np.any(asym):
        out[asym] = _log_asymptotic(nu, flat[asym])
    if np.any(~asym):
        out[~asym] = _log_series(nu, flat[~asym])
    out = out.reshape(z_arr.shape)
    return out if out.ndim else float(out)


def bessel_i(nu: float, z):
    """Modified Bessel function of the first kind I_nu(z).

    Power series for moderate arguments and the large-argument asymptotic
    expansion beyond z = 30. Values too large for a double come back as
    ``inf`` with a :class:`BesselOverflowWarning`.
    """
    logv = np.asarray(log_bessel_i(nu, z))
    with np.errstate(over="ignore"):
        out = np.exp(logv)
    if np.any(np.isinf(out)):
        warnings.warn(f"I_{nu} overflows double precision", BesselOverflowWarning, stacklevel=2)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ThreeHalvesParams:
    """Parameters of the 3/2 call: drift ``alpha``, ``beta`` < 0, vol-of-vol ``k32``."""

    alpha: float
    beta: float
    k32: float
    K: float
    T: float
    t: float = 0.0
    r: float = 0.0

    def __post_init__(self):
        if not self.beta < 0:
            raise DomainError(f"beta must be negative, got {self.beta}")
        if not self.k32 > 0:
            raise DomainError(f"k32 must be positive, got {self.k32}")
        if not self.K > 0:
            raise DomainError(f"strike must be positive, got {self.K}")
        if not 0 <= self.t < self.T:
            raise DomainError(f"need 0 <= t < T, got t={self.t}, T={self.T}")

    @property
    def tau(self) -> float:
        return self.T - self.t

    @property
    def nu(self) -> float:
        return 1.0 - 2.0 * self.beta / self.k32**2

    @property
    def p(self) -> float:
        return -math.expm1(-self.alpha * self.tau)


def _chi_scale(prm: ThreeHalvesParams) -> float:
    # 2 alpha / (k^2 p); tends to 2 / (k^2 tau) as alpha -> 0
    a, tau = prm.alpha, prm.tau
    ratio = tau if abs(a * tau) < 1e-12 else -math.expm1(-a * tau) / a
    return 2.0 / (prm.k32**2 * ratio)


def _nodes(prm: ThreeHalvesParams, quad_points: int):
    rule = gauss_rule(quad_points)
    s_lo = math.log(1e-12 / prm.K)
    s_hi = math.log(1.0 / prm.K)
    s, w = rule.mapped(s_lo, s_hi)
    u = np.exp(s)
    return u, w * u  # du = u ds


def _log_integrand(V: float, prm: ThreeHalvesParams, u: np.ndarray) -> np.ndarray:
    c = _chi_scale(prm)
    nu = prm.nu
    y0 = math.exp(-prm.alpha * prm.tau) / V  # e^{-alpha tau} Y_t
    z = 2.0 * c * np.sqrt(y0 * u)
    payoff = 1.0 / u - prm.K
    with np.errstate(divide="ignore"):
        log_pay = np.log(np.maximum(payoff, 0.0))
    return (
        -prm.r * prm.tau
        + math.log(c)
        - c * (y0 + u)
        + 0.5 * nu * (np.log(u) - math.log(y0))
        + log_bessel_i(nu, z)
        + log_pay
    )


def _direct_integrand(V: float, prm: ThreeHalvesParams, u: np.ndarray) -> np.ndarray:
    c = _chi_scale(prm)
    a, b, k = prm.alpha, prm.beta, prm.k32
    tau = prm.tau
    expo = 0.5 - b / k**2
    with np.errstate(over="ignore", invalid="ignore"):
        pref = (
            c * math.exp(-prm.r * tau)
            * math.exp(-c * math.exp(-a * tau) / V)
            * V**expo
            * math.exp(a * tau * expo)
        )
        z = 2.0 * c * np.sqrt(u * math.exp(-a * tau) / V)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BesselOverflowWarning)
            bes = bessel_i(prm.nu, z)
        return pref * u**expo * (1.0 / u - prm.K) * np.exp(-c * u) * bes


def price_call_32(V: float, prm: ThreeHalvesParams, quad_points: int = DEFAULT_QUAD_POINTS,
                  log_space: bool | None = None) -> float:
    """Call on VIX under 3/2 dynamics, by Gauss quadrature in s = log u.

    ``log_space=None`` picks the log-scaled integrand whenever the Bessel
    argument exceeds 30 and the direct product otherwise.
    """
    if not V > 0:
        raise DomainError(f"VIX level must be positive, got {V}")
    if quad_points < 64:
        raise DomainError("use at least 64 quadrature points")
    u, w = _nodes(prm, quad_points)
    if log_space is None:
        z_max = 2.0 * _chi_scale(prm) * math.sqrt(math.exp(-prm.alpha * prm.tau) / (V * prm.K))
        log_space = z_max > SERIES_SWITCH
    if log_space:
        vals = np.exp(_log_integrand(V, prm, u))
    else:
        vals = _direct_integrand(V, prm, u)
        if not np.all(np.isfinite(vals)):
            raise NumericalError("3/2 integrand overflowed; evaluate with log_space=True")
    out = float(vals @ w)
    if not math.isfinite(out):
        raise NumericalError("3/2 call price is not finite")
    return out


def simulate_32(V0: float, prm: ThreeHalvesParams, n_paths: int, dt: float = 1e-4, rng=None,
                floor: float = 1e-8) -> np.ndarray:
    """Terminal V_T from full-truncation Euler paths of the 3/2 SDE."""
    rng = np.random.default_rng(rng)
    n_steps = max(1, int(round(prm.tau / dt)))
    h = prm.tau / n_steps
    sq = math.sqrt(h)
    v = np.full(n_paths, float(V0))
    a, b, k = prm.alpha, prm.beta, prm.k32
    for _ in range(n_steps):
        z = rng.standard_normal(n_paths)
        v = v + (a * v + b * v * v) * h + k * v * np.sqrt(v) * sq * z
        np.maximum(v, floor, out=v)
    return v


def monte_carlo_call_32(V0: float, prm: ThreeHalvesParams, n_paths: int = 200_000, dt: float = 1e-4, seed=None):
    """Monte Carlo estimate and standard error of the 3/2 call."""
    vt = simulate_32(V0, prm, n_paths, dt, seed)
    payoff = math.exp(-prm.r * prm.tau) * np.maximum(vt - prm.K, 0.0)
    return float(payoff.mean()), float(payoff.std(ddof=1) / math.sqrt(n_paths))
