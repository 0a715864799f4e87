"""Legendre-series prices of VIX futures, calls and puts.

A payoff g(x) on the factor space is projected onto the Legendre basis,
``b_n = (2n+1)/2 <g, P_n>``, and each mode decays at its own rate, so

    price(t, x) = disc * sum_n b_n exp(-k n(n+1)(T-t)/2) P_n(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffusion import eigenvalues, simulate_terminal
from .empirical import QuantileMap, h_inverse
from .exceptions import DomainError, NumericalError
from .legendre import gauss_rule, inner_products, legendre_series

DEFAULT_TERMS = 31
CLIP_TOL = 1e-8
INSTRUMENTS = ("futures", "call", "put")


@dataclass(frozen=True)
class PricingParams:
    """Model speed ``k`` (1/yr), rate ``r`` (1/yr), maturity ``T`` (yr), strike ``K``."""

    k: float
    T: float
    r: float = 0.0
    K: float | None = None

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError(f"speed k must be positive, got {self.k}")
        if not self.T > 0:
            raise DomainError(f"maturity T must be positive, got {self.T}")
        if self.K is not None and not self.K > 0:
            raise DomainError(f"strike K must be positive, got {self.K}")


@dataclass(frozen=True, eq=False)
class SpectralCoeffs:
    """Payoff projection coefficients b_0..b_{N-1} and the payoff they came from."""

    b: np.ndarray
    payoff: str
    K: float | None = None

    def __post_init__(self):
        if self.payoff not in INSTRUMENTS:
            raise ValueError(f"unknown payoff {self.payoff!r}")
        b = np.asarray(self.b, dtype=float)
        if not np.all(np.isfinite(b)):
            raise NumericalError("spectral coefficients are not finite")
        b.setflags(write=False)
        object.__setattr__(self, "b", b)

    @property
    def n_terms(self) -> int:
        return self.b.size


def payoff_kink(qmap: QuantileMap, K: float) -> float | None:
    """Factor value x* with h~(x*) = K, or None when K is outside (h_min, h_max)."""
    if not qmap.h_min < K < qmap.h_max:
        return None
    return h_inverse(qmap, K, xtol=5e-13)


def _rule_for(qmap: QuantileMap, n_terms: int):
    # exact for h~ * P_n on each smooth piece
    return gauss_rule(max(64, (qmap.degree + n_terms) // 2 + 1))


def project_futures(qmap: QuantileMap, n_terms: int = DEFAULT_TERMS) -> SpectralCoeffs:
    """Coefficients of h~ itself. Exact for any truncation since h~ is stored in the Legendre basis."""
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    b = np.zeros(n_terms)
    m = min(n_terms, qmap.legendre_coeffs.size)
    b[:m] = qmap.legendre_coeffs[:m]
    return SpectralCoeffs(b, "futures")


def _scale(n_terms: int) -> np.ndarray:
    return (2 * np.arange(n_terms) + 1) / 2.0


def project_call(qmap: QuantileMap, K: float, n_terms: int = DEFAULT_TERMS) -> SpectralCoeffs:
    """Coefficients of (h~ - K)^+, integrated piecewise on either side of the kink."""
    if K <= qmap.h_min:
        b = project_futures(qmap, n_terms).b.copy()
        b[0] -= K
        return SpectralCoeffs(b, "call", K)
    xk = payoff_kink(qmap, K)
    if xk is None:
        return SpectralCoeffs(np.zeros(n_terms), "call", K)
    ip = inner_products(
        lambda x: np.maximum(qmap.tilde(x) - K, 0.0), n_terms - 1, _rule_for(qmap, n_terms), kinks=[xk]
    )
    return SpectralCoeffs(_scale(n_terms) * ip, "call", K)


def project_put(qmap: QuantileMap, K: float, n_terms: int = DEFAULT_TERMS) -> SpectralCoeffs:
    """Coefficients of (K - h~)^+."""
    if K >= qmap.h_max:
        b = -project_futures(qmap, n_terms).b
        b[0] += K
        return SpectralCoeffs(b, "put", K)
    xk = payoff_kink(qmap, K)
    if xk is None:
        return SpectralCoeffs(np.zeros(n_terms), "put", K)
    ip = inner_products(
        lambda x: np.maximum(K - qmap.tilde(x), 0.0), n_terms - 1, _rule_for(qmap, n_terms), kinks=[xk]
    )
    return SpectralCoeffs(_scale(n_terms) * ip, "put", K)


def project(qmap: QuantileMap, instrument: str, K: float | None = None, n_terms: int = DEFAULT_TERMS) -> SpectralCoeffs:
    if instrument == "futures":
        return project_futures(qmap, n_terms)
    if K is None:
        raise DomainError(f"{instrument} needs a strike")
    if instrument == "call":
        return project_call(qmap, K, n_terms)
    if instrument == "put":
        return project_put(qmap, K, n_terms)
    raise ValueError(f"unknown instrument {instrument!r}")


def _series(t, x, coeffs: SpectralCoeffs, params: PricingParams):
    tau = params.T - t
    if tau < 0:
        raise DomainError(f"valuation time t={t} is after maturity T={params.T}")
    decay = np.exp(-eigenvalues(params.k, coeffs.n_terms) * tau)
    return legendre_series(coeffs.b * decay, x), tau


def _check_payoff(coeffs: SpectralCoeffs, expected: str):
    if coeffs.payoff != expected:
        raise ValueError(f"expected {expected} coefficients, got {coeffs.payoff}")


def _clip(value):
    v = np.asarray(value)
    if np.any(v < -CLIP_TOL):
        raise NumericalError(
            f"option price {float(np.min(v)):.3e} is negative beyond truncation tolerance; "
            "increase the number of terms"
        )
    out = np.maximum(v, 0.0)
    return out if out.ndim else float(out)


def price_futures(t, x, coeffs: SpectralCoeffs, params: PricingParams):
    """F(t, x) = sum_n b_n exp(-k n(n+1)(T-t)/2) P_n(x)."""
    _check_payoff(coeffs, "futures")
    value, _ = _series(t, x, coeffs, params)
    return value


def price_call(t, x, coeffs: SpectralCoeffs, params: PricingParams):
    """Discounted call series; tiny negative truncation residue is reported as 0."""
    _check_payoff(coeffs, "call")
    value, tau = _series(t, x, coeffs, params)
    return _clip(math.exp(-params.r * tau) * value)


def price_put(t, x, coeffs: SpectralCoeffs, params: PricingParams):
    _check_payoff(coeffs, "put")
    value, tau = _series(t, x, coeffs, params)
    return _clip(math.exp(-params.r * tau) * value)


def price(t, x, coeffs: SpectralCoeffs, params: PricingParams):
    fn = {"futures": price_futures, "call": price_call, "put": price_put}[coeffs.payoff]
    return fn(t, x, coeffs, params)


def price_from_vix(qmap: QuantileMap, vix, t: float, params: PricingParams,
                   instrument: str = "futures", n_terms: int = DEFAULT_TERMS):
    """Price at observed VIX level(s); the factor value comes from inverting h."""
    x = h_inverse(qmap, vix)
    coeffs = project(qmap, instrument, params.K, n_terms)
    return price(t, x, coeffs, params)


@dataclass(frozen=True, eq=False)
class TruncationTable:
    vix_levels: np.ndarray
    term_counts: tuple[int, ...]
    futures: np.ndarray
    call: np.ndarray

    def rows(self, decimals: int = 4):
        """CSV-ready rows: instrument, vix, then one column per term count."""
        yield ["instrument", "vix"] + [f"{n}_terms" for n in self.term_counts]
        for name, mat in (("futures", self.futures), ("call", self.call)):
            for v, row in zip(self.vix_levels, mat):
                yield [name, f"{v:g}"] + [f"{p:.{decimals}f}" for p in row]


def truncation_report(qmap: QuantileMap, vix_levels, term_counts, params: PricingParams, t: float) -> TruncationTable:
    """Futures and call prices for each VIX level and truncation length."""
    if params.K is None:
        raise DomainError("truncation report needs a strike for the call table")
    vix = np.asarray(vix_levels, dtype=float)
    x = h_inverse(qmap, vix)
    counts = tuple(int(n) for n in term_counts)
    fut = np.empty((vix.size, len(counts)))
    call = np.empty_like(fut)
    for j, n in enumerate(counts):
        fut[:, j] = price_futures(t, x, project_futures(qmap, n), params)
        call[:, j] = price_call(t, x, project_call(qmap, params.K, n), params)
    return TruncationTable(vix, counts, fut, call)


def monte_carlo_price(qmap: QuantileMap, x0: float, t: float, params: PricingParams,
                      instrument: str = "futures", n_paths: int = 100_000, dt: float = 1e-4, seed=None):
    """Euler Monte Carlo estimate and standard error of a price at factor value ``x0``."""
    tau = params.T - t
    xt = simulate_terminal(x0, params.k, tau, n_paths, dt, rng=seed)
    vix = qmap.tilde(xt)
    if instrument == "futures":
        payoff = vix
    elif instrument == "call":
        payoff = math.exp(-params.r * tau) * np.maximum(vix - params.K, 0.0)
    elif instrument == "put":
        payoff = math.exp(-params.r * tau) * np.maximum(params.K - vix, 0.0)
    else:
        raise ValueError(f"unknown instrument {instrument!r}")
    return float(payoff.mean()), float(payoff.std(ddof=1) / math.sqrt(n_paths))
