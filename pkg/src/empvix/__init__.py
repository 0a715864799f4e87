"""Empirical Markov model for the VIX index with Legendre-spectral pricing."""

from .calibration import CalibrationProblem, calibrate_32, calibrate_k, objective_k
from .data import MarketSeries, OptionObservation, load_observations, load_vix_csv, weekly_average
from .diffusion import DiffusionParams, simulate_path, stationarity_test, transition_density
from .empirical import QuantileMap, ecdf, fit_quantile_polynomial, h_eval, h_inverse, quantile
from .estimators import EmpiricalQuantileMap, SpectralVIXPricer, ThreeHalvesPricer
from .pricing import (
    PricingParams,
    SpectralCoeffs,
    price_call,
    price_futures,
    price_put,
    project_call,
    project_futures,
    project_put,
    truncation_report,
)
from .three_halves import ThreeHalvesParams, bessel_i, price_call_32

__version__ = "0.1.0"

__all__ = [
    "CalibrationProblem", "DiffusionParams", "EmpiricalQuantileMap", "MarketSeries",
    "OptionObservation", "PricingParams", "QuantileMap", "SpectralCoeffs", "SpectralVIXPricer",
    "ThreeHalvesParams", "ThreeHalvesPricer", "bessel_i", "calibrate_32", "calibrate_k",
    "ecdf", "fit_quantile_polynomial", "h_eval", "h_inverse", "load_observations",
    "load_vix_csv", "objective_k", "price_call", "price_call_32", "price_futures", "price_put",
    "project_call", "project_futures", "project_put", "quantile", "simulate_path",
    "stationarity_test", "transition_density", "truncation_report", "weekly_average",
]
