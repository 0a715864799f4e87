"""Empirical CDF of VIX levels and the fitted quantile polynomial h.

The factor process lives on [-1, 1] with a uniform stationary law, so the
VIX level is modelled as ``h((x + 1) / 2)`` where ``h`` is the quantile
function of the historical distribution. ``h`` is fitted as a polynomial and
stored by its Legendre coefficients in the factor variable ``x = 2u - 1``;
the monomial coefficients in ``u`` are derived on demand for export.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import DataError, DomainError, FitError
from .legendre import (
    legendre_series,
    legendre_vander,
    monomial_to_shifted_legendre,
    shifted_legendre_to_monomial,
)

FIT_GRID_SIZE = 2001
MONOTONE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class StepCdf:
    """Right-continuous empirical CDF of a sample."""

    sorted_levels: np.ndarray

    @property
    def n(self) -> int:
        return self.sorted_levels.size

    def __call__(self, c):
        c = np.asarray(c, dtype=float)
        out = np.searchsorted(self.sorted_levels, c, side="right") / self.n
        return out if out.ndim else float(out)


def ecdf(levels) -> StepCdf:
    """Empirical CDF F(c) = #{levels <= c} / n.

    ``levels`` may be a :class:`~empvix.data.MarketSeries` or any 1-D array.
    """
    arr = np.asarray(getattr(levels, "levels", levels), dtype=float).ravel()
    if arr.size == 0:
        raise DataError("cannot build an empirical CDF from an empty sample")
    if not np.all(np.isfinite(arr)):
        raise DataError("sample contains non-finite values")
    s = np.sort(arr)
    s.setflags(write=False)
    return StepCdf(s)


def quantile(cdf: StepCdf, u):
    """Generalized inverse: smallest sample level c with F(c) >= u."""
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr < 0) | (u_arr > 1)) or np.any(np.isnan(u_arr)):
        raise DomainError("quantile level must lie in [0, 1]")
    # F takes the values j/n on the sorted sample; compare against the same floats
    steps = np.arange(1, cdf.n + 1) / cdf.n
    idx = np.minimum(np.searchsorted(steps, u_arr, side="left"), cdf.n - 1)
    out = cdf.sorted_levels[idx]
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class QuantileMap:
    """Polynomial quantile map h: [0, 1] -> VIX levels.

    Parameters
    ----------
    legendre_coeffs : array_like
        Coefficients a_n of ``h(u) = sum_n a_n P_n(2u - 1)``.
    source_hash : str, optional
        Digest of the sample the map was fitted to.
    """

    legendre_coeffs: np.ndarray
    source_hash: str = ""
    h_min: float = field(init=False)
    h_max: float = field(init=False)

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.legendre_coeffs, dtype=float)).copy()
        if a.ndim != 1 or not np.all(np.isfinite(a)):
            raise ValueError("quantile map coefficients must be a finite 1-D vector")
        a.setflags(write=False)
        object.__setattr__(self, "legendre_coeffs", a)
        object.__setattr__(self, "h_min", float(legendre_series(a, -1.0)))
        object.__setattr__(self, "h_max", float(legendre_series(a, 1.0)))

    @classmethod
    def from_monomial(cls, coeffs, source_hash: str = "") -> "QuantileMap":
        """Build from monomial coefficients of h in u (lowest order first)."""
        return cls(monomial_to_shifted_legendre(coeffs).coeffs, source_hash)

    @property
    def degree(self) -> int:
        return self.legendre_coeffs.size - 1

    @property
    def coeffs(self) -> np.ndarray:
        """Monomial coefficients of h in u, lowest order first."""
        return shifted_legendre_to_monomial(self.legendre_coeffs)

    def __call__(self, u):
        return h_eval(self, u)

    def tilde(self, x):
        """h~(x) = h((x + 1) / 2) for factor values x in [-1, 1]."""
        return legendre_series(self.legendre_coeffs, x)

    def monotonicity_violation(self, grid_size: int = FIT_GRID_SIZE) -> float:
        """Largest decrease of h between adjacent points of a uniform grid."""
        vals = self.tilde(np.linspace(-1.0, 1.0, grid_size))
        if vals.size < 2:
            return 0.0
        return float(max(0.0, -np.min(np.diff(vals))))

    def validate(self, tol: float = MONOTONE_TOL, grid_size: int = FIT_GRID_SIZE) -> None:
        """Raise :class:`FitError` unless h is positive and nondecreasing within ``tol``."""
        vals = self.tilde(np.linspace(-1.0, 1.0, grid_size))
        span = self.h_max - self.h_min
        if span < 0:
            raise FitError(f"fitted h decreases overall: h(0)={self.h_min:.6g} > h(1)={self.h_max:.6g}")
        worst = self.monotonicity_violation(grid_size)
        if worst > tol * span:
            u_at = np.argmin(np.diff(vals)) / (grid_size - 1)
            raise FitError(
                f"fitted h is not monotone: worst grid decrease {worst:.3e} near u={u_at:.4f} "
                f"exceeds {tol:g} * (h_max - h_min); try a lower degree"
            )
        if np.min(vals) <= 0:
            raise FitError(f"fitted h is not positive: min {np.min(vals):.6g}")

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "coeffs": self.coeffs.tolist(),
            "legendre_coeffs": self.legendre_coeffs.tolist(),
            "h_min": self.h_min,
            "h_max": self.h_max,
            "source_hash": self.source_hash,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuantileMap":
        if "legendre_coeffs" in d:
            out = cls(np.asarray(d["legendre_coeffs"], dtype=float), d.get("source_hash", ""))
        elif "coeffs" in d:
            out = cls.from_monomial(d["coeffs"], d.get("source_hash", ""))
        else:
            raise DataError("model file has neither 'legendre_coeffs' nor 'coeffs'")
        if "degree" in d and int(d["degree"]) != out.degree:
            raise DataError(f"model file degree {d['degree']} does not match {out.degree} coefficients")
        return out


def save_quantile_map(qmap: QuantileMap, path) -> None:
    Path(path).write_text(json.dumps(qmap.to_dict(), indent=2) + "\n")


def load_quantile_map(path, validate: bool = True, tol: float = MONOTONE_TOL) -> QuantileMap:
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    qmap = QuantileMap.from_dict(d)
    if validate:
        qmap.validate(tol)
    return qmap


def sample_hash(levels) -> str:
    arr = np.ascontiguousarray(np.sort(np.asarray(levels, dtype=float)))
    return hashlib.sha256(arr.tobytes()).hexdigest()[:16]


def fit_quantile_polynomial(
    cdf: StepCdf,
    degree: int,
    grid_size: int = FIT_GRID_SIZE,
    monotone_tol: float = MONOTONE_TOL,
) -> QuantileMap:
    """Least-squares polynomial fit of u -> quantile(cdf, u) on a uniform grid.

    The fit is solved by SVD in the Legendre basis of ``2u - 1``, which keeps
    degree-30 fits well conditioned.

    Raises
    ------
    FitError
        If the design matrix is rank deficient, or the fitted h decreases by
        more than ``monotone_tol * (h_max - h_min)`` between adjacent grid
        points, or is not positive.
    """
    if degree < 0:
        raise DomainError(f"degree must be >= 0, got {degree}")
    if cdf.n < degree + 1:
        raise FitError(f"need at least {degree + 1} observations for degree {degree}, got {cdf.n}")
    grid = np.linspace(0.0, 1.0, grid_size)
    target = quantile(cdf, grid)
    design = legendre_vander(degree, 2.0 * grid - 1.0)
    coef, _, rank, sv = np.linalg.lstsq(design, target, rcond=None)
    if rank < degree + 1:
        raise FitError(f"least-squares system is rank deficient at degree {degree}; use a lower degree")
    qmap = QuantileMap(coef, sample_hash(cdf.sorted_levels))
    qmap.validate(monotone_tol, grid_size)
    return qmap


def h_eval(qmap: QuantileMap, u):
    """Value of h at probability level(s) ``u`` in [0, 1]."""
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr < 0) | (u_arr > 1)) or np.any(np.isnan(u_arr)):
        raise DomainError("h is only defined on [0, 1]")
    return qmap.tilde(2.0 * u_arr - 1.0)


def h_inverse(qmap: QuantileMap, vix, xtol: float = 1e-10):
    """Factor value x in [-1, 1] with h((x + 1) / 2) = vix.

    Bisection on u in [0, 1] down to a bracket of width ``xtol``, finished by
    linear interpolation inside the final bracket. Levels outside
    ``[h_min, h_max]`` raise :class:`DomainError`.
    """
    v = np.asarray(vix, dtype=float)
    if np.any(np.isnan(v)) or np.any(v < qmap.h_min) or np.any(v > qmap.h_max):
        raise DomainError(
            f"VIX level outside the fitted range [{qmap.h_min:.6g}, {qmap.h_max:.6g}]"
        )
    lo = np.zeros_like(v)
    hi = np.ones_like(v)
    f_lo = np.full_like(v, qmap.h_min) - v
    f_hi = np.full_like(v, qmap.h_max) - v
    while np.max(hi - lo) > xtol:
        mid = 0.5 * (lo + hi)
        f_mid = qmap.tilde(2.0 * mid - 1.0) - v
        below = f_mid < 0
        lo = np.where(below, mid, lo)
        f_lo = np.where(below, f_mid, f_lo)
        hi = np.where(below, hi, mid)
        f_hi = np.where(below, f_hi, f_mid)
    denom = f_hi - f_lo
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(denom > 0, -f_lo / denom, 0.5)
    u = lo + np.clip(w, 0.0, 1.0) * (hi - lo)
    x = 2.0 * u - 1.0
    return x if x.ndim else float(x)
