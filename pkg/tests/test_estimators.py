import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from empvix import MarketSeries, load_vix_csv
from empvix.calibration import synthetic_observations
from empvix.estimators import EmpiricalQuantileMap, SpectralVIXPricer, ThreeHalvesPricer
from empvix.exceptions import DomainError

VIX = np.array([0.24406, 0.23886, 0.21125, 0.20716, 0.22144])
TAU = np.array([0.364, 0.345, 0.326, 0.307, 0.288])


@pytest.fixture(scope="module")
def fitted_map(levels):
    return EmpiricalQuantileMap(degree=30).fit(levels)


def test_params_round_trip():
    est = EmpiricalQuantileMap(degree=12, monotone_tol=1e-4)
    assert est.get_params() == {"degree": 12, "grid_size": 2001, "monotone_tol": 1e-4}
    est.set_params(degree=7)
    assert clone(est).degree == 7
    assert "k_bounds" in SpectralVIXPricer().get_params()
    assert ThreeHalvesPricer(alpha=0.9, beta=-3.82).get_params()["beta"] == -3.82


def test_transform_before_fit():
    with pytest.raises(NotFittedError):
        EmpiricalQuantileMap().transform([0.2])


def test_map_transform_round_trip(fitted_map):
    v = np.linspace(0.1, 0.7, 13)
    x = fitted_map.transform(v)
    assert x.shape == (13, 1)
    np.testing.assert_allclose(fitted_map.inverse_transform(x).ravel(), v, atol=1e-9)
    assert fitted_map.map_.degree == 30 and fitted_map.n_features_in_ == 1


def test_map_accepts_column_and_series(tmp_path):
    lin = 0.1 + 0.3 * (np.arange(28) + 0.5) / 28
    a = EmpiricalQuantileMap(degree=3).fit(lin.reshape(-1, 1))
    p = tmp_path / "v.csv"
    p.write_text("".join(f"2000-01-{i + 1:02d},{float(v)!r}\n" for i, v in enumerate(lin)))
    series = load_vix_csv(p)
    assert isinstance(series, MarketSeries)
    b = EmpiricalQuantileMap(degree=3).fit(series)
    np.testing.assert_array_equal(a.map_.legendre_coeffs, b.map_.legendre_coeffs)
    with pytest.raises(ValueError):
        EmpiricalQuantileMap().fit(np.ones((5, 2)))


def test_map_in_pipeline(levels):
    pipe = make_pipeline(EmpiricalQuantileMap(degree=30)).fit(levels)
    out = pipe.transform(np.linspace(0.1, 0.8, 50))
    assert out.shape == (50, 1)
    assert np.all(np.diff(out.ravel()) > 0)


def test_spectral_pricer_fit_and_predict(fitted_map):
    obs = synthetic_observations(fitted_map.map_, 1.7, 0.2, 0.0, VIX, TAU)
    X = np.column_stack([VIX, TAU])
    y = np.array([o.call_price for o in obs])
    est = SpectralVIXPricer(quantile_map=fitted_map, k=0.5, strike=0.2).fit(X, y)
    assert est.k_ == pytest.approx(1.7, abs=1e-4)
    np.testing.assert_allclose(est.predict(X), y, atol=1e-10)
    assert est.score(X, y) > 0.999999


def test_spectral_pricer_unfitted_uses_k(fitted_map):
    X = np.column_stack([VIX, TAU])
    a = SpectralVIXPricer(quantile_map=fitted_map.map_, k=2.0, instrument="futures").predict(X)
    b = SpectralVIXPricer(quantile_map=fitted_map.map_, k=9.0, instrument="futures").predict(X)
    assert not np.allclose(a, b)
    with pytest.raises(DomainError):
        SpectralVIXPricer(quantile_map=fitted_map.map_).predict([[2.0, 0.1]])


def test_spectral_pricer_rejects_bad_config(fitted_map):
    X = np.column_stack([VIX, TAU])
    with pytest.raises(ValueError):
        SpectralVIXPricer(quantile_map=fitted_map, instrument="put").fit(X, np.zeros(5))
    with pytest.raises(TypeError):
        SpectralVIXPricer(quantile_map="h.json").predict(X)
    with pytest.raises(ValueError):
        SpectralVIXPricer(quantile_map=fitted_map).fit(VIX.reshape(-1, 1), np.zeros(5))


def test_three_halves_pricer():
    X = np.array([[0.3, 0.5]])
    with pytest.raises(ValueError):
        ThreeHalvesPricer().predict(X)
    price = ThreeHalvesPricer(alpha=1.0, beta=-3.0).predict(X)
    est = ThreeHalvesPricer().fit(X, price)
    assert est.sse_ < 1e-12
    np.testing.assert_allclose(est.predict(X), price, atol=1e-6)
