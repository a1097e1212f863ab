import math

import numpy as np
import pytest

import pmm2arima as pm


def gamma_series(n=600, seed=3, phi=0.7):
    eps = pm.sample("gamma", n - 1 + 200, seed)
    return pm.simulate(eps, phi=[phi], d=1, burn_in=200)


def test_sample_is_standardized_and_reproducible():
    a = pm.sample("chisq", 200_000, 7)
    assert isinstance(a, np.ndarray)
    assert abs(a.mean()) < 0.01
    assert abs(a.var() - 1.0) < 0.02
    assert np.array_equal(a, pm.sample("chisq", 200_000, 7))
    m = pm.theoretical_cumulants("gamma", 2.0)
    assert m["gamma3"] == pytest.approx(math.sqrt(2.0))
    assert m["gamma4"] == pytest.approx(3.0)


def test_difference_and_simulate():
    assert list(pm.difference([1.0, 3.0, 6.0, 10.0], 1)) == [2.0, 3.0, 4.0]
    y = gamma_series()
    assert y.shape == (600,)
    with pytest.raises(pm.AdmissibilityError):
        pm.simulate(np.zeros(300), phi=[1.2])
    assert pm.is_admissible([0.5, -0.25])
    phi, _ = pm.project_to_admissible([1.2], margin=0.01)
    assert phi[0] == pytest.approx(1 / 1.01)


def test_fit_on_skewed_series():
    y = gamma_series(n=1500)
    f = pm.fit(y, 1, 1, 0)
    assert f["converged"]
    assert not f["fallback_used"]
    assert abs(f["coef"][0] - 0.7) < 0.06
    assert f["se"][0] > 0
    assert f["moments"]["gamma3"] > 1.0
    assert len(f["residuals"]) == len(y) - 2
    assert f["baseline"]["converged"]


def test_fit_fallback_threshold():
    y = gamma_series()
    f = pm.fit(y, 1, 1, 0, symmetry_threshold=50.0)
    assert f["fallback_used"]
    assert np.array_equal(f["coef"], f["baseline"]["coef"])


def test_efficiency_and_diagnostics():
    assert pm.re_theoretical(0.0, 3.0) == 1.0
    assert 1.64 <= pm.re_theoretical(1.41, 3.0) <= 1.67
    assert pm.re_matrix(np.diag([4.0, 1.0]), np.eye(2))["re_trace"] == pytest.approx(2.5)
    with pytest.raises(pm.DomainError):
        pm.re_theoretical(3.0, 0.0)
    jb = pm.jarque_bera(pm.sample("gamma", 10_000, 1))
    assert jb["p_value"] < 1e-3
    lb = pm.ljung_box(pm.sample("gaussian", 2_000, 2), 10, 0)
    assert 0.0 <= lb["p_value"] <= 1.0
    assert pm.decide(1.41, 3.0, 500)["recommendation"] == "use_pmm2"
    assert pm.select_method(gamma_series(), 1, 1, 0)["recommendation"] == "use_pmm2"


def test_validate_and_errors():
    y = gamma_series(n=500)
    r = pm.validate(y, 1, 1, 0, window=400, refit_every=20)
    assert r["n_forecasts"] == 100
    assert len(r["pmm2_errors"]) == 100
    with pytest.raises(pm.LengthError):
        pm.validate(y, 1, 1, 0, window=600)
    with pytest.raises(pm.Pmm2Error):
        pm.fit(y[:10], 1, 1, 0)


def test_monte_carlo_round_trip():
    cfg = {
        "sample_sizes": [100],
        "models": [{"order": [1, 1, 0], "phi": [0.7]}],
        "innovations": ["gamma"],
        "replications": 30,
        "bootstrap_resamples": 50,
        "root_seed": 11,
    }
    csv1, summary = pm.run_monte_carlo(cfg, threads=1)
    csv2, _ = pm.run_monte_carlo(cfg, threads=2)
    assert csv1 == csv2
    assert csv1.startswith("model,n,innovation")
    assert summary["config"]["replications"] == 30
    with pytest.raises(pm.ParameterError):
        pm.run_monte_carlo(dict(cfg, replications=3))
