import numpy as np
import pytest

from tsplit.dgp import (
    Ar1,
    DataPanel,
    IidGaussian,
    Ma,
    RegressionDgp,
    autocov_decay_profile,
    check_sube_tails,
    gen_ar1,
    gen_ma,
    gen_regression_panel,
    panel_from_spec,
)
from tsplit.errors import InsufficientDataError, ParameterError


def lag_autocorr(x, lag):
    x = np.asarray(x)
    xc = x - x.mean()
    return float(np.dot(xc[:-lag], xc[lag:]) / np.dot(xc, xc))


# ---------------------------------------------------------------------------
# gen_ar1
# ---------------------------------------------------------------------------

def test_ar1_rho_zero_is_uncorrelated():
    x = gen_ar1(100_000, rho=0.0, innovation_sd=1.0, seed=101)
    # theoretical lag-1 autocorrelation 0; 3-sigma MC band ~ 3/sqrt(n) < 0.01
    assert abs(lag_autocorr(x, 1)) < 0.01
    assert abs(x.mean()) < 0.013
    assert abs(x.var() - 1.0) < 0.02


def test_ar1_zero_noise_is_zero_vector():
    x = gen_ar1(5, rho=0.5, innovation_sd=0.0, seed=3)
    np.testing.assert_array_equal(x, np.zeros(5))


def test_ar1_lag1_autocorrelation_matches_rho():
    x = gen_ar1(100_000, rho=0.5, innovation_sd=1.0, seed=7)
    assert abs(lag_autocorr(x, 1) - 0.5) < 0.02


def test_ar1_stationary_start_variance():
    # marginal variance of X_1 should equal sd^2/(1-rho^2) from the start
    rho, sd = 0.6, 1.0
    firsts = np.array([gen_ar1(2, rho, sd, seed=s)[0] for s in range(4000)])
    target = sd**2 / (1 - rho**2)
    # variance-of-variance 3-sigma band: sd(S^2) ~ target * sqrt(2/m)
    assert abs(firsts.var() - target) < 3 * target * np.sqrt(2 / 4000)


def test_ar1_deterministic_given_seed():
    a = gen_ar1(50, 0.3, 2.0, seed=99)
    b = gen_ar1(50, 0.3, 2.0, seed=99)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, gen_ar1(50, 0.3, 2.0, seed=100))


@pytest.mark.parametrize("rho", [1.0, -1.0, 1.5])
def test_ar1_rejects_nonstationary_rho(rho):
    with pytest.raises(ParameterError):
        gen_ar1(10, rho, 1.0, seed=0)


def test_ar1_rejects_bad_args():
    with pytest.raises(ParameterError):
        gen_ar1(0, 0.5, 1.0, seed=0)
    with pytest.raises(ParameterError):
        gen_ar1(10, 0.5, -1.0, seed=0)
    with pytest.raises(ParameterError):
        gen_ar1(10, 0.5, 1.0, seed=-1)


# ---------------------------------------------------------------------------
# gen_ma
# ---------------------------------------------------------------------------

def test_ma_identity_filter_is_iid():
    x = gen_ma(100_000, [1.0], seed=11)
    assert abs(lag_autocorr(x, 1)) < 0.01
    assert abs(x.var() - 1.0) < 0.02


def test_ma_two_ones_lag1_autocorrelation():
    # MA(1) with theta=1: autocorrelation theta/(1+theta^2) = 0.5
    x = gen_ma(100_000, [1.0, 1.0], seed=12)
    assert abs(lag_autocorr(x, 1) - 0.5) < 0.02


def test_ma_pure_shift_keeps_iid_marginals():
    x = gen_ma(100_000, [0.0, 0.0, 1.0], seed=13)
    assert abs(x.var() - 1.0) < 0.02
    assert abs(lag_autocorr(x, 1)) < 0.02
    assert abs(lag_autocorr(x, 2)) < 0.02


def test_ma_rejects_empty_coefficients():
    with pytest.raises(ParameterError):
        gen_ma(10, [], seed=0)


def test_ma_deterministic_given_seed():
    np.testing.assert_array_equal(gen_ma(64, [1.0, -0.4], 5), gen_ma(64, [1.0, -0.4], 5))


# ---------------------------------------------------------------------------
# gen_regression_panel
# ---------------------------------------------------------------------------

def test_regression_panel_zero_beta_zero_noise():
    spec = RegressionDgp(beta_true=(0.0, 0.0), noise_sd=0.0)
    panel = gen_regression_panel(spec, n_half=25, seed=1)
    assert panel.values.shape == (50, 3)
    np.testing.assert_array_equal(panel.values[:, 0], np.zeros(50))


def test_regression_panel_ols_recovers_beta():
    # iid design + iid noise: OLS on 1e5 rows pins beta to ~3 sigma
    b = 0.7
    spec = RegressionDgp(beta_true=(b,), design_rho=0.0, noise_rho=0.0, noise_sd=1.0)
    panel = gen_regression_panel(spec, n_half=50_000, seed=21)
    y, x = panel.values[:, 0], panel.values[:, 1]
    beta_hat = np.dot(x, y) / np.dot(x, x)
    assert abs(beta_hat - b) < 0.02


def test_regression_panel_omitted_variable_slope():
    # population projection of Y on X1 alone: E[X1 Y]/E[X1^2] = b1 + 0.5 b2
    b1, b2 = 1.0, -0.8
    spec = RegressionDgp(beta_true=(b1, b2), cross_corr=0.5)
    panel = gen_regression_panel(spec, n_half=50_000, seed=22)
    y, x1 = panel.values[:, 0], panel.values[:, 1]
    slope = np.dot(x1, y) / np.dot(x1, x1)
    assert abs(slope - (b1 + 0.5 * b2)) < 0.02


def test_regression_panel_unit_variances_and_cross_corr():
    spec = RegressionDgp(beta_true=(1.0, 1.0), design_rho=0.4, cross_corr=0.3)
    panel = gen_regression_panel(spec, n_half=50_000, seed=23)
    x = panel.values[:, 1:]
    cov = np.cov(x.T)
    assert abs(cov[0, 0] - 1.0) < 0.05
    assert abs(cov[1, 1] - 1.0) < 0.05
    assert abs(cov[0, 1] - 0.3) < 0.05
    # each column is still AR(1)(design_rho)
    assert abs(lag_autocorr(x[:, 0], 1) - 0.4) < 0.02


def test_regression_panel_constant_mean_columns():
    spec = RegressionDgp(beta_true=(1.0, 0.5), design_rho=0.3, cross_corr=0.5,
                         noise_rho=0.3, noise_sd=1.0)
    panel = gen_regression_panel(spec, n_half=50_000, seed=24)
    n_rows = panel.values.shape[0]
    for col in range(panel.values.shape[1]):
        assert abs(panel.values[:, col].mean()) < 4 / np.sqrt(n_rows)


def test_regression_panel_deterministic_given_seed():
    spec = RegressionDgp(beta_true=(1.0, 0.5), design_rho=0.3, cross_corr=0.5)
    a = gen_regression_panel(spec, 100, seed=9).values
    b = gen_regression_panel(spec, 100, seed=9).values
    np.testing.assert_array_equal(a, b)


def test_regression_spec_validation():
    with pytest.raises(ParameterError):
        RegressionDgp(beta_true=())
    with pytest.raises(ParameterError):
        RegressionDgp(beta_true=(1.0,), design_rho=1.0)
    with pytest.raises(ParameterError):
        RegressionDgp(beta_true=(1.0,), noise_sd=-0.5)
    with pytest.raises(ParameterError):
        RegressionDgp(beta_true=(1.0, 1.0, 1.0), cross_corr=-0.9)  # not PD for p=3


def test_panel_from_spec_wraps_series_as_mean_panel():
    panel = panel_from_spec(Ar1(rho=0.5), n_half=30, seed=4)
    assert panel.values.shape == (60, 2)
    np.testing.assert_array_equal(panel.values[:, 1], np.ones(60))
    series = gen_ar1(60, 0.5, 1.0, seed=4)
    np.testing.assert_array_equal(panel.values[:, 0], series)
    iid = panel_from_spec(IidGaussian(mean=2.0, sd=0.0), n_half=5, seed=0)
    np.testing.assert_array_equal(iid.values[:, 0], np.full(10, 2.0))


def test_data_panel_validation():
    with pytest.raises(ParameterError):
        DataPanel(n_half=3, values=np.zeros((5, 2)))  # row count != 2n
    with pytest.raises(ParameterError):
        DataPanel(n_half=1, values=np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(ParameterError):
        DataPanel(n_half=1, values=np.zeros(4))


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def test_sube_constant_zero_passes():
    report = check_sube_tails(np.zeros(200), k1=0.01, q_max=6)
    assert report.passed
    assert report.max_ratio == 0.0


def test_sube_gaussian_passes():
    rng = np.random.default_rng(31)
    report = check_sube_tails(rng.standard_normal(100_000), k1=2.0, q_max=6)
    # Gaussian L_q norms grow like sqrt(q), comfortably below 2q
    assert report.passed


def test_sube_heavy_tail_fails():
    rng = np.random.default_rng(32)
    sample = np.exp(rng.standard_normal(100_000) ** 2)
    report = check_sube_tails(sample, k1=2.0, q_max=8)
    assert not report.passed
    assert report.max_ratio > 1.0


def test_sube_rejects_short_sample():
    with pytest.raises(InsufficientDataError):
        check_sube_tails(np.zeros(99), k1=1.0)


def test_autocov_constant_sample_is_all_zero():
    profile = autocov_decay_profile(np.full(100, 3.7), r_max=5)
    np.testing.assert_array_equal(profile[:, 1], np.zeros(6))


def test_autocov_iid_lags_near_zero():
    rng = np.random.default_rng(41)
    profile = autocov_decay_profile(rng.standard_normal(100_000), r_max=10)
    assert np.all(profile[1:, 1] < 0.01)


def test_autocov_ar1_geometric_decay():
    x = gen_ar1(100_000, rho=0.5, innovation_sd=1.0, seed=42)
    profile = autocov_decay_profile(x, r_max=5)
    for r in range(6):
        theoretical = (1.0 / (1.0 - 0.25)) * 0.5**r
        assert abs(profile[r, 1] - theoretical) < 0.02


def test_autocov_rejects_large_r_max():
    with pytest.raises(ParameterError):
        autocov_decay_profile(np.zeros(100), r_max=25)
