"""Synthetic weakly dependent data generation and hypothesis diagnostics.

Every generator is Gaussian-driven with geometric dependence decay, so the
simulated panels satisfy the assumptions the inference pipeline needs:
sub-exponential marginals, mean constant in ``i``, and autocovariances that
die off geometrically. AR(1) paths start from their stationary law, which
makes the constant-mean / constant-covariance property exact at every index
rather than only asymptotically. All randomness flows through an explicit
64-bit seed and one generator instance per call, so identical arguments give
bit-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.signal import lfilter

from ._seeding import as_seed
from .errors import InsufficientDataError, ParameterError


def _check_corr(name: str, value: float) -> None:
    if not abs(value) < 1.0:
        raise ParameterError(f"|{name}| must be < 1, got {value}")


@dataclass(frozen=True)
class IidGaussian:
    """Independent N(mean, sd^2) draws (no dependence beyond lag 0)."""

    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        if self.sd < 0:
            raise ParameterError(f"sd must be >= 0, got {self.sd}")


@dataclass(frozen=True)
class Ar1:
    """Stationary Gaussian AR(1) with parameter rho and innovation scale.

    Dependence decays geometrically: autocovariance at lag r is
    rho^r * innovation_sd^2 / (1 - rho^2), so the decay-rate hypothesis
    holds at every polynomial rate.
    """

    rho: float
    innovation_sd: float = 1.0

    def __post_init__(self):
        _check_corr("rho", self.rho)
        if self.innovation_sd < 0:
            raise ParameterError(f"innovation_sd must be >= 0, got {self.innovation_sd}")


@dataclass(frozen=True)
class Ma:
    """Finite moving average of iid N(0,1) innovations.

    Dependence vanishes exactly beyond the filter order, the strongest
    possible decay.
    """

    coefficients: tuple

    def __post_init__(self):
        coef = tuple(float(c) for c in np.atleast_1d(self.coefficients))
        if len(coef) == 0:
            raise ParameterError("coefficients must be nonempty")
        object.__setattr__(self, "coefficients", coef)


@dataclass(frozen=True)
class RegressionDgp:
    """Linear regression panel with weakly dependent design and noise.

    Covariates are AR(1)(design_rho) processes normalized to unit stationary
    variance, with contemporaneous correlation ``cross_corr`` between every
    covariate pair (induced through equicorrelated innovations, so each
    column stays exactly AR(1)). The response is X beta_true plus an
    independent AR(1)(noise_rho) error whose innovation scale is
    ``noise_sd``. All cross- and auto-covariances decay geometrically at
    rate max(|design_rho|, |noise_rho|).
    """

    beta_true: tuple
    design_rho: float = 0.0
    cross_corr: float = 0.0
    noise_rho: float = 0.0
    noise_sd: float = 1.0

    def __post_init__(self):
        beta = tuple(float(b) for b in np.atleast_1d(self.beta_true))
        if len(beta) == 0:
            raise ParameterError("beta_true must be nonempty")
        object.__setattr__(self, "beta_true", beta)
        _check_corr("design_rho", self.design_rho)
        _check_corr("noise_rho", self.noise_rho)
        _check_corr("cross_corr", self.cross_corr)
        p = len(beta)
        # equicorrelated innovations must stay positive definite
        if p > 1 and self.cross_corr <= -1.0 / (p - 1):
            raise ParameterError(
                f"cross_corr must exceed -1/(p-1) = {-1.0 / (p - 1):.4f} for p={p}"
            )
        if self.noise_sd < 0:
            raise ParameterError(f"noise_sd must be >= 0, got {self.noise_sd}")

    @property
    def p(self) -> int:
        return len(self.beta_true)


DgpSpec = Union[IidGaussian, Ar1, Ma, RegressionDgp]


@dataclass(frozen=True)
class DataPanel:
    """2n observations of (response, covariates); column 0 is the response."""

    n_half: int
    values: np.ndarray
    dgp_tag: Optional[DgpSpec] = None

    def __post_init__(self):
        if self.n_half < 1:
            raise ParameterError(f"n_half must be >= 1, got {self.n_half}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] < 2:
            raise ParameterError("values must be a 2-D matrix with a response and >= 1 covariate")
        if values.shape[0] != 2 * self.n_half:
            raise ParameterError(
                f"expected {2 * self.n_half} rows for n_half={self.n_half}, got {values.shape[0]}"
            )
        if not np.all(np.isfinite(values)):
            raise ParameterError("panel contains non-finite entries")
        object.__setattr__(self, "values", values)

    @property
    def p(self) -> int:
        return self.values.shape[1] - 1


def gen_ar1(n: int, rho: float, innovation_sd: float, seed: int) -> np.ndarray:
    """Simulate a stationary Gaussian AR(1) path of length ``n``.

    The first value is drawn from the stationary law
    N(0, innovation_sd^2 / (1 - rho^2)); subsequent values follow
    X_{i+1} = rho X_i + eps_{i+1} with eps iid N(0, innovation_sd^2).
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    _check_corr("rho", rho)
    if innovation_sd < 0:
        raise ParameterError(f"innovation_sd must be >= 0, got {innovation_sd}")
    rng = np.random.default_rng(as_seed(seed))
    z = rng.standard_normal(n)
    driver = np.empty(n)
    driver[0] = z[0] * innovation_sd / math.sqrt(1.0 - rho * rho)
    driver[1:] = z[1:] * innovation_sd
    return lfilter([1.0], [1.0, -rho], driver)


def gen_ma(n: int, coefficients, seed: int) -> np.ndarray:
    """Simulate a finite moving average X_i = sum_k c_k eps_{i-k}.

    Innovations are iid N(0,1); a burn-in of len(coefficients) innovations
    is discarded so every output uses a full coefficient window.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    coef = np.atleast_1d(np.asarray(coefficients, dtype=np.float64))
    if coef.ndim != 1 or coef.size == 0:
        raise ParameterError("coefficients must be a nonempty vector")
    q = coef.size
    rng = np.random.default_rng(as_seed(seed))
    eps = rng.standard_normal(n + q)
    return lfilter(coef, [1.0], eps)[q:]


def gen_regression_panel(spec: RegressionDgp, n_half: int, seed: int) -> DataPanel:
    """Simulate 2n rows of (Y, X) from a :class:`RegressionDgp`.

    Covariate columns have unit stationary variance, pairwise contemporaneous
    correlation ``cross_corr`` and AR(1)(design_rho) serial dependence; the
    error process is independent of X. Every column has mean zero at every
    index (stationary start, no drift).
    """
    if not isinstance(spec, RegressionDgp):
        raise ParameterError("spec must be a RegressionDgp")
    if n_half < 1:
        raise ParameterError(f"n_half must be >= 1, got {n_half}")
    p = spec.p
    n_rows = 2 * n_half
    rng = np.random.default_rng(as_seed(seed))

    z = rng.standard_normal((n_rows, p))
    z_noise = rng.standard_normal(n_rows)

    corr = np.full((p, p), spec.cross_corr)
    np.fill_diagonal(corr, 1.0)
    chol = np.linalg.cholesky(corr)
    innov = z @ chol.T

    rho = spec.design_rho
    driver = np.empty_like(innov)
    driver[0] = innov[0]  # stationary start: Cov(X_1) = corr exactly
    driver[1:] = innov[1:] * math.sqrt(1.0 - rho * rho)
    x = lfilter([1.0], [1.0, -rho], driver, axis=0)

    nrho = spec.noise_rho
    noise_driver = np.empty(n_rows)
    noise_driver[0] = z_noise[0] * spec.noise_sd / math.sqrt(1.0 - nrho * nrho)
    noise_driver[1:] = z_noise[1:] * spec.noise_sd
    u = lfilter([1.0], [1.0, -nrho], noise_driver)

    y = x @ np.asarray(spec.beta_true) + u
    return DataPanel(n_half=n_half, values=np.column_stack([y, x]), dgp_tag=spec)


def panel_from_spec(spec: DgpSpec, n_half: int, seed: int) -> DataPanel:
    """Build the (Y, X) panel for any DGP variant.

    Regression specs produce their own panel. The scalar-series variants are
    wrapped as mean-estimation panels with a single constant covariate, so
    the series mean is the lone regression coefficient.
    """
    if isinstance(spec, RegressionDgp):
        return gen_regression_panel(spec, n_half, seed)
    if n_half < 1:
        raise ParameterError(f"n_half must be >= 1, got {n_half}")
    n_rows = 2 * n_half
    if isinstance(spec, IidGaussian):
        rng = np.random.default_rng(as_seed(seed))
        series = spec.mean + spec.sd * rng.standard_normal(n_rows)
    elif isinstance(spec, Ar1):
        series = gen_ar1(n_rows, spec.rho, spec.innovation_sd, seed)
    elif isinstance(spec, Ma):
        series = gen_ma(n_rows, spec.coefficients, seed)
    else:
        raise ParameterError(f"unknown DGP spec type {type(spec).__name__}")
    return DataPanel(n_half=n_half, values=np.column_stack([series, np.ones(n_rows)]), dgp_tag=spec)


@dataclass(frozen=True)
class SubExpReport:
    """Result of the empirical sub-exponential moment-growth check."""

    passed: bool
    max_ratio: float
    k1: float
    norms: np.ndarray
    ratios: np.ndarray


def check_sube_tails(sample, k1: float, q_max: int = 8) -> SubExpReport:
    """Empirical check of the sub-exponential norm-growth criterion.

    A sub-exponential variable satisfies ||X||_q <= K q for all q >= 1. This
    computes empirical L_q norms (mean |X|^q)^(1/q) for q = 1..q_max and
    reports the worst ratio against k1*q; the check passes when the worst
    ratio is at most one.
    """
    x = np.asarray(sample, dtype=np.float64).ravel()
    if x.size < 100:
        raise InsufficientDataError(f"need at least 100 observations, got {x.size}")
    if k1 <= 0:
        raise ParameterError(f"k1 must be > 0, got {k1}")
    if q_max < 2:
        raise ParameterError(f"q_max must be >= 2, got {q_max}")
    qs = np.arange(1, q_max + 1, dtype=np.float64)
    a = np.abs(x)
    norms = np.array([np.mean(a**q) ** (1.0 / q) for q in qs])
    ratios = norms / (k1 * qs)
    max_ratio = float(ratios.max())
    return SubExpReport(passed=max_ratio <= 1.0, max_ratio=max_ratio, k1=k1,
                        norms=norms, ratios=ratios)


def autocov_decay_profile(sample, r_max: int) -> np.ndarray:
    """Absolute sample autocovariances at lags 0..r_max.

    Uses the unbiased denominator (n - r) per lag. This is a diagnostic
    proxy for the dependence-decay hypothesis: the geometric-decay
    generators above should show |autocov| shrinking geometrically.

    Returns an (r_max+1, 2) array of (lag, |autocovariance|) rows.
    """
    x = np.asarray(sample, dtype=np.float64).ravel()
    n = x.size
    if r_max < 0 or r_max >= n / 4:
        raise ParameterError(f"r_max must satisfy 0 <= r_max < n/4 = {n / 4}, got {r_max}")
    centered = x - x.mean()
    out = np.empty((r_max + 1, 2))
    for r in range(r_max + 1):
        gamma = float(np.dot(centered[: n - r], centered[r:]) / (n - r))
        out[r, 0] = r
        out[r, 1] = abs(gamma)
    return out
