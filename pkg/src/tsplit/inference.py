"""Confidence intervals, population oracle targets, and the replication pipeline.

The interval half-width is z * sigma_star / sqrt(n) with z the (1 - alpha/2)
standard-normal quantile. The coverage target is always the population
projection coefficient of the SELECTED model, recomputed per replication:
with correlated covariates it differs from the full-model coefficient, and
covering the wrong one is exactly the mistake post-selection inference is
meant to avoid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._seeding import as_seed, substream_seed
from .dgp import Ar1, DgpSpec, IidGaussian, Ma, RegressionDgp, panel_from_spec
from .errors import ParameterError
from .moments import ModelSpec, MomentVector, g_of_psi, grad_g, per_observation_contributions
from .selection import CandidateSet
from .splitboot import bootstrap_distribution, split_sample

# Sub-seed tags for the two random stages of one replication.
_PANEL_TAG = 0x70616E65
_BOOT_TAG = 0x626F6F74

# AS 241 (PPND16) rational-approximation constants for the standard normal
# quantile; absolute error is far below the 1e-9 contract, so every
# implementation of this constant set reproduces intervals to 1e-8.
_AS241_A = (3.3871328727963666080e0, 1.3314166789178437745e2,
            1.9715909503065514427e3, 1.3731693765509461125e4,
            4.5921953931549871457e4, 6.7265770927008700853e4,
            3.3430575583588128105e4, 2.5090809287301226727e3)
_AS241_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
            5.3941960214247511077e3, 2.1213794301586595867e4,
            3.9307895800092710610e4, 2.8729085735721942674e4,
            5.2264952788528545610e3)
_AS241_C = (1.42343711074968357734e0, 4.63033784615654529590e0,
            5.76949722146069140550e0, 3.64784832476320460504e0,
            1.27045825245236838258e0, 2.41780725177450611770e-1,
            2.27238449892691845833e-2, 7.74545014278341407640e-4)
_AS241_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
            6.89767334985100004550e-1, 1.48103976427480074590e-1,
            1.51986665636164571966e-2, 5.47593808499534494600e-4,
            1.05075007164441684324e-9)
_AS241_E = (6.65790464350110377720e0, 5.46378491116411436990e0,
            1.78482653991729133580e0, 2.96560571828504891230e-1,
            2.65321895265761230930e-2, 1.24266094738807843860e-3,
            2.71155556874348757815e-5, 2.01033439929228813265e-7)
_AS241_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
            1.48753612908506148525e-2, 7.86869131145613259100e-4,
            1.84631831751005468180e-5, 1.42151175831644588870e-7,
            2.04426310338993978564e-15)


def _poly(coeffs, r: float) -> float:
    acc = coeffs[7]
    for c in reversed(coeffs[:7]):
        acc = acc * r + c
    return acc


def normal_quantile(p: float) -> float:
    """Standard normal quantile via the AS 241 rational approximation."""
    if not 0.0 < p < 1.0:
        raise ParameterError(f"quantile argument must be in (0,1), got {p}")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_AS241_A, r) / _poly(_AS241_B, r)
    r = p if q < 0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        value = _poly(_AS241_C, r) / _poly(_AS241_D, r)
    else:
        r -= 5.0
        value = _poly(_AS241_E, r) / _poly(_AS241_F, r)
    return -value if q < 0 else value


@dataclass(frozen=True)
class ConfidenceInterval:
    """Symmetric interval [center - half_width, center + half_width]."""

    lower: float
    upper: float
    alpha: float
    center: float
    half_width: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha must be in (0,1), got {self.alpha}")
        if self.half_width < 0:
            raise ParameterError(f"half_width must be >= 0, got {self.half_width}")
        if self.lower > self.upper:
            raise ParameterError("lower exceeds upper")

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


def confidence_interval(beta_hat: float, sigma_star: float, n: int, alpha: float) -> ConfidenceInterval:
    """The bootstrap confidence interval beta_hat +/- z * sigma_star / sqrt(n),

    with z the (1 - alpha/2) standard-normal quantile.
    """
    if sigma_star < 0:
        raise ParameterError(f"sigma_star must be >= 0, got {sigma_star}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must be in (0,1), got {alpha}")
    z = normal_quantile(1.0 - alpha / 2.0)
    half_width = z * sigma_star / math.sqrt(n)
    return ConfidenceInterval(lower=beta_hat - half_width, upper=beta_hat + half_width,
                              alpha=alpha, center=beta_hat, half_width=half_width)


def _covariate_covariance(spec: RegressionDgp) -> np.ndarray:
    """Population contemporaneous covariance of the covariates (unit variances)."""
    sigma = np.full((spec.p, spec.p), spec.cross_corr)
    np.fill_diagonal(sigma, 1.0)
    return sigma


def population_psi(spec: DgpSpec, model: ModelSpec) -> MomentVector:
    """Population (analytic) moment vector of the DGP restricted to a model.

    For regression specs the Gram is the covariate covariance submatrix and
    the cross moments are Sigma[model, :] beta (the noise is independent and
    mean zero). Scalar-series specs are their mean-estimation panels: Gram
    1, cross moment the population mean.
    """
    if isinstance(spec, RegressionDgp):
        if model.covariates[-1] > spec.p:
            raise ParameterError(f"model covariates exceed p={spec.p}")
        sigma = _covariate_covariance(spec)
        idx = [c - 1 for c in model.covariates]
        gram = sigma[np.ix_(idx, idx)]
        cross = sigma[idx, :] @ np.asarray(spec.beta_true)
        iu0, iu1 = np.triu_indices(model.k)
        return MomentVector(model=model, gram_upper=gram[iu0, iu1].copy(),
                            cross=cross, n_obs=0)
    if model.covariates != (1,):
        raise ParameterError("scalar-series specs only support the mean model {1}")
    if isinstance(spec, IidGaussian):
        mean = spec.mean
    elif isinstance(spec, (Ar1, Ma)):
        mean = 0.0
    else:
        raise ParameterError(f"unknown DGP spec type {type(spec).__name__}")
    return MomentVector(model=model, gram_upper=np.array([1.0]),
                        cross=np.array([mean]), n_obs=0)


def oracle_target(spec: DgpSpec, model: ModelSpec) -> float:
    """Population projection coefficient of the selected model.

    This is the quantity the interval is supposed to cover. It is computed
    from the DGP's analytic second moments, and it differs from the
    full-model coefficient whenever the model omits a correlated covariate.
    """
    psi = population_psi(spec, model)
    beta = g_of_psi(psi)
    return float(beta[model.target_position])


@dataclass(frozen=True)
class LongRunCovariance:
    """Population long-run covariance of the moment contributions."""

    model: ModelSpec
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ParameterError("long-run covariance must be square")
        if not np.allclose(matrix, matrix.T, atol=1e-10, rtol=0.0):
            raise ParameterError("long-run covariance must be symmetric to 1e-10")
        eigvals = np.linalg.eigvalsh(matrix)
        if eigvals.min() < -1e-10:
            raise ParameterError(
                f"long-run covariance must be PSD (min eigenvalue {eigvals.min():.3e})"
            )
        object.__setattr__(self, "matrix", matrix)


def long_run_covariance_oracle(spec: DgpSpec, model: ModelSpec, truncation: int = 50,
                               sim_n: int = 1_000_000, seed: int = 0) -> LongRunCovariance:
    """Simulation estimate of sum_{|h| <= truncation} Cov(xi_0, xi_h).

    A test oracle only: one long simulated path (sim_n rows) of the
    per-observation moment contributions, centered, with the truncated
    autocovariance sum symmetrized. The bootstrap itself never sees this.
    """
    if truncation < 0 or truncation >= sim_n:
        raise ParameterError(f"truncation must be in 0..sim_n-1, got {truncation}")
    panel = panel_from_spec(spec, (sim_n + 1) // 2, seed)
    xi = per_observation_contributions(panel.values[:sim_n], model)
    centered = xi - xi.mean(axis=0)
    total = centered.T @ centered / sim_n
    for h in range(1, truncation + 1):
        cov_h = centered[:-h].T @ centered[h:] / sim_n
        total += cov_h + cov_h.T
    total = (total + total.T) / 2.0
    return LongRunCovariance(model=model, matrix=total)


def delta_method_sd(spec: DgpSpec, model: ModelSpec, truncation: int = 50,
                    sim_n: int = 1_000_000, seed: int = 0) -> float:
    """Asymptotic sd of sqrt(n)(beta_hat - target): sqrt(grad' Sigma grad).

    The gradient of the coefficient map is evaluated at the population
    moments and Sigma is the simulated long-run covariance; this is the
    delta-method benchmark that sigma_star should approach.
    """
    lrc = long_run_covariance_oracle(spec, model, truncation=truncation,
                                     sim_n=sim_n, seed=seed)
    grad = grad_g(population_psi(spec, model))
    return float(np.sqrt(grad @ lrc.matrix @ grad))


def default_mstar(spec: DgpSpec, candidates: CandidateSet) -> frozenset:
    """Acceptable-model set: supersets of the true support.

    For regression specs these are the candidates containing every covariate
    with a nonzero true coefficient; scalar-series specs accept everything
    (the mean model is always correct).
    """
    if isinstance(spec, RegressionDgp):
        support = {i + 1 for i, b in enumerate(spec.beta_true) if b != 0.0}
        return frozenset(m.covariates for m in candidates if support <= set(m.covariates))
    return frozenset(m.covariates for m in candidates)


def mstar_all(spec: DgpSpec, candidates: CandidateSet) -> frozenset:
    """Every candidate is acceptable."""
    return frozenset(m.covariates for m in candidates)


@dataclass(frozen=True)
class ReplicationRecord:
    """Outcome of one full pipeline pass (or its failure reason)."""

    seed: int
    model: Optional[ModelSpec]
    beta_hat: float
    sigma_star: float
    ci: Optional[ConfidenceInterval]
    target: float
    covered: Optional[bool]
    in_mstar: Optional[bool]
    fail_reason: str = ""

    @property
    def failed(self) -> bool:
        return bool(self.fail_reason)


def run_replication(spec: DgpSpec, n_half: int, selector: Callable, candidates: CandidateSet,
                    B: int, block_len: int | None, alpha: float, gap: int,
                    seed: int, mstar: Optional[frozenset] = None) -> ReplicationRecord:
    """One end-to-end pass: simulate, split, select, bootstrap, score.

    Generates 2n rows, selects a model on the first half only, bootstraps
    the selected coefficient on the second half, and checks whether the
    population target OF THE SELECTED MODEL lands in the interval. Pure
    function of its arguments; errors propagate to the caller (the harness
    records them as failed replications).
    """
    seed = as_seed(seed)
    panel = panel_from_spec(spec, n_half, substream_seed(seed, _PANEL_TAG))
    first_half, second_half = split_sample(panel, gap)
    model = selector(first_half, candidates)
    boot = bootstrap_distribution(second_half, model, B=B, block_len=block_len,
                                  seed=substream_seed(seed, _BOOT_TAG))
    ci = confidence_interval(boot.beta_hat, boot.sigma_star, n_half, alpha)
    target = oracle_target(spec, model)
    if mstar is None:
        mstar = default_mstar(spec, candidates)
    return ReplicationRecord(
        seed=seed, model=model, beta_hat=boot.beta_hat, sigma_star=boot.sigma_star,
        ci=ci, target=target, covered=ci.contains(target),
        in_mstar=model.covariates in mstar,
    )
