"""Moment functionals for regression coefficients.

The stacked moment vector holds the upper triangle of the sample Gram matrix
followed by the cross moments, each paper-level quantity owning exactly one
coordinate. The coefficient map solves the expanded symmetric system with a
pivoted factorization (never an explicit inverse), and its analytic gradient
accounts for the symmetric double-counting of off-diagonal Gram parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, ParameterError, SingularDesignError

#: Reciprocal condition number below which a Gram matrix is treated as
#: singular (double-precision safety margin).
RCOND_MIN = 1e-12


@dataclass(frozen=True)
class ModelSpec:
    """A candidate model: an ordered covariate subset of a panel.

    ``covariates`` holds 1-based panel column indices (column 0 is the
    response); ``target_position`` indexes into ``covariates`` and marks the
    coefficient of interest (default: the first listed covariate).
    """

    covariates: tuple
    target_position: int = 0

    def __post_init__(self):
        cov = tuple(int(c) for c in np.atleast_1d(self.covariates))
        object.__setattr__(self, "covariates", cov)
        if len(cov) == 0:
            raise ParameterError("a model needs at least one covariate")
        if cov[0] < 1:
            raise ParameterError("covariate indices are 1-based")
        if any(b <= a for a, b in zip(cov, cov[1:])):
            raise ParameterError("covariates must be strictly increasing")
        if not 0 <= self.target_position < len(cov):
            raise ParameterError(
                f"target_position {self.target_position} out of range for {len(cov)} covariates"
            )

    @property
    def k(self) -> int:
        return len(self.covariates)

    def label(self) -> str:
        """Compact CSV-safe name, e.g. '1+3' for covariates (1, 3)."""
        return "+".join(str(c) for c in self.covariates)


@dataclass(frozen=True)
class MomentVector:
    """Stacked sample moments for one model: Gram upper triangle, then cross.

    ``gram_upper`` stores the row-major upper triangle of n^-1 sum x_i x_i',
    ``cross`` the vector n^-1 sum x_i y_i. ``n_obs`` records the sample size
    it was computed from (0 marks a population/analytic vector).
    """

    model: ModelSpec
    gram_upper: np.ndarray
    cross: np.ndarray
    n_obs: int

    def __post_init__(self):
        k = self.model.k
        gram_upper = np.asarray(self.gram_upper, dtype=np.float64)
        cross = np.asarray(self.cross, dtype=np.float64)
        if gram_upper.shape != (k * (k + 1) // 2,):
            raise ParameterError(
                f"gram_upper must have length k(k+1)/2 = {k * (k + 1) // 2}, got {gram_upper.shape}"
            )
        if cross.shape != (k,):
            raise ParameterError(f"cross must have length k = {k}, got {cross.shape}")
        if self.n_obs < 0:
            raise ParameterError("n_obs must be >= 0")
        object.__setattr__(self, "gram_upper", gram_upper)
        object.__setattr__(self, "cross", cross)

    @property
    def k(self) -> int:
        return self.model.k

    @property
    def d(self) -> int:
        return self.gram_upper.size + self.cross.size

    def expand_gram(self) -> np.ndarray:
        """The full symmetric k-by-k Gram matrix."""
        k = self.k
        gram = np.zeros((k, k))
        iu0, iu1 = np.triu_indices(k)
        gram[iu0, iu1] = self.gram_upper
        gram[iu1, iu0] = self.gram_upper
        return gram

    def as_vector(self) -> np.ndarray:
        """Stacked (gram_upper, cross) coordinates."""
        return np.concatenate([self.gram_upper, self.cross])

    @classmethod
    def from_vector(cls, model: ModelSpec, vec, n_obs: int) -> "MomentVector":
        vec = np.asarray(vec, dtype=np.float64)
        n_gram = model.k * (model.k + 1) // 2
        return cls(model=model, gram_upper=vec[:n_gram].copy(),
                   cross=vec[n_gram:].copy(), n_obs=n_obs)


def model_columns(data, model: ModelSpec):
    """Split a (Y, X) data matrix into the response and the model's design."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ParameterError("data must be a 2-D (response, covariates) matrix")
    if data.shape[0] == 0:
        raise InsufficientDataError("data has no rows")
    p = data.shape[1] - 1
    if model.covariates[-1] > p:
        raise ParameterError(
            f"model uses covariate column {model.covariates[-1]} but the panel has p={p}"
        )
    return data[:, 0], data[:, list(model.covariates)]


def per_observation_contributions(data, model: ModelSpec) -> np.ndarray:
    """Per-row summands of the moment vector.

    Row i stacks the upper triangle of x_i x_i' followed by x_i y_i, so the
    column means reproduce :func:`compute_psi` bit-for-bit. The bootstrap
    centers and block-sums these rows.
    """
    y, x = model_columns(data, model)
    iu0, iu1 = np.triu_indices(model.k)
    return np.hstack([x[:, iu0] * x[:, iu1], x * y[:, None]])


def compute_psi(data, model: ModelSpec) -> MomentVector:
    """Sample moment vector: Gram upper triangle and cross moments."""
    xi = per_observation_contributions(data, model)
    mean = xi.mean(axis=0)
    n_gram = model.k * (model.k + 1) // 2
    return MomentVector(model=model, gram_upper=mean[:n_gram].copy(),
                        cross=mean[n_gram:].copy(), n_obs=xi.shape[0])


def gram_rcond(gram: np.ndarray) -> float:
    """Reciprocal spectral condition number of a symmetric matrix."""
    eigvals = np.abs(np.linalg.eigvalsh(gram))
    top = eigvals.max()
    if not np.isfinite(top) or top == 0.0:
        return 0.0
    return float(eigvals.min() / top)


def _checked_gram(psi: MomentVector) -> np.ndarray:
    gram = psi.expand_gram()
    rcond = gram_rcond(gram)
    if rcond < RCOND_MIN:
        raise SingularDesignError(
            f"Gram reciprocal condition number {rcond:.3e} is below {RCOND_MIN:g}"
        )
    return gram


def g_of_psi(psi: MomentVector) -> np.ndarray:
    """Map a moment vector to the OLS coefficient vector (solve G beta = c).

    Raises :class:`SingularDesignError` when the Gram's reciprocal condition
    number falls below ``RCOND_MIN``.
    """
    gram = _checked_gram(psi)
    return np.linalg.solve(gram, psi.cross)


def grad_g(psi: MomentVector, coordinate: int | None = None) -> np.ndarray:
    """Analytic gradient of one coefficient w.r.t. the stacked moments.

    ``coordinate`` selects the coefficient (default: the model's target).
    The returned d-vector is ordered like ``psi.as_vector()``: upper-triangle
    Gram parameters first, then cross moments. An off-diagonal Gram
    parameter moves both symmetric matrix entries, hence the double term.
    """
    if coordinate is None:
        coordinate = psi.model.target_position
    k = psi.k
    if not 0 <= coordinate < k:
        raise ParameterError(f"coordinate {coordinate} out of range for k={k}")
    gram = _checked_gram(psi)
    beta = np.linalg.solve(gram, psi.cross)
    unit = np.zeros(k)
    unit[coordinate] = 1.0
    w = np.linalg.solve(gram, unit)  # row `coordinate` of the inverse (symmetry)
    iu0, iu1 = np.triu_indices(k)
    gram_grad = -(w[iu0] * beta[iu1] + np.where(iu0 != iu1, w[iu1] * beta[iu0], 0.0))
    return np.concatenate([gram_grad, w])
