"""Sample splitting and the block multiplier bootstrap.

The inference half is partitioned into contiguous blocks; each bootstrap
iteration draws one standard-normal multiplier per block and perturbs the
moment vector by n^-0.5 W, where W = n^-0.5 sum_b e_b S_b is the normalized
multiplier combination of the centered block sums S_b. Conditional on the
data, W is exactly Gaussian with coordinatewise variance n^-1 sum_b S_b^2,
which converges to the long-run variance of the contributions under weak
dependence; the resulting perturbation of the moment vector is local
(O(n^-0.5)), so the coefficient map stays in its differentiable
neighborhood. The replicate spread is reported on the sqrt(n) scale:
sigma_star estimates the sd of sqrt(n)(beta_hat - target), and the interval
half-width is z * sigma_star / sqrt(n).

The replicate loop is delegated to :mod:`tsplit.backend` (compiled core when
built, pure NumPy otherwise). All multipliers for a run are drawn up front
from the seed in replicate order, so replicate j's multipliers are a fixed
function of (seed, j) and results never depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from ._seeding import as_seed
from .dgp import DataPanel
from .errors import BootstrapInstabilityError, ParameterError
from .moments import (
    RCOND_MIN,
    ModelSpec,
    compute_psi,
    g_of_psi,
    per_observation_contributions,
)

#: A bootstrap run aborts when more than this fraction of replicates is
#: rejected for singular perturbed Grams.
MAX_FAILURE_FRACTION = 0.01


@dataclass(frozen=True)
class BlockScheme:
    """Contiguous partition of row indices 0..n-1.

    All blocks have length ``block_len`` except possibly a shorter tail, so
    the block count is ceil(n / block_len).
    """

    n: int
    block_len: int
    starts: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.block_len <= self.n:
            raise ParameterError(f"block_len must be in 1..{self.n}, got {self.block_len}")
        expected = tuple(range(0, self.n, self.block_len))
        if tuple(self.starts) != expected:
            raise ParameterError("starts do not form a contiguous partition")
        object.__setattr__(self, "starts", expected)

    @property
    def n_blocks(self) -> int:
        return len(self.starts)

    @property
    def blocks(self) -> tuple:
        """(start, stop) index ranges of each block."""
        stops = self.starts[1:] + (self.n,)
        return tuple(zip(self.starts, stops))


def default_block_len(n: int) -> int:
    """floor(n^(1/3)), computed without float-power drift, floored at 1."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    root = max(1, round(n ** (1.0 / 3.0)))
    while root > 1 and root * root * root > n:
        root -= 1
    while (root + 1) ** 3 <= n:
        root += 1
    return root


def make_blocks(n: int, block_len: int | None = None) -> BlockScheme:
    """Partition 0..n-1 into contiguous blocks of length ``block_len``.

    ``block_len=None`` selects the default floor(n^(1/3)).
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if block_len is None:
        block_len = default_block_len(n)
    block_len = int(block_len)
    if not 1 <= block_len <= n:
        raise ParameterError(f"block_len must be in 1..{n}, got {block_len}")
    return BlockScheme(n=n, block_len=block_len, starts=tuple(range(0, n, block_len)))


def split_sample(panel: DataPanel, gap: int = 0):
    """Split the 2n panel rows into a selection half and an inference half.

    The selection half is rows 1..n-gap and the inference half is always
    rows n+1..2n (1-based): the gap is removed from the end of the selection
    half so the interval's sqrt(n) scaling refers to exactly n rows.
    """
    n = panel.n_half
    if not 0 <= gap < n:
        raise ParameterError(f"gap must satisfy 0 <= gap < n_half={n}, got {gap}")
    values = panel.values
    return values[: n - gap], values[n:]


def block_sums(contributions, scheme: BlockScheme) -> np.ndarray:
    """Centered per-block sums S_b = sum_{i in b} (xi_i - xi_bar)."""
    xi = np.asarray(contributions, dtype=np.float64)
    if xi.ndim == 1:
        xi = xi[:, None]
    if xi.ndim != 2 or xi.shape[0] != scheme.n:
        raise ParameterError(f"contributions must have {scheme.n} rows")
    centered = xi - xi.mean(axis=0)
    return np.add.reduceat(centered, np.asarray(scheme.starts, dtype=np.intp), axis=0)


def multiplier_draw(contributions, scheme: BlockScheme, multipliers) -> np.ndarray:
    """One raw multiplier combination of the centered block sums, sum_b e_b S_b.

    Conditional on the data, each coordinate is Gaussian with mean zero and
    variance sum_b S_b^2 when the multipliers are iid N(0,1).
    :func:`bootstrap_distribution` scales this by 1/n to form its (local)
    moment-vector perturbation.
    """
    e = np.asarray(multipliers, dtype=np.float64)
    if e.shape != (scheme.n_blocks,):
        raise ParameterError(
            f"need one multiplier per block ({scheme.n_blocks}), got shape {e.shape}"
        )
    return e @ block_sums(contributions, scheme)


@dataclass(frozen=True)
class BootstrapResult:
    """Bootstrap output: point estimate, retained replicates, their spread.

    ``sigma_star`` is the 1/B-normalized standard deviation of the retained
    bootstrap coefficients on the sqrt(n) scale,
    sqrt(n_obs * mean((replicates - mean(replicates))^2)), so it is exactly
    recomputable from the stored fields and estimates the sd of
    sqrt(n)(beta_hat - target). ``failures`` counts replicates dropped for
    singular perturbed Grams.
    """

    beta_hat: float
    replicates: np.ndarray
    sigma_star: float
    failures: int
    n_obs: int


def bootstrap_distribution(second_half, model: ModelSpec, B: int,
                           block_len: int | None = None, seed: int = 0) -> BootstrapResult:
    """Block multiplier bootstrap of the target regression coefficient.

    For each of B iterations, fresh iid N(0,1) multipliers (one per block)
    perturb the moment vector by n^-0.5 W = n^-1 sum_b e_b S_b and the
    coefficient map is re-evaluated; conditionally on the data,
    sqrt(n)(beta*_j - beta_hat) then has variance n^-1 sum_b S_b^2 exactly
    in the linear (mean) case. Deterministic given the seed. Replicates
    whose perturbed Gram is numerically singular are dropped and counted;
    more than ``MAX_FAILURE_FRACTION`` of them aborts the run, because
    silently regularizing would bias sigma_star.
    """
    if B < 2:
        raise ParameterError(f"B must be >= 2, got {B}")
    data = np.asarray(second_half, dtype=np.float64)
    psi = compute_psi(data, model)
    beta_vec = g_of_psi(psi)  # raises SingularDesignError on a bad design
    beta_hat = float(beta_vec[model.target_position])

    n = data.shape[0]
    scheme = make_blocks(n, block_len)
    xi = per_observation_contributions(data, model)
    sums = np.ascontiguousarray(block_sums(xi, scheme))

    rng = np.random.default_rng(as_seed(seed))
    multipliers = rng.standard_normal((B, scheme.n_blocks))

    replicates, valid = backend.bootstrap_replicates(
        psi.as_vector(), sums, 1.0 / n, multipliers,
        model.k, model.target_position, RCOND_MIN,
    )
    failures = int(B - int(valid.sum()))
    if failures > MAX_FAILURE_FRACTION * B:
        raise BootstrapInstabilityError(
            f"{failures}/{B} bootstrap replicates rejected for singular perturbed Grams"
        )
    kept = replicates[valid]
    sigma_star = float(np.sqrt(n * np.mean((kept - kept.mean()) ** 2)))
    return BootstrapResult(beta_hat=beta_hat, replicates=kept,
                           sigma_star=sigma_star, failures=failures, n_obs=n)
