"""Pure-NumPy bootstrap kernel, used when the compiled core is unavailable.

Semantics match ``tsplit.backend._kernels``: both construct the perturbed
moment vector per multiplier row, rebuild the symmetric Gram from its upper
triangle, and declare a replicate invalid when the reciprocal condition
number (min |eigenvalue| / max |eigenvalue|) falls below ``rcond_min``.
"""

import numpy as np


def bootstrap_replicates(psi_vec, block_sums, scale, multipliers, k, target, rcond_min):
    """Evaluate the target coefficient for every bootstrap multiplier row.

    Parameters
    ----------
    psi_vec : (d,) array
        Stacked moment vector (Gram upper triangle, then cross moments).
    block_sums : (n_blocks, d) array
        Centered per-block sums of the moment contributions.
    scale : float
        Perturbation scale, n**-0.5 for an inference half of n rows.
    multipliers : (B, n_blocks) array
        One standard-normal multiplier per block and replicate.
    k : int
        Number of covariates; d = k(k+1)/2 + k.
    target : int
        Coefficient coordinate to report.
    rcond_min : float
        Replicates whose perturbed Gram has a reciprocal condition number
        below this are marked invalid (their output slot is NaN).

    Returns
    -------
    (replicates, valid) : ((B,) float array, (B,) bool array)
    """
    psi_vec = np.asarray(psi_vec, dtype=np.float64)
    multipliers = np.asarray(multipliers, dtype=np.float64)
    n_draws = multipliers.shape[0]
    n_gram = (k * (k + 1)) // 2

    perturbed = psi_vec[np.newaxis, :] + scale * (multipliers @ block_sums)
    iu0, iu1 = np.triu_indices(k)
    gram = np.empty((n_draws, k, k))
    gram[:, iu0, iu1] = perturbed[:, :n_gram]
    gram[:, iu1, iu0] = perturbed[:, :n_gram]
    cross = perturbed[:, n_gram:]

    eigvals = np.abs(np.linalg.eigvalsh(gram))
    with np.errstate(divide="ignore", invalid="ignore"):
        rcond = eigvals[:, 0].copy()
        np.divide(eigvals.min(axis=1), eigvals.max(axis=1), out=rcond)
    valid = np.isfinite(rcond) & (rcond >= rcond_min)

    out = np.full(n_draws, np.nan)
    if valid.any():
        solutions = np.linalg.solve(gram[valid], cross[valid][:, :, np.newaxis])
        out[valid] = solutions[:, target, 0]
        finite = np.isfinite(out)
        valid &= finite
        out[~finite] = np.nan
    return out, valid
