"""Model selection on the selection half of the split.

Two classical consistent selectors are provided: BIC over a finite candidate
set and hard thresholding of the full-model fit. Both are pure functions of
the data they are handed, so feeding them only the first half enforces the
sample-splitting discipline by construction. Ties break to the earliest
candidate in enumeration order, which makes every selection deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (
    InsufficientDataError,
    ParameterError,
    SelectionFailureError,
    SingularDesignError,
)
from .moments import ModelSpec, compute_psi, g_of_psi, model_columns

#: Enumeration guard: subsets of more than this many covariates are refused.
MAX_P = 20


@dataclass(frozen=True)
class CandidateSet:
    """A finite ordered collection of candidate models."""

    models: tuple
    max_size: int

    def __post_init__(self):
        models = tuple(self.models)
        if len(models) == 0:
            raise ParameterError("candidate set must be nonempty")
        seen = set()
        for m in models:
            if not isinstance(m, ModelSpec):
                raise ParameterError("candidates must be ModelSpec instances")
            if m.covariates in seen:
                raise ParameterError(f"duplicate candidate {m.covariates}")
            seen.add(m.covariates)
        if self.max_size < max(m.k for m in models):
            raise ParameterError("max_size is smaller than the largest candidate")
        object.__setattr__(self, "models", models)

    def __iter__(self):
        return iter(self.models)

    def __len__(self):
        return len(self.models)


def enumerate_candidates(p: int, max_size: int) -> CandidateSet:
    """All nonempty covariate subsets of {1..p} with at most max_size members.

    Ordered by size, then lexicographically within each size, so for p=2:
    {1}, {2}, {1,2}.
    """
    if not 1 <= max_size <= p:
        raise ParameterError(f"need 1 <= max_size <= p, got max_size={max_size}, p={p}")
    if p > MAX_P:
        raise ParameterError(f"p={p} exceeds the enumeration guard of {MAX_P}")
    models = tuple(
        ModelSpec(covariates=combo)
        for size in range(1, max_size + 1)
        for combo in combinations(range(1, p + 1), size)
    )
    return CandidateSet(models=models, max_size=max_size)


def _bic_value(data: np.ndarray, model: ModelSpec) -> float:
    """BIC of one candidate fit; raises SingularDesignError on singular fits."""
    psi = compute_psi(data, model)
    beta = g_of_psi(psi)
    y, x = model_columns(data, model)
    resid = y - x @ beta
    n = data.shape[0]
    rss = float(resid @ resid)
    with np.errstate(divide="ignore"):
        return float(n * np.log(rss / n) + model.k * np.log(n))


def select_bic(first_half, candidates: CandidateSet) -> ModelSpec:
    """BIC subset selection: argmin n log(RSS/n) + |m| log n.

    Singular candidate fits are skipped; ties break to the earliest
    candidate. Raises :class:`SelectionFailureError` if every fit is
    singular.
    """
    data = np.asarray(first_half, dtype=np.float64)
    n = data.shape[0] if data.ndim == 2 else 0
    if n <= candidates.max_size + 1:
        raise InsufficientDataError(
            f"selection needs more than max_size+1 = {candidates.max_size + 1} rows, got {n}"
        )
    best = None
    best_bic = np.inf
    for model in candidates:
        try:
            bic = _bic_value(data, model)
        except SingularDesignError:
            continue
        if bic < best_bic:
            best, best_bic = model, bic
    if best is None:
        raise SelectionFailureError("every candidate fit was singular")
    return best


def select_threshold(first_half, candidates: CandidateSet, t: float) -> ModelSpec:
    """Hard-threshold selection on the full-model fit.

    Fits the union of all candidate covariates, keeps the ones with
    |coefficient| > t, and returns the exact matching candidate or its
    smallest superset. If nothing survives the threshold, the best-BIC
    singleton is returned instead of erroring, so long simulation runs never
    abort on a degenerate draw.
    """
    if t < 0:
        raise ParameterError(f"threshold must be >= 0, got {t}")
    data = np.asarray(first_half, dtype=np.float64)
    full_cov = tuple(sorted({c for m in candidates for c in m.covariates}))
    full = ModelSpec(covariates=full_cov)
    try:
        beta = g_of_psi(compute_psi(data, full))
    except SingularDesignError as exc:
        raise SelectionFailureError(f"full model fit is singular: {exc}")
    kept = tuple(c for c, b in zip(full_cov, beta) if abs(b) > t)

    if not kept:
        singles = tuple(m for m in candidates if m.k == 1)
        if not singles:
            raise SelectionFailureError("nothing survived the threshold and no singleton candidates exist")
        return select_bic(data, CandidateSet(models=singles, max_size=1))

    for model in candidates:
        if model.covariates == kept:
            return model
    supersets = [m for m in candidates if set(kept) <= set(m.covariates)]
    if not supersets:
        raise SelectionFailureError(f"no candidate contains the surviving covariates {kept}")
    order = {m.covariates: i for i, m in enumerate(candidates)}
    return min(supersets, key=lambda m: (m.k, order[m.covariates]))


def make_selector(name: str):
    """Resolve a selector strategy name: ``bic`` or ``threshold:<t>``."""
    strategy = name.strip().lower()
    if strategy == "bic":
        return select_bic
    if strategy.startswith("threshold:"):
        raw = strategy.split(":", 1)[1]
        try:
            t = float(raw)
        except ValueError:
            raise ParameterError(f"threshold selector needs a numeric cutoff, got {raw!r}")
        if t < 0:
            raise ParameterError(f"threshold cutoff must be >= 0, got {t}")
        return lambda data, candidates: select_threshold(data, candidates, t)
    raise ParameterError(f"unknown selector {name!r} (use 'bic' or 'threshold:<t>')")
