"""Monte Carlo coverage harness: configuration, replication, reporting.

Config files are flat ``key = value`` text with ``#`` comments; DGP
parameters live under dotted ``dgp.*`` keys. Unknown keys are hard errors.
Replication r runs with seed ``base_seed XOR splitmix64(r)``, so reports are
pure functions of the configuration and identical for any worker count.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ._seeding import as_seed, replication_seed
from .dgp import Ar1, DgpSpec, IidGaussian, Ma, RegressionDgp
from .errors import ConfigError, ExperimentError, ParameterError, TsplitError
from .inference import ReplicationRecord, default_mstar, mstar_all, run_replication
from .selection import enumerate_candidates, make_selector

#: Documented defaults for optional config keys.
DEFAULTS = {
    "bootstrap_B": 500,
    "block_len": None,  # auto = floor(n^(1/3))
    "alpha": 0.05,
    "gap": 0,
    "selector": "bic",
    "mstar": "supersets_of_true_support",
    "base_seed": 0,
}

_MSTAR_RULES = {
    "supersets_of_true_support": default_mstar,
    "all": mstar_all,
}

#: An experiment aborts when at least this fraction of replications fails.
MAX_REPLICATION_FAILURE = 0.05

CSV_HEADER = ["rep", "seed", "model", "beta_hat", "sigma_star", "ci_lo", "ci_hi",
              "target", "covered", "in_mstar", "fail_reason"]

_TOP_KEYS = {"n_half", "replications", "bootstrap_B", "block_len", "alpha", "gap",
             "selector", "max_size", "mstar", "base_seed", "out"}
_DGP_KEYS = {
    "iid_gaussian": {"mean", "sd"},
    "ar1": {"rho", "innovation_sd"},
    "ma": {"coefficients"},
    "regression": {"beta_true", "design_rho", "cross_corr", "noise_rho", "noise_sd"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one coverage experiment depends on."""

    dgp: DgpSpec
    n_half: int
    replications: int
    bootstrap_B: int = DEFAULTS["bootstrap_B"]
    block_len: Optional[int] = DEFAULTS["block_len"]
    alpha: float = DEFAULTS["alpha"]
    gap: int = DEFAULTS["gap"]
    selector: str = DEFAULTS["selector"]
    max_size: Optional[int] = None  # None = all covariates
    mstar: str = DEFAULTS["mstar"]
    base_seed: int = DEFAULTS["base_seed"]
    out: Optional[str] = None

    def __post_init__(self):
        if self.n_half < 1:
            raise ConfigError(f"n_half must be >= 1, got {self.n_half}")
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")
        if self.bootstrap_B < 2:
            raise ConfigError(f"bootstrap_B must be >= 2, got {self.bootstrap_B}")
        if self.block_len is not None and self.block_len < 1:
            raise ConfigError(f"block_len must be >= 1 or auto, got {self.block_len}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be in (0,1), got {self.alpha}")
        if not 0 <= self.gap < self.n_half:
            raise ConfigError(f"gap must satisfy 0 <= gap < n_half, got {self.gap}")
        try:
            make_selector(self.selector)
        except ParameterError as exc:
            raise ConfigError(f"selector: {exc}")
        if self.mstar not in _MSTAR_RULES:
            raise ConfigError(
                f"mstar must be one of {sorted(_MSTAR_RULES)}, got {self.mstar!r}"
            )
        try:
            as_seed(self.base_seed)
        except ParameterError as exc:
            raise ConfigError(f"base_seed: {exc}")
        p = self.dgp_p
        size = p if self.max_size is None else self.max_size
        if not 1 <= size <= p:
            raise ConfigError(f"max_size must be in 1..p={p}, got {self.max_size}")

    @property
    def dgp_p(self) -> int:
        return self.dgp.p if isinstance(self.dgp, RegressionDgp) else 1

    @property
    def effective_max_size(self) -> int:
        return self.dgp_p if self.max_size is None else self.max_size


def _parse_number(key: str, raw: str, kind, lineno: int):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key} must be a {kind.__name__}, got {raw!r}")


def _parse_float_list(key: str, raw: str, lineno: int) -> tuple:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"line {lineno}: {key} needs a comma-separated list of numbers")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key} must be a comma-separated list of numbers, got {raw!r}")


def _build_dgp(entries: dict) -> DgpSpec:
    if "dgp.kind" not in entries:
        raise ConfigError("missing required key dgp.kind")
    kind_raw, kind_line = entries["dgp.kind"]
    kind = kind_raw.strip().lower()
    if kind not in _DGP_KEYS:
        raise ConfigError(f"line {kind_line}: dgp.kind must be one of {sorted(_DGP_KEYS)}, got {kind_raw!r}")
    allowed = _DGP_KEYS[kind]
    params = {}
    for full_key, (raw, lineno) in entries.items():
        if not full_key.startswith("dgp.") or full_key == "dgp.kind":
            continue
        name = full_key[len("dgp."):]
        if name not in allowed:
            raise ConfigError(f"line {lineno}: {full_key} is not a parameter of dgp.kind={kind}")
        if name in ("coefficients", "beta_true"):
            params[name] = _parse_float_list(full_key, raw, lineno)
        else:
            params[name] = _parse_number(full_key, raw, float, lineno)
    try:
        if kind == "iid_gaussian":
            return IidGaussian(**params)
        if kind == "ar1":
            if "rho" not in params:
                raise ConfigError("ar1 DGP requires dgp.rho")
            return Ar1(**params)
        if kind == "ma":
            if "coefficients" not in params:
                raise ConfigError("ma DGP requires dgp.coefficients")
            return Ma(**params)
        if "beta_true" not in params:
            raise ConfigError("regression DGP requires dgp.beta_true")
        return RegressionDgp(**params)
    except ParameterError as exc:
        raise ConfigError(f"dgp: {exc}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` config text into an :class:`ExperimentConfig`."""
    entries = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line.strip()!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key not in _TOP_KEYS and not key.startswith("dgp."):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        entries[key] = (value, lineno)

    dgp = _build_dgp(entries)

    def top(key):
        return entries.get(key, (None, 0))

    def require_int(key):
        raw, lineno = top(key)
        if raw is None:
            raise ConfigError(f"missing required key {key}")
        return _parse_number(key, raw, int, lineno)

    def opt_int(key, default):
        raw, lineno = top(key)
        return default if raw is None else _parse_number(key, raw, int, lineno)

    def opt_float(key, default):
        raw, lineno = top(key)
        return default if raw is None else _parse_number(key, raw, float, lineno)

    block_raw, block_line = top("block_len")
    if block_raw is None or block_raw.strip().lower() == "auto":
        block_len = None
    else:
        block_len = _parse_number("block_len", block_raw, int, block_line)

    out_raw, _ = top("out")
    selector_raw, _ = top("selector")
    mstar_raw, _ = top("mstar")
    max_size_raw, max_size_line = top("max_size")
    max_size = None if max_size_raw is None else _parse_number("max_size", max_size_raw, int, max_size_line)

    return ExperimentConfig(
        dgp=dgp,
        n_half=require_int("n_half"),
        replications=require_int("replications"),
        bootstrap_B=opt_int("bootstrap_B", DEFAULTS["bootstrap_B"]),
        block_len=block_len,
        alpha=opt_float("alpha", DEFAULTS["alpha"]),
        gap=opt_int("gap", DEFAULTS["gap"]),
        selector=selector_raw if selector_raw is not None else DEFAULTS["selector"],
        max_size=max_size,
        mstar=mstar_raw if mstar_raw is not None else DEFAULTS["mstar"],
        base_seed=opt_int("base_seed", DEFAULTS["base_seed"]),
        out=out_raw,
    )


def load_config(path) -> ExperimentConfig:
    """Read and parse a config file (UTF-8)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    return parse_config(text)


def _dgp_lines(dgp: DgpSpec) -> list:
    if isinstance(dgp, IidGaussian):
        return ["dgp.kind = iid_gaussian", f"dgp.mean = {dgp.mean!r}", f"dgp.sd = {dgp.sd!r}"]
    if isinstance(dgp, Ar1):
        return ["dgp.kind = ar1", f"dgp.rho = {dgp.rho!r}",
                f"dgp.innovation_sd = {dgp.innovation_sd!r}"]
    if isinstance(dgp, Ma):
        coef = ", ".join(repr(c) for c in dgp.coefficients)
        return ["dgp.kind = ma", f"dgp.coefficients = {coef}"]
    beta = ", ".join(repr(b) for b in dgp.beta_true)
    return ["dgp.kind = regression", f"dgp.beta_true = {beta}",
            f"dgp.design_rho = {dgp.design_rho!r}", f"dgp.cross_corr = {dgp.cross_corr!r}",
            f"dgp.noise_rho = {dgp.noise_rho!r}", f"dgp.noise_sd = {dgp.noise_sd!r}"]


def serialize_config(config: ExperimentConfig) -> str:
    """Render a config as text that parses back to an identical config."""
    lines = _dgp_lines(config.dgp)
    lines.append(f"n_half = {config.n_half}")
    lines.append(f"replications = {config.replications}")
    lines.append(f"bootstrap_B = {config.bootstrap_B}")
    lines.append(f"block_len = {'auto' if config.block_len is None else config.block_len}")
    lines.append(f"alpha = {config.alpha!r}")
    lines.append(f"gap = {config.gap}")
    lines.append(f"selector = {config.selector}")
    if config.max_size is not None:
        lines.append(f"max_size = {config.max_size}")
    lines.append(f"mstar = {config.mstar}")
    lines.append(f"base_seed = {config.base_seed}")
    if config.out is not None:
        lines.append(f"out = {config.out}")
    return "\n".join(lines) + "\n"


def config_as_dict(config: ExperimentConfig) -> dict:
    """Config echo for summary.json (same keys as the file format)."""
    echo = {}
    for line in serialize_config(config).splitlines():
        key, _, value = line.partition(" = ")
        echo[key] = value
    return echo


@dataclass(frozen=True)
class CoverageReport:
    """Aggregated experiment results plus the per-replication records."""

    coverage: float
    mc_stderr: float
    mean_sigma_star: float
    median_half_width: float
    p_in_mstar: float
    model_frequency: dict
    failures: int
    n_success: int
    records: tuple
    config: ExperimentConfig


def _run_one(args) -> ReplicationRecord:
    config, rep = args
    seed = replication_seed(config.base_seed, rep)
    candidates = enumerate_candidates(config.dgp_p, config.effective_max_size)
    selector = make_selector(config.selector)
    mstar = _MSTAR_RULES[config.mstar](config.dgp, candidates)
    try:
        return run_replication(
            config.dgp, config.n_half, selector, candidates,
            B=config.bootstrap_B, block_len=config.block_len, alpha=config.alpha,
            gap=config.gap, seed=seed, mstar=mstar,
        )
    except TsplitError as exc:
        return ReplicationRecord(
            seed=seed, model=None, beta_hat=float("nan"), sigma_star=float("nan"),
            ci=None, target=float("nan"), covered=None, in_mstar=None,
            fail_reason=type(exc).__name__,
        )


def run_experiment(config: ExperimentConfig, workers: int = 1) -> CoverageReport:
    """Run all replications and aggregate.

    Replication r uses seed ``base_seed XOR splitmix64(r)`` (r = 1..R), so
    the report does not depend on ``workers``. Raises
    :class:`ExperimentError` when at least 5% of replications fail.
    """
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    tasks = [(config, rep) for rep in range(1, config.replications + 1)]
    if workers == 1:
        records = [_run_one(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (8 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, tasks, chunksize=chunk))

    failures = sum(1 for r in records if r.failed)
    if failures >= MAX_REPLICATION_FAILURE * config.replications:
        reasons = {}
        for r in records:
            if r.failed:
                reasons[r.fail_reason] = reasons.get(r.fail_reason, 0) + 1
        detail = ", ".join(f"{k}: {v}" for k, v in sorted(reasons.items()))
        raise ExperimentError(
            f"{failures}/{config.replications} replications failed ({detail})"
        )

    good = [r for r in records if not r.failed]
    n_success = len(good)
    covered = sum(1 for r in good if r.covered)
    coverage = covered / n_success
    freq = {}
    for r in good:
        label = r.model.label()
        freq[label] = freq.get(label, 0) + 1
    return CoverageReport(
        coverage=coverage,
        mc_stderr=float(np.sqrt(coverage * (1.0 - coverage) / n_success)),
        mean_sigma_star=float(np.mean([r.sigma_star for r in good])),
        median_half_width=float(np.median([r.ci.half_width for r in good])),
        p_in_mstar=sum(1 for r in good if r.in_mstar) / n_success,
        model_frequency=freq,
        failures=failures,
        n_success=n_success,
        records=tuple(records),
        config=config,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _csv_row(rep: int, record: ReplicationRecord) -> list:
    if record.failed:
        return [str(rep), str(record.seed), "", "", "", "", "", "", "", "", record.fail_reason]
    return [
        str(rep), str(record.seed), record.model.label(),
        _fmt(record.beta_hat), _fmt(record.sigma_star),
        _fmt(record.ci.lower), _fmt(record.ci.upper), _fmt(record.target),
        "1" if record.covered else "0", "1" if record.in_mstar else "0", "",
    ]


def render_csv(report: CoverageReport) -> str:
    """The replications.csv payload (17-significant-digit floats)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rep, record in enumerate(report.records, start=1):
        writer.writerow(_csv_row(rep, record))
    return buffer.getvalue()


def render_summary(report: CoverageReport) -> str:
    """The summary.json payload."""
    payload = {
        "coverage": report.coverage,
        "mc_stderr": report.mc_stderr,
        "mean_sigma_star": report.mean_sigma_star,
        "median_half_width": report.median_half_width,
        "p_in_mstar": report.p_in_mstar,
        "model_frequency": report.model_frequency,
        "failures": report.failures,
        "n_success": report.n_success,
        "replications": report.config.replications,
        "config": config_as_dict(report.config),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def emit_report(report: CoverageReport, out_dir) -> tuple:
    """Write summary.json and replications.csv; returns the two paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        summary_path = out / "summary.json"
        csv_path = out / "replications.csv"
        summary_path.write_text(render_summary(report), encoding="utf-8")
        csv_path.write_text(render_csv(report), encoding="utf-8")
    except OSError as exc:
        raise ExperimentError(f"cannot write report under {out}: {exc}")
    return summary_path, csv_path
