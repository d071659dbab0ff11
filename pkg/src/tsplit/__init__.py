"""Post-model-selection bootstrap inference for weakly dependent time series.

Pipeline: simulate a weakly dependent (response, covariates) panel, split it
in half, select a model on the first half, run the block multiplier
bootstrap on the second half, and form a normal-quantile interval around the
selected coefficient. A Monte Carlo harness measures the interval's coverage
of the selected model's population projection coefficient.
"""

from .backend import BACKEND
from .dgp import (
    Ar1,
    DataPanel,
    DgpSpec,
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
from .errors import (
    BootstrapInstabilityError,
    ConfigError,
    ExperimentError,
    InsufficientDataError,
    ParameterError,
    SelectionFailureError,
    SingularDesignError,
    TsplitError,
)
from .harness import (
    CoverageReport,
    ExperimentConfig,
    emit_report,
    load_config,
    parse_config,
    run_experiment,
    serialize_config,
)
from .inference import (
    ConfidenceInterval,
    LongRunCovariance,
    ReplicationRecord,
    confidence_interval,
    delta_method_sd,
    long_run_covariance_oracle,
    normal_quantile,
    oracle_target,
    population_psi,
    run_replication,
)
from .moments import (
    ModelSpec,
    MomentVector,
    compute_psi,
    g_of_psi,
    grad_g,
    per_observation_contributions,
)
from .selection import (
    CandidateSet,
    enumerate_candidates,
    make_selector,
    select_bic,
    select_threshold,
)
from .splitboot import (
    BlockScheme,
    BootstrapResult,
    bootstrap_distribution,
    default_block_len,
    make_blocks,
    multiplier_draw,
    split_sample,
)

__version__ = "0.1.0"
