"""Acceptance suite: one test per release criterion.

Each test prints a single [PASS]/[FAIL] line with the measured numbers so a
full run doubles as a verification report (run with ``pytest -s`` to see the
lines as they complete). All runs are seeded, so outcomes are reproducible.
"""

import time

import numpy as np

from tsplit.dgp import Ar1, IidGaussian, RegressionDgp, gen_ar1
from tsplit.harness import ExperimentConfig, emit_report, run_experiment
from tsplit.inference import delta_method_sd, run_replication
from tsplit.moments import (
    ModelSpec,
    MomentVector,
    compute_psi,
    g_of_psi,
    grad_g,
    per_observation_contributions,
)
from tsplit.selection import CandidateSet, select_bic
from tsplit.splitboot import block_sums, bootstrap_distribution, make_blocks


def report(name, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_acceptance_1_conditional_bootstrap_variance():
    # fixed panel, n=12, l=3, univariate mean, B=200000: the sample variance
    # of sqrt(n)(beta* - beta_hat) must match the exact n^-1 sum_b S_b^2
    # within 1%, in under 10 s
    start = time.perf_counter()
    n, B = 12, 200_000
    y = gen_ar1(n, 0.4, 1.0, seed=314)
    data = np.column_stack([y, np.ones(n)])
    model = ModelSpec((1,))
    scheme = make_blocks(n, 3)
    sums = block_sums(per_observation_contributions(data, model), scheme)
    exact = float((sums[:, 1] ** 2).sum()) / n
    res = bootstrap_distribution(data, model, B=B, block_len=3, seed=2718)
    mc = float(np.var(np.sqrt(n) * (res.replicates - res.beta_hat)))
    rel_err = abs(mc - exact) / exact
    elapsed = time.perf_counter() - start
    report("conditional bootstrap variance",
           rel_err <= 0.01 and elapsed < 10.0,
           f"mc={mc:.6f} exact={exact:.6f} rel_err={rel_err:.4%} time={elapsed:.2f}s")


def test_acceptance_2_iid_nominal_coverage():
    # iid N(0,1) mean, singleton candidate set, n=500, l=1, B=500,
    # alpha=0.05, R=2000: coverage in [0.93, 0.97], under 5 min serial
    start = time.perf_counter()
    config = ExperimentConfig(dgp=IidGaussian(), n_half=500, replications=2000,
                              bootstrap_B=500, block_len=1, alpha=0.05,
                              base_seed=20_001)
    rep = run_experiment(config, workers=1)
    elapsed = time.perf_counter() - start
    report("iid nominal coverage",
           0.93 <= rep.coverage <= 0.97 and elapsed < 300.0,
           f"coverage={rep.coverage:.4f} (mc stderr {rep.mc_stderr:.4f}) time={elapsed:.1f}s")


def test_acceptance_3_dependence_matters():
    # AR(1)(0.5) mean, n=1000, R=1000: ignoring dependence (l=1) must
    # undercover near the 2*Phi(1.96/sqrt(3))-1 ~ 0.742 prediction (+-0.04),
    # while l=10 restores near-nominal coverage; under 10 min
    start = time.perf_counter()
    base = dict(dgp=Ar1(rho=0.5), n_half=1000, replications=1000,
                bootstrap_B=500, alpha=0.05, base_seed=30_003)
    naive = run_experiment(ExperimentConfig(block_len=1, **base))
    blocked = run_experiment(ExperimentConfig(block_len=10, **base))
    elapsed = time.perf_counter() - start
    predicted = 0.742  # variance-ratio oracle: (1+rho)/(1-rho) = 3
    ok = (naive.coverage <= 0.80
          and abs(naive.coverage - predicted) <= 0.04
          and 0.91 <= blocked.coverage <= 0.97
          and elapsed < 600.0)
    report("dependence matters", ok,
           f"l=1 coverage={naive.coverage:.4f} (predicted ~{predicted}) "
           f"l=10 coverage={blocked.coverage:.4f} time={elapsed:.1f}s")


def test_acceptance_4_post_selection_coverage():
    # Theorem-style end-to-end: p=2 regression with dependence and BIC
    # selection; M* = supersets of the true support; n=1000, B=500, l=10,
    # R=1000: P(m-hat in M*) >= 0.95 and coverage in [0.91, 0.97]; < 20 min
    start = time.perf_counter()
    config = ExperimentConfig(
        dgp=RegressionDgp(beta_true=(1.0, 0.5), cross_corr=0.5, design_rho=0.3,
                          noise_rho=0.3, noise_sd=1.0),
        n_half=1000, replications=1000, bootstrap_B=500, block_len=10,
        alpha=0.05, selector="bic", mstar="supersets_of_true_support",
        base_seed=40_004,
    )
    rep = run_experiment(config, workers=1)
    elapsed = time.perf_counter() - start
    ok = (rep.p_in_mstar >= 0.95 and 0.91 <= rep.coverage <= 0.97
          and elapsed < 1200.0)
    report("post-selection coverage", ok,
           f"P(m in M*)={rep.p_in_mstar:.4f} coverage={rep.coverage:.4f} "
           f"models={rep.model_frequency} time={elapsed:.1f}s")


def test_acceptance_5_delta_method_consistency():
    # fixed-model configuration: mean sigma* over 200 replications within
    # 10% of sqrt(grad' Sigma grad) (truncation 50, simulation n=10^6)
    spec = RegressionDgp(beta_true=(1.0, 0.5), cross_corr=0.5, design_rho=0.3,
                         noise_rho=0.3, noise_sd=1.0)
    model = ModelSpec((1, 2))
    fixed = CandidateSet(models=(model,), max_size=2)
    sigmas = [
        run_replication(spec, n_half=1000, selector=select_bic, candidates=fixed,
                        B=500, block_len=10, alpha=0.05, gap=0, seed=50_005 + r).sigma_star
        for r in range(200)
    ]
    mean_sigma = float(np.mean(sigmas))
    benchmark = delta_method_sd(spec, model, truncation=50, sim_n=1_000_000, seed=55)
    rel_err = abs(mean_sigma - benchmark) / benchmark
    report("delta-method consistency", rel_err <= 0.10,
           f"mean sigma*={mean_sigma:.4f} sqrt(grad'Sigma grad)={benchmark:.4f} "
           f"rel_err={rel_err:.2%}")


def test_acceptance_6_gradient_check():
    # analytic gradient vs central finite differences on 100 random
    # well-conditioned moment vectors: relative error <= 1e-6
    rng = np.random.default_rng(60_006)
    worst = 0.0
    checked = 0
    while checked < 100:
        k = int(rng.integers(1, 4))
        x = rng.standard_normal((60, k))
        y = rng.standard_normal(60)
        psi = compute_psi(np.column_stack([y, x]), ModelSpec(tuple(range(1, k + 1))))
        eig = np.abs(np.linalg.eigvalsh(psi.expand_gram()))
        if eig.min() / eig.max() < 1e-6:
            continue
        coord = int(rng.integers(0, k))
        analytic = grad_g(psi, coord)
        vec = psi.as_vector()
        fd = np.empty_like(vec)
        for j in range(vec.size):
            step = 1e-6 * (1.0 + abs(vec[j]))
            up, dn = vec.copy(), vec.copy()
            up[j] += step
            dn[j] -= step
            fd[j] = (g_of_psi(MomentVector.from_vector(psi.model, up, 1))[coord]
                     - g_of_psi(MomentVector.from_vector(psi.model, dn, 1))[coord]) / (2 * step)
        rel = np.linalg.norm(analytic - fd) / max(1.0, np.linalg.norm(analytic))
        worst = max(worst, rel)
        checked += 1
    report("gradient check", worst <= 1e-6, f"worst relative error={worst:.3e} over 100 draws")


def test_acceptance_7_parallel_determinism(tmp_path):
    # identical configs under 1 and 8 workers: bit-identical replications.csv
    config = ExperimentConfig(
        dgp=RegressionDgp(beta_true=(1.0, 0.5), cross_corr=0.5),
        n_half=200, replications=24, bootstrap_B=100, block_len=5,
        base_seed=70_007,
    )
    emit_report(run_experiment(config, workers=1), tmp_path / "w1")
    emit_report(run_experiment(config, workers=8), tmp_path / "w8")
    csv1 = (tmp_path / "w1" / "replications.csv").read_bytes()
    csv8 = (tmp_path / "w8" / "replications.csv").read_bytes()
    report("parallel determinism", csv1 == csv8,
           f"{len(csv1)} bytes, identical={csv1 == csv8}")


def test_acceptance_8_interval_width_scaling():
    # iid configuration at n=500 and n=2000: median half-width must scale
    # like n^-0.5, so the ratio is 0.5 within +-15%
    def median_hw(n_half, seed):
        config = ExperimentConfig(dgp=IidGaussian(), n_half=n_half, replications=300,
                                  bootstrap_B=500, block_len=1, base_seed=seed)
        return run_experiment(config).median_half_width

    hw_small = median_hw(500, 80_008)
    hw_large = median_hw(2000, 80_009)
    ratio = hw_large / hw_small
    report("interval width scaling", abs(ratio / 0.5 - 1.0) <= 0.15,
           f"median hw n=500: {hw_small:.5f}, n=2000: {hw_large:.5f}, ratio={ratio:.4f}")
