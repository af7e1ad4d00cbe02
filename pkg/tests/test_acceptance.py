"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
report.  Criterion 2 is expected to fail at m=9 and m=10: the shipped
reference values there (0.98, 1.00) are not reproducible by the underlying
integral, whose high-precision value is 0.902 / 0.917 (confirmed by
deterministic quadrature, two independent samplers, and direct graph
simulation); see the repository notes for the full analysis.
"""

import math
import time

import numpy as np
import pytest

from manifold_xi import (
    ExperimentConfig,
    REFERENCE_TRIPLE_LIMITS,
    TRIPLE_LIMIT_1D,
    ball_geometry,
    estimate_constants_empirical,
    min_kernel_moments,
    nn_pair_limit,
    nn_triple_limit_mc,
    run_experiment,
    xi_n,
)
from manifold_xi.nn_graph import _nn_brute, _nn_tree
from manifold_xi.rngs import substream

EXPECTED_PAIR_2DP = (0.67, 0.62, 0.59, 0.57, 0.56, 0.55, 0.54, 0.53, 0.53, 0.52)
SIGMA2_1D_EXACT = 16.0 / 15.0


def report(num, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")
    return ok


@pytest.fixture(scope="module")
def triple_estimates():
    """10^6-sample triple-limit estimates for m=1..10, shared across criteria."""
    start = time.perf_counter()
    estimates = {m: nn_triple_limit_mc(m, samples=10**6, seed=4200 + m)
                 for m in range(1, 11)}
    return estimates, time.perf_counter() - start


def test_criterion_1_pair_constant_table():
    start = time.perf_counter()
    values = [nn_pair_limit(m) for m in range(1, 11)]
    elapsed = time.perf_counter() - start
    rounded = tuple(round(v, 2) for v in values)
    ok = rounded == EXPECTED_PAIR_2DP
    ok &= abs(values[0] - 2.0 / 3.0) <= 1e-10
    ok &= elapsed < 1.0
    assert report(1, ok, f"pair limits 2dp={rounded}, "
                         f"|q1 - 2/3|={abs(values[0] - 2/3):.2e}, "
                         f"elapsed={elapsed:.3f}s")


def test_criterion_2_triple_constant_table(triple_estimates):
    estimates, elapsed = triple_estimates
    mismatches = []
    for m in range(1, 11):
        est, se = estimates[m]
        line = f"m={m}: estimate={est:.4f}+-{se:.4f} reference={REFERENCE_TRIPLE_LIMITS[m]}"
        if abs(est - REFERENCE_TRIPLE_LIMITS[m]) > 0.03:
            mismatches.append(line)
        print("   " + line)
    exact_ok = abs(estimates[1][0] - TRIPLE_LIMIT_1D) <= 0.01
    runtime_ok = elapsed < 120.0
    ok = not mismatches and exact_ok and runtime_ok
    report(2, ok, f"{10 - len(mismatches)}/10 within 0.03 of the reference row; "
                  f"|m=1 - 0.5|={abs(estimates[1][0] - 0.5):.4f} (<=0.01: {exact_ok}); "
                  f"elapsed={elapsed:.1f}s (<120s: {runtime_ok})")
    assert exact_ok and runtime_ok
    assert not mismatches, "reference-row mismatches: " + "; ".join(mismatches)


def test_criterion_3_geometric_consistency():
    worst = 0.0
    for m in range(1, 21):
        geom = ball_geometry(m)
        ratio = geom.unit_ball_volume / geom.unit_union_volume
        worst = max(worst, abs(nn_pair_limit(m) - ratio))
    ok = worst < 1e-8
    assert report(3, ok, f"max |beta-form - volume-ratio| over m=1..20 = {worst:.2e}")


def test_criterion_4_monotonicity_and_bounds(triple_estimates):
    estimates, _ = triple_estimates
    values = [nn_pair_limit(m) for m in range(1, 51)]
    decreasing = all(a > b for a, b in zip(values, values[1:]))
    in_range = all(0.5 < v <= 2.0 / 3.0 + 1e-12 for v in values)
    triples_bounded = all(est < 2.0 for est, _ in estimates.values())
    ok = decreasing and in_range and triples_bounded
    assert report(4, ok, f"pair limit strictly decreasing m=1..50: {decreasing}; "
                         f"range in (0.5, 2/3]: {in_range}; "
                         f"all triple estimates < 2: {triples_bounded}")


def test_criterion_5_empirical_nn_limits(triple_estimates):
    estimates, _ = triple_estimates
    start = time.perf_counter()
    lines, ok = [], True
    for m in (1, 2, 3):
        est = estimate_constants_empirical(m=m, n=20000, reps=20,
                                           geometry="torus", seed=777 + m)
        pair_dev = abs(est.pair_rate - nn_pair_limit(m))
        triple_dev = abs(est.triple_rate - estimates[m][0])
        cell_ok = pair_dev <= 0.02 and triple_dev <= 0.05
        ok &= cell_ok
        lines.append(f"m={m}: pair dev={pair_dev:.4f} triple dev={triple_dev:.4f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600.0
    assert report(5, ok, "; ".join(lines) + f"; elapsed={elapsed:.0f}s (<600s)")


def test_criterion_6_kernel_moment_constants():
    mom = min_kernel_moments(10**6, seed=31)
    ok = (abs(mom.mean) <= 0.01 and abs(mom.second_moment - 2.0) <= 0.02
          and abs(mom.cross_moment - 0.8) <= 0.02)
    assert report(6, ok, f"mean={mom.mean:+.4f} (|.|<=0.01), "
                         f"second={mom.second_moment:.4f} (2+-0.02), "
                         f"cross={mom.cross_moment:.4f} (0.8+-0.02)")


def test_criterion_7_null_variance_realization(triple_estimates):
    estimates, _ = triple_estimates
    start = time.perf_counter()
    targets = {
        1: SIGMA2_1D_EXACT,
        2: 2 / 5 + (2 / 5) * nn_pair_limit(2) + (4 / 5) * estimates[2][0],
    }
    lines, ok = [], True
    reps, n = 4000, 1000
    for m, sigma2 in targets.items():
        values = np.empty(reps)
        for rep in range(reps):
            rng = substream((1900, m, rep))
            values[rep] = xi_n(rng.random((n, m)), rng.random(n)).value
        ratio = n * values.var(ddof=1) / sigma2
        cell_ok = abs(ratio - 1.0) <= 0.10
        ok &= cell_ok
        lines.append(f"m={m}: n*Var/sigma2 = {ratio:.4f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1200.0
    assert report(7, ok, "; ".join(lines) + f" (within 10%); elapsed={elapsed:.0f}s")


def test_criterion_8_size_validity():
    cfg = ExperimentConfig(
        cases=("gaussian",), transforms=("linear_embed", "manifold_embed"),
        m_grid=(1, 2, 3), rho_grid=(0.0,), n=100, reps=2000,
        methods=("xi_asymptotic",), master_seed=20260808,
    )
    records = run_experiment(cfg)
    lines, ok = [], True
    for rec in records:
        cell_ok = 0.035 <= rec.rejection_rate <= 0.065
        ok &= cell_ok
        lines.append(f"{rec.transform}/m={rec.m}: {rec.rejection_rate:.4f}")
    assert report(8, ok, "sizes within 0.05+-0.015: " + ", ".join(lines))


def test_criterion_9_power_spot_checks():
    # two-sided mode: the reference power tables used two-sided normal
    # thresholds (one-sided reproduces neither their size nor their power;
    # see the repository notes)
    checks = [("cosine", 0.15, 0.864, 0.06), ("linear", 0.20, 0.267, 0.05),
              ("wshape", 0.20, 0.956, 0.04)]
    lines, ok = [], True
    for case, rho, target, tol in checks:
        cfg = ExperimentConfig(cases=(case,), transforms=("manifold_embed",),
                               m_grid=(1,), rho_grid=(rho,), n=100, reps=1000,
                               methods=("xi_asymptotic",), master_seed=20260808,
                               xi_tail="two_sided")
        rec = run_experiment(cfg)[0]
        cell_ok = abs(rec.rejection_rate - target) <= tol
        ok &= cell_ok
        lines.append(f"{case} rho={rho}: {rec.rejection_rate:.3f} vs {target}+-{tol}")
    assert report(9, ok, "; ".join(lines))


def test_criterion_10_dcor_baseline():
    cfg = ExperimentConfig(cases=("gaussian",), transforms=("linear_embed",),
                           m_grid=(1,), rho_grid=(0.20,), n=100, reps=1000,
                           methods=("dcor_permutation",), B=199,
                           master_seed=20260808)
    rec = run_experiment(cfg)[0]
    ok = abs(rec.rejection_rate - 0.455) <= 0.08
    assert report(10, ok, f"dcor power {rec.rejection_rate:.3f} vs 0.455+-0.08")


def test_criterion_11_oracle_equivalence():
    rng = np.random.default_rng(1234)
    all_equal = True
    for _ in range(500):
        n = int(rng.integers(5, 201))
        d = int(rng.integers(1, 9))
        pts = rng.standard_normal((n, d)) if rng.random() < 0.7 else \
            rng.integers(0, 5, size=(n, d)).astype(float)
        if not (_nn_tree(pts) == _nn_brute(pts)).all():
            all_equal = False
            break
    hand = xi_n([[1.0], [2.0], [3.0]], [1.0, 2.0, 3.0]).value
    ok = all_equal and hand == -0.5
    assert report(11, ok, f"tree==brute on 500 random instances: {all_equal}; "
                          f"hand example xi=-0.5 exact: {hand == -0.5}")


def test_criterion_12_linear_transform_properties():
    # the linear-transform power cells themselves depend on an unpublished
    # random matrix; this covers them property-wise (two-sided mode, as in
    # criterion 9): power nondecreasing in rho, and the contrast where the
    # coefficient test has power while dcor stays near size
    lines, ok = [], True
    for case, m in (("gaussian", 1), ("cosine", 1), ("wshape", 2)):
        cfg = ExperimentConfig(cases=(case,), transforms=("linear_embed",),
                               m_grid=(m,), rho_grid=(0.0, 0.1, 0.2), n=100,
                               reps=500, methods=("xi_asymptotic",),
                               master_seed=20260808, xi_tail="two_sided")
        recs = run_experiment(cfg)
        rates = [r.rejection_rate for r in recs]
        ses = [r.mc_stderr for r in recs]
        monotone = all(rates[i + 1] >= rates[i] - 2 * math.hypot(ses[i], ses[i + 1])
                       for i in range(len(rates) - 1))
        ok &= monotone
        lines.append(f"{case}/m={m} powers {[f'{r:.3f}' for r in rates]} "
                     f"nondecreasing: {monotone}")

    cfg = ExperimentConfig(cases=("cosine",), transforms=("linear_embed",),
                           m_grid=(1,), rho_grid=(0.15,), n=100, reps=400,
                           methods=("xi_asymptotic", "dcor_permutation"), B=199,
                           master_seed=20260808, xi_tail="two_sided")
    by_method = {r.method: r.rejection_rate for r in run_experiment(cfg)}
    contrast = by_method["xi_asymptotic"] > 0.5 and by_method["dcor_permutation"] < 0.15
    ok &= contrast
    lines.append(f"oscillatory contrast xi={by_method['xi_asymptotic']:.3f} > 0.5 "
                 f"vs dcor={by_method['dcor_permutation']:.3f} < 0.15: {contrast}")
    assert report(12, ok, "; ".join(lines))
