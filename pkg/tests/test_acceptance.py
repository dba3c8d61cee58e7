"""Acceptance suite: one test per criterion, desk-scale budgets, printed verdicts.

The three experiment fixtures run the complete pipelines (generate,
identify, four baselines, evaluate) once per session over seeds 0..9 and
feed every criterion test. Each test prints a single PASS/FAIL line; run
with ``-s`` (or ``-rA``) to see the lines for passing tests too.

Two assertions are expected to stay red and are left failing on purpose;
their docstrings carry the condensed analysis:

* criterion 2's exact-zero overlap in every MI-passing seed, and
* criterion 3's 0.25 silhouette window against the best baseline.

Both trace to the same measured fact: the quality metric's optimum tiles
the staircase data with concepts whose boundaries abut inside continuous
data, so boundary-adjacent samples flip their nearest neighbor with
order-one probability per seed, and the truncated-k-means baseline keeps
only tiny cores whose silhouette (~0.85) sits ~0.28 above the concept
tiling (~0.57).
"""

import math
import time

import numpy as np
import numpy.testing as npt
import pytest

import conceptid as ci
from conceptid import cmaes
from conceptid import experiments as ex
from conceptid.concept_core import CandidateSets, CqmConfig, assign_concepts, concept_quality, scaling_f
from conceptid.geometry import Ellipsoid, EllipsoidSet, num_params

SEEDS = ex.default_seeds("desk")


def _verdict(name, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


@pytest.fixture(scope="session")
def results_2d():
    cfg = ex.experiment_config("2d", "desk")
    start = time.perf_counter()
    results = [ex.run_seed(cfg, seed) for seed in SEEDS]
    return results, time.perf_counter() - start


@pytest.fixture(scope="session")
def results_4d():
    cfg = ex.experiment_config("4d", "desk")
    return [ex.run_seed(cfg, seed) for seed in SEEDS]


@pytest.fixture(scope="session")
def results_energy():
    cfg = ex.experiment_config("energy", "desk")
    return [ex.run_seed(cfg, seed) for seed in SEEDS]


def test_criterion_1_2d_mi_dominance(results_2d):
    """2-D experiment: concept MI beats every baseline in >= 9/10 seeds, < 15 min."""
    results, elapsed = results_2d
    assessment = ex.assess_2d(results)["mi_dominance"]
    detail = (f"{assessment['passes']}/{len(results)} seeds dominate "
              f"(required {assessment['required']}), block took {elapsed:.0f}s")
    ok = _verdict("criterion 1 (2d MI dominance)", assessment["ok"] and elapsed < 900, detail)
    assert assessment["ok"], detail
    assert elapsed < 900, f"2d block exceeded 15 minutes: {elapsed:.0f}s"
    assert ok


def test_criterion_2_2d_exact_nonoverlap(results_2d):
    """2-D experiment: exact-zero overlap and disjoint member intervals per passing seed.

    The interval-disjointness half holds in every seed. The exact-zero
    overlap half is structurally out of reach at n=5000: the quality
    optimum leaves no margin between adjacent concepts, so one or two
    boundary samples flip their nearest neighbor in most seeds (measured
    pass rate roughly 1-3 seeds in 10). Kept faithful and red; see the
    module docstring.
    """
    results, _ = results_2d
    assessment = ex.assess_2d(results)
    per_seed = assessment["exact_nonoverlap"]["per_seed"]
    flips = {
        r.seed: {name: round(v * sum(r.concept_counts)) for name, v in r.overlap["concept"].items()}
        for r in results
    }
    detail = f"exact-zero per passing seed: {per_seed}; boundary flips: {flips}"
    ok = _verdict("criterion 2 (2d exact non-overlap)", assessment["exact_nonoverlap"]["ok"], detail)
    for r in results:
        assert all(ex._intervals_disjoint(ivs) for ivs in r.member_intervals.values()), \
            f"seed {r.seed}: member intervals overlap"
    assert ok, detail


def test_invariant_2d_overlap_below_untruncated_baselines(results_2d):
    """Concept overlap sits below plain k-means and GMM overlap in every subspace and seed."""
    results, _ = results_2d
    for r in results:
        for sub in r.overlap["concept"]:
            assert r.overlap["concept"][sub] < r.overlap["kmeans"][sub]
            assert r.overlap["concept"][sub] < r.overlap["gmm"][sub]
    assert _verdict("invariant (2d concept overlap below untruncated baselines)", True,
                    f"all {len(results)} seeds, both subspaces")


def test_criterion_3_2d_silhouette_comparable(results_2d):
    """2-D experiment: concept silhouette within 0.25 of the best baseline, >= 8/10.

    Measured: concept tilings score 0.55-0.64 while radius-truncated
    k-means keeps ~8% cores scoring ~0.85, a gap that straddles the 0.25
    window (7/10 seeds inside at these seeds). Kept faithful; red by one
    seed. The concept solution does beat both untruncated baselines in
    every seed.
    """
    results, _ = results_2d
    assessment = ex.assess_2d(results)["silhouette_comparable"]
    values = {
        r.seed: (
            round(r.silhouette_joint["concept"], 3),
            round(max(v for m, v in r.silhouette_joint.items() if m != "concept" and v is not None), 3),
        )
        for r in results
    }
    detail = (f"{assessment['passes']}/{len(results)} within 0.25 "
              f"(required {assessment['required']}); (concept, best baseline) = {values}")
    ok = _verdict("criterion 3 (2d silhouette comparable)", assessment["ok"], detail)
    for r in results:  # sanity: concepts beat the untruncated classics outright
        assert r.silhouette_joint["concept"] > r.silhouette_joint["kmeans"]
        assert r.silhouette_joint["concept"] > r.silhouette_joint["gmm"]
    assert ok, detail


def test_criterion_4_4d_overlap_and_mi(results_4d):
    """4-D experiment: concept overlap < 0.02 both subspaces, baselines > 0.2,
    concept MI above every baseline, >= 8/10 seeds."""
    assessment = ex.assess_4d(results_4d)
    detail = f"{assessment['passes']}/{len(results_4d)} seeds pass (required {assessment['required']})"
    ok = _verdict("criterion 4 (4d overlap + MI)", assessment["ok"], detail)
    assert ok, f"{detail}; per seed: {assessment['per_seed']}"


def test_criterion_5_energy_structure(results_energy):
    """Energy surrogate: deliverable model with three concepts, disjoint investment
    intervals, zero operation-subspace overlap, verified archetypes."""
    assessment = ex.assess_energy(results_energy)
    detail = (f"selected seed {assessment['selected_seed']} (q={assessment['q']:.3f}), "
              f"valid seeds {assessment['valid_seeds']}")
    ok = _verdict("criterion 5 (energy structure)", assessment["ok"], detail)
    assert assessment["three_concepts"], "selected model must have three live concepts"
    assert assessment["disjoint_investment"], "investment intervals must be pairwise disjoint"
    assert assessment["operation_overlap_zero"], "operation-subspace overlap must be exactly 0"
    assert assessment["archetypes_verified"], "archetypes must equal the nearest-to-mean samples"
    assert ok, detail


def test_criterion_6_estimator_calibration():
    """KSG estimator: Gaussian oracle within 0.1 nats, independence within 0.05,
    permutation test p <= 0.005 when dependent, false positives <= 10%."""
    oracle = -0.5 * math.log(1 - 0.81)
    rng = np.random.default_rng(0)
    z = rng.standard_normal((2000, 2))
    x, y = z[:, 0], 0.9 * z[:, 0] + math.sqrt(1 - 0.81) * z[:, 1]
    gauss_err = abs(ci.ksg_mi(x, y, k=4).value - oracle)

    rng = np.random.default_rng(1)
    indep_val = abs(ci.ksg_mi(rng.standard_normal(2000), rng.standard_normal(2000), k=4).value)

    dependent_p = ci.mi_permutation_test(x[:500], y[:500], k=4, n_perm=200, seed=0).p_value

    false_positives = 0
    for seed in range(20):
        srng = np.random.default_rng(1000 + seed)
        res = ci.mi_permutation_test(srng.standard_normal(500), srng.standard_normal(500),
                                     k=4, n_perm=200, seed=seed)
        false_positives += res.p_value <= 0.05

    detail = (f"gaussian err {gauss_err:.4f} (<=0.1), independent |MI| {indep_val:.4f} (<=0.05), "
              f"dependent p {dependent_p:.5f} (<=0.005), false positives {false_positives}/20 (<=2)")
    ok = _verdict("criterion 6 (estimator calibration)",
                  gauss_err <= 0.1 and indep_val <= 0.05 and dependent_p <= 0.005 and false_positives <= 2,
                  detail)
    assert ok, detail


def brute_force_assign(masks):
    n_c, n_s, n = masks.shape
    labels = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        for alpha in range(n_c):
            if all(masks[alpha, k, i] for k in range(n_s)) and not any(
                masks[beta, k, i] for beta in range(n_c) if beta != alpha for k in range(n_s)
            ):
                labels[i] = alpha
                break
    return labels


def test_criterion_7a_assignment_oracle():
    """Assignment equals the per-sample predicate oracle on 200 random instances."""
    rng = np.random.default_rng(42)
    for _ in range(200):
        masks = rng.random((rng.integers(1, 4), rng.integers(1, 4), rng.integers(1, 51))) < rng.uniform(0.2, 0.8)
        npt.assert_array_equal(assign_concepts(CandidateSets(masks)).labels, brute_force_assign(masks))
    assert _verdict("criterion 7a (assignment oracle, 200 instances)", True, "all equal")


def test_criterion_7b_quality_bounds_random_regions():
    """Q and every Q_alpha stay inside [0, 1] for 1000 random region sets."""
    rng = np.random.default_rng(7)
    ds = ci.gen_2d(60, seed=0)
    cfg = ci.SubspaceConfig.from_column_names([("f1", ["f1"]), ("f2", ["f2"])], ds.column_names)
    for _ in range(1000):
        rows = tuple(
            tuple(Ellipsoid([rng.uniform(-2, 12)], [rng.uniform(1e-6, 12)], []) for _ in range(2))
            for _ in range(rng.integers(1, 4))
        )
        cands = ci.candidate_sets(EllipsoidSet(rows), ds, cfg)
        q_alpha, q = concept_quality(assign_concepts(cands), cands, ds.n_samples, CqmConfig())
        assert np.all((q_alpha >= 0.0) & (q_alpha <= 1.0 + 1e-12))
        assert 0.0 <= q <= 1.0 + 1e-12
    assert _verdict("criterion 7b (quality bounds, 1000 region sets)", True, "0 <= Q_alpha, Q <= 1")


def test_criterion_7c_window_function_values():
    """Window function: continuity plus the frozen hand values 0, 1, sqrt(3)/2."""
    npt.assert_allclose(scaling_f(0.05, 0.1), math.sqrt(0.75))
    assert scaling_f(0.0, 0.1) == 0.0 and scaling_f(1.0, 0.1) == 0.0
    assert scaling_f(0.5, 0.1) == 1.0
    for delta in (1e-9, 1e-6):
        assert abs(scaling_f(0.1 - delta, 0.1) - 1.0) < 1e-4
        assert abs(scaling_f(0.9 + delta, 0.1) - 1.0) < 1e-4
    assert _verdict("criterion 7c (window function)", True, "hand values + continuity")


def test_criterion_7d_parameter_counts():
    """Region parameter totals for the three experiment setups: 12, 30, 21."""
    counts = (num_params([1, 1], 3), num_params([2, 2], 3), num_params([1, 2], 3))
    ok = counts == (12, 30, 21)
    assert _verdict("criterion 7d (parameter counts)", ok, f"{counts} == (12, 30, 21)")


def test_criterion_7e_sphere_convergence():
    """CMA-ES reaches the analytic sphere optimum within 1e-6 in >= 9/10 seeds."""
    hits = 0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        target = rng.uniform(-1, 1, 10)
        res = cmaes.run(lambda g: -float(np.sum((g - target) ** 2)), 10,
                        cmaes.CmaesConfig(population_size=10, generations=1500, initial_sigma=0.5, seed=seed))
        hits += np.linalg.norm(res.best_genotype - target) < 1e-6
    ok = hits >= 9
    assert _verdict("criterion 7e (sphere convergence)", ok, f"{hits}/10 seeds within 1e-6")


def test_criterion_7f_iteration_monotonicity_and_subsets():
    """k-means inertia non-increasing, EM log-likelihood non-decreasing,
    truncations only unassign."""
    rng = np.random.default_rng(3)
    x = np.vstack([rng.normal(c, 1.0, (200, 3)) for c in (0.0, 5.0, 10.0)])
    km = ci.kmeans(x, 3, seed=1)
    assert np.all(np.diff(km.inertia_history) <= 1e-9)
    gm = ci.gmm_em(x, 3, seed=1)
    assert np.all(np.diff(gm.loglik_history) >= -1e-9)
    km_trunc = ci.truncate_by_radius(km, x, 0.5)
    gm_trunc = ci.truncate_by_responsibility(gm, 0.9)
    assert np.all((km_trunc.labels == km.labels.labels) | (km_trunc.labels == -1))
    assert np.all((gm_trunc.labels == gm.labels.labels) | (gm_trunc.labels == -1))
    assert _verdict("criterion 7f (monotonicity + subsets)", True,
                    f"kmeans {km.n_iter} iters, gmm {gm.n_iter} iters")


def test_criterion_7g_pipelines_bit_reproducible():
    """Same seed, same inputs: identification, baselines, and reports byte-identical."""
    ds = ci.gen_2d(600, seed=5)
    cfg = ci.SubspaceConfig.from_column_names([("f1", ["f1"]), ("f2", ["f2"])], ds.column_names)

    def pipeline():
        model = ci.identify_concepts(ds, cfg, 3, cmaes_config=cmaes.CmaesConfig(10, 60, 0.3, seed=2))
        km = ci.kmeans(ds, 3, seed=2)
        gm = ci.gmm_em(ds, 3, seed=2)
        labelings = {
            "concept": model.labeling,
            "kmeans_trunc": ci.truncate_by_radius(km, ds, 0.2),
            "gmm_trunc": ci.truncate_by_responsibility(gm, 0.9),
        }
        report = ci.consistency_report(ds, cfg, labelings, k=4, n_perm=20, seed=0)
        from conceptid.util import canonical_json
        return model.to_json(ds.column_names), canonical_json(report.to_json_dict())

    first, second = pipeline(), pipeline()
    ok = first == second
    assert _verdict("criterion 7g (bit-reproducible pipelines)", ok,
                    f"model json {len(first[0])} bytes, report json {len(first[1])} bytes")
