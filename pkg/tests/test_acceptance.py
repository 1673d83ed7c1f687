"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Criterion 7 needs the BPI Challenge 2019 XES file; point the environment
variable FLOWAREAS_BPIC2019 at it to enable the check.
"""
import os
import time
from fractions import Fraction

import numpy as np
import pytest

from flowareas import (Case, Event, EventLog, analyze, business_area_contribution, contribution,
                       density, derive_dimensions, encode, kmodes, parse_xes, run_pipeline, run_suite)
from flowareas.clustering import ClusterModel, ClusteringSuite
from flowareas.features import FeatureMatrix, activity_profile, column_bound, transition_profile
from flowareas.influence import BusinessArea
from flowareas.synthgen import Dimension, Edit, Effect, SynthSpec, generate

import oracles
from conftest import ACCEPTANCE_LINES

TOL = 1e-12


def record(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


# ---------------------------------------------------------------------------
# Criteria 1 and 2: influence measures against a set-counting oracle
# ---------------------------------------------------------------------------

def random_log_and_partitions(rng):
    n = int(rng.integers(2, 201))
    acts = [chr(ord("A") + i) for i in range(int(rng.integers(1, 7)))]
    n_dims = int(rng.integers(1, 5))
    cases = []
    for i in range(n):
        seq = rng.choice(acts, size=int(rng.integers(1, 6)))
        attrs = {}
        for j in range(n_dims):
            if rng.random() < 0.9:  # some cases lack the attribute
                attrs[f"dim{j}"] = f"v{rng.integers(int(rng.integers(1, 7)))}"
        cases.append(Case(f"c{i}", [Event(str(a)) for a in seq], attrs))
    log = EventLog(cases)
    labelings = []
    for _ in range(int(rng.integers(1, 5))):
        k = int(rng.integers(1, min(n, 10) + 1))
        labels = np.concatenate([np.arange(k), rng.integers(0, k, n - k)])
        rng.shuffle(labels)
        labelings.append(labels)
    return log, labelings


def fixed_suite(labelings, case_ids):
    models = tuple(ClusterModel(int(l.max()) + 1, np.zeros((int(l.max()) + 1, 1), dtype=np.uint8),
                                l.astype(np.int64), 0, 0, 0) for l in labelings)
    return ClusteringSuite(models, tuple(m.k for m in models), 0, "random-partitions", tuple(case_ids))


@pytest.fixture(scope="module")
def influence_checks():
    """Run the 100-instance comparison once; criteria 1 and 2 read the tallies."""
    rng = np.random.default_rng(20240601)
    worst = {"density": 0.0, "contribution": 0.0, "area": 0.0, "attribute": 0.0,
             "set_api": 0.0, "single_area": 0.0, "weighted_zero": 0.0}
    partition_ok = True
    t0 = time.perf_counter()
    for _ in range(100):
        log, labelings = random_log_and_partitions(rng)
        ids = list(log.case_ids)
        table = derive_dimensions(log)
        suite = fixed_suite(labelings, ids)
        res = analyze(table, suite)

        rows = {cid: table.row(cid) for cid in ids}
        areas = oracles.areas_of(rows)
        parts = [[{c for c, l in zip(ids, labels) if l == p} for p in range(int(labels.max()) + 1)]
                 for labels in labelings]
        attr_oracle = {}
        for i, area in enumerate(res.areas):
            members = areas[(area.dimension, area.value)]
            exp_score = oracles.area_score(members, parts, ids)
            attr_oracle[area.dimension] = attr_oracle.get(area.dimension, Fraction(0)) + exp_score
            worst["area"] = max(worst["area"], abs(res.scores[i] - float(exp_score)))
            if i % 7 == 0:
                got = business_area_contribution(area, suite)
                worst["single_area"] = max(worst["single_area"], abs(got - float(exp_score)))
            for r, clusters in enumerate(parts):
                weighted = 0.0
                joint_total = 0
                for p, cl in enumerate(clusters):
                    s = res.stat(r, p, i)
                    worst["density"] = max(worst["density"],
                                           abs(s.cluster_density - float(oracles.density(members, cl))),
                                           abs(s.total_density - float(oracles.density(members, ids))))
                    exp_c = float(oracles.contribution(members, cl, ids))
                    worst["contribution"] = max(worst["contribution"], abs(s.contribution - exp_c))
                    weighted += len(cl) / len(ids) * s.contribution
                    joint_total += s.in_cluster
                    if p == 0:
                        worst["set_api"] = max(worst["set_api"],
                                               abs(density(members, cl) - float(oracles.density(members, cl))),
                                               abs(contribution(members, cl, ids) - exp_c))
                worst["weighted_zero"] = max(worst["weighted_zero"], abs(weighted))
                partition_ok &= joint_total == len(members)
        for row in res.attribute_rows():
            worst["attribute"] = max(worst["attribute"],
                                     abs(row.case_attribute_contribution - float(attr_oracle[row.attribute])))
    return worst, partition_ok, time.perf_counter() - t0


def test_criterion_1_influence_oracle_equivalence(influence_checks):
    worst, _, elapsed = influence_checks
    keys = ("density", "contribution", "area", "attribute", "set_api", "single_area")
    ok = all(worst[k] <= TOL for k in keys) and elapsed < 10.0
    record(1, "influence measures match brute-force oracle on 100 random logs", ok,
           f"max abs error {max(worst[k] for k in keys):.2e}, {elapsed:.1f}s")
    assert ok, (worst, elapsed)


def test_criterion_2_weighted_zero_and_partition(influence_checks):
    worst, partition_ok, _ = influence_checks
    ok = worst["weighted_zero"] <= TOL and partition_ok
    record(2, "size-weighted contributions sum to zero; partition counts exact", ok,
           f"max |weighted sum| {worst['weighted_zero']:.2e}")
    assert ok


# ---------------------------------------------------------------------------
# Criterion 3: arithmetic of the published consignment row
# ---------------------------------------------------------------------------

def test_criterion_3_published_row_arithmetic():
    all_cases = set(range(1000))
    consignment = set(range(60))  # overall density 0.06
    cluster = set(range(33)) | set(range(100, 167))  # 100 cases, density 0.33
    c = contribution(consignment, cluster, all_cases)
    exact = c == 0.27 and density(consignment, cluster) == 0.33 and density(consignment, all_cases) == 0.06

    n, size = 400, 90
    ids = [f"c{i}" for i in range(n)]
    labels = np.array([0] * size + [1] * 150 + [2] * (n - size - 150))
    area = BusinessArea("Item Category", "Consignment", size, frozenset(ids[:size]))
    got = business_area_contribution(area, fixed_suite([labels], ids))
    w = d = size / n
    closed = abs(got - w * (1 - d) ** 2) <= TOL
    ok = exact and closed
    record(3, "0.33 - 0.06 = 0.27 exactly; single-cluster area score equals w(1-d)^2", ok,
           f"contribution {c!r}, score error {abs(got - w * (1 - d) ** 2):.1e}")
    assert ok


# ---------------------------------------------------------------------------
# Criterion 4: k-modes properties
# ---------------------------------------------------------------------------

def as_matrix(rows):
    n = len(rows)
    return FeatureMatrix(rows, tuple(("tr", f"s{j}", f"t{j}") for j in range(rows.shape[1])),
                         tuple(f"r{i}" for i in range(n)), ())


def test_criterion_4_kmodes_properties():
    rng = np.random.default_rng(77)
    failures = []
    t0 = time.perf_counter()
    for trial in range(200):
        n, width = int(rng.integers(2, 101)), int(rng.integers(1, 41))
        rows = rng.integers(0, 2, (n, width)).astype(np.uint8)
        distinct = len(np.unique(rows, axis=0))
        k = int(rng.integers(1, min(distinct, 10) + 1))
        seed = int(rng.integers(2**31))
        m = kmodes(rows, k, seed, keep_history=True)
        r = rows.tolist()
        costs = [oracles.partition_cost(r, lab.tolist(), md.tolist()) for lab, md in m.history]
        if costs != list(m.cost_trace) or any(b > a for a, b in zip(costs, costs[1:])):
            failures.append((trial, "cost trace"))
        dist = [[oracles.hamming(x, md) for md in m.modes.tolist()] for x in r]
        argmin = [d.index(min(d)) for d in dist]  # first minimum = lowest index
        if not m.converged or m.assignments.tolist() != argmin:
            failures.append((trial, "argmin"))
        if m.cost != sum(d[a] for d, a in zip(dist, argmin)) or m.sizes.min() < 1:
            failures.append((trial, "cost/sizes"))
        if not kmodes(rows, k, seed).same_as(m):
            failures.append((trial, "determinism"))
        if trial % 10 == 0:
            ks = sorted({1, k, max(1, k - 1)})
            mat = as_matrix(rows)
            if not run_suite(mat, ks, seed, workers=1).same_as(run_suite(mat, ks, seed, workers=4)):
                failures.append((trial, "serial vs parallel"))

    for trial in range(20):
        width = int(rng.integers(10, 41))
        proto_a = rng.integers(0, 2, width).astype(np.uint8)
        proto_b = proto_a.copy()
        flip = rng.choice(width, size=max(10, width // 2), replace=False)
        proto_b[flip] ^= 1
        na, nb = int(rng.integers(1, 50)), int(rng.integers(1, 50))
        rows = np.vstack([np.tile(proto_a, (na, 1)), np.tile(proto_b, (nb, 1))])
        order = rng.permutation(na + nb)
        m = kmodes(rows[order], 2, int(rng.integers(2**31)))
        truth = (order >= na).astype(int)
        same = np.array_equal(m.assignments, truth) or np.array_equal(m.assignments, 1 - truth)
        if not same or m.cost != 0:
            failures.append((trial, "separable"))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 30.0
    record(4, "k-modes monotone cost, argmin assignment, determinism, separable recovery on 200 matrices",
           ok, f"{len(failures)} failures, {elapsed:.1f}s")
    assert ok, failures[:10]


# ---------------------------------------------------------------------------
# Criteria 5 and 6: planted effect recovery and encoding semantics
# ---------------------------------------------------------------------------

BASE = ("Create Purchase Order Item", "Receive Order Confirmation", "Record Goods Receipt",
        "Vendor creates invoice", "Record Invoice Receipt", "Clear Invoice", "Close Item")


def planted_spec(seed):
    return SynthSpec(
        n_cases=5000,
        base_sequence=BASE,
        dimensions=(
            Dimension("Item Category", ("Consignment", "Standard"), (0.3, 0.7)),
            Dimension("Region", tuple(f"R{i}" for i in range(10))),
            Dimension("Vendor", tuple(f"V{i:02d}" for i in range(10))),
        ),
        effects=(
            Effect("Item Category", "Consignment", Edit("remove", "Record Invoice Receipt")),
            Effect("Item Category", "Consignment", Edit("remove", "Clear Invoice")),
            Effect("Item Category", "Consignment", Edit("insert", "Consignment Call-off", 2)),
        ),
        noise_rate=0.05,
        seed=seed,
    )


@pytest.fixture(scope="module")
def planted_runs():
    runs = []
    for seed in range(10):
        t0 = time.perf_counter()
        log = generate(planted_spec(seed))
        result = run_pipeline(log, seed=seed)
        runs.append((log, result, time.perf_counter() - t0))
    return runs


def test_criterion_5_planted_effect_recovery(planted_runs):
    wins = sum(r.report.attributes[0]["attribute"] == "Item Category" for _, r, _ in planted_runs)
    slowest = max(t for *_, t in planted_runs)
    ok = wins >= 9 and slowest < 30.0
    record(5, "planted effect dimension ranked first", ok, f"{wins}/10 seeds, slowest run {slowest:.1f}s")
    assert ok


def test_criterion_6_encoding_bound_and_round_trip(planted_runs):
    logs = [log for log, _, _ in planted_runs]
    rng = np.random.default_rng(5)
    for seed in range(10):
        acts = tuple(f"a{i}" for i in range(int(rng.integers(2, 9))))
        spec = SynthSpec(int(rng.integers(20, 300)), acts, (Dimension("d", ("x", "y")),),
                         (Effect("d", "x", Edit("repeat", acts[0])),), noise_rate=float(rng.random()), seed=seed)
        logs.append(generate(spec))
    problems = 0
    for log in logs:
        m = encode(log)
        if m.shape[1] > column_bound(len(log.activity_alphabet)):
            problems += 1
        for case, (prof, trans) in zip(log.cases, m.decode()):
            if not np.array_equal(prof, activity_profile(case, log.activity_alphabet)) \
                    or trans != transition_profile(case):
                problems += 1
    ok = problems == 0
    record(6, "column count within bound; decode reproduces profiles", ok, f"{len(logs)} logs checked")
    assert ok


# ---------------------------------------------------------------------------
# Criterion 7: BPI Challenge 2019 reproduction (optional)
# ---------------------------------------------------------------------------

BPIC = os.environ.get("FLOWAREAS_BPIC2019")


@pytest.mark.slow
def test_criterion_7_bpic2019():
    if not BPIC or not os.path.exists(BPIC):
        ACCEPTANCE_LINES.append("[SKIP] criterion 7: BPI Challenge 2019 reproduction "
                                "(set FLOWAREAS_BPIC2019 to the XES file)")
        pytest.skip("set FLOWAREAS_BPIC2019 to the BPI Challenge 2019 XES file")
    log = parse_xes(BPIC)
    full_ok = len(log) == 251_734 and len(log.activity_alphabet) == 42
    top3 = 0
    shape_ok = True
    slowest = 0.0
    for seed in range(10):
        t0 = time.perf_counter()
        result = run_pipeline(log, seed=seed, sample_size=10_000)
        slowest = max(slowest, time.perf_counter() - t0)
        meta = result.report.metadata
        shape_ok &= abs(meta["n_activities"] - 37) <= 3.7 and abs(meta["transitions"]["total"] - 376) <= 37.6
        names = [a["attribute"] for a in result.report.attributes[:3]]
        top3 += "Item Type" in names and "Item Category" in names
    ok = full_ok and shape_ok and top3 >= 8 and slowest < 300
    record(7, "BPI Challenge 2019 shape and attribute ranking", ok,
           f"cases {len(log)}, types {len(log.activity_alphabet)}, top-3 hits {top3}/10, slowest {slowest:.0f}s")
    assert ok
