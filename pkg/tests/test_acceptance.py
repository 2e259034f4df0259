"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the measurement
lines; the whole module is part of the default suite.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from rainbowlab import (
    EdgeColoring,
    ExperimentConfig,
    TwoRoundParams,
    audit_property_M,
    build_two_round,
    chernoff_tolerance,
    color_edges_random,
    gen_weighted_process,
    has_diameter_at_most_2,
    hitting_time,
    pair_count,
    rc_at_most_2,
    rc_exact,
    recolor,
    run_corollary_experiment,
    run_hitting_experiment,
    run_random_k_coloring_experiment,
    snapshot,
    verify_rc2_coloring,
)
from rainbowlab.cli import main as cli_main
from rainbowlab.experiments import derive_trial_seed, trial_rng
from rainbowlab.recolor import RecolorFailure
from rainbowlab.tworound import default_p_target

from conftest import complete_graph, cycle_graph, make_graph, path_graph
from oracles import hitting_time_linear, rc_brute
from test_recolor import cocktail_party


def _report(name, ok, detail=""):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def q3_graph():
    edges = [(a, a ^ (1 << b)) for a in range(8) for b in range(3) if a < a ^ (1 << b)]
    return make_graph(8, edges)


# ---------------------------------------------------------------------------
# criterion: oracle ground truth

def test_criterion_oracle_ground_truth():
    t0 = time.monotonic()
    cases = {
        "K5": (complete_graph(5), 1),  # every pair adjacent
        "P5": (path_graph(5), 4),  # the unique end path forces 4 distinct colors
    }
    results = {}
    for name, (g, expected) in cases.items():
        value = rc_exact(g)
        results[name] = (value, expected)
    for name, g in (("C5", cycle_graph(5)), ("C6", cycle_graph(6)), ("Q3", q3_graph())):
        brute = rc_brute(g)
        value = rc_exact(g)
        results[name] = (value, brute)
    elapsed = time.monotonic() - t0
    ok = all(v == e for v, e in results.values()) and elapsed < 60
    _report(
        "oracle ground truth",
        ok,
        f"{ {k: int(v[0]) for k, v in results.items()} } in {elapsed:.1f}s (< 60s)",
    )


# ---------------------------------------------------------------------------
# criterion: oracle agreement on the n <= 6 catalog

def test_criterion_oracle_agreement(atlas_catalog):
    disagreements = 0
    for g in atlas_catalog:
        if rc_at_most_2(g) != (rc_exact(g) <= 2):
            disagreements += 1
    _report(
        "oracle agreement",
        disagreements == 0,
        f"{len(atlas_catalog)} connected graphs on <= 6 vertices, {disagreements} disagreements",
    )


# ---------------------------------------------------------------------------
# criterion: single-edge monotonicity of the rc <= 2 property

def test_criterion_rc2_monotone_under_edge_addition(atlas_catalog):
    violations = 0
    checked = 0
    for g in atlas_catalog:
        if not rc_at_most_2(g):
            continue
        for u in range(g.n):
            for v in range(u + 1, g.n):
                if g.adjacent(u, v):
                    continue
                checked += 1
                if not rc_at_most_2(g.with_edges([(u, v)])):
                    violations += 1
    _report(
        "rc2 monotone under edge addition",
        violations == 0,
        f"{checked} single-edge additions, {violations} true->false flips",
    )


# ---------------------------------------------------------------------------
# criteria: recolorer soundness and flag budget

BUILD_PLAN = ((500, 140), (1000, 40), (2000, 20))


@pytest.fixture(scope="module")
def two_round_builds():
    rows = []
    for n, count in BUILD_PLAN:
        params = TwoRoundParams(n=n)
        for i in range(count):
            seed = derive_trial_seed(2026, n * 1000 + i)
            out = build_two_round(params, np.random.default_rng(seed))
            audit = audit_property_M(out.g2, out.coloring, 66)
            diam2 = has_diameter_at_most_2(out.g2)
            res = recolor(out.g2, out.g2, out.coloring, 66)
            row = {
                "n": n,
                "seed": seed,
                "audit_passes": audit.passes,
                "diam2": diam2,
                "success": not isinstance(res, RecolorFailure),
                "failure": res.reason if isinstance(res, RecolorFailure) else None,
                "verified": None,
                "max_flag": None,
            }
            if row["success"]:
                out_col, trace = res
                row["verified"] = verify_rc2_coloring(out.g2, out_col)
                row["max_flag"] = trace.max_flag_count
            rows.append(row)
    return rows


@pytest.fixture(scope="module")
def synthetic_conditioned_runs():
    """Builds where the budget audit genuinely passes at d=66: cocktail-party
    graphs (sparse pass) and dense G(400, 0.7) samples (rich pass)."""
    rows = []
    for parts in (2, 4, 8, 12, 16):
        g = cocktail_party(parts)
        for seed in range(4):
            col = color_edges_random(g, 2, np.random.default_rng(500 * parts + seed))
            rows.append(_conditioned_run(g, col, f"cocktail-{parts}"))
    from rainbowlab import gen_gnp

    for seed in range(6):
        rng = np.random.default_rng(9000 + seed)
        g = gen_gnp(400, 0.7, rng)
        col = color_edges_random(g, 2, rng)
        rows.append(_conditioned_run(g, col, "gnp-400-0.7"))
    return rows


def _conditioned_run(g, col, label):
    audit = audit_property_M(g, col, 66)
    diam2 = has_diameter_at_most_2(g)
    res = recolor(g, g, col, 66)
    row = {
        "label": label,
        "audit_passes": audit.passes,
        "diam2": diam2,
        "success": not isinstance(res, RecolorFailure),
        "verified": None,
        "max_flag": None,
    }
    if row["success"]:
        out_col, trace = res
        row["verified"] = verify_rc2_coloring(g, out_col)
        row["max_flag"] = trace.max_flag_count
    return row


def test_criterion_recolorer_soundness(two_round_builds, synthetic_conditioned_runs):
    # (a) all 16 initial C4 colorings succeed and verify
    g = cycle_graph(4)
    ring = [(0, 1), (1, 2), (2, 3), (3, 0)]
    c4_bad = 0
    for combo in itertools.product((0, 1), repeat=4):
        col = EdgeColoring(g, 2)
        for (u, v), c in zip(ring, combo):
            col.set_color(u, v, c)
        res = recolor(g, g, col, 66)
        if isinstance(res, RecolorFailure) or not verify_rc2_coloring(g, res[0]):
            c4_bad += 1

    # (b) two-round builds: every success must verify; builds satisfying the
    # audit-and-diameter precondition must succeed
    successes = [r for r in two_round_builds if r["success"]]
    unsound = [r for r in successes if not r["verified"]]
    conditioned = [r for r in two_round_builds if r["audit_passes"] and r["diam2"]]
    conditioned_bad = [r for r in conditioned if not (r["success"] and r["verified"])]

    # the finite-n regime leaves (b)'s conditioned set empty (every pair is
    # sparse at d=66 for n <= 2000), so the same clause is exercised on
    # synthetic audit-passing inputs
    synth = [r for r in synthetic_conditioned_runs if r["audit_passes"] and r["diam2"]]
    synth_bad = [r for r in synth if not (r["success"] and r["verified"])]

    ok = c4_bad == 0 and not unsound and not conditioned_bad and len(synth) >= 20 and not synth_bad
    _report(
        "recolorer soundness",
        ok,
        f"C4 16/16 ok={c4_bad == 0}; builds={len(two_round_builds)} "
        f"successes={len(successes)} unsound={len(unsound)}; "
        f"audit+diam2 builds={len(conditioned)} (bad {len(conditioned_bad)}); "
        f"synthetic conditioned={len(synth)} (bad {len(synth_bad)})",
    )


def test_criterion_flag_budget(two_round_builds, synthetic_conditioned_runs):
    over = [
        r
        for r in two_round_builds + synthetic_conditioned_runs
        if r["audit_passes"] and r["success"] and r["max_flag"] is not None and r["max_flag"] > 33
    ]
    eligible = [
        r
        for r in two_round_builds + synthetic_conditioned_runs
        if r["audit_passes"] and r["success"]
    ]
    max_seen = max((r["max_flag"] for r in eligible), default=0)
    _report(
        "flag budget",
        len(over) == 0 and len(eligible) >= 20,
        f"{len(eligible)} audit-passing successes, max per-vertex flags {max_seen} (<= 33), "
        f"{len(over)} violations",
    )


# ---------------------------------------------------------------------------
# criterion: coupling marginals

def test_criterion_coupling_marginals():
    n, trials = 200, 10_000
    params = TwoRoundParams(n=n)
    p_target = default_p_target(n)
    pick = np.random.default_rng(424242)
    edges = set()
    while len(edges) < 20:
        u, v = sorted(map(int, pick.integers(0, n, 2)))
        if u != v:
            edges.add((u, v))
    edges = sorted(edges)
    hits = {e: 0 for e in edges}
    for i in range(trials):
        rng = trial_rng(77, i)
        seq = gen_weighted_process(n, rng)
        out = build_two_round(params, rng, weights=seq)
        for e in edges:
            hits[e] += int(out.g2.adjacent(*e))
    tol = chernoff_tolerance(trials, p_target, 1e-4)
    assert tol.feasible
    freqs = {e: h / trials for e, h in hits.items()}
    out_of_band = [e for e, f in freqs.items() if abs(f - p_target) > tol.eps * p_target]
    lo, hi = min(freqs.values()), max(freqs.values())
    _report(
        "coupling marginals",
        not out_of_band,
        f"{trials} coupled builds at n={n}: 20 edge frequencies in [{lo:.4f}, {hi:.4f}], "
        f"target {p_target:.4f} +/- {tol.eps * p_target:.4f}, {len(out_of_band)} outside",
    )


# ---------------------------------------------------------------------------
# criterion: hitting-time ordering

def test_criterion_hitting_time_ordering():
    trials = 200
    ordering_bad = 0
    search_bad = 0
    for i in range(trials):
        seq = gen_weighted_process(10, trial_rng(88, i))
        tau_d = hitting_time(seq, has_diameter_at_most_2)
        if tau_d != hitting_time_linear(seq, has_diameter_at_most_2):
            search_bad += 1
        tau_r = next(t for t in range(pair_count(10) + 1) if rc_at_most_2(snapshot(seq, t)))
        if tau_d > tau_r:
            ordering_bad += 1
    _report(
        "hitting-time ordering",
        ordering_bad == 0 and search_bad == 0,
        f"{trials} trials at n=10: tau_d <= tau_r in all ({ordering_bad} violations); "
        f"binary == linear in all ({search_bad} mismatches)",
    )


# ---------------------------------------------------------------------------
# criterion: threshold probability shadow

def test_criterion_corollary_shadow():
    cfg = ExperimentConfig(
        n=2000, trials=500, seed=0, params={"c": 0.0, "cert_subsample": 10}
    )
    records, summary = run_corollary_experiment(cfg)
    freq = summary["diam2_frequency"]
    limit = summary["predicted_limit"]
    drift = abs(freq - limit)
    certified = [r for r in records if r["certified"] is not None]

    # measured coincidence/certification rates at n in {1000, 2000}; the
    # asymptotic guarantees have no finite-n target, so these are reported
    rates = {}
    for n, trials in ((1000, 8), (2000, 4)):
        _, hsummary = run_hitting_experiment(
            ExperimentConfig(n=n, trials=trials, seed=1)
        )
        rates[n] = (hsummary["certified_fraction"], hsummary["failure_histogram"])
    ok = drift <= 0.06
    _report(
        "corollary shadow",
        ok,
        f"n=2000 c=0 trials=500: freq {freq:.4f} vs limit {limit:.4f} "
        f"(drift {drift:.4f} <= 0.06); cert attempts {len(certified)}; "
        f"certified fraction by n: { {k: v[0] for k, v in rates.items()} }, "
        f"failures: { {k: v[1] for k, v in rates.items()} }",
    )


# ---------------------------------------------------------------------------
# criterion: random 3-coloring is usually rainbow at the threshold

def test_criterion_random_three_coloring():
    cfg = ExperimentConfig(n=1000, trials=100, seed=2, params={"omega": 0.0, "k": 3})
    _, summary = run_random_k_coloring_experiment(cfg, 3)
    freq = summary["rainbow_frequency"]
    _report(
        "random 3-coloring",
        freq >= 0.90,
        f"n=1000, p=sqrt(2 log n / n), 100 trials: rainbow frequency {freq:.2f} >= 0.90",
    )


# ---------------------------------------------------------------------------
# criterion: byte-identical reports across worker counts

def test_criterion_determinism_across_workers(tmp_path):
    outputs = []
    for w in (1, 4, 8):
        hit = tmp_path / f"hit{w}.json"
        cor = tmp_path / f"cor{w}.json"
        assert cli_main([
            "exp-hitting", "--n", "10", "--trials", "10", "--seed", "3",
            "--workers", str(w), "--out", str(hit),
        ]) == 0
        assert cli_main([
            "exp-corollary", "--n", "100", "--trials", "12", "--seed", "3",
            "--cert-subsample", "3", "--workers", str(w), "--out", str(cor),
        ]) == 0
        outputs.append((hit.read_bytes(), cor.read_bytes()))
    ok = outputs[0] == outputs[1] == outputs[2]
    sizes = {len(outputs[0][0]), len(outputs[0][1])}
    _report(
        "determinism across workers",
        ok,
        f"exp-hitting and exp-corollary byte-identical at workers 1/4/8 (sizes {sorted(sizes)})",
    )
