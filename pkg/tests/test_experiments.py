import json
import math

import numpy as np
import pytest

from rainbowlab import (
    ExperimentConfig,
    TwoRoundParams,
    certify_tau_coincidence,
    chernoff_tolerance,
    derive_trial_seed,
    gen_weighted_process,
    has_diameter_at_most_2,
    hitting_time,
    pair_count,
    read_coloring,
    read_graph,
    rc_at_most_2,
    run_corollary_experiment,
    run_hitting_experiment,
    run_lemma_audit_experiment,
    run_random_k_coloring_experiment,
    snapshot,
    threshold_graph,
    trial_rng,
    verify_rc2_coloring,
)
from rainbowlab.experiments import (
    experiment_payload,
    save_certificate,
    write_csv_records,
    write_json_report,
)

from oracles import hitting_time_linear


def test_seed_derivation_frozen():
    # documented splitmix64 mix; frozen so it can never silently change
    assert derive_trial_seed(0, 0) == 16294208416658607535
    assert derive_trial_seed(0, 1) == 7960286522194355700
    assert derive_trial_seed(12345, 7) == 7959005890829367068


def test_hitting_time_edge_count_property():
    seq = gen_weighted_process(6, np.random.default_rng(0))
    assert hitting_time(seq, lambda g: g.m >= 3) == 3


def test_hitting_time_diam2_n3():
    # any two distinct edges on 3 vertices share a vertex
    for seed in range(10):
        seq = gen_weighted_process(3, np.random.default_rng(seed))
        assert hitting_time(seq, has_diameter_at_most_2) == 2


def test_hitting_time_matches_linear_scan():
    for seed in range(10):
        seq = gen_weighted_process(8, np.random.default_rng(100 + seed))
        for prop in (has_diameter_at_most_2, lambda g: g.m >= 11, rc_at_most_2):
            assert hitting_time(seq, prop) == hitting_time_linear(seq, prop)


def test_hitting_time_rejects_never_holding_property():
    seq = gen_weighted_process(5, np.random.default_rng(1))
    with pytest.raises(ValueError, match="complete graph"):
        hitting_time(seq, lambda g: False)


def test_chernoff_examples():
    # np = 300 (n=600, p=0.5) and failure 2e^-100: eps^2 * 100 = 100
    t = chernoff_tolerance(600, 0.5, 2 * math.exp(-100))
    assert t.eps == pytest.approx(1.0, rel=1e-12)
    assert t.feasible
    boundary = chernoff_tolerance(100, 0.5, 2.5)
    assert boundary.eps == 0.0 and boundary.feasible
    t2 = chernoff_tolerance(2000, 0.5, 1e-6)
    assert t2.eps == pytest.approx(0.2086287928728263, rel=1e-12)
    infeasible = chernoff_tolerance(10, 0.1, 1e-9)
    assert not infeasible.feasible and infeasible.eps > 1.5
    with pytest.raises(ValueError):
        chernoff_tolerance(100, 0.0, 0.1)
    with pytest.raises(ValueError):
        chernoff_tolerance(100, 0.5, 0.0)


def test_certify_n3_exact_equal():
    params = TwoRoundParams(n=3, p_target=0.85)
    rec = certify_tau_coincidence(3, params, np.random.default_rng(0))
    assert rec.tau_diam2 == 2
    assert rec.tau_rc2_exact == 2
    assert rec.verdict == "ExactEqual"
    assert rec.success


def test_certify_ordering_and_independent_tau(atlas_catalog):
    # tau_d <= tau_r in every trial; recompute tau_r from scratch as an
    # independent check of the pipeline's scan
    ordered = 0
    for i in range(25):
        rng = trial_rng(17, i)
        rec = certify_tau_coincidence(10, TwoRoundParams(n=10), rng)
        assert rec.tau_rc2_exact is not None
        assert rec.tau_diam2 <= rec.tau_rc2_exact
        seq = gen_weighted_process(10, trial_rng(17, i))
        tau_r = next(
            t for t in range(pair_count(10) + 1) if rc_at_most_2(snapshot(seq, t))
        )
        assert tau_r == rec.tau_rc2_exact
        ordered += 1
    assert ordered == 25


def test_run_hitting_n3_all_exact_equal():
    cfg = ExperimentConfig(n=3, trials=10, seed=4, params={"p_target": 0.85})
    records, summary = run_hitting_experiment(cfg)
    assert all(r["verdict"] == "ExactEqual" for r in records)
    assert summary["exact_equal_fraction"] == 1.0
    assert summary["ordering_violations"] == 0


def test_certificates_reload_and_verify(tmp_path):
    # recolor-certified trials write graph+coloring files that verify on reload
    cfg = ExperimentConfig(
        n=10,
        trials=40,
        seed=5,
        params={"exact_cutoff": 0, "cert_dir": str(tmp_path)},
    )
    records, summary = run_hitting_experiment(cfg)
    certified = [r for r in records if r["verdict"] == "CertifiedEqual"]
    assert len(certified) >= 1
    assert summary["verdict_counts"]["CertifiedEqual"] == len(certified)
    for r in certified:
        assert r["method"] == "recolor"
        g = read_graph(tmp_path / r["graph_ref"])
        col = read_coloring(tmp_path / r["coloring_ref"], g)
        assert verify_rc2_coloring(g, col)


def test_corollary_limit_value():
    cfg = ExperimentConfig(n=300, trials=4, seed=6, params={"c": 0.0, "cert_subsample": 0})
    _, summary = run_corollary_experiment(cfg)
    assert summary["predicted_limit"] == pytest.approx(0.6065306597126334, rel=1e-12)


def test_corollary_large_c_frequency_near_one():
    cfg = ExperimentConfig(n=500, trials=200, seed=7, params={"c": 20.0, "cert_subsample": 5})
    records, summary = run_corollary_experiment(cfg)
    assert summary["diam2_frequency"] >= 0.95
    attempted = [r for r in records if r["certified"] is not None]
    assert len(attempted) == 5


def test_corollary_invalid_c_rejected():
    cfg = ExperimentConfig(n=50, trials=2, seed=8, params={"c": 1000.0})
    with pytest.raises(ValueError):
        run_corollary_experiment(cfg)


def test_diam2_frequency_monotone_in_c_on_shared_weights():
    # same weight sequences, increasing c: the diameter-2 indicator can only
    # turn on, never off, so the frequency is monotone pathwise
    n = 60
    cs = (-2.0, 0.0, 2.0, 6.0)
    freqs = []
    indicators = []
    for c in cs:
        p = math.sqrt((2 * math.log(n) + c) / n)
        flags = []
        for seed in range(30):
            seq = gen_weighted_process(n, np.random.default_rng(900 + seed))
            flags.append(has_diameter_at_most_2(threshold_graph(seq, p)))
        indicators.append(flags)
        freqs.append(sum(flags) / len(flags))
    for lo, hi in zip(indicators, indicators[1:]):
        for a, b in zip(lo, hi):
            assert (not a) or b
    assert freqs == sorted(freqs)


def test_kcoloring_p3_half():
    # a 2-coloring of a 2-edge path is rainbow iff the colors differ
    from rainbowlab import color_edges_random, is_rainbow_connected, make_graph

    g = make_graph(3, [(0, 1), (1, 2)])
    hits = sum(
        is_rainbow_connected(g, color_edges_random(g, 2, np.random.default_rng(3000 + i)), 2)
        for i in range(4000)
    )
    stderr = math.sqrt(0.25 / 4000)
    assert abs(hits / 4000 - 0.5) <= 3 * stderr


def test_kcoloring_complete_graph_always_rainbow():
    # omega = n - 2 log n makes p exactly 1, so every trial sees K_n
    n = 30
    omega = n - 2 * math.log(n)
    cfg = ExperimentConfig(n=n, trials=5, seed=9, params={"omega": omega})
    _, summary = run_random_k_coloring_experiment(cfg, 1)
    assert summary["p"] == pytest.approx(1.0)
    assert summary["rainbow_frequency"] == 1.0


def test_kcoloring_rejects_large_k():
    cfg = ExperimentConfig(n=20, trials=1, seed=0)
    with pytest.raises(ValueError):
        run_random_k_coloring_experiment(cfg, 9)


def test_lemma_audit_experiment_smoke():
    cfg = ExperimentConfig(n=120, trials=3, seed=10)
    records, summary = run_lemma_audit_experiment(cfg)
    assert len(records) == 3
    for key in (
        "degree_window_violation_rate",
        "dangerous_membership_violation_rate",
        "exclusive_floor_violation_rate",
    ):
        assert 0.0 <= summary[key] <= 1.0


def test_reports_identical_across_worker_counts():
    payloads = []
    for workers in (1, 4, 8):
        cfg = ExperimentConfig(n=10, trials=12, seed=11, workers=workers)
        records, summary = run_hitting_experiment(cfg)
        payloads.append(
            json.dumps(experiment_payload("hitting", cfg, records, summary), sort_keys=True)
        )
    assert payloads[0] == payloads[1] == payloads[2]


def test_json_and_csv_report_files(tmp_path):
    cfg = ExperimentConfig(n=20, trials=4, seed=12, params={"omega": 0.0, "k": 2})
    records, summary = run_random_k_coloring_experiment(cfg, 2)
    payload = experiment_payload("kcoloring", cfg, records, summary)
    jpath = tmp_path / "out.json"
    write_json_report(jpath, payload)
    loaded = json.loads(jpath.read_text())
    assert loaded["version"] == 1
    assert set(loaded) == {"version", "config", "records", "summary"}
    assert loaded["config"]["experiment"] == "kcoloring"
    assert loaded["config"]["seed"] == 12
    assert len(loaded["records"]) == 4
    cpath = tmp_path / "out.csv"
    write_csv_records(cpath, records, ["trial", "seed", "rainbow"])
    lines = cpath.read_text().splitlines()
    assert lines[0] == "trial,seed,rainbow"
    assert len(lines) == 5


def test_trial_records_carry_seeds():
    cfg = ExperimentConfig(n=20, trials=3, seed=13, params={"omega": 0.0, "k": 2})
    records, _ = run_random_k_coloring_experiment(cfg, 2)
    for i, rec in enumerate(records):
        assert rec["seed"] == derive_trial_seed(13, i)
