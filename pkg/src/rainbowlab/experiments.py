"""Monte Carlo harness: hitting times on coupled processes, the tau
coincidence certification pipeline, threshold and random-coloring
experiments, and Chernoff-sized statistical tolerances.

Per-trial randomness comes from a 64-bit splitmix of (master_seed,
trial_index), recorded in every output row, so runs are reproducible and
trials can execute on any number of worker threads without changing results.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .coloring import color_edges_random, is_rainbow_connected, restrict_coloring, write_coloring
from .danger import DEFAULT_D, audit_whp_lemmas
from .graphs import (
    Graph,
    ProcessSequence,
    gen_gnp,
    gen_weighted_process,
    has_diameter_at_most_2,
    pair_count,
    snapshot,
    write_graph,
)
from .oracle import find_rc2_coloring
from .recolor import RecolorFailure, recolor, verify_rc2_coloring
from .tworound import TwoRoundParams, build_two_round, round1_probability

__all__ = [
    "InvariantViolationError",
    "ExperimentConfig",
    "CertificationRecord",
    "ChernoffTolerance",
    "derive_trial_seed",
    "trial_rng",
    "hitting_time",
    "chernoff_tolerance",
    "certify_tau_coincidence",
    "run_hitting_experiment",
    "run_corollary_experiment",
    "run_random_k_coloring_experiment",
    "run_lemma_audit_experiment",
    "experiment_payload",
    "write_json_report",
    "write_csv_records",
    "VERDICT_CERTIFIED_EQUAL",
    "VERDICT_BOUND_ONLY",
    "VERDICT_EXACT_EQUAL",
    "VERDICT_EXACT_GREATER",
]

VERDICT_CERTIFIED_EQUAL = "CertifiedEqual"
VERDICT_BOUND_ONLY = "BoundOnly"
VERDICT_EXACT_EQUAL = "ExactEqual"
VERDICT_EXACT_GREATER = "ExactStrictlyGreater"

DEFAULT_EXACT_CUTOFF = 12

_MASK64 = (1 << 64) - 1


class InvariantViolationError(AssertionError):
    """A certified result failed its own validity check; indicates a bug."""


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    """Documented 64-bit mix (splitmix64 finalizer) of master seed and index."""
    z = (master_seed + 0x9E3779B97F4A7C15 * (trial_index + 1)) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(derive_trial_seed(master_seed, trial_index))


@dataclass
class ExperimentConfig:
    """Shared experiment knobs; ``params`` carries per-experiment extras.

    ``workers`` only distributes trials over threads and is deliberately left
    out of serialized output so reports are byte-identical at any worker count.
    """

    n: int
    trials: int
    seed: int
    params: dict = field(default_factory=dict)
    out: str | None = None
    fmt: str = "json"
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def to_dict(self) -> dict:
        return {"n": self.n, "trials": self.trials, "seed": self.seed, **self.params}


def _map_trials(trials: int, workers: int, fn) -> list:
    if workers <= 1:
        return [fn(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(trials)))


# ---------------------------------------------------------------------------
# hitting times

def hitting_time(seq: ProcessSequence, prop) -> int:
    """Smallest t with prop(snapshot(seq, t)) true, for monotone prop.

    Binary search over the nested snapshots; equals the linear scan result.
    """
    n_edges = pair_count(seq.n)
    if not prop(snapshot(seq, n_edges)):
        raise ValueError("property does not hold at the complete graph")
    lo, hi = 0, n_edges
    while lo < hi:
        mid = (lo + hi) // 2
        if prop(snapshot(seq, mid)):
            hi = mid
        else:
            lo = mid + 1
    return lo


# ---------------------------------------------------------------------------
# statistical tolerance sizing

@dataclass(frozen=True)
class ChernoffTolerance:
    """Relative deviation eps with 2*exp(-eps^2*np/3) <= failure_prob.

    ``feasible`` is False when no eps <= 3/2 gives the requested failure
    probability; eps == 0.0 means the request is met trivially.
    """

    eps: float
    feasible: bool


def chernoff_tolerance(n: float, p: float, failure_prob: float) -> ChernoffTolerance:
    if not 0 < p < 1:
        raise ValueError(f"p={p} outside (0, 1)")
    if failure_prob <= 0:
        raise ValueError("failure_prob must be positive")
    np_ = n * p
    if np_ <= 0:
        raise ValueError("np must be positive")
    if failure_prob >= 2:
        return ChernoffTolerance(0.0, True)
    eps = math.sqrt(3.0 * math.log(2.0 / failure_prob) / np_)
    return ChernoffTolerance(eps, eps <= 1.5)


# ---------------------------------------------------------------------------
# tau coincidence certification

@dataclass
class CertificationRecord:
    trial: int
    seed: int
    n: int
    tau_diam2: int
    success: bool
    method: str | None  # "recolor" | "oracle"
    failure_reason: str | None
    tau_rc2_exact: int | None
    verdict: str
    coloring_ref: str | None = None
    graph_ref: str | None = None
    # in-memory artifacts, not serialized
    graph: Graph | None = None
    coloring: object = None

    def to_record_dict(self) -> dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "n": self.n,
            "tau_diam2": self.tau_diam2,
            "success": self.success,
            "method": self.method,
            "failure_reason": self.failure_reason,
            "tau_rc2_exact": self.tau_rc2_exact,
            "verdict": self.verdict,
            "coloring_ref": self.coloring_ref,
            "graph_ref": self.graph_ref,
        }


CERT_FIELDS = [
    "trial",
    "seed",
    "n",
    "tau_diam2",
    "success",
    "method",
    "failure_reason",
    "tau_rc2_exact",
    "verdict",
    "coloring_ref",
    "graph_ref",
]


def certify_tau_coincidence(
    n: int,
    params: TwoRoundParams,
    rng: np.random.Generator,
    exact_cutoff: int = DEFAULT_EXACT_CUTOFF,
    trial: int = 0,
    seed: int = 0,
) -> CertificationRecord:
    """One trial of the coincidence pipeline on a fresh weight sequence.

    Generates coupled weights, runs the two-round build at p_target, finds the
    diameter-2 hitting time, and tries to certify rc <= 2 at that snapshot by
    recoloring (falling back to the exact search when n <= exact_cutoff).
    For small n the exact rc-2 hitting time is also computed by scanning
    snapshots with the backtracking oracle.
    """
    if params.n != n:
        raise ValueError(f"params.n={params.n} does not match n={n}")
    seq = gen_weighted_process(n, rng)
    out = build_two_round(params, rng, weights=seq)
    tau_d = hitting_time(seq, has_diameter_at_most_2)
    g = snapshot(seq, tau_d)

    t_target = out.g2.m  # coupled: g2 == snapshot at the p_target threshold
    if tau_d >= t_target:
        gsub, col_sub = out.g2, out.coloring
    else:
        gsub, col_sub = g, restrict_coloring(out.coloring, g)

    success, method, reason, cert_coloring = False, None, None, None
    res = recolor(g, gsub, col_sub, params.d)
    if isinstance(res, RecolorFailure):
        reason = res.reason
    else:
        success, method, cert_coloring = True, "recolor", res[0]

    if not success and n <= exact_cutoff:
        witness = find_rc2_coloring(g)
        if witness is not None:
            success, method, cert_coloring = True, "oracle", witness

    if success and not verify_rc2_coloring(g, cert_coloring):
        raise InvariantViolationError(
            f"certified coloring failed verification (n={n}, tau_d={tau_d})"
        )

    tau_r = None
    if n <= exact_cutoff:
        for t in range(tau_d, pair_count(n) + 1):
            if find_rc2_coloring(snapshot(seq, t)) is not None:
                tau_r = t
                break
        if tau_r is None:
            raise InvariantViolationError("rc<=2 not reached at the complete graph")
        if success and tau_r != tau_d:
            raise InvariantViolationError(
                f"certificate at tau_d={tau_d} contradicts exact tau_r={tau_r}"
            )

    if tau_r is not None:
        verdict = VERDICT_EXACT_EQUAL if tau_r == tau_d else VERDICT_EXACT_GREATER
        if success and verdict == VERDICT_EXACT_GREATER:
            raise InvariantViolationError("success with strictly greater exact tau")
    else:
        verdict = VERDICT_CERTIFIED_EQUAL if success else VERDICT_BOUND_ONLY

    return CertificationRecord(
        trial=trial,
        seed=seed,
        n=n,
        tau_diam2=tau_d,
        success=success,
        method=method,
        failure_reason=reason,
        tau_rc2_exact=tau_r,
        verdict=verdict,
        graph=g,
        coloring=cert_coloring,
    )


def save_certificate(rec: CertificationRecord, out_dir: str) -> None:
    """Write the trial's snapshot graph and certified coloring next to the report."""
    if rec.graph is None:
        return
    os.makedirs(out_dir, exist_ok=True)
    gpath = os.path.join(out_dir, f"trial{rec.trial:05d}.graph.txt")
    write_graph(rec.graph, gpath)
    rec.graph_ref = os.path.basename(gpath)
    if rec.success and rec.coloring is not None:
        cpath = os.path.join(out_dir, f"trial{rec.trial:05d}.coloring.txt")
        write_coloring(rec.coloring, cpath)
        rec.coloring_ref = os.path.basename(cpath)


def run_hitting_experiment(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """Distribution of the diameter-2 hitting time plus certification verdicts."""
    d = int(cfg.params.get("d", DEFAULT_D))
    eps = float(cfg.params.get("eps", 0.01))
    p_target = cfg.params.get("p_target")
    exact_cutoff = int(cfg.params.get("exact_cutoff", DEFAULT_EXACT_CUTOFF))
    cert_dir = cfg.params.get("cert_dir")
    params = TwoRoundParams(n=cfg.n, eps=eps, p_target=p_target, d=d)

    def one(i: int) -> CertificationRecord:
        seed = derive_trial_seed(cfg.seed, i)
        rec = certify_tau_coincidence(
            cfg.n, params, np.random.default_rng(seed), exact_cutoff, trial=i, seed=seed
        )
        return rec

    recs = _map_trials(cfg.trials, cfg.workers, one)
    if cert_dir:
        for rec in recs:
            save_certificate(rec, cert_dir)

    taus = [r.tau_diam2 for r in recs]
    verdicts: dict[str, int] = {}
    failures: dict[str, int] = {}
    for r in recs:
        verdicts[r.verdict] = verdicts.get(r.verdict, 0) + 1
        if r.failure_reason:
            failures[r.failure_reason] = failures.get(r.failure_reason, 0) + 1
    exact = [r for r in recs if r.tau_rc2_exact is not None]
    summary = {
        "tau_diam2_mean": sum(taus) / len(taus),
        "tau_diam2_min": min(taus),
        "tau_diam2_max": max(taus),
        "verdict_counts": dict(sorted(verdicts.items())),
        "failure_histogram": dict(sorted(failures.items())),
        "certified_fraction": sum(
            1 for r in recs if r.verdict in (VERDICT_CERTIFIED_EQUAL, VERDICT_EXACT_EQUAL) and r.success
        )
        / len(recs),
        "exact_trials": len(exact),
        "exact_equal_fraction": (
            sum(1 for r in exact if r.verdict == VERDICT_EXACT_EQUAL) / len(exact) if exact else None
        ),
        "ordering_violations": sum(
            1 for r in exact if r.tau_rc2_exact is not None and r.tau_rc2_exact < r.tau_diam2
        ),
    }
    return [r.to_record_dict() for r in recs], summary


# ---------------------------------------------------------------------------
# threshold-probability experiment

def run_corollary_experiment(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """Empirical P(diam <= 2) at p = sqrt((2 log n + c)/n) against the
    limit exp(-exp(-c)/2), plus constructive rc=2 certification on a subsample.

    Subsampled trials draw the graph through the two-round builder (the
    finished graph has the same G(n,p) marginal), so the certification runs on
    the same distribution the frequency is measured on.
    """
    n = cfg.n
    c = float(cfg.params.get("c", 0.0))
    eps = float(cfg.params.get("eps", 0.01))
    d = int(cfg.params.get("d", DEFAULT_D))
    cert_subsample = int(cfg.params.get("cert_subsample", min(10, cfg.trials)))
    p = math.sqrt((2 * math.log(n) + c) / n)
    if not 0 < p < 1:
        raise ValueError(f"p={p} outside (0, 1); adjust c or n")
    if round1_probability(n, eps) > p:
        raise ValueError("round-1 probability exceeds target; adjust c or eps")

    def one(i: int) -> dict:
        seed = derive_trial_seed(cfg.seed, i)
        rng = np.random.default_rng(seed)
        rec: dict = {"trial": i, "seed": seed, "certified": None, "cert_failure": None}
        if i < cert_subsample:
            out = build_two_round(TwoRoundParams(n=n, eps=eps, p_target=p, d=d), rng)
            g = out.g2
            rec["diam2"] = has_diameter_at_most_2(g)
            if rec["diam2"]:
                res = recolor(g, g, out.coloring, d)
                if isinstance(res, RecolorFailure):
                    rec["certified"] = False
                    rec["cert_failure"] = res.reason
                else:
                    if not verify_rc2_coloring(g, res[0]):
                        raise InvariantViolationError("recolor output failed verification")
                    rec["certified"] = True
        else:
            rec["diam2"] = has_diameter_at_most_2(gen_gnp(n, p, rng))
        return rec

    recs = _map_trials(cfg.trials, cfg.workers, one)
    freq = sum(1 for r in recs if r["diam2"]) / len(recs)
    attempted = [r for r in recs if r["certified"] is not None]
    cert_ok = sum(1 for r in attempted if r["certified"])
    failures: dict[str, int] = {}
    for r in attempted:
        if r["cert_failure"]:
            failures[r["cert_failure"]] = failures.get(r["cert_failure"], 0) + 1
    summary = {
        "p": p,
        "c": c,
        "diam2_frequency": freq,
        "predicted_limit": math.exp(-math.exp(-c) / 2),
        "ci95_halfwidth": 1.96 * math.sqrt(freq * (1 - freq) / len(recs)),
        "cert_attempted": len(attempted),
        "cert_successes": cert_ok,
        "cert_success_rate": cert_ok / len(attempted) if attempted else None,
        "cert_failure_histogram": dict(sorted(failures.items())),
    }
    return recs, summary


COROLLARY_FIELDS = ["trial", "seed", "diam2", "certified", "cert_failure"]


# ---------------------------------------------------------------------------
# random k-coloring experiment

def run_random_k_coloring_experiment(cfg: ExperimentConfig, k: int) -> tuple[list[dict], dict]:
    """Frequency with which a uniformly random k-coloring of G(n,p) is a
    rainbow coloring, at p = sqrt((2 log n + omega)/n)."""
    if k > 8:
        raise ValueError("k must be <= 8")
    n = cfg.n
    omega = float(cfg.params.get("omega", 0.0))
    p = math.sqrt((2 * math.log(n) + omega) / n)
    if not 0 < p <= 1:
        raise ValueError(f"p={p} outside (0, 1]; adjust omega or n")

    def one(i: int) -> dict:
        seed = derive_trial_seed(cfg.seed, i)
        rng = np.random.default_rng(seed)
        g = gen_gnp(n, p, rng)
        col = color_edges_random(g, k, rng)
        return {"trial": i, "seed": seed, "rainbow": is_rainbow_connected(g, col, k)}

    recs = _map_trials(cfg.trials, cfg.workers, one)
    freq = sum(1 for r in recs if r["rainbow"]) / len(recs)
    summary = {
        "p": p,
        "k": k,
        "rainbow_frequency": freq,
        "ci95_halfwidth": 1.96 * math.sqrt(freq * (1 - freq) / len(recs)),
    }
    return recs, summary


KCOLORING_FIELDS = ["trial", "seed", "rainbow"]


# ---------------------------------------------------------------------------
# round-1 structural audit rates

def run_lemma_audit_experiment(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """Violation rates of the asymptotic structural bounds on round-1 graphs."""
    n = cfg.n
    eps = float(cfg.params.get("eps", 0.01))
    d = int(cfg.params.get("d", DEFAULT_D))
    p1 = round1_probability(n, eps)

    def one(i: int) -> dict:
        seed = derive_trial_seed(cfg.seed, i)
        rng = np.random.default_rng(seed)
        g1 = gen_gnp(n, p1, rng)
        col = color_edges_random(g1, 2, rng)
        audit = audit_whp_lemmas(g1, col, eps, d)
        return {
            "trial": i,
            "seed": seed,
            "degree_window_pass": audit.degree_window.passes,
            "degree_window_violations": audit.degree_window.violation_count,
            "dangerous_membership_pass": audit.dangerous_membership.passes,
            "dangerous_membership_violations": audit.dangerous_membership.violation_count,
            "exclusive_floor_pass": audit.exclusive_fix_floor.passes,
            "exclusive_floor_violations": audit.exclusive_fix_floor.violation_count,
        }

    recs = _map_trials(cfg.trials, cfg.workers, one)
    t = len(recs)
    summary = {
        "p1": p1,
        "eps": eps,
        "d": d,
        "degree_window_violation_rate": sum(1 for r in recs if not r["degree_window_pass"]) / t,
        "dangerous_membership_violation_rate": sum(
            1 for r in recs if not r["dangerous_membership_pass"]
        )
        / t,
        "exclusive_floor_violation_rate": sum(1 for r in recs if not r["exclusive_floor_pass"]) / t,
    }
    return recs, summary


AUDIT_FIELDS = [
    "trial",
    "seed",
    "degree_window_pass",
    "degree_window_violations",
    "dangerous_membership_pass",
    "dangerous_membership_violations",
    "exclusive_floor_pass",
    "exclusive_floor_violations",
]


# ---------------------------------------------------------------------------
# report files

def _plain(obj):
    """Recursively convert numpy scalars/arrays for JSON."""
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    return obj


def experiment_payload(name: str, cfg: ExperimentConfig, records: list[dict], summary: dict) -> dict:
    return _plain(
        {
            "version": 1,
            "config": {"experiment": name, **cfg.to_dict()},
            "records": records,
            "summary": summary,
        }
    )


def write_json_report(path: str, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv_records(path: str, records: list[dict], fieldnames: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow({k: _plain(rec.get(k)) for k in fieldnames})
