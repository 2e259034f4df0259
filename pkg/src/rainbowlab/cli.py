"""Command-line interface.

Exit codes: 0 on completion (including structured recoloring failures, which
are results, not errors), 2 on configuration errors, 3 on internal invariant
violations.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import experiments as xp
from .coloring import read_coloring, write_coloring
from .graphs import (
    diameter,
    gen_gnp,
    gen_weighted_process,
    has_diameter_at_most_2,
    read_graph,
    write_graph,
    write_process,
)
from .oracle import BudgetExceededError, OracleBudget, find_rc2_coloring, rc_exact_with_witness
from .recolor import RecolorFailure, recolor, verify_rc2_coloring
from .tworound import TwoRoundParams, build_two_round

__all__ = ["main", "build_parser"]


def _add_common(sp, trials=False, workers=False):
    sp.add_argument("--seed", type=int, default=0, help="master seed")
    sp.add_argument("--n", type=int, help="vertex count")
    sp.add_argument("--out", help="output path")
    sp.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
    if trials:
        sp.add_argument("--trials", type=int, default=1)
    if workers:
        sp.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rainbowlab")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="generate one G(n,p) sample as a graph file")
    _add_common(sp)
    sp.add_argument("--p", type=float, required=True)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("process", help="generate a weighted edge process")
    _add_common(sp)
    sp.set_defaults(func=cmd_process)

    sp = sub.add_parser("diam", help="diameter of a graph file")
    sp.add_argument("--graph", required=True)
    sp.set_defaults(func=cmd_diam)

    sp = sub.add_parser("rc", help="exact rainbow connection number (small graphs)")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--at-most-2", action="store_true", help="only decide rc <= 2")
    sp.add_argument("--witness", help="write a witness coloring here on success")
    sp.add_argument("--max-colorings", type=int, default=2**30)
    sp.add_argument("--max-k", type=int, default=8)
    sp.set_defaults(func=cmd_rc)

    sp = sub.add_parser("color2round", help="run the two-round build")
    _add_common(sp)
    sp.add_argument("--eps", type=float, default=0.01)
    sp.add_argument("--p-target", type=float, default=None)
    sp.add_argument("--d", type=int, default=66)
    sp.set_defaults(func=cmd_color2round)

    sp = sub.add_parser("recolor", help="flag-and-recolor a colored spanning subgraph")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--subgraph", required=True)
    sp.add_argument("--coloring", required=True)
    sp.add_argument("--d", type=int, default=66)
    sp.add_argument("--out", help="output prefix")
    sp.set_defaults(func=cmd_recolor)

    sp = sub.add_parser("certify", help="tau coincidence certification trials")
    _add_common(sp, trials=True, workers=True)
    sp.add_argument("--eps", type=float, default=0.01)
    sp.add_argument("--p-target", type=float, default=None)
    sp.add_argument("--d", type=int, default=66)
    sp.add_argument("--exact-cutoff", type=int, default=xp.DEFAULT_EXACT_CUTOFF)
    sp.add_argument("--cert-dir", help="directory for per-trial graph/coloring files")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("exp-corollary", help="diameter-2 threshold probability experiment")
    _add_common(sp, trials=True, workers=True)
    sp.add_argument("--c", type=float, default=0.0)
    sp.add_argument("--eps", type=float, default=0.01)
    sp.add_argument("--d", type=int, default=66)
    sp.add_argument("--cert-subsample", type=int, default=None)
    sp.set_defaults(func=cmd_exp_corollary)

    sp = sub.add_parser("exp-hitting", help="hitting-time distribution experiment")
    _add_common(sp, trials=True, workers=True)
    sp.add_argument("--eps", type=float, default=0.01)
    sp.add_argument("--p-target", type=float, default=None)
    sp.add_argument("--d", type=int, default=66)
    sp.add_argument("--exact-cutoff", type=int, default=xp.DEFAULT_EXACT_CUTOFF)
    sp.set_defaults(func=cmd_exp_hitting)

    sp = sub.add_parser("exp-kcoloring", help="random k-coloring rainbow frequency")
    _add_common(sp, trials=True, workers=True)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--omega", type=float, default=0.0)
    sp.set_defaults(func=cmd_exp_kcoloring)

    sp = sub.add_parser("exp-audit", help="round-1 structural audit violation rates")
    _add_common(sp, trials=True, workers=True)
    sp.add_argument("--eps", type=float, default=0.01)
    sp.add_argument("--d", type=int, default=66)
    sp.set_defaults(func=cmd_exp_audit)

    return parser


def _require_n(args) -> int:
    if args.n is None:
        raise ValueError("--n is required for this command")
    return args.n


def cmd_gen(args) -> int:
    n = _require_n(args)
    g = gen_gnp(n, args.p, np.random.default_rng(args.seed))
    if args.out:
        write_graph(g, args.out)
    else:
        from .graphs import graph_to_text

        sys.stdout.write(graph_to_text(g))
    return 0


def cmd_process(args) -> int:
    n = _require_n(args)
    seq = gen_weighted_process(n, np.random.default_rng(args.seed))
    if not args.out:
        raise ValueError("--out is required for process export")
    write_process(seq, args.out)
    return 0


def cmd_diam(args) -> int:
    g = read_graph(args.graph)
    d = diameter(g)
    print("inf" if d == math.inf else int(d))
    print(f"diam_le_2={has_diameter_at_most_2(g)}")
    return 0


def cmd_rc(args) -> int:
    g = read_graph(args.graph)
    budget = OracleBudget(max_colorings=args.max_colorings, max_k=args.max_k)
    try:
        if args.at_most_2:
            witness = find_rc2_coloring(g, budget)
            print(f"rc_at_most_2={witness is not None}")
            if witness is not None and args.witness:
                write_coloring(witness, args.witness)
        else:
            value, witness = rc_exact_with_witness(g, budget)
            print("rc=inf" if value == math.inf else f"rc={int(value)}")
            if witness is not None and args.witness:
                write_coloring(witness, args.witness)
    except BudgetExceededError as e:
        print(f"budget exceeded at k={e.k_reached} after {e.explored} candidates")
    return 0


def cmd_color2round(args) -> int:
    n = _require_n(args)
    if not args.out:
        raise ValueError("--out prefix is required")
    params = TwoRoundParams(n=n, eps=args.eps, p_target=args.p_target, d=args.d)
    out = build_two_round(params, np.random.default_rng(args.seed))
    write_graph(out.g2, f"{args.out}.graph.txt")
    write_graph(out.g1, f"{args.out}.g1.txt")
    write_coloring(out.coloring, f"{args.out}.coloring.txt")
    p1, p2, pt = params.resolve()
    payload = {
        "version": 1,
        "n": n,
        "seed": args.seed,
        "eps": args.eps,
        "d": args.d,
        "p1": p1,
        "p2": p2,
        "p_target": pt,
        "round2_edge_count": int(len(out.round2_edges)),
        "fix_log": [e.to_json_dict() for e in out.fix_log],
    }
    with open(f"{args.out}.fixlog.json", "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"g1 m={out.g1.m} g2 m={out.g2.m} round2={len(out.round2_edges)}")
    return 0


def cmd_recolor(args) -> int:
    g = read_graph(args.graph)
    gsub = read_graph(args.subgraph)
    col = read_coloring(args.coloring, gsub)
    res = recolor(g, gsub, col, args.d)
    if isinstance(res, RecolorFailure):
        print(f"failure reason={res.reason} pair={res.pair}")
        if args.out:
            with open(f"{args.out}.failure.json", "w", newline="\n") as fh:
                json.dump(res.to_json_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
        return 0
    out_col, trace = res
    ok = verify_rc2_coloring(g, out_col)
    if not ok:
        raise xp.InvariantViolationError("recolor output failed verification")
    print(f"success max_flag_count={trace.max_flag_count}")
    if args.out:
        write_coloring(out_col, f"{args.out}.coloring.txt")
        with open(f"{args.out}.trace.json", "w", newline="\n") as fh:
            json.dump(trace.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _emit(args, name: str, cfg: xp.ExperimentConfig, records, summary, fields) -> int:
    payload = xp.experiment_payload(name, cfg, records, summary)
    if args.out:
        if args.fmt == "json":
            xp.write_json_report(args.out, payload)
        else:
            xp.write_csv_records(args.out, records, fields)
    print(json.dumps(xp._plain(summary), sort_keys=True))
    return 0


def cmd_certify(args) -> int:
    n = _require_n(args)
    cfg = xp.ExperimentConfig(
        n=n,
        trials=args.trials,
        seed=args.seed,
        params={
            "eps": args.eps,
            "d": args.d,
            "exact_cutoff": args.exact_cutoff,
            **({"p_target": args.p_target} if args.p_target is not None else {}),
            **({"cert_dir": args.cert_dir} if args.cert_dir else {}),
        },
        workers=args.workers,
    )
    records, summary = xp.run_hitting_experiment(cfg)
    cfg.params.pop("cert_dir", None)
    return _emit(args, "certify", cfg, records, summary, xp.CERT_FIELDS)


def cmd_exp_corollary(args) -> int:
    n = _require_n(args)
    params = {"c": args.c, "eps": args.eps, "d": args.d}
    if args.cert_subsample is not None:
        params["cert_subsample"] = args.cert_subsample
    cfg = xp.ExperimentConfig(
        n=n, trials=args.trials, seed=args.seed, params=params, workers=args.workers
    )
    records, summary = xp.run_corollary_experiment(cfg)
    return _emit(args, "corollary", cfg, records, summary, xp.COROLLARY_FIELDS)


def cmd_exp_hitting(args) -> int:
    n = _require_n(args)
    cfg = xp.ExperimentConfig(
        n=n,
        trials=args.trials,
        seed=args.seed,
        params={
            "eps": args.eps,
            "d": args.d,
            "exact_cutoff": args.exact_cutoff,
            **({"p_target": args.p_target} if args.p_target is not None else {}),
        },
        workers=args.workers,
    )
    records, summary = xp.run_hitting_experiment(cfg)
    return _emit(args, "hitting", cfg, records, summary, xp.CERT_FIELDS)


def cmd_exp_kcoloring(args) -> int:
    n = _require_n(args)
    cfg = xp.ExperimentConfig(
        n=n,
        trials=args.trials,
        seed=args.seed,
        params={"omega": args.omega, "k": args.k},
        workers=args.workers,
    )
    records, summary = xp.run_random_k_coloring_experiment(cfg, args.k)
    return _emit(args, "kcoloring", cfg, records, summary, xp.KCOLORING_FIELDS)


def cmd_exp_audit(args) -> int:
    n = _require_n(args)
    cfg = xp.ExperimentConfig(
        n=n,
        trials=args.trials,
        seed=args.seed,
        params={"eps": args.eps, "d": args.d},
        workers=args.workers,
    )
    records, summary = xp.run_lemma_audit_experiment(cfg)
    return _emit(args, "audit", cfg, records, summary, xp.AUDIT_FIELDS)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except xp.InvariantViolationError as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
