"""Render figures from rainbowlab experiment reports.

Inputs are the stable version-1 JSON reports (or the matching CSV record
files); nothing here imports the simulation code. Three figure kinds:

- ``threshold_curve``: empirical P(diam <= 2) per c with binomial 95% CIs,
  one series per input file, overlaid on the analytic limit exp(-exp(-c)/2);
  certified rc=2 rates are drawn as open markers when present.
- ``hitting_hist``: histogram of the diameter-2 hitting time next to a bar
  chart of certification verdicts.
- ``audit_rates``: structural-audit violation rates against n, one line per
  audited bound.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "SchemaError", "FIGURE_KINDS", "render", "build_figure"]

FIGURE_KINDS = ("threshold_curve", "hitting_hist", "audit_rates")

FIG_SIZE = (6.4, 4.0)
DPI = 150


class SchemaError(ValueError):
    """Input file does not match the expected report schema."""


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple[str, ...]
    kind: str
    out: str
    title: str | None = None

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; expected one of {FIGURE_KINDS}")
        if not self.inputs:
            raise SchemaError("spec lists no input files")

    @classmethod
    def from_json_file(cls, path: str) -> "FigureSpec":
        with open(path) as fh:
            data = json.load(fh)
        for key in ("inputs", "kind", "out"):
            if key not in data:
                raise SchemaError(f"figure spec missing field {key!r}")
        return cls(
            inputs=tuple(data["inputs"]),
            kind=data["kind"],
            out=data["out"],
            title=data.get("title"),
        )


@dataclass
class Report:
    """One loaded input: records plus whatever summary/config is available."""

    path: str
    records: list[dict]
    summary: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        n = self.config.get("n")
        if n is not None:
            return f"n={n}"
        return os.path.splitext(os.path.basename(self.path))[0]


def _load_json(path: str) -> Report:
    with open(path) as fh:
        data = json.load(fh)
    if "version" not in data:
        raise SchemaError(f"{path}: missing field 'version'")
    if data["version"] != 1:
        raise SchemaError(f"{path}: schema version {data['version']} != 1")
    for key in ("records", "summary", "config"):
        if key not in data:
            raise SchemaError(f"{path}: missing field {key!r}")
    return Report(path, data["records"], data["summary"], data["config"])


def _coerce(value: str):
    if value == "":
        return None
    if value in ("True", "False"):
        return value == "True"
    try:
        return int(value)
    except ValueError:
        try:
            return float(value)
        except ValueError:
            return value


def _load_csv(path: str) -> Report:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: missing field 'header'")
        records = [{k: _coerce(v) for k, v in row.items()} for row in reader]
    return Report(path, records)


def load_report(path: str) -> Report:
    if not os.path.exists(path):
        raise SchemaError(f"input file does not exist: {path}")
    if path.endswith(".csv"):
        return _load_csv(path)
    return _load_json(path)


def _require_record_field(report: Report, name: str) -> None:
    if report.records and name not in report.records[0]:
        raise SchemaError(f"{report.path}: records missing field {name!r}")


def _binomial_ci(freq: float, count: int) -> float:
    if count == 0:
        return 0.0
    return 1.96 * math.sqrt(freq * (1 - freq) / count)


def _threshold_series(report: Report):
    """(c, frequency, ci, certified_rate) for one corollary report."""
    if "c" in report.config:
        c = float(report.config["c"])
    elif "c" in report.summary:
        c = float(report.summary["c"])
    else:
        raise SchemaError(f"{report.path}: missing field 'c'")
    _require_record_field(report, "diam2")
    if report.records:
        hits = sum(1 for r in report.records if r["diam2"])
        freq = hits / len(report.records)
        ci = _binomial_ci(freq, len(report.records))
    elif "diam2_frequency" in report.summary:
        freq = report.summary["diam2_frequency"]
        ci = report.summary.get("ci95_halfwidth", 0.0)
    else:
        freq = ci = None
    certified = [r for r in report.records if r.get("certified") is not None]
    cert_rate = (
        sum(1 for r in certified if r["certified"]) / len(certified) if certified else None
    )
    return c, freq, ci, cert_rate


def _fig_threshold_curve(reports: list[Report], title: str | None):
    fig, ax = plt.subplots(figsize=FIG_SIZE)
    cs = [
        _threshold_series(r)[0]
        for r in reports
    ]
    lo = min(cs + [-4.0]) - 1.0
    hi = max(cs + [4.0]) + 1.0
    grid = np.linspace(lo, hi, 400)
    ax.plot(grid, np.exp(-np.exp(-grid) / 2), color="black", lw=1.2, label="limit exp(-exp(-c)/2)")

    by_label: dict[str, list] = {}
    for r in reports:
        by_label.setdefault(r.label, []).append(_threshold_series(r))
    for idx, (label, rows) in enumerate(sorted(by_label.items())):
        rows = sorted(rows)
        pts = [(c, f, ci) for (c, f, ci, _) in rows if f is not None]
        if pts:
            c_arr, f_arr, ci_arr = (np.array(x, float) for x in zip(*pts))
            ax.errorbar(
                c_arr, f_arr, yerr=ci_arr, fmt="o", ms=4.5, capsize=3,
                color=f"C{idx}", label=f"{label} empirical",
            )
        cert = [(c, cr) for (c, _, _, cr) in rows if cr is not None]
        if cert:
            c_arr, r_arr = (np.array(x, float) for x in zip(*cert))
            ax.plot(
                c_arr, r_arr, "s", ms=6, mfc="none", color=f"C{idx}",
                label=f"{label} certified rc=2",
            )
    ax.set_xlabel("c  (edge probability sqrt((2 log n + c)/n))")
    ax.set_ylabel("probability")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    ax.set_title(title or "diameter-2 probability vs c")
    return fig


def _fig_hitting_hist(reports: list[Report], title: str | None):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(FIG_SIZE[0] * 1.4, FIG_SIZE[1]))
    for r in reports:
        _require_record_field(r, "tau_diam2")
    for idx, r in enumerate(reports):
        taus = [rec["tau_diam2"] for rec in r.records]
        if taus:
            ax1.hist(taus, bins=min(30, max(5, len(set(taus)))), alpha=0.6,
                     color=f"C{idx}", label=r.label)
    ax1.set_xlabel("diameter-2 hitting time")
    ax1.set_ylabel("trials")
    ax1.legend(fontsize=8)

    verdicts: dict[str, dict[str, int]] = {}
    for r in reports:
        counts: dict[str, int] = {}
        for rec in r.records:
            v = rec.get("verdict", "unknown")
            counts[v] = counts.get(v, 0) + 1
        verdicts[r.label] = counts
    all_verdicts = sorted({v for c in verdicts.values() for v in c})
    width = 0.8 / max(1, len(verdicts))
    for idx, (label, counts) in enumerate(sorted(verdicts.items())):
        xs = np.arange(len(all_verdicts)) + idx * width
        ax2.bar(xs, [counts.get(v, 0) for v in all_verdicts], width=width,
                color=f"C{idx}", label=label)
    ax2.set_xticks(np.arange(len(all_verdicts)) + 0.4 - width / 2)
    ax2.set_xticklabels(all_verdicts, rotation=20, fontsize=7)
    ax2.set_ylabel("trials")
    ax2.legend(fontsize=8)
    fig.suptitle(title or "hitting-time distribution and verdicts")
    fig.tight_layout()
    return fig


AUDIT_SECTIONS = (
    ("degree_window_pass", "degree window"),
    ("dangerous_membership_pass", "dangerous membership"),
    ("exclusive_floor_pass", "exclusive-fix floor"),
)


def _fig_audit_rates(reports: list[Report], title: str | None):
    fig, ax = plt.subplots(figsize=FIG_SIZE)
    rows = []
    for r in reports:
        for key, _ in AUDIT_SECTIONS:
            _require_record_field(r, key)
        n = r.config.get("n")
        if n is None:
            raise SchemaError(f"{r.path}: missing field 'n'")
        rates = {
            key: (sum(1 for rec in r.records if not rec[key]) / len(r.records))
            if r.records
            else 0.0
            for key, _ in AUDIT_SECTIONS
        }
        rows.append((int(n), rates))
    rows.sort()
    ns = [n for n, _ in rows]
    for key, label in AUDIT_SECTIONS:
        ax.plot(ns, [rates[key] for _, rates in rows], "o-", label=label)
    ax.set_xlabel("n")
    ax.set_ylabel("violation rate across trials")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(fontsize=8)
    ax.set_title(title or "structural audit violation rates")
    return fig


_BUILDERS = {
    "threshold_curve": _fig_threshold_curve,
    "hitting_hist": _fig_hitting_hist,
    "audit_rates": _fig_audit_rates,
}


def build_figure(spec: FigureSpec):
    """The matplotlib figure for a spec (exposed for inspection in tests)."""
    reports = [load_report(p) for p in spec.inputs]
    return _BUILDERS[spec.kind](reports, spec.title)


def render(spec: FigureSpec) -> str:
    """Render the figure to spec.out; deterministic, no embedded timestamps."""
    fig = build_figure(spec)
    out_dir = os.path.dirname(os.path.abspath(spec.out))
    os.makedirs(out_dir, exist_ok=True)
    # strip the Software tag so identical inputs give identical bytes
    fig.savefig(spec.out, dpi=DPI, metadata={"Software": None})
    plt.close(fig)
    return spec.out
