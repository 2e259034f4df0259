"""Flag-and-recolor: turn a spanning subgraph's budget-respecting 2-coloring
into a rainbow-2 coloring of the full graph.

The pass order is deterministic: sparsely sub-connected sub-dangerous pairs in
lexicographic order first (their 2-paths may run through the full edge set,
assigning colors to bare edges as needed), then richly sub-connected
sub-dangerous pairs (2-paths restricted to the subgraph), then remaining bare
edges get color 0. Every edge touched is flagged and never recolored again.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coloring import EdgeColoring, _rc2_pair_matrix
from .danger import DEFAULT_D, classify_pairs
from .graphs import Graph, pair_indices

__all__ = [
    "REASON_NO_DIAMETER2_PATH",
    "REASON_BOTH_EDGES_FLAGGED",
    "REASON_NO_UNFLAGGED_PATH",
    "RecolorFailure",
    "PairAction",
    "RecolorTrace",
    "recolor",
    "verify_rc2_coloring",
]

REASON_NO_DIAMETER2_PATH = "NoDiameter2Path"
REASON_BOTH_EDGES_FLAGGED = "BothEdgesFlagged"
REASON_NO_UNFLAGGED_PATH = "NoUnflaggedPath"


@dataclass(frozen=True)
class RecolorFailure:
    """Structured failure: the named precondition did not hold for ``pair``."""

    reason: str
    pair: tuple[int, int]

    def to_json_dict(self) -> dict:
        return {"reason": self.reason, "pair": [int(self.pair[0]), int(self.pair[1])]}


@dataclass(frozen=True)
class PairAction:
    pair: tuple[int, int]
    middle: int
    flagged: tuple[tuple[int, int], ...]  # edges newly flagged for this pair
    assigned: tuple[tuple[int, int, int], ...]  # (u, v, color) writes made

    def to_json_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "middle": self.middle,
            "flagged": [list(e) for e in self.flagged],
            "assigned": [[u, v, c] for (u, v, c) in self.assigned],
        }


@dataclass
class RecolorTrace:
    sparse_pass: list[PairAction] = field(default_factory=list)
    rich_pass: list[PairAction] = field(default_factory=list)
    leftover_assignments: list[tuple[int, int, int]] = field(default_factory=list)
    flag_counts: np.ndarray | None = None  # per-vertex flagged-edge counts

    @property
    def max_flag_count(self) -> int:
        return int(self.flag_counts.max()) if self.flag_counts is not None and len(self.flag_counts) else 0

    def to_json_dict(self) -> dict:
        return {
            "sparse_pass": [a.to_json_dict() for a in self.sparse_pass],
            "rich_pass": [a.to_json_dict() for a in self.rich_pass],
            "leftover_assignments": [[u, v, c] for (u, v, c) in self.leftover_assignments],
            "flag_counts": [int(x) for x in self.flag_counts] if self.flag_counts is not None else [],
            "max_flag_count": self.max_flag_count,
        }


def verify_rc2_coloring(g: Graph, col: EdgeColoring) -> bool:
    """True iff every pair is adjacent or joined by a bicolored 2-path."""
    if col.k != 2:
        raise ValueError("verification requires a 2-coloring")
    if col.graph != g:
        raise ValueError("coloring is bound to a different graph")
    col.check_fully_assigned()
    ok = _rc2_pair_matrix(g, col)
    np.fill_diagonal(ok, True)
    return bool(ok.all())


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def _make_rainbow(out: EdgeColoring, v: int, z: int, w: int):
    """Adjust/assign colors on the 2-path v-z-w so its edges differ.

    Never touches a flagged edge; callers guarantee at most one edge of the
    path is flagged. Returns the (u, v, color) writes made.
    """
    e1, e2 = _edge_key(v, z), _edge_key(z, w)
    c1, c2 = out.color_of(*e1), out.color_of(*e2)
    f1, f2 = out.is_flagged(*e1), out.is_flagged(*e2)
    writes = []
    if f1 and f2:
        raise AssertionError("both path edges flagged; caller must prevent this")
    if f1 or f2:
        keep, adj = (e1, e2) if f1 else (e2, e1)
        ck = out.color_of(*keep)
        ca = out.color_of(*adj)
        if ca is None or ca == ck:
            out.set_color(*adj, 1 - ck)
            writes.append((*adj, 1 - ck))
    else:
        if c1 is None and c2 is None:
            first, second = sorted((e1, e2))
            out.set_color(*first, 0)
            out.set_color(*second, 1)
            writes.append((*first, 0))
            writes.append((*second, 1))
        elif c1 is None:
            out.set_color(*e1, 1 - c2)
            writes.append((*e1, 1 - c2))
        elif c2 is None:
            out.set_color(*e2, 1 - c1)
            writes.append((*e2, 1 - c1))
        elif c1 == c2:
            later = max(e1, e2)
            out.set_color(*later, 1 - c1)
            writes.append((*later, 1 - c1))
    return writes


def _flag_path(out: EdgeColoring, v: int, z: int, w: int):
    newly = []
    for e in (_edge_key(v, z), _edge_key(z, w)):
        if not out.is_flagged(*e):
            out.flag(*e)
            newly.append(e)
    return newly


def recolor(
    g: Graph,
    gsub: Graph,
    coloring: EdgeColoring,
    d: int = DEFAULT_D,
) -> tuple[EdgeColoring, RecolorTrace] | RecolorFailure:
    """Produce a full 2-coloring of g from a 2-colored spanning subgraph.

    On success the result makes every sub-dangerous pair rainbow-2-connected
    by construction; soundness (verify_rc2_coloring) is the caller's check.
    Failures are data: each reason names the precondition that was violated
    (no 2-path at all, all 2-paths doubly flagged, or no unflagged subgraph
    2-path for a richly sub-connected pair).
    """
    if not gsub.is_subgraph_of(g):
        raise ValueError("gsub must be a spanning subgraph of g")
    if coloring.graph != gsub:
        raise ValueError("coloring must be bound to gsub")
    if coloring.k != 2:
        raise ValueError("recoloring requires k=2")
    coloring.check_fully_assigned()

    # start from the subgraph colors; edges of g outside gsub stay unassigned
    e_sub = gsub.edges()
    e_g = g.edges()
    out = EdgeColoring(g, 2)
    if gsub.m:
        pidx_g = pair_indices(g.n, e_g[:, 0], e_g[:, 1])
        pos = np.searchsorted(pidx_g, pair_indices(gsub.n, e_sub[:, 0], e_sub[:, 1]))
        out.colors[pos] = coloring.colors

    rep = classify_pairs(gsub, coloring, d)
    dang = rep.dangerous
    sparse_mask = dang & rep.sparse
    rich_mask = dang & ~rep.sparse
    trace = RecolorTrace()

    sub_bits = gsub.bit_rows

    for (v, w) in rep.pairs[sparse_mask]:
        v, w = int(v), int(w)
        if g.adjacent(v, w):
            continue
        zs = g.common_neighbor_indices(v, w)
        if len(zs) == 0:
            return RecolorFailure(REASON_NO_DIAMETER2_PATH, (v, w))
        best_z, best_flags = -1, 3
        for z in zs:
            z = int(z)
            nf = int(out.is_flagged(*_edge_key(v, z))) + int(out.is_flagged(*_edge_key(z, w)))
            if nf < best_flags:
                best_flags, best_z = nf, z
                if nf == 0:
                    break
        if best_flags >= 2:
            return RecolorFailure(REASON_BOTH_EDGES_FLAGGED, (v, w))
        writes = _make_rainbow(out, v, best_z, w)
        newly = _flag_path(out, v, best_z, w)
        trace.sparse_pass.append(PairAction((v, w), best_z, tuple(newly), tuple(writes)))

    for (v, w) in rep.pairs[rich_mask]:
        v, w = int(v), int(w)
        if g.adjacent(v, w):
            continue
        row = sub_bits[v] & sub_bits[w]
        zs = np.flatnonzero(np.unpackbits(row, count=gsub.n, bitorder="little"))
        chosen = -1
        for z in zs:
            z = int(z)
            if out.is_flagged(*_edge_key(v, z)) or out.is_flagged(*_edge_key(z, w)):
                continue
            chosen = z
            break
        if chosen < 0:
            return RecolorFailure(REASON_NO_UNFLAGGED_PATH, (v, w))
        writes = _make_rainbow(out, v, chosen, w)
        newly = _flag_path(out, v, chosen, w)
        trace.rich_pass.append(PairAction((v, w), chosen, tuple(newly), tuple(writes)))

    bare = np.flatnonzero(out.colors == -1)
    edges = g.edges()
    for i in bare:
        out.colors[i] = 0
        trace.leftover_assignments.append((int(edges[i, 0]), int(edges[i, 1]), 0))

    flagged = g.edges()[out.flags]
    trace.flag_counts = (
        np.bincount(flagged.ravel(), minlength=g.n) if len(flagged) else np.zeros(g.n, np.int64)
    )
    return out, trace
