"""Two-round coupled generation: a random graph with a random 2-coloring,
then extra edges colored to create rainbow 2-paths for dangerous pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coloring import EdgeColoring
from .danger import DEFAULT_D
from .graphs import Graph, ProcessSequence, all_pairs, pair_count, pair_indices

__all__ = [
    "TwoRoundParams",
    "TwoRoundOutput",
    "FixLogEntry",
    "default_p_target",
    "round1_probability",
    "second_round_probability",
    "round_probabilities",
    "build_two_round",
]

MIN_DEFAULT_N = 8


def default_p_target(n: int) -> float:
    """Edge probability of the finished graph, sqrt(1.99 log n / n)."""
    return math.sqrt(1.99 * math.log(n) / n)


def round1_probability(n: int, eps: float) -> float:
    """Round-1 edge probability, sqrt((1 + eps) log n / n)."""
    return math.sqrt((1 + eps) * math.log(n) / n)


def second_round_probability(p1: float, p_target: float) -> float:
    """p2 with (1 - p_target) = (1 - p1)(1 - p2)."""
    if not 0.0 <= p1 <= p_target < 1.0:
        raise ValueError(f"need 0 <= p1 <= p_target < 1, got p1={p1}, p_target={p_target}")
    return 1.0 - (1.0 - p_target) / (1.0 - p1)


def round_probabilities(n: int, eps: float, p_target: float) -> tuple[float, float]:
    """Both round probabilities for the given target edge probability."""
    p1 = round1_probability(n, eps)
    return p1, second_round_probability(p1, p_target)


@dataclass(frozen=True)
class TwoRoundParams:
    """Build parameters. p_target defaults to sqrt(1.99 log n / n); with the
    default, n must be at least 8. Explicit p_target overrides lift the guard
    so tiny instances can be built in tests."""

    n: int
    eps: float = 0.01
    p_target: float | None = None
    d: int = DEFAULT_D

    def resolve(self) -> tuple[float, float, float]:
        """(p1, p2, p_target) after applying defaults and the min-n guard."""
        if self.p_target is None:
            if self.n < MIN_DEFAULT_N:
                raise ValueError(
                    f"n={self.n} below minimum {MIN_DEFAULT_N} for default parameters; "
                    "pass an explicit p_target for smaller instances"
                )
            pt = default_p_target(self.n)
        else:
            pt = self.p_target
        p1, p2 = round_probabilities(self.n, self.eps, pt)
        return p1, p2, pt


@dataclass(frozen=True)
class FixLogEntry:
    edge: tuple[int, int]
    color: int
    target: tuple[int, int] | None  # a dangerous pair this edge-color fixes

    def to_json_dict(self) -> dict:
        return {
            "edge": [int(self.edge[0]), int(self.edge[1])],
            "color": int(self.color),
            "target": None if self.target is None else [int(self.target[0]), int(self.target[1])],
        }


@dataclass
class TwoRoundOutput:
    g1: Graph
    g2: Graph
    coloring: EdgeColoring  # on g2, k=2, fully assigned
    round2_edges: np.ndarray  # (r, 2), lexicographic
    fix_log: list[FixLogEntry] = field(default_factory=list)

    def round1_coloring(self) -> EdgeColoring:
        """The coloring restricted to g1's edges (as a coloring of g1)."""
        e1 = self.g1.edges()
        e2 = self.g2.edges()
        pidx_g2 = pair_indices(self.g2.n, e2[:, 0], e2[:, 1])
        pos = np.searchsorted(pidx_g2, pair_indices(self.g1.n, e1[:, 0], e1[:, 1]))
        return EdgeColoring.from_colors(self.g1, 2, self.coloring.colors[pos])


def _rows_as_ints(rows: np.ndarray) -> list[int]:
    """Packed bit rows as Python ints for cheap single-row AND/scan."""
    return [int.from_bytes(row.tobytes(), "little") for row in rows]


def build_two_round(
    params: TwoRoundParams,
    rng: np.random.Generator,
    weights: ProcessSequence | None = None,
) -> TwoRoundOutput:
    """Run the two-round construction.

    Standalone mode draws the round-1 graph at p1 and adds each missing edge
    independently with probability p2; coupled mode reads both rounds off the
    supplied weight sequence (round 1 at weight <= p1, round 2 at weight in
    (p1, p_target]), so the finished graph equals the threshold graph at
    p_target edge-for-edge. Either way each potential edge of the finished
    graph is present with probability exactly p_target.

    Round-2 edges are decided in lexicographic order. An edge that fixes at
    least one pair dangerous under the frozen round-1 classification gets the
    color fixing the most such pairs (ties to color 0); other edges get a
    uniformly random color.
    """
    n = params.n
    p1, p2, p_target = params.resolve()
    N = pair_count(n)
    us, vs = all_pairs(n)

    if weights is not None:
        if weights.n != n:
            raise ValueError(f"weights are for n={weights.n}, params have n={n}")
        w = weights.weights
        mask1 = w <= p1
        mask2 = (w > p1) & (w <= p_target)
    else:
        mask1 = rng.random(N) < p1
        mask2 = (rng.random(N) < p2) & ~mask1

    g1 = Graph.from_edge_arrays(n, us[mask1], vs[mask1])
    col1 = EdgeColoring(g1, 2)
    col1.colors[:] = rng.integers(0, 2, g1.m, dtype=np.int16)
    color_draws = rng.integers(0, 2, N, dtype=np.int16)

    # frozen round-1 classification: dangerous pair matrix and color votes
    a = g1.adjacency_matrix()
    a0 = col1.color_matrix(0)
    a1 = col1.color_matrix(1)
    r = a0 @ a1
    rain = r + r.T
    dm = ((rain <= params.d) & (a == 0)).astype(np.float32)
    np.fill_diagonal(dm, 0)
    # votes_c[x, y] = #dangerous pairs {x, k}, k neighbor of y via an edge of
    # color 1-c (adding xy colored c completes a rainbow 2-path x-y-k)
    s0 = dm @ a1
    s1 = dm @ a0

    r2us, r2vs = us[mask2], vs[mask2]
    votes0 = s0[r2us, r2vs] + s0[r2vs, r2us]
    votes1 = s1[r2us, r2vs] + s1[r2vs, r2us]
    chosen = np.where(votes1 > votes0, 1, 0).astype(np.int16)
    no_fix = (votes0 + votes1) == 0
    chosen[no_fix] = color_draws[mask2][no_fix]

    dang_ints = _rows_as_ints(np.packbits(dm.astype(np.uint8), axis=1, bitorder="little"))
    col_ints = (_rows_as_ints(col1.color_bit_rows(0)), _rows_as_ints(col1.color_bit_rows(1)))

    fix_log: list[FixLogEntry] = []
    for i in range(len(r2us)):
        x, y = int(r2us[i]), int(r2vs[i])
        c = int(chosen[i])
        target = None
        if not no_fix[i]:
            want = col_ints[1 - c]
            hit = dang_ints[x] & want[y]
            if hit:
                k = (hit & -hit).bit_length() - 1
                target = (min(x, k), max(x, k))
            else:
                hit = dang_ints[y] & want[x]
                # votes > 0 guarantees one side has a match
                l = (hit & -hit).bit_length() - 1
                target = (min(y, l), max(y, l))
        fix_log.append(FixLogEntry((x, y), c, target))

    both_us = np.concatenate([us[mask1], r2us])
    both_vs = np.concatenate([vs[mask1], r2vs])
    g2 = Graph.from_edge_arrays(n, both_us, both_vs)

    # place colors by edge position in g2's lexicographic edge list
    pidx_g2 = pair_indices(n, g2.edges()[:, 0], g2.edges()[:, 1])
    colors2 = np.empty(g2.m, np.int16)
    pos1 = np.searchsorted(pidx_g2, pair_indices(n, us[mask1], vs[mask1]))
    colors2[pos1] = col1.colors
    pos2 = np.searchsorted(pidx_g2, pair_indices(n, r2us, r2vs))
    colors2[pos2] = chosen
    col2 = EdgeColoring.from_colors(g2, 2, colors2)

    return TwoRoundOutput(
        g1=g1,
        g2=g2,
        coloring=col2,
        round2_edges=np.column_stack([r2us, r2vs]).astype(np.int32),
        fix_log=fix_log,
    )
