"""Exact rainbow-connection ground truth for small graphs.

rc_exact enumerates colorings ascending in k (first edge pinned to color 0 by
symmetry) and checks each with is_rainbow_connected; rc_at_most_2 is an
independent backtracking search over edge 2-colorings with unit propagation
on pairs that have a single 2-path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .coloring import EdgeColoring, is_rainbow_connected
from .graphs import Graph, diameter, has_diameter_at_most_2

__all__ = [
    "OracleBudget",
    "BudgetExceededError",
    "rc_exact",
    "rc_exact_with_witness",
    "rc_at_most_2",
    "find_rc2_coloring",
]


@dataclass(frozen=True)
class OracleBudget:
    max_colorings: int = 2**30  # total candidate colorings / search nodes
    max_k: int = 8

    def __post_init__(self):
        if self.max_colorings < 1 or self.max_k < 1:
            raise ValueError("budget fields must be positive")


class BudgetExceededError(Exception):
    """Search budget ran out; carries the color count reached."""

    def __init__(self, k_reached: int, explored: int):
        self.k_reached = k_reached
        self.explored = explored
        super().__init__(f"budget exceeded at k={k_reached} after {explored} candidates")


def rc_exact_with_witness(
    g: Graph, budget: OracleBudget = OracleBudget()
) -> tuple[float, EdgeColoring | None]:
    """(rc value, witness coloring); (inf, None) when disconnected."""
    diam = diameter(g)
    if diam == math.inf:
        return math.inf, None
    k0 = max(1, int(diam))
    explored = 0
    m = g.m
    for k in range(k0, budget.max_k + 1):
        if m == 0:
            col = EdgeColoring(g, k)
            if is_rainbow_connected(g, col, k):
                return k, col
            continue
        for rest in itertools.product(range(k), repeat=m - 1):
            explored += 1
            if explored > budget.max_colorings:
                raise BudgetExceededError(k, explored - 1)
            colors = np.empty(m, np.int16)
            colors[0] = 0
            colors[1:] = rest
            col = EdgeColoring.from_colors(g, k, colors)
            if is_rainbow_connected(g, col, k):
                return k, col
    raise BudgetExceededError(budget.max_k, explored)


def rc_exact(g: Graph, budget: OracleBudget = OracleBudget()) -> float:
    """Smallest k admitting a rainbow-connecting k-coloring; inf if disconnected."""
    return rc_exact_with_witness(g, budget)[0]


def _pair_constraints(g: Graph):
    """For each non-adjacent pair, the list of its 2-paths as edge-id pairs."""
    n = g.n
    constraints = []
    for v in range(n):
        for w in range(v + 1, n):
            if g.adjacent(v, w):
                continue
            paths = [
                (g.edge_id(min(v, z), max(v, z)), g.edge_id(min(z, w), max(z, w)))
                for z in map(int, g.common_neighbor_indices(v, w))
            ]
            constraints.append(paths)
    return constraints


def find_rc2_coloring(g: Graph, budget: OracleBudget = OracleBudget()) -> EdgeColoring | None:
    """A 2-coloring giving every pair a rainbow path of length <= 2, or None.

    Backtracks over edge colors; unit-propagates pairs whose single remaining
    2-path has one colored edge. Returns None immediately when diameter > 2.
    """
    if g.n <= 1:
        return EdgeColoring(g, 2)
    if not has_diameter_at_most_2(g):
        return None
    m = g.m
    constraints = _pair_constraints(g)
    if not constraints:
        col = EdgeColoring(g, 2)
        col.colors[:] = 0
        return col

    touching: list[list[tuple[int, int]]] = [[] for _ in range(m)]  # edge -> (pair, other_edge)
    single_weight = [0] * m
    for pid, paths in enumerate(constraints):
        for (e1, e2) in paths:
            touching[e1].append((pid, e2))
            touching[e2].append((pid, e1))
        if len(paths) == 1:
            e1, e2 = paths[0]
            single_weight[e1] += 1
            single_weight[e2] += 1

    order = sorted(range(m), key=lambda e: (-single_weight[e], e))
    colors = np.full(m, -1, np.int8)
    satisfied = [False] * len(constraints)
    unsatisfied = len(constraints)
    explored = 0

    def pair_status(pid: int):
        """(conflict, forced) after a color change touching this pair."""
        nonlocal unsatisfied
        alive = []
        for (e1, e2) in constraints[pid]:
            c1, c2 = colors[e1], colors[e2]
            if c1 >= 0 and c2 >= 0:
                if c1 != c2:
                    satisfied[pid] = True
                    unsatisfied -= 1
                    return False, None
            else:
                alive.append((e1, e2))
        if not alive:
            return True, None
        if len(alive) == 1:
            e1, e2 = alive[0]
            c1, c2 = colors[e1], colors[e2]
            if c1 >= 0:
                return False, (e2, 1 - int(c1))
            if c2 >= 0:
                return False, (e1, 1 - int(c2))
        return False, None

    def assign(e: int, c: int, trail: list) -> bool:
        """Set colors[e]=c and propagate; False on conflict."""
        nonlocal unsatisfied
        queue = [(e, c)]
        while queue:
            e, c = queue.pop()
            if colors[e] >= 0:
                if colors[e] != c:
                    return False
                continue
            colors[e] = c
            trail.append(e)
            for (pid, _other) in touching[e]:
                if satisfied[pid]:
                    continue
                conflict, forced = pair_status(pid)
                if conflict:
                    return False
                if forced is not None:
                    queue.append(forced)
        return True

    def search(depth: int) -> bool:
        nonlocal explored, unsatisfied
        if unsatisfied == 0:
            return True
        while depth < m and colors[order[depth]] >= 0:
            depth += 1
        if depth == m:
            return unsatisfied == 0
        e = order[depth]
        for c in (0, 1):
            explored += 1
            if explored > budget.max_colorings:
                raise BudgetExceededError(2, explored - 1)
            trail: list[int] = []
            sat_snapshot = satisfied.copy()
            unsat_snapshot = unsatisfied
            if assign(e, c, trail) and search(depth + 1):
                return True
            for ee in trail:
                colors[ee] = -1
            satisfied[:] = sat_snapshot
            unsatisfied = unsat_snapshot
        return False

    # symmetry: pin the first edge in the search order to color 0
    trail0: list[int] = []
    if not assign(order[0], 0, trail0):
        return None
    if unsatisfied > 0 and not search(0):
        return None
    col = EdgeColoring(g, 2)
    col.colors[:] = np.where(colors < 0, 0, colors)
    return col


def rc_at_most_2(g: Graph, budget: OracleBudget = OracleBudget()) -> bool:
    """True iff some 2-coloring joins every pair by an adjacent edge or a
    bicolored 2-path."""
    return find_rc2_coloring(g, budget) is not None
