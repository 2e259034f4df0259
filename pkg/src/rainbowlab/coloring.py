"""Edge colorings, rainbow 2-path counting, and rainbow-connectivity checks."""

from __future__ import annotations

import numpy as np

from .graphs import Graph, _pack_rows

__all__ = [
    "EdgeColoring",
    "UnassignedEdgeError",
    "restrict_coloring",
    "color_edges_random",
    "rainbow_two_path_count",
    "is_rainbow_connected",
    "coloring_to_text",
    "coloring_from_text",
    "write_coloring",
    "read_coloring",
]

MAX_COLORS_SEARCH = 8  # color-subset search caps at 2^8 states per vertex

UNASSIGNED = -1


class UnassignedEdgeError(ValueError):
    """An operation needed the color of an edge that has none."""

    def __init__(self, u: int, v: int):
        self.edge = (u, v)
        super().__init__(f"edge ({u}, {v}) has no color assigned")


class EdgeColoring:
    """Partial map edge -> color in 0..k-1, with flag bits, bound to one graph.

    Single-writer: verification helpers only read. Colors are stored per edge
    index of ``graph.edges()``; -1 marks unassigned.
    """

    def __init__(self, graph: Graph, k: int):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.graph = graph
        self.k = k
        self._colors = np.full(graph.m, UNASSIGNED, np.int16)
        self._flags = np.zeros(graph.m, bool)

    @classmethod
    def from_colors(cls, graph: Graph, k: int, colors: np.ndarray) -> "EdgeColoring":
        col = cls(graph, k)
        colors = np.asarray(colors, np.int16)
        if colors.shape != (graph.m,):
            raise ValueError("colors array must have one entry per edge")
        if np.any((colors < UNASSIGNED) | (colors >= k)):
            raise ValueError("color out of range")
        col._colors = colors.copy()
        return col

    # -- single-edge access -------------------------------------------------

    def _eid(self, u: int, v: int) -> int:
        return self.graph.edge_id(u, v)

    def color_of(self, u: int, v: int):
        c = int(self._colors[self._eid(u, v)])
        return None if c == UNASSIGNED else c

    def require_color(self, u: int, v: int) -> int:
        c = int(self._colors[self._eid(u, v)])
        if c == UNASSIGNED:
            raise UnassignedEdgeError(min(u, v), max(u, v))
        return c

    def set_color(self, u: int, v: int, c: int) -> None:
        if not 0 <= c < self.k:
            raise ValueError(f"color {c} outside 0..{self.k - 1}")
        self._colors[self._eid(u, v)] = c

    def is_assigned(self, u: int, v: int) -> bool:
        return self._colors[self._eid(u, v)] != UNASSIGNED

    def flag(self, u: int, v: int) -> None:
        i = self._eid(u, v)
        if self._colors[i] == UNASSIGNED:
            raise UnassignedEdgeError(min(u, v), max(u, v))
        self._flags[i] = True

    def is_flagged(self, u: int, v: int) -> bool:
        return bool(self._flags[self._eid(u, v)])

    # -- bulk views ----------------------------------------------------------

    @property
    def colors(self) -> np.ndarray:
        return self._colors

    @property
    def flags(self) -> np.ndarray:
        return self._flags

    @property
    def assigned_count(self) -> int:
        return int(np.count_nonzero(self._colors != UNASSIGNED))

    @property
    def fully_assigned(self) -> bool:
        return self.assigned_count == self.graph.m

    def flagged_edges(self) -> np.ndarray:
        return self.graph.edges()[self._flags]

    def copy(self) -> "EdgeColoring":
        out = EdgeColoring(self.graph, self.k)
        out._colors = self._colors.copy()
        out._flags = self._flags.copy()
        return out

    def check_fully_assigned(self) -> None:
        missing = np.flatnonzero(self._colors == UNASSIGNED)
        if len(missing):
            u, v = self.graph.edges()[missing[0]]
            raise UnassignedEdgeError(int(u), int(v))

    def color_matrix(self, c: int, dtype=np.float32) -> np.ndarray:
        """Dense adjacency matrix of the edges colored c."""
        n = self.graph.n
        a = np.zeros((n, n), dtype)
        e = self.graph.edges()[self._colors == c]
        a[e[:, 0], e[:, 1]] = 1
        a[e[:, 1], e[:, 0]] = 1
        return a

    def color_bit_rows(self, c: int) -> np.ndarray:
        """Packed bit rows of the color-c subgraph."""
        e = self.graph.edges()[self._colors == c]
        return _pack_rows(self.graph.n, e[:, 0].astype(np.int64), e[:, 1].astype(np.int64))

    def __repr__(self):
        return (
            f"EdgeColoring(n={self.graph.n}, m={self.graph.m}, k={self.k}, "
            f"assigned={self.assigned_count}, flagged={int(self._flags.sum())})"
        )


def restrict_coloring(col: EdgeColoring, h: Graph) -> EdgeColoring:
    """Coloring of the subgraph h inheriting the colors col gives its edges."""
    from .graphs import pair_indices

    g = col.graph
    if not h.is_subgraph_of(g):
        raise ValueError("h must be a subgraph of the colored graph")
    eh = h.edges()
    if h.m == 0:
        return EdgeColoring(h, col.k)
    eg = g.edges()
    pos = np.searchsorted(pair_indices(g.n, eg[:, 0], eg[:, 1]), pair_indices(h.n, eh[:, 0], eh[:, 1]))
    return EdgeColoring.from_colors(h, col.k, col.colors[pos])


def color_edges_random(g: Graph, k: int, rng: np.random.Generator) -> EdgeColoring:
    """Each edge gets an independent uniform color from 0..k-1; no flags."""
    if k < 1:
        raise ValueError("k must be >= 1")
    col = EdgeColoring(g, k)
    col._colors[:] = rng.integers(0, k, g.m, dtype=np.int16)
    return col


def rainbow_two_path_count(g: Graph, col: EdgeColoring, v: int, w: int) -> int:
    """Number of z adjacent to both v and w with color(vz) != color(zw)."""
    if v == w:
        raise ValueError("rainbow_two_path_count requires v != w")
    count = 0
    for z in g.common_neighbor_indices(v, w):
        z = int(z)
        if col.require_color(v, z) != col.require_color(z, w):
            count += 1
    return count


def _rc2_pair_matrix(g: Graph, col: EdgeColoring) -> np.ndarray:
    """Boolean matrix: pair adjacent, or joined by a bicolored 2-path (k=2)."""
    a = g.adjacency_matrix()
    a0 = col.color_matrix(0)
    a1 = col.color_matrix(1)
    r = a0 @ a1
    return (a > 0) | (r > 0) | (r.T > 0)


def is_rainbow_connected(g: Graph, col: EdgeColoring, max_len: int) -> bool:
    """True iff every vertex pair is joined by a rainbow path of length <= max_len.

    Layered reachability over (vertex, used-color-subset) states, batched over
    all sources: reach[S] holds the pairs joined by a rainbow walk whose colors
    are exactly S (shortcutting a rainbow walk yields a rainbow path, so walks
    suffice). k = 2 takes the pair-scan fast path.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if col.k > MAX_COLORS_SEARCH:
        raise ValueError(f"k={col.k} exceeds supported maximum {MAX_COLORS_SEARCH}")
    if col.graph != g:
        raise ValueError("coloring is bound to a different graph")
    col.check_fully_assigned()
    n = g.n
    if n <= 1:
        return True

    if col.k == 2 and max_len >= 2:
        ok = _rc2_pair_matrix(g, col)
        np.fill_diagonal(ok, True)
        return bool(ok.all())

    k = col.k
    covered = g.adjacency_matrix() > 0
    np.fill_diagonal(covered, True)
    if max_len == 1 or bool(covered.all()):
        return bool(covered.all())

    mats = {c: col.color_matrix(c) for c in range(k)}
    layer = {1 << c: mats[c] > 0 for c in range(k)}
    depth = 1
    while depth < min(max_len, k):
        nxt: dict[int, np.ndarray] = {}
        for mask, reach in layer.items():
            rf = reach.astype(np.float32)
            for c in range(k):
                bit = 1 << c
                if mask & bit:
                    continue
                ext = (rf @ mats[c]) > 0
                m2 = mask | bit
                if m2 in nxt:
                    nxt[m2] |= ext
                else:
                    nxt[m2] = ext
        for reach in nxt.values():
            covered |= reach
        if bool(covered.all()):
            return True
        layer = nxt
        depth += 1
    return bool(covered.all())


# ---------------------------------------------------------------------------
# text format: "n m k" header, then "u v c" per assigned edge

def coloring_to_text(col: EdgeColoring) -> str:
    g = col.graph
    assigned = np.flatnonzero(col.colors != UNASSIGNED)
    lines = [f"{g.n} {len(assigned)} {col.k}"]
    e = g.edges()
    for i in assigned:
        lines.append(f"{e[i, 0]} {e[i, 1]} {col.colors[i]}")
    return "\n".join(lines) + "\n"


def coloring_from_text(text: str, graph: Graph) -> EdgeColoring:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty coloring file")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError(f"bad header line: {lines[0]!r}")
    n, m, k = (int(x) for x in head)
    if n != graph.n:
        raise ValueError(f"coloring is for n={n}, graph has n={graph.n}")
    if len(lines) - 1 != m:
        raise ValueError(f"header declares {m} colored edges, found {len(lines) - 1}")
    col = EdgeColoring(graph, k)
    for ln in lines[1:]:
        u, v, c = (int(x) for x in ln.split())
        col.set_color(u, v, c)
    return col


def write_coloring(col: EdgeColoring, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(coloring_to_text(col))


def read_coloring(path, graph: Graph) -> EdgeColoring:
    with open(path) as fh:
        return coloring_from_text(fh.read(), graph)
