"""Immutable bitset-backed simple graphs, G(n,p) generators, and the coupled edge process.

Vertices are dense 0-based integers. Adjacency is stored as n packed bit rows
(uint8, little-endian bit order), which makes pair scans and the diameter-2
predicate word-AND operations.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "Graph",
    "ProcessSequence",
    "make_graph",
    "gen_gnp",
    "gen_weighted_process",
    "snapshot",
    "threshold_graph",
    "diameter",
    "has_diameter_at_most_2",
    "common_neighbors",
    "pair_count",
    "all_pairs",
    "pair_index",
    "pair_indices",
    "write_graph",
    "read_graph",
    "graph_to_text",
    "graph_from_text",
    "write_process",
    "read_process",
]


def pair_count(n: int) -> int:
    """Number of potential edges on n vertices."""
    return n * (n - 1) // 2


def all_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All vertex pairs (u, v) with u < v in lexicographic order."""
    iu = np.triu_indices(n, k=1)
    return iu[0].astype(np.int32), iu[1].astype(np.int32)


def pair_index(n: int, u: int, v: int) -> int:
    """Lexicographic index of the pair {u, v} among all C(n,2) pairs."""
    if u > v:
        u, v = v, u
    if u == v or u < 0 or v >= n:
        raise ValueError(f"invalid pair ({u}, {v}) for n={n}")
    return u * n - u * (u + 1) // 2 + (v - u - 1)


def pair_indices(n: int, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Vectorized pair_index for arrays with us < vs elementwise."""
    us = us.astype(np.int64)
    vs = vs.astype(np.int64)
    return us * n - us * (us + 1) // 2 + (vs - us - 1)


def _pack_rows(n: int, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Packed symmetric adjacency rows from edge endpoint arrays; duplicates collapse."""
    nbytes = (n + 7) // 8
    if len(us) == 0:
        return np.zeros((n, nbytes), np.uint8)
    keys = np.unique(np.minimum(us, vs) * n + np.maximum(us, vs))
    us, vs = keys // n, keys % n
    lin = np.concatenate([us * nbytes + (vs >> 3), vs * nbytes + (us >> 3)])
    # after dedup each (row, byte) cell sees each bit once, so float summation
    # equals bitwise OR
    w = np.concatenate([(1 << (vs & 7)), (1 << (us & 7))]).astype(np.float64)
    acc = np.bincount(lin.astype(np.int64), weights=w, minlength=n * nbytes)
    return acc.astype(np.uint8).reshape(n, nbytes)


class Graph:
    """Immutable simple undirected graph with packed bit rows.

    Use :func:`make_graph` or the generators to construct one.
    """

    __slots__ = ("n", "m", "_bits", "_edges", "_edge_index", "_adj")

    def __init__(self, n: int, bits: np.ndarray):
        self.n = n
        bits = np.ascontiguousarray(bits, dtype=np.uint8)
        bits.setflags(write=False)
        self._bits = bits
        self.m = int(np.bitwise_count(bits).sum()) // 2
        self._edges = None
        self._edge_index = None
        self._adj = None

    @classmethod
    def from_edge_arrays(cls, n: int, us: np.ndarray, vs: np.ndarray) -> "Graph":
        return cls(n, _pack_rows(n, np.asarray(us, np.int64), np.asarray(vs, np.int64)))

    @property
    def bit_rows(self) -> np.ndarray:
        """Read-only packed adjacency rows, shape (n, ceil(n/8))."""
        return self._bits

    def adjacent(self, u: int, v: int) -> bool:
        return bool((self._bits[u, v >> 3] >> (v & 7)) & 1)

    def neighbors(self, v: int) -> np.ndarray:
        row = np.unpackbits(self._bits[v], count=self.n, bitorder="little")
        return np.flatnonzero(row)

    def neighbor_mask(self, v: int) -> np.ndarray:
        return np.unpackbits(self._bits[v], count=self.n, bitorder="little").astype(bool)

    def degree(self, v: int) -> int:
        return int(np.bitwise_count(self._bits[v]).sum())

    def degrees(self) -> np.ndarray:
        return np.bitwise_count(self._bits).sum(axis=1).astype(np.int64)

    def edges(self) -> np.ndarray:
        """Edge list as an (m, 2) array, rows (u, v) with u < v, lexicographic."""
        if self._edges is None:
            rows = np.unpackbits(self._bits, axis=1, count=self.n, bitorder="little")
            us, vs = np.nonzero(np.triu(rows, k=1))
            e = np.column_stack([us, vs]).astype(np.int32)
            e.setflags(write=False)
            self._edges = e
        return self._edges

    def edge_id(self, u: int, v: int) -> int:
        """Index of edge {u, v} in edges(); KeyError if absent."""
        if self._edge_index is None:
            e = self.edges()
            self._edge_index = {(int(a), int(b)): i for i, (a, b) in enumerate(e)}
        if u > v:
            u, v = v, u
        return self._edge_index[(u, v)]

    def adjacency_matrix(self, dtype=np.float32) -> np.ndarray:
        """Dense n x n 0/1 adjacency matrix (cached for float32)."""
        if dtype == np.float32 and self._adj is not None:
            return self._adj
        a = np.unpackbits(self._bits, axis=1, count=self.n, bitorder="little").astype(dtype)
        if dtype == np.float32:
            a.setflags(write=False)
            self._adj = a
        return a

    def common_neighbor_row(self, v: int, w: int) -> np.ndarray:
        return self._bits[v] & self._bits[w]

    def common_neighbor_indices(self, v: int, w: int) -> np.ndarray:
        row = np.unpackbits(self._bits[v] & self._bits[w], count=self.n, bitorder="little")
        return np.flatnonzero(row)

    def is_subgraph_of(self, other: "Graph") -> bool:
        return self.n == other.n and not np.any(self._bits & ~other._bits)

    def with_edges(self, extra: list[tuple[int, int]]) -> "Graph":
        """New graph with the given edges added."""
        for (u, v) in extra:
            _check_edge(self.n, u, v)
        e = self.edges()
        us = np.concatenate([e[:, 0], [min(u, v) for u, v in extra]])
        vs = np.concatenate([e[:, 1], [max(u, v) for u, v in extra]])
        return Graph.from_edge_arrays(self.n, us, vs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self._bits.tobytes() == other._bits.tobytes()
        )

    def __hash__(self):
        return hash((self.n, self._bits.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _check_edge(n: int, u: int, v: int) -> None:
    if u == v:
        raise ValueError(f"self-loop edge ({u}, {v})")
    if not (0 <= u < n and 0 <= v < n):
        raise ValueError(f"vertex out of range in edge ({u}, {v}) for n={n}")


def make_graph(n: int, edges: list[tuple[int, int]]) -> Graph:
    """Graph with exactly the given edge set; duplicates collapse.

    Rejects self-loops and out-of-range endpoints, naming the offending edge.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    for (u, v) in edges:
        _check_edge(n, u, v)
    us = np.array([min(u, v) for u, v in edges], np.int64)
    vs = np.array([max(u, v) for u, v in edges], np.int64)
    return Graph(n, _pack_rows(n, us, vs))


def gen_gnp(n: int, p: float, rng: np.random.Generator) -> Graph:
    """G(n,p): each potential edge present independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    us, vs = all_pairs(n)
    mask = rng.random(pair_count(n)) < p
    return Graph.from_edge_arrays(n, us[mask], vs[mask])


class ProcessSequence:
    """Per-edge i.i.d. uniform weights inducing the random edge process.

    ``order`` lists all C(n,2) potential edges ascending by weight; snapshots
    at increasing t are nested, and thresholding at p has the G(n,p) marginal.
    """

    __slots__ = ("n", "weights", "_us", "_vs", "order", "_sorted_weights")

    def __init__(self, n: int, weights: np.ndarray):
        N = pair_count(n)
        if weights.shape != (N,):
            raise ValueError(f"expected {N} weights for n={n}, got {weights.shape}")
        self.n = n
        self.weights = weights
        self.weights.setflags(write=False)
        self._us, self._vs = all_pairs(n)
        self.order = np.argsort(weights, kind="stable")
        self.order.setflags(write=False)
        self._sorted_weights = weights[self.order]

    @property
    def edge_count(self) -> int:
        return pair_count(self.n)

    def ordered_edges(self) -> np.ndarray:
        """All potential edges as an (N, 2) array ascending by weight."""
        return np.column_stack([self._us[self.order], self._vs[self.order]])

    def weight_of(self, u: int, v: int) -> float:
        return float(self.weights[pair_index(self.n, u, v)])


def gen_weighted_process(n: int, rng: np.random.Generator) -> ProcessSequence:
    """Uniform [0,1] weight per potential edge; ties resolved to distinct values."""
    if n < 1:
        raise ValueError("n must be >= 1")
    N = pair_count(n)
    w = rng.random(N)
    if len(np.unique(w)) < N:
        # bit-exact collision: fall back to permutation ranks in (0, 1)
        w = (rng.permutation(N).astype(np.float64) + 1.0) / (N + 1.0)
    return ProcessSequence(n, w)


def snapshot(seq: ProcessSequence, t: int) -> Graph:
    """Graph on the t lowest-weight edges of the process."""
    N = seq.edge_count
    if not 0 <= t <= N:
        raise ValueError(f"t={t} outside [0, {N}]")
    idx = seq.order[:t]
    return Graph.from_edge_arrays(seq.n, seq._us[idx], seq._vs[idx])


def threshold_graph(seq: ProcessSequence, p: float) -> Graph:
    """Graph on edges with weight <= p; marginally G(n,p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    t = int(np.searchsorted(seq._sorted_weights, p, side="right"))
    return snapshot(seq, t)


def common_neighbors(g: Graph, v: int, w: int) -> int:
    """|Gamma(v) & Gamma(w)| = number of 2-paths joining v and w."""
    if v == w:
        raise ValueError("common_neighbors requires v != w")
    return int(np.bitwise_count(g.bit_rows[v] & g.bit_rows[w]).sum())


def diameter(g: Graph) -> float:
    """Max shortest-path length over all pairs; math.inf iff disconnected.

    Per-vertex bitset BFS; intended for small and mid-size graphs. The hot
    diameter <= 2 predicate has the dedicated scan below.
    """
    n = g.n
    if n <= 1:
        return 0
    bits = g.bit_rows
    nbytes = bits.shape[1]
    full_count = n
    ecc_max = 0
    for v in range(n):
        visited = bits[v].copy()
        visited[v >> 3] |= np.uint8(1 << (v & 7))
        frontier = bits[v]
        dist = 1 if np.any(frontier) else 0
        nvis = int(np.bitwise_count(visited).sum())
        while nvis < full_count:
            idx = np.flatnonzero(np.unpackbits(frontier, count=n, bitorder="little"))
            if len(idx) == 0:
                return math.inf
            reach = np.bitwise_or.reduce(bits[idx], axis=0)
            new = reach & ~visited
            if not np.any(new):
                return math.inf
            visited |= new
            frontier = new
            dist += 1
            nvis = int(np.bitwise_count(visited).sum())
        ecc_max = max(ecc_max, dist)
    return ecc_max


def has_diameter_at_most_2(g: Graph) -> bool:
    """True iff every pair is adjacent or shares a neighbor (word-AND scan)."""
    n = g.n
    if n <= 1:
        return True
    bits = g.bit_rows
    for v in range(n - 1):
        has_common = np.bitwise_and(bits[v + 1 :], bits[v]).any(axis=1)
        adj = np.unpackbits(bits[v], count=n, bitorder="little")[v + 1 :].astype(bool)
        if not np.all(has_common | adj):
            return False
    return True


# ---------------------------------------------------------------------------
# text formats

def graph_to_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    for u, v in g.edges():
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"bad header line: {lines[0]!r}")
    n, m = int(head[0]), int(head[1])
    if len(lines) - 1 != m:
        raise ValueError(f"header declares {m} edges, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line: {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        if not u < v:
            raise ValueError(f"edge line must have u < v: {ln!r}")
        edges.append((u, v))
    g = make_graph(n, edges)
    if g.m != m:
        raise ValueError("duplicate edges in graph file")
    return g


def write_graph(g: Graph, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(graph_to_text(g))


def read_graph(path) -> Graph:
    with open(path) as fh:
        return graph_from_text(fh.read())


def write_process(seq: ProcessSequence, path) -> None:
    """Lines "u v weight" ascending by weight; 17 significant digits round-trip."""
    edges = seq.ordered_edges()
    w = seq._sorted_weights
    with open(path, "w", newline="\n") as fh:
        for (u, v), x in zip(edges, w):
            fh.write(f"{u} {v} {x:.17g}\n")


def read_process(path) -> ProcessSequence:
    us, vs, ws = [], [], []
    with open(path) as fh:
        for ln in fh:
            if not ln.strip():
                continue
            a, b, x = ln.split()
            us.append(int(a))
            vs.append(int(b))
            ws.append(float(x))
    N = len(ws)
    n = round((1 + math.isqrt(1 + 8 * N)) / 2)
    if pair_count(n) != N:
        raise ValueError(f"{N} lines is not C(n,2) for any n")
    weights = np.empty(N, np.float64)
    for u, v, x in zip(us, vs, ws):
        weights[pair_index(n, u, v)] = x
    return ProcessSequence(n, weights)
