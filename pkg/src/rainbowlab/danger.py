"""Vertex-pair classification (dangerous / sparsely / richly connected), fixes,
and the per-vertex budget audits used by the two-round construction.

Counting is done with dense integer-exact float32 matrix products; counts never
exceed n, so all arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .coloring import EdgeColoring
from .graphs import Graph, _pack_rows

__all__ = [
    "DEFAULT_D",
    "DANGEROUS_MEMBERSHIP_LIMIT",
    "ADJACENT_TO_BOTH_LIMIT",
    "SPARSE_MEMBERSHIP_LIMIT",
    "PairReport",
    "MAuditReport",
    "LemmaAudit",
    "Fix",
    "classify_pairs",
    "audit_property_M",
    "find_fixes",
    "find_exclusive_fixes",
    "exclusive_fix_counts",
    "audit_whp_lemmas",
]

DEFAULT_D = 66

# per-vertex budgets of the spanning-subgraph coloring property
DANGEROUS_MEMBERSHIP_LIMIT = 3
ADJACENT_TO_BOTH_LIMIT = 15
SPARSE_MEMBERSHIP_LIMIT = 1


def _two_path_counts(g: Graph) -> np.ndarray:
    a = g.adjacency_matrix()
    return a @ a


def _rainbow_counts(g: Graph, col: EdgeColoring) -> np.ndarray:
    """Matrix of rainbow 2-path counts between all vertex pairs."""
    if col.k == 2:
        r = col.color_matrix(0) @ col.color_matrix(1)
        return r + r.T
    two = _two_path_counts(g)
    same = np.zeros_like(two)
    for c in range(col.k):
        ac = col.color_matrix(c)
        same += ac @ ac
    return two - same


class PairReport:
    """Per-non-adjacent-pair 2-path and rainbow 2-path counts with classification.

    Pairs are stored lexicographically; all columns align with ``pairs``.
    """

    def __init__(self, g: Graph, d: int, pairs: np.ndarray, two: np.ndarray, rainbow: np.ndarray):
        self.graph = g
        self.d = d
        self.pairs = pairs
        self.two_paths = two
        self.rainbow_two_paths = rainbow
        self.dangerous = rainbow <= d
        self.sparse = two <= d
        n = g.n
        self._pidx = pairs[:, 0].astype(np.int64) * n - (
            pairs[:, 0].astype(np.int64) * (pairs[:, 0].astype(np.int64) + 1)
        ) // 2 + (pairs[:, 1] - pairs[:, 0] - 1)

    def __len__(self) -> int:
        return len(self.pairs)

    def _row(self, v: int, w: int) -> int:
        if v > w:
            v, w = w, v
        n = self.graph.n
        pi = v * n - v * (v + 1) // 2 + (w - v - 1)
        i = int(np.searchsorted(self._pidx, pi))
        if i >= len(self._pidx) or self._pidx[i] != pi:
            raise KeyError(f"({v}, {w}) is not a non-adjacent pair of this graph")
        return i

    def two_path_count(self, v: int, w: int) -> int:
        return int(self.two_paths[self._row(v, w)])

    def rainbow_two_path_count(self, v: int, w: int) -> int:
        return int(self.rainbow_two_paths[self._row(v, w)])

    def is_dangerous(self, v: int, w: int) -> bool:
        return bool(self.dangerous[self._row(v, w)])

    def is_sparse(self, v: int, w: int) -> bool:
        return bool(self.sparse[self._row(v, w)])

    def dangerous_pairs(self) -> np.ndarray:
        """Dangerous pairs as an array sorted lexicographically."""
        return self.pairs[self.dangerous]

    def sparse_pairs(self) -> np.ndarray:
        return self.pairs[self.sparse]

    def dangerous_pair_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.dangerous_pairs()}


def classify_pairs(g: Graph, col: EdgeColoring, d: int) -> PairReport:
    """Classify every non-adjacent pair of g under the given full coloring."""
    if col.graph != g:
        raise ValueError("coloring is bound to a different graph")
    if d < 0:
        raise ValueError("d must be >= 0")
    col.check_fully_assigned()
    a = g.adjacency_matrix()
    two = _two_path_counts(g)
    rain = _rainbow_counts(g, col)
    nonadj = np.triu(a == 0, k=1)
    us, vs = np.nonzero(nonadj)
    pairs = np.column_stack([us, vs]).astype(np.int32)
    return PairReport(
        g,
        d,
        pairs,
        two[us, vs].astype(np.int64),
        rain[us, vs].astype(np.int64),
    )


@dataclass
class ConditionVerdict:
    limit: int
    max_count: int
    passes: bool
    violations: list[tuple[int, int]]  # (vertex, count)

    def to_json_dict(self) -> dict:
        return {
            "limit": self.limit,
            "max_count": self.max_count,
            "passes": self.passes,
            "violations": [{"vertex": int(v), "count": int(c)} for v, c in self.violations],
        }


@dataclass
class MAuditReport:
    """Per-vertex membership counts against the three budget conditions:

    (i) at most 3 dangerous pairs contain the vertex, (ii) the vertex is
    adjacent to both endpoints of at most 15 dangerous pairs, (iii) at most
    one sparsely connected pair contains the vertex.
    """

    d: int
    dangerous_pair_membership: np.ndarray
    adjacent_to_both_of_dangerous: np.ndarray
    sparse_pair_membership: np.ndarray
    condition_i: ConditionVerdict = field(init=False)
    condition_ii: ConditionVerdict = field(init=False)
    condition_iii: ConditionVerdict = field(init=False)

    def __post_init__(self):
        self.condition_i = _verdict(self.dangerous_pair_membership, DANGEROUS_MEMBERSHIP_LIMIT)
        self.condition_ii = _verdict(self.adjacent_to_both_of_dangerous, ADJACENT_TO_BOTH_LIMIT)
        self.condition_iii = _verdict(self.sparse_pair_membership, SPARSE_MEMBERSHIP_LIMIT)

    @property
    def passes(self) -> bool:
        return self.condition_i.passes and self.condition_ii.passes and self.condition_iii.passes

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "passes": self.passes,
            "condition_i": self.condition_i.to_json_dict(),
            "condition_ii": self.condition_ii.to_json_dict(),
            "condition_iii": self.condition_iii.to_json_dict(),
        }


def _verdict(counts: np.ndarray, limit: int) -> ConditionVerdict:
    bad = np.flatnonzero(counts > limit)
    return ConditionVerdict(
        limit=limit,
        max_count=int(counts.max()) if len(counts) else 0,
        passes=len(bad) == 0,
        violations=[(int(v), int(counts[v])) for v in bad],
    )


def audit_property_M(g: Graph, col: EdgeColoring, d: int = DEFAULT_D) -> MAuditReport:
    """Audit one candidate (graph, 2-coloring) witness against the budget conditions."""
    if col.k != 2:
        raise ValueError(f"audit requires a 2-coloring, got k={col.k}")
    rep = classify_pairs(g, col, d)
    n = g.n
    dang = rep.dangerous_pairs()
    sparse = rep.sparse_pairs()
    counts_i = np.bincount(dang.ravel(), minlength=n) if len(dang) else np.zeros(n, np.int64)
    counts_iii = np.bincount(sparse.ravel(), minlength=n) if len(sparse) else np.zeros(n, np.int64)
    if len(dang):
        a = g.adjacency_matrix()
        dm = np.zeros((n, n), np.float32)
        dm[dang[:, 0], dang[:, 1]] = 1
        dm[dang[:, 1], dang[:, 0]] = 1
        # counts_ii[v] = sum over dangerous pairs {a,b} of A[v,a]*A[v,b]
        prod = (a @ dm).astype(np.float64)
        counts_ii = np.round(np.einsum("va,va->v", prod, a.astype(np.float64)) / 2).astype(np.int64)
    else:
        counts_ii = np.zeros(n, np.int64)
    return MAuditReport(
        d=d,
        dangerous_pair_membership=counts_i,
        adjacent_to_both_of_dangerous=counts_ii,
        sparse_pair_membership=counts_iii,
    )


# ---------------------------------------------------------------------------
# fixes

@dataclass(frozen=True)
class Fix:
    """A missing edge whose addition with required_color creates a rainbow
    2-path for target_pair."""

    missing_edge: tuple[int, int]
    required_color: int
    target_pair: tuple[int, int]
    exclusive: bool = False


def find_fixes(g: Graph, col: EdgeColoring, pair: tuple[int, int]) -> list[Fix]:
    """All fixes for a non-adjacent pair under a full 2-coloring.

    For x adjacent to v with xw missing, the fix is {x, w} colored opposite to
    vx; symmetrically for neighbors of w. Deduplicated by (edge, color) and
    sorted for deterministic output.
    """
    if col.k != 2:
        raise ValueError("fixes are defined for 2-colorings")
    v, w = pair
    if g.adjacent(v, w):
        raise ValueError(f"pair ({v}, {w}) is adjacent")
    seen: set[tuple[tuple[int, int], int]] = set()
    fixes: list[Fix] = []
    tgt = (min(v, w), max(v, w))
    for (anchor, other) in ((v, w), (w, v)):
        for x in g.neighbors(anchor):
            x = int(x)
            if x == other or g.adjacent(x, other):
                continue
            c = 1 - col.require_color(anchor, x)
            e = (min(x, other), max(x, other))
            if (e, c) not in seen:
                seen.add((e, c))
                fixes.append(Fix(e, c, tgt))
    fixes.sort(key=lambda f: (f.missing_edge, f.required_color))
    return fixes


def _dangerous_bit_rows(n: int, dangerous) -> np.ndarray:
    pairs = np.asarray(sorted((min(a, b), max(a, b)) for a, b in dangerous), np.int64)
    if len(pairs) == 0:
        return np.zeros((n, (n + 7) // 8), np.uint8)
    return _pack_rows(n, pairs[:, 0], pairs[:, 1])


def find_exclusive_fixes(
    g: Graph,
    col: EdgeColoring,
    pair: tuple[int, int],
    dangerous,
) -> list[Fix]:
    """Fixes for ``pair`` whose edge fixes no dangerous pair besides the target.

    An edge {x, t} (t in the target pair, x outside) also fixes a dangerous
    pair {x, k} when k is a neighbor of t, and a dangerous pair {l, t} when l
    is a neighbor of x other than the target's second vertex.
    """
    v, w = min(pair), max(pair)
    dang_rows = _dangerous_bit_rows(g.n, dangerous)
    bits = g.bit_rows
    out = []
    for f in find_fixes(g, col, (v, w)):
        x, t = f.missing_edge
        # orient: t is the endpoint inside the target pair
        if x in (v, w):
            x, t = t, x
        other = w if t == v else v
        if np.any(dang_rows[x] & bits[t]):
            continue
        row = (dang_rows[t] & bits[x]).copy()
        row[other >> 3] &= np.uint8(~(1 << (other & 7)) & 0xFF)
        if np.any(row):
            continue
        out.append(replace(f, exclusive=True))
    return out


def exclusive_fix_counts(g: Graph, col: EdgeColoring, report: PairReport) -> np.ndarray:
    """Exclusive-fix count for every vertex pair, as an n x n matrix.

    Matrix route used by the whp audit; entries are only meaningful for
    non-adjacent pairs. Cross-checked against :func:`find_exclusive_fixes` in
    the test suite.
    """
    n = g.n
    a = g.adjacency_matrix()
    dang = report.dangerous_pairs()
    dm = np.zeros((n, n), np.float32)
    if len(dang):
        dm[dang[:, 0], dang[:, 1]] = 1
        dm[dang[:, 1], dang[:, 0]] = 1
    m1 = dm @ a  # m1[x, t] = #{k in Gamma(t): {x, k} dangerous}
    nonadj = 1.0 - a
    np.fill_diagonal(nonadj, 0.0)
    e0 = (nonadj * (m1 == 0) * (m1.T == 0)).astype(np.float32)
    e1 = (nonadj * (m1 == 0) * (m1.T == 1)).astype(np.float32)
    f = a @ e0 + dm * (a @ e1)
    return (f + f.T).astype(np.int64)


# ---------------------------------------------------------------------------
# finite-n audit of the asymptotic structure of the round-1 graph

MAX_WITNESSES = 50


@dataclass
class LemmaVerdict:
    bound: float
    passes: bool
    violation_count: int
    witnesses: list  # capped sample of violating vertices/pairs with counts

    def to_json_dict(self) -> dict:
        return {
            "bound": self.bound,
            "passes": self.passes,
            "violation_count": self.violation_count,
            "witnesses": self.witnesses,
        }


@dataclass
class LemmaAudit:
    """Observational finite-n check of the degree window, the per-vertex
    dangerous-pair bound, and the exclusive-fix floor. Violations are data,
    not errors: the guarantees are asymptotic.
    """

    n: int
    eps: float
    d: int
    degree_window: LemmaVerdict
    dangerous_membership: LemmaVerdict
    exclusive_fix_floor: LemmaVerdict

    @property
    def all_pass(self) -> bool:
        return (
            self.degree_window.passes
            and self.dangerous_membership.passes
            and self.exclusive_fix_floor.passes
        )

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "eps": self.eps,
            "d": self.d,
            "all_pass": self.all_pass,
            "degree_window": self.degree_window.to_json_dict(),
            "dangerous_membership": self.dangerous_membership.to_json_dict(),
            "exclusive_fix_floor": self.exclusive_fix_floor.to_json_dict(),
        }


def audit_whp_lemmas(g1: Graph, col: EdgeColoring, eps: float, d: int = DEFAULT_D) -> LemmaAudit:
    """Audit a round-1 graph-plus-coloring against the three structural bounds."""
    n = g1.n
    logn = float(np.log(n)) if n > 1 else 0.0

    deg = g1.degrees()
    lo = np.sqrt((1 + eps / 2) * n * logn)
    hi = np.sqrt((1 + 2 * eps) * n * logn)
    bad = np.flatnonzero((deg < lo) | (deg > hi))
    degree_verdict = LemmaVerdict(
        bound=float(hi),
        passes=len(bad) == 0,
        violation_count=int(len(bad)),
        witnesses=[{"vertex": int(v), "count": int(deg[v])} for v in bad[:MAX_WITNESSES]],
    )

    rep = classify_pairs(g1, col, d)
    dang = rep.dangerous_pairs()
    memb = np.bincount(dang.ravel(), minlength=n) if len(dang) else np.zeros(n, np.int64)
    memb_bound = n ** (0.5 * (1 - eps / 4))
    bad = np.flatnonzero(memb > memb_bound)
    membership_verdict = LemmaVerdict(
        bound=float(memb_bound),
        passes=len(bad) == 0,
        violation_count=int(len(bad)),
        witnesses=[{"vertex": int(v), "count": int(memb[v])} for v in bad[:MAX_WITNESSES]],
    )

    floor = 2 * np.sqrt((1 + eps / 4) * n * logn)
    counts = exclusive_fix_counts(g1, col, rep)
    pair_counts = counts[rep.pairs[:, 0], rep.pairs[:, 1]]
    bad_rows = np.flatnonzero(pair_counts < floor)
    floor_verdict = LemmaVerdict(
        bound=float(floor),
        passes=len(bad_rows) == 0,
        violation_count=int(len(bad_rows)),
        witnesses=[
            {"pair": [int(rep.pairs[i, 0]), int(rep.pairs[i, 1])], "count": int(pair_counts[i])}
            for i in bad_rows[:MAX_WITNESSES]
        ],
    )

    return LemmaAudit(
        n=n,
        eps=eps,
        d=d,
        degree_window=degree_verdict,
        dangerous_membership=membership_verdict,
        exclusive_fix_floor=floor_verdict,
    )
