"""Recursive triangulations built from ternary trees, plus the census oracle.

A structure of order n is a triangle with n inserted vertices: each
insertion picks an empty triangular face, places a centre vertex inside
and joins it to the three corners.  Vertices 0, 1, 2 are the outermost
corners of the enclosing triangle; the i-th internal tree node (preorder)
inserts vertex 3 + i.  The three faces created by an insertion correspond
to the node's ordered children: child k's corner triple is the parent
triple with slot k replaced by the new centre.

Everything downstream (generating functions, asymptotic laws) is checked
against the exact statistics computed here by breadth-first search over
exhaustively enumerated or sampled instances.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence

from .trees import TernaryTree, enumerate_trees

_LABEL_STARTS = {1: (0, 1, 1), 2: (0, 0, 1), 3: (0, 0, 0)}


class RansGraph:
    """Adjacency view of a recursive triangulation.

    Attributes:
        order: number of internal (inserted) vertices.
        adj: adjacency lists; vertex count is order + 3.
        node_triple: corner triple (vertex ids) of each internal tree node's
            sub-structure, indexed by insertion (preorder) order.
        node_parent / node_slot: parent node index (-1 for the root node)
            and which child slot this node occupies.
        node_interval: half-open interval of internal indices inside each
            node's subtree; membership tests replace explicit vertex sets.
    """

    __slots__ = ("order", "adj", "node_triple", "node_parent", "node_slot", "node_interval")

    def __init__(self, order, adj, node_triple, node_parent, node_slot, node_interval):
        self.order = order
        self.adj = adj
        self.node_triple = node_triple
        self.node_parent = node_parent
        self.node_slot = node_slot
        self.node_interval = node_interval

    @property
    def n_vertices(self) -> int:
        return self.order + 3

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def center(self) -> int | None:
        """First inserted vertex, or None for the empty structure."""
        return 3 if self.order else None

    def node_of(self, vertex: int) -> int:
        if vertex < 3:
            raise ValueError(f"vertex {vertex} is outermost, not internal")
        return vertex - 3

    def contains_internal(self, node: int, vertex: int) -> bool:
        """Is ``vertex`` an internal vertex of the sub-structure at ``node``?"""
        lo, hi = self.node_interval[node]
        return vertex >= 3 and lo <= vertex - 3 < hi

    def to_json_dict(self) -> dict:
        edges = sorted(
            (u, v) for u in range(self.n_vertices) for v in self.adj[u] if u < v
        )
        return {
            "order": self.order,
            "outermost": [0, 1, 2],
            "center": self.center(),
            "edges": [list(e) for e in edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def build_rans(tree: TernaryTree) -> RansGraph:
    """Realize a ternary tree as its triangulation."""
    n = tree.order
    adj: list[list[int]] = [[] for _ in range(n + 3)]

    def connect(u: int, v: int) -> None:
        adj[u].append(v)
        adj[v].append(u)

    connect(0, 1)
    connect(0, 2)
    connect(1, 2)

    node_triple: list[tuple[int, int, int]] = []
    node_parent: list[int] = []
    node_slot: list[int] = []
    node_interval: list[tuple[int, int]] = []

    # Preorder walk; child k's triple replaces corner k with the new centre.
    stack: list[tuple[TernaryTree, tuple[int, int, int], int, int]] = [(tree, (0, 1, 2), -1, 0)]
    while stack:
        node, triple, parent, slot = stack.pop()
        if node.is_leaf:
            continue
        idx = len(node_triple)
        v = 3 + idx
        for corner in triple:
            connect(v, corner)
        node_triple.append(triple)
        node_parent.append(parent)
        node_slot.append(slot)
        node_interval.append((idx, idx + node.order))
        a, b, c = triple
        children = (
            (node.children[0], (v, b, c)),
            (node.children[1], (a, v, c)),
            (node.children[2], (a, b, v)),
        )
        for k, (child, child_triple) in reversed(tuple(enumerate(children))):
            stack.append((child, child_triple, idx, k))

    return RansGraph(n, [tuple(a) for a in adj], tuple(node_triple),
                     tuple(node_parent), tuple(node_slot), tuple(node_interval))


def bfs_distances(g: RansGraph, sources: int | Iterable[int]) -> list[int]:
    """Exact distances from a vertex (or a set of vertices) to all vertices."""
    if isinstance(sources, int):
        sources = (sources,)
    dist = [-1] * g.n_vertices
    q: deque[int] = deque()
    for s in sources:
        if not 0 <= s < g.n_vertices:
            raise ValueError(f"source {s} not in graph")
        dist[s] = 0
        q.append(s)
    while q:
        u = q.popleft()
        du = dist[u] + 1
        for v in g.adj[u]:
            if dist[v] < 0:
                dist[v] = du
                q.append(v)
    return dist


def corner_distance_labels(g: RansGraph, ncorners: int) -> list[int]:
    """Recursive labels: distance to the first ``ncorners`` outermost corners.

    The outermost corners start at (0,1,1), (0,0,1) or (0,0,0) for
    ncorners = 1, 2, 3; every inserted centre is labelled one more than
    the minimum over its triangle's corners.  Equals BFS distance to the
    corresponding corner set.
    """
    if ncorners not in _LABEL_STARTS:
        raise ValueError("ncorners must be 1, 2 or 3")
    labels = list(_LABEL_STARTS[ncorners]) + [0] * g.order
    for idx, triple in enumerate(g.node_triple):
        labels[3 + idx] = 1 + min(labels[t] for t in triple)
    return labels


def corner_distance_sum(g: RansGraph, ncorners: int) -> int:
    """Sum of corner-distance labels over internal vertices only."""
    labels = corner_distance_labels(g, ncorners)
    return sum(labels[3:])


@dataclass(frozen=True)
class DistanceProfile:
    """Counts of internal vertices by distance from a source vertex."""

    source: int
    order: int
    counts: tuple[int, ...]  # counts[i] = internal vertices at distance i

    @property
    def mean(self) -> float:
        total = sum(self.counts)
        if not total:
            return 0.0
        return sum(i * c for i, c in enumerate(self.counts)) / total

    def normalized(self) -> list[tuple[float, float]]:
        """(i / sqrt(n), counts[i] * sqrt(n) / n) pairs for profile plots."""
        if self.order == 0:
            return []
        rt = self.order ** 0.5
        return [(i / rt, c * rt / self.order) for i, c in enumerate(self.counts)]


def distance_profile(g: RansGraph, source: int) -> DistanceProfile:
    """Distance histogram over internal vertices (any source vertex)."""
    dist = bfs_distances(g, source)
    internal = [dist[v] for v in range(3, g.n_vertices) if v != source]
    counts = [0] * (max(internal) + 1 if internal else 1)
    for d in internal:
        counts[d] += 1
    return DistanceProfile(source, g.order, tuple(counts))


@dataclass(frozen=True)
class DegreeStats:
    histogram: dict[int, int]
    center_degree: int | None  # None signals the empty structure


def degree_stats(g: RansGraph) -> DegreeStats:
    hist: dict[int, int] = {}
    for a in g.adj:
        hist[len(a)] = hist.get(len(a), 0) + 1
    c = g.center()
    return DegreeStats(hist, len(g.adj[c]) if c is not None else None)


def equidistant_count(g: RansGraph) -> int:
    """Internal vertices equidistant from the first two outermost corners."""
    d0 = bfs_distances(g, 0)
    d1 = bfs_distances(g, 1)
    return sum(1 for v in range(3, g.n_vertices) if d0[v] == d1[v])


class PairClass(Enum):
    OUTERMOST_PAIR = "outermost-pair"
    INTRA = "intra"
    INTER_NO_FEDGE = "inter-no-fedge"
    INTER_FEDGE = "inter-fedge"


@dataclass(frozen=True)
class PairInfo:
    kind: PairClass
    node: int | None = None  # smallest sub-structure with both internal
    frontier: tuple[int, int] | None = None


def _lca(g: RansGraph, a: int, b: int) -> tuple[int, int, int]:
    """LCA of two internal node indices, plus the child node on each side."""
    child_a = -1
    x = a
    while True:
        lo, hi = g.node_interval[x]
        if lo <= b < hi:
            break
        child_a = x
        x = g.node_parent[x]
    child_b = b
    while g.node_parent[child_b] != x:
        child_b = g.node_parent[child_b]
    return x, child_a, child_b


def classify_pair(g: RansGraph, v: int, w: int,
                  dist: Sequence[Sequence[int]] | None = None) -> PairInfo:
    """Classify an unordered vertex pair.

    A pair is intra when some sub-structure has one endpoint as a corner
    and the other internal; otherwise both endpoints are internal to their
    smallest common sub-structure and the pair is inter, split by whether
    the connecting path needs the frontier edge.  ``dist`` may pass
    precomputed all-pairs distances (used for the frontier-edge test);
    otherwise two BFS runs resolve it.
    """
    if v == w or not (0 <= v < g.n_vertices) or not (0 <= w < g.n_vertices):
        raise ValueError(f"invalid pair ({v}, {w})")
    if v < 3 and w < 3:
        return PairInfo(PairClass.OUTERMOST_PAIR)
    if v < 3 or w < 3:
        return PairInfo(PairClass.INTRA)  # the whole structure witnesses it
    a, b = g.node_of(v), g.node_of(w)
    la, ha = g.node_interval[a]
    lb, hb = g.node_interval[b]
    if la <= b < ha or lb <= a < hb:  # one centre is a corner of the other's home
        return PairInfo(PairClass.INTRA)
    s, child_a, child_b = _lca(g, a, b)
    fr = tuple(sorted(set(g.node_triple[child_a]) & set(g.node_triple[child_b])))
    assert len(fr) == 2
    f1, f2 = fr
    if dist is not None:
        dv1, dv2, dw1, dw2 = dist[v][f1], dist[v][f2], dist[w][f1], dist[w][f2]
    else:
        dfull1 = bfs_distances(g, f1)
        dfull2 = bfs_distances(g, f2)
        dv1, dv2, dw1, dw2 = dfull1[v], dfull2[v], dfull1[w], dfull2[w]
    fedge = dv1 != dv2 and dw1 != dw2 and (dv1 < dv2) != (dw1 < dw2)
    kind = PairClass.INTER_FEDGE if fedge else PairClass.INTER_NO_FEDGE
    return PairInfo(kind, node=s, frontier=(f1, f2))


@dataclass(frozen=True)
class CensusTotals:
    """Exact distance census of one instance over all admissible pairs."""

    order: int
    intra_total: int
    inter_total: int
    inter_lower_bound: int
    fedge_count: int
    grand_total: int
    pair_count: int


def total_distance_census(g: RansGraph) -> CensusTotals:
    """All-pairs BFS census split by pair class.

    The admissible pairs are all unordered pairs except outermost-outermost;
    the inter part is additionally decomposed into the frontier lower bound
    plus the frontier-edge count.  inter_total == inter_lower_bound +
    fedge_count holds for every structure of order <= 6 but only as >=
    beyond that: from order 7 on, a shortest path may skip the frontier
    entirely along the parent-triangle edge between the two sibling
    sub-structures' third corners, when both endpoints hug those corners.
    """
    nv = g.n_vertices
    dist = [bfs_distances(g, v) for v in range(nv)]
    intra = inter = lb = fedges = 0
    pairs = 0
    for v in range(nv):
        for w in range(v + 1, nv):
            if v < 3 and w < 3:
                continue
            pairs += 1
            info = classify_pair(g, v, w, dist)
            d = dist[v][w]
            if info.kind is PairClass.INTRA:
                intra += d
            else:
                inter += d
                f1, f2 = info.frontier
                lb += min(dist[v][f1], dist[v][f2]) + min(dist[w][f1], dist[w][f2])
                if info.kind is PairClass.INTER_FEDGE:
                    fedges += 1
    return CensusTotals(g.order, intra, inter, lb, fedges, intra + inter, pairs)


@dataclass
class CensusTables:
    """Aggregated exact statistics over all structures of each order."""

    max_order: int
    tree_count: dict[int, int] = field(default_factory=dict)
    # dist_counts[i][n] = total vertices at distance i from corner 0
    dist_counts: dict[int, dict[int, int]] = field(default_factory=dict)
    corner_sums: dict[int, dict[int, int]] = field(default_factory=dict)
    equidistant: dict[int, int] = field(default_factory=dict)
    intra: dict[int, int] = field(default_factory=dict)
    inter: dict[int, int] = field(default_factory=dict)
    inter_lower_bound: dict[int, int] = field(default_factory=dict)
    fedge: dict[int, int] = field(default_factory=dict)
    grand: dict[int, int] = field(default_factory=dict)
    center_degree: dict[int, dict[int, int]] = field(default_factory=dict)
    # profile_triples[n][(k1,k2,k3)] = structures with k_i vertices at distance i
    profile_triples: dict[int, dict[tuple[int, int, int], int]] = field(default_factory=dict)
    # corner_sum_triples[n][(s1,s2,s3)] = structures with those three label sums
    corner_sum_triples: dict[int, dict[tuple[int, int, int], int]] = field(default_factory=dict)

    def dist_count_row(self, i: int) -> tuple[int, ...]:
        row = self.dist_counts.get(i, {})
        return tuple(row.get(n, 0) for n in range(self.max_order + 1))


@lru_cache(maxsize=4)
def exhaustive_census(max_order: int, cap: int = 16) -> CensusTables:
    """Full brute-force census over every structure of order <= max_order."""
    tables = CensusTables(max_order)
    for i in range(1, 4):
        tables.dist_counts[i] = {}
        tables.corner_sums[i] = {}
    for n in range(max_order + 1):
        t_count = 0
        dist_tot: dict[int, int] = {}
        sums = {1: 0, 2: 0, 3: 0}
        equi = 0
        intra = inter = lb = fed = grand = 0
        deg_hist: dict[int, int] = {}
        prof: dict[tuple[int, int, int], int] = {}
        triple_hist: dict[tuple[int, int, int], int] = {}
        for tree in enumerate_trees(n, cap=cap):
            t_count += 1
            g = build_rans(tree)
            profile = distance_profile(g, 0)
            for i, c in enumerate(profile.counts):
                if i and c:
                    dist_tot[i] = dist_tot.get(i, 0) + c
            key = tuple(
                profile.counts[i] if i < len(profile.counts) else 0 for i in (1, 2, 3)
            )
            prof[key] = prof.get(key, 0) + 1
            label_sums = tuple(corner_distance_sum(g, k) for k in (1, 2, 3))
            for k in (1, 2, 3):
                sums[k] += label_sums[k - 1]
            triple_hist[label_sums] = triple_hist.get(label_sums, 0) + 1
            equi += equidistant_count(g)
            census = total_distance_census(g)
            intra += census.intra_total
            inter += census.inter_total
            lb += census.inter_lower_bound
            fed += census.fedge_count
            grand += census.grand_total
            stats = degree_stats(g)
            if stats.center_degree is not None:
                deg_hist[stats.center_degree] = deg_hist.get(stats.center_degree, 0) + 1
        tables.tree_count[n] = t_count
        for i, tot in dist_tot.items():
            tables.dist_counts.setdefault(i, {})[n] = tot
        for i in (1, 2, 3):
            tables.dist_counts[i].setdefault(n, 0)
            tables.corner_sums[i][n] = sums[i]
        tables.equidistant[n] = equi
        tables.intra[n] = intra
        tables.inter[n] = inter
        tables.inter_lower_bound[n] = lb
        tables.fedge[n] = fed
        tables.grand[n] = grand
        tables.center_degree[n] = deg_hist
        tables.profile_triples[n] = prof
        tables.corner_sum_triples[n] = triple_hist
    return tables


@lru_cache(maxsize=2)
def equidistant_census(max_order: int, cap: int = 16) -> tuple[int, ...]:
    """Equidistant-vertex totals per order (cheap: two BFS per structure)."""
    out = []
    for n in range(max_order + 1):
        out.append(sum(equidistant_count(build_rans(t)) for t in enumerate_trees(n, cap=cap)))
    return tuple(out)


# -- larger instances: vectorised all-pairs distance sums -------------------


def adjacency_csr(g: RansGraph):
    """CSR adjacency arrays (indptr, indices) as numpy int32."""
    import numpy as np

    indptr = np.zeros(g.n_vertices + 1, dtype=np.int64)
    for v in range(g.n_vertices):
        indptr[v + 1] = indptr[v] + len(g.adj[v])
    indices = np.empty(indptr[-1], dtype=np.int32)
    pos = 0
    for v in range(g.n_vertices):
        nxt = pos + len(g.adj[v])
        indices[pos:nxt] = g.adj[v]
        pos = nxt
    return indptr, indices


def total_pair_distance(g: RansGraph, chunk: int = 512) -> int:
    """Sum of distances over all admissible pairs via batched BFS.

    Runs scipy's unweighted shortest paths from every vertex in chunks so
    that memory stays bounded; exact for connected instances.
    """
    import numpy as np
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import dijkstra

    nv = g.n_vertices
    indptr, indices = adjacency_csr(g)
    mat = csr_matrix((np.ones(len(indices), dtype=np.int8), indices, indptr), shape=(nv, nv))
    total = 0
    for start in range(0, nv, chunk):
        idx = np.arange(start, min(start + chunk, nv))
        d = dijkstra(mat, unweighted=True, indices=idx)
        total += int(d.sum())
    # every unordered pair counted twice; outermost pairs (three at distance 1)
    # are excluded from the admissible set
    return total // 2 - 3


def mean_pair_distance(g: RansGraph) -> float:
    n = g.order
    pairs = n * (n - 1) // 2 + 3 * n
    if pairs == 0:
        return 0.0
    return total_pair_distance(g) / pairs


def sample_mean_distances(orders: Sequence[int], per_order: int, seed: int,
                          strategy: str = "ballot") -> dict[int, list[float]]:
    """Mean pairwise distance of ``per_order`` sampled structures per order."""
    from .trees import sample_tree

    out: dict[int, list[float]] = {}
    for k, n in enumerate(orders):
        rng = random.Random(seed * 100003 + k)
        means = []
        for _ in range(per_order):
            g = build_rans(sample_tree(n, rng, strategy=strategy))
            means.append(mean_pair_distance(g))
        out[n] = means
    return out


def sampled_degree_histogram(order: int, samples: int, seed: int) -> dict[int, int]:
    """Aggregate vertex-degree histogram over sampled structures."""
    from .trees import sample_tree

    rng = random.Random(seed)
    hist: dict[int, int] = {}
    for _ in range(samples):
        g = build_rans(sample_tree(order, rng, strategy="ballot"))
        for a in g.adj:
            hist[len(a)] = hist.get(len(a), 0) + 1
    return hist


def profile_rows(g: RansGraph, source: int = 0) -> list[tuple[int, int, int, float]]:
    """CSV-ready rows (order, distance, count, proportion) for one instance."""
    profile = distance_profile(g, source)
    n = g.order or 1
    return [(g.order, i, c, c / n) for i, c in enumerate(profile.counts) if i]
