"""One-inclusion graphs, min-max out-degree orientations, and the one-inclusion learner.

The learner projects the class onto the training points plus the query
point, orients the resulting hypergraph so the maximum out-degree is as
small as possible, and reads the prediction off the edge of hypotheses
consistent with the training labels.

Coordinates are laid out canonically: training points are sorted by
instance index and a point that occurs more than once in the training
sequence keeps exactly two copies.  Every edge in the direction of a
repeated point is then a singleton, as in the literal projection, and
every prediction made on the same multiset of points reads the same
orientation.  That shared orientation is what makes the leave-one-out
mistake count of a sequence equal to the out-degree of its target vertex.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .core import (
    Example,
    Hypothesis,
    HypothesisClass,
    InvariantViolation,
    NotRealizableError,
    sample_arrays,
)

UNSET = -1


@dataclass(frozen=True)
class OneInclusionGraph:
    """Vertices in Y^n and hyperedges ``(direction, member vertex indices)``.

    Vertices are sorted lexicographically; edges are sorted by direction
    and then by their member tuple.  Singleton edges are kept.
    """

    n: int
    vertices: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, tuple[int, ...]], ...]

    def incident(self) -> list[list[int]]:
        inc: list[list[int]] = [[] for _ in self.vertices]
        for j, (_, members) in enumerate(self.edges):
            for v in members:
                inc[v].append(j)
        return inc

    def degree(self, v: int) -> int:
        """Number of edges of size at least two containing vertex v."""
        return sum(1 for _, e in self.edges if len(e) >= 2 and v in e)

    def edge_index(self) -> dict[tuple[int, tuple[int, ...]], int]:
        """Map ``(direction, context)`` to edge position; context has UNSET at the direction."""
        out = {}
        for j, (i, members) in enumerate(self.edges):
            ctx = list(self.vertices[members[0]])
            ctx[i] = UNSET
            out[(i, tuple(ctx))] = j
        return out


@dataclass(frozen=True)
class Orientation:
    """``assignment[j]`` is the vertex index edge j points to."""

    assignment: tuple[int, ...]

    def outdegrees(self, G: OneInclusionGraph) -> list[int]:
        out = [0] * len(G.vertices)
        for (_, members), target in zip(G.edges, self.assignment):
            for v in members:
                if v != target:
                    out[v] += 1
        return out

    def max_outdegree(self, G: OneInclusionGraph) -> int:
        return max(self.outdegrees(G), default=0)


def build_oig(V, n: int) -> OneInclusionGraph:
    verts = sorted({tuple(int(c) for c in v) for v in V})
    for v in verts:
        if len(v) != n:
            raise InvariantViolation(f"vertex {v} does not have length {n}")
    groups: dict[tuple[int, tuple[int, ...]], list[int]] = {}
    for idx, v in enumerate(verts):
        for i in range(n):
            ctx = v[:i] + (UNSET,) + v[i + 1:]
            groups.setdefault((i, ctx), []).append(idx)
    edges = sorted((i, tuple(members)) for (i, _), members in groups.items())
    return OneInclusionGraph(n, tuple(verts), tuple(edges))


def _feasible(n_vertices: int, big_edges: list[tuple[int, ...]], degrees: np.ndarray, k: int):
    """Assign each edge to a member so every vertex v keeps >= deg(v) - k of its edges.

    Returns the per-edge winner (UNSET when the flow left an edge free) or None.
    """
    demand = np.maximum(degrees - k, 0)
    need = int(demand.sum())
    if need == 0:
        return [UNSET] * len(big_edges)
    ne = len(big_edges)
    source, sink = 0, 1 + n_vertices + ne
    rows, cols, caps = [], [], []
    for v in range(n_vertices):
        if demand[v]:
            rows.append(source)
            cols.append(1 + v)
            caps.append(int(demand[v]))
    for j, members in enumerate(big_edges):
        node = 1 + n_vertices + j
        for v in members:
            rows.append(1 + v)
            cols.append(node)
            caps.append(1)
        rows.append(node)
        cols.append(sink)
        caps.append(1)
    size = sink + 1
    graph = csr_matrix((np.array(caps, dtype=np.int32), (rows, cols)), shape=(size, size))
    result = maximum_flow(graph, source, sink)
    if result.flow_value < need:
        return None
    flow = result.flow.tocsr()
    winner = [UNSET] * ne
    for v in range(n_vertices):
        start, stop = flow.indptr[1 + v], flow.indptr[2 + v]
        for col, val in zip(flow.indices[start:stop], flow.data[start:stop]):
            if val > 0 and col > n_vertices:
                winner[col - 1 - n_vertices] = v
    return winner


def min_max_outdegree_orientation(G: OneInclusionGraph) -> tuple[Orientation, int]:
    """Exact minimum of the maximum out-degree, by binary search over a flow feasibility test."""
    nv = len(G.vertices)
    big = [(j, members) for j, (_, members) in enumerate(G.edges) if len(members) >= 2]
    degrees = np.zeros(nv, dtype=np.int64)
    for _, members in big:
        degrees[list(members)] += 1
    lo, hi = 0, int(degrees.max(initial=0))
    best = _feasible(nv, [m for _, m in big], degrees, hi)
    while lo < hi:
        mid = (lo + hi) // 2
        trial = _feasible(nv, [m for _, m in big], degrees, mid)
        if trial is None:
            lo = mid + 1
        else:
            hi, best = mid, trial
    assignment = [members[0] for _, members in G.edges]
    for (j, members), w in zip(big, best):
        assignment[j] = w if w != UNSET else members[0]
    sigma = Orientation(tuple(assignment))
    return sigma, sigma.max_outdegree(G)


@lru_cache(maxsize=1 << 16)
def _oriented_targets(n: int, vertex_bytes: bytes) -> dict[tuple[int, tuple[int, ...]], tuple[int, ...]]:
    V = np.frombuffer(vertex_bytes, dtype=np.int64).reshape(-1, n)
    G = build_oig(V.tolist(), n)
    sigma, _ = min_max_outdegree_orientation(G)
    index = G.edge_index()
    return {key: G.vertices[sigma.assignment[j]] for key, j in index.items()}


def oriented_targets(V: np.ndarray) -> dict[tuple[int, tuple[int, ...]], tuple[int, ...]]:
    """Edge ``(direction, context)`` -> target vertex, memoized on the vertex set."""
    V = np.unique(np.ascontiguousarray(V, dtype=np.int64), axis=0)
    return _oriented_targets(V.shape[1], V.tobytes())


def clear_cache() -> None:
    _oriented_targets.cache_clear()


def canonical_columns(train_points: Sequence[int], x: int) -> tuple[list[int], int]:
    """Column layout for a query: sorted points, repeated training points doubled.

    Returns the column list and the position of the query column.
    """
    counts = Counter(int(p) for p in train_points)
    cols: list[int] = []
    for p in sorted(counts):
        cols.extend([p] * min(counts[p], 2))
    q = int(np.searchsorted(cols, x, side="left"))
    cols.insert(q, x)
    return cols, q


def _distinct_labels(xs: np.ndarray, ys: np.ndarray) -> dict[int, int] | None:
    labels: dict[int, int] = {}
    for x, y in zip(xs.tolist(), ys.tolist()):
        if labels.setdefault(x, y) != y:
            return None
    return labels


def _query_label(table: np.ndarray, train_points: Sequence[int], labels: dict[int, int], x: int) -> int:
    cols, q = canonical_columns(train_points, x)
    targets = oriented_targets(table[:, cols])
    ctx = tuple(labels[c] if j != q else UNSET for j, c in enumerate(cols))
    vertex = targets.get((q, ctx))
    if vertex is None:
        raise NotRealizableError("training sequence is not realizable on the projection")
    return vertex[q]


def oig_predict(s: Sequence[Example], H: HypothesisClass, x: int) -> int:
    xs, ys = sample_arrays(s)
    labels = _distinct_labels(xs, ys)
    if labels is None:
        raise NotRealizableError("training sequence assigns two labels to one instance")
    if not 0 <= x < H.n_domain:
        raise InvariantViolation(f"instance {x} outside the domain")
    points = list(labels)
    consistent = np.all(H.table[:, points] == np.array([labels[p] for p in points])[None, :], axis=1)
    if not consistent.any():
        raise NotRealizableError("training sequence is not realizable by the class")
    if x in labels:
        return labels[x]
    col = H.table[consistent, x]
    if (col == col[0]).all():
        return int(col[0])
    return _query_label(H.table, xs.tolist(), labels, x)


def oig_learn_table(xs: np.ndarray, ys: np.ndarray, table: np.ndarray) -> np.ndarray | None:
    """Full prediction table of the one-inclusion learner; None if (xs, ys) is not realizable."""
    n_domain = table.shape[1]
    labels = _distinct_labels(xs, ys)
    if labels is None:
        return None
    points = list(labels)
    if points:
        consistent = np.all(table[:, points] == np.array([labels[p] for p in points])[None, :], axis=1)
    else:
        consistent = np.ones(table.shape[0], dtype=bool)
    if not consistent.any():
        return None
    version = table[consistent]
    first = version[0]
    out = first.copy()
    disagree = np.nonzero((version != first[None, :]).any(axis=0))[0]
    train = xs.tolist()
    for x in disagree.tolist():
        if x in labels:
            continue
        out[x] = _query_label(table, train, labels, x)
    for p, y in labels.items():
        out[p] = y
    assert out.shape == (n_domain,)
    return out


def oig_learn(s: Sequence[Example], H: HypothesisClass) -> Hypothesis:
    """The one-inclusion learner's full hypothesis on sequence s."""
    xs, ys = sample_arrays(s)
    out = oig_learn_table(xs, ys, H.table)
    if out is None:
        raise NotRealizableError("training sequence is not realizable by the class")
    return tuple(int(v) for v in out)
