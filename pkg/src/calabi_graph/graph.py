"""Finite simple weighted graphs with stable edge indexing.

A :class:`WeightedGraph` stores a vertex set 0..num_vertices-1, an ordered
edge list, and one positive weight per edge.  Edge index ``i`` refers to the
same vertex pair in every module, so per-edge vectors (weights, curvatures,
flow states) stay aligned for the lifetime of the graph.

Structural queries (girth, connectivity, edge adjacency) are cached on the
instance: the graph is immutable, only its weights ever get replaced.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Union

import numpy as np

Label = Union[int, str]

#: girth threshold below which the closed-form edge curvature is invalid
MIN_GIRTH = 6


class GraphError(ValueError):
    """Structurally invalid graph (self-loop, duplicate edge, bad weight...)."""


class EdgeListError(GraphError):
    """Malformed edge-list input; carries the 1-based offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class GraphAudit:
    """Admissibility report: connectivity plus absence of short cycles."""

    girth: float  # int cycle length, or math.inf for forests
    connected: bool
    admissible: bool


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Immutable simple graph with indexed edges and positive weights.

    ``edges[i]`` is the vertex pair of edge ``i`` stored as ``(u, v)`` with
    ``u < v``; ``weights[i]`` is its weight.  ``labels`` optionally keeps the
    ids the vertices had in the source file (dense index -> original label).
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    weights: np.ndarray
    labels: tuple[Label, ...] | None = None

    def __post_init__(self):
        if self.num_vertices < 0:
            raise GraphError("negative vertex count")
        canon = []
        seen: set[tuple[int, int]] = set()
        for k, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise GraphError(f"edge {k} endpoint out of range: ({u}, {v})")
            if u == v:
                raise GraphError(f"edge {k} is a self-loop at vertex {u}")
            pair = (u, v) if u < v else (v, u)
            if pair in seen:
                raise GraphError(f"edge {k} duplicates {pair}")
            seen.add(pair)
            canon.append(pair)
        w = np.array(self.weights, dtype=float)
        if w.shape != (len(canon),):
            raise GraphError(
                f"expected {len(canon)} weights, got shape {w.shape}"
            )
        if len(canon) and (not np.all(np.isfinite(w)) or np.any(w <= 0.0)):
            raise GraphError("edge weights must be finite and strictly positive")
        if self.labels is not None and len(self.labels) != self.num_vertices:
            raise GraphError("label list length does not match vertex count")
        w.flags.writeable = False
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "weights", w)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def label_of(self, v: int) -> Label:
        return self.labels[v] if self.labels is not None else v

    def endpoints(self, i: int) -> tuple[int, int]:
        return self.edges[i]

    def with_weights(self, weights: Iterable[float]) -> "WeightedGraph":
        """Same structure, new weights (used when a flow endpoint is exported)."""
        return WeightedGraph(self.num_vertices, self.edges, np.asarray(list(weights), dtype=float), self.labels)

    @cached_property
    def incident_edges(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids incident to each vertex, in edge-index order."""
        inc: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for i, (u, v) in enumerate(self.edges):
            inc[u].append(i)
            inc[v].append(i)
        return tuple(tuple(e) for e in inc)

    @cached_property
    def neighbors(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex: tuples of (neighbor vertex, connecting edge id)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.num_vertices)]
        for i, (u, v) in enumerate(self.edges):
            adj[u].append((v, i))
            adj[v].append((u, i))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(e) for e in self.incident_edges)

    @cached_property
    def adjacent_edge_pairs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Ordered pairs (i, j) of distinct edges sharing a vertex.

        Returns arrays (edge_i, edge_j, shared_vertex), each ordered pair
        listed once per shared endpoint.  On simple graphs two distinct edges
        share at most one vertex, so pairs are unique.
        """
        ei, ej, sv = [], [], []
        for x, inc in enumerate(self.incident_edges):
            for a in inc:
                for b in inc:
                    if a != b:
                        ei.append(a)
                        ej.append(b)
                        sv.append(x)
        return (
            np.asarray(ei, dtype=np.intp),
            np.asarray(ej, dtype=np.intp),
            np.asarray(sv, dtype=np.intp),
        )

    @cached_property
    def _girth(self) -> float:
        return _shortest_cycle_length(self)

    @cached_property
    def _connected(self) -> bool:
        return _is_connected(self)

    def to_json_dict(self) -> dict:
        return {
            "vertices": [self.label_of(v) for v in range(self.num_vertices)],
            "edges": [[u, v] for (u, v) in self.edges],
            "weights": [float(w) for w in self.weights],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)

    @classmethod
    def from_json_dict(cls, data: dict) -> "WeightedGraph":
        vertices = data["vertices"]
        return cls(
            num_vertices=len(vertices),
            edges=tuple((int(u), int(v)) for u, v in data["edges"]),
            weights=np.asarray(data["weights"], dtype=float),
            labels=tuple(vertices),
        )

    @classmethod
    def from_json(cls, text: str) -> "WeightedGraph":
        return cls.from_json_dict(json.loads(text))


def _vertex_token(token: str, line_no: int) -> Label:
    """Vertex ids are non-negative integers or arbitrary string labels."""
    try:
        value = int(token)
    except ValueError:
        return token
    if value < 0:
        raise EdgeListError(line_no, f"negative vertex id {value!r}")
    return value


def parse_edge_list(text: str) -> WeightedGraph:
    """Parse ``u v [w]`` lines into a graph; '#' starts a comment.

    Vertex ids are remapped to dense indices in order of first appearance;
    the original ids are kept as labels.  Missing weights default to 1.0.
    """
    index: dict[Label, int] = {}
    edges: list[tuple[int, int]] = []
    weights: list[float] = []
    seen: set[tuple[int, int]] = set()
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListError(
                line_no, f"expected 'u v' or 'u v w', got {len(parts)} fields"
            )
        labels = [_vertex_token(p, line_no) for p in parts[:2]]
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise EdgeListError(line_no, f"bad weight {parts[2]!r}") from None
            if not math.isfinite(w) or w <= 0.0:
                raise EdgeListError(line_no, f"weight must be finite and positive, got {w}")
        else:
            w = 1.0
        if labels[0] == labels[1]:
            raise EdgeListError(line_no, f"self-loop at vertex {labels[0]!r}")
        ids = [index.setdefault(lab, len(index)) for lab in labels]
        pair = (min(ids), max(ids))
        if pair in seen:
            raise EdgeListError(
                line_no, f"duplicate edge {labels[0]!r} {labels[1]!r}"
            )
        seen.add(pair)
        edges.append(pair)
        weights.append(w)
    return WeightedGraph(
        num_vertices=len(index),
        edges=tuple(edges),
        weights=np.asarray(weights, dtype=float),
        labels=tuple(index.keys()),
    )


def serialize_edge_list(g: WeightedGraph) -> str:
    """Inverse of :func:`parse_edge_list`; weights written with full precision."""
    lines = [
        f"{g.label_of(u)} {g.label_of(v)} {float(w)!r}"
        for (u, v), w in zip(g.edges, g.weights)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def _is_connected(g: WeightedGraph) -> bool:
    if g.num_vertices == 0:
        return False
    seen = [False] * g.num_vertices
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for v, _ in g.neighbors[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                stack.append(v)
    return count == g.num_vertices


def _shortest_cycle_length(g: WeightedGraph) -> float:
    """Exact girth by breadth-first search rooted at every vertex.

    Each BFS reports dist[u] + dist[v] + 1 for every non-tree edge it scans;
    this is a closed walk through the root, hence >= girth, and equals the
    girth when the root lies on a shortest cycle.
    """
    best = math.inf
    for root in range(g.num_vertices):
        dist = [-1] * g.num_vertices
        via = [-1] * g.num_vertices  # edge used to discover the vertex
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best:
                break  # any candidate from here on has length >= 2*dist[u]
            for v, eid in g.neighbors[u]:
                if eid == via[u]:
                    continue
                if dist[v] == -1:
                    dist[v] = dist[u] + 1
                    via[v] = eid
                    queue.append(v)
                else:
                    best = min(best, dist[u] + dist[v] + 1)
    return best


def girth(g: WeightedGraph) -> float:
    """Length of the shortest cycle; ``math.inf`` for forests."""
    return g._girth


def is_connected(g: WeightedGraph) -> bool:
    return g._connected


def audit(g: WeightedGraph) -> GraphAudit:
    """Connectivity, girth, and the conjunction the curvature modules require."""
    gth = g._girth
    conn = g._connected
    return GraphAudit(girth=gth, connected=conn, admissible=conn and gth >= MIN_GIRTH)


def require_admissible(g: WeightedGraph) -> None:
    """Reject graphs outside the connected, girth >= 6 class."""
    report = audit(g)
    if not report.admissible:
        raise GraphError(
            "graph is not admissible: "
            f"connected={report.connected}, girth={report.girth} (need girth >= {MIN_GIRTH})"
        )


def edge_adjacency(g: WeightedGraph) -> dict[int, frozenset[int]]:
    """Map each edge to the set of distinct edges sharing one endpoint."""
    adj: dict[int, set[int]] = {i: set() for i in range(g.num_edges)}
    for inc in g.incident_edges:
        for a in inc:
            for b in inc:
                if a != b:
                    adj[a].add(b)
    return {i: frozenset(s) for i, s in adj.items()}
