"""Generators for benchmark graphs: cycles, stars, paths, trees, subdivisions.

Cycles of length >= 6, forests, and 3-subdivisions of arbitrary simple graphs
are all admissible (connected, girth >= 6), which makes them the workhorses
for property tests: subdividing every edge into a 3-path triples every cycle
length, so any simple graph (girth >= 3) becomes admissible.
"""

from __future__ import annotations

import numpy as np

from .graph import GraphError, WeightedGraph


def _uniform(n: int, weights) -> np.ndarray:
    if weights is None:
        return np.ones(n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise GraphError(f"expected {n} weights, got shape {w.shape}")
    return w


def cycle_graph(k: int, weights=None) -> WeightedGraph:
    """Cycle on k vertices; admissible for k >= 6."""
    if k < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    edges = tuple((i, (i + 1) % k) for i in range(k))
    return WeightedGraph(k, edges, _uniform(k, weights))


def path_graph(k: int, weights=None) -> WeightedGraph:
    """Path on k vertices (k-1 edges)."""
    if k < 2:
        raise GraphError("a path needs at least 2 vertices")
    edges = tuple((i, i + 1) for i in range(k - 1))
    return WeightedGraph(k, edges, _uniform(k - 1, weights))


def star_graph(num_leaves: int, weights=None) -> WeightedGraph:
    """Star with the hub at vertex 0 and ``num_leaves`` spokes."""
    if num_leaves < 1:
        raise GraphError("a star needs at least one leaf")
    edges = tuple((0, i) for i in range(1, num_leaves + 1))
    return WeightedGraph(num_leaves + 1, edges, _uniform(num_leaves, weights))


def with_pendant(g: WeightedGraph, at: int = 0, weight: float = 1.0) -> WeightedGraph:
    """Attach one new degree-1 vertex to vertex ``at``."""
    edges = g.edges + ((at, g.num_vertices),)
    weights = np.append(g.weights, weight)
    return WeightedGraph(g.num_vertices + 1, edges, weights)


def random_tree(num_vertices: int, rng: np.random.Generator) -> WeightedGraph:
    """Random recursive tree: vertex i attaches to a uniform earlier vertex."""
    if num_vertices < 2:
        raise GraphError("a tree needs at least 2 vertices")
    edges = tuple(
        (int(rng.integers(0, i)), i) for i in range(1, num_vertices)
    )
    return WeightedGraph(num_vertices, edges, np.ones(num_vertices - 1))


def random_connected_graph(
    num_vertices: int, num_extra_edges: int, rng: np.random.Generator
) -> WeightedGraph:
    """Random tree plus extra chords; connected and simple, any girth."""
    tree = random_tree(num_vertices, rng)
    present = set(tree.edges)
    candidates = [
        (u, v)
        for u in range(num_vertices)
        for v in range(u + 1, num_vertices)
        if (u, v) not in present
    ]
    take = min(num_extra_edges, len(candidates))
    picks = rng.choice(len(candidates), size=take, replace=False) if take else []
    edges = tree.edges + tuple(candidates[int(i)] for i in picks)
    return WeightedGraph(num_vertices, edges, np.ones(len(edges)))


def subdivide_3(g: WeightedGraph) -> WeightedGraph:
    """Replace every edge by a path of 3 edges (two new interior vertices).

    Triples all cycle lengths, so the output of any simple input is
    admissible whenever the input is connected.
    """
    edges: list[tuple[int, int]] = []
    next_vertex = g.num_vertices
    for (u, v) in g.edges:
        a, b = next_vertex, next_vertex + 1
        next_vertex += 2
        edges.extend([(u, a), (a, b), (b, v)])
    return WeightedGraph(next_vertex, tuple(edges), np.ones(len(edges)))


def random_log_weights(
    num_edges: int, rng: np.random.Generator, low: float = -3.0, high: float = 3.0
) -> np.ndarray:
    """Log-weights drawn uniformly from [low, high]."""
    return rng.uniform(low, high, size=num_edges)


def random_admissible_graph(
    rng: np.random.Generator, max_edges: int = 200
) -> WeightedGraph:
    """Draw from a mixed family of admissible graphs with <= max_edges edges.

    Mix of cycles (length >= 6), paths, stars, random trees, and
    3-subdivisions of small random connected graphs, all admissible by
    construction.
    """
    kind = rng.integers(0, 5)
    if kind == 0:
        k = int(rng.integers(6, max(7, max_edges + 1)))
        return cycle_graph(k)
    if kind == 1:
        k = int(rng.integers(3, max(4, max_edges + 2)))
        return path_graph(k)
    if kind == 2:
        k = int(rng.integers(1, max(2, max_edges + 1)))
        return star_graph(k)
    if kind == 3:
        k = int(rng.integers(2, max(3, max_edges + 2)))
        return random_tree(k, rng)
    # base with <= max_edges//3 edges so the subdivision stays within budget
    cap = max(3, min(40, max_edges // 6))
    base_vertices = int(rng.integers(3, cap + 1))
    extra = int(rng.integers(0, base_vertices // 2 + 1))
    base = random_connected_graph(base_vertices, extra, rng)
    return subdivide_3(base)
