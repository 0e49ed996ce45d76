"""Shared builders and independent oracles for the test suite.

The oracles here deliberately avoid the library's own code paths: girth by
exhaustive cycle enumeration, Jacobians by central differences of the
curvature formula written out longhand, densities by direct subset counting.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest

from calabi_graph.generators import (
    cycle_graph,
    path_graph,
    star_graph,
    with_pendant,
)
from calabi_graph.graph import WeightedGraph


@pytest.fixture
def p3() -> WeightedGraph:
    return path_graph(3)


@pytest.fixture
def k13() -> WeightedGraph:
    return star_graph(3)


@pytest.fixture
def c6() -> WeightedGraph:
    return cycle_graph(6)


@pytest.fixture
def c6_pendant() -> WeightedGraph:
    return with_pendant(cycle_graph(6))


def girth_by_enumeration(g: WeightedGraph) -> float:
    """Shortest cycle by checking every vertex subset for an induced cycle.

    A subset of size k hosts a cycle through all its vertices iff the induced
    subgraph restricted to it contains a closed walk visiting each exactly
    once; checking all permutations is affordable at oracle scale (<= 9
    vertices).
    """
    from itertools import permutations

    adj = {v: set() for v in range(g.num_vertices)}
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    best = float("inf")
    for k in range(3, g.num_vertices + 1):
        if k >= best:
            break
        for subset in combinations(range(g.num_vertices), k):
            anchored = subset[0]
            for perm in permutations(subset[1:]):
                order = (anchored,) + perm
                if all(
                    order[(i + 1) % k] in adj[order[i]] for i in range(k)
                ):
                    best = min(best, k)
                    break
            if best == k:
                break
    return best


def curvature_by_hand(g: WeightedGraph, r: np.ndarray) -> np.ndarray:
    """Edge curvature evaluated with explicit python loops."""
    w = np.exp(r)
    m = np.zeros(g.num_vertices)
    for i, (u, v) in enumerate(g.edges):
        m[u] += w[i]
        m[v] += w[i]
    out = np.empty(g.num_edges)
    for i, (u, v) in enumerate(g.edges):
        out[i] = 2.0 * w[i] * (1.0 / m[u] + 1.0 / m[v]) - 2.0
    return out


def jacobian_by_fd(g: WeightedGraph, r: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian built on the longhand curvature only."""
    n = g.num_edges
    out = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        out[:, j] = (curvature_by_hand(g, r + e) - curvature_by_hand(g, r - e)) / (2 * h)
    return out


def densest_proper_subset_by_counting(g: WeightedGraph):
    """(max density, witness) over proper nonempty subsets, by brute counting."""
    from fractions import Fraction

    best = None
    vertices = range(g.num_vertices)
    for k in range(1, g.num_vertices):
        for subset in combinations(vertices, k):
            inside = set(subset)
            edges = sum(1 for u, v in g.edges if u in inside and v in inside)
            density = Fraction(edges, k)
            if best is None or density > best[0]:
                best = (density, subset)
    return best
