"""Existence of constant-curvature weights via subgraph densities.

A connected girth >= 6 graph carries weights of constant curvature exactly
when every proper nonempty vertex subset is strictly sparser than the whole
graph:

    max over nonempty proper Omega of |E(Omega)|/|Omega|  <  |E|/|V|.

Verdicts are strict inequalities between rationals, so everything here runs
in exact integer arithmetic; floats never touch a certificate.  Two
independent routes are provided: exhaustive subset enumeration (the oracle,
up to 22 vertices) and a max-flow method that binary-searches the density
and reads the witness off a minimum cut.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curvature import constant_target
from .flows import CONSTANT_TARGET, FlowRun
from .graph import GraphError, WeightedGraph

MAX_BRUTEFORCE_VERTICES = 22


@dataclass(frozen=True)
class DensityCertificate:
    """Verdict of the density criterion plus the densest proper subset found."""

    exists: bool
    max_density: Fraction
    threshold: Fraction
    witness: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {
            "exists": self.exists,
            "max_density": {
                "num": self.max_density.numerator,
                "den": self.max_density.denominator,
            },
            "threshold": {
                "num": self.threshold.numerator,
                "den": self.threshold.denominator,
            },
            "witness": list(self.witness),
        }


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    detail: str


def _check_size(g: WeightedGraph) -> None:
    if g.num_vertices < 2:
        raise GraphError("density criterion needs at least 2 vertices")


def max_density_bruteforce(g: WeightedGraph) -> DensityCertificate:
    """Exact maximizer by enumerating every nonempty proper vertex subset.

    Subsets are walked in Gray-code order so each step updates the induced
    edge count by one popcount.  Ties break toward smaller subsets, then
    lexicographically smaller vertex tuples.
    """
    _check_size(g)
    n = g.num_vertices
    if n > MAX_BRUTEFORCE_VERTICES:
        raise GraphError(
            f"{n} vertices exceeds the enumeration bound {MAX_BRUTEFORCE_VERTICES}"
        )
    adj_mask = [0] * n
    for u, v in g.edges:
        adj_mask[u] |= 1 << v
        adj_mask[v] |= 1 << u
    full = (1 << n) - 1

    best_edges, best_size = 0, 0
    best_mask = 0
    subset = 0
    edge_count = 0
    prev = 0
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        bit = gray ^ prev
        v = bit.bit_length() - 1
        if gray & bit:
            edge_count += (adj_mask[v] & prev).bit_count()
        else:
            edge_count -= (adj_mask[v] & gray).bit_count()
        subset = gray
        prev = gray
        if subset == full:
            continue
        size = subset.bit_count()
        # compare edge_count/size against best_edges/best_size exactly
        if best_mask == 0:
            better = True
        else:
            lhs = edge_count * best_size
            rhs = best_edges * size
            if lhs != rhs:
                better = lhs > rhs
            elif size != best_size:
                better = size < best_size
            else:
                better = _mask_tuple(subset) < _mask_tuple(best_mask)
        if better:
            best_edges, best_size, best_mask = edge_count, size, subset

    max_density = Fraction(best_edges, best_size)
    threshold = Fraction(g.num_edges, n)
    return DensityCertificate(
        exists=max_density < threshold,
        max_density=max_density,
        threshold=threshold,
        witness=_mask_tuple(best_mask),
    )


def _mask_tuple(mask: int) -> tuple[int, ...]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


class _Dinic:
    """Blocking-flow max-flow on integer capacities (exact for big ints)."""

    def __init__(self, num_nodes: int):
        self.adj: list[list[list[int]]] = [[] for _ in range(num_nodes)]

    def add_edge(self, u: int, v: int, cap: int) -> None:
        self.adj[u].append([v, cap, len(self.adj[v])])
        self.adj[v].append([u, 0, len(self.adj[u]) - 1])

    def _levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * len(self.adj)
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, cap, _ in self.adj[u]:
                if cap > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def _push(self, u, t, limit, level, it):
        if u == t:
            return limit
        while it[u] < len(self.adj[u]):
            edge = self.adj[u][it[u]]
            v, cap, rev = edge
            if cap > 0 and level[v] == level[u] + 1:
                pushed = self._push(v, t, min(limit, cap), level, it)
                if pushed:
                    edge[1] -= pushed
                    self.adj[v][rev][1] += pushed
                    return pushed
            it[u] += 1
        return 0

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            level = self._levels(s, t)
            if level is None:
                return flow
            it = [0] * len(self.adj)
            while True:
                pushed = self._push(s, t, 1 << 300, level, it)
                if not pushed:
                    break
                flow += pushed

    def source_side(self, s: int) -> set[int]:
        """Nodes reachable from the source in the residual network."""
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, cap, _ in self.adj[u]:
                if cap > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen


def _denser_subset(
    vertices: list[int], edges: list[tuple[int, int]], guess: Fraction
) -> tuple[int, ...] | None:
    """A vertex subset with |E(S)|/|S| > guess, or None if none exists.

    Capacities are scaled by the guess's denominator so the cut test is an
    exact integer comparison: min cut < b*|E| iff some subset beats a/b.
    """
    m = len(edges)
    if m == 0:
        return None
    a, b = guess.numerator, guess.denominator
    pos = {v: i for i, v in enumerate(vertices)}
    source = 0
    sink = 1 + m + len(vertices)
    net = _Dinic(sink + 1)
    inf = b * m + 1
    for i, (u, v) in enumerate(edges):
        net.add_edge(source, 1 + i, b)
        net.add_edge(1 + i, 1 + m + pos[u], inf)
        net.add_edge(1 + i, 1 + m + pos[v], inf)
    for v in vertices:
        net.add_edge(1 + m + pos[v], sink, a)
    if net.max_flow(source, sink) >= b * m:
        return None
    side = net.source_side(source)
    return tuple(v for v in vertices if 1 + m + pos[v] in side)


def _induced_edge_count(subset: tuple[int, ...], edges) -> int:
    inside = set(subset)
    return sum(1 for u, v in edges if u in inside and v in inside)


def max_density_maxflow(g: WeightedGraph) -> DensityCertificate:
    """Same criterion as the brute force, via minimum cuts.

    Properness is enforced by solving the unrestricted densest-subgraph
    problem on every single-vertex-deleted graph: each proper subset misses
    some vertex.  Each solve binary-searches the density, keeping an
    achieved lower bound (with witness) and an infeasible upper bound until
    at most one candidate rational with denominator <= |V| remains.
    """
    _check_size(g)
    n = g.num_vertices
    best_density = Fraction(0)
    best_witness: tuple[int, ...] = (0,)
    for drop in range(n):
        vertices = [v for v in range(n) if v != drop]
        edges = [(u, v) for (u, v) in g.edges if u != drop and v != drop]
        m_h, n_h = len(edges), len(vertices)
        if m_h == 0:
            continue
        upper = Fraction(min(m_h, n_h - 1), 2) if n_h > 1 else Fraction(0)
        if upper <= best_density:
            continue
        improved = _denser_subset(vertices, edges, best_density)
        if improved is None:
            continue
        lo = Fraction(_induced_edge_count(improved, edges), len(improved))
        best_density, best_witness = lo, improved
        hi = upper
        gap = Fraction(1, n_h * (n_h - 1)) if n_h > 1 else Fraction(1)
        while hi - lo >= gap:
            mid = (lo + hi) / 2
            found = _denser_subset(vertices, edges, mid)
            if found is None:
                hi = mid
            else:
                lo = Fraction(_induced_edge_count(found, edges), len(found))
                best_density, best_witness = lo, found
    threshold = Fraction(g.num_edges, n)
    return DensityCertificate(
        exists=best_density < threshold,
        max_density=best_density,
        threshold=threshold,
        witness=best_witness,
    )


def certify_flow_consistency(
    g: WeightedGraph, cert: DensityCertificate, run: FlowRun
) -> ConsistencyReport:
    """Cross-check a constant-curvature flow outcome against the certificate.

    Convergence without an existence certificate is a genuine contradiction;
    an existence certificate without convergence usually means the horizon
    or tolerance was too tight, so it is flagged but phrased as such.
    """
    target = run.config.target
    if not (isinstance(target, str) and target == CONSTANT_TARGET):
        if not np.allclose(np.asarray(target, float), constant_target(g), atol=1e-12):
            raise ValueError("consistency check applies to constant-curvature targets only")
    converged = run.status.converged
    if cert.exists and converged:
        return ConsistencyReport(True, "constant weight exists and the flow reached it")
    if not cert.exists and not converged:
        return ConsistencyReport(
            True,
            "no constant weight exists and the flow did not converge "
            f"(status {run.status.state})",
        )
    if cert.exists and not converged:
        return ConsistencyReport(
            False,
            "constant weight exists but the flow stopped with status "
            f"{run.status.state}; t_max or tolerances may be too tight",
        )
    return ConsistencyReport(
        False,
        "flow converged although the density certificate rules out "
        "constant-curvature weights",
    )
