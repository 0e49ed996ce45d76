"""Closed-form edge curvature on girth >= 6 graphs.

Everything here is a pure function of the graph structure and a vector of
log-weights r (r_i = ln w_i).  Working in log-weights keeps the flows' state
variable and the curvature's argument identical, and makes the curvature's
invariance under global weight scaling an exact statement: r -> r + c*1
leaves every ratio w_i/m(x) untouched.

For an edge e = {x, y} the curvature is

    kappa_e = 2*w_e*(1/m(x) + 1/m(y)) - 2,

with m(x) the total weight incident to x.  Summing over edges telescopes to
the combinatorial identity sum(kappa) = 2*(|V| - |E|), which pins the only
admissible total for any prescribed target curvature.
"""

from __future__ import annotations

import numpy as np

from .graph import WeightedGraph, require_admissible


class TargetError(ValueError):
    """Prescribed curvature violating the combinatorial sum identity."""


def validate_log_weights(g: WeightedGraph, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (g.num_edges,):
        raise ValueError(f"expected {g.num_edges} log-weights, got shape {r.shape}")
    if not np.all(np.isfinite(r)):
        raise ValueError("log-weights must be finite")
    return r


def log_weights(g: WeightedGraph) -> np.ndarray:
    """The graph's own weights as a log-weight vector."""
    return np.log(g.weights)


def vertex_strength(g: WeightedGraph, r) -> np.ndarray:
    """m(x) = total weight of edges incident to x, for every vertex."""
    r = validate_log_weights(g, r)
    w = np.exp(r)
    m = np.zeros(g.num_vertices)
    ends = np.asarray(g.edges, dtype=np.intp).reshape(-1, 2)
    np.add.at(m, ends[:, 0], w)
    np.add.at(m, ends[:, 1], w)
    return m


def curvature(g: WeightedGraph, r) -> np.ndarray:
    """Per-edge curvature 2*w_e*(1/m(x) + 1/m(y)) - 2.

    Requires an admissible graph (connected, girth >= 6, hence >= 1 edge).
    """
    require_admissible(g)
    r = validate_log_weights(g, r)
    if g.num_edges == 0:
        return np.zeros(0)
    w = np.exp(r)
    m = vertex_strength(g, r)
    ends = np.asarray(g.edges, dtype=np.intp).reshape(-1, 2)
    return 2.0 * w * (1.0 / m[ends[:, 0]] + 1.0 / m[ends[:, 1]]) - 2.0


def gauss_bonnet_residual(g: WeightedGraph, kappa) -> float:
    """sum(kappa) - 2*(|V| - |E|); zero up to rounding for true curvatures."""
    kappa = np.asarray(kappa, dtype=float)
    return float(kappa.sum() - 2.0 * (g.num_vertices - g.num_edges))


def average_curvature(g: WeightedGraph) -> float:
    """2*(|V|/|E| - 1); the only constant value a curvature can average to."""
    if g.num_edges == 0:
        raise ValueError("average curvature needs at least one edge")
    return 2.0 * (g.num_vertices / g.num_edges - 1.0)


def constant_target(g: WeightedGraph) -> np.ndarray:
    """The constant-curvature target vector: average curvature on every edge."""
    return np.full(g.num_edges, average_curvature(g))


def validate_target(g: WeightedGraph, kappa_star, tol: float = 1e-8) -> np.ndarray:
    """Check a prescribed curvature against sum(kappa*) = 2*(|V| - |E|).

    A target violating the identity cannot be realized by any weights, so it
    is rejected outright rather than letting a flow run into a dead end.
    """
    kappa_star = np.asarray(kappa_star, dtype=float)
    if kappa_star.shape != (g.num_edges,):
        raise TargetError(
            f"expected {g.num_edges} target entries, got shape {kappa_star.shape}"
        )
    if not np.all(np.isfinite(kappa_star)):
        raise TargetError("target curvature must be finite")
    residual = gauss_bonnet_residual(g, kappa_star)
    if abs(residual) > tol * max(1, g.num_edges):
        raise TargetError(
            f"target curvature sums to {kappa_star.sum():.12g}, "
            f"expected {2 * (g.num_vertices - g.num_edges)} (residual {residual:.3g})"
        )
    return kappa_star


def curvature_rows(g: WeightedGraph, r) -> list[dict]:
    """Per-edge records (index, endpoints, weight, curvature) for export."""
    r = validate_log_weights(g, r)
    kappa = curvature(g, r)
    w = np.exp(r)
    return [
        {
            "edge": i,
            "u": g.label_of(u),
            "v": g.label_of(v),
            "weight": float(w[i]),
            "kappa": float(kappa[i]),
        }
        for i, (u, v) in enumerate(g.edges)
    ]
