"""Curvature Jacobian and the Laplace-type operators built from it.

The Jacobian J = d(kappa)/d(r) of the edge curvature with respect to
log-weights is symmetric, positive semi-definite, has zero row sums, and on
a connected admissible graph its kernel is exactly the constant vectors.
Three operators derive from it:

* the discrete Laplacian  Delta v = -J v,
* fractional powers       Delta^s v = -J^s v, defined spectrally with the
  convention that zero eigenvalues stay zero for every real s (this is what
  makes s <= 0 well defined: the kernel direction is dropped, not inverted),
* the p-Laplacian         (Delta_p f)_i = sum over adjacent edges j of
  c_ij * |f_j - f_i|^(p-2) * (f_j - f_i),  c_ij = -dkappa_i/dr_j >= 0.

Matrices are dense and eigendecompositions full: the intended scale is a few
thousand edges at most, and the fractional powers need the whole spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .curvature import curvature, validate_log_weights, vertex_strength
from .graph import WeightedGraph, require_admissible


@dataclass(frozen=True)
class SpectralTolerance:
    """Relative threshold below which an eigenvalue counts as zero."""

    rank_eps: float = 1e-10

    def __post_init__(self):
        if not 0.0 < self.rank_eps < 1.0:
            raise ValueError(f"rank_eps must lie in (0, 1), got {self.rank_eps}")


DEFAULT_TOLERANCE = SpectralTolerance()


class JacobianMatrix:
    """Symmetric n x n matrix dkappa_i/dr_j with a lazily computed spectrum."""

    def __init__(self, entries: np.ndarray):
        entries = np.asarray(entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {entries.shape}")
        entries.flags.writeable = False
        self.entries = entries

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """(eigenvalues ascending, Q with eigenvector rows); J = Q.T @ diag @ Q."""
        return spectral_decompose(self)


def jacobian(g: WeightedGraph, r) -> JacobianMatrix:
    """Assemble J from the closed-form entries.

    For distinct edges i, j sharing the vertex x: J_ij = -2*w_i*w_j/m(x)^2.
    The diagonal is the negated off-diagonal row sum, which matches the
    closed form and makes the zero-row-sum property structural.
    """
    require_admissible(g)
    r = validate_log_weights(g, r)
    w = np.exp(r)
    m = vertex_strength(g, r)
    n = g.num_edges
    J = np.zeros((n, n))
    for x, inc in enumerate(g.incident_edges):
        if len(inc) < 2:
            continue
        idx = np.asarray(inc, dtype=np.intp)
        wx = w[idx]
        J[np.ix_(idx, idx)] -= (2.0 / m[x] ** 2) * np.outer(wx, wx)
    np.fill_diagonal(J, 0.0)
    J[np.diag_indices(n)] = -J.sum(axis=1)
    return JacobianMatrix(J)


def jacobian_fd_check(g: WeightedGraph, r, h: float = 1e-5) -> float:
    """Max entrywise gap between J and a central finite difference of kappa.

    The difference matrix is assembled column by column from curvature
    evaluations only, so it is independent of the closed-form entries.
    """
    if h <= 0:
        raise ValueError("step size must be positive")
    r = validate_log_weights(g, r)
    J = jacobian(g, r).entries
    n = g.num_edges
    fd = np.empty((n, n))
    for j in range(n):
        step = np.zeros(n)
        step[j] = h
        fd[:, j] = (curvature(g, r + step) - curvature(g, r - step)) / (2.0 * h)
    return float(np.abs(J - fd).max()) if n else 0.0


def spectral_decompose(
    J: JacobianMatrix, tol: SpectralTolerance = DEFAULT_TOLERANCE
) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal eigendecomposition of a symmetric matrix.

    Eigenvalues come back ascending; negative values within rank_eps of zero
    (relative to the largest magnitude) are clamped to 0 so that downstream
    powers never see the rounding noise of the PSD kernel.
    """
    entries = J.entries if isinstance(J, JacobianMatrix) else np.asarray(J, float)
    lam, vecs = np.linalg.eigh(entries)
    scale = float(np.abs(lam).max()) if lam.size else 0.0
    lam = lam.copy()
    lam[(lam < 0.0) & (lam >= -tol.rank_eps * scale)] = 0.0
    return lam, vecs.T


def laplacian_apply(J: JacobianMatrix, v) -> np.ndarray:
    """Delta v = -J v."""
    return -(J.entries @ np.asarray(v, dtype=float))


def fractional_laplacian_apply(
    J: JacobianMatrix, s: float, v, tol: SpectralTolerance = DEFAULT_TOLERANCE
) -> np.ndarray:
    """Delta^s v = -J^s v with zero eigenvalues kept at zero for every s.

    Eigenvalues at or below rank_eps times the largest are treated as exact
    zeros; for s <= 0 this thresholding is what keeps the kernel direction
    from blowing up.
    """
    v = np.asarray(v, dtype=float)
    lam, Q = J.spectrum if tol is DEFAULT_TOLERANCE else spectral_decompose(J, tol)
    if v.shape != (lam.size,):
        raise ValueError(f"expected vector of length {lam.size}, got shape {v.shape}")
    scale = float(lam.max()) if lam.size else 0.0
    powered = np.zeros_like(lam)
    live = lam > tol.rank_eps * scale if scale > 0.0 else np.zeros(lam.shape, bool)
    powered[live] = lam[live] ** s
    return -(Q.T @ (powered * (Q @ v)))


def _signed_power(d: np.ndarray, p: float) -> np.ndarray:
    """|d|^(p-2) * d evaluated as sign(d)*|d|^(p-1); exactly 0 at d = 0."""
    return np.sign(d) * np.abs(d) ** (p - 1.0)


def p_laplacian_apply(g: WeightedGraph, r, p: float, f) -> np.ndarray:
    """(Delta_p f)_i over edges adjacent to i, with coefficients from J.

    The couplings c_ij = 2*w_i*w_j/m(x)^2 are recomputed from the current
    log-weights on every call; along a flow they track the evolving state.
    """
    if p <= 1.0:
        raise ValueError(f"p-Laplacian requires p > 1, got {p}")
    r = validate_log_weights(g, r)
    f = np.asarray(f, dtype=float)
    if f.shape != (g.num_edges,):
        raise ValueError(f"expected vector of length {g.num_edges}, got shape {f.shape}")
    ei, ej, sv = g.adjacent_edge_pairs
    out = np.zeros(g.num_edges)
    if ei.size == 0:
        return out
    w = np.exp(r)
    m = vertex_strength(g, r)
    coupling = 2.0 * w[ei] * w[ej] / m[sv] ** 2
    np.add.at(out, ei, coupling * _signed_power(f[ej] - f[ei], p))
    return out
