"""Edge curvature and prescribed-curvature flows on girth >= 6 graphs.

The package is organized around one state convention: a graph supplies the
structure, and every numerical routine takes the log-weight vector r
(r_i = ln w_i) as the variable.  ``curvature`` evaluates the closed-form
edge curvature, ``operators`` builds the curvature Jacobian and its
Laplacians, ``flows`` integrates the four prescribed-curvature flows, and
``existence`` decides whether a constant-curvature weight can exist at all.
"""

from .curvature import (
    TargetError,
    average_curvature,
    constant_target,
    curvature,
    curvature_rows,
    gauss_bonnet_residual,
    log_weights,
    validate_target,
    vertex_strength,
)
from .existence import (
    ConsistencyReport,
    DensityCertificate,
    certify_flow_consistency,
    max_density_bruteforce,
    max_density_maxflow,
)
from .flows import (
    CONSTANT_TARGET,
    FlowConfig,
    FlowError,
    FlowKind,
    FlowRun,
    FlowSample,
    FlowStatus,
    InvariantReport,
    estimate_rate,
    integrate,
    monitor_invariants,
    resolve_target,
    rhs,
)
from .graph import (
    EdgeListError,
    GraphAudit,
    GraphError,
    WeightedGraph,
    audit,
    edge_adjacency,
    girth,
    is_connected,
    parse_edge_list,
    require_admissible,
    serialize_edge_list,
)
from .operators import (
    JacobianMatrix,
    SpectralTolerance,
    fractional_laplacian_apply,
    jacobian,
    jacobian_fd_check,
    laplacian_apply,
    p_laplacian_apply,
    spectral_decompose,
)

__version__ = "0.1.0"

__all__ = [
    "CONSTANT_TARGET",
    "ConsistencyReport",
    "DensityCertificate",
    "EdgeListError",
    "FlowConfig",
    "FlowError",
    "FlowKind",
    "FlowRun",
    "FlowSample",
    "FlowStatus",
    "GraphAudit",
    "GraphError",
    "InvariantReport",
    "JacobianMatrix",
    "SpectralTolerance",
    "TargetError",
    "WeightedGraph",
    "audit",
    "average_curvature",
    "certify_flow_consistency",
    "constant_target",
    "curvature",
    "curvature_rows",
    "edge_adjacency",
    "estimate_rate",
    "fractional_laplacian_apply",
    "gauss_bonnet_residual",
    "girth",
    "integrate",
    "is_connected",
    "jacobian",
    "jacobian_fd_check",
    "laplacian_apply",
    "log_weights",
    "max_density_bruteforce",
    "max_density_maxflow",
    "monitor_invariants",
    "p_laplacian_apply",
    "parse_edge_list",
    "require_admissible",
    "resolve_target",
    "rhs",
    "serialize_edge_list",
    "spectral_decompose",
    "validate_target",
    "vertex_strength",
]
