"""Prescribed-curvature flows: Ricci, Calabi, fractional, and p-th order.

All four flows evolve the log-weight vector r:

    ricci        dr/dt = +/- (kappa - kappa*)        (sign switchable, below)
    calabi       dr/dt = -J (kappa - kappa*)
    fractional   dr/dt = -J^s (kappa - kappa*)
    pth          dr/dt = Delta_p (kappa - kappa*)

The three Laplacian-driven kinds conserve sum(r) exactly (the right-hand
side has zero column sums), so trajectories stay on the affine hyperplane of
their initial value; the integrator monitors the drift instead of
re-projecting, since deviation is itself a correctness signal.

Integration uses an embedded explicit Dormand-Prince 5(4) pair with
proportional-integral step-size control.  Runs terminate when the curvature
reaches the target in the max norm, when the time horizon is hit, or when
the state leaves the representable range.

On the Ricci sign: taking logs of "d(omega)/dt = (kappa - kappa*) * omega"
verbatim gives dr/dt = +(kappa - kappa*), which moves curvature *away* from
a valid target (the diagonal of J is positive).  The s -> 0 limit of the
fractional flow gives dr/dt = -(kappa - kappa*) on valid targets, the
descent direction.  Both conventions are available via ``ricci_sign``
("literal" / "gradient"); the default is the convergent "gradient".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .curvature import (
    constant_target,
    curvature,
    validate_log_weights,
    validate_target,
)
from .graph import WeightedGraph, require_admissible
from .operators import (
    DEFAULT_TOLERANCE,
    SpectralTolerance,
    fractional_laplacian_apply,
    jacobian,
    laplacian_apply,
    p_laplacian_apply,
)

#: sentinel target resolving to the constant average curvature
CONSTANT_TARGET = "constant"

RICCI, CALABI, FRACTIONAL, PTH = "ricci", "calabi", "fractional", "pth"
_KINDS = (RICCI, CALABI, FRACTIONAL, PTH)

CONVERGED, HORIZON, ABORTED = "converged", "horizon", "aborted"

#: |r_i| beyond which exp(r_i) approaches the double-precision ceiling
OVERFLOW_LIMIT = 700.0


class FlowError(ValueError):
    """Invalid flow configuration."""


@dataclass(frozen=True)
class FlowKind:
    """Which flow to integrate, plus its order parameter where applicable."""

    kind: str
    s: float = 1.0
    p: float = 2.0
    ricci_sign: str = "gradient"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise FlowError(f"unknown flow kind {self.kind!r}")
        if self.kind == PTH and not self.p > 1.0:
            raise FlowError(f"p-th flow requires p > 1, got {self.p}")
        if self.kind == FRACTIONAL and not math.isfinite(self.s):
            raise FlowError("fractional order s must be finite")
        if self.ricci_sign not in ("gradient", "literal"):
            raise FlowError(f"ricci_sign must be 'gradient' or 'literal', got {self.ricci_sign!r}")

    @classmethod
    def ricci(cls, sign: str = "gradient") -> "FlowKind":
        return cls(RICCI, ricci_sign=sign)

    @classmethod
    def calabi(cls) -> "FlowKind":
        return cls(CALABI)

    @classmethod
    def fractional(cls, s: float) -> "FlowKind":
        return cls(FRACTIONAL, s=s)

    @classmethod
    def pth(cls, p: float) -> "FlowKind":
        return cls(PTH, p=p)

    @property
    def conserves_sum(self) -> bool:
        """True for the Laplacian-driven kinds whose RHS has zero column sums."""
        return self.kind in (CALABI, FRACTIONAL, PTH)

    def describe(self) -> str:
        if self.kind == FRACTIONAL:
            return f"fractional(s={self.s})"
        if self.kind == PTH:
            return f"pth(p={self.p})"
        if self.kind == RICCI:
            return f"ricci({self.ricci_sign})"
        return self.kind


@dataclass(frozen=True, eq=False)
class FlowConfig:
    """One flow run: kind, initial state, target, and integrator knobs."""

    kind: FlowKind
    r0: np.ndarray
    target: object = CONSTANT_TARGET  # per-edge array, or the sentinel
    t_max: float = 1e4
    rtol: float = 1e-8
    atol: float = 1e-10
    convergence_tol: float = 1e-9
    record_every: int = 1
    spectral_tol: SpectralTolerance = DEFAULT_TOLERANCE
    max_steps: int = 2_000_000

    def __post_init__(self):
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise FlowError(f"t_max must be positive and finite, got {self.t_max}")
        for name in ("rtol", "atol", "convergence_tol"):
            if not getattr(self, name) > 0:
                raise FlowError(f"{name} must be positive")
        if self.record_every < 1:
            raise FlowError("record_every must be >= 1")


class FlowSample(NamedTuple):
    """State snapshot along a trajectory."""

    t: float
    r: np.ndarray
    kappa: np.ndarray
    energy: float
    sum_r: float
    dissipation: float


@dataclass(frozen=True)
class FlowStatus:
    state: str  # converged | horizon | aborted
    t: float
    reason: str | None = None

    @property
    def converged(self) -> bool:
        return self.state == CONVERGED


@dataclass(frozen=True)
class InvariantReport:
    """Observed worst cases of the quantities the flows are supposed to keep."""

    max_sum_drift: float
    max_energy_jump: float
    max_dissipation: float
    conserves_sum: bool
    num_samples: int


@dataclass(eq=False)
class FlowRun:
    """Trajectory, stopping status, and diagnostics of one integrated flow."""

    config: FlowConfig
    target: np.ndarray
    samples: tuple[FlowSample, ...]
    status: FlowStatus
    rate_estimate: float | None
    n_accepted: int
    n_rejected: int
    n_rhs: int

    @property
    def r_final(self) -> np.ndarray:
        return self.samples[-1].r

    @property
    def kappa_final(self) -> np.ndarray:
        return self.samples[-1].kappa

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def energies(self) -> np.ndarray:
        return np.array([s.energy for s in self.samples])


def resolve_target(g: WeightedGraph, target) -> np.ndarray:
    """Turn the constant sentinel or an explicit vector into a valid target."""
    if isinstance(target, str):
        if target != CONSTANT_TARGET:
            raise FlowError(f"unknown symbolic target {target!r}")
        return constant_target(g)
    return validate_target(g, target)


def rhs(
    kind: FlowKind,
    g: WeightedGraph,
    r,
    kappa_star,
    spectral_tol: SpectralTolerance = DEFAULT_TOLERANCE,
) -> np.ndarray:
    """Right-hand side dr/dt of the chosen flow at state r."""
    require_admissible(g)
    r = validate_log_weights(g, r)
    kappa_star = resolve_target(g, kappa_star)
    return _rhs_raw(kind, g, r, kappa_star, spectral_tol)


def _rhs_raw(kind, g, r, kappa_star, spectral_tol) -> np.ndarray:
    q = curvature(g, r) - kappa_star
    if kind.kind == CALABI:
        return laplacian_apply(jacobian(g, r), q)
    if kind.kind == FRACTIONAL:
        return fractional_laplacian_apply(jacobian(g, r), kind.s, q, spectral_tol)
    if kind.kind == PTH:
        return p_laplacian_apply(g, r, kind.p, q)
    return q if kind.ricci_sign == "literal" else -q


# Dormand-Prince 5(4) tableau; row 7 equals the 5th-order weights, so the
# last stage is the RHS at the accepted point (reused as the next first stage).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
)
# difference between the 5th- and 4th-order weights (error estimator)
_ERR = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_PI_ALPHA = 0.7 / 5.0  # proportional exponent
_PI_BETA = 0.4 / 5.0  # integral exponent (uses the previous error)
_ERR_FLOOR = 1e-4  # keeps the PI powers bounded when a step is exact


def _error_norm(err_vec, y_old, y_new, rtol, atol) -> float:
    sc = atol + rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    val = float(np.sqrt(np.mean((err_vec / sc) ** 2)))
    return val if math.isfinite(val) else math.inf


def _initial_step(f0, y0, f, t_max, rtol, atol) -> float:
    sc = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / sc) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / sc) ** 2)))
    h0 = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
    h0 = min(h0, t_max)
    f1 = f(y0 + h0 * f0)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / sc) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, t_max)


def integrate(g: WeightedGraph, cfg: FlowConfig) -> FlowRun:
    """Advance the flow from cfg.r0 until convergence, horizon, or abort.

    Samples are recorded at t = 0, every ``record_every`` accepted steps, and
    at the final state.  Each sample carries the energy (half the squared
    distance of the curvature from the target), the conserved coordinate
    sum(r), and the dissipation (kappa - kappa*) . dr/dt at that state.
    """
    require_admissible(g)
    r = validate_log_weights(g, cfg.r0).copy()
    kappa_star = resolve_target(g, cfg.target)
    n_rhs = 0

    def f(state: np.ndarray) -> np.ndarray:
        nonlocal n_rhs
        n_rhs += 1
        if not np.all(np.isfinite(state)):
            # a runaway stage; poison the step so the controller rejects it
            return np.full_like(state, np.nan)
        with np.errstate(over="ignore", invalid="ignore"):
            return _rhs_raw(cfg.kind, g, state, kappa_star, cfg.spectral_tol)

    samples: list[FlowSample] = []

    def record(t, state, kap, q, deriv):
        samples.append(
            FlowSample(
                t=float(t),
                r=state.copy(),
                kappa=kap.copy(),
                energy=0.5 * float(q @ q),
                sum_r=float(state.sum()),
                dissipation=float(q @ deriv),
            )
        )

    def finish(status: FlowStatus, accepted: int, rejected: int) -> FlowRun:
        run = FlowRun(
            config=cfg,
            target=kappa_star,
            samples=tuple(samples),
            status=status,
            rate_estimate=None,
            n_accepted=accepted,
            n_rejected=rejected,
            n_rhs=n_rhs,
        )
        run.rate_estimate = estimate_rate(run)
        return run

    kap = curvature(g, r)
    q = kap - kappa_star
    k1 = f(r)
    if not np.all(np.isfinite(k1)):
        record(0.0, r, kap, q, np.zeros_like(r))
        return finish(FlowStatus(ABORTED, 0.0, "non-finite right-hand side"), 0, 0)
    record(0.0, r, kap, q, k1)
    if float(np.abs(q).max()) < cfg.convergence_tol:
        return finish(FlowStatus(CONVERGED, 0.0), 0, 0)

    t = 0.0
    h = _initial_step(k1, r, f, cfg.t_max, cfg.rtol, cfg.atol)
    min_step = 1e-14 * cfg.t_max
    err_prev = _ERR_FLOOR
    after_rejection = False
    accepted = rejected = 0
    n = r.size
    K = np.empty((7, n))

    while True:
        if accepted + rejected >= cfg.max_steps:
            return finish(FlowStatus(ABORTED, t, "step limit reached"), accepted, rejected)
        if h < min_step:
            return finish(
                FlowStatus(ABORTED, t, f"step size underflow at t={t:.6g}"),
                accepted,
                rejected,
            )
        is_last = h >= cfg.t_max - t
        h_step = min(h, cfg.t_max - t)

        K[0] = k1
        for stage in range(1, 7):
            y_stage = r + h_step * (_A[stage] @ K[:stage])
            K[stage] = f(y_stage)
        y_new = y_stage  # stage 7 is evaluated at the 5th-order solution
        err_vec = h_step * (_ERR @ K)
        if np.all(np.isfinite(y_new)) and np.all(np.isfinite(err_vec)):
            err = _error_norm(err_vec, r, y_new, cfg.rtol, cfg.atol)
        else:
            err = math.inf

        if err > 1.0:
            rejected += 1
            after_rejection = True
            factor = _MIN_FACTOR if err == math.inf else max(
                _MIN_FACTOR, _SAFETY * err ** -0.2
            )
            h = h_step * factor
            continue

        # accepted
        accepted += 1
        t = cfg.t_max if is_last else t + h_step
        r = y_new.copy()
        k1 = K[6]

        if float(np.abs(r).max()) > OVERFLOW_LIMIT:
            return finish(
                FlowStatus(ABORTED, t, f"log-weight overflow at t={t:.6g}"),
                accepted,
                rejected,
            )
        kap = curvature(g, r)
        q = kap - kappa_star
        due = accepted % cfg.record_every == 0
        converged = float(np.abs(q).max()) < cfg.convergence_tol
        if due or converged or is_last:
            record(t, r, kap, q, k1)
        if converged:
            return finish(FlowStatus(CONVERGED, t), accepted, rejected)
        if is_last:
            return finish(FlowStatus(HORIZON, t), accepted, rejected)

        err_c = max(err, _ERR_FLOOR)
        factor = _SAFETY * err_c**-_PI_ALPHA * err_prev**_PI_BETA
        factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        if after_rejection:
            factor = min(1.0, factor)
        h = h_step * factor
        err_prev = err_c
        after_rejection = False


def monitor_invariants(run: FlowRun) -> InvariantReport:
    """Worst observed sum(r) drift, energy increase, and dissipation sign.

    For the Laplacian-driven kinds all three should be zero up to integrator
    tolerance; the Ricci kind conserves nothing, which the report flags via
    ``conserves_sum``.
    """
    if len(run.samples) < 2:
        raise ValueError("invariant monitoring needs at least 2 samples")
    sums = np.array([s.sum_r for s in run.samples])
    energies = run.energies
    dissipations = np.array([s.dissipation for s in run.samples])
    return InvariantReport(
        max_sum_drift=float(np.abs(sums - sums[0]).max()),
        max_energy_jump=float(max(0.0, np.diff(energies).max())),
        max_dissipation=float(dissipations.max()),
        conserves_sum=run.config.kind.conserves_sum,
        num_samples=len(run.samples),
    )


def estimate_rate(run: FlowRun, min_window: int = 20) -> float | None:
    """Least-squares slope of ln(energy) over the trailing decay window.

    The window starts where the energy first drops below 1e-2 of its maximum
    and runs to the final sample, widened backwards to at least
    ``min_window`` samples when available.  Absent when the energy never
    decayed two decades or fewer than two usable samples remain.
    """
    energies = run.energies
    times = run.times
    positive = energies > 0.0
    if not positive.any():
        return None
    emax = float(energies[positive].max())
    below = np.flatnonzero(positive & (energies <= 1e-2 * emax))
    if below.size == 0:
        return None
    start = int(below[0])
    usable = np.flatnonzero(positive)
    window = usable[usable >= start]
    if window.size < min_window:
        window = usable[-min_window:]
    if window.size < 2:
        return None
    slope = np.polyfit(times[window], np.log(energies[window]), 1)[0]
    return float(slope)
