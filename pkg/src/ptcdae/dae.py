"""Semi-explicit index-1 DAE container: residual stacking, Jacobians, mass
matrices, and consistency handling for the partitioned state [z_c | x | y].

The continuous part is

    dz_c/dt = h_c(z_c, z_d, x, y)      slow states      (dimension p)
    dx/dt   = f(z_c, z_d, x, y)        fast states      (dimension m)
    0       = g(z_c, z_d, x, y)        algebraic part   (dimension n)

and the solver-facing residual is F = [-h_c; -f; -g] so that D dp/dt = -F
with D the 0/1 diagonal mass projector. Discrete states z_d ride along as
parameters; transitions are owned by the event layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .numeric import NonFiniteResidual, fd_jacobian, rms_norm, solve_linear


class ModelKind(Enum):
    LONG_TERM = "longterm"
    QSS = "qss"


class NoConvergence(Exception):
    """Newton projection onto the constraint manifold failed to converge."""


@dataclass
class Counters:
    """Work counters shared by the integrators and the continuation solver."""

    residual_evals: int = 0
    jacobian_evals: int = 0
    linear_solves: int = 0
    newton_iters: int = 0
    steps: int = 0

    def merged(self, other: "Counters") -> "Counters":
        return Counters(
            self.residual_evals + other.residual_evals,
            self.jacobian_evals + other.jacobian_evals,
            self.linear_solves + other.linear_solves,
            self.newton_iters + other.newton_iters,
            self.steps + other.steps,
        )


@dataclass(frozen=True)
class MassStructure:
    """0/1 diagonal mass layout: identity block of size active_count, zeros after."""

    kind: ModelKind
    active_count: int


@dataclass(frozen=True, eq=False)
class SystemState:
    """Time plus the partitioned continuous vector and discrete variables.

    Arrays are treated as immutable; updates go through with_p / replacing.
    """

    t: float
    z_c: np.ndarray
    z_d: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def p(self) -> np.ndarray:
        """Stacked continuous vector [z_c, x, y]."""
        return np.concatenate([self.z_c, self.x, self.y])

    def with_p(self, p: np.ndarray, t: Optional[float] = None) -> "SystemState":
        p = np.asarray(p, dtype=float)
        np_, m = self.z_c.size, self.x.size
        return SystemState(
            t=self.t if t is None else t,
            z_c=p[:np_].copy(),
            z_d=self.z_d,
            x=p[np_:np_ + m].copy(),
            y=p[np_ + m:].copy(),
        )

    def with_zd(self, z_d: np.ndarray) -> "SystemState":
        return replace(self, z_d=np.asarray(z_d, dtype=float).copy())

    def with_t(self, t: float) -> "SystemState":
        return replace(self, t=t)


def make_state(t, z_c, z_d, x, y) -> SystemState:
    return SystemState(
        t=float(t),
        z_c=np.asarray(z_c, dtype=float).reshape(-1),
        z_d=np.asarray(z_d, dtype=float).reshape(-1),
        x=np.asarray(x, dtype=float).reshape(-1),
        y=np.asarray(y, dtype=float).reshape(-1),
    )


ResidualFn = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class DaeProblem:
    """Immutable DAE description; all evaluation is reentrant.

    eval_hc / eval_f / eval_g take (z_c, z_d, x, y) and return arrays of
    length p / m / n. jacobian, when provided, returns the raw block Jacobian
    d[h_c; f; g] / d[z_c, x, y] (no sign flip); otherwise a central-difference
    fallback is used. epsilon is 1 over the largest device time constant.
    """

    n_zc: int
    n_x: int
    n_y: int
    model_kind: ModelKind
    eval_hc: ResidualFn
    eval_f: ResidualFn
    eval_g: ResidualFn
    eval_hd: Optional[Callable[[SystemState], np.ndarray]] = None
    epsilon: float = 1.0
    jacobian: Optional[ResidualFn] = None
    var_names: Optional[tuple] = None
    layout: object = None

    def __post_init__(self):
        if min(self.n_zc, self.n_x, self.n_y) < 0:
            raise ValueError("dimensions must be nonnegative")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    @property
    def n_total(self) -> int:
        return self.n_zc + self.n_x + self.n_y

    def split(self, p: np.ndarray):
        return (
            p[: self.n_zc],
            p[self.n_zc: self.n_zc + self.n_x],
            p[self.n_zc + self.n_x:],
        )


def eval_raw(prob: DaeProblem, s: SystemState) -> np.ndarray:
    """Unnegated stacked rates/constraints [h_c; f; g]; raises on non-finite."""
    hc = np.asarray(prob.eval_hc(s.z_c, s.z_d, s.x, s.y), dtype=float).reshape(-1)
    f = np.asarray(prob.eval_f(s.z_c, s.z_d, s.x, s.y), dtype=float).reshape(-1)
    g = np.asarray(prob.eval_g(s.z_c, s.z_d, s.x, s.y), dtype=float).reshape(-1)
    if hc.size != prob.n_zc or f.size != prob.n_x or g.size != prob.n_y:
        raise ValueError(
            f"residual block sizes ({hc.size},{f.size},{g.size}) do not match "
            f"problem dimensions ({prob.n_zc},{prob.n_x},{prob.n_y})"
        )
    out = np.concatenate([hc, f, g])
    if not np.all(np.isfinite(out)):
        raise NonFiniteResidual(f"non-finite model evaluation at t={s.t:.6g}")
    return out


def eval_residual(prob: DaeProblem, s: SystemState) -> np.ndarray:
    """Solver residual F(p) = [-h_c; -f; -g] with z_d held fixed."""
    return -eval_raw(prob, s)


def raw_jacobian(prob: DaeProblem, s: SystemState, fd_step: float = 1e-6) -> np.ndarray:
    """Block Jacobian d[h_c; f; g]/d[z_c, x, y]: analytic if provided, else FD."""
    if prob.jacobian is not None:
        jac = np.asarray(prob.jacobian(s.z_c, s.z_d, s.x, s.y), dtype=float)
        if jac.shape != (prob.n_total, prob.n_total):
            raise ValueError(f"jacobian shape {jac.shape} != {(prob.n_total,) * 2}")
        return jac
    base = s

    def stacked(p):
        return eval_raw(prob, base.with_p(p))

    return fd_jacobian(stacked, s.p(), h=fd_step)


def eval_jacobian(prob: DaeProblem, s: SystemState, fd_step: float = 1e-6) -> np.ndarray:
    """Jacobian of eval_residual w.r.t. [z_c, x, y]."""
    return -raw_jacobian(prob, s, fd_step=fd_step)


def mass_structure(prob: DaeProblem) -> MassStructure:
    if prob.model_kind is ModelKind.LONG_TERM:
        return MassStructure(ModelKind.LONG_TERM, prob.n_zc + prob.n_x)
    return MassStructure(ModelKind.QSS, prob.n_zc)


def assemble_mass(prob: DaeProblem) -> np.ndarray:
    """Block-diagonal projector: identity on the integrated rows, zero after."""
    struct = mass_structure(prob)
    d = np.zeros((prob.n_total, prob.n_total))
    idx = np.arange(struct.active_count)
    d[idx, idx] = 1.0
    return d


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    g_norm: float
    f_norm: Optional[float]
    tol: float


def check_consistency(prob: DaeProblem, s: SystemState, tol: float) -> ConsistencyReport:
    """Algebraic-manifold membership: g for the long-term model, f and g for QSS."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = np.asarray(prob.eval_g(s.z_c, s.z_d, s.x, s.y), dtype=float)
    g_norm = rms_norm(g)
    if prob.model_kind is ModelKind.LONG_TERM:
        return ConsistencyReport(g_norm <= tol, g_norm, None, tol)
    f = np.asarray(prob.eval_f(s.z_c, s.z_d, s.x, s.y), dtype=float)
    f_norm = rms_norm(f)
    return ConsistencyReport(g_norm <= tol and f_norm <= tol, g_norm, f_norm, tol)


def _constraint_slices(prob: DaeProblem):
    """(row slice into [h_c;f;g], column slice into [z_c,x,y]) solved by projection."""
    p, m, n = prob.n_zc, prob.n_x, prob.n_y
    if prob.model_kind is ModelKind.LONG_TERM:
        return slice(p + m, p + m + n), slice(p + m, p + m + n)
    return slice(p, p + m + n), slice(p, p + m + n)


def project_consistent(
    prob: DaeProblem,
    s: SystemState,
    tol: float = 1e-10,
    max_iters: int = 20,
    counters: Optional[Counters] = None,
) -> SystemState:
    """Newton-solve the algebraic constraints holding z_c (and z_d) fixed.

    Long-term model: solves g = 0 for y. QSS model: solves {f = 0, g = 0}
    for (x, y). Raises NoConvergence if the manifold is out of reach (for
    example past the power-flow solvability boundary).
    """
    rows, cols = _constraint_slices(prob)
    state = s
    res = eval_raw(prob, state)[rows]
    if counters is not None:
        counters.residual_evals += 1
    for _ in range(max_iters):
        if rms_norm(res) <= tol:
            return state
        jac = raw_jacobian(prob, state)[rows, cols]
        if counters is not None:
            counters.jacobian_evals += 1
            counters.linear_solves += 1
        step = solve_linear(jac, -res)
        p = state.p()
        p[cols] += step
        state = state.with_p(p)
        res = eval_raw(prob, state)[rows]
        if counters is not None:
            counters.residual_evals += 1
    if rms_norm(res) <= tol:
        return state
    raise NoConvergence(
        f"projection stalled after {max_iters} iterations, "
        f"constraint norm {rms_norm(res):.3e} > {tol:.1e}"
    )
