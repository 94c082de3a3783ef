"""Implicit trapezoidal integrator with a plain Newton corrector.

For the long-term model the step residual is

    H = [ z_c - z_cn - (h/2)(h_c + h_cn);  x - x_n - (h/2)(f + f_n);  g ]

and for the QSS model the fast rows are replaced by the equilibrium
constraint f = 0. The iteration matrix A is the exact Jacobian of H, built
from the model's block Jacobian: integrated rows get I - (h/2) dJ, constraint
rows keep their raw Jacobian. Newton nonconvergence is the "numerical
difficulty" signal consumed by the hybrid layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .dae import (
    Counters,
    DaeProblem,
    SystemState,
    eval_raw,
    mass_structure,
    raw_jacobian,
)
from .numeric import NonFiniteResidual, SingularMatrix, rms_norm, solve_linear


@dataclass(frozen=True)
class TrapConfig:
    """Fixed step length plus Newton corrector limits."""

    h: float = 0.05
    newton_tol: float = 1e-9
    newton_max_iters: int = 20

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("step length h must be positive")
        if self.newton_tol <= 0:
            raise ValueError("newton_tol must be positive")


class NewtonNoConvergence(Exception):
    """Corrector failed within its iteration budget."""

    def __init__(self, message, t=None, residual=None):
        super().__init__(message)
        self.t = t
        self.residual = residual


def trap_residual(prob: DaeProblem, raw_prev: np.ndarray, p_prev: np.ndarray,
                  p_new: np.ndarray, raw_new: np.ndarray, h: float) -> np.ndarray:
    """Step residual H at p_new given the previous point's rates."""
    act = mass_structure(prob).active_count
    out = raw_new.copy()
    out[:act] = p_new[:act] - p_prev[:act] - 0.5 * h * (raw_new[:act] + raw_prev[:act])
    # constraint rows (g, and f for QSS) are kept as-is
    return out


def trap_matrix(prob: DaeProblem, s: SystemState, h: float) -> np.ndarray:
    """Iteration matrix A = dH/dp at s: the analytic step Jacobian."""
    act = mass_structure(prob).active_count
    jac = raw_jacobian(prob, s)
    a = jac.copy()
    a[:act, :] *= -0.5 * h
    idx = np.arange(act)
    a[idx, idx] += 1.0
    return a


def trap_step(
    prob: DaeProblem,
    s: SystemState,
    h: float,
    newton_tol: float = 1e-9,
    newton_max_iters: int = 20,
    counters: Optional[Counters] = None,
) -> SystemState:
    """Advance one implicit-trapezoidal step of length h with z_d frozen.

    Newton starts from the previous point (trivial predictor) and must drive
    both the full step residual and the algebraic rows below newton_tol.
    Raises NewtonNoConvergence / SingularMatrix / NonFiniteResidual.
    """
    p_prev = s.p()
    raw_prev = eval_raw(prob, s)
    if counters is not None:
        counters.residual_evals += 1
    n_alg = prob.n_total - mass_structure(prob).active_count
    state = s
    hnorm = np.inf
    for _ in range(newton_max_iters):
        raw_new = eval_raw(prob, state)
        if counters is not None:
            counters.residual_evals += 1
        hvec = trap_residual(prob, raw_prev, p_prev, state.p(), raw_new, h)
        hnorm = rms_norm(hvec)
        alg_norm = rms_norm(hvec[prob.n_total - n_alg:]) if n_alg else 0.0
        if hnorm <= newton_tol and alg_norm <= newton_tol:
            if counters is not None:
                counters.steps += 1
            return state.with_t(s.t + h)
        a = trap_matrix(prob, state, h)
        step = solve_linear(a, -hvec)
        if counters is not None:
            counters.jacobian_evals += 1
            counters.linear_solves += 1
            counters.newton_iters += 1
        state = state.with_p(state.p() + step)
    raise NewtonNoConvergence(
        f"corrector stalled at t={s.t:.6g} (step residual {hnorm:.3e})",
        t=s.t,
        residual=hnorm,
    )


@dataclass
class TrapOutcome:
    completed: bool
    failure_time: Optional[float] = None
    failure: Optional[str] = None
    detail: str = ""


StepHook = Callable[[SystemState, float], SystemState]


def trap_integrate(
    prob: DaeProblem,
    s0: SystemState,
    t_end: float,
    cfg: TrapConfig,
    event_hook: Optional[StepHook] = None,
    counters: Optional[Counters] = None,
    trajectory: Optional[List[SystemState]] = None,
) -> tuple[List[SystemState], TrapOutcome]:
    """Fixed-step march to t_end, calling event_hook at every step boundary.

    The hook may return a state with updated discrete variables; the next
    corrector then restores consistency. On corrector failure the outcome
    records the last time the integration could reach.
    """
    traj = trajectory if trajectory is not None else [s0]
    state = s0
    # step count fixed up front so event-induced inconsistency cannot stall time
    n_steps = int(round(max(t_end - s0.t, 0.0) / cfg.h))
    for k in range(n_steps):
        try:
            state = trap_step(
                prob, state, cfg.h,
                newton_tol=cfg.newton_tol,
                newton_max_iters=cfg.newton_max_iters,
                counters=counters,
            )
        except NewtonNoConvergence as exc:
            return traj, TrapOutcome(False, state.t, "newton", str(exc))
        except SingularMatrix as exc:
            return traj, TrapOutcome(False, state.t, "singular", str(exc))
        except NonFiniteResidual as exc:
            return traj, TrapOutcome(False, state.t, "nonfinite", str(exc))
        traj.append(state)
        if event_hook is not None:
            state = event_hook(state, cfg.h)
    return traj, TrapOutcome(True)
