"""Pseudo-transient continuation kernel.

The iteration solves (delta^-1 D + F'(p)) s = -F(p) and updates p <- p + s,
with the pseudo-step delta adapted by switched evolution relaxation (SER):
delta_n = min(delta_{n-1} * |F_{n-1}| / |F_n|, delta_max). Failure is signaled
by exhausting the iteration bound, never by aborting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional

import numpy as np

from .dae import (
    Counters,
    DaeProblem,
    SystemState,
    assemble_mass,
    eval_jacobian,
    eval_residual,
)
from .numeric import NORMS, NonFiniteResidual, SingularMatrix, solve_linear


@dataclass(frozen=True)
class PtcConfig:
    """Pseudo-time stepping knobs.

    delta0/delta_max bracket the pseudo step (seconds), f_tol is the stopping
    threshold on the residual norm, max_iters the failure bound, and
    max_delta_shrink a stagnation guard on consecutive SER shrinks.
    """

    delta0: float = 0.1
    delta_max: float = 1e4
    f_tol: float = 1e-6
    max_iters: int = 200
    max_delta_shrink: int = 40
    norm_kind: str = "rms"

    def __post_init__(self):
        if not (0 < self.delta0 <= self.delta_max):
            raise ValueError("need 0 < delta0 <= delta_max")
        if self.f_tol <= 0:
            raise ValueError("f_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.norm_kind not in NORMS:
            raise ValueError(f"unknown norm {self.norm_kind!r}")


class SolveStatus(Enum):
    CONVERGED = "converged"
    ITERATION_BOUND_REACHED = "iteration-bound-reached"
    LINEAR_SOLVE_FAILURE = "linear-solve-failure"
    NON_FINITE_RESIDUAL = "non-finite-residual"


@dataclass
class IterationRecord:
    index: int
    delta: float
    fnorm: float
    step_norm: float


@dataclass
class PtcTrace:
    """Per-iteration records plus work counters and restart bookkeeping."""

    iterations: List[IterationRecord] = field(default_factory=list)
    counters: Counters = field(default_factory=Counters)
    entry_states: List[SystemState] = field(default_factory=list)
    restart_iterations: List[int] = field(default_factory=list)
    stop_reason: str = ""


@dataclass
class SolveOutcome:
    status: SolveStatus
    final_state: SystemState
    trace: PtcTrace


@dataclass
class HookResult:
    """Returned by an event hook: possibly-updated state, pseudo step, flags.

    refreshed=True means discrete variables jumped and the residual must be
    re-seeded; armed=True means a device timer is still ticking, so the solve
    must not be declared converged yet.
    """

    state: SystemState
    delta: float
    refreshed: bool = False
    armed: bool = False


class EventRestartError(Exception):
    """The post-event restart step could not be completed."""


EventHook = Callable[[SystemState, float, int], Optional[HookResult]]


def ser_update(delta_prev: float, fnorm_prev: float, fnorm_cur: float,
               delta_max: float) -> float:
    """Switched evolution relaxation: grow delta as the residual falls, capped.

    A residual increase shrinks delta, which is the mechanism that lets the
    iteration accept uphill steps without diverging.
    """
    if delta_prev <= 0 or fnorm_prev <= 0 or fnorm_cur <= 0:
        raise ValueError("ser_update needs positive delta and residual norms")
    return min(delta_prev * fnorm_prev / fnorm_cur, delta_max)


def ptc_step(
    prob: DaeProblem,
    s: SystemState,
    delta: float,
    mass: Optional[np.ndarray] = None,
    counters: Optional[Counters] = None,
    norm_kind: str = "rms",
):
    """One continuation iterate: solve (delta^-1 D + F') s = -F, return (state, |F_new|).

    Pseudo-time only: t and z_d are left untouched.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if mass is None:
        mass = assemble_mass(prob)
    fvec = eval_residual(prob, s)
    if counters is not None:
        counters.residual_evals += 1
    new_state, fnew, _, _ = _iterate(prob, s, fvec, delta, mass, counters, NORMS[norm_kind])
    return new_state, fnew


def _iterate(prob, state, fvec, delta, mass, counters, norm):
    jac = eval_jacobian(prob, state)
    matrix = mass / delta + jac
    step = solve_linear(matrix, -fvec)
    if counters is not None:
        counters.jacobian_evals += 1
        counters.linear_solves += 1
    new_state = state.with_p(state.p() + step)
    fnew_vec = eval_residual(prob, new_state)
    if counters is not None:
        counters.residual_evals += 1
    return new_state, norm(fnew_vec), fnew_vec, norm(step)


def ptc_solve(
    prob: DaeProblem,
    s0: SystemState,
    cfg: PtcConfig,
    event_hook: Optional[EventHook] = None,
    counters: Optional[Counters] = None,
) -> SolveOutcome:
    """Run the continuation loop from a consistent state until the residual
    norm drops below f_tol or the iteration bound is reached.

    The event hook is invoked after every iterate so a hybrid layer can
    interpose discrete jumps; a jump re-seeds the residual and resets delta.
    All failures are reported as statuses; nothing is raised.
    """
    norm = NORMS[cfg.norm_kind]
    trace = PtcTrace(counters=counters if counters is not None else Counters())
    mass = assemble_mass(prob)
    state = s0
    trace.entry_states.append(state)
    try:
        fvec = eval_residual(prob, state)
    except NonFiniteResidual:
        return SolveOutcome(SolveStatus.NON_FINITE_RESIDUAL, state, trace)
    trace.counters.residual_evals += 1
    fnorm = norm(fvec)
    delta = cfg.delta0
    armed = False
    shrinks = 0
    n = 0
    if event_hook is not None:
        # entry probe: lets the hybrid layer report timers already pending,
        # so an entry state at equilibrium cannot mask queued device action
        hooked = event_hook(state, 0.0, 0)
        if hooked is not None:
            armed = hooked.armed
            state = hooked.state
            if hooked.refreshed:
                delta = hooked.delta
                try:
                    fvec = eval_residual(prob, state)
                except NonFiniteResidual:
                    return SolveOutcome(SolveStatus.NON_FINITE_RESIDUAL, state, trace)
                trace.counters.residual_evals += 1
                fnorm = norm(fvec)
                trace.entry_states.append(state)
    while True:
        if fnorm <= cfg.f_tol and not armed:
            status = SolveStatus.CONVERGED
            break
        if n >= cfg.max_iters:
            status = SolveStatus.ITERATION_BOUND_REACHED
            trace.stop_reason = trace.stop_reason or "iteration bound"
            break
        if shrinks >= cfg.max_delta_shrink:
            status = SolveStatus.ITERATION_BOUND_REACHED
            trace.stop_reason = f"{cfg.max_delta_shrink} consecutive delta shrinks"
            break
        n += 1
        try:
            new_state, fnew, fnew_vec, step_norm = _iterate(
                prob, state, fvec, delta, mass, trace.counters, norm
            )
        except SingularMatrix as exc:
            trace.stop_reason = str(exc)
            status = SolveStatus.LINEAR_SOLVE_FAILURE
            break
        except NonFiniteResidual as exc:
            trace.stop_reason = str(exc)
            status = SolveStatus.NON_FINITE_RESIDUAL
            break
        trace.iterations.append(IterationRecord(n, delta, fnew, step_norm))
        if event_hook is not None:
            try:
                hooked = event_hook(new_state, delta, n)
            except EventRestartError as exc:
                trace.stop_reason = str(exc)
                status = SolveStatus.LINEAR_SOLVE_FAILURE
                state = new_state
                break
            if hooked is not None:
                armed = hooked.armed
                if hooked.refreshed:
                    # Discrete jump applied: re-enter with delta0 and a fresh
                    # residual; SER history does not survive the jump.
                    state = hooked.state
                    delta = hooked.delta
                    try:
                        fvec = eval_residual(prob, state)
                    except NonFiniteResidual as exc:
                        trace.stop_reason = str(exc)
                        status = SolveStatus.NON_FINITE_RESIDUAL
                        break
                    trace.counters.residual_evals += 1
                    fnorm = norm(fvec)
                    trace.entry_states.append(state)
                    trace.restart_iterations.append(n)
                    shrinks = 0
                    continue
                new_state = hooked.state
        if fnew > 0.0:
            new_delta = ser_update(delta, fnorm, fnew, cfg.delta_max)
        else:
            new_delta = delta
        shrinks = shrinks + 1 if new_delta < delta else 0
        state, fvec, fnorm, delta = new_state, fnew_vec, fnew, new_delta
    return SolveOutcome(status, state, trace)


def backward_euler_first_newton(
    prob: DaeProblem, s: SystemState, delta: float
) -> SystemState:
    """First Newton iterate of the implicit-Euler corrector G(eta) = eta +
    delta D^-1 F(eta) - p_n, started from the previous point eta0 = p_n.

    Test-only reference for ODE sub-problems where the mass matrix is the
    identity; by construction it must reproduce ptc_step exactly.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    mass = assemble_mass(prob)
    if np.any(np.diag(mass) == 0.0):
        raise ValueError("implicit-Euler form needs an invertible mass matrix")
    p_n = s.p()
    fvec = eval_residual(prob, s)
    jac = eval_jacobian(prob, s)
    # G(eta0) = delta * D^-1 F(p_n); G'(eta0) = I + delta * D^-1 F'(p_n)
    g0 = delta * fvec
    gprime = np.eye(prob.n_total) + delta * jac
    eta1 = p_n - solve_linear(gprime, g0)
    return s.with_p(eta1)
