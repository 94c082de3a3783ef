"""Hybrid discrete/continuous orchestration.

Wires the integrator, the continuation solver, and the device event rules
into the three run modes: plain trapezoidal baseline, continuation on the
long-term model from the t0 handoff, and equilibrium-constrained (QSS)
integration with continuation fallback on numerical difficulty.

Discrete jumps always follow the same discipline: update z_d first, reset
the pseudo step to delta0, take one converged trapezoidal restart step of
length delta0 to restore consistency, then resume. Device timers advance
with the real step length while integrating and with the accumulated pseudo
step while the continuation solver runs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from .dae import (
    Counters,
    DaeProblem,
    ModelKind,
    SystemState,
    check_consistency,
    eval_residual,
    project_consistent,
)
from .events import (
    EventRecord,
    EventRule,
    advance_timers,
    apply_events,
    armed_rules,
    detect_events,
)
from .models import ModelPack, Scenario, build_pack, event_rules
from .numeric import NonFiniteResidual, SingularMatrix, rms_norm
from .ptc import (
    EventRestartError,
    HookResult,
    PtcConfig,
    PtcTrace,
    SolveStatus,
    ptc_solve,
)
from .trapezoid import NewtonNoConvergence, TrapConfig, trap_integrate, trap_step


class Method(Enum):
    TRAPEZOIDAL = "trap"
    PTC = "ptc"
    QSS_TRAP_WITH_PTC_FALLBACK = "qss-fallback"


class RunStatus(Enum):
    CONVERGED = "converged"
    COMPLETED = "completed"
    ITERATION_BOUND_REACHED = "iteration-bound-reached"
    NEWTON_FAILURE = "newton-failure"
    LINEAR_SOLVE_FAILURE = "linear-solve-failure"
    NON_FINITE = "non-finite"


_PTC_STATUS = {
    SolveStatus.CONVERGED: RunStatus.CONVERGED,
    SolveStatus.ITERATION_BOUND_REACHED: RunStatus.ITERATION_BOUND_REACHED,
    SolveStatus.LINEAR_SOLVE_FAILURE: RunStatus.LINEAR_SOLVE_FAILURE,
    SolveStatus.NON_FINITE_RESIDUAL: RunStatus.NON_FINITE,
}

_TRAP_STATUS = {
    "newton": RunStatus.NEWTON_FAILURE,
    "singular": RunStatus.LINEAR_SOLVE_FAILURE,
    "nonfinite": RunStatus.NON_FINITE,
}


@dataclass(frozen=True)
class RunPlan:
    """What to run: model kind, method, phase boundaries, solver configs."""

    model_kind: ModelKind
    method: Method
    t0: float = 5.0
    t1: float = 30.0
    t_end: float = 200.0
    ptc_cfg: PtcConfig = field(default_factory=PtcConfig)
    trap_cfg: TrapConfig = field(default_factory=TrapConfig)

    def __post_init__(self):
        if not (0.0 <= self.t0 <= self.t1 <= self.t_end):
            raise ValueError("need 0 <= t0 <= t1 <= t_end")
        if self.method is Method.QSS_TRAP_WITH_PTC_FALLBACK and \
                self.model_kind is not ModelKind.QSS:
            raise ValueError("the fallback method runs the QSS model")


def plan_for(scenario: Scenario, model_kind: ModelKind, method: Method) -> RunPlan:
    """RunPlan from a scenario's bundled plan parameters."""
    p = scenario.plan
    return RunPlan(
        model_kind=model_kind,
        method=method,
        t0=p.t0,
        t1=p.t1,
        t_end=p.t_end,
        ptc_cfg=PtcConfig(delta0=p.delta0, delta_max=p.delta_max,
                          f_tol=p.f_tol, max_iters=p.max_iters),
        trap_cfg=TrapConfig(h=p.h),
    )


@dataclass
class RunResult:
    scenario_label: str
    model_kind: ModelKind
    method: Method
    status: RunStatus
    final_state: SystemState
    trajectory: List[SystemState]
    counters: Counters
    events: List[EventRecord]
    problem: DaeProblem
    trace: Optional[PtcTrace] = None
    failure_time: Optional[float] = None
    switch_time: Optional[float] = None
    ptc_entry_states: List[SystemState] = field(default_factory=list)
    final_fnorm: float = float("nan")
    wall_time: float = 0.0

    @property
    def verdict(self) -> str:
        """stable / unstable / failed classification of the run."""
        if self.status is RunStatus.CONVERGED:
            return "stable"
        if self.status is RunStatus.COMPLETED:
            return "stable" if self.final_fnorm <= 1e-5 else "inconclusive"
        if self.status is RunStatus.ITERATION_BOUND_REACHED:
            return "unstable"
        # integrator broke down mid-run: the failure time is the signal
        return "unstable"


class _EventDriver:
    """Owns the rules, the clock, the event log, and the restart discipline."""

    def __init__(self, prob: DaeProblem, rules: List[EventRule],
                 trap_cfg: TrapConfig, delta0: float,
                 counters: Counters, log: List[EventRecord]):
        self.prob = prob
        self.rules = rules
        self.trap_cfg = trap_cfg
        self.delta0 = delta0
        self.counters = counters
        self.log = log
        self.clock = 0.0
        self.ptc_states: List[SystemState] = []

    # integrator-side hook: timers advance by the step length
    def trap_hook(self, state: SystemState, dt: float) -> SystemState:
        self.clock = state.t
        advance_timers(self.rules, state, dt)
        fired = detect_events(self.rules, state)
        if fired:
            state = apply_events(self.prob, state, fired, self.log, t=state.t)
            for rule in fired:
                rule.reset_timer()
        return state

    # continuation-side hook: timers advance by the pseudo step just used
    def ptc_hook(self, state: SystemState, delta_used: float, itern: int) -> HookResult:
        entry_probe = itern == 0
        self.clock += delta_used
        state = state.with_t(self.clock)
        advance_timers(self.rules, state, delta_used)
        fired = detect_events(self.rules, state)
        if not fired:
            if not entry_probe:
                self.ptc_states.append(state)
            return HookResult(state, delta_used, refreshed=False,
                              armed=bool(armed_rules(self.rules, state)))
        jumped = apply_events(self.prob, state, fired, self.log, t=self.clock)
        for rule in fired:
            rule.reset_timer()
        restarted = self._restart(jumped)
        self.clock = restarted.t
        advance_timers(self.rules, restarted, restarted.t - jumped.t)
        self.ptc_states.append(restarted)
        return HookResult(restarted, self.delta0, refreshed=True,
                          armed=bool(armed_rules(self.rules, restarted)))

    def _restart(self, state: SystemState) -> SystemState:
        """One converged trapezoidal step of length delta0 after a jump;
        retried once with delta0/10 before giving up."""
        for h in (self.delta0, self.delta0 / 10.0):
            try:
                return trap_step(
                    self.prob, state, h,
                    newton_tol=self.trap_cfg.newton_tol,
                    newton_max_iters=self.trap_cfg.newton_max_iters,
                    counters=self.counters,
                )
            except (NewtonNoConvergence, SingularMatrix, NonFiniteResidual):
                continue
        raise EventRestartError(
            f"post-event restart step failed at t={state.t:.6g}"
        )


def _final_fnorm(prob: DaeProblem, state: SystemState) -> float:
    try:
        return rms_norm(eval_residual(prob, state))
    except NonFiniteResidual:
        return float("inf")


def _runup(pack: ModelPack, plan: RunPlan, driver: _EventDriver,
           prob_pre: DaeProblem, prob_post: DaeProblem, t_stop: float,
           counters: Counters, trajectory: List[SystemState]):
    """Integrate the long-term model from 0 to t_stop, applying the line trip
    at its fault time. Returns (state, TrapOutcome-like failure or None)."""
    scenario = pack.scenario
    state = pack.initial_state()
    trajectory.append(state)
    t_fault = scenario.fault.t_fault if scenario.fault else None
    if t_fault is not None and t_fault < t_stop:
        _, out = trap_integrate(prob_pre, state, t_fault, plan.trap_cfg,
                                event_hook=driver.trap_hook, counters=counters,
                                trajectory=trajectory)
        if not out.completed:
            return trajectory[-1], out
        state = trajectory[-1]
        # line trip: continuous states carry over, algebraic variables jump
        state = project_consistent(prob_post, state, tol=1e-11,
                                   counters=counters)
        driver.log.append(EventRecord(state.t, f"fault:{scenario.fault.line}",
                                      -1, 1.0, 0.0, "line tripped"))
        trajectory.append(state)
        prob = prob_post
    else:
        prob = prob_pre
    driver.prob = prob_post
    _, out = trap_integrate(prob, state, t_stop, plan.trap_cfg,
                            event_hook=driver.trap_hook, counters=counters,
                            trajectory=trajectory)
    return trajectory[-1], (None if out.completed else out)


def run_baseline(scenario: Scenario, plan: RunPlan) -> RunResult:
    """Full trapezoidal integration of the selected model to t_end.

    For the QSS model the long-term model is integrated up to t1 first and
    the equilibrium-constrained system takes over from the t1 state.
    """
    start = time.perf_counter()
    pack = build_pack(scenario)
    counters = Counters()
    log: List[EventRecord] = []
    prob_pre = pack.problem(ModelKind.LONG_TERM, post_fault=False)
    prob_post = pack.problem(ModelKind.LONG_TERM, post_fault=True)
    rules = event_rules(pack)
    driver = _EventDriver(prob_post, rules, plan.trap_cfg,
                          plan.ptc_cfg.delta0, counters, log)
    trajectory: List[SystemState] = []

    if plan.model_kind is ModelKind.LONG_TERM:
        state, fail = _runup(pack, plan, driver, prob_pre, prob_post,
                             plan.t_end, counters, trajectory)
        prob_final = prob_post
        switch_time = None
    else:
        state, fail = _runup(pack, plan, driver, prob_pre, prob_post,
                             plan.t1, counters, trajectory)
        prob_final = pack.problem(ModelKind.QSS, post_fault=True)
        switch_time = plan.t1
        if fail is None:
            driver.prob = prob_final
            _, out = trap_integrate(prob_final, state, plan.t_end,
                                    plan.trap_cfg, event_hook=driver.trap_hook,
                                    counters=counters, trajectory=trajectory)
            state = trajectory[-1]
            fail = None if out.completed else out

    status = RunStatus.COMPLETED if fail is None else _TRAP_STATUS[fail.failure]
    return RunResult(
        scenario_label=scenario.label,
        model_kind=plan.model_kind,
        method=Method.TRAPEZOIDAL,
        status=status,
        final_state=state,
        trajectory=trajectory,
        counters=counters,
        events=log,
        problem=prob_final,
        failure_time=None if fail is None else fail.failure_time,
        switch_time=switch_time,
        final_fnorm=_final_fnorm(prob_final, state),
        wall_time=time.perf_counter() - start,
    )


def run_longterm_ptc(scenario: Scenario, plan: RunPlan) -> RunResult:
    """Trapezoidal run-up of the post-fault system to t0, then continuation
    to the equilibrium with event interposition."""
    start = time.perf_counter()
    pack = build_pack(scenario)
    counters = Counters()
    log: List[EventRecord] = []
    prob_pre = pack.problem(ModelKind.LONG_TERM, post_fault=False)
    prob_post = pack.problem(ModelKind.LONG_TERM, post_fault=True)
    rules = event_rules(pack)
    driver = _EventDriver(prob_post, rules, plan.trap_cfg,
                          plan.ptc_cfg.delta0, counters, log)
    trajectory: List[SystemState] = []
    state, fail = _runup(pack, plan, driver, prob_pre, prob_post,
                         plan.t0, counters, trajectory)
    if fail is not None:
        return RunResult(
            scenario_label=scenario.label, model_kind=plan.model_kind,
            method=Method.PTC, status=_TRAP_STATUS[fail.failure],
            final_state=state, trajectory=trajectory, counters=counters,
            events=log, problem=prob_post, failure_time=fail.failure_time,
            final_fnorm=_final_fnorm(prob_post, state),
            wall_time=time.perf_counter() - start,
        )
    driver.clock = state.t
    outcome = ptc_solve(prob_post, state, plan.ptc_cfg,
                        event_hook=driver.ptc_hook, counters=counters)
    trajectory.extend(driver.ptc_states)
    return RunResult(
        scenario_label=scenario.label,
        model_kind=plan.model_kind,
        method=Method.PTC,
        status=_PTC_STATUS[outcome.status],
        final_state=outcome.final_state,
        trajectory=trajectory,
        counters=counters,
        events=log,
        problem=prob_post,
        trace=outcome.trace,
        switch_time=plan.t0,
        failure_time=(driver.clock
                      if outcome.status is not SolveStatus.CONVERGED else None),
        ptc_entry_states=list(outcome.trace.entry_states),
        final_fnorm=_final_fnorm(prob_post, outcome.final_state),
        wall_time=time.perf_counter() - start,
    )


def run_qss_ptc(scenario: Scenario, plan: RunPlan) -> RunResult:
    """QSS integration from the t1 handoff with permanent continuation
    fallback on the integrator's numerical difficulty."""
    start = time.perf_counter()
    pack = build_pack(scenario)
    counters = Counters()
    log: List[EventRecord] = []
    prob_pre = pack.problem(ModelKind.LONG_TERM, post_fault=False)
    prob_post_lt = pack.problem(ModelKind.LONG_TERM, post_fault=True)
    prob_qss = pack.problem(ModelKind.QSS, post_fault=True)
    rules = event_rules(pack)
    driver = _EventDriver(prob_post_lt, rules, plan.trap_cfg,
                          plan.ptc_cfg.delta0, counters, log)
    trajectory: List[SystemState] = []
    state, fail = _runup(pack, plan, driver, prob_pre, prob_post_lt,
                         plan.t1, counters, trajectory)
    if fail is not None:
        return RunResult(
            scenario_label=scenario.label, model_kind=plan.model_kind,
            method=Method.QSS_TRAP_WITH_PTC_FALLBACK,
            status=_TRAP_STATUS[fail.failure], final_state=state,
            trajectory=trajectory, counters=counters, events=log,
            problem=prob_qss, failure_time=fail.failure_time,
            final_fnorm=_final_fnorm(prob_qss, state),
            wall_time=time.perf_counter() - start,
        )
    driver.prob = prob_qss
    _, out = trap_integrate(prob_qss, state, plan.t_end, plan.trap_cfg,
                            event_hook=driver.trap_hook, counters=counters,
                            trajectory=trajectory)
    state = trajectory[-1]
    if out.completed:
        return RunResult(
            scenario_label=scenario.label, model_kind=plan.model_kind,
            method=Method.QSS_TRAP_WITH_PTC_FALLBACK,
            status=RunStatus.COMPLETED, final_state=state,
            trajectory=trajectory, counters=counters, events=log,
            problem=prob_qss, switch_time=None,
            final_fnorm=_final_fnorm(prob_qss, state),
            wall_time=time.perf_counter() - start,
        )
    # numerical difficulty: continuation takes over from the last accepted
    # state and never switches back
    switch_time = out.failure_time
    driver.clock = state.t
    outcome = ptc_solve(prob_qss, state, plan.ptc_cfg,
                        event_hook=driver.ptc_hook, counters=counters)
    trajectory.extend(driver.ptc_states)
    return RunResult(
        scenario_label=scenario.label,
        model_kind=plan.model_kind,
        method=Method.QSS_TRAP_WITH_PTC_FALLBACK,
        status=_PTC_STATUS[outcome.status],
        final_state=outcome.final_state,
        trajectory=trajectory,
        counters=counters,
        events=log,
        problem=prob_qss,
        trace=outcome.trace,
        switch_time=switch_time,
        failure_time=(driver.clock
                      if outcome.status is not SolveStatus.CONVERGED else None),
        ptc_entry_states=list(outcome.trace.entry_states),
        final_fnorm=_final_fnorm(prob_qss, outcome.final_state),
        wall_time=time.perf_counter() - start,
    )


def run_scenario(scenario: Scenario, plan: RunPlan) -> RunResult:
    """Dispatch on the plan's method."""
    if plan.method is Method.TRAPEZOIDAL:
        return run_baseline(scenario, plan)
    if plan.method is Method.QSS_TRAP_WITH_PTC_FALLBACK:
        return run_qss_ptc(scenario, plan)
    if plan.model_kind is ModelKind.LONG_TERM:
        return run_longterm_ptc(scenario, plan)
    return _run_qss_direct_ptc(scenario, plan)


def _run_qss_direct_ptc(scenario: Scenario, plan: RunPlan) -> RunResult:
    """Continuation on the QSS model straight from the t1 handoff (no
    integration phase on the constrained model)."""
    start = time.perf_counter()
    pack = build_pack(scenario)
    counters = Counters()
    log: List[EventRecord] = []
    prob_pre = pack.problem(ModelKind.LONG_TERM, post_fault=False)
    prob_post_lt = pack.problem(ModelKind.LONG_TERM, post_fault=True)
    prob_qss = pack.problem(ModelKind.QSS, post_fault=True)
    rules = event_rules(pack)
    driver = _EventDriver(prob_post_lt, rules, plan.trap_cfg,
                          plan.ptc_cfg.delta0, counters, log)
    trajectory: List[SystemState] = []
    state, fail = _runup(pack, plan, driver, prob_pre, prob_post_lt,
                         plan.t1, counters, trajectory)
    if fail is not None:
        return RunResult(
            scenario_label=scenario.label, model_kind=plan.model_kind,
            method=Method.PTC, status=_TRAP_STATUS[fail.failure],
            final_state=state, trajectory=trajectory, counters=counters,
            events=log, problem=prob_qss, failure_time=fail.failure_time,
            final_fnorm=_final_fnorm(prob_qss, state),
            wall_time=time.perf_counter() - start,
        )
    state = project_consistent(prob_qss, state, tol=1e-10, counters=counters)
    driver.prob = prob_qss
    driver.clock = state.t
    outcome = ptc_solve(prob_qss, state, plan.ptc_cfg,
                        event_hook=driver.ptc_hook, counters=counters)
    trajectory.extend(driver.ptc_states)
    return RunResult(
        scenario_label=scenario.label,
        model_kind=plan.model_kind,
        method=Method.PTC,
        status=_PTC_STATUS[outcome.status],
        final_state=outcome.final_state,
        trajectory=trajectory,
        counters=counters,
        events=log,
        problem=prob_qss,
        trace=outcome.trace,
        switch_time=plan.t1,
        failure_time=(driver.clock
                      if outcome.status is not SolveStatus.CONVERGED else None),
        ptc_entry_states=list(outcome.trace.entry_states),
        final_fnorm=_final_fnorm(prob_qss, outcome.final_state),
        wall_time=time.perf_counter() - start,
    )
