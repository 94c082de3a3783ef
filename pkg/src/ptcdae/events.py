"""Discrete-event primitives: rules with guards, timers, and transitions.

A rule owns one entry of z_d. Its instantaneous condition (for example a
controlled voltage outside a deadband) is sampled by the orchestrator, which
advances the rule's timer with whatever clock governs the run: real step
length for the integrator, accumulated pseudo steps for the continuation
solver. The guard holds once the condition has persisted for the rule's
delay; the transition then proposes a new admissible z_d value or None when
the device is saturated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .dae import DaeProblem, SystemState


@dataclass
class EventRule:
    device_id: str
    zd_index: int
    delay: float
    condition: Callable[[SystemState], bool]
    transition: Callable[[SystemState], Optional[float]]
    timer: float = 0.0

    def guard(self, state: SystemState) -> bool:
        """True when the condition has held continuously for at least delay."""
        return self.condition(state) and self.timer >= self.delay

    def reset_timer(self):
        self.timer = 0.0


@dataclass
class EventRecord:
    t: float
    device: str
    zd_index: int
    old: float
    new: float
    note: str = ""


def advance_timers(rules: List[EventRule], state: SystemState, dt: float):
    """Accumulate hold time while a rule's condition is true, else reset."""
    for rule in rules:
        if rule.condition(state):
            rule.timer += dt
        else:
            rule.timer = 0.0


def detect_events(rules: List[EventRule], state: SystemState) -> List[EventRule]:
    """All rules whose guard holds at the state, ordered by device id."""
    fired = [r for r in rules if r.guard(state)]
    fired.sort(key=lambda r: r.device_id)
    return fired


def armed_rules(rules: List[EventRule], state: SystemState) -> List[EventRule]:
    """Rules whose condition is live and whose transition is not saturated."""
    return [
        r for r in rules
        if r.condition(state) and r.transition(state) is not None
    ]


def apply_events(
    prob: DaeProblem,
    state: SystemState,
    transitions: List[EventRule],
    log: Optional[List[EventRecord]] = None,
    t: Optional[float] = None,
) -> SystemState:
    """Apply fired transitions to z_d in one batch; continuous variables stay.

    Saturated transitions are ignored and logged rather than raised, matching
    device behavior (a tap at its end stop simply stops responding). The
    returned state is in general no longer consistent; the caller restores
    consistency with an integration step.
    """
    if not transitions:
        return state
    when = state.t if t is None else t
    z_d = state.z_d.copy()
    for rule in transitions:
        old = float(z_d[rule.zd_index])
        new = rule.transition(state)
        if new is None:
            if log is not None:
                log.append(EventRecord(when, rule.device_id, rule.zd_index,
                                       old, old, "saturated"))
            continue
        z_d[rule.zd_index] = new
        if log is not None:
            log.append(EventRecord(when, rule.device_id, rule.zd_index, old, float(new)))
    return state.with_zd(z_d)
