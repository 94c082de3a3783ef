"""Desk-scale power-system component pack and network assembly.

Builds DAE problems (long-term and QSS kind) from a scenario: buses and
lines in per-unit on the system base, two-axis generators with first-order
AVRs and governors, exponential-recovery loads, deadband-timer load tap
changers, and timed over-excitation limiters. Component equations and their
equilibrium conditions are documented in docs/model_notes.md.

Variable ordering is [z_c | x | y] with

    z_c = [Pm per governed generator, (zp, zq) per recovery load,
           field-overload timer per limited generator]
    x   = [delta, w, Eq', Ed', Efd] per generator
    y   = [theta (non-slack buses), V (non-slack buses), Id, Iq per generator]
    z_d = [tap per LTC, limiter flag per OXL]

The slack bus is an external grid with fixed voltage and angle. The initial
state solves the pre-fault power flow and is an exact equilibrium of the
assembled DAE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .dae import DaeProblem, ModelKind, SystemState, make_state
from .events import EventRule
from .numeric import solve_linear

SOFTPLUS_K = 40.0


class PowerFlowNoConvergence(Exception):
    """Pre-fault power flow failed: scenario data is not solvable."""


class ValidationError(Exception):
    """A scenario violates one of its invariants."""


# ---------------------------------------------------------------------------
# scenario data


@dataclass(frozen=True)
class Bus:
    name: str
    is_slack: bool = False
    v_set: Optional[float] = None    # slack voltage magnitude
    p_load: float = 0.0              # constant-PQ load
    q_load: float = 0.0
    b_shunt: float = 0.0


@dataclass(frozen=True)
class Line:
    name: str
    from_bus: str
    to_bus: str
    r: float
    x: float
    in_service: bool = True


@dataclass(frozen=True)
class Network:
    buses: Tuple[Bus, ...]
    lines: Tuple[Line, ...]
    base_mva: float = 100.0


@dataclass(frozen=True)
class Generator:
    """Two-axis machine; per-unit on the system base, Rs neglected."""

    name: str
    bus: str
    h: float
    d: float
    xd: float
    xdp: float
    xq: float
    xqp: float
    td0p: float
    tq0p: float
    p_set: float
    v_set: float


@dataclass(frozen=True)
class Exciter:
    """First-order AVR with a smooth anti-windup ceiling on the field command."""

    gen: str
    ka: float
    ta: float
    efd_min: float
    efd_max: float


@dataclass(frozen=True)
class Governor:
    """First-order turbine governor with droop."""

    gen: str
    droop: float
    tg: float


@dataclass(frozen=True)
class ErlLoad:
    """Exponential recovery load: dz/dt = -z/T + Ps(V) - Pt(V), drawn power
    z/T + Pt(V), with Ps/Pt power-law characteristics around the pre-fault
    voltage."""

    name: str
    bus: str
    p0: float
    q0: float
    tp: float
    tq: float
    alpha_s: float = 0.0
    alpha_t: float = 2.0
    beta_s: float = 0.0
    beta_t: float = 2.0


@dataclass(frozen=True)
class Ltc:
    """Tap changer between two buses regulating the to-side voltage. Raising
    the tap raises the controlled voltage; steps fire after the deadband has
    been violated continuously for `delay` seconds."""

    name: str
    from_bus: str
    to_bus: str
    r: float
    x: float
    tap0: float = 1.0
    tap_min: float = 0.85
    tap_max: float = 1.15
    tap_step: float = 0.0125
    v_ref: float = 1.0
    deadband: float = 0.01
    delay: float = 10.0


@dataclass(frozen=True)
class Oxl:
    """Over-excitation limiter: a continuous overload timer integrates the
    field-current excess; once it exceeds t_trip the discrete flag latches
    and the exciter tracks efd_cap instead of the AVR."""

    gen: str
    i_lim: float
    t_trip: float = 10.0
    t_reset: float = 200.0
    efd_cap: float = 1.8


@dataclass(frozen=True)
class Fault:
    line: str
    t_fault: float = 1.0


@dataclass(frozen=True)
class PlanSpec:
    t0: float = 5.0
    t1: float = 30.0
    t_end: float = 200.0
    h: float = 0.05
    delta0: float = 0.1
    delta_max: float = 1e4
    f_tol: float = 1e-6
    max_iters: int = 300


@dataclass(frozen=True)
class ComponentSet:
    generators: Tuple[Generator, ...] = ()
    exciters: Tuple[Exciter, ...] = ()
    governors: Tuple[Governor, ...] = ()
    erl_loads: Tuple[ErlLoad, ...] = ()
    ltcs: Tuple[Ltc, ...] = ()
    oxls: Tuple[Oxl, ...] = ()


@dataclass(frozen=True)
class Scenario:
    label: str
    network: Network
    components: ComponentSet
    fault: Optional[Fault] = None
    archetype: str = ""
    plan: PlanSpec = field(default_factory=PlanSpec)


# ---------------------------------------------------------------------------
# smooth device nonlinearities


def smooth_clamp(z, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return mid + half * np.tanh((z - mid) / half)


def smooth_clamp_deriv(z, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    u = np.tanh((z - mid) / half)
    return 1.0 - u * u


def smooth_clamp_inverse(target, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    u = (target - mid) / half
    if abs(u) >= 1.0:
        raise ValidationError(f"value {target} outside the open clamp range ({lo}, {hi})")
    return mid + half * np.arctanh(u)


def softplus(z):
    return np.logaddexp(0.0, SOFTPLUS_K * z) / SOFTPLUS_K


def softplus_deriv(z):
    kz = np.asarray(SOFTPLUS_K * z, dtype=float)
    out = np.empty_like(kz)
    pos = kz >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-kz[pos]))
    e = np.exp(kz[~pos])
    out[~pos] = e / (1.0 + e)
    return out


# ---------------------------------------------------------------------------
# validation


def validate_scenario(sc: Scenario):
    net, comp = sc.network, sc.components
    names = [b.name for b in net.buses]
    if len(set(names)) != len(names):
        raise ValidationError("duplicate bus names")
    bus_set = set(names)
    slacks = [b for b in net.buses if b.is_slack]
    if len(slacks) != 1:
        raise ValidationError("exactly one slack bus is required")
    if slacks[0].v_set is None or slacks[0].v_set <= 0:
        raise ValidationError("slack bus needs v_set > 0")
    for ln in net.lines:
        if ln.from_bus not in bus_set or ln.to_bus not in bus_set:
            raise ValidationError(f"line {ln.name} references an unknown bus")
        if not np.isfinite(ln.r) or not np.isfinite(ln.x) or (ln.r == 0 and ln.x == 0):
            raise ValidationError(f"line {ln.name} needs a finite nonzero impedance")
    line_names = [ln.name for ln in net.lines]
    if len(set(line_names)) != len(line_names):
        raise ValidationError("duplicate line names")
    gen_names = [g.name for g in comp.generators]
    if len(set(gen_names)) != len(gen_names):
        raise ValidationError("duplicate generator names")
    gen_buses = set()
    for g in comp.generators:
        if g.bus not in bus_set:
            raise ValidationError(f"generator {g.name} on unknown bus {g.bus}")
        if g.bus in gen_buses:
            raise ValidationError(f"more than one generator on bus {g.bus}")
        if next(b for b in net.buses if b.name == g.bus).is_slack:
            raise ValidationError("generators cannot sit on the slack bus")
        gen_buses.add(g.bus)
        for nm, val in (("h", g.h), ("td0p", g.td0p), ("tq0p", g.tq0p)):
            if val <= 0:
                raise ValidationError(f"generator {g.name}: {nm} must be > 0")
    gset = set(gen_names)
    for e in comp.exciters:
        if e.gen not in gset:
            raise ValidationError(f"exciter references unknown generator {e.gen}")
        if e.ta <= 0 or e.ka <= 0 or e.efd_max <= e.efd_min:
            raise ValidationError(f"exciter on {e.gen}: need ka, ta > 0 and efd_max > efd_min")
    for gv in comp.governors:
        if gv.gen not in gset:
            raise ValidationError(f"governor references unknown generator {gv.gen}")
        if gv.droop <= 0 or gv.tg <= 0:
            raise ValidationError(f"governor on {gv.gen}: droop and tg must be > 0")
    for ld in comp.erl_loads:
        if ld.bus not in bus_set:
            raise ValidationError(f"load {ld.name} on unknown bus {ld.bus}")
        if next(b for b in net.buses if b.name == ld.bus).is_slack:
            raise ValidationError(f"load {ld.name} cannot sit on the slack bus")
        if ld.tp <= 0 or ld.tq <= 0:
            raise ValidationError(f"load {ld.name}: time constants must be > 0")
    for lt in comp.ltcs:
        if lt.from_bus not in bus_set or lt.to_bus not in bus_set:
            raise ValidationError(f"ltc {lt.name} references an unknown bus")
        if lt.tap_step <= 0:
            raise ValidationError(f"ltc {lt.name}: tap step > 0 required")
        if lt.deadband <= 0:
            raise ValidationError(f"ltc {lt.name}: deadband > 0 required")
        if lt.delay < 0:
            raise ValidationError(f"ltc {lt.name}: delay >= 0 required")
        if not (lt.tap_min <= lt.tap0 <= lt.tap_max):
            raise ValidationError(f"ltc {lt.name}: tap0 outside [tap_min, tap_max]")
    for ox in comp.oxls:
        if ox.gen not in gset:
            raise ValidationError(f"oxl references unknown generator {ox.gen}")
        if ox.i_lim <= 0 or ox.t_trip <= 0 or ox.t_reset <= 0:
            raise ValidationError(f"oxl on {ox.gen}: i_lim, t_trip, t_reset must be > 0")
    if sc.fault is not None:
        if sc.fault.line not in set(line_names):
            raise ValidationError(f"fault references unknown line {sc.fault.line}")
        if not (0 <= sc.fault.t_fault < sc.plan.t0):
            raise ValidationError("fault time must satisfy 0 <= t_fault < t0")
    if not (0 <= sc.plan.t0 <= sc.plan.t1 <= sc.plan.t_end):
        raise ValidationError("plan needs 0 <= t0 <= t1 <= t_end")
    _check_connected(net, comp)


def _check_connected(net: Network, comp: ComponentSet):
    idx = {b.name: i for i, b in enumerate(net.buses)}
    nb = len(net.buses)
    adj = [[] for _ in range(nb)]
    branches = [(ln.from_bus, ln.to_bus) for ln in net.lines if ln.in_service]
    branches += [(lt.from_bus, lt.to_bus) for lt in comp.ltcs]
    for a, b in branches:
        adj[idx[a]].append(idx[b])
        adj[idx[b]].append(idx[a])
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != nb:
        raise ValidationError("network graph is not connected on in-service branches")


# ---------------------------------------------------------------------------
# variable layout


class Layout:
    """Index bookkeeping between devices and the stacked state vector."""

    def __init__(self, scenario: Scenario):
        net, comp = scenario.network, scenario.components
        self.bus_names = [b.name for b in net.buses]
        self.bus_idx = {b.name: i for i, b in enumerate(net.buses)}
        self.nb = len(net.buses)
        self.slack = next(i for i, b in enumerate(net.buses) if b.is_slack)
        self.ns = np.array([i for i in range(self.nb) if i != self.slack], dtype=int)
        self.nns = self.ns.size
        self.pos_in_ns = {int(b): k for k, b in enumerate(self.ns)}

        self.gens = list(comp.generators)
        self.ng = len(self.gens)
        self.gen_idx = {g.name: i for i, g in enumerate(self.gens)}
        self.gb = np.array([self.bus_idx[g.bus] for g in self.gens], dtype=int)

        exc_by_gen = {e.gen: e for e in comp.exciters}
        gov_by_gen = {g.gen: g for g in comp.governors}
        oxl_by_gen = {o.gen: o for o in comp.oxls}
        self.exciters = [exc_by_gen.get(g.name) for g in self.gens]
        self.governors = [gov_by_gen.get(g.name) for g in self.gens]
        self.oxls = [oxl_by_gen.get(g.name) for g in self.gens]
        self.erls = list(comp.erl_loads)
        self.lb = np.array([self.bus_idx[l.bus] for l in self.erls], dtype=int)
        self.ltcs = list(comp.ltcs)

        # z_c: governor Pm, then (zp, zq) per load, then OXL timers
        zc_names: List[str] = []
        self.pm_slot = np.full(self.ng, -1, dtype=int)
        for i, g in enumerate(self.gens):
            if self.governors[i] is not None:
                self.pm_slot[i] = len(zc_names)
                zc_names.append(f"pm:{g.name}")
        self.zp_slot = np.zeros(len(self.erls), dtype=int)
        self.zq_slot = np.zeros(len(self.erls), dtype=int)
        for j, ld in enumerate(self.erls):
            self.zp_slot[j] = len(zc_names)
            zc_names.append(f"zp:{ld.name}")
            self.zq_slot[j] = len(zc_names)
            zc_names.append(f"zq:{ld.name}")
        self.oxl_slot = np.full(self.ng, -1, dtype=int)
        for i, g in enumerate(self.gens):
            if self.oxls[i] is not None:
                self.oxl_slot[i] = len(zc_names)
                zc_names.append(f"oxl_timer:{g.name}")
        self.n_zc = len(zc_names)

        x_names: List[str] = []
        for g in self.gens:
            x_names += [f"delta:{g.name}", f"omega:{g.name}", f"eqp:{g.name}",
                        f"edp:{g.name}", f"efd:{g.name}"]
        self.n_x = len(x_names)

        y_names = [f"theta:{self.bus_names[i]}" for i in self.ns]
        y_names += [f"v:{self.bus_names[i]}" for i in self.ns]
        y_names += [f"id:{g.name}" for g in self.gens]
        y_names += [f"iq:{g.name}" for g in self.gens]
        self.n_y = len(y_names)
        self.theta_off = 0
        self.v_off = self.nns
        self.id_off = 2 * self.nns
        self.iq_off = 2 * self.nns + self.ng

        zd_names = [f"tap:{lt.name}" for lt in self.ltcs]
        self.oxl_flag_slot = np.full(self.ng, -1, dtype=int)
        for i, g in enumerate(self.gens):
            if self.oxls[i] is not None:
                self.oxl_flag_slot[i] = len(zd_names)
                zd_names.append(f"oxl_flag:{g.name}")
        self.n_zd = len(zd_names)

        g_row_names = [f"P:{self.bus_names[i]}" for i in self.ns]
        g_row_names += [f"Q:{self.bus_names[i]}" for i in self.ns]
        g_row_names += [f"stator_d:{g.name}" for g in self.gens]
        g_row_names += [f"stator_q:{g.name}" for g in self.gens]

        self.zc_names = tuple(zc_names)
        self.x_names = tuple(x_names)
        self.y_names = tuple(y_names)
        self.zd_names = tuple(zd_names)
        self.g_row_names = tuple(g_row_names)
        self.var_names = self.zc_names + self.x_names + self.y_names
        self.row_names = self.zc_names + self.x_names + self.g_row_names

    def bus_voltage(self, state: SystemState, bus_name: str, slack_v: float) -> float:
        i = self.bus_idx[bus_name]
        if i == self.slack:
            return slack_v
        return float(state.y[self.v_off + self.pos_in_ns[i]])


# ---------------------------------------------------------------------------
# assembled model pack


class ModelPack:
    """Scenario compiled to flat parameter arrays, callbacks, and an initial
    state. Immutable after construction; problems share its data."""

    def __init__(self, scenario: Scenario):
        validate_scenario(scenario)
        self.scenario = scenario
        self.layout = Layout(scenario)
        lay = self.layout
        self.lb = lay.lb
        net, comp = scenario.network, scenario.components

        self.slack_v = float(next(b for b in net.buses if b.is_slack).v_set)
        self.slack_theta = 0.0
        self.p_static = np.array([b.p_load for b in net.buses])
        self.q_static = np.array([b.q_load for b in net.buses])
        self.b_shunt = np.array([b.b_shunt for b in net.buses])

        gens = lay.gens
        self.ws = 2.0 * math.pi * 60.0
        self.H = np.array([g.h for g in gens])
        self.Dg = np.array([g.d for g in gens])
        self.Xd = np.array([g.xd for g in gens])
        self.Xdp = np.array([g.xdp for g in gens])
        self.Xq = np.array([g.xq for g in gens])
        self.Xqp = np.array([g.xqp for g in gens])
        self.Td0p = np.array([g.td0p for g in gens])
        self.Tq0p = np.array([g.tq0p for g in gens])

        self.has_exc = np.array([e is not None for e in lay.exciters])
        self.Ka = np.array([e.ka if e else 0.0 for e in lay.exciters])
        self.Ta = np.array([e.ta if e else 1.0 for e in lay.exciters])
        self.efd_lo = np.array([e.efd_min if e else 0.0 for e in lay.exciters])
        self.efd_hi = np.array([e.efd_max if e else 1.0 for e in lay.exciters])

        self.has_gov = lay.pm_slot >= 0
        self.Rd = np.array([gv.droop if gv else 1.0 for gv in lay.governors])
        self.Tg = np.array([gv.tg if gv else 1.0 for gv in lay.governors])

        self.has_oxl = lay.oxl_slot >= 0
        self.Ilim = np.array([o.i_lim if o else 0.0 for o in lay.oxls])
        self.Ttrip = np.array([o.t_trip if o else 1.0 for o in lay.oxls])
        self.Treset = np.array([o.t_reset if o else 1.0 for o in lay.oxls])
        self.EfdCap = np.array([o.efd_cap if o else 0.0 for o in lay.oxls])

        erls = lay.erls
        self.Lp0 = np.array([l.p0 for l in erls])
        self.Lq0 = np.array([l.q0 for l in erls])
        self.Tp = np.array([l.tp for l in erls])
        self.Tq = np.array([l.tq for l in erls])
        self.a_s = np.array([l.alpha_s for l in erls])
        self.a_t = np.array([l.alpha_t for l in erls])
        self.b_s = np.array([l.beta_s for l in erls])
        self.b_t = np.array([l.beta_t for l in erls])

        # constant part of the bus admittance matrix (lines + shunts), with
        # and without the fault line; LTC branches are stamped per evaluation
        self.ybase_pre = self._ybase(tripped=None)
        tripped = scenario.fault.line if scenario.fault else None
        self.ybase_post = self._ybase(tripped=tripped)

        self.ltc_from = np.array([lay.bus_idx[lt.from_bus] for lt in lay.ltcs], dtype=int)
        self.ltc_to = np.array([lay.bus_idx[lt.to_bus] for lt in lay.ltcs], dtype=int)
        self.ltc_y = np.array([1.0 / complex(lt.r, lt.x) for lt in lay.ltcs])

        taus = [1.0]
        taus += [gv.tg for gv in comp.governors]
        taus += [l.tp for l in erls] + [l.tq for l in erls]
        taus += [o.t_reset for o in comp.oxls]
        taus += [g.td0p for g in gens] + [g.tq0p for g in gens]
        taus += [e.ta for e in comp.exciters]
        self.epsilon = 1.0 / max(taus)

        self._initialize()

    # -- network ------------------------------------------------------------

    def _ybase(self, tripped: Optional[str]) -> np.ndarray:
        lay = self.layout
        y = np.zeros((lay.nb, lay.nb), dtype=complex)
        for ln in self.scenario.network.lines:
            if not ln.in_service or ln.name == tripped:
                continue
            i, j = lay.bus_idx[ln.from_bus], lay.bus_idx[ln.to_bus]
            ys = 1.0 / complex(ln.r, ln.x)
            y[i, i] += ys
            y[j, j] += ys
            y[i, j] -= ys
            y[j, i] -= ys
        y[np.arange(lay.nb), np.arange(lay.nb)] += 1j * self.b_shunt
        return y

    def ybus(self, z_d: np.ndarray, post_fault: bool) -> np.ndarray:
        y = (self.ybase_post if post_fault else self.ybase_pre).copy()
        for k in range(len(self.layout.ltcs)):
            m = z_d[k]
            ys = self.ltc_y[k]
            i, j = self.ltc_from[k], self.ltc_to[k]
            y[i, i] += m * m * ys
            y[i, j] -= m * ys
            y[j, i] -= m * ys
            y[j, j] += ys
        return y

    def _grid(self, y: np.ndarray):
        lay = self.layout
        theta = np.full(lay.nb, self.slack_theta)
        volt = np.full(lay.nb, self.slack_v)
        theta[lay.ns] = y[lay.theta_off:lay.theta_off + lay.nns]
        volt[lay.ns] = y[lay.v_off:lay.v_off + lay.nns]
        return theta, volt

    # -- power flow and initialization ---------------------------------------

    def _initialize(self):
        lay = self.layout
        nb = lay.nb
        taps0 = np.array([lt.tap0 for lt in lay.ltcs])
        z_d0 = np.zeros(lay.n_zd)
        z_d0[:len(lay.ltcs)] = taps0
        ybus = self.ybus(z_d0, post_fault=False)

        p_spec = -self.p_static.copy()
        q_spec = -self.q_static.copy()
        np.add.at(p_spec, self.lb, -self.Lp0)
        np.add.at(q_spec, self.lb, -self.Lq0)
        for i, g in enumerate(lay.gens):
            p_spec[lay.gb[i]] += g.p_set

        theta = np.full(nb, self.slack_theta)
        volt = np.ones(nb)
        volt[lay.slack] = self.slack_v
        pv = set(int(b) for b in lay.gb)
        for i, g in enumerate(lay.gens):
            volt[lay.gb[i]] = g.v_set
        pq = np.array([i for i in range(nb) if i != lay.slack and i not in pv], dtype=int)
        ns = lay.ns

        for it in range(40):
            e = volt * np.exp(1j * theta)
            s = e * np.conj(ybus @ e)
            dp = p_spec[ns] - s.real[ns]
            dq = q_spec[pq] - s.imag[pq] if pq.size else np.zeros(0)
            mism = np.concatenate([dp, dq])
            if mism.size == 0 or np.max(np.abs(mism)) < 1e-11:
                break
            ds_dth, ds_dv = _ds_dv(ybus, e, volt)
            j11 = ds_dth.real[np.ix_(ns, ns)]
            j12 = ds_dv.real[np.ix_(ns, pq)] if pq.size else np.zeros((ns.size, 0))
            j21 = ds_dth.imag[np.ix_(pq, ns)] if pq.size else np.zeros((0, ns.size))
            j22 = ds_dv.imag[np.ix_(pq, pq)] if pq.size else np.zeros((0, 0))
            jac = np.block([[j11, j12], [j21, j22]])
            try:
                upd = solve_linear(jac, mism)
            except Exception as exc:
                raise PowerFlowNoConvergence(f"power flow Jacobian failed: {exc}") from exc
            theta[ns] += upd[:ns.size]
            if pq.size:
                volt[pq] += upd[ns.size:]
        else:
            raise PowerFlowNoConvergence(
                f"power flow did not converge (mismatch {np.max(np.abs(mism)):.3e})"
            )

        e = volt * np.exp(1j * theta)
        s_bus = e * np.conj(ybus @ e)

        # machine initialization from the solved flow
        delta0 = np.zeros(lay.ng)
        w0 = np.zeros(lay.ng)
        eqp0 = np.zeros(lay.ng)
        edp0 = np.zeros(lay.ng)
        efd0 = np.zeros(lay.ng)
        id0 = np.zeros(lay.ng)
        iq0 = np.zeros(lay.ng)
        self.Vref = np.zeros(lay.ng)
        self.EfdSet = np.zeros(lay.ng)
        self.Pref = np.zeros(lay.ng)
        self.PmFixed = np.zeros(lay.ng)
        for i, g in enumerate(lay.gens):
            b = lay.gb[i]
            q_gen = s_bus.imag[b] + self.q_static[b] + float(np.sum(self.Lq0[self.lb == b]))
            s_g = complex(g.p_set, q_gen)
            v_ph = e[b]
            i_ph = np.conj(s_g / v_ph)
            e_q = v_ph + 1j * self.Xq[i] * i_ph
            delta0[i] = np.angle(e_q)
            rot = np.exp(-1j * (delta0[i] - 0.5 * math.pi))
            vdq = v_ph * rot
            idq = i_ph * rot
            vd, vq = vdq.real, vdq.imag
            id0[i], iq0[i] = idq.real, idq.imag
            eqp0[i] = vq + self.Xdp[i] * id0[i]
            edp0[i] = vd - self.Xqp[i] * iq0[i]
            efd0[i] = eqp0[i] + (self.Xd[i] - self.Xdp[i]) * id0[i]
            if self.has_exc[i]:
                z = smooth_clamp_inverse(efd0[i], self.efd_lo[i], self.efd_hi[i])
                self.Vref[i] = volt[b] + z / self.Ka[i]
            else:
                self.EfdSet[i] = efd0[i]
            pm = (vd * id0[i] + vq * iq0[i])
            self.Pref[i] = pm
            self.PmFixed[i] = pm

        self.ErlV0 = volt[self.lb].copy() if self.lb.size else np.zeros(0)

        z_c0 = np.zeros(lay.n_zc)
        for i in range(lay.ng):
            if lay.pm_slot[i] >= 0:
                z_c0[lay.pm_slot[i]] = self.PmFixed[i]
            if lay.oxl_slot[i] >= 0:
                i_f = eqp0[i] + (self.Xd[i] - self.Xdp[i]) * id0[i]
                z_c0[lay.oxl_slot[i]] = self.Treset[i] * softplus(i_f - self.Ilim[i])
        x0 = np.zeros(lay.n_x)
        if lay.ng:
            xm = x0.reshape(lay.ng, 5)
            xm[:, 0] = delta0
            xm[:, 1] = w0
            xm[:, 2] = eqp0
            xm[:, 3] = edp0
            xm[:, 4] = efd0
        y0 = np.zeros(lay.n_y)
        y0[lay.theta_off:lay.theta_off + lay.nns] = theta[lay.ns]
        y0[lay.v_off:lay.v_off + lay.nns] = volt[lay.ns]
        y0[lay.id_off:lay.id_off + lay.ng] = id0
        y0[lay.iq_off:lay.iq_off + lay.ng] = iq0
        self.state0 = make_state(0.0, z_c0, z_d0, x0, y0)
        self.flow_voltage = volt.copy()
        self.flow_theta = theta.copy()

    # -- shared evaluation pieces --------------------------------------------

    def _machine(self, x: np.ndarray, y: np.ndarray, theta, volt):
        lay = self.layout
        xm = x.reshape(lay.ng, 5) if lay.ng else np.zeros((0, 5))
        delta, w, eqp, edp, efd = (xm[:, k] for k in range(5))
        i_d = y[lay.id_off:lay.id_off + lay.ng]
        i_q = y[lay.iq_off:lay.iq_off + lay.ng]
        dth = delta - theta[lay.gb]
        sin_d, cos_d = np.sin(dth), np.cos(dth)
        vt = volt[lay.gb]
        vd = vt * sin_d
        vq = vt * cos_d
        return delta, w, eqp, edp, efd, i_d, i_q, vd, vq, sin_d, cos_d, vt

    def _pm(self, z_c, w):
        pm = self.PmFixed.copy()
        gov = self.has_gov
        pm[gov] = z_c[self.layout.pm_slot[gov]]
        return pm

    def _erl_terms(self, volt):
        if not self.lb.size:
            z = np.zeros(0)
            return z, z, z, z
        vr = volt[self.lb] / self.ErlV0
        ps = self.Lp0 * vr ** self.a_s
        pt = self.Lp0 * vr ** self.a_t
        qs = self.Lq0 * vr ** self.b_s
        qt = self.Lq0 * vr ** self.b_t
        return ps, pt, qs, qt

    def _erl_derivs(self, volt):
        if not self.lb.size:
            z = np.zeros(0)
            return z, z, z, z
        v0 = self.ErlV0
        vr = volt[self.lb] / v0
        dps = self.Lp0 * self.a_s / v0 * vr ** (self.a_s - 1.0)
        dpt = self.Lp0 * self.a_t / v0 * vr ** (self.a_t - 1.0)
        dqs = self.Lq0 * self.b_s / v0 * vr ** (self.b_s - 1.0)
        dqt = self.Lq0 * self.b_t / v0 * vr ** (self.b_t - 1.0)
        return dps, dpt, dqs, dqt

    def _avr_cmd(self, volt, z_d):
        lay = self.layout
        demand = self.EfdSet.copy()
        if np.any(self.has_exc):
            exc = self.has_exc
            raw = self.Ka[exc] * (self.Vref[exc] - volt[lay.gb[exc]])
            demand[exc] = smooth_clamp(raw, self.efd_lo[exc], self.efd_hi[exc])
        u = np.zeros(lay.ng)
        ox = self.has_oxl
        if np.any(ox):
            u[ox] = z_d[lay.oxl_flag_slot[ox]]
        return (1.0 - u) * demand + u * self.EfdCap, u

    # -- residual callbacks ---------------------------------------------------

    def make_callbacks(self, post_fault: bool):
        lay = self.layout

        def eval_hc(z_c, z_d, x, y):
            theta, volt = self._grid(y)
            out = np.zeros(lay.n_zc)
            if lay.ng:
                _, w, eqp, _, _, i_d, _, _, _, _, _, _ = self._machine(x, y, theta, volt)
                gov = self.has_gov
                if np.any(gov):
                    pm = z_c[lay.pm_slot[gov]]
                    out[lay.pm_slot[gov]] = (
                        self.Pref[gov] - pm - w[gov] / self.Rd[gov]
                    ) / self.Tg[gov]
                ox = self.has_oxl
                if np.any(ox):
                    i_f = eqp[ox] + (self.Xd[ox] - self.Xdp[ox]) * i_d[ox]
                    tau = z_c[lay.oxl_slot[ox]]
                    out[lay.oxl_slot[ox]] = (
                        softplus(i_f - self.Ilim[ox]) - tau / self.Treset[ox]
                    )
            if self.lb.size:
                ps, pt, qs, qt = self._erl_terms(volt)
                out[lay.zp_slot] = -z_c[lay.zp_slot] / self.Tp + ps - pt
                out[lay.zq_slot] = -z_c[lay.zq_slot] / self.Tq + qs - qt
            return out

        def eval_f(z_c, z_d, x, y):
            if not lay.ng:
                return np.zeros(0)
            theta, volt = self._grid(y)
            _, w, eqp, edp, efd, i_d, i_q, vd, vq, _, _, _ = self._machine(x, y, theta, volt)
            pe = vd * i_d + vq * i_q
            pm = self._pm(z_c, w)
            cmd, _ = self._avr_cmd(volt, z_d)
            out = np.zeros((lay.ng, 5))
            out[:, 0] = self.ws * w
            out[:, 1] = (pm - pe - self.Dg * w) / (2.0 * self.H)
            out[:, 2] = (-eqp - (self.Xd - self.Xdp) * i_d + efd) / self.Td0p
            out[:, 3] = (-edp + (self.Xq - self.Xqp) * i_q) / self.Tq0p
            out[:, 4] = (cmd - efd) / self.Ta
            return out.reshape(-1)

        def eval_g(z_c, z_d, x, y):
            theta, volt = self._grid(y)
            ybus = self.ybus(z_d, post_fault)
            e = volt * np.exp(1j * theta)
            s = e * np.conj(ybus @ e)
            p_inj = np.zeros(lay.nb)
            q_inj = np.zeros(lay.nb)
            if lay.ng:
                _, _, eqp, edp, _, i_d, i_q, vd, vq, _, _, _ = self._machine(x, y, theta, volt)
                np.add.at(p_inj, lay.gb, vd * i_d + vq * i_q)
                np.add.at(q_inj, lay.gb, vq * i_d - vd * i_q)
            p_load = self.p_static.copy()
            q_load = self.q_static.copy()
            if self.lb.size:
                _, pt, _, qt = self._erl_terms(volt)
                np.add.at(p_load, self.lb, z_c[lay.zp_slot] / self.Tp + pt)
                np.add.at(q_load, self.lb, z_c[lay.zq_slot] / self.Tq + qt)
            g_p = (p_inj - p_load - s.real)[lay.ns]
            g_q = (q_inj - q_load - s.imag)[lay.ns]
            if lay.ng:
                g_d = edp + self.Xqp * i_q - vd
                g_q2 = eqp - self.Xdp * i_d - vq
            else:
                g_d = np.zeros(0)
                g_q2 = np.zeros(0)
            return np.concatenate([g_p, g_q, g_d, g_q2])

        def jacobian(z_c, z_d, x, y):
            return self._jacobian(z_c, z_d, x, y, post_fault)

        def eval_hd(state: SystemState) -> np.ndarray:
            """Memoryless core of the discrete rule: saturating single-step
            device moves for every device whose trigger condition holds."""
            theta, volt = self._grid(state.y)
            z_d = state.z_d.copy()
            for k, lt in enumerate(lay.ltcs):
                v = volt[lay.bus_idx[lt.to_bus]]
                tap = z_d[k]
                if v < lt.v_ref - lt.deadband and tap + lt.tap_step <= lt.tap_max + 1e-12:
                    z_d[k] = tap + lt.tap_step
                elif v > lt.v_ref + lt.deadband and tap - lt.tap_step >= lt.tap_min - 1e-12:
                    z_d[k] = tap - lt.tap_step
            for i in range(lay.ng):
                slot = lay.oxl_flag_slot[i]
                if slot >= 0 and z_d[slot] == 0.0:
                    if state.z_c[lay.oxl_slot[i]] >= self.Ttrip[i]:
                        z_d[slot] = 1.0
            return z_d

        return eval_hc, eval_f, eval_g, jacobian, eval_hd

    # -- analytic block Jacobian ----------------------------------------------

    def _jacobian(self, z_c, z_d, x, y, post_fault: bool) -> np.ndarray:
        lay = self.layout
        p, m, n = lay.n_zc, lay.n_x, lay.n_y
        ntot = p + m + n
        jac = np.zeros((ntot, ntot))
        theta, volt = self._grid(y)

        czc = 0
        cx = p
        cy = p + m
        cth = cy + lay.theta_off
        cv = cy + lay.v_off
        cid = cy + lay.id_off
        ciq = cy + lay.iq_off
        g0 = p + m
        rowP = g0
        rowQ = g0 + lay.nns
        rowSD = g0 + 2 * lay.nns
        rowSQ = rowSD + lay.ng

        if lay.ng:
            (delta, w, eqp, edp, efd, i_d, i_q, vd, vq,
             sin_d, cos_d, vt) = self._machine(x, y, theta, volt)
            dpe_ddelta = vq * i_d - vd * i_q
            dpe_dv = sin_d * i_d + cos_d * i_q
            dqe_ddelta = -(vd * i_d + vq * i_q)
            dqe_dv = cos_d * i_d - sin_d * i_q

        # h_c rows
        for i in range(lay.ng):
            slot = lay.pm_slot[i]
            if slot >= 0:
                jac[slot, czc + slot] = -1.0 / self.Tg[i]
                jac[slot, cx + 5 * i + 1] = -1.0 / (self.Rd[i] * self.Tg[i])
            oslot = lay.oxl_slot[i]
            if oslot >= 0:
                i_f = eqp[i] + (self.Xd[i] - self.Xdp[i]) * i_d[i]
                sig = softplus_deriv(i_f - self.Ilim[i])
                jac[oslot, czc + oslot] = -1.0 / self.Treset[i]
                jac[oslot, cx + 5 * i + 2] = sig
                jac[oslot, cid + i] = sig * (self.Xd[i] - self.Xdp[i])
        if self.lb.size:
            dps, dpt, dqs, dqt = self._erl_derivs(volt)
            for j in range(self.lb.size):
                b = self.lb[j]
                zp_r, zq_r = lay.zp_slot[j], lay.zq_slot[j]
                jac[zp_r, czc + zp_r] = -1.0 / self.Tp[j]
                jac[zq_r, czc + zq_r] = -1.0 / self.Tq[j]
                col_v = cv + lay.pos_in_ns[int(b)]
                jac[zp_r, col_v] += dps[j] - dpt[j]
                jac[zq_r, col_v] += dqs[j] - dqt[j]

        # f rows
        if lay.ng:
            cmd, u = self._avr_cmd(volt, z_d)
            for i in range(lay.ng):
                b = int(lay.gb[i])
                col_th = cth + lay.pos_in_ns[b] if b != lay.slack else None
                col_v = cv + lay.pos_in_ns[b] if b != lay.slack else None
                r = cx + 5 * i
                two_h = 2.0 * self.H[i]
                jac[r, cx + 5 * i + 1] = self.ws
                # swing row
                rw = r + 1
                if lay.pm_slot[i] >= 0:
                    jac[rw, czc + lay.pm_slot[i]] = 1.0 / two_h
                jac[rw, cx + 5 * i + 1] = -self.Dg[i] / two_h
                jac[rw, cx + 5 * i] = -dpe_ddelta[i] / two_h
                if col_th is not None:
                    jac[rw, col_th] = dpe_ddelta[i] / two_h
                if col_v is not None:
                    jac[rw, col_v] = -dpe_dv[i] / two_h
                jac[rw, cid + i] = -vd[i] / two_h
                jac[rw, ciq + i] = -vq[i] / two_h
                # Eq' row
                rq = r + 2
                jac[rq, cx + 5 * i + 2] = -1.0 / self.Td0p[i]
                jac[rq, cx + 5 * i + 4] = 1.0 / self.Td0p[i]
                jac[rq, cid + i] = -(self.Xd[i] - self.Xdp[i]) / self.Td0p[i]
                # Ed' row
                rd = r + 3
                jac[rd, cx + 5 * i + 3] = -1.0 / self.Tq0p[i]
                jac[rd, ciq + i] = (self.Xq[i] - self.Xqp[i]) / self.Tq0p[i]
                # field row
                rf = r + 4
                jac[rf, cx + 5 * i + 4] = -1.0 / self.Ta[i]
                if self.has_exc[i] and col_v is not None:
                    raw = self.Ka[i] * (self.Vref[i] - volt[b])
                    dcmd = (1.0 - u[i]) * smooth_clamp_deriv(
                        raw, self.efd_lo[i], self.efd_hi[i]) * (-self.Ka[i])
                    jac[rf, col_v] += dcmd / self.Ta[i]

        # g rows: network part
        ybus = self.ybus(z_d, post_fault)
        e = volt * np.exp(1j * theta)
        ds_dth, ds_dv = _ds_dv(ybus, e, volt)
        sel = np.ix_(lay.ns, lay.ns)
        jac[rowP:rowP + lay.nns, cth:cth + lay.nns] = -ds_dth.real[sel]
        jac[rowP:rowP + lay.nns, cv:cv + lay.nns] = -ds_dv.real[sel]
        jac[rowQ:rowQ + lay.nns, cth:cth + lay.nns] = -ds_dth.imag[sel]
        jac[rowQ:rowQ + lay.nns, cv:cv + lay.nns] = -ds_dv.imag[sel]

        # g rows: load sensitivities
        if self.lb.size:
            dps, dpt, dqs, dqt = self._erl_derivs(volt)
            for j in range(self.lb.size):
                b = int(self.lb[j])
                k = lay.pos_in_ns[b]
                jac[rowP + k, czc + lay.zp_slot[j]] -= 1.0 / self.Tp[j]
                jac[rowQ + k, czc + lay.zq_slot[j]] -= 1.0 / self.Tq[j]
                jac[rowP + k, cv + k] -= dpt[j]
                jac[rowQ + k, cv + k] -= dqt[j]

        # g rows: machine injections and stator equations
        for i in range(lay.ng):
            b = int(lay.gb[i])
            k = lay.pos_in_ns[b]
            rp, rq = rowP + k, rowQ + k
            jac[rp, cx + 5 * i] += dpe_ddelta[i]
            jac[rp, cth + k] += -dpe_ddelta[i]
            jac[rp, cv + k] += dpe_dv[i]
            jac[rp, cid + i] += vd[i]
            jac[rp, ciq + i] += vq[i]
            jac[rq, cx + 5 * i] += dqe_ddelta[i]
            jac[rq, cth + k] += -dqe_ddelta[i]
            jac[rq, cv + k] += dqe_dv[i]
            jac[rq, cid + i] += vq[i]
            jac[rq, ciq + i] += -vd[i]
            rd, rq2 = rowSD + i, rowSQ + i
            jac[rd, cx + 5 * i + 3] = 1.0
            jac[rd, ciq + i] = self.Xqp[i]
            jac[rd, cv + k] = -sin_d[i]
            jac[rd, cx + 5 * i] = -vq[i]
            jac[rd, cth + k] = vq[i]
            jac[rq2, cx + 5 * i + 2] = 1.0
            jac[rq2, cid + i] = -self.Xdp[i]
            jac[rq2, cv + k] = -cos_d[i]
            jac[rq2, cx + 5 * i] = vd[i]
            jac[rq2, cth + k] = -vd[i]
        return jac

    # -- public products -------------------------------------------------------

    def problem(self, kind: ModelKind, post_fault: bool = False) -> DaeProblem:
        hc, f, g, jac, hd = self.make_callbacks(post_fault)
        lay = self.layout
        return DaeProblem(
            n_zc=lay.n_zc,
            n_x=lay.n_x,
            n_y=lay.n_y,
            model_kind=kind,
            eval_hc=hc,
            eval_f=f,
            eval_g=g,
            eval_hd=hd,
            epsilon=self.epsilon,
            jacobian=jac,
            var_names=lay.var_names,
            layout=lay,
        )

    def initial_state(self) -> SystemState:
        return self.state0


def build_pack(scenario: Scenario) -> ModelPack:
    return ModelPack(scenario)


def build_problem(scenario: Scenario, kind: ModelKind,
                  post_fault: bool = False) -> tuple[DaeProblem, SystemState]:
    """Assemble a DAE problem for the scenario. The returned state solves the
    pre-fault power flow regardless of the post_fault flag."""
    pack = ModelPack(scenario)
    return pack.problem(kind, post_fault=post_fault), pack.initial_state()


def _ds_dv(ybus: np.ndarray, e: np.ndarray, volt: np.ndarray):
    """Partial derivatives of complex bus injections S = diag(E) conj(Y E)
    with respect to bus angles and voltage magnitudes."""
    ibus = ybus @ e
    diag_e = np.diag(e)
    diag_i = np.diag(ibus)
    diag_norm = np.diag(e / volt)
    ds_dth = 1j * diag_e @ np.conj(diag_i - ybus @ diag_e)
    ds_dv = diag_e @ np.conj(ybus @ diag_norm) + np.conj(diag_i) @ diag_norm
    return ds_dth, ds_dv


# ---------------------------------------------------------------------------
# event rules


def ltc_rule(ltc: Ltc, pack: ModelPack) -> EventRule:
    """Deadband-timer tap rule: after `delay` seconds outside the band the
    tap moves one step toward restoring the controlled voltage, saturating
    at the range limits."""
    lay = pack.layout
    lo = ltc.v_ref - ltc.deadband
    hi = ltc.v_ref + ltc.deadband
    slot = lay.ltcs.index(ltc)

    def condition(state: SystemState) -> bool:
        v = lay.bus_voltage(state, ltc.to_bus, pack.slack_v)
        return v < lo or v > hi

    def transition(state: SystemState) -> Optional[float]:
        v = lay.bus_voltage(state, ltc.to_bus, pack.slack_v)
        tap = float(state.z_d[slot])
        if v < lo:
            new = tap + ltc.tap_step
            return new if new <= ltc.tap_max + 1e-12 else None
        if v > hi:
            new = tap - ltc.tap_step
            return new if new >= ltc.tap_min - 1e-12 else None
        return None

    return EventRule(
        device_id=f"ltc:{ltc.name}",
        zd_index=slot,
        delay=ltc.delay,
        condition=condition,
        transition=transition,
    )


def oxl_rule(gen_name: str, pack: ModelPack) -> EventRule:
    """Latching limiter rule: fires once the continuous overload timer in z_c
    crosses the trip threshold; the flag never resets."""
    lay = pack.layout
    gi = lay.gen_idx[gen_name]
    timer_slot = int(lay.oxl_slot[gi])
    flag_slot = int(lay.oxl_flag_slot[gi])
    trip = pack.Ttrip[gi]

    def condition(state: SystemState) -> bool:
        return state.z_d[flag_slot] == 0.0 and state.z_c[timer_slot] >= trip

    def transition(state: SystemState) -> Optional[float]:
        return 1.0 if state.z_d[flag_slot] == 0.0 else None

    return EventRule(
        device_id=f"oxl:{gen_name}",
        zd_index=flag_slot,
        delay=0.0,
        condition=condition,
        transition=transition,
    )


def event_rules(pack: ModelPack) -> List[EventRule]:
    """Fresh per-run rules for every discrete device, ordered by device id."""
    rules = [ltc_rule(lt, pack) for lt in pack.layout.ltcs]
    for i, g in enumerate(pack.layout.gens):
        if pack.layout.oxl_slot[i] >= 0:
            rules.append(oxl_rule(g.name, pack))
    rules.sort(key=lambda r: r.device_id)
    return rules


# ---------------------------------------------------------------------------
# bundled scenarios
#
# Common 4-bus spine: external grid (slack) -- double circuit -- generator
# bus -- tie line -- transmission bus -- LTC -- recovery-load bus. The fault
# trips one circuit of the double line. Parameters are tuned per archetype.


def _base_network(line_x: float = 0.15) -> Network:
    buses = (
        Bus("grid", is_slack=True, v_set=1.04),
        Bus("gen1", p_load=0.0),
        Bus("hub", p_load=0.10, q_load=0.02),
        Bus("load", p_load=0.0),
    )
    lines = (
        Line("circ-a", "grid", "gen1", 0.01, line_x),
        Line("circ-b", "grid", "gen1", 0.01, line_x),
        Line("tie", "gen1", "hub", 0.005, 0.08),
    )
    return Network(buses=buses, lines=lines)


def _gen(p_set: float, v_set: float) -> Generator:
    return Generator(
        name="G1", bus="gen1", h=3.5, d=2.0,
        xd=1.8, xdp=0.3, xq=1.7, xqp=0.55,
        td0p=6.0, tq0p=0.8, p_set=p_set, v_set=v_set,
    )


def scenario_stable() -> Scenario:
    """Post-fault system settles: recovery load and a couple of tap steps
    bring the voltage back inside the band while the limiter stays quiet."""
    comp = ComponentSet(
        generators=(_gen(p_set=0.7, v_set=1.02),),
        exciters=(Exciter("G1", ka=60.0, ta=0.2, efd_min=0.0, efd_max=4.0),),
        governors=(Governor("G1", droop=0.05, tg=4.0),),
        erl_loads=(ErlLoad("erl1", "load", p0=0.55, q0=0.12, tp=20.0, tq=20.0),),
        ltcs=(Ltc("T34", "hub", "load", r=0.0, x=0.1, tap0=1.0,
                  v_ref=1.0, deadband=0.01, delay=8.0),),
        oxls=(Oxl("G1", i_lim=2.6, t_trip=10.0, t_reset=100.0, efd_cap=2.0),),
    )
    return Scenario(
        label="stable",
        network=_base_network(),
        components=comp,
        fault=Fault(line="circ-a", t_fault=1.0),
        archetype="stable",
        plan=PlanSpec(t_end=200.0),
    )


def scenario_qss_difficulty() -> Scenario:
    """The equilibrium-constrained model grazes a fold of its fast manifold
    while the load recovers, breaking the fixed-step corrector mid-run; the
    full model rides through and settles."""
    comp = ComponentSet(
        generators=(_gen(p_set=0.9, v_set=1.02),),
        exciters=(Exciter("G1", ka=60.0, ta=0.2, efd_min=0.0, efd_max=2.6),),
        governors=(Governor("G1", droop=0.05, tg=4.0),),
        erl_loads=(ErlLoad("erl1", "load", p0=0.85, q0=0.22, tp=15.0, tq=15.0),),
        ltcs=(Ltc("T34", "hub", "load", r=0.0, x=0.1, tap0=1.0,
                  v_ref=1.0, deadband=0.02, delay=25.0),),
        oxls=(Oxl("G1", i_lim=3.2, t_trip=15.0, t_reset=100.0, efd_cap=2.2),),
    )
    return Scenario(
        label="qss-difficulty",
        network=_base_network(),
        components=comp,
        fault=Fault(line="circ-a", t_fault=1.0),
        archetype="qss-difficulty",
        plan=PlanSpec(t_end=200.0, max_iters=400),
    )


def scenario_unstable() -> Scenario:
    """Field limiting plus load recovery leave no reachable equilibrium:
    the integrator fails mid-run and the continuation solver exhausts its
    iteration bound."""
    comp = ComponentSet(
        generators=(_gen(p_set=1.0, v_set=1.02),),
        exciters=(Exciter("G1", ka=60.0, ta=0.2, efd_min=0.0, efd_max=3.4),),
        governors=(Governor("G1", droop=0.05, tg=4.0),),
        erl_loads=(ErlLoad("erl1", "load", p0=1.0, q0=0.25, tp=12.0, tq=12.0),),
        ltcs=(Ltc("T34", "hub", "load", r=0.0, x=0.1, tap0=1.0,
                  v_ref=1.0, deadband=0.02, delay=8.0),),
        oxls=(Oxl("G1", i_lim=2.2, t_trip=8.0, t_reset=100.0, efd_cap=1.7),),
    )
    return Scenario(
        label="unstable",
        network=_base_network(),
        components=comp,
        fault=Fault(line="circ-a", t_fault=1.0),
        archetype="unstable",
        plan=PlanSpec(t_end=200.0, max_iters=250),
    )


BUNDLED = {
    "stable": scenario_stable,
    "qss-difficulty": scenario_qss_difficulty,
    "unstable": scenario_unstable,
}
