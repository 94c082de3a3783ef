"""Command-line front end: scenario files, runs, trajectory CSV, reports.

Scenario files are plain text with bracketed sections holding whitespace
tables (buses, lines, generators, exciters, governors, loads, ltcs, oxls)
and key=value sections (meta, fault, plan). Unknown sections or malformed
rows are rejected with the offending line number.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import List, Optional

from .dae import ModelKind
from .hybrid import Method, RunPlan, RunResult, RunStatus, plan_for, run_scenario
from .models import (
    Bus,
    ComponentSet,
    ErlLoad,
    Exciter,
    Fault,
    Generator,
    Governor,
    Line,
    Ltc,
    Network,
    Oxl,
    PlanSpec,
    Scenario,
    ValidationError,
    validate_scenario,
)


class ParseError(Exception):
    """Malformed scenario file; the message carries the line number."""


_SECTIONS = ("meta", "buses", "lines", "generators", "exciters", "governors",
             "loads", "ltcs", "oxls", "fault", "plan")

_TABLE_COLUMNS = {
    "buses": ("name", "slack", "v_set", "p_load", "q_load", "b_shunt"),
    "lines": ("name", "from", "to", "r", "x", "status"),
    "generators": ("name", "bus", "h", "d", "xd", "xdp", "xq", "xqp",
                   "td0p", "tq0p", "p_set", "v_set"),
    "exciters": ("gen", "ka", "ta", "efd_min", "efd_max"),
    "governors": ("gen", "droop", "tg"),
    "loads": ("name", "bus", "p0", "q0", "tp", "tq",
              "alpha_s", "alpha_t", "beta_s", "beta_t"),
    "ltcs": ("name", "from", "to", "r", "x", "tap0", "tap_min", "tap_max",
             "tap_step", "v_ref", "deadband", "delay"),
    "oxls": ("gen", "i_lim", "t_trip", "t_reset", "efd_cap"),
}

_KEY_SECTIONS = {
    "meta": ("label", "archetype"),
    "fault": ("line", "t_fault"),
    "plan": ("t0", "t1", "t_end", "h", "delta0", "delta_max", "f_tol", "max_iters"),
}


def _float(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"line {lineno}: expected a number, got {tok!r}") from None


def parse_scenario(path) -> Scenario:
    """Parse and validate a scenario file."""
    text = Path(path).read_text()
    rows = {name: [] for name in _TABLE_COLUMNS}
    keys = {name: {} for name in _KEY_SECTIONS}
    section = None
    any_content = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        any_content = True
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ParseError(f"line {lineno}: unknown section [{section}]")
            continue
        if section is None:
            raise ParseError(f"line {lineno}: content before any section header")
        if section in _KEY_SECTIONS:
            if "=" not in line:
                raise ParseError(f"line {lineno}: expected key=value in [{section}]")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _KEY_SECTIONS[section]:
                raise ParseError(f"line {lineno}: unknown key {key!r} in [{section}]")
            keys[section][key] = (value, lineno)
        else:
            toks = line.split()
            cols = _TABLE_COLUMNS[section]
            if len(toks) != len(cols):
                raise ParseError(
                    f"line {lineno}: [{section}] row needs {len(cols)} fields "
                    f"({' '.join(cols)}), got {len(toks)}"
                )
            rows[section].append((toks, lineno))
    if not any_content:
        raise ParseError("empty scenario file")

    buses = []
    for toks, ln in rows["buses"]:
        v_set = None if toks[2] == "-" else _float(toks[2], ln)
        buses.append(Bus(
            name=toks[0],
            is_slack=bool(int(toks[1])),
            v_set=v_set,
            p_load=_float(toks[3], ln),
            q_load=_float(toks[4], ln),
            b_shunt=_float(toks[5], ln),
        ))
    lines = [
        Line(t[0], t[1], t[2], _float(t[3], ln), _float(t[4], ln),
             in_service=bool(int(t[5])))
        for t, ln in rows["lines"]
    ]
    gens = [
        Generator(t[0], t[1], *[_float(v, ln) for v in t[2:]])
        for t, ln in rows["generators"]
    ]
    excs = [Exciter(t[0], *[_float(v, ln) for v in t[1:]]) for t, ln in rows["exciters"]]
    govs = [Governor(t[0], *[_float(v, ln) for v in t[1:]]) for t, ln in rows["governors"]]
    loads = [
        ErlLoad(t[0], t[1], *[_float(v, ln) for v in t[2:]])
        for t, ln in rows["loads"]
    ]
    ltcs = [
        Ltc(t[0], t[1], t[2], *[_float(v, ln) for v in t[3:]])
        for t, ln in rows["ltcs"]
    ]
    oxls = [Oxl(t[0], *[_float(v, ln) for v in t[1:]]) for t, ln in rows["oxls"]]

    fault = None
    if keys["fault"]:
        if "line" not in keys["fault"]:
            raise ParseError("[fault] section needs line=<name>")
        t_fault = 1.0
        if "t_fault" in keys["fault"]:
            val, ln = keys["fault"]["t_fault"]
            t_fault = _float(val, ln)
        fault = Fault(line=keys["fault"]["line"][0], t_fault=t_fault)

    plan_kwargs = {}
    for key, (val, ln) in keys["plan"].items():
        plan_kwargs[key] = int(val) if key == "max_iters" else _float(val, ln)
    plan = PlanSpec(**plan_kwargs)

    label = keys["meta"].get("label", ("scenario", 0))[0]
    archetype = keys["meta"].get("archetype", ("", 0))[0]
    scenario = Scenario(
        label=label,
        network=Network(buses=tuple(buses), lines=tuple(lines)),
        components=ComponentSet(
            generators=tuple(gens),
            exciters=tuple(excs),
            governors=tuple(govs),
            erl_loads=tuple(loads),
            ltcs=tuple(ltcs),
            oxls=tuple(oxls),
        ),
        fault=fault,
        archetype=archetype,
        plan=plan,
    )
    validate_scenario(scenario)
    return scenario


def format_scenario(sc: Scenario) -> str:
    """Serialize a scenario in the file format parse_scenario reads."""
    out = ["[meta]", f"label = {sc.label}", f"archetype = {sc.archetype}", ""]
    out.append("[buses]")
    out.append("# " + " ".join(_TABLE_COLUMNS["buses"]))
    for b in sc.network.buses:
        v = "-" if b.v_set is None else repr(b.v_set)
        out.append(f"{b.name} {int(b.is_slack)} {v} {b.p_load!r} {b.q_load!r} {b.b_shunt!r}")
    out.append("")
    out.append("[lines]")
    out.append("# " + " ".join(_TABLE_COLUMNS["lines"]))
    for l in sc.network.lines:
        out.append(f"{l.name} {l.from_bus} {l.to_bus} {l.r!r} {l.x!r} {int(l.in_service)}")
    out.append("")
    comp = sc.components
    out.append("[generators]")
    out.append("# " + " ".join(_TABLE_COLUMNS["generators"]))
    for g in comp.generators:
        out.append(f"{g.name} {g.bus} {g.h!r} {g.d!r} {g.xd!r} {g.xdp!r} {g.xq!r} "
                   f"{g.xqp!r} {g.td0p!r} {g.tq0p!r} {g.p_set!r} {g.v_set!r}")
    out.append("")
    out.append("[exciters]")
    for e in comp.exciters:
        out.append(f"{e.gen} {e.ka!r} {e.ta!r} {e.efd_min!r} {e.efd_max!r}")
    out.append("")
    out.append("[governors]")
    for gv in comp.governors:
        out.append(f"{gv.gen} {gv.droop!r} {gv.tg!r}")
    out.append("")
    out.append("[loads]")
    out.append("# " + " ".join(_TABLE_COLUMNS["loads"]))
    for l in comp.erl_loads:
        out.append(f"{l.name} {l.bus} {l.p0!r} {l.q0!r} {l.tp!r} {l.tq!r} "
                   f"{l.alpha_s!r} {l.alpha_t!r} {l.beta_s!r} {l.beta_t!r}")
    out.append("")
    out.append("[ltcs]")
    out.append("# " + " ".join(_TABLE_COLUMNS["ltcs"]))
    for t in comp.ltcs:
        out.append(f"{t.name} {t.from_bus} {t.to_bus} {t.r!r} {t.x!r} {t.tap0!r} "
                   f"{t.tap_min!r} {t.tap_max!r} {t.tap_step!r} {t.v_ref!r} "
                   f"{t.deadband!r} {t.delay!r}")
    out.append("")
    out.append("[oxls]")
    for o in comp.oxls:
        out.append(f"{o.gen} {o.i_lim!r} {o.t_trip!r} {o.t_reset!r} {o.efd_cap!r}")
    out.append("")
    if sc.fault is not None:
        out.append("[fault]")
        out.append(f"line = {sc.fault.line}")
        out.append(f"t_fault = {sc.fault.t_fault!r}")
        out.append("")
    p = sc.plan
    out.append("[plan]")
    out.append(f"t0 = {p.t0!r}")
    out.append(f"t1 = {p.t1!r}")
    out.append(f"t_end = {p.t_end!r}")
    out.append(f"h = {p.h!r}")
    out.append(f"delta0 = {p.delta0!r}")
    out.append(f"delta_max = {p.delta_max!r}")
    out.append(f"f_tol = {p.f_tol!r}")
    out.append(f"max_iters = {p.max_iters}")
    out.append("")
    return "\n".join(out)


def trajectory_csv(result: RunResult) -> str:
    """Deterministic CSV: header t + variable names, one row per accepted
    step or continuation iterate."""
    names = result.problem.var_names or tuple(
        f"p{i}" for i in range(result.problem.n_total)
    )
    lines = [",".join(("t",) + tuple(names))]
    for s in result.trajectory:
        vals = [repr(float(s.t))]
        vals += [repr(float(v)) for v in s.p()]
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


def format_report(result: RunResult) -> str:
    c = result.counters
    rows = [
        ("scenario", result.scenario_label),
        ("model", result.model_kind.value),
        ("method", result.method.value),
        ("status", result.status.value),
        ("verdict", result.verdict),
        ("wall_time_s", f"{result.wall_time:.3f}"),
        ("steps", c.steps),
        ("newton_iters", c.newton_iters),
        ("linear_solves", c.linear_solves),
        ("residual_evals", c.residual_evals),
        ("jacobian_evals", c.jacobian_evals),
        ("ptc_iterations", len(result.trace.iterations) if result.trace else 0),
        ("final_residual", f"{result.final_fnorm:.6e}"),
        ("failure_time", "-" if result.failure_time is None else f"{result.failure_time:.6f}"),
        ("switch_time", "-" if result.switch_time is None else f"{result.switch_time:.6f}"),
        ("events", sum(1 for e in result.events if not e.note)),
    ]
    out = [f"{k}: {v}" for k, v in rows]
    for ev in result.events:
        tag = f" [{ev.note}]" if ev.note else ""
        out.append(f"event: t={ev.t:.6f} device={ev.device} "
                   f"old={ev.old:.6g} new={ev.new:.6g}{tag}")
    return "\n".join(out) + "\n"


_EXIT_CODES = {
    RunStatus.CONVERGED: 0,
    RunStatus.COMPLETED: 0,
    RunStatus.ITERATION_BOUND_REACHED: 2,
    RunStatus.NEWTON_FAILURE: 3,
    RunStatus.LINEAR_SOLVE_FAILURE: 3,
    RunStatus.NON_FINITE: 3,
}

_METHODS = {
    "trap": Method.TRAPEZOIDAL,
    "ptc": Method.PTC,
    "qss-fallback": Method.QSS_TRAP_WITH_PTC_FALLBACK,
}

_MODELS = {"longterm": ModelKind.LONG_TERM, "qss": ModelKind.QSS}


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--scenario", required=True, help="scenario file path")
    p.add_argument("--model", choices=sorted(_MODELS), default="longterm",
                   help="model kind (default longterm)")
    p.add_argument("--t-end", type=float, default=None, help="simulation horizon, s")
    p.add_argument("--t0", type=float, default=None,
                   help="continuation handoff time for the long-term model, s (default 5)")
    p.add_argument("--t1", type=float, default=None,
                   help="QSS handoff time, s (default 30)")
    p.add_argument("--h", type=float, default=None, help="integrator step length, s")
    p.add_argument("--delta0", type=float, default=None, help="initial pseudo step, s")
    p.add_argument("--delta-max", type=float, default=None, help="pseudo step cap, s")
    p.add_argument("--f-tol", type=float, default=None,
                   help="residual norm convergence threshold")
    p.add_argument("--max-iters", type=int, default=None,
                   help="continuation iteration bound")
    p.add_argument("--out", default=".", help="output directory (default .)")


def _build_plan(scenario: Scenario, args, method: Method) -> RunPlan:
    spec = scenario.plan
    merged = PlanSpec(
        t0=spec.t0 if args.t0 is None else args.t0,
        t1=spec.t1 if args.t1 is None else args.t1,
        t_end=spec.t_end if args.t_end is None else args.t_end,
        h=spec.h if args.h is None else args.h,
        delta0=spec.delta0 if args.delta0 is None else args.delta0,
        delta_max=spec.delta_max if args.delta_max is None else args.delta_max,
        f_tol=spec.f_tol if args.f_tol is None else args.f_tol,
        max_iters=spec.max_iters if args.max_iters is None else args.max_iters,
    )
    scenario = Scenario(scenario.label, scenario.network, scenario.components,
                        scenario.fault, scenario.archetype, merged)
    return scenario, plan_for(scenario, _MODELS[args.model], method)


def _write_outputs(result: RunResult, out_dir: Path, stem: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{stem}.csv").write_text(trajectory_csv(result))
    report = format_report(result)
    (out_dir / f"{stem}.report.txt").write_text(report)
    sys.stdout.write(report)
    return out_dir / f"{stem}.csv"


def cmd_run(args) -> int:
    scenario = parse_scenario(args.scenario)
    scenario, plan = _build_plan(scenario, args, _METHODS[args.method])
    result = run_scenario(scenario, plan)
    stem = f"{scenario.label}_{plan.model_kind.value}_{plan.method.value}"
    _write_outputs(result, Path(args.out), stem)
    return _EXIT_CODES[result.status]


def cmd_compare(args) -> int:
    scenario = parse_scenario(args.scenario)
    scenario, plan_trap = _build_plan(scenario, args, Method.TRAPEZOIDAL)
    if plan_trap.model_kind is ModelKind.QSS:
        _, plan_fast = _build_plan(scenario, args, Method.QSS_TRAP_WITH_PTC_FALLBACK)
    else:
        _, plan_fast = _build_plan(scenario, args, Method.PTC)
    base = run_scenario(scenario, plan_trap)
    fast = run_scenario(scenario, plan_fast)
    out_dir = Path(args.out)
    _write_outputs(base, out_dir, f"{scenario.label}_{plan_trap.model_kind.value}_trap")
    _write_outputs(fast, out_dir,
                   f"{scenario.label}_{plan_fast.model_kind.value}_{plan_fast.method.value}")
    ratio = (base.counters.linear_solves / fast.counters.linear_solves
             if fast.counters.linear_solves else float("inf"))
    cmp_rows = [
        ("scenario", scenario.label),
        ("model", plan_trap.model_kind.value),
        ("baseline_status", base.status.value),
        ("fast_method", plan_fast.method.value),
        ("fast_status", fast.status.value),
        ("baseline_linear_solves", base.counters.linear_solves),
        ("fast_linear_solves", fast.counters.linear_solves),
        ("speedup_linear_solves", f"{ratio:.4f}"),
        ("baseline_verdict", base.verdict),
        ("fast_verdict", fast.verdict),
        ("verdict_agreement", str(base.verdict == fast.verdict).lower()),
    ]
    text = "\n".join(f"{k}: {v}" for k, v in cmp_rows) + "\n"
    (out_dir / f"{scenario.label}_compare.txt").write_text(text)
    sys.stdout.write(text)
    return max(_EXIT_CODES[base.status], _EXIT_CODES[fast.status])


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ptcdae",
        description="Pseudo-transient continuation and trapezoidal runs on "
                    "hybrid power-system DAE scenarios",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one scenario with one method")
    _add_common(p_run)
    p_run.add_argument("--method", choices=sorted(_METHODS), default="trap",
                       help="solution method (default trap)")
    p_run.set_defaults(func=cmd_run)
    p_cmp = sub.add_parser(
        "compare",
        help="run the trapezoidal baseline and the continuation method "
             "side by side and report the speedup",
    )
    _add_common(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 4


if __name__ == "__main__":
    sys.exit(main())
