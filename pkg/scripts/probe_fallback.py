import numpy as np
import sys
sys.path.insert(0, "src")
exec(open("scripts/probe_arch2g.py").read().split("def trial")[0])
from ptcdae import trapezoid, ptc
from ptcdae.dae import ModelKind, check_consistency, eval_residual
from ptcdae.numeric import rms_norm

sc = make(0.43, 0.68, t_end=700.0)
pack = models.build_pack(sc)
lay = pack.layout
iv = lay.v_off + lay.pos_in_ns[lay.bus_idx['load']]

# reproduce the qss phase up to failure
plan = hybrid.plan_for(sc, ModelKind.QSS, hybrid.Method.QSS_TRAP_WITH_PTC_FALLBACK)
prob_pre = pack.problem(ModelKind.LONG_TERM, post_fault=False)
prob_post_lt = pack.problem(ModelKind.LONG_TERM, post_fault=True)
prob_qss = pack.problem(ModelKind.QSS, post_fault=True)
from ptcdae.models import event_rules
from ptcdae.dae import Counters
rules = event_rules(pack)
counters = Counters()
log = []
driver = hybrid._EventDriver(prob_post_lt, rules, plan.trap_cfg, plan.ptc_cfg.delta0, counters, log)
traj = []
state, fail = hybrid._runup(pack, plan, driver, prob_pre, prob_post_lt, plan.t1, counters, traj)
driver.prob = prob_qss
traj2, out = trapezoid.trap_integrate(prob_qss, state, plan.t_end, plan.trap_cfg,
                                      event_hook=driver.trap_hook, counters=counters)
print("qss failed:", out.failure, "at", out.failure_time)
s_entry = traj2[-1]
print("entry t", s_entry.t, "V_load", s_entry.y[iv], "zd", s_entry.z_d)
print("entry consistency:", check_consistency(prob_qss, s_entry, 1e-6))
driver.clock = s_entry.t
outcome = ptc.ptc_solve(prob_qss, s_entry, plan.ptc_cfg, event_hook=driver.ptc_hook,
                        counters=counters)
print("fallback:", outcome.status, len(outcome.trace.iterations))
for r in outcome.trace.iterations[:40:4] + outcome.trace.iterations[40::40]:
    print(f"  it={r.index:4d} delta={r.delta:.3e} fnorm={r.fnorm:.4e} step={r.step_norm:.3e}")

print()
print("== retry with integrator-like delta_max ==")
for dmax in (1.0, 2.0, 5.0):
    rules2 = event_rules(pack)
    counters2 = Counters()
    log2 = []
    driver2 = hybrid._EventDriver(prob_qss, rules2, plan.trap_cfg, 0.1, counters2, log2)
    # re-arm timers as they were at entry: replay the pre-entry history cheaply by
    # advancing each rule with the entry state (condition streaks persist anyway)
    driver2.clock = s_entry.t
    cfg2 = ptc.PtcConfig(delta0=0.1, delta_max=dmax, f_tol=1e-6, max_iters=4000)
    out2 = ptc.ptc_solve(prob_qss, s_entry, cfg2, event_hook=driver2.ptc_hook,
                         counters=counters2)
    fn = rms_norm(eval_residual(prob_qss, out2.final_state))
    print(f"dmax={dmax}: {out2.status.value} iters={len(out2.trace.iterations)} "
          f"fnorm={fn:.2e} V_load={out2.final_state.y[iv]:.4f} zd={out2.final_state.z_d} "
          f"events={[(round(e.t,1), e.device.split(':')[0]) for e in log2][:14]}")
