"""Manual parameter exploration for the constrained-model difficulty case."""
import numpy as np
import sys
sys.path.insert(0, "src")
from ptcdae import models, hybrid, dae
from ptcdae.dae import ModelKind
from ptcdae.models import *

def make(p_set, v_set, p0, q0, tp, efd_max, delay, line_x, tie_x, tap0, db=0.02,
         t_end=250.0, i_lim=4.5):
    buses = (
        Bus("grid", is_slack=True, v_set=1.04),
        Bus("gen1"),
        Bus("hub", p_load=0.10, q_load=0.02),
        Bus("load"),
    )
    lines = (
        Line("circ-a", "grid", "gen1", 0.01, line_x),
        Line("circ-b", "grid", "gen1", 0.01, line_x),
        Line("tie", "gen1", "hub", 0.005, tie_x),
    )
    comp = ComponentSet(
        generators=(Generator("G1","gen1",3.5,2.0,1.8,0.3,1.7,0.55,6.0,0.8,p_set,v_set),),
        exciters=(Exciter("G1", ka=60.0, ta=0.2, efd_min=0.0, efd_max=efd_max),),
        governors=(Governor("G1", droop=0.05, tg=4.0),),
        erl_loads=(ErlLoad("erl1","load",p0=p0,q0=q0,tp=tp,tq=tp),),
        ltcs=(Ltc("T34","hub","load",r=0.0,x=0.1,tap0=tap0,v_ref=1.0,deadband=db,delay=delay),),
        oxls=(Oxl("G1", i_lim=i_lim, t_trip=20.0, t_reset=100.0, efd_cap=2.2),),
    )
    return Scenario("probe", Network(buses, lines), comp,
                    Fault("circ-a", 1.0), "probe", PlanSpec(t_end=t_end, max_iters=400))

def assess(sc, verbose=False):
    pack = models.build_pack(sc)
    prob_qss = pack.problem(ModelKind.QSS, post_fault=True)
    lay = pack.layout
    p = prob_qss.n_zc
    try:
        rb = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.LONG_TERM, hybrid.Method.TRAPEZOIDAL))
    except Exception as e:
        print("LT ERR", e); return
    sig = []
    for k, s in enumerate(rb.trajectory):
        if k % 20: continue
        W = dae.raw_jacobian(prob_qss, s)[p:, p:]
        sv = np.linalg.svd(W, compute_uv=False)
        sig.append((s.t, sv[-1]))
    worst = min(sig, key=lambda z: z[1])
    rq = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.QSS, hybrid.Method.TRAPEZOIDAL))
    v0 = pack.flow_voltage[lay.bus_idx['load']]
    efd_fin = rb.final_state.x[4] if rb.trajectory else float('nan')
    print(f"LT:{rb.status.value:>11s} f={rb.final_fnorm:.0e} ev={len(rb.events)-1} "
          f"| QSS:{rq.status.value:>16s} fail_t={str(rq.failure_time)[:6]:6s} "
          f"| sigmin={worst[1]:.2e}@{worst[0]:5.1f} V0={v0:.3f} Efd_end={efd_fin:.2f}")
    if verbose:
        for ev in rb.events: print("   LT ", f"t={ev.t:.2f}", ev.device, ev.new, ev.note)
        for ev in rq.events: print("   QSS", f"t={ev.t:.2f}", ev.device, ev.new, ev.note)
    return rb, rq, worst

for p0 in (0.95, 1.05, 1.15, 1.25, 1.35):
    print(f"p0={p0}: ", end="")
    try:
        assess(make(p_set=0.85, v_set=1.02, p0=p0, q0=p0/4, tp=20.0,
                    efd_max=2.6, delay=35.0, line_x=0.30, tie_x=0.08, tap0=1.04))
    except Exception as e:
        print("ERR", repr(e))
