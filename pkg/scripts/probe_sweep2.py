import numpy as np
import sys
sys.path.insert(0, "src")
from ptcdae import models, hybrid, dae
from ptcdae.dae import ModelKind
from ptcdae.models import *

def make(p0, q0, line_x, efd_gap, delay=40.0, tp=20.0, tap0=1.05, p_set=0.85,
         db=0.02, t_end=250.0):
    buses = (
        Bus("grid", is_slack=True, v_set=1.04),
        Bus("gen1"),
        Bus("hub", p_load=0.10, q_load=0.02),
        Bus("load"),
    )
    lines = (
        Line("circ-a", "grid", "gen1", 0.01, line_x),
        Line("circ-b", "grid", "gen1", 0.01, line_x),
        Line("tie", "gen1", "hub", 0.005, 0.08),
    )
    # build once to learn pre-fault Efd0, then set ceiling = Efd0 + gap
    comp0 = ComponentSet(
        generators=(Generator("G1","gen1",3.5,2.0,1.8,0.3,1.7,0.55,6.0,0.8,p_set,1.02),),
        exciters=(Exciter("G1", ka=60.0, ta=0.2, efd_min=0.0, efd_max=9.0),),
        governors=(Governor("G1", droop=0.05, tg=4.0),),
        erl_loads=(ErlLoad("erl1","load",p0=p0,q0=q0,tp=tp,tq=tp),),
        ltcs=(Ltc("T34","hub","load",r=0.0,x=0.1,tap0=tap0,v_ref=1.0,deadband=db,delay=delay),),
    )
    sc0 = Scenario("probe", Network(buses, lines), comp0, Fault("circ-a", 1.0),
                   "probe", PlanSpec(t_end=t_end, max_iters=400))
    pack0 = models.build_pack(sc0)
    efd0 = pack0.initial_state().x[4]
    comp = ComponentSet(
        generators=comp0.generators,
        exciters=(Exciter("G1", ka=60.0, ta=0.2, efd_min=0.0, efd_max=efd0+efd_gap),),
        governors=comp0.governors, erl_loads=comp0.erl_loads, ltcs=comp0.ltcs,
    )
    return Scenario("probe", Network(buses, lines), comp, Fault("circ-a", 1.0),
                    "probe", PlanSpec(t_end=t_end, max_iters=400))

def assess(sc):
    pack = models.build_pack(sc)
    prob_qss = pack.problem(ModelKind.QSS, post_fault=True)
    lay = pack.layout
    p = prob_qss.n_zc
    rb = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.LONG_TERM, hybrid.Method.TRAPEZOIDAL))
    sig = []
    vmin = 2.0
    for k, s in enumerate(rb.trajectory):
        if k % 20: continue
        W = dae.raw_jacobian(prob_qss, s)[p:, p:]
        sv = np.linalg.svd(W, compute_uv=False)
        sig.append((s.t, sv[-1]))
        vmin = min(vmin, s.y[lay.v_off + lay.pos_in_ns[lay.bus_idx['load']]])
    worst = min(sig, key=lambda z: z[1])
    rq = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.QSS, hybrid.Method.TRAPEZOIDAL))
    print(f"LT:{rb.status.value:>15s} f={rb.final_fnorm:.0e} ev={len(rb.events)-1} "
          f"fail_t={str(rb.failure_time)[:6]:6s} Vmin={vmin:.3f} "
          f"| QSS:{rq.status.value:>15s} fail_t={str(rq.failure_time)[:6]:6s} "
          f"| sigmin={worst[1]:.2e}@{worst[0]:5.1f}")
    return rb, rq

for (p0, q0, lx, gap) in [(1.0, 0.35, 0.45, 0.3), (1.1, 0.38, 0.45, 0.3),
                          (1.2, 0.42, 0.45, 0.3), (1.1, 0.38, 0.55, 0.3),
                          (1.2, 0.42, 0.55, 0.25), (1.3, 0.45, 0.55, 0.25)]:
    print(f"p0={p0} q0={q0} lx={lx} gap={gap}: ", end="", flush=True)
    try:
        assess(make(p0, q0, lx, gap))
    except Exception as e:
        print("ERR", repr(e)[:90])
