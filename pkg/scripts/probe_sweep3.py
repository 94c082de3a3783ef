import numpy as np
import sys
sys.path.insert(0, "src")
from ptcdae import models, hybrid, dae
from ptcdae.dae import ModelKind
from ptcdae.models import *

def make(p0, q0, line_x, efd_gap, delay=30.0, tp=25.0, tap0=1.0, p_set=0.4,
         db=0.02, t_end=250.0, ka=50.0, v_grid=1.05, v_set=1.01, h_gen=3.0):
    buses = (Bus("grid", is_slack=True, v_set=v_grid), Bus("hub"),
             Bus("gen1"), Bus("load"))
    lines = (Line("circ-a", "grid", "hub", 0.01, line_x),
             Line("circ-b", "grid", "hub", 0.01, line_x),
             Line("gtie", "gen1", "hub", 0.005, 0.05))
    def comp_with(emax):
        return ComponentSet(
            generators=(Generator("G1","gen1",h_gen,2.0,1.8,0.3,1.7,0.55,6.0,0.8,p_set,v_set),),
            exciters=(Exciter("G1", ka=ka, ta=0.2, efd_min=0.0, efd_max=emax),),
            governors=(Governor("G1", droop=0.05, tg=4.0),),
            erl_loads=(ErlLoad("erl1","load",p0=p0,q0=q0,tp=tp,tq=tp),),
            ltcs=(Ltc("T34","hub","load",r=0.0,x=0.08,tap0=tap0,v_ref=1.0,deadband=db,delay=delay),))
    sc0 = Scenario("probe", Network(buses, lines), comp_with(9.0),
                   Fault("circ-a", 1.0), "probe", PlanSpec(t_end=t_end, max_iters=400))
    efd0 = models.build_pack(sc0).initial_state().x[4]
    return Scenario("probe", Network(buses, lines), comp_with(efd0 + efd_gap),
                    Fault("circ-a", 1.0), "probe", PlanSpec(t_end=t_end, max_iters=400)), efd0

def assess(sc):
    pack = models.build_pack(sc)
    prob_qss = pack.problem(ModelKind.QSS, post_fault=True)
    lay = pack.layout
    p = prob_qss.n_zc
    rb = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.LONG_TERM, hybrid.Method.TRAPEZOIDAL))
    sig = []
    vmin = 2.0
    iv = lay.pos_in_ns[lay.bus_idx['load']]
    for k, s in enumerate(rb.trajectory):
        if k % 20: continue
        W = dae.raw_jacobian(prob_qss, s)[p:, p:]
        sv = np.linalg.svd(W, compute_uv=False)
        sig.append((s.t, sv[-1]))
        vmin = min(vmin, s.y[lay.v_off+iv])
    worst = min(sig, key=lambda z: z[1])
    rq = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.QSS, hybrid.Method.TRAPEZOIDAL))
    print(f"LT:{rb.status.value:>15s} f={rb.final_fnorm:.0e} ev={len(rb.events)-1} "
          f"fail={str(rb.failure_time)[:6]:6s} Vmin={vmin:.3f} Efd_end={rb.final_state.x[4]:.2f} "
          f"| QSS:{rq.status.value:>15s} fail={str(rq.failure_time)[:6]:6s} "
          f"| sigmin={worst[1]:.2e}@{worst[0]:5.1f}")

for (p0, q0, lx, gap) in [(0.9, 0.25, 0.30, 0.3), (1.0, 0.28, 0.30, 0.3),
                          (1.1, 0.30, 0.30, 0.3), (1.0, 0.28, 0.40, 0.3),
                          (1.1, 0.30, 0.40, 0.2), (1.2, 0.33, 0.40, 0.2)]:
    print(f"p0={p0} q0={q0} lx={lx} gap={gap}: ", end="", flush=True)
    try:
        sc, efd0 = make(p0, q0, lx, gap)
        assess(sc)
    except Exception as e:
        print("ERR", repr(e)[:90])
