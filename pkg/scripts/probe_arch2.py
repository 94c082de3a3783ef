import numpy as np
import sys
sys.path.insert(0, "src")
from ptcdae import models, hybrid, dae
from ptcdae.dae import ModelKind
from ptcdae.models import *

def make(p0, q0, efd_gap, line_x=0.65, p_set=0.45, tap0=1.0, ka=50.0, tp=20.0,
         delay=20.0, db=0.03, t_end=400.0, tap_min=0.9, tap_max=1.1):
    buses = (Bus("grid", is_slack=True, v_set=1.05), Bus("hub"),
             Bus("gen1"), Bus("load"))
    lines = (Line("circ-a", "grid", "hub", 0.01, line_x),
             Line("circ-b", "grid", "hub", 0.01, line_x),
             Line("gtie", "gen1", "hub", 0.005, 0.05))
    def comp_with(emax):
        return ComponentSet(
            generators=(Generator("G1","gen1",3.0,2.0,1.8,0.3,1.7,0.55,6.0,0.8,p_set,1.01),),
            exciters=(Exciter("G1", ka=ka, ta=0.2, efd_min=0.0, efd_max=emax),),
            governors=(Governor("G1", droop=0.05, tg=4.0),),
            erl_loads=(ErlLoad("erl1","load",p0=p0,q0=q0,tp=tp,tq=tp),),
            ltcs=(Ltc("T34","hub","load",r=0.0,x=0.08,tap0=tap0,v_ref=1.0,deadband=db,
                      delay=delay,tap_min=tap_min,tap_max=tap_max),))
    sc0 = Scenario("probe", Network(buses, lines), comp_with(9.0),
                   Fault("circ-a", 1.0), "probe", PlanSpec(t_end=t_end, max_iters=500))
    efd0 = models.build_pack(sc0).initial_state().x[4]
    return Scenario("probe", Network(buses, lines), comp_with(efd0 + efd_gap),
                    Fault("circ-a", 1.0), "probe", PlanSpec(t_end=t_end, max_iters=500))

for p0 in (0.88, 0.91, 0.94, 0.97):
    for gap in (0.35, 0.5):
        try:
            sc = make(p0=p0, q0=p0*0.28, efd_gap=gap)
            rl = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.LONG_TERM, hybrid.Method.TRAPEZOIDAL))
            rq = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.QSS, hybrid.Method.TRAPEZOIDAL))
        except Exception as e:
            print(f"p0={p0} gap={gap}: ERR {repr(e)[:70]}"); continue
        nlt = sum(1 for e in rl.events if not e.note)
        nqs = sum(1 for e in rq.events if not e.note)
        print(f"p0={p0} gap={gap}: LT {rl.status.value:>14s} f={rl.final_fnorm:.0e} ev={nlt} "
              f"| QSS {rq.status.value:>14s} fail={str(rq.failure_time)[:6]:>6s} ev={nqs}")
