import numpy as np
import sys
sys.path.insert(0, "src")
from ptcdae import models, hybrid, dae
from ptcdae.dae import ModelKind
from ptcdae.models import *

def make(efd_cap, i_lim, p0, q0, line_x, p_set=0.45, tap0=1.0,
         ka=50.0, tp=20.0, delay=20.0, db=0.03, t_end=250.0, t_trip=4.0,
         tap_min=0.9, tap_max=1.1):
    buses = (Bus("grid", is_slack=True, v_set=1.05), Bus("hub"),
             Bus("gen1"), Bus("load"))
    lines = (Line("circ-a", "grid", "hub", 0.01, line_x),
             Line("circ-b", "grid", "hub", 0.01, line_x),
             Line("gtie", "gen1", "hub", 0.005, 0.05))
    comp = ComponentSet(
        generators=(Generator("G1","gen1",3.0,2.0,1.8,0.3,1.7,0.55,6.0,0.8,p_set,1.01),),
        exciters=(Exciter("G1", ka=ka, ta=0.2, efd_min=0.0, efd_max=3.5),),
        governors=(Governor("G1", droop=0.05, tg=4.0),),
        erl_loads=(ErlLoad("erl1","load",p0=p0,q0=q0,tp=tp,tq=tp),),
        ltcs=(Ltc("T34","hub","load",r=0.0,x=0.08,tap0=tap0,v_ref=1.0,deadband=db,
                  delay=delay,tap_min=tap_min,tap_max=tap_max),),
        oxls=(Oxl("G1", i_lim=i_lim, t_trip=t_trip, t_reset=100.0, efd_cap=efd_cap),))
    return Scenario("probe", Network(buses, lines), comp, Fault("circ-a", 1.0),
                    "probe", PlanSpec(t_end=t_end, max_iters=400))

for lx in (0.55, 0.65, 0.75):
    for (p0, q0) in ((0.85, 0.22), (0.95, 0.26)):
        sc = make(efd_cap=1.55, i_lim=1.6, p0=p0, q0=q0, line_x=lx)
        try:
            rl = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.LONG_TERM, hybrid.Method.TRAPEZOIDAL))
            rq = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.QSS, hybrid.Method.TRAPEZOIDAL))
        except Exception as e:
            print(f"lx={lx} p0={p0}: ERR {repr(e)[:80]}"); continue
        lt_ev = [(round(e.t,1), e.device.split(':')[0]) for e in rl.events]
        qs_ev = [(round(e.t,1), e.device.split(':')[0]) for e in rq.events]
        print(f"lx={lx} p0={p0} q0={q0}:")
        print(f"   LT:{rl.status.value:>15s} f={rl.final_fnorm:.0e} fail={str(rl.failure_time)[:6]:>6s} ev={lt_ev}")
        print(f"  QSS:{rq.status.value:>15s} fail={str(rq.failure_time)[:6]:>6s} ev={qs_ev}")
