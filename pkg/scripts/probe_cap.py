import numpy as np
import sys
sys.path.insert(0, "src")
from ptcdae import models, hybrid, dae
from ptcdae.dae import ModelKind
from ptcdae.models import *

def make(efd_cap, i_lim, p0=1.0, q0=0.28, line_x=0.4, p_set=0.4, tap0=1.0,
         ka=50.0, tp=25.0, delay=30.0, db=0.02, t_end=250.0, t_trip=12.0):
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
        ltcs=(Ltc("T34","hub","load",r=0.0,x=0.08,tap0=tap0,v_ref=1.0,deadband=db,delay=delay),),
        oxls=(Oxl("G1", i_lim=i_lim, t_trip=t_trip, t_reset=100.0, efd_cap=efd_cap),))
    return Scenario("probe", Network(buses, lines), comp, Fault("circ-a", 1.0),
                    "probe", PlanSpec(t_end=t_end, max_iters=400))

# first: find If trajectory to choose i_lim so the flip lands in (30, 60)
sc = make(efd_cap=2.0, i_lim=99.0)
pack = models.build_pack(sc)
rb = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.LONG_TERM, hybrid.Method.TRAPEZOIDAL))
print("no-oxl LT:", rb.status.value, "fnorm", f"{rb.final_fnorm:.0e}",
      "events", [(round(e.t,1), e.device) for e in rb.events])
for k, s in enumerate(rb.trajectory):
    if k % 400: continue
    i_f = s.x[2] + 1.5*s.y[pack.layout.id_off]
    print(f"  t={s.t:6.1f} If={i_f:.3f} Efd={s.x[4]:.3f} Vl={s.y[pack.layout.v_off+pack.layout.pos_in_ns[pack.layout.bus_idx['load']]]:.4f}")

print()
print("== cap sweep: i_lim=1.6 t_trip=4.0 (flip ~35s) ==")
for cap in (1.70, 1.60, 1.55, 1.50, 1.45, 1.40, 1.35, 1.30):
    sc = make(efd_cap=cap, i_lim=1.6, t_trip=4.0)
    rl = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.LONG_TERM, hybrid.Method.TRAPEZOIDAL))
    rq = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.QSS, hybrid.Method.TRAPEZOIDAL))
    lt_ev = [(round(e.t,1), e.device.split(':')[0]) for e in rl.events]
    qs_ev = [(round(e.t,1), e.device.split(':')[0]) for e in rq.events]
    print(f"cap={cap:4.2f} LT:{rl.status.value:>15s} f={rl.final_fnorm:.0e} fail={str(rl.failure_time)[:6]:>6s} ev={lt_ev}")
    print(f"         QSS:{rq.status.value:>14s} fail={str(rq.failure_time)[:6]:>6s} ev={qs_ev}")
