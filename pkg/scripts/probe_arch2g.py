import numpy as np
import sys
sys.path.insert(0, "src")
from ptcdae import models, hybrid, dae
from ptcdae.dae import ModelKind
from ptcdae.models import *

def make(pA, pB, tpA=60.0, tpB=15.0, scale_q=0.28, efd_cap=1.55, i_lim=1.58,
         line_x=0.55, p_set=0.45, tap0=0.97, ka=50.0, delay=45.0,
         db=0.025, v_ref=0.95, t_end=500.0, tap_min=0.88, tap_max=1.12,
         t_trip=0.5, ltc_delay_later=12.0):
    buses = (Bus("grid", is_slack=True, v_set=1.05), Bus("hub"),
             Bus("gen1"), Bus("load"))
    lines = (Line("circ-a", "grid", "hub", 0.01, line_x),
             Line("circ-b", "grid", "hub", 0.01, line_x),
             Line("gtie", "gen1", "hub", 0.005, 0.05))
    comp = ComponentSet(
        generators=(Generator("G1","gen1",3.0,2.0,1.8,0.3,1.7,0.55,6.0,0.8,p_set,1.01),),
        exciters=(Exciter("G1", ka=ka, ta=0.2, efd_min=0.0, efd_max=3.0),),
        governors=(Governor("G1", droop=0.05, tg=4.0),),
        erl_loads=(
            ErlLoad("rec","load",p0=pB,q0=scale_q*pB,tp=tpB,tq=tpB,
                    alpha_s=0.0, alpha_t=2.0, beta_s=0.0, beta_t=2.0),
            ErlLoad("rlx","load",p0=pA,q0=scale_q*pA,tp=tpA,tq=tpA,
                    alpha_s=2.0, alpha_t=0.0, beta_s=2.0, beta_t=0.0),
        ),
        ltcs=(Ltc("T34","hub","load",r=0.0,x=0.08,tap0=tap0,v_ref=v_ref,deadband=db,
                  delay=delay,tap_min=tap_min,tap_max=tap_max),),
        oxls=(Oxl("G1", i_lim=i_lim, t_trip=t_trip, t_reset=100.0, efd_cap=efd_cap),))
    return Scenario("probe", Network(buses, lines), comp, Fault("circ-a", 1.0),
                    "probe", PlanSpec(t_end=t_end, max_iters=500))

def trial(pA, pB, **kw):
    sc = make(pA, pB, **kw)
    pack = models.build_pack(sc)
    lay = pack.layout
    iv = lay.v_off + lay.pos_in_ns[lay.bus_idx['load']]
    rl = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.LONG_TERM, hybrid.Method.TRAPEZOIDAL))
    rq = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.QSS, hybrid.Method.TRAPEZOIDAL))
    vend = rl.final_state.y[iv]
    vmin = min(s.y[iv] for s in rl.trajectory)
    tmin = min(rl.trajectory, key=lambda s: s.y[iv]).t
    nlt = sum(1 for e in rl.events if not e.note and e.device.startswith('ltc'))
    print(f"pA={pA:.2f} pB={pB:.2f}: LT {rl.status.value:>14s} f={rl.final_fnorm:.0e} "
          f"taps={nlt} Vmin={vmin:.3f}@{tmin:5.1f} Vend={vend:.3f} "
          f"fail={str(rl.failure_time)[:6]:>6s} "
          f"| QSS {rq.status.value:>14s} fail={str(rq.failure_time)[:6]:>6s}")

for (pA, pB) in ((0.45, 0.70), (0.50, 0.70), (0.55, 0.70), (0.50, 0.75), (0.55, 0.75)):
    try:
        trial(pA, pB)
    except Exception as e:
        print(f"pA={pA} pB={pB}: ERR {repr(e)[:70]}")

print("== backing off ==")
for (pA, pB) in ((0.35, 0.65), (0.38, 0.65), (0.40, 0.65), (0.42, 0.66), (0.40, 0.68)):
    try:
        trial(pA, pB)
    except Exception as e:
        print(f"pA={pA} pB={pB}: ERR {repr(e)[:70]}")
