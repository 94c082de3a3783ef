import numpy as np
import sys
sys.path.insert(0, "src")
from ptcdae import models, hybrid, dae
from ptcdae.dae import ModelKind
from ptcdae.models import *

def make(pA, pB=0.55, scale_q=0.28, efd_cap=1.55, i_lim=1.58, line_x=0.55,
         p_set=0.45, tap0=0.97, ka=50.0, tpA=45.0, tpB=18.0, delay=25.0,
         db=0.025, v_ref=0.95, t_end=400.0, tap_min=0.88, tap_max=1.12,
         t_trip=0.5):
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
            # recovers toward constant power (stress builds early)
            ErlLoad("rec","load",p0=pB,q0=scale_q*pB,tp=tpB,tq=tpB,
                    alpha_s=0.0, alpha_t=2.0, beta_s=0.0, beta_t=2.0),
            # transiently constant-power, relaxes toward impedance (stress recedes)
            ErlLoad("rlx","load",p0=pA,q0=scale_q*pA,tp=tpA,tq=tpA,
                    alpha_s=2.0, alpha_t=0.0, beta_s=2.0, beta_t=0.0),
        ),
        ltcs=(Ltc("T34","hub","load",r=0.0,x=0.08,tap0=tap0,v_ref=v_ref,deadband=db,
                  delay=delay,tap_min=tap_min,tap_max=tap_max),),
        oxls=(Oxl("G1", i_lim=i_lim, t_trip=t_trip, t_reset=100.0, efd_cap=efd_cap),))
    return Scenario("probe", Network(buses, lines), comp, Fault("circ-a", 1.0),
                    "probe", PlanSpec(t_end=t_end, max_iters=500))

def trial(pA, **kw):
    sc = make(pA, **kw)
    pack = models.build_pack(sc)
    lay = pack.layout
    iv = lay.v_off + lay.pos_in_ns[lay.bus_idx['load']]
    rl = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.LONG_TERM, hybrid.Method.TRAPEZOIDAL))
    rq = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.QSS, hybrid.Method.TRAPEZOIDAL))
    vend = rl.final_state.y[iv]
    vmin = min(s.y[iv] for s in rl.trajectory)
    nlt = sum(1 for e in rl.events if not e.note and e.device.startswith('ltc'))
    print(f"pA={pA:.2f}: LT {rl.status.value:>14s} f={rl.final_fnorm:.0e} taps={nlt} "
          f"Vmin={vmin:.3f} Vend={vend:.3f} fail={str(rl.failure_time)[:6]:>6s} "
          f"| QSS {rq.status.value:>14s} fail={str(rq.failure_time)[:6]:>6s}")

for pA in (0.40, 0.50, 0.60, 0.70):
    try:
        trial(pA)
    except Exception as e:
        print(f"pA={pA}: ERR {repr(e)[:70]}")
