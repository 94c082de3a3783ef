import numpy as np
import sys
sys.path.insert(0, "src")
from ptcdae import models, hybrid, dae
from ptcdae.dae import ModelKind
from ptcdae.models import *
import importlib
spec = importlib.util.spec_from_file_location("ps2", "scripts/probe_sweep2.py")

# rebuild the heavy case inline
def make(p0, q0, line_x, efd_gap, delay=40.0, tp=20.0, tap0=1.05, p_set=0.85,
         db=0.02, t_end=250.0, ka=60.0):
    buses = (Bus("grid", is_slack=True, v_set=1.04), Bus("gen1"),
             Bus("hub", p_load=0.10, q_load=0.02), Bus("load"))
    lines = (Line("circ-a", "grid", "gen1", 0.01, line_x),
             Line("circ-b", "grid", "gen1", 0.01, line_x),
             Line("tie", "gen1", "hub", 0.005, 0.08))
    comp0 = ComponentSet(
        generators=(Generator("G1","gen1",3.5,2.0,1.8,0.3,1.7,0.55,6.0,0.8,p_set,1.02),),
        exciters=(Exciter("G1", ka=ka, ta=0.2, efd_min=0.0, efd_max=9.0),),
        governors=(Governor("G1", droop=0.05, tg=4.0),),
        erl_loads=(ErlLoad("erl1","load",p0=p0,q0=q0,tp=tp,tq=tp),),
        ltcs=(Ltc("T34","hub","load",r=0.0,x=0.1,tap0=tap0,v_ref=1.0,deadband=db,delay=delay),))
    sc0 = Scenario("probe", Network(buses, lines), comp0, Fault("circ-a", 1.0),
                   "probe", PlanSpec(t_end=t_end, max_iters=400))
    efd0 = models.build_pack(sc0).initial_state().x[4]
    comp = ComponentSet(generators=comp0.generators,
        exciters=(Exciter("G1", ka=ka, ta=0.2, efd_min=0.0, efd_max=efd0+efd_gap),),
        governors=comp0.governors, erl_loads=comp0.erl_loads, ltcs=comp0.ltcs)
    return Scenario("probe", Network(buses, lines), comp, Fault("circ-a", 1.0),
                    "probe", PlanSpec(t_end=t_end, max_iters=400))

sc = make(1.2, 0.42, 0.55, 0.25)
pack = models.build_pack(sc)
lay = pack.layout
prob_qss = pack.problem(ModelKind.QSS, post_fault=True)
p = prob_qss.n_zc
print("pre-fault Efd0:", pack.initial_state().x[4], "ceiling:", pack.efd_hi[0])
rb = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.LONG_TERM, hybrid.Method.TRAPEZOIDAL))
print("LT:", rb.status, rb.final_fnorm, [(round(e.t,1), e.device, e.new) for e in rb.events])
iv = lay.pos_in_ns[lay.bus_idx['load']]
ig = lay.pos_in_ns[lay.bus_idx['gen1']]
for k, s in enumerate(rb.trajectory):
    if k % 400: continue
    W = dae.raw_jacobian(prob_qss, s)[p:, p:]
    sv = np.linalg.svd(W, compute_uv=False)
    vload = s.y[lay.v_off+iv]; v1 = s.y[lay.v_off+ig]
    efd = s.x[4]; eqp = s.x[2]
    i_d = s.y[lay.id_off]
    i_f = eqp + 1.5*i_d
    zp = s.z_c[1]; zq = s.z_c[2]
    pl = zp/pack.Tp[0] + pack.Lp0[0]*(vload/pack.ErlV0[0])**2
    print(f"t={s.t:6.1f} V1={v1:.4f} Vl={vload:.4f} Efd={efd:.3f} Eqp={eqp:.3f} "
          f"If={i_f:.3f} zp/Tp={zp/pack.Tp[0]:.3f} Pl={pl:.3f} sigmin={sv[-1]:.3e}")
