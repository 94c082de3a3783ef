"""Probe fold proximity of the QSS fast block along a long-term run."""
import numpy as np
import sys
sys.path.insert(0, "src")
from ptcdae import models, hybrid, dae
from ptcdae.dae import ModelKind

sc = models.scenario_qss_difficulty()
pack = models.build_pack(sc)
prob_qss = pack.problem(ModelKind.QSS, post_fault=True)
lay = pack.layout
p, m = prob_qss.n_zc, prob_qss.n_x

rb = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.LONG_TERM, hybrid.Method.TRAPEZOIDAL))
print("LT baseline:", rb.status, "fnorm", rb.final_fnorm)
print("events:", [(round(e.t,2), e.device, e.new) for e in rb.events])

worst = (1e9, None, None)
for k, s in enumerate(rb.trajectory):
    J = dae.raw_jacobian(prob_qss, s)
    W = J[p:, p:]
    sv = np.linalg.svd(W, compute_uv=False)
    cond = sv[0]/sv[-1]
    if sv[-1] < worst[0]:
        worst = (sv[-1], s.t, cond)
    if k % 200 == 0:
        vload = s.y[lay.v_off + lay.pos_in_ns[lay.bus_idx['load']]]
        efd = s.x[4]
        raw = pack.Ka[0]*(pack.Vref[0] - s.y[lay.v_off + lay.pos_in_ns[lay.bus_idx['gen1']]])
        zp = s.z_c[1]
        print(f"t={s.t:7.2f} V_load={vload:.4f} Efd={efd:.4f} rawAVR={raw:7.2f} zp={zp:.4f} sigmin={sv[-1]:.4e} cond={cond:.3e}")
print("worst sigmin:", worst)
