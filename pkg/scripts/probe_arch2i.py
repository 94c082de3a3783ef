import numpy as np
import sys
sys.path.insert(0, "src")
exec(open("scripts/probe_arch2g.py").read().split("def trial")[0])
from ptcdae.dae import check_consistency

sc = make(0.43, 0.68, t_end=700.0)
pack = models.build_pack(sc)
lay = pack.layout
iv = lay.v_off + lay.pos_in_ns[lay.bus_idx['load']]

rl = hybrid.run_baseline(sc, hybrid.plan_for(sc, ModelKind.LONG_TERM, hybrid.Method.TRAPEZOIDAL))
print("LT baseline:", rl.status.value, "f", f"{rl.final_fnorm:.1e}",
      "Vend", round(rl.final_state.y[iv],4), "taps",
      sum(1 for e in rl.events if not e.note and e.device.startswith('ltc')))
print("LT events:", [(round(e.t,1), e.device.split(':')[0], e.note or 'ok') for e in rl.events][:14])

rq = hybrid.run_qss_ptc(sc, hybrid.plan_for(sc, ModelKind.QSS, hybrid.Method.QSS_TRAP_WITH_PTC_FALLBACK))
print("qss+fallback:", rq.status.value, "switch_t", rq.switch_time,
      "iters", len(rq.trace.iterations) if rq.trace else 0,
      "f", f"{rq.final_fnorm:.1e}")
print("QSS events:", [(round(e.t,1), e.device.split(':')[0], e.note or 'ok') for e in rq.events][:18])
if rq.trace:
    print("entry states consistent:",
          [check_consistency(rq.problem, s, 1e-6).consistent for s in rq.ptc_entry_states])
diff = np.max(np.abs(rl.final_state.p() - rq.final_state.p()))
print("final state agreement (max abs):", diff)
print("zd:", rl.final_state.z_d, "vs", rq.final_state.z_d)
