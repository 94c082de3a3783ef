import numpy as np
import sys
sys.path.insert(0, "src")
exec(open("scripts/probe_arch2g.py").read().split("def trial")[0])
from ptcdae import trapezoid
from ptcdae.dae import Counters, ModelKind
from ptcdae.models import event_rules

def effort(pA, pB, t_end=500.0):
    sc = make(pA, pB, t_end=t_end)
    pack = models.build_pack(sc)
    plan = hybrid.plan_for(sc, ModelKind.QSS, hybrid.Method.TRAPEZOIDAL)
    prob_pre = pack.problem(ModelKind.LONG_TERM, post_fault=False)
    prob_lt = pack.problem(ModelKind.LONG_TERM, post_fault=True)
    prob_qss = pack.problem(ModelKind.QSS, post_fault=True)

    for label, prob in (("LT ", prob_lt), ("QSS", prob_qss)):
        rules = event_rules(pack)
        counters = Counters()
        log = []
        driver = hybrid._EventDriver(prob_lt, rules, plan.trap_cfg, 0.1, counters, log)
        traj = []
        state, fail = hybrid._runup(pack, plan, driver, prob_pre, prob_lt,
                                    plan.t1 if label == "QSS" else 0.0, counters, traj)
        driver.prob = prob
        # instrument per-step newton iters
        max_hist = []
        cur = state
        c2 = Counters()
        t = cur.t
        worst = (0, 0.0)
        while t < t_end - 1e-9:
            before = c2.newton_iters
            try:
                cur = trapezoid.trap_step(prob, cur, plan.trap_cfg.h,
                                          newton_tol=plan.trap_cfg.newton_tol,
                                          newton_max_iters=40, counters=c2)
            except Exception as e:
                print(f"  {label} died at t={t:.2f} even with budget 40: {type(e).__name__}")
                break
            used = c2.newton_iters - before
            if used > worst[0]:
                worst = (used, cur.t)
            t = cur.t
            cur = driver.trap_hook(cur, plan.trap_cfg.h)
        print(f"  {label}: worst newton iters/step = {worst[0]} at t={worst[1]:.2f}")

for (pA, pB) in ((0.40, 0.65), (0.42, 0.66), (0.43, 0.67)):
    print(f"pA={pA} pB={pB}:")
    effort(pA, pB)
