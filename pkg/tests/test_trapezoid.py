import numpy as np
import pytest

from ptcdae.dae import DaeProblem, ModelKind, eval_raw, make_state, raw_jacobian
from ptcdae.numeric import rms_norm, fd_jacobian
from ptcdae.trapezoid import (
    NewtonNoConvergence,
    TrapConfig,
    trap_integrate,
    trap_matrix,
    trap_residual,
    trap_step,
)


def decay_problem():
    return DaeProblem(
        n_zc=1, n_x=0, n_y=0, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda zc, zd, x, y: -zc,
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda *a: np.zeros(0),
    )


def dae_problem():
    """z' = -z coupled to 0 = y - z."""
    return DaeProblem(
        n_zc=1, n_x=0, n_y=1, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda zc, zd, x, y: -zc,
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda zc, zd, x, y: y - zc,
    )


def test_step_scalar_closed_form():
    s = trap_step(decay_problem(), make_state(0, [1.0], [], [], []), h=0.1)
    assert s.z_c[0] == pytest.approx((1 - 0.05) / (1 + 0.05), abs=1e-12)
    assert s.t == pytest.approx(0.1)


def test_step_enforces_algebraic_row():
    prob = DaeProblem(
        n_zc=1, n_x=0, n_y=1, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda zc, zd, x, y: -zc,
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda zc, zd, x, y: y - 2.0,
    )
    s = trap_step(prob, make_state(0, [1.0], [], [], [2.0]), h=0.1)
    assert s.y[0] == pytest.approx(2.0, abs=1e-10)


def test_step_linear_dae_hand_solution():
    s = trap_step(dae_problem(), make_state(0, [1.0], [], [], [1.0]), h=0.1)
    z1 = (1 - 0.05) / (1 + 0.05)
    assert s.z_c[0] == pytest.approx(z1, abs=1e-12)
    assert s.y[0] == pytest.approx(z1, abs=1e-10)


def test_step_nonconvergence_signal():
    # g(y) = y^2 + 1 has no real solution: corrector must give up
    prob = DaeProblem(
        n_zc=1, n_x=0, n_y=1, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda zc, zd, x, y: -zc,
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda zc, zd, x, y: y * y + 1.0,
    )
    with pytest.raises(NewtonNoConvergence):
        trap_step(prob, make_state(0, [1.0], [], [], [0.5]), h=0.1)


def test_integrate_decay_global_accuracy():
    traj, out = trap_integrate(decay_problem(), make_state(0, [1.0], [], [], []),
                               1.0, TrapConfig(h=0.01))
    assert out.completed
    assert abs(traj[-1].z_c[0] - np.exp(-1.0)) < 2e-5
    assert len(traj) == 101


def test_integrate_zero_span():
    s0 = make_state(5.0, [1.0], [], [], [])
    traj, out = trap_integrate(decay_problem(), s0, 5.0, TrapConfig())
    assert out.completed and traj == [s0]


def test_integrate_order_two():
    # halving h cuts the global error by about 4
    errs = []
    for h in (0.02, 0.01):
        traj, _ = trap_integrate(decay_problem(), make_state(0, [1.0], [], [], []),
                                 1.0, TrapConfig(h=h))
        errs.append(abs(traj[-1].z_c[0] - np.exp(-1.0)))
    ratio = errs[0] / errs[1]
    assert 3.5 <= ratio <= 4.5


def test_integrate_records_failure_time():
    # algebraic row loses solvability when z crosses 1: g = y^2 - (2 - z)... pick
    # g(y; z) = y^2 + (z - 1), solvable while z < 1; z grows linearly
    prob = DaeProblem(
        n_zc=1, n_x=0, n_y=1, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda zc, zd, x, y: np.ones(1),
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda zc, zd, x, y: y * y + (zc - 1.0),
    )
    s0 = make_state(0.0, [0.0], [], [], [1.0])
    traj, out = trap_integrate(prob, s0, 2.0, TrapConfig(h=0.05))
    assert not out.completed
    assert out.failure in ("newton", "singular")
    assert 0.5 < out.failure_time < 2.0
    assert traj[-1].t == pytest.approx(out.failure_time)


def test_event_hook_applies_discrete_change():
    prob = DaeProblem(
        n_zc=1, n_x=0, n_y=0, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda zc, zd, x, y: zd - zc,
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda *a: np.zeros(0),
    )

    def hook(state, dt):
        if state.t >= 0.5 and state.z_d[0] == 0.0:
            return state.with_zd([1.0])
        return state

    traj, out = trap_integrate(prob, make_state(0, [0.0], [0.0], [], []),
                               10.0, TrapConfig(h=0.1), event_hook=hook)
    assert out.completed
    assert traj[-1].z_c[0] == pytest.approx(1.0, abs=1e-3)


def test_matrix_is_step_jacobian_longterm():
    prob = dae_problem()
    s_prev = make_state(0, [0.8], [], [], [0.8])
    s_new = make_state(0, [0.7], [], [], [0.75])
    h = 0.3
    raw_prev = eval_raw(prob, s_prev)
    a = trap_matrix(prob, s_new, h)

    def hfun(p):
        st = s_new.with_p(p)
        return trap_residual(prob, raw_prev, s_prev.p(), p, eval_raw(prob, st), h)

    a_fd = fd_jacobian(hfun, s_new.p(), h=1e-7)
    assert np.max(np.abs(a - a_fd)) <= 1e-6 * max(1.0, np.max(np.abs(a)))


def test_matrix_is_step_jacobian_qss():
    prob = DaeProblem(
        n_zc=1, n_x=1, n_y=1, model_kind=ModelKind.QSS,
        eval_hc=lambda zc, zd, x, y: -zc + y,
        eval_f=lambda zc, zd, x, y: np.sin(x) - zc,
        eval_g=lambda zc, zd, x, y: x * y - 1.0,
    )
    s_prev = make_state(0, [0.5], [], [0.9], [1.2])
    s_new = make_state(0, [0.55], [], [0.85], [1.1])
    h = 0.2
    raw_prev = eval_raw(prob, s_prev)
    a = trap_matrix(prob, s_new, h)

    def hfun(p):
        st = s_new.with_p(p)
        return trap_residual(prob, raw_prev, s_prev.p(), p, eval_raw(prob, st), h)

    a_fd = fd_jacobian(hfun, s_new.p(), h=1e-7)
    assert np.max(np.abs(a - a_fd)) <= 1e-6 * max(1.0, np.max(np.abs(a)))
    # QSS constraint rows keep the raw f and g Jacobian
    jac = raw_jacobian(prob, s_new)
    assert np.allclose(a[1:], jac[1:])


def test_qss_step_holds_both_manifolds():
    prob = DaeProblem(
        n_zc=1, n_x=1, n_y=1, model_kind=ModelKind.QSS,
        eval_hc=lambda zc, zd, x, y: -(zc - 0.5),
        eval_f=lambda zc, zd, x, y: -(x - zc),
        eval_g=lambda zc, zd, x, y: y - x,
    )
    s0 = make_state(0, [1.0], [], [1.0], [1.0])
    s = trap_step(prob, s0, h=0.1)
    raw = eval_raw(prob, s)
    assert rms_norm(raw[1:]) <= 1e-9


def test_config_validation():
    with pytest.raises(ValueError):
        TrapConfig(h=0.0)
    with pytest.raises(ValueError):
        TrapConfig(newton_tol=-1.0)
