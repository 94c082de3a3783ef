import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptcdae.dae import DaeProblem, ModelKind, make_state
from ptcdae.numeric import rms_norm
from ptcdae.ptc import (
    HookResult,
    PtcConfig,
    SolveStatus,
    backward_euler_first_newton,
    ptc_solve,
    ptc_step,
    ser_update,
)


def ode_problem(hc, n):
    """Pure slow-ODE problem (identity mass in the long-term form)."""
    return DaeProblem(
        n_zc=n, n_x=0, n_y=0, model_kind=ModelKind.LONG_TERM,
        eval_hc=hc,
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda *a: np.zeros(0),
    )


def ode_state(vals):
    return make_state(0.0, vals, [], [], [])


# -- SER step law ------------------------------------------------------------


def test_ser_ratio():
    assert ser_update(0.1, 2.0, 1.0, 1e6) == pytest.approx(0.2)


def test_ser_shrinks_on_residual_growth():
    assert ser_update(0.1, 1.0, 2.0, 1e6) == pytest.approx(0.05)


def test_ser_cap():
    assert ser_update(1e5, 1.0, 1e-4, 1e6) == pytest.approx(1e6)


def test_ser_rejects_nonpositive():
    with pytest.raises(ValueError):
        ser_update(0.1, 0.0, 1.0, 1e6)


@settings(max_examples=300, deadline=None)
@given(
    delta=st.floats(min_value=1e-8, max_value=1e6),
    f_prev=st.floats(min_value=1e-10, max_value=1e8),
    f_cur=st.floats(min_value=1e-10, max_value=1e8),
    delta_max=st.floats(min_value=1e-6, max_value=1e8),
)
def test_ser_properties(delta, f_prev, f_cur, delta_max):
    out = ser_update(delta, f_prev, f_cur, delta_max)
    assert out == pytest.approx(min(delta * f_prev / f_cur, delta_max))
    assert out <= delta_max
    if f_cur < f_prev:
        assert out > delta or out == delta_max
    if f_cur > f_prev and delta <= delta_max:
        assert out < delta


# -- single continuation step -------------------------------------------------


def test_step_scalar_hand_value():
    prob = ode_problem(lambda zc, zd, x, y: -zc, 1)  # F = z
    s, fnorm = ptc_step(prob, ode_state([1.0]), delta=1.0)
    assert s.z_c[0] == pytest.approx(0.5)
    assert fnorm == pytest.approx(0.5)


def test_step_newton_limit():
    prob = ode_problem(lambda zc, zd, x, y: -zc, 1)
    s, _ = ptc_step(prob, ode_state([1.0]), delta=1e9)
    assert abs(s.z_c[0]) < 1e-8


def test_step_algebraic_row_sees_pure_newton():
    prob = DaeProblem(
        n_zc=0, n_x=0, n_y=1, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda *a: np.zeros(0),
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda zc, zd, x, y: 2.0 - y,  # F = y - 2
    )
    for delta in (1e-6, 1.0, 1e6):
        s, fnorm = ptc_step(prob, make_state(0, [], [], [], [7.0]), delta=delta)
        assert s.y[0] == pytest.approx(2.0)
        assert fnorm < 1e-8  # one step lands on the root (FD-Jacobian noise)


def test_step_leaves_time_and_zd_alone():
    prob = DaeProblem(
        n_zc=1, n_x=0, n_y=0, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda zc, zd, x, y: -zc,
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda *a: np.zeros(0),
    )
    s0 = make_state(4.5, [1.0], [3.0], [], [])
    s, _ = ptc_step(prob, s0, delta=0.5)
    assert s.t == 4.5 and np.allclose(s.z_d, [3.0])


# -- implicit-Euler corrector identity ----------------------------------------


def test_backward_euler_identity_scalar():
    prob = ode_problem(lambda zc, zd, x, y: -zc, 1)
    s = ode_state([1.0])
    a = ptc_step(prob, s, delta=1.0)[0]
    b = backward_euler_first_newton(prob, s, delta=1.0)
    assert b.z_c[0] == pytest.approx(0.5)
    assert np.allclose(a.p(), b.p(), rtol=0, atol=1e-15)


def test_backward_euler_identity_random_linear():
    rng = np.random.default_rng(11)
    a_mat = rng.normal(size=(4, 4))
    prob = ode_problem(lambda zc, zd, x, y: -(a_mat @ zc), 4)
    s = ode_state(rng.normal(size=4))
    p1 = ptc_step(prob, s, delta=0.3)[0].p()
    p2 = backward_euler_first_newton(prob, s, delta=0.3).p()
    assert np.max(np.abs(p1 - p2)) <= 1e-12 * max(1.0, np.max(np.abs(p1)))


def test_backward_euler_small_delta_freezes():
    prob = ode_problem(lambda zc, zd, x, y: -zc + 0.3, 1)
    s = ode_state([2.0])
    out = backward_euler_first_newton(prob, s, delta=1e-12)
    assert out.z_c[0] == pytest.approx(2.0, abs=1e-9)


def test_backward_euler_requires_invertible_mass():
    prob = DaeProblem(
        n_zc=0, n_x=0, n_y=1, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda *a: np.zeros(0),
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda zc, zd, x, y: -y,
    )
    with pytest.raises(ValueError):
        backward_euler_first_newton(prob, make_state(0, [], [], [], [1.0]), 0.1)


# -- full solve ----------------------------------------------------------------


def test_solve_linear_stable_monotone_delta_growth():
    prob = ode_problem(lambda zc, zd, x, y: -zc, 1)
    cfg = PtcConfig(delta0=0.1, delta_max=1e3, f_tol=1e-8, max_iters=100)
    out = ptc_solve(prob, ode_state([1.0]), cfg)
    assert out.status is SolveStatus.CONVERGED
    assert abs(out.final_state.z_c[0]) <= 1e-8
    deltas = [r.delta for r in out.trace.iterations]
    # delta grows strictly until the cap binds, then stays there
    capped = [i for i, d in enumerate(deltas) if d == cfg.delta_max]
    head = deltas[: capped[0] + 1] if capped else deltas
    assert all(b > a for a, b in zip(head, head[1:]))
    assert all(deltas[i] == cfg.delta_max for i in capped)
    assert max(deltas) <= cfg.delta_max


def test_solve_no_root_hits_iteration_bound():
    # F(x) = x^2 + 1 has no zero; h_c = -(x^2 + 1)
    prob = ode_problem(lambda zc, zd, x, y: -(zc * zc + 1.0), 1)
    cfg = PtcConfig(delta0=0.1, delta_max=10.0, f_tol=1e-10, max_iters=60)
    out = ptc_solve(prob, ode_state([0.5]), cfg)
    assert out.status is SolveStatus.ITERATION_BOUND_REACHED
    assert len(out.trace.iterations) <= 60


def test_solve_converged_in_zero_iterations_at_equilibrium():
    prob = ode_problem(lambda zc, zd, x, y: -zc, 1)
    out = ptc_solve(prob, ode_state([0.0]), PtcConfig())
    assert out.status is SolveStatus.CONVERGED
    assert len(out.trace.iterations) == 0


def test_solve_converged_status_rechecked_independently():
    prob = ode_problem(lambda zc, zd, x, y: np.sin(-zc), 2)
    cfg = PtcConfig(f_tol=1e-9, max_iters=200)
    out = ptc_solve(prob, ode_state([0.4, -0.3]), cfg)
    assert out.status is SolveStatus.CONVERGED
    from ptcdae.dae import eval_residual

    assert rms_norm(eval_residual(prob, out.final_state)) <= cfg.f_tol


def test_solve_counts_work():
    prob = ode_problem(lambda zc, zd, x, y: -zc, 1)
    out = ptc_solve(prob, ode_state([1.0]), PtcConfig(f_tol=1e-8))
    c = out.trace.counters
    n = len(out.trace.iterations)
    assert c.linear_solves == n == c.jacobian_evals
    assert c.residual_evals == n + 1


def test_solve_event_hook_jump_resets_delta():
    prob = DaeProblem(
        n_zc=1, n_x=0, n_y=0, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda zc, zd, x, y: -(zc - zd),  # equilibrium tracks z_d
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda *a: np.zeros(0),
    )
    cfg = PtcConfig(delta0=0.05, delta_max=1e3, f_tol=1e-9, max_iters=200)
    fired = []

    def hook(state, delta_used, itern):
        if not fired and abs(state.z_c[0] - state.z_d[0]) < 1e-5:
            fired.append(itern)
            return HookResult(state.with_zd([0.3]), cfg.delta0,
                              refreshed=True, armed=False)
        return HookResult(state, delta_used)

    out = ptc_solve(prob, make_state(0, [1.0], [1.5], [], []), cfg, event_hook=hook)
    assert out.status is SolveStatus.CONVERGED
    assert out.final_state.z_c[0] == pytest.approx(0.3, abs=1e-8)
    assert fired and out.trace.restart_iterations == fired
    # first iteration after the jump runs at delta0 again
    k = fired[0]
    assert out.trace.iterations[k].delta == cfg.delta0
    assert len(out.trace.entry_states) == 2


def test_solve_armed_hook_defers_convergence():
    prob = ode_problem(lambda zc, zd, x, y: -zc, 1)
    calls = []

    def hook(state, delta_used, itern):
        calls.append(itern)
        return HookResult(state, delta_used, armed=len(calls) < 3)

    out = ptc_solve(prob, ode_state([1e-9]), PtcConfig(f_tol=1e-6, max_iters=50),
                    event_hook=hook)
    assert out.status is SolveStatus.CONVERGED
    assert len(calls) >= 3


def test_solve_stagnation_guard():
    # F = x^2 + 1 never reaches the tolerance; with a shrink budget of one,
    # the first residual increase must trip the guard long before max_iters
    prob = ode_problem(lambda zc, zd, x, y: -(zc * zc + 1.0), 1)
    cfg = PtcConfig(delta0=1.0, delta_max=1e6, f_tol=1e-14,
                    max_iters=10_000, max_delta_shrink=1)
    out = ptc_solve(prob, ode_state([0.5]), cfg)
    assert out.status is SolveStatus.ITERATION_BOUND_REACHED
    assert "shrink" in out.trace.stop_reason
    assert len(out.trace.iterations) < 10_000


def test_config_validation():
    with pytest.raises(ValueError):
        PtcConfig(delta0=0.0)
    with pytest.raises(ValueError):
        PtcConfig(delta0=2.0, delta_max=1.0)
    with pytest.raises(ValueError):
        PtcConfig(f_tol=0.0)
    with pytest.raises(ValueError):
        PtcConfig(max_iters=0)
    with pytest.raises(ValueError):
        PtcConfig(norm_kind="nope")
