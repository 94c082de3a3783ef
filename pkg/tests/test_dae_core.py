import numpy as np
import pytest

from ptcdae.dae import (
    ConsistencyReport,
    DaeProblem,
    ModelKind,
    NoConvergence,
    SystemState,
    assemble_mass,
    check_consistency,
    eval_jacobian,
    eval_raw,
    eval_residual,
    make_state,
    mass_structure,
    project_consistent,
    raw_jacobian,
)
from ptcdae.numeric import NonFiniteResidual, fd_jacobian


def linear_problem(kind=ModelKind.LONG_TERM):
    """h_c = -z_c, f = -x, g = x - y (one variable per block)."""
    return DaeProblem(
        n_zc=1, n_x=1, n_y=1, model_kind=kind,
        eval_hc=lambda zc, zd, x, y: -zc,
        eval_f=lambda zc, zd, x, y: -x,
        eval_g=lambda zc, zd, x, y: x - y,
    )


def state(zc, x, y, t=0.0):
    return make_state(t, [zc], [], [x], [y])


def test_residual_stacking_and_signs():
    prob = linear_problem()
    s = state(1.0, 1.0, 1.0)
    # F = [-h_c; -f; -g] = [z_c; x; y - x]
    assert np.allclose(eval_residual(prob, s), [1.0, 1.0, 0.0])


def test_residual_zero_at_equilibrium():
    prob = linear_problem()
    s = state(0.0, 0.0, 0.0)
    assert np.max(np.abs(eval_residual(prob, s))) < 1e-12


def test_residual_rejects_nonfinite():
    prob = DaeProblem(
        n_zc=1, n_x=0, n_y=0, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda zc, zd, x, y: np.array([1.0]) / zc,
        eval_f=lambda zc, zd, x, y: np.zeros(0),
        eval_g=lambda zc, zd, x, y: np.zeros(0),
    )
    with pytest.raises(NonFiniteResidual):
        eval_residual(prob, make_state(0.0, [0.0], [], [], []))


def test_jacobian_linear_constant():
    prob = linear_problem()
    s = state(0.3, -0.2, 0.9)
    # dF/d[z_c, x, y] for F = [z_c; x; y - x]
    expected = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 1.0]])
    assert np.allclose(eval_jacobian(prob, s), expected, atol=1e-8)


def test_jacobian_matches_fd_oracle():
    def hc(zc, zd, x, y):
        return np.array([-zc[0] ** 2 + y[0]])

    def f(zc, zd, x, y):
        return np.array([np.sin(x[0]) - zc[0]])

    def g(zc, zd, x, y):
        return np.array([x[0] * y[0] - 1.0])

    prob = DaeProblem(n_zc=1, n_x=1, n_y=1, model_kind=ModelKind.LONG_TERM,
                      eval_hc=hc, eval_f=f, eval_g=g)
    s = state(0.4, 0.8, 1.3)
    jac = eval_jacobian(prob, s)
    oracle = -fd_jacobian(lambda p: eval_raw(prob, s.with_p(p)), s.p())
    assert np.max(np.abs(jac - oracle)) <= 1e-5 * max(1.0, np.max(np.abs(jac)))


def test_jacobian_ode_only_partition():
    prob = DaeProblem(
        n_zc=2, n_x=0, n_y=0, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda zc, zd, x, y: -2.0 * zc,
        eval_f=lambda zc, zd, x, y: np.zeros(0),
        eval_g=lambda zc, zd, x, y: np.zeros(0),
    )
    s = make_state(0.0, [1.0, 2.0], [], [], [])
    assert np.allclose(eval_jacobian(prob, s), 2.0 * np.eye(2), atol=1e-8)


def test_mass_long_term():
    prob = DaeProblem(
        n_zc=2, n_x=1, n_y=1, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda *a: np.zeros(2),
        eval_f=lambda *a: np.zeros(1),
        eval_g=lambda *a: np.zeros(1),
    )
    assert np.allclose(assemble_mass(prob), np.diag([1.0, 1.0, 1.0, 0.0]))
    assert mass_structure(prob).active_count == 3


def test_mass_qss():
    prob = DaeProblem(
        n_zc=2, n_x=1, n_y=1, model_kind=ModelKind.QSS,
        eval_hc=lambda *a: np.zeros(2),
        eval_f=lambda *a: np.zeros(1),
        eval_g=lambda *a: np.zeros(1),
    )
    assert np.allclose(assemble_mass(prob), np.diag([1.0, 1.0, 0.0, 0.0]))


def test_mass_degenerate_all_algebraic():
    prob = DaeProblem(
        n_zc=0, n_x=0, n_y=2, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda *a: np.zeros(0),
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda *a: np.zeros(2),
    )
    assert np.allclose(assemble_mass(prob), np.zeros((2, 2)))


def test_mass_is_idempotent_projector():
    for kind in ModelKind:
        prob = DaeProblem(
            n_zc=2, n_x=3, n_y=1, model_kind=kind,
            eval_hc=lambda *a: np.zeros(2),
            eval_f=lambda *a: np.zeros(3),
            eval_g=lambda *a: np.zeros(1),
        )
        d = assemble_mass(prob)
        assert np.allclose(d @ d, d)


def test_ode_signs_reproduce_slow_dynamics():
    # D dp/dt = -F must reproduce dz_c/dt = h_c on the pure-ODE sub-block
    prob = linear_problem()
    s = state(1.0, 0.5, 0.5)
    f_vec = eval_residual(prob, s)
    hc = prob.eval_hc(s.z_c, s.z_d, s.x, s.y)
    assert np.allclose(-f_vec[:1], hc)


def test_check_consistency_longterm():
    prob = linear_problem()
    good = check_consistency(prob, state(0.5, 0.2, 0.2), 1e-8)
    assert good.consistent and good.f_norm is None
    bad = check_consistency(prob, state(0.5, 0.2, 0.2 + 1e-3), 1e-6)
    assert not bad.consistent
    assert bad.g_norm == pytest.approx(1e-3, rel=1e-6)


def test_check_consistency_qss_needs_both_manifolds():
    prob = linear_problem(ModelKind.QSS)
    # g holds (x == y) but f = -x is far from zero
    rep = check_consistency(prob, state(0.0, 0.1, 0.1), 1e-6)
    assert not rep.consistent
    assert rep.f_norm == pytest.approx(0.1)
    rep2 = check_consistency(prob, state(0.3, 0.0, 0.0), 1e-6)
    assert rep2.consistent


def test_check_consistency_rejects_bad_tol():
    with pytest.raises(ValueError):
        check_consistency(linear_problem(), state(0, 0, 0), 0.0)


def test_project_consistent_noop_when_consistent():
    prob = linear_problem()
    s = state(0.7, 0.4, 0.4)
    out = project_consistent(prob, s, tol=1e-12)
    assert np.allclose(out.p(), s.p())


def test_project_consistent_linear_one_step():
    prob = linear_problem()
    s = state(0.7, 0.4, 0.9)  # y perturbed by 0.5
    # a single Newton step on the linear constraint restores consistency
    # (tolerance reflects the finite-difference Jacobian fallback)
    out = project_consistent(prob, s, tol=1e-10, max_iters=1)
    assert out.y[0] == pytest.approx(0.4, abs=1e-10)
    assert np.allclose(out.z_c, s.z_c) and np.allclose(out.x, s.x)


def test_project_consistent_qss_solves_both_blocks():
    prob = linear_problem(ModelKind.QSS)
    s = state(0.7, 0.3, 0.9)
    out = project_consistent(prob, s, tol=1e-12)
    assert abs(out.x[0]) < 1e-12 and abs(out.y[0]) < 1e-12
    assert out.z_c[0] == pytest.approx(0.7)


def test_project_consistent_unreachable_manifold():
    prob = DaeProblem(
        n_zc=0, n_x=0, n_y=1, model_kind=ModelKind.LONG_TERM,
        eval_hc=lambda *a: np.zeros(0),
        eval_f=lambda *a: np.zeros(0),
        eval_g=lambda zc, zd, x, y: y * y + 1.0,  # no real root
    )
    with pytest.raises(NoConvergence):
        project_consistent(prob, make_state(0, [], [], [], [0.5]), tol=1e-10)


def test_state_with_p_roundtrip():
    s = make_state(1.5, [1, 2], [9], [3], [4, 5])
    p = s.p()
    assert np.allclose(p, [1, 2, 3, 4, 5])
    s2 = s.with_p(p * 2.0)
    assert np.allclose(s2.z_c, [2, 4]) and np.allclose(s2.y, [8, 10])
    assert s2.t == 1.5 and np.allclose(s2.z_d, [9])


def test_problem_validation():
    with pytest.raises(ValueError):
        DaeProblem(
            n_zc=-1, n_x=0, n_y=0, model_kind=ModelKind.QSS,
            eval_hc=lambda *a: np.zeros(0),
            eval_f=lambda *a: np.zeros(0),
            eval_g=lambda *a: np.zeros(0),
        )
    with pytest.raises(ValueError):
        DaeProblem(
            n_zc=1, n_x=0, n_y=0, model_kind=ModelKind.QSS,
            eval_hc=lambda *a: np.zeros(1),
            eval_f=lambda *a: np.zeros(0),
            eval_g=lambda *a: np.zeros(0),
            epsilon=0.0,
        )
