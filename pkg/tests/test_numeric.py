import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptcdae.numeric import (
    NonFiniteResidual,
    SingularMatrix,
    fd_jacobian,
    lu_factor,
    lu_solve,
    max_norm,
    rms_norm,
    solve_linear,
)


def test_solve_identity():
    assert np.allclose(solve_linear(np.eye(3), [1.0, 2.0, 3.0]), [1, 2, 3])


def test_solve_diagonal():
    a = np.array([[2.0, 0.0], [0.0, 4.0]])
    assert np.allclose(solve_linear(a, [2.0, 8.0]), [1.0, 2.0])


def test_solve_rank_deficient_raises():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrix):
        solve_linear(a, [1.0, 1.0])


def test_solve_needs_pivoting():
    # zero leading diagonal forces a row swap
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(solve_linear(a, [3.0, 7.0]), [7.0, 3.0])


def test_solve_nonfinite_matrix_rejected():
    a = np.array([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(NonFiniteResidual):
        solve_linear(a, [1.0, 1.0])


def test_rms_norm_values():
    assert rms_norm([0.0, 0.0, 0.0, 0.0]) == 0.0
    assert abs(rms_norm([3.0, 4.0]) - 5.0 / np.sqrt(2.0)) < 1e-15
    assert abs(rms_norm([1.0, 1.0, 1.0, 1.0]) - 1.0) < 1e-15
    assert rms_norm(np.zeros(0)) == 0.0


def test_max_norm():
    assert max_norm([-3.0, 2.0]) == 3.0


@given(
    c=st.floats(min_value=-100, max_value=100, allow_nan=False),
    vals=st.lists(st.floats(min_value=-10, max_value=10), min_size=1, max_size=12),
)
def test_rms_norm_absolutely_homogeneous(c, vals):
    v = np.array(vals)
    assert rms_norm(c * v) == pytest.approx(abs(c) * rms_norm(v), rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**31 - 1))
def test_solve_random_well_conditioned(n, seed):
    rng = np.random.default_rng(seed)
    # condition number below 1e6 by construction of singular values
    q1, _ = np.linalg.qr(rng.normal(size=(n, n)))
    q2, _ = np.linalg.qr(rng.normal(size=(n, n)))
    sv = np.logspace(0, -np.log10(rng.uniform(1, 1e5)), n)
    a = q1 @ np.diag(sv) @ q2
    b = rng.normal(size=n)
    x = solve_linear(a, b)
    assert np.linalg.norm(a @ x - b) <= 1e-8 * max(1.0, np.linalg.norm(b))


def test_lu_roundtrip():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(5, 5)) + 5 * np.eye(5)
    lu, piv = lu_factor(a)
    for _ in range(3):
        b = rng.normal(size=5)
        assert np.allclose(a @ lu_solve(lu, piv, b), b, atol=1e-12)


def test_fd_jacobian_linear_scalar():
    j = fd_jacobian(lambda x: x.copy(), np.array([1.0]), h=1e-6)
    assert abs(j[0, 0] - 1.0) < 1e-8


def test_fd_jacobian_hand_case():
    def f(v):
        x, y = v
        return np.array([x * x, x * y])

    j = fd_jacobian(f, np.array([2.0, 3.0]), h=1e-5)
    assert np.allclose(j, [[4.0, 0.0], [3.0, 2.0]], atol=1e-6)


def test_fd_jacobian_sine():
    j = fd_jacobian(lambda x: np.sin(x), np.array([0.0]))
    assert abs(j[0, 0] - 1.0) < 1e-8


def test_fd_jacobian_quadratic_exact_to_rounding():
    # central differences are exact on polynomials of degree <= 2
    a = np.array([[1.0, 2.0, 0.0], [0.5, -1.0, 3.0], [0.0, 1.0, 1.0]])

    def f(v):
        return np.array([v @ a[0] * v[0], v @ a[1] + 2.0, (v * v) @ a[2]])

    x = np.array([0.3, -0.7, 1.1])
    analytic = np.array([
        [2 * a[0, 0] * x[0] + a[0, 1] * x[1] + a[0, 2] * x[2],
         a[0, 1] * x[0], a[0, 2] * x[0]],
        a[1],
        [0.0, 2 * a[2, 1] * x[1], 2 * a[2, 2] * x[2]],
    ])
    j = fd_jacobian(f, x, h=1e-5)
    assert np.allclose(j, analytic, atol=5e-10)


def test_fd_jacobian_rejects_nonfinite():
    def f(v):
        with np.errstate(invalid="ignore"):
            return np.log(v)

    with pytest.raises(NonFiniteResidual):
        fd_jacobian(f, np.array([0.0]), h=1e-7)


def test_fd_jacobian_rejects_bad_step():
    with pytest.raises(ValueError):
        fd_jacobian(lambda x: x, np.array([1.0]), h=0.0)
