import numpy as np
import pytest

from stringpend.so3 import (
    cayley,
    cayley_inv,
    exp_so3,
    hat,
    log_so3,
    orthogonality_error,
    vee,
)


def test_hat_basis_vector():
    assert np.array_equal(
        hat([1.0, 0.0, 0.0]),
        np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
    )


def test_hat_zero():
    assert np.array_equal(hat([0.0, 0.0, 0.0]), np.zeros((3, 3)))


def test_hat_is_cross_product():
    # cross product by hand: (2*6-3*5, 3*4-1*6, 1*5-2*4) = (-3, 6, -3)
    assert np.allclose(hat([1, 2, 3]) @ [4, 5, 6], [-3, 6, -3])
    rng = np.random.default_rng(0)
    for _ in range(100):
        v, w = rng.standard_normal(3), rng.standard_normal(3)
        assert np.allclose(hat(v) @ w, np.cross(v, w), atol=1e-14)


def test_vee_round_trip():
    v = np.array([1.0, 2.0, 3.0])
    assert np.array_equal(vee(hat(v)), v)
    assert np.array_equal(vee(np.zeros((3, 3))), np.zeros(3))


def test_vee_rejects_non_skew():
    with pytest.raises(ValueError):
        vee(np.eye(3))


def test_hat_vee_mutually_inverse_random():
    rng = np.random.default_rng(1)
    for _ in range(200):
        v = rng.standard_normal(3)
        S = hat(v)
        assert np.array_equal(hat(vee(S)), S)


def test_cayley_of_zero_is_identity():
    assert np.array_equal(cayley([0.0, 0.0, 0.0]), np.eye(3))


def test_cayley_matches_matrix_inverse_form():
    # oracle: the defining rational form (I + X)(I - X)^-1 via a linear solve
    rng = np.random.default_rng(2)
    for _ in range(100):
        x = rng.standard_normal(3) * rng.uniform(0.01, 5.0)
        X = hat(x)
        oracle = (np.eye(3) + X) @ np.linalg.inv(np.eye(3) - X)
        assert np.allclose(cayley(x), oracle, atol=1e-12)


def test_cayley_e1_is_quarter_turn():
    # cay(e1) rotates about e1 by 2*atan(1) = 90 degrees
    R = cayley([1.0, 0.0, 0.0])
    assert np.allclose(R @ [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], atol=1e-15)


def test_cayley_orthogonal_to_round_off():
    rng = np.random.default_rng(3)
    for _ in range(200):
        R = cayley(rng.standard_normal(3) * rng.uniform(0.0, 10.0))
        assert R @ R.T == pytest.approx(np.eye(3), abs=1e-14)


def test_cayley_negation_is_transpose():
    rng = np.random.default_rng(4)
    for _ in range(100):
        x = rng.standard_normal(3)
        assert np.allclose(cayley(-x), cayley(x).T, atol=1e-15)


def test_cayley_inv_round_trips():
    assert np.array_equal(cayley_inv(np.eye(3)), np.zeros(3))
    x = np.array([0.1, -0.2, 0.3])
    assert np.allclose(cayley_inv(cayley(x)), x, atol=1e-15)
    rng = np.random.default_rng(5)
    for _ in range(100):
        x = rng.standard_normal(3)
        R = cayley(x)
        assert np.allclose(cayley(cayley_inv(R)), R, atol=1e-12)


def test_cayley_inv_rejects_half_turn():
    R_pi = np.diag([-1.0, -1.0, 1.0])  # 180 degrees about e3
    with pytest.raises(ValueError):
        cayley_inv(R_pi)


def test_exp_of_zero_is_identity():
    assert np.array_equal(exp_so3([0.0, 0.0, 0.0]), np.eye(3))


def test_exp_quarter_turn_about_e1():
    R = exp_so3([np.pi / 2.0, 0.0, 0.0])
    assert np.allclose(R @ [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], atol=1e-15)


def test_exp_pure_spin_about_e3():
    w = 0.7
    R = exp_so3([0.0, 0.0, w])
    assert np.allclose(R, [[np.cos(w), -np.sin(w), 0.0], [np.sin(w), np.cos(w), 0.0], [0.0, 0.0, 1.0]])


def test_exp_log_round_trip():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(1000):
        v = rng.standard_normal(3)
        v *= rng.uniform(0.0, 3.0) / max(np.linalg.norm(v), 1e-300)
        worst = max(worst, np.max(np.abs(log_so3(exp_so3(v)) - v)))
    assert worst < 1e-12


def test_log_rejects_near_pi():
    with pytest.raises(ValueError):
        log_so3(exp_so3([np.pi - 1e-9, 0.0, 0.0]))


def test_exp_outputs_orthogonal():
    rng = np.random.default_rng(7)
    for _ in range(200):
        R = exp_so3(rng.standard_normal(3))
        assert orthogonality_error(R) <= 1e-13
        assert abs(np.linalg.det(R) - 1.0) <= 1e-13


def test_exp_agrees_with_half_parameter_cayley_to_third_order():
    # cay(v/2) rotates about v by 2 atan(|v|/2) = |v| - |v|^3/12 + ..., so
    # |exp(v) - cay(v/2)| = O(|v|^3): halving v shrinks the gap ~8x.
    # (cay(v) itself turns by 2 atan(|v|), a first-order mismatch with exp.)
    rng = np.random.default_rng(8)
    for _ in range(20):
        v = 0.4 * rng.standard_normal(3)
        gaps = []
        for k in range(3):
            w = v / 2.0**k
            gaps.append(np.linalg.norm(exp_so3(w) - cayley(w / 2.0)))
        for g0, g1 in zip(gaps, gaps[1:]):
            assert 6.0 < g0 / g1 < 10.0


def test_orthogonality_error_values():
    assert orthogonality_error(np.eye(3)) == 0.0
    assert orthogonality_error(np.diag([2.0, 1.0, 1.0])) == pytest.approx(3.0)
    # rotations that are exactly representable in floats
    quarter_turn = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    assert orthogonality_error(quarter_turn) <= 1e-15
    assert orthogonality_error(np.diag([-1.0, 1.0, -1.0])) <= 1e-15
