"""Exact-structure operations on rotation matrices and the so(3) algebra.

Rotations are plain 3x3 float ndarrays acting on column vectors. Every map
here lands on the group up to round-off by construction; nothing is ever
re-projected onto SO(3).
"""

from __future__ import annotations

import numpy as np

# cayley_inv and log_so3 are singular at rotation angle pi; anything closer
# than this margin is rejected. The integrator takes small per-step rotations,
# so this path is unreachable in normal stepping.
ANGLE_SINGULAR_MARGIN = 1e-6

_EYE3 = np.eye(3)


def hat(v) -> np.ndarray:
    """Skew matrix of a 3-vector: hat(v) @ w == np.cross(v, w)."""
    v = np.asarray(v, dtype=float)
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def vee(S, tol: float = 1e-10) -> np.ndarray:
    """Axial vector of a skew matrix; inverse of hat.

    Rejects input whose symmetric part exceeds tol in Frobenius norm.
    """
    S = np.asarray(S, dtype=float)
    defect = np.linalg.norm(S + S.T)
    if defect > tol:
        raise ValueError(
            f"matrix is not skew-symmetric: ||S + S^T|| = {defect:.3e} > {tol:.1e}"
        )
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def cayley(x) -> np.ndarray:
    """Cayley transform (I + hat(x)) (I - hat(x))^-1, defined for all x.

    Evaluated in the algebraically identical closed form

        I + 2/(1 + |x|^2) (hat(x) + hat(x)^2),

    which needs no matrix inverse and is orthogonal to round-off.
    """
    x = np.asarray(x, dtype=float)
    X = hat(x)
    c = 2.0 / (1.0 + x @ x)
    return _EYE3 + c * (X + X @ X)


def cayley_inv(R) -> np.ndarray:
    """Cayley parameter of a rotation: cayley(cayley_inv(R)) == R.

    Uses R - R^T = 4/(1+|x|^2) hat(x) together with
    trace(R) = (3 - |x|^2)/(1 + |x|^2), i.e. x = vee(R - R^T)/(1 + trace R).
    Undefined as the rotation angle approaches pi (trace -> -1).
    """
    R = np.asarray(R, dtype=float)
    t = float(np.trace(R))
    angle = float(np.arccos(np.clip((t - 1.0) / 2.0, -1.0, 1.0)))
    if angle > np.pi - ANGLE_SINGULAR_MARGIN:
        raise ValueError(
            f"rotation angle {angle:.8f} rad is too close to pi for the Cayley parametrization"
        )
    return vee(R - R.T) / (1.0 + t)


def exp_so3(v) -> np.ndarray:
    """Rodrigues formula: matrix exponential of hat(v)."""
    v = np.asarray(v, dtype=float)
    theta = float(np.linalg.norm(v))
    X = hat(v)
    a = np.sinc(theta / np.pi)  # sin(theta)/theta
    b = 0.5 * np.sinc(theta / (2.0 * np.pi)) ** 2  # (1 - cos(theta))/theta^2
    return _EYE3 + a * X + b * (X @ X)


def log_so3(R) -> np.ndarray:
    """Axial vector of the principal matrix logarithm of a rotation.

    Requires the rotation angle to stay below pi by ANGLE_SINGULAR_MARGIN.
    """
    R = np.asarray(R, dtype=float)
    t = float(np.trace(R))
    angle = float(np.arccos(np.clip((t - 1.0) / 2.0, -1.0, 1.0)))
    if angle > np.pi - ANGLE_SINGULAR_MARGIN:
        raise ValueError(
            f"rotation angle {angle:.8f} rad is too close to pi for the matrix logarithm"
        )
    # log R = angle/(2 sin angle) (R - R^T); sinc handles angle -> 0.
    return vee(R - R.T) / (2.0 * np.sinc(angle / np.pi))


def orthogonality_error(R) -> float:
    """Frobenius norm of I - R^T R; zero for an exact rotation."""
    R = np.asarray(R, dtype=float)
    return float(np.linalg.norm(_EYE3 - R.T @ R))


def require_rotation(R, tol: float = 1e-12, name: str = "R") -> np.ndarray:
    """Validate a rotation matrix (orthogonal within tol, positive determinant)."""
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise ValueError(f"{name} must be a 3x3 matrix, got shape {R.shape}")
    err = orthogonality_error(R)
    if err > tol:
        raise ValueError(f"{name} is not orthogonal: ||I - R^T R|| = {err:.3e} > {tol:.1e}")
    if np.linalg.det(R) <= 0.0:
        raise ValueError(f"{name} has non-positive determinant")
    return R
