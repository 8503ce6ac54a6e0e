"""Rigid-body helpers: skew operators, pose blocks, angle-axis and pose error.

Rotations are 3x3 and poses 4x4 float arrays. Spatial vectors are ordered
translation first, rotation second: ``(vx, vy, vz, wx, wy, wz)``.
"""

import numpy as np

from etskin import _kernels
from etskin.errors import InvalidPose, NotAugmentedSkew, NotSkewSymmetric

SKEW_TOL = 1e-8
ORTHO_TOL = 1e-10


def skew3(v):
    """Skew-symmetric matrix ``S`` with ``S @ w == cross(v, w)``."""
    x, y, z = np.asarray(v, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vex3(S):
    S = np.asarray(S, dtype=float)
    if S.shape != (3, 3) or np.max(np.abs(S + S.T)) > SKEW_TOL:
        raise NotSkewSymmetric("matrix is not skew-symmetric")
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def skew6(s):
    """Augmented skew matrix of a spatial vector ``(v, w)``."""
    s = np.asarray(s, dtype=float)
    out = np.zeros((4, 4))
    out[:3, :3] = skew3(s[3:])
    out[:3, 3] = s[:3]
    return out


def vex6(S):
    S = np.asarray(S, dtype=float)
    if S.shape != (4, 4):
        raise NotAugmentedSkew(f"expected a 4x4 matrix, got shape {S.shape}")
    if np.max(np.abs(S[3])) > SKEW_TOL:
        raise NotAugmentedSkew("bottom row is not zero")
    try:
        w = vex3(S[:3, :3])
    except NotSkewSymmetric as exc:
        raise NotAugmentedSkew("rotation block is not skew-symmetric") from exc
    return np.concatenate([S[:3, 3], w])


def rho(T):
    """Rotation block of any 4x4 matrix (poses and pose derivatives alike)."""
    return np.asarray(T)[:3, :3]


def tau(T):
    """Translation block of any 4x4 matrix."""
    return np.asarray(T)[:3, 3]


def make_pose(R=None, t=None):
    T = np.eye(4)
    if R is not None:
        T[:3, :3] = R
    if t is not None:
        T[:3, 3] = t
    return T


def rotation(axis, angle):
    """Rotation by ``angle`` radians about frame axis ``'x'``, ``'y'`` or ``'z'``."""
    c, s = np.cos(angle), np.sin(angle)
    if axis == "x":
        return np.array([[1, 0, 0], [0, c, -s], [0, s, c]], dtype=float)
    if axis == "y":
        return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]], dtype=float)
    if axis == "z":
        return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=float)
    raise ValueError(f"unknown axis {axis!r}")


def validate_rotation(R, tol=ORTHO_TOL):
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3) or not np.all(np.isfinite(R)):
        raise InvalidPose("rotation must be a finite 3x3 matrix")
    if np.max(np.abs(R @ R.T - np.eye(3))) > tol:
        raise InvalidPose("rotation is not orthonormal")
    if abs(np.linalg.det(R) - 1.0) > tol:
        raise InvalidPose("rotation determinant is not +1")
    return R


def validate_pose(T, tol=ORTHO_TOL):
    T = np.asarray(T, dtype=float)
    if T.shape != (4, 4) or not np.all(np.isfinite(T)):
        raise InvalidPose("pose must be a finite 4x4 matrix")
    if not np.array_equal(T[3], [0.0, 0.0, 0.0, 1.0]):
        raise InvalidPose("pose bottom row must be (0, 0, 0, 1)")
    validate_rotation(T[:3, :3], tol)
    return T


def angle_axis(R):
    """Euler vector (axis times angle) of a rotation matrix.

    The general case uses ``atan2(|l|, trace - 1) / |l| * l`` with ``l`` built
    from the antisymmetric part of ``R``. Diagonal matrices other than the
    identity are half turns about a frame axis and use
    ``(pi / 2) * (diag(R) + 1)``. A matrix counts as diagonal when every
    off-diagonal entry is below 1e-6 in magnitude; near-identity matrices stay
    on the general branch, whose small-angle limit is ``l / 2``.
    """
    return _kernels.angle_axis(np.ascontiguousarray(R, dtype=float))


def pose_error(current, desired):
    """6-vector from ``current`` to ``desired``: translation difference, then
    the Euler vector of ``R_desired @ R_current.T``. Both in the world frame."""
    return _kernels.pose_error(
        np.ascontiguousarray(current, dtype=float),
        np.ascontiguousarray(desired, dtype=float),
    )
