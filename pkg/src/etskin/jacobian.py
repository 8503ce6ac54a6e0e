"""Pose derivatives and the 6xn manipulator Jacobian.

``jacobian_naive`` builds every column from the full chain-rule product and
costs O(n^2). ``jacobian_fast`` reads each column straight off the joint frame
orientation and the suffix translation, O(n); it runs in the compiled kernel.
"""

from dataclasses import dataclass

import numpy as np

from etskin import _kernels
from etskin.errors import FrameMismatch, JointIndexOutOfRange, NotAJoint
from etskin.geometry import rho, tau, vex3
from etskin.model import eval_et, fkine, joint_config, mu

WORLD = "world"
EE = "ee"


def _gen(rows):
    G = np.zeros((4, 4))
    for r, c, v in rows:
        G[r, c] = v
    G.flags.writeable = False
    return G


# keyed by (kind, axis)
GENERATORS = {
    ("rotation", "x"): _gen([(1, 2, -1.0), (2, 1, 1.0)]),
    ("rotation", "y"): _gen([(0, 2, 1.0), (2, 0, -1.0)]),
    ("rotation", "z"): _gen([(0, 1, -1.0), (1, 0, 1.0)]),
    ("translation", "x"): _gen([(0, 3, 1.0)]),
    ("translation", "y"): _gen([(1, 3, 1.0)]),
    ("translation", "z"): _gen([(2, 3, 1.0)]),
}


@dataclass(frozen=True)
class Jacobian:
    """6xn Jacobian: translational rows first, then rotational rows."""

    matrix: np.ndarray
    frame: str = WORLD

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != 6:
            raise ValueError(f"a Jacobian is 6xn, got shape {m.shape}")
        if self.frame not in (WORLD, EE):
            raise ValueError(f"frame must be 'world' or 'ee', got {self.frame!r}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def n(self):
        return self.matrix.shape[1]

    @property
    def Jv(self):
        return self.matrix[:3]

    @property
    def Jw(self):
        return self.matrix[3:]


def et_generator(et):
    """se(3) generator of a joint term; negated for a flipped revolute joint."""
    if not et.is_joint:
        raise NotAJoint(f"{et} is a constant term")
    G = GENERATORS[(et.kind, et.axis)]
    return -G if et.flip else G.copy()


def et_derivative(et, q):
    """d E / d q_j for the joint term ``et``; the (4, 4) entry is 0."""
    G = et_generator(et)
    if et.kind == "translation":
        return G
    return G @ eval_et(et, q)


def pose_partial(ets, q, j):
    """Partial derivative of the end-effector pose with respect to joint ``j``."""
    q = joint_config(ets, q)
    if not 0 <= j < ets.n:
        raise JointIndexOutOfRange(f"joint {j} not in 0..{ets.n - 1}")
    m = mu(ets, j)
    out = np.eye(4)
    for i, et in enumerate(ets.terms):
        out = out @ (et_derivative(et, q) if i == m else eval_et(et, q))
    return out


def jacobian_naive(ets, q):
    """World-frame Jacobian from the chain rule, column by column."""
    q = joint_config(ets, q)
    T = np.eye(4)
    for et in ets.terms:
        T = T @ eval_et(et, q)
    R = rho(T)
    J = np.zeros((6, ets.n))
    for j in range(ets.n):
        dT = pose_partial(ets, q, j)
        J[:3, j] = tau(dT)
        J[3:, j] = vex3(rho(dT) @ R.T)
    return Jacobian(J, WORLD)


def jacobian_fast(ets, q):
    """World-frame Jacobian in O(n), one forward and one reverse pass."""
    q = joint_config(ets, q)
    return Jacobian(_kernels.jacob0(*ets.encoded, q), WORLD)


def to_ee_frame(J, T):
    """Re-express a world-frame Jacobian in the end-effector frame of pose ``T``."""
    if not isinstance(J, Jacobian):
        J = Jacobian(J, WORLD)
    if J.frame != WORLD:
        raise FrameMismatch("Jacobian is already in the end-effector frame")
    Rt = rho(T).T
    return Jacobian(np.vstack([Rt @ J.Jv, Rt @ J.Jw]), EE)


def jacobe(ets, q):
    q = joint_config(ets, q)
    return to_ee_frame(jacobian_fast(ets, q), fkine(ets, q))
