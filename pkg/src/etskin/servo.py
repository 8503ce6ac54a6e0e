"""Resolved-rate motion control and position-based servoing.

The servo loop commands ``nu = K e`` with ``K = diag(kt, kt, kt, kr, kr, kr)``,
caps ``|nu|`` at ``v_max`` and stops once ``|e|`` falls to ``e_min``. The norms
mix metres and radians, exactly as the stacked error vector does.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from etskin import _kernels
from etskin.errors import SingularJacobian
from etskin.geometry import pose_error
from etskin.jacobian import WORLD, Jacobian
from etskin.model import joint_config

PINV_RCOND = 1e-8

ARRIVED = "arrived"
MAX_STEPS = "max_steps"
SINGULAR = "singular"


@dataclass(frozen=True)
class ServoConfig:
    kt: float = 2.0
    kr: float = 2.0
    v_max: float = 0.2
    e_min: float = 1e-4
    dt: float = 0.02
    max_steps: int = 5000

    def __post_init__(self):
        if self.kt <= 0 or self.kr <= 0:
            raise ValueError("gains must be positive")
        if not self.v_max > 0:
            raise ValueError("v_max must be positive")
        if self.e_min < 0:
            raise ValueError("e_min must be non-negative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")

    @property
    def gain(self):
        return np.array([self.kt] * 3 + [self.kr] * 3)


@dataclass
class ServoLog:
    """One record per control step, plus the terminal status."""

    dt: float
    steps: list = field(default_factory=list)
    status: str = MAX_STEPS

    def append(self, q, e, nu):
        k = len(self.steps)
        self.steps.append((k, k * self.dt, np.array(q), np.array(e), np.array(nu)))

    def __len__(self):
        return len(self.steps)

    @property
    def t(self):
        return np.array([s[1] for s in self.steps])

    @property
    def q(self):
        return np.array([s[2] for s in self.steps])

    @property
    def e(self):
        return np.array([s[3] for s in self.steps])

    @property
    def norm_e(self):
        return np.linalg.norm(self.e, axis=1)

    @property
    def norm_nu(self):
        return np.array([np.linalg.norm(s[4]) for s in self.steps])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = len(self.steps[0][2]) if self.steps else 0
        w.writerow(["step", "t", "normE", "normNu"]
                   + [f"e{i}" for i in range(1, 7)] + [f"q{i}" for i in range(1, n + 1)])
        for k, t, q, e, nu in self.steps:
            row = [t, np.linalg.norm(e), np.linalg.norm(nu), *e, *q]
            w.writerow([k] + [f"{v:.17g}" for v in row])
        return buf.getvalue()


def rrmc_qd(J, nu, strict=False):
    """Joint rates realising spatial velocity ``nu`` with world-frame ``J``.

    A square, well-conditioned ``J`` is inverted exactly; otherwise the SVD
    pseudoinverse (singular values below 1e-8 sigma_max dropped) gives the
    minimum-norm rates. ``strict`` raises SingularJacobian when the condition
    number exceeds 1e12.
    """
    if isinstance(J, Jacobian):
        if J.frame != WORLD:
            raise ValueError("rrmc_qd needs a world-frame Jacobian")
        J = J.matrix
    J = np.asarray(J, dtype=float)
    nu = np.asarray(nu, dtype=float)
    s = np.linalg.svd(J, compute_uv=False)
    ill = not (s[-1] > 0 and s[0] <= _kernels.COND_LIMIT * s[-1])
    if strict and ill:
        raise SingularJacobian("Jacobian condition number exceeds 1e12")
    if J.shape[1] == 6 and not ill:
        return np.linalg.solve(J, nu)
    return np.linalg.pinv(J, rcond=PINV_RCOND) @ nu


def pbs_velocity(current, desired, cfg):
    """Capped proportional spatial velocity toward ``desired``.

    Returns ``(nu, arrived)``; ``arrived`` is set, with zero velocity, once
    ``|e| <= e_min``.
    """
    e = pose_error(current, desired)
    if np.linalg.norm(e) <= cfg.e_min:
        return np.zeros(6), True
    nu = cfg.gain * e
    norm = np.linalg.norm(nu)
    if norm > cfg.v_max:
        nu = nu * (cfg.v_max / norm)
    return nu, False


def simulate_pbs(ets, q0, desired, cfg=None):
    """Kinematic servo simulation with explicit Euler integration."""
    cfg = cfg or ServoConfig()
    q = joint_config(ets, q0).copy()
    desired = np.ascontiguousarray(desired, dtype=float)
    enc = ets.encoded
    log = ServoLog(cfg.dt)
    for _ in range(cfg.max_steps):
        T = _kernels.fkine(*enc, q)
        nu, arrived = pbs_velocity(T, desired, cfg)
        log.append(q, pose_error(T, desired), nu)
        if arrived:
            log.status = ARRIVED
            return log
        try:
            qd = rrmc_qd(_kernels.jacob0(*enc, q), nu, strict=True)
        except SingularJacobian:
            log.status = SINGULAR
            return log
        q = q + qd * cfg.dt
    log.status = MAX_STEPS
    return log
