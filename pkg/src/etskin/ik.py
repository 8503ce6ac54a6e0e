"""Numerical inverse kinematics.

Every solver minimises ``E = 1/2 e^T W_e e`` where ``e`` is the pose error
from :func:`etskin.geometry.pose_error`. Step rules:

    NR           q += J^-1 e                      (square J only)
    NR-pinv      q += pinv(J) e
    GN           q += (J^T W_e J)^-1 g,  g = J^T W_e e
    GN-pinv      q += pinv(J^T W_e J) g
    LM-*         q += (J^T W_e J + W_n)^-1 g

with the LM damping ``W_n`` chosen per strategy: Wampler (constant lambda),
Chan (lambda * E) or Sugihara (E + per-joint floor). No step limiting and no
joint-limit handling is applied. ``solve`` restarts from fresh random
configurations until a search converges or the search budget runs out.
"""

from dataclasses import dataclass

import numpy as np

from etskin import _kernels
from etskin.errors import (
    DimensionMismatch,
    NumericalFailure,
    SingularJacobian,
    SingularNormalMatrix,
)
from etskin.geometry import pose_error
from etskin.model import joint_config

METHODS = ("NR", "GN", "NR-pinv", "GN-pinv", "LM-Wampler", "LM-Chan", "LM-Sugihara")

_STEP_CODE = {
    "NR": _kernels.NR,
    "GN": _kernels.GN,
    "NR-pinv": _kernels.NR_PINV,
    "GN-pinv": _kernels.GN_PINV,
    "LM-Wampler": _kernels.LM,
    "LM-Chan": _kernels.LM,
    "LM-Sugihara": _kernels.LM,
}
_DAMPING_CODE = {"wampler": _kernels.WAMPLER, "chan": _kernels.CHAN, "sugihara": _kernels.SUGIHARA}
_DEFAULT_PARAM = {"LM-Wampler": 1e-4, "LM-Chan": 0.1, "LM-Sugihara": 1e-4}
_STATUS = {
    _kernels.CONVERGED: "converged",
    _kernels.EXHAUSTED: "budget_exhausted",
    _kernels.SINGULAR: "singular",
}

# start configurations with a smaller singular value are redrawn
START_SIGMA_MIN = 1e-10


@dataclass(frozen=True)
class IKOptions:
    """Solver configuration.

    ``lam`` is lambda for LM-Wampler and LM-Chan. ``wn`` is the Sugihara
    per-joint floor, a scalar or one value per joint. The defaults give the
    100-search x 30-iteration global search.
    """

    method: str = "LM-Chan"
    lam: float | None = None
    wn: float | tuple = 1e-4
    we: tuple = (1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    tol: float = 1e-10
    max_iterations: int = 30
    max_searches: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown IK method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.lam is None:
            object.__setattr__(self, "lam", _DEFAULT_PARAM.get(self.method, 0.1))
        we = tuple(float(w) for w in self.we)
        if len(we) != 6 or min(we) < 0:
            raise ValueError("we needs six non-negative weights")
        object.__setattr__(self, "we", we)
        if not isinstance(self.wn, (int, float)):
            object.__setattr__(self, "wn", tuple(float(w) for w in self.wn))
        if np.any(np.asarray(self.wn) <= 0):
            raise ValueError("wn must be positive")
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iterations < 1 or self.max_searches < 1:
            raise ValueError("iteration and search budgets must be at least 1")

    @classmethod
    def from_spec(cls, spec, **kwargs):
        """Build from ``"METHOD"`` or ``"METHOD:PARAM"``, e.g. ``"LM-Chan:0.1"``.

        PARAM is lambda for Wampler/Chan and the floor for Sugihara.
        """
        method, _, param = spec.partition(":")
        if param:
            if method not in _DEFAULT_PARAM:
                raise ValueError(f"{method} takes no parameter")
            key = "wn" if method == "LM-Sugihara" else "lam"
            kwargs[key] = float(param)
        return cls(method=method, **kwargs)

    @property
    def label(self):
        if self.method == "LM-Sugihara":
            return f"{self.method}:{self.wn!r}" if np.isscalar(self.wn) else self.method
        if self.method in _DEFAULT_PARAM:
            return f"{self.method}:{self.lam!r}"
        return self.method

    @property
    def damping_strategy(self):
        return self.method.split("-")[1].lower() if self.method.startswith("LM-") else None

    def floor(self, n):
        return np.ascontiguousarray(np.broadcast_to(np.asarray(self.wn, dtype=float), (n,)))


@dataclass(frozen=True, eq=False)
class IKResult:
    q: np.ndarray
    success: bool
    iterations: int
    searches: int
    E_final: float
    status: str
    method: str = ""

    def __eq__(self, other):
        if not isinstance(other, IKResult):
            return NotImplemented
        return self.to_dict() == other.to_dict() and self.method == other.method

    __hash__ = None

    def to_dict(self):
        return {
            "q": [float(v) for v in self.q],
            "success": bool(self.success),
            "iterations": int(self.iterations),
            "searches": int(self.searches),
            "E_final": float(self.E_final),
            "status": self.status,
        }


def ik_error(e, we):
    """``1/2 e^T diag(we) e``."""
    e = np.asarray(e, dtype=float)
    return 0.5 * float(np.sum(np.asarray(we, dtype=float) * e * e))


def lm_damping(strategy, E, opts, n):
    """Diagonal of the LM damping matrix for ``strategy`` at error ``E``."""
    return _kernels.damping(_DAMPING_CODE[strategy], float(E), float(opts.lam), opts.floor(n))


def _prepare(ets, q, desired, opts):
    q = joint_config(ets, q)
    desired = np.ascontiguousarray(desired, dtype=float)
    we = np.array(opts.we)
    e = pose_error(_kernels.fkine(*ets.encoded, q), desired)
    J = _kernels.jacob0(*ets.encoded, q)
    return q, we, e, J


def _step(ets, q, desired, opts, method):
    q, we, e, J = _prepare(ets, q, desired, opts)
    if method == "NR" and ets.n != 6:
        raise DimensionMismatch("strict NR needs a square Jacobian (6 joints)")
    strategy = _DAMPING_CODE.get(opts.damping_strategy, 0)
    dq, ok = _kernels.ik_step(_STEP_CODE[method], strategy, float(opts.lam), opts.floor(ets.n),
                              we, J, e, ik_error(e, we))
    return q, dq, ok


def step_nr(ets, q, desired, opts=None, pinv=False):
    """One Newton-Raphson update; ``pinv`` swaps the inverse for an SVD pseudoinverse."""
    opts = opts or IKOptions(method="NR")
    q, dq, ok = _step(ets, q, desired, opts, "NR-pinv" if pinv else "NR")
    if not ok:
        raise SingularJacobian("Jacobian condition number exceeds 1e12")
    return q + dq


def step_gn(ets, q, desired, opts=None, pinv=False):
    """One Gauss-Newton update on the weighted normal equations."""
    opts = opts or IKOptions(method="GN")
    q, dq, ok = _step(ets, q, desired, opts, "GN-pinv" if pinv else "GN")
    if not ok:
        raise SingularNormalMatrix("normal matrix condition number exceeds 1e12")
    return q + dq


def lm_matrix(ets, q, desired, opts):
    """``A_k = J^T W_e J + W_n`` at ``q``."""
    q, we, e, J = _prepare(ets, q, desired, opts)
    wn = lm_damping(opts.damping_strategy, ik_error(e, we), opts, ets.n)
    return J.T @ (we[:, None] * J) + np.diag(wn)


def step_lm(ets, q, desired, opts):
    """One Levenberg-Marquardt update with the damping strategy of ``opts``."""
    if opts.damping_strategy is None:
        raise ValueError(f"{opts.method} is not an LM method")
    try:
        np.linalg.cholesky(lm_matrix(ets, q, desired, opts))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("damped normal matrix is not positive definite") from exc
    q, dq, _ = _step(ets, q, desired, opts, opts.method)
    return q + dq


def random_start(ets, rng):
    """Uniform draw within joint limits, redrawn while near-singular."""
    while True:
        q = ets.random_q(rng)
        sigma = np.linalg.svd(_kernels.jacob0(*ets.encoded, q), compute_uv=False)
        if sigma[-1] >= START_SIGMA_MIN:
            return q


def solve(ets, desired, opts=None, q0=None):
    """Global search: restart from random configurations until one converges."""
    opts = opts or IKOptions()
    if opts.method == "NR" and ets.n != 6:
        raise DimensionMismatch("strict NR needs a square Jacobian (6 joints)")
    desired = np.ascontiguousarray(desired, dtype=float)
    rng = np.random.default_rng(opts.seed)
    enc = ets.encoded
    we = np.array(opts.we)
    floor = opts.floor(ets.n)
    step = _STEP_CODE[opts.method]
    strategy = _DAMPING_CODE.get(opts.damping_strategy, 0)
    total = 0
    best = None
    status = _kernels.EXHAUSTED
    for s in range(opts.max_searches):
        start = joint_config(ets, q0) if (s == 0 and q0 is not None) else random_start(ets, rng)
        q, it, status, E = _kernels.ik_search(*enc, desired, start, opts.max_iterations, opts.tol,
                                              step, strategy, float(opts.lam), floor, we)
        total += it
        if status == _kernels.CONVERGED:
            return IKResult(q, True, total, s + 1, float(E), "converged", opts.label)
        if best is None or E < best[1]:
            best = (q, E)
    status = "singular" if status == _kernels.SINGULAR else "budget_exhausted"
    return IKResult(best[0], False, total, opts.max_searches, float(best[1]), status, opts.label)
