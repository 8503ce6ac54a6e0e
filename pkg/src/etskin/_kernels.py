"""Hot numeric kernels.

Every kernel works on the flat array encoding of an ETS:

    kinds   int64[M]    0..5 -> tx, ty, tz, Rx, Ry, Rz
    joints  int64[M]    joint index driving the term, -1 for a constant
    values  float64[M]  constant value (ignored for joint terms)
    signs   float64[M]  -1.0 for a flipped revolute joint, else 1.0

Two backends exist. With numba importable (default) the scalar-loop versions
are compiled with ``@njit``. Setting ``ETSKIN_DISABLE_NUMBA=1`` selects the
vectorised pure-numpy versions instead. The choice is made once, at import.
Shared control flow (pose error, IK step, IK search) is written in the numpy
subset numba understands and is compiled only when numba is active.
"""

import math
import os
from functools import reduce

import numpy as np

_FLAG = os.environ.get("ETSKIN_DISABLE_NUMBA", "").strip().lower()

try:
    if _FLAG in ("1", "true", "yes", "on"):
        raise ImportError("numba disabled by ETSKIN_DISABLE_NUMBA")
    from numba import njit
except ImportError:
    USE_NUMBA = False
else:
    USE_NUMBA = True

BACKEND = "numba" if USE_NUMBA else "numpy"

TX, TY, TZ, RX, RY, RZ = 0, 1, 2, 3, 4, 5

# IK step rules
NR, GN, NR_PINV, GN_PINV, LM = 0, 1, 2, 3, 4
# LM damping strategies
WAMPLER, CHAN, SUGIHARA = 0, 1, 2
# search outcomes
CONVERGED, EXHAUSTED, SINGULAR = 0, 1, 2

# condition number above which a strict inverse is refused
COND_LIMIT = 1e12


def _compiled(fn):
    return njit(cache=True)(fn) if USE_NUMBA else fn


# --------------------------------------------------------------------------
# scalar-loop kernels (numba path)


def _post_multiply(T, kind, eta):
    # T <- T @ E(kind, eta), exploiting the sparsity of E
    if kind < 3:
        for r in range(3):
            T[r, 3] += eta * T[r, kind]
        return
    axis = kind - 3
    i = (axis + 1) % 3
    k = (axis + 2) % 3
    c = math.cos(eta)
    s = math.sin(eta)
    for r in range(3):
        ti = T[r, i]
        tk = T[r, k]
        T[r, i] = c * ti + s * tk
        T[r, k] = -s * ti + c * tk


def _pre_multiply(T, kind, eta):
    # T <- E(kind, eta) @ T
    if kind < 3:
        T[kind, 3] += eta * T[3, 3]
        return
    axis = kind - 3
    i = (axis + 1) % 3
    k = (axis + 2) % 3
    c = math.cos(eta)
    s = math.sin(eta)
    for col in range(4):
        ti = T[i, col]
        tk = T[k, col]
        T[i, col] = c * ti - s * tk
        T[k, col] = s * ti + c * tk


def _eta(joints, values, signs, q, m):
    j = joints[m]
    if j < 0:
        return values[m]
    return signs[m] * q[j]


def _fkine_loops(kinds, joints, values, signs, q):
    T = np.eye(4)
    for m in range(kinds.shape[0]):
        _post_multiply(T, kinds[m], _eta(joints, values, signs, q, m))
    return T


def _jacob0_loops(kinds, joints, values, signs, q):
    M = kinds.shape[0]
    n = q.shape[0]
    J = np.zeros((6, n))
    # forward pass: orientation of each joint frame 0T_j
    frames = np.zeros((n, 3, 3))
    T = np.eye(4)
    for m in range(M):
        _post_multiply(T, kinds[m], _eta(joints, values, signs, q, m))
        j = joints[m]
        if j >= 0:
            for r in range(3):
                for c in range(3):
                    frames[j, r, c] = T[r, c]
    # reverse pass: suffix jT_e, consumed column by column
    S = np.eye(4)
    for m in range(M - 1, -1, -1):
        j = joints[m]
        kind = kinds[m]
        if j >= 0:
            R = frames[j]
            if kind < 3:
                for r in range(3):
                    J[r, j] = R[r, kind]
            else:
                axis = kind - 3
                i = (axis + 1) % 3
                k = (axis + 2) % 3
                sg = signs[m]
                # axis x p_e has component -p_k on i and +p_i on k
                pi = S[i, 3]
                pk = S[k, 3]
                for r in range(3):
                    J[r, j] = sg * (R[r, i] * -pk + R[r, k] * pi)
                    J[r + 3, j] = sg * R[r, axis]
        _pre_multiply(S, kind, _eta(joints, values, signs, q, m))
    return J


# --------------------------------------------------------------------------
# vectorised numpy kernels (fallback path)


def et_matrices(kinds, joints, values, signs, q):
    """Stack of the M elementary transform matrices, shape (M, 4, 4)."""
    eta = np.array(values, dtype=float)
    jm = joints >= 0
    eta[jm] = signs[jm] * np.asarray(q, dtype=float)[joints[jm]]
    M = kinds.shape[0]
    E = np.broadcast_to(np.eye(4), (M, 4, 4)).copy()
    trans = kinds < 3
    idx = np.nonzero(trans)[0]
    E[idx, kinds[idx], 3] = eta[idx]
    rot = np.nonzero(~trans)[0]
    axis = kinds[rot] - 3
    i = (axis + 1) % 3
    k = (axis + 2) % 3
    c = np.cos(eta[rot])
    s = np.sin(eta[rot])
    E[rot, i, i] = c
    E[rot, k, k] = c
    E[rot, i, k] = -s
    E[rot, k, i] = s
    return E


def _fkine_numpy(kinds, joints, values, signs, q):
    return reduce(np.matmul, et_matrices(kinds, joints, values, signs, q), np.eye(4))


def _jacob0_numpy(kinds, joints, values, signs, q):
    E = et_matrices(kinds, joints, values, signs, q)
    M = kinds.shape[0]
    prefix = np.empty((M, 4, 4))
    suffix = np.empty((M, 4, 4))
    acc = np.eye(4)
    for m in range(M):
        acc = acc @ E[m]
        prefix[m] = acc
    acc = np.eye(4)
    for m in range(M - 1, -1, -1):
        suffix[m] = acc  # terms strictly after m
        acc = E[m] @ acc
    sel = np.nonzero(joints >= 0)[0]
    order = np.argsort(joints[sel])
    sel = sel[order]
    R = prefix[sel, :3, :3]
    p = suffix[sel, :3, 3]
    kind = kinds[sel]
    sg = signs[sel]
    n = sel.shape[0]
    J = np.zeros((6, n))
    rev = kind >= 3
    unit = np.zeros((n, 3))
    unit[np.arange(n), kind % 3] = 1.0
    lin_local = np.where(rev[:, None], np.cross(unit, p), unit)
    J[:3] = np.einsum("nrc,nc->rn", R, lin_local) * np.where(rev, sg, 1.0)
    J[3:] = np.where(rev, sg, 0.0) * np.einsum("nrc,nc->rn", R, unit)
    return J


if USE_NUMBA:
    _post_multiply = _compiled(_post_multiply)
    _pre_multiply = _compiled(_pre_multiply)
    _eta = _compiled(_eta)
    fkine = _compiled(_fkine_loops)
    jacob0 = _compiled(_jacob0_loops)
else:
    fkine = _fkine_numpy
    jacob0 = _jacob0_numpy


# --------------------------------------------------------------------------
# shared control flow


@_compiled
def angle_axis(R):
    out = np.zeros(3)
    l0 = R[2, 1] - R[1, 2]
    l1 = R[0, 2] - R[2, 0]
    l2 = R[1, 0] - R[0, 1]
    trace = R[0, 0] + R[1, 1] + R[2, 2]
    off = max(abs(R[0, 1]), abs(R[0, 2]), abs(R[1, 0]),
              abs(R[1, 2]), abs(R[2, 0]), abs(R[2, 1]))
    if off < 1e-6 and trace < 1.0:
        # diagonal and not the identity: a half turn about a frame axis
        out[0] = 0.5 * math.pi * (R[0, 0] + 1.0)
        out[1] = 0.5 * math.pi * (R[1, 1] + 1.0)
        out[2] = 0.5 * math.pi * (R[2, 2] + 1.0)
        return out
    ln = math.sqrt(l0 * l0 + l1 * l1 + l2 * l2)
    if ln < 1e-12:
        if trace > 1.0:
            # identity or a vanishing angle: small-angle limit of atan2(l, 2) / l
            out[0] = 0.5 * l0
            out[1] = 0.5 * l1
            out[2] = 0.5 * l2
            return out
        # symmetric but off-diagonal: half turn about a general axis, R + I = 2 a a^T
        best = 0
        for d in range(1, 3):
            if R[d, d] > R[best, best]:
                best = d
        scale = math.sqrt(0.5 * (R[best, best] + 1.0))
        for r in range(3):
            a = 0.5 * (R[r, best] + (1.0 if r == best else 0.0)) / scale
            out[r] = math.pi * a
        return out
    theta = math.atan2(ln, trace - 1.0)
    out[0] = theta / ln * l0
    out[1] = theta / ln * l1
    out[2] = theta / ln * l2
    return out


@_compiled
def pose_error(T, Td):
    e = np.zeros(6)
    for r in range(3):
        e[r] = Td[r, 3] - T[r, 3]
    Rd = np.ascontiguousarray(Td[:3, :3])
    Rc = np.ascontiguousarray(T[:3, :3])
    e[3:] = angle_axis(Rd @ np.ascontiguousarray(Rc.T))
    return e


@_compiled
def weighted_error(e, we):
    return 0.5 * np.sum(we * e * e)


@_compiled
def damping(strategy, E, lam, floor):
    n = floor.shape[0]
    wn = np.empty(n)
    for i in range(n):
        if strategy == WAMPLER:
            wn[i] = lam
        elif strategy == CHAN:
            wn[i] = lam * E
        else:
            wn[i] = E + floor[i]
    return wn


@_compiled
def _too_ill(A):
    s = np.linalg.svd(A)[1]
    return not (s[-1] > 0.0 and s[0] <= COND_LIMIT * s[-1])


@_compiled
def ik_step(method, strategy, lam, floor, we, J, e, E):
    """Joint update for one iteration; ``ok`` is False on a refused inverse."""
    n = J.shape[1]
    if method == NR:
        if _too_ill(J):
            return np.zeros(n), False
        return np.linalg.solve(J, e), True
    if method == NR_PINV:
        return np.linalg.pinv(J) @ e, True
    Jt = np.ascontiguousarray(J.T)
    WJ = np.empty_like(J)
    for r in range(6):
        WJ[r] = we[r] * J[r]
    A = Jt @ WJ
    g = Jt @ (we * e)
    if method == GN:
        if _too_ill(A):
            return np.zeros(n), False
        return np.linalg.solve(A, g), True
    if method == GN_PINV:
        return np.linalg.pinv(A) @ g, True
    wn = damping(strategy, E, lam, floor)
    for i in range(n):
        A[i, i] += wn[i]
    return np.linalg.solve(A, g), True


@_compiled
def ik_search(kinds, joints, values, signs, Tep, q0, ilimit, tol,
              method, strategy, lam, floor, we):
    """One IK search from ``q0``.

    Returns ``(q, iterations, status, E)``. Each Jacobian evaluation counts as
    one iteration; the budget check runs after the step and error update.
    """
    q = q0.copy()
    e = pose_error(fkine(kinds, joints, values, signs, q), Tep)
    E = weighted_error(e, we)
    it = 0
    while True:
        if E <= tol:
            return q, it, CONVERGED, E
        if it >= ilimit:
            return q, it, EXHAUSTED, E
        J = jacob0(kinds, joints, values, signs, q)
        it += 1
        dq, ok = ik_step(method, strategy, lam, floor, we, J, e, E)
        if not ok:
            return q, it, SINGULAR, E
        qn = q + dq
        if not np.all(np.isfinite(qn)):
            return q, it, SINGULAR, E
        q = qn
        e = pose_error(fkine(kinds, joints, values, signs, q), Tep)
        E = weighted_error(e, we)
