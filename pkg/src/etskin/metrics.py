"""Jacobian-based performance metrics on the translational or rotational rows.

Both metrics are meant for one 3-row block at a time. Mixing metres and
radians in the full 6xn Jacobian gives a non-homogeneous number, so the full
form is only available through an explicit ``axes="all"``.
"""

import numpy as np

from etskin.jacobian import Jacobian

TRANSLATIONAL = "translational"
ROTATIONAL = "rotational"
ALL = "all"


def sub_jacobian(J, axes=TRANSLATIONAL):
    M = J.matrix if isinstance(J, Jacobian) else np.asarray(J, dtype=float)
    if axes == TRANSLATIONAL:
        return M[:3]
    if axes == ROTATIONAL:
        return M[3:]
    if axes == ALL:
        return M
    raise ValueError(f"axes must be 'translational' or 'rotational', got {axes!r}")


def manipulability(Jhat):
    """Yoshikawa index ``sqrt(det(Jhat Jhat^T))``."""
    Jhat = np.asarray(Jhat, dtype=float)
    d = np.linalg.det(Jhat @ Jhat.T)
    if d < 0 and abs(d) < 1e-15:
        d = 0.0
    return float(np.sqrt(d))


def condition_number(Jhat):
    """``sigma_max / sigma_min``; ``inf`` when rank-deficient."""
    s = np.linalg.svd(np.asarray(Jhat, dtype=float), compute_uv=False)
    if s[0] == 0 or s[-1] < 1e-300 * s[0]:
        return float("inf")
    return max(1.0, float(s[0] / s[-1]))
