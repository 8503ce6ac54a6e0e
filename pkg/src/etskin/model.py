"""Forward kinematics over an ETS, link-frame subsequences and model loading."""

import json
from importlib import resources
from pathlib import Path

import numpy as np

from etskin import _kernels
from etskin.errors import (
    DimensionMismatch,
    InvalidLinkRange,
    InvalidModel,
    JointIndexOutOfRange,
    ModelIOError,
    UnknownModel,
)
from etskin.ets import ETS
from etskin.grammar import format_ets, parse_ets

BUILTIN_MODELS = ("planar2", "ur5", "panda")

__all__ = [
    "BUILTIN_MODELS",
    "eval_et",
    "fkine",
    "format_ets",
    "joint_config",
    "load_model",
    "mu",
    "parse_ets",
    "subsequence_pose",
]


def joint_config(ets, q):
    """``q`` as a float vector of the model's length, or DimensionMismatch."""
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.shape[0] != ets.n:
        raise DimensionMismatch(f"model has {ets.n} joints, got {q.shape[0]} values")
    if not np.all(np.isfinite(q)):
        raise DimensionMismatch("joint values must be finite")
    return q


def eval_et(et, q=()):
    """The 4x4 matrix of one elementary transform at configuration ``q``."""
    if et.is_joint:
        q = np.asarray(q, dtype=float).reshape(-1)
        if et.joint >= q.shape[0]:
            raise JointIndexOutOfRange(f"q{et.joint} outside a {q.shape[0]}-vector")
        eta = -q[et.joint] if et.flip else q[et.joint]
    else:
        eta = et.value
    c, s = np.cos(eta), np.sin(eta)
    T = np.eye(4)
    a = "xyz".index(et.axis)
    if et.kind == "translation":
        T[a, 3] = eta
        return T
    i, k = (a + 1) % 3, (a + 2) % 3
    T[i, i] = T[k, k] = c
    T[i, k] = -s
    T[k, i] = s
    return T


def fkine(ets, q):
    """End-effector pose in the base frame."""
    q = joint_config(ets, q)
    return _kernels.fkine(*ets.encoded, q)


def mu(ets, j):
    """Sequence index (0-based) of the term driven by joint ``j``."""
    if not 0 <= j < ets.n:
        raise JointIndexOutOfRange(f"joint {j} not in 0..{ets.n - 1}")
    return ets.joint_positions[j]


def subsequence_pose(ets, a, b, q):
    """Pose of link frame ``b`` relative to link frame ``a``.

    Frame 0 is the base; frame ``L`` (1..n) sits immediately after the term
    of joint ``L - 1``.
    """
    q = joint_config(ets, q)
    if not (0 <= a <= b <= ets.n):
        raise InvalidLinkRange(f"need 0 <= a <= b <= {ets.n}, got a={a}, b={b}")
    start = 0 if a == 0 else ets.joint_positions[a - 1] + 1
    stop = 0 if b == 0 else ets.joint_positions[b - 1] + 1
    T = np.eye(4)
    for et in ets.terms[start:stop]:
        T = T @ eval_et(et, q)
    return T


def load_model(source):
    """Load a builtin model by name or a model file by path.

    A model file holds either one line of ETS text or a JSON object with
    keys ``name``, ``ets`` and optionally ``qlim``.
    """
    if isinstance(source, ETS):
        return source
    source = str(source)
    if source in BUILTIN_MODELS:
        text = resources.files("etskin.data").joinpath(f"{source}.json").read_text("utf-8")
        return _from_text(text, source)
    path = Path(source)
    if not path.suffix and not path.exists():
        raise UnknownModel(f"no builtin model {source!r} (choose from {', '.join(BUILTIN_MODELS)})")
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        raise ModelIOError(f"cannot read model file {source}: {exc}") from exc
    return _from_text(text, path.stem)


def _from_text(text, default_name):
    if not text.lstrip().startswith("{"):
        return parse_ets(text.strip(), name=default_name)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidModel(f"model JSON is malformed: {exc}") from exc
    if "ets" not in doc:
        raise InvalidModel("model JSON lacks an 'ets' entry")
    return parse_ets(doc["ets"], name=doc.get("name", default_name), qlim=doc.get("qlim"))


def model_to_json(ets):
    doc = {"name": ets.name, "ets": format_ets(ets)}
    if ets.qlim is not None:
        doc["qlim"] = [list(r) for r in ets.qlim]
    return json.dumps(doc, indent=2)
