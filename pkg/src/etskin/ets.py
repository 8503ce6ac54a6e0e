"""Elementary transforms and the sequences built from them."""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from etskin.errors import DuplicateJoint, InvalidModel, NonMonotonicJoint

AXES = ("x", "y", "z")
TRANSLATION = "translation"
ROTATION = "rotation"


@dataclass(frozen=True)
class ElementaryTransform:
    """One pure translation along, or rotation about, a local frame axis.

    ``joint`` is the 0-based joint index driving the term, or ``None`` for a
    constant ``value`` (metres or radians). ``flip`` marks a revolute joint
    whose positive motion is a negative rotation about ``axis``.
    """

    axis: str
    kind: str
    value: float = 0.0
    joint: int | None = None
    flip: bool = False

    def __post_init__(self):
        if self.axis not in AXES:
            raise InvalidModel(f"axis must be one of x, y, z, got {self.axis!r}")
        if self.kind not in (TRANSLATION, ROTATION):
            raise InvalidModel(f"unknown transform kind {self.kind!r}")
        if self.joint is not None and self.joint < 0:
            raise InvalidModel("joint index must be non-negative")
        if self.flip and (self.kind != ROTATION or self.joint is None):
            raise InvalidModel("only revolute joint terms may be flipped")
        if self.joint is None and not math.isfinite(self.value):
            raise InvalidModel("constant value must be finite")

    @property
    def is_joint(self):
        return self.joint is not None

    @property
    def code(self):
        return AXES.index(self.axis) + (3 if self.kind == ROTATION else 0)

    def __str__(self):
        head = ("R" if self.kind == ROTATION else "t") + self.axis
        if self.joint is not None:
            return f"{head}({'-' if self.flip else ''}q{self.joint})"
        return f"{head}({float(self.value)!r})"


def tx(v=0.0, joint=None):
    return ElementaryTransform("x", TRANSLATION, v, joint)


def ty(v=0.0, joint=None):
    return ElementaryTransform("y", TRANSLATION, v, joint)


def tz(v=0.0, joint=None):
    return ElementaryTransform("z", TRANSLATION, v, joint)


def Rx(v=0.0, joint=None, flip=False):
    return ElementaryTransform("x", ROTATION, v, joint, flip)


def Ry(v=0.0, joint=None, flip=False):
    return ElementaryTransform("y", ROTATION, v, joint, flip)


def Rz(v=0.0, joint=None, flip=False):
    return ElementaryTransform("z", ROTATION, v, joint, flip)


@dataclass(frozen=True)
class ETS:
    """An ordered product of elementary transforms describing one serial chain.

    Joint indices must run 0, 1, ..., n-1 along the sequence, each exactly
    once. ``qlim`` holds one ``(low, high)`` pair per joint; when omitted,
    revolute joints get ``[-pi, pi]`` and prismatic joints ``[0, 1]`` m.
    """

    terms: tuple
    name: str = ""
    qlim: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise InvalidModel("an ETS needs at least one term")
        seen = set()
        for pos, et in enumerate(self.terms):
            if not isinstance(et, ElementaryTransform):
                raise InvalidModel(f"term {pos} is not an ElementaryTransform")
            if et.joint is None:
                continue
            if et.joint in seen:
                raise DuplicateJoint(f"joint q{et.joint} appears more than once")
            if et.joint != len(seen):
                raise NonMonotonicJoint(f"expected q{len(seen)}, found q{et.joint}")
            seen.add(et.joint)
        if self.qlim is not None:
            qlim = tuple((float(lo), float(hi)) for lo, hi in self.qlim)
            if len(qlim) != len(seen):
                raise InvalidModel(f"qlim has {len(qlim)} rows for {len(seen)} joints")
            if any(not lo < hi for lo, hi in qlim):
                raise InvalidModel("each qlim row needs low < high")
            object.__setattr__(self, "qlim", qlim)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __getitem__(self, i):
        return self.terms[i]

    def __str__(self):
        return " ".join(str(et) for et in self.terms)

    @cached_property
    def n(self):
        return sum(et.is_joint for et in self.terms)

    @cached_property
    def joint_positions(self):
        """Sequence index of each joint's term, indexed by joint."""
        return tuple(i for i, et in enumerate(self.terms) if et.is_joint)

    @cached_property
    def limits(self):
        if self.qlim is not None:
            return np.array(self.qlim)
        rows = []
        for i in self.joint_positions:
            rows.append((-math.pi, math.pi) if self.terms[i].kind == ROTATION else (0.0, 1.0))
        return np.array(rows, dtype=float).reshape(-1, 2)

    @cached_property
    def encoded(self):
        kinds = np.array([et.code for et in self.terms], dtype=np.int64)
        joints = np.array([-1 if et.joint is None else et.joint for et in self.terms], dtype=np.int64)
        values = np.array([0.0 if et.is_joint else et.value for et in self.terms])
        signs = np.array([-1.0 if et.flip else 1.0 for et in self.terms])
        for a in (kinds, joints, values, signs):
            a.flags.writeable = False
        return kinds, joints, values, signs

    def random_q(self, rng):
        lim = self.limits
        return rng.uniform(lim[:, 0], lim[:, 1])
