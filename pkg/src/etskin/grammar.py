"""Text form of an ETS.

    ets      := term (WS term)*
    term     := kindaxis "(" arg ")"
    kindaxis := ("t" | "R") ("x" | "y" | "z")
    arg      := number unit? | "-"? "q" integer
    unit     := "deg"

Translations take metres only. ``deg`` converts to radians at parse time.
``-qj`` marks a flipped revolute joint and is rejected on translations.
Joint indices are 0-based and must appear as q0, q1, ... in order.
"""

import math
import re

from etskin.errors import (
    BadNumber,
    DuplicateJoint,
    ETSSyntaxError,
    NonMonotonicJoint,
    UnknownTransform,
)
from etskin.ets import ETS, ROTATION, TRANSLATION, ElementaryTransform

_WS = re.compile(r"\s+")
_KINDAXIS = re.compile(r"([tR])([xyz])(?=\()")
_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_JOINT = re.compile(r"(-?)q(\d+)")
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


def parse_ets(text, name="", qlim=None):
    """Parse model text into a validated :class:`ETS`."""
    terms = []
    seen = set()
    pos = _skip_ws(text, 0)
    if pos == len(text):
        raise ETSSyntaxError("empty model text", pos, text)
    while pos < len(text):
        et, end = _term(text, pos)
        if et.joint is not None:
            if et.joint in seen:
                raise DuplicateJoint(f"joint q{et.joint} appears more than once", pos, text)
            if et.joint != len(seen):
                raise NonMonotonicJoint(f"expected q{len(seen)}, found q{et.joint}", pos, text)
            seen.add(et.joint)
        terms.append(et)
        nxt = _skip_ws(text, end)
        if nxt == end and end < len(text):
            raise ETSSyntaxError("expected whitespace between terms", end, text)
        pos = nxt
    return ETS(tuple(terms), name=name, qlim=qlim)


def parse_term(text):
    """Parse a single term without sequence-level joint checks."""
    pos = _skip_ws(text, 0)
    if pos == len(text):
        raise ETSSyntaxError("empty term", pos, text)
    et, end = _term(text, pos)
    if _skip_ws(text, end) != len(text):
        raise ETSSyntaxError("trailing text after term", end, text)
    return et


def format_ets(ets):
    """Normal form: joints as ``q<j>``/``-q<j>``, constants as round-trip floats."""
    return str(ets)


def _skip_ws(text, pos):
    m = _WS.match(text, pos)
    return m.end() if m else pos


def _term(text, pos):
    m = _KINDAXIS.match(text, pos)
    if m is None:
        word = _WORD.match(text, pos)
        if word is None:
            raise ETSSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        name = word.group()
        if re.fullmatch(r"[tR][xyz]", name):
            raise ETSSyntaxError(f"expected '(' after {name}", word.end(), text)
        raise UnknownTransform(f"unknown transform {name!r}", pos, text)
    kind = ROTATION if m.group(1) == "R" else TRANSLATION
    axis = m.group(2)
    open_at = m.end()
    close_at = text.find(")", open_at + 1)
    if close_at < 0:
        raise ETSSyntaxError("missing ')'", len(text), text)
    arg_at = open_at + 1
    arg = text[arg_at:close_at]
    if not arg:
        raise ETSSyntaxError("empty argument", arg_at, text)
    if "(" in arg:
        raise ETSSyntaxError("nested '('", arg_at + arg.index("("), text)
    return _argument(kind, axis, arg, arg_at, text), close_at + 1


def _argument(kind, axis, arg, at, text):
    jm = _JOINT.fullmatch(arg)
    if jm is not None:
        flip = jm.group(1) == "-"
        if flip and kind == TRANSLATION:
            raise ETSSyntaxError("negated joint on a translation", at, text)
        return ElementaryTransform(axis, kind, joint=int(jm.group(2)), flip=flip)
    if arg.lstrip("+-").startswith("q"):
        raise ETSSyntaxError(f"malformed joint reference {arg!r}", at, text)
    deg = arg.endswith("deg")
    number = arg[:-3] if deg else arg
    if not _NUMBER.fullmatch(number):
        raise BadNumber(f"bad number {arg!r}", at, text)
    if deg and kind == TRANSLATION:
        raise ETSSyntaxError("translations take metres, not 'deg'", at + len(number), text)
    value = float(number)
    if deg:
        value = math.radians(value)
    return ElementaryTransform(axis, kind, value=value)
