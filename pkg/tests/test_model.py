import json
from functools import reduce

import numpy as np
import pytest

from etskin import errors
from etskin.ets import ETS, Rx, Rz, tx, ty, tz
from etskin.grammar import parse_ets
from etskin.model import (
    BUILTIN_MODELS,
    eval_et,
    fkine,
    load_model,
    model_to_json,
    mu,
    subsequence_pose,
)


def _rot(axis, a):
    c, s = np.cos(a), np.sin(a)
    R = {"x": [[1, 0, 0], [0, c, -s], [0, s, c]],
         "y": [[c, 0, s], [0, 1, 0], [-s, 0, c]],
         "z": [[c, -s, 0], [s, c, 0], [0, 0, 1]]}[axis]
    T = np.eye(4)
    T[:3, :3] = R
    return T


def _trans(x=0.0, y=0.0, z=0.0):
    T = np.eye(4)
    T[:3, 3] = (x, y, z)
    return T


def test_eval_et_examples():
    np.testing.assert_array_equal(eval_et(tx(0.5)), _trans(x=0.5))
    np.testing.assert_allclose(eval_et(Rz(joint=0), [np.pi / 2]),
                               [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], atol=1e-15)
    np.testing.assert_allclose(eval_et(Rx(joint=0, flip=True), [0.3]), _rot("x", -0.3), atol=1e-15)
    np.testing.assert_array_equal(eval_et(ty(joint=1), [9.0, 0.25]), _trans(y=0.25))
    with pytest.raises(errors.JointIndexOutOfRange):
        eval_et(Rz(joint=3), [0.0, 0.0])


def test_planar2_examples(planar2):
    np.testing.assert_allclose(fkine(planar2, [0, 0])[:3, 3], [2, 0, 0], atol=1e-15)
    T = fkine(planar2, [np.pi / 2, 0])
    np.testing.assert_allclose(T[:3, 3], [0, 2, 0], atol=1e-15)
    T = fkine(planar2, [0, np.pi / 2])
    np.testing.assert_allclose(T[:3, 3], [1, 1, 0], atol=1e-15)
    np.testing.assert_allclose(T[:3, :3], _rot("z", np.pi / 2)[:3, :3], atol=1e-15)


@pytest.mark.parametrize("name", BUILTIN_MODELS)
def test_fkine_matches_term_product(name):
    ets = load_model(name)
    rng = np.random.default_rng(7)
    for _ in range(1000):
        q = ets.random_q(rng)
        ref = reduce(np.matmul, (eval_et(et, q) for et in ets.terms))
        T = fkine(ets, q)
        np.testing.assert_allclose(T, ref, atol=1e-12, rtol=0)
        np.testing.assert_array_equal(T[3], [0, 0, 0, 1])
        np.testing.assert_allclose(T[:3, :3] @ T[:3, :3].T, np.eye(3), atol=1e-12)


def test_panda_golden(panda):
    # hand-multiplied from the manufacturer kinematics, independent of the parser
    q = np.array([0.1, -0.4, 0.2, -1.9, 0.3, 1.6, 0.7])
    parts = [
        _trans(z=0.333), _rot("z", q[0]), _rot("y", q[1]), _trans(z=0.316), _rot("z", q[2]),
        _trans(x=0.0825), _rot("y", -q[3]), _trans(x=-0.0825), _trans(z=0.384), _rot("z", q[4]),
        _rot("y", -q[5]), _trans(x=0.088), _rot("x", np.pi), _trans(z=0.107), _rot("z", q[6]),
    ]
    np.testing.assert_allclose(fkine(panda, q), reduce(np.matmul, parts), atol=1e-12)
    T0 = fkine(panda, np.zeros(7))
    np.testing.assert_allclose(T0[:3, 3], [0.088, 0.0, 0.926], atol=1e-12)
    np.testing.assert_allclose(T0[:3, :3], np.diag([1.0, -1.0, -1.0]), atol=1e-12)


def test_ur5_zero_pose(ur5):
    np.testing.assert_allclose(fkine(ur5, np.zeros(6))[:3, 3], [-0.81725, -0.19145, -0.005491], atol=1e-12)


def test_model_shapes(planar2, ur5, panda):
    assert (planar2.n, len(planar2)) == (2, 4)
    assert (ur5.n, panda.n, len(panda)) == (6, 7, 15)
    assert panda.qlim is not None
    assert np.all(ur5.limits == [[-np.pi, np.pi]] * 6)


def test_mu(planar2, panda):
    assert mu(planar2, 1) == 2
    assert mu(panda, 4) == 9
    assert [mu(panda, j) for j in range(7)] == [1, 2, 4, 6, 9, 10, 14]
    with pytest.raises(errors.JointIndexOutOfRange):
        mu(panda, 7)


def test_subsequence_pose(planar2, panda):
    q = np.array([0.4, -1.1])
    np.testing.assert_array_equal(subsequence_pose(planar2, 1, 1, q), np.eye(4))
    # frame 0 to frame n is everything up to the last joint term
    np.testing.assert_allclose(subsequence_pose(planar2, 0, 2, q) @ _trans(x=1.0), fkine(planar2, q), atol=1e-15)
    np.testing.assert_allclose(subsequence_pose(planar2, 1, 2, q), _trans(x=1.0) @ _rot("z", q[1]), atol=1e-15)
    qp = panda.random_q(np.random.default_rng(3))
    composed = subsequence_pose(panda, 0, 3, qp) @ subsequence_pose(panda, 3, 7, qp)
    np.testing.assert_allclose(composed, subsequence_pose(panda, 0, 7, qp), atol=1e-14)
    for a, b in [(2, 1), (-1, 1), (0, 3)]:
        with pytest.raises(errors.InvalidLinkRange):
            subsequence_pose(planar2, a, b, q)


def test_dimension_mismatch(panda):
    with pytest.raises(errors.DimensionMismatch):
        fkine(panda, np.zeros(6))
    with pytest.raises(errors.DimensionMismatch):
        fkine(panda, [np.nan] * 7)


def test_ets_construction_errors():
    with pytest.raises(errors.InvalidModel):
        ETS(())
    with pytest.raises(errors.DuplicateJoint):
        ETS((Rz(joint=0), Rz(joint=0)))
    with pytest.raises(errors.NonMonotonicJoint):
        ETS((Rz(joint=1),))
    ETS((tz(0.1),))  # a constant-only sequence is allowed


def test_random_q_within_limits(panda):
    rng = np.random.default_rng(0)
    qs = np.array([panda.random_q(rng) for _ in range(500)])
    lo, hi = panda.limits.T
    assert np.all(qs >= lo) and np.all(qs <= hi)


def test_model_files(tmp_path, panda):
    js = tmp_path / "arm.json"
    js.write_text(model_to_json(panda))
    loaded = load_model(js)
    assert str(loaded) == str(panda)
    np.testing.assert_array_equal(loaded.limits, panda.limits)

    txt = tmp_path / "two.ets"
    txt.write_text("Rz(q0) tx(1.0) Rz(q1) tx(1.0)\n")
    two = load_model(txt)
    assert two.name == "two" and two.n == 2

    with pytest.raises(errors.UnknownModel):
        load_model("kuka")
    with pytest.raises(errors.ModelIOError):
        load_model(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "x"}))
    with pytest.raises(errors.InvalidModel):
        load_model(bad)
    bad.write_text("{not json")
    with pytest.raises(errors.InvalidModel):
        load_model(bad)


def test_parse_then_fkine_uses_radians():
    a = parse_ets("Rz(90deg) tx(1.0)")
    np.testing.assert_allclose(fkine(a, [])[:3, 3], [0, 1, 0], atol=1e-15)
