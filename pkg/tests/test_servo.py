import numpy as np
import pytest

from etskin import errors
from etskin.geometry import make_pose, pose_error, rotation
from etskin.grammar import parse_ets
from etskin.jacobian import jacobian_fast
from etskin.model import fkine
from etskin.servo import (
    ARRIVED,
    SINGULAR,
    ServoConfig,
    ServoLog,
    pbs_velocity,
    rrmc_qd,
    simulate_pbs,
)

PANDA_READY = np.array([0.0, -0.3, 0.0, -2.2, 0.0, 2.0, np.pi / 4])


def panda_goal(panda, q0, dx=(0.10, -0.05, 0.08), rot=0.3):
    """A goal offset in translation and rotated about the world z axis."""
    T = fkine(panda, q0)
    return make_pose(rotation("z", rot) @ T[:3, :3], T[:3, 3] + np.asarray(dx))


def test_config_validation():
    for bad in ({"kt": 0}, {"kr": -1}, {"v_max": 0}, {"e_min": -1}, {"dt": 0}, {"max_steps": 0}):
        with pytest.raises(ValueError):
            ServoConfig(**bad)
    np.testing.assert_array_equal(ServoConfig(kt=3, kr=5).gain, [3, 3, 3, 5, 5, 5])


def test_rrmc_examples(panda):
    J = jacobian_fast(panda, PANDA_READY)
    np.testing.assert_array_equal(rrmc_qd(J, np.zeros(6)), np.zeros(7))
    slider = parse_ets("tz(q0)")
    qd = rrmc_qd(jacobian_fast(slider, [0.0]), [0, 0, 0.1, 0, 0, 0])
    np.testing.assert_allclose(qd, [0.1], atol=1e-15)


def test_rrmc_minimum_norm(panda):
    rng = np.random.default_rng(21)
    for _ in range(20):
        q = panda.random_q(rng)
        J = jacobian_fast(panda, q).matrix
        nu = rng.normal(size=6)
        qd = rrmc_qd(J, nu)
        np.testing.assert_allclose(J @ qd, nu, atol=1e-8)
        null = np.linalg.svd(J)[2][-1]
        assert abs(null @ qd) < 1e-8


def test_rrmc_square_and_strict(ur5):
    from conftest import UR5_STRETCHED
    q = np.array([0.3, -1.0, 1.2, -0.8, 1.1, 0.2])
    J = jacobian_fast(ur5, q).matrix
    nu = np.array([0.05, -0.02, 0.01, 0.1, 0.0, -0.1])
    np.testing.assert_allclose(rrmc_qd(J, nu), np.linalg.solve(J, nu), atol=1e-14)
    Js = jacobian_fast(ur5, UR5_STRETCHED)
    with pytest.raises(errors.SingularJacobian):
        rrmc_qd(Js, nu, strict=True)
    assert np.all(np.isfinite(rrmc_qd(Js, nu)))
    with pytest.raises(ValueError):
        rrmc_qd(type(Js)(Js.matrix, "ee"), nu)


def test_pbs_branches(panda):
    cfg = ServoConfig(kt=2.0, kr=3.0, v_max=0.2)
    T = fkine(panda, PANDA_READY)
    nu, arrived = pbs_velocity(T, T, cfg)
    assert arrived and not nu.any()

    # far goal: ||Ke|| is about 10 v_max, output is the rescaled Ke
    far = make_pose(T[:3, :3], T[:3, 3] + [1.0, 0.0, 0.0])
    nu, arrived = pbs_velocity(T, far, cfg)
    Ke = cfg.gain * pose_error(T, far)
    assert not arrived and np.linalg.norm(Ke) == pytest.approx(2.0)
    assert np.linalg.norm(nu) == pytest.approx(0.2, abs=1e-15)
    np.testing.assert_allclose(nu / 0.2, Ke / np.linalg.norm(Ke), atol=1e-15)

    # mid-range goal: below the cap, above the threshold, nu = Ke exactly
    mid = make_pose(rotation("x", 0.01) @ T[:3, :3], T[:3, 3] + [0.02, 0.0, 0.0])
    nu, arrived = pbs_velocity(T, mid, cfg)
    assert not arrived
    np.testing.assert_array_equal(nu, cfg.gain * pose_error(T, mid))

    # inside the stop threshold
    near = make_pose(T[:3, :3], T[:3, 3] + [5e-5, 0.0, 0.0])
    nu, arrived = pbs_velocity(T, near, cfg)
    assert arrived and not nu.any()


def test_pbs_uniform_gain_is_scaled_error(panda):
    cfg = ServoConfig(kt=1.5, kr=1.5, v_max=1e9)
    T = fkine(panda, PANDA_READY)
    goal = panda_goal(panda, PANDA_READY)
    nu, _ = pbs_velocity(T, goal, cfg)
    np.testing.assert_array_equal(nu, 1.5 * pose_error(T, goal))


def test_pbs_cap_never_exceeded(panda):
    rng = np.random.default_rng(22)
    for _ in range(200):
        cfg = ServoConfig(kt=rng.uniform(0.1, 10), kr=rng.uniform(0.1, 10), v_max=rng.uniform(0.01, 1))
        a, b = fkine(panda, panda.random_q(rng)), fkine(panda, panda.random_q(rng))
        nu, _ = pbs_velocity(a, b, cfg)
        assert np.linalg.norm(nu) <= cfg.v_max * (1 + 1e-12)


def test_simulate_at_goal(panda):
    log = simulate_pbs(panda, PANDA_READY, fkine(panda, PANDA_READY))
    assert log.status == ARRIVED and len(log) == 1
    assert not log.norm_nu.any()


def test_simulate_panda_reach(panda):
    cfg = ServoConfig()
    log = simulate_pbs(panda, PANDA_READY, panda_goal(panda, PANDA_READY), cfg)
    assert log.status == ARRIVED
    assert log.norm_e[-1] <= cfg.e_min
    assert np.all(np.diff(log.norm_e[1:]) < 1e-9)
    np.testing.assert_allclose(np.diff(log.t), cfg.dt)
    assert np.all(log.norm_nu <= cfg.v_max * (1 + 1e-12))
    capped = np.linalg.norm(cfg.gain * log.e, axis=1) > cfg.v_max
    assert capped.sum() > 10
    np.testing.assert_allclose(log.norm_nu[capped], cfg.v_max, rtol=1e-12)


def test_simulate_singular_start(ur5):
    from conftest import UR5_STRETCHED
    goal = fkine(ur5, UR5_STRETCHED + 0.3)
    log = simulate_pbs(ur5, UR5_STRETCHED, goal)
    assert log.status == SINGULAR and len(log) == 1


def test_simulate_max_steps(panda):
    cfg = ServoConfig(max_steps=5)
    log = simulate_pbs(panda, PANDA_READY, panda_goal(panda, PANDA_READY), cfg)
    assert log.status == "max_steps" and len(log) == 5


def test_capped_high_gain_beats_unit_gain(panda):
    goal = panda_goal(panda, PANDA_READY)
    capped = simulate_pbs(panda, PANDA_READY, goal, ServoConfig(kt=5.0, kr=5.0, v_max=0.2))
    unit = simulate_pbs(panda, PANDA_READY, goal, ServoConfig(kt=1.0, kr=1.0, v_max=1e9))
    assert capped.status == unit.status == ARRIVED
    assert len(capped) < len(unit)


def test_csv(panda):
    log = simulate_pbs(panda, PANDA_READY, panda_goal(panda, PANDA_READY), ServoConfig(max_steps=3))
    lines = log.to_csv().splitlines()
    assert lines[0] == "step,t,normE,normNu,e1,e2,e3,e4,e5,e6,q1,q2,q3,q4,q5,q6,q7"
    assert len(lines) == 4
    row = lines[1].split(",")
    assert row[0] == "0" and float(row[2]) == log.norm_e[0]
    np.testing.assert_array_equal([float(v) for v in row[10:]], PANDA_READY)
    assert ServoLog(0.1).to_csv().startswith("step,t,normE,normNu,e1")
