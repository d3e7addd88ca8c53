"""Leg kinematics: forward/inverse maps and Jacobians.

The forward map is checked against an independent homogeneous-transform
chain, the Jacobian against central finite differences, and the inverse map
by round trips. Random configurations are drawn inside the reach shell so
round trips are exact.
"""

import numpy as np
import pytest

from jumpopt.legs import (
    LegGeometry,
    SIDE_SIGNS,
    default_legs,
    forward_kinematics,
    inverse_kinematics,
    jacobian,
)

GEOM_L = LegGeometry(side_sign=+1.0, name="FL")
GEOM_R = LegGeometry(side_sign=-1.0, name="FR")


def fk_transform_chain(q, geom):
    """Oracle: compose the joint chain as explicit 4x4 transforms."""

    def rx(a):
        c, s = np.cos(a), np.sin(a)
        m = np.eye(4)
        m[1:3, 1:3] = [[c, -s], [s, c]]
        return m

    def ry(a):
        c, s = np.cos(a), np.sin(a)
        m = np.eye(4)
        m[0, 0], m[0, 2], m[2, 0], m[2, 2] = c, s, -s, c
        return m

    def trans(v):
        m = np.eye(4)
        m[:3, 3] = v
        return m

    q1, q2, q3 = q
    chain = (
        rx(q1)
        @ trans([0.0, geom.side_sign * geom.hip_offset, 0.0])
        @ ry(-q2)
        @ trans([0.0, 0.0, -geom.thigh_len])
        @ ry(-q3)
        @ trans([0.0, 0.0, -geom.calf_len])
    )
    return chain[:3, 3]


def random_reachable_q(rng, n, geom):
    """Joint samples strictly inside the reach shell, on the working branch.

    The leg reaches any interior point with two abduction angles (the foot's
    planar height can come out above or below the hip line). The inverse map
    fixes the below-the-hip branch, so identity-roundtrip samples must stay
    on it: planar z strictly negative.
    """
    out = []
    l1, l2 = geom.thigh_len, geom.calf_len
    while len(out) < n:
        q = np.array([
            rng.uniform(-1.2, 1.2),
            rng.uniform(-1.5, 1.5),
            rng.uniform(0.15, np.pi - 0.3),
        ])
        planar_z = -l1 * np.cos(q[1]) - l2 * np.cos(q[1] + q[2])
        if planar_z > -0.02:
            continue
        rho = np.linalg.norm(forward_kinematics(q, geom))
        if geom.min_reach * 1.05 < rho < geom.max_reach * 0.995:
            out.append(q)
    return np.array(out)


def test_straight_leg_forward():
    p = forward_kinematics(np.zeros(3), GEOM_L)
    np.testing.assert_allclose(p, [0.0, 0.08, -0.426], atol=1e-15)


def test_folded_knee_forward():
    # Equal links and a pi knee fold the calf back onto the thigh.
    p = forward_kinematics(np.array([0.0, 0.0, np.pi]), GEOM_L)
    np.testing.assert_allclose(p, [0.0, 0.08, 0.0], atol=1e-15)


def test_forward_matches_transform_chain():
    rng = np.random.default_rng(7)
    for geom in (GEOM_L, GEOM_R):
        for _ in range(100):
            q = rng.uniform([-1.5, -2.0, 0.05], [1.5, 2.0, 3.0])
            np.testing.assert_allclose(
                forward_kinematics(q, geom), fk_transform_chain(q, geom), atol=1e-12
            )


def test_mirror_symmetry():
    rng = np.random.default_rng(8)
    q = rng.uniform([-1.0, -1.5, 0.2], [1.0, 1.5, 2.8], size=(50, 3))
    q_mirror = q * np.array([-1.0, 1.0, 1.0])
    p_l = forward_kinematics(q, GEOM_L)
    p_r = forward_kinematics(q_mirror, GEOM_R)
    np.testing.assert_allclose(p_l * np.array([1.0, -1.0, 1.0]), p_r, atol=1e-12)


def test_jacobian_finite_difference():
    rng = np.random.default_rng(11)
    h = 1e-6
    worst = 0.0
    for geom in (GEOM_L, GEOM_R):
        qs = random_reachable_q(rng, 100, geom)
        for q in qs:
            jac = jacobian(q, geom)
            fd = np.empty((3, 3))
            for i in range(3):
                dq = np.zeros(3)
                dq[i] = h
                fd[:, i] = (
                    forward_kinematics(q + dq, geom) - forward_kinematics(q - dq, geom)
                ) / (2 * h)
            worst = max(worst, np.abs(jac - fd).max())
    assert worst < 1e-5


def test_jacobian_batched_agrees_with_single():
    rng = np.random.default_rng(12)
    q = rng.uniform([-1.0, -1.5, 0.2], [1.0, 1.5, 2.8], size=(4, 3))
    geom = GEOM_L
    batched = jacobian(q, geom, side_sign=SIDE_SIGNS)
    for i, s in enumerate(SIDE_SIGNS):
        single = jacobian(q[i], LegGeometry(side_sign=float(s)))
        np.testing.assert_allclose(batched[i], single, atol=1e-14)


def test_stretched_leg_is_singular():
    j = jacobian(np.zeros(3), GEOM_L)
    assert np.linalg.matrix_rank(j, tol=1e-10) < 3


def test_bent_stance_is_regular():
    q, _ = inverse_kinematics(np.array([0.0, 0.08, -0.27]), GEOM_L)
    j = jacobian(q, GEOM_L)
    assert np.linalg.matrix_rank(j) == 3
    assert np.linalg.cond(j) < 100.0


def test_roundtrip_inside_workspace():
    rng = np.random.default_rng(21)
    worst = 0.0
    for geom in (GEOM_L, GEOM_R):
        qs = random_reachable_q(rng, 500, geom)
        ps = forward_kinematics(qs, geom)
        q_back, clamped = inverse_kinematics(ps, geom)
        assert not clamped.any()
        worst = max(worst, np.abs(q_back - qs).max())
    assert worst < 1e-9


def test_knee_branch_range():
    rng = np.random.default_rng(22)
    p = rng.uniform([-0.2, -0.15, -0.40], [0.2, 0.25, -0.08], size=(200, 3))
    q, _ = inverse_kinematics(p, GEOM_L)
    assert ((q[:, 2] >= 0.0) & (q[:, 2] <= np.pi)).all()


def test_straight_leg_target_is_clamped():
    # The stretched-leg point sits outside the reach shell, so the solver
    # flags it and solves the radially clamped target instead.
    target = np.array([0.0, 0.08, -0.426])
    q, clamped = inverse_kinematics(target, GEOM_L)
    assert bool(clamped)
    p = forward_kinematics(q, GEOM_L)
    shrunk = target * (GEOM_L.max_reach / np.linalg.norm(target))
    np.testing.assert_allclose(p, shrunk, atol=1e-9)


def test_far_target_lands_on_outer_bound():
    q, clamped = inverse_kinematics(np.array([0.0, 0.0, -0.60]), GEOM_L)
    assert bool(clamped)
    reach = np.linalg.norm(forward_kinematics(q, GEOM_L))
    assert abs(reach - GEOM_L.max_reach) < 1e-9


def test_near_target_lands_on_inner_bound():
    # With the default hip offset the inner radial bound sits inside the
    # cylinder around the hip x-axis that the abduction joint can never
    # enter, so a near-origin target ends up on that geometric floor
    # (axis distance = hip offset) rather than on the radial bound.
    q, clamped = inverse_kinematics(np.array([0.0, 0.005, -0.005]), GEOM_L)
    assert bool(clamped)
    p = forward_kinematics(q, GEOM_L)
    assert abs(np.hypot(p[1], p[2]) - GEOM_L.hip_offset) < 1e-9

    # A slim enough hip puts the radial bound outside that cylinder and the
    # clamp lands exactly on it.
    slim = LegGeometry(hip_offset=0.02, side_sign=1.0)
    q, clamped = inverse_kinematics(np.array([0.0, 0.005, -0.005]), slim)
    assert bool(clamped)
    reach = np.linalg.norm(forward_kinematics(q, slim))
    assert abs(reach - slim.min_reach) < 1e-6


def test_velocity_map_matches_trajectory_derivative():
    # J(q) qdot against a time-differenced forward map along a smooth path.
    geom = GEOM_L
    dt = 1e-5

    def path(t):
        return np.array([
            0.3 * np.sin(2.0 * t),
            -0.5 + 0.4 * np.sin(3.0 * t + 0.5),
            1.2 + 0.5 * np.sin(1.7 * t),
        ])

    worst = 0.0
    for t in np.linspace(0.1, 2.0, 40):
        q = path(t)
        qdot = (path(t + dt) - path(t - dt)) / (2 * dt)
        v_jac = jacobian(q, geom) @ qdot
        v_fd = (
            forward_kinematics(path(t + dt), geom)
            - forward_kinematics(path(t - dt), geom)
        ) / (2 * dt)
        worst = max(worst, np.abs(v_jac - v_fd).max())
    assert worst < 1e-4


def test_default_legs_layout():
    legs = default_legs()
    assert tuple(g.name for g in legs) == ("FR", "FL", "RR", "RL")
    assert [g.side_sign for g in legs] == [-1.0, 1.0, -1.0, 1.0]


def test_geometry_validation():
    with pytest.raises(ValueError):
        LegGeometry(thigh_len=-0.1)
    with pytest.raises(ValueError):
        LegGeometry(side_sign=0.5)
