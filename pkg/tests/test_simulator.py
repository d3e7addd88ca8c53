"""Dynamics tests: ballistic flight, stance load, symmetry, determinism.

The energy check uses the staggered form 0.5*m*v_n.v_{n+1} + m*g*h_n, which
the velocity-first Euler update conserves exactly for constant gravity; the
plainly sampled energy has a secular O(dt) drift and is not an invariant of
this integrator.
"""

import numpy as np
import pytest

from jumpopt.controller import Gains, LegController
from jumpopt.legs import default_legs, forward_kinematics, jacobian
from jumpopt.rotations import quat_to_rot
from jumpopt.simulator import (RobotModel, RobotState, SimulationDiverged,
                               default_model, leg_transmission,
                               make_standing_state, observe, step)
from jumpopt.terrain import flat_terrain

DT = 1e-3
MODEL = default_model()
FLAT = flat_terrain()


def flight_state(height=1.0, omega=None):
    """Robot far above the ground, feet tucked at the stance targets."""
    state = make_standing_state(MODEL, FLAT)
    lift = height - state.trunk_pos[2]
    state.trunk_pos = state.trunk_pos + np.array([0.0, 0.0, lift])
    state.foot_pos = state.foot_pos + np.array([0.0, 0.0, lift])
    state.contacts = np.zeros(4, bool)
    if omega is not None:
        state.omega_body = np.asarray(omega, dtype=float)
    return state


def settle(state, steps, model=MODEL, terrain=FLAT, vmc=True):
    ctl = LegController(vmc_enabled=vmc)
    forces = None
    for _ in range(steps):
        obs = observe(state, model)
        tau = ctl.compute(obs)
        state, forces = step(state, tau, model, terrain, DT, kin=obs,
                             return_forces=True)
    return state, forces


def test_ballistic_trunk_acceleration():
    state = flight_state()
    nxt = step(state, np.zeros(12), MODEL, FLAT, DT)
    accel = (nxt.trunk_vel - state.trunk_vel) / DT
    np.testing.assert_allclose(accel, [0.0, 0.0, -9.81], atol=1e-6)
    foot_accel = (nxt.foot_vel - state.foot_vel) / DT
    np.testing.assert_allclose(foot_accel,
                               np.tile([0.0, 0.0, -9.81], (4, 1)), atol=1e-6)


def test_flight_momentum_budget_under_internal_forces():
    # Leg and workspace forces act between trunk and feet; with no ground
    # the only momentum change over any horizon is gravity on the total mass.
    state = flight_state(height=5.0)
    rng = np.random.default_rng(8)
    m_feet = MODEL.foot_mass
    p0 = MODEL.trunk_mass * state.trunk_vel + m_feet * state.foot_vel.sum(axis=0)
    n = 400
    for _ in range(n):
        tau = rng.uniform(-10.0, 10.0, size=12)
        state = step(state, tau, MODEL, FLAT, DT)
    p1 = MODEL.trunk_mass * state.trunk_vel + m_feet * state.foot_vel.sum(axis=0)
    expected = p0 + MODEL.total_mass * np.array([0, 0, -9.81]) * n * DT
    np.testing.assert_allclose(p1, expected, atol=1e-9)


def test_flight_energy_staggered_invariant():
    state = flight_state(height=3.0, omega=[0.4, -0.3, 0.2])
    inertia = np.asarray(MODEL.trunk_inertia)

    def energies(s, s_next):
        e = 0.5 * MODEL.trunk_mass * np.dot(s.trunk_vel, s_next.trunk_vel)
        e += MODEL.trunk_mass * 9.81 * s.trunk_pos[2]
        for i in range(4):
            e += 0.5 * MODEL.foot_mass * np.dot(s.foot_vel[i], s_next.foot_vel[i])
            e += MODEL.foot_mass * 9.81 * s.foot_pos[i, 2]
        e += 0.5 * np.dot(s.omega_body, inertia * s.omega_body)
        return e

    states = [state]
    for _ in range(600):
        states.append(step(states[-1], np.zeros(12), MODEL, FLAT, DT))
    es = np.array([energies(states[n], states[n + 1]) for n in range(600)])
    assert np.abs(es - es[0]).max() / abs(es[0]) < 1e-4


def test_standing_supports_weight():
    state = make_standing_state(MODEL, FLAT)
    state, _ = settle(state, 1500)
    normals = []
    for _ in range(100):
        obs = observe(state, MODEL)
        tau = LegController().compute(obs)
        state, forces = step(state, tau, MODEL, FLAT, DT, kin=obs,
                             return_forces=True)
        normals.append(forces.contact[:, 2].sum())
    weight = MODEL.total_mass * 9.81
    assert np.mean(normals) == pytest.approx(weight, rel=0.02)
    assert state.contacts.all()
    # the trunk should have sagged below the commanded crouch, not through it
    assert 0.15 < state.trunk_pos[2] < 0.27


def test_standing_is_still_after_settling():
    # The initial drop excites a lightly damped rocking mode that needs a
    # few seconds to die out.
    state = make_standing_state(MODEL, FLAT)
    state, _ = settle(state, 4000)
    assert np.linalg.norm(state.trunk_vel) < 1e-3
    assert np.linalg.norm(state.omega_body) < 1e-3
    assert np.abs(state.foot_vel).max() < 5e-3


def test_bilateral_symmetry():
    # Mirroring the torque pattern across the x-z plane must mirror the whole
    # trajectory: swap left/right legs, negate abduction torques and y.
    state = make_standing_state(MODEL, FLAT)
    rng = np.random.default_rng(5)
    taus = rng.uniform(-8.0, 8.0, size=(300, 4, 3))
    swap = [1, 0, 3, 2]

    a = state.copy()
    b = state.copy()
    for tau in taus:
        tau_m = tau[swap].copy()
        tau_m[:, 0] = -tau_m[:, 0]
        a = step(a, tau.ravel(), MODEL, FLAT, DT)
        b = step(b, tau_m.ravel(), MODEL, FLAT, DT)

    np.testing.assert_allclose(b.trunk_pos, a.trunk_pos * [1, -1, 1], atol=1e-9)
    np.testing.assert_allclose(b.trunk_vel, a.trunk_vel * [1, -1, 1], atol=1e-9)
    np.testing.assert_allclose(b.quat, a.quat * [1, -1, 1, -1], atol=1e-9)
    np.testing.assert_allclose(b.omega_body, a.omega_body * [-1, 1, -1],
                               atol=1e-9)
    np.testing.assert_allclose(b.foot_pos, a.foot_pos[swap] * [1, -1, 1],
                               atol=1e-9)
    np.testing.assert_allclose(b.foot_vel, a.foot_vel[swap] * [1, -1, 1],
                               atol=1e-9)


def test_step_is_deterministic_and_pure():
    state = make_standing_state(MODEL, FLAT)
    snap = state.copy()
    rng = np.random.default_rng(12)
    taus = rng.uniform(-12.0, 12.0, size=(250, 12))

    def run():
        s = snap.copy()
        for tau in taus:
            s = step(s, tau, MODEL, FLAT, DT)
        return s

    a, b = run(), run()
    assert np.array_equal(a.trunk_pos, b.trunk_pos)
    assert np.array_equal(a.trunk_vel, b.trunk_vel)
    assert np.array_equal(a.quat, b.quat)
    assert np.array_equal(a.omega_body, b.omega_body)
    assert np.array_equal(a.foot_pos, b.foot_pos)
    assert np.array_equal(a.foot_vel, b.foot_vel)
    assert np.array_equal(a.contacts, b.contacts)
    # input state untouched
    assert np.array_equal(state.trunk_pos, snap.trunk_pos)
    assert np.array_equal(state.foot_pos, snap.foot_pos)


def test_quaternion_stays_normalized():
    state = flight_state(height=4.0, omega=[2.0, -1.5, 3.0])
    for _ in range(1000):
        state = step(state, np.zeros(12), MODEL, FLAT, DT)
        assert abs(np.linalg.norm(state.quat) - 1.0) < 1e-12


def test_leg_transmission_recovers_force():
    rng = np.random.default_rng(6)
    geom = default_legs()[1]
    for _ in range(50):
        q = np.array([rng.uniform(-0.5, 0.5),
                      rng.uniform(-0.8, 0.8),
                      rng.uniform(0.6, 2.2)])
        j = jacobian(q, geom)
        if np.linalg.svd(j, compute_uv=False).min() < 0.1:
            continue
        f = rng.uniform(-100, 100, size=3)
        tau = j.T @ f
        f_back = leg_transmission(tau, j)
        assert np.abs(f_back - f).max() / max(np.abs(f).max(), 1.0) < 1e-4


def test_leg_transmission_zero_and_singular():
    geom = default_legs()[0]
    j = jacobian(np.zeros(3), geom)  # straight leg, singular
    np.testing.assert_array_equal(leg_transmission(np.zeros(3), j), np.zeros(3))
    tau = np.array([0.0, 5.0, 5.0])
    f = leg_transmission(tau, j)
    assert np.all(np.isfinite(f))
    assert np.linalg.norm(f) <= np.linalg.norm(tau) / 1e-3 + 1e-9


def test_workspace_tether_bounds_feet():
    # Take the legs' anchor away (zero torque): the trunk free-falls while
    # the feet rest on the ground, so hip-to-foot distance grows until the
    # tether catches it near the outer workspace radius.
    state = make_standing_state(MODEL, FLAT)
    geom = MODEL.leg_geom
    r_max = geom.max_reach
    worst = 0.0
    for _ in range(400):
        state = step(state, np.zeros(12), MODEL, FLAT, DT)
        rot = quat_to_rot(state.quat)
        hips = state.trunk_pos + np.asarray(MODEL.hip_offsets) @ rot.T
        rho = np.linalg.norm(state.foot_pos - hips, axis=1)
        worst = max(worst, rho.max())
    assert worst > r_max - 0.01          # the tether actually engaged
    assert worst < r_max + 0.02          # and held (soft bound, stiff spring)


def test_observe_matches_forward_kinematics():
    state = make_standing_state(MODEL, FLAT, xy=(0.3, -0.2), yaw=0.4)
    obs = observe(state, MODEL)
    rot = quat_to_rot(state.quat)
    hips = state.trunk_pos + np.asarray(MODEL.hip_offsets) @ rot.T
    for i, geom in enumerate(MODEL.legs):
        p_hip = rot.T @ (state.foot_pos[i] - hips[i])
        np.testing.assert_allclose(obs.foot_pos[i], p_hip, atol=1e-12)
        np.testing.assert_allclose(forward_kinematics(obs.q[i], geom), p_hip,
                                   atol=1e-9)


def test_observe_velocity_mapping():
    state = make_standing_state(MODEL, FLAT)
    rng = np.random.default_rng(14)
    state.trunk_vel = rng.uniform(-0.3, 0.3, 3)
    state.omega_body = rng.uniform(-0.5, 0.5, 3)
    state.foot_vel = rng.uniform(-0.4, 0.4, (4, 3))
    obs = observe(state, MODEL)
    for i in range(4):
        v_fk = obs.jac[i] @ obs.qdot[i]
        np.testing.assert_allclose(v_fk, obs.foot_vel[i], atol=5e-4)


def test_divergence_raises():
    state = make_standing_state(MODEL, FLAT)
    state.trunk_vel = np.array([0.0, 0.0, 2e6])
    with pytest.raises(SimulationDiverged):
        for _ in range(5):
            state = step(state, np.zeros(12), MODEL, FLAT, DT)


def test_standing_state_preloads_contact():
    state = make_standing_state(MODEL, FLAT, xy=(1.0, 2.0), yaw=0.3)
    np.testing.assert_allclose(state.foot_pos[:, 2], -1e-3, atol=1e-12)
    assert state.contacts.all()
    assert state.trunk_pos[2] == pytest.approx(0.27)
    np.testing.assert_allclose(state.trunk_pos[:2], [1.0, 2.0], atol=1e-12)


def test_model_validation():
    with pytest.raises(ValueError):
        default_model(trunk_mass=-1.0)
    with pytest.raises(ValueError):
        default_model(trunk_inertia=(0.1, 0.0, 0.3))
    m = default_model()
    assert m.total_mass == pytest.approx(12.8)
    assert m.tau_max == 23.7
