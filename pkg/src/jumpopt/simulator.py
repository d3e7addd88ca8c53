"""Desk-scale quadruped dynamics: floating trunk plus four point-mass feet.

The trunk is a rigid body (mass, diagonal inertia); each foot is a point
mass; the legs between them are massless transmissions. Joint torques turn
into hip-frame foot forces through the damped Jacobian-transpose inverse
F = J (J^T J + lambda^2 I)^-1 tau, the foot feels that force and the trunk
feels the opposite at the foot's position. Ground contact acts on the feet
only. A stiff radial spring-damper tethers each foot into the leg's reach
shell so forces stay transmissible.

Integration is semi-implicit Euler at 1 kHz: velocities first, then
positions, with the attitude quaternion advanced by the exact exponential
of the new body rate and renormalized. The velocity-proportional parts of
the contact and workspace forces (normal damping, regularized friction,
radial damping) are solved implicitly against the end-of-step foot
velocity; with the default constants the foot mass is far too light for an
explicit treatment at dt = 1e-3 (the damping ratios per step exceed the
explicit stability bound), while the implicit form is unconditionally
stable and leaves the continuous model unchanged.

Contact flags are refreshed from post-step penetration, so the controller
always sees flags that are one tick old; that breaks the algebraic loop
between contact-gated torques and contact forces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .controller import ControllerInputs, nominal_foot_targets
from .legs import LegGeometry, SIDE_SIGNS, default_legs, inverse_kinematics, jacobian
from .rotations import quat_identity, quat_step_body, quat_to_rot, rot_z
from .terrain import Terrain

JAC_DAMPING = 1e-3  # shared conditioning for every J-inverse in the package

DEFAULT_HIP_OFFSETS = np.array([
    [+0.19, -0.047, 0.0],
    [+0.19, +0.047, 0.0],
    [-0.19, -0.047, 0.0],
    [-0.19, +0.047, 0.0],
])


class SimulationDiverged(RuntimeError):
    """Raised when the state leaves the trustworthy numeric range."""


@dataclass(frozen=True)
class RobotModel:
    """Masses, inertia, mounting geometry, and limits of the robot."""

    trunk_mass: float = 12.0
    trunk_inertia: tuple[float, float, float] = (0.10, 0.25, 0.30)
    foot_mass: float = 0.2
    hip_offsets: np.ndarray = field(default_factory=lambda: DEFAULT_HIP_OFFSETS.copy())
    legs: tuple[LegGeometry, ...] = field(default_factory=default_legs)
    tau_max: float = 23.7
    k_work: float = 50000.0
    d_work: float = 200.0
    gravity: float = 9.81

    def __post_init__(self):
        if self.trunk_mass <= 0.0 or self.foot_mass <= 0.0:
            raise ValueError("masses must be positive")
        if any(v <= 0.0 for v in self.trunk_inertia):
            raise ValueError("inertia entries must be positive")
        if len(self.legs) != 4 or np.asarray(self.hip_offsets).shape != (4, 3):
            raise ValueError("expected four legs and four hip offsets")
        ref = self.legs[0]
        for g in self.legs[1:]:
            if (g.hip_offset, g.thigh_len, g.calf_len) != (
                    ref.hip_offset, ref.thigh_len, ref.calf_len):
                raise ValueError("legs must share link dimensions")

    @property
    def side_signs(self) -> np.ndarray:
        return np.array([g.side_sign for g in self.legs])

    @property
    def leg_geom(self) -> LegGeometry:
        return self.legs[0]

    @property
    def total_mass(self) -> float:
        return self.trunk_mass + 4.0 * self.foot_mass


def default_model(**overrides) -> RobotModel:
    return RobotModel(**overrides)


@dataclass
class RobotState:
    """Full simulator state (world frame unless stated otherwise)."""

    trunk_pos: np.ndarray
    quat: np.ndarray  # (w, x, y, z), trunk body to world
    trunk_vel: np.ndarray
    omega_body: np.ndarray  # angular rate in the body frame
    foot_pos: np.ndarray  # (4, 3)
    foot_vel: np.ndarray  # (4, 3)
    contacts: np.ndarray  # (4,) bool, refreshed after each step

    def copy(self) -> "RobotState":
        return RobotState(self.trunk_pos.copy(), self.quat.copy(),
                          self.trunk_vel.copy(), self.omega_body.copy(),
                          self.foot_pos.copy(), self.foot_vel.copy(),
                          self.contacts.copy())


@dataclass
class StepForces:
    """Per-step force diagnostics (world frame)."""

    contact: np.ndarray  # (4, 3) ground reaction on each foot
    leg: np.ndarray  # (4, 3) leg force on each foot
    workspace: np.ndarray  # (4, 3) reach-shell tether force on each foot


def make_standing_state(model: RobotModel, terrain: Terrain,
                        xy=(0.0, 0.0), yaw: float = 0.0) -> RobotState:
    """Feet at their stance targets on the local surface, trunk above them."""
    rot = rot_z(yaw)
    targets = nominal_foot_targets(model.leg_geom.hip_offset)
    local = np.asarray(model.hip_offsets) + targets
    feet = (rot @ local.T).T
    feet[:, 0] += xy[0]
    feet[:, 1] += xy[1]
    ground = terrain.height(feet[:, 0], feet[:, 1])
    feet[:, 2] = ground - 1e-3  # pre-load the contact springs slightly
    trunk_z = float(np.mean(ground)) - targets[0, 2]
    trunk = np.array([xy[0], xy[1], trunk_z])
    quat = np.array([np.cos(yaw / 2), 0.0, 0.0, np.sin(yaw / 2)])
    return RobotState(trunk, quat, np.zeros(3), np.zeros(3), feet,
                      np.zeros((4, 3)), np.ones(4, dtype=bool))


def leg_transmission(tau_leg: np.ndarray, jac: np.ndarray,
                     damping: float = JAC_DAMPING) -> np.ndarray:
    """Hip-frame foot force realized by joint torques, F = J (J^T J + l^2 I)^-1 tau.

    Batched over leading dimensions. Near singular configurations the damped
    inverse keeps the force bounded by |tau| / (2 * damping).
    """
    jac = np.asarray(jac, dtype=float)
    tau_leg = np.asarray(tau_leg, dtype=float)
    jtj = np.einsum("...ji,...jk->...ik", jac, jac)
    jtj[..., 0, 0] += damping * damping
    jtj[..., 1, 1] += damping * damping
    jtj[..., 2, 2] += damping * damping
    sol = np.linalg.solve(jtj, tau_leg[..., None])[..., 0]
    return np.einsum("...ij,...j->...i", jac, sol)


def observe(state: RobotState, model: RobotModel) -> ControllerInputs:
    """Controller view of the state: hip-frame foot kinematics per leg."""
    rot = quat_to_rot(state.quat)
    hip_arms = np.asarray(model.hip_offsets) @ rot.T
    hips = state.trunk_pos + hip_arms
    p_hip = (state.foot_pos - hips) @ rot

    geom = model.leg_geom
    sides = model.side_signs
    q, _ = inverse_kinematics(p_hip, geom, side_sign=sides)
    jac = jacobian(q, geom, side_sign=sides)

    omega_w = rot @ state.omega_body
    hip_vel = state.trunk_vel + np.cross(omega_w, hip_arms)
    v_hip = (state.foot_vel - hip_vel) @ rot - np.cross(state.omega_body, p_hip)

    jtj = np.einsum("...ji,...jk->...ik", jac, jac)
    jtj[..., 0, 0] += JAC_DAMPING * JAC_DAMPING
    jtj[..., 1, 1] += JAC_DAMPING * JAC_DAMPING
    jtj[..., 2, 2] += JAC_DAMPING * JAC_DAMPING
    jtv = np.einsum("...ji,...j->...i", jac, v_hip)
    qdot = np.linalg.solve(jtj, jtv[..., None])[..., 0]

    return ControllerInputs(
        foot_pos=p_hip, foot_vel=v_hip, q=q, qdot=qdot, jac=jac, rot=rot,
        contacts=state.contacts.copy(),
        foot_targets=nominal_foot_targets(geom.hip_offset),
    )


def _check_finite(state: RobotState):
    for arr in (state.trunk_pos, state.quat, state.trunk_vel,
                state.omega_body, state.foot_pos, state.foot_vel):
        if not np.all(np.isfinite(arr)) or np.abs(arr).max() > 1e6:
            raise SimulationDiverged("state left the trustworthy range")


def step(state: RobotState, tau: np.ndarray, model: RobotModel,
         terrain: Terrain, dt: float = 1e-3,
         kin: ControllerInputs | None = None,
         return_forces: bool = False):
    """Advance the state one control tick under joint torques tau (12,).

    Passing the ControllerInputs already computed for this tick (kin) skips
    recomputing leg kinematics; it must describe exactly this state.
    Raises SimulationDiverged when values blow up. With return_forces=True
    the result is (state, StepForces).
    """
    mf = model.foot_mass
    geom = model.leg_geom

    if kin is None:
        kin = observe(state, model)
    rot = kin.rot
    hip_arms = np.asarray(model.hip_offsets) @ rot.T
    hips = state.trunk_pos + hip_arms

    tau = np.clip(np.asarray(tau, dtype=float).reshape(4, 3),
                  -model.tau_max, model.tau_max)
    f_leg_hip = leg_transmission(tau, kin.jac)
    f_leg_w = f_leg_hip @ rot.T

    # Reach-shell tether, elastic part from pre-step geometry.
    rel = state.foot_pos - hips
    rho = np.linalg.norm(rel, axis=1)
    u = rel / np.maximum(rho, 1e-12)[:, None]
    rho_c = np.clip(rho, geom.min_reach, geom.max_reach)
    ws_active = rho_c != rho
    f_ws_el = -model.k_work * (rho - rho_c)[:, None] * u

    # Ground contact, elastic part from pre-step penetration.
    pen = terrain.height(state.foot_pos[:, 0], state.foot_pos[:, 1]) - state.foot_pos[:, 2]
    in_contact = pen > 0.0

    omega_w = rot @ state.omega_body
    hip_vel = state.trunk_vel + np.cross(omega_w, hip_arms)

    grav = np.array([0.0, 0.0, -model.gravity])

    # Velocity update of the feet with damping terms taken implicitly:
    # (I + dt/m (Dc + Dws)) v' = v + dt/m (explicit forces + Dws v_hip).
    ez = np.array([0.0, 0.0, 1.0])
    d_ws = (model.d_work * ws_active[:, None, None]
            * np.einsum("li,lj->lij", u, u))
    d_c = (terrain.d_normal * in_contact)[:, None, None] * np.outer(ez, ez)

    f_expl = (f_leg_w + mf * grav + f_ws_el
              + np.where(in_contact, terrain.k_normal * pen, 0.0)[:, None] * ez
              + np.einsum("lij,lj->li", d_ws, hip_vel))
    a_mat = np.eye(3) + (dt / mf) * (d_c + d_ws)
    v_star = np.linalg.solve(a_mat, (state.foot_vel + (dt / mf) * f_expl)[..., None])[..., 0]

    # One-sided normal force: if the damped spring would pull, release it.
    fn = np.where(in_contact, terrain.k_normal * pen - terrain.d_normal * v_star[:, 2], 0.0)
    pulling = in_contact & (fn < 0.0)
    if pulling.any():
        f_expl2 = (f_leg_w + mf * grav + f_ws_el
                   + np.einsum("lij,lj->li", d_ws, hip_vel))
        a_mat2 = np.eye(3) + (dt / mf) * d_ws
        v_alt = np.linalg.solve(a_mat2, (state.foot_vel + (dt / mf) * f_expl2)[..., None])[..., 0]
        v_star = np.where(pulling[:, None], v_alt, v_star)
        fn = np.where(pulling, 0.0, fn)

    # Regularized Coulomb friction on the tangential velocity, solved as a
    # monotone scalar problem per foot (viscous below the slip speed, capped
    # at mu fn above it).
    vt = v_star[:, :2]
    w = np.linalg.norm(vt, axis=1)
    slip_gain = terrain.mu * fn / terrain.v_slip
    s_visc = w / (1.0 + dt * slip_gain / mf)
    s_slip = w - dt * terrain.mu * fn / mf
    s = np.where(w <= terrain.v_slip + dt * terrain.mu * fn / mf, s_visc, s_slip)
    s = np.where((fn > 0.0) & (w > 1e-12), s, w)
    vt_new = vt * (s / np.maximum(w, 1e-12))[:, None]
    f_t = mf * (vt_new - vt) / dt

    foot_vel_new = np.concatenate([vt_new, v_star[:, 2:3]], axis=1)

    # Forces actually exchanged with the trunk this step.
    f_ws = f_ws_el - np.einsum("lij,lj->li", d_ws, v_star - hip_vel)
    f_contact = np.concatenate([f_t, fn[:, None]], axis=1)

    # Trunk velocity update (reactions of leg and tether forces).
    f_trunk = model.trunk_mass * grav - f_leg_w.sum(axis=0) - f_ws.sum(axis=0)
    torque_w = (np.cross(state.foot_pos - state.trunk_pos, -f_leg_w).sum(axis=0)
                + np.cross(hip_arms, -f_ws).sum(axis=0))
    torque_b = rot.T @ torque_w
    inertia = np.asarray(model.trunk_inertia)
    om = state.omega_body
    gyro = np.cross(om, inertia * om)
    omega_new = om + dt * (torque_b - gyro) / inertia
    trunk_vel_new = state.trunk_vel + dt * f_trunk / model.trunk_mass

    # Position update from the new velocities.
    new = RobotState(
        trunk_pos=state.trunk_pos + dt * trunk_vel_new,
        quat=quat_step_body(state.quat, omega_new, dt),
        trunk_vel=trunk_vel_new,
        omega_body=omega_new,
        foot_pos=state.foot_pos + dt * foot_vel_new,
        foot_vel=foot_vel_new,
        contacts=np.zeros(4, dtype=bool),
    )
    new.contacts = (terrain.height(new.foot_pos[:, 0], new.foot_pos[:, 1])
                    - new.foot_pos[:, 2]) > 0.0
    _check_finite(new)

    if return_forces:
        return new, StepForces(contact=f_contact, leg=f_leg_w, workspace=f_ws)
    return new


class TrajectoryLog:
    """Per-tick trajectory recorder with line-delimited JSON persistence."""

    FIELDS = ("t", "trunk_pos", "quat", "trunk_vel", "omega_body",
              "foot_pos", "contacts", "tau", "contact_forces")

    def __init__(self):
        self.records: list[dict] = []

    def append(self, t: float, state: RobotState, tau: np.ndarray,
               forces: StepForces | None = None):
        rec = {
            "t": round(t, 9),
            "trunk_pos": state.trunk_pos.tolist(),
            "quat": state.quat.tolist(),
            "trunk_vel": state.trunk_vel.tolist(),
            "omega_body": state.omega_body.tolist(),
            "foot_pos": state.foot_pos.tolist(),
            "contacts": state.contacts.astype(int).tolist(),
            "tau": np.asarray(tau).reshape(-1).tolist(),
            "contact_forces": (forces.contact.tolist() if forces is not None
                               else None),
        }
        self.records.append(rec)

    def save_jsonl(self, path):
        with open(path, "w") as fh:
            for rec in self.records:
                fh.write(json.dumps(rec) + "\n")

    @classmethod
    def load_jsonl(cls, path) -> "TrajectoryLog":
        log = cls()
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    log.records.append(json.loads(line))
        return log

    def __len__(self):
        return len(self.records)
