"""Leg torque controller: feedforward force, impedance, virtual model.

Every term maps a Cartesian foot force through the leg Jacobian transpose,
tau = J^T F, with forces expressed in the hip (body-aligned) frame:

* feedforward: the half-sine profile force for the active jump,
* impedance: a spring-damper to the nominal stance foot target plus plain
  joint-rate damping,
* virtual model: attitude-restoring vertical forces at the four trunk
  corners, computed from the trunk rotation only.

Feedforward and virtual model act through the ground, so both are gated by
the per-leg contact flag; impedance is always on. The summed torques are
clamped symmetrically to the actuator limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .legs import SIDE_SIGNS
from .profiles import JumpType, ProfileParams, foot_force

TAU_MAX = 23.7  # N*m, per joint

# Corner matrix of the virtual model: columns give each leg's (x, y) corner
# sign in FR, FL, RR, RL order; the z row is empty because only attitude,
# not height, is regulated.
VMC_CORNERS = np.array([
    [1.0, 1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0, 1.0],
    [0.0, 0.0, 0.0, 0.0],
])

NOMINAL_FOOT_HEIGHT = -0.27


@dataclass(frozen=True)
class Gains:
    """Controller gains. Vectors are diagonals of the corresponding matrices."""

    kp: tuple[float, float, float] = (400.0, 400.0, 400.0)
    kd: tuple[float, float, float] = (8.0, 8.0, 8.0)
    kd_joint: tuple[float, float, float] = (0.8, 0.8, 0.8)
    k_att: float = 200.0

    def __post_init__(self):
        for name in ("kp", "kd", "kd_joint"):
            if any(v < 0.0 for v in getattr(self, name)):
                raise ValueError(f"{name} entries must be non-negative")
        if self.k_att < 0.0:
            raise ValueError("k_att must be non-negative")


def nominal_foot_targets(hip_offset: float = 0.08,
                         height: float = NOMINAL_FOOT_HEIGHT) -> np.ndarray:
    """Nominal stance targets in each hip frame, (4, 3): under the hip,
    outboard by the hip offset, at a bent-knee height."""
    targets = np.zeros((4, 3))
    targets[:, 1] = SIDE_SIGNS * hip_offset
    targets[:, 2] = height
    return targets


@dataclass
class ControllerInputs:
    """Per-tick measurements the torque law consumes.

    Leg-indexed arrays follow FR, FL, RR, RL order. foot_pos/foot_vel are
    hip-frame foot positions and velocities; jac holds the matching leg
    Jacobians; rot is the trunk rotation (body to world); contacts are the
    one-tick-delayed touch flags from the simulator.
    """

    foot_pos: np.ndarray
    foot_vel: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    jac: np.ndarray
    rot: np.ndarray
    contacts: np.ndarray
    foot_targets: np.ndarray = field(default_factory=nominal_foot_targets)
    theta: float | None = None
    params: ProfileParams | None = None
    jump: JumpType | None = None


def feedforward_torque(jac: np.ndarray, force: np.ndarray) -> np.ndarray:
    """tau = J^T F, batched over leading dimensions."""
    return np.einsum("...ji,...j->...i", jac, force)


def impedance_torque(jac: np.ndarray, target: np.ndarray, foot_pos: np.ndarray,
                     foot_vel: np.ndarray, qdot: np.ndarray, gains: Gains) -> np.ndarray:
    """Spring-damper to the stance target plus joint damping, batched."""
    f = np.asarray(gains.kp) * (target - foot_pos) - np.asarray(gains.kd) * foot_vel
    return feedforward_torque(jac, f) - np.asarray(gains.kd_joint) * qdot


def vmc_forces(rot: np.ndarray, k_att: float = 200.0) -> np.ndarray:
    """Attitude-restoring corner forces, shape (3, 4) over FR, FL, RR, RL.

    Rotating the corner matrix by the trunk attitude and reading off the
    height of each rotated corner gives a vertical force per leg that pushes
    high corners down and low corners up. Level trunks produce exactly zero.
    """
    rot = np.asarray(rot, dtype=float)
    if rot.shape != (3, 3) or np.abs(rot @ rot.T - np.eye(3)).max() > 1e-6:
        raise ValueError("rot must be a 3x3 rotation matrix")
    corners = rot @ VMC_CORNERS
    out = np.zeros((3, 4))
    out[2] = k_att * corners[2]
    return out


def vmc_torque(jac: np.ndarray, force_col: np.ndarray) -> np.ndarray:
    """Map one leg's virtual model force through its Jacobian transpose."""
    return jac.T @ force_col


def clamp_torques(tau: np.ndarray, tau_max: float = TAU_MAX) -> np.ndarray:
    return np.clip(tau, -tau_max, tau_max)


def total_torque(inputs: ControllerInputs, gains: Gains | None = None,
                 tau_max: float = TAU_MAX, vmc_enabled: bool = True) -> np.ndarray:
    """Summed, clamped joint torques for all legs, shape (12,).

    Feedforward profile torques appear only when the inputs carry an active
    profile (theta/params/jump set) and only on legs in contact; virtual
    model torques are likewise contact-gated. The clamp is applied once, to
    the sum.
    """
    gains = gains or Gains()
    tau = impedance_torque(inputs.jac, inputs.foot_targets, inputs.foot_pos,
                           inputs.foot_vel, inputs.qdot, gains)

    in_contact = np.asarray(inputs.contacts, dtype=bool)
    if inputs.params is not None and inputs.theta is not None and inputs.jump is not None:
        f_profile = foot_force(inputs.params, inputs.jump, inputs.theta)
        f_profile = np.where(in_contact[:, None], f_profile, 0.0)
        tau = tau + feedforward_torque(inputs.jac, f_profile)

    if vmc_enabled:
        f_vmc = vmc_forces(inputs.rot, gains.k_att).T  # (4, 3) rows per leg
        f_vmc = np.where(in_contact[:, None], f_vmc, 0.0)
        tau = tau + feedforward_torque(inputs.jac, f_vmc)

    return clamp_torques(tau, tau_max).reshape(-1)


class LegController:
    """Convenience wrapper binding gains, limits, and the VMC switch."""

    def __init__(self, gains: Gains | None = None, tau_max: float = TAU_MAX,
                 vmc_enabled: bool = True):
        self.gains = gains or Gains()
        self.tau_max = float(tau_max)
        self.vmc_enabled = bool(vmc_enabled)

    def compute(self, inputs: ControllerInputs) -> np.ndarray:
        return total_torque(inputs, self.gains, self.tau_max, self.vmc_enabled)
