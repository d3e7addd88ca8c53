"""Kinematics of a 3-DOF point-foot leg (hip abduction, hip flexion, knee).

Conventions
-----------
Each leg is described in its own hip frame: origin at the abduction joint,
axes aligned with the trunk (x forward, y left, z up). Joint vector
q = (q_abd, q_hip, q_knee):

* q_abd rolls the whole leg about the hip-frame +x axis,
* q_hip and q_knee rotate about the (rolled) -y axis, so positive angles
  swing the distal link forward,
* q = (0, 0, 0) is the fully stretched leg pointing straight down, foot at
  (0, side_sign * hip_offset, -(thigh_len + calf_len)).

With this sense a positive knee angle is the knee-backward crouch (thigh
swept back, calf forward under the body); inverse_kinematics keeps the knee
inside (0, pi), so there is a single branch and no hyperextension.

All functions accept leading batch dimensions on q / p, which is what the
simulator uses to process four legs at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rotations import wrap_angle

# Leg naming and mounting order used across the package: front-right,
# front-left, rear-right, rear-left. y points left, so right legs carry
# side_sign = -1.
LEG_NAMES = ("FR", "FL", "RR", "RL")
SIDE_SIGNS = np.array([-1.0, +1.0, -1.0, +1.0])

# Soft workspace shell, as fractions of full leg length. The outer bound
# keeps the Jacobian away from the stretched-leg singularity so force
# transmission stays invertible; the inner bound keeps the knee off the
# fully folded singularity.
REACH_FRACTION_MIN = 0.05
REACH_FRACTION_MAX = 0.95


@dataclass(frozen=True)
class LegGeometry:
    """Link dimensions for one leg (lengths in meters)."""

    hip_offset: float = 0.08
    thigh_len: float = 0.213
    calf_len: float = 0.213
    side_sign: float = 1.0
    name: str = "FL"

    def __post_init__(self):
        if min(self.hip_offset, self.thigh_len, self.calf_len) <= 0.0:
            raise ValueError("leg link lengths must be positive")
        if self.side_sign not in (-1.0, 1.0):
            raise ValueError("side_sign must be -1 or +1")

    @property
    def full_length(self) -> float:
        return self.thigh_len + self.calf_len

    @property
    def min_reach(self) -> float:
        return REACH_FRACTION_MIN * self.full_length

    @property
    def max_reach(self) -> float:
        return REACH_FRACTION_MAX * self.full_length


def default_legs(hip_offset: float = 0.08, thigh_len: float = 0.213,
                 calf_len: float = 0.213) -> tuple[LegGeometry, ...]:
    """The four legs in FR, FL, RR, RL order with mirrored side signs."""
    return tuple(
        LegGeometry(hip_offset, thigh_len, calf_len, float(s), name)
        for name, s in zip(LEG_NAMES, SIDE_SIGNS)
    )


def forward_kinematics(q: np.ndarray, geom: LegGeometry,
                       side_sign: np.ndarray | None = None) -> np.ndarray:
    """Foot position in the hip frame for joint angles q (..., 3) -> (..., 3).

    side_sign overrides geom.side_sign when given (may be an array broadcast
    against the batch, which lets one call cover all four legs).
    """
    q = np.asarray(q, dtype=float)
    s = geom.side_sign if side_sign is None else np.asarray(side_sign, dtype=float)
    l1, l2 = geom.thigh_len, geom.calf_len
    q1, q2, q23 = q[..., 0], q[..., 1], q[..., 1] + q[..., 2]

    x = l1 * np.sin(q2) + l2 * np.sin(q23)
    zp = -l1 * np.cos(q2) - l2 * np.cos(q23)  # z before the abduction roll
    y0 = s * geom.hip_offset

    c1, s1 = np.cos(q1), np.sin(q1)
    y = c1 * y0 - s1 * zp
    z = s1 * y0 + c1 * zp
    return np.stack(np.broadcast_arrays(x, y, z), axis=-1)


def jacobian(q: np.ndarray, geom: LegGeometry,
             side_sign: np.ndarray | None = None) -> np.ndarray:
    """Foot-velocity Jacobian dp/dq in the hip frame, shape (..., 3, 3).

    Built geometrically: column i is axis_i x (p_foot - p_joint_i) with every
    joint a revolute. Axis 1 is hip-frame x; axes 2 and 3 are the rolled -y.
    """
    q = np.asarray(q, dtype=float)
    s = geom.side_sign if side_sign is None else np.asarray(side_sign, dtype=float)
    l1, l2 = geom.thigh_len, geom.calf_len
    q1, q2, q23 = q[..., 0], q[..., 1], q[..., 1] + q[..., 2]
    c1, s1 = np.cos(q1), np.sin(q1)
    y0 = s * geom.hip_offset

    # Foot and knee positions in the hip frame.
    fx = l1 * np.sin(q2) + l2 * np.sin(q23)
    fzp = -l1 * np.cos(q2) - l2 * np.cos(q23)
    fy = c1 * y0 - s1 * fzp
    fz = s1 * y0 + c1 * fzp

    kx = l1 * np.sin(q2)
    kzp = -l1 * np.cos(q2)
    ky = c1 * y0 - s1 * kzp
    kz = s1 * y0 + c1 * kzp

    # Column 1: (1, 0, 0) x foot.
    j1x = np.zeros_like(fx)
    j1y = -fz
    j1z = fy

    # Columns 2 and 3 share the rolled pitch axis a = -(0, c1, s1).
    # a x v = -(c1 v_z - s1 v_y, s1 v_x, -c1 v_x).
    v2x, v2y, v2z = fx, fy - c1 * y0, fz - s1 * y0
    j2x = s1 * v2y - c1 * v2z
    j2y = -s1 * v2x
    j2z = c1 * v2x

    v3x, v3y, v3z = fx - kx, fy - ky, fz - kz
    j3x = s1 * v3y - c1 * v3z
    j3y = -s1 * v3x
    j3z = c1 * v3x

    rows = [np.broadcast_arrays(j1x, j2x, j3x),
            np.broadcast_arrays(j1y, j2y, j3y),
            np.broadcast_arrays(j1z, j2z, j3z)]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def inverse_kinematics(p: np.ndarray, geom: LegGeometry,
                       side_sign: np.ndarray | None = None
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Joint angles for a hip-frame foot target p (..., 3).

    Returns (q, clamped). Targets outside the reach shell
    [min_reach, max_reach] are first pulled radially (toward or away from the
    hip origin, direction preserved) onto the nearest bound and the clamped
    point is solved; `clamped` reports True for those entries, and for any
    target whose abduction or knee equation needed clipping. For targets
    strictly inside the shell the round trip forward_kinematics(q) == p holds
    to machine precision.
    """
    p = np.asarray(p, dtype=float)
    s = geom.side_sign if side_sign is None else np.asarray(side_sign, dtype=float)
    d, l1, l2 = geom.hip_offset, geom.thigh_len, geom.calf_len

    rho = np.linalg.norm(p, axis=-1)
    rho_c = np.clip(rho, geom.min_reach, geom.max_reach)
    clamped = rho_c != rho
    # Degenerate target at the hip origin: aim straight down.
    down = np.zeros_like(p)
    down[..., 2] = -1.0
    safe = rho > 1e-12
    p = np.where(safe[..., None], p, down)
    scale = rho_c / np.where(safe, rho, 1.0)
    p = p * scale[..., None]

    px, py, pz = p[..., 0], p[..., 1], p[..., 2]

    # Abduction: roll until the leg plane contains the target's y offset.
    big = np.hypot(py, pz)
    arg = s * d / np.maximum(big, 1e-12)
    clamped = clamped | (np.abs(arg) > 1.0)
    q1 = wrap_angle(np.arctan2(pz, py) + np.arccos(np.clip(arg, -1.0, 1.0)))

    # Planar two-link problem in the rolled x-z plane.
    zp = -np.sqrt(np.maximum(big * big - d * d, 0.0))
    r2 = px * px + zp * zp
    ck = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    clamped = clamped | (np.abs(ck) > 1.0)
    q3 = np.arccos(np.clip(ck, -1.0, 1.0))
    q2 = np.arctan2(px, -zp) - np.arctan2(l2 * np.sin(q3), l1 + l2 * np.cos(q3))

    q = np.stack(np.broadcast_arrays(q1, q2, q3), axis=-1)
    return q, clamped
