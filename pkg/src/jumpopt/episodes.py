"""Jump episodes: settle, jump, land, score.

An episode stands the robot up under impedance + attitude control, records
the reference pose, runs a whole number of oscillator cycles with the force
profile active (phase starting at pi so the impulse begins immediately),
then lets the robot land and settle again before reading the final pose.

The objective is the displacement matching the commanded jump direction:
forward/backward x, lateral y with side-dependent sign, twist the
accumulated yaw angle (tracked tick by tick, so multi-turn rotations count
in full). Any detected fall, or a numerically diverged simulation, zeroes
the objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .controller import Gains, LegController
from .profiles import JumpType, ProfileParams, oscillator_at, step_phase
from .rotations import quat_to_rot, roll_pitch_yaw, wrap_angle
from .simulator import (RobotModel, RobotState, SimulationDiverged,
                        TrajectoryLog, default_model, make_standing_state,
                        observe, step)
from .terrain import Terrain, flat_terrain

FALL_TILT = 1.05  # rad, roll or pitch beyond this counts as a fall
FALL_HEIGHT = 0.10  # m, trunk clearance below this while touching ground


class _YawAccumulator:
    """Unwraps the trunk yaw so full turns accumulate instead of wrapping."""

    def __init__(self, rot: np.ndarray):
        self._last = roll_pitch_yaw(rot)[2]
        self.value = self._last

    def update(self, rot: np.ndarray) -> float:
        yaw = roll_pitch_yaw(rot)[2]
        self.value += float(wrap_angle(yaw - self._last))
        self._last = yaw
        return self.value


# Public alias; the tracker is useful on its own for analyzing logged runs.
YawTracker = _YawAccumulator


def detect_fall(state: RobotState, terrain: Terrain) -> bool:
    """True when the trunk has tipped over or sits on the ground.

    The clearance test is suspended while every foot is airborne, so the
    apex of a clean jump never counts as a fall; extreme roll or pitch
    always does.
    """
    rot = quat_to_rot(state.quat)
    roll, pitch, _ = roll_pitch_yaw(rot)
    if abs(roll) > FALL_TILT or abs(pitch) > FALL_TILT:
        return True
    in_flight = not bool(np.any(state.contacts))
    if in_flight:
        return False
    ground = float(terrain.height(state.trunk_pos[0], state.trunk_pos[1]))
    return (state.trunk_pos[2] - ground) < FALL_HEIGHT


@dataclass(frozen=True)
class PoseSample:
    """The planar quantities the objectives are computed from."""

    x: float
    y: float
    yaw: float


def objective(jump: JumpType, init: PoseSample, final: PoseSample) -> float:
    """Signed task progress between the two reference poses."""
    if jump is JumpType.FORWARD:
        return final.x - init.x
    if jump is JumpType.BACKWARD:
        return init.x - final.x
    if jump is JumpType.LATERAL_LEFT:
        return final.y - init.y
    if jump is JumpType.LATERAL_RIGHT:
        return init.y - final.y
    if jump is JumpType.TWIST_CCW:
        return final.yaw - init.yaw
    if jump is JumpType.TWIST_CW:
        return init.yaw - final.yaw
    raise ValueError(f"unknown jump type {jump!r}")


@dataclass
class EpisodeResult:
    objective: float
    fell: bool
    init: PoseSample
    final: PoseSample
    peak_height: float
    trajectory: TrajectoryLog | None = None


def run_episode(params: ProfileParams, jump: JumpType, *,
                model: RobotModel | None = None,
                terrain: Terrain | None = None,
                gains: Gains | None = None,
                vmc_enabled: bool = True,
                jumps: int = 1,
                settle_duration: float = 1.0,
                post_landing_wait: float = 1.0,
                max_landing_wait: float = 3.0,
                dt: float = 1e-3,
                start_xy=(0.0, 0.0),
                record: bool = False) -> EpisodeResult:
    """Simulate one scored jump episode.

    The force profile runs for `jumps` whole oscillator cycles; before and
    after, the legs hold stance under impedance + attitude control alone.
    The final pose is read `post_landing_wait` seconds after all four feet
    are back in contact (with a cap of `max_landing_wait` on waiting for
    that touchdown).
    """
    model = model or default_model()
    terrain = terrain or flat_terrain()
    controller = LegController(gains or Gains(), model.tau_max, vmc_enabled)

    state = make_standing_state(model, terrain, xy=start_xy)
    yaw_acc = _YawAccumulator(quat_to_rot(state.quat))
    log = TrajectoryLog() if record else None

    t = 0.0
    fell = False
    peak = -np.inf

    def sample_pose() -> PoseSample:
        return PoseSample(float(state.trunk_pos[0]), float(state.trunk_pos[1]),
                          float(yaw_acc.value))

    def tick(theta, profile) -> bool:
        """Advance one control period; returns False once the robot falls."""
        nonlocal state, t, fell, peak
        kin = observe(state, model)
        if profile:
            kin.theta, kin.params, kin.jump = theta, params, jump
        tau = controller.compute(kin)
        try:
            if log is not None:
                state, forces = step(state, tau, model, terrain, dt, kin=kin,
                                     return_forces=True)
                log.append(t, state, tau, forces)
            else:
                state = step(state, tau, model, terrain, dt, kin=kin)
        except SimulationDiverged:
            fell = True
            return False
        t += dt
        yaw_acc.update(quat_to_rot(state.quat))
        clearance = state.trunk_pos[2] - float(
            terrain.height(state.trunk_pos[0], state.trunk_pos[1]))
        peak = max(peak, clearance)
        if detect_fall(state, terrain):
            fell = True
            return False
        return True

    def run_phase(duration: float, profile: bool, osc=None):
        nonlocal fell
        n = int(round(duration / dt))
        for _ in range(n):
            theta = osc.theta if osc is not None else None
            if not tick(theta, profile):
                return None
            if osc is not None:
                osc = step_phase(osc, params, dt)
        return osc

    # Stance settle, then the reference pose.
    run_phase(settle_duration, profile=False)
    init = sample_pose()

    if not fell:
        cycle = params.impulse_duration + params.off_duration
        osc = oscillator_at(params, np.pi)
        run_phase(jumps * cycle, profile=True, osc=osc)

    if not fell:
        # Wait for touchdown (bounded), then the post-landing settle.
        waited = 0.0
        while waited < max_landing_wait and not bool(state.contacts.all()):
            if not tick(None, False):
                break
            waited += dt
        if not fell:
            run_phase(post_landing_wait, profile=False)

    final = sample_pose()
    score = 0.0 if fell else objective(jump, init, final)
    return EpisodeResult(objective=float(score), fell=fell, init=init,
                         final=final, peak_height=float(peak), trajectory=log)
