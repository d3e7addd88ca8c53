"""Phase oscillator and half-sine foot force profiles.

A single oscillator drives all four legs (the gait is a pronk). Its phase
advances at one of two rates: the impulse frequency f0 while the phase sits
in [pi, 2*pi), and the much slower flight/recovery frequency f1 in [0, pi).
Forces are emitted only while sin(theta) < 0, so each cycle is an impulse
window of length 1/(2*f0) followed by an off window of length 1/(2*f1).

A jump type is a per-leg sign pattern on the x and y force amplitudes. The
amplitudes themselves (Fx, Fy, Fz) are always non-negative; during the
impulse the z component comes out negative, meaning the foot pushes down
into the ground and the trunk is pushed up by the reaction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# Search bounds for the profile parameters (frequencies in Hz, forces in N).
PARAM_BOUNDS = {
    "f0": (0.75, 1.75),
    "fx": (0.0, 150.0),
    "fy": (0.0, 150.0),
    "fz": (150.0, 350.0),
}

DEFAULT_F1 = 0.25


class JumpType(enum.Enum):
    """Direction of a jump, encoded as per-leg force sign patterns."""

    FORWARD = "forward"
    BACKWARD = "backward"
    LATERAL_LEFT = "lateral-left"
    LATERAL_RIGHT = "lateral-right"
    TWIST_CCW = "twist-ccw"
    TWIST_CW = "twist-cw"

    @property
    def signs(self) -> np.ndarray:
        """(4, 2) array of (s_x, s_y) per leg in FR, FL, RR, RL order."""
        return _SIGN_TABLE[self].copy()

    @property
    def optimized_names(self) -> tuple[str, ...]:
        """Profile parameters searched for this jump direction."""
        if self in (JumpType.FORWARD, JumpType.BACKWARD):
            return ("f0", "fx", "fz")
        return ("f0", "fy", "fz")


# Sign conventions: x forward, y left. The profile force is what the foot
# applies to the ground, so the trunk feels the opposite. Forward jumps push
# the ground backwards (all s_x = +1 combine with the negative half-sine).
# The axis a jump direction does not drive carries a zero sign, so a stray
# amplitude on that axis cannot leak in. Twists push front and rear pairs to
# opposite sides, which leaves zero net lateral force but a net yaw moment;
# the CCW pattern is the one whose reaction spins the trunk to positive yaw.
# Leg order: FR, FL, RR, RL.
_SIGN_TABLE = {
    JumpType.FORWARD: np.array([[+1.0, 0.0]] * 4),
    JumpType.BACKWARD: np.array([[-1.0, 0.0]] * 4),
    JumpType.LATERAL_LEFT: np.array([[0.0, +1.0]] * 4),
    JumpType.LATERAL_RIGHT: np.array([[0.0, -1.0]] * 4),
    JumpType.TWIST_CCW: np.array(
        [[0.0, +1.0], [0.0, +1.0], [0.0, -1.0], [0.0, -1.0]]
    ),
    JumpType.TWIST_CW: np.array(
        [[0.0, -1.0], [0.0, -1.0], [0.0, +1.0], [0.0, +1.0]]
    ),
}


@dataclass(frozen=True)
class ProfileParams:
    """Force profile parameters: impulse frequency and force amplitudes.

    f0 and the amplitudes live inside the search bounds above; f1 is not
    optimized and defaults to a slow recovery rate (raise it for continuous
    jumping).
    """

    f0: float
    fx: float = 0.0
    fy: float = 0.0
    fz: float = 150.0
    f1: float = DEFAULT_F1

    def __post_init__(self):
        for name in ("f0", "fx", "fy", "fz"):
            lo, hi = PARAM_BOUNDS[name]
            v = getattr(self, name)
            if not np.isfinite(v) or not (lo <= v <= hi):
                raise ValueError(f"{name}={v!r} outside [{lo}, {hi}]")
        if not np.isfinite(self.f1) or self.f1 <= 0.0:
            raise ValueError(f"f1 must be positive, got {self.f1!r}")

    @property
    def impulse_duration(self) -> float:
        return 1.0 / (2.0 * self.f0)

    @property
    def off_duration(self) -> float:
        return 1.0 / (2.0 * self.f1)


def durations(params: ProfileParams) -> tuple[float, float]:
    """(impulse window, off window) lengths in seconds."""
    return params.impulse_duration, params.off_duration


@dataclass(frozen=True)
class OscillatorState:
    """Phase in [0, 2*pi) plus the rate currently driving it."""

    theta: float
    freq: float


def oscillator_at(params: ProfileParams, theta: float) -> OscillatorState:
    """Oscillator state at a given phase with the matching rate."""
    theta = float(theta) % TWO_PI
    freq = params.f0 if theta >= np.pi else params.f1
    return OscillatorState(theta, freq)


def step_phase(state: OscillatorState, params: ProfileParams, dt: float) -> OscillatorState:
    """Advance the phase by one control tick and re-select the rate."""
    if not 0.0 < dt <= 0.01:
        raise ValueError(f"dt must be in (0, 0.01], got {dt!r}")
    theta = (state.theta + TWO_PI * state.freq * dt) % TWO_PI
    return oscillator_at(params, theta)


def impulse_active(theta: float) -> bool:
    """True while the half-sine force window is open (sin(theta) < 0).

    The phase is wrapped into [0, 2pi) first so that a value of exactly
    2pi (whose floating-point sine is a tiny negative number) counts as the
    start of the quiet half, matching the wrapped oscillator state.
    """
    return np.sin(np.mod(theta, 2.0 * np.pi)) < 0.0


def foot_force(params: ProfileParams, jump: JumpType, theta: float,
               leg: int | None = None) -> np.ndarray:
    """Commanded foot force profile at phase theta.

    Returns a (4, 3) array over the FR, FL, RR, RL legs, or a single (3,)
    row when a leg index is given. Outside the impulse window the command is
    exactly zero.
    """
    s = np.sin(np.mod(theta, 2.0 * np.pi))
    signs = _SIGN_TABLE[jump]
    if leg is not None:
        if s >= 0.0:
            return np.zeros(3)
        sx, sy = signs[leg]
        return s * np.array([sx * params.fx, sy * params.fy, params.fz])
    if s >= 0.0:
        return np.zeros((4, 3))
    amps = np.empty((4, 3))
    amps[:, 0] = signs[:, 0] * params.fx
    amps[:, 1] = signs[:, 1] * params.fy
    amps[:, 2] = params.fz
    return amps * s
