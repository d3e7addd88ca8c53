"""Desk-scale quadruped jumping: simulation, control, and online optimization.

The package implements a small vertically integrated pipeline:

* legs        - 3-DOF leg kinematics (FK, IK, Jacobians)
* profiles    - phase oscillator and half-sine foot force profiles
* controller  - feedforward + Cartesian impedance + virtual model control
* terrain     - flat and random block heightfields with a contact model
* simulator   - floating trunk + point-mass feet dynamics at 1 kHz
* tpe         - a small Tree-structured Parzen Estimator (ask/tell)
* episodes    - jump episodes, objectives, fall detection
* study       - optimization studies over seeds, with exports and resume
* config/cli  - YAML experiment configs and the command line front end
"""

from .legs import LegGeometry, default_legs, forward_kinematics, inverse_kinematics, jacobian
from .profiles import JumpType, OscillatorState, ProfileParams, durations, foot_force, impulse_active, step_phase
from .controller import ControllerInputs, Gains, LegController, total_torque, vmc_forces
from .terrain import Terrain, contact_force, flat_terrain, make_block_terrain
from .simulator import RobotModel, RobotState, SimulationDiverged, TrajectoryLog, default_model, leg_transmission, make_standing_state, observe, step
from .tpe import ParzenMixture, SearchSpace, TpeConfig, Trial, TpeOptimizer, ask, best, propose, tell
from .episodes import EpisodeResult, YawTracker, detect_fall, objective, run_episode
from .study import StudyResult, optimize, run_study
from .config import ConfigError, ExperimentConfig, load_config, save_config

__version__ = "0.1.0"
