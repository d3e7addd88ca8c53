"""Drop the robot onto flat ground and watch the controller settle it.

The standing state preloads a slight foot penetration, so the first few
hundred milliseconds show the contact springs and the impedance controller
trading energy until the trunk rests a little below the commanded crouch.

Writes standing_balance.png next to this file.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from jumpopt.controller import LegController
from jumpopt.simulator import default_model, make_standing_state, observe, step
from jumpopt.terrain import flat_terrain

OUT = pathlib.Path(__file__).with_name("standing_balance.png")
DT = 1e-3

model = default_model()
terrain = flat_terrain()
state = make_standing_state(model, terrain)
ctl = LegController()

ts, height, load = [], [], []
for i in range(4000):
    obs = observe(state, model)
    tau = ctl.compute(obs)
    state, forces = step(state, tau, model, terrain, DT, kin=obs,
                         return_forces=True)
    ts.append(i * DT)
    height.append(state.trunk_pos[2])
    load.append(forces.contact[:, 2].sum())

weight = model.total_mass * 9.81
ts = np.asarray(ts)

fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
ax1.plot(ts, height)
ax1.axhline(0.27, color="0.6", ls="--", label="commanded crouch")
ax1.set_ylabel("trunk height [m]")
ax1.legend(fontsize=8)
ax2.plot(ts, load)
ax2.axhline(weight, color="0.6", ls="--", label=f"weight {weight:.0f} N")
ax2.set_ylabel("total normal force [N]")
ax2.set_xlabel("time [s]")
ax2.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT, dpi=130)
print(f"wrote {OUT}")

settled = np.mean(load[-500:])
print(f"trunk settles at {height[-1]:.3f} m "
      f"(commanded 0.270, sagged under load)")
print(f"mean normal force over the last 0.5 s: {settled:.1f} N "
      f"vs weight {weight:.1f} N ({100 * (settled / weight - 1):+.2f}%)")
print(f"residual trunk speed {np.linalg.norm(state.trunk_vel):.2e} m/s")
