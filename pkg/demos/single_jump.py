"""One scored forward jump, traced tick by tick.

Runs the mid-range forward parameters on flat ground with trajectory
recording on, then plots the trunk path and the contact timeline. The
printed objective is the net forward displacement between the settled
pre-jump pose and the settled post-landing pose.

Writes single_jump.png next to this file.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from jumpopt.episodes import run_episode
from jumpopt.profiles import JumpType, ProfileParams

OUT = pathlib.Path(__file__).with_name("single_jump.png")

params = ProfileParams(f0=1.0, f1=0.25, fx=25.0, fy=0.0, fz=200.0)
result = run_episode(params, JumpType.FORWARD, record=True)

recs = result.trajectory.records
t = np.array([r["t"] for r in recs])
pos = np.array([r["trunk_pos"] for r in recs])
n_contact = np.array([np.sum(r["contacts"]) for r in recs])
airborne = n_contact == 0

print(f"objective (net forward travel): {result.objective:+.3f} m")
print(f"peak trunk height: {result.peak_height:.3f} m")
print(f"fell: {result.fell}")
if airborne.any():
    print(f"flight time: {airborne.sum() * 1e-3:.3f} s "
          f"({t[airborne][0]:.3f} to {t[airborne][-1]:.3f} s)")

fig, (ax1, ax2, ax3) = plt.subplots(3, 1, figsize=(7, 7), sharex=True)
ax1.plot(t, pos[:, 2])
ax1.fill_between(t, pos[:, 2].min(), pos[:, 2].max(), where=airborne,
                 alpha=0.15, color="tab:orange", label="airborne")
ax1.set_ylabel("trunk z [m]")
ax1.legend(fontsize=8)

ax2.plot(t, pos[:, 0])
ax2.axhline(result.init.x, color="0.6", ls=":")
ax2.axhline(result.final.x, color="0.6", ls="--")
ax2.set_ylabel("trunk x [m]")

ax3.step(t, n_contact, where="post")
ax3.set_ylabel("feet in contact")
ax3.set_yticks([0, 2, 4])
ax3.set_xlabel("time [s]")
fig.tight_layout()
fig.savefig(OUT, dpi=130)
print(f"wrote {OUT}")
