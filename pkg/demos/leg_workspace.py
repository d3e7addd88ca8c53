"""Leg geometry walkthrough: reach shell, a few poses, and inverse-map checks.

Run as a plain script; writes leg_workspace.png next to this file.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from jumpopt.legs import (LegGeometry, forward_kinematics,
                          inverse_kinematics, jacobian)

OUT = pathlib.Path(__file__).with_name("leg_workspace.png")

geom = LegGeometry(side_sign=+1.0, name="FL")
l1, l2 = geom.thigh_len, geom.calf_len
print(f"thigh {l1:.3f} m, calf {l2:.3f} m, "
      f"reach [{geom.min_reach:.3f}, {geom.max_reach:.3f}] m")

# Sweep the sagittal plane (zero abduction) and collect foot points.
q2 = np.linspace(-1.6, 1.6, 60)
q3 = np.linspace(0.1, np.pi - 0.1, 60)
pts = []
for a in q2:
    for b in q3:
        p = forward_kinematics(np.array([0.0, a, b]), geom)
        pts.append([p[0], p[2]])
pts = np.array(pts)

fig, ax = plt.subplots(figsize=(5.5, 5.5))
ax.scatter(pts[:, 0], pts[:, 1], s=2, color="0.8", label="reachable feet")

# Draw three representative poses as hip-knee-foot segments.
poses = [
    ("stance crouch", np.array([0.0, -0.8843, 1.7687])),
    ("reach forward", np.array([0.0, 0.9, 0.7])),
    ("tucked", np.array([0.0, -0.4, 2.6])),
]
for label, q in poses:
    knee = np.array([l1 * np.sin(q[1]), -l1 * np.cos(q[1])])
    foot = forward_kinematics(q, geom)
    ax.plot([0, knee[0], foot[0]], [0, knee[1], foot[2]], "o-", label=label)

ax.set_xlabel("x forward [m]")
ax.set_ylabel("z up [m]")
ax.set_title("sagittal leg workspace")
ax.axis("equal")
ax.legend(loc="upper right", fontsize=8)
fig.tight_layout()
fig.savefig(OUT, dpi=130)
print(f"wrote {OUT}")

# Round-trip the crouch pose through the inverse map.
q = poses[0][1]
p = forward_kinematics(q, geom)
q_back, clamped = inverse_kinematics(p, geom)
err = np.abs(forward_kinematics(q_back, geom) - p).max()
print(f"crouch foot at ({p[0]:+.3f}, {p[1]:+.3f}, {p[2]:+.3f}) m, "
      f"round-trip error {err:.1e}, clamped: {bool(np.any(clamped))}")

# The Jacobian at the crouch tells how much foot force a joint torque buys.
j = jacobian(q, geom)
lever = abs(j[2, 2])
print(f"knee lever arm for vertical force: {lever:.3f} m "
      f"(23.7 N*m of torque supports about {23.7 / lever:.0f} N)")
