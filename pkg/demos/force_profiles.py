"""Phase oscillator and half-sine thrust profiles at two parameter sets.

The oscillator runs the impulse half-cycle at f0 and the quiet half at f1,
so the thrust window lasts 1/(2*f0) seconds and the gap 1/(2*f1). The area
under each half-sine is the commanded impulse Fz * T * 2/pi.

Writes force_profiles.png next to this file.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from jumpopt.profiles import (JumpType, ProfileParams, foot_force,
                              impulse_active, oscillator_at, step_phase)

OUT = pathlib.Path(__file__).with_name("force_profiles.png")
DT = 1e-3

cases = [
    ProfileParams(f0=1.25, f1=0.25, fx=40.0, fy=0.0, fz=200.0),
    ProfileParams(f0=0.75, f1=0.5, fx=40.0, fy=0.0, fz=320.0),
]

fig, axes = plt.subplots(len(cases), 1, figsize=(7, 5))
for ax, params in zip(axes, cases):
    st = oscillator_at(params, np.pi)  # episodes start at the window edge
    ts, fz, fx, on = [], [], [], []
    t = 0.0
    two_cycles = 2.0 * (params.impulse_duration + params.off_duration)
    for _ in range(int(round(two_cycles / DT)) - 1):
        f = foot_force(params, JumpType.FORWARD, st.theta, leg=0)
        ts.append(t)
        fx.append(f[0])
        fz.append(f[2])
        on.append(impulse_active(st.theta))
        st = step_phase(st, params, DT)
        t += DT
    ts, fz, fx, on = map(np.asarray, (ts, fz, fx, on))

    ax.plot(ts, -fz, label="|Fz| command")
    ax.plot(ts, -fx, label="|Fx| command")
    ax.fill_between(ts, 0, -fz.min() * 1.05, where=on, alpha=0.12,
                    color="tab:green", label="impulse window")
    ax.set_ylabel("N")
    ax.set_title(f"f0={params.f0}, f1={params.f1}, Fz={params.fz:.0f} N")
    ax.legend(fontsize=8, loc="upper right")

    window = on.sum() * DT
    area = np.trapezoid(np.abs(fz), ts)
    expected = params.fz * params.impulse_duration * 2 / np.pi
    n_windows = ((~on[:-1]) & on[1:]).sum() + on[0]
    print(f"f0={params.f0}: measured window {window / n_windows:.3f} s "
          f"(formula {params.impulse_duration:.3f}), impulse "
          f"{area / n_windows:.1f} N*s per window "
          f"(formula {expected:.1f})")

axes[-1].set_xlabel("time [s]")
fig.tight_layout()
fig.savefig(OUT, dpi=130)
print(f"wrote {OUT}")
