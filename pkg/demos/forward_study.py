"""A small forward-jump optimization study, three seeds, fifteen trials each.

Each trial simulates a whole settle-thrust-flight-landing episode and
scores the net forward travel; falls score zero. Expect roughly a minute
of wall time. The left panel shows the running best per seed; the right
panel shows every tried (Fx, Fz) colored by its score, which makes the
survivable thrust region visible.

Writes forward_study.png next to this file.
"""

import pathlib
import time

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from jumpopt.config import ExperimentConfig
from jumpopt.profiles import JumpType
from jumpopt.study import run_study

OUT = pathlib.Path(__file__).with_name("forward_study.png")

cfg = ExperimentConfig(jump_type=JumpType.FORWARD, iterations=15,
                       seeds=(0, 1, 2))
t0 = time.perf_counter()
studies = [run_study(cfg, s) for s in cfg.seeds]
print(f"{len(studies)} seeds x {cfg.iterations} episodes in "
      f"{time.perf_counter() - t0:.0f} s")

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 3.8))
for s in studies:
    ax1.plot(np.arange(1, len(s.records) + 1), s.best_so_far,
             label=f"seed {s.seed}")
ax1.set_xlabel("trial")
ax1.set_ylabel("best forward travel so far [m]")
ax1.legend(fontsize=8)

all_fx = [r.params.fx for s in studies for r in s.records]
all_fz = [r.params.fz for s in studies for r in s.records]
all_obj = [r.objective for s in studies for r in s.records]
sc = ax2.scatter(all_fx, all_fz, c=all_obj, cmap="viridis", s=22)
fig.colorbar(sc, ax=ax2, label="objective [m]")
ax2.set_xlabel("Fx [N]")
ax2.set_ylabel("Fz [N]")
fig.tight_layout()
fig.savefig(OUT, dpi=130)
print(f"wrote {OUT}")

for s in studies:
    best = s.best_record
    falls = sum(r.fell for r in s.records)
    print(f"seed {s.seed}: best {best.objective:+.3f} m at trial "
          f"{best.iteration} (f0={best.params.f0:.2f}, "
          f"Fx={best.params.fx:.0f}, Fz={best.params.fz:.0f}), "
          f"take-off angle {s.take_off_angle_deg:.0f} deg, "
          f"{falls} falls")
