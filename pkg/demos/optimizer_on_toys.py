"""The Parzen-estimator optimizer against random search on toy objectives.

Ten seeds, fifty trials each, on a 1-D peak and a 2-D bowl. The optimizer
spends its first five trials sampling uniformly, then splits the history
into good and bad halves and proposes where the good density dominates.

Writes optimizer_on_toys.png next to this file.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from jumpopt.tpe import STATUS_OK, SearchSpace, TpeConfig, ask, tell

OUT = pathlib.Path(__file__).with_name("optimizer_on_toys.png")
TRIALS = 50
SEEDS = 10


def run_problem(space, fn):
    tpe_curves, rand_curves = [], []
    for seed in range(SEEDS):
        rng = np.random.default_rng(seed)
        hist = []
        for _ in range(TRIALS):
            vec = ask(hist, space, TpeConfig(), rng)
            hist = tell(hist, vec, fn(vec), STATUS_OK, space)
        tpe_curves.append(np.maximum.accumulate([tr.objective for tr in hist]))

        rng_r = np.random.default_rng(1000 + seed)
        draws = [fn(space.sample_uniform(rng_r)) for _ in range(TRIALS)]
        rand_curves.append(np.maximum.accumulate(draws))
    return np.median(tpe_curves, axis=0), np.median(rand_curves, axis=0)


peak_space = SearchSpace(("x",), np.array([[0.0, 1.0]]))
bowl_space = SearchSpace(("x", "y"), np.array([[0.0, 1.0], [0.0, 1.0]]))

peak_tpe, peak_rand = run_problem(peak_space, lambda v: -(v[0] - 0.3) ** 2)
bowl_tpe, bowl_rand = run_problem(
    bowl_space, lambda v: -((v[0] - 0.6) ** 2 + (v[1] - 0.35) ** 2))

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
for ax, tpe, rand, title in [
    (ax1, peak_tpe, peak_rand, "1-D peak at x = 0.3"),
    (ax2, bowl_tpe, bowl_rand, "2-D bowl at (0.6, 0.35)"),
]:
    ax.plot(tpe, label="Parzen estimator")
    ax.plot(rand, label="random search")
    ax.set_title(title)
    ax.set_xlabel("trial")
    ax.set_ylabel("median best objective")
    ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT, dpi=130)
print(f"wrote {OUT}")

print(f"1-D final medians: optimizer {peak_tpe[-1]:.2e}, "
      f"random {peak_rand[-1]:.2e}")
print(f"2-D final medians: optimizer {bowl_tpe[-1]:.2e}, "
      f"random {bowl_rand[-1]:.2e}")
