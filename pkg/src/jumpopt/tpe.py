"""A small Tree-structured Parzen Estimator with an ask/tell interface.

The estimator maximizes. After a uniform startup phase, observed trials are
split by objective into a good fraction and the rest; each group induces a
per-dimension Parzen density (an equal-weight mixture of truncated Gaussians
centered on the observations, plus one wide prior component spanning the
range). Candidates are drawn from the good density l and the one maximizing
the density ratio l/g is asked next.

Failed (fall) trials enter the history with objective exactly 0, which in
the maximization convention pushes them into the bad group as soon as any
trial does better.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

_SQRT2PI = math.sqrt(2.0 * math.pi)
_EDGE = 1e-12  # relative margin keeping samples strictly inside the bounds

STATUS_OK = "ok"
STATUS_FALL = "fall"


@dataclass(frozen=True)
class SearchSpace:
    """Named box bounds, one row of (lower, upper) per parameter."""

    names: tuple[str, ...]
    bounds: np.ndarray

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.bounds, dtype=float))
        object.__setattr__(self, "bounds", b)
        if b.shape != (len(self.names), 2):
            raise ValueError("bounds must be (n_params, 2)")
        if not (b[:, 0] < b[:, 1]).all():
            raise ValueError("each lower bound must be below its upper bound")

    @property
    def dim(self) -> int:
        return len(self.names)

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.bounds[:, 0]) and np.all(x <= self.bounds[:, 1]))

    def clip_strict(self, x: np.ndarray) -> np.ndarray:
        lo, hi = self.bounds[:, 0], self.bounds[:, 1]
        margin = _EDGE * (hi - lo)
        return np.clip(x, lo + margin, hi - margin)

    def sample_uniform(self, rng: np.random.Generator) -> np.ndarray:
        return self.clip_strict(rng.uniform(self.bounds[:, 0], self.bounds[:, 1]))

    def to_dict(self, x: np.ndarray) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.names, x)}

    def from_dict(self, d: dict[str, float]) -> np.ndarray:
        return np.array([float(d[n]) for n in self.names])


@dataclass(frozen=True)
class Trial:
    """One evaluated parameter vector."""

    params: np.ndarray
    objective: float
    status: str = STATUS_OK


@dataclass(frozen=True)
class TpeConfig:
    gamma: float = 0.25
    n_startup: int = 5
    n_candidates: int = 24
    bandwidth_floor: float | None = None  # None: adaptive 1/(1 + n) of range

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        if self.n_startup < 1 or self.n_candidates < 1:
            raise ValueError("n_startup and n_candidates must be at least 1")
        if self.bandwidth_floor is not None and not 0.0 < self.bandwidth_floor <= 1.0:
            raise ValueError("bandwidth_floor must be in (0, 1]")


class ParzenMixture:
    """Equal-weight truncated-Gaussian mixture over one bounded dimension.

    Observations each contribute one component with bandwidth
    max(nearest-neighbor spacing, floor * range); a prior component at the
    midpoint with bandwidth equal to the full range is always included, so
    the density never vanishes anywhere in the box.
    """

    def __init__(self, values: np.ndarray, lo: float, hi: float,
                 floor: float | None = None):
        values = np.asarray(values, dtype=float)
        span = hi - lo
        if floor is None:
            floor = 1.0 / (1.0 + len(values))
        if len(values) == 0:
            nn = np.empty(0)
        elif len(values) == 1:
            nn = np.array([span])
        else:
            order = np.argsort(values)
            sv = values[order]
            gaps = np.diff(sv)
            near = np.empty(len(sv))
            near[0] = gaps[0]
            near[-1] = gaps[-1]
            if len(sv) > 2:
                near[1:-1] = np.minimum(gaps[:-1], gaps[1:])
            nn = np.empty(len(values))
            nn[order] = near
        widths = np.clip(np.maximum(nn, floor * span), None, span)

        self.lo, self.hi = float(lo), float(hi)
        self.centers = np.append(values, 0.5 * (lo + hi))
        self.widths = np.append(widths, span)
        a = (lo - self.centers) / self.widths
        b = (hi - self.centers) / self.widths
        self._cdf_lo = ndtr(a)
        self._norm = ndtr(b) - self._cdf_lo

    def pdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        z = (x[..., None] - self.centers) / self.widths
        dens = np.exp(-0.5 * z * z) / (_SQRT2PI * self.widths * self._norm)
        inside = (x >= self.lo) & (x <= self.hi)
        return np.where(inside, dens.mean(axis=-1), 0.0)

    def logpdf(self, x: np.ndarray) -> np.ndarray:
        return np.log(np.maximum(self.pdf(x), 1e-300))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.integers(0, len(self.centers), size=size)
        u = rng.uniform(size=size)
        q = self._cdf_lo[idx] + u * self._norm[idx]
        x = self.centers[idx] + self.widths[idx] * ndtri(q)
        margin = _EDGE * (self.hi - self.lo)
        return np.clip(x, self.lo + margin, self.hi - margin)


@dataclass
class Proposal:
    """Candidate set and density-ratio scores behind one ask."""

    candidates: np.ndarray  # (n_candidates, dim)
    log_ratio: np.ndarray  # (n_candidates,)
    index: int

    @property
    def chosen(self) -> np.ndarray:
        return self.candidates[self.index]


def split_history(history: list[Trial], gamma: float) -> tuple[list[Trial], list[Trial]]:
    """Partition trials into (good, bad) by objective, ties broken by age.

    The good group holds the ceil(gamma * n) highest objectives; among equal
    objectives earlier trials rank first.
    """
    objs = np.array([t.objective for t in history])
    order = np.argsort(-objs, kind="stable")
    n_good = int(math.ceil(gamma * len(history)))
    good = [history[i] for i in order[:n_good]]
    bad = [history[i] for i in order[n_good:]]
    return good, bad


def fit_mixtures(trials: list[Trial], space: SearchSpace,
                 config: TpeConfig) -> list[ParzenMixture]:
    """One Parzen mixture per dimension from the given trials."""
    out = []
    for d in range(space.dim):
        vals = np.array([t.params[d] for t in trials])
        lo, hi = space.bounds[d]
        out.append(ParzenMixture(vals, lo, hi, floor=config.bandwidth_floor))
    return out


def propose(history: list[Trial], space: SearchSpace, config: TpeConfig,
            rng: np.random.Generator) -> Proposal:
    """Model-based candidate generation (requires a non-empty history)."""
    good, bad = split_history(history, config.gamma)
    l_mix = fit_mixtures(good, space, config)
    g_mix = fit_mixtures(bad, space, config)

    cands = np.empty((config.n_candidates, space.dim))
    score = np.zeros(config.n_candidates)
    for d in range(space.dim):
        cands[:, d] = l_mix[d].sample(rng, config.n_candidates)
        score += l_mix[d].logpdf(cands[:, d]) - g_mix[d].logpdf(cands[:, d])
    return Proposal(candidates=cands, log_ratio=score, index=int(np.argmax(score)))


def ask(history: list[Trial], space: SearchSpace, config: TpeConfig,
        rng: np.random.Generator) -> np.ndarray:
    """Next parameter vector: uniform during startup, then the TPE winner."""
    if len(history) < config.n_startup:
        return space.sample_uniform(rng)
    return propose(history, space, config, rng).chosen


def tell(history: list[Trial], params: np.ndarray, objective: float,
         status: str = STATUS_OK, space: SearchSpace | None = None) -> list[Trial]:
    """Return history extended by one trial.

    Falls are stored with objective exactly 0. When a space is given the
    params are validated against its bounds.
    """
    params = np.asarray(params, dtype=float)
    if space is not None and not space.contains(params):
        raise ValueError(f"params {params!r} outside the search space")
    if status not in (STATUS_OK, STATUS_FALL):
        raise ValueError(f"unknown trial status {status!r}")
    if status == STATUS_FALL:
        objective = 0.0
    if not np.isfinite(objective):
        raise ValueError("objective must be finite")
    return history + [Trial(params.copy(), float(objective), status)]


def best(history: list[Trial]) -> Trial:
    """Highest-objective trial; the earliest one on ties."""
    if not history:
        raise ValueError("history is empty")
    top = history[0]
    for t in history[1:]:
        if t.objective > top.objective:
            top = t
    return top


def save_history(history: list[Trial], space: SearchSpace, path):
    with open(path, "w") as fh:
        for t in history:
            fh.write(json.dumps({
                "params": space.to_dict(t.params),
                "objective": t.objective,
                "status": t.status,
            }) + "\n")


def load_history(path, space: SearchSpace) -> list[Trial]:
    out: list[Trial] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out.append(Trial(space.from_dict(rec["params"]),
                             float(rec["objective"]), rec.get("status", STATUS_OK)))
    return out


class TpeOptimizer:
    """Stateful convenience wrapper around the ask/tell functions."""

    def __init__(self, space: SearchSpace, config: TpeConfig | None = None,
                 seed: int = 0):
        self.space = space
        self.config = config or TpeConfig()
        self.history: list[Trial] = []
        self._rng = np.random.default_rng(seed)

    def ask(self, rng: np.random.Generator | None = None) -> np.ndarray:
        return ask(self.history, self.space, self.config,
                   self._rng if rng is None else rng)

    def tell(self, params: np.ndarray, objective: float, status: str = STATUS_OK):
        self.history = tell(self.history, params, objective, status, self.space)

    def best(self) -> Trial:
        return best(self.history)

    def save(self, path):
        save_history(self.history, self.space, path)

    def load(self, path):
        self.history = load_history(path, self.space)
