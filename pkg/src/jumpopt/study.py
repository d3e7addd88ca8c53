"""Optimization studies: per-seed ask/tell loops with exports and resume.

A study runs one seed of sequential episodes: ask the estimator for the
next profile parameters, simulate one episode, tell the scored result back.
Parameters not used by the jump direction are masked out of the search
space and fixed at zero (forward jumps never search Fy, lateral and twist
jumps never search Fx).

Every iteration draws its randomness from a generator seeded by (seed,
iteration), and the history is persisted to a line-delimited file after
each tell, so an interrupted study resumes into exactly the trials it would
have produced in one run.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .episodes import run_episode
from .profiles import PARAM_BOUNDS, JumpType, ProfileParams
from .tpe import (STATUS_FALL, STATUS_OK, SearchSpace, TpeConfig, Trial,
                  ask, best, load_history, save_history, tell)

TRIALS_FILE = "trials.csv"
HISTORY_FILE = "history.jsonl"
SUMMARY_FILE = "summary.csv"


def search_space_for(jump: JumpType) -> SearchSpace:
    names = jump.optimized_names
    return SearchSpace(names, np.array([PARAM_BOUNDS[n] for n in names]))


def params_from_vector(vec: np.ndarray, jump: JumpType, f1: float) -> ProfileParams:
    values = {n: float(v) for n, v in zip(jump.optimized_names,
                                          np.asarray(vec, dtype=float))}
    return ProfileParams(
        f0=values["f0"],
        fx=values.get("fx", 0.0),
        fy=values.get("fy", 0.0),
        fz=values["fz"],
        f1=f1,
    )


@dataclass
class TrialRecord:
    iteration: int  # 1-based, contiguous
    params: ProfileParams
    objective: float
    fell: bool


@dataclass
class StudyResult:
    seed: int
    jump: JumpType
    records: list[TrialRecord]

    @property
    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    @property
    def best_record(self) -> TrialRecord:
        idx = 0
        for i, r in enumerate(self.records):
            if r.objective > self.records[idx].objective:
                idx = i
        return self.records[idx]

    @property
    def best_so_far(self) -> np.ndarray:
        return np.maximum.accumulate(self.objectives)

    @property
    def take_off_angle_deg(self) -> float:
        """Sagittal launch direction of the best trial, degrees from horizontal."""
        p = self.best_record.params
        return math.degrees(math.atan2(abs(p.fz), abs(p.fx)))


def run_study(cfg, seed: int, out_dir: Path | None = None,
              progress=None) -> StudyResult:
    """One seed's optimization loop; resumes from out_dir when possible.

    cfg is an ExperimentConfig (duck-typed here to avoid an import cycle:
    anything with the same fields and build_* methods works).
    """
    jump = cfg.jump_type
    space = search_space_for(jump)
    model = cfg.build_model()
    gains = cfg.build_gains()
    terrain = cfg.build_terrain(seed)

    history: list[Trial] = []
    history_path = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        history_path = out_dir / HISTORY_FILE
        if history_path.exists():
            history = load_history(history_path, space)[: cfg.iterations]

    records: list[TrialRecord] = []
    for i, trial in enumerate(history):
        records.append(TrialRecord(
            iteration=i + 1,
            params=params_from_vector(trial.params, jump, cfg.f1),
            objective=trial.objective,
            fell=trial.status == STATUS_FALL,
        ))

    for i in range(len(history), cfg.iterations):
        rng = np.random.default_rng([seed, i])
        vec = ask(history, space, cfg.tpe, rng)
        params = params_from_vector(vec, jump, cfg.f1)
        t0 = time.perf_counter()
        result = run_episode(
            params, jump,
            model=model, terrain=terrain, gains=gains,
            vmc_enabled=cfg.vmc_enabled, jumps=cfg.jumps_per_episode,
            settle_duration=cfg.settle_duration,
            post_landing_wait=cfg.post_landing_wait,
        )
        status = STATUS_FALL if result.fell else STATUS_OK
        history = tell(history, vec, result.objective, status, space)
        stored = history[-1]
        records.append(TrialRecord(i + 1, params, stored.objective, result.fell))
        if history_path is not None:
            save_history(history, space, history_path)
        if progress is not None:
            progress(seed, i + 1, stored.objective, result.fell,
                     time.perf_counter() - t0)

    study = StudyResult(seed=seed, jump=jump, records=records)
    if out_dir is not None:
        write_trials_csv(out_dir / TRIALS_FILE, study)
    return study


def write_trials_csv(path, study: StudyResult):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "f0", "fx", "fy", "fz", "objective", "fell"])
        for r in study.records:
            p = r.params
            w.writerow([r.iteration, repr(p.f0), repr(p.fx), repr(p.fy),
                        repr(p.fz), repr(r.objective), int(r.fell)])


def read_trials_csv(path, f1: float) -> list[TrialRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            params = ProfileParams(f0=float(row["f0"]), fx=float(row["fx"]),
                                   fy=float(row["fy"]), fz=float(row["fz"]), f1=f1)
            out.append(TrialRecord(int(row["iteration"]), params,
                                   float(row["objective"]), bool(int(row["fell"]))))
    return out


def write_summary_csv(path, studies: list[StudyResult]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["seed", "best_iteration", "best_objective", "n_falls",
                    "take_off_angle_deg"])
        for s in studies:
            b = s.best_record
            w.writerow([s.seed, b.iteration, repr(b.objective),
                        sum(r.fell for r in s.records),
                        f"{s.take_off_angle_deg:.2f}"])


def optimize(cfg, progress=None) -> list[StudyResult]:
    """Run every configured seed and export tables under cfg.output_dir."""
    out_root = Path(cfg.output_dir) if cfg.output_dir else None
    studies = []
    for seed in cfg.seeds:
        seed_dir = out_root / f"seed{seed}" if out_root else None
        studies.append(run_study(cfg, seed, seed_dir, progress=progress))
    if out_root is not None:
        write_summary_csv(out_root / SUMMARY_FILE, studies)
    return studies
