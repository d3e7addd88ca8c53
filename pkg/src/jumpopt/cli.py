"""Command line front end.

Subcommands:
  optimize       run an optimization study and export its tables
  replay         re-simulate one recorded trial and dump its trajectory
  benchmark-tpe  sanity-check the estimator on analytic test functions

Exit codes: 0 on success, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import (ConfigError, ExperimentConfig, load_config,
                     parse_terrain_spec, save_config)
from .episodes import run_episode
from .profiles import JumpType
from .study import (TRIALS_FILE, StudyResult, optimize, read_trials_csv)
from .tpe import SearchSpace, TpeConfig, TpeOptimizer

CONFIG_FILE = "config.yaml"


def _add_optimize_parser(sub):
    p = sub.add_parser("optimize", help="run an optimization study")
    p.add_argument("--config", type=Path, help="YAML config to start from")
    p.add_argument("--jump-type", choices=[j.value for j in JumpType])
    p.add_argument("--iterations", type=int)
    p.add_argument("--seeds", help="comma separated list, e.g. 0,1,2")
    p.add_argument("--terrain", help='"flat" or "blocks:<height>"')
    p.add_argument("--f1", type=float, help="oscillator frequency outside the impulse")
    p.add_argument("--jumps-per-episode", type=int)
    p.add_argument("--no-vmc", action="store_true",
                   help="disable the posture-righting forces")
    p.add_argument("--out", type=Path, help="output directory (default runs/<jump>)")
    p.add_argument("--quiet", action="store_true")
    return p


def _build_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    updates = {}
    if args.jump_type is not None:
        updates["jump_type"] = args.jump_type
    if args.iterations is not None:
        updates["iterations"] = args.iterations
    if args.seeds is not None:
        try:
            updates["seeds"] = tuple(int(s) for s in args.seeds.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --seeds value {args.seeds!r}") from exc
    if args.terrain is not None:
        parse_terrain_spec(args.terrain)
        updates["terrain"] = args.terrain
    if args.f1 is not None:
        updates["f1"] = args.f1
    if args.jumps_per_episode is not None:
        updates["jumps_per_episode"] = args.jumps_per_episode
    if args.no_vmc:
        updates["vmc"] = False
    if args.out is not None:
        updates["output_dir"] = str(args.out)

    d = cfg.to_dict()
    if "vmc" in updates:
        d["vmc_enabled"] = updates.pop("vmc")
    d.update(updates)
    cfg = ExperimentConfig.from_dict(d)
    if cfg.output_dir is None:
        cfg.output_dir = str(Path("runs") / cfg.jump_type.value)
    return cfg


def _cmd_optimize(args) -> int:
    cfg = _build_config(args)
    out_root = Path(cfg.output_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    save_config(cfg, out_root / CONFIG_FILE)

    def progress(seed, iteration, objective, fell, elapsed):
        if args.quiet:
            return
        note = " (fell)" if fell else ""
        print(f"seed {seed} iter {iteration:3d}/{cfg.iterations}  "
              f"objective {objective:8.4f}{note}  [{elapsed:.1f}s]")

    studies = optimize(cfg, progress=progress)
    for s in studies:
        b = s.best_record
        line = (f"seed {s.seed}: best {b.objective:.4f} at iteration "
                f"{b.iteration} (f0={b.params.f0:.3f}, fx={b.params.fx:.1f}, "
                f"fy={b.params.fy:.1f}, fz={b.params.fz:.1f})")
        if s.jump in (JumpType.FORWARD, JumpType.BACKWARD):
            line += f", take-off angle {s.take_off_angle_deg:.1f} deg"
        print(line)
    print(f"results written to {out_root}")
    return 0


def _add_replay_parser(sub):
    p = sub.add_parser("replay", help="re-run one recorded trial")
    p.add_argument("study_dir", type=Path, help="directory written by optimize")
    p.add_argument("--seed", type=int, help="which seed directory (default: first)")
    p.add_argument("--trial", default="best",
                   help='"best" or a 1-based iteration number')
    p.add_argument("--out", type=Path, help="trajectory output (JSON lines)")
    return p


def _cmd_replay(args) -> int:
    cfg_path = args.study_dir / CONFIG_FILE
    if not cfg_path.exists():
        raise ConfigError(f"no {CONFIG_FILE} in {args.study_dir}")
    cfg = load_config(cfg_path)

    seed = args.seed if args.seed is not None else cfg.seeds[0]
    if seed not in cfg.seeds:
        raise ConfigError(f"seed {seed} not in study seeds {cfg.seeds}")
    trials_path = args.study_dir / f"seed{seed}" / TRIALS_FILE
    if not trials_path.exists():
        raise ConfigError(f"no trials table at {trials_path}")
    records = read_trials_csv(trials_path, cfg.f1)
    if args.trial == "best":
        study = StudyResult(seed=seed, jump=cfg.jump_type, records=records)
        record = study.best_record
    else:
        try:
            idx = int(args.trial)
        except ValueError as exc:
            raise ConfigError(f'--trial must be "best" or an integer, '
                              f"got {args.trial!r}") from exc
        if not 1 <= idx <= len(records):
            raise ConfigError(f"trial {idx} out of range 1..{len(records)}")
        record = records[idx - 1]

    result = run_episode(
        record.params, cfg.jump_type,
        model=cfg.build_model(), terrain=cfg.build_terrain(seed),
        gains=cfg.build_gains(), vmc_enabled=cfg.vmc_enabled,
        jumps=cfg.jumps_per_episode, settle_duration=cfg.settle_duration,
        post_landing_wait=cfg.post_landing_wait, record=True,
    )
    print(f"trial {record.iteration} (seed {seed}): "
          f"objective {result.objective:.4f}, recorded "
          f"{result.objective - record.objective:+.4f} vs stored, "
          f"fell={result.fell}, peak height {result.peak_height:.3f} m")
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        result.trajectory.save_jsonl(args.out)
        print(f"trajectory ({len(result.trajectory)} ticks) written to {args.out}")
    return 0


def _add_benchmark_parser(sub):
    p = sub.add_parser("benchmark-tpe",
                       help="compare the estimator to random search on test functions")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seeds", type=int, default=10)
    return p


def _benchmark_function(name, space, fn, trials, n_seeds):
    tpe_best, rand_best = [], []
    for seed in range(n_seeds):
        opt = TpeOptimizer(space, TpeConfig(), seed=seed)
        for _ in range(trials):
            x = opt.ask()
            opt.tell(x, fn(x))
        tpe_best.append(opt.best().objective)
        rng = np.random.default_rng(seed + 5000)
        rand_best.append(max(fn(space.sample_uniform(rng))
                             for _ in range(trials)))
    print(f"{name}: median best {np.median(tpe_best):.5f} (estimator) vs "
          f"{np.median(rand_best):.5f} (random), {trials} trials x {n_seeds} seeds")
    return np.median(tpe_best), np.median(rand_best)


def _cmd_benchmark(args) -> int:
    space1 = SearchSpace(("x",), np.array([[0.0, 1.0]]))
    _benchmark_function("1-d peak at 0.3", space1,
                        lambda x: -(x[0] - 0.3) ** 2, args.trials, args.seeds)
    space2 = SearchSpace(("x", "y"), np.array([[0.0, 1.0], [0.0, 1.0]]))
    _benchmark_function(
        "2-d peak at (0.3, 0.7)", space2,
        lambda v: -(v[0] - 0.3) ** 2 - (v[1] - 0.7) ** 2,
        args.trials, args.seeds)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="jumpopt",
        description="optimize jumping force profiles in simulation")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_optimize_parser(sub)
    _add_replay_parser(sub)
    _add_benchmark_parser(sub)
    args = parser.parse_args(argv)
    try:
        if args.command == "optimize":
            return _cmd_optimize(args)
        if args.command == "replay":
            return _cmd_replay(args)
        return _cmd_benchmark(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
