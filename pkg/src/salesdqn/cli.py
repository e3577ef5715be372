"""Command line entry point: ``salesdqn <command> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from .agent import DQNAgent
from .config import default_config, load_config, parse_config
from .demand import DataError, save_csv, synth_generate
from .nn import ConfigurationError
from .pricing import f_sales, oracle_optimal_action, profit_table
from .reporting import CONFIG_FILE, MODEL_FILE, write_report
from .trainer import evaluate_policy, run_training


def _run_config(args):
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "episodes", None) is not None:
        cfg.episodes = args.episodes
    return cfg


def cmd_train(args) -> int:
    cfg = _run_config(args)
    out = args.out or cfg.output_dir
    if not out:
        raise ConfigurationError("no output directory: pass --out or set output_dir")
    agent = cfg.make_agent()
    report = run_training(cfg.env_factory(), agent, cfg.episodes, cfg.make_rng(),
                          config=cfg.to_dict(), seed=cfg.seed)
    manifest = write_report(report, out)
    last = report.episodes[-1].mean_reward if report.episodes else float("nan")
    print(f"trained {len(report.episodes)} episodes in {report.duration:.1f}s, "
          f"last mean reward {last:.4f}; {len(manifest['files']) + 1} files in {out}")
    if report.error:
        print(f"error: training stopped early: {report.error}", file=sys.stderr)
        return 1
    return 0


def cmd_evaluate(args) -> int:
    out = Path(args.out)
    cfg = parse_config(yaml.safe_load((out / CONFIG_FILE).read_text(encoding="utf-8")), base_dir=out)
    model = json.loads((out / MODEL_FILE).read_text(encoding="utf-8"))
    agent = DQNAgent.from_dict(model["agent"])
    seed = cfg.seed if args.seed is None else args.seed
    summary = evaluate_policy(cfg.env_factory(), agent, args.episodes, np.random.default_rng([seed, 3]))
    print(json.dumps({
        "episodes": args.episodes,
        "mean_reward": summary.mean_reward,
        "modal_action": summary.modal_action,
        "action_counts": summary.action_counts.tolist(),
    }))
    return 0


def cmd_oracle(args) -> int:
    cfg = load_config(args.config) if args.config else default_config("pricing")
    if cfg.scenario != "pricing":
        raise ConfigurationError("oracle applies to the pricing scenario only")
    env = cfg.env
    table = profit_table(env)
    best, value = oracle_optimal_action(env)
    print("action,extra_price,f_sales,profit_factor")
    for i, p in enumerate(env.actions):
        print(f"{i},{p},{f_sales(env, p):.6f},{table[i]:.6f}")
    print(f"argmax: action {best} (extra price {env.actions[best]}), profit factor {value:.6f}")
    return 0


def cmd_synth(args) -> int:
    series = synth_generate(args.seed, args.days)
    save_csv(series, args.out)
    print(f"wrote {len(series)} days to {args.out}")
    return 0


def cmd_validate(args) -> int:
    print(load_config(args.config).to_yaml(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="salesdqn", description="Deep Q-learning for retail pricing and supply.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train an agent and write metrics, traces and the model")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--episodes", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="greedy evaluation of a trained agent")
    p.add_argument("--out", required=True, help="directory written by 'train'")
    p.add_argument("--episodes", type=int, default=50)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("oracle", help="tabulate F_sales(p)*p over the pricing actions")
    p.add_argument("--config")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("synth-data", help="write a synthetic demand CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--days", type=int, default=1050)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("validate-config", help="parse a run config and echo it with defaults filled in")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigurationError, DataError, OSError, ValueError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
