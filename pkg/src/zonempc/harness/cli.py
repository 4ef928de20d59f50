"""Command-line entry point: collect, train, run, evaluate, compare."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..dynamics import TrainConfig
from .experiment import (
    CONTROLLERS,
    ExperimentConfig,
    collect_dataset,
    compare_from_file,
    evaluate_results,
    load_config,
    run_control_experiment,
    train_pipeline,
)
from .io import read_config


def _merged(args, keys) -> dict:
    """Config-file values overridden by any flag the user actually set."""
    values = read_config(args.config) if getattr(args, "config", None) else {}
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            values[k] = v
    return values


def _add_sim_flags(p):
    p.add_argument("--config", help="flat key = value file; flags override its values")
    p.add_argument("--profile", help="synthetic weather profile")
    p.add_argument("--weather-csv", dest="weather_csv", help="weather CSV instead of a profile")
    p.add_argument("--season", choices=("summer", "winter"))
    p.add_argument("--months", type=int)
    p.add_argument("--seed", type=int)


SIM_KEYS = ("profile", "weather_csv", "season", "months", "seed")
RUN_KEYS = SIM_KEYS + ("controller", "ensemble", "data", "update_period", "window", "models", "samples",
                       "horizon", "gamma", "temperature", "noise_frac", "cem_iters", "elite_frac", "epochs",
                       "batch_size", "learning_rate", "out")


def cmd_collect(args) -> int:
    values = _merged(args, SIM_KEYS)
    out = values.pop("out", None) or args.out or "dataset.csv"
    cfg = ExperimentConfig.from_mapping({**values, "controller": "rule"})
    path, ds = collect_dataset(cfg, out)
    print(f"wrote {len(ds)} transitions to {path}")
    return 0


def cmd_train(args) -> int:
    values = _merged(args, ("data", "models", "epochs", "seed", "batch_size", "learning_rate", "out"))
    if "data" not in values:
        raise SystemExit("train: --data is required")
    d = TrainConfig()
    cfg = TrainConfig(
        learning_rate=float(values.get("learning_rate", d.learning_rate)),
        batch_size=int(values.get("batch_size", d.batch_size)),
        epochs=int(values.get("epochs", d.epochs)),
    )
    out = values.get("out", "ensemble")
    ens, hist = train_pipeline(values["data"], int(values.get("models", 5)), int(values.get("seed", 0)), cfg, out)
    for i, h in enumerate(hist):
        print(f"model {i}: train {h.train[-1]:.4g} val {h.val[-1]:.4g}")
    print(f"wrote ensemble of {len(ens)} to {out}")
    return 0


def cmd_run(args) -> int:
    cfg = ExperimentConfig.from_mapping(_merged(args, RUN_KEYS))
    outcome = run_control_experiment(cfg)
    print(f"wrote {len(outcome.results)} rows to {outcome.results_path}")
    if outcome.updates:
        print("in-situ updates at steps " + ", ".join(str(s) for s in outcome.updates))
    print("\n".join(outcome.metrics.to_lines()))
    return 0


def cmd_evaluate(args) -> int:
    cfg = load_config(args.config) if args.config else None
    if cfg is not None and args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    elif cfg is None and args.seed is not None:
        cfg = ExperimentConfig(seed=args.seed)
    print("\n".join(evaluate_results(args.results, cfg).to_lines()))
    return 0


def cmd_compare(args) -> int:
    rows, _ = compare_from_file(args.spec, args.out)
    for r in rows:
        print(f"{r['kind']:9s} {r['label']:24s} kwh={r['total_kwh']:.4g} viol={r['violation_rate']:.4g} "
              f"reward={r['reward']:.4g}" + (f" savings={r['energy_savings_pct']:.3g}%" if "energy_savings_pct" in r else ""))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zonempc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("collect", help="roll out the rule-based controller and save transitions")
    _add_sim_flags(p)
    p.add_argument("--out", help="dataset CSV path")
    p.set_defaults(func=cmd_collect)

    p = sub.add_parser("train", help="train an ensemble of dynamics models")
    p.add_argument("--config")
    p.add_argument("--data", help="dataset CSV")
    p.add_argument("--models", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="ensemble directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("run", help="closed-loop control episode on the simulator")
    _add_sim_flags(p)
    p.add_argument("--controller", choices=CONTROLLERS)
    p.add_argument("--ensemble", help="ensemble directory")
    p.add_argument("--data", help="dataset CSV that seeds the in-situ sliding window")
    p.add_argument("--update-period", dest="update_period", type=int, help="steps between retrains (0 = off)")
    p.add_argument("--window", type=int, help="sliding-window length in transitions")
    p.add_argument("--models", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--temperature", type=float)
    p.add_argument("--noise-frac", dest="noise_frac", type=float)
    p.add_argument("--cem-iters", dest="cem_iters", type=int)
    p.add_argument("--elite-frac", dest="elite_frac", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("evaluate", help="metrics for a results CSV")
    p.add_argument("--results", required=True)
    p.add_argument("--config", help="run config (defaults to run.cfg beside the results)")
    p.add_argument("--seed", type=int, help="occupancy seed when no config is available")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="run several controllers on identical conditions")
    p.add_argument("--spec", required=True, help="config file with a 'controllers' list")
    p.add_argument("--out", help="comparison CSV path")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
