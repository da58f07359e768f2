"""Command-line interface.

Subcommands: ``simulate`` runs a preset or config-file experiment and writes
the trial/aggregate/analysis files; ``analyze`` emits the per-target
contraction report for a graph file or a preset's instance; ``verify``
checks a graph file against the connectivity/observability assumptions.
Exit codes: 0 success, 2 configuration rejected, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .errors import ConfigRejectedError, TrustpropError, UnknownPresetError
from .experiments import (
    ExperimentConfig,
    analysis_payload,
    apply_overrides,
    build_instance,
    dump_instance,
    emit_table1,
    load_config_file,
    preset,
    run_experiment,
    PRESET_NAMES,
)
from .graph import read_edge_list, verify_assumptions, write_edge_list

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    """One optional flag per config field; absent flags leave no trace."""
    for f in dataclasses.fields(ExperimentConfig):
        flag = "--" + f.name.replace("_", "-")
        kwargs: dict = {"dest": f.name, "default": argparse.SUPPRESS}
        if f.name in ("alpha_legit", "alpha_malicious"):
            kwargs.update(nargs=2, type=float, metavar=("LO", "HI"))
        elif f.type in ("int", int.__name__):
            kwargs.update(type=int)
        elif f.type.startswith("float"):
            kwargs.update(type=float)
        elif f.type == "bool":
            kwargs.update(action=argparse.BooleanOptionalAction)
        parser.add_argument(flag, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trustprop",
        description="Trust-learning simulator for directed multi-agent networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an experiment preset or config")
    sim.add_argument("--preset", choices=PRESET_NAMES)
    sim.add_argument("--config", metavar="FILE", help="TOML config file")
    sim.add_argument("--seed", type=int, help="master seed (overrides config)")
    sim.add_argument("--trials", type=int, help="number of trials (overrides config)")
    sim.add_argument("--out", metavar="DIR", help="output root directory")
    sim.add_argument("--dump-graph", metavar="FILE", help="write trial-0 graph")
    _add_config_flags(sim)
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="contraction/bound analysis of an instance")
    src = ana.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", metavar="FILE", help="edge-list file")
    src.add_argument("--preset", choices=PRESET_NAMES)
    ana.add_argument("--seed", type=int, default=None)
    ana.add_argument("--out", metavar="FILE")
    ana.add_argument("--diameter-on-legit", action="store_true")
    ana.add_argument("--dump-graph", metavar="FILE", help="write analyzed graph")
    ana.set_defaults(func=cmd_analyze)

    ver = sub.add_parser("verify", help="check assumptions on a graph file")
    ver.add_argument("--graph", metavar="FILE", required=True)
    ver.set_defaults(func=cmd_verify)
    return parser


def _collect_overrides(args: argparse.Namespace) -> dict:
    overrides = {
        name: getattr(args, name) for name in _FIELD_TYPES if hasattr(args, name)
    }
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.trials is not None:
        overrides["n_trials"] = args.trials
    return overrides


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.preset:
        base = preset(args.preset)
    else:
        base = ExperimentConfig()
    configs = base if isinstance(base, list) else [base]

    file_overrides = load_config_file(args.config) if args.config else {}
    cli_overrides = _collect_overrides(args)
    merged = []
    for cfg in configs:
        cfg = apply_overrides(cfg, file_overrides)
        cfg = apply_overrides(cfg, cli_overrides)
        if args.out and "out_dir" not in {**file_overrides, **cli_overrides}:
            cfg.out_dir = str(Path(args.out) / cfg.name)
        cfg.validate()
        merged.append(cfg)

    if args.preset == "table1":
        rows = emit_table1(merged)
        text = json.dumps(rows, sort_keys=True, indent=2)
        if args.out:
            out = Path(args.out) / "table1.json"
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(text + "\n", encoding="utf-8")
        print(text)
        return 0

    for k, cfg in enumerate(merged):
        result = run_experiment(cfg)
        if k == 0 and args.dump_graph:
            dump_instance(cfg, args.dump_graph)
        s = result.stats
        if s.mean is None:
            print(f"{cfg.name}: {cfg.n_trials} trials, no stopping time detected")
        else:
            print(
                f"{cfg.name}: {cfg.n_trials} trials, T_hat_max "
                f"min={s.min:.0f} max={s.max:.0f} mean={s.mean:.2f} std={s.std:.2f}"
                + (f" missing={s.missing}" if s.missing else "")
            )
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    if args.graph:
        inst = read_edge_list(args.graph)
        cfg = ExperimentConfig(name="file", diameter_on_legit=args.diameter_on_legit)
    else:
        base = preset(args.preset)
        cfg = base[0] if isinstance(base, list) else base
        if args.seed is not None:
            cfg.master_seed = args.seed
        cfg.diameter_on_legit = args.diameter_on_legit
        inst, _, _ = build_instance(cfg, 0)
    payload = analysis_payload(cfg, inst)
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.dump_graph:
        write_edge_list(inst, args.dump_graph)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    inst = read_edge_list(args.graph)
    report = verify_assumptions(inst)
    print(
        json.dumps(
            {
                "legit_subgraph_strongly_connected": report.legit_subgraph_strongly_connected,
                "every_malicious_observed": report.every_malicious_observed,
                "violating_malicious_nodes": list(report.violating_malicious_nodes),
            },
            sort_keys=True,
            indent=2,
        )
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigRejectedError, UnknownPresetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (TrustpropError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
