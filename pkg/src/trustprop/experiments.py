"""Scenario presets, the seeded trial harness, and all experiment file I/O.

Output layout per experiment directory: ``trial_<k>.csv`` with the
per-round metrics, ``trial_<k>.json`` with the trial summary,
``aggregate.json`` with stopping-time statistics across trials, and
``analysis.json`` with the contraction/bound analysis of the trial-0
instance (including a survival-bound curve for plotting).
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .analysis import contraction_summary, finite_time_bounds
from .errors import ConfigRejectedError, TrustpropError, UnknownPresetError
from .graph import (
    NetworkInstance,
    attach_malicious,
    build_cyclic_legit,
    build_erdos_renyi_legit,
    default_er_edge_prob,
    read_edge_list,
    write_edge_list,
)
from .observation import TrustObservationModel
from .protocol import AdversaryPolicy, SimulationTrace, run_trial

GRAPH_KINDS = ("cyclic", "erdos_renyi", "fixture_file")


@dataclass
class ExperimentConfig:
    """Everything one experiment run needs; mirrors the config-file keys."""

    name: str = "custom"
    graph_kind: str = "cyclic"
    n_legit: int = 40
    n_malicious: int = 60
    malicious_edge_prob: float = 0.2
    er_edge_prob: float | None = None  # None -> 2 ln(n)/n
    alpha_legit: tuple[float, float] = (0.35, 0.75)
    alpha_malicious: tuple[float, float] = (0.25, 0.65)
    adversary: str = "inversion"
    max_rounds: int = 1000
    n_trials: int = 1
    master_seed: int = 0
    out_dir: str | None = None
    skip_assumption_check: bool = False
    fixture_path: str | None = None
    diameter_on_legit: bool = False

    def validate(self) -> "ExperimentConfig":
        if self.graph_kind not in GRAPH_KINDS:
            raise ConfigRejectedError(f"unknown graph_kind {self.graph_kind!r}")
        if self.graph_kind == "fixture_file" and not self.fixture_path:
            raise ConfigRejectedError("fixture_file graphs need fixture_path")
        if self.n_malicious < 0:
            raise ConfigRejectedError("n_malicious must be >= 0")
        if self.max_rounds < 1:
            raise ConfigRejectedError("max_rounds must be >= 1")
        if self.n_trials < 1:
            raise ConfigRejectedError("n_trials must be >= 1")
        if self.adversary != "inversion":
            raise ConfigRejectedError(f"unknown adversary {self.adversary!r}")
        try:
            self.model()
        except TrustpropError as exc:
            raise ConfigRejectedError(str(exc)) from exc
        return self

    def model(self) -> TrustObservationModel:
        return TrustObservationModel(
            legit_interval=tuple(self.alpha_legit),
            malicious_interval=tuple(self.alpha_malicious),
        )


@dataclass(frozen=True)
class AggregateStats:
    """Summary of the detected stopping time across trials."""

    min: float | None
    max: float | None
    mean: float | None
    std: float | None
    missing: int
    n_trials: int

    @classmethod
    def from_traces(cls, traces: list[SimulationTrace]) -> "AggregateStats":
        values = [t.t_hat_max for t in traces if t.t_hat_max is not None]
        missing = len(traces) - len(values)
        if not values:
            return cls(None, None, None, None, missing, len(traces))
        arr = np.asarray(values, dtype=float)
        return cls(
            min=float(arr.min()),
            max=float(arr.max()),
            mean=float(arr.mean()),
            std=float(arr.std()),  # population std
            missing=missing,
            n_trials=len(traces),
        )


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    stats: AggregateStats
    traces: list[SimulationTrace]
    out_dir: Path | None = None


def build_instance(config: ExperimentConfig, trial_index: int) -> tuple[
    NetworkInstance, np.random.SeedSequence, int
]:
    """Instance plus the simulation seed stream for one trial.

    Trial ``k`` derives everything from ``master_seed + k``: one child
    stream generates the graph, the other seeds the per-receiver
    observation streams.
    """
    seed = config.master_seed + trial_index
    graph_ss, sim_ss = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.Generator(np.random.PCG64(graph_ss))
    if config.graph_kind == "fixture_file":
        inst = read_edge_list(config.fixture_path)
    else:
        if config.graph_kind == "cyclic":
            legit = build_cyclic_legit(config.n_legit)
        else:
            p = config.er_edge_prob or default_er_edge_prob(config.n_legit)
            legit = build_erdos_renyi_legit(config.n_legit, p, rng)
        inst = attach_malicious(
            legit, config.n_malicious, config.malicious_edge_prob, rng
        )
    return inst, sim_ss, seed


def run_single_trial(
    config: ExperimentConfig,
    trial_index: int,
    *,
    record_opinions: bool = False,
) -> tuple[NetworkInstance, SimulationTrace]:
    inst, sim_ss, seed = build_instance(config, trial_index)
    trace = run_trial(
        inst,
        model=config.model(),
        adversary=AdversaryPolicy.inversion(),
        seed=sim_ss,
        max_rounds=config.max_rounds,
        record_opinions=record_opinions,
        check_assumptions=not config.skip_assumption_check,
        graph_kind=config.graph_kind,
    )
    trace.seed = seed
    return inst, trace


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run all trials of a config, writing per-trial and aggregate files."""
    config.validate()
    out = Path(config.out_dir) if config.out_dir else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    traces: list[SimulationTrace] = []
    instance0: NetworkInstance | None = None
    for k in range(config.n_trials):
        inst, trace = run_single_trial(config, k)
        if k == 0:
            instance0 = inst
        traces.append(trace)
        if out:
            trace.write_csv(out / f"trial_{k}.csv")
            trace.write_json(out / f"trial_{k}.json")
    stats = AggregateStats.from_traces(traces)
    if out:
        _write_json(out / "aggregate.json", aggregate_payload(config, stats, traces))
        _write_json(out / "analysis.json", analysis_payload(config, instance0))
    return ExperimentResult(config=config, stats=stats, traces=traces, out_dir=out)


def aggregate_payload(
    config: ExperimentConfig,
    stats: AggregateStats,
    traces: list[SimulationTrace],
) -> dict:
    return {
        "preset": config.name,
        "master_seed": config.master_seed,
        "n_trials": config.n_trials,
        "std_kind": "population",
        "t_hat_max": {
            "min": stats.min,
            "max": stats.max,
            "mean": stats.mean,
            "std": stats.std,
            "missing": stats.missing,
        },
        "t_hat_max_values": [t.t_hat_max for t in traces],
        "t_f_values": [t.t_f for t in traces],
        "classified_ok_all": all(t.classified_ok for t in traces),
    }


def analysis_payload(config: ExperimentConfig, inst: NetworkInstance) -> dict:
    payload = contraction_summary(inst, diameter_on_legit=config.diameter_on_legit)
    try:
        ftb = finite_time_bounds(
            inst, config.model(), diameter_on_legit=config.diameter_on_legit
        )
        ts = list(range(config.max_rounds + 1))
        payload["bounds"] = {
            "d_l": ftb.d_l,
            "d_m": ftb.d_m,
            "e_l": ftb.e_l,
            "e_m": ftb.e_m,
            "l_g": ftb.l_g,
            "deg_max": ftb.deg_max,
            "h": _jsonable(ftb.h),
            "delta": _jsonable(ftb.delta),
            "survival_bound": {
                "t": ts,
                "p": [ftb.tmax_survival_bound(t) for t in ts],
            },
        }
    except TrustpropError as exc:
        payload["bounds"] = {"error": str(exc)}
    return payload


def _jsonable(x: float) -> float | str:
    return "inf" if math.isinf(x) else x


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def dump_instance(config: ExperimentConfig, path) -> None:
    """Write the trial-0 instance of a config in edge-list form."""
    inst, _, _ = build_instance(config, 0)
    write_edge_list(inst, path)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

FIG4_SIZES = (20, 40, 80)
FIG6A_EDGE_PROBS = (0.05, 0.1, 0.2, 0.4)
FIG6B_MALICIOUS = (20, 40, 60, 120)


def fixture_file_path(name: str = "fig5_violation.txt") -> str:
    return str(resources.files("trustprop").joinpath("data", name))


def _fig4(n: int, kind: str) -> ExperimentConfig:
    return ExperimentConfig(
        name=f"fig4-{n}-{'er' if kind == 'erdos_renyi' else 'cyclic'}",
        graph_kind=kind,
        n_legit=n,
        n_malicious=int(1.5 * n),
        n_trials=10,
    )


def preset(name: str):
    """Named experiment configurations reproducing the study setups.

    Single-run presets return one :class:`ExperimentConfig`; ``table1`` and
    the sweep presets return a list of variant configs.
    """
    for n in FIG4_SIZES:
        if name == f"fig4-{n}-cyclic":
            return _fig4(n, "cyclic")
        if name == f"fig4-{n}-er":
            return _fig4(n, "erdos_renyi")
    if name == "table1":
        configs = []
        for kind in ("cyclic", "erdos_renyi"):
            for n in FIG4_SIZES:
                cfg = _fig4(n, kind)
                cfg.name = f"table1/{cfg.name[len('fig4-'):]}"
                cfg.n_trials = 1
                configs.append(cfg)
        return configs
    if name in ("table2-cyclic", "table2-er"):
        kind = "cyclic" if name.endswith("cyclic") else "erdos_renyi"
        return ExperimentConfig(
            name=name, graph_kind=kind, n_legit=40, n_malicious=60, n_trials=500
        )
    if name == "fig6a-sweep":
        return [
            dataclasses.replace(
                ExperimentConfig(
                    name=f"fig6a-sweep/p{p}", graph_kind="erdos_renyi",
                    n_legit=40, n_malicious=60, n_trials=10,
                ),
                malicious_edge_prob=p,
            )
            for p in FIG6A_EDGE_PROBS
        ]
    if name == "fig6b-sweep":
        return [
            ExperimentConfig(
                name=f"fig6b-sweep/m{m}", graph_kind="erdos_renyi",
                n_legit=40, n_malicious=m, malicious_edge_prob=0.2, n_trials=10,
            )
            for m in FIG6B_MALICIOUS
        ]
    if name == "fig5-violation":
        return ExperimentConfig(
            name=name,
            graph_kind="fixture_file",
            fixture_path=fixture_file_path(),
            skip_assumption_check=True,
            n_trials=10,
            max_rounds=1000,
        )
    raise UnknownPresetError(f"unknown preset {name!r}")


PRESET_NAMES = tuple(
    [f"fig4-{n}-{k}" for n in FIG4_SIZES for k in ("cyclic", "er")]
    + ["table1", "table2-cyclic", "table2-er", "fig6a-sweep", "fig6b-sweep",
       "fig5-violation"]
)


def emit_table1(
    configs: list[ExperimentConfig] | None = None,
    *,
    master_seed: int | None = None,
) -> list[dict]:
    """One seeded trial plus the static contraction maximum per setup."""
    if configs is None:
        configs = preset("table1")
    rows = []
    for cfg in configs:
        cfg = dataclasses.replace(cfg, n_trials=1)
        if master_seed is not None:
            cfg.master_seed = master_seed
        inst, trace = run_single_trial(cfg, 0)
        summary = contraction_summary(inst, diameter_on_legit=cfg.diameter_on_legit)
        con_max = summary["instance"]["con_max"]
        rows.append(
            {
                "setup": cfg.name,
                "graph_kind": cfg.graph_kind,
                "n_legit": cfg.n_legit,
                "n_malicious": cfg.n_malicious,
                "t_hat_max": trace.t_hat_max,
                "con_max": "n/a" if con_max is None else con_max,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

_CONFIG_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def load_config_file(path) -> dict:
    """Flat TOML key/value file with keys matching ExperimentConfig fields."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    unknown = set(raw) - set(_CONFIG_FIELDS)
    if unknown:
        raise ConfigRejectedError(f"unknown config keys: {sorted(unknown)}")
    return raw


def apply_overrides(config: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    cleaned = {}
    for key, value in overrides.items():
        if key not in _CONFIG_FIELDS:
            raise ConfigRejectedError(f"unknown config key {key!r}")
        if key in ("alpha_legit", "alpha_malicious") and value is not None:
            value = tuple(float(v) for v in value)
        cleaned[key] = value
    return dataclasses.replace(config, **cleaned)
