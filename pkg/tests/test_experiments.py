import json
import shutil
import subprocess

import numpy as np
import pytest

import trustprop as tp
from trustprop.cli import main
from trustprop.experiments import (
    ExperimentConfig,
    PRESET_NAMES,
    apply_overrides,
    emit_table1,
    fixture_file_path,
    load_config_file,
    preset,
    run_experiment,
)


def small_config(**kw):
    base = dict(
        name="small",
        graph_kind="erdos_renyi",
        n_legit=8,
        n_malicious=12,
        n_trials=2,
        master_seed=5,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_fig4_preset_fields():
    cfg = preset("fig4-20-cyclic")
    assert cfg.graph_kind == "cyclic"
    assert cfg.n_legit == 20 and cfg.n_malicious == 30
    cfg = preset("fig4-80-er")
    assert cfg.graph_kind == "erdos_renyi"
    assert cfg.n_legit == 80 and cfg.n_malicious == 120


def test_table2_presets():
    for name in ("table2-cyclic", "table2-er"):
        cfg = preset(name)
        assert cfg.n_legit == 40 and cfg.n_malicious == 60
        assert cfg.n_trials == 500 and cfg.max_rounds == 1000


def test_fig6_sweeps():
    probs = [c.malicious_edge_prob for c in preset("fig6a-sweep")]
    assert probs == [0.05, 0.1, 0.2, 0.4]
    for cfg in preset("fig6b-sweep"):
        assert cfg.malicious_edge_prob == 0.2
    assert [c.n_malicious for c in preset("fig6b-sweep")] == [20, 40, 60, 120]


def test_table1_preset_is_single_trial_list():
    configs = preset("table1")
    assert len(configs) == 6
    assert all(c.n_trials == 1 for c in configs)


def test_fig5_preset_flags_violation():
    cfg = preset("fig5-violation")
    assert cfg.skip_assumption_check
    inst = tp.read_edge_list(cfg.fixture_path)
    assert not tp.verify_assumptions(inst).ok


def test_unknown_preset_rejected():
    with pytest.raises(tp.UnknownPresetError):
        preset("fig9000")


def test_preset_names_cover_builders():
    for name in PRESET_NAMES:
        assert preset(name) is not None


def test_rerun_is_byte_identical(tmp_path):
    for run in ("a", "b"):
        cfg = small_config(out_dir=str(tmp_path / run))
        run_experiment(cfg)
    files_a = sorted((tmp_path / "a").iterdir())
    files_b = sorted((tmp_path / "b").iterdir())
    assert [f.name for f in files_a] == [f.name for f in files_b]
    for fa, fb in zip(files_a, files_b):
        assert fa.read_bytes() == fb.read_bytes(), fa.name


def test_aggregate_matches_trial_files(tmp_path):
    cfg = small_config(n_trials=4, out_dir=str(tmp_path))
    run_experiment(cfg)
    values = []
    for k in range(4):
        summary = json.loads((tmp_path / f"trial_{k}.json").read_text())
        values.append(summary["T_hat_max"])
    agg = json.loads((tmp_path / "aggregate.json").read_text())
    assert agg["t_hat_max_values"] == values
    present = [v for v in values if v is not None]
    assert agg["t_hat_max"]["mean"] == pytest.approx(np.mean(present))
    assert agg["t_hat_max"]["std"] == pytest.approx(np.std(present))
    assert agg["t_hat_max"]["min"] == min(present)
    assert agg["t_hat_max"]["max"] == max(present)
    assert agg["t_hat_max"]["missing"] == values.count(None)


def test_analysis_file_contents(tmp_path):
    cfg = small_config(n_trials=1, out_dir=str(tmp_path))
    run_experiment(cfg)
    payload = json.loads((tmp_path / "analysis.json").read_text())
    assert len(payload["targets"]) == 20
    inst_block = payload["instance"]
    assert inst_block["con_max"] is not None
    curve = payload["bounds"]["survival_bound"]
    assert len(curve["t"]) == len(curve["p"]) == cfg.max_rounds + 1
    assert all(0.0 <= p <= 1.0 for p in curve["p"])


def test_config_file_round_trip(tmp_path):
    cfg_file = tmp_path / "exp.toml"
    cfg_file.write_text(
        'graph_kind = "cyclic"\n'
        "n_legit = 6\n"
        "n_malicious = 9\n"
        "alpha_legit = [0.4, 0.8]\n"
        "n_trials = 3\n"
    )
    overrides = load_config_file(cfg_file)
    cfg = apply_overrides(ExperimentConfig(), overrides)
    assert cfg.graph_kind == "cyclic"
    assert cfg.n_legit == 6 and cfg.n_malicious == 9
    assert cfg.alpha_legit == (0.4, 0.8)
    assert cfg.n_trials == 3


def test_config_file_rejects_unknown_keys(tmp_path):
    cfg_file = tmp_path / "exp.toml"
    cfg_file.write_text("bogus_key = 3\n")
    with pytest.raises(tp.ConfigRejectedError):
        load_config_file(cfg_file)


def test_table1_complete_digraph_renders_na():
    cfg = ExperimentConfig(
        name="complete",
        graph_kind="erdos_renyi",
        n_legit=4,
        n_malicious=0,
        er_edge_prob=1.0,
        n_trials=1,
    )
    rows = emit_table1([cfg])
    assert rows[0]["con_max"] == "n/a"
    assert rows[0]["t_hat_max"] is not None


def test_cli_simulate_fig5(tmp_path, capsys):
    code = main(
        ["simulate", "--preset", "fig5-violation", "--trials", "2",
         "--out", str(tmp_path)]
    )
    assert code == 0
    out_dir = tmp_path / "fig5-violation"
    summary = json.loads((out_dir / "trial_0.json").read_text())
    assert summary["T_hat_max"] is None
    assert summary["classified_ok"] is False
    assert (out_dir / "aggregate.json").exists()
    assert "no stopping time" in capsys.readouterr().out


def test_cli_simulate_rejects_bad_config(tmp_path):
    code = main(
        ["simulate", "--preset", "fig4-20-cyclic", "--trials", "0",
         "--out", str(tmp_path)]
    )
    assert code == 2


def test_cli_simulate_custom_flags_and_dump(tmp_path, capsys):
    dump = tmp_path / "graph.txt"
    code = main(
        [
            "simulate", "--n-legit", "6", "--n-malicious", "9",
            "--graph-kind", "erdos_renyi", "--trials", "1", "--seed", "9",
            "--out", str(tmp_path), "--dump-graph", str(dump),
        ]
    )
    assert code == 0
    inst = tp.read_edge_list(dump)
    assert inst.n_legit == 6 and inst.n_malicious == 9
    assert "T_hat_max" in capsys.readouterr().out


def test_cli_verify_reports_violation(capsys):
    code = main(["verify", "--graph", fixture_file_path()])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["every_malicious_observed"] is False
    assert report["violating_malicious_nodes"] == [2]
    assert report["legit_subgraph_strongly_connected"] is True


def test_cli_verify_missing_file_runtime_error():
    assert main(["verify", "--graph", "/nonexistent/graph.txt"]) == 1


def test_cli_analyze_graph_file(capsys):
    code = main(["analyze", "--graph", fixture_file_path()])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    by_q = {e["q"]: e for e in payload["targets"]}
    # the unobserved malicious agent is exactly the non-learnable target
    assert by_q[2]["weakly_chained"] is False
    assert by_q[2]["con"] == "inf"
    assert payload["instance"]["con_max"] == "inf"
    assert payload["instance"]["l_G"] is None  # full graph not strongly connected


def test_cli_analyze_preset(capsys):
    code = main(["analyze", "--preset", "fig4-20-cyclic", "--seed", "3"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["instance"]["con_max"] in (18, 19)
    assert payload["bounds"]["d_l"] == 40  # cycle edges + self-loops


def test_cli_simulate_config_file(tmp_path, capsys):
    cfg_file = tmp_path / "exp.toml"
    cfg_file.write_text(
        'graph_kind = "cyclic"\nn_legit = 6\nn_malicious = 9\nn_trials = 2\n'
    )
    code = main(["simulate", "--config", str(cfg_file), "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "custom" / "trial_1.json").exists()


def test_console_script_installed():
    exe = shutil.which("trustprop")
    if exe is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run(
        [exe, "verify", "--graph", fixture_file_path()],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["every_malicious_observed"] is False
