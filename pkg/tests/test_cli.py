import json
from pathlib import Path

import pytest

from rxnlead.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


def write_config(tmp_path, **overrides):
    raw = {
        "task_id": "cli-test",
        "templates_path": str(FIXTURES / "templates_toy.jsonl"),
        "blocks_path": str(FIXTURES / "blocks_smoke.smi"),
        "leads_train_path": str(FIXTURES / "leads_smoke_train.smi"),
        "leads_eval_path": str(FIXTURES / "leads_smoke_eval.smi"),
        "output_dir": str(tmp_path / "out"),
        "oracle": {"kind": "similarity",
                   "target": "CCOC(=O)c1ccc(NC(C)=O)cc1"},
        "seed": 11,
        "budget": {"train": 36, "eval": 10},
        "grpo": {"learning_rate": 0.2, "group_size": 3,
                 "molecules_per_batch": 3, "training_steps": 4,
                 "ref_sync_interval": 3},
        "k_max": 6,
        "t_max": 2,
    }
    raw.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw))
    return path


ARTIFACTS = ["checkpoint.npz", "train_log.jsonl", "oracle_train.jsonl",
             "oracle_eval.jsonl", "metrics.json", "curve_eval.jsonl",
             "pathways.jsonl", "cache.jsonl"]


def test_optimize_writes_all_artifacts(tmp_path, capsys):
    code = main(["optimize", "--config", str(write_config(tmp_path))])
    assert code == 0
    out = tmp_path / "out"
    for name in ARTIFACTS:
        assert (out / name).is_file(), name
    report = json.loads((out / "metrics.json").read_text())
    assert report["seed"] == 11
    assert report["task_id"] == "cli-test"
    assert report["budget"] == 10
    assert "complete" in capsys.readouterr().out


def test_missing_config_file_exits_2(capsys):
    assert main(["optimize", "--config", "/nonexistent/run.json"]) == 2
    assert "error" in capsys.readouterr().err


def test_invalid_json_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert main(["optimize", "--config", str(bad)]) == 2


def test_unknown_config_key_exits_2(tmp_path):
    cfg = write_config(tmp_path, typo_field=1)
    assert main(["optimize", "--config", str(cfg)]) == 2


def test_exhausted_eval_budget_exits_3(tmp_path):
    cfg = write_config(tmp_path, budget={"train": 9, "eval": 0},
                       grpo={"learning_rate": 0.2, "group_size": 3,
                             "molecules_per_batch": 3,
                             "training_steps": 1})
    assert main(["optimize", "--config", str(cfg)]) == 3
    # the training artifacts and the empty eval log were still written
    assert (tmp_path / "out" / "checkpoint.npz").is_file()
    assert (tmp_path / "out" / "oracle_eval.jsonl").is_file()


def test_replay_verifies_exported_pathways(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["optimize", "--config", str(cfg)]) == 0
    code = main(["replay",
                 "--pathways", str(tmp_path / "out" / "pathways.jsonl"),
                 "--templates", str(FIXTURES / "templates_toy.jsonl")])
    assert code == 0
    assert "verified" in capsys.readouterr().out


def test_replay_tampered_product_exits_4(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["optimize", "--config", str(cfg)]) == 0
    path = tmp_path / "out" / "pathways.jsonl"
    lines = path.read_text().splitlines()
    # corrupt the final molecule of a record that has at least one step
    for i, line in enumerate(lines):
        raw = json.loads(line)
        if raw["steps"]:
            raw["steps"][-1]["product"] = "CCCCCCCC"
            lines[i] = json.dumps(raw)
            break
    else:
        pytest.skip("no multi-step pathway in this run")
    path.write_text("\n".join(lines) + "\n")
    code = main(["replay", "--pathways", str(path),
                 "--templates", str(FIXTURES / "templates_toy.jsonl")])
    assert code == 4
    assert "error" in capsys.readouterr().err


def test_eval_subcommand_reproduces_optimize_metrics(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["optimize", "--config", str(cfg)]) == 0
    first = (tmp_path / "out" / "metrics.json").read_bytes()
    cfg2 = write_config(tmp_path, output_dir=str(tmp_path / "out2"))
    code = main(["eval", "--config", str(cfg2),
                 "--checkpoint", str(tmp_path / "out" / "checkpoint.npz")])
    assert code == 0
    second = (tmp_path / "out2" / "metrics.json").read_bytes()
    assert first == second


def test_eval_with_mismatched_checkpoint_exits_2(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["optimize", "--config", str(cfg)]) == 0
    cfg2 = write_config(tmp_path, output_dir=str(tmp_path / "out2"),
                        policy={"fp_block": 64})
    code = main(["eval", "--config", str(cfg2),
                 "--checkpoint", str(tmp_path / "out" / "checkpoint.npz")])
    assert code == 2


def test_cache_stats_reports_counts(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["optimize", "--config", str(cfg)]) == 0
    capsys.readouterr()
    code = main(["cache", "stats",
                 "--path", str(tmp_path / "out" / "cache.jsonl")])
    assert code == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["task_id"] == "cli-test"
    assert stats["entries"] > 0
    assert stats["bytes"] > 0


def test_cache_stats_on_non_cache_file_exits_2(tmp_path):
    junk = tmp_path / "junk.jsonl"
    junk.write_text("plainly not json\n")
    assert main(["cache", "stats", "--path", str(junk)]) == 2


def test_metrics_recomputes_report_from_log_alone(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["optimize", "--config", str(cfg)]) == 0
    report = json.loads((tmp_path / "out" / "metrics.json").read_text())
    capsys.readouterr()
    code = main(["metrics",
                 "--oracle-log", str(tmp_path / "out" / "oracle_eval.jsonl")])
    assert code == 0
    recomputed = json.loads(capsys.readouterr().out)
    # identical up to the run-identity fields the log does not carry
    for key in ("seed", "task_id"):
        report.pop(key)
    assert recomputed == report


def test_metrics_out_flag_writes_file(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["optimize", "--config", str(cfg)]) == 0
    dest = tmp_path / "report.json"
    code = main(["metrics",
                 "--oracle-log", str(tmp_path / "out" / "oracle_eval.jsonl"),
                 "--out", str(dest)])
    assert code == 0
    assert json.loads(dest.read_text())["k"] == 10


def test_metrics_budget_override_smaller_than_log_exits_2(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["optimize", "--config", str(cfg)]) == 0
    code = main(["metrics",
                 "--oracle-log", str(tmp_path / "out" / "oracle_eval.jsonl"),
                 "--budget", "1"])
    assert code == 2


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
