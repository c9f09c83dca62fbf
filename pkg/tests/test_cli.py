"""CLI contract: subcommands, artifacts, exit codes, determinism."""
import json
from pathlib import Path

import pytest

from ccnets.cli import cli_main


def write_tiny_config(path: Path, seed=0, **overrides) -> Path:
    cfg = {
        "observe_size": 6, "explain_size": 4, "hidden_size": 16,
        "inner_network_num_layers": 2, "epochs": 4, "batch_size": 64,
        "learning_rate": 2e-3, "seed": seed, "amplify_factor": 3,
        "dataset": {"fallback_synth": {"n": 1000, "fraud_rate": 0.08,
                                       "separation": 4.0, "seed": seed}},
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return path


class TestUsageErrors:
    def test_no_command_is_usage_error(self):
        assert cli_main([]) == 1

    def test_unknown_command(self):
        assert cli_main(["frobnicate"]) == 1

    def test_help_exits_zero(self):
        assert cli_main(["--help"]) == 0

    def test_missing_config_file(self, tmp_path):
        assert cli_main(["train", "--config", str(tmp_path / "nope.json"),
                         "--out", str(tmp_path)]) == 1

    def test_invalid_json_config(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert cli_main(["train", "--config", str(bad), "--out", str(tmp_path)]) == 1

    def test_eval_without_ckpt(self, tmp_path):
        cfg = write_tiny_config(tmp_path / "c.json")
        assert cli_main(["eval", "--config", str(cfg), "--out", str(tmp_path)]) == 1


class TestDataErrors:
    def test_schema_error_exit_2(self, tmp_path):
        bad_csv = tmp_path / "bad.csv"
        bad_csv.write_text("a,b\n1,2\n")
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"dataset": {"path": str(bad_csv)}}))
        assert cli_main(["prepare-data", "--config", str(cfg), "--out", str(tmp_path)]) == 2


class TestPipelineCommands:
    def test_prepare_train_eval_generate_amplify(self, tmp_path):
        cfg = write_tiny_config(tmp_path / "c.json")
        out = tmp_path / "run"
        assert cli_main(["prepare-data", "--config", str(cfg), "--out", str(out)]) == 0
        assert (out / "train.csv").exists() and (out / "test.csv").exists()
        assert (out / "normalization.json").exists()

        assert cli_main(["train", "--config", str(cfg), "--out", str(out)]) == 0
        ckpt = out / "ckpt_ccnets.json"
        assert ckpt.exists() and (out / "curves_ccnets.csv").exists()

        assert cli_main(["eval", "--config", str(cfg), "--out", str(out),
                         "--ckpt", str(ckpt)]) == 0
        assert (out / "metrics.json").exists()

        assert cli_main(["generate", "--config", str(cfg), "--out", str(out),
                         "--ckpt", str(ckpt)]) == 0
        assert (out / "generated.csv").exists()

        assert cli_main(["amplify", "--config", str(cfg), "--out", str(out),
                         "--ckpt", str(ckpt), "--factor", "2"]) == 0
        amplified = (out / "amplified.csv").read_text().strip().splitlines()
        generated = (out / "generated.csv").read_text().strip().splitlines()
        assert len(amplified) - 1 == 2 * (len(generated) - 1)

    def test_baseline_commands(self, tmp_path):
        cfg = write_tiny_config(tmp_path / "c.json")
        out = tmp_path / "run"
        assert cli_main(["train-ae", "--config", str(cfg), "--out", str(out)]) == 0
        assert (out / "ckpt_autoencoder.json").exists()
        assert cli_main(["train-mlp", "--config", str(cfg), "--out", str(out)]) == 0
        assert (out / "ckpt_mlp.json").exists()

    def test_train_mlp_on_generated_csv(self, tmp_path):
        cfg = write_tiny_config(tmp_path / "c.json")
        out = tmp_path / "run"
        assert cli_main(["train", "--config", str(cfg), "--out", str(out)]) == 0
        assert cli_main(["generate", "--config", str(cfg), "--out", str(out),
                         "--ckpt", str(out / "ckpt_ccnets.json")]) == 0
        assert cli_main(["train-mlp", "--config", str(cfg), "--out", str(out),
                         "--train-csv", str(out / "generated.csv")]) == 0


class TestExperimentsAndReport:
    def test_exp1_artifacts_and_report_command(self, tmp_path, capsys):
        cfg = write_tiny_config(tmp_path / "c.json", epochs=3)
        out = tmp_path / "run"
        assert cli_main(["exp1", "--config", str(cfg), "--out", str(out)]) == 0
        assert (out / "report.json").exists()
        assert (out / "curves_ccnets.csv").exists()
        assert cli_main(["report", "--out", str(out)]) == 0
        printed = capsys.readouterr().out
        assert "ccnets" in printed and "autoencoder_mlp" in printed

    def test_exp2_exp3_reuse_checkpoint(self, tmp_path):
        cfg = write_tiny_config(tmp_path / "c.json", epochs=3)
        out = tmp_path / "run"
        assert cli_main(["train", "--config", str(cfg), "--out", str(out)]) == 0
        ckpt = str(out / "ckpt_ccnets.json")
        assert cli_main(["exp2", "--config", str(cfg), "--out", str(out / "e2"),
                         "--ckpt", ckpt]) == 0
        assert cli_main(["exp3", "--config", str(cfg), "--out", str(out / "e3"),
                         "--ckpt", ckpt]) == 0
        r2 = json.loads((out / "e2" / "report.json").read_text())
        r3 = json.loads((out / "e3" / "report.json").read_text())
        assert [a["name"] for a in r2["arms"]] == ["original", "generation", "reconstruction"]
        assert [a["name"] for a in r3["arms"]] == ["generation_x1", "generation_x3"]

    def test_seed_determinism_byte_identical_reports(self, tmp_path):
        cfg = write_tiny_config(tmp_path / "c.json", epochs=3)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert cli_main(["exp1", "--config", str(cfg), "--out", str(out_a), "--seed", "7"]) == 0
        assert cli_main(["exp1", "--config", str(cfg), "--out", str(out_b), "--seed", "7"]) == 0

        def canonical(path):
            raw = json.loads((path / "report.json").read_text())
            raw.pop("wall_clock_sec")
            return json.dumps(raw, sort_keys=True).encode()

        assert canonical(out_a) == canonical(out_b)
        assert (out_a / "curves_ccnets.csv").read_bytes() == (out_b / "curves_ccnets.csv").read_bytes()
