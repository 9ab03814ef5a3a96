import pandas as pd
import pytest

import main
from src.experiments.commands import cmd_gen_data
from src.experiments.run_config import RunConfig
from src.utils.csv_io import read_csv, read_meta


def run_cli(*args):
    return main.run(list(args))


@pytest.fixture
def config_path(small_config, write_config):
    return write_config(small_config)


class TestGenData:
    def test_split_sizes(self, tmp_path, small_config, write_config):
        small_config["sweep"]["n_samples"] = 10
        path = write_config(small_config)
        assert run_cli("gen-data", "--config", path, "--out", str(tmp_path / "out")) == 0

        train, meta = read_csv(tmp_path / "out" / "train.csv")
        test, _ = read_csv(tmp_path / "out" / "test.csv")
        assert (len(train), len(test)) == (9, 1)
        assert meta["config"] == RunConfig(small_config).config_hash
        assert (tmp_path / "out" / "decisions.csv").exists()

    def test_rerun_is_byte_identical(self, tmp_path, config_path):
        run_cli("gen-data", "--config", config_path, "--out", str(tmp_path / "a"))
        run_cli("gen-data", "--config", config_path, "--out", str(tmp_path / "b"))
        for name in ("train.csv", "test.csv", "decisions.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_returns_zero(self, tmp_path, small_config):
        cfg = RunConfig(small_config).with_output_dir(str(tmp_path))
        assert cmd_gen_data(cfg) == 0


class TestDesign:
    def single_band(self, small_config, m):
        small_config["scenario"]["n_bands"] = 1
        small_config["sweep"].update({"m": m, "m_values": [1, 2, 4], "utilities": ["ee"]})
        return small_config

    def test_five_levels(self, tmp_path, small_config, write_config):
        path = write_config(self.single_band(small_config, 5))
        assert run_cli("design", "--config", path, "--out", str(tmp_path)) == 0

        frame, meta = read_csv(tmp_path / "partition.csv")
        assert len(frame) == 4
        assert frame["gain_threshold"].is_monotonic_decreasing
        assert meta["levels"] == "1.0,2.0,3.0,4.0,5.0"

    def test_single_level_writes_header_only(self, tmp_path, small_config, write_config):
        path = write_config(self.single_band(small_config, 1))
        assert run_cli("design", "--config", path, "--out", str(tmp_path)) == 0
        lines = (tmp_path / "partition.csv").read_text().splitlines()
        assert lines[-1] == "threshold_index,gain_threshold"

    def test_sum_rate_is_unsupported(self, tmp_path, small_config, write_config):
        config = self.single_band(small_config, 4)
        config["scenario"]["utility"] = "sr"
        config["sweep"]["m_values"] = [2, 4]
        assert run_cli("design", "--config", write_config(config), "--out", str(tmp_path)) == 2

    def test_two_bands_unsupported(self, tmp_path, config_path):
        assert run_cli("design", "--config", config_path, "--out", str(tmp_path)) == 2


class TestTrainAndEval:
    def test_train_writes_model_and_curve(self, tmp_path, config_path):
        out = str(tmp_path)
        assert run_cli("gen-data", "--config", config_path, "--out", out) == 0
        assert run_cli("train", "--config", config_path, "--out", out) == 0

        curve, _ = read_csv(tmp_path / "training_curve.csv")
        assert list(curve.columns) == ["epoch", "train_mse"]
        assert len(curve) == 5
        assert (tmp_path / "model.txt").read_text().startswith("# config=")

    def test_seed_changes_model_file(self, tmp_path, config_path):
        out = str(tmp_path)
        run_cli("gen-data", "--config", config_path, "--out", out)
        run_cli("train", "--config", config_path, "--out", out, "--seed", "1")
        first = (tmp_path / "model.txt").read_bytes()
        run_cli("train", "--config", config_path, "--out", out, "--seed", "2")
        assert (tmp_path / "model.txt").read_bytes() != first

    def test_fingerprint_mismatch_exit_code(self, tmp_path, small_config, write_config):
        out = str(tmp_path)
        assert run_cli("gen-data", "--config", write_config(small_config), "--out", out) == 0
        small_config["sweep"]["m"] = 2
        assert run_cli("train", "--config", write_config(small_config, "other.json"), "--out", out) == 3

    def test_eval_reports_every_labeler(self, tmp_path, config_path):
        out = str(tmp_path)
        run_cli("gen-data", "--config", config_path, "--out", out)
        run_cli("train", "--config", config_path, "--out", out)
        assert run_cli("eval", "--config", config_path, "--out", out) == 0

        frame, _ = read_csv(tmp_path / "eval.csv")
        assert list(frame["labeler"]) == ["oracle", "nn"]
        assert (frame["mean_loss_pct"] >= 0).all()

    def test_divergence_exit_code(self, tmp_path, small_config, write_config):
        small_config["train"].update({"learning_rate": 1e6, "epochs": 50})
        path = write_config(small_config)
        run_cli("gen-data", "--config", path, "--out", str(tmp_path))
        assert run_cli("train", "--config", path, "--out", str(tmp_path)) == 4


class TestSweep:
    def test_outputs_and_determinism(self, tmp_path, config_path):
        assert run_cli("sweep", "--config", config_path, "--out", str(tmp_path / "a")) == 0
        assert run_cli("sweep", "--config", config_path, "--out", str(tmp_path / "b")) == 0

        for name in ("results.csv", "gamma.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

        results, meta = read_csv(tmp_path / "a" / "results.csv")
        assert "partial" not in meta
        assert set(results["utility"]) == {"ee", "sr"}
        assert set(results["labeler"]) == {"oracle", "nn"}
        assert len(results) == 2 * 2 * 2

        gamma = pd.read_csv(tmp_path / "a" / "gamma.csv", comment="#")
        assert list(gamma.columns) == ["utility", "sigma_pct", "M_sigma", "gamma", "reference_flag"]
        assert len(gamma) == 2 * 3

    def test_oracle_rows_zero_under_discrete_baseline(self, tmp_path, small_config, write_config):
        small_config["oracle"]["baseline"] = "discrete_best"
        small_config["sweep"]["labelers"] = ["oracle"]
        assert run_cli("sweep", "--config", write_config(small_config), "--out", str(tmp_path)) == 0
        results, _ = read_csv(tmp_path / "results.csv")
        assert (results["mean_loss_pct"] == 0.0).all()

    def test_interrupt_flushes_partial_results(self, tmp_path, config_path, monkeypatch):
        from src.experiments import commands

        calls = []
        real_sweep = commands.sweep

        def interrupt_second(*args, **kwargs):
            if calls:
                raise KeyboardInterrupt
            calls.append(1)
            return real_sweep(*args, **kwargs)

        monkeypatch.setattr(commands, "sweep", interrupt_second)
        assert run_cli("sweep", "--config", config_path, "--out", str(tmp_path)) == 130
        assert read_meta(tmp_path / "results.csv")["partial"] == "true"
        results, _ = read_csv(tmp_path / "results.csv")
        assert len(results) == 2


class TestExitCodes:
    def test_unknown_key_is_config_error(self, tmp_path, small_config, write_config):
        small_config["bogus"] = True
        assert run_cli("gen-data", "--config", write_config(small_config), "--out", str(tmp_path)) == 1

    def test_missing_config_file(self, tmp_path):
        assert run_cli("gen-data", "--config", str(tmp_path / "absent.json")) == 1

    def test_missing_dataset(self, tmp_path, config_path):
        assert run_cli("train", "--config", config_path, "--out", str(tmp_path / "empty")) == 1
