"""Command-line contract: outputs, determinism, exit codes."""
import json

import numpy as np
import pytest

from axlesim.cli import main
from axlesim.dataset import read_dataset_csv
from axlesim.surrogate import MtlNetwork, save_checkpoint
from axlesim.sensitivity import read_sensitivity_csv

CONFIG = """
[vehicle]
m_s = 20337.8
I_y = 562239.6
m_us = 458.4
k_s = 128710.0
c_s = 11522.5
k_t = 840857.0
wb = 4.85
n_axles = 4

[road]
length = 80.0
seed = 21

[sim]
speed = 10.0
duration = 6.0
warmup = 1.0

[sampling]
samples = 5
seed = 2

[train]
epochs = 2
batch_size = 8
pretrain_epochs = 2
seed = 4
hidden_widths = [8, 13]
window = 3
stride = 2
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(CONFIG)
    return str(path)


def constant_checkpoint(path, lo=1.0, hi=3.0):
    """Stub model: all-zero weights, constant midpoint predictions."""
    net = MtlNetwork(hidden=[(np.zeros((6, 8)), np.zeros(8))],
                     out_w=np.zeros((6, 8)), out_b=np.zeros(6),
                     mask=np.ones((6, 8)), kind="dnn", window=0, stride=0)
    net.target_min = np.full(6, lo)
    net.target_max = np.full(6, hi)
    save_checkpoint(net, path)
    return path


class TestSimulate:
    def test_flat_road_zero_metrics_and_undefined_index(self, config_file,
                                                        tmp_path, capsys):
        out = tmp_path / "sim"
        code = main(["simulate", "--config", config_file, "--flat-road",
                     "--out", str(out)])
        assert code == 0
        text = (out / "metrics.txt").read_text()
        assert "a_rms          : 0 " in text
        assert "undefined" in text
        assert (out / "response.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "simulate"
        assert manifest["config"]["vehicle"]["sprung_mass"] == 20337.8

    def test_baseline_vehicle_scores_one(self, config_file, tmp_path):
        out = tmp_path / "sim"
        assert main(["simulate", "--config", config_file, "--out", str(out)]) == 0
        text = (out / "metrics.txt").read_text()
        assert "sdpi           : 1\n" in text

    def test_repeat_invocations_byte_identical(self, config_file, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        main(["simulate", "--config", config_file, "--out", str(out_a)])
        main(["simulate", "--config", config_file, "--out", str(out_b)])
        for name in ("response.csv", "metrics.txt", "road.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_missing_key_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text(CONFIG.replace("m_s = 20337.8\n", ""))
        code = main(["simulate", "--config", str(bad), "--out",
                     str(tmp_path / "x")])
        assert code == 2
        assert "m_s" in capsys.readouterr().err

    def test_missing_config_file_exits_4(self, tmp_path):
        code = main(["simulate", "--config", str(tmp_path / "nope.toml"),
                     "--out", str(tmp_path / "x")])
        assert code == 4


class TestGenDataset:
    def test_small_run_and_report(self, config_file, tmp_path):
        out = tmp_path / "ds"
        code = main(["gen-dataset", "--config", config_file, "--out", str(out)])
        assert code == 0
        x, y = read_dataset_csv(out / "dataset.csv")
        assert x.shape == (5, 6)
        assert "requested samples : 5" in (out / "report.txt").read_text()

    def test_worker_count_invariant_bytes(self, config_file, tmp_path):
        out1 = tmp_path / "w1"
        out8 = tmp_path / "w8"
        main(["gen-dataset", "--config", config_file, "--workers", "1",
              "--out", str(out1)])
        main(["gen-dataset", "--config", config_file, "--workers", "8",
              "--out", str(out8)])
        assert ((out1 / "dataset.csv").read_bytes()
                == (out8 / "dataset.csv").read_bytes())

    def test_thread_cap_env(self, config_file, tmp_path, monkeypatch):
        monkeypatch.setenv("AXLESIM_THREADS", "1")
        out = tmp_path / "capped"
        main(["gen-dataset", "--config", config_file, "--workers", "8",
              "--out", str(out)])
        assert "workers           : 1" in (out / "report.txt").read_text()


class TestTrain:
    def make_dataset(self, config_file, tmp_path, samples=40):
        out = tmp_path / "ds"
        main(["gen-dataset", "--config", config_file, "--samples", str(samples),
              "--out", str(out)])
        return str(out / "dataset.csv")

    def test_zero_epochs_checkpoint_and_empty_trace(self, config_file, tmp_path):
        ds = self.make_dataset(config_file, tmp_path)
        out = tmp_path / "t0"
        code = main(["train", "--dataset", ds, "--config", config_file,
                     "--epochs", "0", "--out", str(out)])
        assert code == 0
        assert (out / "model.ckpt").exists()
        trace = (out / "trace.csv").read_text().splitlines()
        assert len(trace) == 1  # header only

    def test_seeded_checkpoints_identical(self, config_file, tmp_path):
        ds = self.make_dataset(config_file, tmp_path)
        out_a = tmp_path / "ta"
        out_b = tmp_path / "tb"
        for out in (out_a, out_b):
            assert main(["train", "--dataset", ds, "--config", config_file,
                         "--seed", "9", "--out", str(out)]) == 0
        assert ((out_a / "model.ckpt").read_bytes()
                == (out_b / "model.ckpt").read_bytes())
        assert ((out_a / "trace.csv").read_bytes()
                == (out_b / "trace.csv").read_bytes())

    def test_dnn_model_kind(self, config_file, tmp_path):
        ds = self.make_dataset(config_file, tmp_path)
        out = tmp_path / "dnn"
        assert main(["train", "--dataset", ds, "--config", config_file,
                     "--model", "dnn", "--out", str(out)]) == 0
        header = (out / "model.ckpt").read_bytes()[:200]
        assert b"kind=dnn" in header


class TestSensitivity:
    def test_constant_stub_checkpoint_gives_zero_matrix(self, config_file,
                                                        tmp_path):
        ckpt = constant_checkpoint(tmp_path / "stub.ckpt")
        out = tmp_path / "sens"
        code = main(["sensitivity", "--checkpoint", str(ckpt), "--config",
                     config_file, "--grid", "3", "--out", str(out)])
        assert code == 0
        matrix = read_sensitivity_csv(out / "sensitivity.csv")
        assert np.array_equal(matrix.values, np.zeros((6, 6)))
        assert (out / "heatmap.png").exists()

    def test_exact_small_grid(self, config_file, tmp_path):
        out = tmp_path / "sens"
        code = main(["sensitivity", "--exact", "--config", config_file,
                     "--grid", "3", "--out", str(out)])
        assert code == 0
        matrix = read_sensitivity_csv(out / "sensitivity.csv")
        assert np.allclose(matrix.values.max(axis=0), 1.0)
        assert "report" or (out / "report.txt").exists()


class TestPlot:
    def test_trace_and_heatmap_and_response(self, config_file, tmp_path):
        ds_dir = tmp_path / "ds"
        main(["gen-dataset", "--config", config_file, "--samples", "40",
              "--out", str(ds_dir)])
        train_dir = tmp_path / "train"
        main(["train", "--dataset", str(ds_dir / "dataset.csv"), "--config",
              config_file, "--out", str(train_dir)])
        sim_dir = tmp_path / "sim"
        main(["simulate", "--config", config_file, "--out", str(sim_dir)])

        trace_png = tmp_path / "trace.png"
        assert main(["plot", "--kind", "trace", "--out", str(trace_png),
                     str(train_dir / "trace.csv")]) == 0
        assert trace_png.exists()

        resp_png = tmp_path / "resp.png"
        assert main(["plot", "--kind", "response", "--out", str(resp_png),
                     str(sim_dir / "response.csv")]) == 0
        assert resp_png.exists()


class TestHelp:
    def test_subcommand_required(self, capsys):
        with pytest.raises(SystemExit):
            main([])

    def test_help_documents_flags(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["gen-dataset", "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        assert "--workers" in text and "AXLESIM_THREADS" in text
