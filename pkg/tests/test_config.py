"""TOML run configuration parsing."""
import pytest

from axlesim.config import ArchSpec, load_config
from axlesim.errors import ConfigError

FULL = """
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
iso_class = "B"
length = 300.0
seed = 99

[sim]
speed = 12.0
duration = 10.0
warmup = 1.5

[sampling]
samples = 64
scheme = "uniform-random"
seed = 5

[sampling.ranges]
m_s = 0.2
k_s = 0.1

[train]
epochs = 7
batch_size = 16
seed = 3
hidden_widths = [32, 32, 40]
window = 10
stride = 6
"""


def write(tmp_path, text):
    path = tmp_path / "cfg.toml"
    path.write_text(text)
    return path


class TestLoad:
    def test_defaults_without_file(self):
        cfg = load_config(None)
        assert cfg.vehicle.axle_count == 4
        assert cfg.road.iso_class == "C"
        assert cfg.train.epochs == 50
        assert cfg.arch == ArchSpec()

    def test_full_file(self, tmp_path):
        cfg = load_config(write(tmp_path, FULL))
        assert cfg.vehicle.sprung_mass == 20337.8
        assert cfg.vehicle.spring_coeffs == (128710.0,) * 4
        assert cfg.road.iso_class == "B"
        assert cfg.road.seed == 99
        assert cfg.sim.speed == 12.0
        assert cfg.sampling.sample_count == 64
        assert cfg.sampling.scheme == "uniform-random"
        assert cfg.sampling.ranges["m_s"] == 0.2
        assert cfg.sampling.ranges["k_t"] == 0.0  # unlisted ranges pin to 0
        assert cfg.train.epochs == 7
        assert cfg.arch.hidden_widths == (32, 32, 40)
        assert cfg.arch.window == 10

    def test_missing_vehicle_key_named(self, tmp_path):
        text = FULL.replace("m_s = 20337.8\n", "")
        with pytest.raises(ConfigError, match="`m_s`"):
            load_config(write(tmp_path, text))

    def test_per_axle_list_override(self, tmp_path):
        text = FULL.replace("k_s = 128710.0",
                            "k_s = [100000.0, 120000.0, 120000.0, 100000.0]")
        cfg = load_config(write(tmp_path, text))
        assert cfg.vehicle.spring_coeffs == (100000.0, 120000.0, 120000.0, 100000.0)

    def test_wrong_list_length(self, tmp_path):
        text = FULL.replace("k_s = 128710.0", "k_s = [1.0, 2.0]")
        with pytest.raises(ConfigError, match="n_axles"):
            load_config(write(tmp_path, text))

    def test_unknown_section_key(self, tmp_path):
        text = FULL.replace("speed = 12.0", "velocity = 12.0")
        with pytest.raises(ConfigError, match="sim"):
            load_config(write(tmp_path, text))

    def test_unknown_range_parameter(self, tmp_path):
        text = FULL.replace("m_s = 0.2", "bogus = 0.2")
        with pytest.raises(ConfigError, match="bogus"):
            load_config(write(tmp_path, text))

    def test_malformed_toml(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write(tmp_path, "[vehicle\nm_s ="))
