"""Run configuration: one TOML file with [vehicle], [road], [sim], [sampling]
and [train] sections. Missing sections fall back to defaults; the [vehicle]
section, when a file is given, must carry the physical keys. Scalar per-axle
values broadcast to all axles; lists override axle by axle.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .dataset import INPUT_COLUMNS, SamplingSpec
from .errors import ConfigError
from .road import RoadSpec
from .sim import SimConfig
from .surrogate import TrainConfig
from .vehicle import (DEFAULT_VEHICLE_TABLE, VehicleParams, default_vehicle,
                      evenly_spaced_offsets)

VEHICLE_KEYS = ("m_s", "I_y", "m_us", "k_s", "c_s", "k_t", "wb")
PER_AXLE_KEYS = ("m_us", "k_s", "c_s", "k_t")


@dataclass(frozen=True)
class ArchSpec:
    """Network architecture knobs that sit outside TrainConfig."""

    hidden_widths: tuple[int, ...] = (64, 64, 76)
    window: int = 16
    stride: int = 12


@dataclass(frozen=True)
class RunConfig:
    vehicle: VehicleParams = field(default_factory=default_vehicle)
    road: RoadSpec = field(default_factory=RoadSpec)
    sim: SimConfig = field(default_factory=SimConfig)
    sampling: SamplingSpec = field(default_factory=SamplingSpec)
    train: TrainConfig = field(default_factory=TrainConfig)
    arch: ArchSpec = field(default_factory=ArchSpec)


def _vehicle_from_table(table: dict) -> VehicleParams:
    for key in VEHICLE_KEYS:
        if key not in table:
            raise ConfigError(f"missing config key `{key}` in [vehicle]")
    n = int(table.get("n_axles", DEFAULT_VEHICLE_TABLE["n_axles"]))

    def per_axle(key):
        value = table[key]
        if isinstance(value, (list, tuple)):
            if len(value) != n:
                raise ConfigError(
                    f"[vehicle] {key} has {len(value)} entries, expected n_axles={n}")
            return tuple(float(v) for v in value)
        return (float(value),) * n

    return VehicleParams(
        axle_count=n,
        sprung_mass=float(table["m_s"]),
        pitch_inertia=float(table["I_y"]),
        unsprung_masses=per_axle("m_us"),
        spring_coeffs=per_axle("k_s"),
        damping_coeffs=per_axle("c_s"),
        tire_stiffnesses=per_axle("k_t"),
        axle_offsets=evenly_spaced_offsets(float(table["wb"]), n),
    )


def _build(cls, table: dict, *, rename: dict | None = None, name: str = ""):
    rename = rename or {}
    kwargs = {}
    for key, value in table.items():
        target = rename.get(key, key)
        if target is None:
            continue
        kwargs[target] = tuple(value) if isinstance(value, list) else value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad key in [{name}]: {exc}") from exc


def load_config(path=None) -> RunConfig:
    """Parse a config file; `path=None` yields the full default config."""
    if path is None:
        return RunConfig()
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc

    vehicle = _vehicle_from_table(raw.get("vehicle", {}))
    road = _build(RoadSpec, raw.get("road", {}), name="road")
    sim = _build(SimConfig, raw.get("sim", {}), name="sim")

    sampling_table = dict(raw.get("sampling", {}))
    ranges = sampling_table.pop("ranges", None)
    if ranges is not None:
        unknown = set(ranges) - set(INPUT_COLUMNS)
        if unknown:
            raise ConfigError(f"unknown parameters in [sampling.ranges]: {sorted(unknown)}")
        sampling_table["ranges"] = {k: float(v) for k, v in ranges.items()}
    sampling = _build(SamplingSpec, sampling_table,
                      rename={"samples": "sample_count"}, name="sampling")

    train_table = dict(raw.get("train", {}))
    arch = ArchSpec(
        hidden_widths=tuple(int(w) for w in train_table.pop(
            "hidden_widths", ArchSpec.hidden_widths)),
        window=int(train_table.pop("window", ArchSpec.window)),
        stride=int(train_table.pop("stride", ArchSpec.stride)),
    )
    train = _build(TrainConfig, train_table, name="train")
    return RunConfig(vehicle=vehicle, road=road, sim=sim, sampling=sampling,
                     train=train, arch=arch)
