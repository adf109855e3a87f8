"""Batch sampling of vehicle variants and the input -> metric training dataset.

Every sample and the baseline share one fixed road realization and one
simulation config, so each target is a deterministic function of the six
varied parameters. Rows are always emitted in sample-index order regardless
of worker count, and the pipeline per row is exactly simulate ->
response_metrics -> sdpi, so batch output is bit-identical to composing
those calls by hand.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DatasetError, DivergenceError, SamplingError
from .road import RoadProfile
from .sdpi import MetricVector, sdpi
from .sim import SimConfig, response_metrics, simulate
from .vehicle import VehicleParams

INPUT_COLUMNS = ("m_s", "I_y", "k_s", "c_s", "k_t", "wb")
TARGET_COLUMNS = ("a_rms", "theta_ddot_rms", "theta_rms",
                  "sws_max_sum", "dtl_rms_sum", "sdpi")

_SCHEMES = ("latin-hypercube", "uniform-random")


@dataclass(frozen=True)
class SamplingSpec:
    """How to draw vehicle variants around a baseline.

    `ranges` maps each varied parameter to a relative half-width r, so the
    sampled multiplicative factor is uniform on [1-r, 1+r]. Unsprung masses
    and axle count stay at baseline.
    """

    ranges: dict = field(default_factory=lambda: {name: 0.3 for name in INPUT_COLUMNS})
    sample_count: int = 20000
    scheme: str = "latin-hypercube"
    seed: int = 1

    def __post_init__(self):
        if self.sample_count < 1:
            raise SamplingError(f"sample_count must be >= 1, got {self.sample_count}")
        if self.scheme not in _SCHEMES:
            raise SamplingError(f"scheme must be one of {_SCHEMES}, got {self.scheme!r}")
        unknown = set(self.ranges) - set(INPUT_COLUMNS)
        if unknown:
            raise SamplingError(f"unknown parameters in ranges: {sorted(unknown)}")
        full = {name: float(self.ranges.get(name, 0.0)) for name in INPUT_COLUMNS}
        for name, r in full.items():
            if not 0.0 <= r < 1.0:
                raise SamplingError(
                    f"range for {name} must lie in [0, 1) to keep parameters "
                    f"positive, got {r}")
        object.__setattr__(self, "ranges", full)


@dataclass(frozen=True)
class DatasetRow:
    """One sample: six absolute input parameters and six targets."""

    inputs: tuple[float, ...]    # ordered per INPUT_COLUMNS
    targets: tuple[float, ...]   # ordered per TARGET_COLUMNS


@dataclass
class GenerationReport:
    requested: int
    completed: int
    diverged_indices: list
    wall_time_s: float
    workers: int

    @property
    def divergence_warning(self) -> bool:
        return len(self.diverged_indices) > 0.01 * self.requested

    def render(self) -> str:
        lines = [
            "dataset generation report",
            f"  requested samples : {self.requested}",
            f"  completed rows    : {self.completed}",
            f"  diverged samples  : {len(self.diverged_indices)}",
            f"  workers           : {self.workers}",
            f"  wall time         : {self.wall_time_s:.1f} s",
        ]
        if self.diverged_indices:
            lines.append(f"  diverged indices  : {self.diverged_indices[:50]}")
        if self.divergence_warning:
            lines.append("  WARNING: more than 1% of samples diverged; "
                         "check ranges and time step")
        return "\n".join(lines) + "\n"


def _factor_grid(spec: SamplingSpec, rng: np.random.Generator) -> np.ndarray:
    """(sample_count, 6) multiplicative factors, one column per parameter.

    Latin hypercube stratifies each column into sample_count equal bins with
    exactly one point per bin; parameters with range 0 pin to exactly 1.0.
    """
    count = spec.sample_count
    factors = np.ones((count, len(INPUT_COLUMNS)))
    for col, name in enumerate(INPUT_COLUMNS):
        r = spec.ranges[name]
        if spec.scheme == "latin-hypercube":
            strata = rng.permutation(count)
            jitter = rng.random(count)
            unit = (strata + jitter) / count
        else:
            unit = rng.random(count)
        factors[:, col] = 1.0 - r + 2.0 * r * unit
    return factors


def sample_parameters(spec: SamplingSpec, baseline: VehicleParams) -> list[VehicleParams]:
    """Draw vehicle variants; deterministic for a fixed master seed."""
    rng = np.random.default_rng(spec.seed)
    factors = _factor_grid(spec, rng)
    return [
        baseline.scaled(m_s=f[0], I_y=f[1], k_s=f[2], c_s=f[3], k_t=f[4], wb=f[5])
        for f in factors
    ]


def input_values(params: VehicleParams) -> tuple[float, ...]:
    """The six absolute dataset inputs of a (uniform-axle) vehicle."""
    return (params.sprung_mass, params.pitch_inertia, params.spring_coeffs[0],
            params.damping_coeffs[0], params.tire_stiffnesses[0], params.wheelbase)


def _targets(metrics: MetricVector, baseline: MetricVector) -> tuple[float, ...]:
    return (metrics.a_rms, metrics.theta_ddot_rms, metrics.theta_rms,
            metrics.sws_max_sum, metrics.dtl_rms_sum, sdpi(metrics, baseline))


def generate_dataset(spec: SamplingSpec, road: RoadProfile, cfg: SimConfig,
                     baseline: VehicleParams, workers: int = 1):
    """Run the batch and return (rows, baseline_metrics, report).

    The baseline simulation must succeed; samples that diverge are dropped
    and counted in the report.
    """
    started = time.time()
    try:
        base_resp = simulate(baseline, road, cfg)
    except DivergenceError as exc:
        raise DatasetError(f"baseline simulation diverged: {exc}") from exc
    base_metrics = response_metrics(base_resp, cfg)
    del base_resp

    samples = sample_parameters(spec, baseline)

    def run_one(params: VehicleParams):
        try:
            resp = simulate(params, road, cfg)
        except DivergenceError:
            return None
        metrics = response_metrics(resp, cfg)
        return DatasetRow(inputs=input_values(params),
                          targets=_targets(metrics, base_metrics))

    workers = max(1, int(workers))
    if workers == 1:
        results = [run_one(p) for p in samples]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, samples))

    rows = [r for r in results if r is not None]
    diverged = [i for i, r in enumerate(results) if r is None]
    report = GenerationReport(requested=spec.sample_count, completed=len(rows),
                              diverged_indices=diverged,
                              wall_time_s=time.time() - started, workers=workers)
    return rows, base_metrics, report


def write_dataset_csv(rows, path) -> None:
    """Fixed column order, 17 significant digits, deterministic bytes."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(INPUT_COLUMNS + TARGET_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in (*row.inputs, *row.targets)) + "\n")


def read_dataset_csv(path):
    """Return (inputs, targets) arrays of shape (N, 6) each."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    n_in = len(INPUT_COLUMNS)
    if data.shape[1] != n_in + len(TARGET_COLUMNS):
        raise DatasetError(
            f"{path}: expected {n_in + len(TARGET_COLUMNS)} columns, "
            f"got {data.shape[1]}")
    return data[:, :n_in], data[:, n_in:]
