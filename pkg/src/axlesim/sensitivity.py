"""One-at-a-time parameter sensitivity and the per-metric heatmap matrix.

Each of the six inputs is swept over a grid with the others held at baseline;
the raw score per (parameter, metric) cell is the metric's swept range
normalized by its baseline value, and each metric column is then scaled so
its maximum entry is 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import INPUT_COLUMNS, TARGET_COLUMNS, input_values
from .errors import SweepError
from .road import RoadProfile
from .sdpi import sdpi
from .sim import SimConfig, response_metrics, simulate
from .surrogate import MtlNetwork, predict
from .vehicle import VehicleParams

PARAM_NAMES = INPUT_COLUMNS
METRIC_NAMES = TARGET_COLUMNS

# Qualitative pattern the heatmap is checked against: the body-acceleration
# column should peak at sprung mass, the pitch-acceleration column at pitch
# inertia. Mismatches are surfaced in the run report, never hidden.
EXPECTED_ARGMAX = {"a_rms": "m_s", "theta_ddot_rms": "I_y"}


@dataclass(frozen=True)
class SensitivityMatrix:
    """Rows = inputs, columns = metrics, entries normalized to [0, 1]."""

    values: np.ndarray
    row_labels: tuple[str, ...] = PARAM_NAMES
    col_labels: tuple[str, ...] = METRIC_NAMES

    def column_argmax(self, metric: str) -> str:
        col = self.col_labels.index(metric)
        return self.row_labels[int(np.argmax(self.values[:, col]))]


def simulator_evaluator(road: RoadProfile, cfg: SimConfig, baseline: VehicleParams):
    """Exact evaluator: full simulation, metrics normalized against the
    baseline vehicle on the same road for the composite index."""
    base_metrics = response_metrics(simulate(baseline, road, cfg), cfg)

    def evaluate_params(params: VehicleParams) -> np.ndarray:
        m = response_metrics(simulate(params, road, cfg), cfg)
        return np.array([m.a_rms, m.theta_ddot_rms, m.theta_rms,
                         m.sws_max_sum, m.dtl_rms_sum, sdpi(m, base_metrics)])

    return evaluate_params


def surrogate_evaluator(net: MtlNetwork):
    """Fast evaluator backed by a trained prediction network."""

    def evaluate_params(params: VehicleParams) -> np.ndarray:
        return predict(net, np.array(input_values(params))).values

    return evaluate_params


def compute_sensitivity(evaluator, baseline: VehicleParams,
                        ranges: dict | float = 0.3,
                        grid_points: int = 11) -> SensitivityMatrix:
    """One-at-a-time sweep of every input over its grid.

    `ranges` is either one relative half-width for all parameters or a map
    per parameter name. The evaluator maps VehicleParams to the six metrics.
    """
    if grid_points < 2:
        raise SweepError(f"grid_points must be >= 2, got {grid_points}")
    if isinstance(ranges, dict):
        widths = {name: float(ranges.get(name, 0.3)) for name in PARAM_NAMES}
    else:
        widths = {name: float(ranges) for name in PARAM_NAMES}

    try:
        base_vals = np.asarray(evaluator(baseline), dtype=float)
    except Exception as exc:
        raise SweepError(f"evaluator failed at the baseline point: {exc}") from exc
    if base_vals.shape != (len(METRIC_NAMES),):
        raise SweepError(f"evaluator returned shape {base_vals.shape}, "
                         f"expected ({len(METRIC_NAMES)},)")
    if np.any(base_vals == 0.0):
        bad = METRIC_NAMES[int(np.argmax(base_vals == 0.0))]
        raise SweepError(
            f"baseline metric {bad} is zero; range normalization undefined "
            f"(flat-road baseline?)")

    raw = np.zeros((len(PARAM_NAMES), len(METRIC_NAMES)))
    for row, name in enumerate(PARAM_NAMES):
        r = widths[name]
        lo_vals = None
        hi_vals = None
        for factor in np.linspace(1.0 - r, 1.0 + r, grid_points):
            params = baseline.scaled(**{name: float(factor)})
            try:
                vals = np.asarray(evaluator(params), dtype=float)
            except Exception as exc:
                raise SweepError(
                    f"evaluator failed at {name} x {factor:.6g}: {exc}") from exc
            lo_vals = vals if lo_vals is None else np.minimum(lo_vals, vals)
            hi_vals = vals if hi_vals is None else np.maximum(hi_vals, vals)
        raw[row] = (hi_vals - lo_vals) / np.abs(base_vals)

    col_max = raw.max(axis=0)
    normalized = np.where(col_max > 0.0, raw / np.where(col_max > 0.0, col_max, 1.0),
                          0.0)
    return SensitivityMatrix(values=normalized)


def sensitivity_report(matrix: SensitivityMatrix) -> str:
    """Per-column dominant parameters plus the qualitative pattern check."""
    lines = ["sensitivity sweep report"]
    for metric in matrix.col_labels:
        lines.append(f"  {metric:<16} most sensitive to {matrix.column_argmax(metric)}")
    mismatches = []
    for metric, expected in EXPECTED_ARGMAX.items():
        got = matrix.column_argmax(metric)
        if got != expected:
            mismatches.append(
                f"  WARNING: {metric} column peaks at {got}, expected {expected}; "
                f"the qualitative ordering did not reproduce under these settings")
    if mismatches:
        lines.append("qualitative pattern check: MISMATCH")
        lines.extend(mismatches)
    else:
        lines.append("qualitative pattern check: ok "
                     "(a_rms peaks at m_s, theta_ddot_rms peaks at I_y)")
    return "\n".join(lines) + "\n"


def write_sensitivity_csv(matrix: SensitivityMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("parameter," + ",".join(matrix.col_labels) + "\n")
        for name, row in zip(matrix.row_labels, matrix.values):
            fh.write(name + "," + ",".join(f"{v:.17g}" for v in row) + "\n")


def read_sensitivity_csv(path) -> SensitivityMatrix:
    rows = []
    labels = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        cols = tuple(header[1:])
        for line in fh:
            parts = line.strip().split(",")
            labels.append(parts[0])
            rows.append([float(v) for v in parts[1:]])
    return SensitivityMatrix(values=np.array(rows), row_labels=tuple(labels),
                             col_labels=cols)
