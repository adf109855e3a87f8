"""Composite suspension dynamic performance index.

The index weights five normalized response quantities of a candidate vehicle
against a baseline vehicle driven over the identical road: body acceleration
carries most of the comfort group, tire load dominates overall (handling
first), suspension travel is a small packaging term. A candidate identical to
the baseline scores exactly 1; lower is better.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError, ParameterError

# Weight structure: comfort group 0.33 split 0.6/0.2/0.2, travel 0.01,
# tire load 0.66. Group weights sum to 1 so sdpi(x, x) == 1.
ACCEL_GROUP_WEIGHT = 0.33
BODY_ACC_WEIGHT = 0.6
PITCH_ACC_WEIGHT = 0.2
PITCH_ANGLE_WEIGHT = 0.2
TRAVEL_WEIGHT = 0.01
TIRE_LOAD_WEIGHT = 0.66


@dataclass(frozen=True)
class MetricVector:
    """The five scalar performance quantities of one simulated traversal."""

    a_rms: float              # sprung mass acceleration RMS, m/s^2
    theta_ddot_rms: float     # pitch acceleration RMS, rad/s^2
    theta_rms: float          # pitch angle RMS, rad
    sws_max_sum: float        # sum over axles of max |suspension deflection|, m
    dtl_rms_sum: float        # sum over axles of dynamic tire load RMS, N
    sws_max: tuple[float, ...] | None = None   # per-axle detail, m
    dtl_rms: tuple[float, ...] | None = None   # per-axle detail, N

    def __post_init__(self):
        for name in ("a_rms", "theta_ddot_rms", "theta_rms",
                     "sws_max_sum", "dtl_rms_sum"):
            v = getattr(self, name)
            if v < 0 or not np.isfinite(v):
                raise ParameterError(f"{name} must be finite and non-negative, got {v}")

    def as_array(self) -> np.ndarray:
        return np.array([self.a_rms, self.theta_ddot_rms, self.theta_rms,
                         self.sws_max_sum, self.dtl_rms_sum])


def sdpi(candidate: MetricVector, baseline: MetricVector) -> float:
    """Weighted, baseline-normalized composite index; 1.0 at the baseline.

    Every baseline component must be strictly positive (a flat-road baseline
    produces all-zero metrics and makes the normalization undefined).
    """
    base = baseline.as_array()
    names = ("a_rms", "theta_ddot_rms", "theta_rms", "sws_max_sum", "dtl_rms_sum")
    for name, v in zip(names, base):
        if v <= 0:
            raise NormalizationError(
                f"baseline {name} = {v}: normalization requires strictly "
                f"positive baseline components (degenerate baseline?)")
    ratio = candidate.as_array() / base
    return (
        ACCEL_GROUP_WEIGHT * (BODY_ACC_WEIGHT * ratio[0]
                              + PITCH_ACC_WEIGHT * ratio[1]
                              + PITCH_ANGLE_WEIGHT * ratio[2])
        + TRAVEL_WEIGHT * ratio[3]
        + TIRE_LOAD_WEIGHT * ratio[4]
    )


def sdpi_custom(candidate: MetricVector, baseline: MetricVector, *,
                accel_group: float = ACCEL_GROUP_WEIGHT,
                body_acc: float = BODY_ACC_WEIGHT,
                pitch_acc: float = PITCH_ACC_WEIGHT,
                pitch_angle: float = PITCH_ANGLE_WEIGHT,
                travel: float = TRAVEL_WEIGHT,
                tire_load: float = TIRE_LOAD_WEIGHT) -> float:
    """Same composite with caller-chosen weights (not part of the fixed index)."""
    base = baseline.as_array()
    if np.any(base <= 0):
        raise NormalizationError("baseline components must be strictly positive")
    ratio = candidate.as_array() / base
    return (accel_group * (body_acc * ratio[0] + pitch_acc * ratio[1]
                           + pitch_angle * ratio[2])
            + travel * ratio[3] + tire_load * ratio[4])
