"""Composite performance index weighting and normalization."""
import numpy as np
import pytest

from axlesim.errors import NormalizationError, ParameterError
from axlesim.sdpi import MetricVector, sdpi, sdpi_custom


def metrics(a=2.0, thdd=0.5, th=0.01, sws=0.2, dtl=30000.0):
    return MetricVector(a_rms=a, theta_ddot_rms=thdd, theta_rms=th,
                        sws_max_sum=sws, dtl_rms_sum=dtl)


class TestIndex:
    def test_identity_is_one(self):
        base = metrics()
        assert sdpi(base, base) == pytest.approx(1.0, abs=1e-15)

    def test_doubling_everything_gives_two(self):
        base = metrics()
        cand = MetricVector(*(2.0 * base.as_array()))
        assert sdpi(cand, base) == pytest.approx(2.0, abs=1e-12)

    def test_halved_tire_load_component(self):
        base = metrics()
        cand = metrics(dtl=15000.0)
        assert sdpi(cand, base) == pytest.approx(0.67, abs=1e-12)

    def test_linear_in_tire_load_ratio(self):
        base = metrics()
        lo = sdpi(metrics(dtl=30000.0 * 0.8), base)
        hi = sdpi(metrics(dtl=30000.0 * 1.4), base)
        # Slope with respect to the tire-load ratio is the 0.66 weight.
        assert (hi - lo) / (1.4 - 0.8) == pytest.approx(0.66, abs=1e-12)

    def test_monotone_in_every_component(self):
        base = metrics()
        reference = sdpi(base, base)
        for bump in ({"a": 2.2}, {"thdd": 0.6}, {"th": 0.012},
                     {"sws": 0.25}, {"dtl": 31000.0}):
            assert sdpi(metrics(**bump), base) > reference

    def test_zero_baseline_component_rejected(self):
        base = metrics(th=0.0)
        with pytest.raises(NormalizationError, match="theta_rms"):
            sdpi(metrics(), base)

    def test_negative_metric_rejected(self):
        with pytest.raises(ParameterError):
            metrics(a=-1.0)


class TestCustomWeights:
    def test_defaults_match_fixed_index(self):
        base = metrics()
        cand = metrics(a=2.6, dtl=25000.0)
        assert sdpi_custom(cand, base) == pytest.approx(sdpi(cand, base), abs=1e-15)

    def test_weight_override(self):
        base = metrics()
        cand = metrics(dtl=15000.0)
        value = sdpi_custom(cand, base, tire_load=0.0, travel=0.67)
        assert value == pytest.approx(0.33 + 0.67, abs=1e-12)
