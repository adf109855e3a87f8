"""Road profile generation, lookup and persistence."""
import numpy as np
import pytest
from scipy.signal import welch

from axlesim.errors import PositionError, RoadSpecError
from axlesim.road import (ISO_CLASS_GD, RoadProfile, RoadSpec, flat_profile,
                          generate_profile, height_at, load_profile_csv,
                          psd_model, save_profile_csv)


def welch_band_ratios(profile, spec, n_lo=0.05, n_hi=2.0, bands=24, nperseg=8192):
    """Re-estimate the PSD of a generated profile and compare it to the model
    in logarithmically spaced bands. Independent oracle for the synthesis."""
    fs = 1.0 / profile.spatial_step
    f, pxx = welch(profile.elevations, fs=fs, nperseg=nperseg,
                   noverlap=nperseg // 2, window="hann", detrend=False)
    edges = np.geomspace(n_lo, n_hi, bands + 1)
    ratios = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (f >= lo) & (f < hi)
        if not np.any(sel):
            continue
        ratios.append(pxx[sel].mean() / psd_model(spec, f[sel]).mean())
    return np.array(ratios)


class TestSpecValidation:
    def test_nyquist_violation(self):
        with pytest.raises(RoadSpecError, match="Nyquist"):
            RoadSpec(spatial_step=0.5, n_max=2.83)

    def test_unknown_class(self):
        with pytest.raises(RoadSpecError, match="class"):
            RoadSpec(iso_class="Z")

    def test_band_order(self):
        with pytest.raises(RoadSpecError, match="n_max"):
            RoadSpec(n_min=1.0, n_max=0.5)

    def test_class_constants_quadruple(self):
        # Geometric means: PSD x4 per class, i.e. amplitude doubles per class.
        letters = "ABCDEFGH"
        for a, b in zip(letters[:-1], letters[1:]):
            assert ISO_CLASS_GD[b] == pytest.approx(4.0 * ISO_CLASS_GD[a])


class TestGeneration:
    def test_sample_count(self):
        prof = generate_profile(RoadSpec(length=100.0, spatial_step=0.05, seed=1))
        assert prof.elevations.size == int(np.floor(100.0 / 0.05)) + 1

    def test_deterministic_for_fixed_seed(self):
        spec = RoadSpec(seed=11)
        a = generate_profile(spec)
        b = generate_profile(spec)
        assert np.array_equal(a.elevations, b.elevations)

    def test_different_seeds_differ(self):
        a = generate_profile(RoadSpec(seed=1))
        b = generate_profile(RoadSpec(seed=2))
        assert not np.array_equal(a.elevations, b.elevations)

    def test_collapsed_band_is_identically_zero(self):
        spec = RoadSpec(n_min=0.5, n_max=0.5, spatial_step=0.05, seed=3)
        prof = generate_profile(spec)
        assert np.array_equal(prof.elevations, np.zeros_like(prof.elevations))

    def test_sample_mean_near_zero(self):
        for seed in (0, 1, 2):
            spec = RoadSpec(iso_class="C", length=2000.0, seed=seed)
            prof = generate_profile(spec)
            sigma = prof.elevations.std()
            bound = 3.0 * sigma / np.sqrt(prof.elevations.size)
            assert abs(prof.elevations.mean()) < bound

    def test_doubling_psd_scales_by_sqrt2(self):
        base = RoadSpec(iso_class="C", length=200.0, seed=5)
        doubled = RoadSpec(iso_class="C", length=200.0, seed=5,
                           gd_n0=2.0 * ISO_CLASS_GD["C"])
        a = generate_profile(base).elevations
        b = generate_profile(doubled).elevations
        np.testing.assert_allclose(b, np.sqrt(2.0) * a, rtol=1e-12,
                                   atol=1e-15 * np.abs(a).max())

    def test_rms_grows_with_class(self):
        rms_a = generate_profile(RoadSpec(iso_class="A", seed=8)).rms
        rms_b = generate_profile(RoadSpec(iso_class="B", seed=8)).rms
        assert rms_b > rms_a
        assert rms_b == pytest.approx(2.0 * rms_a, rel=1e-9)

    def test_welch_psd_within_factor_two(self):
        spec = RoadSpec(iso_class="C", length=2000.0, spatial_step=0.05, seed=0)
        ratios = welch_band_ratios(generate_profile(spec), spec)
        assert ratios.size >= 20
        assert np.all(ratios > 0.5) and np.all(ratios < 2.0)


class TestHeightLookup:
    def two_point_profile(self):
        return RoadProfile(elevations=np.array([0.0, 0.02]), spatial_step=1.0,
                           length=1.0, iso_class="A", seed=0)

    def test_sample_point_exact(self):
        prof = generate_profile(RoadSpec(length=50.0, seed=4))
        for j in (0, 10, 500):
            assert height_at(prof, j * prof.spatial_step) == prof.elevations[j]

    def test_midpoint_interpolation(self):
        assert height_at(self.two_point_profile(), 0.5) == pytest.approx(0.01)

    def test_constant_profile(self):
        prof = RoadProfile(elevations=np.full(11, 0.3), spatial_step=0.1,
                           length=1.0, iso_class="A", seed=0)
        for pos in (0.0, 0.123, 0.77, 1.0):
            assert height_at(prof, pos) == pytest.approx(0.3)

    def test_out_of_range(self):
        prof = self.two_point_profile()
        with pytest.raises(PositionError):
            height_at(prof, -0.1)
        with pytest.raises(PositionError):
            height_at(prof, 1.1)

    def test_elevations_read_only(self):
        prof = flat_profile(10.0)
        with pytest.raises(ValueError):
            prof.elevations[0] = 1.0


class TestCsvRoundTrip:
    def test_bit_exact(self, tmp_path):
        prof = generate_profile(RoadSpec(iso_class="D", length=80.0, seed=17))
        path = tmp_path / "road.csv"
        save_profile_csv(prof, path)
        back = load_profile_csv(path)
        assert np.array_equal(back.elevations, prof.elevations)
        assert back.spatial_step == prof.spatial_step
        assert back.length == prof.length
        assert back.iso_class == prof.iso_class
        assert back.seed == prof.seed

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("position_m,height_m\n0,0\n")
        with pytest.raises(RoadSpecError, match="header"):
            load_profile_csv(path)
