"""Classification harness, spectral analysis, and support measurements."""

import json
import math

import numpy as np
import pytest

from teka import (
    AveragingConfig,
    Centroid,
    ConfigError,
    InputError,
    KdtwParams,
    LabeledDataset,
    NumericError,
    DEFAULT_NU_GRID,
    TimeSeries,
    build_prototypes,
    centroid_support,
    classify_1nc,
    default_measure,
    denoise_rosette,
    loo_select_nu,
    power_spectrum,
    report_to_dict,
    snr_gain,
    spectrum_frequencies,
    support_bounds,
    write_report_csv,
    write_report_json,
)
from teka.datagen import RosetteSpec
from oracles import rand_series


def ts(a) -> TimeSeries:
    return TimeSeries(np.asarray(a, dtype=float))


def toy_dataset() -> LabeledDataset:
    """Two well-separated classes, three series each."""
    low = [ts([0.0, 0.1, 0.0]), ts([0.1, 0.0, 0.1]), ts([0.0, 0.0, 0.1])]
    high = [ts([5.0, 5.1, 5.0]), ts([5.1, 5.0, 5.1]), ts([5.0, 5.0, 5.1])]
    return LabeledDataset(tuple(low + high), (0, 0, 0, 1, 1, 1))


class TestClassify:
    def test_prototypes_as_test_set_is_perfect(self):
        ds = toy_dataset()
        protos = [(ds.series[0], 0), (ds.series[3], 1)]
        rep = classify_1nc(protos, ds, "dtw")
        assert rep.error_rate == 0.0
        assert rep.f1 == 1.0
        np.testing.assert_array_equal(rep.confusion, [[3, 0], [0, 3]])

    def test_two_prototype_hand_case(self):
        protos = [(ts([0.0, 0.0, 0.0]), 0), (ts([9.0, 9.0, 9.0]), 1)]
        test = LabeledDataset((ts([1.0, 1.0, 1.0]),), (0,))
        for measure, p in (("dtw", None), ("kdtw", KdtwParams(0.1))):
            rep = classify_1nc(protos, test, measure, p)
            assert rep.error_rate == 0.0

    def test_prototype_order_invariance(self):
        ds = toy_dataset()
        protos = [(ds.series[0], 0), (ds.series[3], 1)]
        a = classify_1nc(protos, ds, "dtw")
        b = classify_1nc(list(reversed(protos)), ds, "dtw")
        np.testing.assert_array_equal(a.confusion, b.confusion)

    def test_tie_goes_to_lowest_class(self):
        proto = ts([1.0, 2.0])
        protos = [(proto, 1), (proto, 0)]
        test = LabeledDataset((ts([1.0, 2.0]),), (0,))
        rep = classify_1nc(protos, test, "dtw")
        assert rep.error_rate == 0.0

    def test_missing_prototype_class(self):
        ds = toy_dataset()
        with pytest.raises(ConfigError):
            classify_1nc([(ds.series[0], 0)], ds, "dtw")

    def test_confusion_row_sums(self):
        ds = toy_dataset()
        protos = [(ds.series[1], 0), (ds.series[4], 1)]
        rep = classify_1nc(protos, ds, "dtw")
        np.testing.assert_array_equal(rep.confusion.sum(axis=1), [3, 3])
        total = rep.confusion.sum()
        trace = np.trace(rep.confusion)
        assert rep.error_rate == 1.0 - trace / total

    def test_kdtw_requires_params(self):
        ds = toy_dataset()
        protos = [(ds.series[0], 0), (ds.series[3], 1)]
        with pytest.raises(InputError):
            classify_1nc(protos, ds, "kdtw", None)


class TestBuildPrototypes:
    def test_one_per_class_sorted(self):
        ds = toy_dataset()
        cfg = AveragingConfig(nu=1.0, method="euclidean")
        protos = build_prototypes(ds, cfg)
        assert [label for _, label in protos] == [0, 1]

    def test_default_measure(self):
        assert default_measure("teka") == "kdtw"
        assert default_measure("medoid_kdtw") == "kdtw"
        assert default_measure("dba") == "dtw"
        assert default_measure("medoid_dtw") == "dtw"
        assert default_measure("euclidean") == "dtw"


class TestLooSelectNu:
    def test_singleton_grid(self):
        ds = toy_dataset()
        sel = loo_select_nu(ds, "medoid_kdtw", [0.5], "kdtw")
        assert sel.nu == 0.5

    def test_separable_data_prefers_smallest(self):
        ds = toy_dataset()
        sel = loo_select_nu(ds, "medoid_kdtw", [0.1, 0.5, 1.0], "kdtw")
        assert sel.nu == 0.1
        assert sel.loo_error == 0.0

    def test_fast_mode_matches_on_easy_data(self):
        ds = toy_dataset()
        slow = loo_select_nu(ds, "teka", [0.5, 1.0], "kdtw")
        fast = loo_select_nu(ds, "teka", [0.5, 1.0], "kdtw", fast=True)
        assert slow.nu == fast.nu == 0.5

    def test_singleton_class_warns(self):
        series = (ts([0.0, 0.0]), ts([0.1, 0.0]), ts([9.0, 9.0]))
        ds = LabeledDataset(series, (0, 0, 1))
        sel = loo_select_nu(ds, "medoid_kdtw", [1.0], "kdtw")
        assert any("class 1" in w for w in sel.warnings)

    def test_underflowing_nu_disqualified(self):
        far = [ts(np.zeros(40)), ts(np.zeros(40) + 0.1),
               ts(np.full(40, 30.0)), ts(np.full(40, 30.1))]
        ds = LabeledDataset(tuple(far), (0, 0, 1, 1))
        sel = loo_select_nu(ds, "medoid_kdtw", [0.01, 100.0], "kdtw")
        assert sel.nu == 0.01

    def test_all_nu_disqualified_raises(self):
        far = [ts(np.zeros(40)), ts(np.zeros(40) + 0.1),
               ts(np.full(40, 30.0)), ts(np.full(40, 30.1))]
        ds = LabeledDataset(tuple(far), (0, 0, 1, 1))
        with pytest.raises(NumericError):
            loo_select_nu(ds, "medoid_kdtw", [100.0], "kdtw")

    def test_default_grid_is_paper_grid(self):
        assert len(DEFAULT_NU_GRID) == 15
        assert DEFAULT_NU_GRID[0] == 0.01
        assert DEFAULT_NU_GRID[-1] == 100.0


class TestPowerSpectrum:
    def test_pure_tone_dominant_bin(self):
        n = 64
        x = np.sin(2.0 * np.pi * 8.0 * np.arange(n) / n)
        db = power_spectrum(x)
        assert db.size == n // 2 + 1
        assert int(np.argmax(db)) == 8
        rest = np.delete(db, 8)
        assert db[8] >= np.median(rest) + 20.0

    def test_constant_signal_all_power_in_dc(self):
        db = power_spectrum(np.full(16, 3.0))
        assert np.isfinite(db[0])
        assert np.all(np.isneginf(db[1:]))

    def test_parseval(self):
        rng = np.random.default_rng(211)
        for n in (16, 33, 100):
            x = rng.normal(size=n)
            db = power_spectrum(x)
            power = 10.0 ** (db / 10.0)
            half = power.copy()
            if n % 2 == 0:
                half[1:-1] *= 2.0
            else:
                half[1:] *= 2.0
            energy_freq = half.sum() / n
            energy_time = float(np.sum(x * x))
            assert energy_freq == pytest.approx(energy_time, rel=1e-9)

    def test_too_short(self):
        with pytest.raises(InputError):
            power_spectrum(np.array([1.0]))

    def test_frequencies(self):
        freqs = spectrum_frequencies(8, 80.0)
        np.testing.assert_allclose(freqs, [0.0, 10.0, 20.0, 30.0, 40.0])


class TestSnrGain:
    def test_perfect_estimate_hits_sentinel(self):
        rng = np.random.default_rng(223)
        clean = ts(rand_series(rng, 32))
        noisy = ts(clean.values + rng.normal(size=(32, 1)))
        gain = snr_gain(clean, clean, noisy)
        assert gain > 60.0

    def test_no_improvement_is_exactly_zero(self):
        rng = np.random.default_rng(227)
        clean = ts(rand_series(rng, 32))
        noisy = ts(clean.values + rng.normal(size=(32, 1)))
        assert snr_gain(clean, noisy, noisy) == 0.0

    def test_zero_clean_rejected(self):
        clean = ts(np.zeros(16))
        other = ts(np.ones(16))
        with pytest.raises(InputError):
            snr_gain(clean, other, other)

    def test_estimate_resampled_to_clean_length(self):
        rng = np.random.default_rng(229)
        clean = ts(rand_series(rng, 40))
        noisy = ts(clean.values + 0.5 * rng.normal(size=(40, 1)))
        short = ts(clean.values[::2])
        gain = snr_gain(clean, short, noisy)
        assert math.isfinite(gain)


class TestSupport:
    def test_hand_case(self):
        lo, hi = support_bounds(np.array([0.0, 0.0, 5.0, 9.0, 5.0, 0.0]))
        assert (lo, hi) == (3.0, 5.0)

    def test_explicit_times(self):
        t = np.array([10.0, 20.0, 30.0, 40.0])
        lo, hi = support_bounds(np.array([0.0, 8.0, 8.0, 0.0]), t)
        assert (lo, hi) == (20.0, 30.0)

    def test_centroid_support_uses_centroid_times(self):
        vals = np.array([0.0, 0.0, 6.0, 6.0, 0.0, 0.0])
        cent = Centroid(vals.reshape(-1, 1), np.arange(1.0, 7.0))
        lo, hi = centroid_support(cent)
        assert lo == pytest.approx(3.0, abs=0.5)
        assert hi == pytest.approx(4.0, abs=0.5)


class TestDenoise:
    def test_small_run_reports_all_methods(self):
        spec = RosetteSpec(n_instances=3, seed=31)
        gains = denoise_rosette(spec, ("teka", "euclidean", "dba"),
                                nu=1.0, max_iter=3)
        assert set(gains) == {"teka", "euclidean", "dba"}
        assert all(math.isfinite(v) for v in gains.values())


class TestReports:
    def _report(self):
        ds = toy_dataset()
        protos = [(ds.series[0], 0), (ds.series[3], 1)]
        return classify_1nc(protos, ds, "dtw", method="medoid_dtw+dtw", seed=3)

    def test_json_round_trip(self, tmp_path):
        rep = self._report()
        f = tmp_path / "rep.json"
        write_report_json(str(f), rep)
        doc = json.loads(f.read_text())
        assert doc["error_rate"] == 0.0
        assert doc["confusion"] == [[3, 0], [0, 3]]
        assert doc["nu_selected"] is None

    def test_dict_nan_nu_becomes_none(self):
        rep = self._report()
        assert report_to_dict(rep)["nu_selected"] is None

    def test_csv_writer(self, tmp_path):
        rep = self._report()
        f = tmp_path / "rep.csv"
        write_report_csv(str(f), rep)
        text = f.read_text()
        assert "error_rate,0" in text
        assert "confusion_0" in text
