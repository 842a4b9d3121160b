# -*- coding: utf-8 -*-
import mock
import numpy as np
import pytest

from ristide.errors import (BinningMismatchError, DegenerateSampleError,
                            EmptyInputError, InvalidArgumentError,
                            SeriesTooShortError, StreamTooShortError,
                            TooFewSamplesError)
from ristide.experiments import ar_series, nakagami_stream
from ristide.sim.channel import GainField
from ristide.sim.visibility import TileMask
from ristide.stats import (GainStream, Histogram, NakagamiFit,
                           SurvivalAccumulator, confidence_band,
                           fit_nakagami, js_divergence_normalized,
                           ks_distance, pacf, shadow_fraction,
                           shared_histograms, survival_field, to_db,
                           union_masks, wall_symmetry,
                           windowed_drift_report)


def _nakagami(rng, m, omega, n):
    return np.sqrt(rng.gamma(m, omega / m, n))


class TestDivergence(object):
    def test_known_value(self):
        assert js_divergence_normalized([1.0, 0.0], [0.5, 0.5]) == \
            pytest.approx(0.3113, abs=1e-4)

    def test_bounds_and_symmetry(self, rng):
        p, q = rng.random(16), rng.random(16)
        forward = js_divergence_normalized(p, q)
        assert forward == pytest.approx(js_divergence_normalized(q, p))
        assert 0.0 <= forward <= 1.0
        assert js_divergence_normalized(p, p) == pytest.approx(0.0, abs=1e-12)
        assert js_divergence_normalized([1.0, 0.0], [0.0, 1.0]) == \
            pytest.approx(1.0)

    def test_binning_must_match(self):
        with pytest.raises(BinningMismatchError):
            js_divergence_normalized([1.0, 2.0], [1.0, 2.0, 3.0])
        a = Histogram([1, 2], edges=[0.0, 1.0, 2.0])
        b = Histogram([1, 2], edges=[0.0, 1.5, 2.0])
        with pytest.raises(BinningMismatchError):
            js_divergence_normalized(a, b)

    def test_empty_histogram(self):
        with pytest.raises(EmptyInputError):
            js_divergence_normalized([0.0, 0.0], [1.0, 1.0])

    def test_shared_histograms(self, rng):
        p, q = shared_histograms(rng.random(100), rng.random(50) + 0.5, 8)
        assert p.same_binning(q)
        assert p.total == 100 and q.total == 50
        assert np.array_equal(p.edges, q.edges)


class TestFit(object):
    def test_ksd_against_a_constant_cdf(self):
        model = mock.Mock()
        model.cdf.side_effect = lambda x: np.full(len(x), 0.4)
        assert ks_distance([1.0, 1.0, 1.0], model) == pytest.approx(0.6)

    def test_ksd_of_the_quantile_grid(self):
        n = 200
        fit = NakagamiFit(1.0, 1.0, n)
        quantiles = fit.ppf((np.arange(1, n + 1) - 0.5) / n)
        assert ks_distance(quantiles, fit) == pytest.approx(0.5 / n)

    def test_ksd_of_nothing(self):
        with pytest.raises(EmptyInputError):
            ks_distance([], NakagamiFit(1.0, 1.0, 0))

    def test_moment_fit(self, rng):
        fit = fit_nakagami(_nakagami(rng, 2.0, 3.0, 100000))
        assert fit.m == pytest.approx(2.0, rel=0.05)
        assert fit.omega == pytest.approx(3.0, rel=0.02)
        assert fit.n_samples == 100000

    def test_refined_fit(self, rng):
        fit = fit_nakagami(_nakagami(rng, 1.5, 0.5, 20000), refine=True)
        assert fit.m == pytest.approx(1.5, rel=0.05)
        assert fit.omega == pytest.approx(0.5, rel=0.05)

    def test_fit_error_shrinks_like_one_over_root_n(self, rng):
        errors = []
        for n in (1000, 10000, 100000):
            fits = [fit_nakagami(_nakagami(rng, 2.0, 1.0, n))
                    for _ in range(20)]
            errors.append(np.sqrt(np.mean([(f.m - 2.0) ** 2 for f in fits])))
        assert errors[0] > errors[1] > errors[2]
        assert 4.0 < errors[0] / errors[2] < 25.0

    def test_shape_is_at_least_one_half(self, rng):
        samples = np.concatenate([np.zeros(900), _nakagami(rng, 1.0, 1.0,
                                                           100)])
        assert fit_nakagami(samples).m == 0.5

    def test_too_few_positive_samples(self):
        with pytest.raises(TooFewSamplesError):
            fit_nakagami(np.concatenate([np.zeros(50), np.ones(19)]))

    def test_constant_samples(self):
        with pytest.raises(DegenerateSampleError):
            fit_nakagami(np.full(25, 0.3))

    def test_non_finite_samples(self):
        with pytest.raises(InvalidArgumentError):
            fit_nakagami([np.nan] * 30)


class TestPacf(object):
    def test_ar1(self, rng):
        series = ar_series(rng, 20000, 0.6)
        values = pacf(series, 10)
        assert values[0] == 1.0
        assert values[1] == pytest.approx(0.6, abs=0.03)
        assert np.all(np.abs(values[2:]) < 0.05)

    def test_shuffling_removes_memory(self, rng):
        series = ar_series(rng, 20000, 0.6)
        values = pacf(rng.permutation(series), 10)
        assert np.all(np.abs(values[1:]) < 0.05)

    def test_length_checks(self, rng):
        with pytest.raises(SeriesTooShortError):
            pacf(rng.random(11), 10)
        with pytest.raises(DegenerateSampleError):
            pacf(np.ones(50), 5)
        with pytest.raises(InvalidArgumentError):
            pacf(rng.random(50), 0)

    def test_confidence_band(self):
        assert confidence_band(400) == pytest.approx(0.1)


class TestDriftReport(object):
    def test_stationary_stream(self, rng):
        report = windowed_drift_report(nakagami_stream(rng, 200, 500), 20)
        assert report.n_windows == 10
        assert len(report.jsd_series) == 9
        assert report.max_ksd < 0.05
        assert report.mean_jsd < 0.02
        assert len(report.pacf) == 21
        for row in report.pdf_series:
            assert row.sum() == pytest.approx(1.0)

    def test_a_switch_shows_up_in_the_jsd(self, rng):
        before = np.sqrt(rng.gamma(1.0, 1.0, (100, 500)))
        after = np.sqrt(rng.gamma(5.0, 4.0 / 5.0, (100, 500)))
        report = windowed_drift_report(np.vstack([before, after]), 20)
        assert int(np.argmax(report.jsd_series)) == 4
        assert report.jsd_series[4] > 0.1

    def test_db_scale_sees_a_shift_under_a_strong_tile(self, rng):
        matrix = 10.0 ** rng.normal(-6.0, 0.5, (40, 100))
        matrix[20:] = 10.0 ** rng.normal(-5.0, 0.5, (20, 100))
        matrix[:, 0] = 1.0
        linear = windowed_drift_report(matrix, 20, scale='linear')
        db = windowed_drift_report(matrix, 20)
        assert linear.jsd_series[0] < 0.01
        assert db.jsd_series[0] > 0.2
        assert db.scale == 'db' and db._json['scale'] == 'db'
        assert db.pdf_edges[-1] == pytest.approx(0.0)

    def test_empty_windows_stand_apart_in_db(self, rng):
        matrix = np.zeros((40, 100))
        matrix[20:] = 10.0 ** rng.normal(-6.0, 0.5, (20, 100))
        matrix[20:, 0] = 1.0
        linear = windowed_drift_report(matrix, 20, scale='linear')
        db = windowed_drift_report(matrix, 20)
        assert linear.jsd_series[0] < 0.02
        assert db.jsd_series[0] > 0.95

    def test_unknown_scale(self, rng):
        with pytest.raises(InvalidArgumentError):
            windowed_drift_report(nakagami_stream(rng, 40, 10), 20,
                                  scale='log')

    def test_to_db_floors_outages(self):
        low, high = to_db([np.array([0.0, 1e-3]), np.array([1.0])])
        assert low.tolist() == pytest.approx([-40.0, -30.0])
        assert high.tolist() == [0.0]
        assert to_db([np.zeros(3)])[0].tolist() == [0.0, 0.0, 0.0]

    def test_order_within_windows_only_moves_the_pacf(self, rng):
        matrix = np.exp(0.3 * np.column_stack(
            [ar_series(rng, 1000, 0.5) for _ in range(50)]))
        shuffled = matrix.copy()
        for start in range(0, 1000, 20):
            shuffled[start:start + 20] = rng.permutation(
                matrix[start:start + 20])
        report = windowed_drift_report(matrix, 20, pacf_tile=0)
        again = windowed_drift_report(shuffled, 20, pacf_tile=0)
        assert again.jsd_series == pytest.approx(report.jsd_series)
        assert again.ksd_series == pytest.approx(report.ksd_series)
        assert [f.m for f in again.fits] == \
            pytest.approx([f.m for f in report.fits])
        assert again.pacf[1] < report.pacf[1] - 0.2

    def test_trailing_partial_window_is_dropped(self, rng):
        report = windowed_drift_report(nakagami_stream(rng, 59, 100), 20)
        assert report.n_windows == 2

    def test_stride_and_length(self, rng):
        stream = nakagami_stream(rng, 30, 100)
        with pytest.raises(InvalidArgumentError):
            windowed_drift_report(stream, 7)
        with pytest.raises(StreamTooShortError):
            windowed_drift_report(stream, 20)

    def test_outage_samples_can_be_left_out(self, rng):
        matrix = _nakagami(rng, 1.0, 1.0, (100, 200))
        matrix[:, :100] = 0.0
        kept = windowed_drift_report(matrix, 20, threshold=1e-6)
        dropped = windowed_drift_report(matrix, 20, threshold=1e-6,
                                        include_outage=False)
        assert kept.fits[0].n_samples == 4000
        assert dropped.fits[0].n_samples == 2000
        assert dropped.max_ksd < kept.max_ksd

    def test_degenerate_windows_have_no_fit(self):
        report = windowed_drift_report(np.zeros((40, 30)), 20)
        assert report.fits == [None, None]
        assert report.max_ksd is None
        assert report.pacf is None

    def test_pacf_tile(self, rng):
        matrix = _nakagami(rng, 1.0, 1.0, (100, 10))
        matrix[:, 3] += 5.0
        assert windowed_drift_report(matrix, 20).pacf_tile == 3
        assert windowed_drift_report(matrix, 20, pacf_tile=7).pacf_tile == 7

    def test_alive_pacf_needs_alive_rates(self, rng):
        stream = GainStream.from_array(_nakagami(rng, 1.0, 1.0, (100, 10)))
        with pytest.raises(InvalidArgumentError):
            windowed_drift_report(stream, 20, pacf_series='alive')


class TestSurvival(object):
    def test_accumulator(self):
        acc = SurvivalAccumulator('S1', 3)
        with pytest.raises(EmptyInputError):
            acc.field()
        acc.add([True, False, True])
        acc.add([[True, False, False], [True, True, False]])
        field = acc.field()
        assert field.n_samples == 3
        assert field.rates.tolist() == pytest.approx([1.0, 1 / 3.0, 1 / 3.0])

    def test_survival_field_over_a_window(self):
        fields = [GainField(t, 'AP0', 'U0', 'S1', gains, 1.0) for t, gains in
                  enumerate([[2.0, 0.0], [2.0, 2.0], [0.0, 2.0]])]
        assert survival_field(fields).rates.tolist() == \
            pytest.approx([2 / 3.0, 2 / 3.0])
        assert survival_field(fields, (1, 3)).rates.tolist() == [0.5, 1.0]
        with pytest.raises(EmptyInputError):
            survival_field(fields, (3, 3))

    def test_shadow_fraction(self):
        a = TileMask('S2', [True, False, False, False])
        b = TileMask('S2', [False, True, False, False])
        assert shadow_fraction(a) == 0.25
        assert shadow_fraction(union_masks([a, b])) == 0.5
        with pytest.raises(EmptyInputError):
            shadow_fraction([])
        with pytest.raises(EmptyInputError):
            union_masks([])

    def test_wall_symmetry(self):
        def field(value):
            return mock.Mock(mean=value)
        summary = mock.Mock()
        summary.survival = {'S3': field(0.5), 'S4': field(0.25)}
        summary.phase_survival = {'wandering': {'S3': field(0.4),
                                                'S4': field(0.5)}}
        result = wall_symmetry(summary)
        assert result['all'] == pytest.approx(0.25)
        assert result['wandering'] == pytest.approx(0.1)
