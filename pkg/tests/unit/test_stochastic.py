"""Tests for marked Poisson streams, schedules and substreams."""

import numpy as np
import pytest
from pydantic import ValidationError

from mlbgg.core.exceptions import CoverageError, ParameterError
from mlbgg.core.models import MarkDistribution, MarkedEventStream
from mlbgg.kernel.rng import StreamPurpose, substream
from mlbgg.kernel.stochastic import accumulate_on_epochs, observation_epochs, sample_marked_poisson


def _stream(times, marks, horizon=10.0):
    return MarkedEventStream(times=times, marks=marks, intensity=1.0, horizon=horizon)


class TestSampleMarkedPoisson:
    def test_times_sorted_inside_window(self):
        stream = sample_marked_poisson(3.0, MarkDistribution(), 50.0, np.random.default_rng(1))

        assert np.all(np.diff(stream.times) > 0)
        assert stream.times[0] > 0.0
        assert stream.times[-1] <= 50.0
        assert np.all(stream.marks == 1)

    def test_count_matches_intensity(self):
        stream = sample_marked_poisson(50.0, MarkDistribution(), 100.0, np.random.default_rng(2))

        # Poisson(5000): standard deviation about 71
        assert abs(len(stream) - 5000) < 5 * 71

    def test_count_mean_and_variance_over_replications(self):
        rng = np.random.default_rng(21)
        n, expected = 100_000, 2.0 * 3.0

        counts = np.array(
            [len(sample_marked_poisson(2.0, MarkDistribution(), 3.0, rng)) for _ in range(n)]
        )

        # Poisson(6): Var(count) = 6, Var(sample variance) ~ (mu4 - 36) / n = 78 / n
        assert abs(counts.mean() - expected) <= 3 * np.sqrt(expected / n)
        assert abs(counts.var(ddof=1) - expected) <= 3 * np.sqrt(78.0 / n)

    def test_poisson_marks(self):
        marks = MarkDistribution(kind="poisson", mean=3.0)
        stream = sample_marked_poisson(10.0, marks, 100.0, np.random.default_rng(5))

        assert stream.marks.mean() == pytest.approx(3.0, abs=0.3)

    def test_geometric_marks_start_at_one(self):
        marks = MarkDistribution(kind="geometric", p=0.5)
        stream = sample_marked_poisson(10.0, marks, 50.0, np.random.default_rng(6))

        assert stream.marks.min() >= 1

    @pytest.mark.parametrize("intensity, horizon", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0)])
    def test_rejects_nonpositive(self, intensity, horizon):
        with pytest.raises(ParameterError):
            sample_marked_poisson(intensity, MarkDistribution(), horizon, np.random.default_rng(0))


class TestMarkDistribution:
    def test_poisson_requires_mean(self):
        with pytest.raises(ValidationError):
            MarkDistribution(kind="poisson")

    def test_geometric_requires_p(self):
        with pytest.raises(ValidationError):
            MarkDistribution(kind="geometric")

    def test_unknown_key_rejected(self):
        with pytest.raises(ValidationError):
            MarkDistribution(kind="unit", scale=2.0)


class TestMarkedEventStream:
    def test_rejects_unsorted_times(self):
        with pytest.raises(ValidationError):
            _stream([2.0, 1.0], [1, 1])

    def test_rejects_time_past_horizon(self):
        with pytest.raises(ValidationError):
            _stream([1.0, 11.0], [1, 1])

    def test_rejects_negative_marks(self):
        with pytest.raises(ValidationError):
            _stream([1.0], [-1])


class TestSchedule:
    def test_epochs(self):
        schedule = observation_epochs(2.0, 3.0, 4)

        assert schedule.epochs.tolist() == [2.0, 5.0, 8.0, 11.0]
        assert schedule.last == 11.0
        assert schedule.epoch(2) == 8.0
        assert len(schedule) == 4

    @pytest.mark.parametrize("tau0, delta, count", [(0.0, 1.0, 1), (1.0, 0.0, 1), (1.0, 1.0, 0)])
    def test_rejects_bad_grid(self, tau0, delta, count):
        with pytest.raises(ParameterError):
            observation_epochs(tau0, delta, count)


class TestAccumulate:
    def test_marks_summed_up_to_each_epoch(self):
        attacker = _stream([0.5, 1.5, 2.5], [1, 2, 3], horizon=3.0)
        honest = _stream([1.0, 3.0], [1, 1], horizon=3.0)
        schedule = observation_epochs(1.0, 1.0, 3)

        path = accumulate_on_epochs(attacker, honest, schedule, A0=4, H0=0)

        assert path.attacker.tolist() == [5, 7, 10]
        # an event exactly at an epoch counts at that epoch
        assert path.honest.tolist() == [1, 1, 2]

    def test_stream_must_cover_schedule(self):
        short = _stream([0.5], [1], horizon=2.0)
        full = _stream([0.5], [1], horizon=5.0)
        schedule = observation_epochs(1.0, 1.0, 4)

        with pytest.raises(CoverageError):
            accumulate_on_epochs(short, full, schedule, 0, 0)


class TestSubstream:
    def test_same_coordinates_same_draws(self):
        a = substream(11, StreamPurpose.LAYER1_RACE, 2, 5).random(5)
        b = substream(11, StreamPurpose.LAYER1_RACE, 2, 5).random(5)

        assert np.array_equal(a, b)

    def test_coordinates_and_purpose_separate_streams(self):
        base = substream(11, StreamPurpose.LAYER1_RACE, 2, 5).random(5)

        assert not np.array_equal(base, substream(11, StreamPurpose.LAYER1_RACE, 2, 6).random(5))
        assert not np.array_equal(base, substream(11, StreamPurpose.LAYER1_BACKUP, 2, 5).random(5))
        assert not np.array_equal(base, substream(12, StreamPurpose.LAYER1_RACE, 2, 5).random(5))
