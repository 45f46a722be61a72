"""Tests for estimators and standard errors."""

import math

import numpy as np
import pytest

from mlbgg.core.exceptions import EmptyInputError
from mlbgg.core.statistics import Z95, delta_method_stderr, rate, summarize


def test_summarize_indicators():
    estimate = summarize([1, 0, 1, 0])

    assert estimate.mean == 0.5
    assert estimate.stderr == pytest.approx(math.sqrt(1.0 / 3.0) / 2.0)
    assert estimate.ci_low == pytest.approx(0.5 - Z95 * estimate.stderr)
    assert estimate.n == 4
    assert not estimate.degenerate


def test_summarize_clamps_to_bounds():
    estimate = summarize([1, 1, 1, 0], bounds=(0.0, 1.0))

    assert estimate.ci_high == 1.0
    assert estimate.ci_low >= 0.0


def test_single_sample_is_degenerate():
    estimate = summarize([3.0])

    assert estimate.stderr == 0.0
    assert estimate.degenerate
    assert estimate.ci_low == estimate.ci_high == 3.0


def test_summarize_empty():
    with pytest.raises(EmptyInputError):
        summarize([])


def test_rate():
    assert rate([True, False, False, False]) == 0.25
    assert rate([]) == 0.0


def test_delta_method_reduces_to_stderr_of_mean():
    samples = np.random.default_rng(0).normal(size=200)

    got = delta_method_stderr([1.0], samples[np.newaxis, :])

    assert got == pytest.approx(summarize(samples).stderr)


def test_delta_method_of_difference():
    rng = np.random.default_rng(1)
    x = rng.normal(size=500)
    y = rng.normal(size=500)

    got = delta_method_stderr([1.0, -1.0], np.vstack([x, y]))

    assert got == pytest.approx(np.std(x - y, ddof=1) / math.sqrt(500))


def test_delta_method_single_trial():
    assert delta_method_stderr([1.0, 2.0], np.array([[1.0], [0.0]])) == 0.0


def test_bernoulli_mean_within_clt_bound():
    flags = np.random.default_rng(3).random(10_000) < 0.5

    estimate = summarize(flags, bounds=(0.0, 1.0))

    assert abs(estimate.mean - 0.5) <= 3 * 0.005
    assert estimate.ci_low <= estimate.mean <= estimate.ci_high


def test_degenerate_flag_can_be_forced():
    estimate = summarize([1, 0, 1, 1], bounds=(0.0, 1.0), degenerate=True)

    assert estimate.stderr > 0.0
    assert estimate.degenerate
