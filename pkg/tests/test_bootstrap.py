import numpy as np
import pytest

from mate.errors import ValidationError
from mate.evaluate import paired_bootstrap_ci


def test_all_zero_differences_give_degenerate_interval():
    result = paired_bootstrap_ci([3.0] * 10, [3.0] * 10, n_resamples=500, seed=1)
    assert result.mean_diff == 0.0
    assert result.ci_low == 0.0
    assert result.ci_high == 0.0


def test_constant_shift_gives_point_interval():
    before = [1.0, 2.0, 3.0, 4.0]
    after = [x + 0.5 for x in before]
    result = paired_bootstrap_ci(before, after, n_resamples=500, seed=1)
    assert result.mean_diff == pytest.approx(0.5)
    assert result.ci_low == pytest.approx(0.5)
    assert result.ci_high == pytest.approx(0.5)


def test_seeded_runs_are_identical():
    rng = np.random.default_rng(42)
    before = rng.normal(3.0, 1.0, size=48).tolist()
    after = (np.asarray(before) + rng.normal(0.8, 0.5, size=48)).tolist()
    a = paired_bootstrap_ci(before, after, n_resamples=2000, seed=7)
    b = paired_bootstrap_ci(before, after, n_resamples=2000, seed=7)
    assert a == b
    c = paired_bootstrap_ci(before, after, n_resamples=2000, seed=8)
    assert (a.ci_low, a.ci_high) != (c.ci_low, c.ci_high)


def test_interval_brackets_the_mean_difference():
    rng = np.random.default_rng(0)
    before = rng.normal(2.0, 1.0, size=48)
    after = before + rng.normal(1.0, 0.3, size=48)
    result = paired_bootstrap_ci(before.tolist(), after.tolist(), seed=3)
    assert result.ci_low <= result.mean_diff <= result.ci_high
    assert result.ci_low > 0.0  # a clear positive shift excludes zero


def test_wider_level_gives_wider_interval():
    rng = np.random.default_rng(5)
    before = rng.normal(0.0, 1.0, size=30)
    after = before + rng.normal(0.2, 1.0, size=30)
    narrow = paired_bootstrap_ci(before.tolist(), after.tolist(), level=0.8, seed=2)
    wide = paired_bootstrap_ci(before.tolist(), after.tolist(), level=0.99, seed=2)
    assert wide.ci_high - wide.ci_low >= narrow.ci_high - narrow.ci_low


def test_validation_errors():
    with pytest.raises(ValidationError):
        paired_bootstrap_ci([1.0], [1.0, 2.0])
    with pytest.raises(ValidationError):
        paired_bootstrap_ci([1.0], [1.0])
    with pytest.raises(ValidationError):
        paired_bootstrap_ci([1.0, 2.0], [1.0, 2.0], level=1.0)
    with pytest.raises(ValidationError):
        paired_bootstrap_ci([1.0, 2.0], [1.0, 2.0], n_resamples=0)


def test_as_dict_shape():
    result = paired_bootstrap_ci([1.0, 2.0], [2.0, 3.0], n_resamples=100, seed=0)
    assert set(result.as_dict()) == {
        "mean_diff",
        "ci_low",
        "ci_high",
        "n_resamples",
        "level",
    }
