"""Paired bootstrap confidence intervals for before/after comparisons."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class BootstrapResult:
    mean_diff: float
    ci_low: float
    ci_high: float
    n_resamples: int
    level: float

    def as_dict(self) -> dict:
        return {
            "mean_diff": self.mean_diff,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "n_resamples": self.n_resamples,
            "level": self.level,
        }


def paired_bootstrap_ci(
    before: list[float],
    after: list[float],
    n_resamples: int = 10000,
    level: float = 0.95,
    seed: int = 0,
) -> BootstrapResult:
    """Percentile CI on the mean of pairwise differences (after - before)."""
    if len(before) != len(after):
        raise ValidationError(
            f"before/after length mismatch: {len(before)} vs {len(after)}"
        )
    if len(before) < 2:
        raise ValidationError("paired bootstrap requires at least 2 pairs")
    if not (0.0 < level < 1.0):
        raise ValidationError("level must be in (0, 1)")
    if n_resamples < 1:
        raise ValidationError("n_resamples must be positive")
    diffs = np.asarray(after, dtype=float) - np.asarray(before, dtype=float)
    rng = np.random.default_rng(seed)
    indices = rng.integers(0, len(diffs), size=(n_resamples, len(diffs)))
    means = diffs[indices].mean(axis=1)
    alpha = (1.0 - level) / 2.0
    low, high = np.percentile(means, [100.0 * alpha, 100.0 * (1.0 - alpha)])
    return BootstrapResult(
        mean_diff=float(diffs.mean()),
        ci_low=float(low),
        ci_high=float(high),
        n_resamples=n_resamples,
        level=level,
    )
