"""
Estimators shared by the layers, the optimizer and the report.

Means with standard errors and 95% normal-approximation intervals, plus a delta
method for smooth functions of several means (the cost formulas multiply
expectations).
"""

from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from mlbgg.core.exceptions import EmptyInputError
from mlbgg.core.models import Estimate

Z95 = float(norm.ppf(0.975))


def summarize(
    samples: Sequence[float] | np.ndarray,
    bounds: Optional[Tuple[float, float]] = None,
    degenerate: bool = False,
) -> Estimate:
    """
    Mean, standard error and 95% interval of i.i.d. samples.

    Args:
        samples: Per-trial values (indicators, exit indices, epochs)
        bounds: Optional (low, high) clamp for the interval, e.g. (0, 1) for rates
        degenerate: Flag the estimate even if its interval has width, for pooled
            samples with a single trial per group

    Returns:
        Estimate; ``degenerate`` is set when the interval has zero width

    Raises:
        EmptyInputError: If there are no samples
    """
    arr = np.asarray(samples, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInputError("cannot summarize an empty sample")

    n = int(arr.size)
    mean = float(np.mean(arr))
    stderr = float(np.std(arr, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    low, high = mean - Z95 * stderr, mean + Z95 * stderr
    if bounds is not None:
        low, high = max(low, bounds[0]), min(high, bounds[1])

    return Estimate(
        mean=mean,
        stderr=stderr,
        ci_low=min(low, mean),
        ci_high=max(high, mean),
        n=n,
        degenerate=degenerate or stderr == 0.0,
    )


def rate(flags: Sequence[bool] | np.ndarray) -> float:
    """Fraction of True flags; 0.0 for an empty input."""
    arr = np.asarray(flags, dtype=bool)
    return float(arr.mean()) if arr.size else 0.0


def delta_method_stderr(gradient: Sequence[float], samples: np.ndarray) -> float:
    """
    Standard error of f(mean_1, ..., mean_p) by the delta method.

    Args:
        gradient: Partial derivatives of f at the sample means
        samples: Array of shape (p, n), one row of per-trial values per mean

    Returns:
        sqrt(g' Cov g / n); 0.0 with fewer than two trials
    """
    data = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    n = data.shape[1]
    if n < 2:
        return 0.0
    g = np.asarray(gradient, dtype=np.float64)
    cov = np.atleast_2d(np.cov(data, ddof=1))
    variance = float(g @ cov @ g) / n
    return float(np.sqrt(max(variance, 0.0)))
