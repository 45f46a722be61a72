"""
Marked Poisson event streams and proof-of-work observation schedules.

The game is only inspected at observation epochs; captures between epochs are
accumulated onto the next epoch.
"""

import math

import numpy as np

from mlbgg.core.exceptions import CoverageError, ParameterError
from mlbgg.core.models import GamePath, MarkDistribution, MarkedEventStream, ObservationSchedule


def sample_marked_poisson(
    intensity: float,
    marks: MarkDistribution,
    horizon: float,
    rng: np.random.Generator,
) -> MarkedEventStream:
    """
    Sample a marked Poisson stream on (0, horizon].

    Inter-arrival times are i.i.d. exponential(intensity); each event carries an
    independent mark. Gaps are drawn in batches sized from the expected count.

    Args:
        intensity: Events per unit time
        marks: Mark law
        horizon: Window end
        rng: Seeded generator (consumed)

    Returns:
        MarkedEventStream

    Raises:
        ParameterError: If intensity or horizon is not positive
    """
    if not intensity > 0.0 or not horizon > 0.0:
        raise ParameterError(
            "intensity and horizon must be positive",
            details={"intensity": intensity, "horizon": horizon},
        )

    expected = intensity * horizon
    batch = int(expected + 6.0 * math.sqrt(expected) + 16)
    scale = 1.0 / intensity

    times = np.cumsum(rng.exponential(scale, size=batch))
    while times[-1] <= horizon:
        more = times[-1] + np.cumsum(rng.exponential(scale, size=batch))
        times = np.concatenate([times, more])
    times = times[: int(np.searchsorted(times, horizon, side="right"))]

    return MarkedEventStream(
        times=times,
        marks=marks.sample(rng, times.size),
        intensity=intensity,
        horizon=horizon,
    )


def observation_epochs(tau0: float, delta: float, count: int) -> ObservationSchedule:
    """
    Build the arithmetic epoch grid tau_k = tau0 + k * delta, k = 0..count-1.

    Raises:
        ParameterError: On nonpositive inputs
    """
    if not tau0 > 0.0 or not delta > 0.0 or count < 1:
        raise ParameterError(
            "tau0 and delta must be positive and count at least 1",
            details={"tau0": tau0, "delta": delta, "count": count},
        )
    return ObservationSchedule(tau0=tau0, spacing=delta, count=count)


def accumulate_on_epochs(
    attacker: MarkedEventStream,
    honest: MarkedEventStream,
    schedule: ObservationSchedule,
    A0: int,
    H0: int,
) -> GamePath:
    """
    Sum marks onto the schedule: A_k = A0 + sum of attacker marks with time <= tau_k.

    Raises:
        CoverageError: If either stream ends before the last epoch
    """
    last = schedule.last
    for side, stream in (("attacker", attacker), ("honest", honest)):
        if stream.horizon < last:
            raise CoverageError(
                f"{side} stream horizon {stream.horizon} ends before last epoch {last}",
                details={"side": side, "horizon": stream.horizon, "last_epoch": last},
            )

    epochs = schedule.epochs
    return GamePath(
        attacker=A0 + _prefix_at(attacker, epochs),
        honest=H0 + _prefix_at(honest, epochs),
        initial_attacker=A0,
        initial_honest=H0,
    )


def _prefix_at(stream: MarkedEventStream, epochs: np.ndarray) -> np.ndarray:
    prefix = np.concatenate(([0], np.cumsum(stream.marks, dtype=np.int64)))
    return prefix[np.searchsorted(stream.times, epochs, side="right")]
