"""Stochastic kernel: marked Poisson streams, epoch schedules, RNG substreams."""

from mlbgg.kernel.rng import StreamPurpose, substream
from mlbgg.kernel.stochastic import (
    accumulate_on_epochs,
    observation_epochs,
    sample_marked_poisson,
)

__all__ = [
    "StreamPurpose",
    "substream",
    "accumulate_on_epochs",
    "observation_epochs",
    "sample_marked_poisson",
]
