"""
Counter-derived random substreams.

Every stochastic draw in a run comes from a generator seeded by
``SeedSequence([root_seed, purpose, *indices])``: the root seed, a fixed purpose
code and the integer coordinates of the draw (network, trial). Substreams are
therefore independent of execution order and worker count, and the same
coordinates always give the same stream, which is what couples sweeps over B and
alpha onto common random numbers.
"""

from enum import IntEnum

import numpy as np


class StreamPurpose(IntEnum):
    """Purpose codes; never renumber, existing seeds depend on them."""

    LAYER1_RACE = 1
    LAYER1_BACKUP = 2
    LAYER0_RACE = 3
    SELFTEST = 4


def substream(root_seed: int, purpose: StreamPurpose, *indices: int) -> np.random.Generator:
    """
    Return the generator for one (purpose, indices) coordinate.

    Args:
        root_seed: Run-level seed (unsigned 64-bit)
        purpose: Stream purpose code
        *indices: Nonnegative coordinates, e.g. (network, trial)

    Returns:
        A freshly seeded numpy Generator
    """
    entropy = [int(root_seed), int(purpose), *(int(i) for i in indices)]
    return np.random.default_rng(np.random.SeedSequence(entropy))
