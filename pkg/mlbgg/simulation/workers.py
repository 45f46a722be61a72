"""
Per-network fan-out of layer-1 trials.

Each task covers every trial of one network and draws from that network's own
substreams, so results do not depend on the worker count. ``Pool.map`` returns
results in task order, which keeps the merge deterministic.
"""

from multiprocessing import Pool
from typing import List, Sequence, Tuple

from mlbgg.core.models import (
    BackupAllocation,
    Layer1NetworkConfig,
    Layer1TrialRecord,
    Strategy,
    ThresholdRule,
)
from mlbgg.game.layer1 import NetworkRaces, collect_races, realize_backup, simulate_network
from mlbgg.kernel.rng import StreamPurpose, substream

RaceTask = Tuple[Layer1NetworkConfig, int, int, ThresholdRule, int]
ActionTask = Tuple[Layer1NetworkConfig, int, int, ThresholdRule, int, BackupAllocation]


def _race_task(task: RaceTask) -> Tuple[List[Layer1TrialRecord], NetworkRaces]:
    cfg, n_trials, seed, rule, network = task
    return collect_races(cfg, n_trials, seed, rule, network)


def _action_task(task: ActionTask) -> List[Layer1TrialRecord]:
    cfg, n_trials, seed, rule, network, allocation = task
    return [
        simulate_network(
            cfg,
            Strategy.ACTION,
            realize_backup(allocation, seed, network, trial),
            substream(seed, StreamPurpose.LAYER1_RACE, network, trial),
            rule,
            network,
            trial,
        )
        for trial in range(n_trials)
    ]


def _fan_out(fn, tasks: Sequence, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with Pool(processes=min(workers, len(tasks))) as pool:
        return pool.map(fn, tasks)


def collect_layer1(
    networks: Sequence[Layer1NetworkConfig],
    n_trials: int,
    seed: int,
    rule: ThresholdRule,
    workers: int = 1,
) -> List[Tuple[List[Layer1TrialRecord], NetworkRaces]]:
    """DoNothing races of every network, in network order."""
    tasks = [(cfg, n_trials, seed, rule, k) for k, cfg in enumerate(networks)]
    return _fan_out(_race_task, tasks, workers)


def simulate_layer1_action(
    networks: Sequence[Layer1NetworkConfig],
    n_trials: int,
    seed: int,
    rule: ThresholdRule,
    allocation: BackupAllocation,
    workers: int = 1,
) -> List[List[Layer1TrialRecord]]:
    """Action records of every network, backups drawn per (network, trial)."""
    tasks = [(cfg, n_trials, seed, rule, k, allocation) for k, cfg in enumerate(networks)]
    return _fan_out(_action_task, tasks, workers)
