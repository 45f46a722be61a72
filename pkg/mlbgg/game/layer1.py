"""
Layer-1 BGG networks: race simulation, bursting probabilities and backup supply.

Under Action the defender acts at the decision epoch tau_{nu-1} by releasing B
backup nodes, so the attacker bursts the network only if its count at the exit
epoch reaches T_A + B. A network already over the bar at epoch 0 cannot be
protected. All strategies and all B values are judged on the same sampled race,
which keeps sweeps over B on common random numbers.
"""

from collections import defaultdict
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import structlog
from pydantic import Field

from mlbgg.core.exceptions import EmptyInputError, ParameterError
from mlbgg.core.models import (
    BackupAllocation,
    BurstEstimate,
    GamePath,
    Layer1NetworkConfig,
    Layer1TrialRecord,
    ObservationSchedule,
    Strategy,
    ThresholdRule,
    Winner,
    _ArrayModel,
)
from mlbgg.core.statistics import rate, summarize
from mlbgg.game.exit_game import adjudicate
from mlbgg.kernel.rng import StreamPurpose, substream
from mlbgg.kernel.stochastic import accumulate_on_epochs, observation_epochs, sample_marked_poisson

logger = structlog.get_logger(__name__)

BackupSpec = Union[int, BackupAllocation]


def network_schedule(cfg: Layer1NetworkConfig, rule: ThresholdRule) -> ObservationSchedule:
    return observation_epochs(cfg.tau0, cfg.spacing, cfg.epoch_count(rule))


def sample_race(
    cfg: Layer1NetworkConfig, rule: ThresholdRule, rng: np.random.Generator
) -> Tuple[GamePath, ObservationSchedule]:
    """Sample attacker then honest stream from ``rng`` and accumulate them on the schedule."""
    schedule = network_schedule(cfg, rule)
    attacker = sample_marked_poisson(cfg.lambda_attacker, cfg.attacker_marks, schedule.last, rng)
    honest = sample_marked_poisson(cfg.lambda_honest, cfg.honest_marks, schedule.last, rng)
    path = accumulate_on_epochs(
        attacker, honest, schedule, cfg.initial_attacker, cfg.initial_honest
    )
    return path, schedule


def judge_race(
    path: GamePath,
    schedule: ObservationSchedule,
    cfg: Layer1NetworkConfig,
    rule: ThresholdRule,
    strategy: Strategy,
    B: int = 0,
    network: int = 0,
    trial: int = 0,
) -> Layer1TrialRecord:
    """
    Adjudicate a sampled race under one strategy.

    Raises:
        ParameterError: If B is negative
    """
    if B < 0:
        raise ParameterError("backup count must be nonnegative", details={"B": B})

    threshold = cfg.threshold(rule)
    acting = strategy is Strategy.ACTION
    outcome = adjudicate(
        path.attacker,
        path.honest,
        threshold,
        threshold,
        B if acting else None,
        schedule,
    )

    # A_nu >= T_A + B at the exit epoch, or compromised before any decision epoch
    overwhelms = outcome.nu == 0 or (
        outcome.a_at is not None
        and outcome.a_at >= threshold.attack_threshold + (B if acting else 0)
    )
    burst = outcome.winner is Winner.ATTACKER and overwhelms
    if outcome.winner is Winner.ATTACKER and not burst:
        outcome = outcome.model_copy(update={"winner": Winner.DEFENDED, "burst": False})

    return Layer1TrialRecord(
        network=network,
        trial=trial,
        outcome=outcome,
        strategy=strategy,
        backup=B if acting else 0,
        honest_won=outcome.mu is not None and (outcome.nu is None or outcome.mu <= outcome.nu),
        burst=burst,
    )


def simulate_network(
    cfg: Layer1NetworkConfig,
    strategy: Strategy,
    B: int,
    rng: np.random.Generator,
    rule: ThresholdRule = ThresholdRule.GEQ_HALF,
    network: int = 0,
    trial: int = 0,
) -> Layer1TrialRecord:
    """
    Simulate one layer-1 race and judge it under ``strategy`` with B backup nodes.

    Raises:
        ParameterError: If B is negative
    """
    path, schedule = sample_race(cfg, rule, rng)
    return judge_race(path, schedule, cfg, rule, strategy, B, network, trial)


def sample_backup(eta: int, rho1: float, rng: np.random.Generator) -> int:
    """
    Draw B ~ Binomial(eta, rho1).

    Raises:
        ParameterError: If rho1 is outside [0, 1] or eta is negative
    """
    if not 0.0 <= rho1 <= 1.0 or eta < 0:
        raise ParameterError(
            "rho1 must lie in [0, 1] and eta must be nonnegative",
            details={"rho1": rho1, "eta": eta},
        )
    return int(rng.binomial(eta, rho1))


def realize_backup(B: BackupSpec, seed: int, network: int, trial: int) -> int:
    """Fixed B, or a Binomial draw from the (network, trial) backup substream."""
    if isinstance(B, BackupAllocation):
        rng = substream(seed, StreamPurpose.LAYER1_BACKUP, network, trial)
        return sample_backup(B.eta, B.rho1, rng)
    return B


def bursting_probability(
    cfg: Layer1NetworkConfig,
    strategy: Strategy,
    B: BackupSpec,
    n_trials: int,
    seed: int,
    rule: ThresholdRule = ThresholdRule.GEQ_HALF,
    network: int = 0,
) -> BurstEstimate:
    """
    Monte Carlo bursting probability q(B) of one network.

    A random BackupAllocation is realized per trial from its own substream, so the
    race itself is identical to the DoNothing race of the same (seed, network, trial).

    Raises:
        ParameterError: If n_trials < 1
    """
    if n_trials < 1:
        raise ParameterError("n_trials must be at least 1", details={"n_trials": n_trials})

    records = [
        simulate_network(
            cfg,
            strategy,
            realize_backup(B, seed, network, trial),
            substream(seed, StreamPurpose.LAYER1_RACE, network, trial),
            rule,
            network,
            trial,
        )
        for trial in range(n_trials)
    ]
    return summarize_bursts(records)


def summarize_bursts(records: Sequence[Layer1TrialRecord]) -> BurstEstimate:
    """Burst rate with its interval and the censor rate of the records."""
    if not records:
        raise EmptyInputError("no layer-1 records to summarize")
    bursts = np.array([r.burst for r in records], dtype=bool)
    censored = np.array([r.outcome.censored for r in records], dtype=bool)
    return BurstEstimate(
        estimate=summarize(bursts, bounds=(0.0, 1.0)),
        censor_rate=rate(censored),
        n_trials=len(records),
    )


def estimate_rho1(records: Sequence[Layer1TrialRecord]) -> float:
    """
    Honest-win rate averaged over networks: (1 / (eta + 1)) * sum_k P{honest wins network k}.

    Records are grouped by their ``network`` field; censored races count as
    not won by the honest side.

    Raises:
        EmptyInputError: If no records are given
    """
    if not records:
        raise EmptyInputError("estimate_rho1 needs at least one record")

    per_network: Dict[int, List[bool]] = defaultdict(list)
    for record in records:
        per_network[record.network].append(record.honest_won)

    return float(np.mean([np.mean(wins) for wins in per_network.values()]))


class NetworkRaces(_ArrayModel):
    """Per-trial race summary of one network, for vectorized sweeps over B."""

    network: int = Field(..., ge=0)
    threshold: int = Field(..., description="T_A of the network", ge=1)
    nu: np.ndarray = Field(..., description="Attacker exit index, -1 when never reached")
    mu: np.ndarray = Field(..., description="Honest exit index, -1 when never reached")
    a_at: np.ndarray = Field(..., description="A_nu, -1 when nu is missing")
    a_prev: np.ndarray = Field(..., description="A_{nu-1}, -1 when nu < 1")
    tau_prev: np.ndarray = Field(..., description="tau_{nu-1}, nan when nu < 1")

    @classmethod
    def from_records(
        cls, records: Sequence[Layer1TrialRecord], threshold: int
    ) -> "NetworkRaces":
        """Collect DoNothing records of one network (trial order preserved)."""
        if not records:
            raise EmptyInputError("no records to collect")

        def col(attr: str, missing: float, dtype: type) -> np.ndarray:
            values = [getattr(r.outcome, attr) for r in records]
            return np.array([missing if v is None else v for v in values], dtype=dtype)

        return cls(
            network=records[0].network,
            threshold=threshold,
            nu=col("nu", -1, np.int64),
            mu=col("mu", -1, np.int64),
            a_at=col("a_at", -1, np.int64),
            a_prev=col("a_prev", -1, np.int64),
            tau_prev=col("tau_nu_minus_1", np.nan, np.float64),
        )

    @property
    def n_trials(self) -> int:
        return int(self.nu.size)

    @property
    def attacker_wins(self) -> np.ndarray:
        return (self.nu >= 0) & ((self.mu < 0) | (self.nu < self.mu))

    @property
    def honest_wins(self) -> np.ndarray:
        return (self.mu >= 0) & ((self.nu < 0) | (self.mu <= self.nu))

    @property
    def censored(self) -> np.ndarray:
        return (self.nu < 0) & (self.mu < 0)

    @property
    def acts(self) -> np.ndarray:
        """1{A_{nu-1} < T_A}: a decision epoch exists (nu >= 1)."""
        return self.nu >= 1

    def bursts(self, strategy: Strategy, B: Union[int, np.ndarray] = 0) -> np.ndarray:
        """Per-trial burst indicators; B may be a scalar or one value per trial."""
        if strategy is Strategy.DO_NOTHING:
            return self.attacker_wins
        bar = self.threshold + np.asarray(B, dtype=np.int64)
        return self.attacker_wins & ((self.nu == 0) | (self.a_at >= bar))


def collect_races(
    cfg: Layer1NetworkConfig,
    n_trials: int,
    seed: int,
    rule: ThresholdRule,
    network: int = 0,
) -> Tuple[List[Layer1TrialRecord], NetworkRaces]:
    """Simulate ``n_trials`` DoNothing races of one network on its race substreams."""
    records = [
        simulate_network(
            cfg,
            Strategy.DO_NOTHING,
            0,
            substream(seed, StreamPurpose.LAYER1_RACE, network, trial),
            rule,
            network,
            trial,
        )
        for trial in range(n_trials)
    ]
    races = NetworkRaces.from_records(records, cfg.threshold(rule).attack_threshold)
    logger.debug(
        "layer1.network.collected",
        network=network,
        trials=n_trials,
        attacker_win_rate=rate(races.attacker_wins),
        censor_rate=rate(races.censored),
    )
    return records, races


def rho1_from_races(races: Sequence[NetworkRaces]) -> float:
    """estimate_rho1 on vectorized race summaries."""
    if not races:
        raise EmptyInputError("no networks to average over")
    return float(np.mean([races_k.honest_wins.mean() for races_k in races]))


def pmf_a_prev(records: Sequence[Layer1TrialRecord], k: int) -> float:
    """
    Empirical P{A_{nu-1} = k} over trials with a decision epoch.

    Raises:
        ParameterError: If k is negative
        EmptyInputError: If no trial has nu >= 1
    """
    if k < 0:
        raise ParameterError("k must be nonnegative", details={"k": k})
    prev = [r.outcome.a_prev for r in records if r.outcome.a_prev is not None]
    if not prev:
        raise EmptyInputError("no trial has a decision epoch")
    return float(np.mean(np.asarray(prev) == k))


def p_a_prev(records: Sequence[Layer1TrialRecord], threshold: int) -> float:
    """p_{A-1} = P{A_{nu-1} < T_A} over all trials (no decision epoch counts as a miss)."""
    if not records:
        raise EmptyInputError("p_a_prev needs at least one record")
    return float(
        np.mean([r.outcome.a_prev is not None and r.outcome.a_prev < threshold for r in records])
    )
