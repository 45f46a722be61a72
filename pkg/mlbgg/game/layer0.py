"""
Layer-0 SABGG network: corrupted-vs-genuine race with an alliance-raised bar.

The DoNothing bar is T = ceil(eta/2). Under Action the alliance raises it either
to ceil(eta(1+alpha)/2) (threshold-scaled) or to max(T, B_eta) with
B_eta ~ Binomial(eta, alpha) (binomial-bar). The binomial bar is drawn as a
quantile of one uniform consumed after the race, so every alpha reuses the same
race and the same uniform, and the bar is monotone in alpha.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import binom, poisson

from mlbgg.core.exceptions import EmptyInputError, ParameterError
from mlbgg.core.models import (
    BurstEstimate,
    GamePath,
    Layer0Config,
    Layer0TrialRecord,
    ObservationSchedule,
    R1Variant,
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


def layer0_schedule(cfg: Layer0Config, rule: ThresholdRule) -> ObservationSchedule:
    return observation_epochs(cfg.tau0, cfg.spacing, cfg.epoch_count(rule))


def binomial_bars(eta: int, alpha: float, uniforms: np.ndarray) -> np.ndarray:
    """Quantiles of Binomial(eta, alpha) at ``uniforms``; alpha is clipped to [0, 1]."""
    u = np.asarray(uniforms, dtype=np.float64)
    if alpha <= 0.0:
        return np.zeros(u.shape, dtype=np.int64)
    if alpha >= 1.0:
        return np.full(u.shape, eta, dtype=np.int64)
    return np.maximum(binom.ppf(u, eta, alpha), 0).astype(np.int64)


def action_bars(
    cfg: Layer0Config,
    rule: ThresholdRule,
    variant: R1Variant,
    alpha: float,
    uniforms: np.ndarray,
) -> np.ndarray:
    """Per-trial corrupted count that bursts the network under Action."""
    base = cfg.threshold(rule).attack_threshold
    u = np.asarray(uniforms, dtype=np.float64)
    if variant is R1Variant.THRESHOLD_SCALED:
        return np.full(u.shape, cfg.threshold(rule, alpha).attack_threshold, dtype=np.int64)
    return np.maximum(base, binomial_bars(cfg.eta, alpha, u))


def sample_layer0_race(
    cfg: Layer0Config, rule: ThresholdRule, rng: np.random.Generator
) -> Tuple[GamePath, ObservationSchedule, float]:
    """Corrupted stream, genuine stream, then the bar uniform, in that order."""
    schedule = layer0_schedule(cfg, rule)
    corrupted = sample_marked_poisson(
        cfg.lambda_corrupted, cfg.corrupted_marks, schedule.last, rng
    )
    genuine = sample_marked_poisson(cfg.lambda_genuine, cfg.genuine_marks, schedule.last, rng)
    path = accumulate_on_epochs(
        corrupted, genuine, schedule, cfg.initial_corrupted, cfg.initial_genuine
    )
    return path, schedule, float(rng.random())


def judge_layer0(
    path: GamePath,
    schedule: ObservationSchedule,
    uniform: float,
    cfg: Layer0Config,
    strategy: Strategy,
    rule: ThresholdRule = ThresholdRule.GEQ_HALF,
    variant: R1Variant = R1Variant.THRESHOLD_SCALED,
    alpha: Optional[float] = None,
    trial: int = 0,
) -> Layer0TrialRecord:
    """Adjudicate one sampled layer-0 race under ``strategy``."""
    alpha = cfg.alpha if alpha is None else alpha
    if alpha < 0.0:
        raise ParameterError("alpha must be non-negative", details={"alpha": alpha})

    threshold = cfg.threshold(rule)
    base = threshold.attack_threshold
    acting = strategy is Strategy.ACTION
    bar = int(action_bars(cfg, rule, variant, alpha, np.array([uniform]))[0]) if acting else base

    outcome = adjudicate(
        path.attacker,
        path.honest,
        threshold,
        threshold,
        bar - base if acting else None,
        schedule,
    )
    overwhelms = outcome.nu == 0 or (outcome.a_at is not None and outcome.a_at >= bar)
    burst = outcome.winner is Winner.ATTACKER and overwhelms
    if outcome.winner is Winner.ATTACKER and not burst:
        outcome = outcome.model_copy(update={"winner": Winner.DEFENDED, "burst": False})

    mu = outcome.mu
    return Layer0TrialRecord(
        trial=trial,
        outcome=outcome,
        strategy=strategy,
        alpha=alpha if acting else 0.0,
        bar=bar,
        t_nu=outcome.tau_nu,
        c_prev=outcome.a_prev,
        c_at=outcome.a_at,
        c_at_mu=None if mu is None else int(path.attacker[mu]),
        t_mu=None if mu is None else schedule.epoch(mu),
        bar_uniform=uniform,
        burst=burst,
    )


def simulate_layer0(
    cfg: Layer0Config,
    strategy: Strategy,
    rng: np.random.Generator,
    rule: ThresholdRule = ThresholdRule.GEQ_HALF,
    variant: R1Variant = R1Variant.THRESHOLD_SCALED,
    alpha: Optional[float] = None,
    trial: int = 0,
) -> Layer0TrialRecord:
    """
    Simulate and judge one layer-0 race.

    Args:
        cfg: Layer-0 network
        strategy: DoNothing (bar T) or Action (alliance bar)
        rng: Seeded generator (consumed)
        rule: Threshold rounding rule
        variant: Alliance bar form
        alpha: Overrides ``cfg.alpha`` when given
        trial: Trial index stored on the record

    Returns:
        Layer0TrialRecord

    Raises:
        ParameterError: If alpha is negative
    """
    path, schedule, uniform = sample_layer0_race(cfg, rule, rng)
    return judge_layer0(path, schedule, uniform, cfg, strategy, rule, variant, alpha, trial)


def layer0_records(
    cfg: Layer0Config,
    strategy: Strategy,
    n_trials: int,
    seed: int,
    rule: ThresholdRule = ThresholdRule.GEQ_HALF,
    variant: R1Variant = R1Variant.THRESHOLD_SCALED,
    alpha: Optional[float] = None,
) -> List[Layer0TrialRecord]:
    """Records of trials 0..n_trials-1, each on its own (trial) substream."""
    if n_trials < 1:
        raise ParameterError("n_trials must be at least 1", details={"n_trials": n_trials})
    return [
        simulate_layer0(
            cfg,
            strategy,
            substream(seed, StreamPurpose.LAYER0_RACE, trial),
            rule,
            variant,
            alpha,
            trial,
        )
        for trial in range(n_trials)
    ]


def bursting_probability_layer0(
    cfg: Layer0Config,
    strategy: Strategy,
    n_trials: int,
    seed: int,
    rule: ThresholdRule = ThresholdRule.GEQ_HALF,
    variant: R1Variant = R1Variant.THRESHOLD_SCALED,
    alpha: Optional[float] = None,
) -> BurstEstimate:
    """
    Monte Carlo r0 (DoNothing) or r1_alpha (Action) with its censor rate.

    With unit corrupted marks the estimate carries the compound-Poisson companion
    value: the mixed-Poisson tail at each trial's bar over the sampled t_nu.

    Raises:
        ParameterError: If n_trials < 1 or alpha is negative
    """
    records = layer0_records(cfg, strategy, n_trials, seed, rule, variant, alpha)
    return summarize_layer0_bursts(records, cfg)


def summarize_layer0_bursts(
    records: Sequence[Layer0TrialRecord], cfg: Layer0Config
) -> BurstEstimate:
    """Burst rate, censor rate and (unit marks only) the compound-Poisson companion."""
    if not records:
        raise EmptyInputError("no layer-0 records to summarize")
    bursts = np.array([r.burst for r in records], dtype=bool)
    censored = np.array([r.outcome.censored for r in records], dtype=bool)

    analytic = None
    if cfg.corrupted_marks.is_unit:
        analytic = analytic_bursting(records, cfg.lambda_corrupted, cfg.initial_corrupted)

    return BurstEstimate(
        estimate=summarize(bursts, bounds=(0.0, 1.0)),
        censor_rate=rate(censored),
        n_trials=len(records),
        analytic_approx=analytic,
    )


def compound_poisson_pmf(k: int, lambda_c: float, t_samples: Sequence[float]) -> float:
    """
    Mixed-Poisson estimate of P{C = k}: mean of Poisson(lambda_c * t).pmf(k) over t samples.

    Raises:
        ParameterError: If k is negative or lambda_c is not positive
        EmptyInputError: If there are no t samples
    """
    if k < 0 or not lambda_c > 0.0:
        raise ParameterError(
            "k must be nonnegative and lambda_c positive",
            details={"k": k, "lambda_c": lambda_c},
        )
    t = np.asarray(t_samples, dtype=np.float64)
    if t.size == 0:
        raise EmptyInputError("compound_poisson_pmf needs at least one t sample")
    return float(np.mean(poisson.pmf(k, lambda_c * t)))


def analytic_bursting(
    records: Sequence[Layer0TrialRecord], lambda_c: float, initial: int = 0
) -> Optional[float]:
    """
    Sum over k >= bar of the mixed-Poisson pmf at the sampled t_nu.

    Trials without a corrupted exit contribute zero. Returns None when no trial
    has an exit.
    """
    eligible = [r for r in records if r.t_nu is not None]
    if not eligible:
        return None
    t = np.array([r.t_nu for r in eligible], dtype=np.float64)
    bars = np.array([r.bar for r in eligible], dtype=np.int64)
    tails = poisson.sf(bars - 1 - initial, lambda_c * t)
    return float(np.sum(tails) / len(records))


def pmf_c_prev(records: Sequence[Layer0TrialRecord], k: int) -> float:
    """
    Empirical P{C_{nu-1} = k} over trials with a decision epoch (nu >= 1).

    Raises:
        ParameterError: If k is negative
        EmptyInputError: If no trial has nu >= 1
    """
    if k < 0:
        raise ParameterError("k must be nonnegative", details={"k": k})
    prev = [r.c_prev for r in records if r.c_prev is not None]
    if not prev:
        raise EmptyInputError("no trial has a decision epoch")
    return float(np.mean(np.asarray(prev) == k))


def c_prev_support(records: Sequence[Layer0TrialRecord]) -> List[int]:
    return sorted({r.c_prev for r in records if r.c_prev is not None})


def p_c_prev(records: Sequence[Layer0TrialRecord], bar: int) -> float:
    """
    p_{c-1} = P{C_{nu-1} < bar} over all trials.

    Trials without a decision epoch count in the denominator only, so this is
    (eligible / total) * sum_{k < bar} pmf_c_prev(k).

    Raises:
        EmptyInputError: If there are no records
    """
    if not records:
        raise EmptyInputError("p_c_prev needs at least one record")
    hits = [r.c_prev is not None and r.c_prev < bar for r in records]
    return float(np.mean(hits))


class CrossCheckRow(BaseModel):
    """Empirical vs mixed-Poisson probability of the corrupted count at the genuine exit t_mu."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=0)
    empirical: float = Field(..., ge=0.0, le=1.0)
    stderr: float = Field(..., ge=0.0)
    mixed_poisson: float = Field(..., ge=0.0, le=1.0)
    within_3se: bool


def mixed_poisson_crosscheck(
    records: Sequence[Layer0TrialRecord],
    lambda_c: float,
    window: Sequence[int],
    initial: int = 0,
) -> List[CrossCheckRow]:
    """
    Compare P{C(t_mu) = k} with the mixed-Poisson pmf over the sampled t_mu.

    t_mu is the genuine exit epoch, so it is independent of the corrupted stream
    and C(t_mu) - C_0 given t_mu is exactly Poisson(lambda_c * t_mu).

    Raises:
        EmptyInputError: If no trial has a genuine exit
    """
    pairs = [(r.c_at_mu, r.t_mu) for r in records if r.t_mu is not None and r.c_at_mu is not None]
    if not pairs:
        raise EmptyInputError("no trial has a genuine exit")
    counts = np.array([c for c, _ in pairs], dtype=np.int64)
    times = np.array([t for _, t in pairs], dtype=np.float64)

    rows = []
    for k in window:
        hits = counts == k
        empirical = float(hits.mean())
        stderr = float(np.sqrt(empirical * (1.0 - empirical) / hits.size))
        mixed = compound_poisson_pmf(k - initial, lambda_c, times) if k >= initial else 0.0
        slack = max(3.0 * stderr, 3.0 / hits.size)
        rows.append(
            CrossCheckRow(
                k=k,
                empirical=empirical,
                stderr=stderr,
                mixed_poisson=mixed,
                within_3se=abs(empirical - mixed) <= slack,
            )
        )
    return rows


def crosscheck_window(records: Sequence[Layer0TrialRecord], half_width: int = 5) -> List[int]:
    """Counts within ``half_width`` of the median C(t_mu)."""
    counts = [r.c_at_mu for r in records if r.c_at_mu is not None]
    if not counts:
        return []
    center = int(np.median(counts))
    return list(range(max(0, center - half_width), center + half_width + 1))


class Layer0Races(_ArrayModel):
    """Per-trial summary of layer-0 races, for vectorized sweeps over alpha."""

    threshold: int = Field(..., description="T = ceil(eta/2)", ge=1)
    nu: np.ndarray = Field(..., description="Corrupted exit index, -1 when never reached")
    mu: np.ndarray = Field(..., description="Genuine exit index, -1 when never reached")
    c_at: np.ndarray = Field(..., description="C_nu, -1 when nu is missing")
    c_prev: np.ndarray = Field(..., description="C_{nu-1}, -1 when nu < 1")
    uniforms: np.ndarray = Field(..., description="Bar uniform per trial")

    @classmethod
    def from_records(cls, records: Sequence[Layer0TrialRecord], threshold: int) -> "Layer0Races":
        if not records:
            raise EmptyInputError("no records to collect")

        def col(values: Sequence[Optional[int]]) -> np.ndarray:
            return np.array([-1 if v is None else v for v in values], dtype=np.int64)

        return cls(
            threshold=threshold,
            nu=col([r.outcome.nu for r in records]),
            mu=col([r.outcome.mu for r in records]),
            c_at=col([r.c_at for r in records]),
            c_prev=col([r.c_prev for r in records]),
            uniforms=np.array([r.bar_uniform for r in records], dtype=np.float64),
        )

    @property
    def n_trials(self) -> int:
        return int(self.nu.size)

    @property
    def attacker_wins(self) -> np.ndarray:
        return (self.nu >= 0) & ((self.mu < 0) | (self.nu < self.mu))

    @property
    def censored(self) -> np.ndarray:
        return (self.nu < 0) & (self.mu < 0)

    @property
    def acts(self) -> np.ndarray:
        """1{C_{nu-1} < T}: a decision epoch exists."""
        return (self.c_prev >= 0) & (self.c_prev < self.threshold)

    def bursts(self, bars: np.ndarray) -> np.ndarray:
        """Burst indicators against per-trial (or scalar) bars."""
        return self.attacker_wins & ((self.nu == 0) | (self.c_at >= np.asarray(bars)))


def collect_layer0(
    cfg: Layer0Config,
    n_trials: int,
    seed: int,
    rule: ThresholdRule,
) -> Tuple[List[Layer0TrialRecord], Layer0Races]:
    """DoNothing records of one layer-0 configuration and their vectorized summary."""
    records = layer0_records(cfg, Strategy.DO_NOTHING, n_trials, seed, rule)
    races = Layer0Races.from_records(records, cfg.threshold(rule).attack_threshold)
    logger.debug(
        "layer0.collected",
        eta=cfg.eta,
        trials=n_trials,
        attacker_win_rate=rate(races.attacker_wins),
        censor_rate=rate(races.censored),
    )
    return records, races

