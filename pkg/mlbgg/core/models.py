"""
Core domain models for mlbgg.

Pydantic models with explicit contracts for the stochastic kernel, the exit game
and the two network layers. Array-valued models carry numpy arrays directly and
validate their invariants once, at construction.
"""

import math
from enum import Enum
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Tolerance applied before rounding scaled thresholds, so that e.g. 20 * 1.1 / 2
# (= 11.000000000000002 in binary floating point) rounds to 11.
_ROUNDING_SLACK = 1e-9


class Strategy(str, Enum):
    """Defender strategies."""

    DO_NOTHING = "do-nothing"
    ACTION = "action"


class Winner(str, Enum):
    """Race outcome of a single trial."""

    ATTACKER = "attacker"
    HONEST = "honest"
    CENSORED = "censored"
    DEFENDED = "defended"  # attacker crossed first but the backup or alliance bar held


class ThresholdRule(str, Enum):
    """How "more than half of the nodes" is turned into an integer count."""

    GEQ_HALF = "paper-geq-half"  # smallest count >= M/2
    STRICT_MAJORITY = "strict-majority"  # smallest count > M/2

    @classmethod
    def _missing_(cls, value: object) -> Optional["ThresholdRule"]:
        if value == "geq-half":
            return cls.GEQ_HALF
        return None


class R1Variant(str, Enum):
    """Layer-0 bursting bar under Action."""

    THRESHOLD_SCALED = "threshold-scaled"  # C_nu >= ceil(eta * (1 + alpha) / 2)
    BINOMIAL_BAR = "binomial-bar"  # C_nu >= B_eta with B_eta ~ Binomial(eta, alpha)


# Stochastic kernel types


class MarkDistribution(BaseModel):
    """Law of the nonnegative integer marks carried by capture events."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["unit", "poisson", "geometric"] = Field(
        default="unit", description="Mark law"
    )
    mean: Optional[float] = Field(
        default=None, description="Mean of the poisson kind", gt=0.0
    )
    p: Optional[float] = Field(
        default=None, description="Success probability of the geometric kind", gt=0.0, le=1.0
    )

    @model_validator(mode="after")
    def check_parameters(self) -> "MarkDistribution":
        """Require exactly the parameter the kind needs."""
        if self.kind == "poisson" and self.mean is None:
            raise ValueError("poisson marks require 'mean'")
        if self.kind == "geometric" and self.p is None:
            raise ValueError("geometric marks require 'p'")
        return self

    @property
    def is_unit(self) -> bool:
        return self.kind == "unit"

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """
        Draw ``size`` independent marks.

        Geometric marks count trials up to and including the first success,
        so their support starts at 1.
        """
        if self.kind == "unit":
            return np.ones(size, dtype=np.int64)
        if self.kind == "poisson":
            return rng.poisson(self.mean, size=size).astype(np.int64)
        return rng.geometric(self.p, size=size).astype(np.int64)


class _ArrayModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class MarkedEventStream(_ArrayModel):
    """Time-sorted capture events of one Poisson source."""

    times: np.ndarray = Field(..., description="Strictly increasing event times in (0, horizon]")
    marks: np.ndarray = Field(..., description="Nonnegative integer mark per event")
    intensity: float = Field(..., description="Events per unit time", gt=0.0)
    horizon: float = Field(..., description="End of the sampled window", gt=0.0)

    @field_validator("times", mode="before")
    @classmethod
    def coerce_times(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=np.float64)

    @field_validator("marks", mode="before")
    @classmethod
    def coerce_marks(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=np.int64)

    @model_validator(mode="after")
    def check_events(self) -> "MarkedEventStream":
        if self.times.shape != self.marks.shape or self.times.ndim != 1:
            raise ValueError("times and marks must be 1-d arrays of equal length")
        if self.times.size:
            if self.times[0] <= 0.0 or self.times[-1] > self.horizon:
                raise ValueError("event times must lie in (0, horizon]")
            if np.any(np.diff(self.times) <= 0.0):
                raise ValueError("event times must be strictly increasing")
            if np.any(self.marks < 0):
                raise ValueError("marks must be nonnegative")
        return self

    def __len__(self) -> int:
        return int(self.times.size)


class ObservationSchedule(BaseModel):
    """Arithmetic grid of proof-of-work completion epochs."""

    model_config = ConfigDict(frozen=True)

    tau0: float = Field(..., description="First observation epoch", gt=0.0)
    spacing: float = Field(..., description="Proof-of-work duration between epochs", gt=0.0)
    count: int = Field(..., description="Number of epochs (K + 1)", ge=1)

    @property
    def epochs(self) -> np.ndarray:
        return self.tau0 + np.arange(self.count, dtype=np.float64) * self.spacing

    @property
    def last(self) -> float:
        return self.epoch(self.count - 1)

    def epoch(self, k: int) -> float:
        """Return tau_k = tau_0 + k * spacing."""
        return self.tau0 + k * self.spacing

    def __len__(self) -> int:
        return self.count


class GamePath(_ArrayModel):
    """Cumulative attacker and honest captures at each observation epoch."""

    attacker: np.ndarray = Field(..., description="A_k per epoch")
    honest: np.ndarray = Field(..., description="H_k per epoch")
    initial_attacker: int = Field(..., description="A_0 supplied before accumulation", ge=0)
    initial_honest: int = Field(..., description="H_0 supplied before accumulation", ge=0)

    @field_validator("attacker", "honest", mode="before")
    @classmethod
    def coerce_counts(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=np.int64)

    @model_validator(mode="after")
    def check_monotone(self) -> "GamePath":
        if self.attacker.shape != self.honest.shape or self.attacker.ndim != 1:
            raise ValueError("attacker and honest paths must be 1-d and equally long")
        for side in (self.attacker, self.honest):
            if np.any(np.diff(side) < 0):
                raise ValueError("cumulative paths must be nondecreasing")
        return self

    def __len__(self) -> int:
        return int(self.attacker.size)


# Exit game types


class Threshold(BaseModel):
    """Capture count a player needs to take over a network."""

    model_config = ConfigDict(frozen=True)

    total_nodes: int = Field(..., description="Total nodes M of the network", ge=1)
    rule: ThresholdRule = Field(default=ThresholdRule.GEQ_HALF)
    scale: float = Field(
        default=1.0,
        description="Bar multiplier, 1 + alpha for the layer-0 alliance bar",
        ge=1.0,
    )

    @property
    def attack_threshold(self) -> int:
        """T_A: ceil(M*s/2) under paper-geq-half, floor(M*s/2) + 1 under strict-majority."""
        half = self.total_nodes * self.scale / 2.0
        if self.rule is ThresholdRule.GEQ_HALF:
            return max(1, math.ceil(half - _ROUNDING_SLACK))
        return math.floor(half + _ROUNDING_SLACK) + 1

    @model_validator(mode="after")
    def check_bounds(self) -> "Threshold":
        if self.scale == 1.0 and not 1 <= self.attack_threshold <= self.total_nodes:
            raise ValueError("attack threshold must lie in [1, M]")
        return self


class ExitOutcome(BaseModel):
    """Per-trial exit indices, boundary values and race result."""

    model_config = ConfigDict(frozen=True)

    nu: Optional[int] = Field(None, description="Attacker exit index; None when censored", ge=0)
    mu: Optional[int] = Field(None, description="Honest exit index; None when censored", ge=0)
    nu2: Optional[int] = Field(None, description="Alliance-raised attacker exit index", ge=0)
    winner: Winner
    tau_nu: Optional[float] = Field(None, description="Epoch of the attacker exit")
    tau_nu_minus_1: Optional[float] = Field(None, description="Decision epoch tau_{nu-1}")
    a_prev: Optional[int] = Field(None, description="A_{nu-1}", ge=0)
    a_at: Optional[int] = Field(None, description="A_nu", ge=0)
    h_prev: Optional[int] = Field(None, description="H_{nu-1}", ge=0)
    h_at: Optional[int] = Field(None, description="H_nu", ge=0)
    burst: bool = Field(..., description="Attacker won the race and took the network")

    @property
    def censored(self) -> bool:
        return self.winner is Winner.CENSORED

    @property
    def has_decision_epoch(self) -> bool:
        return self.nu is not None and self.nu >= 1


# Layer 1 types


class Layer1NetworkConfig(BaseModel):
    """One BGG network of layer 1."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    total_nodes: int = Field(..., description="M_l, nodes (ledgers) of the network", ge=1)
    lambda_attacker: float = Field(..., description="Attacker capture intensity", gt=0.0)
    lambda_honest: float = Field(..., description="Honest block intensity", gt=0.0)
    attacker_marks: MarkDistribution = Field(default_factory=MarkDistribution)
    honest_marks: MarkDistribution = Field(default_factory=MarkDistribution)
    initial_attacker: int = Field(default=0, description="A_0", ge=0)
    initial_honest: int = Field(default=0, description="H_0", ge=0)
    spacing: float = Field(..., description="Proof-of-work duration Delta", gt=0.0)
    first_epoch: Optional[float] = Field(
        default=None, description="tau_0; defaults to one spacing", gt=0.0
    )
    max_epochs: Optional[int] = Field(
        default=None, description="Epoch ceiling; defaults to 10 * ceil(T / (lambda * Delta))", ge=1
    )
    value: Optional[float] = Field(
        default=None, description="V_l override for this network", gt=0.0
    )

    @model_validator(mode="after")
    def check_initial_state(self) -> "Layer1NetworkConfig":
        if self.initial_attacker + self.initial_honest > self.total_nodes:
            raise ValueError("initial_attacker + initial_honest must not exceed total_nodes")
        return self

    @property
    def tau0(self) -> float:
        return self.first_epoch if self.first_epoch is not None else self.spacing

    def threshold(self, rule: ThresholdRule) -> Threshold:
        return Threshold(total_nodes=self.total_nodes, rule=rule)

    def epoch_count(self, rule: ThresholdRule) -> int:
        if self.max_epochs is not None:
            return self.max_epochs
        return default_epoch_count(
            self.threshold(rule).attack_threshold,
            max(self.lambda_attacker, self.lambda_honest),
            self.spacing,
        )


class BackupAllocation(BaseModel):
    """Random backup supply B ~ Binomial(eta, rho1)."""

    model_config = ConfigDict(frozen=True)

    eta: int = Field(..., description="Backup pool size", ge=1)
    rho1: float = Field(..., description="Success probability of each pool node", ge=0.0, le=1.0)

    @property
    def mean(self) -> float:
        return self.eta * self.rho1


class Layer1TrialRecord(BaseModel):
    """Outcome of one layer-1 race under one strategy."""

    model_config = ConfigDict(frozen=True)

    network: int = Field(..., ge=0)
    trial: int = Field(..., ge=0)
    outcome: ExitOutcome
    strategy: Strategy
    backup: int = Field(..., description="Realized backup nodes B", ge=0)
    honest_won: bool
    burst: bool


# Layer 0 types


class Layer0Config(BaseModel):
    """The single SABGG network of layer 0."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    eta: int = Field(..., description="Nodes (ledgers) of the layer-0 network", ge=1)
    lambda_corrupted: float = Field(..., description="Corrupted-side intensity", gt=0.0)
    lambda_genuine: float = Field(..., description="Genuine-side intensity", gt=0.0)
    corrupted_marks: MarkDistribution = Field(default_factory=MarkDistribution)
    genuine_marks: MarkDistribution = Field(default_factory=MarkDistribution)
    initial_corrupted: int = Field(default=0, description="C_0", ge=0)
    initial_genuine: int = Field(default=0, description="G_0", ge=0)
    spacing: float = Field(..., description="Observation spacing U", gt=0.0)
    first_epoch: Optional[float] = Field(default=None, gt=0.0)
    max_epochs: Optional[int] = Field(default=None, ge=1)
    alpha: float = Field(default=0.0, description="Alliance overhead", ge=0.0)

    @property
    def tau0(self) -> float:
        return self.first_epoch if self.first_epoch is not None else self.spacing

    def threshold(self, rule: ThresholdRule, alpha: float = 0.0) -> Threshold:
        return Threshold(total_nodes=self.eta, rule=rule, scale=1.0 + alpha)

    def epoch_count(self, rule: ThresholdRule) -> int:
        if self.max_epochs is not None:
            return self.max_epochs
        return default_epoch_count(
            self.threshold(rule).attack_threshold,
            max(self.lambda_corrupted, self.lambda_genuine),
            self.spacing,
        )


class Layer0TrialRecord(BaseModel):
    """Outcome of one layer-0 race under one strategy."""

    model_config = ConfigDict(frozen=True)

    trial: int = Field(..., ge=0)
    outcome: ExitOutcome
    strategy: Strategy
    alpha: float = Field(..., ge=0.0)
    bar: int = Field(..., description="Corrupted count that bursts the network", ge=0)
    t_nu: Optional[float] = Field(None, description="Epoch t_nu of the corrupted exit")
    c_prev: Optional[int] = Field(None, description="C_{nu-1}", ge=0)
    c_at: Optional[int] = Field(None, description="C_nu", ge=0)
    c_at_mu: Optional[int] = Field(None, description="C sampled at the genuine exit t_mu", ge=0)
    t_mu: Optional[float] = Field(None, description="Epoch t_mu of the genuine exit")
    bar_uniform: float = Field(
        ..., description="Uniform draw behind the binomial bar B_eta", ge=0.0, lt=1.0
    )
    burst: bool


# Estimates


class Estimate(BaseModel):
    """Monte Carlo point estimate with a 95% normal-approximation interval."""

    model_config = ConfigDict(frozen=True)

    mean: float
    stderr: float = Field(..., ge=0.0)
    ci_low: float
    ci_high: float
    n: int = Field(..., ge=1)
    degenerate: bool = Field(
        default=False, description="Interval has zero width (single sample or constant data)"
    )


MAX_DEFAULT_EPOCHS = 100_000


def default_epoch_count(threshold: int, intensity: float, spacing: float) -> int:
    """10 * ceil(threshold / (intensity * spacing)), capped at MAX_DEFAULT_EPOCHS."""
    per_epoch = intensity * spacing
    count = 10 * math.ceil(threshold / per_epoch)
    return int(min(max(count, 1), MAX_DEFAULT_EPOCHS))


class BurstEstimate(BaseModel):
    """Monte Carlo bursting probability with its censoring diagnostics."""

    model_config = ConfigDict(frozen=True)

    estimate: Estimate
    censor_rate: float = Field(..., ge=0.0, le=1.0)
    n_trials: int = Field(..., ge=1)
    analytic_approx: Optional[float] = Field(
        default=None,
        description=(
            "Mixed-Poisson tail at each bar over the sampled t_nu, unit marks only. "
            "Ignores that C_nu is conditioned on its own crossing, so it is biased"
        ),
    )

    @property
    def mean(self) -> float:
        return self.estimate.mean
