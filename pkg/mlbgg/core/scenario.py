"""
Scenario and experiment configuration for mlbgg.

A Scenario is everything a run depends on: the layer-1 networks, the layer-0
network, the cost coefficients, strategy flags, threshold rule, trial count and
root seed, plus the sweep ranges and output options of the experiment commands.
Every section forbids unknown keys so that typos in a YAML file surface as
schema errors instead of silently falling back to defaults.
"""

import hashlib
import json
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from mlbgg.core.models import (
    Layer0Config,
    Layer1NetworkConfig,
    R1Variant,
    Strategy,
    ThresholdRule,
)


class CostParams(BaseModel):
    """Network values and the coefficients of the default linear action costs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    network_value: float = Field(
        ..., description="V_l, loss when a layer-1 network bursts", gt=0.0
    )
    layer0_value: float = Field(..., description="U_0, loss when layer 0 bursts", gt=0.0)
    backup_unit_cost: float = Field(
        default=0.0, description="c_b in c1(B) = c_b * B", ge=0.0
    )
    alliance_unit_cost: float = Field(
        default=0.0, description="c_a in c0(alpha, eta) = c_a * alpha * eta", ge=0.0
    )

    def backup_cost(self, B: int) -> float:
        return self.backup_unit_cost * B

    def alliance_cost(self, alpha: float, eta: int) -> float:
        return self.alliance_unit_cost * alpha * eta


class Layer1Settings(BaseModel):
    """The eta + 1 layer-1 networks: one template repeated, or an explicit list."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    eta: int = Field(..., description="Backup pool size; the layer has eta + 1 networks", ge=1)
    template: Optional[Layer1NetworkConfig] = Field(
        default=None, description="Configuration shared by every network"
    )
    networks: Optional[List[Layer1NetworkConfig]] = Field(
        default=None, description="One configuration per network"
    )

    @model_validator(mode="after")
    def check_networks(self) -> "Layer1Settings":
        if (self.template is None) == (self.networks is None):
            raise ValueError("give exactly one of 'template' or 'networks'")
        if self.networks is not None and len(self.networks) != self.eta + 1:
            raise ValueError(
                f"'networks' must list eta + 1 = {self.eta + 1} networks, got {len(self.networks)}"
            )
        return self

    def network_configs(self, eta: Optional[int] = None) -> List[Layer1NetworkConfig]:
        """
        Configurations of the first eta + 1 networks (all of them by default).

        Raises:
            ValueError: If an explicit list is shorter than eta + 1
        """
        eta = self.eta if eta is None else eta
        if self.template is not None:
            return [self.template] * (eta + 1)
        assert self.networks is not None
        if eta + 1 > len(self.networks):
            raise ValueError(f"only {len(self.networks)} networks configured, need {eta + 1}")
        return list(self.networks[: eta + 1])


class StrategyFlags(BaseModel):
    """Strategy each layer plays in the second pass of a simulation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    layer1: Strategy = Field(default=Strategy.ACTION)
    layer0: Strategy = Field(default=Strategy.ACTION)


def _strictly_increasing(values: List) -> bool:
    return all(a < b for a, b in zip(values, values[1:]))


class SweepSpec(BaseModel):
    """Decision-variable ranges for the optimizer commands."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    backup_range: Tuple[int, int] = Field(
        default=(0, 40), description="Inclusive B range of the backup sweep"
    )
    alpha_grid: List[float] = Field(
        default_factory=lambda: [round(0.02 * i, 2) for i in range(51)],
        description="Ascending acceptance-rate grid in [0, 1]",
    )
    eta_grid: List[int] = Field(
        default_factory=lambda: [11, 21, 41],
        description="Ascending layer-0 sizes for the alpha and eta sweeps",
    )
    scale_rates_with_eta: bool = Field(
        default=False,
        description="Scale layer-0 intensities by eta / layer0.eta during eta sweeps",
    )

    @field_validator("backup_range")
    @classmethod
    def check_backup_range(cls, v: Tuple[int, int]) -> Tuple[int, int]:
        low, high = v
        if low < 0 or high < low:
            raise ValueError("backup_range must satisfy 0 <= low <= high")
        return v

    @field_validator("alpha_grid")
    @classmethod
    def check_alpha_grid(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("alpha_grid must not be empty")
        if any(not 0.0 <= a <= 1.0 for a in v):
            raise ValueError("alpha_grid values must lie in [0, 1]")
        if not _strictly_increasing(v):
            raise ValueError("alpha_grid must be strictly increasing")
        return v

    @field_validator("eta_grid")
    @classmethod
    def check_eta_grid(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("eta_grid must not be empty")
        if any(eta < 1 for eta in v):
            raise ValueError("eta_grid values must be positive")
        if not _strictly_increasing(v):
            raise ValueError("eta_grid must be strictly increasing")
        return v

    @property
    def backup_values(self) -> List[int]:
        return list(range(self.backup_range[0], self.backup_range[1] + 1))


class OutputSpec(BaseModel):
    """Where and what the CLI writes."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    directory: str = Field(default="results", description="Output directory")
    trial_records: bool = Field(default=True, description="Write the per-trial CSV")
    audit_log: bool = Field(default=True, description="Write audit.jsonl")


class Scenario(BaseModel):
    """Complete, validated description of one experiment."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(default="scenario", description="Label carried into reports")
    layer1: Layer1Settings
    layer0: Layer0Config
    costs: CostParams
    strategies: StrategyFlags = Field(default_factory=StrategyFlags)
    threshold_rule: ThresholdRule = Field(default=ThresholdRule.GEQ_HALF)
    r1_variant: R1Variant = Field(default=R1Variant.THRESHOLD_SCALED)
    n_trials: int = Field(default=1000, description="Trials per network", ge=1)
    seed: int = Field(default=0, description="Root seed", ge=0, lt=2**64)
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    output: OutputSpec = Field(default_factory=OutputSpec)

    @property
    def networks(self) -> List[Layer1NetworkConfig]:
        return self.layer1.network_configs()

    def network_value(self, network: int) -> float:
        """V_l of one network: its own override, else the scenario-wide value."""
        own = self.networks[network].value
        return own if own is not None else self.costs.network_value

    def canonical_json(self) -> str:
        """Sorted compact JSON of everything that affects results, seed included."""
        payload = self.model_dump(mode="json", exclude={"output"})
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def fingerprint(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def with_overrides(
        self,
        seed: Optional[int] = None,
        n_trials: Optional[int] = None,
        threshold_rule: Optional[ThresholdRule] = None,
        r1_variant: Optional[R1Variant] = None,
        output_dir: Optional[str] = None,
    ) -> "Scenario":
        """Copy with CLI/environment overrides applied (None leaves a field alone)."""
        update: dict = {}
        if seed is not None:
            update["seed"] = seed
        if n_trials is not None:
            update["n_trials"] = n_trials
        if threshold_rule is not None:
            update["threshold_rule"] = threshold_rule
        if r1_variant is not None:
            update["r1_variant"] = r1_variant
        if output_dir is not None:
            update["output"] = self.output.model_copy(update={"directory": output_dir})
        # round-trip through validation so overrides obey the same constraints
        return Scenario.model_validate({**self.model_dump(), **update})
