"""
Simulation report models and their canonical JSON form.

A report is a pure function of (Scenario, seed): no timestamps, no host data,
sorted keys, so two runs of the same scenario serialize to identical bytes.
"""

import json
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from mlbgg.core.models import BackupAllocation, BurstEstimate, Estimate
from mlbgg.game.layer0 import CrossCheckRow


class PmfPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=0)
    probability: float = Field(..., ge=0.0, le=1.0)


class LayerEstimates(BaseModel):
    """Estimands of one network under both strategies, on coupled trials."""

    model_config = ConfigDict(frozen=True)

    threshold: int = Field(..., description="DoNothing bar T", ge=1)
    n_trials: int = Field(..., ge=1)
    exits: int = Field(..., description="Trials with an attacker exit", ge=0)
    pre_game_exits: int = Field(..., description="Trials already over the bar at epoch 0", ge=0)
    censored: int = Field(..., description="Trials where neither side crossed", ge=0)
    censor_rate: float = Field(..., ge=0.0, le=1.0)
    exit_index: Optional[Estimate] = Field(
        None, description="E[nu] over trials with a decision epoch"
    )
    decision_epoch: Optional[Estimate] = Field(
        None, description="E[tau_{nu-1}] over the same trials"
    )
    do_nothing: BurstEstimate
    action: BurstEstimate
    p_prev: float = Field(..., description="P{prior count below the bar}", ge=0.0, le=1.0)
    prev_pmf: List[PmfPoint] = Field(default_factory=list)
    expected_cost: float = Field(..., ge=0.0)
    expected_cost_stderr: float = Field(..., ge=0.0)


class NetworkSummary(LayerEstimates):
    network: int = Field(..., ge=0)
    value: float = Field(..., gt=0.0)
    mean_backup: float = Field(..., description="Average realized B", ge=0.0)


class Layer1Summary(BaseModel):
    """Layer 1: per-network estimates plus network-averaged rates and the summed cost."""

    model_config = ConfigDict(frozen=True)

    rho1: float = Field(..., ge=0.0, le=1.0)
    backup: BackupAllocation
    q0: Estimate
    q1: Estimate
    p_prev: float = Field(..., ge=0.0, le=1.0)
    censor_rate: float = Field(..., ge=0.0, le=1.0)
    total_cost: float = Field(..., ge=0.0)
    total_cost_stderr: float = Field(..., ge=0.0)
    baseline_cost: float = Field(..., description="sum_l V_l * q0_l", ge=0.0)
    networks: List[NetworkSummary]


class Layer0Summary(LayerEstimates):
    eta: int = Field(..., ge=1)
    alpha: float = Field(..., ge=0.0)
    action_bar: Optional[int] = Field(
        None, description="Action bar when it is the same on every trial"
    )
    crosscheck_at_genuine_exit: List[CrossCheckRow] = Field(default_factory=list)


class SimulationReport(BaseModel):
    """Everything one simulate run estimates, with provenance."""

    model_config = ConfigDict(frozen=True)

    tool_version: str
    scenario: str
    fingerprint: str
    seed: int
    n_trials: int
    threshold_rule: str
    r1_variant: str
    layer1_strategy: str
    layer0_strategy: str
    rho1: float = Field(..., ge=0.0, le=1.0)
    layer1: Layer1Summary
    layer0: Layer0Summary
    warnings: List[str] = Field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"
