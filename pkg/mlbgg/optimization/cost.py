"""
Expected total costs of the two governance layers.

Layer 1, per network:
    {c1(B) + V * q1(B)} * p_{A-1} + V * q0 * (1 - p_{A-1})
Layer 0:
    {c0 * (1 - r1) + (c0 + U0) * r1} * p_{c-1} + U0 * r0 * (1 - p_{c-1})

c1 and c0 default to the linear forms on CostParams; any callable of the same
signature can be passed instead. Costs built from Monte Carlo means carry delta
method standard errors.
"""

from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.stats import binom

from mlbgg.core.exceptions import EmptyGridError, ParameterError
from mlbgg.core.models import BackupAllocation
from mlbgg.core.scenario import CostParams
from mlbgg.core.statistics import delta_method_stderr

BackupCostFn = Callable[[int], float]
AllianceCostFn = Callable[[float, int], float]


def _check_probabilities(**probabilities: float) -> None:
    bad = {name: p for name, p in probabilities.items() if not 0.0 <= p <= 1.0}
    if bad:
        raise ParameterError("probabilities must lie in [0, 1]", details=bad)


def expected_backup_cost(
    params: CostParams,
    B: Union[int, BackupAllocation],
    backup_cost: Optional[BackupCostFn] = None,
) -> float:
    """c1(B) for a fixed B; E[c1(B_eta)] = sum_j P{B_eta = j} c1(j) for a random one."""
    c1 = backup_cost or params.backup_cost
    if isinstance(B, BackupAllocation):
        support = np.arange(B.eta + 1)
        weights = binom.pmf(support, B.eta, B.rho1)
        return float(sum(w * c1(int(j)) for j, w in zip(support, weights)))
    if B < 0:
        raise ParameterError("backup count must be nonnegative", details={"B": B})
    return float(c1(B))


def action_cost_long(c1: float, value: float, q1: float) -> float:
    """Action branch written out: pay c1 and keep the network, or pay c1 and lose it."""
    return c1 * (1.0 - q1) + (c1 + value) * q1


def action_cost_short(c1: float, value: float, q1: float) -> float:
    return c1 + value * q1


def layer1_total_cost(
    params: CostParams,
    B: Union[int, BackupAllocation],
    q0: float,
    q1B: float,
    pA_prev: float,
    value: Optional[float] = None,
    backup_cost: Optional[BackupCostFn] = None,
) -> float:
    """
    Expected total cost of one layer-1 network.

    Args:
        params: Cost coefficients
        B: Fixed backup count, or a Binomial allocation averaged over its law
        q0: Bursting probability without action
        q1B: Bursting probability with B backups
        pA_prev: Probability that a decision epoch exists
        value: V_l override for this network
        backup_cost: Replacement for the linear c1

    Returns:
        Expected cost

    Raises:
        ParameterError: If a probability is outside [0, 1] or B is negative
    """
    _check_probabilities(q0=q0, q1B=q1B, pA_prev=pA_prev)
    V = params.network_value if value is None else value
    c1 = expected_backup_cost(params, B, backup_cost)
    return action_cost_short(c1, V, q1B) * pA_prev + V * q0 * (1.0 - pA_prev)


def layer0_total_cost(
    params: CostParams,
    alpha: float,
    eta: int,
    r0: float,
    r1a: float,
    pc_prev: float,
    alliance_cost: Optional[AllianceCostFn] = None,
) -> float:
    """
    Expected total cost of the layer-0 network at acceptance rate alpha.

    Raises:
        ParameterError: If a probability is outside [0, 1], alpha < 0 or eta < 1
    """
    _check_probabilities(r0=r0, r1a=r1a, pc_prev=pc_prev)
    if alpha < 0.0 or eta < 1:
        raise ParameterError(
            "alpha must be nonnegative and eta positive", details={"alpha": alpha, "eta": eta}
        )
    U0 = params.layer0_value
    c0 = (alliance_cost or params.alliance_cost)(alpha, eta)
    acting = c0 * (1.0 - r1a) + (c0 + U0) * r1a
    return acting * pc_prev + U0 * r0 * (1.0 - pc_prev)


def layer1_cost_estimate(
    c1: float,
    value: float,
    do_nothing: np.ndarray,
    action: np.ndarray,
    acts: np.ndarray,
) -> Tuple[float, float]:
    """
    Network cost from per-trial indicators, with its delta-method standard error.

    Args:
        c1: Expected backup cost
        value: V_l
        do_nothing: Burst indicators without action
        action: Burst indicators with action
        acts: Decision-epoch indicators

    Returns:
        (cost, stderr)
    """
    samples = np.vstack([do_nothing, action, acts]).astype(np.float64)
    q0, q1, p = samples.mean(axis=1)
    cost = (c1 + value * q1) * p + value * q0 * (1.0 - p)
    gradient = [value * (1.0 - p), value * p, c1 + value * q1 - value * q0]
    return float(cost), delta_method_stderr(gradient, samples)


def layer0_cost_estimate(
    c0: float,
    U0: float,
    do_nothing: np.ndarray,
    action: np.ndarray,
    acts: np.ndarray,
) -> Tuple[float, float]:
    """Layer-0 cost from per-trial indicators, with its delta-method standard error."""
    samples = np.vstack([do_nothing, action, acts]).astype(np.float64)
    r0, r1, p = samples.mean(axis=1)
    cost = (c0 + U0 * r1) * p + U0 * r0 * (1.0 - p)
    gradient = [U0 * (1.0 - p), U0 * p, c0 + U0 * r1 - U0 * r0]
    return float(cost), delta_method_stderr(gradient, samples)


def combine_stderr(stderrs: Sequence[float]) -> float:
    """Standard error of a sum of independent estimates."""
    return float(np.sqrt(np.sum(np.square(stderrs))))


class CostPoint(BaseModel):
    """One evaluated decision value of a sweep."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(..., description="Decision variable (B or alpha)")
    mean_cost: float = Field(..., ge=0.0)
    stderr: float = Field(..., ge=0.0)
    burst_rate: float = Field(..., description="q1(B) or r1_alpha", ge=0.0, le=1.0)
    censor_rate: float = Field(default=0.0, ge=0.0, le=1.0)
    eta: Optional[int] = Field(default=None, description="Layer size the point was evaluated at")


class CostCurve(BaseModel):
    """Cost as a function of one decision variable."""

    model_config = ConfigDict(frozen=True)

    variable: str = Field(..., description="Name of the decision variable")
    points: List[CostPoint]

    @model_validator(mode="after")
    def check_ordering(self) -> "CostCurve":
        values = [p.value for p in self.points]
        if any(a >= b for a, b in zip(values, values[1:])):
            raise ValueError("decision values must be strictly increasing")
        return self

    @property
    def values(self) -> List[float]:
        return [p.value for p in self.points]

    @property
    def costs(self) -> List[float]:
        return [p.mean_cost for p in self.points]

    def argmin(self) -> CostPoint:
        """Cheapest point; the smallest decision value wins ties."""
        if not self.points:
            raise EmptyGridError("cost curve is empty")
        best = self.points[0]
        for point in self.points[1:]:
            if point.mean_cost < best.mean_cost:
                best = point
        return best
