"""
Grid-search optimizers for backup nodes (B*), acceptance rate (alpha0, alpha*)
and pool size (eta1, eta0, eta*).

Every sweep simulates once and evaluates all grid points on the same races, so
burst indicators are pathwise monotone in B and alpha and the curves are smooth
enough to compare neighbouring points.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from mlbgg.core.exceptions import EmptyGridError
from mlbgg.core.models import BackupAllocation, Layer0Config, Strategy
from mlbgg.core.scenario import Scenario
from mlbgg.core.statistics import rate
from mlbgg.game.layer0 import Layer0Races, action_bars, collect_layer0
from mlbgg.game.layer1 import NetworkRaces, realize_backup, rho1_from_races
from mlbgg.optimization.cost import (
    AllianceCostFn,
    BackupCostFn,
    CostCurve,
    CostPoint,
    combine_stderr,
    expected_backup_cost,
    layer0_cost_estimate,
    layer1_cost_estimate,
)
from mlbgg.simulation.workers import collect_layer1

logger = structlog.get_logger(__name__)


# Result models


class BackupOptimum(BaseModel):
    """Optimal backup count with its cost curve."""

    model_config = ConfigDict(frozen=True)

    b_star: int = Field(..., ge=0)
    curve: CostCurve
    baseline_cost: float = Field(..., description="sum_l V_l * q0_l, no action anywhere", ge=0.0)
    cost_efficiency: float = Field(..., description="1 - cost(B*) / baseline")
    rho1: float = Field(..., ge=0.0, le=1.0)
    seed: int
    n_trials: int

    @property
    def interior(self) -> bool:
        values = self.curve.values
        return values[0] < self.b_star < values[-1]


class AlphaSweep(BaseModel):
    """Acceptance-rate sweep of one layer-0 size."""

    model_config = ConfigDict(frozen=True)

    eta: int = Field(..., ge=1)
    r0: float = Field(..., ge=0.0, le=1.0)
    pc_prev: float = Field(..., ge=0.0, le=1.0)
    no_action_cost: float = Field(..., description="U0 * r0", ge=0.0)
    alpha0: Optional[float] = Field(None, description="Smallest alpha > 0 where acting pays")
    alpha_star: float = Field(..., ge=0.0, le=1.0)
    curve: CostCurve
    censor_rate: float = Field(..., ge=0.0, le=1.0)


class AlphaOptimum(BaseModel):
    """Acceptance-rate optima over the layer-0 size grid."""

    model_config = ConfigDict(frozen=True)

    rho1: float = Field(..., ge=0.0, le=1.0)
    sweeps: List[AlphaSweep]
    seed: int
    n_trials: int

    def for_eta(self, eta: int) -> AlphaSweep:
        for sweep in self.sweeps:
            if sweep.eta == eta:
                return sweep
        raise KeyError(eta)

    @property
    def alpha_star_spread(self) -> float:
        stars = [s.alpha_star for s in self.sweeps]
        return max(stars) - min(stars)


class EtaOptimum(BaseModel):
    """Pool-size optima of both layers and their minimum."""

    model_config = ConfigDict(frozen=True)

    eta1: int = Field(..., ge=1)
    eta0: int = Field(..., ge=1)
    eta_star: int = Field(..., ge=1)
    rho1: float = Field(..., ge=0.0, le=1.0)
    layer1_curve: CostCurve
    layer0_curve: CostCurve
    seed: int
    n_trials: int


# Shared building blocks


def layer0_for_eta(scenario: Scenario, eta: int) -> Layer0Config:
    """The scenario's layer 0 resized to ``eta`` nodes, rates scaled if configured."""
    base = scenario.layer0
    update: dict = {"eta": eta}
    if scenario.sweep.scale_rates_with_eta:
        factor = eta / base.eta
        update["lambda_corrupted"] = base.lambda_corrupted * factor
        update["lambda_genuine"] = base.lambda_genuine * factor
    return Layer0Config.model_validate({**base.model_dump(), **update})


def _layer1_races(
    scenario: Scenario, n_trials: int, seed: int, workers: int
) -> List[NetworkRaces]:
    collected = collect_layer1(
        scenario.networks, n_trials, seed, scenario.threshold_rule, workers
    )
    return [races for _, races in collected]


def backup_curve(
    scenario: Scenario,
    races: Sequence[NetworkRaces],
    values: Sequence[int],
    backup_cost: Optional[BackupCostFn] = None,
) -> CostCurve:
    """
    Layer-1 total cost summed over networks at each fixed B.

    Raises:
        EmptyGridError: If ``values`` is empty
    """
    if not values:
        raise EmptyGridError("backup range is empty")

    censor = float(np.mean([rate(r.censored) for r in races]))
    points = []
    for B in values:
        costs, stderrs, q1 = [], [], []
        c1 = expected_backup_cost(scenario.costs, B, backup_cost)
        for k, races_k in enumerate(races):
            action = races_k.bursts(Strategy.ACTION, B)
            cost, se = layer1_cost_estimate(
                c1,
                scenario.network_value(k),
                races_k.bursts(Strategy.DO_NOTHING),
                action,
                races_k.acts,
            )
            costs.append(cost)
            stderrs.append(se)
            q1.append(action.mean())
        points.append(
            CostPoint(
                value=B,
                mean_cost=float(np.sum(costs)),
                stderr=combine_stderr(stderrs),
                burst_rate=float(np.mean(q1)),
                censor_rate=censor,
            )
        )
    return CostCurve(variable="B", points=points)


def baseline_cost(scenario: Scenario, races: Sequence[NetworkRaces]) -> float:
    """Expected loss with no action on any network."""
    return float(
        sum(
            scenario.network_value(k) * r.bursts(Strategy.DO_NOTHING).mean()
            for k, r in enumerate(races)
        )
    )


def optimize_backup(
    scenario: Scenario,
    b_range: Optional[Tuple[int, int]] = None,
    n_trials: Optional[int] = None,
    seed: Optional[int] = None,
    workers: int = 1,
    backup_cost: Optional[BackupCostFn] = None,
) -> BackupOptimum:
    """
    Find the backup count minimizing the expected layer-1 cost.

    Args:
        scenario: Validated scenario
        b_range: Inclusive (low, high); defaults to the scenario sweep
        n_trials: Trials per network; defaults to the scenario
        seed: Root seed; defaults to the scenario
        workers: Worker processes for the race collection
        backup_cost: Replacement for the linear c1

    Returns:
        BackupOptimum with the full curve

    Raises:
        EmptyGridError: If the range is empty
    """
    low, high = b_range if b_range is not None else scenario.sweep.backup_range
    values = list(range(low, high + 1))
    if not values:
        raise EmptyGridError("backup range is empty", details={"low": low, "high": high})

    n = n_trials or scenario.n_trials
    seed = scenario.seed if seed is None else seed
    races = _layer1_races(scenario, n, seed, workers)

    curve = backup_curve(scenario, races, values, backup_cost)
    best = curve.argmin()
    baseline = baseline_cost(scenario, races)
    efficiency = 1.0 - best.mean_cost / baseline if baseline > 0 else 0.0

    logger.info(
        "optimize.backup.done",
        b_star=int(best.value),
        cost=best.mean_cost,
        baseline=baseline,
        cost_efficiency=efficiency,
        seed=seed,
    )
    return BackupOptimum(
        b_star=int(best.value),
        curve=curve,
        baseline_cost=baseline,
        cost_efficiency=efficiency,
        rho1=rho1_from_races(races),
        seed=seed,
        n_trials=n,
    )


def alpha_sweep(
    scenario: Scenario,
    cfg: Layer0Config,
    races: Layer0Races,
    alpha_grid: Sequence[float],
    rho1: float,
    alliance_cost: Optional[AllianceCostFn] = None,
) -> AlphaSweep:
    """
    Layer-0 cost over the alpha grid for one layer size, with alpha0 and alpha*.

    alpha0 is the smallest alpha > 0 at which acting costs no more than doing
    nothing, U0 * r0 >= c0(alpha, eta) + U0 * r1_alpha. alpha = 0 is the
    no-alliance baseline itself and is never selected.

    Raises:
        EmptyGridError: If the grid is empty
    """
    if not alpha_grid:
        raise EmptyGridError("alpha grid is empty")

    rule, variant = scenario.threshold_rule, scenario.r1_variant
    c0_fn = alliance_cost or scenario.costs.alliance_cost
    U0 = scenario.costs.layer0_value
    do_nothing = races.bursts(races.threshold)
    acts = races.acts
    r0 = float(do_nothing.mean())
    no_action = U0 * r0
    censor = rate(races.censored)

    points = []
    alpha0 = None
    for alpha in alpha_grid:
        action = races.bursts(action_bars(cfg, rule, variant, alpha, races.uniforms))
        c0 = c0_fn(alpha, cfg.eta)
        cost, se = layer0_cost_estimate(c0, U0, do_nothing, action, acts)
        r1 = float(action.mean())
        if alpha0 is None and alpha > 0.0 and no_action >= c0 + U0 * r1:
            alpha0 = float(alpha)
        points.append(
            CostPoint(
                value=alpha,
                mean_cost=cost,
                stderr=se,
                burst_rate=r1,
                censor_rate=censor,
                eta=cfg.eta,
            )
        )

    if alpha0 is None:
        logger.warning("optimize.alpha.no_alpha0", eta=cfg.eta, rho1=rho1)
        alpha_star = rho1
    else:
        alpha_star = min(rho1, alpha0)

    return AlphaSweep(
        eta=cfg.eta,
        r0=r0,
        pc_prev=float(acts.mean()),
        no_action_cost=no_action,
        alpha0=alpha0,
        alpha_star=alpha_star,
        curve=CostCurve(variable="alpha", points=points),
        censor_rate=censor,
    )


def optimize_alpha(
    scenario: Scenario,
    alpha_grid: Optional[Sequence[float]] = None,
    eta_grid: Optional[Sequence[int]] = None,
    n_trials: Optional[int] = None,
    seed: Optional[int] = None,
    rho1: Optional[float] = None,
    workers: int = 1,
    alliance_cost: Optional[AllianceCostFn] = None,
) -> AlphaOptimum:
    """
    Sweep alpha for every layer-0 size in the eta grid.

    rho1 comes from the layer-1 DoNothing races unless given. Layer-0 trials are
    keyed by trial index only, so every (alpha, eta) cell uses the same
    substreams.

    Raises:
        EmptyGridError: If either grid is empty
    """
    alphas = list(alpha_grid if alpha_grid is not None else scenario.sweep.alpha_grid)
    etas = list(eta_grid if eta_grid is not None else scenario.sweep.eta_grid)
    if not alphas or not etas:
        raise EmptyGridError("alpha and eta grids must not be empty")

    n = n_trials or scenario.n_trials
    seed = scenario.seed if seed is None else seed
    if rho1 is None:
        rho1 = rho1_from_races(_layer1_races(scenario, n, seed, workers))

    sweeps = []
    for eta in etas:
        cfg = layer0_for_eta(scenario, eta)
        _, races = collect_layer0(cfg, n, seed, scenario.threshold_rule)
        sweep = alpha_sweep(scenario, cfg, races, alphas, rho1, alliance_cost)
        logger.info(
            "optimize.alpha.eta_done",
            eta=eta,
            alpha0=sweep.alpha0,
            alpha_star=sweep.alpha_star,
            r0=sweep.r0,
        )
        sweeps.append(sweep)

    return AlphaOptimum(rho1=rho1, sweeps=sweeps, seed=seed, n_trials=n)


def optimize_eta(
    scenario: Scenario,
    eta_grid: Optional[Sequence[int]] = None,
    n_trials: Optional[int] = None,
    seed: Optional[int] = None,
    workers: int = 1,
    backup_cost: Optional[BackupCostFn] = None,
    alliance_cost: Optional[AllianceCostFn] = None,
) -> EtaOptimum:
    """
    Pool-size optima: eta1 from layer 1, eta0 from layer 0, eta* = min(eta1, eta0).

    Layer 1 keeps its networks and draws B ~ Binomial(eta, rho1) per (network,
    trial); layer 0 is resized to eta nodes and costed at its alpha*(eta).

    Raises:
        EmptyGridError: If the grid is empty
    """
    etas = list(eta_grid if eta_grid is not None else scenario.sweep.eta_grid)
    if not etas:
        raise EmptyGridError("eta grid is empty")

    n = n_trials or scenario.n_trials
    seed = scenario.seed if seed is None else seed
    races = _layer1_races(scenario, n, seed, workers)
    rho1 = rho1_from_races(races)

    layer1_points, layer0_points = [], []
    for eta in etas:
        allocation = BackupAllocation(eta=eta, rho1=rho1)
        c1 = expected_backup_cost(scenario.costs, allocation, backup_cost)
        costs, stderrs, q1 = [], [], []
        for k, races_k in enumerate(races):
            draws = np.array(
                [realize_backup(allocation, seed, k, trial) for trial in range(n)],
                dtype=np.int64,
            )
            action = races_k.bursts(Strategy.ACTION, draws)
            cost, se = layer1_cost_estimate(
                c1,
                scenario.network_value(k),
                races_k.bursts(Strategy.DO_NOTHING),
                action,
                races_k.acts,
            )
            costs.append(cost)
            stderrs.append(se)
            q1.append(action.mean())
        layer1_points.append(
            CostPoint(
                value=eta,
                mean_cost=float(np.sum(costs)),
                stderr=combine_stderr(stderrs),
                burst_rate=float(np.mean(q1)),
                eta=eta,
            )
        )

        cfg0 = layer0_for_eta(scenario, eta)
        _, races0 = collect_layer0(cfg0, n, seed, scenario.threshold_rule)
        sweep = alpha_sweep(
            scenario, cfg0, races0, scenario.sweep.alpha_grid, rho1, alliance_cost
        )
        action0 = races0.bursts(
            action_bars(
                cfg0,
                scenario.threshold_rule,
                scenario.r1_variant,
                sweep.alpha_star,
                races0.uniforms,
            )
        )
        c0 = (alliance_cost or scenario.costs.alliance_cost)(sweep.alpha_star, eta)
        cost0, se0 = layer0_cost_estimate(
            c0,
            scenario.costs.layer0_value,
            races0.bursts(races0.threshold),
            action0,
            races0.acts,
        )
        layer0_points.append(
            CostPoint(
                value=eta,
                mean_cost=cost0,
                stderr=se0,
                burst_rate=float(action0.mean()),
                censor_rate=sweep.censor_rate,
                eta=eta,
            )
        )

    layer1_curve = CostCurve(variable="eta", points=layer1_points)
    layer0_curve = CostCurve(variable="eta", points=layer0_points)
    eta1 = int(layer1_curve.argmin().value)
    eta0 = int(layer0_curve.argmin().value)

    logger.info("optimize.eta.done", eta1=eta1, eta0=eta0, eta_star=min(eta1, eta0))
    return EtaOptimum(
        eta1=eta1,
        eta0=eta0,
        eta_star=min(eta1, eta0),
        rho1=rho1,
        layer1_curve=layer1_curve,
        layer0_curve=layer0_curve,
        seed=seed,
        n_trials=n,
    )
