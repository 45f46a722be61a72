"""
Monte Carlo orchestrator.

Runs the two-pass protocol of one scenario:
1. Layer-1 DoNothing races on every network, giving rho1
2. Layer-1 Action races with B ~ Binomial(eta, rho1), on the same race substreams
3. Layer-0 races under both strategies, on shared substreams

and folds the records into a SimulationReport.
"""

from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict

import mlbgg
from mlbgg.core.exceptions import EmptyInputError
from mlbgg.core.models import (
    BackupAllocation,
    Layer0TrialRecord,
    Layer1TrialRecord,
    R1Variant,
    Strategy,
)
from mlbgg.core.scenario import Scenario
from mlbgg.core.statistics import rate, summarize
from mlbgg.game.layer0 import (
    c_prev_support,
    crosscheck_window,
    layer0_records,
    mixed_poisson_crosscheck,
    p_c_prev,
    pmf_c_prev,
    summarize_layer0_bursts,
)
from mlbgg.game.layer1 import estimate_rho1, p_a_prev, pmf_a_prev, summarize_bursts
from mlbgg.optimization.cost import (
    combine_stderr,
    expected_backup_cost,
    layer0_cost_estimate,
    layer1_cost_estimate,
)
from mlbgg.simulation.report import (
    Layer0Summary,
    Layer1Summary,
    NetworkSummary,
    PmfPoint,
    SimulationReport,
)
from mlbgg.simulation.workers import collect_layer1, simulate_layer1_action

logger = structlog.get_logger(__name__)

WarningSink = Callable[[str], None]


class SimulationRun(BaseModel):
    """A report together with the trial records it was built from."""

    model_config = ConfigDict(frozen=True)

    report: SimulationReport
    layer1_records: List[Layer1TrialRecord]
    layer0_records: List[Layer0TrialRecord]


def _exit_estimates(nus: Sequence[Optional[int]], taus: Sequence[Optional[float]]):
    # nu and tau_{nu-1} over trials with a decision epoch
    pairs = [(nu, tau) for nu, tau in zip(nus, taus) if nu is not None and nu >= 1]
    if not pairs:
        return None, None
    return (
        summarize([nu for nu, _ in pairs]),
        summarize([tau for _, tau in pairs]),
    )


class MonteCarloEngine:
    """
    Orchestrates the simulation of one scenario.

    Trials are independent and draw from counter-derived substreams, so the
    report depends only on (scenario, seed): not on worker count or order.
    """

    def __init__(
        self,
        scenario: Scenario,
        workers: int = 1,
        censor_warning_rate: float = 0.05,
        on_warning: Optional[WarningSink] = None,
    ):
        """
        Initialize engine.

        Args:
            scenario: Validated scenario
            workers: Worker processes for the layer-1 fan-out
            censor_warning_rate: Censor rate above which a warning is raised
            on_warning: Extra sink for warnings (e.g. the audit log)
        """
        self.scenario = scenario
        self.workers = workers
        self.censor_warning_rate = censor_warning_rate
        self.on_warning = on_warning
        self.warnings: List[str] = []

    def _warn(self, message: str, **context) -> None:
        logger.warning(message, **context)
        self.warnings.append(message)
        if self.on_warning is not None:
            self.on_warning(message)

    def _check_censoring(self, where: str, censor_rate: float) -> None:
        if censor_rate > self.censor_warning_rate:
            self._warn(
                f"{where}: censor rate {censor_rate:.4f} exceeds {self.censor_warning_rate}",
                where=where,
                censor_rate=censor_rate,
            )

    def run(self) -> SimulationRun:
        """
        Execute the two-pass protocol and aggregate all estimands.

        Returns:
            SimulationRun with the report and every trial record
        """
        scenario = self.scenario
        self.warnings = []
        log = logger.bind(scenario=scenario.name, seed=scenario.seed, trials=scenario.n_trials)
        log.info("simulation.started", networks=len(scenario.networks), workers=self.workers)

        # Pass 1: unassisted races give rho1
        collected = collect_layer1(
            scenario.networks,
            scenario.n_trials,
            scenario.seed,
            scenario.threshold_rule,
            self.workers,
        )
        do_nothing = [records for records, _ in collected]
        rho1 = estimate_rho1([r for records in do_nothing for r in records])
        log.info("simulation.layer1.pass1_done", rho1=rho1)

        # Pass 2: same races with Binomial backups
        allocation = BackupAllocation(eta=scenario.layer1.eta, rho1=rho1)
        action = simulate_layer1_action(
            scenario.networks,
            scenario.n_trials,
            scenario.seed,
            scenario.threshold_rule,
            allocation,
            self.workers,
        )
        layer1 = self._summarize_layer1(do_nothing, action, allocation)
        log.info("simulation.layer1.pass2_done", q0=layer1.q0.mean, q1=layer1.q1.mean)

        layer0, records0 = self._run_layer0()
        log.info("simulation.layer0.done", r0=layer0.do_nothing.mean, r1=layer0.action.mean)

        report = SimulationReport(
            tool_version=mlbgg.__version__,
            scenario=scenario.name,
            fingerprint=scenario.fingerprint(),
            seed=scenario.seed,
            n_trials=scenario.n_trials,
            threshold_rule=scenario.threshold_rule.value,
            r1_variant=scenario.r1_variant.value,
            layer1_strategy=scenario.strategies.layer1.value,
            layer0_strategy=scenario.strategies.layer0.value,
            rho1=rho1,
            layer1=layer1,
            layer0=layer0,
            warnings=list(self.warnings),
        )
        log.info("simulation.finished", warnings=len(self.warnings))
        return SimulationRun(
            report=report,
            layer1_records=[
                r for pair in zip(do_nothing, action) for records in pair for r in records
            ],
            layer0_records=records0,
        )

    def _summarize_layer1(
        self,
        do_nothing: List[List[Layer1TrialRecord]],
        action: List[List[Layer1TrialRecord]],
        allocation: BackupAllocation,
    ) -> Layer1Summary:
        scenario = self.scenario
        acting = scenario.strategies.layer1 is Strategy.ACTION
        c1 = expected_backup_cost(scenario.costs, allocation)

        networks = []
        for k, (dn, act) in enumerate(zip(do_nothing, action)):
            cfg = scenario.networks[k]
            T = cfg.threshold(scenario.threshold_rule).attack_threshold
            value = scenario.network_value(k)
            dn_bursts = np.array([r.burst for r in dn], dtype=float)
            act_bursts = np.array([r.burst for r in act], dtype=float)
            acts = np.array([r.outcome.has_decision_epoch for r in dn], dtype=float)

            if acting:
                cost, se = layer1_cost_estimate(c1, value, dn_bursts, act_bursts, acts)
            else:
                q0 = summarize(dn_bursts)
                cost, se = value * q0.mean, value * q0.stderr

            nu, tau = _exit_estimates(
                [r.outcome.nu for r in dn], [r.outcome.tau_nu_minus_1 for r in dn]
            )
            support = sorted({r.outcome.a_prev for r in dn if r.outcome.a_prev is not None})
            summary = NetworkSummary(
                network=k,
                value=value,
                threshold=T,
                n_trials=len(dn),
                exits=sum(r.outcome.nu is not None for r in dn),
                pre_game_exits=sum(r.outcome.nu == 0 for r in dn),
                censored=sum(r.outcome.censored for r in dn),
                censor_rate=rate([r.outcome.censored for r in dn]),
                exit_index=nu,
                decision_epoch=tau,
                do_nothing=summarize_bursts(dn),
                action=summarize_bursts(act),
                p_prev=p_a_prev(dn, T),
                prev_pmf=[PmfPoint(k=a, probability=pmf_a_prev(dn, a)) for a in support],
                expected_cost=cost,
                expected_cost_stderr=se,
                mean_backup=float(np.mean([r.backup for r in act])),
            )
            self._check_censoring(f"layer1.network{k}", summary.censor_rate)
            networks.append(summary)

        all_dn = [r.burst for records in do_nothing for r in records]
        all_act = [r.burst for records in action for r in records]
        # one trial per network: pooled spread is between networks, not trials
        single = scenario.n_trials < 2
        return Layer1Summary(
            rho1=allocation.rho1,
            backup=allocation,
            q0=summarize(all_dn, bounds=(0.0, 1.0), degenerate=single),
            q1=summarize(all_act, bounds=(0.0, 1.0), degenerate=single),
            p_prev=float(np.mean([n.p_prev for n in networks])),
            censor_rate=float(np.mean([n.censor_rate for n in networks])),
            total_cost=float(sum(n.expected_cost for n in networks)),
            total_cost_stderr=combine_stderr([n.expected_cost_stderr for n in networks]),
            baseline_cost=float(sum(n.value * n.do_nothing.mean for n in networks)),
            networks=networks,
        )

    def _run_layer0(self) -> Tuple[Layer0Summary, List[Layer0TrialRecord]]:
        scenario = self.scenario
        cfg = scenario.layer0
        rule, variant = scenario.threshold_rule, scenario.r1_variant
        n, seed = scenario.n_trials, scenario.seed
        T = cfg.threshold(rule).attack_threshold

        dn = layer0_records(cfg, Strategy.DO_NOTHING, n, seed, rule, variant)
        act = layer0_records(cfg, Strategy.ACTION, n, seed, rule, variant, cfg.alpha)

        dn_bursts = np.array([r.burst for r in dn], dtype=float)
        act_bursts = np.array([r.burst for r in act], dtype=float)
        acts = np.array([r.outcome.has_decision_epoch for r in dn], dtype=float)
        U0 = scenario.costs.layer0_value
        if scenario.strategies.layer0 is Strategy.ACTION:
            c0 = scenario.costs.alliance_cost(cfg.alpha, cfg.eta)
            cost, se = layer0_cost_estimate(c0, U0, dn_bursts, act_bursts, acts)
        else:
            r0 = summarize(dn_bursts)
            cost, se = U0 * r0.mean, U0 * r0.stderr

        crosscheck = []
        if cfg.corrupted_marks.is_unit:
            window = crosscheck_window(dn)
            try:
                crosscheck = mixed_poisson_crosscheck(
                    dn, cfg.lambda_corrupted, window, cfg.initial_corrupted
                )
            except EmptyInputError:
                self._warn("layer0: no genuine exit, compound-Poisson cross-check skipped")

        nu, tau = _exit_estimates(
            [r.outcome.nu for r in dn], [r.outcome.tau_nu_minus_1 for r in dn]
        )
        summary = Layer0Summary(
            eta=cfg.eta,
            alpha=cfg.alpha,
            threshold=T,
            action_bar=(
                cfg.threshold(rule, cfg.alpha).attack_threshold
                if variant is R1Variant.THRESHOLD_SCALED
                else None
            ),
            n_trials=n,
            exits=sum(r.outcome.nu is not None for r in dn),
            pre_game_exits=sum(r.outcome.nu == 0 for r in dn),
            censored=sum(r.outcome.censored for r in dn),
            censor_rate=rate([r.outcome.censored for r in dn]),
            exit_index=nu,
            decision_epoch=tau,
            do_nothing=summarize_layer0_bursts(dn, cfg),
            action=summarize_layer0_bursts(act, cfg),
            p_prev=p_c_prev(dn, T),
            prev_pmf=[PmfPoint(k=c, probability=pmf_c_prev(dn, c)) for c in c_prev_support(dn)],
            expected_cost=cost,
            expected_cost_stderr=se,
            crosscheck_at_genuine_exit=crosscheck,
        )
        self._check_censoring("layer0", summary.censor_rate)
        return summary, dn + act


def run_trials(
    scenario: Scenario, workers: int = 1, censor_warning_rate: float = 0.05
) -> SimulationReport:
    """Run the two-pass protocol and return only the report."""
    return MonteCarloEngine(scenario, workers, censor_warning_rate).run().report
