"""
mlbgg command line.

Commands:
    simulate          two-pass Monte Carlo run, report.json + trials.csv
    optimize-backup   layer-1 cost curve over B, optimum per seed
    optimize-alpha    layer-0 cost curves over the alpha x eta grid, alpha0 and alpha*
    optimize-eta      pool-size optima eta1, eta0 and eta*
    selftest          operator kernel and cost identities

Exit codes: 0 success, 2 configuration error, 3 runtime error, 4 self-test failure.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import structlog
from pydantic import ValidationError

import mlbgg
from mlbgg.cli.config_loader import default_config_path, dump_config, field_errors, load_config
from mlbgg.cli.selftest import run_selftest
from mlbgg.core.config import RuntimeSettings, load_settings
from mlbgg.core.exceptions import ConfigurationError, MLBGGError, SchemaError
from mlbgg.core.models import R1Variant, ThresholdRule
from mlbgg.core.scenario import Scenario
from mlbgg.optimization.optimizer import optimize_alpha, optimize_backup, optimize_eta
from mlbgg.reporting.audit_logger import AuditLogger
from mlbgg.reporting.csv_writer import (
    ALPHA_COLUMNS,
    BACKUP_COLUMNS,
    ETA_COLUMNS,
    TRIAL_COLUMNS,
    alpha_rows,
    backup_rows,
    eta_rows,
    provenance_line,
    trial_rows,
    write_csv,
    write_text,
)
from mlbgg.simulation.engine import MonteCarloEngine
from mlbgg.utils.logging import configure_logging

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_SELFTEST = 4

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


class RunContext:
    """Resolved scenario plus everything a command needs to write its outputs."""

    def __init__(
        self,
        scenario: Scenario,
        out_dir: Path,
        workers: int,
        censor_warning_rate: float,
        audit: Optional[AuditLogger] = None,
    ):
        self.scenario = scenario
        self.out_dir = out_dir
        self.workers = workers
        self.censor_warning_rate = censor_warning_rate
        self.audit = audit
        self.fingerprint = scenario.fingerprint()
        self.outputs: Dict[str, str] = {}

    def fingerprint_for(self, seed: Optional[int] = None) -> str:
        if seed is None or seed == self.scenario.seed:
            return self.fingerprint
        return self.scenario.with_overrides(seed=seed).fingerprint()

    def provenance(self, seed: Optional[int] = None) -> str:
        return provenance_line(
            mlbgg.__version__,
            self.fingerprint_for(seed),
            self.scenario.seed if seed is None else seed,
        )

    def stamp(self, payload: Dict[str, Any], seed: Optional[int] = None) -> Dict[str, Any]:
        return {
            "tool_version": mlbgg.__version__,
            "fingerprint": self.fingerprint_for(seed),
            "seed": self.scenario.seed if seed is None else seed,
            **payload,
        }

    def write(self, name: str, text: str) -> None:
        self.outputs[name] = str(write_text(self.out_dir / name, text))

    def write_json(self, name: str, payload: Dict[str, Any]) -> None:
        self.write(name, json.dumps(payload, sort_keys=True, indent=2) + "\n")

    def write_csv(
        self,
        name: str,
        columns: List[str],
        rows: List[Dict[str, Any]],
        seed: Optional[int] = None,
    ) -> None:
        path = write_csv(self.out_dir / name, columns, rows, self.provenance(seed))
        self.outputs[name] = str(path)

    def warn(self, message: str) -> None:
        if self.audit is not None:
            self.audit.log_warning(message)


# Commands


def cmd_simulate(ctx: RunContext, args: argparse.Namespace) -> None:
    engine = MonteCarloEngine(
        ctx.scenario, ctx.workers, ctx.censor_warning_rate, on_warning=ctx.warn
    )
    run = engine.run()
    ctx.write("report.json", run.report.to_json())
    if ctx.scenario.output.trial_records:
        rows = trial_rows(run.layer1_records, run.layer0_records)
        ctx.write_csv("trials.csv", TRIAL_COLUMNS, rows)
    report = run.report
    print(
        f"rho1={report.rho1:.4f} q0={report.layer1.q0.mean:.4f} q1={report.layer1.q1.mean:.4f} "
        f"r0={report.layer0.do_nothing.mean:.4f} r1={report.layer0.action.mean:.4f}"
    )


def cmd_optimize_backup(ctx: RunContext, args: argparse.Namespace) -> None:
    scenario = ctx.scenario
    optima = []
    for i in range(args.repeat):
        seed = scenario.seed + i
        result = optimize_backup(scenario, seed=seed, workers=ctx.workers)
        name = "backup_curve.csv" if args.repeat == 1 else f"backup_curve_seed{seed}.csv"
        ctx.write_csv(name, BACKUP_COLUMNS, backup_rows(result.curve), seed)
        best = result.curve.argmin()
        optima.append(
            {
                "seed": seed,
                "fingerprint": ctx.fingerprint_for(seed),
                "b_star": result.b_star,
                "cost": best.mean_cost,
                "stderr": best.stderr,
                "q1_B": best.burst_rate,
                "baseline_cost": result.baseline_cost,
                "cost_efficiency": result.cost_efficiency,
                "rho1": result.rho1,
                "interior": result.interior,
                "curve": name,
            }
        )
        print(
            f"seed={seed} B*={result.b_star} cost={best.mean_cost:.4f} "
            f"efficiency={result.cost_efficiency:.4f}"
        )
    summary = {"n_trials": scenario.n_trials, "optima": optima}
    ctx.write_json("backup_optimum.json", ctx.stamp(summary))


def cmd_optimize_alpha(ctx: RunContext, args: argparse.Namespace) -> None:
    result = optimize_alpha(ctx.scenario, workers=ctx.workers)
    for sweep in result.sweeps:
        if sweep.alpha0 is None:
            ctx.warn(f"eta={sweep.eta}: no alpha in the grid pays off, alpha* falls back to rho1")
    ctx.write_csv("alpha_curve.csv", ALPHA_COLUMNS, alpha_rows([s.curve for s in result.sweeps]))
    summary = result.model_dump(mode="json", exclude={"sweeps": {"__all__": {"curve"}}})
    summary["alpha_star_spread"] = result.alpha_star_spread
    ctx.write_json("alpha_optimum.json", ctx.stamp(summary))
    for sweep in result.sweeps:
        print(f"eta={sweep.eta} alpha0={sweep.alpha0} alpha*={sweep.alpha_star:.4f}")


def cmd_optimize_eta(ctx: RunContext, args: argparse.Namespace) -> None:
    result = optimize_eta(ctx.scenario, workers=ctx.workers)
    ctx.write_csv("eta_curve.csv", ETA_COLUMNS, eta_rows(result.layer1_curve, result.layer0_curve))
    summary = result.model_dump(mode="json", exclude={"layer1_curve", "layer0_curve"})
    ctx.write_json("eta_optimum.json", ctx.stamp(summary))
    print(f"eta1={result.eta1} eta0={result.eta0} eta*={result.eta_star}")


COMMANDS: Dict[str, Callable[[RunContext, argparse.Namespace], None]] = {
    "simulate": cmd_simulate,
    "optimize-backup": cmd_optimize_backup,
    "optimize-alpha": cmd_optimize_alpha,
    "optimize-eta": cmd_optimize_eta,
}


def cmd_selftest(args: argparse.Namespace) -> int:
    report = run_selftest(n_sequences=args.sequences, seed=args.seed)
    sys.stdout.write(report.to_text())
    return EXIT_OK if report.passed else EXIT_SELFTEST


# Argument handling


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", type=Path, default=None, help="Scenario YAML (default: shipped scenario)"
    )
    common.add_argument(
        "--seed", type=int, default=None, help="Root seed (overrides MLBGG_SEED and the file)"
    )
    common.add_argument("--trials", type=int, default=None, help="Trials per network")
    common.add_argument("--out", type=Path, default=None, help="Output directory")
    common.add_argument(
        "--threshold-rule",
        choices=[*(r.value for r in ThresholdRule), "geq-half"],
        default=None,
        help="Attack threshold rounding (geq-half is an alias of paper-geq-half)",
    )
    common.add_argument(
        "--r1-variant",
        choices=[v.value for v in R1Variant],
        default=None,
        help="Layer-0 bursting bar under Action",
    )
    common.add_argument("--workers", type=int, default=None, help="Worker processes")
    common.add_argument("--log-level", default=None, choices=LOG_LEVELS)
    common.add_argument("--log-json", action="store_true", help="JSON console logs")

    parser = argparse.ArgumentParser(
        prog="mlbgg",
        description="Multi-layered blockchain governance game simulator and cost optimizer.",
    )
    parser.add_argument("--version", action="version", version=f"mlbgg {mlbgg.__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common], help="Run both strategies on both layers")
    backup = sub.add_parser("optimize-backup", parents=[common], help="Sweep the backup count B")
    backup.add_argument("--repeat", type=int, default=1, help="Independent seeds seed..seed+N-1")
    sub.add_parser("optimize-alpha", parents=[common], help="Sweep the acceptance rate alpha")
    sub.add_parser("optimize-eta", parents=[common], help="Sweep the pool size eta")

    selftest = sub.add_parser("selftest", help="Check the operator kernel and cost identities")
    selftest.add_argument("--sequences", type=int, default=200)
    selftest.add_argument("--seed", type=int, default=0)
    selftest.add_argument("--log-level", default=None, choices=LOG_LEVELS)
    selftest.add_argument("--log-json", action="store_true")
    return parser


def resolve_scenario(args: argparse.Namespace, settings: RuntimeSettings) -> Scenario:
    """
    Load the scenario and apply overrides: CLI flag, then environment, then file.

    Raises:
        ConfigurationError: If the file is missing or invalid, or an override is rejected
    """
    scenario = load_config(args.config or default_config_path())
    seed = args.seed if args.seed is not None else settings.seed
    out_dir = args.out if args.out is not None else settings.output_dir
    try:
        return scenario.with_overrides(
            seed=seed,
            n_trials=args.trials,
            threshold_rule=ThresholdRule(args.threshold_rule) if args.threshold_rule else None,
            r1_variant=R1Variant(args.r1_variant) if args.r1_variant else None,
            output_dir=str(out_dir) if out_dir is not None else None,
        )
    except ValidationError as e:
        errors = field_errors(e)
        raise SchemaError(
            "; ".join(f"{err['field']}: {err['message']}" for err in errors),
            details={"errors": errors},
        ) from e


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        settings = load_settings()
    except ValidationError as e:
        print(f"error: invalid MLBGG_* environment: {e}", file=sys.stderr)
        return EXIT_CONFIG

    configure_logging(args.log_level or settings.log_level, args.log_json or settings.log_json)

    if args.command == "selftest":
        return cmd_selftest(args)

    if args.command == "optimize-backup" and args.repeat < 1:
        print("error: --repeat must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    workers = args.workers if args.workers is not None else settings.workers
    if workers < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return EXIT_CONFIG

    try:
        scenario = resolve_scenario(args, settings)
    except ConfigurationError as e:
        logger.error("config.invalid", error=e.message, **e.details)
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = Path(scenario.output.directory)
    try:
        audit = AuditLogger(out_dir) if scenario.output.audit_log else None
    except OSError as e:
        print(f"error: cannot open output directory {out_dir}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    ctx = RunContext(scenario, out_dir, workers, settings.censor_warning_rate, audit)
    try:
        if audit is not None:
            audit.log_run_started(
                args.command,
                scenario.name,
                ctx.fingerprint,
                scenario.seed,
                n_trials=scenario.n_trials,
                workers=workers,
            )
        ctx.write("effective_config.yaml", ctx.provenance() + dump_config(scenario))
        COMMANDS[args.command](ctx, args)
        if audit is not None:
            audit.log_run_finished(args.command, ctx.outputs)
    except ConfigurationError as e:
        if audit is not None:
            audit.log_error(e, {"command": args.command})
        logger.error("run.config_error", command=args.command, error=e.message)
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_CONFIG
    except MLBGGError as e:
        if audit is not None:
            audit.log_error(e, {"command": args.command})
        logger.error("run.failed", command=args.command, error=e.message, **e.details)
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        if audit is not None:
            audit.close()

    logger.info("run.finished", command=args.command, outputs=sorted(ctx.outputs))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
