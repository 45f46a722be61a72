"""
CSV and JSON writers for experiment outputs.

Column orders are fixed. Every file starts with a provenance comment line
(``# mlbgg <version> fingerprint=<sha256> seed=<seed>``) so it can be traced to
the exact run that produced it; ``csv`` readers can skip it with
``comment``-aware loaders or by dropping the first line.
"""

import csv
import io
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

from mlbgg.core.exceptions import OutputError
from mlbgg.core.models import Layer0TrialRecord, Layer1TrialRecord
from mlbgg.optimization.cost import CostCurve

BACKUP_COLUMNS = ["B", "mean_cost", "stderr", "q1_B", "censor_rate"]
ALPHA_COLUMNS = ["alpha", "eta", "mean_cost", "stderr", "r1_alpha"]
ETA_COLUMNS = ["eta", "layer", "mean_cost", "stderr", "burst_rate"]
TRIAL_COLUMNS = [
    "layer",
    "network",
    "trial",
    "strategy",
    "nu",
    "mu",
    "nu2",
    "winner",
    "tau_prev",
    "tau_nu",
    "count_prev",
    "count_at",
    "backup",
    "bar",
    "burst",
]


def provenance_line(version: str, fingerprint: str, seed: int) -> str:
    return f"# mlbgg {version} fingerprint={fingerprint} seed={seed}\n"


def _fmt(value: object) -> object:
    if value is None:
        return ""
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, float):
        return repr(value)
    return value


def render_csv(columns: Sequence[str], rows: Iterable[Dict[str, object]], header: str = "") -> str:
    """Rows as CSV text with ``\\n`` line endings, after an optional header line."""
    buf = io.StringIO()
    buf.write(header)
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row.get(k)) for k in columns})
    return buf.getvalue()


def write_text(path: Path, text: str) -> Path:
    """
    Write ``text`` to ``path``, creating parent directories.

    Raises:
        OutputError: If the file cannot be written
    """
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}", details={"path": str(path)}) from e
    return path


def backup_rows(curve: CostCurve) -> List[Dict[str, object]]:
    return [
        {
            "B": int(p.value),
            "mean_cost": p.mean_cost,
            "stderr": p.stderr,
            "q1_B": p.burst_rate,
            "censor_rate": p.censor_rate,
        }
        for p in curve.points
    ]


def alpha_rows(curves: Sequence[CostCurve]) -> List[Dict[str, object]]:
    return [
        {
            "alpha": p.value,
            "eta": p.eta,
            "mean_cost": p.mean_cost,
            "stderr": p.stderr,
            "r1_alpha": p.burst_rate,
        }
        for curve in curves
        for p in curve.points
    ]


def eta_rows(layer1: CostCurve, layer0: CostCurve) -> List[Dict[str, object]]:
    rows = []
    for layer, curve in (("1", layer1), ("0", layer0)):
        for p in curve.points:
            rows.append(
                {
                    "eta": int(p.value),
                    "layer": layer,
                    "mean_cost": p.mean_cost,
                    "stderr": p.stderr,
                    "burst_rate": p.burst_rate,
                }
            )
    return rows


def trial_rows(
    layer1: Sequence[Layer1TrialRecord], layer0: Sequence[Layer0TrialRecord]
) -> List[Dict[str, object]]:
    rows: List[Dict[str, object]] = []
    for r in layer1:
        o = r.outcome
        rows.append(
            {
                "layer": 1,
                "network": r.network,
                "trial": r.trial,
                "strategy": r.strategy.value,
                "nu": o.nu,
                "mu": o.mu,
                "nu2": o.nu2,
                "winner": o.winner.value,
                "tau_prev": o.tau_nu_minus_1,
                "tau_nu": o.tau_nu,
                "count_prev": o.a_prev,
                "count_at": o.a_at,
                "backup": r.backup,
                "bar": None,
                "burst": r.burst,
            }
        )
    for r in layer0:
        o = r.outcome
        rows.append(
            {
                "layer": 0,
                "network": 0,
                "trial": r.trial,
                "strategy": r.strategy.value,
                "nu": o.nu,
                "mu": o.mu,
                "nu2": o.nu2,
                "winner": o.winner.value,
                "tau_prev": o.tau_nu_minus_1,
                "tau_nu": o.tau_nu,
                "count_prev": r.c_prev,
                "count_at": r.c_at,
                "backup": None,
                "bar": r.bar,
                "burst": r.burst,
            }
        )
    return rows


def write_csv(
    path: Path,
    columns: Sequence[str],
    rows: Iterable[Dict[str, object]],
    provenance: Optional[str] = None,
) -> Path:
    return write_text(path, render_csv(columns, rows, provenance or ""))
