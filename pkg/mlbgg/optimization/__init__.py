"""Cost model and grid-search optimizers."""

from mlbgg.optimization.cost import (
    CostCurve,
    CostPoint,
    layer0_total_cost,
    layer1_total_cost,
)
from mlbgg.optimization.optimizer import (
    AlphaOptimum,
    BackupOptimum,
    EtaOptimum,
    optimize_alpha,
    optimize_backup,
    optimize_eta,
)

__all__ = [
    "CostCurve",
    "CostPoint",
    "layer0_total_cost",
    "layer1_total_cost",
    "AlphaOptimum",
    "BackupOptimum",
    "EtaOptimum",
    "optimize_alpha",
    "optimize_backup",
    "optimize_eta",
]
