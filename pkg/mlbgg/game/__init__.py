"""Exit game adjudication and the two governance layers."""

from mlbgg.game.exit_game import (
    GameStage,
    adjudicate,
    decision_epoch,
    exit_index,
    exit_index_allied,
)
from mlbgg.game.layer0 import (
    Layer0Races,
    bursting_probability_layer0,
    compound_poisson_pmf,
    pmf_c_prev,
    simulate_layer0,
)
from mlbgg.game.layer1 import (
    NetworkRaces,
    bursting_probability,
    estimate_rho1,
    sample_backup,
    simulate_network,
)

__all__ = [
    "GameStage",
    "adjudicate",
    "decision_epoch",
    "exit_index",
    "exit_index_allied",
    "Layer0Races",
    "bursting_probability_layer0",
    "compound_poisson_pmf",
    "pmf_c_prev",
    "simulate_layer0",
    "NetworkRaces",
    "bursting_probability",
    "estimate_rho1",
    "sample_backup",
    "simulate_network",
]
