"""
mlbgg - Monte Carlo simulator and cost optimizer for multi-layered blockchain governance games.

Layer 1 is a set of eta + 1 BGG networks that can call in backup nodes one
observation before an attacker takeover; layer 0 is a single SABGG network
protected by a strategic alliance. The package simulates 51% attack races on
both layers, estimates decision epochs and bursting probabilities, and sweeps
the backup count and alliance acceptance rate for the cheapest safety mode.
"""

from mlbgg.core.scenario import CostParams, Scenario
from mlbgg.simulation.engine import MonteCarloEngine, run_trials
from mlbgg.simulation.report import SimulationReport

__version__ = "0.1.0"

__all__ = [
    "CostParams",
    "Scenario",
    "MonteCarloEngine",
    "run_trials",
    "SimulationReport",
]
