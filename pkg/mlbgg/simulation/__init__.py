"""Trial orchestration, worker fan-out and the simulation report."""
