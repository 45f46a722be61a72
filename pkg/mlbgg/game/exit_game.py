"""
Exit indices and confined-game adjudication for one attacker-vs-honest race.

Exit indices count observation epochs (positions in the schedule); all times are
read back from the schedule. ``None`` marks a censored index (never reached).
"""

from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from mlbgg.core.exceptions import DimensionError, ParameterError, PathInvariantError
from mlbgg.core.models import ExitOutcome, ObservationSchedule, Threshold, Winner

PathLike = Union[np.ndarray, Sequence[int]]


class GameStage(str, Enum):
    """Sentinel for exits that happen before the first decision epoch."""

    PRE_GAME = "pre-game"


def _as_path(path: PathLike) -> np.ndarray:
    arr = np.asarray(path, dtype=np.int64)
    if arr.size > 1 and np.any(arr[1:] < arr[:-1]):
        raise PathInvariantError(
            "cumulative path decreases",
            details={"first_drop": int(np.flatnonzero(arr[1:] < arr[:-1])[0]) + 1},
        )
    return arr


def first_at_least(path: np.ndarray, bar: int) -> Optional[int]:
    """Smallest k with path[k] >= bar, or None."""
    hits = np.flatnonzero(path >= bar)
    return int(hits[0]) if hits.size else None


def exit_index(path: PathLike, threshold: Threshold) -> Optional[int]:
    """
    Smallest k with path[k] >= T_A; None when the path never gets there.

    Raises:
        PathInvariantError: If the path decreases
    """
    return first_at_least(_as_path(path), threshold.attack_threshold)


def exit_index_allied(path: PathLike, threshold: Threshold, B: int) -> Optional[int]:
    """
    Exit index against the alliance-raised bar: smallest j with path[j] - B >= T_A.

    Raises:
        ParameterError: If B is negative
        PathInvariantError: If the path decreases
    """
    if B < 0:
        raise ParameterError("backup count must be nonnegative", details={"B": B})
    return first_at_least(_as_path(path), threshold.attack_threshold + B)


def _precedes(first: Optional[int], second: Optional[int]) -> bool:
    # ties go to the second player
    return first is not None and (second is None or first < second)


def adjudicate(
    attacker_path: PathLike,
    honest_path: PathLike,
    thr_attacker: Threshold,
    thr_honest: Threshold,
    B: Optional[int] = None,
    schedule: Optional[ObservationSchedule] = None,
) -> ExitOutcome:
    """
    Decide the race and extract boundary values around the attacker exit.

    Without an alliance the attacker wins iff nu < mu. With B supplied, an attacker
    already over the bar at epoch 0 still wins immediately; otherwise it wins only
    if nu2 (the raised bar) comes strictly before mu. Ties go to the honest side.

    Raises:
        DimensionError: If the paths (or the schedule) differ in length
    """
    a = _as_path(attacker_path)
    h = _as_path(honest_path)
    if a.size != h.size or (schedule is not None and schedule.count != a.size):
        raise DimensionError(
            "paths and schedule must share one length",
            details={
                "attacker": int(a.size),
                "honest": int(h.size),
                "schedule": None if schedule is None else schedule.count,
            },
        )

    nu = first_at_least(a, thr_attacker.attack_threshold)
    mu = first_at_least(h, thr_honest.attack_threshold)
    nu2 = None
    effective = nu
    if B is not None:
        if B < 0:
            raise ParameterError("backup count must be nonnegative", details={"B": B})
        nu2 = first_at_least(a, thr_attacker.attack_threshold + B)
        effective = nu if nu == 0 else nu2

    if _precedes(effective, mu):
        winner = Winner.ATTACKER
    elif mu is not None:
        winner = Winner.HONEST
    else:
        winner = Winner.CENSORED

    a_prev = a_at = h_prev = h_at = None
    tau_nu = tau_prev = None
    if nu is not None:
        a_at, h_at = int(a[nu]), int(h[nu])
        if schedule is not None:
            tau_nu = schedule.epoch(nu)
        if nu >= 1:
            a_prev, h_prev = int(a[nu - 1]), int(h[nu - 1])
            if schedule is not None:
                tau_prev = schedule.epoch(nu - 1)

    return ExitOutcome(
        nu=nu,
        mu=mu,
        nu2=nu2,
        winner=winner,
        tau_nu=tau_nu,
        tau_nu_minus_1=tau_prev,
        a_prev=a_prev,
        a_at=a_at,
        h_prev=h_prev,
        h_at=h_at,
        burst=winner is Winner.ATTACKER,
    )


def decision_epoch(
    outcome: ExitOutcome, schedule: ObservationSchedule
) -> Union[float, GameStage]:
    """
    The decision moment tau_{nu-1}, read from the schedule.

    Returns GameStage.PRE_GAME when nu == 0: the network is already compromised
    and there is no earlier epoch to act on.

    Raises:
        ParameterError: If the outcome is censored (no exit)
    """
    if outcome.nu is None:
        raise ParameterError("censored outcome has no decision epoch")
    if outcome.nu == 0:
        return GameStage.PRE_GAME
    return schedule.epoch(outcome.nu - 1)
