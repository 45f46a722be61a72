"""
Self-test of the operator kernel and the cost identities.

Properties checked:
- composition: inverse_d(transform_d(f), m, n) == f(m, n) on random sequences
- vectorized composition: matrix_inverse(matrix_transform(fs), rows) recovers f at each row
- action-cost identity: c1 * (1 - q1) + (c1 + V) * q1 == c1 + V * q1
- layer-0 cost on a hand-computed case

The scalar transform and inverse are injectable so a perturbed kernel can be shown
to fail with the property it breaks.
"""

import time
from typing import Callable, List, Optional

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from mlbgg.algebra.operators import (
    BivariateSeq,
    IndexMatrix,
    TransformPoly,
    inverse_d,
    matrix_inverse,
    matrix_transform,
    transform_d,
)
from mlbgg.core.exceptions import SelfTestFailure
from mlbgg.core.scenario import CostParams
from mlbgg.kernel.rng import StreamPurpose, substream
from mlbgg.optimization.cost import action_cost_long, action_cost_short, layer0_total_cost

logger = structlog.get_logger(__name__)

TransformFn = Callable[[BivariateSeq], TransformPoly]
InverseFn = Callable[[TransformPoly, int, int], float]

TOLERANCE = 1e-12


class PropertyResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    checked: int = Field(..., ge=0)
    detail: str = ""


class SelfTestReport(BaseModel):
    """Outcome of every property, in the order they ran."""

    model_config = ConfigDict(frozen=True)

    properties: List[PropertyResult]
    seconds: float = Field(..., ge=0.0)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)

    @property
    def failures(self) -> List[PropertyResult]:
        return [p for p in self.properties if not p.passed]

    def raise_for_failure(self) -> None:
        """
        Raises:
            SelfTestFailure: Naming the first failed property
        """
        if self.failures:
            first = self.failures[0]
            raise SelfTestFailure(
                f"self-test property failed: {first.name} ({first.detail})",
                details={"failed": [p.name for p in self.failures]},
            )

    def to_text(self) -> str:
        lines = []
        for p in self.properties:
            line = f"{'PASS' if p.passed else 'FAIL'} {p.name} ({p.checked} checks)"
            lines.append(f"{line}: {p.detail}" if p.detail else line)
        lines.append(f"{'ok' if self.passed else 'FAILED'} in {self.seconds:.3f}s")
        return "\n".join(lines) + "\n"


def random_sequence(rng: np.random.Generator, max_side: int = 8) -> BivariateSeq:
    """Random finitely supported sequence on a grid of at most max_side x max_side."""
    nx, ny = rng.integers(1, max_side + 1, size=2)
    values = rng.uniform(-1.0, 1.0, size=(nx, ny))
    values[rng.random((nx, ny)) < 0.3] = 0.0
    return BivariateSeq.from_array(values)


def check_composition(
    sequences: List[BivariateSeq],
    transform: TransformFn = transform_d,
    inverse: InverseFn = inverse_d,
) -> PropertyResult:
    checked = 0
    for i, f in enumerate(sequences):
        G = transform(f)
        for m in range(f.max_x + 1):
            for n in range(f.max_y + 1):
                checked += 1
                got = inverse(G, m, n)
                if abs(got - f(m, n)) > TOLERANCE:
                    return PropertyResult(
                        name="composition",
                        passed=False,
                        checked=checked,
                        detail=f"sequence {i} at ({m}, {n}): {got!r} != {f(m, n)!r}",
                    )
    return PropertyResult(name="composition", passed=True, checked=checked)


def check_vectorized(sequences: List[BivariateSeq]) -> PropertyResult:
    # one (m, n) row per sequence: its upper corner
    rows = [(f.max_x, f.max_y) for f in sequences]
    got = matrix_inverse(matrix_transform(sequences), IndexMatrix(rows=rows))
    for i, (value, f, (m, n)) in enumerate(zip(got, sequences, rows)):
        if abs(value - f(m, n)) > TOLERANCE:
            return PropertyResult(
                name="vectorized-composition",
                passed=False,
                checked=i + 1,
                detail=f"row {i} at ({m}, {n}): {value!r} != {f(m, n)!r}",
            )
    return PropertyResult(name="vectorized-composition", passed=True, checked=len(rows))


def check_action_cost_identity(rng: np.random.Generator, samples: int = 1000) -> PropertyResult:
    c1 = rng.uniform(0.0, 100.0, samples)
    value = rng.uniform(0.0, 1000.0, samples)
    q1 = rng.uniform(0.0, 1.0, samples)
    for i in range(samples):
        long_form = action_cost_long(c1[i], value[i], q1[i])
        short_form = action_cost_short(c1[i], value[i], q1[i])
        if abs(long_form - short_form) > TOLERANCE * max(1.0, abs(short_form)):
            return PropertyResult(
                name="action-cost-identity",
                passed=False,
                checked=i + 1,
                detail=f"{long_form!r} != {short_form!r}",
            )
    return PropertyResult(name="action-cost-identity", passed=True, checked=samples)


def check_layer0_cost() -> PropertyResult:
    # U0 = 20, c0 = c_a * alpha * eta = 4, r1 = 0.05, r0 = 0.5, p = 0.8 -> 6.0
    params = CostParams(network_value=1.0, layer0_value=20.0, alliance_unit_cost=4.0)
    got = layer0_total_cost(params, alpha=1.0, eta=1, r0=0.5, r1a=0.05, pc_prev=0.8)
    passed = abs(got - 6.0) <= TOLERANCE
    return PropertyResult(
        name="layer0-cost",
        passed=passed,
        checked=1,
        detail="" if passed else f"{got!r} != 6.0",
    )


def run_selftest(
    n_sequences: int = 200,
    seed: int = 0,
    transform: Optional[TransformFn] = None,
    inverse: Optional[InverseFn] = None,
) -> SelfTestReport:
    """
    Run every property and collect the results.

    Args:
        n_sequences: Random sequences for the composition checks
        seed: Root seed of the random inputs
        transform: Replacement for transform_d
        inverse: Replacement for inverse_d

    Returns:
        SelfTestReport; call ``raise_for_failure`` to turn failures into an exception
    """
    started = time.perf_counter()
    transform = transform or transform_d
    inverse = inverse or inverse_d

    rng = substream(seed, StreamPurpose.SELFTEST, 0)
    sequences = [random_sequence(rng) for _ in range(n_sequences)]
    properties = [
        check_composition(sequences, transform, inverse),
        check_vectorized(sequences),
        check_action_cost_identity(substream(seed, StreamPurpose.SELFTEST, 1)),
        check_layer0_cost(),
    ]
    report = SelfTestReport(properties=properties, seconds=time.perf_counter() - started)
    logger.info(
        "selftest.finished",
        passed=report.passed,
        failed=[p.name for p in report.failures],
        seconds=round(report.seconds, 3),
    )
    return report
