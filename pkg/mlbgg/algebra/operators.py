"""
Bivariate transform operator D and its inverse.

D maps a finitely supported sequence f(x, y) to the polynomial

    (1 - u)(1 - v) * sum_{x,y} f(x, y) u^x v^y

and the inverse recovers f(m, n) as the (m, n) coefficient of G / ((1-u)(1-v)).
Because 1 / ((1-u)(1-v)) = sum_{i,j} u^i v^j, that coefficient is the rectangular
prefix sum of G's coefficients over a <= m, b <= n; it is computed exactly from the
sparse coefficient map, never by numerical differentiation.
"""

import math
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from mlbgg.core.exceptions import DimensionError

Monomial = Tuple[int, int]

_FACTOR: Tuple[Tuple[Monomial, float], ...] = (
    ((0, 0), 1.0),
    ((1, 0), -1.0),
    ((0, 1), -1.0),
    ((1, 1), 1.0),
)


def _check_terms(terms: Mapping[Monomial, float]) -> Dict[Monomial, float]:
    clean: Dict[Monomial, float] = {}
    for (x, y), c in terms.items():
        if x < 0 or y < 0:
            raise ValueError(f"negative exponent in key ({x}, {y})")
        if not math.isfinite(c):
            raise ValueError(f"non-finite coefficient at ({x}, {y})")
        if c != 0.0:
            clean[(int(x), int(y))] = float(c)
    return clean


class BivariateSeq(BaseModel):
    """Finitely supported sequence f(x, y); absent keys are zero."""

    model_config = ConfigDict(frozen=True)

    support: Dict[Monomial, float] = Field(default_factory=dict)
    max_x: int = Field(default=0, ge=0)
    max_y: int = Field(default=0, ge=0)

    @field_validator("support")
    @classmethod
    def validate_support(cls, v: Dict[Monomial, float]) -> Dict[Monomial, float]:
        return _check_terms(v)

    @model_validator(mode="before")
    @classmethod
    def default_bounds(cls, data: dict) -> dict:
        if isinstance(data, dict):
            keys = list(data.get("support", {}))
            data.setdefault("max_x", max((k[0] for k in keys), default=0))
            data.setdefault("max_y", max((k[1] for k in keys), default=0))
        return data

    @model_validator(mode="after")
    def check_bounds(self) -> "BivariateSeq":
        for x, y in self.support:
            if x > self.max_x or y > self.max_y:
                raise ValueError(f"key ({x}, {y}) outside bounds ({self.max_x}, {self.max_y})")
        return self

    @classmethod
    def point_mass(cls, x: int, y: int, coefficient: float = 1.0) -> "BivariateSeq":
        return cls(support={(x, y): coefficient})

    @classmethod
    def from_array(cls, values: np.ndarray) -> "BivariateSeq":
        """Build from a dense array indexed [x, y]."""
        arr = np.asarray(values, dtype=np.float64)
        support = {(int(x), int(y)): float(arr[x, y]) for x, y in zip(*np.nonzero(arr))}
        return cls(support=support, max_x=arr.shape[0] - 1, max_y=arr.shape[1] - 1)

    def __call__(self, x: int, y: int) -> float:
        return self.support.get((x, y), 0.0)

    def scaled(self, a: float) -> "BivariateSeq":
        return BivariateSeq(
            support={k: a * c for k, c in self.support.items()},
            max_x=self.max_x,
            max_y=self.max_y,
        )

    def __add__(self, other: "BivariateSeq") -> "BivariateSeq":
        terms = dict(self.support)
        for k, c in other.support.items():
            terms[k] = terms.get(k, 0.0) + c
        return BivariateSeq(
            support=terms,
            max_x=max(self.max_x, other.max_x),
            max_y=max(self.max_y, other.max_y),
        )


class TransformPoly(BaseModel):
    """Exact bivariate polynomial in (u, v) as a sparse (deg_u, deg_v) -> coefficient map."""

    model_config = ConfigDict(frozen=True)

    terms: Dict[Monomial, float] = Field(default_factory=dict)

    @field_validator("terms")
    @classmethod
    def validate_terms(cls, v: Dict[Monomial, float]) -> Dict[Monomial, float]:
        return _check_terms(v)

    @property
    def degree(self) -> Monomial:
        if not self.terms:
            return (0, 0)
        return (max(k[0] for k in self.terms), max(k[1] for k in self.terms))

    def coefficient(self, a: int, b: int) -> float:
        return self.terms.get((a, b), 0.0)

    def scaled(self, a: float) -> "TransformPoly":
        return TransformPoly(terms={k: a * c for k, c in self.terms.items()})

    def __add__(self, other: "TransformPoly") -> "TransformPoly":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0.0) + c
        return TransformPoly(terms=terms)

    def __mul__(self, other: "TransformPoly") -> "TransformPoly":
        terms: Dict[Monomial, float] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                terms[key] = terms.get(key, 0.0) + c1 * c2
        return TransformPoly(terms=terms)

    def to_text(self) -> str:
        """Canonical dump: terms sorted by (deg_u, deg_v), e.g. ``1*u^0*v^0 - 1*u^1*v^0``."""
        if not self.terms:
            return "0"
        parts: List[str] = []
        for (a, b) in sorted(self.terms):
            c = self.terms[(a, b)]
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {abs(c)!r}*u^{a}*v^{b}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


class IndexMatrix(BaseModel):
    """Per-row (m_l, n_l) indices for the vectorized inverse."""

    model_config = ConfigDict(frozen=True)

    rows: List[Monomial] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)


def transform_d(f: BivariateSeq) -> TransformPoly:
    """
    Apply D: multiply the generating polynomial of f by (1 - u)(1 - v).

    The result has degree bounds (max_x + 1, max_y + 1).
    """
    terms: Dict[Monomial, float] = {}
    for (x, y), c in f.support.items():
        for (dx, dy), sign in _FACTOR:
            key = (x + dx, y + dy)
            terms[key] = terms.get(key, 0.0) + sign * c
    return TransformPoly(terms=terms)


def inverse_d(G: TransformPoly, m: int, n: int) -> float:
    """
    Apply the inverse operator at (m, n).

    Returns the (m, n) coefficient of the series G(u, v) / ((1-u)(1-v)) truncated at
    order (m, n); zero whenever m < 0 or n < 0.
    """
    if m < 0 or n < 0:
        return 0.0
    return math.fsum(c for (a, b), c in G.terms.items() if a <= m and b <= n)


def matrix_transform(fs: Sequence[BivariateSeq]) -> List[TransformPoly]:
    """Elementwise D over a function vector, order preserved."""
    return [transform_d(f) for f in fs]


def matrix_inverse(Gs: Sequence[TransformPoly], M: IndexMatrix | Iterable[Monomial]) -> List[float]:
    """
    Elementwise inverse with per-row indices.

    Raises:
        DimensionError: If the polynomial vector and index matrix differ in length
    """
    rows = list(M.rows) if isinstance(M, IndexMatrix) else list(M)
    if len(rows) != len(Gs):
        raise DimensionError(
            f"index matrix has {len(rows)} rows for {len(Gs)} polynomials",
            details={"rows": len(rows), "polynomials": len(Gs)},
        )
    return [inverse_d(G, m, n) for G, (m, n) in zip(Gs, rows)]
