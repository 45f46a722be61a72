"""Bivariate transform operator algebra."""

from mlbgg.algebra.operators import (
    BivariateSeq,
    IndexMatrix,
    TransformPoly,
    inverse_d,
    matrix_inverse,
    matrix_transform,
    transform_d,
)

__all__ = [
    "BivariateSeq",
    "IndexMatrix",
    "TransformPoly",
    "inverse_d",
    "matrix_inverse",
    "matrix_transform",
    "transform_d",
]
