"""Tests for the bivariate transform operator and its inverse."""

import numpy as np
import pytest
from pydantic import ValidationError

from mlbgg.algebra.operators import (
    BivariateSeq,
    IndexMatrix,
    TransformPoly,
    inverse_d,
    matrix_inverse,
    matrix_transform,
    transform_d,
)
from mlbgg.core.exceptions import DimensionError


class TestTransform:
    def test_point_mass_at_origin(self):
        G = transform_d(BivariateSeq.point_mass(0, 0))

        assert G.terms == {(0, 0): 1.0, (1, 0): -1.0, (0, 1): -1.0, (1, 1): 1.0}
        assert G.degree == (1, 1)

    def test_canonical_text(self):
        G = transform_d(BivariateSeq.point_mass(0, 0))

        assert G.to_text() == "1.0*u^0*v^0 - 1.0*u^0*v^1 - 1.0*u^1*v^0 + 1.0*u^1*v^1"

    def test_zero_polynomial_text(self):
        assert TransformPoly().to_text() == "0"

    def test_linearity(self):
        f = BivariateSeq(support={(0, 1): 2.0, (2, 0): -1.5})
        g = BivariateSeq(support={(1, 1): 0.5})

        combined = transform_d(f.scaled(3.0) + g)
        separate = transform_d(f).scaled(3.0) + transform_d(g)

        assert combined.terms == pytest.approx(separate.terms)

    def test_product_with_factor_inverse_is_identity(self):
        # (1 - u)(1 - v) * 1 == D(point mass at origin)
        factor = TransformPoly(terms={(0, 0): 1.0, (1, 0): -1.0})
        other = TransformPoly(terms={(0, 0): 1.0, (0, 1): -1.0})

        assert (factor * other).terms == transform_d(BivariateSeq.point_mass(0, 0)).terms


class TestInverse:
    def test_recovers_every_grid_value(self):
        rng = np.random.default_rng(3)
        values = rng.uniform(-1.0, 1.0, size=(5, 4))
        f = BivariateSeq.from_array(values)
        G = transform_d(f)

        for m in range(5):
            for n in range(4):
                assert inverse_d(G, m, n) == pytest.approx(values[m, n], abs=1e-12)

    def test_negative_index_is_zero(self):
        G = transform_d(BivariateSeq.point_mass(1, 1, 2.0))

        assert inverse_d(G, -1, 0) == 0.0
        assert inverse_d(G, 0, -3) == 0.0

    def test_outside_support_is_zero(self):
        G = transform_d(BivariateSeq.point_mass(1, 1, 2.0))

        assert inverse_d(G, 3, 3) == pytest.approx(0.0, abs=1e-12)

    def test_vectorized_matches_scalar(self):
        fs = [
            BivariateSeq(support={(0, 0): 1.0, (1, 2): 4.0}),
            BivariateSeq(support={(3, 1): -2.0}),
        ]
        rows = [(1, 2), (3, 1)]

        got = matrix_inverse(matrix_transform(fs), IndexMatrix(rows=rows))

        assert got == pytest.approx([4.0, -2.0], abs=1e-12)

    def test_vectorized_accepts_plain_rows(self):
        fs = [BivariateSeq.point_mass(0, 0, 5.0)]

        assert matrix_inverse(matrix_transform(fs), [(0, 0)]) == pytest.approx([5.0])

    def test_vectorized_length_mismatch(self):
        polys = matrix_transform([BivariateSeq.point_mass(0, 0)])

        with pytest.raises(DimensionError):
            matrix_inverse(polys, [(0, 0), (1, 1)])


class TestBivariateSeq:
    def test_absent_keys_are_zero(self):
        f = BivariateSeq(support={(1, 2): 3.0})

        assert f(1, 2) == 3.0
        assert f(0, 0) == 0.0
        assert (f.max_x, f.max_y) == (1, 2)

    def test_zero_coefficients_dropped(self):
        f = BivariateSeq(support={(0, 0): 0.0, (1, 0): 1.0})

        assert f.support == {(1, 0): 1.0}

    def test_negative_key_rejected(self):
        with pytest.raises(ValidationError):
            BivariateSeq(support={(-1, 0): 1.0})

    def test_key_outside_bounds_rejected(self):
        with pytest.raises(ValidationError):
            BivariateSeq(support={(3, 0): 1.0}, max_x=2, max_y=0)

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            BivariateSeq(support={(0, 0): float("nan")})
