import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from isoladder.numerics import (
    SQRT_PI,
    build_grid,
    erf,
    erfc,
    grid_norm,
    hermite_function,
    hermite_table,
    inner_product,
)


def erf_taylor_oracle(x, terms=30):
    # alternating Maclaurin series (2/sqrt(pi)) sum (-1)^k x^{2k+1} / (k! (2k+1))
    total = 0.0
    for k in range(terms):
        total += (-1) ** k * x ** (2 * k + 1) / (math.factorial(k) * (2 * k + 1))
    return 2.0 / SQRT_PI * total


class TestErf:
    def test_zero(self):
        assert erf(0.0) == 0.0

    def test_limit_at_six(self):
        assert abs(erf(6.0) - 1.0) < 1e-12

    def test_value_at_one_vs_taylor_oracle(self):
        assert abs(erf(1.0) - erf_taylor_oracle(1.0)) < 1e-14
        assert abs(erf(1.0) - 0.842700792949715) < 1e-12

    @pytest.mark.parametrize("x", [0.01, 0.5, 1.0, 2.0, 2.9, 3.0, 3.1, 4.0, 7.5, 12.0, 25.0])
    def test_against_stdlib(self, x):
        assert abs(erf(x) - math.erf(x)) < 1e-13
        assert abs(erfc(x) - math.erfc(x)) < 1e-13 * max(1.0, math.erfc(x) * 1e13)

    @given(st.floats(min_value=-20, max_value=20, allow_nan=False))
    def test_odd(self, x):
        assert erf(x) + erf(-x) == 0.0

    def test_monotone(self):
        # strict monotonicity holds until erfc saturates below double resolution (~|x| > 5.8)
        xs = np.linspace(-5, 5, 201)
        vals = [erf(float(x)) for x in xs]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            erf(math.nan)


def hermite_polynomial_oracle(n, x):
    # Explicit physicists' Hermite polynomial, then normalize.
    h = [1.0, 2.0 * x]
    for k in range(1, n):
        h.append(2.0 * x * h[k] - 2.0 * k * h[k - 1])
    return h[n] * math.exp(-0.5 * x * x) / (math.pi**0.25 * math.sqrt(2.0**n * math.factorial(n)))


class TestHermiteFunction:
    def test_ground_state_at_origin(self):
        assert abs(hermite_function(0, 0.0) - math.pi**-0.25) < 1e-15

    def test_first_excited_odd(self):
        assert hermite_function(1, 0.0) == 0.0

    def test_against_polynomial_oracle(self):
        assert abs(hermite_function(4, 1.5) - hermite_polynomial_oracle(4, 1.5)) < 1e-12

    @pytest.mark.parametrize("n", range(11))
    def test_recurrence_matches_polynomials(self, n):
        for x in (-2.3, -0.7, 0.4, 1.1, 3.2):
            assert abs(hermite_function(n, x) - hermite_polynomial_oracle(n, x)) < 1e-12

    def test_rejects_negative_index(self):
        with pytest.raises(ValueError):
            hermite_function(-1, 0.0)


class TestGrid:
    def test_half_width_formula(self):
        g = build_grid(64)
        assert abs(g.half_width - (math.sqrt(128.0) + 8.0)) < 1e-12
        assert g.node_count == 4000
        assert np.allclose(g.points, -g.points[::-1])

    def test_rejects_small_truncation(self):
        with pytest.raises(ValueError):
            build_grid(7)

    def test_ground_state_normalization(self):
        g = build_grid(16)
        t = hermite_table(g, 0)
        assert abs(inner_product(t.values[0], t.values[0], g) - 1.0) < 1e-10

    def test_orthogonality_psi3_psi5(self):
        g = build_grid(16)
        t = hermite_table(g, 5)
        assert abs(inner_product(t.values[3], t.values[5], g)) < 1e-10

    def test_gaussian_integral(self):
        g = build_grid(16)
        gauss = np.exp(-g.points**2)
        assert abs(inner_product(gauss, np.ones_like(gauss), g) - math.sqrt(math.pi)) < 1e-10

    def test_orthonormality_residual_N64(self):
        g = build_grid(64)
        t = hermite_table(g, 63)
        gram = t.values @ (g.weights[None, :] * t.values).T
        assert np.max(np.abs(gram[:63, :63] - np.eye(64)[:63, :63])) < 1e-9
        # tighter table invariant on m, n <= max_index - 2
        assert np.max(np.abs(gram[:62, :62] - np.eye(64)[:62, :62])) < 1e-10

    def test_length_mismatch(self):
        g = build_grid(16)
        with pytest.raises(ValueError):
            inner_product(np.ones(3), np.ones(g.node_count), g)

    def test_grid_norm(self):
        g = build_grid(16)
        t = hermite_table(g, 2)
        assert abs(grid_norm(t.values[2], g) - 1.0) < 1e-10
