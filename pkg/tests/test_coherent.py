import math

import numpy as np
import pytest

from isoladder.coherent import (
    CSSpec,
    DivergenceError,
    TruncationError,
    bargmann_transform,
    cs_vector,
    d_coefficients,
    displacement_operator,
    generalized_cs,
    h_tilde_1,
    normalization_h,
    order_estimate,
    q_factorial,
    radius_of_convergence,
)
from isoladder.fock import (
    StateVector,
    adjoint,
    apply_operator,
    commutator,
    interior_max_abs,
    theta_tag,
)
from isoladder.ladder import (
    constant_weights,
    distorted_weights,
    geometric_weights,
    ladder_matrices,
    linear_weights,
    power_law_weights,
    single_weight,
)

TAG = theta_tag(2.0)


@pytest.fixture(scope="module")
def pair():
    return ladder_matrices(constant_weights(1.0), 64, TAG)


class TestDCoefficients:
    def test_unit_weights_inverse_factorials(self):
        d = d_coefficients(constant_weights(1.0), 12)
        expected = [1.0 / math.factorial(n) for n in range(12)]
        assert np.allclose(d, expected, rtol=1e-12)

    def test_case_i_scaling(self):
        w = 3.0
        d = d_coefficients(constant_weights(w), 10)
        expected = [1.0 / (w**n * math.factorial(n)) for n in range(10)]
        assert np.allclose(d, expected, rtol=1e-12)

    def test_case_iii_closed_form(self):
        d = d_coefficients(linear_weights(), 10)
        expected = [2.0**n / (math.factorial(n) * math.factorial(n + 1)) for n in range(10)]
        assert np.allclose(d, expected, rtol=1e-12)

    def test_zero_weight_sum_truncates_prefix(self):
        from isoladder.ladder import custom_weights

        d = d_coefficients(custom_weights([0.0, 1.0, 1.0]), 4)
        assert list(d) == [1.0]

    def test_no_overflow_at_1e4(self):
        from isoladder.coherent import log_d_coefficients

        logs = log_d_coefficients(geometric_weights(1.3), 10_001)
        assert np.all(np.isfinite(logs))


class TestNormalization:
    def test_unit_weights_exponential(self):
        for t in (0.0, 0.5, 2.3, 4.0):
            assert normalization_h(t, constant_weights(1.0)) == pytest.approx(math.exp(t), rel=1e-12)

    def test_case_iv_geometric_sum(self):
        w = 2.0
        for t in (0.2, 1.0, 1.9):
            assert normalization_h(t, single_weight(w)) == pytest.approx(w / (w - t), rel=1e-11)

    def test_geometric_q_half_against_direct_sum(self):
        q, t = 0.5, 0.5
        W = geometric_weights(q).partial_sum_array(10_000)
        direct = 1.0
        term = 1.0
        for n in range(10_000):
            term *= t / W[n]
            direct += term
            if term < 1e-17 * direct:
                break
        assert normalization_h(t, geometric_weights(q)) == pytest.approx(direct, rel=1e-12)

    def test_divergence_beyond_radius(self):
        with pytest.raises(DivergenceError) as err:
            normalization_h(2.5, single_weight(2.0))
        assert "radius" in str(err.value)


class TestCSVector:
    def test_zeta_zero_is_theta1(self):
        cs = cs_vector(CSSpec(0.0, constant_weights(1.0), 32), TAG)
        assert np.linalg.norm(cs.coeffs - np.eye(32)[1]) < 1e-14

    @pytest.mark.parametrize(
        "weights,zeta",
        [
            (constant_weights(2.0), 2.0),
            (distorted_weights(0.5), 1.0 + 0.5j),
            (linear_weights(), 2.0j),
            (single_weight(2.0), 0.8),
            (geometric_weights(0.7), 0.8 - 0.2j),
            (geometric_weights(1.3), 1.5),
        ],
    )
    def test_unit_norm(self, weights, zeta):
        cs = cs_vector(CSSpec(zeta, weights, 64), TAG)
        assert cs.norm() == pytest.approx(1.0, abs=1e-10)

    def test_eigen_residual(self):
        weights = constant_weights(1.0)
        low, _ = ladder_matrices(weights, 64, TAG)
        cs = cs_vector(CSSpec(1.0 + 0.5j, weights, 64), TAG)
        moved = apply_operator(low, cs)
        assert np.linalg.norm(moved.coeffs - (1.0 + 0.5j) * cs.coeffs) < 1e-6

    def test_unit_weight_coefficients_are_standard(self):
        zeta = 1.0 + 0.5j
        cs = cs_vector(CSSpec(zeta, constant_weights(1.0), 64), TAG)
        t = abs(zeta) ** 2
        for n in (0, 1, 2, 7):
            expected = math.exp(-t / 2.0) * zeta**n / math.sqrt(math.factorial(n))
            assert cs.coeffs[n + 1] == pytest.approx(expected, abs=1e-12)

    def test_truncation_guard(self):
        with pytest.raises(TruncationError):
            cs_vector(CSSpec(1.0 + 0.5j, constant_weights(1.0), 12), TAG)

    def test_residual_decreases_with_truncation(self):
        weights = linear_weights()
        zeta = 1.0 + 0.5j
        res = {}
        for N in (48, 96):
            low, _ = ladder_matrices(weights, N, TAG)
            cs = cs_vector(CSSpec(zeta, weights, N), TAG)
            moved = apply_operator(low, cs)
            res[N] = np.linalg.norm(moved.coeffs - zeta * cs.coeffs)
        assert res[96] < max(res[48], 1e-12)  # monotone, or both at rounding floor


class TestBargmann:
    def test_theta1_maps_to_constant_one(self):
        psi = StateVector(np.eye(16)[1], TAG)
        vals = bargmann_transform(psi, constant_weights(1.0), [0.3, 1.0 + 1.0j, -2.0])
        assert np.allclose(vals, 1.0)

    def test_growth_bound(self):
        weights = distorted_weights(0.5)
        cs = cs_vector(CSSpec(0.9 + 0.3j, weights, 48), TAG)
        samples = [0.5, 1.2j, 1.0 - 0.8j]
        vals = bargmann_transform(cs, weights, samples)
        for z, v in zip(samples, vals):
            bound = cs.norm() * math.sqrt(normalization_h(abs(z) ** 2, weights))
            assert abs(v) <= bound * (1 + 1e-12)

    def test_cs_transform_matches_direct_sum(self):
        # direct-summation oracle for the defining formula
        # Psi(z) = sum_n d_n^{1/2} <theta_{n+1}|Psi> z^n with <theta_{n+1}|cs> = h^{-1/2} d_n^{1/2} zeta0^n
        weights = constant_weights(1.0)
        zeta0 = 0.7 + 0.2j
        cs = cs_vector(CSSpec(zeta0, weights, 48), TAG)
        d = d_coefficients(weights, 47)
        h0 = normalization_h(abs(zeta0) ** 2, weights)
        samples = [0.0, 0.4, -0.9j, 1.1 + 0.3j, -1.0 - 1.0j]
        vals = bargmann_transform(cs, weights, samples)
        for z, v in zip(samples, vals):
            direct = sum(d[n] * zeta0**n * z**n for n in range(47)) / math.sqrt(h0)
            assert v == pytest.approx(direct, abs=1e-12)

    def test_rejects_sample_beyond_radius(self):
        weights = single_weight(2.0)
        psi = StateVector(np.eye(16)[1], TAG)
        with pytest.raises(ValueError):
            bargmann_transform(psi, weights, [2.0])

    def test_rejects_fock_state(self):
        from isoladder.fock import FOCK

        with pytest.raises(ValueError):
            bargmann_transform(StateVector(np.eye(8)[1], FOCK), constant_weights(1.0), [0.1])


class TestOrderEstimate:
    def test_case_i_and_ii(self):
        for weights in (constant_weights(2.0), constant_weights(0.5), distorted_weights(0.5)):
            est = order_estimate(weights)
            assert est.entire
            assert est.rho == pytest.approx(2.0, abs=0.02)

    def test_case_iii(self):
        est = order_estimate(linear_weights())
        assert est.rho == pytest.approx(1.0, abs=0.02)

    @pytest.mark.parametrize("nu", [0.5, 1.0, 2.0, 3.0])
    def test_power_law(self, nu):
        est = order_estimate(power_law_weights(nu))
        assert est.rho == pytest.approx(2.0 / (1.0 + nu), abs=0.05)

    def test_q_above_one_gives_order_zero(self):
        est = order_estimate(geometric_weights(1.2))
        assert est.entire and est.rho == 0.0

    def test_q_exactly_one_is_standard(self):
        est = order_estimate(geometric_weights(1.0))
        assert est.rho == pytest.approx(2.0, abs=0.02)

    def test_q_below_one_not_entire(self):
        est = order_estimate(geometric_weights(0.5))
        assert not est.entire
        assert est.rho is None
        assert est.radius == pytest.approx(1.0, abs=1e-3)
        assert est.diagnostics.get("alternative_sqrt_q") == pytest.approx(math.sqrt(0.5))

    def test_case_iv_not_entire(self):
        est = order_estimate(single_weight(2.0))
        assert not est.entire
        assert est.radius == pytest.approx(math.sqrt(2.0), abs=1e-3)


class TestQFactorial:
    def test_limit_q_one(self):
        chk = q_factorial(1.0, 5)
        assert chk.product_side == math.factorial(5)
        assert chk.relative_difference == 0.0

    def test_n3_q2_both_sides_168(self):
        chk = q_factorial(2.0, 3)
        assert chk.product_side == pytest.approx(168.0, rel=1e-12)
        assert chk.closed_side == pytest.approx(168.0, rel=1e-12)

    def test_q_half_n10(self):
        chk = q_factorial(0.5, 10)
        assert chk.relative_difference < 1e-12

    def test_large_n_log_space(self):
        chk = q_factorial(1.5, 2000)
        assert math.isinf(chk.product_side)  # value overflows, logs stay finite
        assert math.isfinite(chk.log_product)
        assert chk.relative_difference < 1e-9


class TestRadius:
    def test_case_iv(self):
        assert radius_of_convergence(single_weight(2.0)) == pytest.approx(math.sqrt(2.0), abs=1e-3)

    def test_geometric_half(self):
        assert radius_of_convergence(geometric_weights(0.5)) == pytest.approx(1.0, abs=1e-3)

    def test_unit_weights_unbounded(self):
        assert radius_of_convergence(constant_weights(1.0)) == math.inf


class TestFiniteCustomLists:
    def test_bounded_custom_radius_from_available_prefix(self):
        from isoladder.ladder import custom_weights

        weights = custom_weights([2.0] + [0.0] * 63)  # single-weight profile, finite list
        assert radius_of_convergence(weights) == pytest.approx(math.sqrt(2.0), abs=1e-6)

    def test_growing_custom_supports_cs(self):
        from isoladder.ladder import custom_weights

        weights = custom_weights([1.0] * 96)
        cs = cs_vector(CSSpec(0.8 + 0.2j, weights, 48), TAG)
        assert cs.norm() == pytest.approx(1.0, abs=1e-10)

    def test_order_fit_refuses_short_lists(self):
        from isoladder.coherent import WeightSequenceTooShort
        from isoladder.ladder import custom_weights

        with pytest.raises(WeightSequenceTooShort):
            order_estimate(custom_weights([1.0 + 0.1 * n for n in range(64)]))

    def test_h_refuses_uncertifiable_tail(self):
        from isoladder.coherent import WeightSequenceTooShort
        from isoladder.ladder import custom_weights

        with pytest.raises(WeightSequenceTooShort):
            normalization_h(20.0, custom_weights([1.0] * 24))


class TestDisplacement:
    def test_zero_is_identity(self, pair):
        d = displacement_operator(0.0, *pair)
        assert np.max(np.abs(d.mat - np.eye(64))) < 1e-12

    def test_displaced_theta1_is_cs(self, pair):
        zeta = 0.7 - 0.2j
        d = displacement_operator(zeta, *pair)
        moved = d.mat @ np.eye(64)[1]
        cs = cs_vector(CSSpec(zeta, constant_weights(1.0), 64), TAG)
        assert np.linalg.norm(moved - cs.coeffs) < 1e-6

    def test_unitarity(self, pair):
        d = displacement_operator(1.3 + 0.4j, *pair)
        assert interior_max_abs((adjoint(d) @ d).mat - np.eye(64)) < 1e-7

    def test_rejects_non_unit_weights(self):
        low, high = ladder_matrices(distorted_weights(2.0), 64, TAG)
        with pytest.raises(ValueError):
            displacement_operator(0.5, low, high)

    def test_rejects_non_adjoint_pair(self, pair):
        low, _ = pair
        with pytest.raises(ValueError):
            displacement_operator(0.5, low, low)

    def test_rejects_large_zeta(self, pair):
        with pytest.raises(ValueError):
            displacement_operator(2.5, *pair)

    def test_rejects_small_truncation(self):
        low, high = ladder_matrices(constant_weights(1.0), 32, TAG)
        with pytest.raises(ValueError):
            displacement_operator(0.5, low, high)


class TestGeneralizedCS:
    def test_zeta_zero_gives_theta_n(self, pair):
        for n in (2, 3):
            ladder_route, displaced = generalized_cs(0.0, n, *pair)
            assert np.linalg.norm(displaced.coeffs - np.eye(64)[n]) < 1e-12
            assert abs(abs(ladder_route.coeffs[n]) - 1.0) < 1e-12

    def test_two_path_agreement(self, pair):
        for n in (2, 3):
            ladder_route, displaced = generalized_cs(0.5, n, *pair)
            assert np.linalg.norm(ladder_route.coeffs - displaced.normalized().coeffs) < 1e-5

    def test_orthonormal_family(self, pair):
        zeta = 0.4 + 0.3j
        states = [generalized_cs(zeta, n, *pair)[1] for n in (2, 3, 4)]
        for i, si in enumerate(states):
            for j, sj in enumerate(states):
                overlap = np.vdot(si.coeffs, sj.coeffs)
                assert abs(overlap - (1.0 if i == j else 0.0)) < 1e-5

    def test_edge_guard(self, pair):
        with pytest.raises(ValueError):
            generalized_cs(0.5, 60, *pair)


class TestHTilde1:
    def test_spectrum_shifted_by_one(self, pair):
        h1 = h_tilde_1(*pair)
        diag = np.real(np.diag(h1.mat))
        assert diag[0] == 0.0 and diag[1] == 0.0
        assert np.allclose(diag[2:59], np.arange(1.0, 58.0), atol=1e-12)

    def test_unit_commutator_on_excited_block(self, pair):
        low, high = pair
        comm = commutator(low, high).mat
        assert np.allclose(np.diag(comm)[1:59], 1.0, atol=1e-12)

    def test_cs_is_ground_state_of_displaced_hamiltonian(self, pair):
        zeta = 0.7 - 0.2j
        d = displacement_operator(zeta, *pair)
        h1 = h_tilde_1(*pair)
        moved = d.mat @ h1.mat @ d.mat.conj().T
        cs = cs_vector(CSSpec(zeta, constant_weights(1.0), 64), TAG)
        assert np.linalg.norm(moved @ cs.coeffs) < 1e-6
