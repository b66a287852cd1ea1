import math

import numpy as np
import pytest

from isoladder.fock import (
    annihilation_matrix,
    apply_operator,
    hermitian_eigensystem,
    interior_max_abs,
)
from isoladder.isospectral import (
    IsospectralParams,
    ParameterError,
    PhiFunction,
    b_dagger_a_b_matrix,
    b_dagger_matrix,
    b_matrix,
    b_dagger_a_b_cs,
    b_dagger_a_b_fill,
    h_tilde_matrix,
    unitary_image_cs,
    phi_lambda,
    riccati_residual,
    theta_curvature_table,
    theta_wavefunctions,
    u_matrix,
    u_overlap_raw,
    unitarity_defect,
)
from isoladder.numerics import SQRT_PI, build_grid, grid_norm, hermite_values, inner_product


def simpson_integral_0_to_1(f, n=2001):
    # independent quadrature oracle for the definite integral in phi's denominator
    xs = np.linspace(0.0, 1.0, n)
    ys = f(xs)
    h = xs[1] - xs[0]
    return h / 3 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-1:2].sum())


class TestParams:
    @pytest.mark.parametrize("lam", [0.0, 0.5, math.sqrt(math.pi) / 2, -0.8])
    def test_forbidden_band(self, lam):
        with pytest.raises(ParameterError):
            IsospectralParams(lam)

    def test_negative_admissible(self):
        IsospectralParams(-2.0)


class TestPhi:
    def test_value_at_origin(self):
        for lam in (1.0, 2.0, -3.0):
            assert phi_lambda(0.0, IsospectralParams(lam)) == pytest.approx(1.0 / lam)

    def test_gaussian_decay(self):
        assert phi_lambda(8.0, IsospectralParams(2.0)) < 1e-27

    def test_value_at_one_vs_quadrature_oracle(self):
        integral = simpson_integral_0_to_1(lambda y: np.exp(-(y**2)))
        expected = math.exp(-1.0) / (2.0 + integral)
        assert abs(phi_lambda(1.0, IsospectralParams(2.0)) - expected) < 1e-6
        assert expected == pytest.approx(0.133929, abs=1e-6)

    def test_sign_symmetry(self, grid64):
        plus = PhiFunction(IsospectralParams(2.0))
        minus = PhiFunction(IsospectralParams(-2.0))
        x = grid64.points
        assert np.max(np.abs(plus.value(x) + minus.value(-x))) < 1e-14


class TestRiccati:
    @pytest.mark.parametrize("lam", [1.0, 2.0, 10.0])
    def test_solution_residual(self, lam, grid64):
        assert riccati_residual(IsospectralParams(lam), grid64) < 1e-8

    def test_perturbed_phi_detected(self, grid64):
        p = IsospectralParams(2.0)
        fn = PhiFunction(p)
        # residual of phi + eps is eps*(2x + 2 phi) + eps^2 to first order
        residual = riccati_residual(p, grid64, phi_override=lambda x: fn.value(x) + 0.01)
        assert residual > 1e-3


class TestThetaBasis:
    def test_large_lambda_reduces_to_oscillator(self, grid64):
        basis = theta_wavefunctions(IsospectralParams(1e6), grid64, 64)
        dev = float(np.max(np.abs(basis.theta - basis.psi)))
        assert dev < 1e-5

    def test_theta0_normalized_and_closed_form(self, basis64):
        assert abs(grid_norm(basis64.theta[0], basis64.grid) - 1.0) < 1e-9
        lam = basis64.params.lam
        closed = math.sqrt((lam * lam - math.pi / 4.0) / SQRT_PI)
        assert basis64.theta0_norm == pytest.approx(closed, abs=1e-9)

    def test_b_annihilates_theta0_position_space(self, basis64):
        # b theta_0 = (x + d + phi) theta_0 / sqrt2 with finite-difference d
        lam = basis64.params.lam
        h = 1e-5
        x = basis64.grid.points
        n0 = basis64.theta0_norm

        def theta0(t):
            g = lam + (SQRT_PI / 2.0) * np.array([math.erf(v) for v in np.atleast_1d(t)])
            return n0 * np.exp(-0.5 * np.atleast_1d(t) ** 2) / g

        deriv = (theta0(x + h) - theta0(x - h)) / (2 * h)
        action = (x * theta0(x) + deriv + basis64.phi_values * theta0(x)) / math.sqrt(2.0)
        assert np.max(np.abs(action)) < 1e-7

    @pytest.mark.parametrize("lam", [1.0, 2.0, 10.0])
    def test_gram_orthonormality(self, lam, grid64):
        basis = theta_wavefunctions(IsospectralParams(lam), grid64, 64)
        gram = basis.theta @ (grid64.weights[None, :] * basis.theta).T
        dev = np.max(np.abs(gram[:59, :59] - np.eye(64)[:59, :59]))
        assert dev < 1e-8

    def test_bdagger_psi_gives_sqrt_n_theta(self, basis64):
        # position-space b+ psi_{n-1} with finite-difference derivative, all n <= N-5
        h = 1e-5
        x = basis64.grid.points
        up = hermite_values(x + h, 58)
        down = hermite_values(x - h, 58)
        for n in range(1, 60):
            deriv = (up[n - 1] - down[n - 1]) / (2 * h)
            action = (x * basis64.psi[n - 1] - deriv + basis64.phi_values * basis64.psi[n - 1]) / math.sqrt(2.0)
            dev = grid_norm(action - math.sqrt(n) * basis64.theta[n], basis64.grid)
            assert dev < 1e-7, f"n={n}: {dev}"

    def test_rejects_small_basis(self, grid64):
        with pytest.raises(ValueError):
            theta_wavefunctions(IsospectralParams(2.0), grid64, 1)

    def test_negative_lambda_family(self, grid64):
        # the branch lambda < -sqrt(pi)/2 is admissible and behaves identically
        basis = theta_wavefunctions(IsospectralParams(-2.0), grid64, 64)
        gram = basis.theta @ (grid64.weights[None, :] * basis.theta).T
        assert np.max(np.abs(gram[:59, :59] - np.eye(64)[:59, :59])) < 1e-8
        evals, _ = hermitian_eigensystem(h_tilde_matrix(basis))
        assert np.max(np.abs(evals[:40] - np.arange(40.0))) < 1e-6


class TestUMatrix:
    def test_exactly_unitary_after_polar(self, basis64):
        u = u_matrix(basis64)
        assert np.max(np.abs(u.mat.conj().T @ u.mat - np.eye(64))) < 1e-12

    def test_raw_overlap_defect_is_truncation_tail(self, basis64):
        # the raw quadrature overlaps keep a genuine psi-tail defect
        assert 1e-7 < unitarity_defect(basis64) < 1e-3

    def test_u00_stable_under_grid_refinement(self):
        p = IsospectralParams(2.0)
        vals = []
        for nodes in (2000, 8000):
            grid = build_grid(64, nodes=nodes)
            basis = theta_wavefunctions(p, grid, 64)
            vals.append(u_matrix(basis).mat[0, 0])
        assert abs(vals[0] - vals[1]) < 1e-9

    def test_u00_matches_raw_overlap_in_deep_interior(self, basis64):
        raw = u_overlap_raw(basis64).mat[0, 0]
        polar = u_matrix(basis64).mat[0, 0]
        overlap = inner_product(basis64.psi[0], basis64.theta[0], basis64.grid)
        assert raw == pytest.approx(overlap, abs=1e-13)
        assert polar == pytest.approx(overlap, abs=1e-7)

    def test_large_lambda_u_is_identity(self, grid64):
        basis = theta_wavefunctions(IsospectralParams(1e6), grid64, 64)
        u = u_matrix(basis)
        assert interior_max_abs(u.mat - np.eye(64)) < 1e-5


class TestBOperators:
    def test_bbdagger_equals_aadagger(self, basis64):
        b = b_matrix(basis64)
        a = annihilation_matrix(64)
        dev = interior_max_abs(b.mat @ b.mat.conj().T - a.mat @ a.mat.conj().T)
        assert dev < 1e-7

    def test_b_annihilates_theta0_vector(self, basis64):
        b = b_matrix(basis64)
        theta0_fock = u_matrix(basis64).mat[:, 0]
        assert np.linalg.norm(b.mat @ theta0_fock) < 1e-7

    def test_bdaggerb_differs_from_adaggera(self, basis64):
        ht = h_tilde_matrix(basis64)
        dev = np.max(np.abs(ht.mat - np.diag(np.arange(64.0))))
        assert dev > 0.01

    def test_bdagger_maps_fock_to_theta(self, basis64):
        bd = b_dagger_matrix(basis64)
        u = u_matrix(basis64)
        for n in (1, 5, 20):
            lhs = bd.mat @ np.eye(64)[n - 1]
            rhs = math.sqrt(n) * u.mat[:, n]
            assert np.linalg.norm(lhs - rhs) < 1e-10


class TestHTilde:
    def test_isospectral(self, basis64):
        evals, _ = hermitian_eigensystem(h_tilde_matrix(basis64))
        assert np.max(np.abs(evals[:40] - np.arange(40.0))) < 1e-6

    def test_large_lambda_limit(self, grid64):
        basis = theta_wavefunctions(IsospectralParams(1e6), grid64, 64)
        ht = h_tilde_matrix(basis)
        assert interior_max_abs(ht.mat - np.diag(np.arange(64.0))) < 1e-4

    def test_position_form_h_minus_phi_prime(self, basis64):
        # quadrature matrix elements of (H - phi') theta_n against n delta_mn
        grid = basis64.grid
        x = grid.points
        curv = theta_curvature_table(basis64)
        action = -0.5 * curv + (0.5 * (x * x - 1.0) - basis64.phi_prime_values) * basis64.theta
        gram = basis64.theta @ (grid.weights[None, :] * action).T
        target = np.diag(np.arange(64.0))
        assert interior_max_abs(gram - target) < 1e-6

    def test_degradation_linear_in_inverse_lambda(self, grid64):
        # residuals shrink at least linearly in 1/lambda over 1e2, 1e4, 1e6
        devs = []
        for lam in (1e2, 1e4, 1e6):
            basis = theta_wavefunctions(IsospectralParams(lam), grid64, 64)
            devs.append(interior_max_abs(u_matrix(basis).mat - np.eye(64)))
        assert devs[1] < 2.0 * devs[0] / 100.0
        assert devs[2] < 2.0 * devs[1] / 100.0


class TestCompositeLoweringOperator:
    def test_kills_theta0_and_theta1(self, basis64):
        a_theta = b_dagger_a_b_matrix(basis64)
        assert np.linalg.norm(a_theta.mat[:, 0]) < 1e-10
        assert np.linalg.norm(a_theta.mat[:, 1]) < 1e-7

    def test_action_on_theta2(self, basis64):
        a_theta = b_dagger_a_b_matrix(basis64)
        lhs = a_theta.mat @ np.eye(64)[2]
        assert np.linalg.norm(lhs - math.sqrt(2.0) * np.eye(64)[1]) < 1e-7

    def test_raising_coefficient(self, basis64):
        a_theta = b_dagger_a_b_matrix(basis64)
        lhs = a_theta.mat.conj().T @ np.eye(64)[3]
        assert np.linalg.norm(lhs - 6.0 * np.eye(64)[4]) < 1e-7

    def test_matrix_entries(self, basis64):
        a_theta = b_dagger_a_b_matrix(basis64)
        fill = b_dagger_a_b_fill(64, basis64.tag)
        assert interior_max_abs(a_theta.mat - fill.mat) < 1e-6


class TestCompositeLoweringCS:
    def test_zero_is_theta1(self, basis64):
        cs = b_dagger_a_b_cs(0.0, basis64)
        expected = np.zeros(64)
        expected[1] = 1.0
        assert np.linalg.norm(cs.coeffs - expected) < 1e-14

    def test_coefficient_ratio(self, basis64):
        z = 0.9 - 0.4j
        cs = b_dagger_a_b_cs(z, basis64)
        ratio = cs.coeffs[3] / cs.coeffs[2]
        assert ratio == pytest.approx(z / (2.0 * math.sqrt(3.0)), abs=1e-12)

    def test_eigenstate_residual(self, basis64):
        z = 0.8 + 0.3j
        cs = b_dagger_a_b_cs(z, basis64)
        fill = b_dagger_a_b_fill(64, basis64.tag)
        moved = apply_operator(fill, cs)
        assert np.linalg.norm(moved.coeffs - z * cs.coeffs) < 1e-7

    def test_tail_guard(self, basis64):
        with pytest.raises(ValueError):
            b_dagger_a_b_cs(80.0, basis64, N=8)


class TestUnitaryImageCS:
    def test_zero_is_theta0(self, basis64):
        cs = unitary_image_cs(0.0, basis64)
        assert np.linalg.norm(cs.coeffs - np.eye(64)[0]) < 1e-14

    def test_equals_u_times_oscillator_cs(self, basis64):
        # dual route: theta-coefficient wavefunction vs U-mapped Fock expansion
        alpha = 1.0 + 0.5j
        cs = unitary_image_cs(alpha, basis64)
        fock_coeffs = u_matrix(basis64).mat @ cs.coeffs
        grid = basis64.grid
        psi_side = fock_coeffs @ basis64.psi
        theta_side = cs.coeffs @ basis64.theta
        assert grid_norm(psi_side - theta_side, grid) < 1e-7

    def test_a_tilde_eigenstate(self, basis64):
        alpha = 1.0 + 0.5j
        cs = unitary_image_cs(alpha, basis64)
        u = u_matrix(basis64)
        a_tilde = u.mat @ annihilation_matrix(64).mat @ u.mat.conj().T
        fock = u.mat @ cs.coeffs
        assert np.linalg.norm(a_tilde @ fock - alpha * fock) < 1e-7

    def test_unit_norm(self, basis64):
        assert unitary_image_cs(1.2 - 0.7j, basis64).norm() == pytest.approx(1.0, abs=1e-10)
