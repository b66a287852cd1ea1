"""The one-parameter isospectral family.

For each admissible lambda the Riccati solution phi deforms the oscillator
ladder pair into b = (x + d + phi)/sqrt(2), b^dagger = (x - d + phi)/sqrt(2).
This module builds the theta eigenbasis of b^dagger b in position space, the
unitary intertwiner U between the Fock and theta families, the matrices of
b, b^dagger, b^dagger b and the earlier lowering operator b^dagger a b, and
the two coherent-state families attached to them.

The overlap matrix <psi_m, theta_n> computed at finite truncation is not
exactly unitary (theta_n keeps a small psi-tail beyond the truncation), so
u_matrix returns its symmetric Lowdin orthonormalization; the raw overlaps
and their unitarity defect stay available for diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import (
    FOCK,
    StateVector,
    TruncatedOperator,
    adjoint,
    annihilation_matrix,
    theta_tag,
)
from .numerics import SQRT_PI, QuadratureGrid, erf, grid_norm, hermite_table

__all__ = [
    "LAMBDA_GUARD",
    "ParameterError",
    "IsospectralParams",
    "PhiFunction",
    "phi_lambda",
    "riccati_residual",
    "ThetaBasis",
    "theta_wavefunctions",
    "u_matrix",
    "u_overlap_raw",
    "unitarity_defect",
    "b_matrix",
    "b_dagger_matrix",
    "h_tilde_matrix",
    "b_dagger_a_b_matrix",
    "b_dagger_a_b_fill",
    "b_dagger_a_b_cs",
    "unitary_image_cs",
    "theta_curvature_table",
]

LAMBDA_GUARD = 1e-6


class ParameterError(ValueError):
    """Parameter outside the admissible region |lambda| > sqrt(pi)/2."""


@dataclass(frozen=True)
class IsospectralParams:
    """The family parameter; |lambda| must clear sqrt(pi)/2 by a guard band."""

    lam: float

    def __post_init__(self):
        if not math.isfinite(self.lam) or abs(self.lam) <= SQRT_PI / 2 + LAMBDA_GUARD:
            raise ParameterError(
                f"|lambda| must exceed sqrt(pi)/2 + {LAMBDA_GUARD:g} to keep phi regular, got {self.lam!r}"
            )


def _erf_values(x):
    if np.isscalar(x) or np.ndim(x) == 0:
        return erf(float(x))
    return np.array([erf(float(t)) for t in np.asarray(x)])


@dataclass(frozen=True)
class PhiFunction:
    """phi(x) = exp(-x^2) / (lambda + (sqrt(pi)/2) erf(x)) and its exact derivative."""

    params: IsospectralParams

    def denominator(self, x):
        return self.params.lam + (SQRT_PI / 2.0) * _erf_values(x)

    def value(self, x):
        x = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
        return np.exp(-(x**2)) / self.denominator(x)

    def prime(self, x):
        # Riccati identity, exact for the true solution: phi' = -2 x phi - phi^2
        x = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
        p = self.value(x)
        return -2.0 * x * p - p * p

    __call__ = value


def phi_lambda(x: float, p: IsospectralParams) -> float:
    """phi evaluated at one point; denominator bounded away from zero by the guard."""
    return float(PhiFunction(p).value(float(x)))


def riccati_residual(
    p: IsospectralParams,
    grid: QuadratureGrid,
    fd_step: float = 1e-5,
    phi_override=None,
) -> float:
    """max over the grid of |phi' + 2 x phi + phi^2| with phi' by central differencing.

    The derivative is finite-differenced (never the Riccati identity itself),
    so this is an independent check that phi actually solves the equation.
    phi_override lets tests feed a perturbed candidate.
    """
    fn = phi_override if phi_override is not None else PhiFunction(p).value
    x = grid.points
    fwd = np.asarray(fn(x + fd_step), dtype=float)
    bwd = np.asarray(fn(x - fd_step), dtype=float)
    mid = np.asarray(fn(x), dtype=float)
    deriv = (fwd - bwd) / (2.0 * fd_step)
    return float(np.max(np.abs(deriv + 2.0 * x * mid + mid * mid)))


class ThetaBasis:
    """Wavefunction table of the theta family over a quadrature grid.

    theta_0 is the annihilated-by-b ground state, normalized by quadrature;
    theta_n = psi_n + phi psi_{n-1} / sqrt(2n) for n >= 1 (apply b^dagger to
    psi_{n-1} and use (x - d) psi_{n-1} = sqrt(2n) psi_n).
    """

    def __init__(self, params: IsospectralParams, grid: QuadratureGrid, N: int):
        if N < 2:
            raise ValueError(f"theta basis needs N >= 2, got {N}")
        self.params = params
        self.grid = grid
        self.N = int(N)
        self.tag = theta_tag(params.lam)
        self.phi_fn = PhiFunction(params)

        x = grid.points
        self.psi = hermite_table(grid, N - 1).values
        self.g_values = self.phi_fn.denominator(x)
        self.phi_values = np.exp(-x * x) / self.g_values
        self.phi_prime_values = -2.0 * x * self.phi_values - self.phi_values**2

        theta = np.zeros((N, grid.node_count))
        raw0 = np.exp(-0.5 * x * x) / self.g_values
        norm0 = grid_norm(raw0, grid)
        theta[0] = raw0 / norm0
        self.theta0_norm = 1.0 / norm0  # the N_0 multiplying e^{-x^2/2}/g
        for n in range(1, N):
            theta[n] = self.psi[n] + self.phi_values * self.psi[n - 1] / math.sqrt(2.0 * n)
        self.theta = theta

        self._raw_overlap = None
        self._u = None

    def theta_state(self, n: int) -> np.ndarray:
        return self.theta[n]

    def _overlaps(self) -> np.ndarray:
        if self._raw_overlap is None:
            w = self.grid.weights
            self._raw_overlap = self.psi @ (w[None, :] * self.theta).T
        return self._raw_overlap


def theta_wavefunctions(p: IsospectralParams, grid: QuadratureGrid, N: int) -> ThetaBasis:
    """Build the theta table; see ThetaBasis."""
    return ThetaBasis(p, grid, N)


def u_overlap_raw(basis: ThetaBasis) -> TruncatedOperator:
    """Raw quadrature overlaps U~[m, n] = <psi_m, theta_n>, Fock tag."""
    return TruncatedOperator(basis._overlaps(), FOCK)


def unitarity_defect(basis: ThetaBasis) -> float:
    """max |U~^dagger U~ - I| of the raw overlap matrix (truncation-tail size)."""
    raw = basis._overlaps()
    return float(np.max(np.abs(raw.T @ raw - np.eye(basis.N))))


def u_matrix(basis: ThetaBasis) -> TruncatedOperator:
    """Unitary intertwiner taking |n> to |theta_n>, as a Fock-basis matrix.

    Symmetric orthonormalization (polar factor via SVD) of the quadrature
    overlap matrix: the nearest exactly unitary matrix to the raw overlaps.
    """
    if basis._u is None:
        raw = basis._overlaps()
        left, _, right = np.linalg.svd(raw)
        basis._u = left @ right
    return TruncatedOperator(basis._u, FOCK)


def b_matrix(basis: ThetaBasis) -> TruncatedOperator:
    """b = a U^dagger in the Fock basis; maps theta_{n+1} to sqrt(n+1) |n>."""
    u = u_matrix(basis)
    return annihilation_matrix(basis.N) @ adjoint(u)


def b_dagger_matrix(basis: ThetaBasis) -> TruncatedOperator:
    """b^dagger = U a^dagger in the Fock basis."""
    u = u_matrix(basis)
    return u @ adjoint(annihilation_matrix(basis.N))


def h_tilde_matrix(basis: ThetaBasis) -> TruncatedOperator:
    """The deformed Hamiltonian b^dagger b (Fock basis, Hermitian)."""
    b = b_matrix(basis)
    return adjoint(b) @ b


def b_dagger_a_b_matrix(basis: ThetaBasis) -> TruncatedOperator:
    """The lowering operator b^dagger a b expressed in the theta basis.

    Its entries reproduce (n-1) sqrt(n) on the superdiagonal: it annihilates
    both theta_0 and theta_1.
    """
    u = u_matrix(basis)
    b = b_matrix(basis)
    a = annihilation_matrix(basis.N)
    a_fock = adjoint(b) @ a @ b
    return TruncatedOperator(u.mat.conj().T @ a_fock.mat @ u.mat, basis.tag)


def b_dagger_a_b_fill(N: int, tag) -> TruncatedOperator:
    """Structural matrix of the same operator: (n-1) sqrt(n) at (n-1, n)."""
    m = np.zeros((N, N))
    for n in range(2, N):
        m[n - 1, n] = (n - 1) * math.sqrt(n)
    return TruncatedOperator(m, tag)


def b_dagger_a_b_cs(z: complex, basis: ThetaBasis, N: int | None = None) -> StateVector:
    """Normalized eigenstate of b^dagger a b built on theta_1.

    Coefficients proportional to z^n / (n! sqrt((n+1)!)) on theta_{n+1}.
    """
    N = basis.N if N is None else int(N)
    z = complex(z)
    tail = abs(z) ** N * math.exp(-math.lgamma(N + 1) - 0.5 * math.lgamma(N + 2))
    if tail >= 1e-14:
        raise ValueError(f"truncation tail {tail:.3e} >= 1e-14; increase N for |z| = {abs(z):.3g}")
    coeffs = np.zeros(N, dtype=complex)
    for n in range(N - 1):
        log_mag = n * math.log(abs(z)) if z != 0 else (-math.inf if n else 0.0)
        log_scale = -math.lgamma(n + 1) - 0.5 * math.lgamma(n + 2)
        phase = z**n / abs(z) ** n if z != 0 and n else 1.0
        coeffs[n + 1] = phase * math.exp(log_mag + log_scale)
    vec = StateVector(coeffs, basis.tag)
    return vec.normalized()


def unitary_image_cs(alpha: complex, basis: ThetaBasis, N: int | None = None) -> StateVector:
    """exp(-|alpha|^2/2) sum_n alpha^n / sqrt(n!) theta_n: the unitary image U|alpha>."""
    N = basis.N if N is None else int(N)
    alpha = complex(alpha)
    tail = math.exp(-0.5 * abs(alpha) ** 2) * abs(alpha) ** N * math.exp(-0.5 * math.lgamma(N + 1))
    if tail >= 1e-14:
        raise ValueError(f"truncation tail {tail:.3e} >= 1e-14; increase N for |alpha| = {abs(alpha):.3g}")
    coeffs = np.zeros(N, dtype=complex)
    pref = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(N):
        if alpha == 0:
            coeffs[n] = pref if n == 0 else 0.0
        else:
            phase = alpha**n / abs(alpha) ** n if n else 1.0
            coeffs[n] = pref * phase * math.exp(n * math.log(abs(alpha)) - 0.5 * math.lgamma(n + 1))
    return StateVector(coeffs, basis.tag)


def theta_curvature_table(basis: ThetaBasis) -> np.ndarray:
    """theta_n'' sampled on the grid, from exact derivative identities.

    psi_n'' = (x^2 - 2n - 1) psi_n, psi_n' = (sqrt(n) psi_{n-1} - sqrt(n+1) psi_{n+1})/sqrt(2),
    and the Riccati relation for phi', phi''.  Nothing here uses finite
    differences, so position-space operator checks are quadrature-limited.
    """
    x = basis.grid.points
    psi = basis.psi
    phi = basis.phi_values
    phi_p = basis.phi_prime_values
    phi_pp = -2.0 * phi - 2.0 * x * phi_p - 2.0 * phi * phi_p
    N = basis.N

    out = np.zeros_like(basis.theta)
    th0 = basis.theta[0]
    out[0] = ((x + phi) ** 2 - 1.0 - phi_p) * th0
    for n in range(1, N):
        k = n - 1  # theta_n = psi_n + phi psi_k / sqrt(2n)
        psi_k = psi[k]
        lower = math.sqrt(k) * psi[k - 1] if k >= 1 else 0.0
        upper = math.sqrt(k + 1) * psi[k + 1]
        psi_k_prime = (lower - upper) / math.sqrt(2.0)
        psi_k_second = (x * x - 2 * k - 1) * psi_k
        bundle = phi_pp * psi_k + 2.0 * phi_p * psi_k_prime + phi * psi_k_second
        out[n] = (x * x - 2 * n - 1) * psi[n] + bundle / math.sqrt(2.0 * n)
    return out
