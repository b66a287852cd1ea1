"""Truncated Fock-space linear algebra.

Dense complex N x N matrices tagged with the orthonormal family that indexes
them (the oscillator Fock states, or the theta states of one lambda).  All
identities involving truncated operators are only asserted on the interior
window n <= N - margin; the default margin is 5, enough to isolate edge
corruption for the banded operators used here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "INTERIOR_MARGIN",
    "BasisTag",
    "FOCK",
    "theta_tag",
    "BasisMismatchError",
    "TruncatedOperator",
    "StateVector",
    "annihilation_matrix",
    "creation_matrix",
    "number_matrix",
    "identity_matrix",
    "adjoint",
    "commutator",
    "op_norm_inf",
    "interior_block",
    "interior_max_abs",
    "hermitian_eigensystem",
    "apply_spectral_function",
    "apply_operator",
]

INTERIOR_MARGIN = 5


@dataclass(frozen=True)
class BasisTag:
    """Which orthonormal family indexes a matrix or coefficient vector."""

    kind: str  # "fock" or "theta"
    lam: float | None = None

    def __post_init__(self):
        if self.kind not in ("fock", "theta"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.kind == "theta" and self.lam is None:
            raise ValueError("theta basis tag needs its lambda")

    def __str__(self):
        return "Fock" if self.kind == "fock" else f"Theta(lambda={self.lam:g})"


FOCK = BasisTag("fock")


def theta_tag(lam: float) -> BasisTag:
    return BasisTag("theta", float(lam))


class BasisMismatchError(ValueError):
    """Raised when operators/states with different tags or dims are combined."""


def _check_compatible(a, b):
    if a.basis != b.basis:
        raise BasisMismatchError(f"basis mismatch: {a.basis} vs {b.basis}")
    if a.dim != b.dim:
        raise BasisMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")


@dataclass(frozen=True)
class TruncatedOperator:
    """Dense complex matrix with its basis tag and truncation size."""

    mat: np.ndarray
    basis: BasisTag = FOCK

    def __post_init__(self):
        m = np.array(self.mat, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {m.shape}")
        if m.shape[0] < 2:
            raise ValueError(f"truncation size must be >= 2, got {m.shape[0]}")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        _check_compatible(self, other)
        return TruncatedOperator(self.mat @ other.mat, self.basis)

    def __add__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        _check_compatible(self, other)
        return TruncatedOperator(self.mat + other.mat, self.basis)

    def __sub__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        _check_compatible(self, other)
        return TruncatedOperator(self.mat - other.mat, self.basis)

    def __mul__(self, scalar) -> "TruncatedOperator":
        return TruncatedOperator(self.mat * complex(scalar), self.basis)

    __rmul__ = __mul__

    def retag(self, basis: BasisTag) -> "TruncatedOperator":
        return TruncatedOperator(self.mat, basis)


@dataclass(frozen=True)
class StateVector:
    """Complex coefficient vector in a tagged basis."""

    coeffs: np.ndarray
    basis: BasisTag = FOCK

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1:
            raise ValueError(f"state coefficients must be a vector, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.coeffs / n, self.basis)


def annihilation_matrix(N: int, basis: BasisTag = FOCK) -> TruncatedOperator:
    """Superdiagonal sqrt(1) .. sqrt(N-1): the standard lowering operator."""
    if N < 2:
        raise ValueError(f"annihilation_matrix requires N >= 2, got {N}")
    return TruncatedOperator(np.diag(np.sqrt(np.arange(1.0, N)), 1), basis)


def creation_matrix(N: int, basis: BasisTag = FOCK) -> TruncatedOperator:
    return adjoint(annihilation_matrix(N, basis))


def number_matrix(N: int, basis: BasisTag = FOCK) -> TruncatedOperator:
    """diag(0, 1, ..., N-1)."""
    if N < 2:
        raise ValueError(f"number_matrix requires N >= 2, got {N}")
    return TruncatedOperator(np.diag(np.arange(float(N))), basis)


def identity_matrix(N: int, basis: BasisTag = FOCK) -> TruncatedOperator:
    if N < 2:
        raise ValueError(f"identity_matrix requires N >= 2, got {N}")
    return TruncatedOperator(np.eye(N), basis)


def adjoint(x: TruncatedOperator) -> TruncatedOperator:
    return TruncatedOperator(x.mat.conj().T, x.basis)


def commutator(x: TruncatedOperator, y: TruncatedOperator) -> TruncatedOperator:
    _check_compatible(x, y)
    return TruncatedOperator(x.mat @ y.mat - y.mat @ x.mat, x.basis)


def op_norm_inf(x: TruncatedOperator) -> float:
    """Max absolute row sum."""
    return float(np.max(np.sum(np.abs(x.mat), axis=1)))


def interior_block(mat: np.ndarray, margin: int = INTERIOR_MARGIN) -> np.ndarray:
    """Leading (N-margin) x (N-margin) block, where edge corruption cannot reach."""
    n = mat.shape[0] - margin
    if n < 1:
        raise ValueError(f"margin {margin} leaves no interior for size {mat.shape[0]}")
    return mat[:n, :n]


def interior_max_abs(mat: np.ndarray, margin: int = INTERIOR_MARGIN) -> float:
    return float(np.max(np.abs(interior_block(mat, margin))))


def _require_hermitian(m: np.ndarray, rtol: float = 1e-10):
    scale = max(1.0, float(np.max(np.abs(m))))
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > rtol * scale:
        raise ValueError(f"matrix is not Hermitian: max |X - X^dagger| = {dev:.3e}")


def hermitian_eigensystem(x: TruncatedOperator) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues ascending and a unitary eigenvector matrix V, X = V diag(mu) V^dagger.

    Delegated to the dense symmetric eigensolver; each column's phase is fixed
    by making its largest-magnitude component real positive, so spectral
    functions are reproducible.
    """
    _require_hermitian(x.mat)
    evals, v = np.linalg.eigh(x.mat)
    v = v.copy()
    for j in range(v.shape[1]):
        k = int(np.argmax(np.abs(v[:, j])))
        pivot = v[k, j]
        if pivot != 0:
            v[:, j] *= np.conj(pivot) / abs(pivot)
    return evals, v


def apply_spectral_function(x: TruncatedOperator, g: Callable[[float], float]) -> TruncatedOperator:
    """g(X) = V diag(g(mu)) V^dagger for Hermitian X."""
    evals, v = hermitian_eigensystem(x)
    gvals = np.array([g(float(mu)) for mu in evals], dtype=complex)
    if not np.all(np.isfinite(gvals)):
        bad = evals[~np.isfinite(gvals)]
        raise ValueError(f"spectral function undefined at eigenvalue(s) {bad}")
    return TruncatedOperator((v * gvals[None, :]) @ v.conj().T, x.basis)


def apply_operator(x: TruncatedOperator, psi: StateVector) -> StateVector:
    _check_compatible(x, psi)
    return StateVector(x.mat @ psi.coeffs, psi.basis)
