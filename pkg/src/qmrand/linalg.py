"""Dense complex Hermitian linear-algebra primitives.

Operators are plain complex ``numpy`` arrays.  Every public routine validates
its input (Hermiticity, positive semidefiniteness, trace) so that downstream
modules can assume well-formed operators.  All entropies are in bits: every
logarithm in this package is base two.

Default tolerances are centralized here and can be overridden per call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Centralized default tolerances.  Pass explicit values to override per call.
HERMITICITY_TOL = 1e-12
FEASIBILITY_TOL = 1e-9
RECONSTRUCTION_TOL = 1e-9
EIG_CLAMP = 1e-10
MAX_DIM = 32

LOG2 = np.log(2.0)


class ValidationError(ValueError):
    """Structurally invalid input (wrong shape, violated invariant)."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class SolverError(RuntimeError):
    """Numerical solver failed to reach the requested accuracy."""


def as_operator(entries, dim: int | None = None) -> np.ndarray:
    """Coerce to a square complex matrix, checking shape and size limits."""
    H = np.asarray(entries, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValidationError(f"operator must be square, got shape {H.shape}")
    d = H.shape[0]
    if d < 1:
        raise ValidationError("operator dimension must be >= 1")
    if d > MAX_DIM:
        raise ValidationError(f"dimension {d} exceeds supported maximum {MAX_DIM}")
    if dim is not None and d != dim:
        raise ValidationError(f"expected dimension {dim}, got {d}")
    return H


def require_hermitian(H, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate Hermiticity within ``tol`` and return the Hermitian part.

    Averaging with the adjoint removes round-off asymmetry; asymmetry beyond
    ``tol`` is rejected.
    """
    H = as_operator(H)
    asym = np.max(np.abs(H - H.conj().T))
    if asym > tol:
        raise ValidationError(f"matrix is not Hermitian: asymmetry {asym:.3e} > {tol:.1e}")
    return 0.5 * (H + H.conj().T)


def dagger(A: np.ndarray) -> np.ndarray:
    return np.asarray(A).conj().T


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a Hermitian operator.

    ``eigenvalues`` are real and sorted in non-increasing order;
    ``eigenvectors[:, k]`` is the unit eigenvector for ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        """Return ``V diag(w) V†``."""
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def eig_hermitian(H, tol: float = HERMITICITY_TOL) -> Spectrum:
    """Eigendecomposition with eigenvalues sorted in non-increasing order."""
    H = require_hermitian(H, tol)
    w, V = np.linalg.eigh(H)
    order = np.argsort(w)[::-1]
    return Spectrum(eigenvalues=w[order], eigenvectors=V[:, order])


def min_eigenvalue(H) -> float:
    return float(np.linalg.eigvalsh(require_hermitian(H))[0])


def is_psd(H, tol: float = FEASIBILITY_TOL) -> bool:
    """True iff the smallest eigenvalue of Hermitian ``H`` is >= -tol."""
    return min_eigenvalue(H) >= -tol


def _clamped_psd_eigenvalues(H, clamp: float = EIG_CLAMP) -> Spectrum:
    """Eigendecompose a nominally PSD operator, absorbing round-off.

    Eigenvalues in ``[-clamp, 0)`` are clamped to 0; anything below ``-clamp``
    is a genuine negativity and raises.
    """
    spec = eig_hermitian(H)
    w = spec.eigenvalues
    if w[-1] < -clamp:
        raise DomainError(f"operator is not PSD: min eigenvalue {w[-1]:.3e} < -{clamp:.1e}")
    return Spectrum(eigenvalues=np.maximum(w, 0.0), eigenvectors=spec.eigenvectors)


def matrix_sqrt(H, clamp: float = EIG_CLAMP) -> np.ndarray:
    """Principal square root of a PSD Hermitian operator."""
    spec = _clamped_psd_eigenvalues(H, clamp)
    V = spec.eigenvectors
    S = (V * np.sqrt(spec.eigenvalues)) @ V.conj().T
    return 0.5 * (S + S.conj().T)


def fidelity(rho, sigma, clamp: float = EIG_CLAMP) -> float:
    """Quantum fidelity F(rho, sigma) = tr sqrt(sqrt(rho) sigma sqrt(rho)).

    Both arguments must be PSD with trace at most 1 (+1e-9); the result is
    symmetric in its arguments and lies in [0, 1] for normalized states.
    """
    rho = require_hermitian(rho)
    sigma = require_hermitian(sigma, tol=1e-10)
    for op in (rho, sigma):
        if np.real(np.trace(op)) > 1.0 + 1e-9:
            raise DomainError("fidelity expects subnormalized states (trace <= 1)")
    sr = matrix_sqrt(rho, clamp)
    inner = sr @ sigma @ sr
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    if w[0] < -clamp:
        raise DomainError(f"fidelity inner operator not PSD: min eigenvalue {w[0]:.3e}")
    # Relative cutoff: eigenvalue noise of order machine epsilon would blow
    # up to sqrt(eps) under the square root.
    cutoff = max(w[-1], 0.0) * 1e-14
    w = np.where(w > cutoff, w, 0.0)
    return float(np.sum(np.sqrt(w)))


def von_neumann_entropy(rho, trace_tol: float = 1e-9) -> float:
    """Von Neumann entropy -tr(rho log2 rho) in bits, with 0 log 0 := 0."""
    rho = require_hermitian(rho, tol=1e-10)
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > trace_tol:
        raise ValidationError(f"entropy expects a unit-trace state, got trace {tr!r}")
    w = _clamped_psd_eigenvalues(rho).eigenvalues
    w = w[w > 0.0]
    return float(-np.sum(w * np.log(w)) / LOG2)


def binary_entropy(x: float) -> float:
    """Binary Shannon entropy H2(x) in bits on [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"binary entropy argument must be in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-(x * np.log(x) + (1.0 - x) * np.log(1.0 - x)) / LOG2)


def shannon_entropy(p) -> float:
    """Shannon entropy of a probability vector, in bits."""
    p = np.asarray(p, dtype=float)
    if np.any(p < -1e-12):
        raise DomainError("probabilities must be non-negative")
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)) / LOG2)


def max_abs(A) -> float:
    """Max-norm (largest absolute entry)."""
    return float(np.max(np.abs(A))) if np.asarray(A).size else 0.0
