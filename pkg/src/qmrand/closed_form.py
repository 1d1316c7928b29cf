"""Closed-form optimal guessing probabilities and bounds.

Covers the two certified measurement classes (two-outcome qubit POVMs and
noisy projective measurements in any dimension), the eigenvalue-based upper
bound for two-outcome POVMs of arbitrary dimension, and the midpoint lower
bound.  The min-entropy is always ``-log2(pguess)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ValidationError, eig_hermitian, matrix_sqrt
from .povm import NoiseModel, Povm, PureState

METHOD_THEOREM1 = "theorem1"
METHOD_THEOREM2 = "theorem2"
METHOD_COROLLARY1 = "corollary1-bound"
METHOD_SDP = "sdp"


@dataclass(frozen=True)
class GuessReport:
    """Guessing probability together with the min-entropy it certifies.

    ``method`` records how the value was obtained; ``corollary1-bound`` marks
    an upper bound on the optimal guessing probability rather than a certified
    optimum.  ``relabeled`` is set when outcome labels were swapped to meet
    the trace-ordering convention.
    """

    pguess: float
    hmin_bits: float
    method: str
    optimal_state: PureState | None = None
    relabeled: bool = False

    def __post_init__(self):
        if not 0.0 < self.pguess <= 1.0 + 1e-12:
            raise ValidationError(f"guessing probability out of range: {self.pguess}")
        if abs(self.hmin_bits + np.log2(self.pguess)) > 1e-12:
            raise ValidationError("hmin_bits must equal -log2(pguess)")


def _report(pguess: float, method: str, state: PureState | None, relabeled: bool) -> GuessReport:
    pguess = float(min(pguess, 1.0))
    return GuessReport(
        pguess=pguess,
        hmin_bits=float(-np.log2(pguess)),
        method=method,
        optimal_state=state,
        relabeled=relabeled,
    )


def _ordered_two_outcome(povm: Povm, key) -> tuple[np.ndarray, bool]:
    """Return (M1, relabeled) with outcome labels ordered so key(M1) <= key(M2)."""
    if povm.num_outcomes != 2:
        raise ValidationError(f"expected a two-outcome POVM, got {povm.num_outcomes} outcomes")
    M1, M2 = povm.elements
    if key(M1) > key(M2) + 1e-14:
        return M2, True
    return M1, False


def pguess_star_qubit_two_outcome(povm: Povm) -> GuessReport:
    """Optimal guessing probability of any two-outcome qubit POVM.

    ``1 - tr M1 + (tr sqrt(M1))^2 / 2`` with tr M1 <= tr M2 (labels swapped
    automatically if given in the other order).  The optimum is attained at
    any state unbiased to the shared eigenbasis of the elements.
    """
    if povm.dim != 2:
        raise ValidationError(f"qubit formula requires dim 2, got {povm.dim}")
    M1, relabeled = _ordered_two_outcome(povm, lambda E: float(np.real(np.trace(E))))
    tr1 = float(np.real(np.trace(M1)))
    trsqrt = float(np.real(np.trace(matrix_sqrt(M1))))
    value = 1.0 - tr1 + 0.5 * trsqrt**2
    spec = eig_hermitian(M1)
    psi = PureState((spec.eigenvectors[:, 0] + spec.eigenvectors[:, 1]) / np.sqrt(2.0))
    return _report(value, METHOD_THEOREM1, psi, relabeled)


def pguess_star_noisy_projective(noise: NoiseModel) -> GuessReport:
    """Optimal guessing probability of the noisy projective measurement.

    ``(tr sqrt(M1))^2 / d = (sqrt(A) + (d-1) sqrt(eps))^2 / d^2``, attained at
    the unbiased state.
    """
    from .povm import unbiased_state

    d = noise.d
    value = (np.sqrt(noise.A) + (d - 1) * np.sqrt(noise.epsilon)) ** 2 / d**2
    return _report(value, METHOD_THEOREM2, unbiased_state(d), False)


def two_outcome_upper_bound(povm: Povm) -> GuessReport:
    """Upper bound on the optimal guessing probability of a two-outcome POVM.

    ``1 - (sqrt(lmax(M1)) - sqrt(lmin(M1)))^2 / 2`` where the element with the
    smaller lmin + lmax is taken as M1.  This is a bound, not a certified
    optimum, except in dimension 2 where it coincides with the qubit formula.
    """

    def spread_key(E):
        w = np.linalg.eigvalsh(E)
        return float(w[0] + w[-1])

    M1, relabeled = _ordered_two_outcome(povm, spread_key)
    spec = eig_hermitian(M1)
    lmax, lmin = float(spec.eigenvalues[0]), float(spec.eigenvalues[-1])
    value = 1.0 - 0.5 * (np.sqrt(lmax) - np.sqrt(max(lmin, 0.0))) ** 2
    psi = PureState((spec.eigenvectors[:, 0] + spec.eigenvectors[:, -1]) / np.sqrt(2.0))
    return _report(value, METHOD_COROLLARY1, psi, relabeled)


def midpoint_lower_bound(povm: Povm) -> float:
    """Guessing-probability lower bound 1 - (lmax(M1) - lmin(M1)) / 2.

    Valid for every input state via the midpoint decomposition; the spread of
    the two elements coincides, so no ordering is needed.
    """
    if povm.num_outcomes != 2:
        raise ValidationError(f"expected a two-outcome POVM, got {povm.num_outcomes} outcomes")
    w = np.linalg.eigvalsh(povm.elements[0])
    return float(1.0 - 0.5 * (w[-1] - w[0]))


def _detect_noisy_projective_basis(povm: Povm, tol: float = 1e-9):
    """Return (eps, basis vectors) for a noisy projective POVM, else None."""
    d = povm.dim
    if povm.num_outcomes != d:
        return None
    if max(abs(float(np.real(np.trace(E))) - 1.0) for E in povm.elements) > tol:
        return None
    # All elements share the spectrum {A/d, eps/d x (d-1)}.
    eps_estimates = []
    tops = []
    for E in povm.elements:
        spec = eig_hermitian(E)
        w = spec.eigenvalues
        eps = float(np.mean(w[1:]) * d) if d > 1 else 0.0
        if not -tol <= eps <= 1.0 + tol:
            return None
        eps_estimates.append(min(max(eps, 0.0), 1.0))
        tops.append(spec.eigenvectors[:, 0])
    eps = float(np.mean(eps_estimates))
    if eps > 1.0 - tol:
        # Maximally mixed limit: every element must be 1/d; basis arbitrary.
        if all(np.max(np.abs(E - np.eye(d) / d)) <= tol for E in povm.elements):
            return 1.0, [np.eye(d)[:, x].astype(complex) for x in range(d)]
        return None
    for E, v in zip(povm.elements, tops):
        model = (1.0 - eps) * np.outer(v, v.conj()) + (eps / d) * np.eye(d)
        if np.max(np.abs(E - model)) > max(tol, 1e-12):
            return None
    basis_sum = sum(np.outer(v, v.conj()) for v in tops)
    if np.max(np.abs(basis_sum - np.eye(d))) > max(tol * d, 1e-10):
        return None
    return eps, tops


def detect_noisy_projective(povm: Povm, tol: float = 1e-9) -> float | None:
    """Return eps if the POVM is a noisy projective measurement, else None.

    Matches (1 - eps)|v_x><v_x| + (eps/d) 1 in any orthonormal basis {v_x},
    one basis vector per outcome.
    """
    found = _detect_noisy_projective_basis(povm, tol)
    return None if found is None else found[0]


def pguess_star_certified(povm: Povm) -> GuessReport | None:
    """Closed-form optimum when the POVM belongs to a certified class."""
    if povm.dim == 2 and povm.num_outcomes == 2:
        return pguess_star_qubit_two_outcome(povm)
    found = _detect_noisy_projective_basis(povm)
    if found is not None:
        eps, basis = found
        report = pguess_star_noisy_projective(NoiseModel(povm.dim, eps))
        psi = PureState(sum(basis) / np.sqrt(povm.dim))
        return GuessReport(report.pguess, report.hmin_bits, report.method, psi, False)
    return None
