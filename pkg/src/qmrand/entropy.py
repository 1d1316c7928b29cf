"""Conditional entropies of the eavesdropper's classical-quantum ensembles.

From a decomposition K[x][j] and an input state, Eve's side information is
the classical register j; her conditional states are diagonal in the
sub-POVM label basis.  This module computes the conditional min-, von
Neumann-, and max-entropies of those ensembles, the closed-form bounds for
the noisy projective measurement, and the state-side comparison quantities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decompositions import Decomposition
from .linalg import (
    DomainError,
    ValidationError,
    binary_entropy,
    fidelity,
    matrix_sqrt,
    max_abs,
    require_hermitian,
    shannon_entropy,
    von_neumann_entropy,
)
from .povm import NoiseModel, PureState


@dataclass(frozen=True)
class EveEnsemble:
    """Ensemble {p(x), rho_x} of Eve's normalized conditional states.

    Outcomes with p(x) = 0 leave rho_x undefined; they are listed in
    ``undefined_outcomes`` and excluded from every entropy sum (the 0 log 0
    convention).
    """

    probs: np.ndarray
    states: tuple
    undefined_outcomes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-10:
            raise ValidationError("ensemble probabilities must be a distribution")
        states = tuple(require_hermitian(r, 1e-9) for r in self.states)
        for x, r in enumerate(states):
            if x in self.undefined_outcomes:
                continue
            if abs(float(np.real(np.trace(r))) - 1.0) > 1e-9:
                raise ValidationError(f"conditional state {x} is not normalized")
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "states", states)

    @property
    def num_outcomes(self) -> int:
        return len(self.probs)

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def defined(self):
        return [
            (float(p), r)
            for x, (p, r) in enumerate(zip(self.probs, self.states))
            if p > 0.0 and x not in self.undefined_outcomes
        ]

    def average_state(self) -> np.ndarray:
        return sum(p * r for p, r in self.defined())

    def is_commuting(self, tol: float = 1e-10) -> bool:
        ops = [r for _, r in self.defined()]
        return all(
            max_abs(a @ b - b @ a) <= tol for i, a in enumerate(ops) for b in ops[i + 1 :]
        )


def eve_ensemble_from_decomposition(state: PureState, decomp: Decomposition) -> EveEnsemble:
    """Eve's conditional ensemble from the canonical dilation of a decomposition.

    p(x) = <phi| M_x |phi> and p(x) rho_x = sum_j <phi| K[x][j] |phi> |j><j|,
    so every conditional state is diagonal in the sub-POVM label basis.
    """
    if state.dim != decomp.dim:
        raise ValidationError("state dimension does not match the decomposition")
    phi = state.amplitudes
    weights = np.einsum("i,xjik,k->xj", phi.conj(), decomp.K, phi).real
    weights = np.maximum(weights, 0.0)
    probs = weights.sum(axis=1)
    n = decomp.num_subpovms
    states = []
    undefined = []
    for x in range(decomp.num_outcomes):
        if probs[x] <= 1e-14:
            states.append(np.eye(n) / n)
            undefined.append(x)
        else:
            states.append(np.diag(weights[x] / probs[x]).astype(complex))
    total = probs.sum()
    return EveEnsemble(probs / total, tuple(states), tuple(undefined))


def ensemble_guessing_probability(ens: EveEnsemble) -> float:
    """Optimal probability of guessing x from the conditional state.

    Exact for mutually commuting conditional states (measure in the common
    eigenbasis and pick the maximum-posterior outcome); the ensembles built
    in this package are diagonal, hence always commuting.
    """
    if not ens.is_commuting():
        raise ValidationError("guessing probability implemented for commuting ensembles only")
    pairs = ens.defined()
    if not pairs:
        raise ValidationError("ensemble has no populated outcomes")
    _, V = np.linalg.eigh(ens.average_state())
    table = np.array([p * np.real(np.einsum("ia,ij,ja->a", V.conj(), r, V)) for p, r in pairs])
    return float(np.sum(table.max(axis=0)))


def conditional_min_entropy(ens: EveEnsemble) -> float:
    return float(-np.log2(ensemble_guessing_probability(ens)))


def conditional_vn_entropy(ens: EveEnsemble) -> float:
    """H(X|E) = H({p(x)}) + sum_x p(x) S(rho_x) - S(sum_x p(x) rho_x), in bits."""
    pairs = ens.defined()
    p = np.array([pr for pr, _ in pairs])
    h = shannon_entropy(p)
    h += sum(pr * von_neumann_entropy(r) for pr, r in pairs)
    h -= von_neumann_entropy(ens.average_state())
    return float(h)


@dataclass(frozen=True)
class PSecrConfig:
    tol: float = 1e-6
    restarts: int = 8
    max_iters: int = 400
    seed: int = 11


@dataclass(frozen=True)
class PSecrResult:
    """Two-sided bracket of the secrecy quantity behind the max-entropy.

    ``value`` is the best certified-achievable lower bound (an explicit
    sigma attains it); ``upper`` comes from the positive-operator upper-bound
    construction.  ``converged`` means the bracket closed within tolerance.
    """

    value: float
    lower: float
    upper: float
    converged: bool

    @property
    def hmax_bits(self) -> float:
        return float(np.log2(self.value))


def _fidelity_sum(ens_pairs, sigma: np.ndarray) -> float:
    return sum(np.sqrt(p) * fidelity(r, sigma) for p, r in ens_pairs)


def _project_to_density(H: np.ndarray) -> np.ndarray:
    """Euclidean projection of a Hermitian matrix onto density matrices."""
    w, V = np.linalg.eigh(H)
    # project eigenvalues onto the probability simplex
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(u) + 1)
    rho_idx = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho_idx] / (rho_idx + 1.0)
    w = np.maximum(w - theta, 0.0)
    return (V * w) @ V.conj().T


def p_secr(ens: EveEnsemble, config: PSecrConfig | None = None) -> PSecrResult:
    """max over states sigma of (sum_x sqrt(p(x)) F(rho_x, sigma))^2.

    Lower bound: projected gradient ascent from the maximally mixed state,
    the ensemble average, the diagonal closed-form optimum (exact for
    commuting ensembles), and seeded random restarts.  Upper bound: the
    block-diagonal positive-operator construction
    (sum_x tr sqrt(p_x rho_x)) lmax(sum_x sqrt(p_x rho_x)).  The result is
    flagged unconverged when the bracket stays open.
    """
    cfg = config or PSecrConfig()
    pairs = ens.defined()
    d = ens.dim
    rng = np.random.default_rng(cfg.seed)

    sqrt_weighted = [matrix_sqrt(p * r) for p, r in pairs]
    total = sum(sqrt_weighted)
    upper = float(sum(np.real(np.trace(S)) for S in sqrt_weighted)) * float(
        np.linalg.eigvalsh(total)[-1]
    )

    candidates = [np.eye(d) / d, ens.average_state()]
    if ens.is_commuting():
        # Common-eigenbasis closed form: optimal sigma has weights w_i^2 with
        # w_i = sum_x sqrt(p_x r_x(i)); exact because dephasing in the common
        # basis cannot decrease any fidelity.
        _, V = np.linalg.eigh(ens.average_state())
        r = np.array([np.real(np.einsum("ia,ij,ja->a", V.conj(), rho, V)) for _, rho in pairs])
        w = np.sqrt(np.maximum(r, 0.0) * np.array([[p] for p, _ in pairs])).sum(axis=0)
        if w.sum() > 0:
            weights = w**2 / np.sum(w**2)
            candidates.append((V * weights) @ V.conj().T)
    for _ in range(cfg.restarts):
        G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        H = G @ G.conj().T
        candidates.append(H / np.real(np.trace(H)))

    best = 0.0
    for sigma0 in candidates:
        sigma = sigma0.copy()
        val = _fidelity_sum(pairs, sigma)
        step = 0.2
        for _ in range(cfg.max_iters):
            grad = np.zeros((d, d), dtype=complex)
            for p, r in pairs:
                sr = matrix_sqrt(r)
                inner = sr @ sigma @ sr
                w, V = np.linalg.eigh(inner)
                w = np.maximum(w, 1e-14)
                inv_sqrt = (V / np.sqrt(w)) @ V.conj().T
                grad += 0.5 * np.sqrt(p) * (sr @ inv_sqrt @ sr)
            trial = _project_to_density(sigma + step * grad)
            tval = _fidelity_sum(pairs, trial)
            if tval > val + 1e-15:
                sigma, val = trial, tval
                step = min(step * 1.3, 2.0)
            else:
                step *= 0.5
                if step < 1e-9:
                    break
        best = max(best, val**2)

    lower = best
    converged = upper - lower <= cfg.tol
    return PSecrResult(value=lower, lower=lower, upper=upper, converged=converged)


# ---------------------------------------------------------------------------
# Closed-form bounds for the noisy projective measurement
# ---------------------------------------------------------------------------


def vn_bound_noisy_projective(noise: NoiseModel) -> float:
    """H2(P*) + (1 - P*) log2(d - 1): the square-root dilation's H(X|E)."""
    d = noise.d
    pstar = noise.trace_sqrt_element() ** 2 / d
    extra = (1.0 - pstar) * np.log2(d - 1) if d > 2 else 0.0
    return float(binary_entropy(min(pstar, 1.0)) + extra)


def hmax_bound_noisy_projective(noise: NoiseModel) -> float:
    """log2(d - (d-1) eps): the max-entropy of the square-root dilation."""
    return float(np.log2(noise.A))


@dataclass(frozen=True)
class EntropyReport:
    """Conditional entropies of one ensemble plus the closed-form bounds."""

    hmin: float
    h_vn: float
    hmax: float
    p_secr: float
    bounds: dict

    def __post_init__(self):
        if not (self.hmin <= self.h_vn + 1e-9 and self.h_vn <= self.hmax + 1e-9):
            raise ValidationError(
                f"entropy ordering violated: {self.hmin}, {self.h_vn}, {self.hmax}"
            )


def entropy_report(
    ens: EveEnsemble, noise: NoiseModel | None = None, config: PSecrConfig | None = None
) -> EntropyReport:
    secr = p_secr(ens, config)
    bounds = {}
    if noise is not None:
        bounds = state_side_comparison(noise)
        bounds["vn_bound"] = vn_bound_noisy_projective(noise)
        bounds["hmax_bound"] = hmax_bound_noisy_projective(noise)
    return EntropyReport(
        hmin=conditional_min_entropy(ens),
        h_vn=conditional_vn_entropy(ens),
        hmax=secr.hmax_bits,
        p_secr=secr.value,
        bounds=bounds,
    )


def state_side_comparison(noise: NoiseModel) -> dict:
    """Entropy quantities of the analogous noisy pure state.

    The optimal min-entropies of the noisy state and the noisy measurement
    coincide; the von Neumann and max-entropy counterparts are
    log2 d - S(rho_psi) and log2 d + log2 lmax(rho_psi).
    """
    d = noise.d
    rho = noise.noisy_state()
    lmax = float(np.linalg.eigvalsh(rho)[-1])
    pstar = noise.trace_sqrt_element() ** 2 / d
    return {
        "hmin_star": float(-np.log2(pstar)),
        "state_vn_star": float(np.log2(d) - von_neumann_entropy(rho)),
        "state_hmax_star": float(np.log2(d) + np.log2(lmax)),
    }


def entropy_curve_point(noise: NoiseModel) -> dict:
    """One row of the four-curve entropy figure for the given (d, eps)."""
    row = state_side_comparison(noise)
    return {
        "epsilon": noise.epsilon,
        "hmax_bound": hmax_bound_noisy_projective(noise),
        "vn_bound": vn_bound_noisy_projective(noise),
        "state_vn_star": row["state_vn_star"],
        "hmin_star": row["hmin_star"],
    }
