"""Guessing-probability SDP: primal solver, dual certificates, state search.

The primal problem, for a POVM {M_x} with m outcomes and a pure state |phi>,
maximizes sum_j <phi| K[j][j] |phi> over PSD matrices K[x][j] subject to

    sum_x d K[x][j] = 1 sum_x tr K[x][j]   (each sub-POVM sums to c_j 1),
    sum_j K[x][j] = M_x.

It is solved with a self-contained dense log-barrier interior-point method:
Newton steps on the equality-constrained barrier subproblem, eliminating the
block-diagonal Hessian against the constraint rows.  The equality multipliers
at the final central point yield a feasible dual certificate (Y_x, G_j) whose
objective upper-bounds the optimum, so every reported gap is certified rather
than assumed.  Problem sizes here are tiny (m^2 d^2 real variables), which
keeps the dense approach fast and dependency-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize as scipy_minimize

from .decompositions import Decomposition, verify_decomposition
from .linalg import (
    DomainError,
    SolverError,
    ValidationError,
    max_abs,
    require_hermitian,
)
from .povm import NoiseModel, Povm, PureState, depolarize, unbiased_state

MAX_SDP_DIM = 8
MAX_SDP_OUTCOMES = 8

_MU_GROWTH = 60.0
_NEWTON_TOL = 1e-10          # squared-decrement/2 at the final barrier stage
_NEWTON_TOL_PATH = 1e-5      # loose centering while t still grows
_MAX_INNER = 60
_ARMIJO = 0.25


@dataclass(frozen=True)
class SolverConfig:
    """Tunables of the interior-point solver and the state search."""

    tol: float = 1e-6
    max_iters: int = 200
    barrier_mu0: float = 1.0
    restore_eta: float = 1e-8
    multistarts: int = 32
    seed: int = 7

    def to_json_dict(self) -> dict:
        return {
            "tol": self.tol,
            "max_iters": self.max_iters,
            "barrier_mu0": self.barrier_mu0,
            "restore_eta": self.restore_eta,
            "multistarts": self.multistarts,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SolverConfig":
        known = {f: data[f] for f in
                 ("tol", "max_iters", "barrier_mu0", "restore_eta", "multistarts", "seed")
                 if f in data}
        return cls(**known)


@dataclass(frozen=True)
class PrimalProblem:
    povm: Povm
    state: PureState
    num_subpovms: int | None = None

    def __post_init__(self):
        if self.state.dim != self.povm.dim:
            raise ValidationError("state and POVM dimensions differ")
        n = self.num_subpovms if self.num_subpovms is not None else self.povm.num_outcomes
        if n != self.povm.num_outcomes:
            raise ValidationError(
                "the solver fixes the number of sub-POVMs equal to the number of outcomes"
            )
        object.__setattr__(self, "num_subpovms", n)


@dataclass(frozen=True)
class DualCertificate:
    """Dual variables {Y_x}, {G_j} with tr G_j = 0 and Y_x >= d_xj P_phi + G_j."""

    Y: tuple
    G: tuple

    def __post_init__(self):
        object.__setattr__(self, "Y", tuple(require_hermitian(M, 1e-8) for M in self.Y))
        object.__setattr__(self, "G", tuple(require_hermitian(M, 1e-8) for M in self.G))

    def dual_value(self, povm: Povm) -> float:
        return float(sum(np.real(np.trace(Y @ M)) for Y, M in zip(self.Y, povm.elements)))


@dataclass(frozen=True)
class DualCheck:
    dual_value: float
    feasible: bool
    min_eig_slack: float
    max_trace_violation: float


@dataclass(frozen=True)
class SolveResult:
    value: float
    decomposition: Decomposition
    dual_value: float | None
    gap: float | None
    iterations: int
    feasibility_residual: float
    restored: bool = False
    certificate: DualCertificate | None = None


# ---------------------------------------------------------------------------
# Problem structure (cached per (d, m, n))
# ---------------------------------------------------------------------------


def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal basis of d x d Hermitian matrices under tr(AB)."""
    B = np.zeros((d * d, d, d), dtype=complex)
    k = 0
    for i in range(d):
        B[k, i, i] = 1.0
        k += 1
    inv = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            B[k, i, j] = inv
            B[k, j, i] = inv
            k += 1
            B[k, i, j] = -1j * inv
            B[k, j, i] = 1j * inv
            k += 1
    return B


def traceless_basis(d: int) -> np.ndarray:
    """Orthonormal basis of the traceless Hermitian subspace (d^2 - 1)."""
    out = np.zeros((d * d - 1, d, d), dtype=complex)
    k = 0
    for r in range(1, d):
        v = np.zeros(d)
        v[:r] = 1.0
        v[r] = -r
        v /= np.sqrt(r * (r + 1))
        out[k] = np.diag(v)
        k += 1
    inv = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            out[k, i, j] = inv
            out[k, j, i] = inv
            k += 1
            out[k, i, j] = -1j * inv
            out[k, j, i] = 1j * inv
            k += 1
    return out


class _Structure:
    """Constraint matrix and basis data for a given (d, m, n)."""

    def __init__(self, d: int, m: int, n: int):
        self.d, self.m, self.n = d, m, n
        dd = d * d
        self.dd = dd
        self.nblocks = m * n
        self.nvar = m * n * dd
        self.B = hermitian_basis(d)
        self.Ubig = self.B.reshape(dd, dd).T.copy()   # column a = vec(B_a)
        T = traceless_basis(d)
        tau = np.einsum("aij,tji->ta", self.B, T).real  # (dd-1, dd)
        # Group 1: for j < n-1, traceless part of sum_x K[x][j] vanishes.
        # (The j = n-1 family is implied by group 2 and dropped to keep full
        # row rank.)  Group 2: sum_j K[x][j] = M_x, one row per (x, basis a).
        n1 = (n - 1) * (dd - 1)
        n2 = m * dd
        A = np.zeros((n1 + n2, m, n, dd))
        r = 0
        for j in range(n - 1):
            for t in range(dd - 1):
                A[r, :, j, :] = tau[t]
                r += 1
        self.group2_start = r
        for x in range(m):
            for a in range(dd):
                A[r, x, :, a] = 1.0
                r += 1
        self.A = A.reshape(n1 + n2, self.nvar)
        self.ncon = n1 + n2
        self.A3 = self.A.reshape(self.ncon, self.nblocks, dd)

    def coords(self, M: np.ndarray) -> np.ndarray:
        return np.einsum("aij,ji->a", self.B, M).real

    def mats(self, k: np.ndarray) -> np.ndarray:
        """Coordinates (nblocks, dd) -> stacked matrices (nblocks, d, d)."""
        return np.einsum("ba,aij->bij", k, self.B)

    def coords_of_stack(self, S: np.ndarray) -> np.ndarray:
        return np.einsum("aij,bji->ba", self.B, S).real


_STRUCTURES: dict = {}


def _structure(d: int, m: int, n: int) -> _Structure:
    key = (d, m, n)
    if key not in _STRUCTURES:
        _STRUCTURES[key] = _Structure(d, m, n)
    return _STRUCTURES[key]


# ---------------------------------------------------------------------------
# Interior-point solver
# ---------------------------------------------------------------------------


def _chol_logdet(K: np.ndarray) -> float | None:
    """Sum of log det over stacked blocks, or None if any block is not PD."""
    try:
        L = np.linalg.cholesky(K)
    except np.linalg.LinAlgError:
        return None
    diags = np.einsum("bii->bi", L).real
    if np.any(diags <= 0.0):
        return None
    return 2.0 * float(np.sum(np.log(diags)))


def _least_squares_multipliers(Atil: np.ndarray, gtil: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve min_nu ||Atil^T nu + gtil|| and return (nu, residual).

    Corrected seminormal equations (Cholesky plus one refinement sweep) with
    a QR fallback when the Gram matrix loses definiteness near the boundary.
    """
    from scipy.linalg import cho_factor, cho_solve

    rhs = Atil @ gtil
    try:
        fac = cho_factor(Atil @ Atil.T, lower=True, check_finite=False)
        nu = cho_solve(fac, -rhs, check_finite=False)
        rtil = gtil + Atil.T @ nu
        nu = nu - cho_solve(fac, Atil @ rtil, check_finite=False)
    except np.linalg.LinAlgError:
        Q, Rqr = np.linalg.qr(Atil.T)
        nu = np.linalg.solve(Rqr, Q.T @ (-gtil))
    rtil = gtil + Atil.T @ nu
    return nu, rtil


def solve_primal(
    problem: PrimalProblem, config: SolverConfig | None = None, polish: bool = True
) -> SolveResult:
    """Solve the guessing-probability SDP at a fixed state.

    Returns a feasible decomposition whose objective is within the certified
    gap of the optimum, together with an independently verified dual
    certificate.  Rank-deficient POVMs are mixed with ``restore_eta`` of white
    noise to create a strict interior; the result is flagged ``restored``.
    With ``polish`` (the default) the barrier solution is rounded onto the
    optimal face identified by the dual certificate, which usually shrinks
    the certified gap by several orders of magnitude.
    """
    cfg = config or SolverConfig()
    povm, state = problem.povm, problem.state
    d, m = povm.dim, povm.num_outcomes
    n = problem.num_subpovms
    if d > MAX_SDP_DIM or m > MAX_SDP_OUTCOMES:
        raise ValidationError(f"dense solver supports d <= {MAX_SDP_DIM}, outcomes <= {MAX_SDP_OUTCOMES}")

    elements = [np.asarray(E) for E in povm.elements]
    restored = False
    min_eig = min(float(np.linalg.eigvalsh(E)[0]) for E in elements)
    if min_eig < 10.0 * cfg.restore_eta:
        elements = [depolarize(E, cfg.restore_eta) for E in elements]
        restored = True

    st = _structure(d, m, n)
    dd, nblocks = st.dd, st.nblocks
    b = np.zeros(st.ncon)
    for x in range(m):
        b[st.group2_start + x * dd : st.group2_start + (x + 1) * dd] = st.coords(elements[x])
    proj = state.projector()
    proj_coords = st.coords(proj)
    c = np.zeros((m, n, dd))
    for j in range(min(m, n)):
        c[j, j] = proj_coords
    c = c.reshape(st.nvar)

    # Strictly feasible start: K[x][j] = M_x / n.
    k = np.zeros((m, n, dd))
    for x in range(m):
        k[x, :, :] = st.coords(elements[x]) / n
    k = k.reshape(nblocks, dd)
    k0 = k.copy()

    nu_total = m * n * d
    gap_target = cfg.tol
    t_final = nu_total / (0.25 * gap_target)
    t = cfg.barrier_mu0
    iters = 0
    AT = st.A.T

    cblocks = c.reshape(nblocks, dd)
    svec_eye = st.coords(np.eye(d))

    def newton_center(
        t: float, k: np.ndarray, iters: int, newton_tol: float
    ) -> tuple[np.ndarray, int, np.ndarray]:
        """Center at barrier weight t.  Returns (k, iters, multipliers).

        The Newton system is solved in the scaled space where the barrier
        Hessian is the square of Phi^-1, Phi being conjugation by K^(1/2):
        there the step is a plain least-squares solve, which stays accurate
        even when K approaches the boundary along the central path.
        """
        nu = np.zeros(st.ncon)
        for _ in range(_MAX_INNER):
            K = st.mats(k)
            w, V = np.linalg.eigh(K)
            w = np.maximum(w, 1e-300)
            R = (V * np.sqrt(w)[:, None, :]) @ V.conj().swapaxes(1, 2)  # K^(1/2)
            # Phi = scaled-space map: coords(X) -> coords(R X R), as the
            # real matrix Re(U^H (R kron R^T) U).
            T = (R[:, :, None, :, None] * R.swapaxes(1, 2)[:, None, :, None, :]).reshape(
                nblocks, dd, dd
            )
            Phi = np.real(st.Ubig.conj().T @ T @ st.Ubig)
            # Scaled gradient: Phi g = -t Phi c - svec(identity).
            gtil = -t * (Phi @ cblocks[:, :, None])[:, :, 0] - svec_eye[None, :]
            gtil = gtil.reshape(st.nvar)
            Atil = np.matmul(st.A3.transpose(1, 0, 2), Phi).transpose(1, 0, 2).reshape(
                st.ncon, st.nvar
            )
            nu, rtil = _least_squares_multipliers(Atil, gtil)
            delta = -(Phi @ rtil.reshape(nblocks, dd)[:, :, None])[:, :, 0]
            lam2 = float(np.dot(rtil, rtil))
            if lam2 / 2.0 <= newton_tol:
                break
            if lam2 <= 0.25:
                # Quadratic-convergence region: take the full Newton step.
                # (The Armijo decrease is far below the float resolution of
                # the barrier value at large t, so testing it would stall.)
                alpha = 1.0
                while alpha > 1e-8 and _chol_logdet(st.mats(k + alpha * delta)) is None:
                    alpha *= 0.5
                if alpha <= 1e-8:
                    break
            else:
                # Damped phase: positive definiteness then Armijo backtracking.
                logdet0 = _chol_logdet(st.mats(k))
                phi0 = -t * float(np.dot(c, k.reshape(st.nvar))) - logdet0
                slope = -lam2
                alpha = 1.0
                for _ in range(60):
                    trial = k + alpha * delta
                    logdet = _chol_logdet(st.mats(trial))
                    if logdet is not None:
                        phi = -t * float(np.dot(c, trial.reshape(st.nvar))) - logdet
                        if phi <= phi0 + _ARMIJO * alpha * slope:
                            break
                    alpha *= 0.5
                else:
                    break  # no progress possible at this scale
            k = k + alpha * delta
            iters += 1
            if iters > cfg.max_iters:
                raise SolverError(
                    f"interior-point iteration cap {cfg.max_iters} exceeded "
                    f"(t={t:.3e}, newton decrement^2={lam2:.3e})"
                )
        return k, iters, nu

    def extract_certificate(t: float, nu: np.ndarray) -> DualCertificate:
        # At the central point, -t c - svec(K^-1) + A^T nu = 0; the equality
        # multipliers nu give Y_x and (traceless) G_j after dividing by t.
        Tbasis = traceless_basis(d)
        G = []
        for j in range(n):
            if j == n - 1:
                G.append(np.zeros((d, d), dtype=complex))
                continue
            seg = nu[j * (dd - 1) : (j + 1) * (dd - 1)]
            G.append(-np.einsum("t,tij->ij", seg, Tbasis) / t)
        Y = []
        for x in range(m):
            seg = nu[st.group2_start + x * dd : st.group2_start + (x + 1) * dd]
            Y.append(np.einsum("a,aij->ij", seg, st.B) / t)
        # Restore exact dual feasibility with a uniform shift if needed.
        min_slack = min(
            float(np.linalg.eigvalsh(Y[x] - (proj if x == j else 0.0) - G[j])[0])
            for x in range(m)
            for j in range(n)
        )
        if min_slack < 0.0:
            Y = [Yx + (-min_slack + 1e-15) * np.eye(d) for Yx in Y]
        return DualCertificate(tuple(Y), tuple(G))

    AAT_factor = None

    def _affine_project(kv: np.ndarray) -> np.ndarray:
        nonlocal AAT_factor
        from scipy.linalg import cho_factor, cho_solve

        if AAT_factor is None:
            AAT_factor = cho_factor(st.A @ AT, lower=True, check_finite=False)
        return kv + AT @ cho_solve(AAT_factor, b - st.A @ kv, check_finite=False)

    def round_primal(k: np.ndarray, cert: DualCertificate, value: float):
        """Round the center onto the optimal face identified by the dual.

        The optimal K[x][j] lives in the near-kernel of the dual slack
        Z[x][j].  Alternating projections between the affine constraint
        space and the blockwise rank-r PSD cone (r from the slack spectrum)
        converge to that face; the result is accepted only if it verifies.
        """
        tau = max(np.sqrt(max(dual_value - value, 0.0)), 1e-9)
        ranks = []
        for x in range(m):
            for j in range(n):
                Z = cert.Y[x] - cert.G[j] - (proj if x == j else 0.0)
                w = np.linalg.eigvalsh(Z)
                ranks.append(d - int(np.sum(w < tau * max(1.0, w[-1]))))
        kv = k.reshape(st.nvar).copy()
        for _ in range(400):
            Kb = st.mats(kv.reshape(nblocks, dd))
            w, V = np.linalg.eigh(Kb)
            for bidx, rank_cut in enumerate(ranks):
                w[bidx, :rank_cut] = 0.0
            w = np.maximum(w, 0.0)
            Kb = np.einsum("bik,bk,bjk->bij", V, w, V.conj())
            kv = st.coords_of_stack(Kb).reshape(st.nvar)
            resid = max_abs(st.A @ kv - b)
            kv = _affine_project(kv)
            if resid <= 1e-13:
                break
        k_new = kv.reshape(nblocks, dd)
        feas = max_abs(st.A @ kv - b)
        min_eig = float(np.min(np.linalg.eigvalsh(st.mats(k_new))))
        value_new = float(np.dot(c, kv))
        if feas > 1e-11 or min_eig < -1e-11 or value_new < value:
            return None
        return k_new, value_new

    def round_dual(k: np.ndarray, cert: DualCertificate):
        """Fit (Y, G) to exact complementarity against the rounded primal.

        Solving Z[x][j] v = 0 for every populated eigenvector v of K[x][j]
        in least squares lands on the dual optimum; feasibility is restored
        with a uniform shift and the candidate kept only if it tightens the
        certified bound.
        """
        Tbasis = traceless_basis(d)
        ny = m * dd
        ng = (n - 1) * (dd - 1)
        rows = []
        rhs = []
        Kb = st.mats(k)
        for x in range(m):
            for j in range(n):
                K = Kb[x * n + j]
                w, V = np.linalg.eigh(K)
                cols = V[:, w > max(w[-1], 0.0) * 1e-7 + 1e-12]
                for idx in range(cols.shape[1]):
                    v = cols[:, idx]
                    Yv = np.einsum("aij,j->ai", st.B, v)          # (dd, d)
                    Gv = np.einsum("tij,j->ti", Tbasis, v)        # (dd-1, d)
                    row = np.zeros((d, ny + ng), dtype=complex)
                    row[:, x * dd : (x + 1) * dd] = Yv.T
                    if j < n - 1:
                        row[:, ny + j * (dd - 1) : ny + (j + 1) * (dd - 1)] = -Gv.T
                    rows.append(row)
                    rhs.append((proj @ v) if x == j else np.zeros(d, dtype=complex))
        Arow = np.concatenate([np.vstack([r.real, r.imag]) for r in rows])
        brow = np.concatenate([np.concatenate([v.real, v.imag]) for v in rhs])
        sol, *_ = np.linalg.lstsq(Arow, brow, rcond=None)
        Y = [np.einsum("a,aij->ij", sol[x * dd : (x + 1) * dd], st.B) for x in range(m)]
        G = [
            np.einsum("t,tij->ij", sol[ny + j * (dd - 1) : ny + (j + 1) * (dd - 1)], Tbasis)
            for j in range(n - 1)
        ] + [np.zeros((d, d), dtype=complex)]
        min_slack = min(
            float(np.linalg.eigvalsh(Y[x] - (proj if x == j else 0.0) - G[j])[0])
            for x in range(m)
            for j in range(n)
        )
        if min_slack < -1e-6:
            return None
        if min_slack < 0.0:
            Y = [Yx + (-min_slack + 1e-15) * np.eye(d) for Yx in Y]
        return DualCertificate(tuple(Y), tuple(G))

    cert = None
    value = dual_value = 0.0
    for attempt in range(4):
        while True:
            final_stage = t >= t_final
            tol_inner = _NEWTON_TOL if final_stage else _NEWTON_TOL_PATH
            k, iters, nu = newton_center(t, k, iters, tol_inner)
            if final_stage:
                break
            t = min(t * _MU_GROWTH, t_final)
        # Re-project onto the affine constraint manifold (undo solve drift),
        # then restore strict positivity if the projection grazed the
        # boundary (mixing with the feasible start keeps A k = b exactly).
        kv = k.reshape(st.nvar)
        drift = b - st.A @ kv
        if max_abs(drift) > 0.0:
            kv = kv + AT @ np.linalg.lstsq(st.A @ AT, drift, rcond=None)[0]
            k = kv.reshape(nblocks, dd)
        theta = 1e-9
        while _chol_logdet(st.mats(k)) is None and theta < 1e-2:
            k = (1.0 - theta) * k + theta * k0
            theta *= 10.0
        cert = extract_certificate(t, nu)
        value = float(np.dot(c, k.reshape(st.nvar)))
        dual_value = cert.dual_value(povm)
        if dual_value - value <= gap_target:
            break
        t_final *= 5.0  # certified gap too large: push the barrier further

    if polish:
        rounded = round_primal(k, cert, value)
        if rounded is not None:
            k, value = rounded
            better = round_dual(k, cert)
            if better is not None:
                dual_new = better.dual_value(povm)
                if value - 1e-12 <= dual_new <= dual_value:
                    cert, dual_value = better, dual_new
    gap = dual_value - value
    decomposition = Decomposition(st.mats(k).reshape(m, n, d, d))
    report = verify_decomposition(decomposition, povm, tol=1e-8)
    feas = max(report.max_proportionality_violation, report.max_reconstruction_violation,
               report.max_psd_violation)
    if gap > 20.0 * gap_target:
        raise SolverError(
            f"certified duality gap {gap:.3e} above tolerance {gap_target:.1e} "
            f"(feasibility residual {feas:.3e})"
        )
    return SolveResult(
        value=value,
        decomposition=decomposition,
        dual_value=dual_value,
        gap=gap,
        iterations=iters,
        feasibility_residual=feas,
        restored=restored,
        certificate=cert,
    )


def guessing_probability(povm: Povm, state: PureState, config: SolverConfig | None = None) -> SolveResult:
    return solve_primal(PrimalProblem(povm, state), config)


# ---------------------------------------------------------------------------
# Analytic dual certificate for the noisy projective measurement
# ---------------------------------------------------------------------------


def build_dual_certificate_noisy_projective(noise: NoiseModel) -> DualCertificate:
    """The closed-form dual certificate at the unbiased state.

    Feasible for 0 < eps < 1 and any d >= 2 (the d - 2 terms vanish for
    qubits), with objective equal to the closed-form optimum
    (tr sqrt(M_1))^2 / d.
    """
    d, eps = noise.d, noise.epsilon
    if not 0.0 < eps < 1.0:
        raise DomainError("the analytic dual certificate requires 0 < eps < 1")
    A = noise.A
    trsqrt = noise.trace_sqrt_element()
    eye = np.eye(d)
    psi = unbiased_state(d).amplitudes
    proj_psi = np.outer(psi, psi)
    alpha = (d - 1) / d - (d - 1) / d**2 * trsqrt * np.sqrt(d / eps)
    beta = (d - 1) / d - (d - 2) / d**2 * trsqrt * np.sqrt(d / eps)
    gamma = trsqrt / (d * np.sqrt(d)) * np.sqrt((d - 1) / eps) * (
        (np.sqrt(A) - np.sqrt(eps)) / (np.sqrt(A) + np.sqrt(eps))
    )
    Y = []
    T = []
    for x in range(d):
        psi_not_x = (psi - psi[x] * eye[x])
        psi_not_x = psi_not_x / np.linalg.norm(psi_not_x)
        inv_sqrt_Mx = np.sqrt(d / A) * np.outer(eye[x], eye[x]) + np.sqrt(d / eps) * (
            eye - np.outer(eye[x], eye[x])
        )
        Tx = -gamma * (np.outer(eye[x], psi_not_x) + np.outer(psi_not_x, eye[x]))
        T.append(Tx)
        Y.append(trsqrt / d**2 * inv_sqrt_Mx + Tx)
    G = []
    sqrt_eps_d = np.sqrt(eps / d)
    sqrtA_d = np.sqrt(A / d)
    for j in range(d):
        ej = eye[j]
        psi_not_j = (psi - psi[j] * ej)
        psi_not_j = psi_not_j / np.linalg.norm(psi_not_j)
        one_not_j = eye - np.outer(ej, ej)
        sqrt_Mj_psi = sqrt_eps_d * psi + (sqrtA_d - sqrt_eps_d) * psi[j] * ej
        Gj = (
            T[j]
            - (d - 1) / d * proj_psi
            - alpha * (one_not_j - np.outer(psi_not_j, psi_not_j))
            + beta * (eye - d * np.outer(sqrt_Mj_psi, sqrt_Mj_psi))
        )
        G.append(Gj)
    return DualCertificate(tuple(Y), tuple(G))


def verify_dual_certificate(
    cert: DualCertificate,
    state: PureState,
    povm: Povm,
    tol: float = 1e-9,
    trace_tol: float = 1e-10,
) -> DualCheck:
    """Check tr G_j = 0 and PSD-ness of every slack Y_x - d_xj P_phi - G_j.

    A feasible certificate makes its dual value a valid upper bound on the
    guessing probability at the given state.
    """
    if any(Y.shape[0] != povm.dim for Y in cert.Y) or len(cert.Y) != povm.num_outcomes:
        raise ValidationError("certificate shape does not match the POVM")
    proj = state.projector()
    max_trace = max(abs(float(np.real(np.trace(Gj)))) for Gj in cert.G)
    min_eig = np.inf
    for x, Yx in enumerate(cert.Y):
        for j, Gj in enumerate(cert.G):
            slack = Yx - Gj - (proj if x == j else 0.0)
            w = np.linalg.eigvalsh(require_hermitian(slack, 1e-8))
            min_eig = min(min_eig, float(w[0]))
    feasible = (min_eig >= -tol) and (max_trace <= trace_tol)
    return DualCheck(cert.dual_value(povm), feasible, float(min_eig), float(max_trace))


def complementary_slackness_residual(
    decomp: Decomposition, cert: DualCertificate, state: PureState
) -> float:
    """max over (x, j) of the max-norm of K[x][j] (Y_x - d_xj P_phi - G_j)."""
    if decomp.dim != cert.Y[0].shape[0] or decomp.num_outcomes != len(cert.Y):
        raise ValidationError("decomposition and certificate shapes differ")
    if state.dim != decomp.dim:
        raise ValidationError("state dimension mismatch")
    proj = state.projector()
    worst = 0.0
    for x in range(decomp.num_outcomes):
        for j in range(decomp.num_subpovms):
            slack = cert.Y[x] - cert.G[j] - (proj if x == j else 0.0)
            worst = max(worst, max_abs(decomp.K[x, j] @ slack))
    return worst


# ---------------------------------------------------------------------------
# Minimization over input states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StateSearch:
    """Best state found by the multistart search and its certified value."""

    state: PureState
    value: float
    solve: SolveResult
    starts: int
    converged: bool
    ties: tuple = field(default_factory=tuple)


def _state_from_params(x: np.ndarray, d: int) -> PureState | None:
    v = x[:d] + 1j * x[d:]
    norm = np.linalg.norm(v)
    if norm < 1e-8:
        return None
    return PureState(v / norm)


def minimize_over_states(
    povm: Povm,
    config: SolverConfig | None = None,
    value_tol: float = 1e-4,
    report_ties: bool = False,
) -> StateSearch:
    """Minimize the guessing probability over pure input states.

    Deterministic multistart (seeded random states plus eigenbasis-unbiased
    heuristics) followed by Nelder-Mead refinement on the real embedding of
    the state, with the phase and norm gauge fixed by normalization.  The
    returned value is re-solved at full precision at the best state; the
    result is flagged not converged when only a single start reached it.
    """
    cfg = config or SolverConfig()
    d = povm.dim
    if d > 4:
        raise ValidationError("state search supports d <= 4 at the default budget")
    rng = np.random.default_rng(cfg.seed)
    search_cfg = replace(cfg, tol=max(cfg.tol, 1e-5))

    def objective(x: np.ndarray) -> float:
        st = _state_from_params(x, d)
        if st is None:
            return 2.0
        try:
            return solve_primal(PrimalProblem(povm, st), search_cfg, polish=False).value
        except SolverError:
            return 2.0

    starts: list[np.ndarray] = []
    seen: list[np.ndarray] = []
    for E in povm.elements[:2]:
        w, V = np.linalg.eigh(E)
        u = V.sum(axis=1) / np.sqrt(d)
        if not any(abs(abs(np.vdot(u, v)) - 1.0) < 1e-12 for v in seen):
            seen.append(u)
            starts.append(np.concatenate([u.real, u.imag]))
    u = np.full(d, 1.0 / np.sqrt(d), dtype=complex)
    if not any(abs(abs(np.vdot(u, v)) - 1.0) < 1e-12 for v in seen):
        starts.append(np.concatenate([u.real, np.zeros(d)]))
    for _ in range(cfg.multistarts):
        v = rng.normal(size=2 * d)
        starts.append(v / np.linalg.norm(v))

    maxfev = 40 + 40 * (d - 2)
    results = []
    for x0 in starts:
        res = scipy_minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxfev": maxfev, "fatol": 1e-9, "xatol": 1e-6},
        )
        st = _state_from_params(res.x, d)
        if st is not None:
            results.append((float(res.fun), st))
    if not results:
        raise SolverError("state search produced no valid candidate")
    results.sort(key=lambda item: item[0])
    best_value, best_state = results[0]
    final = solve_primal(PrimalProblem(povm, best_state), cfg)
    near = [st for val, st in results if val <= best_value + value_tol]
    ties = tuple(st for val, st in results if val <= best_value + 1e-6) if report_ties else ()
    return StateSearch(
        state=best_state,
        value=final.value,
        solve=final,
        starts=len(starts),
        converged=len(near) >= 2,
        ties=ties,
    )
