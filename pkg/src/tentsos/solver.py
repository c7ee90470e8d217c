"""Primal-dual interior-point solver for the assembled block SDPs.

The problem solved (in the assembly's normalized scale) is

    maximize    a
    subject to  sum_b <A_{i,b}, X_b> + (B w)_i = rhs_i      (i = 1..m)
                X_b  positive semidefinite,   w = (a, u) free,

whose dual is

    minimize    rhs^T y
    subject to  S_b = A_b^T(y) >= 0,   B^T y = (1, 0, ..., 0).

The iteration is an infeasible-start Mehrotra predictor-corrector method
with the Nesterov-Todd symmetrized search direction: with W the scaling
point (W S W = X), the Schur complement matrix has entries
M_ij = sum_b tr(A_i W_b A_j W_b), assembled blockwise against the sparse
constraint data in fixed-size chunks so memory stays bounded.  Free
variables are handled natively through a small saddle-point elimination;
nothing is split into PSD parts.

Everything is deterministic: fixed initial iterate, fixed chunk sizes,
no randomization.  A relaxation whose value is -infinity (an
unfulfillable coefficient identity) shows up as a dual objective that
diverges below the configured threshold while the dual equations stay
satisfied; the declaration rule is documented in ``_dual_divergence``.
Several relaxations in this domain are only weakly infeasible (feasibility
is approached by diverging iterates), which is why the detector keys on
objective divergence rather than on an exact Farkas certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .sos_sdp import SdpProblem

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_MAX_ITERATIONS = "max_iterations"
STATUS_NUMERICAL_ERROR = "numerical_error"


class BudgetExceededError(RuntimeError):
    """Problem size exceeds the configured desk-scale limits."""

    def __init__(self, message: str, block_size: int = 0, constraints: int = 0):
        super().__init__(message)
        self.block_size = block_size
        self.constraints = constraints


class UnknownBackendError(KeyError):
    """Requested solver backend is not registered."""


@dataclass(frozen=True)
class SolverSettings:
    tol_gap: float = 1e-8            # relative duality gap at optimality
    tol_feas: float = 1e-8           # relative primal/dual residual
    max_iter: int = 200
    infeasibility_threshold: float = 1e10   # dual objective divergence bound
    max_block_size: int = 300        # desk-scale guard, configurable
    max_constraints: int = 5000
    step_fraction: float = 0.98      # fraction of the distance to the boundary
    verbose: bool = False

    def __post_init__(self):
        if min(self.tol_gap, self.tol_feas) <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class IterationRecord:
    iteration: int
    mu: float
    objective_primal: float
    objective_dual: float
    rel_gap: float
    res_primal: float
    res_dual: float
    res_free: float
    weak_duality_slack: float
    sigma: float = 0.0
    alpha_primal: float = 0.0
    alpha_dual: float = 0.0

    def as_line(self) -> str:
        return (
            f"iter {self.iteration:3d}  mu={self.mu:9.3e}  p={self.objective_primal:+12.6e}  "
            f"d={self.objective_dual:+12.6e}  gap={self.rel_gap:8.2e}  "
            f"rp={self.res_primal:8.2e}  rd={self.res_dual:8.2e}  rg={self.res_free:8.2e}  "
            f"sig={self.sigma:7.1e}  step={self.alpha_primal:4.2f}/{self.alpha_dual:4.2f}"
        )


@dataclass
class SdpSolution:
    """Solver outcome in user (unnormalized) scale.

    ``gap`` is the relative duality gap; the per-iteration ``log`` is kept
    in the solver's normalized scale for diagnostics.
    """

    status: str
    primal_blocks: List[np.ndarray]
    free_scalar: float
    free_vector: np.ndarray
    dual_vector: np.ndarray
    objective_primal: float
    objective_dual: float
    gap: float
    iterations: int
    log: List[IterationRecord] = field(default_factory=list)
    message: str = ""

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "free_scalar": self.free_scalar,
            "free_vector": [float(v) for v in self.free_vector],
            "objective_primal": self.objective_primal,
            "objective_dual": self.objective_dual,
            "gap": self.gap,
            "iterations": self.iterations,
            "primal_blocks": [b.tolist() for b in self.primal_blocks],
            "dual_vector": [float(v) for v in self.dual_vector],
        }


# ---- numeric problem data --------------------------------------------------


class _NumericSdp:
    """Float view of an SdpProblem with per-block sparse constraint data."""

    def __init__(self, problem: SdpProblem):
        self.m = problem.num_constraints
        self.dims = problem.block_dims
        self.rhs = np.array([float(x) for x in problem.rhs])
        self.P: List[sp.csr_matrix] = []
        for block in problem.blocks:
            n = block.dim
            rows, cols, vals = [], [], []
            for (i, p, q, v) in block.triplets:
                fv = float(v)
                rows.append(i)
                cols.append(p * n + q)
                vals.append(fv)
                if p != q:
                    rows.append(i)
                    cols.append(q * n + p)
                    vals.append(fv)
            self.P.append(
                sp.csr_matrix(
                    (vals, (rows, cols)), shape=(self.m, n * n), dtype=np.float64
                )
            )
        # free columns: a first, then the free polynomial coefficients
        q = problem.num_free + 1
        B = np.zeros((self.m, q))
        B[problem.a_row, 0] = 1.0
        for (i, t, v) in problem.free_entries:
            B[i, t + 1] += float(v)
        self.B = B
        self.obj = np.zeros(q)
        self.obj[0] = 1.0
        # columns that are identically zero cannot move; freeze them
        self.active_cols = np.flatnonzero(np.abs(B).sum(axis=0) > 0.0)
        if 0 not in self.active_cols:
            self.active_cols = np.concatenate([[0], self.active_cols]).astype(int)
        # chunked reshaped views for Schur assembly (fixed, hence deterministic)
        self.chunks: List[List[Tuple[int, int, sp.csr_matrix]]] = []
        for b, n in enumerate(self.dims):
            target = max(1, int(12_000_000 // max(1, n * n)))
            pieces = []
            for i0 in range(0, self.m, target):
                i1 = min(self.m, i0 + target)
                piece = self.P[b][i0:i1]
                resh = sp.csr_matrix(piece.reshape(((i1 - i0) * n, n)))
                pieces.append((i0, i1, resh))
            self.chunks.append(pieces)

    def apply_A(self, X: List[np.ndarray]) -> np.ndarray:
        out = np.zeros(self.m)
        for P, Xb in zip(self.P, X):
            out += P @ Xb.ravel()
        return out

    def apply_At(self, y: np.ndarray) -> List[np.ndarray]:
        out = []
        for P, n in zip(self.P, self.dims):
            Z = (P.T @ y).reshape(n, n)
            out.append(0.5 * (Z + Z.T))
        return out


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def _max_step(V: np.ndarray, dV: np.ndarray, chol: np.ndarray) -> float:
    """Largest alpha <= inf with V + alpha dV >= 0, via L^{-1} dV L^{-T}."""
    W = sla.solve_triangular(chol, dV, lower=True)
    W = sla.solve_triangular(chol, W.T, lower=True)
    lam = np.linalg.eigvalsh(_sym(W))[0]
    if lam >= -1e-14:
        return np.inf
    return -1.0 / lam


def _dual_divergence(rec: "IterationRecord", settings: SolverSettings) -> str:
    """Residual-heuristic declarations from a diverging dual objective.

    With near-feasible dual iterates (S = A^T(y) up to a small residual and
    B^T y = obj), every primal-feasible point satisfies  a <= rhs^T y,  so a
    dual objective diving below -threshold certifies that the program has no
    finite optimum: either no feasible point exists at all or feasibility is
    only approached in the limit of diverging iterates.  Both cases mean the
    relaxation value is -infinity and are reported as infeasible.  The mirror
    test catches a primal objective escaping to +infinity while feasible.
    """
    thr = settings.infeasibility_threshold
    dual_ok = rec.res_dual <= 1e-6 and rec.res_free <= 1e-6
    if rec.objective_dual < -thr and dual_ok and (
        rec.res_primal > 100.0 * settings.tol_feas
        or rec.objective_primal < -0.5 * thr
    ):
        return STATUS_INFEASIBLE
    if rec.objective_primal > thr and rec.res_primal <= 1e-6:
        return STATUS_UNBOUNDED
    return ""


def _solve_builtin(problem: SdpProblem, settings: SolverSettings) -> SdpSolution:
    num = _NumericSdp(problem)
    m, dims = num.m, num.dims

    if dims and max(dims) > settings.max_block_size:
        raise BudgetExceededError(
            f"PSD block of size {max(dims)} exceeds the limit "
            f"{settings.max_block_size}",
            block_size=max(dims),
            constraints=m,
        )
    if m > settings.max_constraints:
        raise BudgetExceededError(
            f"{m} constraints exceed the limit {settings.max_constraints}",
            block_size=max(dims) if dims else 0,
            constraints=m,
        )

    eta = 1.0 + float(np.abs(num.rhs).max(initial=0.0))
    X = [eta * np.eye(n) for n in dims]
    S = [eta * np.eye(n) for n in dims]
    y = np.zeros(m)
    w = np.zeros(num.B.shape[1])
    k_total = float(sum(dims)) if dims else 1.0
    b_norm = 1.0 + float(np.linalg.norm(num.rhs))
    Bact = num.B[:, num.active_cols]
    g_act = num.obj[num.active_cols]

    log: List[IterationRecord] = []
    status = STATUS_MAX_ITERATIONS
    message = ""
    iteration = 0
    best_metric = np.inf
    best_iterate = None
    stall_count = 0
    dobj_history: List[float] = []

    def current_record() -> IterationRecord:
        pobj = float(num.obj @ w)
        dobj = float(num.rhs @ y)
        rel_gap = abs(dobj - pobj) / (1.0 + max(abs(pobj), abs(dobj)))
        r_p = num.rhs - num.apply_A(X) - num.B @ w
        At = num.apply_At(y)
        dres_num = 0.0
        dres_den = 1.0
        xr = 0.0
        for Xb, Sb, Ab in zip(X, S, At):
            Rdb = Ab - Sb
            dres_num += float(np.linalg.norm(Rdb) ** 2)
            dres_den += float(np.linalg.norm(Sb) ** 2)
            xr += abs(float(np.tensordot(Xb, Rdb)))
        r_g = num.obj - num.B.T @ y
        mu = sum(float(np.tensordot(Xb, Sb)) for Xb, Sb in zip(X, S)) / k_total
        slack = abs(float(r_p @ y)) + xr + abs(float(r_g @ w))
        return IterationRecord(
            iteration=iteration,
            mu=mu,
            objective_primal=pobj,
            objective_dual=dobj,
            rel_gap=rel_gap,
            res_primal=float(np.linalg.norm(r_p)) / b_norm,
            res_dual=math.sqrt(dres_num) / math.sqrt(dres_den),
            res_free=float(np.abs(r_g).max(initial=0.0)),
            weak_duality_slack=slack,
        )

    for iteration in range(settings.max_iter + 1):
        rec = current_record()
        log.append(rec)
        if settings.verbose:
            print(rec.as_line())

        if (
            rec.rel_gap <= settings.tol_gap
            and rec.res_primal <= settings.tol_feas
            and rec.res_dual <= settings.tol_feas
            and rec.res_free <= settings.tol_feas
        ):
            status = STATUS_OPTIMAL
            best_iterate = None  # current iterate is the answer
            break

        declared = _dual_divergence(rec, settings)
        if declared:
            status = declared
            message = "objective divergence with near-feasible dual iterates"
            break

        # progress bookkeeping; objective divergence also counts as progress
        # progress bookkeeping; a steadily diverging objective (the road to
        # an infeasibility declaration) also counts as progress
        metric = max(rec.rel_gap, rec.res_primal, rec.res_dual, rec.res_free)
        dobj_history.append(rec.objective_dual)
        if len(dobj_history) > 10:
            past = dobj_history[-11]
            diverging = abs(rec.objective_dual) > 1.5 * abs(past) + 1.0
        else:
            diverging = True
        improved = metric < (1.0 - 1e-5) * best_metric
        if improved:
            best_metric = metric
            best_iterate = (
                [Xb.copy() for Xb in X],
                [Sb.copy() for Sb in S],
                y.copy(),
                w.copy(),
                rec,
            )
        if improved or diverging:
            stall_count = 0
        else:
            stall_count += 1
        blown_up = (
            best_metric < np.inf and metric > 1e4 * best_metric and not diverging
        )
        if stall_count >= 100 or blown_up:
            status = STATUS_NUMERICAL_ERROR
            message = (
                "iteration stopped making progress; best iterate reached "
                f"max(gap,residuals) = {best_metric:.2e}"
            )
            break
        if iteration >= settings.max_iter:
            break

        # factorizations of the current iterate
        try:
            chol_X = [np.linalg.cholesky(Xb) for Xb in X]
            chol_S = [np.linalg.cholesky(Sb) for Sb in S]
        except np.linalg.LinAlgError:
            status = STATUS_NUMERICAL_ERROR
            message = "iterate lost positive definiteness"
            break
        Sinv = [
            _sym(sla.cho_solve((L, True), np.eye(L.shape[0]))) for L in chol_S
        ]
        # scaling point W = R R^T with W S W = X.  From the SVD of
        # Ls^T Lx = U diag(sv) V^T:  R = Lx V diag(sv)^{-1/2}, and the
        # scaled point R^{-1} X R^{-T} = R^T S R = diag(sv) is diagonal.
        Wnt, Rfac, Rinv, svals = [], [], [], []
        for b in range(len(dims)):
            C = chol_S[b].T @ chol_X[b]
            U, sv, Vt = np.linalg.svd(C)
            R = (chol_X[b] @ Vt.T) / np.sqrt(sv)[None, :]
            Ri = np.sqrt(sv)[:, None] * sla.solve_triangular(
                chol_X[b], Vt.T, lower=True, trans="T"
            ).T
            Wnt.append(_sym(R @ R.T))
            Rfac.append(R)
            Rinv.append(Ri)
            svals.append(sv)

        # Schur complement M_ij = sum_b tr(A_i W A_j W), chunked
        M = np.zeros((m, m))
        for b, n in enumerate(dims):
            Wb = Wnt[b]
            for (i0, i1, resh) in num.chunks[b]:
                c = i1 - i0
                T = (resh @ Wb).reshape(c, n, n)
                F2 = np.matmul(Wb, T)
                M[:, i0:i1] += num.P[b] @ F2.reshape(c, n * n).T
        M = _sym(M)

        # equilibrated Cholesky with an escalating regularization ladder
        d = np.sqrt(np.maximum(M.diagonal(), 1e-300))
        Ms = M / np.outer(d, d)
        fac = None
        for reg in (0.0, 1e-14, 1e-12, 1e-10, 1e-8, 1e-6):
            try:
                fac = sla.cho_factor(
                    Ms + reg * np.eye(m) if reg else Ms, lower=True
                )
                break
            except np.linalg.LinAlgError:
                continue
        if fac is None:
            status = STATUS_NUMERICAL_ERROR
            message = "Schur complement factorization failed"
            break

        def minv(V: np.ndarray) -> np.ndarray:
            """M^{-1} V through the equilibrated factorization."""
            if V.ndim == 1:
                return sla.cho_solve(fac, V / d) / d
            return sla.cho_solve(fac, V / d[:, None]) / d[:, None]

        r_p = num.rhs - num.apply_A(X) - num.B @ w
        At = num.apply_At(y)
        Rd = [Ab - Sb for Ab, Sb in zip(At, S)]
        r_g_act = g_act - Bact.T @ y
        mu = rec.mu
        Zb_cols = minv(Bact)
        K = Bact.T @ Zb_cols

        def saddle(h1: np.ndarray, rg: np.ndarray):
            """Solve [M, -B; B^T, 0][dy, dw] = [h1, rg] with refinement."""
            z0 = minv(h1)
            # K is singular whenever the free columns carry a syzygy (e.g.
            # multiplier pairs that cancel); the minimum-norm solution picks
            # a canonical representative deterministically
            dw = np.linalg.lstsq(K, rg - Bact.T @ z0, rcond=None)[0]
            dy = z0 + Zb_cols @ dw
            scale = 1.0 + float(np.abs(h1).max(initial=0.0))
            for _ in range(2):
                ry = h1 + Bact @ dw - M @ dy
                rw = rg - Bact.T @ dy
                if max(np.abs(ry).max(initial=0.0), np.abs(rw).max(initial=0.0)) < 1e-14 * scale:
                    break
                z0c = minv(ry)
                ddw = np.linalg.lstsq(K, rw - Bact.T @ z0c, rcond=None)[0]
                dy = dy + z0c + Zb_cols @ ddw
                dw = dw + ddw
            return dy, dw

        def solve_direction(preRc: List[np.ndarray]):
            """Newton direction for the scaled complementarity dX + W dS W = Rc.

            ``preRc`` holds the (symmetric) target Rc per block.  The dual
            and complementarity equations hold by construction; the primal
            equation inherits the Schur assembly's rounding (amplified by
            |W|^2 late in the run), so the direction is refined against the
            exact sparse operator until that residual stops improving.
            """
            h1 = -r_p.copy()
            for b in range(len(dims)):
                h1 += num.P[b] @ preRc[b].ravel()
                h1 -= num.P[b] @ (Wnt[b] @ Rd[b] @ Wnt[b]).ravel()
            dy, dw_act = saddle(h1, r_g_act)
            dS = [
                _sym(Zb + Rb)
                for Zb, Rb in zip(num.apply_At(dy), Rd)
            ]
            dX = [
                _sym(preRc[b] - Wnt[b] @ dS[b] @ Wnt[b])
                for b in range(len(dims))
            ]
            dw = np.zeros_like(w)
            dw[num.active_cols] = dw_act
            prev_err = np.inf
            for _ in range(3):
                e1 = r_p - num.apply_A(dX) - num.B @ dw
                err = float(np.abs(e1).max(initial=0.0))
                if err >= 0.5 * prev_err or err < 1e-14 * b_norm:
                    break
                prev_err = err
                cdy, cdw_act = saddle(-e1, np.zeros_like(r_g_act))
                cdS = [_sym(Zb) for Zb in num.apply_At(cdy)]
                for b in range(len(dims)):
                    dS[b] = dS[b] + cdS[b]
                    dX[b] = _sym(dX[b] - Wnt[b] @ cdS[b] @ Wnt[b])
                dy = dy + cdy
                dw[num.active_cols] = dw[num.active_cols] + cdw_act
            return dX, dS, dy, dw

        def step_bounds(dX, dS):
            a_p = min(
                (_max_step(X[b], dX[b], chol_X[b]) for b in range(len(dims))),
                default=np.inf,
            )
            a_d = min(
                (_max_step(S[b], dS[b], chol_S[b]) for b in range(len(dims))),
                default=np.inf,
            )
            tau = settings.step_fraction
            return min(1.0, tau * a_p), min(1.0, tau * a_d)

        # predictor: complementarity target 0, i.e. Rc = -X
        dX_a, dS_a, dy_a, dw_a = solve_direction([-Xb for Xb in X])
        ap, ad = step_bounds(dX_a, dS_a)
        mu_aff = sum(
            float(np.tensordot(X[b] + ap * dX_a[b], S[b] + ad * dS_a[b]))
            for b in range(len(dims))
        ) / k_total
        expon = max(1.0, 3.0 * min(ap, ad) ** 2)
        sigma = (
            min(1.0, max(1e-8, (max(mu_aff, 0.0) / mu) ** expon)) if mu > 0 else 0.1
        )

        # corrector in the scaled frame, where the scaled point is diag(sv):
        # solve  lambda o u = sigma mu I - lambda^2 - H(dXhat_aff dShat_aff)
        # elementwise (o = symmetrized product), then map back through R,
        # turning the complementarity target into dX + W dS W = R u R^T.
        preRc = []
        for b in range(len(dims)):
            R, Ri, sv = Rfac[b], Rinv[b], svals[b]
            dXh = Ri @ dX_a[b] @ Ri.T
            dSh = R.T @ dS_a[b] @ R
            G = _sym(-0.5 * (dXh @ dSh + dSh @ dXh))
            G[np.diag_indices_from(G)] += sigma * mu - sv * sv
            u = 2.0 * G / np.add.outer(sv, sv)
            preRc.append(_sym(R @ u @ R.T))
        dX, dS, dy, dw = solve_direction(preRc)
        alpha_p, alpha_d = step_bounds(dX, dS)
        if min(alpha_p, alpha_d) < 1e-10:
            status = STATUS_NUMERICAL_ERROR
            message = "step length collapsed"
            break

        # eigenvalue estimates carry roundoff; back the step off until the
        # updated iterate factorizes
        for _ in range(6):
            Xt = [_sym(X[b] + alpha_p * dX[b]) for b in range(len(dims))]
            St = [_sym(S[b] + alpha_d * dS[b]) for b in range(len(dims))]
            try:
                for V in Xt + St:
                    np.linalg.cholesky(V)
                break
            except np.linalg.LinAlgError:
                alpha_p *= 0.5
                alpha_d *= 0.5
        else:
            status = STATUS_NUMERICAL_ERROR
            message = "could not keep the iterate positive definite"
            break
        X, S = Xt, St
        w = w + alpha_p * dw
        y = y + alpha_d * dy

        rec.sigma = sigma
        rec.alpha_primal = alpha_p
        rec.alpha_dual = alpha_d

    if status in (STATUS_NUMERICAL_ERROR, STATUS_MAX_ITERATIONS) and best_iterate:
        X, S, y, w, final = best_iterate
    else:
        final = log[-1] if log else current_record()
    if status in (STATUS_NUMERICAL_ERROR, STATUS_MAX_ITERATIONS):
        for rec in {id(final): final, id(log[-1] if log else final): log[-1] if log else final}.values():
            if (
                rec.res_free > 1e-4
                and rec.res_primal <= max(10.0 * settings.tol_feas, 1e-6)
                and rec.res_dual <= 1e-6
                and rec.rel_gap <= 1e-6
            ):
                # everything converged except the free-variable dual
                # equations: B^T y = obj has no solution, so the objective
                # is unbounded above
                status = STATUS_UNBOUNDED
                message = "free-variable dual equations are inconsistent"
                break
    solution = SdpSolution(
        status=status,
        primal_blocks=X,
        free_scalar=float(w[0]),
        free_vector=np.array(w[1:]),
        dual_vector=y.copy(),
        objective_primal=final.objective_primal,
        objective_dual=final.objective_dual,
        gap=final.rel_gap,
        iterations=iteration,
        log=log,
        message=message,
    )
    return _unscale_solution(problem, solution)


def _unscale_solution(problem: SdpProblem, sol: SdpSolution) -> SdpSolution:
    """Map a normalized-scale solution back to the user's coefficients."""
    c_f = float(problem.objective_scale)
    sol.free_scalar *= c_f
    sol.objective_primal *= c_f
    sol.objective_dual *= c_f
    sol.primal_blocks = [
        float(block.unscale) * Xb
        for block, Xb in zip(problem.blocks, sol.primal_blocks)
    ]
    if len(sol.free_vector):
        scales = np.array([float(s) for s in problem.free_unscale])
        sol.free_vector = sol.free_vector * scales
    return sol


# ---- public API and backends ------------------------------------------------


def solve(problem: SdpProblem, settings: SolverSettings | None = None) -> SdpSolution:
    """Solve with the built-in interior-point method."""
    return _solve_builtin(problem, settings or SolverSettings())


_BACKENDS: Dict[str, Callable[[SdpProblem, SolverSettings], SdpSolution]] = {
    "builtin": _solve_builtin,
}


def register_backend(
    name: str, fn: Callable[[SdpProblem, SolverSettings], SdpSolution]
) -> None:
    _BACKENDS[name] = fn


def available_backends() -> List[str]:
    return sorted(_BACKENDS)


def solve_with_backend(
    problem: SdpProblem, backend_id: str, settings: SolverSettings | None = None
) -> SdpSolution:
    """Same contract as ``solve`` with a pluggable backend."""
    try:
        fn = _BACKENDS[backend_id]
    except KeyError:
        raise UnknownBackendError(
            f"backend {backend_id!r} is not registered; known: {available_backends()}"
        ) from None
    return fn(problem, settings or SolverSettings())


def _solve_cvxopt(problem: SdpProblem, settings: SolverSettings) -> SdpSolution:
    """Reference backend driving cvxopt's cone LP solver.

    Our dual (min rhs^T y, A^T(y) >= 0, B^T y = obj) is handed to cvxopt as
    the primal; cvxopt's multipliers recover our (X, w).  Intended for
    cross-checking small instances, not for the large benchmarks.
    """
    import cvxopt
    import cvxopt.solvers

    num = _NumericSdp(problem)
    m, dims = num.m, num.dims
    c = cvxopt.matrix(num.rhs)
    Gs = []
    hs = []
    for P, n in zip(num.P, dims):
        dense = -np.asarray(P.todense()).T  # (n*n, m)
        Gs.append(cvxopt.matrix(dense))
        hs.append(cvxopt.matrix(np.zeros((n, n))))
    keep = np.flatnonzero(np.abs(num.B).sum(axis=0) > 0.0)
    A = cvxopt.matrix(num.B[:, keep].T.copy())
    b = cvxopt.matrix(num.obj[keep])
    opts = {
        "show_progress": False,
        "maxiters": settings.max_iter,
        "abstol": settings.tol_gap,
        "reltol": settings.tol_gap,
        "feastol": settings.tol_feas,
    }
    sol = cvxopt.solvers.sdp(c, Gs=Gs, hs=hs, A=A, b=b, options=opts)
    mapping = {
        "optimal": STATUS_OPTIMAL,
        "primal infeasible": STATUS_UNBOUNDED,   # our dual infeasible
        "dual infeasible": STATUS_INFEASIBLE,    # our primal infeasible
        "unknown": STATUS_NUMERICAL_ERROR,
    }
    status = mapping.get(sol["status"], STATUS_NUMERICAL_ERROR)
    w = np.zeros(num.B.shape[1])
    if sol["y"] is not None:
        w[keep] = -np.asarray(sol["y"]).ravel()
    X = []
    if sol["zs"] is not None:
        for Z, n in zip(sol["zs"], dims):
            X.append(_sym(np.asarray(Z).reshape(n, n)))
    else:
        X = [np.zeros((n, n)) for n in dims]
    y = np.asarray(sol["x"]).ravel() if sol["x"] is not None else np.zeros(m)
    pobj = float(w[0])
    dobj = float(num.rhs @ y)
    rel_gap = abs(dobj - pobj) / (1.0 + max(abs(pobj), abs(dobj)))
    solution = SdpSolution(
        status=status,
        primal_blocks=X,
        free_scalar=float(w[0]),
        free_vector=np.array(w[1:]),
        dual_vector=y,
        objective_primal=pobj,
        objective_dual=dobj,
        gap=rel_gap,
        iterations=int(sol.get("iterations", 0)),
        log=[],
        message=f"cvxopt status: {sol['status']}",
    )
    return _unscale_solution(problem, solution)


try:  # registered only when the optional dependency is present
    import cvxopt  # noqa: F401

    register_backend("cvxopt", _solve_cvxopt)
except ImportError:  # pragma: no cover
    pass
