"""Estimators for multi-layer Gaussian graphical models with hidden nodes.

The main estimator recovers, for K related graphs, the observed block of
each precision matrix S_O plus a low-rank PSD term P that accounts for
marginalized hidden nodes, by minimizing

    sum_k  tr((S_O - P) C_O) - logdet(S_O - P) + rho_k ||S_O||_1
           + beta_k ||P||_*
    + sum_{k<k'}  rho_kk' ||S_O^k - S_O^k'||_1 + beta_kk' ||P^k - P^k'||_1

subject to P >= 0 and S_O - P > 0. It is solved by consensus ADMM: one
copy per objective term (log-det barrier, fused l1 on S, trace-plus-PSD
on P, fused l1 on P), tied to consensus variables (Z_S, Z_P) through the
linear map x = (Z_S - Z_P, Z_S, Z_P, Z_P). Single-graph baselines (GL,
LVGL) and the group graphical lasso (GGL) reuse the same kernels.

A slow projected-subgradient reference solver for tiny instances is
provided as an independent check of the ADMM solutions.
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidInput, NumericalError
from .prox import (
    fused_prox_stack,
    prox_fused_l1,
    prox_logdet,
    soft_threshold,
    symmetrize,
)
from .sampling import ObservedCovariances

_EPS = 1e-12


class AdmissibleSet(Enum):
    """Constraint set for the sparse estimates S_O."""

    SYMMETRIC = "symmetric"
    NONPOSITIVE_OFFDIAG = "nonpositive_offdiag"


@dataclass(frozen=True)
class SolverConfig:
    """Operator-splitting knobs shared by all solvers."""

    step: float = 1.0
    max_iters: int = 2000
    tol_primal: float = 1e-5
    tol_dual: float = 1e-5
    admissible_set: AdmissibleSet = AdmissibleSet.SYMMETRIC
    pd_floor: float = 1e-8
    adapt_step: bool = True
    adapt_ratio: float = 10.0
    adapt_factor: float = 2.0

    def __post_init__(self):
        if isinstance(self.admissible_set, str):
            object.__setattr__(self, "admissible_set", AdmissibleSet(self.admissible_set.lower()))
        if self.step <= 0 or self.pd_floor <= 0:
            raise InvalidInput("step and pd_floor must be positive")
        if self.max_iters < 1:
            raise InvalidInput("max_iters must be at least 1")
        if self.tol_primal <= 0 or self.tol_dual <= 0:
            raise InvalidInput("tolerances must be positive")


@dataclass(frozen=True)
class PenaltyWeights:
    """Per-layer and per-pair regularization weights.

    rho/beta are length-K vectors (l1 on S, trace/nuclear on P);
    rho_pair/beta_pair are symmetric K x K matrices whose (k, k') entry
    weights the fused penalty between layers k and k'. The l1 and fused
    terms on S skip the diagonal unless penalize_diagonal is set; the
    fused term on P always covers all entries.
    """

    rho: np.ndarray
    beta: np.ndarray
    rho_pair: np.ndarray
    beta_pair: np.ndarray
    penalize_diagonal: bool = False

    def __post_init__(self):
        rho = np.atleast_1d(np.asarray(self.rho, dtype=float))
        beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        k = rho.size
        if beta.size != k:
            raise InvalidInput("rho and beta must have one entry per layer")
        rp = np.asarray(self.rho_pair, dtype=float)
        bp = np.asarray(self.beta_pair, dtype=float)
        if rp.ndim == 0:
            rp = np.full((k, k), float(rp))
        if bp.ndim == 0:
            bp = np.full((k, k), float(bp))
        for name, m in (("rho_pair", rp), ("beta_pair", bp)):
            if m.shape != (k, k):
                raise InvalidInput(f"{name} must be a {k} x {k} matrix")
            if not np.array_equal(m, m.T):
                raise InvalidInput(f"{name} must be symmetric")
        rp = rp.copy()
        bp = bp.copy()
        np.fill_diagonal(rp, 0.0)
        np.fill_diagonal(bp, 0.0)
        if min(rho.min(), beta.min(), rp.min(), bp.min()) < 0:
            raise InvalidInput("all penalty weights must be nonnegative")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "rho_pair", rp)
        object.__setattr__(self, "beta_pair", bp)

    @classmethod
    def tied(cls, n_layers: int, rho: float, beta: float, rho_pair: float = 0.0,
             beta_pair: float = 0.0, penalize_diagonal: bool = False):
        """All layers share one rho/beta and all pairs one fusion weight."""
        return cls(np.full(n_layers, float(rho)), np.full(n_layers, float(beta)),
                   float(rho_pair), float(beta_pair), penalize_diagonal)

    @property
    def n_layers(self) -> int:
        return self.rho.size


@dataclass(frozen=True)
class JointEstimate:
    """Solution of the joint problem plus convergence diagnostics."""

    s_hat: tuple
    p_hat: tuple
    objective: float
    iterations: int
    converged: bool
    residual_history: np.ndarray   # (iterations, 2): relative primal/dual


def _as_cov_list(covs):
    if isinstance(covs, ObservedCovariances):
        return list(covs.covs)
    return [symmetrize(c) for c in covs]


# ---------------------------------------------------------------------------
# Objective values
# ---------------------------------------------------------------------------

def _l1_off(a, penalize_diagonal):
    if penalize_diagonal:
        return np.abs(a).sum()
    return np.abs(a).sum() - np.abs(np.diag(a)).sum()


def joint_objective(s, p, covs, w: PenaltyWeights) -> float:
    """Objective of the joint hidden-variable problem; +inf when any
    S^k - P^k is not positive definite.

    The nuclear norm of the symmetric P^k is evaluated as the sum of
    absolute eigenvalues, which reduces to the trace on the PSD cone.
    """
    cov_list = _as_cov_list(covs)
    k = len(cov_list)
    if len(s) != k or len(p) != k or w.n_layers != k:
        raise InvalidInput("s, p, covs and weights must agree on the number of layers")
    total = 0.0
    for i in range(k):
        r = s[i] - p[i]
        lam = np.linalg.eigvalsh(r)
        if lam.min() <= 0:
            return np.inf
        total += float(np.sum(r * cov_list[i]) - np.sum(np.log(lam)))
        total += w.rho[i] * _l1_off(s[i], w.penalize_diagonal)
        total += w.beta[i] * float(np.abs(np.linalg.eigvalsh(p[i])).sum())
    for i in range(k):
        for j in range(i + 1, k):
            total += w.rho_pair[i, j] * _l1_off(s[i] - s[j], w.penalize_diagonal)
            total += w.beta_pair[i, j] * float(np.abs(p[i] - p[j]).sum())
    return total


def joint_objective_l0(s, p, covs, w: PenaltyWeights, max_hidden_rank: int,
                       tol: float = 1e-8) -> float:
    """Combinatorial counterpart of the joint objective, evaluation only.

    Counts nonzero entries where the convex program uses l1 norms and
    enforces rank(P^k) <= max_hidden_rank where the convex program
    minimizes the nuclear norm; +inf outside the feasible set. There is
    no solver for this objective; it documents what the convex
    relaxation replaces.
    """
    cov_list = _as_cov_list(covs)
    k = len(cov_list)
    if len(s) != k or len(p) != k or w.n_layers != k:
        raise InvalidInput("s, p, covs and weights must agree on the number of layers")

    def nnz_off(a):
        count = np.count_nonzero(np.abs(a) > tol)
        if not w.penalize_diagonal:
            count -= np.count_nonzero(np.abs(np.diag(a)) > tol)
        return count

    total = 0.0
    for i in range(k):
        r = s[i] - p[i]
        lam = np.linalg.eigvalsh(r)
        p_eigs = np.linalg.eigvalsh(p[i])
        if lam.min() <= 0 or p_eigs.min() < -tol:
            return np.inf
        if np.count_nonzero(p_eigs > tol) > max_hidden_rank:
            return np.inf
        total += float(np.sum(r * cov_list[i]) - np.sum(np.log(lam)))
        total += w.rho[i] * nnz_off(s[i])
    for i in range(k):
        for j in range(i + 1, k):
            total += w.rho_pair[i, j] * nnz_off(s[i] - s[j])
            total += w.beta_pair[i, j] * np.count_nonzero(np.abs(p[i] - p[j]) > tol)
    return total


def gl_objective(s, cov, lam: float, penalize_diagonal: bool = False) -> float:
    """Graphical-lasso objective tr(S C) - logdet S + lam ||S||_1."""
    ev = np.linalg.eigvalsh(s)
    if ev.min() <= 0:
        return np.inf
    return float(np.sum(s * cov) - np.sum(np.log(ev))) + lam * _l1_off(s, penalize_diagonal)


def ggl_objective(s_list, covs, lambda1: float, lambda2: float,
                  penalize_diagonal: bool = False) -> float:
    """Group graphical lasso: per-layer GL terms plus a cross-layer
    group-l2 penalty on every (off-diagonal) entry."""
    cov_list = _as_cov_list(covs)
    total = 0.0
    for s, c in zip(s_list, cov_list):
        total += gl_objective(s, c, lambda1, penalize_diagonal)
        if not np.isfinite(total):
            return np.inf
    stack = np.stack(s_list)
    if not penalize_diagonal:
        off = ~np.eye(stack.shape[1], dtype=bool)
        stack = stack * off
    total += lambda2 * float(np.sqrt(np.sum(stack ** 2, axis=0)).sum())
    return total


# ---------------------------------------------------------------------------
# Shared pieces of the splitting loops
# ---------------------------------------------------------------------------

def _batch_prox_logdet(anchor, cov_stack, sigma):
    g, q = np.linalg.eigh(anchor - cov_stack / sigma)
    phi = 0.5 * (g + np.sqrt(g * g + 4.0 / sigma))
    return (q * phi[:, None, :]) @ np.swapaxes(q, 1, 2)


def _batch_prox_psd_trace(anchor, kappa_per_layer):
    g, q = np.linalg.eigh(anchor)
    phi = np.maximum(g - kappa_per_layer[:, None], 0.0)
    return (q * phi[:, None, :]) @ np.swapaxes(q, 1, 2)


def _fused_update(v_cols, lam_vec, pair_mat, sigma):
    """Columnwise fused-l1 prox of v_cols (K, n) at penalty sigma."""
    k = v_cols.shape[0]
    if k == 1:
        return np.sign(v_cols) * np.maximum(np.abs(v_cols) - lam_vec[0] / sigma, 0.0)
    offd = pair_mat[np.triu_indices(k, 1)]
    if np.all(lam_vec == lam_vec[0]) and np.all(offd == offd[0]):
        return fused_prox_stack(v_cols, lam_vec[0] / sigma, float(offd[0]) / sigma)
    out = np.empty_like(v_cols)
    for i in range(v_cols.shape[1]):
        out[:, i] = prox_fused_l1(v_cols[:, i], lam_vec / sigma, pair_mat / sigma)
    return out


def _project_admissible(a, admissible_set):
    if admissible_set is AdmissibleSet.NONPOSITIVE_OFFDIAG:
        diag = np.diagonal(a, axis1=-2, axis2=-1).copy()
        a = np.minimum(a, 0.0)
        idx = np.arange(a.shape[-1])
        a[..., idx, idx] = diag
    return a


def _rebalance(sigma, duals, rp, rd, cfg):
    if not cfg.adapt_step:
        return sigma
    if rp > cfg.adapt_ratio * rd and sigma * cfg.adapt_factor <= 1e6:
        sigma *= cfg.adapt_factor
        for u in duals:
            u /= cfg.adapt_factor
    elif rd > cfg.adapt_ratio * rp and sigma / cfg.adapt_factor >= 1e-6:
        sigma /= cfg.adapt_factor
        for u in duals:
            u *= cfg.adapt_factor
    return sigma


def _norm(*arrays):
    return float(np.sqrt(sum(np.sum(a * a) for a in arrays)))


# ---------------------------------------------------------------------------
# Joint estimator
# ---------------------------------------------------------------------------

def solve_joint_hidden(covs, w: PenaltyWeights, cfg: SolverConfig = SolverConfig()) -> JointEstimate:
    """Jointly estimate (S_O^k, P^k) for all layers by consensus ADMM.

    Stops when the relative primal and dual residuals both fall below
    the configured tolerances, with residual-balancing adaptation of the
    penalty parameter. The returned s_hat carry the exact zeros of the
    l1 prox; p_hat are exactly PSD.
    """
    cov_list = _as_cov_list(covs)
    k = len(cov_list)
    if w.n_layers != k:
        raise InvalidInput(f"weights describe {w.n_layers} layers but {k} covariances given")
    o = cov_list[0].shape[0]
    if any(c.shape != (o, o) for c in cov_list):
        raise InvalidInput("covariances must share one dimension")
    cov_stack = np.stack(cov_list)
    diag_cols = np.eye(o, dtype=bool).ravel()

    zs = np.broadcast_to(np.eye(o), (k, o, o)).copy()
    zp = np.zeros((k, o, o))
    u_r = np.zeros((k, o, o))
    u_a = np.zeros((k, o, o))
    u_b = np.zeros((k, o, o))
    u_c = np.zeros((k, o, o))
    sigma = cfg.step
    history = []
    converged = False

    for it in range(cfg.max_iters):
        # x-update: independent proxes of the four objective blocks
        r = _batch_prox_logdet(zs - zp - u_r, cov_stack, sigma)
        va = (zs - u_a).reshape(k, -1)
        a = np.empty_like(va)
        a[:, ~diag_cols] = _fused_update(va[:, ~diag_cols], w.rho, w.rho_pair, sigma)
        if w.penalize_diagonal:
            a[:, diag_cols] = _fused_update(va[:, diag_cols], w.rho, w.rho_pair, sigma)
        else:
            a[:, diag_cols] = va[:, diag_cols]
        a = _project_admissible(a.reshape(k, o, o), cfg.admissible_set)
        b = _batch_prox_psd_trace(zp - u_b, w.beta / sigma)
        c = _fused_update((zp - u_c).reshape(k, -1), np.zeros(k), w.beta_pair,
                          sigma).reshape(k, o, o)

        # z-update: least-squares consensus for x = (Z_S - Z_P, Z_S, Z_P, Z_P)
        ta, tb, tc, td = r + u_r, a + u_a, b + u_b, c + u_c
        zs_new = (2.0 * ta + 3.0 * tb + tc + td) / 5.0
        zp_new = (-ta + tb + 2.0 * tc + 2.0 * td) / 5.0
        dzs, dzp = zs_new - zs, zp_new - zp
        zs, zp = zs_new, zp_new

        u_r += r - (zs - zp)
        u_a += a - zs
        u_b += b - zp
        u_c += c - zp

        prim = _norm(r - (zs - zp), a - zs, b - zp, c - zp)
        dual = sigma * _norm(dzs - dzp, dzs, dzp, dzp)
        if not np.isfinite(prim) or not np.isfinite(dual):
            raise NumericalError("joint solver diverged (non-finite residuals)")
        scale_p = max(_norm(r, a, b, c), _norm(zs - zp, zs, zp, zp), _EPS)
        scale_d = max(sigma * _norm(u_r, u_a, u_b, u_c), _EPS)
        rp, rd = prim / scale_p, dual / scale_d
        history.append((rp, rd))
        if rp <= cfg.tol_primal and rd <= cfg.tol_dual:
            converged = True
            break
        sigma = _rebalance(sigma, (u_r, u_a, u_b, u_c), rp, rd, cfg)

    s_hat = [symmetrize(a[i]) for i in range(k)]
    p_hat = [symmetrize(b[i]) for i in range(k)]
    for i in range(k):
        # feasibility guard for non-converged exits; no-op once converged
        lam_min = np.linalg.eigvalsh(s_hat[i] - p_hat[i]).min()
        if lam_min < cfg.pd_floor / 2:
            s_hat[i] = s_hat[i] + (cfg.pd_floor - lam_min) * np.eye(o)
    return JointEstimate(
        s_hat=tuple(s_hat),
        p_hat=tuple(p_hat),
        objective=joint_objective(s_hat, p_hat, cov_list, w),
        iterations=it + 1,
        converged=converged,
        residual_history=np.asarray(history),
    )


def solve_lvgl(cov, rho: float, beta: float, cfg: SolverConfig = SolverConfig(),
               penalize_diagonal: bool = False):
    """Latent-variable graphical lasso for a single graph.

    This is exactly the K = 1 instance of the joint problem (the fusion
    terms are vacuous), so it runs through the same engine. Returns
    (S_O, P).
    """
    w = PenaltyWeights.tied(1, rho, beta, penalize_diagonal=penalize_diagonal)
    est = solve_joint_hidden([symmetrize(cov)], w, cfg)
    return est.s_hat[0], est.p_hat[0]


# ---------------------------------------------------------------------------
# Baselines with their own 2-block loops (kept independent of the joint
# engine so the reduction identities are meaningful cross-checks)
# ---------------------------------------------------------------------------

def solve_gl(cov, lam: float, cfg: SolverConfig = SolverConfig(),
             penalize_diagonal: bool = False):
    """Graphical lasso via ADMM on tr(SC) - logdet S + lam ||S||_1."""
    if lam < 0:
        raise InvalidInput(f"lambda must be nonnegative, got {lam}")
    c = symmetrize(cov)
    o = c.shape[0]
    s = np.eye(o)
    u = np.zeros((o, o))
    sigma = cfg.step
    for _ in range(cfg.max_iters):
        r = prox_logdet(s - u, c, sigma)
        s_new = soft_threshold(r + u, lam / sigma, penalize_diagonal)
        s_new = _project_admissible(s_new, cfg.admissible_set)
        prim = _norm(r - s_new)
        dual = sigma * _norm(s_new - s)
        if not np.isfinite(prim):
            raise NumericalError("graphical lasso diverged")
        s = s_new
        u += r - s
        rp = prim / max(_norm(r), _norm(s), _EPS)
        rd = dual / max(sigma * _norm(u), _EPS)
        if rp <= cfg.tol_primal and rd <= cfg.tol_dual:
            break
        sigma = _rebalance(sigma, (u,), rp, rd, cfg)
    s = symmetrize(s)
    lam_min = np.linalg.eigvalsh(s).min()
    if lam_min < cfg.pd_floor:
        s = s + (cfg.pd_floor - lam_min) * np.eye(o)
    return s


def solve_ggl(covs, lambda1: float, lambda2: float, cfg: SolverConfig = SolverConfig(),
              penalize_diagonal: bool = False):
    """Group graphical lasso across layers.

    Elementwise l1 (lambda1) plus a cross-layer group-l2 penalty
    (lambda2) on each off-diagonal entry; the prox of the group term is
    a blockwise group soft-threshold applied after the elementwise one.
    """
    if lambda1 < 0 or lambda2 < 0:
        raise InvalidInput("lambda1 and lambda2 must be nonnegative")
    cov_list = _as_cov_list(covs)
    k = len(cov_list)
    o = cov_list[0].shape[0]
    if any(c.shape != (o, o) for c in cov_list):
        raise InvalidInput("covariances must share one dimension")
    cov_stack = np.stack(cov_list)
    diag = np.eye(o, dtype=bool)
    s = np.broadcast_to(np.eye(o), (k, o, o)).copy()
    u = np.zeros((k, o, o))
    sigma = cfg.step
    for _ in range(cfg.max_iters):
        r = _batch_prox_logdet(s - u, cov_stack, sigma)
        v = r + u
        z = np.sign(v) * np.maximum(np.abs(v) - lambda1 / sigma, 0.0)
        group = np.sqrt(np.sum(z * z, axis=0))
        shrink = np.maximum(0.0, 1.0 - (lambda2 / sigma) / np.maximum(group, 1e-300))
        z = z * shrink
        if not penalize_diagonal:
            z[:, diag] = v[:, diag]
        z = _project_admissible(z, cfg.admissible_set)
        prim = _norm(r - z)
        dual = sigma * _norm(z - s)
        if not np.isfinite(prim):
            raise NumericalError("group graphical lasso diverged")
        s = z
        u += r - s
        rp = prim / max(_norm(r), _norm(s), _EPS)
        rd = dual / max(sigma * _norm(u), _EPS)
        if rp <= cfg.tol_primal and rd <= cfg.tol_dual:
            break
        sigma = _rebalance(sigma, (u,), rp, rd, cfg)
    out = []
    for i in range(k):
        si = symmetrize(s[i])
        lam_min = np.linalg.eigvalsh(si).min()
        if lam_min < cfg.pd_floor:
            si = si + (cfg.pd_floor - lam_min) * np.eye(o)
        out.append(si)
    return out


# ---------------------------------------------------------------------------
# Reference oracle: projected subgradient on tiny instances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JointProblem:
    """Joint hidden-variable objective for the reference oracle."""

    covs: tuple
    weights: PenaltyWeights


@dataclass(frozen=True)
class GGLProblem:
    """Group graphical lasso objective (no latent part)."""

    covs: tuple
    lambda1: float
    lambda2: float
    penalize_diagonal: bool = False


@dataclass(frozen=True)
class GLProblem:
    """Plain graphical lasso objective (no latent part)."""

    cov: np.ndarray
    lam: float
    penalize_diagonal: bool = False


@dataclass(frozen=True)
class OracleSolution:
    s_hat: tuple
    p_hat: tuple
    objective: float


def _oracle_pieces(problem):
    """(cov_list, objective(s_stack, p_stack), subgrad(s, p), has_latent)."""
    if isinstance(problem, JointProblem):
        covs = [symmetrize(c) for c in problem.covs]
        w = problem.weights
        k = len(covs)
        o = covs[0].shape[0]
        offmask = np.ones((o, o)) if w.penalize_diagonal else 1.0 - np.eye(o)

        def objective(s, p):
            return joint_objective(list(s), list(p), covs, w)

        def subgrad(s, p, rinv):
            gs = np.stack([covs[i] - rinv[i] + w.rho[i] * np.sign(s[i]) * offmask
                           for i in range(k)])
            gp = np.stack([-covs[i] + rinv[i] + w.beta[i] * np.eye(o) for i in range(k)])
            for i in range(k):
                for j in range(i + 1, k):
                    sg = np.sign(s[i] - s[j]) * offmask
                    gs[i] += w.rho_pair[i, j] * sg
                    gs[j] -= w.rho_pair[i, j] * sg
                    pg = np.sign(p[i] - p[j])
                    gp[i] += w.beta_pair[i, j] * pg
                    gp[j] -= w.beta_pair[i, j] * pg
            return gs, gp

        return covs, objective, subgrad, True

    if isinstance(problem, GGLProblem):
        covs = [symmetrize(c) for c in problem.covs]
        o = covs[0].shape[0]
        offmask = np.ones((o, o)) if problem.penalize_diagonal else 1.0 - np.eye(o)

        def objective(s, p):
            return ggl_objective(list(s), covs, problem.lambda1, problem.lambda2,
                                 problem.penalize_diagonal)

        def subgrad(s, p, rinv):
            gs = np.stack([covs[i] - rinv[i] + problem.lambda1 * np.sign(s[i]) * offmask
                           for i in range(len(covs))])
            masked = s * offmask
            nrm = np.sqrt(np.sum(masked ** 2, axis=0))
            gs += problem.lambda2 * masked / np.maximum(nrm, 1e-300)
            return gs, np.zeros_like(gs)

        return covs, objective, subgrad, False

    if isinstance(problem, GLProblem):
        return _oracle_pieces(GGLProblem((problem.cov,), problem.lam, 0.0,
                                         problem.penalize_diagonal))
    raise InvalidInput(f"unknown oracle problem type {type(problem).__name__}")


def reference_oracle(problem, budget: int = 100_000, step0: float = 0.5,
                     stage_len: int = 800, pd_floor: float = 1e-8,
                     start=None) -> OracleSolution:
    """Solve a tiny convex instance by projected subgradient descent.

    Normalized subgradient steps with a diminishing schedule (constant
    within a stage, geometrically shrunk between stages, restarting each
    stage from the best feasible iterate found so far). P is projected
    onto the PSD cone and S - P onto {min eig >= pd_floor} after every
    step. Only instances with O <= 5 and K <= 3 are accepted.
    """
    covs, objective, subgrad, has_latent = _oracle_pieces(problem)
    k = len(covs)
    o = covs[0].shape[0]
    if o > 5 or k > 3:
        raise InvalidInput(f"oracle accepts O <= 5 and K <= 3, got O={o}, K={k}")
    if budget < 1:
        raise InvalidInput("budget must be positive")

    if start is None:
        s = np.broadcast_to(np.eye(o), (k, o, o)).copy()
        p = 0.01 * np.broadcast_to(np.eye(o), (k, o, o)).copy() if has_latent \
            else np.zeros((k, o, o))
    else:
        s = np.stack([symmetrize(m) for m in start[0]])
        p = np.stack([symmetrize(m) for m in start[1]])

    def project(s, p):
        if has_latent:
            g, q = np.linalg.eigh(p)
            p = (q * np.maximum(g, 0.0)[:, None, :]) @ np.swapaxes(q, 1, 2)
        r = s - p
        g, q = np.linalg.eigh(r)
        bad = g[:, 0] < pd_floor
        if np.any(bad):
            g = np.maximum(g, pd_floor)
            r = (q * g[:, None, :]) @ np.swapaxes(q, 1, 2)
            s = np.where(bad[:, None, None], p + r, s)
        return s, p

    s, p = project(s, p)
    best_s, best_p = s.copy(), p.copy()
    best_val = objective(s, p)
    step = step0
    spent = 0
    while spent < budget and step > 1e-10:
        for _ in range(min(stage_len, budget - spent)):
            spent += 1
            rinv = np.linalg.inv(s - p)
            rinv = 0.5 * (rinv + np.swapaxes(rinv, 1, 2))
            gs, gp = subgrad(s, p, rinv)
            gn = _norm(gs, gp)
            if gn < 1e-14:
                return OracleSolution(tuple(best_s), tuple(best_p), best_val)
            s = s - step * gs / gn
            if has_latent:
                p = p - step * gp / gn
            s, p = project(s, p)
            val = objective(s, p)
            if val < best_val:
                best_val = val
                best_s, best_p = s.copy(), p.copy()
        s, p = best_s.copy(), best_p.copy()
        step *= 0.7
    return OracleSolution(tuple(best_s), tuple(best_p), best_val)
