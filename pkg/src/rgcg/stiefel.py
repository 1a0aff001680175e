"""Stiefel manifold St(p, n) with the Euclidean metric and polar retraction."""
import logging
from dataclasses import dataclass

import numpy as np

from .kernels import SingularityError, inv_sqrt_spd, solve_matrix_eq
from .manifold import GapResult, InverseRetractionError, Manifold, TransportError

logger = logging.getLogger(__name__)

TRANSPORTS = ("projection", "differentiated")


@dataclass(frozen=True)
class StiefelSubproblemConfig:
    """Settings for the inner solver of the Stiefel gap subproblem.

    Attributes
    ----------
    lam : float
        L1 weight of the objective.
    max_alg2_iters : int
        Outer updates of the tangent direction d.
    inner_subgrad_iters : int
        Projected-subgradient steps per outer update.
    inner_step0 : float
        Initial inner step; step t is ``inner_step0 / sqrt(t + 1)``.
    sigma : float
        Sufficient-decrease constant of the backtracking on d.
    transport : {"projection", "differentiated"}
        How grad f(x) is carried into the tangent space at R_x(d).
    min_alpha : float
        Backtracking gives up below this step.
    """

    lam: float
    max_alg2_iters: int = 2
    inner_subgrad_iters: int = 50
    inner_step0: float = 0.1
    sigma: float = 1e-4
    transport: str = "projection"
    min_alpha: float = 1e-8

    def __post_init__(self):
        if self.max_alg2_iters < 1 or self.inner_subgrad_iters < 1:
            raise ValueError("iteration counts must be >= 1")
        if not (self.sigma > 0 and self.inner_step0 > 0):
            raise ValueError("sigma and inner_step0 must be positive")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.transport not in TRANSPORTS:
            raise ValueError(f"transport must be one of {TRANSPORTS}")


def _sym(M):
    return 0.5 * (M + M.T)


def st_project(X, V):
    """Orthogonal projection of an ambient n x p array onto T_X St(p, n)."""
    return V - X @ _sym(X.T @ V)


def st_polar_retract(X, eta):
    """Polar retraction ``(X + eta)(I + eta^T eta)^{-1/2}``.

    The Gram matrix is formed from ``X + eta`` directly; it equals
    ``I + eta^T eta`` for tangent eta and keeps the output orthonormal when
    eta carries a little normal-space noise.
    """
    if not np.any(eta):
        return np.array(X, dtype=float, copy=True)
    Z = X + eta
    return Z @ inv_sqrt_spd(_sym(Z.T @ Z))


def st_inv_polar_retract(X, Y, check_tol=1e-6):
    """Tangent eta at X with ``st_polar_retract(X, eta) == Y``.

    Writing ``X + eta = Y S`` with S symmetric positive definite, tangency of
    eta is the Lyapunov equation ``(X^T Y) S + S (Y^T X) = 2 I``.
    """
    p = X.shape[1]
    try:
        S = solve_matrix_eq(X.T @ Y, Y.T @ X, 2.0 * np.eye(p))
    except SingularityError as exc:
        raise InverseRetractionError("inverse retraction undefined") from exc
    S = _sym(S)
    if np.linalg.eigvalsh(S)[0] <= 0.0:
        raise InverseRetractionError("inverse retraction undefined: S not SPD")
    eta = Y @ S - X
    if np.linalg.norm(st_polar_retract(X, eta) - Y) > check_tol:
        raise InverseRetractionError("inverse retraction undefined: round trip failed")
    return eta


def st_diff_transport(X, eta, xi):
    """Vector transport by the differentiated polar retraction.

    Returns ``Y W + (I - Y Y^T) xi S^{-1}`` where ``Y = R_X(eta)``,
    ``S = Y^T (X + eta)`` and W solves ``S W + W S = Y^T xi - xi^T Y``.
    """
    Z = X + eta
    Y = st_polar_retract(X, eta)
    S = _sym(Y.T @ Z)
    Yxi = Y.T @ xi
    try:
        W = solve_matrix_eq(S, S, Yxi - Yxi.T)
        normal = np.linalg.solve(S, (xi - Y @ Yxi).T).T
    except (SingularityError, np.linalg.LinAlgError) as exc:
        raise TransportError("differentiated-retraction transport failed") from exc
    return Y @ W + normal


def subgradient_l1(V, lam):
    """Subgradient of ``lam ||V||_1``, taking 0 at zero entries."""
    return lam * np.sign(V)


def solve_inner(Y, G, g_eval, cfg):
    """Projected subgradient on ``<G, xi> + g(Y + xi)`` over T_Y.

    Returns the best iterate seen, starting from xi = 0.
    """
    xi = np.zeros_like(Y)
    best, best_val = xi, g_eval(Y)
    for t in range(cfg.inner_subgrad_iters):
        step = cfg.inner_step0 / np.sqrt(t + 1.0)
        xi = st_project(Y, xi - step * (G + subgradient_l1(Y + xi, cfg.lam)))
        val = float(np.sum(G * xi)) + g_eval(Y + xi)
        if val < best_val:
            best, best_val = xi, val
    return best


def st_gap_subproblem(X, grad_f, g_eval, cfg):
    """Approximate p(X), theta(X) and d(X) on the Stiefel manifold.

    Starting from d = 0, each outer step linearizes at ``Y = R_X(d)``, solves
    the convex inner model on T_Y, pulls the result back to T_X by projection
    and backtracks on ``l(d) = <grad_f, d> + g(R_X(d))``.
    """
    g_x = g_eval(X)

    def ell(d):
        return float(np.sum(grad_f * d)) + g_eval(st_polar_retract(X, d))

    d = np.zeros_like(X)
    ell_d = g_x
    for _ in range(cfg.max_alg2_iters):
        Y = st_polar_retract(X, d)
        if cfg.transport == "differentiated":
            try:
                G = st_diff_transport(X, d, grad_f)
            except TransportError:
                logger.info("differentiated transport failed; using projection")
                G = st_project(Y, grad_f)
        else:
            G = st_project(Y, grad_f)
        xi = solve_inner(Y, G, g_eval, cfg)
        sq = float(np.sum(xi * xi))
        if sq == 0.0:
            break
        step = st_project(X, xi)
        alpha = 1.0
        while alpha >= cfg.min_alpha:
            cand = d + alpha * step
            val = ell(cand)
            if val < ell_d - cfg.sigma * alpha * sq:
                d, ell_d = cand, val
                break
            alpha *= 0.5
        else:
            break
    p = st_polar_retract(X, d)
    theta = float(np.sum(grad_f * d)) + g_eval(p) - g_x
    if theta < 0.0:
        return GapResult(p=p, theta=theta, d=d)
    return GapResult(p=np.array(X, copy=True), theta=0.0, d=np.zeros_like(X))


def polar_factor(M):
    """Closest matrix with orthonormal columns, via the thin SVD."""
    U, _, Vt = np.linalg.svd(M, full_matrices=False)
    return U @ Vt


class Stiefel(Manifold):
    """St(p, n): n x p matrices with orthonormal columns."""

    def __init__(self, p, n):
        if not 1 <= p <= n:
            raise ValueError(f"need 1 <= p <= n, got p={p}, n={n}")
        self.p = p
        self.n = n
        self.shape = (n, p)

    def __repr__(self):
        return f"Stiefel(p={self.p}, n={self.n})"

    @property
    def dim(self):
        return self.n * self.p - self.p * (self.p + 1) // 2

    def project_tangent(self, x, v):
        return st_project(x, v)

    def tangent_residual(self, x, v):
        A = x.T @ v
        return float(np.linalg.norm(A + A.T))

    def point_residual(self, x):
        return float(np.linalg.norm(x.T @ x - np.eye(self.p)))

    def normalize(self, x):
        return polar_factor(x)

    def retract(self, x, eta):
        return st_polar_retract(x, eta)

    def inv_retract(self, x, y):
        return st_inv_polar_retract(x, y)

    def transport(self, x, eta, xi):
        return st_diff_transport(x, eta, xi)

    def transport_back(self, x, eta, w):
        # projection surrogate for the adjoint of the inverse transport
        return st_project(x, w)

    def dist(self, x, y):
        return float(np.linalg.norm(st_inv_polar_retract(x, y)))

    def random_point(self, rng):
        return polar_factor(rng.standard_normal(self.shape))

    def subproblem_config(self, lam, **kwargs):
        return StiefelSubproblemConfig(lam=lam, **kwargs)

    def gap_subproblem(self, x, grad_f, g_eval, cfg):
        return st_gap_subproblem(x, grad_f, g_eval, cfg)
