"""Riemannian generalized conditional gradient solvers."""
import logging
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional

import numpy as np

from .manifold import GapResult, InverseRetractionError, TransportError
from .objectives import eval_F, riem_grad
from .stepsize import Adaptive, Armijo, Diminishing, adaptive_step, armijo_search, diminishing_step

logger = logging.getLogger(__name__)

THETA_CONVERGED = "theta_converged"
F_STALLED = "f_stalled"
MAX_ITERS = "max_iters"
LINE_SEARCH_STALLED = "line_search_stalled"
ERROR = "error"
STOP_STATUSES = (THETA_CONVERGED, F_STALLED, MAX_ITERS, LINE_SEARCH_STALLED)

RENORM_TOL = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Step-size strategy, stopping rules and subproblem settings.

    ``subproblem`` holds keyword overrides for the manifold's subproblem
    config (``SphereSubproblemConfig`` or ``StiefelSubproblemConfig``); the
    L1 weight always comes from the objective.
    """

    strategy: Any = field(default_factory=Armijo)
    max_iters: int = 2000
    tol_theta: float = 1e-4
    fstall_window: int = 5
    tol_fstall: float = 1e-4
    subproblem: dict = field(default_factory=dict)
    check_invariants: bool = False

    def __post_init__(self):
        if not (self.tol_theta > 0 and self.tol_fstall > 0):
            raise ValueError("tolerances must be positive")
        if self.fstall_window < 1 or self.max_iters < 0:
            raise ValueError("fstall_window must be >= 1 and max_iters >= 0")
        if not isinstance(self.strategy, (Armijo, Adaptive, Diminishing)):
            raise TypeError(f"unknown step-size strategy {self.strategy!r}")


@dataclass
class IterationRecord:
    k: int
    F: float
    f: float
    g: float
    theta: float
    lambda_k: float
    wall_time: float


@dataclass
class SolverReport:
    records: list
    status: str
    final_point: np.ndarray
    total_time: float
    error: Optional[str] = None

    @property
    def iterations(self):
        """Index of the last iteration, i.e. the number of updates attempted."""
        return len(self.records) - 1

    @property
    def final(self):
        return self.records[-1]

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])


def check_stop(records, cfg):
    """Stopping status for the latest record, or None to continue."""
    last = records[-1]
    k = len(records) - 1
    if abs(last.theta) <= cfg.tol_theta:
        return THETA_CONVERGED
    w = cfg.fstall_window
    if k >= w and abs(last.F - records[k - w].F) <= cfg.tol_fstall:
        return F_STALLED
    if k >= cfg.max_iters:
        return MAX_ITERS
    return None


def _subproblem_config(obj, cfg):
    return obj.manifold.subproblem_config(obj.lam, **cfg.subproblem)


def compute_gap(x, obj, cfg, grad=None, sub_cfg=None):
    """Solve the conditional gradient subproblem at x.

    ``grad`` replaces the Riemannian gradient of f when given (the
    accelerated solver passes its momentum vector here).
    """
    if grad is None:
        grad = riem_grad(obj, x)
    if sub_cfg is None:
        sub_cfg = _subproblem_config(obj, cfg)
    return obj.manifold.gap_subproblem(x, grad, obj.g, sub_cfg)


def _on_manifold(M, x):
    if M.point_residual(x) > RENORM_TOL:
        return M.normalize(x)
    return x


def _check_gap(M, x, gap):
    if gap.theta > 0:
        raise AssertionError(f"positive gap {gap.theta}")
    M.check_tangent(x, gap.d)
    if np.linalg.norm(M.retract(x, gap.d) - gap.p) > 1e-8:
        raise AssertionError("retract(x, d) does not reproduce p")


def _take_step(obj, strategy, k, x, d, theta, F_x):
    """Return ``(lambda, new point, stalled)`` for a step along d from x."""
    M = obj.manifold
    if isinstance(strategy, Armijo):
        trials = {}

        def F_at(lam):
            y = M.retract(x, lam * d)
            trials[lam] = y
            return eval_F(obj, y)[0]

        res = armijo_search(F_at, F_x, theta, strategy)
        return res.step, trials[res.step], res.stalled
    if isinstance(strategy, Adaptive):
        L = strategy.L if strategy.L is not None else obj.L
        lam = adaptive_step(theta, L, M.inner(x, d, d))
    else:
        lam = diminishing_step(k)
    return lam, M.retract(x, lam * d), False


def rgcg_solve(x0, obj, cfg, callback=None):
    """Riemannian generalized conditional gradient method.

    Parameters
    ----------
    x0 : ndarray
        Starting point on ``obj.manifold``.
    obj : CompositeObjective
    cfg : SolverConfig
    callback : callable, optional
        Called as ``callback(k, x, gap, lambda_k)`` after every iteration.

    Returns
    -------
    SolverReport
    """
    M = obj.manifold
    sub_cfg = _subproblem_config(obj, cfg)
    x = _on_manifold(M, np.array(x0, dtype=float))
    records = []
    status, error = None, None
    t0 = time.perf_counter()
    for k in range(cfg.max_iters + 1):
        try:
            gap = compute_gap(x, obj, cfg, sub_cfg=sub_cfg)
        except (InverseRetractionError, TransportError, np.linalg.LinAlgError) as exc:
            status, error = ERROR, f"subproblem failed at iteration {k}: {exc}"
            logger.warning(error)
            break
        if cfg.check_invariants:
            M.check_point(x, tol=1e-9)
            _check_gap(M, x, gap)
        F, f, g = eval_F(obj, x)
        rec = IterationRecord(k, F, f, g, gap.theta, 0.0, 0.0)
        records.append(rec)
        status = check_stop(records, cfg)
        stalled = False
        if status is None:
            lam, x_new, stalled = _take_step(obj, cfg.strategy, k, x, gap.d, gap.theta, F)
            if stalled:
                status = LINE_SEARCH_STALLED
            else:
                rec.lambda_k = lam
        rec.wall_time = time.perf_counter() - t0
        if callback is not None:
            callback(k, x, gap, rec.lambda_k)
        if status is not None:
            break
        x = _on_manifold(M, x_new)
    if status is None:
        status = MAX_ITERS
    return SolverReport(records, status, x, time.perf_counter() - t0, error)


@dataclass
class AcceleratedState:
    """Momentum aggregate and direction memory of the accelerated method.

    ``beta`` is tangent at ``beta_base`` and ``d`` at ``d_base``.
    """

    beta: np.ndarray
    beta_base: np.ndarray
    d: np.ndarray
    d_base: np.ndarray
    tau: float = 2.0 / 3.0


def momentum_weight(k):
    return 2.0 / (k + 3.0)


def accelerated_solve(x0, obj, cfg, callback=None):
    """Accelerated (momentum) variant of :func:`rgcg_solve`.

    Per iteration, with ``tau = 2 / (k + 3)``:

    * ``y = R_x(tau d)`` where d is the last subproblem direction carried to x;
    * ``beta <- (1 - tau) beta + lam_prev grad f(y)``, beta carried to y;
    * the subproblem at y with beta as gradient gives p, theta and a new d;
    * ``x <- R_x(lam R_x^{-1}(p))`` with lam from the step-size strategy.

    ``lam_prev`` is the previous iteration's step, 1 at k = 0. The callback
    receives ``(k, x, gap, lambda_k, state)``.
    """
    M = obj.manifold
    sub_cfg = _subproblem_config(obj, cfg)
    x = _on_manifold(M, np.array(x0, dtype=float))
    zero = M.zero_vector(x)
    state = AcceleratedState(beta=zero, beta_base=x, d=zero.copy(), d_base=x)
    lam_prev = 1.0
    records = []
    status, error = None, None
    t0 = time.perf_counter()
    for k in range(cfg.max_iters + 1):
        tau = momentum_weight(k)
        state.tau = tau
        try:
            d_x = M.carry(state.d_base, x, state.d)
            y = _on_manifold(M, M.retract(x, tau * d_x))
            beta = (1.0 - tau) * M.carry(state.beta_base, y, state.beta) + lam_prev * riem_grad(obj, y)
            state.beta, state.beta_base = beta, y
            gap = compute_gap(y, obj, cfg, grad=beta, sub_cfg=sub_cfg)
        except (InverseRetractionError, TransportError, np.linalg.LinAlgError) as exc:
            status, error = ERROR, f"accelerated step failed at iteration {k}: {exc}"
            logger.warning(error)
            break
        state.d, state.d_base = gap.d, y
        if cfg.check_invariants:
            M.check_point(x, tol=1e-9)
            M.check_tangent(y, beta)
            _check_gap(M, y, gap)
        F, f, g = eval_F(obj, x)
        rec = IterationRecord(k, F, f, g, gap.theta, 0.0, 0.0)
        records.append(rec)
        status = check_stop(records, cfg)
        if status is None:
            try:
                anchor, direction, F_anchor = x, M.inv_retract(x, gap.p), F
            except InverseRetractionError:
                logger.info("inverse retraction from x failed at iteration %d; stepping from y", k)
                anchor, direction, F_anchor = y, gap.d, eval_F(obj, y)[0]
            lam, x_new, stalled = _take_step(
                obj, cfg.strategy, k, anchor, direction, gap.theta, F_anchor
            )
            if stalled:
                status = LINE_SEARCH_STALLED
            else:
                rec.lambda_k = lam
                lam_prev = lam
        rec.wall_time = time.perf_counter() - t0
        if callback is not None:
            callback(k, x, gap, rec.lambda_k, state)
        if status is not None:
            break
        x = _on_manifold(M, x_new)
    if status is None:
        status = MAX_ITERS
    return SolverReport(records, status, x, time.perf_counter() - t0, error)


SOLVERS = {"rgcg": rgcg_solve, "accelerated": accelerated_solve}


def solve(x0, obj, cfg, solver="rgcg", callback=None):
    try:
        fn = SOLVERS[solver]
    except KeyError:
        raise ValueError(f"unknown solver {solver!r}") from None
    return fn(x0, obj, cfg, callback=callback)


def with_strategy(cfg, strategy):
    return replace(cfg, strategy=strategy)
