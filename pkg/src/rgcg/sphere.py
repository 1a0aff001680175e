"""Unit sphere S^{n-1} with the exponential map as retraction."""
from dataclasses import dataclass

import numpy as np

from .kernels import soft_threshold
from .manifold import GapResult, InverseRetractionError, Manifold

SMALL_STEP = 1e-9
ANTIPODAL_MARGIN = 1e-8
SERIES_RADIUS = 1e-6


@dataclass(frozen=True)
class SphereSubproblemConfig:
    """Settings for the fixed-point linearization of the sphere subproblem.

    ``lam`` is the L1 weight of the objective; zero is accepted and reduces
    each inner step to a normalized linear minimizer.
    """

    lam: float
    max_outer_iters: int = 10
    tol: float = 1e-10

    def __post_init__(self):
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")


def sph_exp(x, eta):
    """Exponential map ``x cos|eta| + eta sin|eta| / |eta|``."""
    s = np.linalg.norm(eta)
    if s == 0.0:
        return np.array(x, dtype=float, copy=True)
    if s <= SMALL_STEP:
        y = x * (1.0 - 0.5 * s * s) + eta
    else:
        y = x * np.cos(s) + eta * (np.sin(s) / s)
    return y / np.linalg.norm(y)


def sph_log(x, y):
    """Logarithm map, the inverse of :func:`sph_exp` away from the antipode."""
    t = float(np.clip(x @ y, -1.0, 1.0))
    if t <= -1.0 + ANTIPODAL_MARGIN:
        raise InverseRetractionError("inverse retraction undefined at the antipode")
    v = y - t * x
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return np.zeros_like(x)
    # arctan2 keeps the angle accurate when y is close to x
    return v * (np.arctan2(nv, t) / nv)


def sph_parallel_transport(x, eta, xi):
    """Parallel transport of ``xi`` along the geodesic ``t -> exp_x(t eta)``."""
    s = np.linalg.norm(eta)
    if s <= SMALL_STEP:
        return np.array(xi, dtype=float, copy=True)
    u = eta / s
    c = u @ xi
    return xi - (np.sin(s) * c) * x + ((np.cos(s) - 1.0) * c) * u


def sph_transport_back(x, eta, w):
    """Adjoint of :func:`sph_parallel_transport`, from T_y back to T_x."""
    s = np.linalg.norm(eta)
    if s <= SMALL_STEP:
        out = np.array(w, dtype=float, copy=True)
    else:
        u = eta / s
        out = w - (np.sin(s) * (x @ w)) * u + ((np.cos(s) - 1.0) * (u @ w)) * u
    return out - (x @ out) * x


def solve_l1_sphere(x, lam):
    """Global minimizer of ``||y - x||^2 / (2 lam) + ||y||_1`` over the sphere.

    Ties for the largest-magnitude entry go to the smallest index.
    """
    x = np.asarray(x, dtype=float)
    z = soft_threshold(x, lam)
    nz = np.linalg.norm(z)
    if nz > 0.0:
        return z / nz
    i = int(np.argmax(np.abs(x)))
    y = np.zeros_like(x)
    y[i] = 1.0 if x[i] >= 0 else -1.0
    return y


def _log_scale(t):
    """Return a(t) = arccos(t)/sqrt(1-t^2) and its derivative."""
    e = 1.0 - t
    if e < SERIES_RADIUS:
        a = 1.0 + e / 3.0 + 2.0 * e**2 / 15.0 + 2.0 * e**3 / 35.0
        da = -(1.0 / 3.0 + 4.0 * e / 15.0 + 6.0 * e**2 / 35.0)
        return a, da
    a = np.arccos(t) / np.sqrt(1.0 - t * t)
    return a, (t * a - 1.0) / (1.0 - t * t)


def linearized_gradient(x, grad_f, y):
    """Euclidean gradient in y of ``<grad_f, log_x(y)>``.

    Uses ``<grad_f, log_x(y)> = a(x.y) * grad_f.y``, valid because grad_f is
    tangent at x.
    """
    t = float(np.clip(x @ y, -1.0, 1.0))
    a, da = _log_scale(t)
    return (da * (grad_f @ y)) * x + a * grad_f


def sph_gap_subproblem(x, grad_f, g_eval, cfg):
    """Approximate p(x), theta(x) and d(x) on the sphere.

    Each step linearizes ``y -> <grad_f, log_x(y)>`` at the current estimate
    and minimizes the linear term plus ``lam ||y||_1`` in closed form. The
    best candidate seen (x itself included, with gap 0) is returned.
    """
    g_x = g_eval(x)
    best_p, best_theta = x, 0.0
    y = x
    for _ in range(cfg.max_outer_iters):
        c = -linearized_gradient(x, grad_f, y)
        if cfg.lam > 0:
            y_new = solve_l1_sphere(c, cfg.lam)
        else:
            nc = np.linalg.norm(c)
            if nc == 0.0:
                break
            y_new = c / nc
        try:
            d_new = sph_log(x, y_new)
        except InverseRetractionError:
            break
        theta = float(grad_f @ d_new) + g_eval(y_new) - g_x
        if theta < best_theta:
            best_p, best_theta = y_new, theta
        if np.linalg.norm(y_new - y) <= cfg.tol:
            break
        y = y_new
    if best_theta < 0.0:
        return GapResult(p=best_p, theta=best_theta, d=sph_log(x, best_p))
    return GapResult(p=np.array(x, copy=True), theta=0.0, d=np.zeros_like(x))


class Sphere(Manifold):
    """The unit sphere in R^n."""

    def __init__(self, n):
        if n < 2:
            raise ValueError("sphere needs n >= 2")
        self.n = n
        self.shape = (n,)

    def __repr__(self):
        return f"Sphere(n={self.n})"

    @property
    def dim(self):
        return self.n - 1

    def project_tangent(self, x, v):
        return v - (x @ v) * x

    def tangent_residual(self, x, v):
        return abs(float(x @ v))

    def point_residual(self, x):
        return abs(float(np.linalg.norm(x)) - 1.0)

    def normalize(self, x):
        return x / np.linalg.norm(x)

    def retract(self, x, eta):
        return sph_exp(x, eta)

    def inv_retract(self, x, y):
        return sph_log(x, y)

    def transport(self, x, eta, xi):
        return sph_parallel_transport(x, eta, xi)

    def transport_back(self, x, eta, w):
        return sph_transport_back(x, eta, w)

    def carry(self, x, y, v):
        try:
            return sph_parallel_transport(x, sph_log(x, y), v)
        except InverseRetractionError:
            return self.project_tangent(y, v)

    def dist(self, x, y):
        # same angle as arccos(x.y), without its loss of precision near 0
        t = float(np.clip(x @ y, -1.0, 1.0))
        return float(np.arctan2(np.linalg.norm(y - t * x), t))

    def random_point(self, rng):
        x = rng.standard_normal(self.n)
        return x / np.linalg.norm(x)

    def subproblem_config(self, lam, **kwargs):
        return SphereSubproblemConfig(lam=lam, **kwargs)

    def gap_subproblem(self, x, grad_f, g_eval, cfg):
        return sph_gap_subproblem(x, grad_f, g_eval, cfg)
