"""Common manifold interface consumed by the solvers.

Points and tangent vectors are plain ndarrays in ambient coordinates. A
tangent vector carries no reference to its base point; every method that
takes one also takes the base point explicitly.
"""
from dataclasses import dataclass

import numpy as np

POINT_TOL = 1e-10
TANGENT_TOL = 1e-9


class InverseRetractionError(ValueError):
    """The inverse retraction is undefined for the given pair of points."""


class TransportError(ValueError):
    """A vector transport could not be evaluated."""


@dataclass(frozen=True)
class GapResult:
    """Solution of the conditional gradient subproblem at a point x.

    Attributes
    ----------
    p : ndarray
        Subproblem minimizer on the manifold.
    theta : float
        Optimal value (the Frank-Wolfe gap). Always <= 0.
    d : ndarray
        Search direction at x, with ``retract(x, d) == p``.
    """

    p: np.ndarray
    theta: float
    d: np.ndarray


class Manifold:
    """Embedded submanifold with the Euclidean metric.

    Subclasses provide ``retract``, ``inv_retract``, ``transport``,
    ``transport_back``, ``project_tangent``, ``tangent_residual``,
    ``point_residual``, ``normalize``, ``dist``, ``random_point`` and
    ``gap_subproblem``.
    """

    shape: tuple

    def inner(self, x, u, v):
        return float(np.sum(u * v))

    def norm(self, x, u):
        return float(np.linalg.norm(u))

    def zero_vector(self, x):
        return np.zeros_like(x)

    def random_tangent(self, x, rng):
        return self.project_tangent(x, rng.standard_normal(self.shape))

    def carry(self, x, y, v):
        """Move a tangent vector at x into the tangent space at y."""
        return self.project_tangent(y, v)

    def check_point(self, x, tol=POINT_TOL):
        x = np.asarray(x)
        if x.shape != self.shape:
            raise ValueError(f"point has shape {x.shape}, expected {self.shape}")
        resid = self.point_residual(x)
        if resid > tol:
            raise ValueError(f"point is off the manifold (residual {resid:.3e})")
        return x

    def check_tangent(self, x, v, tol=TANGENT_TOL):
        v = np.asarray(v)
        if v.shape != self.shape:
            raise ValueError(f"tangent has shape {v.shape}, expected {self.shape}")
        resid = self.tangent_residual(x, v)
        if resid > tol * (1.0 + np.linalg.norm(v)):
            raise ValueError(f"vector is not tangent (residual {resid:.3e})")
        return v
