"""Composite objectives F = f + g and the sparse PCA instances."""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kernels import spectral_norm_sym
from .manifold import Manifold
from .sphere import Sphere
from .stiefel import Stiefel


@dataclass(frozen=True)
class CompositeObjective:
    """Smooth part f, nonsmooth part g and a smoothness estimate for f.

    Attributes
    ----------
    f : callable
        Smooth part evaluated at a point.
    egrad : callable
        Euclidean gradient of f in ambient coordinates.
    g : callable
        Nonsmooth part, here ``lam * ||x||_1``.
    lam : float
        Weight of the L1 term.
    L : float
        Estimate of the smoothness constant of f.
    manifold : Manifold
    """

    f: Callable
    egrad: Callable
    g: Callable
    lam: float
    L: float
    manifold: Manifold

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")


@dataclass(frozen=True)
class SparsePCAInstance:
    A: np.ndarray
    gram: np.ndarray
    lam: float
    p: int = 1

    @classmethod
    def from_matrix(cls, A, lam, p=1):
        A = np.asarray(A, dtype=float)
        gram = A.T @ A
        return cls(A=A, gram=0.5 * (gram + gram.T), lam=lam, p=p)


def l1_penalty(lam):
    def g(x):
        return lam * float(np.abs(x).sum())

    return g


def make_sparse_pca(A, lam, manifold):
    """Sparse PCA objective ``-tr(X^T A^T A X) + lam ||X||_1`` on a manifold.

    On the sphere this is ``-x^T A^T A x + lam ||x||_1``.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    n = A.shape[0]
    if manifold.shape[0] != n:
        raise ValueError(f"A is {n} x {n} but {manifold!r} lives in R^{manifold.shape[0]}")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    G = A.T @ A
    G = 0.5 * (G + G.T)

    if isinstance(manifold, Sphere):
        def f(x):
            return -float(x @ G @ x)
    elif isinstance(manifold, Stiefel):
        def f(x):
            return -float(np.sum(x * (G @ x)))
    else:
        raise TypeError(f"unsupported manifold {manifold!r}")

    def egrad(x):
        return -2.0 * (G @ x)

    L = 2.0 * spectral_norm_sym(G)
    if L == 0.0:
        L = 1.0  # A == 0: f is constant, any positive constant is valid
    return CompositeObjective(f=f, egrad=egrad, g=l1_penalty(lam), lam=lam, L=L, manifold=manifold)


def riem_grad(obj, x):
    """Riemannian gradient: tangent projection of the Euclidean gradient."""
    return obj.manifold.project_tangent(x, obj.egrad(x))


def eval_F(obj, x):
    """Return ``(F, f, g)`` at x."""
    f = obj.f(x)
    g = obj.g(x)
    return f + g, f, g
