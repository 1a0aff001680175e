"""Step-size rules for the conditional gradient iteration."""
from dataclasses import dataclass
from typing import NamedTuple, Optional


@dataclass(frozen=True)
class Armijo:
    """Backtracking on ``F(R_x(lam d)) <= F(x) + zeta lam theta``.

    Each rejected trial is multiplied by ``(omega1 + omega2) / 2``, which lies
    inside the admissible interval ``[omega1, omega2]``.
    """

    zeta: float = 0.1
    omega1: float = 0.05
    omega2: float = 0.95
    max_backtracks: int = 60

    name = "armijo"

    def __post_init__(self):
        if not 0 < self.zeta < 1:
            raise ValueError("zeta must lie in (0, 1)")
        if not 0 < self.omega1 < self.omega2 < 1:
            raise ValueError("need 0 < omega1 < omega2 < 1")
        if self.max_backtracks < 0:
            raise ValueError("max_backtracks must be >= 0")

    @property
    def factor(self):
        return 0.5 * (self.omega1 + self.omega2)


@dataclass(frozen=True)
class Adaptive:
    """``min(1, -theta / (L dist^2))``; L defaults to the objective's estimate."""

    L: Optional[float] = None

    name = "adaptive"

    def __post_init__(self):
        if self.L is not None and not self.L > 0:
            raise ValueError("L must be positive")


@dataclass(frozen=True)
class Diminishing:
    """``2 / (k + 2)``."""

    name = "diminishing"


class ArmijoResult(NamedTuple):
    step: float
    backtracks: int
    stalled: bool
    value: float


def armijo_search(F_at, F_x, theta, params):
    """Backtracking line search along ``lam -> F(R_x(lam d))``.

    Parameters
    ----------
    F_at : callable
        Objective along the retraction curve.
    F_x : float
        ``F_at(0)``.
    theta : float
        Negative gap at x.
    params : Armijo

    Returns
    -------
    ArmijoResult
        Accepted step, number of contractions, whether the search ran out of
        backtracks (in which case ``step`` is the last trial), and ``F_at(step)``.
    """
    if not theta < 0:
        raise ValueError(f"theta must be negative, got {theta}")
    lam = 1.0
    for ell in range(params.max_backtracks + 1):
        val = F_at(lam)
        if val <= F_x + params.zeta * lam * theta:
            return ArmijoResult(lam, ell, False, val)
        if ell < params.max_backtracks:
            lam *= params.factor
    return ArmijoResult(lam, params.max_backtracks, True, val)


def adaptive_step(theta, L, dist2):
    """Minimizer over (0, 1] of ``lam theta + L lam^2 dist2 / 2``."""
    if not (theta < 0 and L > 0 and dist2 > 0):
        raise ValueError("adaptive step needs theta < 0, L > 0 and dist2 > 0")
    return min(1.0, -theta / (L * dist2))


def diminishing_step(k):
    if k < 0:
        raise ValueError("k must be >= 0")
    return 2.0 / (k + 2.0)


def parse_strategy(name, **kwargs):
    """Build a strategy from its name (``armijo``, ``adaptive``, ``diminishing``)."""
    table = {"armijo": Armijo, "adaptive": Adaptive, "diminishing": Diminishing}
    try:
        cls = table[name]
    except KeyError:
        raise ValueError(f"unknown step-size strategy {name!r}") from None
    return cls(**kwargs)
