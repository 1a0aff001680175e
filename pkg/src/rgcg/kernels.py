"""Small dense matrix primitives used by the Stiefel geometry and the objectives."""
import numpy as np

SPD_FLOOR = 1e-14
SYM_TOL = 1e-12


class SingularityError(np.linalg.LinAlgError):
    """Raised when a small dense solve has no (stable) solution."""


def _check_symmetric(M, tol=SYM_TOL):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, np.abs(M).max(initial=0.0))
    if np.abs(M - M.T).max(initial=0.0) > tol * scale:
        raise ValueError("matrix is not symmetric")
    return M


def inv_sqrt_spd(M):
    """Inverse square root of a symmetric positive definite matrix.

    Parameters
    ----------
    M : ndarray, shape (p, p)
        Symmetric positive definite.

    Returns
    -------
    N : ndarray, shape (p, p)
        Symmetric, with ``N @ M @ N == I``.
    """
    M = _check_symmetric(M)
    w, Q = np.linalg.eigh((M + M.T) / 2)
    if w[0] <= SPD_FLOOR:
        raise SingularityError(f"smallest eigenvalue {w[0]:.3e} below SPD floor")
    N = (Q / np.sqrt(w)) @ Q.T
    return (N + N.T) / 2


def solve_matrix_eq(B1, B2, K):
    """Solve the Sylvester equation ``B1 @ W + W @ B2 = K`` for W.

    Uses the dense Kronecker form, which is fine for the p <= 50 blocks this
    package needs.
    """
    B1 = np.asarray(B1, dtype=float)
    B2 = np.asarray(B2, dtype=float)
    K = np.asarray(K, dtype=float)
    p = K.shape[0]
    if B1.shape != (p, p) or B2.shape != (p, p) or K.shape != (p, p):
        raise ValueError("B1, B2, K must all be p x p")
    eye = np.eye(p)
    # column-major vec: vec(B1 W) = (I kron B1) vec(W), vec(W B2) = (B2^T kron I) vec(W)
    op = np.kron(eye, B1) + np.kron(B2.T, eye)
    try:
        w = np.linalg.solve(op, K.reshape(-1, order="F"))
    except np.linalg.LinAlgError as exc:
        raise SingularityError("Sylvester operator singular") from exc
    W = w.reshape((p, p), order="F")
    if not np.all(np.isfinite(W)):
        raise SingularityError("Sylvester operator singular")
    resid = np.linalg.norm(B1 @ W + W @ B2 - K)
    if resid > 1e-6 * max(1.0, np.linalg.norm(K)):
        raise SingularityError("Sylvester operator singular")
    return W


def soft_threshold(v, lam):
    """Elementwise soft-thresholding, the proximal map of ``lam * ||.||_1``."""
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - lam, 0.0)


def spectral_norm_sym(M, tol=1e-9, max_iters=10000):
    """Largest absolute eigenvalue of a symmetric matrix by power iteration.

    Iterates on ``M @ M`` so that a +/- pair of dominant eigenvalues does not
    stall the iteration. Falls back to a full eigendecomposition if the
    residual has not dropped below ``tol`` after ``max_iters`` steps.
    """
    M = _check_symmetric(M)
    n = M.shape[0]
    v = np.random.default_rng(0).standard_normal(n)
    v /= np.linalg.norm(v)
    for _ in range(max_iters):
        w = M @ v
        sigma2 = w @ w
        if sigma2 == 0.0:
            break
        u = M @ w
        if np.linalg.norm(u - sigma2 * v) <= tol * sigma2:
            return float(np.sqrt(sigma2))
        v = u / np.linalg.norm(u)
    return float(np.abs(np.linalg.eigvalsh(M)).max())
