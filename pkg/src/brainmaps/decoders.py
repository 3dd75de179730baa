"""Linear decoders: least squares and the Lasso.

The Lasso objective is the unaveraged one,

    ||Y - X theta||^2 + lam * ||theta||_1,

so ``lam`` is on the scale of a sum over trials. There is no intercept.
"""

import warnings
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DimensionMismatch, NotConverged

DEFAULT_GRID = (0.001, 0.01, 0.1, 1, 10, 50, 100, 250, 500, 1000,
              5000, 10000, 15000, 25000, 50000)


@dataclass(frozen=True)
class LinearModel:
    theta: np.ndarray
    lam: float = 0.0
    converged: bool = True
    iterations: int = 0
    ridge_fallback: bool = False

    @property
    def is_zero(self):
        return not np.any(self.theta)


class LambdaGrid(tuple):
    """Strictly increasing, non-empty tuple of non-negative penalties."""

    def __new__(cls, values):
        values = tuple(float(v) for v in values)
        if not values:
            raise ValueError("lambda grid is empty")
        if any(v < 0 for v in values):
            raise ValueError("lambda values must be >= 0")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("lambda grid must be strictly increasing")
        return super().__new__(cls, values)


def lambda_max(X, Y):
    """Smallest penalty at which the Lasso solution is exactly zero."""
    return 2.0 * float(np.max(np.abs(X.T @ Y)))


def kkt_tolerance(lam):
    return 1e-4 * (1.0 + lam)


def kkt_residual(X, Y, theta, lam):
    """Largest violation of the Lasso subgradient optimality conditions."""
    g = -2.0 * (X.T @ (Y - X @ theta))
    nz = theta != 0
    viol = np.empty_like(g)
    viol[nz] = np.abs(g[nz] + lam * np.sign(theta[nz]))
    viol[~nz] = np.maximum(np.abs(g[~nz]) - lam, 0.0)
    return float(viol.max()) if viol.size else 0.0


def lasso_objective(X, Y, theta, lam):
    r = Y - X @ theta
    return float(r @ r + lam * np.abs(theta).sum())


def fit_least_squares(d):
    """Least-squares weights via the normal equations.

    Rank-deficient designs get a ridge of ``1e-10 * trace(X'X) / p`` on the
    diagonal and are flagged with ``ridge_fallback=True``.
    """
    X = d.X
    Y = d.Y.astype(float)
    gram = X.T @ X
    rhs = X.T @ Y
    fallback = np.linalg.matrix_rank(X) < X.shape[1]
    if fallback:
        ridge = 1e-10 * np.trace(gram) / X.shape[1]
        gram = gram + ridge * np.eye(X.shape[1])
    theta = np.linalg.solve(gram, rhs)
    return LinearModel(theta, 0.0, True, 0, fallback)


@numba.njit(cache=True, nogil=True)
def _soft(x, t):
    if x > t:
        return x - t
    if x < -t:
        return x + t
    return 0.0


@numba.njit(cache=True, nogil=True)
def _kkt_ok(g, theta, lam, kkt_tol):
    # g is X'(y - X theta); the loss gradient is -2 g
    for j in range(theta.shape[0]):
        grad = -2.0 * g[j]
        if theta[j] > 0.0:
            if abs(grad + lam) > kkt_tol:
                return False
        elif theta[j] < 0.0:
            if abs(grad - lam) > kkt_tol:
                return False
        elif abs(grad) > lam + kkt_tol:
            return False
    return True


@numba.njit(cache=True, nogil=True)
def _exact_g(G, c, theta):
    g = c.copy()
    p = theta.shape[0]
    for k in range(p):
        if theta[k] != 0.0:
            for j in range(p):
                g[j] -= G[k, j] * theta[k]
    return g


@numba.njit(cache=True, nogil=True)
def _objective(yy, c, g, theta, lam):
    # ||y - X t||^2 = y'y - t'c - t'g  when g = c - G t
    s = yy
    for j in range(theta.shape[0]):
        s += -theta[j] * (c[j] + g[j]) + lam * abs(theta[j])
    return s


@numba.njit(cache=True, nogil=True)
def _sweep(G, g, theta, half, active_only):
    p = theta.shape[0]
    max_delta = 0.0
    for j in range(p):
        gjj = G[j, j]
        if gjj == 0.0:
            continue
        if active_only and theta[j] == 0.0:
            continue
        new = _soft(g[j] + gjj * theta[j], half) / gjj
        delta = new - theta[j]
        if delta != 0.0:
            for k in range(p):
                g[k] -= delta * G[j, k]
            theta[j] = new
            if abs(delta) > max_delta:
                max_delta = abs(delta)
    return max_delta


@numba.njit(cache=True, nogil=True)
def _anderson(hist, K):
    # weights c (sum 1) minimising ||sum_k c_k (hist[k+1] - hist[k])||
    p = hist.shape[1]
    U = np.empty((K, p))
    for k in range(K):
        U[k] = hist[k + 1] - hist[k]
    M = U @ U.T
    ridge = 1e-10 * (np.trace(M) + 1e-300)
    for k in range(K):
        M[k, k] += ridge
    z = np.linalg.solve(M, np.ones(K))
    z /= z.sum()
    out = np.zeros(p)
    for k in range(K):
        out += z[k] * hist[k + 1]
    return out


@numba.njit(cache=True, nogil=True)
def _cd_lasso(G, c, yy, lam, theta, tol, kkt_tol, max_iter, K):
    # Cyclic coordinate descent on the Gram matrix. Full sweeps alternate
    # with sweeps restricted to the active set; every K same-kind sweeps an
    # Anderson extrapolation of the iterates is tried and kept only if it
    # lowers the objective. Convergence requires a full sweep with largest
    # change < tol and a passing KKT check.
    p = theta.shape[0]
    half = 0.5 * lam
    g = _exact_g(G, c, theta)
    hist = np.empty((K + 1, p))
    n_hist = 0
    active_only = False
    it = 0
    while it < max_iter:
        it += 1
        max_delta = _sweep(G, g, theta, half, active_only)
        if active_only:
            if max_delta < tol:
                active_only = False
                n_hist = 0
                continue
        elif max_delta < tol:
            g = _exact_g(G, c, theta)
            if _kkt_ok(g, theta, lam, kkt_tol):
                return it, True
            n_hist = 0
            continue
        else:
            active_only = True
            n_hist = 0
            continue
        if K > 0:
            hist[n_hist] = theta
            n_hist += 1
            if n_hist == K + 1:
                cand = _anderson(hist, K)
                g_c = _exact_g(G, c, cand)
                if _objective(yy, c, g_c, cand, lam) < _objective(yy, c, g, theta, lam):
                    theta[:] = cand
                    g = g_c
                n_hist = 0
    return it, False


def _prepare(X, Y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(Y, dtype=np.float64)
    G = np.ascontiguousarray(X.T @ X)
    c = X.T @ y
    return G, c, float(y @ y)


def _polish(G, c, yy, lam, theta):
    """Solve the KKT system on the support found by coordinate descent.

    Once the support and signs are right the Lasso solution is the solution
    of ``G_AA t = c_A - lam/2 * sign``. The refined point is kept only if it
    keeps the signs, passes the KKT check and does not raise the objective.
    """
    active = np.flatnonzero(theta)
    if active.size == 0:
        return theta
    G_aa = G[np.ix_(active, active)]
    if np.linalg.cond(G_aa) > 1e10:
        return theta
    signs = np.sign(theta[active])
    cand = np.zeros_like(theta)
    cand[active] = np.linalg.solve(G_aa, c[active] - 0.5 * lam * signs)
    if np.any(np.sign(cand[active]) != signs):
        return theta
    g_new = _exact_g(G, c, cand)
    if not _kkt_ok(g_new, cand, float(lam), kkt_tolerance(lam)):
        return theta
    old = _objective(yy, c, _exact_g(G, c, theta), theta, float(lam))
    if _objective(yy, c, g_new, cand, float(lam)) > old + 1e-12 * max(1.0, abs(old)):
        return theta
    return cand


def _solve(prepared, lam, theta0, tol, max_iter, anderson=5):
    G, c, yy = prepared
    theta = np.zeros(G.shape[0]) if theta0 is None else np.array(theta0, dtype=np.float64)
    iters, ok = _cd_lasso(G, c, yy, float(lam), theta, float(tol),
                          kkt_tolerance(lam), int(max_iter), int(anderson))
    if ok:
        theta = _polish(G, c, yy, lam, theta)
    else:
        warnings.warn(f"Lasso did not converge in {max_iter} sweeps (lam={lam:g})",
                      NotConverged, stacklevel=3)
    return LinearModel(theta, float(lam), bool(ok), int(iters))


def fit_lasso(d, lam, tol=1e-7, max_iter=100_000, theta0=None):
    """Lasso by cyclic coordinate descent with soft-thresholding.

    Parameters
    ----------
    d : Dataset
    lam : float
        Penalty on the L1 norm, on the unaveraged squared-loss scale.
    tol : float
        Convergence threshold on the largest coefficient change of a sweep.
    max_iter : int
        Maximum number of sweeps. On exhaustion a :class:`NotConverged`
        warning is issued and the last iterate returned with
        ``converged=False``.
    theta0 : array, optional
        Warm start.
    """
    if lam < 0:
        raise ValueError("lam must be >= 0")
    return _solve(_prepare(d.X, d.Y), lam, theta0, tol, max_iter)


def fit_path(d, grid, tol=1e-7, max_iter=100_000, descending=False):
    """One Lasso fit per grid value, each warm-started from the previous one.

    The grid is walked in increasing order unless ``descending`` is set;
    the returned list always follows the grid order.
    """
    grid = LambdaGrid(grid)
    prepared = _prepare(d.X, d.Y)
    order = range(len(grid) - 1, -1, -1) if descending else range(len(grid))
    models = [None] * len(grid)
    theta = None
    for k in order:
        m = _solve(prepared, grid[k], theta, tol, max_iter)
        models[k] = m
        theta = m.theta
    return models


def predict(model, X):
    """sign(X @ theta) with sign(0) = +1."""
    theta = model.theta if isinstance(model, LinearModel) else np.asarray(model)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != theta.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[1]} columns, model has {theta.shape[0]} weights")
    return np.where(X @ theta >= 0, 1, -1).astype(np.int8)
