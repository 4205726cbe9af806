"""Metric differential operators and the preconditioned linear solve.

The scalar Laplacian of a metric is the Levi-Civita one in divergence form,
Lap_g f = (1/sqrt G) d_a (sqrt G g^{ab} d_b f),
assembled from spectral derivatives.  Summation by parts is exact on the
grid, so this operator is exactly symmetric against the sqrt(G)-weighted
inner product, which the iterative solves exploit.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .errors import LinearSolveError


def metric_volume_density(g: np.ndarray) -> np.ndarray:
    """sqrt(det g) pointwise."""
    return np.sqrt(np.linalg.det(g))


def laplace_beltrami(grid, g: np.ndarray, f: np.ndarray, ginv=None, sqrtG=None) -> np.ndarray:
    """Levi-Civita Laplacian of a scalar for the metric g (divergence form)."""
    if ginv is None:
        ginv = np.linalg.inv(g)
    if sqrtG is None:
        sqrtG = metric_volume_density(g)
    grad = grid.gradient(f)
    flux = sqrtG[..., None] * np.einsum("...ab,...b->...a", ginv, grad)
    div = np.zeros_like(f)
    for a in range(grid.dim):
        div = div + grid.deriv(flux[..., a], a)
    return div / sqrtG


def christoffel(grid, g: np.ndarray, ginv=None) -> np.ndarray:
    """Levi-Civita symbols Gamma^i_ab from spectral derivatives of g."""
    if ginv is None:
        ginv = np.linalg.inv(g)
    dim = grid.dim
    dg = np.stack([grid.deriv(g, a) for a in range(dim)], axis=-1)  # (...,m,b,a)
    # dg[..., m, b, a] = d_a g_mb
    sym = dg + np.swapaxes(dg, -1, -2)  # d_a g_mb + d_b g_ma
    term = sym - np.moveaxis(dg, -3, -1)  # - d_m g_ab
    return 0.5 * np.einsum("...im,...mab->...iab", ginv, term)


def solve_mean_zero(grid, apply_op, rhs: np.ndarray, precond, rtol: float = 1e-12,
                    maxiter: int = 600):
    """GMRES for operators with constant kernel on the torus.

    apply_op and precond map grid scalars to grid scalars; both sides are
    projected to mean zero.  Deterministic for fixed inputs.
    """
    shape = rhs.shape
    b = grid.drop_nyquist(rhs - np.mean(rhs)).ravel()
    if not np.any(b):
        return np.zeros(shape)

    def matvec(x):
        out = apply_op(x.reshape(shape))
        return grid.drop_nyquist(out - np.mean(out)).ravel()

    def psolve(x):
        out = precond(x.reshape(shape))
        return (out - np.mean(out)).ravel()

    n = b.size
    A = LinearOperator((n, n), matvec=matvec, dtype=float)
    M = LinearOperator((n, n), matvec=psolve, dtype=float)
    x, info = gmres(A, b, rtol=rtol, atol=0.0, maxiter=maxiter, M=M, restart=40)
    if info != 0:
        raise LinearSolveError(f"gmres failed to reach rtol={rtol:.1e} (info={info})")
    sol = x.reshape(shape)
    return sol - np.mean(sol)
