"""Almost-Hermitian structures on the torus and the documented recipe catalog.

The coordinate order is (x1, y1, ..., xn, yn).  The standard complex
structure J0 sends d/dx_j -> d/dy_j, and the standard symplectic form is
w0 = dx1^dy1 + ... + dxn^dyn, so (w0, J0) induces the Euclidean metric.

Twisted test structures are built by position-dependent symplectic (not
unitary) conjugation: J = exp(2 A(x) K) J0 with K symmetric, K^2 = Id,
anticommuting with J0 and with w0 K symmetric.  Conjugation by such
symplectic factors preserves w0-compatibility while making the Nijenhuis
tensor nonzero wherever dA does not vanish.  (Conjugating by unitary factors
would fix J0 pointwise, so the twist has to leave the orthogonal group.)
"""

from __future__ import annotations

import numpy as np

from .errors import TamingError
from .fields import AlmostComplexField, MetricField, ScalarField, TwoFormField
from .forms import anti_invariant_part, j_pullback_two_form, one_one_part
from .grid import PeriodicGrid


# -- constant building blocks ----------------------------------------------

def _j0_matrix(n: int) -> np.ndarray:
    j = np.zeros((2 * n, 2 * n))
    for i in range(n):
        j[2 * i, 2 * i + 1] = -1.0
        j[2 * i + 1, 2 * i] = 1.0
    return j


def _omega0_matrix(n: int) -> np.ndarray:
    w = np.zeros((2 * n, 2 * n))
    for i in range(n):
        w[2 * i, 2 * i + 1] = 1.0
        w[2 * i + 1, 2 * i] = -1.0
    return w


def _twist_generator(n: int) -> np.ndarray:
    """K = diag(k, -k, ...) with k = diag(1, -1): symmetric, K^2 = Id,
    anticommutes with J0, and w0 K is symmetric (so exp(AK) is symplectic)."""
    k = np.diag([1.0, -1.0])
    blocks = [k if i % 2 == 0 else -k for i in range(n)]
    out = np.zeros((2 * n, 2 * n))
    for i, b in enumerate(blocks):
        out[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = b
    return out


def constant_field(grid: PeriodicGrid, matrix: np.ndarray) -> np.ndarray:
    return np.broadcast_to(matrix, grid.shape + matrix.shape).copy()


def standard_complex_structure(grid: PeriodicGrid) -> AlmostComplexField:
    return AlmostComplexField(grid, constant_field(grid, _j0_matrix(grid.complex_dim)))


def standard_symplectic_form(grid: PeriodicGrid) -> TwoFormField:
    return TwoFormField(grid, constant_field(grid, _omega0_matrix(grid.complex_dim)))


def euclidean_metric(grid: PeriodicGrid) -> MetricField:
    return MetricField(grid, constant_field(grid, np.eye(grid.dim)))


# -- core operations ---------------------------------------------------------

def metric_from_pair(omega: TwoFormField, J: AlmostComplexField) -> MetricField:
    """Riemannian metric of a taming pair: g(X,Y) = (w(X,JY) + w(Y,JX))/2.

    For compatible pairs the symmetrization is a no-op and g = w(., J.).
    Raises TamingError when the symmetric part fails to be positive definite.
    """
    M = np.einsum("...am,...mb->...ab", omega.values, J.values)
    g = 0.5 * (M + np.swapaxes(M, -1, -2))
    lam_min = float(np.min(np.linalg.eigvalsh(g)))
    if lam_min <= 0.0:
        raise TamingError(f"form does not tame J (margin {lam_min:.3e})")
    return MetricField(omega.grid, g)


def taming_margin(omega: TwoFormField, J: AlmostComplexField) -> float:
    """min over points and unit X of w(X, JX): positive iff w tames J."""
    M = np.einsum("...am,...mb->...ab", omega.values, J.values)
    g = 0.5 * (M + np.swapaxes(M, -1, -2))
    return float(np.min(np.linalg.eigvalsh(g)))


def compatibility_defect(omega: TwoFormField, J: AlmostComplexField) -> float:
    """Max norm of w(J., J.) - w; zero iff w is compatible with J."""
    return float(np.max(np.abs(j_pullback_two_form(J.values, omega.values) - omega.values)))


def almost_hermitian_defect(g: MetricField, J: AlmostComplexField) -> float:
    """Max norm of g(J., J.) - g."""
    pulled = np.einsum("...ma,...mn,...nb->...ab", J.values, g.values, J.values)
    return float(np.max(np.abs(pulled - g.values)))


def invariant_two_form(omega: TwoFormField, J: AlmostComplexField) -> TwoFormField:
    """The (1,1)-part (1/2)(w + w(J., J.)) as a field."""
    return TwoFormField(omega.grid, one_one_part(omega.values, J.values))


def nijenhuis(J: AlmostComplexField) -> np.ndarray:
    """Coordinate Nijenhuis tensor N^g_ab assembled from spectral derivatives.

    N(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y]; layout (..., g, a, b),
    antisymmetric in (a, b).  Vanishes iff J is integrable.
    """
    grid = J.grid
    dim = grid.dim
    dJ = np.stack([grid.deriv(J.values, m) for m in range(dim)], axis=-1)  # (...,g,b,m)
    t1 = np.einsum("...ma,...gbm->...gab", J.values, dJ)
    t3 = np.einsum("...gm,...mab->...gab", J.values, dJ)
    N = t1 - np.swapaxes(t1, -1, -2) + t3 - np.swapaxes(t3, -1, -2)
    return N


def nijenhuis_max_norm(J: AlmostComplexField) -> float:
    return float(np.max(np.abs(nijenhuis(J))))


def traces(g: MetricField, gt: MetricField):
    """Real-index traces (tr_g gt, tr_gt g) = (g^ab gt_ab, gt^ab g_ab).

    Both equal 2n when gt = g; convention fixed so the trace of a metric
    against itself is the real dimension.
    """
    ginv = np.linalg.inv(g.values)
    gtinv = np.linalg.inv(gt.values)
    tr_g_gt = np.einsum("...ab,...ab->...", ginv, gt.values)
    tr_gt_g = np.einsum("...ab,...ab->...", gtinv, g.values)
    if np.min(tr_g_gt) <= 0.0 or np.min(tr_gt_g) <= 0.0:
        raise ValueError("trace of a metric pair must be positive")
    return tr_g_gt, tr_gt_g


# -- Hermitian conversions (standard J0 only) --------------------------------

def real_to_hermitian(g: np.ndarray, n: int) -> np.ndarray:
    """Complex n x n Hermitian matrix g_{i jbar} of a J0-invariant real metric.

    Normalized so the Euclidean metric maps to (1/2) Id, matching
    w0 = i g_{i jbar} dz^i ^ dzbar^j.
    """
    x = slice(0, 2 * n, 2)
    y = slice(1, 2 * n, 2)
    re = 0.25 * (g[..., x, x] + g[..., y, y])
    im = 0.25 * (g[..., x, y] - g[..., y, x])
    return re + 1j * im


def hermitian_to_real(h: np.ndarray, n: int) -> np.ndarray:
    """Inverse of real_to_hermitian: real 2n x 2n J0-invariant metric."""
    shape = h.shape[:-2] + (2 * n, 2 * n)
    g = np.zeros(shape)
    x = slice(0, 2 * n, 2)
    y = slice(1, 2 * n, 2)
    g[..., x, x] = 2.0 * h.real
    g[..., y, y] = 2.0 * h.real
    g[..., x, y] = 2.0 * h.imag
    g[..., y, x] = -2.0 * h.imag
    return g


def complex_deriv(grid: PeriodicGrid, f: np.ndarray, i: int, bar: bool = False) -> np.ndarray:
    """Holomorphic coordinate derivative d/dz_i (or d/dzbar_i) for standard J0."""
    dx = grid.deriv(f, 2 * i)
    dy = grid.deriv(f, 2 * i + 1)
    return 0.5 * (dx + 1j * dy) if bar else 0.5 * (dx - 1j * dy)


# -- recipe catalog -----------------------------------------------------------
#
# Named families used by configs and tests.  Amplitudes are plain prefactors;
# every recipe is a low-mode trigonometric polynomial (or an analytic function
# of one) so the spectral smoothness gate passes at the documented
# resolutions.

TWIST_REFERENCE_AMPLITUDE = 0.35


def make_complex_structure(grid: PeriodicGrid, kind: str = "standard",
                           amplitude: float = TWIST_REFERENCE_AMPLITUDE) -> AlmostComplexField:
    """J recipes: 'standard', 'constant' (integrable, non-standard matrix),
    'twisted' (position-dependent, w0-compatible, nonzero Nijenhuis)."""
    n = grid.complex_dim
    J0 = _j0_matrix(n)
    K = _twist_generator(n)
    if kind == "standard":
        return standard_complex_structure(grid)
    if kind == "constant":
        S = _expm_sym(0.3 * K)
        return AlmostComplexField(grid, constant_field(grid, S @ J0 @ np.linalg.inv(S)))
    if kind == "twisted":
        c = grid.coords()
        if n == 1:
            A = amplitude * (np.sin(2 * np.pi * c[0]) + np.cos(2 * np.pi * c[1])) / 2.0
        else:
            A = amplitude * (
                np.sin(2 * np.pi * c[0]) * np.cos(2 * np.pi * c[3])
                + 0.5 * np.cos(2 * np.pi * c[1])
                + 0.5 * np.sin(2 * np.pi * c[2])
            )
        # K^2 = Id, so exp(2AK) = cosh(2A) Id + sinh(2A) K in closed form
        eye = np.eye(2 * n)
        S = np.cosh(2 * A)[..., None, None] * eye + np.sinh(2 * A)[..., None, None] * K
        J = np.einsum("...am,mb->...ab", S, J0)
        return AlmostComplexField.smooth(grid, J)
    raise ValueError(f"unknown complex-structure recipe '{kind}'")


def _expm_sym(K: np.ndarray) -> np.ndarray:
    lam, V = np.linalg.eigh(K)
    return (V * np.exp(lam)) @ V.T


def make_density_exponent(grid: PeriodicGrid, kind: str = "trig", amplitude: float = 0.5,
                          steepness: float = 8.0, width: float = 0.08,
                          center=None) -> ScalarField:
    """F recipes for the volume density e^F:

    'zero'     F = 0.
    'trig'     reference trigonometric family; on T^2 it is
               a sin(2 pi x1) cos(2 pi y1), on T^4 a three-term product mix.
    'plateau'  (n=1) F = log(1 + Lap(psi)/2) with psi a flattened sine, so the
               solved potential is exactly psi; used for L^p saturation studies.
    'bump'     periodic quasi-Gaussian concentration profile.
    """
    c = grid.coords()
    if kind == "zero":
        return ScalarField(grid, np.zeros(grid.shape))
    if kind == "trig":
        if grid.complex_dim == 1:
            F = amplitude * np.sin(2 * np.pi * c[0]) * np.cos(2 * np.pi * c[1])
        else:
            F = amplitude * (
                np.sin(2 * np.pi * c[0]) * np.sin(2 * np.pi * c[1])
                + np.sin(2 * np.pi * c[2]) * np.sin(2 * np.pi * c[3])
                + np.cos(2 * np.pi * c[0]) * np.sin(2 * np.pi * c[2])
            )
        return ScalarField.smooth(grid, F)
    if kind == "plateau":
        if grid.complex_dim != 1:
            raise ValueError("plateau recipe is defined on T^2 only")
        psi = _plateau_potential(grid, amplitude, steepness)
        lap = grid.deriv(grid.deriv(psi, 0), 0) + grid.deriv(grid.deriv(psi, 1), 1)
        dens = 1.0 + 0.5 * lap
        if np.min(dens) <= 0.0:
            raise ValueError("plateau amplitude too large: density not positive")
        return ScalarField.smooth(grid, np.log(dens))
    if kind == "bump":
        center = [0.5] * grid.dim if center is None else list(center)
        kappa = 2.0 / (2.0 * np.pi * width) ** 2
        prof = np.ones(grid.shape)
        for a in range(grid.dim):
            prof = prof * np.exp(kappa * (np.cos(2 * np.pi * (c[a] - center[a])) - 1.0))
        return ScalarField.smooth(grid, amplitude * prof)
    raise ValueError(f"unknown density recipe '{kind}'")


def _plateau_potential(grid: PeriodicGrid, amplitude: float, steepness: float) -> np.ndarray:
    c = grid.coords()
    return amplitude * np.tanh(steepness * np.sin(2 * np.pi * c[0])) / np.tanh(steepness)


def plateau_oracle_potential(grid: PeriodicGrid, amplitude: float, steepness: float = 8.0) -> np.ndarray:
    """The potential the plateau recipe is engineered to reproduce (mean zero)."""
    psi = _plateau_potential(grid, amplitude, steepness)
    return psi - np.mean(psi)


def make_reference_two_form(grid: PeriodicGrid, kind: str = "standard",
                            anti_part: float = 0.0, exact_part: float = 0.0) -> TwoFormField:
    """Closed reference 2-forms:

    'standard'  w0.
    'taming'    w0 + anti_part * Re(dz1^dz2) + exact_part * d(alpha) with a
                fixed trigonometric 1-form alpha: closed, tames J0, and the
                anti-invariant part makes it taming-only (not compatible).
    """
    W = constant_field(grid, _omega0_matrix(grid.complex_dim))
    if kind == "standard":
        return TwoFormField(grid, W)
    if kind == "taming":
        if grid.complex_dim != 2:
            raise ValueError("taming recipe needs T^4")
        B = np.zeros((4, 4))
        B[0, 2], B[2, 0] = 1.0, -1.0   # dx1 ^ dx2
        B[1, 3], B[3, 1] = -1.0, 1.0   # -dy1 ^ dy2
        W = W + anti_part * constant_field(grid, B)
        if exact_part != 0.0:
            from .forms import d_one_form

            c = grid.coords()
            alpha = np.zeros(grid.shape + (4,))
            alpha[..., 0] = np.sin(2 * np.pi * c[1]) * np.cos(2 * np.pi * c[2])
            alpha[..., 2] = np.cos(2 * np.pi * c[3]) * np.sin(2 * np.pi * c[0])
            W = W + exact_part * d_one_form(grid, alpha)
        form = TwoFormField.smooth(grid, W)
        J0 = standard_complex_structure(grid)
        if taming_margin(form, J0) <= 0.0:
            raise TamingError("taming recipe parameters too large: margin not positive")
        return form
    raise ValueError(f"unknown reference-form recipe '{kind}'")


def make_compatible_metric(grid: PeriodicGrid, kind: str = "euclidean",
                           amplitude: float = 0.3, closed: bool = True) -> MetricField:
    """J0-compatible target metrics for the harmonic-map experiments.

    'euclidean'  flat metric.
    'conformal'  e^{2u} g0 with a trigonometric u (Kahler on T^2; compatible
                 but non-Kahler on T^4).
    'kahler'     metric of w0 + i del delbar psi, psi trigonometric (closed).
    'hermitian'  metric of a Hermitian field Id/2 + perturbation whose
                 associated form is not closed (compatible non-Kahler data).
    The 'closed' flag picks 'kahler' vs 'hermitian' when callers iterate a
    family generically.
    """
    n = grid.complex_dim
    if kind == "euclidean":
        return euclidean_metric(grid)
    if kind in ("kahler", "hermitian") and not closed:
        kind = "hermitian"
    c = grid.coords()
    if kind == "conformal":
        u = amplitude * np.sin(2 * np.pi * c[0]) * np.cos(2 * np.pi * c[1])
        g = np.exp(2.0 * u)[..., None, None] * constant_field(grid, np.eye(grid.dim))
        return MetricField.smooth(grid, g)
    if kind == "kahler":
        from .forms import ddbar

        psi = amplitude * np.sin(2 * np.pi * c[0]) * np.cos(2 * np.pi * c[min(2, grid.dim - 1)])
        J0 = standard_complex_structure(grid)
        W = constant_field(grid, _omega0_matrix(n)) + ddbar(grid, psi, J0.values)
        return metric_from_pair(TwoFormField(grid, W), J0)
    if kind == "hermitian":
        H = np.zeros(grid.shape + (n, n), dtype=complex)
        for i in range(n):
            H[..., i, i] = 0.5
        H[..., 0, 0] = H[..., 0, 0] + 0.5 * amplitude * np.sin(2 * np.pi * c[0])
        if n == 2:
            H[..., 0, 1] = H[..., 0, 1] + 0.25 * amplitude * (
                np.sin(2 * np.pi * c[2]) + 1j * np.cos(2 * np.pi * c[1])
            )
            H[..., 1, 0] = np.conj(H[..., 0, 1])
        g = hermitian_to_real(H, n)
        return MetricField.smooth(grid, g)
    raise ValueError(f"unknown metric recipe '{kind}'")
