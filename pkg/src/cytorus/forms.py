"""Exterior calculus on periodic fields: d, wedge, J-action, i del delbar.

Conventions.  A 2-form is the antisymmetric matrix W with w(X,Y) = X^T W Y.
J acts on 1-forms by duality, (J a)(X) = a(JX).  With the standard complex
structure this gives the operator identity

    i del delbar f = -(1/2) d(J df),

which is how the solver assembles its Kahler correction in real coordinates.
Top-degree densities are taken relative to dx^1 ^ dy^1 ^ ... ^ dx^n ^ dy^n.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import DegreeError


def d_scalar(grid, f: np.ndarray) -> np.ndarray:
    """Exterior derivative of a scalar: the 1-form of partials."""
    return grid.gradient(f)


def d_one_form(grid, alpha: np.ndarray) -> np.ndarray:
    """(d alpha)_ab = da alpha_b - db alpha_a as an antisymmetric matrix."""
    dim = grid.dim
    out = np.zeros(alpha.shape + (dim,), dtype=alpha.dtype)
    for a in range(dim):
        out[..., a, :] = grid.deriv(alpha, a)
    return out - np.swapaxes(out, -1, -2)


def d_two_form(grid, W: np.ndarray):
    """Exterior derivative of a 2-form.

    Returns (combos, values) where combos lists the strictly increasing index
    triples and values has one trailing axis per triple:
    (dW)_abc = da W_bc + db W_ca + dc W_ab.
    """
    dim = grid.dim
    if dim < 3:
        return [], np.zeros(W.shape[: -2] + (0,), dtype=W.dtype)
    combos = list(combinations(range(dim), 3))
    parts = []
    for (a, b, c) in combos:
        parts.append(
            grid.deriv(W[..., b, c], a)
            + grid.deriv(W[..., c, a], b)
            + grid.deriv(W[..., a, b], c)
        )
    return combos, np.stack(parts, axis=-1)


def d_two_form_max_norm(grid, W: np.ndarray) -> float:
    _, vals = d_two_form(grid, W)
    return 0.0 if vals.size == 0 else float(np.max(np.abs(vals)))


def wedge_one_one(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Wedge of two 1-forms as an antisymmetric matrix."""
    outer = a[..., :, None] * b[..., None, :]
    return outer - np.swapaxes(outer, -1, -2)


def pfaffian4(W: np.ndarray) -> np.ndarray:
    """Pfaffian of a 4x4 antisymmetric matrix field."""
    return (
        W[..., 0, 1] * W[..., 2, 3]
        - W[..., 0, 2] * W[..., 1, 3]
        + W[..., 0, 3] * W[..., 1, 2]
    )


def top_density(grid, W: np.ndarray) -> np.ndarray:
    """Density of the top power w^n against the coordinate volume.

    n=1: the single component; n=2: w^2 = 2 Pf(W) vol.
    """
    if grid.dim == 2:
        return W[..., 0, 1]
    if grid.dim == 4:
        return 2.0 * pfaffian4(W)
    raise DegreeError(f"unsupported dimension {grid.dim}")


def wedge_top_pair(grid, W1: np.ndarray, W2: np.ndarray) -> np.ndarray:
    """Density of w1 ^ w2 (top degree on T^4; errors on T^2)."""
    if grid.dim != 4:
        raise DegreeError("w1 ^ w2 exceeds the top degree unless 2n = 4")
    return pfaffian4(W1 + W2) - pfaffian4(W1) - pfaffian4(W2)


def integrate_top(grid, W: np.ndarray) -> float:
    """Integral of a top form given as a 2-form to wedge into the volume."""
    return grid.integrate(top_density(grid, W))


def j_on_one_form(J: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """(J alpha)_b = alpha_m J^m_b."""
    return np.einsum("...mb,...m->...b", J, alpha)


def j_pullback_two_form(J: np.ndarray, W: np.ndarray) -> np.ndarray:
    """The 2-form (X,Y) -> w(JX, JY), i.e. J^T W J."""
    return np.einsum("...ma,...mn,...nb->...ab", J, W, J)


def one_one_part(W: np.ndarray, J: np.ndarray) -> np.ndarray:
    """J-invariant part (1/2)(w + w(J., J.)); idempotent projector."""
    return 0.5 * (W + j_pullback_two_form(J, W))


def anti_invariant_part(W: np.ndarray, J: np.ndarray) -> np.ndarray:
    """The (2,0)+(0,2) component, complementary to one_one_part."""
    return 0.5 * (W - j_pullback_two_form(J, W))


def ddbar(grid, f: np.ndarray, J: np.ndarray) -> np.ndarray:
    """i del delbar f = -(1/2) d(J df) as a real 2-form matrix."""
    alpha = j_on_one_form(J, grid.gradient(f))
    return -0.5 * d_one_form(grid, alpha)


def d_j_d(grid, f: np.ndarray, J: np.ndarray) -> np.ndarray:
    """The 2-form d(J df); equals -2 i del delbar f for integrable J."""
    return d_one_form(grid, j_on_one_form(J, grid.gradient(f)))


def eval_form(W: np.ndarray, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Evaluate a 2-form matrix on (possibly complex) vector fields."""
    return np.einsum("...a,...ab,...b->...", X, W, Y)
