"""Field containers: sampled scalars, 2-forms, metrics, endomorphisms.

Thin dataclasses around numpy arrays.  Grid axes come first, component axes
last, all indexed over the real coordinates (x1, y1, ..., xn, yn).  A 2-form
w is stored as the full antisymmetric matrix W with w(X, Y) = X^T W Y, i.e.
w = (1/2) W_ab dx^a ^ dx^b.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PositivityError
from .grid import PeriodicGrid


def _check_shape(grid, values, rank):
    want = grid.shape + (grid.dim,) * rank
    if values.shape != want:
        raise ValueError(f"expected shape {want}, got {values.shape}")


@dataclass
class ScalarField:
    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self):
        _check_shape(self.grid, self.values, 0)

    @classmethod
    def smooth(cls, grid, values, threshold=1e-6):
        grid.check_smooth(values, threshold, "scalar field")
        return cls(grid, values)


@dataclass
class TwoFormField:
    grid: PeriodicGrid
    values: np.ndarray  # (..., 2n, 2n), antisymmetric

    def __post_init__(self):
        _check_shape(self.grid, self.values, 2)
        skew = np.max(np.abs(self.values + np.swapaxes(self.values, -1, -2)))
        if skew > 1e-10 * max(1.0, float(np.max(np.abs(self.values)))):
            raise ValueError(f"2-form matrix is not antisymmetric (defect {skew:.2e})")

    @classmethod
    def smooth(cls, grid, values, threshold=1e-6):
        grid.check_smooth(values, threshold, "2-form")
        return cls(grid, values)


@dataclass
class MetricField:
    grid: PeriodicGrid
    values: np.ndarray  # (..., 2n, 2n), symmetric positive definite

    def __post_init__(self):
        _check_shape(self.grid, self.values, 2)
        sym = np.max(np.abs(self.values - np.swapaxes(self.values, -1, -2)))
        if sym > 1e-10 * max(1.0, float(np.max(np.abs(self.values)))):
            raise ValueError(f"metric matrix is not symmetric (defect {sym:.2e})")
        lam = np.linalg.eigvalsh(self.values)
        self.min_eigenvalue = float(np.min(lam))
        if self.min_eigenvalue <= 0.0:
            raise PositivityError(
                f"metric is not positive definite (min eigenvalue {self.min_eigenvalue:.3e})"
            )

    @classmethod
    def smooth(cls, grid, values, threshold=1e-6):
        grid.check_smooth(values, threshold, "metric")
        return cls(grid, values)


@dataclass
class EndomorphismField:
    grid: PeriodicGrid
    values: np.ndarray  # (..., 2n, 2n)

    def __post_init__(self):
        _check_shape(self.grid, self.values, 2)


@dataclass
class AlmostComplexField:
    """Almost complex structure J with J^2 = -Id enforced at construction."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self):
        _check_shape(self.grid, self.values, 2)
        eye = np.eye(self.grid.dim)
        defect = np.max(np.abs(np.einsum("...ij,...jk->...ik", self.values, self.values) + eye))
        if defect > 1e-12:
            raise ValueError(f"J^2 + Id exceeds round-off (defect {defect:.2e})")

    @classmethod
    def smooth(cls, grid, values, threshold=1e-6):
        grid.check_smooth(values, threshold, "almost complex structure")
        return cls(grid, values)
