"""Uniform periodic grids on the flat torus [0,1)^{2n} with Fourier calculus.

All fields live on tensor-product grids with the 2n real coordinates ordered
as (x1, y1, ..., xn, yn), where z_j = x_j + i y_j are the standard complex
coordinates.  Derivatives are spectral: exact for band-limited data, with the
Nyquist mode of odd-order symbols zeroed so that differentiation is a real,
skew-adjoint operator on the grid.  That choice makes summation by parts
exact, which the integral identities downstream rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SmoothnessError


@dataclass(frozen=True)
class PeriodicGrid:
    """Sampling grid for the torus [0,1)^{2n}, n complex dimensions.

    resolution is the number of points per axis.  Any even resolution >= 4 is
    accepted; powers of two are fastest.  (Acceptance studies use 12 and 24
    alongside 16 and 32, so the power-of-two restriction is advisory only.)
    """

    complex_dim: int
    resolution: int
    _wavenumbers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.complex_dim not in (1, 2):
            raise ValueError(f"complex_dim must be 1 or 2, got {self.complex_dim}")
        if self.resolution < 4 or self.resolution % 2 != 0:
            raise ValueError(f"resolution must be even and >= 4, got {self.resolution}")
        k = 2.0 * np.pi * np.fft.fftfreq(self.resolution, d=1.0 / self.resolution)
        k[self.resolution // 2] = 0.0  # zero Nyquist: keeps d real and skew-adjoint
        object.__setattr__(self, "_wavenumbers", k)

    @property
    def dim(self) -> int:
        return 2 * self.complex_dim

    @property
    def shape(self) -> tuple:
        return (self.resolution,) * self.dim

    @property
    def spacing(self) -> float:
        return 1.0 / self.resolution

    @property
    def num_points(self) -> int:
        return self.resolution ** self.dim

    def coords(self) -> list:
        """Coordinate arrays, one per axis, each of full grid shape."""
        ax = np.arange(self.resolution) / self.resolution
        return list(np.meshgrid(*([ax] * self.dim), indexing="ij"))

    # -- spectral calculus -------------------------------------------------

    def deriv(self, values: np.ndarray, axis: int) -> np.ndarray:
        """Partial derivative along a coordinate axis by Fourier differentiation.

        Component axes (anything beyond the first 2n) ride along untouched.
        """
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for dimension {self.dim}")
        vhat = np.fft.fft(values, axis=axis)
        kshape = [1] * values.ndim
        kshape[axis] = self.resolution
        vhat *= (1j * self._wavenumbers).reshape(kshape)
        out = np.fft.ifft(vhat, axis=axis)
        if np.isrealobj(values):
            return np.ascontiguousarray(out.real)
        return out

    def gradient(self, f: np.ndarray) -> np.ndarray:
        """All 2n partials of a scalar field, stacked on a trailing axis."""
        return np.stack([self.deriv(f, a) for a in range(self.dim)], axis=-1)

    def integrate(self, f: np.ndarray):
        """Integral over the unit torus (grid quadrature = mean, volume 1).

        Component axes, if any, survive: the result is a scalar for scalar
        fields and an array of the component shape otherwise.
        """
        out = np.mean(f, axis=tuple(range(self.dim)))
        if out.ndim == 0:
            return float(out) if np.isrealobj(f) else complex(out)
        return out

    def mean_zero(self, f: np.ndarray) -> np.ndarray:
        return f - np.mean(f)

    def drop_nyquist(self, f: np.ndarray) -> np.ndarray:
        """Zero the Nyquist modes on every axis (the derivative's kernel).

        Linear solves project onto this subspace so their right-hand sides
        stay in the range of the spectral operators.
        """
        fhat = np.fft.fftn(f, axes=tuple(range(self.dim)))
        ny = self.resolution // 2
        for a in range(self.dim):
            sl = [slice(None)] * f.ndim
            sl[a] = ny
            fhat[tuple(sl)] = 0.0
        out = np.fft.ifftn(fhat, axes=tuple(range(self.dim)))
        return out.real if np.isrealobj(f) else out

    def solve_flat_poisson(self, rhs: np.ndarray) -> np.ndarray:
        """Mean-zero solution of the flat Laplace equation  sum_a d^2 u = rhs.

        The DC mode of rhs is discarded (solvability on the torus).
        """
        rhat = np.fft.fftn(rhs, axes=tuple(range(self.dim)))
        k2 = np.zeros(self.shape)
        full = 2.0 * np.pi * np.fft.fftfreq(self.resolution, d=1.0 / self.resolution)
        for a in range(self.dim):
            kshape = [1] * self.dim
            kshape[a] = self.resolution
            k2 = k2 + (full.reshape(kshape)) ** 2
        k2flat = k2.copy()
        k2flat[(0,) * self.dim] = 1.0
        uhat = -rhat / k2flat
        uhat[(0,) * self.dim] = 0.0
        u = np.fft.ifftn(uhat, axes=tuple(range(self.dim)))
        return u.real if np.isrealobj(rhs) else u

    # -- spectral hygiene --------------------------------------------------

    def top_band_energy_fraction(self, f: np.ndarray) -> float:
        """Fraction of spectral energy in the top quarter of the frequency range.

        The band is |k_a| >= 3N/8 on any axis (the top quarter of [0, N/2]).
        Component axes are pooled.
        """
        fhat = np.fft.fftn(f, axes=tuple(range(self.dim)))
        power = np.abs(fhat) ** 2
        total = float(np.sum(power))
        if total == 0.0:
            return 0.0
        idx = np.fft.fftfreq(self.resolution) * self.resolution  # integer modes
        hot = np.abs(idx) >= 3 * self.resolution / 8
        mask = np.zeros(self.shape, dtype=bool)
        for a in range(self.dim):
            kshape = [1] * self.dim
            kshape[a] = self.resolution
            mask |= hot.reshape(kshape)
        return float(np.sum(power[mask])) / total

    def check_smooth(self, f: np.ndarray, threshold: float = 1e-6, what: str = "field"):
        frac = self.top_band_energy_fraction(f)
        if frac > threshold:
            raise SmoothnessError(
                f"{what}: top-quarter spectral band holds {frac:.3e} of the energy "
                f"(threshold {threshold:.1e}); raise the resolution or smooth the recipe"
            )

    def evaluate_at(self, f: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Evaluate the trigonometric interpolant of a scalar field at points.

        points: (..., 2n) array of torus coordinates.  Direct Fourier-series
        summation over modes |k| < N/2 (Nyquist dropped, matching the
        derivative convention); intended for modest grids, e.g. map
        composition on T^2.
        """
        fhat = np.fft.fftn(f, axes=tuple(range(self.dim))) / self.num_points
        modes = np.fft.fftfreq(self.resolution) * self.resolution
        keep = np.abs(modes) < self.resolution // 2
        grids = np.meshgrid(*([modes] * self.dim), indexing="ij")
        masks = np.meshgrid(*([keep] * self.dim), indexing="ij")
        mask = np.logical_and.reduce(masks).ravel()
        kvecs = np.stack([gg.ravel() for gg in grids], axis=-1)[mask]
        coeffs = fhat.reshape(self.num_points)[mask]
        pts = points.reshape(-1, self.dim)
        out = np.zeros(len(pts), dtype=complex)
        chunk = 2048
        for lo in range(0, len(pts), chunk):
            ph = pts[lo : lo + chunk] @ kvecs.T
            out[lo : lo + chunk] = np.exp(2j * np.pi * ph) @ coeffs
        out = out.reshape(points.shape[:-1])
        return out.real if np.isrealobj(f) else out


class ChartGrid:
    """Small non-periodic Cartesian patch with finite-difference derivatives.

    Supports the single-chart curvature evaluations (e.g. the Fubini-Study
    golden test): only quantities at the center point are trustworthy, since
    the 6th-order central stencils wrap around the patch edges.
    """

    ORDER6 = np.array([-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60])

    def __init__(self, complex_dim: int, points_per_axis: int = 17, half_width: float = 0.16):
        if points_per_axis % 2 == 0 or points_per_axis < 15:
            raise ValueError("points_per_axis must be odd and >= 15")
        self.complex_dim = complex_dim
        self.dim = 2 * complex_dim
        self.resolution = points_per_axis
        self.spacing = 2.0 * half_width / (points_per_axis - 1)
        self.half_width = half_width

    @property
    def shape(self) -> tuple:
        return (self.resolution,) * self.dim

    @property
    def center(self) -> tuple:
        return ((self.resolution - 1) // 2,) * self.dim

    def coords(self) -> list:
        ax = np.linspace(-self.half_width, self.half_width, self.resolution)
        return list(np.meshgrid(*([ax] * self.dim), indexing="ij"))

    def deriv(self, values: np.ndarray, axis: int) -> np.ndarray:
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for dimension {self.dim}")
        out = np.zeros_like(values)
        for s, c in zip(range(-3, 4), self.ORDER6):
            if c != 0.0:
                out += c * np.roll(values, -s, axis=axis)
        return out / self.spacing

    def gradient(self, f: np.ndarray) -> np.ndarray:
        return np.stack([self.deriv(f, a) for a in range(self.dim)], axis=-1)
