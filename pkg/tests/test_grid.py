import numpy as np
import pytest

from cytorus.errors import SmoothnessError
from cytorus.grid import ChartGrid, PeriodicGrid


def test_grid_invariants():
    g = PeriodicGrid(2, 16)
    assert g.dim == 4
    assert g.num_points == 16**4
    assert g.spacing == 1.0 / 16
    with pytest.raises(ValueError):
        PeriodicGrid(3, 16)
    with pytest.raises(ValueError):
        PeriodicGrid(1, 7)


def test_spectral_derivative_band_limited_exact():
    g = PeriodicGrid(1, 32)
    x, y = g.coords()
    f = np.sin(2 * np.pi * x)
    df = g.deriv(f, 0)
    assert np.max(np.abs(df - 2 * np.pi * np.cos(2 * np.pi * x))) <= 1e-12


def test_spectral_derivative_constant_is_zero():
    g = PeriodicGrid(1, 16)
    f = np.full(g.shape, 3.7)
    assert np.max(np.abs(g.deriv(f, 0))) <= 1e-13
    assert np.max(np.abs(g.deriv(f, 1))) <= 1e-13


def test_spectral_derivative_analytic_oracle():
    # d/dx exp(sin(2 pi x)) = 2 pi cos(2 pi x) exp(sin(2 pi x))
    g = PeriodicGrid(1, 64)
    x, _ = g.coords()
    f = np.exp(np.sin(2 * np.pi * x))
    exact = 2 * np.pi * np.cos(2 * np.pi * x) * f
    assert np.max(np.abs(g.deriv(f, 0) - exact)) <= 1e-10


def test_spectral_derivative_axis_out_of_range():
    g = PeriodicGrid(1, 8)
    with pytest.raises(ValueError):
        g.deriv(np.zeros(g.shape), 2)


def test_refinement_reduces_error_tenfold():
    errs = []
    for res in (8, 16):
        g = PeriodicGrid(1, res)
        x, _ = g.coords()
        f = np.exp(np.sin(2 * np.pi * x))
        exact = 2 * np.pi * np.cos(2 * np.pi * x) * f
        errs.append(np.max(np.abs(g.deriv(f, 0) - exact)))
    assert errs[0] / max(errs[1], 1e-300) >= 10.0


def test_integrate_oscillation_vanishes():
    g = PeriodicGrid(1, 32)
    x, _ = g.coords()
    assert abs(g.integrate(1.0 + np.sin(2 * np.pi * x)) - 1.0) <= 1e-12


def test_summation_by_parts_is_exact():
    # the discrete pairing sum (du) v = - sum u (dv) holds to round-off,
    # independent of aliasing; the integral identities downstream rely on it
    g = PeriodicGrid(1, 16)
    rng = np.random.default_rng(0)
    u = rng.standard_normal(g.shape)
    v = rng.standard_normal(g.shape)
    lhs = np.sum(g.deriv(u, 0) * v)
    rhs = -np.sum(u * g.deriv(v, 0))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_flat_poisson_solver():
    g = PeriodicGrid(1, 32)
    x, y = g.coords()
    u_exact = np.sin(2 * np.pi * x) * np.cos(4 * np.pi * y)
    rhs = -(4 * np.pi**2 + 16 * np.pi**2) * u_exact
    u = g.solve_flat_poisson(rhs)
    assert np.max(np.abs(u - u_exact)) <= 1e-12


def test_smoothness_gate():
    g = PeriodicGrid(1, 16)
    x, _ = g.coords()
    smooth = np.sin(2 * np.pi * x)
    g.check_smooth(smooth)
    rng = np.random.default_rng(1)
    rough = rng.standard_normal(g.shape)
    with pytest.raises(SmoothnessError):
        g.check_smooth(rough)


def test_fourier_evaluation_matches_grid_and_offgrid():
    g = PeriodicGrid(1, 32)
    x, y = g.coords()
    f = np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y) + 0.3 * np.cos(4 * np.pi * y)
    pts = np.array([[0.11, 0.765], [0.5, 0.25], [0.03125, 0.0]])
    vals = g.evaluate_at(f, pts)
    exact = (
        np.sin(2 * np.pi * pts[:, 0]) * np.cos(2 * np.pi * pts[:, 1])
        + 0.3 * np.cos(4 * np.pi * pts[:, 1])
    )
    assert np.max(np.abs(vals - exact)) <= 1e-12


def test_chart_grid_derivative_order():
    ch = ChartGrid(1, points_per_axis=17, half_width=0.16)
    xs, ys = ch.coords()
    f = np.exp(xs) * np.cos(ys)
    df = ch.deriv(f, 0)
    c = ch.center
    assert abs(df[c] - 1.0) <= 1e-9
