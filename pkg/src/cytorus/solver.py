"""Continuity-method solver for the Calabi-Yau equation on flat tori.

Solves  wt^n = e^{tF + c_t} w^n  over t in [0, 1] for a potential phi with
wt = w0 + i del delbar phi, marching t through a schedule with damped Newton
iterations warm-started from the previous step.  The density exponent is
normalized so that e^F w^n and w^n have equal total volume, which makes
c_0 = c_1 = 0.

The Monge-Ampere operator is evaluated as the top-density ratio wt^n / w^n
(the volume-form ratio; its square is the ratio of the real metric
determinants).  Its exact Frechet derivative is
    delta -> n wt^{n-1} ^ (i del delbar delta) / w^n,
which equals (wt^n/w^n) (Lap_wt delta)/2, so each Newton step is an inner
linear solve preconditioned by the flat spectral Laplacian.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GaugeError, PositivityError, ScheduleError
from .fields import MetricField, ScalarField, TwoFormField
from .forms import ddbar, top_density, wedge_top_pair
from .grid import PeriodicGrid
from .operators import laplace_beltrami, metric_volume_density, solve_mean_zero
from .structures import metric_from_pair, standard_complex_structure, standard_symplectic_form

DAMPING_FLOOR = 2.0**-20


@dataclass
class CYProblem:
    grid: PeriodicGrid
    F: ScalarField                      # density exponent, normalized on construction
    schedule: list = field(default_factory=lambda: [0.0, 0.5, 1.0])
    tol_residual: float = 1e-11
    tol_newton: float = 1e-11
    max_newton: int = 30

    def __post_init__(self):
        if self.tol_residual <= 0 or self.tol_newton <= 0:
            raise ValueError("tolerances must be positive")
        if self.schedule[0] != 0.0 or self.schedule[-1] != 1.0 or any(
            b <= a for a, b in zip(self.schedule, self.schedule[1:])
        ):
            raise ValueError("schedule must increase from 0 to 1")
        self.F = normalize_density(self.F)
        self.omega = standard_symplectic_form(self.grid)
        self.J = standard_complex_structure(self.grid)
        self._base_density = top_density(self.grid, self.omega.values)

    # density of wt^n relative to w^n for the current potential
    def density_ratio(self, W: np.ndarray) -> np.ndarray:
        return top_density(self.grid, W) / self._base_density

    def corrected_form(self, phi: np.ndarray) -> np.ndarray:
        return self.omega.values + ddbar(self.grid, phi, self.J.values)


@dataclass
class CYSolution:
    problem: CYProblem
    phi: np.ndarray          # mean-zero gauge
    trace_path: list
    final_residual: float

    def __post_init__(self):
        self.omega_tilde = TwoFormField(self.problem.grid, self.problem.corrected_form(self.phi))
        self.metric = metric_from_pair(self.omega_tilde, self.problem.J)

    @property
    def grid(self):
        return self.problem.grid

    def volume_defect(self) -> float:
        grid = self.grid
        v0 = grid.integrate(top_density(grid, self.problem.omega.values))
        v1 = grid.integrate(top_density(grid, self.omega_tilde.values))
        return abs(v1 - v0) / abs(v0)


def normalize_density(F: ScalarField) -> ScalarField:
    """Shift F by a constant so that the mean of e^F is exactly 1 in quadrature."""
    shift = np.log(F.grid.integrate(np.exp(F.values)))
    return ScalarField(F.grid, F.values - shift)


def c_of_t(F: ScalarField, t: float) -> float:
    """Normalizing constant: e^{-c_t} = mean of e^{tF}; c_0 = c_1 = 0 when F
    is normalized."""
    if t == 0.0:
        return 0.0
    return -float(np.log(F.grid.integrate(np.exp(t * F.values))))


def ma_residual(phi: np.ndarray, t: float, problem: CYProblem) -> np.ndarray:
    """Pointwise Monge-Ampere residual  wt^n/w^n - e^{tF + c_t}.

    Raises PositivityError when the corrected form stops taming J (the
    continuity step was too large).
    """
    W = problem.corrected_form(phi)
    _require_positive(problem, W)
    ct = c_of_t(problem.F, t)
    return problem.density_ratio(W) - np.exp(t * problem.F.values + ct)


def _require_positive(problem: CYProblem, W: np.ndarray):
    M = np.einsum("...am,...mb->...ab", W, problem.J.values)
    lam = np.linalg.eigvalsh(0.5 * (M + np.swapaxes(M, -1, -2)))
    if float(lam[..., 0].min()) <= 0.0:
        raise PositivityError("corrected form lost positivity")


def _min_metric_eig(problem: CYProblem, W: np.ndarray) -> float:
    M = np.einsum("...am,...mb->...ab", W, problem.J.values)
    lam = np.linalg.eigvalsh(0.5 * (M + np.swapaxes(M, -1, -2)))
    return float(lam[..., 0].min())


def linearized_apply(problem: CYProblem, W: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Exact Frechet derivative of the density ratio at the form W:
    delta -> n W^{n-1} ^ (i del delbar delta) / w^n."""
    grid = problem.grid
    dd = ddbar(grid, delta, problem.J.values)
    if grid.dim == 2:
        return top_density(grid, dd) / problem._base_density
    return 2.0 * wedge_top_pair(grid, W, dd) / problem._base_density


def newton_step(phi: np.ndarray, t: float, problem: CYProblem, rtol: float = 1e-12):
    """One damped Newton update for (*)_t; returns (phi_new, info dict).

    The correction solves the linearized equation in the mean-zero gauge by
    flat-spectral preconditioned GMRES; the step is halved until positivity
    and residual decrease both hold (floor 2^-20).
    """
    grid = problem.grid
    r = ma_residual(phi, t, problem)
    rnorm = float(np.max(np.abs(r)))
    W = problem.corrected_form(phi)
    scale = float(np.mean(problem.density_ratio(W)))

    def apply_op(d):
        return linearized_apply(problem, W, d)

    def precond(x):
        return grid.solve_flat_poisson(x) * (2.0 / scale)

    delta = solve_mean_zero(grid, apply_op, r, precond, rtol=rtol)

    lam = 1.0
    while True:
        cand = grid.mean_zero(phi - lam * delta)
        Wc = problem.corrected_form(cand)
        if _min_metric_eig(problem, Wc) > 0.0:
            rc = problem.density_ratio(Wc) - np.exp(
                t * problem.F.values + c_of_t(problem.F, t)
            )
            rcn = float(np.max(np.abs(rc)))
            if rcn < rnorm or rcn <= problem.tol_newton:
                return cand, {"residual": rcn, "damping": lam, "step_inf": float(np.max(np.abs(lam * delta)))}
        lam *= 0.5
        if lam < DAMPING_FLOOR:
            raise PositivityError("damping floor reached without acceptable step")


def solve_at_t(phi: np.ndarray, t: float, problem: CYProblem):
    """Newton iterations at fixed t until the max-norm residual meets tol."""
    info_list = []
    for _ in range(problem.max_newton):
        r = float(np.max(np.abs(ma_residual(phi, t, problem))))
        if r <= problem.tol_newton:
            return phi, r, info_list
        rtol = max(1e-13, min(1e-3, 0.05 * r))
        phi, info = newton_step(phi, t, problem, rtol=rtol)
        info_list.append(info)
    r = float(np.max(np.abs(ma_residual(phi, t, problem))))
    if r <= problem.tol_newton:
        return phi, r, info_list
    raise ScheduleError(f"Newton did not converge at t={t} (residual {r:.3e})")


def continuity_solve(problem: CYProblem, phi0: np.ndarray | None = None,
                     start_t: float = 0.0) -> CYSolution:
    """March t through the schedule, warm starting each step.

    On Newton failure the t-step is bisected (down to 1/1024 of the unit
    interval); exhausting that raises ScheduleError carrying the last good t.
    """
    grid = problem.grid
    phi = np.zeros(grid.shape) if phi0 is None else grid.mean_zero(phi0.copy())
    trace = []
    t_now = start_t
    targets = [t for t in problem.schedule if t > t_now]
    if t_now == 0.0 and phi0 is None:
        # t = 0 is solved by phi = 0 exactly; record it
        trace.append(_step_record(problem, 0.0, phi, 0.0, []))
    while targets:
        t_next = targets[0]
        try:
            phi_new, res, infos = solve_at_t(phi.copy(), t_next, problem)
        except (PositivityError, ScheduleError):
            if t_next - t_now < 1.0 / 1024.0:
                raise ScheduleError(
                    f"continuity path stalled: last good t = {t_now:.6f}"
                ) from None
            targets.insert(0, 0.5 * (t_now + t_next))
            continue
        phi = phi_new
        trace.append(_step_record(problem, t_next, phi, res, infos))
        t_now = t_next
        targets.pop(0)
    final = float(np.max(np.abs(ma_residual(phi, 1.0, problem))))
    return CYSolution(problem, phi, trace, final)


def _step_record(problem, t, phi, res, infos):
    W = problem.corrected_form(phi)
    return {
        "t": t,
        "c_t": c_of_t(problem.F, t),
        "iterations": len(infos),
        "residual": res,
        "min_metric_eig": _min_metric_eig(problem, W),
        "volume_ratio_defect": abs(
            problem.grid.integrate(problem.density_ratio(W)) - 1.0
        ),
        "damping": [i["damping"] for i in infos],
    }


# -- uniqueness mechanism ------------------------------------------------------

def uniqueness_wedge_identity(w1: TwoFormField, w2: TwoFormField, J, top_tol: float = 1e-8):
    """Pointwise check of (w1 - w2)^2 = w1^2 (2 - (lambda + 1/lambda)).

    Both forms must be compatible with J and share their top power (checked
    against top_tol).  lambda is the larger simultaneous eigenvalue of the
    two Hermitian forms.  Returns a dict with the identity residual, the
    wedge ratio field, and max |lambda - 1| for uniqueness audits.
    """
    grid = w1.grid
    if grid.dim != 4:
        raise ValueError("the wedge identity is a T^4 (n=2) statement")
    d1 = top_density(grid, w1.values)
    d2 = top_density(grid, w2.values)
    top_gap = float(np.max(np.abs(d1 - d2) / np.abs(d1)))
    if top_gap > top_tol:
        raise GaugeError(f"top powers differ pointwise by {top_gap:.3e} > {top_tol:.1e}")

    g1 = metric_from_pair(w1, J)
    g2m = np.einsum("...am,...mb->...ab", w2.values, J.values)
    g2 = 0.5 * (g2m + np.swapaxes(g2m, -1, -2))
    # simultaneous diagonalization: eigenvalues of L^{-1} g2 L^{-T} for
    # g1 = L L^T come in pairs (lam, lam), (1/lam, 1/lam) when tops agree
    L = np.linalg.cholesky(g1.values)
    mid = np.linalg.solve(L, g2)
    mid = np.linalg.solve(L, np.swapaxes(mid, -1, -2))
    lam_all = np.linalg.eigvalsh(mid)
    lam = lam_all[..., -1]
    diff = TwoFormField(grid, w1.values - w2.values)
    lhs = top_density(grid, diff.values) / d1
    rhs = 2.0 - (lam + 1.0 / lam)
    return {
        "identity_residual": float(np.max(np.abs(lhs - rhs))),
        "wedge_ratio": lhs,
        "lambda_max_dev": float(np.max(np.abs(lam_all - 1.0))),
        "top_gap": top_gap,
    }


def recover_potential(w_t: TwoFormField, g_t: MetricField, g_O: MetricField,
                      rtol: float = 1e-12, mean_tol: float = 1e-8) -> np.ndarray:
    """Solve  Lap_{g_t} phi = 2n - tr_{g_t} g_O  with sup phi = 0.

    The right side must have mean zero against the g_t volume (this is the
    trace identity at work); a violation signals inconsistent inputs.
    """
    grid = w_t.grid
    ginv = np.linalg.inv(g_t.values)
    sqrtG = metric_volume_density(g_t.values)
    rhs = 2.0 * grid.complex_dim - np.einsum("...ab,...ab->...", ginv, g_O.values)
    wmean = grid.integrate(rhs * sqrtG) / grid.integrate(sqrtG)
    if abs(wmean) > mean_tol:
        raise GaugeError(f"weighted mean of the trace defect is {wmean:.3e}; "
                         "the compatibility identity looks broken")
    rhs = rhs - wmean

    def apply_op(f):
        return laplace_beltrami(grid, g_t.values, f, ginv=ginv, sqrtG=sqrtG)

    def precond(x):
        return grid.solve_flat_poisson(x)

    phi = solve_mean_zero(grid, apply_op, rhs, precond, rtol=rtol)
    return phi - float(np.max(phi))
