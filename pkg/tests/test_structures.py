import numpy as np
import pytest

from cytorus import structures as st
from cytorus.errors import TamingError
from cytorus.fields import AlmostComplexField, MetricField, TwoFormField
from cytorus.grid import PeriodicGrid


@pytest.fixture
def t4():
    return PeriodicGrid(2, 12)


def test_standard_pair_gives_euclidean_metric(t4):
    w0 = st.standard_symplectic_form(t4)
    J0 = st.standard_complex_structure(t4)
    g = st.metric_from_pair(w0, J0)
    assert np.max(np.abs(g.values - np.eye(4))) <= 1e-14
    assert st.almost_hermitian_defect(g, J0) <= 1e-14


def test_taming_margin_signs(t4):
    w0 = st.standard_symplectic_form(t4)
    J0 = st.standard_complex_structure(t4)
    assert abs(st.taming_margin(w0, J0) - 1.0) <= 1e-14
    flipped = TwoFormField(t4, -w0.values)
    assert abs(st.taming_margin(flipped, J0) + 1.0) <= 1e-14
    with pytest.raises(TamingError):
        st.metric_from_pair(flipped, J0)


def test_taming_margin_matches_direction_scan():
    # eigenvalue route vs brute scan over unit directions at the worst point
    grid = PeriodicGrid(2, 12)
    W = st.make_reference_two_form(grid, "taming", anti_part=0.3, exact_part=0.1)
    J = st.make_complex_structure(grid, "twisted", amplitude=0.2)
    margin = st.taming_margin(W, J)
    assert margin > 0.0
    M = np.einsum("...am,...mb->...ab", W.values, J.values)
    S = 0.5 * (M + np.swapaxes(M, -1, -2))
    lam = np.linalg.eigvalsh(S)[..., 0]
    worst = np.unravel_index(np.argmin(lam), lam.shape)
    rng = np.random.default_rng(42)
    X = rng.standard_normal((20000, 4))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    vals = np.einsum("da,ab,db->d", X, M[worst], X)
    scan = float(np.min(vals))
    assert scan >= margin - 1e-12
    # polish the best sampled direction by minimizing the Rayleigh quotient
    from scipy.optimize import minimize

    Mw = M[worst]

    def rayleigh(v):
        return float(v @ Mw @ v) / float(v @ v)

    res = minimize(rayleigh, X[np.argmin(vals)], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    assert abs(res.fun - margin) <= 1e-9


def test_compatibility_defect_zero_for_compatible(t4):
    w0 = st.standard_symplectic_form(t4)
    J0 = st.standard_complex_structure(t4)
    assert st.compatibility_defect(w0, J0) <= 1e-14
    Jt = st.make_complex_structure(t4, "twisted", amplitude=0.3)
    # symplectic conjugation preserves w0-compatibility by construction
    assert st.compatibility_defect(w0, Jt) <= 1e-12


def test_compatibility_defect_counts_anti_part_twice(t4):
    J0 = st.standard_complex_structure(t4)
    W = st.make_reference_two_form(t4, "taming", anti_part=0.3)
    anti = W.values - st.invariant_two_form(W, J0).values
    assert abs(st.compatibility_defect(W, J0) - 2.0 * np.max(np.abs(anti))) <= 1e-12


def test_taming_only_metric_comes_from_invariant_part(t4):
    J0 = st.standard_complex_structure(t4)
    W = st.make_reference_two_form(t4, "taming", anti_part=0.3, exact_part=0.05)
    g_full = st.metric_from_pair(W, J0)
    g_inv = st.metric_from_pair(st.invariant_two_form(W, J0), J0)
    assert np.max(np.abs(g_full.values - g_inv.values)) <= 1e-12


def test_invariant_part_is_compatible_and_taming(t4):
    J0 = st.standard_complex_structure(t4)
    W = st.make_reference_two_form(t4, "taming", anti_part=0.3, exact_part=0.05)
    Winv = st.invariant_two_form(W, J0)
    assert st.compatibility_defect(Winv, J0) <= 1e-12
    assert st.taming_margin(Winv, J0) > 0.0


def test_nijenhuis_vanishes_for_constant_structures(t4):
    for kind in ("standard", "constant"):
        J = st.make_complex_structure(t4, kind)
        assert st.nijenhuis_max_norm(J) <= 1e-10


def test_nijenhuis_twisted_is_sizable(t4):
    J = st.make_complex_structure(t4, "twisted")
    assert st.nijenhuis_max_norm(J) >= 0.1


def test_nijenhuis_antisymmetry_and_j_relation():
    # the J-relation involves derivative products, so it holds up to the
    # spectral tail of J; resolution 16 puts that tail below 1e-9
    grid = PeriodicGrid(2, 16)
    J = st.make_complex_structure(grid, "twisted", amplitude=0.25)
    N = st.nijenhuis(J)
    assert np.max(np.abs(N + np.swapaxes(N, -1, -2))) <= 1e-11
    # N(JX, Y) = -J N(X, Y)
    lhs = np.einsum("...gmb,...ma->...gab", N, J.values)
    rhs = -np.einsum("...gm,...mab->...gab", J.values, N)
    assert np.max(np.abs(lhs - rhs)) <= 1e-8


def test_nijenhuis_finite_difference_oracle():
    # brute-force bracket evaluation on a coarse grid via FFT interpolation
    # of J along coordinate directions
    grid = PeriodicGrid(2, 16)
    J = st.make_complex_structure(grid, "twisted", amplitude=0.2)
    N = st.nijenhuis(J)
    h = 1e-5
    rng = np.random.default_rng(1)
    idx = tuple(rng.integers(0, 16, size=4))
    base = np.array([i / 16 for i in idx])

    def j_at(p):
        out = np.zeros((4, 4))
        for a in range(4):
            for b in range(4):
                out[a, b] = grid.evaluate_at(J.values[..., a, b], p[None, :])[0]
        return out

    for (a, b) in [(0, 1), (0, 3), (2, 3)]:
        ea, eb = np.eye(4)[a], np.eye(4)[b]
        Jp = j_at(base)

        def bracket(u_dir, v_field_dir):
            # [U, V] with U = u_dir constant, V = J e_{v_dir}: d/du of J column
            jp = j_at(base + h * u_dir) @ v_field_dir
            jm = j_at(base - h * u_dir) @ v_field_dir
            return (jp - jm) / (2 * h)

        # N(ea, eb) = [Jea, Jeb] - J[Jea, eb] - J[ea, Jeb] (coordinate fields)
        term1 = bracket(Jp @ ea, eb) - bracket(Jp @ eb, ea)
        term2 = -Jp @ (-bracket(eb, ea))
        term3 = -Jp @ (bracket(ea, eb))
        oracle = term1 + term2 + term3
        assert np.max(np.abs(N[idx][:, a, b] - oracle)) <= 2e-6


def test_traces_trivial_and_scaling(t4):
    g = st.euclidean_metric(t4)
    tr1, tr2 = st.traces(g, g)
    assert np.allclose(tr1, 4.0) and np.allclose(tr2, 4.0)
    lam = 1.7
    gl = MetricField(t4, lam * g.values)
    tr1, tr2 = st.traces(g, gl)
    assert np.allclose(tr1, 4 * lam) and np.allclose(tr2, 4 / lam)


def test_traces_random_point_oracle():
    grid = PeriodicGrid(1, 4)
    rng = np.random.default_rng(9)
    A = rng.standard_normal((2, 2))
    B = rng.standard_normal((2, 2))
    g1 = A @ A.T + 0.5 * np.eye(2)
    g2 = B @ B.T + 0.5 * np.eye(2)
    gf1 = MetricField(grid, st.constant_field(grid, g1))
    gf2 = MetricField(grid, st.constant_field(grid, g2))
    tr12, tr21 = st.traces(gf1, gf2)
    assert abs(tr12.flat[0] - np.trace(np.linalg.solve(g1, g2))) <= 1e-12
    assert abs(tr21.flat[0] - np.trace(np.linalg.solve(g2, g1))) <= 1e-12


def test_hermitian_roundtrip(t4):
    g = st.make_compatible_metric(t4, "hermitian", amplitude=0.3)
    h = st.real_to_hermitian(g.values, 2)
    back = st.hermitian_to_real(h, 2)
    assert np.max(np.abs(back - g.values)) <= 1e-12
    assert np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2)))) <= 1e-13


def test_twisted_j_squares_to_minus_one(t4):
    J = st.make_complex_structure(t4, "twisted", amplitude=0.35)
    JJ = np.einsum("...ij,...jk->...ik", J.values, J.values)
    assert np.max(np.abs(JJ + np.eye(4))) <= 1e-12


def test_j2_violation_rejected(t4):
    bad = np.broadcast_to(np.diag([1.0, -1.0, 1.0, -1.0]), t4.shape + (4, 4)).copy()
    with pytest.raises(ValueError):
        AlmostComplexField(t4, bad)
