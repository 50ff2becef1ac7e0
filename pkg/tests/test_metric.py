from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quasilocal.band import BandMatrix, quasi_hermiticity_residual
from quasilocal.lattice import free_laplacian, multiparam, point_defect
from quasilocal.metric import (
    SingularMetricSystem,
    SpectralSingularityError,
    asymptotic_locality_report,
    closed_form_theta,
    cross_demo,
    diagonal_multiparam_metric,
    positivity_check,
    solve_band_metric,
    superpose,
    table_one,
)

couplings = st.fractions(min_value=-F(19, 20), max_value=F(19, 20), max_denominator=20)


def dense_residual(H, T):
    """Oracle: H^T T - T H from dense Fraction arrays, no band arithmetic."""
    h, t = H.to_dense(), T.to_dense()
    return h.T.dot(t) - t.dot(h)


def theta_gamma(g, gamma, N):
    return superpose([(2, closed_form_theta(1, g, N)), (gamma, closed_form_theta(2, g, N))])


def test_table_one():
    g = F(1, 2)
    row = table_one(1, g)
    assert (row.corner, row.wedge) == (F(3, 2), F(3, 4))
    assert row.central == table_one(2, g).corner / (1 - g)
    row2 = table_one(2, g)
    assert (row2.corner, row2.wedge) == (F(3, 4), F(3, 8))
    for k in range(1, 5):
        r = table_one(k, F(0))
        assert r.corner == r.wedge == r.central == 1


def test_closed_form_examples():
    g = F(1, 3)
    T1 = closed_form_theta(1, g, 4).matrix
    assert T1[0, 0] == 2 and T1.offsets == (0,)
    assert all(T1[i, i] == 1 for i in T1.sites if i != 0)
    T2 = closed_form_theta(2, F(1, 2), 4).matrix
    assert [T2[i, i + 1] for i in range(-3, 3)] == [1, 1, F(3, 2), F(3, 2), 1, 1]
    assert T2.offsets == (-1, 1)
    T3 = closed_form_theta(3, g, 6).matrix
    assert T3[0, 0] == F(14, 9)
    T7 = closed_form_theta(7, F(1, 2), 14).matrix
    gg = F(1, 2)
    e = (1 + gg) * (1 - 2 * gg * gg) ** 2
    assert [T7[0, j] for j in (-6, -4, -2, 2, 4, 6)] == [1 + gg, (1 + gg) * (1 - 2 * gg * gg), e,
                                                         e, (1 + gg) * (1 - 2 * gg * gg), 1 + gg]
    assert T7.offsets == (-6, -4, -2, 0, 2, 4, 6)


def test_closed_form_errors():
    with pytest.raises(SpectralSingularityError):
        closed_form_theta(1, F(1), 4)
    with pytest.raises(SpectralSingularityError):
        closed_form_theta(3, F(-3, 2), 8)
    with pytest.raises(ValueError):
        closed_form_theta(4, F(1, 2), 7)


def test_residual_against_dense_oracle():
    g = F(1, 2)
    for R in (1, 2, 5):
        N = 2 * R + 4
        H, T = point_defect(g, N).matrix, closed_form_theta(R, g, N).matrix
        dense = dense_residual(H, T)
        band = quasi_hermiticity_residual(H, T).matrix.to_dense()
        assert np.array_equal(dense, band)
        m = 1 + R - 1
        inner = dense[m:-m, m:-m]
        assert all(v == 0 for v in inner.flat)


@given(couplings, st.integers(min_value=1, max_value=8))
def test_residual_vanishes(g, R):
    N = 2 * R + 4
    res = quasi_hermiticity_residual(point_defect(g, N).matrix, closed_form_theta(R, g, N).matrix)
    assert res.interior_max_abs == 0


@given(couplings)
def test_metric_symmetries(g):
    for R in (1, 2, 3, 4):
        M = closed_form_theta(R, g, 2 * R + 2).matrix
        assert all(M[j, i] == v and M[-i, -j] == v for (i, j), v in M.items())
        assert set(M.offsets) == set(range(-(R - 1), R, 2))


def test_hermitian_limit():
    for R in range(1, 6):
        M = closed_form_theta(R, F(0), 2 * R + 4).matrix
        assert all(v == 1 for _, v in M.items())
        assert quasi_hermiticity_residual(free_laplacian(2 * R + 4).matrix, M).vanishes


def test_solver_examples():
    s = solve_band_metric(point_defect(F(1, 3), 6), 1)
    assert s.matrix[0, 0] == 2
    assert solve_band_metric(free_laplacian(6), 1).matrix == BandMatrix.identity(6)
    for R in range(1, 7):
        g = F(2, 7)
        N = 2 * R + 2
        assert solve_band_metric(point_defect(g, N), R).matrix == closed_form_theta(R, g, N).matrix


def test_solver_window_too_small():
    with pytest.raises(ValueError):
        solve_band_metric(point_defect(F(1, 3), 4), 3)


def test_solver_rejects_wrong_model():
    # the centred diamond ansatz does not fit the two-centre model
    from quasilocal.lattice import two_center
    with pytest.raises(SingularMetricSystem):
        solve_band_metric(two_center(F(1, 3), 3, 10), 2)


def test_superpose_displayed_metric():
    g = F(1, 2)
    M = theta_gamma(g, -1, 6).matrix
    assert [M[i, i] for i in (-2, -1, 0, 1, 2)] == [2, 2, 6, 2, 2]
    assert [M[i, i + 1] for i in (-2, -1, 0, 1)] == [-1, F(-3, 2), F(-3, 2), -1]
    assert superpose([(1, closed_form_theta(1, g, 6)), (0, closed_form_theta(2, g, 6))]).matrix \
        == closed_form_theta(1, g, 6).matrix


@given(couplings, st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5),
                           min_size=3, max_size=3))
def test_residual_linear(g, alphas):
    N = 10
    H = point_defect(g, N).matrix
    thetas = [closed_form_theta(R, g, N) for R in (1, 2, 3)]
    combo = superpose(list(zip(alphas, thetas))).matrix
    lhs = quasi_hermiticity_residual(H, combo).matrix
    rhs = None
    for a, t in zip(alphas, thetas):
        part = quasi_hermiticity_residual(H, t.matrix).matrix.scale(a)
        rhs = part if rhs is None else rhs + part
    assert (lhs - rhs).max_abs() == 0


def min_eig(M):
    return np.linalg.eigvalsh(M.astype("float").to_dense()).min()


def test_positivity_examples():
    g = F(1, 2)
    for gamma in (F(-9, 10), 0, F(9, 10)):
        rep = positivity_check(theta_gamma(g, gamma, 20))
        assert rep.positive and min_eig(theta_gamma(g, gamma, 20).matrix) > 0
    for gamma in (F(-3, 2), F(3, 2)):
        rep = positivity_check(theta_gamma(g, gamma, 20))
        assert not rep.positive and rep.pivot is not None
        assert min_eig(theta_gamma(g, gamma, 20).matrix) < 0


def test_positivity_past_singularity():
    bad = BandMatrix.on_window(3, {0: [1, 1, 1, F(-5), 1, 1, 1]})
    assert not positivity_check(bad).positive


@given(st.fractions(min_value=-F(3, 2), max_value=F(3, 2), max_denominator=16))
def test_cholesky_agrees_with_eigenvalues(gamma):
    M = theta_gamma(F(1, 2), gamma, 8).matrix
    lam = min_eig(M)
    if abs(lam) > 1e-9:
        assert positivity_check(M).positive == (lam > 0)


def test_diagonal_multiparam_examples():
    T = diagonal_multiparam_metric([F(1, 2)], 3)
    labels = T.labels
    diag = dict(zip(labels, T.matrix.diagonal(0)))
    assert (diag[1], diag[-1]) == (F(3, 2), F(1, 2))
    T = diagonal_multiparam_metric([F(1, 2), F(1, 3)], 3)
    diag = dict(zip(T.labels, T.matrix.diagonal(0)))
    assert diag[3] == F(8, 3)
    assert diag[1] == F(3, 2) * (1 - F(1, 9))
    T = diagonal_multiparam_metric([0, 0], 3)
    assert all(v == 1 for v in T.matrix.diagonal(0))


@given(st.lists(couplings, min_size=1, max_size=4))
def test_diagonal_multiparam_residual(params):
    N = len(params) + 3
    res = quasi_hermiticity_residual(multiparam(params, N).matrix,
                                     diagonal_multiparam_metric(params, N).matrix)
    assert res.interior_max_abs == 0


def test_cross_demo():
    C = cross_demo(1, 6)
    M = C.matrix
    assert all(M[i, -1 - i] == 1 and M[i, i] == 1 for i in M.sites)
    assert all(M[j, i] == v for (i, j), v in M.items())
    assert C.demo_only
    with pytest.raises(ValueError):
        positivity_check(C)
    M2 = cross_demo(2, 6).matrix
    # thickened arms: neighbours on the same half-lattice, mirrored across
    assert M2[-3, -2] == 1 and M2[-3, -4] == 1 and M2[-3, 1] == 1 and M2[-3, 3] == 1
    assert M2[-1, 0] == 0


def test_locality_reports():
    rep = asymptotic_locality_report(closed_form_theta(1, F(1, 2), 8))
    assert rep.local and rep.diamond_radius == 0 and rep.diagonal_profile == (1,)
    rep = asymptotic_locality_report(closed_form_theta(7, F(1, 2), 16))
    assert rep.local and rep.parity_symmetric
    assert rep.diamond_radius == 6  # every |i|+|j| >= 8 entry is a unit tail
    assert set(rep.row_ranges) == {6}
    for k in (1, 2):
        rep = asymptotic_locality_report(cross_demo(k, 8))
        assert not rep.local and not rep.far_field_range_constant
