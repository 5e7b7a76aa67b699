"""Tests for Poisson solves, projections and the boundary-data correction."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from eigenspline import (
    ConfigError,
    ManufacturedProblem1D,
    NumericalError,
    assemble_mass,
    assemble_stiffness,
    boundary_correction_2d,
    fast_diagonalization_solve,
    get_preset,
    hermite_correction_1d,
    hermite_data_from_problem,
    l2_projection,
    make_space,
    reduced_basis_matrix,
    ritz_projection,
    solve_poisson_1d,
    solve_poisson_2d,
    trace_from_f,
)
from eigenspline.poisson import hermite_data_orders


class TestPresets:
    @pytest.mark.parametrize("name", ["sin2pi", "ex73"])
    def test_validate_passes(self, name):
        get_preset(name).validate()

    def test_validate_2d_passes(self):
        get_preset("ex75").validate()

    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            get_preset("nope")

    def test_validate_catches_wrong_pairs(self):
        bad = ManufacturedProblem1D(
            name="bad", f=lambda x: np.ones_like(x),
            u=lambda x: x * (1 - x), u_d1=lambda x: 1 - 2 * x)
        # -u'' = 2, not 1
        with pytest.raises(NumericalError):
            bad.validate()


class TestHermiteCorrection:
    def test_data_orders(self):
        assert hermite_data_orders(2) == ((0, 2), (1,))
        assert hermite_data_orders(3) == ((0, 2), (1, 3))
        assert hermite_data_orders(4) == ((0, 2, 4), (1, 3))
        assert hermite_data_orders(5) == ((0, 2, 4), (1, 3, 5))

    def test_zero_data_gives_zero_spline(self):
        sp = make_space("optimal", 3, 8, 0)
        corr = hermite_correction_1d(sp, [0.0, 0.0], [0.0, 0.0])
        assert not corr.coeffs.any()

    def test_quadratic_closed_form(self):
        # with s(0) = s'(0) = 0 and s''(0) = -1 the spline is -x^2/2 on
        # the whole first element
        sp = make_space("optimal", 2, 4, 0)
        corr = hermite_correction_1d(sp, [0.0, -1.0], [0.0, 0.0])
        xs = np.array([0.01, 0.04, 0.08])
        assert xs.max() < sp.breaks[1]
        vals = corr.value(xs, r=2)
        assert_allclose(vals[0], -xs ** 2 / 2, atol=1e-15)
        assert_allclose(vals[1], -xs, atol=1e-14)
        assert_allclose(vals[2], -np.ones_like(xs), rtol=1e-13)
        # zero data at the far end keeps the tail identically zero
        assert_allclose(corr.value(np.array([0.8, 1.0]))[0], 0.0)

    @pytest.mark.parametrize("p,n", [(3, 9), (4, 9), (5, 9)])
    def test_interpolation_conditions(self, p, n):
        sp = make_space("optimal", p, n, 0)
        even, odd = hermite_data_orders(p)
        rng = np.random.default_rng(p)
        left = rng.standard_normal(len(even))
        right = rng.standard_normal(len(even))
        left[0] = right[0] = 0.0
        corr = hermite_correction_1d(sp, left, right)
        at0 = corr.value(np.array([0.0]), r=p)[:, 0]
        at1 = corr.value(np.array([1.0]), r=p)[:, 0]
        scale = np.abs(corr.coeffs).max()
        for k, a in enumerate(even):
            assert_allclose(at0[a], left[k], atol=1e-9 * max(1, scale))
            assert_allclose(at1[a], right[k], atol=1e-9 * max(1, scale))
        for a in odd:
            assert abs(at0[a]) <= 1e-7 * max(1.0, np.abs(at0).max())
            assert abs(at1[a]) <= 1e-7 * max(1.0, np.abs(at1).max())

    def test_rejects_overlapping_windows(self):
        sp = make_space("optimal", 4, 3, 0)
        assert sp.n_el == 5
        with pytest.raises(ConfigError):
            hermite_correction_1d(sp, [0, 0, 0], [0, 0, 0])

    def test_rejects_wrong_data_length(self):
        sp = make_space("optimal", 3, 9, 0)
        with pytest.raises(ConfigError):
            hermite_correction_1d(sp, [0.0], [0.0, 0.0])

    def test_data_from_problem(self):
        sp = make_space("optimal", 5, 9, 0)
        prob = get_preset("ex73")
        left, right = hermite_data_from_problem(sp, prob)
        assert left[0] == right[0] == 0.0
        assert_allclose(left[1], -prob.f(0.0))
        assert_allclose(right[1], -prob.f(1.0))
        assert_allclose(left[2], -float(prob.f_deriv(2, 0.0)))

    def test_data_requires_derivatives(self):
        sp = make_space("optimal", 3, 9, 0)
        prob = ManufacturedProblem1D(name="noderiv",
                                     f=lambda x: np.ones_like(x))
        with pytest.raises(ConfigError):
            hermite_data_from_problem(sp, prob)


class TestProjections:
    @pytest.mark.parametrize("kind,p", [("optimal", 3), ("reduced", 4),
                                        ("full", 3)])
    def test_l2_projection_reproduces_space(self, kind, p):
        sp = make_space(kind, p, 10, 0)
        rng = np.random.default_rng(1)
        coeffs = rng.standard_normal(sp.n)
        f = lambda x: reduced_basis_matrix(sp, x, 0)[0] @ coeffs
        assert_allclose(l2_projection(sp, f), coeffs, atol=1e-9)

    def test_ritz_projection_reproduces_space(self):
        sp = make_space("optimal", 3, 10, 0)
        rng = np.random.default_rng(2)
        coeffs = rng.standard_normal(sp.n)
        f_d1 = lambda x: reduced_basis_matrix(sp, x, 1)[1] @ coeffs
        assert_allclose(ritz_projection(sp, f_d1), coeffs, atol=1e-9)


class TestPoisson1D:
    def test_solution_is_ritz_projection(self):
        # integration by parts: the Galerkin solution with load (f, v)
        # equals the H1 projection driven by u'
        sp = make_space("optimal", 3, 16, 0)
        prob = get_preset("sin2pi")
        sol = solve_poisson_1d(sp, prob)
        ritz = ritz_projection(sp, prob.u_d1)
        assert_allclose(sol.coeffs, ritz, atol=1e-10)

    def test_errors_reported(self):
        sp = make_space("optimal", 3, 16, 0)
        sol = solve_poisson_1d(sp, get_preset("sin2pi"))
        assert 0 < sol.err_l2 < 1e-4
        assert 0 < sol.err_h1 < 1e-2
        assert sol.correction is None

    def test_error_none_without_reference(self):
        sp = make_space("optimal", 3, 16, 0)
        prob = ManufacturedProblem1D(name="blind",
                                     f=lambda x: np.ones_like(x))
        sol = solve_poisson_1d(sp, prob)
        assert sol.err_l2 is None and sol.err_h1 is None

    def test_rejects_non_dirichlet(self):
        sp = make_space("optimal", 3, 16, 1)
        with pytest.raises(ConfigError):
            solve_poisson_1d(sp, get_preset("sin2pi"))

    def test_vanishing_data_correction_is_noop(self):
        # with endpoint data that are exact zeros the corrected path must
        # reproduce the plain one bit for bit (sin(2 pi x) has vanishing
        # even derivatives there; snapping removes the float noise of
        # sin(2 pi) ~ 1e-16)
        sp = make_space("optimal", 3, 16, 0)
        base = get_preset("sin2pi")
        snapped = ManufacturedProblem1D(
            name="snapped", f=base.f,
            f_deriv=lambda k, x: 0.0 if x in (0.0, 1.0)
            else base.f_deriv(k, x),
            u=base.u, u_d1=base.u_d1)
        plain = solve_poisson_1d(sp, snapped)
        corrected = solve_poisson_1d(sp, snapped, correct=True)
        assert np.array_equal(plain.coeffs, corrected.coeffs)
        assert not corrected.correction.coeffs.any()

    def test_correction_improves_capped_problem(self):
        sp = make_space("optimal", 3, 32, 0)
        prob = get_preset("ex73")
        plain = solve_poisson_1d(sp, prob)
        corrected = solve_poisson_1d(sp, prob, correct=True)
        assert corrected.err_l2 < plain.err_l2 / 5

    def test_full_space_needs_no_correction(self):
        sp = make_space("full", 3, 32, 0)
        prob = get_preset("ex73")
        sol = solve_poisson_1d(sp, prob)
        opt = solve_poisson_1d(make_space("optimal", 3, 32, 0), prob)
        assert sol.err_l2 < opt.err_l2


class TestFastDiagonalization:
    def test_solves_kron_system(self):
        sp1 = make_space("optimal", 2, 6, 0)
        sp2 = make_space("optimal", 3, 5, 0)
        s1, m1 = assemble_stiffness(sp1), assemble_mass(sp1)
        s2, m2 = assemble_stiffness(sp2), assemble_mass(sp2)
        rng = np.random.default_rng(4)
        rhs = rng.standard_normal((sp1.n, sp2.n))
        u = fast_diagonalization_solve(s1, m1, s2, m2, rhs)
        big = np.kron(s1.to_dense(), m2.to_dense()) \
            + np.kron(m1.to_dense(), s2.to_dense())
        assert_allclose(big @ u.ravel(), rhs.ravel(),
                        atol=1e-9 * np.linalg.norm(big))

    def test_rejects_singular_pencil(self):
        sp = make_space("optimal", 2, 8, 1)
        s, m = assemble_stiffness(sp), assemble_mass(sp)
        with pytest.raises(NumericalError):
            fast_diagonalization_solve(s, m, s, m, np.ones((8, 8)))


class TestTraceFromF:
    @pytest.mark.parametrize("alpha", [2, 4])
    @pytest.mark.parametrize("z", [0.0, 1.0])
    def test_agrees_with_u_route(self, alpha, z):
        # on a homogeneous edge the normal derivatives of u follow from f
        prob = get_preset("ex75")
        x2 = np.linspace(0.1, 0.9, 9)
        via_f = trace_from_f(prob, alpha, z, x2)
        via_u = prob.u_mixed(alpha, 0, z, x2)
        assert_allclose(via_f, via_u, rtol=1e-10, atol=1e-10)

    def test_rejects_odd_order(self):
        with pytest.raises(ConfigError):
            trace_from_f(get_preset("ex75"), 3, 0.0, np.array([0.5]))


def cubic_bubble_problem_2d():
    # u = q(x1) q(x2) with q = t^2 - t^3: all traces are cubics, so the
    # least-squares trace fits inside a p >= 3 space are exact and the
    # correction surface must reproduce the boundary jets to roundoff
    def q(k, t):
        t = np.asarray(t, dtype=float)
        if k == 0:
            return t ** 2 - t ** 3
        if k == 1:
            return 2 * t - 3 * t ** 2
        if k == 2:
            return 2 - 6 * t
        if k == 3:
            return -6.0 * np.ones_like(t)
        return np.zeros_like(t)

    from eigenspline import ManufacturedProblem2D
    return ManufacturedProblem2D(
        name="cubic-bubble",
        f=lambda x1, x2: -(q(2, x1) * q(0, x2) + q(0, x1) * q(2, x2)),
        f_mixed=lambda a1, a2, x1, x2: -(q(a1 + 2, x1) * q(a2, x2)
                                         + q(a1, x1) * q(a2 + 2, x2)),
        u=lambda x1, x2: q(0, x1) * q(0, x2),
        u_x1=lambda x1, x2: q(1, x1) * q(0, x2),
        u_x2=lambda x1, x2: q(0, x1) * q(1, x2),
        u_mixed=lambda a1, a2, x1, x2: q(a1, x1) * q(a2, x2))


class TestPoisson2D:
    def test_correction_matches_polynomial_traces(self):
        sp1 = make_space("optimal", 3, 9, 0)
        sp2 = make_space("optimal", 3, 9, 0)
        prob = cubic_bubble_problem_2d()
        prob.validate()
        c = boundary_correction_2d(sp1, sp2, prob)
        # the surface must vanish on the edge x1 = 0 and carry the exact
        # second pure-normal trace there
        from eigenspline.poisson import CorrectionSpline
        from eigenspline.splines import bspline_eval_all
        x2 = np.linspace(0.0, 1.0, 33)
        vals2 = np.stack([CorrectionSpline(knots=sp2.knots, coeffs=c[i]).
                          value(x2)[0] for i in range(c.shape[0])])
        ev = bspline_eval_all(sp1.knots, sp1.p, 0.0)
        lo = ev.first_active + sp1.p
        edge = ev.values @ vals2[lo:lo + sp1.p + 1, :]
        assert_allclose(edge[0], 0.0, atol=1e-10)
        assert_allclose(edge[2], prob.u_mixed(2, 0, 0.0, x2),
                        rtol=1e-9, atol=1e-9)

    def test_corrected_solution_beats_plain(self):
        sp = make_space("optimal", 3, 12, 0)
        prob = get_preset("ex75")
        plain = solve_poisson_2d(sp, sp, prob)
        corrected = solve_poisson_2d(sp, sp, prob, correct=True)
        assert corrected.err_l2 < plain.err_l2 / 3
        assert corrected.err_h1 < plain.err_h1

    def test_rejects_non_dirichlet(self):
        good = make_space("optimal", 3, 12, 0)
        bad = make_space("optimal", 3, 12, 1)
        with pytest.raises(ConfigError):
            solve_poisson_2d(good, bad, get_preset("ex75"))

    def test_anisotropic_degrees(self):
        sp1 = make_space("optimal", 2, 10, 0)
        sp2 = make_space("optimal", 3, 9, 0)
        sol = solve_poisson_2d(sp1, sp2, get_preset("ex75"), correct=True)
        assert sol.coeffs.shape == (10, 9)
        assert sol.err_l2 < 1e-3
