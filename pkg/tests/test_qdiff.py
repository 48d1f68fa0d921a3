from fractions import Fraction as F

import pytest

from qonf.polyq import (
    MatrixSeries,
    Poly,
    RatFunc,
    format_bivariate,
    lin_solve,
    mat_inv,
    mat_mul,
    parse_bivariate,
)
from qonf.qdiff import (
    DegenerateOperatorError,
    FundamentalSolutionAt0,
    QDifferenceSystem,
    QHypergeometricSpec,
    ResonanceError,
    ScalarQOperator,
    UnsupportedJordanError,
    apply_scalar_operator_logseries,
    birkhoff_scalar,
    casoratian,
    companion_system,
    frobenius_log_solutions,
    frobenius_solution,
    gauge_residual_series,
    gauge_transform,
    is_regular_singular_at_0,
    normalize_to_constant,
    operator_residual,
    q_pullback,
    qhg_bases,
    qhg_coefficients,
    qhg_operator,
    qhg_series,
    rank1_product_solution,
    solve_scalar_series,
    system_from_json,
    system_to_json,
)
from qonf.qspecial import PoleProximityError, q_character, q_log
from qonf.rings import RationalFunctionQ as R


Q_SYM = R.q()
ONE = R.one()


def rf(text):
    return parse_bivariate(text)


def qpoch(d):
    out = ONE
    for r in range(1, d + 1):
        out = out * R.one_minus_q_pow(r)
    return out


def pn_operator(N):
    """(1 - sigma)^(N+1) f = Q f as a scalar operator with exact coefficients."""
    import math

    coeffs = []
    for k in range(N + 2):
        c = rf(str(math.comb(N + 1, k) * (-1) ** k))
        coeffs.append(c)
    coeffs[0] = coeffs[0] - rf("Q")
    return ScalarQOperator(tuple(coeffs), Q_SYM)


# ---------------------------------------------------------------- companion / criterion


class TestCompanion:
    def test_rank_one(self):
        op = ScalarQOperator((rf("1"), rf("-1")), Q_SYM)
        sys = companion_system(op)
        assert sys.n == 1
        assert sys.A[0][0] == rf("1")

    def test_p2_system(self):
        sys = companion_system(pn_operator(2))
        assert sys.n == 3
        assert sys.A[0][1] == rf("1") and sys.A[0][0].is_zero
        assert sys.A[2][0] == rf("1 - Q")
        assert sys.A[2][1] == rf("-3")
        assert sys.A[2][2] == rf("3")

    def test_generic_order_two(self):
        a0, a1 = rf("q*Q + 2"), rf("1 - Q^2")
        op = ScalarQOperator((a0, a1, rf("1")), Q_SYM)
        sys = companion_system(op)
        assert sys.A[1][0] == -a0
        assert sys.A[1][1] == -a1

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateOperatorError):
            ScalarQOperator((rf("1"), rf("0")), Q_SYM)


class TestRegularSingularCriterion:
    def test_pn_equation_is_regular_singular(self):
        assert is_regular_singular_at_0(pn_operator(2))

    def test_w_transform_is_not(self):
        # q^(N+1) W (sigma - 1)^(N+1) - sigma^(N+1) at N = 2
        coeffs = (
            rf("-q^3*Q"),
            rf("3*q^3*Q"),
            rf("-3*q^3*Q"),
            rf("q^3*Q - 1"),
        )
        assert not is_regular_singular_at_0(ScalarQOperator(coeffs, Q_SYM))

    def test_constant_coefficients(self):
        assert is_regular_singular_at_0(ScalarQOperator((rf("1"), rf("-1")), Q_SYM))


# ---------------------------------------------------------------- gauge transforms


class TestGauge:
    def test_identity_gauge(self):
        sys = companion_system(pn_operator(1))
        eye = [
            [rf("1") if i == j else rf("0") for j in range(2)]
            for i in range(2)
        ]
        out = gauge_transform(eye, sys)
        for i in range(2):
            for j in range(2):
                assert out.A[i][j] == sys.A[i][j]

    def test_scalar_rescale_fixes_system(self):
        sys = companion_system(pn_operator(1))
        c = rf("5")
        P = [[c if i == j else rf("0") for j in range(2)] for i in range(2)]
        out = gauge_transform(P, sys)
        for i in range(2):
            for j in range(2):
                assert out.A[i][j] == sys.A[i][j]

    def test_euler_series_gauge_to_constant(self):
        # A = q (1 - Q): normalization gauge is the Euler series (Q;q)_inf
        sys = QDifferenceSystem(((rf("q") * rf("1 - Q"),),), Q_SYM)
        Fser, A0 = normalize_to_constant(sys, 8)
        assert A0[0][0] == R.q()
        assert gauge_residual_series(sys, Fser, A0).is_zero()
        for m in range(9):
            expect = ((-1) ** m) * R.q_power(m * (m - 1) // 2) / qpoch(m)
            assert Fser.terms[m][0][0] == expect

    def test_pullback(self):
        sys = QDifferenceSystem(((rf("1 - Q"),),), Q_SYM)
        same = q_pullback(sys, ONE)
        assert same.A[0][0] == sys.A[0][0]
        scaled = q_pullback(sys, 1 / (1 - R.q()))
        assert scaled.A[0][0] == rf("1 - (1-q)*Q")


class TestNormalize:
    def test_constant_matrix_gives_identity_gauge(self):
        sys = QDifferenceSystem(((rf("2"), rf("0")), (rf("0"), rf("q"))), Q_SYM)
        Fser, A0 = normalize_to_constant(sys, 4)
        assert Fser.sub(MatrixSeries.identity(2, 4, ONE)).is_zero()

    def test_two_by_two_sylvester_degree_one(self):
        # A = diag(1, mu) + Q * offdiag: F_1 solves q F_1 D - D F_1 = -A_1, uniquely
        mu = rf("3")
        A = ((rf("1"), rf("Q")), (rf("2*Q"), mu))
        sys = QDifferenceSystem(A, Q_SYM)
        Fser, A0 = normalize_to_constant(sys, 1)
        F1 = Fser.terms[1]
        q = R.q()
        # check the Sylvester identity entrywise
        D = [[ONE, R.zero()], [R.zero(), 3 * ONE]]
        lhs = [[q * sum(F1[i][k] * D[k][j] for k in range(2)) -
                sum(D[i][k] * F1[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
        A1 = [[R.zero(), ONE], [2 * ONE, R.zero()]]
        for i in range(2):
            for j in range(2):
                assert lhs[i][j] == -A1[i][j]
        assert gauge_residual_series(sys, Fser, A0).is_zero()

    def test_resonance_detected(self):
        # eigenvalues 1 and q: ratio in q^Z -> the degree-1 Sylvester solve is singular
        A = ((rf("1"), rf("Q")), (rf("0"), rf("q")))
        sys = QDifferenceSystem(A, Q_SYM)
        with pytest.raises(ResonanceError) as err:
            normalize_to_constant(sys, 3)
        assert err.value.degree == 1


from hypothesis import given, settings
import hypothesis.strategies as st

small_ints = st.integers(min_value=-4, max_value=4)


class TestNormalizeProperty:
    @given(
        st.integers(min_value=2, max_value=7),
        small_ints, small_ints, small_ints, small_ints,
    )
    @settings(max_examples=25, deadline=None)
    def test_gauge_round_trip_on_random_systems(self, lam2, a, b, c, d):
        # diag(1, lam2) + Q * (random integer matrix): non-resonant since the
        # eigenvalue ratio of A(0) is a plain integer >= 2, never in q^Z
        A = (
            (rf("1") + rf("Q") * a, rf("Q") * b),
            (rf("Q") * c, rf(str(lam2)) + rf("Q") * d),
        )
        sys = QDifferenceSystem(A, Q_SYM)
        Fser, A0 = normalize_to_constant(sys, 4)
        assert gauge_residual_series(sys, Fser, A0).is_zero()


# ---------------------------------------------------------------- fundamental solutions


class TestFrobenius:
    def test_rank_one_constant_is_character(self):
        lam = 0.7 + 0.3j
        q = 0.4
        sys = QDifferenceSystem(((RatFunc.const(lam, 1 + 0j),),), q)
        sol = frobenius_solution(sys, 10)
        assert sol.kind == "diagonalizable"
        for Q in (0.3, 0.2 + 0.5j):
            assert sol.eval(Q)[0][0] == pytest.approx(q_character(lam, q, Q), rel=1e-10)

    def test_unipotent_two_by_two(self):
        q = 0.45
        one = 1 + 0j
        u, z = RatFunc.const(one, one), RatFunc.const(0j, one)
        sys = QDifferenceSystem(((u, z), (u, u)), q)
        sol = frobenius_solution(sys, 4)
        assert sol.kind == "unipotent"
        X = sol.eval(0.3)
        ell = q_log(q, 0.3)
        assert X[0][0] == pytest.approx(1.0)
        assert X[1][0] == pytest.approx(ell, rel=1e-12)
        assert X[1][1] == pytest.approx(1.0)
        assert sol.shift_residual(0.3) < 1e-12

    def test_pochhammer_equation_exact_series(self):
        # A(Q) = 1 - Q: normalized solution is sum Q^d/(q;q)_d
        sys = QDifferenceSystem(((rf("1 - Q"),),), Q_SYM)
        sol = frobenius_solution(sys, 8)
        assert sol.kind == "unipotent"
        for d in range(9):
            assert sol.gauge.terms[d][0][0] == 1 / qpoch(d)
        assert gauge_residual_series(
            sys, sol.gauge.inverse(), [[ONE]]
        ).is_zero()

    def test_numeric_shift_residuals_companion(self):
        q = 0.35
        spec = QHypergeometricSpec((0.3 + 0.1j, 1.7 - 0.4j), (0.9 + 0.6j,))
        op = qhg_operator(spec, q)
        sys = companion_system(op)
        sol = frobenius_solution(sys, 40)
        for Q in (0.05, 0.03 + 0.04j):
            assert sol.shift_residual(Q) < 1e-8

    def test_unsupported_jordan_exact(self):
        A = ((rf("2"), rf("1")), (rf("0"), rf("2")))
        with pytest.raises(UnsupportedJordanError):
            frobenius_solution(QDifferenceSystem(A, Q_SYM), 3)


# ---------------------------------------------------------------- scalar series solutions


class TestScalarSeries:
    def test_trvial_operator(self):
        op = ScalarQOperator((rf("1"), rf("-1")), Q_SYM)
        sol = solve_scalar_series(op, 5)
        assert sol.coeffs[0].coeffs[0] == ONE
        assert all(sol.coeffs[d].coeffs[0].is_zero for d in range(1, 6))

    def test_p2_series(self):
        sol = solve_scalar_series(pn_operator(2), 6)
        for d in range(7):
            assert sol.coeffs[d].coeffs[0] == 1 / qpoch(d) ** 3

    def test_rank_one_series(self):
        sol = solve_scalar_series(pn_operator(0), 6)
        for d in range(7):
            assert sol.coeffs[d].coeffs[0] == 1 / qpoch(d)

    def test_vanishing_indicial_factor(self):
        # sigma f = q f has indicial factor 1 - q^(d-1), vanishing at d = 1
        op = ScalarQOperator((rf("q"), rf("-1")), Q_SYM)
        with pytest.raises(ResonanceError) as err:
            solve_scalar_series(op, 3)
        assert err.value.degree == 1


class TestLogSolutions:
    def test_trivial(self):
        op = ScalarQOperator((rf("1"), rf("-1")), Q_SYM)
        (sol,) = frobenius_log_solutions(op, 4)
        assert sol.coefficient(0, 0, 0) == ONE
        assert sol.logdegree == 0

    def test_order_two_correction(self):
        # (1 - sigma)^2 f = Q f: second solution h_d (L + a_d) with
        # a_d - a_{d-1} = 2 q^d/(1 - q^d)
        sols = frobenius_log_solutions(pn_operator(1), 6)
        assert len(sols) == 2
        s1 = sols[1]
        a = R.zero()
        for d in range(7):
            h = 1 / qpoch(d) ** 2
            if d:
                a = a + 2 * R.q_power(d) / R.one_minus_q_pow(d)
            assert s1.coefficient(d, 0, 1) == h
            assert s1.coefficient(d, 0, 0) == h * a

    def test_order_three_correction(self):
        # (1 - sigma)^3 f = Q f: second solution h_d (L + sum 3 q^k/(1-q^k))
        sols = frobenius_log_solutions(pn_operator(2), 6)
        s1 = sols[1]
        a = R.zero()
        for d in range(7):
            h = 1 / qpoch(d) ** 3
            if d:
                a = a + 3 * R.q_power(d) / R.one_minus_q_pow(d)
            assert s1.coefficient(d, 0, 1) == h
            assert s1.coefficient(d, 0, 0) == h * a

    def test_solutions_annihilated_exactly(self):
        op = pn_operator(2)
        for s in frobenius_log_solutions(op, 6):
            assert apply_scalar_operator_logseries(op, s).is_zero_through(6)

    def test_leading_L_coefficient_is_taylor_solution(self):
        op = pn_operator(2)
        sols = frobenius_log_solutions(op, 5)
        taylor = solve_scalar_series(op, 5)
        for m, s in enumerate(sols):
            assert s.logdegree == m
            for d in range(6):
                assert s.coefficient(d, 0, m) == taylor.coeffs[d].coeffs[0]

    def test_numeric_oracle_second_solution(self):
        # evaluate with the true q-logarithm and apply the operator pointwise
        q, Q, D = 0.4, 0.15 + 0.1j, 40
        h = [1.0]
        a = [0.0]
        for d in range(1, D + 1):
            h.append(h[-1] / (1 - q**d) ** 3)
            a.append(a[-1] + 3 * q**d / (1 - q**d))

        def f(x):
            ell = q_log(q, x)
            return sum(h[d] * x**d * (ell + a[d]) for d in range(D + 1))

        vals = [f(q**k * Q) for k in range(4)]
        residual = vals[0] - 3 * vals[1] + 3 * vals[2] - vals[3] - Q * f(Q)
        assert abs(residual) < 1e-12

    def test_mixed_roots_rejected(self):
        op = ScalarQOperator((rf("2 - Q"), rf("-3"), rf("1")), Q_SYM)
        with pytest.raises(UnsupportedJordanError):
            frobenius_log_solutions(op, 3)


# ---------------------------------------------------------------- q-hypergeometric


class TestQHypergeometric:
    def test_degree_zero_coefficient(self):
        spec = QHypergeometricSpec((0.3,), (0.7,))
        assert qhg_coefficients(spec, 0.5, 3)[0] == 1

    def test_zero_upper_parameter_gives_pochhammer_series(self):
        spec = QHypergeometricSpec((0,), ())
        q = 0.5
        c = qhg_coefficients(spec, q, 6)
        acc = 1.0
        for d in range(1, 7):
            acc /= 1 - q**d
            assert c[d] == pytest.approx(acc)

    def test_empty_parameters_euler_series(self):
        q = 0.5
        c = qhg_coefficients(QHypergeometricSpec((), ()), q, 6)
        import math

        for d in range(7):
            want = (-1) ** d * q ** (d * (d - 1) / 2)
            want /= math.prod(1 - q**r for r in range(1, d + 1))
            assert c[d] == pytest.approx(want)

    def test_series_solves_equation(self):
        spec = QHypergeometricSpec((0.3 + 0.1j, 1.7 - 0.4j), (0.9 + 0.6j,))
        q = 0.35
        op = qhg_operator(spec, q)
        base0, _ = qhg_bases(spec, q, 200)
        assert operator_residual(op, base0[0], 0.3 + 0.2j) < 1e-10

    def test_bases_have_stated_sizes_and_solve(self):
        spec = QHypergeometricSpec((0.3 + 0.1j, 1.7 - 0.4j), (0.9 + 0.6j,))
        q = 0.35
        base0, base_inf = qhg_bases(spec, q, 220)
        assert len(base0) == spec.r and len(base_inf) == spec.r
        op = qhg_operator(spec, q)
        for y in base0:
            assert operator_residual(op, y, 0.4 + 0.2j) < 1e-8
        for y in base_inf:
            assert operator_residual(op, y, 9 - 4j) < 1e-8
        assert abs(casoratian(base0, q, 0.4 + 0.2j)) > 1e-6
        assert abs(casoratian(base_inf, q, 9 - 4j)) > 1e-6

    def test_first_basis_element_is_the_series(self):
        spec = QHypergeometricSpec((0.3 + 0.1j, 1.7 - 0.4j), (0.9 + 0.6j,))
        q = 0.35
        base0, _ = qhg_bases(spec, q, 150)
        s = qhg_series(spec, q, 150)
        Qpt = 0.3 + 0.1j
        direct = sum(s.coeffs[d].coeffs[0] * Qpt**d for d in range(151))
        assert base0[0].eval(Qpt) == pytest.approx(direct, rel=1e-12)

    def test_resonant_parameters_rejected(self):
        q = 0.35
        with pytest.raises(ResonanceError):
            qhg_bases(QHypergeometricSpec((0.3, 0.3 * q**2), (0.9,)), q, 10)

    def test_lower_parameter_on_lattice_rejected(self):
        q = 0.35
        with pytest.raises(PoleProximityError):
            qhg_coefficients(QHypergeometricSpec((0.3,), (q**-2,)), q, 10)


# ---------------------------------------------------------------- rank 1 and Birkhoff


class TestRankOne:
    def test_trivial(self):
        sol = rank1_product_solution(1.0, (), (), 0.5)
        assert sol.eval(0.3 + 0.2j) == 1

    def test_pochhammer_inverse(self):
        q = 0.45
        sol = rank1_product_solution(1.0, (1.0,), (), q)
        from qonf.qspecial import qpoch_infinite

        Q = 0.3 + 0.1j
        assert sol.eval(Q) == pytest.approx(1 / qpoch_infinite(Q, q), rel=1e-11)
        # shift law: f(qQ) = (1 - Q) f(Q)
        assert sol.eval(q * Q) == pytest.approx((1 - Q) * sol.eval(Q), rel=1e-11)

    def test_general_shift_law(self):
        q = 0.4
        lam, alphas, betas = 1.3 - 0.2j, (0.8, 1.1j), (0.5 + 0.3j, 2.0)
        sol = rank1_product_solution(lam, alphas, betas, q)
        Q = 0.25 + 0.15j
        factor = lam
        for a in alphas:
            factor *= 1 - a * Q
        for b in betas:
            factor /= 1 - b * Q
        assert sol.eval(q * Q) == pytest.approx(factor * sol.eval(Q), rel=1e-10)

    def test_pole_raises(self):
        q = 0.5
        sol = rank1_product_solution(1.0, (1.0,), (), q)
        with pytest.raises(PoleProximityError):
            sol.eval(q**-3)


class TestBirkhoff:
    def test_consistent_pair_gives_q_constant_one(self):
        q = 0.4
        f = rank1_product_solution(1.0, (0.7,), (1.3,), q)
        finf = lambda W: f.eval(1 / W)
        P = birkhoff_scalar(f.eval, finf, 0.5 + 0.8j)
        assert P == pytest.approx(1.0)

    def test_q_constancy(self):
        # X0 and Xinf for sigma f = lam (1-aQ)/(1-bQ) f
        q = 0.4
        lam, a, b = 1.0, 1.4 + 0.2j, 0.6 - 0.5j
        f0 = rank1_product_solution(lam, (a,), (b,), q)
        # at infinity (W = 1/Q): sigma_W g = (b/(a lam)) (1 - qW/b)/(1 - qW/a) g
        ginf = rank1_product_solution(b / (a * lam), (q / b,), (q / a,), q)
        Q = 0.7 + 1.1j
        P1 = birkhoff_scalar(f0.eval, ginf.eval, Q)
        P2 = birkhoff_scalar(f0.eval, ginf.eval, q * Q)
        assert abs(P2 - P1) < 1e-8 * abs(P1)


# ---------------------------------------------------------------- interchange


class TestSystemJson:
    def test_round_trip_exact(self):
        sys = companion_system(pn_operator(2))
        doc = system_to_json(sys)
        back = system_from_json(doc)
        assert back.is_exact
        for i in range(3):
            for j in range(3):
                assert back.A[i][j] == sys.A[i][j]

    def test_numeric_q_specialization(self):
        sys = companion_system(pn_operator(1))
        doc = system_to_json(sys)
        doc["q"] = [0.5, 0.0]
        num = system_from_json(doc)
        assert not num.is_exact
        M = num.matrix_at(0.3)
        assert M[1][0] == pytest.approx(0.3 - 1)
        assert M[1][1] == pytest.approx(2.0)
