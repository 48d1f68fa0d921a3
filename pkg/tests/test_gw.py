import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from qonf.gw import (
    EquivariantSpec,
    JFunctionCoh,
    JFunctionK,
    NdTable,
    confluence_compare,
    equivariant_confluence_compare,
    equivariant_operator_residual,
    gw_potential_p2,
    jcoh_ode_residual,
    jcoh_residual_is_zero,
    jcoh_series,
    jk_closed_formula,
    jk_equivariant,
    jk_modified,
    jk_qde_residual,
    jk_series,
    nd_recursion,
    perturbed_nd,
    qpoch_exact,
    quantum_reduce,
    small_quantum_ring_checks,
    wdvv_residual_p2,
)
from qonf.qdiff import ScalarQOperator, casoratian, frobenius_log_solutions
from qonf.polyq import parse_bivariate
from qonf.rings import LPoly, RationalFunctionQ as R, binom_l, chern_iso

REFERENCE_ND = (1, 1, 12, 620, 87304, 26312976, 14616808192, 13525751027392)


class TestNdRecursion:
    def test_reference_sequence(self):
        t0 = time.time()
        nd = nd_recursion(8)
        assert nd.values == REFERENCE_ND
        assert time.time() - t0 < 1.0

    def test_entries_are_positive_integers(self):
        nd = nd_recursion(10)
        assert all(isinstance(v, int) and v > 0 for v in nd.values)

    def test_csv(self):
        text = nd_recursion(3).to_csv()
        assert text.splitlines()[0] == "d,N_d"
        assert text.splitlines()[3] == "3,12"


class TestPotential:
    def test_classical_coefficients(self):
        F_pot = gw_potential_p2(2)
        assert F_pot.coefficient(1, 2, 0, 0) == F(1, 2)
        assert F_pot.coefficient(2, 0, 0, 1) == F(1, 2)

    def test_quantum_coefficients(self):
        F_pot = gw_potential_p2(2)
        assert F_pot.coefficient(0, 0, 1, 2) == F(1, 2)  # N_1/2!
        assert F_pot.coefficient(0, 0, 2, 5) == F(1, 120)  # N_2/5!


class TestWDVV:
    def test_residual_vanishes_completely(self):
        assert wdvv_residual_p2(4).is_zero

    def test_order_one_is_trivially_zero(self):
        assert wdvv_residual_p2(1).is_zero

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_perturbation_breaks_at_first_dependent_order(self, d):
        nd = perturbed_nd(nd_recursion(4), d, nd_recursion(4)[d] + 1)
        res = wdvv_residual_p2(4, nd)
        assert not res.is_zero
        assert res.min_e_degree() == max(d, 2)

    def test_specific_break_location(self):
        res = wdvv_residual_p2(4, perturbed_nd(nd_recursion(4), 2, 2))
        assert res.coefficient(0, 0, 2, 2) != 0


class TestJkSeries:
    def test_degree_zero(self):
        jk = jk_series(3, 0)
        assert jk.coefficient(0, 0) == R.one()
        assert all(jk.coefficient(0, i).is_zero for i in range(1, 4))

    def test_p2_degree_one(self):
        jk = jk_series(2, 1)
        q = R.q()
        assert jk.coefficient(1, 0) == 1 / (1 - q) ** 3
        assert jk.coefficient(1, 1) == -3 * q / (1 - q) ** 4
        assert jk.coefficient(1, 2) == 6 * q**2 / (1 - q) ** 5

    def test_denominators_divide_pochhammer_power(self):
        # eps^i picks up i extra inverse factors beyond the (N+1) of the
        # unit part, so (q;q)_d^(N+1+i) clears the denominator of c_(d,i)
        N, D = 3, 5
        jk = jk_series(N, D)
        for d in range(D + 1):
            for i in range(N + 1):
                clear = qpoch_exact(d) ** (N + 1 + i)
                assert len((clear * jk.coefficient(d, i)).den) == 1

    def test_chern_retag(self):
        from qonf.rings import NilpotentElement

        x = NilpotentElement(2, [R.one(), 3 * R.one(), R.zero()])
        assert chern_iso(x).coeffs == x.coeffs


class TestClosedFormula:
    def test_p2_degree_one_eps_one(self):
        jc = jk_closed_formula(2, 1)
        q = R.q()
        assert jc.coefficient(1, 1) == (-3 * q / (1 - q)) / qpoch_exact(1) ** 3

    def test_eps_zero_column(self):
        jc = jk_closed_formula(3, 4)
        for d in range(5):
            assert jc.coefficient(d, 0) == 1 / qpoch_exact(d) ** 4

    @pytest.mark.parametrize("N", [0, 1, 2, 3, 4])
    def test_oracle_equivalence(self, N):
        D = 8
        assert jk_closed_formula(N, D).coeffs == jk_series(N, D).coeffs


def pn_operator(N):
    coeffs = []
    for k in range(N + 2):
        coeffs.append(parse_bivariate(str(math.comb(N + 1, k) * (-1) ** k)))
    coeffs[0] = coeffs[0] - parse_bivariate("Q")
    return ScalarQOperator(tuple(coeffs), R.q())


class TestModified:
    def test_eps_zero_column_has_no_log(self):
        jm = jk_modified(2, 4)
        jk = jk_series(2, 4)
        for d in range(5):
            lp = jm.coeffs[d].coeffs[0]
            assert lp.degree <= 0 or lp.is_zero
            assert lp.coeff(0) == jk.coefficient(d, 0)

    def test_eps_one_column(self):
        jm = jk_modified(2, 4)
        jk = jk_series(2, 4)
        for d in range(5):
            assert jm.coefficient(d, 1, 1) == -jk.coefficient(d, 0)
            assert jm.coefficient(d, 1, 0) == jk.coefficient(d, 1)

    def test_log_degree_bound(self):
        jm = jk_modified(3, 4)
        for d in range(5):
            for i in range(4):
                lp = jm.coeffs[d].coeffs[i]
                if not lp.is_zero:
                    assert lp.degree <= i

    def test_columns_match_log_solutions_exactly(self):
        # eps^i column = sum_m gamma_m S_m with gamma from (-1)^i binom(L, i),
        # S_m the Frobenius log-solutions seeded by L^m at Q^0
        N, D = 2, 6
        jm = jk_modified(N, D)
        sols = frobenius_log_solutions(pn_operator(N), D)
        one = R.one()
        for i in range(N + 1):
            gamma = binom_l(i, one) * ((-1) ** i * one)
            for d in range(D + 1):
                want = LPoly([], one)
                for m in range(i + 1):
                    want = want + sols[m].coeffs[d].coeffs[0] * gamma.coeff(m)
                assert jm.coeffs[d].coeffs[i] == want


class TestFunctionalEquations:
    @pytest.mark.parametrize("N,D", [(0, 8), (1, 8), (2, 8), (3, 8), (4, 8)])
    def test_modified_residual_exactly_zero(self, N, D):
        assert jk_qde_residual(N, D).is_zero_through(D)

    @pytest.mark.parametrize("N", [0, 1, 2, 3])
    def test_twisted_residual_exactly_zero(self, N):
        assert jk_qde_residual(N, 6, modified=False).is_zero_through(6)

    def test_rank_one_case_is_pochhammer_series(self):
        jk = jk_series(0, 5)
        for d in range(6):
            assert jk.coefficient(d, 0) == 1 / qpoch_exact(d)


class TestJcoh:
    def test_p2_degree_one(self):
        jc = jcoh_series(2, 1)
        assert jc.coefficient(1, 0) == 1
        assert jc.coefficient(1, 1) == -3
        assert jc.coefficient(1, 2) == 6
        assert jc.z_exponent(1, 0) == -3
        assert jc.z_exponent(1, 1) == -4
        assert jc.z_exponent(1, 2) == -5

    def test_prefactor_expansion_rule(self):
        jc = jcoh_series(3, 2)
        for a in range(4):
            assert jc.modified_coefficient(0, a, a) == F(1, math.factorial(a))

    @pytest.mark.parametrize("N,D", [(0, 8), (2, 8), (4, 8)])
    def test_ode_residual_exactly_zero(self, N, D):
        assert jcoh_residual_is_zero(jcoh_ode_residual(N, D))


class TestComparison:
    def test_p2_degree_one_rows(self):
        rep = confluence_compare(2, 1)
        assert rep.all_equal
        by_key = {(r.d, r.i, r.m): r for r in rep.rows}
        assert by_key[(1, 0, 0)].limit == 1 and by_key[(1, 0, 0)].z_exponent == -3
        assert by_key[(1, 1, 0)].limit == -3 and by_key[(1, 1, 0)].z_exponent == -4
        assert by_key[(1, 2, 0)].limit == 6

    @pytest.mark.parametrize("N", [0, 1, 2, 3, 4])
    def test_full_grid(self, N):
        rep = confluence_compare(N, 6)
        assert rep.all_equal, rep.failures[:3]

    def test_p2_table_emitted(self):
        rep = confluence_compare(2, 3)
        table = rep.p2_table()
        assert "prefactor" in table[0]
        assert len(table) == 4
        assert all(e["equal"] for col in table[1:] for e in col["entries"])


class TestEquivariant:
    def test_degree_zero_term_is_prefactor_only(self):
        import cmath
        from qonf.qspecial import q_log

        spec = EquivariantSpec((0.0, 0.5), z=1.0)
        ev = jk_equivariant(spec, 0.5, 0)[1]
        Q = 0.3 + 0.1j
        want = cmath.exp(0.5 * cmath.log(0.5) * q_log(0.5, Q))
        assert ev.eval(Q) == pytest.approx(want, rel=1e-12)

    def test_random_nonresonant_residuals(self):
        rng = np.random.default_rng(5)
        for _ in range(3):
            lams = np.sort(rng.uniform(0, 0.9, size=3))
            while np.min(np.diff(lams)) < 0.05:
                lams = np.sort(rng.uniform(0, 0.9, size=3))
            spec = EquivariantSpec(tuple(lams), z=1.0)
            q = rng.uniform(0.3, 0.6)
            for ev in jk_equivariant(spec, q, 140):
                assert equivariant_operator_residual(spec, ev, 0.2 + 0.1j, q) < 1e-8

    def test_casoratian_nonzero(self):
        spec = EquivariantSpec((0.0, 0.45, 0.8), z=1.0)
        evs = jk_equivariant(spec, 0.5, 140)
        assert abs(casoratian(evs, 0.5, 0.15 + 0.1j)) > 1e-8

    def test_resonant_spec_rejected(self):
        from qonf.qspecial import DomainError

        with pytest.raises(DomainError):
            EquivariantSpec((0.0, 1.0), z=1.0)

    @pytest.mark.parametrize("lams", [(0.0, 0.5), (0.0, 0.4, 0.9)])
    def test_confluence_match(self, lams):
        spec = EquivariantSpec(lams, z=1.0)
        rep = equivariant_confluence_compare(spec, D=4)
        assert rep.max_error < 1e-4
        assert rep.orders_near_one(slack=0.3)

    def test_confluence_match_complex_speed_and_weights(self):
        rep = equivariant_confluence_compare(
            EquivariantSpec((0.0, 0.5), z=1 + 0.3j), D=4, Q_samples=(0.2, 0.1 + 0.2j)
        )
        assert rep.max_error < 1e-4
        rep = equivariant_confluence_compare(
            EquivariantSpec((0.1 + 0.05j, 0.6), z=1.0), D=4, Q_samples=(0.2,)
        )
        assert rep.max_error < 1e-4

    def test_scaling_limit_from_the_proof(self):
        # lim (1-q)^(d(N+1)) / prod (1 - q^r Lam_j/Lam_i) = prod 1/(lam_i - lam_j + r z)
        spec = EquivariantSpec((0.0, 0.4, 0.9), z=1.0)
        q0, i, d = 0.8, 1, 2

        def lhs(t):
            q = q0**t
            Lam = [spec.Lambda(j, q) for j in range(3)]
            acc = (1 - q) ** (d * 3)
            for r in range(1, d + 1):
                for j in range(3):
                    acc /= 1 - q**r * Lam[j] / Lam[i]
            return acc

        vals = [lhs(2.0**-k) for k in (10, 11, 12)]
        rich = 2 * vals[-1] - vals[-2]
        prod = 1.0
        for r in range(1, d + 1):
            for j in range(3):
                prod *= spec.lambdas[i] - spec.lambdas[j] + r
        assert abs(rich - 1 / prod) < 1e-8


class TestQuantumRings:
    def test_relation_degree(self):
        assert quantum_reduce(3, 2) == (1, 0)

    def test_iterate(self):
        assert quantum_reduce(6, 2) == (2, 0)

    def test_below_relation(self):
        assert quantum_reduce(2, 2) == (0, 2)

    @pytest.mark.parametrize("N", [0, 1, 2, 3])
    def test_all_checks_pass(self, N):
        assert all(ok for _, ok in small_quantum_ring_checks(N))
