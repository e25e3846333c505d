import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from phase_contract.contraction import (
    ContractionScale,
    asymptotic_term,
    cg_coupling_table,
    cg_recursion_max_residual,
    cg_recursion_residual,
    contracted_operators,
    contracted_rotation,
    contraction_sum,
    convergence_verdict,
    coupling_order_residual,
    diagonal_limit,
    epsilon_sweep,
    kernel_block_compare,
    lambda_recursion,
    laguerre_integral,
    riemann_sum,
    term_delta,
    term_delta_exact,
    term_row,
)
from phase_contract.errors import AngleOverflowWarning, DomainError, PreconditionError
from phase_contract.numbers import HalfInt, SqrtRational, half
from phase_contract.particle_kernel import FockSpace, displacement
from phase_contract.special_functions import laguerre, laguerre_sum_exact
from phase_contract.spin_kernel import SignPattern, kernel_diagonal, pi_s

from conftest import max_abs


def alternating(s):
    s = half(s)
    return SignPattern(s, tuple((-1) ** l for l in range(s.twice_value + 1)))


def all_minus(s):
    s = half(s)
    return SignPattern(s, (1,) + (-1,) * s.twice_value)


class TestOperators:
    def test_scale(self):
        sc = ContractionScale.for_spin(10)
        assert 2 * sc.c**2 * 10 == pytest.approx(1.0)
        with pytest.raises(PreconditionError):
            ContractionScale(HalfInt(20), 0.5)

    def test_spectrum(self):
        Ap, Am, Az = contracted_operators(10)
        assert Az[0, 0] == pytest.approx(0.0, abs=1e-13)
        assert np.diag(Az).real == pytest.approx(np.arange(21), abs=1e-12)

    def test_commutators(self):
        s = HalfInt(100)
        Ap, Am, Az = contracted_operators(s)
        c2 = ContractionScale.for_spin(s).c ** 2
        assert max_abs(Az @ Ap - Ap @ Az, Ap) < 1e-10
        assert max_abs(Az @ Am - Am @ Az, -Am) < 1e-10
        assert max_abs(Am @ Ap - Ap @ Am, np.eye(101) - 2 * c2 * Az) < 1e-10

    def test_low_block_like_fock(self):
        Ap, Am, Az = contracted_operators(2000)
        from phase_contract.particle_kernel import fock_operators

        a, ad, _ = fock_operators(FockSpace(4))
        assert max_abs(Ap[:5, :5], ad) < 2e-3
        assert max_abs(Am[:5, :5], a) < 2e-3

    def test_zero_spin_rejected(self):
        with pytest.raises(DomainError):
            contracted_operators(0)


class TestRotation:
    def test_identity(self):
        assert max_abs(contracted_rotation(20, 0), np.eye(41)) < 1e-15

    def test_unitary(self):
        U = contracted_rotation(30, 0.4 - 0.9j)
        assert max_abs(U @ U.conj().T, np.eye(61)) < 1e-12

    def test_tends_to_displacement(self):
        U = contracted_rotation(200, 0.5, rows=range(5))
        T = displacement(FockSpace(4), 0.5)
        assert max_abs(U[:, :5], T) < 0.02

    def test_angle_warning(self):
        with pytest.warns(AngleOverflowWarning):
            contracted_rotation(1, 3.0)


class TestTerms:
    def test_first_term(self):
        for s in (half("1/2"), 1, 2, 7):
            s = half(s)
            assert term_delta_exact(s, 0, 0) == SqrtRational.from_rational(Fraction(1, s.twice_value + 1))

    def test_float_matches_exact(self):
        s = HalfInt(12)
        for n in (0, 1, 3):
            row = term_row(s, n)
            assert row == pytest.approx([float(term_delta_exact(s, l, n)) for l in range(13)], rel=1e-10,
                                        abs=1e-15)

    def test_asymptotic_form(self):
        assert term_delta(200, 20, 0) == pytest.approx(asymptotic_term(200, 20), rel=5 / 200)

    def test_lambda_factorization(self):
        s, n, l = 200, 2, 20
        x = l * (l + 1) / 401
        ratio = term_delta(s, l, n) / term_delta(s, l, 0)
        assert ratio == pytest.approx((-1) ** n * laguerre(n, x), rel=10 / s)

    def test_range_checks(self):
        with pytest.raises(DomainError):
            term_delta(2, 5, 0)

    @pytest.mark.parametrize("ts", range(1, 21))
    def test_coupling_order_exact(self, ts):
        s = HalfInt(ts)
        for n in range(ts + 1):
            assert all(d.numerator == 0 for d in coupling_order_residual(s, n, exact=True))

    def test_coupling_order_float(self):
        assert coupling_order_residual(300, 3) < 1e-12


class TestCGRecursion:
    @pytest.mark.parametrize("ts", [1, 2, 5, 8])
    def test_exact(self, ts):
        s = HalfInt(ts)
        for l in range(ts + 1):
            for m in s.magnetic_range():
                assert cg_recursion_residual(s, l, m, exact=True) == 0

    def test_float(self):
        assert cg_recursion_max_residual(HalfInt(40)) < 1e-10

    def test_table_matches_pointwise(self):
        s = HalfInt(6)
        C = cg_coupling_table(s)
        assert C.shape[0] == 7

    def test_m_range(self):
        with pytest.raises(DomainError):
            cg_recursion_residual(1, 0, 2)


class TestContractionSum:
    def test_near_two(self):
        t = contraction_sum(100, 0)
        assert t.error < 0.05
        assert t.partial_sums[-1] == t.total

    @pytest.mark.parametrize("n", range(4))
    def test_error_halves(self, n):
        e = [contraction_sum(s, n).error for s in (100, 200, 400)]
        for a, b in zip(e, e[1:]):
            assert 0.3 <= b / a <= 0.7

    def test_alternating_does_not_converge(self):
        for s in (50, 100, 200, 400):
            assert contraction_sum(s, 0, alternating(s)).error > 0.5

    def test_guard(self):
        with pytest.raises(PreconditionError):
            contraction_sum(20, 3)

    def test_pattern_mismatch(self):
        with pytest.raises(DomainError):
            contraction_sum(100, 0, SignPattern.all_plus(50))

    def test_riemann_sum(self):
        for n in range(3):
            assert riemann_sum(400, n) == pytest.approx(2.0, rel=10 / 400)


class TestLambda:
    def test_zero(self):
        assert lambda_recursion(5, 3.3)[0] == 1.0

    def test_first(self):
        assert lambda_recursion(1, 2.0)[1] == pytest.approx(1.0)

    def test_matches_laguerre(self):
        lam = lambda_recursion(30, 3.7)
        for n in range(16):
            assert lam[n] == pytest.approx((-1) ** n * laguerre_sum_exact(n, 3.7), rel=1e-10)


class TestLaguerreIntegral:
    @pytest.mark.parametrize("n,t,expected", [(0, 2.0, 2.0), (1, 2.0, -2.0), (3, 1.0, 0.0)])
    def test_examples(self, n, t, expected):
        assert laguerre_integral(n, t) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("n", range(8))
    def test_closed_form(self, n):
        assert laguerre_integral(n, 0.5) == pytest.approx(0.5 * 0.5**n, rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            laguerre_integral(2, 0.0)


class TestDiagonalLimit:
    def test_ground(self):
        vals = [diagonal_limit(s, 0) for s in (50, 100, 200, 400)]
        assert all(abs(b - 2) < abs(a - 2) for a, b in zip(vals, vals[1:]))

    def test_sign_of_first(self):
        v = diagonal_limit(200, 1)
        assert v < 0 and abs(v + 2) < 0.05

    def test_half_spin(self):
        s = half("1/2")
        assert diagonal_limit(s, 0) == pytest.approx(pi_s(s, SignPattern.all_plus(s))[0, 0].real)


class TestBlockCompare:
    def test_origin_is_diagonal(self):
        s = HalfInt(100)
        d = kernel_diagonal(s, SignPattern.all_plus(s), range(4))
        ref = np.abs(d - 2 * (-1.0) ** np.arange(4)).max()
        assert kernel_block_compare(s, 0.0, 3) == pytest.approx(ref, abs=1e-12)

    def test_decreasing(self):
        assert kernel_block_compare(400, 0.5, 3) < kernel_block_compare(100, 0.5, 3)

    def test_all_minus_stays_far(self):
        for s in (100, 200):
            assert kernel_block_compare(s, 0.5, 3, all_minus(s)) > 0.5

    def test_block_guard(self):
        with pytest.raises(PreconditionError):
            kernel_block_compare(20, 0.5, 3)

    def test_n_max_guard(self):
        with pytest.raises(PreconditionError):
            kernel_block_compare(100, 0.5, 3, n_max=2)


class TestSweep:
    def test_verdict_rule(self):
        assert convergence_verdict([0.1, 0.05, 0.03, 0.01])
        assert not convergence_verdict([0.1, 0.05, 0.06, 0.01])
        assert not convergence_verdict([0.4, 0.3, 0.2, 0.1])
        with pytest.raises(PreconditionError):
            convergence_verdict([0.1, 0.05, 0.01])

    def test_all_plus_and_single_flip(self):
        s = HalfInt(4)
        pats = [SignPattern.all_plus(s), SignPattern.from_mask(s, "1000")]
        report = epsilon_sweep([50, 100, 200, 400], [0, 1, 2, 3], pats)
        verdicts = [e["verdict"] for e in report.entries]
        assert verdicts == ["CONVERGES", "NOT-CONVERGES"]
        js = report.to_json()
        assert js["patterns"][0]["mask"] == "0000"
        assert set(js["patterns"][0]["distances"]) == {"0", "1", "2", "3"}

    def test_thread_count_does_not_change_result(self, monkeypatch):
        pats = list(SignPattern.exhaustive(1))
        monkeypatch.setenv("PHASE_CONTRACT_THREADS", "1")
        a = epsilon_sweep([50, 100, 200, 400], [0, 1], pats).to_json()
        monkeypatch.setenv("PHASE_CONTRACT_THREADS", "4")
        b = epsilon_sweep([50, 100, 200, 400], [0, 1], pats).to_json()
        assert a == b
