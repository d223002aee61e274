from fractions import Fraction
from itertools import combinations
from math import comb, factorial

import mpmath
import pytest

from millsratio import identities as I
from millsratio.errors import DomainError, InstanceTooLarge
from millsratio.exact import IntPoly
from millsratio.laplace import laplace_P, p_coeff_closed

# sqrt(2 pi) e^2 (Phi(2) - Phi(1)) from mpmath.ncdf at 60 digits
IDENTITY_ONE_RHS = Fraction("2.51718260961453818741754739004943689599352955301010828101356")


def test_identity_one_rhs_matches_independent_oracle():
    rhs = I.identity_one_rhs(200)
    assert rhs.lower - Fraction(1, 10**55) <= IDENTITY_ONE_RHS <= rhs.upper + Fraction(1, 10**55)
    assert abs(float(rhs.value) - 2.51718) < 1e-5


@pytest.mark.parametrize("tol", [Fraction(1, 10**4), Fraction(1, 10**10), Fraction(1, 10**20)])
def test_identity_one(tol):
    rep = I.identity_one_verify(tol)
    assert rep.verified, rep.line()
    assert rep.residual.upper < tol
    assert rep.extras["tail"] < tol / 2


def test_identity_one_smaller_tolerance_needs_more_terms():
    assert I.identity_one_verify(1e-4).extras["order"] < I.identity_one_verify(1e-10).extras["order"]


def test_identity_one_tolerance_floor():
    with pytest.raises(DomainError):
        I.identity_one_verify(Fraction(1, 10**31))


def test_identity_one_terms_brute_force():
    # straight triple loop over (n, m, j) with Fractions
    order = 9
    ref = [Fraction(0)] * (order + 1)
    for n in range(order // 2 + 1):
        for m in range(order - 2 * n + 1):
            for j in range(n + 1):
                ref[m + 2 * n] += Fraction(factorial(n + m), factorial(m) * factorial(j) * factorial(m + 2 * n + 1 - j) * 2**n)
    assert I.identity_one_terms(order) == ref


def test_identity_one_reindexing_matches_q_generating_function():
    order = 30
    assert sum(I.identity_one_terms(order)) == I.qgen_partial(1, 1, order)


@pytest.mark.parametrize("n", [0, 1, 2, 17, 500])
def test_identity_two(n):
    assert I.identity_two_verify(n).verified


def test_identity_two_n2_by_hand():
    lhs, rhs = I.identity_two_sides(2)
    assert lhs == 1 - Fraction(2, 3) + Fraction(1, 5) == Fraction(8, 15)
    assert rhs == Fraction(16 * 4, 120) == Fraction(8, 15)


def test_identity_two_range_reports_range():
    rep = I.identity_two_range(30)
    assert rep.verified and rep.tested_range == "n=0..30"


@pytest.mark.parametrize("n,value", [(0, 1), (2, 8), (3, 48)])
def test_q_diagonal(n, value):
    assert I.q_diagonal_check(n).verified
    assert value == 2**n * factorial(n)


def test_q_diagonal_range():
    assert I.q_diagonal_range(60).verified


def test_p_tail_bound_dominates_actual_tail():
    for x, s, n in [(1, 1, 10), (2, Fraction(1, 2), 15), (0, 1, 20), (3, 2, 25)]:
        actual = sum(
            Fraction(sum(p_coeff_closed(k, m) * Fraction(x) ** m for m in range(k + 1))) * Fraction(s) ** k / factorial(k)
            for k in range(n + 1, n + 120)
        )
        assert actual <= I.p_tail_bound(x, s, n)


def test_q_coefficients_dominated_by_p():
    # the qgen and identity-one tail bounds rely on q_{k,m} <= (k+1) p_{k,m}
    from millsratio.laplace import q_coeff_closed

    for k in range(80):
        for m in range(k + 1):
            assert q_coeff_closed(k, m) <= (k + 1) * p_coeff_closed(k, m)


@pytest.mark.parametrize("s,t,bound", [(0, 1, None), (1, 1, Fraction(1, 10**20)), (Fraction(1, 2), -2, Fraction(1, 10**20))])
def test_pgen(s, t, bound):
    rep = I.pgen_check(s, t, 40)
    assert rep.verified, rep.line()
    if bound is not None:
        assert rep.residual.upper < bound
    else:
        assert rep.extras["lhs"] == 1


def test_pgen_oracle_exponentials():
    with mpmath.workdps(40):
        assert abs(mpmath.mpf(I.pgen_check(1, 1, 40).extras["lhs"].numerator) / I.pgen_check(1, 1, 40).extras["lhs"].denominator - mpmath.e ** 1.5) < 1e-20


@pytest.mark.parametrize("s,t", [(0, 1), (1, 1), (1, 0), (Fraction(-1, 2), Fraction(3, 2))])
def test_qgen(s, t):
    rep = I.qgen_check(s, t, 40)
    assert rep.verified, rep.line()
    assert rep.residual.upper < Fraction(1, 10**15)


def test_qgen_at_zero_shift_is_zero():
    assert I.qgen_check(0, 1).extras["lhs"] == 0


def test_qgen_t0_odd_series():
    rep = I.qgen_check(1, 0, 40)
    assert "odd-series match" in rep.detail


def test_qgen_reproduces_identity_one_value():
    rhs = I.qgen_check(1, 1, 40, 200).extras["rhs"]
    assert rhs.lower - Fraction(1, 10**55) <= IDENTITY_ONE_RHS <= rhs.upper + Fraction(1, 10**55)


def test_hermite_examples():
    assert I.hermite_poly(2) == IntPoly([-1, 0, 1])
    assert I.hermite_poly(0) == IntPoly([1])
    assert I.hermite_poly(4) == IntPoly([3, 0, -6, 0, 1])


def test_hermite_against_mpmath():
    # mpmath.hermite is the physicists' H; He_k(x) = 2^{-k/2} H_k(x / sqrt 2)
    with mpmath.workdps(40):
        for k in range(12):
            x = mpmath.mpf("0.7")
            ref = mpmath.mpf(2) ** (-mpmath.mpf(k) / 2) * mpmath.hermite(k, x / mpmath.sqrt(2))
            val = sum(c * x**m for m, c in enumerate(I.hermite_poly(k).coeffs))
            assert abs(val - ref) < mpmath.mpf(10) ** -30


@pytest.mark.parametrize("k", [0, 4, 7, 100])
def test_hermite_relation(k):
    assert I.hermite_relation_check(k).verified


def test_hermite_signs():
    for k in range(40):
        h, p = I.hermite_poly(k), laplace_P(k)
        for m in range(k + 1):
            if p[m]:
                assert (h[m] > 0) == ((k - m) // 2 % 2 == 0)


def _matchings_by_subsets(k, m):
    edges = list(combinations(range(k), 2))
    return sum(1 for es in combinations(edges, m) if len({v for e in es for v in e}) == 2 * m)


@pytest.mark.parametrize("k", range(0, 8))
def test_matching_counts_against_subset_enumeration(k):
    for m in range(k // 2 + 1):
        assert I.matching_count_bruteforce(k, m) == _matchings_by_subsets(k, m)


def test_matching_examples():
    assert I.matching_count_bruteforce(4, 2) == 3
    assert I.matching_count_bruteforce(9, 0) == 1
    assert I.matching_count_bruteforce(6, 3) == 15 == p_coeff_closed(6, 0)
    assert I.matching_counts(4) == (1, 6, 3)
    assert I.matching_count_bruteforce(8, 2) == 210


def test_matching_edge_counts():
    for k in range(2, 13):
        assert I.matching_count_bruteforce(k, 1) == comb(k, 2)


def test_matching_guards():
    with pytest.raises(InstanceTooLarge):
        I.matching_count_bruteforce(13, 1)
    with pytest.raises(DomainError):
        I.matching_count_bruteforce(5, 3)
    with pytest.raises(InstanceTooLarge):
        I.matching_identity_check(13)


@pytest.mark.parametrize("k", [1, 4, 8, 12])
def test_matching_identity(k):
    assert I.matching_identity_check(k).verified


def test_matching_polynomial_is_half_power_transform():
    assert I.matching_polynomial(8) == I.half_power_transform(laplace_P(8), 8) == IntPoly([1, 28, 210, 420, 105])


def test_report_invariants():
    with pytest.raises(ValueError):
        I.IdentityReport("x", "exact", "verified")
    with pytest.raises(ValueError):
        I.IdentityReport("x", "numeric", "verified")
    with pytest.raises(ValueError):
        I.IdentityReport("x", "fuzzy", "failed")
