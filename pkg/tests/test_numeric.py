from fractions import Fraction

import mpmath
import pytest

from millsratio.errors import DomainError, NonConvergence, PrecisionUnachievable
from millsratio.exact import poly_eval
from millsratio.laplace import laplace_P, laplace_Q
from millsratio import numeric as N

# Oracle values from mpmath erfc at 60 digits, frozen.
PHIBAR_1 = Fraction("0.158655253931457051414767454367962077522087033273395609012606")
R_1 = Fraction("0.655679542418798471543871230730811283399282332870462028053686")
R_0 = Fraction("1.25331413731550025120788264240552262650349337030496915831496")
D3R_1 = Fraction("-0.377281830324806113824515077076754866402870668518151887785255")
R_11_10 = Fraction("0.622743654868833549878215644418604852587444460495257368260306")
ORACLE_SLOP = Fraction(1, 10**55)


def oracle_R(t, dps=80):
    with mpmath.workdps(dps):
        t = mpmath.mpf(t.numerator) / t.denominator if isinstance(t, Fraction) else mpmath.mpf(t)
        return mpmath.erfc(t / mpmath.sqrt(2)) / 2 / mpmath.npdf(t)


def near(x: N.BigReal, ref: Fraction, slop=ORACLE_SLOP):
    return x.lower - slop <= ref <= x.upper + slop


def test_upper_tail_examples():
    assert N.normal_upper_tail(0).contains(Fraction(1, 2))
    assert near(N.normal_upper_tail(1), PHIBAR_1)
    assert near(N.normal_upper_tail(-1), 1 - PHIBAR_1)


def test_mills_examples():
    assert near(N.mills_ratio(0), R_0)
    assert near(N.mills_ratio(1), R_1)
    r10 = N.mills_ratio(10)
    assert Fraction(10, 101) < r10.lower and r10.upper < Fraction(1, 10)


def test_error_bound_meets_precision():
    for t in ["-3", "0", "1/20", "1", "4", "41/10", "12"]:
        r = N.mills_ratio(t, 150)
        assert r.err_bound <= mpmath.mpf(2) ** -150 * max(1, abs(r.value))


@pytest.mark.parametrize("t", ["-5/2", "-1", "0", "1/3", "2", "39/10", "4", "401/100", "5", "15", "20", "50"])
def test_mills_matches_erfc_oracle(t):
    r = N.mills_ratio(t, 200)
    with mpmath.workdps(80):
        ref = oracle_R(Fraction(t))
        assert abs(mpmath.mpf(r.value) - ref) <= r.err_bound + mpmath.mpf(10) ** -70


def test_both_regimes_agree_at_switch():
    t = N.T_SWITCH + Fraction(1, 10**9)
    a, b = N.mills_ratio(N.T_SWITCH, 200), N.mills_ratio(t, 200)
    assert abs(float(a.value) - float(b.value)) < 1e-9


def test_laplace_integral_crosscheck():
    for t in [Fraction(0), Fraction(1), Fraction(3)]:
        assert abs(float(N.mills_ratio_laplace_integral(t)) - float(N.mills_ratio(t).value)) < 1e-15


def test_precision_guard():
    with pytest.raises(DomainError):
        N.mills_ratio(1, 32)


def test_iteration_ceiling(monkeypatch):
    monkeypatch.setattr(N, "MAX_CF_DEPTH", 5)
    with pytest.raises(PrecisionUnachievable):
        N.mills_ratio(5, 200)
    monkeypatch.setattr(N, "MAX_SERIES_TERMS", 3)
    with pytest.raises(PrecisionUnachievable):
        N.mills_ratio(2, 200)


def test_bigreal_validation():
    with pytest.raises(ValueError):
        N.BigReal(mpmath.mpf(1), 64, mpmath.mpf(-1))
    with pytest.raises(ValueError):
        N.BigReal(mpmath.mpf(1), 32, mpmath.mpf(0))


def test_bracket_examples():
    b = N.bracket(1, 1)
    assert (b.lower, b.upper) == (Fraction(1, 2), Fraction(3, 4))
    b = N.bracket(1, 2)
    assert (b.lower, b.upper) == (Fraction(3, 5), Fraction(9, 13))
    assert N.bracket(1, 3).lower == Fraction(12, 19)
    b = N.bracket(10, 1)
    assert (b.lower, b.upper) == (Fraction(10, 101), Fraction(51, 515))


@pytest.mark.parametrize("t", [0, -1])
def test_bracket_domain(t):
    with pytest.raises(DomainError):
        N.bracket(t, 1)


def test_bracket_depth_domain():
    with pytest.raises(DomainError):
        N.bracket(1, 0)


@pytest.mark.parametrize("t", ["1/20", "1/2", "1", "3", "7", "20"])
def test_sandwich_and_nesting(t):
    t = Fraction(t)
    r = N.mills_ratio(t, 200)
    prev = None
    for j in range(1, 21):
        b = N.bracket(t, j)
        assert b.lower < r.lower and r.upper < b.upper
        assert 10 * (r.upper - r.lower) < b.width
        if prev:
            assert b.lower > prev.lower and b.upper < prev.upper
        prev = b


def test_cf_examples():
    assert N.cf_convergent(1, 2) == Fraction(1, 2)
    assert N.cf_convergent(3, 1) == Fraction(3, 4)
    assert N.cf_convergent(5, 1) == Fraction(9, 13)
    assert [N.cf_convergent(k, 1) for k in range(1, 7)] == [1, Fraction(1, 2), Fraction(3, 4), Fraction(3, 5), Fraction(9, 13), Fraction(12, 19)]
    with pytest.raises(DomainError):
        N.cf_convergent(3, 0)


@pytest.mark.parametrize("t", ["1/3", "1", "7/2", "10", "123/7"])
def test_cf_equals_polynomial_ratio(t):
    for k in range(1, 51):
        assert N.cf_convergent(k, t) == poly_eval(laplace_Q(k - 1), t) / poly_eval(laplace_P(k), t)


def test_asymptotic_examples():
    assert N.asymptotic_partial_sum(2, 0) == Fraction(1, 2)
    assert N.asymptotic_partial_sum(2, 1) == Fraction(3, 8)
    assert N.asymptotic_partial_sum(2, 3) == Fraction(45, 128)


@pytest.mark.parametrize("t", [5, 7, 12])
def test_asymptotic_envelope(t):
    t = Fraction(t)
    r = N.mills_ratio(t, 200)
    odd = 1
    for j in range(6):
        odd *= 2 * j + 1
        s, s1 = N.asymptotic_partial_sum(t, j), N.asymptotic_partial_sum(t, j + 1)
        assert min(s, s1) < r.lower and r.upper < max(s, s1)
        assert abs(r.upper - s) <= odd / t ** (2 * j + 3)


def test_elementary_bound():
    for t in ["1/10", "1", "5", "17"]:
        assert N.normal_upper_tail(t).upper < N.normal_pdf(t).lower / Fraction(t)


def test_derivative_examples():
    assert N.mills_derivative(1, 0).contains(-1)
    assert near(N.mills_derivative(2, 0), R_0)
    assert near(N.mills_derivative(3, 1), D3R_1)
    assert near(N.mills_derivative(0, 1), R_1)


def test_derivative_matches_numerical_differentiation():
    with mpmath.workdps(50):
        for k in range(1, 6):
            # diff raises the working precision internally, so the integrand must not pin it
            ref = mpmath.diff(lambda x: mpmath.erfc(x / mpmath.sqrt(2)) / 2 / mpmath.npdf(x), mpmath.mpf(3) / 2, k)
            got = N.mills_derivative(k, Fraction(3, 2), 128)
            assert abs(got.value - ref) < mpmath.mpf(10) ** -30


def test_derivative_signs_small_grid():
    for t in ["0", "1/10", "2", "20"]:
        for k in range(13):
            d = N.mills_derivative(k, t, 200)
            assert (d.lower > 0) if k % 2 == 0 else (d.upper < 0)


def test_taylor_examples():
    assert N.taylor_shift_check(0, 1, 7).contains(0)
    assert N.taylor_shift_check(Fraction(1, 10), 1, 20).upper < Fraction(1, 10**15)
    assert N.taylor_shift_check(Fraction(1, 2), 2, 30).upper < Fraction(1, 10**12)


def test_taylor_uses_oracle_value():
    assert N.mills_ratio(Fraction(11, 10)).lower - ORACLE_SLOP <= R_11_10 <= N.mills_ratio(Fraction(11, 10)).upper + ORACLE_SLOP


def test_taylor_nonconvergence():
    # a large shift makes the partial sums still grow at N = 10
    with pytest.raises(NonConvergence):
        N.taylor_shift_check(8, 1, 10)


def test_grid():
    g = N.t_grid("0.05", 20, 50, "log")
    assert len(g) == 50 and g[0] == Fraction(1, 20) and g[-1] == 20
    assert all(a < b for a, b in zip(g, g[1:]))
    assert N.t_grid(1, 2, 3) == [1, Fraction(3, 2), 2]
    with pytest.raises(DomainError):
        N.t_grid(1, 2, 0)
