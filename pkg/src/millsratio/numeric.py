"""Certified numerics for the Mills ratio R(t) = Phibar(t) / phi(t).

Every real-valued result is a :class:`BigReal`: a midpoint plus an error bound
that comes from outward-rounded interval arithmetic (a private
``mpmath.ctx_iv`` context per call, so no global precision is touched).

R is evaluated from two regimes:

* ``t <= T_SWITCH``:  R(t) = sqrt(pi/2) e^{t^2/2} - sum_n t^{2n+1} / (2n+1)!!
  with a geometric bound on the series tail;
* ``t > T_SWITCH``:   consecutive continued-fraction convergents, which sit on
  opposite sides of R, pinned down until their gap is below the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import libmp
from mpmath.ctx_iv import MPIntervalContext

from .errors import DomainError, NonConvergence, PrecisionUnachievable
from .exact import as_rational, poly_eval
from .laplace import laplace_P, laplace_Q

__all__ = [
    "T_SWITCH",
    "GUARD_BITS",
    "MIN_PREC",
    "BigReal",
    "Bracket",
    "normal_pdf",
    "normal_upper_tail",
    "mills_ratio",
    "mills_ratio_laplace_integral",
    "bracket",
    "cf_convergent",
    "convergent_via_polys",
    "asymptotic_partial_sum",
    "mills_derivative",
    "taylor_shift_check",
    "digits_to_bits",
    "t_grid",
]

T_SWITCH = Fraction(4)
GUARD_BITS = 24
MIN_PREC = 64
MAX_SERIES_TERMS = 200_000
MAX_CF_DEPTH = 200_000
MAX_RETRIES = 6


def digits_to_bits(digits: int) -> int:
    return max(MIN_PREC, math.ceil(digits * math.log2(10)) + 1)


def _raw_to_fraction(raw) -> Fraction:
    p, q = libmp.to_rational(raw)
    return Fraction(int(p), int(q))


def _fraction_up(x: Fraction, bits: int = 64) -> mpmath.mpf:
    """An mpf >= x (ceiling rounding)."""
    return mpmath.mp.make_mpf(libmp.from_rational(x.numerator, x.denominator, bits, libmp.round_ceiling))


@dataclass(frozen=True)
class BigReal:
    """A real number known to lie within ``err_bound`` of ``value``."""

    value: mpmath.mpf
    precision_bits: int
    err_bound: mpmath.mpf

    def __post_init__(self):
        if self.err_bound < 0:
            raise ValueError("err_bound must be nonnegative")
        if self.precision_bits < MIN_PREC:
            raise ValueError(f"precision_bits must be >= {MIN_PREC}")

    @classmethod
    def from_interval(cls, x, precision_bits: int) -> BigReal:
        lo_raw, hi_raw = x._mpi_
        if lo_raw in (libmp.fninf, libmp.finf, libmp.fnan) or hi_raw in (
            libmp.fninf,
            libmp.finf,
            libmp.fnan,
        ):
            raise PrecisionUnachievable("interval evaluation overflowed")
        lo, hi = _raw_to_fraction(lo_raw), _raw_to_fraction(hi_raw)
        return cls.from_bounds(lo, hi, precision_bits)

    @classmethod
    def from_bounds(cls, lo: Fraction, hi: Fraction, precision_bits: int) -> BigReal:
        if lo > hi:
            raise ValueError("empty enclosure")
        mid = (lo + hi) / 2
        bits = max(precision_bits + GUARD_BITS, 64)
        value = mpmath.mp.make_mpf(libmp.from_rational(mid.numerator, mid.denominator, bits, libmp.round_nearest))
        v = _raw_to_fraction(value._mpf_)
        err = max(hi - v, v - lo)
        return cls(value, precision_bits, _fraction_up(err))

    @property
    def lower(self) -> Fraction:
        return _raw_to_fraction(self.value._mpf_) - _raw_to_fraction(self.err_bound._mpf_)

    @property
    def upper(self) -> Fraction:
        return _raw_to_fraction(self.value._mpf_) + _raw_to_fraction(self.err_bound._mpf_)

    def certainly_gt(self, x) -> bool:
        return self.lower > as_rational(x)

    def certainly_lt(self, x) -> bool:
        return self.upper < as_rational(x)

    def contains(self, x) -> bool:
        return self.lower <= as_rational(x) <= self.upper

    def to_interval(self, ctx: MPIntervalContext):
        return _iv_from_bounds(ctx, self.lower, self.upper)

    def decimal(self, digits: int) -> str:
        return mpmath.nstr(self.value, digits, strip_zeros=False, min_fixed=-math.inf, max_fixed=math.inf)

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        return f"BigReal({mpmath.nstr(self.value, 20)} ± {mpmath.nstr(self.err_bound, 3)}, prec={self.precision_bits})"


@dataclass(frozen=True)
class Bracket:
    """Exact rationals with lower < R(t) < upper, from convergents of order 2j and 2j+1."""

    t: Fraction
    depth: int
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"degenerate bracket at t={self.t}, depth={self.depth}")

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower


# ---------------------------------------------------------------------------
# interval helpers


def _ctx(bits: int) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.prec = bits
    return ctx


def _iv_rational(ctx, x: Fraction):
    if x.denominator == 1:
        return ctx.mpf(x.numerator)
    return ctx.mpf(x.numerator) / ctx.mpf(x.denominator)


def _iv_from_bounds(ctx, lo: Fraction, hi: Fraction):
    a = _iv_rational(ctx, lo)
    b = _iv_rational(ctx, hi)
    return ctx.mpf([a.a, b.b])


def _width_bits(x) -> float:
    """log2 of the interval width (-inf for a point)."""
    d = x.b - x.a
    if d == 0:
        return -math.inf
    return float(mpmath.log(mpmath.mpf(d.a), 2))


def _series_mills(ctx, t: Fraction, wp: int):
    """R(t) on the series branch; valid for every real t."""
    tt = _iv_rational(ctx, t)
    t2 = tt * tt
    head = ctx.sqrt(ctx.pi / 2) * ctx.exp(t2 / 2)
    if t == 0:
        return head
    term = tt
    total = ctx.mpf(0)
    eps = ctx.mpf(2) ** (-wp)
    t2_hi = t2.b
    n = 0
    while True:
        total += term
        # ratio of consecutive terms is t^2/(2n+3); once it is <= 1/2 the tail is
        # bounded by |next| / (1 - ratio) <= 2 |next|
        nxt = term * t2 / (2 * n + 3)
        ratio = t2_hi / (2 * n + 5)
        if ratio <= 0.5:
            bound = abs(nxt).b * 2
            if bound < eps.a:
                tail = ctx.mpf([-bound, bound])
                return head - (total + tail)
        term = nxt
        n += 1
        if n > MAX_SERIES_TERMS:
            raise PrecisionUnachievable(f"series for R({t}) did not settle in {MAX_SERIES_TERMS} terms")


def _scaled_convergent_terms(t: Fraction):
    """Yield (k, Q_{k-1}(t)/P_k(t)) for k = 1, 2, ... via integer three-term recurrences."""
    a, b = t.numerator, t.denominator
    b2 = b * b
    # Ptilde_k = b^k P_k(t), Qtilde_k = b^k Q_k(t)
    p_prev, p_cur = 1, a  # k = 0, 1
    q_prev2, q_prev = 0, 1  # Q_{-1}, Q_0
    k = 1
    while True:
        yield k, Fraction(b * q_prev, p_cur)
        # advance P to k+1 and Q to k
        p_prev, p_cur = p_cur, a * p_cur + k * b2 * p_prev
        q_prev2, q_prev = q_prev, a * q_prev + k * b2 * q_prev2
        k += 1


def _cf_mills_bounds(t: Fraction, target: Fraction) -> tuple[Fraction, Fraction, int]:
    """Adjacent convergents enclosing R(t) with gap <= target."""
    prev = None
    for k, c in _scaled_convergent_terms(t):
        if prev is not None:
            lo, hi = (prev, c) if prev < c else (c, prev)
            if hi - lo <= target:
                return lo, hi, k
        prev = c
        if k > MAX_CF_DEPTH:
            raise PrecisionUnachievable(f"continued fraction for R({t}) needs depth > {MAX_CF_DEPTH}")
    raise AssertionError("unreachable")


def _mills_iv(ctx, t: Fraction, wp: int):
    if t > T_SWITCH:
        lo, hi, _ = _cf_mills_bounds(t, Fraction(1, 1 << wp))
        return _iv_from_bounds(ctx, lo, hi)
    return _series_mills(ctx, t, wp)


def _check_prec(prec: int):
    if prec < MIN_PREC:
        raise DomainError(f"precision must be >= {MIN_PREC} bits, got {prec}")


def _refine(build, prec: int, scale_bits: float = 0.0) -> BigReal:
    """Evaluate ``build(ctx, wp)`` with growing working precision until the
    result's width is below 2^-prec relative to max(1, |value|)."""
    _check_prec(prec)
    extra = GUARD_BITS + max(0, math.ceil(scale_bits))
    for _ in range(MAX_RETRIES):
        wp = prec + extra
        ctx = _ctx(wp)
        x = build(ctx, wp)
        mag = max(1.0, float(abs(x).b))
        if _width_bits(x) <= -prec + math.log2(mag) - 1:
            return BigReal.from_interval(x, prec)
        extra = 2 * extra + 32
    raise PrecisionUnachievable(f"could not reach {prec} bits after {MAX_RETRIES} refinements")


# ---------------------------------------------------------------------------
# public evaluators


def normal_pdf(t, prec: int = 200) -> BigReal:
    t = as_rational(t)

    def build(ctx, wp):
        tt = _iv_rational(ctx, t)
        return ctx.exp(-tt * tt / 2) / ctx.sqrt(2 * ctx.pi)

    return _refine(build, prec)


def mills_ratio(t, prec: int = 200) -> BigReal:
    """R(t) with a certified error bound (absolute, scaled by max(1, |R|))."""
    t = as_rational(t)
    cancel = float(t * t) / 2 * math.log2(math.e) if t > 0 else 0.0
    return _refine(lambda ctx, wp: _mills_iv(ctx, t, wp), prec, cancel)


def normal_upper_tail(t, prec: int = 200) -> BigReal:
    """Phibar(t) = integral of the standard normal density over (t, inf)."""
    t = as_rational(t)
    if t < 0:
        pos = normal_upper_tail(-t, prec + 2)

        def build(ctx, wp):
            return 1 - pos.to_interval(ctx)

        return _refine(build, prec)

    cancel = float(t * t) / 2 * math.log2(math.e) if t <= T_SWITCH else 0.0

    def build(ctx, wp):
        tt = _iv_rational(ctx, t)
        r = _mills_iv(ctx, t, wp)
        return r * ctx.exp(-tt * tt / 2) / ctx.sqrt(2 * ctx.pi)

    return _refine(build, prec, cancel)


def mills_ratio_laplace_integral(t, dps: int = 20) -> mpmath.mpf:
    """Uncertified cross-check: R(t) = integral_0^inf exp(-t x - x^2/2) dx."""
    t = as_rational(t)
    with mpmath.workdps(dps + 5):
        tv = mpmath.mpf(t.numerator) / t.denominator
        val = mpmath.quad(lambda x: mpmath.exp(-tv * x - x * x / 2), [0, 1, mpmath.inf])
    return +val


def _require_positive(t: Fraction):
    if t <= 0:
        raise DomainError(f"t must be > 0, got {t}")


def convergent_via_polys(k: int, t) -> Fraction:
    """Q_{k-1}(t) / P_k(t) from the stored polynomials."""
    t = as_rational(t)
    return poly_eval(laplace_Q(k - 1), t) / poly_eval(laplace_P(k), t)


def bracket(t, depth: int) -> Bracket:
    """Q_{2j-1}(t)/P_{2j}(t) < R(t) < Q_{2j}(t)/P_{2j+1}(t) for j = depth."""
    t = as_rational(t)
    _require_positive(t)
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    j = depth
    den_lo = poly_eval(laplace_P(2 * j), t)
    den_hi = poly_eval(laplace_P(2 * j + 1), t)
    assert den_lo > 0 and den_hi > 0
    return Bracket(
        t=t,
        depth=j,
        lower=poly_eval(laplace_Q(2 * j - 1), t) / den_lo,
        upper=poly_eval(laplace_Q(2 * j), t) / den_hi,
    )


def cf_convergent(k: int, t) -> Fraction:
    """Depth-k truncation 1/(t + 1/(t + 2/(t + ... + (k-1)/t))), evaluated bottom-up."""
    t = as_rational(t)
    _require_positive(t)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    x = t
    for i in range(k - 1, 0, -1):
        x = t + i / x
    return 1 / x


def asymptotic_partial_sum(t, j: int) -> Fraction:
    """S_j(t) = sum_{i=0}^{j} (-1)^i (2i-1)!! / t^{2i+1}."""
    t = as_rational(t)
    _require_positive(t)
    if j < 0:
        raise DomainError(f"j must be >= 0, got {j}")
    total = Fraction(0)
    dfact = 1  # (2i-1)!!
    inv_t2 = 1 / (t * t)
    power = 1 / t
    for i in range(j + 1):
        if i:
            dfact *= 2 * i - 1
            power *= inv_t2
        total += (-1) ** i * dfact * power
    return total


def mills_derivative(k: int, t, prec: int = 200) -> BigReal:
    """k-th derivative of R at t, as R(t) P_k(t) - Q_{k-1}(t).

    The subtraction cancels roughly log2(|R P_k(t)|) bits, which are added to
    the working precision up front.
    """
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    t = as_rational(t)
    pk = poly_eval(laplace_P(k), t)
    qk = poly_eval(laplace_Q(k - 1), t)
    scale = math.log2(abs(pk)) if pk else 0.0
    if t > 0:
        cancel = 0.0
    else:
        cancel = float(t * t) / 2 * math.log2(math.e)

    def build(ctx, wp):
        r = _mills_iv(ctx, t, wp)
        return r * _iv_rational(ctx, pk) - _iv_rational(ctx, qk)

    return _refine(build, prec, scale + cancel + 8)


def taylor_shift_check(s, t, order: int, prec: int = 200, window: int = 4) -> BigReal:
    """|R(s+t) - sum_{k<=order} R^{(k)}(t) s^k / k!| as a certified real.

    Raises :class:`NonConvergence` when the residual grows over the last
    ``window`` orders while still above the working noise floor.
    """
    s, t = as_rational(s), as_rational(t)
    _require_positive(t)
    if order < 0:
        raise DomainError("order must be >= 0")
    _check_prec(prec)
    # partial_N = R(t) A_N - B_N with exact A_N = sum P_k s^k/k!, B_N = sum Q_{k-1} s^k/k!
    a_parts, b_parts = [], []
    a = b = Fraction(0)
    fact = 1
    for k in range(order + 1):
        if k:
            fact *= k
        w = s**k / fact
        a += poly_eval(laplace_P(k), t) * w
        b += poly_eval(laplace_Q(k - 1), t) * w
        a_parts.append(a)
        b_parts.append(b)
    scale = math.log2(max(abs(a), abs(b), 1))
    wp = prec + GUARD_BITS + math.ceil(scale)
    ctx = _ctx(wp)
    r_t = _mills_iv(ctx, t, wp)
    r_st = _mills_iv(ctx, s + t, wp)
    noise = ctx.mpf(2) ** (-prec)

    def residual(n):
        return abs(r_st - (r_t * _iv_rational(ctx, a_parts[n]) - _iv_rational(ctx, b_parts[n])))

    final = residual(order)
    if order >= window:
        earlier = residual(order - window)
        if final.a > earlier.b and final.a > noise.b:
            raise NonConvergence(
                f"Taylor residual grew from ~{mpmath.nstr(earlier.mid, 3)} to ~{mpmath.nstr(final.mid, 3)}"
            )
    return BigReal.from_interval(final, prec)


def t_grid(start, stop, count: int, spacing: str = "linear", sig_digits: int = 12) -> list[Fraction]:
    """Grid of rational evaluation points.

    Linear grids are exact.  Log-spaced interior points are rounded to
    ``sig_digits`` significant decimal digits; the endpoints are kept exact.
    """
    start, stop = as_rational(start), as_rational(stop)
    if count < 1:
        raise DomainError("grid count must be >= 1")
    if count == 1:
        return [start]
    if spacing == "linear":
        step = (stop - start) / (count - 1)
        return [start + i * step for i in range(count)]
    if spacing != "log":
        raise DomainError(f"unknown spacing {spacing!r}")
    if start <= 0 or stop <= 0:
        raise DomainError("log spacing needs positive endpoints")
    with mpmath.workdps(sig_digits + 10):
        a = mpmath.log(mpmath.mpf(start.numerator) / start.denominator)
        b = mpmath.log(mpmath.mpf(stop.numerator) / stop.denominator)
        pts = [start]
        for i in range(1, count - 1):
            x = mpmath.exp(a + (b - a) * i / (count - 1))
            pts.append(Fraction(mpmath.nstr(x, sig_digits, min_fixed=-math.inf, max_fixed=math.inf)))
        pts.append(stop)
    return pts
