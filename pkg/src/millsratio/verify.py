"""Check suites driving the ``verify`` subcommand.

Each check returns one :class:`IdentityReport`; a suite is a list of them.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from fractions import Fraction

import mpmath

from .identities import (
    IdentityReport,
    hermite_relation_range,
    identity_one_rhs,
    identity_one_terms,
    identity_one_verify,
    identity_two_range,
    matching_identity_range,
    pgen_check,
    q_diagonal_range,
    qgen_check,
    qgen_partial,
)
from .laplace import (
    beta_coeff,
    coeff_table,
    derivative_identity_check,
    expand_Q_in_P,
    laplace_P,
    laplace_Q,
    laplace_pair_recurrence,
    laplace_pair_three_term,
    ode_residual,
    p_coeff_closed,
    q_coeff_closed,
    qhat_sum_check,
    reconstruct_from_basis,
)
from .numeric import (
    asymptotic_partial_sum,
    bracket,
    cf_convergent,
    convergent_via_polys,
    digits_to_bits,
    mills_derivative,
    mills_ratio,
    mills_ratio_laplace_integral,
    normal_pdf,
    normal_upper_tail,
    t_grid,
    taylor_shift_check,
)

SUITES = ("polynomials", "identities", "numeric")

DEFAULT_POLY_K = 200
DEFAULT_GRID = dict(start=Fraction(1, 20), stop=Fraction(20), count=50, spacing="log")
DEFAULT_DEPTH = 20
DEFAULT_DIGITS = 60
CF_POINTS = (Fraction(1, 3), Fraction(1), Fraction(7, 2), Fraction(10))


def _exact(name, ok, rng, detail=""):
    return IdentityReport(name, "exact", "verified" if ok else "failed", detail, tested_range=rng)


def _scan(name: str, items: Iterable, pred: Callable, rng: str) -> IdentityReport:
    for x in items:
        if not pred(x):
            return _exact(name, False, rng, f"counterexample {x}")
    return _exact(name, True, rng)


# ---------------------------------------------------------------------------
# polynomial suite


def _routes_agree(k: int) -> bool:
    a, b = laplace_pair_recurrence(k), laplace_pair_three_term(k)
    if a != b:
        return False
    p, q = laplace_P(k), laplace_Q(k)
    return all(p[m] == p_coeff_closed(k, m) and q[m] == q_coeff_closed(k, m) for m in range(k + 1))


def route_equivalence(k_max: int) -> IdentityReport:
    return _scan("route_equivalence", range(1, k_max + 1), _routes_agree, f"k=1..{k_max}")


def coefficient_tables(k_max: int) -> IdentityReport:
    """Coefficient-level recurrences reproduce the closed forms, parity zeros and unit diagonal."""
    ptab, qtab, btab = coeff_table("P"), coeff_table("Q"), coeff_table("BETA")

    def ok(k):
        for m in range(k + 1):
            vals = (ptab.entry(k, m), qtab.entry(k, m), btab.entry(k, m))
            if vals != (p_coeff_closed(k, m), q_coeff_closed(k, m), beta_coeff(k, m)):
                return False
            if (k - m) % 2 and any(vals):
                return False
            if (k - m) % 2 == 0 and min(vals) <= 0:
                return False
        return vals == (1, 1, 1)

    return _scan("coefficient_tables", range(k_max + 1), ok, f"k=0..{k_max}")


def derivative_identity(k_max: int) -> IdentityReport:
    return _scan("derivative_identity", range(1, k_max + 1), derivative_identity_check, f"k=1..{k_max}")


def ode_identity(k_max: int) -> IdentityReport:
    return _scan("ode_residual", range(k_max + 1), lambda k: ode_residual(k).is_zero(), f"k=0..{k_max}")


def beta_expansion(k_max: int) -> IdentityReport:
    return _scan(
        "beta_expansion",
        range(k_max + 1),
        lambda k: reconstruct_from_basis(expand_Q_in_P(k)) == laplace_Q(k),
        f"k=0..{k_max}",
    )


def qhat_identity(k_max: int) -> IdentityReport:
    pairs = ((k, m) for k in range(k_max + 1) for m in range(k % 2, k + 1, 2))
    return _scan("qhat_sum", pairs, lambda km: qhat_sum_check(*km), f"k=0..{k_max}, m in J(k)")


def polynomial_suite(k_max: int = DEFAULT_POLY_K) -> list[IdentityReport]:
    return [
        route_equivalence(k_max),
        coefficient_tables(k_max),
        derivative_identity(k_max),
        ode_identity(k_max),
        beta_expansion(k_max),
        qhat_identity(k_max),
    ]


# ---------------------------------------------------------------------------
# identity suite


def identity_one_crosscheck(order: int = 40, prec: int = 128) -> IdentityReport:
    """Truncated Q-generating function at (1, 1) equals the truncated triple sum
    exactly, and its closed form equals the identity-one right-hand side."""
    exact_ok = qgen_partial(1, 1, order) == sum(identity_one_terms(order), Fraction(0))
    closed = qgen_check(1, 1, order, prec).extras["rhs"]
    rhs = identity_one_rhs(prec)
    overlap = closed.lower <= rhs.upper and rhs.lower <= closed.upper
    return _exact(
        "qgen_matches_identity_one",
        exact_ok and overlap,
        f"orders<= {order}",
        f"partial sums {'equal' if exact_ok else 'DIFFER'}, closed forms {'overlap' if overlap else 'DISJOINT'}",
    )


def identity_suite() -> list[IdentityReport]:
    return [
        identity_one_verify(Fraction(1, 10**12)),
        identity_one_crosscheck(),
        identity_two_range(500),
        q_diagonal_range(200),
        hermite_relation_range(50),
        matching_identity_range(10),
        pgen_check(0, 1, 40),
        pgen_check(1, 1, 40),
        pgen_check(Fraction(1, 2), -2, 40),
        qgen_check(0, 1, 40),
        qgen_check(1, 1, 40),
        qgen_check(1, 0, 40),
    ]


# ---------------------------------------------------------------------------
# numeric suite


def sandwich_check(grid, depth_max: int = DEFAULT_DEPTH, digits: int = DEFAULT_DIGITS) -> IdentityReport:
    """lower < R < upper with certified R, widths and bounds monotone in depth."""
    prec = digits_to_bits(digits)
    rng = f"{len(grid)} points in [{float(min(grid)):g}, {float(max(grid)):g}], depth 1..{depth_max}"
    for t in grid:
        r = mills_ratio(t, prec)
        prev = None
        for j in range(1, depth_max + 1):
            b = bracket(t, j)
            if not (b.lower < r.lower and r.upper < b.upper):
                return _exact("sandwich", False, rng, f"violation at t={t}, depth={j}")
            if 10 * (r.upper - r.lower) >= b.width:
                return _exact("sandwich", False, rng, f"R not resolved below bracket width at t={t}, depth={j}")
            if prev is not None and not (
                b.width < prev.width and b.lower > prev.lower and b.upper < prev.upper
            ):
                return _exact("sandwich", False, rng, f"not nested at t={t}, depth={j}")
            prev = b
    return _exact("sandwich", True, rng, "certified enclosures, widths strictly decreasing")


def cf_equality(k_max: int = 50, points=CF_POINTS) -> IdentityReport:
    pairs = [(k, t) for t in points for k in range(1, k_max + 1)]
    return _scan(
        "cf_equality",
        pairs,
        lambda kt: cf_convergent(*kt) == convergent_via_polys(*kt),
        f"k=1..{k_max}, t in {{{', '.join(str(t) for t in points)}}}",
    )


def elementary_bound(grid, digits: int = 30) -> IdentityReport:
    prec = digits_to_bits(digits)

    def ok(t):
        return normal_upper_tail(t, prec).upper < normal_pdf(t, prec).lower / t

    return _scan("elementary_bound", grid, ok, f"{len(grid)} grid points")


def enveloping_asymptotics(points=(5, 6, 8, 10, 20), j_max: int = 5, digits: int = 40) -> IdentityReport:
    prec = digits_to_bits(digits)

    def ok(t):
        t = Fraction(t)
        r = mills_ratio(t, prec)
        odd = 1
        for j in range(j_max + 1):
            odd *= 2 * j + 1  # (2j+1)!!
            s_j, s_next = asymptotic_partial_sum(t, j), asymptotic_partial_sum(t, j + 1)
            lo, hi = min(s_j, s_next), max(s_j, s_next)
            if not (lo < r.lower and r.upper < hi):
                return False
            if max(abs(r.upper - s_j), abs(r.lower - s_j)) > odd / t ** (2 * j + 3):
                return False
        return True

    return _scan("enveloping_asymptotics", points, ok, f"t in {set(points)}, j=0..{j_max}")


def derivative_signs(grid, k_max: int = 12, digits: int = DEFAULT_DIGITS) -> IdentityReport:
    prec = digits_to_bits(digits)
    pts = [Fraction(0)] + list(grid)

    def ok(t):
        for k in range(k_max + 1):
            d = mills_derivative(k, t, prec)
            if (d.lower if k % 2 == 0 else -d.upper) <= 0:
                return False
        return True

    return _scan("derivative_signs", pts, ok, f"k=0..{k_max}, t=0 and {len(grid)} grid points")


def derivative_stepping(points=(Fraction(0), Fraction(1, 2), Fraction(3), Fraction(9)), k_max=12) -> IdentityReport:
    """R^{(k)} = t R^{(k-1)} + (k-1) R^{(k-2)} on certified enclosures."""

    def ok(t):
        d = [mills_derivative(k, t, 160) for k in range(k_max + 1)]
        if d[1].upper < t * d[0].lower - 1 or d[1].lower > t * d[0].upper - 1:
            return False
        for k in range(2, k_max + 1):
            lo = t * d[k - 1].lower + (k - 1) * d[k - 2].lower
            hi = t * d[k - 1].upper + (k - 1) * d[k - 2].upper
            if d[k].upper < lo or d[k].lower > hi:
                return False
        return True

    return _scan("derivative_stepping", points, ok, f"k=1..{k_max}")


def taylor_checks() -> list[IdentityReport]:
    out = []
    cases = (
        (Fraction(1, 10), Fraction(1), 20, Fraction(1, 10**15)),
        (Fraction(1, 2), Fraction(2), 30, Fraction(1, 10**12)),
    )
    for s, t, n, tol in cases:
        res = taylor_shift_check(s, t, n, 128)
        ok = res.upper < tol
        out.append(
            IdentityReport(
                "taylor_shift",
                "numeric",
                "verified" if ok else "failed",
                f"s={s} t={t} N={n}",
                residual=res,
                tolerance=_mpf(tol),
            )
        )
    return out


def laplace_integral_crosscheck(points=(Fraction(0), Fraction(1, 2), Fraction(2), Fraction(6))) -> IdentityReport:
    def ok(t):
        r = mills_ratio(t, 96)
        q = mills_ratio_laplace_integral(t, 20)
        return abs(float(r.value) - float(q)) < 1e-12

    return _scan("laplace_transform_form", points, ok, f"t in {{{', '.join(str(p) for p in points)}}}")


def _mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def numeric_suite(grid=None, depth_max: int = DEFAULT_DEPTH, digits: int = DEFAULT_DIGITS) -> list[IdentityReport]:
    if grid is None:
        grid = t_grid(**DEFAULT_GRID)
    return [
        sandwich_check(grid, depth_max, digits),
        cf_equality(),
        elementary_bound(grid),
        enveloping_asymptotics(),
        derivative_signs(grid, 12, digits),
        derivative_stepping(),
        *taylor_checks(),
        laplace_integral_crosscheck(),
    ]


def run_suite(name: str) -> list[IdentityReport]:
    if name == "all":
        return polynomial_suite() + identity_suite() + numeric_suite()
    if name == "polynomials":
        return polynomial_suite()
    if name == "identities":
        return identity_suite()
    if name == "numeric":
        return numeric_suite()
    raise ValueError(f"unknown suite {name!r}; expected one of {('all',) + SUITES}")
