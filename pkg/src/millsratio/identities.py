"""Mechanical checks of the combinatorial identities around the Laplace polynomials.

Exact identities are verified over a finite parameter range with zero
tolerance.  Numeric ones compare a truncated exact sum against an interval
evaluation and require the residual to be below an explicit truncation bound.
"""

from __future__ import annotations

import math
import threading
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import mpmath

from .errors import DomainError, InstanceTooLarge, NonConvergence
from .exact import IntPoly, as_rational, poly_eval, poly_scale, poly_shift_mul_t
from .laplace import coeff_table, laplace_P, laplace_Q, q_coeff_closed
from .numeric import (
    GUARD_BITS,
    BigReal,
    _ctx,
    _fraction_up,
    _iv_rational,
    _raw_to_fraction,
    normal_upper_tail,
)

__all__ = [
    "IdentityReport",
    "MatchingInstance",
    "MATCHING_GUARD",
    "p_tail_bound",
    "identity_one_terms",
    "identity_one_verify",
    "identity_two_verify",
    "identity_two_range",
    "q_diagonal_check",
    "q_diagonal_range",
    "pgen_check",
    "qgen_check",
    "hermite_poly",
    "hermite_relation_check",
    "hermite_relation_range",
    "matching_counts",
    "matching_count_bruteforce",
    "matching_polynomial",
    "half_power_transform",
    "matching_identity_check",
    "matching_identity_range",
]

MATCHING_GUARD = 12
MAX_IDENTITY_ONE_ORDER = 4000


@dataclass(frozen=True)
class IdentityReport:
    name: str
    kind: str  # "exact" | "numeric"
    status: str  # "verified" | "failed"
    detail: str = ""
    residual: BigReal | None = None
    tolerance: mpmath.mpf | None = None
    tested_range: str | None = None
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in ("exact", "numeric"):
            raise ValueError(f"bad kind {self.kind!r}")
        if self.status not in ("verified", "failed"):
            raise ValueError(f"bad status {self.status!r}")
        if self.kind == "numeric" and self.status == "verified":
            if self.residual is None or self.tolerance is None:
                raise ValueError("numeric report needs residual and tolerance")
            if self.residual.upper > _raw_to_fraction(self.tolerance._mpf_):
                raise ValueError("verified numeric report with residual above tolerance")
        if self.kind == "exact" and self.tested_range is None:
            raise ValueError("exact report must name its tested range")

    @property
    def verified(self) -> bool:
        return self.status == "verified"

    def line(self) -> str:
        if self.kind == "numeric":
            res = "n/a" if self.residual is None else f"{float(self.residual.upper):.3g}"
            tol = "n/a" if self.tolerance is None else mpmath.nstr(self.tolerance, 3)
            info = f"residual={res} tol={tol}"
        else:
            info = f"range={self.tested_range}"
        tail = f"  {self.detail}" if self.detail else ""
        return f"{self.name:<28} {self.kind:<8} {self.status:<9} {info}{tail}"


def _exact(name: str, ok: bool, tested_range: str, detail: str = "") -> IdentityReport:
    return IdentityReport(name, "exact", "verified" if ok else "failed", detail, tested_range=tested_range)


def _first_failure(name: str, rng: range, pred: Callable[[int], bool], label: str) -> IdentityReport:
    for x in rng:
        if not pred(x):
            return _exact(name, False, f"{label}={rng.start}..{rng.stop - 1}", f"counterexample {label}={x}")
    return _exact(name, True, f"{label}={rng.start}..{rng.stop - 1}")


# ---------------------------------------------------------------------------
# truncation bounds


def p_tail_bound(x_abs, s_abs, order: int) -> Fraction:
    """Upper bound on sum_{k>order} P_k(x) s^k / k! for x, s >= 0.

    Cauchy's estimate on exp(r x + r^2/2) gives P_k(x)/k! <= exp(r x + r^2/2) / r^k
    for every r > 0; the bound is minimised over r near the saddle point.
    """
    x, s = Fraction(x_abs), Fraction(s_abs)
    if s == 0:
        return Fraction(0)
    ctx = _ctx(64)
    xi, si = _iv_rational(ctx, x), _iv_rational(ctx, s)
    n1 = order + 1
    saddle = (-float(x) + math.sqrt(float(x) ** 2 + 4 * n1)) / 2
    best = None
    for f in (0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0):
        r = Fraction(max(saddle * f, float(s) * 1.01 + 0.01)).limit_denominator(1 << 20)
        if r <= s:
            continue
        ri = _iv_rational(ctx, r)
        q = si / ri
        b = (ctx.exp(ri * xi + ri * ri / 2) * q**n1 / (1 - q)).b
        if best is None or b < best:
            best = b
    return _raw_to_fraction(best._mpi_[1])


# ---------------------------------------------------------------------------
# identity one:  triple sum == sqrt(2 pi) e^2 (Phi(2) - Phi(1))


def identity_one_terms(order: int) -> list[Fraction]:
    """Per-order partial sums of the triple sum: entry k collects all (n, m) with m + 2n = k.

    Iterates n outward and, for each n, m outward; every term is
    (n+m)! / (m! j! (m+2n+1-j)!) 2^-n summed over j = 0..n.
    """
    if order < 0:
        raise DomainError("order must be >= 0")
    # common denominator (order+1)! 2^(order//2) keeps the accumulation integral
    big = factorial(order + 1)
    shift = order // 2
    acc = [0] * (order + 1)
    for n in range(order // 2 + 1):
        for m in range(order - 2 * n + 1):
            k = m + 2 * n
            inner = sum(big // (factorial(j) * factorial(k + 1 - j)) for j in range(n + 1))
            acc[k] += (factorial(n + m) // factorial(m)) * inner << (shift - n)
    den = big << shift
    return [Fraction(a, den) for a in acc]


def identity_one_rhs(prec: int) -> BigReal:
    """sqrt(2 pi) e^2 (Phibar(1) - Phibar(2))."""
    f1 = normal_upper_tail(1, prec + 8)
    f2 = normal_upper_tail(2, prec + 8)
    ctx = _ctx(prec + GUARD_BITS)
    val = ctx.sqrt(2 * ctx.pi) * ctx.exp(2) * (f1.to_interval(ctx) - f2.to_interval(ctx))
    return BigReal.from_interval(val, prec)


def identity_one_verify(tol=Fraction(1, 10**12), prec: int | None = None) -> IdentityReport:
    tol = Fraction(repr(tol)) if isinstance(tol, float) else as_rational(tol)
    if tol < Fraction(1, 10**30):
        raise DomainError("tolerance below 1e-30 is not supported")
    if prec is None:
        prec = max(64, math.ceil(-math.log2(tol)) + 16)
    half = tol / 2
    # each (n, m) term is at most p_{k,m}/k! with k = m + 2n (q_{k,m} <= (k+1) p_{k,m}),
    # so the tail beyond total order K is at most the P-series tail at s = t = 1
    order = 1
    while p_tail_bound(1, 1, order) >= half:
        order += 1
        if order > MAX_IDENTITY_ONE_ORDER:
            raise NonConvergence(f"tail bound not below {float(half):.3g} by order {MAX_IDENTITY_ONE_ORDER}")
    tail = p_tail_bound(1, 1, order)
    per_order = identity_one_terms(order)
    lhs = sum(per_order, Fraction(0))

    # reindexed form: per order k, sum_m q_{k,m}/(k+1)! and Q_k(1)/(k+1)!, both exact
    qtab = coeff_table("Q")
    consistent = all(
        per_order[k] == Fraction(sum(qtab.row(k)), factorial(k + 1))
        and per_order[k] == poly_eval(laplace_Q(k), 1) / factorial(k + 1)
        for k in range(order + 1)
    )

    rhs = identity_one_rhs(prec)
    ctx = _ctx(prec + GUARD_BITS)
    res = BigReal.from_interval(abs(_iv_rational(ctx, lhs) - rhs.to_interval(ctx)), prec)
    tol_mpf = mpmath.mpf(tol.numerator) / tol.denominator
    ok = consistent and res.upper <= tol
    detail = (
        f"orders m+2n<={order} (n outward, m outward), tail<={float(tail):.3g}, "
        f"rhs={rhs.decimal(20)}, reindex={'ok' if consistent else 'MISMATCH'}"
    )
    return IdentityReport(
        "identity_one",
        "numeric",
        "verified" if ok else "failed",
        detail,
        residual=res,
        tolerance=tol_mpf,
        extras={"order": order, "lhs": lhs, "rhs": rhs, "tail": tail},
    )


# ---------------------------------------------------------------------------
# identity two:  sum_k (-1)^k C(n,k)/(2k+1) == 2^{2n} (n!)^2 / (2n+1)!


def _double_factorial_odd(n: int) -> int:
    """(2n+1)!!"""
    return factorial(2 * n + 1) // (factorial(n) << n)


def identity_two_sides(n: int) -> tuple[Fraction, Fraction]:
    if n < 0:
        raise DomainError("n must be >= 0")
    d = _double_factorial_odd(n)
    # every 2k+1 <= 2n+1 divides (2n+1)!!, so the scaled sum stays integral
    num = 0
    c = 1
    for k in range(n + 1):
        term = c * (d // (2 * k + 1))
        num += -term if k & 1 else term
        c = c * (n - k) // (k + 1)
    lhs = Fraction(num, d)
    rhs = Fraction(factorial(n) ** 2 << (2 * n), factorial(2 * n + 1))
    return lhs, rhs


def identity_two_verify(n: int) -> IdentityReport:
    lhs, rhs = identity_two_sides(n)
    return _exact("identity_two", lhs == rhs, f"n={n}", "" if lhs == rhs else f"lhs={lhs} rhs={rhs}")


def identity_two_range(n_max: int) -> IdentityReport:
    def ok(n):
        lhs, rhs = identity_two_sides(n)
        return lhs == rhs

    return _first_failure("identity_two", range(n_max + 1), ok, "n")


# ---------------------------------------------------------------------------
# diagonal q_{2n,0} = 2^n n!


def _q_diagonal_ok(n: int) -> bool:
    target = factorial(n) << n
    return (
        coeff_table("Q").entry(2 * n, 0) == target
        and q_coeff_closed(2 * n, 0) == target
        and sum(comb(2 * n + 1, i) for i in range(n + 1)) == 1 << (2 * n)
    )


def q_diagonal_check(n: int) -> IdentityReport:
    if n < 0:
        raise DomainError("n must be >= 0")
    return _exact("q_diagonal", _q_diagonal_ok(n), f"n={n}")


def q_diagonal_range(n_max: int) -> IdentityReport:
    return _first_failure("q_diagonal", range(n_max + 1), _q_diagonal_ok, "n")


# ---------------------------------------------------------------------------
# generating functions


def _numeric_report(name, lhs: Fraction, rhs: BigReal, tail, prec: int, detail: str, extras=None):
    ctx = _ctx(prec + GUARD_BITS)
    res = BigReal.from_interval(abs(_iv_rational(ctx, lhs) - rhs.to_interval(ctx)), prec)
    err = _raw_to_fraction(rhs.err_bound._mpf_)
    slack = err + max(Fraction(1), abs(rhs.upper)) / (1 << prec)
    tol = _fraction_up(tail + slack)
    ok = res.upper <= tail + slack
    if tail >= max(1, abs(rhs.lower)):
        raise NonConvergence(f"{name}: truncation bound {float(tail):.3g} is not informative")
    return IdentityReport(
        name, "numeric", "verified" if ok else "failed", detail, residual=res, tolerance=tol, extras=extras or {}
    )


def pgen_check(s, t, order: int = 40, prec: int = 128) -> IdentityReport:
    """sum_{k<=N} P_k(t) s^k/k!  vs  exp(s t + s^2/2)."""
    s, t = as_rational(s), as_rational(t)
    lhs = Fraction(0)
    fact = 1
    for k in range(order + 1):
        if k:
            fact *= k
        lhs += poly_eval(laplace_P(k), t) * s**k / fact
    ctx = _ctx(prec + GUARD_BITS)
    expo = _iv_rational(ctx, s * t + s * s / 2)
    rhs = BigReal.from_interval(ctx.exp(expo), prec)
    tail = p_tail_bound(abs(t), abs(s), order)
    return _numeric_report(
        "pgen", lhs, rhs, tail, prec, f"s={s} t={t} N={order} tail<={float(tail):.3g}", {"lhs": lhs}
    )


def qgen_partial(s, t, order: int) -> Fraction:
    s, t = as_rational(s), as_rational(t)
    total = Fraction(0)
    fact = 1
    for k in range(order + 1):
        fact *= k + 1
        total += poly_eval(laplace_Q(k), t) * s ** (k + 1) / fact
    return total


def qgen_closed(s, t, prec: int) -> BigReal:
    """sqrt(2 pi) e^{(s+t)^2/2} (Phibar(t) - Phibar(s+t))."""
    s, t = as_rational(s), as_rational(t)
    u = s + t
    grow = math.ceil(float(u * u) / 2 * math.log2(math.e))
    wp = prec + grow + GUARD_BITS
    a = normal_upper_tail(t, wp)
    b = normal_upper_tail(u, wp)
    ctx = _ctx(wp + GUARD_BITS)
    ui = _iv_rational(ctx, u)
    val = ctx.sqrt(2 * ctx.pi) * ctx.exp(ui * ui / 2) * (a.to_interval(ctx) - b.to_interval(ctx))
    return BigReal.from_interval(val, prec)


def qgen_check(s, t, order: int = 40, prec: int = 128) -> IdentityReport:
    """sum_{k<=N} Q_k(t) s^{k+1}/(k+1)!  vs  sqrt(2 pi) e^{(s+t)^2/2} (Phi(s+t) - Phi(t)).

    For t = 0 the truncated sum is also compared exactly with the odd series
    sum_n 2^n n! s^{2n+1} / (2n+1)!.
    """
    s, t = as_rational(s), as_rational(t)
    lhs = qgen_partial(s, t, order)
    rhs = qgen_closed(s, t, prec)
    # q_{k,m} <= (k+1) p_{k,m}, hence |Q_k(t)|/(k+1)! <= P_k(|t|)/k!
    tail = abs(s) * p_tail_bound(abs(t), abs(s), order)
    detail = f"s={s} t={t} N={order} tail<={float(tail):.3g}"
    odd_ok = True
    if t == 0:
        odd = sum(
            (Fraction((factorial(n) << n) * s ** (2 * n + 1), factorial(2 * n + 1)) for n in range(order // 2 + 1)),
            Fraction(0),
        )
        odd_ok = odd == lhs
        detail += f", odd-series {'match' if odd_ok else 'MISMATCH'}"
    rep = _numeric_report("qgen", lhs, rhs, tail, prec, detail, {"lhs": lhs, "rhs": rhs})
    if not odd_ok:
        return IdentityReport(rep.name, rep.kind, "failed", rep.detail, rep.residual, rep.tolerance, extras=rep.extras)
    return rep


# ---------------------------------------------------------------------------
# Hermite correspondence


class _HermiteSeq:
    def __init__(self):
        self._items = [IntPoly([1]), IntPoly([0, 1])]
        self._lock = threading.Lock()

    def get(self, k: int) -> IntPoly:
        if k >= len(self._items):
            with self._lock:
                while len(self._items) <= k:
                    n = len(self._items) - 1
                    self._items.append(poly_shift_mul_t(self._items[n]) - poly_scale(self._items[n - 1], n))
        return self._items[k]


_HERMITE = _HermiteSeq()


def hermite_poly(k: int) -> IntPoly:
    """Probabilists' Hermite polynomial: H_{k+1} = t H_k - k H_{k-1}."""
    if k < 0:
        raise DomainError("k must be >= 0")
    return _HERMITE.get(k)


def _hermite_ok(k: int) -> bool:
    p, h = laplace_P(k), hermite_poly(k)
    for m in range(k + 1):
        if (k - m) % 2:
            if p[m] or h[m]:
                return False
        elif p[m] != (-1) ** ((k - m) // 2) * h[m]:
            return False
    return True


def hermite_relation_check(k: int) -> IdentityReport:
    if k < 0:
        raise DomainError("k must be >= 0")
    return _exact("hermite_relation", _hermite_ok(k), f"k={k}")


def hermite_relation_range(k_max: int) -> IdentityReport:
    return _first_failure("hermite_relation", range(k_max + 1), _hermite_ok, "k")


# ---------------------------------------------------------------------------
# matchings in the complete graph


@dataclass(frozen=True)
class MatchingInstance:
    k: int
    m: int

    def __post_init__(self):
        if self.k < 0 or not 0 <= self.m <= self.k // 2:
            raise DomainError(f"need 0 <= m <= k//2, got k={self.k}, m={self.m}")


@lru_cache(maxsize=None)
def matching_counts(k: int) -> tuple[int, ...]:
    """Number of matchings of every size in K_k, by exhaustive backtracking.

    The lowest free vertex is either left unmatched or paired with a later free
    vertex, so each matching is produced exactly once.
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    if k > MATCHING_GUARD:
        raise InstanceTooLarge(f"k={k} exceeds the brute-force guard {MATCHING_GUARD}")
    counts = [0] * (k // 2 + 1)
    free = [True] * k

    def walk(v: int, size: int):
        while v < k and not free[v]:
            v += 1
        if v == k:
            counts[size] += 1
            return
        free[v] = False
        walk(v + 1, size)
        for u in range(v + 1, k):
            if free[u]:
                free[u] = False
                walk(v + 1, size + 1)
                free[u] = True
        free[v] = True

    walk(0, 0)
    return tuple(counts)


def matching_count_bruteforce(k: int, m: int) -> int:
    inst = MatchingInstance(k, m)
    return matching_counts(inst.k)[inst.m]


def matching_polynomial(k: int) -> IntPoly:
    """sum_m M(k, m) t^m from the brute-force counts."""
    return IntPoly(matching_counts(k))


def half_power_transform(p: IntPoly, k: int) -> IntPoly:
    """Integer-coefficient form of t^{k/2} p(t^{-1/2}): coefficient i is p_{k-2i}."""
    return IntPoly(p[k - 2 * i] for i in range(k // 2 + 1))


def _matching_ok(k: int) -> bool:
    counts = matching_counts(k)
    p = laplace_P(k)
    if any(counts[m] != p[k - 2 * m] for m in range(k // 2 + 1)):
        return False
    if k >= 2 and counts[1] != k * (k - 1) // 2:
        return False
    return matching_polynomial(k) == half_power_transform(p, k)


def matching_identity_check(k: int) -> IdentityReport:
    if k > MATCHING_GUARD:
        raise InstanceTooLarge(f"k={k} exceeds the brute-force guard {MATCHING_GUARD}")
    return _exact("matching_identity", _matching_ok(k), f"k={k}")


def matching_identity_range(k_max: int) -> IdentityReport:
    if k_max > MATCHING_GUARD:
        raise InstanceTooLarge(f"k={k_max} exceeds the brute-force guard {MATCHING_GUARD}")
    return _first_failure("matching_identity", range(k_max + 1), _matching_ok, "k")
