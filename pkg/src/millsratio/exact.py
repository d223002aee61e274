"""Exact arithmetic layer: rationals and dense integer polynomials.

Rationals are plain :class:`fractions.Fraction` objects (always reduced, with a
positive denominator).  Polynomials are immutable :class:`IntPoly` values whose
coefficient tuple is indexed by the power of ``t``.
"""

from __future__ import annotations

from collections.abc import Iterable
from fractions import Fraction
from numbers import Rational

__all__ = [
    "IntPoly",
    "as_rational",
    "poly_eval",
    "poly_derivative",
    "poly_add",
    "poly_sub",
    "poly_mul",
    "poly_arith",
    "poly_shift_mul_t",
    "poly_scale",
]


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and decimal/fraction strings to a Fraction.

    Floats are rejected on purpose: a binary float is rarely the rational the
    caller meant.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {type(x).__name__} as an exact rational")


class IntPoly:
    """Dense univariate polynomial with Python-int coefficients.

    ``IntPoly([3, 0, 6, 0, 1])`` is ``t^4 + 6t^2 + 3``.  Trailing zeros are
    stripped on construction, so equality and hashing are coefficient-wise on
    the canonical form.  The zero polynomial has an empty coefficient tuple and
    degree -1.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self._c = tuple(c)

    @classmethod
    def monomial(cls, power: int, coeff: int = 1) -> IntPoly:
        return cls([0] * power + [coeff])

    @classmethod
    def constant(cls, value: int) -> IntPoly:
        return cls([value])

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self._c

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    def is_zero(self) -> bool:
        return not self._c

    def __getitem__(self, m: int) -> int:
        if m < 0:
            raise IndexError("negative power")
        return self._c[m] if m < len(self._c) else 0

    def __len__(self) -> int:
        return len(self._c)

    def __iter__(self):
        return iter(self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, IntPoly):
            return self._c == other._c
        if isinstance(other, int):
            return self._c == IntPoly([other])._c
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("IntPoly", self._c))

    def __add__(self, other: IntPoly) -> IntPoly:
        return poly_add(self, other)

    def __sub__(self, other: IntPoly) -> IntPoly:
        return poly_sub(self, other)

    def __mul__(self, other):
        if isinstance(other, int):
            return poly_scale(self, other)
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> IntPoly:
        return poly_scale(self, -1)

    def __call__(self, x) -> Fraction:
        return poly_eval(self, x)

    def derivative(self) -> IntPoly:
        return poly_derivative(self)

    def __repr__(self) -> str:
        return f"IntPoly({list(self._c)})"

    def __str__(self) -> str:
        return format_poly(self)


def format_poly(p: IntPoly, var: str = "t") -> str:
    """Descending powers, `` + `` between monomials, unit coefficients elided."""
    if p.is_zero():
        return "0"
    parts = []
    for m in range(p.degree, -1, -1):
        a = p[m]
        if a == 0:
            continue
        mag = abs(a)
        if m == 0:
            body = str(mag)
        else:
            body = ("" if mag == 1 else str(mag)) + var + ("" if m == 1 else f"^{m}")
        if not parts:
            parts.append(body if a > 0 else "-" + body)
        else:
            parts.append(("+ " if a > 0 else "- ") + body)
    return " ".join(parts)


def poly_eval(p: IntPoly, x) -> Fraction:
    """Exact value of ``p`` at rational ``x`` by Horner's scheme.

    The numerator and denominator are accumulated as integers and reduced once
    at the end.
    """
    x = as_rational(x)
    num, den = x.numerator, x.denominator
    acc = 0
    scale = 1
    # acc / den**deg is the Horner partial value, kept integral throughout
    for a in reversed(p.coeffs):
        acc = acc * num + a * scale
        scale *= den
    if not p.coeffs:
        return Fraction(0)
    return Fraction(acc, scale // den)


def poly_derivative(p: IntPoly) -> IntPoly:
    return IntPoly(m * a for m, a in enumerate(p.coeffs) if m > 0)


def poly_add(a: IntPoly, b: IntPoly) -> IntPoly:
    n = max(len(a), len(b))
    return IntPoly(a[i] + b[i] for i in range(n))


def poly_sub(a: IntPoly, b: IntPoly) -> IntPoly:
    n = max(len(a), len(b))
    return IntPoly(a[i] - b[i] for i in range(n))


def poly_mul(a: IntPoly, b: IntPoly) -> IntPoly:
    if a.is_zero() or b.is_zero():
        return IntPoly()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a.coeffs):
        if x:
            for j, y in enumerate(b.coeffs):
                out[i + j] += x * y
    return IntPoly(out)


def poly_scale(a: IntPoly, c: int) -> IntPoly:
    return IntPoly(c * x for x in a.coeffs)


def poly_shift_mul_t(a: IntPoly) -> IntPoly:
    """Multiply by the monomial ``t``."""
    if a.is_zero():
        return a
    return IntPoly((0,) + a.coeffs)


_OPS = {"add": poly_add, "sub": poly_sub, "mul": poly_mul}


def poly_arith(a: IntPoly, b: IntPoly, op: str) -> IntPoly:
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown polynomial op {op!r}; expected one of {sorted(_OPS)}") from None
    return fn(a, b)
