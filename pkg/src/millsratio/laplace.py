"""Laplace polynomials P_k, Q_k and their coefficient families.

Three independent constructions are provided and are expected to agree
exactly:

* derivative recurrences  P_{k+1} = t P_k + P_k',  Q_k = P_k + Q_{k-1}'
* three-term recurrences  P_{k+1} = t P_k + k P_{k-1},  Q_{k+1} = t Q_k + (k+1) Q_{k-1}
* closed forms for the coefficients p_{k,m}, q_{k,m}

plus the expansion of Q_k in the basis {P_j} with coefficients beta_{k,j}.
Conventions: P_0 = Q_0 = 1 and Q_{-1} = 0.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

from .errors import DomainError, IntegralityViolation, MissingDependency
from .exact import IntPoly, poly_derivative, poly_scale, poly_shift_mul_t

__all__ = [
    "FAMILIES",
    "CoeffTable",
    "LaplacePair",
    "p_coeff_closed",
    "q_coeff_closed",
    "beta_coeff",
    "laplace_P",
    "laplace_Q",
    "laplace_pair_recurrence",
    "laplace_pair_three_term",
    "three_term_P",
    "three_term_Q",
    "coeff_recurrence_step",
    "coeff_table",
    "derivative_identity_check",
    "ode_residual",
    "expand_Q_in_P",
    "reconstruct_from_basis",
    "qhat_sum_check",
    "same_parity",
]

FAMILIES = ("P", "Q", "BETA")

ZERO = IntPoly()
ONE = IntPoly([1])


def same_parity(k: int, m: int) -> bool:
    """True when (k, m) is in the support: 0 <= m <= k and k - m even."""
    return 0 <= m <= k and (k - m) % 2 == 0


def _check_nonneg(**kw):
    for name, v in kw.items():
        if v < 0:
            raise DomainError(f"{name} must be nonnegative, got {v}")


# ---------------------------------------------------------------------------
# closed forms


def p_coeff_closed(k: int, m: int) -> int:
    """p_{k,m} = k! / (m! 2^n n!) with n = (k - m)/2, zero off the support."""
    _check_nonneg(k=k, m=m)
    if not same_parity(k, m):
        return 0
    n = (k - m) // 2
    return factorial(k) // (factorial(m) * (factorial(n) << n))


@lru_cache(maxsize=1024)
def _binom_prefix(r: int) -> tuple[int, ...]:
    """Partial sums sum_{j<=i} C(r, j) for i = 0..r."""
    out, acc = [], 0
    for j in range(r + 1):
        acc += comb(r, j)
        out.append(acc)
    return tuple(out)


def q_coeff_closed(k: int, m: int) -> int:
    """q_{k,m} = ((k+m)/2)!/m! * 2^-n * sum_{j=0}^{n} C(k+1, j).

    The division by 2^n happens last and must be exact; anything else means the
    formula was misread, so it raises instead of rounding.
    """
    _check_nonneg(k=k, m=m)
    if not same_parity(k, m):
        return 0
    n = (k - m) // 2
    top = factorial(m + n) // factorial(m) * _binom_prefix(k + 1)[n]
    q, r = divmod(top, 1 << n)
    if r:
        raise IntegralityViolation(f"q_({k},{m}): {top} is not divisible by 2^{n}")
    return q


def beta_coeff(k: int, j: int) -> int:
    """beta_{k,j} = n!/j! with n = (k + j)/2, zero off the support."""
    _check_nonneg(k=k, j=j)
    if not same_parity(k, j):
        return 0
    return factorial((k + j) // 2) // factorial(j)


# ---------------------------------------------------------------------------
# coefficient tables filled by the coefficient-level recurrences


class CoeffTable:
    """Lazily grown lower-triangular table of exact coefficients.

    Rows are appended whole under a lock, so readers never observe a partially
    written row.  ``entry`` grows the table on demand; ``coeff_recurrence_step``
    is the strict single-entry primitive used to fill it.
    """

    def __init__(self, family: str, p_table: CoeffTable | None = None):
        if family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
        self.family = family
        if family == "Q":
            self._p = p_table if p_table is not None else CoeffTable("P")
        else:
            self._p = None
        self._rows: list[tuple[int, ...]] = [(1,)]
        if family == "BETA":
            self._rows.append((0, 1))
        self._lock = threading.Lock()

    @property
    def max_k(self) -> int:
        return len(self._rows) - 1

    @property
    def p_table(self) -> CoeffTable | None:
        return self._p

    def has_row(self, k: int) -> bool:
        return 0 <= k < len(self._rows)

    def stored(self, k: int, m: int) -> int:
        """Entry from an already-filled row; raises if row k is absent."""
        if not self.has_row(k):
            raise MissingDependency(f"{self.family} row {k} not filled (max_k={self.max_k})")
        row = self._rows[k]
        return row[m] if 0 <= m < len(row) else 0

    def extend(self, k: int) -> None:
        if k <= self.max_k:
            return
        with self._lock:
            while self.max_k < k:
                nk = self.max_k + 1
                row = tuple(coeff_recurrence_step(self, nk, m) for m in range(nk + 1))
                self._rows.append(row)

    def entry(self, k: int, m: int) -> int:
        _check_nonneg(k=k, m=m)
        if m > k:
            return 0
        self.extend(k)
        return self._rows[k][m]

    def row(self, k: int) -> tuple[int, ...]:
        self.extend(k)
        return self._rows[k]

    def __repr__(self) -> str:
        return f"CoeffTable(family={self.family!r}, max_k={self.max_k})"


def coeff_recurrence_step(table: CoeffTable, k: int, m: int) -> int:
    """Compute entry (k, m) of ``table`` from its lower rows.

    P:    p_{k,m} = p_{k-1,m-1} + (m+1) p_{k-1,m+1}   (p_{k,0} = p_{k-1,1})
    Q:    q_{k,m} = p_{k,m} + (m+1) q_{k-1,m+1}
    BETA: b_{k,j} = b_{k-1,j-1} - (j+1) b_{k-1,j+1} + k b_{k-2,j}
    """
    _check_nonneg(k=k, m=m)
    if m > k:
        return 0
    fam = table.family
    if fam == "P":
        if k == 0:
            return 1
        left = table.stored(k - 1, m - 1) if m > 0 else 0
        return left + (m + 1) * table.stored(k - 1, m + 1)
    if fam == "Q":
        if k == 0:
            return 1
        return table.p_table.entry(k, m) + (m + 1) * table.stored(k - 1, m + 1)
    # BETA
    if k <= 1:
        return 1 if m == k else 0
    left = table.stored(k - 1, m - 1) if m > 0 else 0
    return left - (m + 1) * table.stored(k - 1, m + 1) + k * table.stored(k - 2, m)


_TABLES: dict[str, CoeffTable] = {}
_TABLES_LOCK = threading.Lock()


def coeff_table(family: str) -> CoeffTable:
    """Process-wide memoized table for ``family``."""
    with _TABLES_LOCK:
        if not _TABLES:
            p = CoeffTable("P")
            _TABLES["P"] = p
            _TABLES["Q"] = CoeffTable("Q", p_table=p)
            _TABLES["BETA"] = CoeffTable("BETA")
        return _TABLES[family]


# ---------------------------------------------------------------------------
# polynomial sequences


class _PolySequence:
    """Append-only memo of a polynomial sequence built by a recurrence."""

    def __init__(self, seeds, step):
        self._items = list(seeds)
        self._step = step
        self._lock = threading.Lock()

    def get(self, k: int) -> IntPoly:
        if k >= len(self._items):
            with self._lock:
                while len(self._items) <= k:
                    self._items.append(self._step(self._items, len(self._items)))
        return self._items[k]


def _derivative_P(items, k):
    prev = items[k - 1]
    return poly_shift_mul_t(prev) + poly_derivative(prev)


def _derivative_Q(items, k):
    return laplace_P(k) + poly_derivative(items[k - 1])


def _three_term_P(items, k):
    # P_k = t P_{k-1} + (k-1) P_{k-2}
    return poly_shift_mul_t(items[k - 1]) + poly_scale(items[k - 2], k - 1)


def _three_term_Q(items, k):
    # Q_k = t Q_{k-1} + k Q_{k-2}
    return poly_shift_mul_t(items[k - 1]) + poly_scale(items[k - 2], k)


_P_DERIV = _PolySequence([ONE], _derivative_P)
_Q_DERIV = _PolySequence([ONE], _derivative_Q)
_P_THREE = _PolySequence([ONE, IntPoly([0, 1])], _three_term_P)
_Q_THREE = _PolySequence([ONE, IntPoly([0, 1])], _three_term_Q)


def laplace_P(k: int) -> IntPoly:
    """P_k from the derivative recurrence (the canonical route)."""
    _check_nonneg(k=k)
    return _P_DERIV.get(k)


def laplace_Q(k: int) -> IntPoly:
    """Q_k from the derivative recurrence; Q_{-1} is the zero polynomial."""
    if k == -1:
        return ZERO
    _check_nonneg(k=k)
    return _Q_DERIV.get(k)


def three_term_P(k: int) -> IntPoly:
    _check_nonneg(k=k)
    return _P_THREE.get(k)


def three_term_Q(k: int) -> IntPoly:
    if k == -1:
        return ZERO
    _check_nonneg(k=k)
    return _Q_THREE.get(k)


@dataclass(frozen=True)
class LaplacePair:
    """The pair (P_k, Q_{k-1}) whose ratio Q_{k-1}/P_k is the k-th convergent."""

    k: int
    P: IntPoly
    Q_prev: IntPoly

    def __post_init__(self):
        if self.P.degree != self.k or self.P[self.k] != 1:
            raise ValueError(f"P_{self.k} must be monic of degree {self.k}")
        if self.k >= 1 and (self.Q_prev.degree != self.k - 1 or self.Q_prev[self.k - 1] != 1):
            raise ValueError(f"Q_{self.k - 1} must be monic of degree {self.k - 1}")


def laplace_pair_recurrence(k: int) -> LaplacePair:
    if k < 1:
        raise DomainError(f"order must be >= 1, got {k}")
    return LaplacePair(k, laplace_P(k), laplace_Q(k - 1))


def laplace_pair_three_term(k: int) -> LaplacePair:
    if k < 1:
        raise DomainError(f"order must be >= 1, got {k}")
    return LaplacePair(k, three_term_P(k), three_term_Q(k - 1))


# ---------------------------------------------------------------------------
# polynomial identities


def derivative_identity_check(k: int) -> bool:
    """P_k' == k P_{k-1}."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return poly_derivative(laplace_P(k)) == poly_scale(laplace_P(k - 1), k)


def ode_residual(k: int) -> IntPoly:
    """P_k'' + t P_k' - k P_k, which should be the zero polynomial."""
    _check_nonneg(k=k)
    p = laplace_P(k)
    d1 = poly_derivative(p)
    return poly_derivative(d1) + poly_shift_mul_t(d1) - poly_scale(p, k)


def expand_Q_in_P(k: int) -> dict[int, int]:
    """Coefficients of Q_k in the basis P_j, keyed by j (support only)."""
    _check_nonneg(k=k)
    return {j: beta_coeff(k, j) for j in range(k % 2, k + 1, 2)}


def reconstruct_from_basis(expansion: dict[int, int]) -> IntPoly:
    acc = ZERO
    for j, b in expansion.items():
        acc = acc + poly_scale(laplace_P(j), b)
    return acc


def qhat_sum_check(k: int, m: int, p=p_coeff_closed, q=q_coeff_closed) -> bool:
    """m! q_{k,m} == sum_{j=0}^{n} (m+j)! p_{k-j,m+j}.

    Only defined on the support (m <= k, same parity); the upper limit n is
    meaningless otherwise.
    """
    if not same_parity(k, m):
        raise DomainError(f"(k, m) = ({k}, {m}) needs m <= k and k - m even")
    n = (k - m) // 2
    rhs = sum(factorial(m + j) * p(k - j, m + j) for j in range(n + 1))
    return factorial(m) * q(k, m) == rhs
