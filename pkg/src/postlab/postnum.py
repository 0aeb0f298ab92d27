"""Numerology of a fat point plus d lines: degrees, the (a, b) ledger,
critical values, expected cohomology and the inequality lemmas of the
induction.

Everything here is exact integer (or Fraction) arithmetic.  The ledger is
defined by

    C(m+2, 3) + (k+1) * a + b = C(k+3, 3),   0 <= b <= k,

i.e. the degree of mP plus ``a`` lines of a degree-k twist, topped up by
``b`` extra conditions, fills all degree-k forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb


class Undefined(ValueError):
    pass


def binom(n: int, k: int) -> int:
    """C(n, k), taken to be 0 whenever n < k (covers the conventions
    C(t,3) = 0 for -2 <= t <= 2 and C(t+2,2) = 0 for -1 <= t <= 1)."""
    if k < 0 or n < k:
        return 0
    return comb(n, k)


def forms_dim(t: int) -> int:
    """dim of degree-t forms on P^3."""
    return binom(t + 3, 3) if t >= 0 else 0


def fatpoint_degree(m: int) -> int:
    if m < 0:
        raise ValueError("multiplicity must be >= 0")
    return binom(m + 2, 3)


def plane_fatpoint_degree(m: int) -> int:
    return binom(m + 1, 2) if m > 0 else 0


@dataclass(frozen=True)
class CombinatoricsCell:
    m: int
    k: int
    a: int
    b: int

    def __post_init__(self):
        lhs = fatpoint_degree(self.m) + (self.k + 1) * self.a + self.b
        if lhs != forms_dim(self.k) or not 0 <= self.b <= max(self.k, 0):
            raise Undefined(f"({self.a},{self.b}) does not solve the ledger at m={self.m}, k={self.k}")

    def as_dict(self) -> dict:
        return {"m": self.m, "k": self.k, "a": self.a, "b": self.b}


def ab(m: int, k: int) -> CombinatoricsCell:
    if m < 0 or k < 0 or k < m - 1:
        raise Undefined(f"ledger needs k >= m-1 >= -1, got m={m}, k={k}")
    room = forms_dim(k) - fatpoint_degree(m)
    if room < 0:
        raise Undefined(f"C({k + 3},3) < C({m + 2},3)")
    a, b = divmod(room, k + 1)
    return CombinatoricsCell(m, k, a, b)


def a_(m: int, k: int) -> int:
    return ab(m, k).a


def b_(m: int, k: int) -> int:
    return ab(m, k).b


def critical_value(m: int, d: int) -> int:
    """Least k >= m with C(m+2,3) + (k+1) d <= C(k+3,3)."""
    if m < 0 or d < 1:
        raise ValueError("need m >= 0 and d >= 1")
    k = m
    while fatpoint_degree(m) + (k + 1) * d > forms_dim(k):
        k += 1
    return k


def scheme_degree(m: int, d: int, t: int) -> int:
    return fatpoint_degree(m) + d * (t + 1)


def expected_cohomology(m: int, d: int, t: int) -> tuple[int, int]:
    if t < m - 1:
        raise ValueError("t must be >= m-1")
    delta = forms_dim(t) - scheme_degree(m, d, t)
    return max(0, delta), max(0, -delta)


def is_exceptional(m: int, d: int, t: int) -> bool:
    return 2 <= d <= m and t == m


# -- identities among ledger values (definition-derived readings) ----------


def identity_eq2(m: int, k: int) -> bool:
    """2a_{k-2} + (k+1)(a_k - a_{k-2}) + b_k - b_{k-2} = (k+1)^2."""
    if k < m + 2:
        raise ValueError("need k >= m+2")
    c, c2 = ab(m, k), ab(m, k - 2)
    return 2 * c2.a + (k + 1) * (c.a - c2.a) + c.b - c2.b == (k + 1) ** 2


def identity_eq3(m: int) -> bool:
    if m < 1:
        raise ValueError("need m >= 1")
    c, c1 = ab(m, m + 2), ab(m - 1, m + 1)
    return c1.a + (m + 3) * (c.a - c1.a) + c.b - c1.b == 3 * m + 6


def identity_eq4(m: int) -> bool:
    if m < 1:
        raise ValueError("need m >= 1")
    c = ab(m, m + 2)
    return 2 * ((m + 3) * c.a + c.b) == 3 * m * m + 15 * m + 20


def gap_lemma(m: int, k: int) -> bool:
    """a_{m,k} - a_{m,k-2} >= a_{0,k} - a_{0,k-2} - 1 >= ceil(k/2)."""
    if k < m + 3:
        raise ValueError("need k >= m+3")
    lhs = a_(m, k) - a_(m, k - 2)
    mid = a_(0, k) - a_(0, k - 2) - 1
    return lhs >= mid >= -(-k // 2)


def psi(k: int, m: int) -> Fraction:
    return (
        2 * binom(k + 3, 3)
        - 2 * binom(m + 2, 3)
        - (k - 1) * (k - 2 + Fraction(k, 2))
        - 2 * k
        + 4
    )


def claim1(m: int, k_span: int = 40) -> bool:
    """psi(k, m) >= 0 and nondecreasing for m+5 <= k <= m+5+k_span."""
    prev = None
    for k in range(m + 5, m + 6 + k_span):
        v = psi(k, m)
        if v < 0 or (prev is not None and v < prev):
            return False
        prev = v
    return True


# -- closed forms for a_{m,m+j}, j = 1..4 (definition-consistent) -----------


def closed_form(m: int, j: int) -> tuple[int, int] | None:
    """Closed form of (a_{m,m+j}, b_{m,m+j}) where one is known, else None."""
    if j == 1:
        return m + 2, 0
    if j == 2:
        if m % 2 == 0:
            return 3 * m // 2 + 3, 1
        return (3 * m + 5) // 2, (m + 5) // 2
    if j == 3:
        return (2 * m + 4, 4) if m >= 1 else None
    if j == 4:
        if m % 2 == 0:
            if m >= 6:
                return 5 * m // 2 + 5, 10
            if m in (2, 4):
                return 5 * m // 2 + 6, 5 - m
            return None
        if m >= 17:
            return (5 * m + 9) // 2, (m + 25) // 2
        if 3 <= m <= 15:
            return (5 * m + 11) // 2, (15 - m) // 2
        return None
    raise ValueError("closed forms known for j in 1..4")
