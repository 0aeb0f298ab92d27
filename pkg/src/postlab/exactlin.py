"""Exact arithmetic over a prime field and dense rank computation.

The hot loop (row reduction) lives in a compiled Cython kernel when it was
built; otherwise a numpy implementation is used.  ``KERNEL`` names the one
selected at import.  Set ``POSTLAB_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _rank_py

DEFAULT_PRIME = 2_147_483_647

_rank_compiled = None
if not os.environ.get("POSTLAB_PURE"):
    try:
        from ._rank_cy import rank_mod_p as _rank_compiled
    except ImportError:  # pragma: no cover - depends on the build
        _rank_compiled = None

KERNEL = "cython" if _rank_compiled is not None else "numpy"


class FieldTooSmall(ValueError):
    """The modulus does not exceed the working degree or multiplicity."""


# Deterministic Miller-Rabin witnesses, valid for n < 3.3 * 10**24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prev_prime(n: int) -> int:
    """Largest prime strictly below ``n``."""
    k = n - 1
    while k >= 2:
        if is_prime(k):
            return k
        k -= 1
    raise ValueError(f"no prime below {n}")


@dataclass(frozen=True)
class PrimeField:
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def require_above(self, bound: int, what: str = "working degree") -> None:
        if self.p <= bound:
            raise FieldTooSmall(f"prime {self.p} must exceed {what} {bound}")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def sqrt(self, a: int) -> int | None:
        """A square root of ``a`` in F_p, or None when ``a`` is a non-residue."""
        a %= self.p
        if a == 0:
            return 0
        from sympy.ntheory import sqrt_mod

        return sqrt_mod(a, self.p)


@dataclass(frozen=True)
class FMatrix:
    """Dense row-major matrix over F_p.

    ``entries`` is a 2-D numpy array already reduced into [0, p).
    """

    p: int
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.ndim != 2:
            raise ValueError("entries must be 2-D")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int, cols: int | None = None) -> "FMatrix":
        if len(rows) == 0:
            return cls(p, np.zeros((0, cols or 0), dtype=_dtype(p)))
        arr = np.array([[int(x) % p for x in row] for row in rows], dtype=_dtype(p))
        return cls(p, arr)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "FMatrix":
        return cls(p, np.zeros((rows, cols), dtype=_dtype(p)))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def transpose(self) -> "FMatrix":
        return FMatrix(self.p, np.ascontiguousarray(self.entries.T))

    def vstack(self, other: "FMatrix") -> "FMatrix":
        if other.p != self.p:
            raise ValueError("field mismatch")
        return FMatrix(self.p, np.vstack([self.entries, other.entries]))


def _dtype(p: int):
    return np.int64 if p < _rank_py.INT64_SAFE_PRIME else object


def rank(M: FMatrix, kernel: str | None = None) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    kernel = kernel or KERNEL
    if kernel == "cython" and M.p < _rank_py.INT64_SAFE_PRIME:
        if _rank_compiled is None:
            raise RuntimeError("compiled kernel is not available")
        return int(_rank_compiled(M.entries, M.p))
    return _rank_py.rank_mod_p(M.entries, M.p)


def kernel_dim(M: FMatrix) -> int:
    return M.cols - rank(M)


# Small exact helpers used by the geometry layer (4x4 and smaller).


def row_reduce(rows: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form with pivot columns, pure Python ints."""
    A = [[x % p for x in r] for r in rows]
    pivots: list[int] = []
    if not A:
        return A, pivots
    n = len(A[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], p - 2, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def small_rank(rows: Sequence[Sequence[int]], p: int) -> int:
    return len(row_reduce(rows, p)[1])


def nullspace(rows: Sequence[Sequence[int]], n: int, p: int) -> list[list[int]]:
    """Basis of {x : rows . x = 0} in F_p^n."""
    R, pivots = row_reduce(rows, p) if rows else ([], [])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-R[i][fc]) % p
        basis.append(v)
    return basis


def solve(A: Sequence[Sequence[int]], b: Sequence[int], p: int) -> list[int] | None:
    """One solution of A x = b, or None if inconsistent."""
    n = len(A[0])
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    R, pivots = row_reduce(aug, p)
    if n in pivots:
        return None
    x = [0] * n
    for i, pc in enumerate(pivots):
        x[pc] = R[i][n]
    return x


def inverse(A: Sequence[Sequence[int]], p: int) -> list[list[int]] | None:
    n = len(A)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(A)]
    R, pivots = row_reduce(aug, p)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        return None
    return [row[n:] for row in R]


def matvec(A: Sequence[Sequence[int]], x: Sequence[int], p: int) -> list[int]:
    return [sum(a * b for a, b in zip(row, x)) % p for row in A]
