"""Condition matrices whose kernel is the space of forms vanishing on a
scheme: degree-t forms on P^3, degree-t forms on a plane, and bidegree
(a, b) forms on a smooth quadric.

Row recipes:

* fat point of multiplicity m at c: coefficients of s^beta, |beta| < m, in
  f(c + sum s_i e_i), where e_i are the standard vectors other than the
  first nonzero coordinate of c (an affine chart centred at c).
* line: evaluation at t+1 distinct points a + i*b.
* point: one evaluation.  Tangent vector: evaluation plus directional
  derivative; the evaluation row is dropped when the support lies on a
  line (or trace curve) of the scheme.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

import numpy as np

from .exactlin import FMatrix, FieldTooSmall, rank, solve
from .schemecalc import (
    CurveOnSurface,
    FatPoint,
    LineComp,
    PlaneFatPoint,
    SimplePoint,
    SurfacePoint,
    SurfaceTangentVector,
    TangentVector,
    TraceScheme,
    UnionScheme,
    degree as union_degree,
    trace_degree,
)
from .space import ConicInPlane, LineP3, PlaneP3, QuadricP3, normalize


@lru_cache(maxsize=None)
def monomials(nvars: int, t: int) -> np.ndarray:
    """Exponent vectors of degree-t monomials, shape (C(t+n-1, n-1), n)."""
    rows = []
    for combo in combinations_with_replacement(range(nvars), t):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        rows.append(e)
    if t == 0:
        rows = [[0] * nvars]
    out = np.array(rows, dtype=np.int64).reshape(-1, nvars)
    out.setflags(write=False)
    return out


def _power_table(points: np.ndarray, t: int, p: int) -> np.ndarray:
    """pw[k, i, e] = points[k, i] ** e mod p for e = 0..t."""
    k, n = points.shape
    pw = np.ones((k, n, t + 1), dtype=np.int64)
    base = points % p
    for e in range(1, t + 1):
        pw[:, :, e] = pw[:, :, e - 1] * base % p
    return pw


def eval_rows(points, exps: np.ndarray, p: int) -> np.ndarray:
    pts = np.array(points, dtype=np.int64).reshape(len(points), -1)
    t = int(exps.sum(axis=1).max()) if len(exps) else 0
    pw = _power_table(pts, t, p)
    out = np.ones((len(pts), len(exps)), dtype=np.int64)
    for i in range(exps.shape[1]):
        out = out * pw[:, i, exps[:, i]] % p
    return out


def derivative_row(point, direction, exps: np.ndarray, p: int) -> np.ndarray:
    """Row of f -> sum_i direction_i * df/dx_i (point)."""
    q = np.array([point], dtype=np.int64)
    t = int(exps.sum(axis=1).max()) if len(exps) else 0
    pw = _power_table(q, t, p)[0]
    n = exps.shape[1]
    out = np.zeros(len(exps), dtype=np.int64)
    for i in range(n):
        di = int(direction[i]) % p
        if di == 0:
            continue
        term = exps[:, i] % p
        for l in range(n):
            e = exps[:, l] - (1 if l == i else 0)
            term = term * pw[l, np.clip(e, 0, None)] % p
        out = (out + di * term) % p
    return out


@lru_cache(maxsize=64)
def _binom_table(t: int, p: int) -> np.ndarray:
    B = np.zeros((t + 1, t + 1), dtype=np.int64)
    for a in range(t + 1):
        for b in range(a + 1):
            B[a, b] = comb(a, b) % p
    return B


def fatpoint_rows(center, m: int, exps: np.ndarray, p: int) -> np.ndarray:
    """Hasse-derivative rows of order < m at ``center`` in the chart of its
    first nonzero coordinate."""
    c = normalize(center, p)
    n = exps.shape[1]
    piv = next(i for i, x in enumerate(c) if x)
    others = [i for i in range(n) if i != piv]
    t = int(exps.sum(axis=1).max()) if len(exps) else 0
    B = _binom_table(t, p)
    pw = _power_table(np.array([c], dtype=np.int64), t, p)[0]
    rows = []
    for order in range(m):
        for beta in monomials(n - 1, order):
            row = np.ones(len(exps), dtype=np.int64)
            for bi, i in zip(beta, others):
                ai = exps[:, i]
                shift = ai - bi
                ok = shift >= 0
                factor = np.where(ok, B[ai, np.minimum(bi, ai)] * pw[i, np.clip(shift, 0, None)] % p, 0)
                row = row * factor % p
            rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(-1, len(exps))


@dataclass(frozen=True)
class ConditionMatrix:
    ambient: tuple
    matrix: FMatrix
    row_ledger: tuple[tuple[int, str], ...]
    degree: int

    @property
    def rows(self) -> int:
        return self.matrix.rows

    @property
    def cols(self) -> int:
        return self.matrix.cols


@dataclass(frozen=True)
class Cohomology:
    h0: int
    h1: int
    rank: int
    rows: int
    cols: int
    degree: int


def _assemble(blocks, ledger, ncols, p, ambient, deg) -> ConditionMatrix:
    if blocks:
        M = np.vstack(blocks) % p
    else:
        M = np.zeros((0, ncols), dtype=np.int64)
    return ConditionMatrix(ambient, FMatrix(p, np.ascontiguousarray(M, dtype=np.int64)), tuple(ledger), deg)


def build_p3(X: UnionScheme, t: int) -> ConditionMatrix:
    p = X.p
    if t + 1 >= p:
        raise FieldTooSmall(f"t+1={t + 1} must be below p={p}")
    if X.max_multiplicity() >= p:
        raise FieldTooSmall("multiplicity must be below p")
    deg = union_degree(X, t)
    exps = monomials(4, t)
    blocks, ledger = [], []
    for idx, (c, dec) in enumerate(zip(X.components, X.decorations)):
        if isinstance(c, FatPoint):
            rows = fatpoint_rows(c.center.coords, c.m, exps, p)
            kind = "derivative"
        elif isinstance(c, LineComp):
            rows = eval_rows(c.line.param_points(t + 1, p), exps, p)
            kind = "line-sample"
        elif isinstance(c, SimplePoint):
            rows = eval_rows([c.pt.coords], exps, p)
            kind = "evaluation"
        else:
            drow = derivative_row(c.support.coords, c.direction.coords, exps, p)[None, :]
            if dec is None:
                rows = np.vstack([eval_rows([c.support.coords], exps, p), drow])
            else:
                rows = drow
            kind = "tangent"
        blocks.append(rows)
        ledger.extend((idx, kind) for _ in range(len(rows)))
    return _assemble(blocks, ledger, len(exps), p, ("P3", t), deg)


def build_plane(Tr: TraceScheme, t: int) -> ConditionMatrix:
    p = Tr.p
    H = Tr.surface
    if not isinstance(H, PlaneP3):
        raise TypeError("build_plane needs a plane trace")
    if 2 * t + 1 >= p:
        raise FieldTooSmall(f"2t+1={2 * t + 1} must be below p={p}")
    deg = trace_degree(Tr, t)
    exps = monomials(3, t)
    uc = lambda x: H.to_plane_coords(x, p)  # noqa: E731
    blocks, ledger = [], []
    for idx, (it, dec) in enumerate(zip(Tr.items, Tr.decorations)):
        if isinstance(it, PlaneFatPoint):
            rows = fatpoint_rows(uc(it.center), it.m, exps, p)
        elif isinstance(it, SurfacePoint):
            rows = eval_rows([uc(it.pt)], exps, p)
        elif isinstance(it, SurfaceTangentVector):
            drow = derivative_row(uc(it.support), uc(it.direction), exps, p)[None, :]
            rows = drow if dec is not None else np.vstack([eval_rows([uc(it.support)], exps, p), drow])
        else:
            cv = it.curve
            if isinstance(cv, ConicInPlane):
                pts = [uc(cv.point(1, i, p)) for i in range(2 * t + 1)]
            else:
                pts = [uc(x) for x in cv.param_points(t + 1, p)]
            rows = eval_rows(pts, exps, p)
        blocks.append(rows)
        ledger.extend((idx, type(it).__name__) for _ in range(len(rows)))
    return _assemble(blocks, ledger, len(exps), p, ("Plane", t), deg)


def bidegree_exponents(a: int, b: int) -> np.ndarray:
    """Columns (i, j) for s^i t^(a-i) u^j v^(b-j), as 4-exponent rows."""
    rows = [(i, a - i, j, b - j) for i in range(a + 1) for j in range(b + 1)]
    return np.array(rows, dtype=np.int64).reshape(-1, 4)


def _param_tangent(Q: QuadricP3, q, d, p: int) -> tuple[list[int], list[int]]:
    """(dsigma, dtau) with Segre(d) = dsigma x tau + sigma x dtau mod sigma x tau."""
    sigma, tau = Q.params(q, p)
    w = Q.segre_coords(d, p)
    s0, s1 = sigma
    t0, t1 = tau
    A = [
        [t0, 0, s0, 0],
        [t1, 0, 0, s0],
        [0, t0, s1, 0],
        [0, t1, 0, s1],
    ]
    # allow an extra multiple of sigma x tau
    A = [row + [st] for row, st in zip(A, (s0 * t0, s0 * t1, s1 * t0, s1 * t1))]
    x = solve(A, w, p)
    if x is None:
        raise ValueError("direction is not tangent to the quadric")
    return [x[0], x[1]], [x[2], x[3]]


def build_quadric(Tr: TraceScheme, a: int, b: int) -> ConditionMatrix:
    p = Tr.p
    Q = Tr.surface
    if not isinstance(Q, QuadricP3):
        raise TypeError("build_quadric needs a quadric trace")
    if max(a, b) + 1 >= p:
        raise FieldTooSmall("bidegree too large for the field")
    deg = trace_degree(Tr, (a, b))
    exps = bidegree_exponents(a, b)
    blocks, ledger = [], []

    def pv(x):
        s, t = Q.params(x, p)
        return (s[0], s[1], t[0], t[1])

    for idx, (it, dec) in enumerate(zip(Tr.items, Tr.decorations)):
        if isinstance(it, SurfacePoint):
            rows = eval_rows([pv(it.pt)], exps, p)
        elif isinstance(it, SurfaceTangentVector):
            ds, dt = _param_tangent(Q, it.support, it.direction, p)
            drow = derivative_row(pv(it.support), (ds[0], ds[1], dt[0], dt[1]), exps, p)[None, :]
            rows = drow if dec is not None else np.vstack([eval_rows([pv(it.support)], exps, p), drow])
        elif isinstance(it, CurveOnSurface):
            rul, fixed = Q.line_ruling(it.curve, p)
            if rul == (1, 0):
                pts = [(fixed[0], fixed[1], 1, i) for i in range(b + 1)]
            else:
                pts = [(1, i, fixed[0], fixed[1]) for i in range(a + 1)]
            rows = eval_rows(pts, exps, p)
        else:
            raise TypeError(f"{type(it).__name__} cannot be traced on a quadric")
        blocks.append(rows)
        ledger.extend((idx, type(it).__name__) for _ in range(len(rows)))
    return _assemble(blocks, ledger, len(exps), p, ("Quadric", a, b), deg)


def build(obj, twist) -> ConditionMatrix:
    if isinstance(obj, UnionScheme):
        return build_p3(obj, twist)
    if isinstance(obj.surface, PlaneP3):
        return build_plane(obj, twist)
    a, b = twist if isinstance(twist, tuple) else (twist, twist)
    return build_quadric(obj, a, b)


def cohomology_of(cm: ConditionMatrix) -> Cohomology:
    r = rank(cm.matrix)
    h0 = cm.cols - r
    h1 = cm.degree - r
    return Cohomology(h0, h1, r, cm.rows, cm.cols, cm.degree)


def cohomology(obj, twist) -> Cohomology:
    """Instance (h0, h1) of the twisted ideal sheaf: h0 = kernel dimension,
    h1 = degree - rank (rank-nullity against the structure sheaf)."""
    return cohomology_of(build(obj, twist))


def instance_cohomology(obj, twist) -> tuple[int, int]:
    c = cohomology(obj, twist)
    return c.h0, c.h1
