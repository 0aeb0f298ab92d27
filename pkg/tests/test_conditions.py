from math import comb

import numpy as np
import pytest

import oracles
from postlab.certify import sample_residual_instance
from postlab.conditions import (
    bidegree_exponents,
    build,
    cohomology,
    derivative_row,
    eval_rows,
    fatpoint_rows,
    monomials,
)
from postlab.exactlin import DEFAULT_PRIME as P_, FieldTooSmall, FMatrix, rank
from postlab.schemecalc import (
    CurveOnSurface,
    FatPoint,
    LineComp,
    PlaneFatPoint,
    SimplePoint,
    SurfacePoint,
    SurfaceTangentVector,
    TraceScheme,
    UnionScheme,
    residual,
)
from postlab.space import PlaneP3, ProjPoint, sample_line, sample_point, sample_quadric


def union_oracle(X, t):
    kw = {"fat": [], "lines": [], "points": [], "vectors": []}
    for c in X.components:
        if isinstance(c, FatPoint):
            kw["fat"].append((c.center.coords, c.m))
        elif isinstance(c, LineComp):
            kw["lines"].append((c.line.a.coords, c.line.b.coords))
        elif isinstance(c, SimplePoint):
            kw["points"].append(c.pt.coords)
        else:
            kw["vectors"].append((c.support.coords, c.direction.coords))
    return oracles.p3_h(t, X.p, **kw)


def trace_oracle(Tr, x):
    """h0 on the surface via forms of P^3 vanishing on the trace."""
    kw = {"lines": [], "points": [], "vectors": [], "plane_fat": []}
    for it in Tr.items:
        if isinstance(it, PlaneFatPoint):
            others = [b for b in Tr.surface.basis]
            v1, v2 = _two_more(it.center.coords, others, Tr.p)
            kw["plane_fat"].append((it.center.coords, v1, v2, it.m))
        elif isinstance(it, SurfacePoint):
            kw["points"].append(it.pt.coords)
        elif isinstance(it, SurfaceTangentVector):
            kw["vectors"].append((it.support.coords, it.direction.coords))
        else:
            assert isinstance(it, CurveOnSurface)
            kw["lines"].append((it.curve.a.coords, it.curve.b.coords))
    h0_p3, _ = oracles.p3_h(x, Tr.p, **kw)
    e = 1 if isinstance(Tr.surface, PlaneP3) else 2
    return oracles.surface_h0(h0_p3, x, e)


def _two_more(c, basis, p):
    from postlab.exactlin import small_rank

    for i in range(3):
        for j in range(i + 1, 3):
            if small_rank([c, basis[i], basis[j]], p) == 3:
                return basis[i], basis[j]
    raise AssertionError


def test_monomials_counts():
    assert monomials(4, 3).shape == (20, 4)
    assert monomials(3, 0).tolist() == [[0, 0, 0]]
    assert bidegree_exponents(2, 1).shape == (6, 4)


@pytest.mark.parametrize("m", range(1, 7))
def test_fat_point_imposes_its_degree(m):
    rng = np.random.default_rng(m)
    c = sample_point(rng, P_).coords
    exps = monomials(4, m + 1)
    rows = fatpoint_rows(c, m, exps, P_)
    assert rows.shape[0] == comb(m + 2, 3)
    assert rank(FMatrix(P_, rows)) == comb(m + 2, 3)


def test_rows_match_symbolic_expansion():
    p = 10007
    t = 3
    mons = oracles.monomials(t)
    # the oracle's monomial order differs, so compare ranks of stacked blocks
    c, d = (1, 2, 3, 4), (0, 1, 5, 2)
    exps = monomials(4, t)
    ours = np.vstack([fatpoint_rows(c, 2, exps, p), eval_rows([d], exps, p), derivative_row(d, c, exps, p)[None, :]])
    theirs = oracles.fat_point_rows(mons, c, 2, p) + oracles.vector_rows(mons, d, c, p)
    assert rank(FMatrix(p, ours % p)) == oracles.gf_rank(theirs, p) == 6


def test_two_lines_and_double_point():
    rng = np.random.default_rng(11)
    P = sample_point(rng, P_)
    lines = []
    while len(lines) < 2:
        try:
            lines.append(sample_line(rng, P_, avoid=[P]))
            UnionScheme.of([LineComp(l) for l in lines], P_)
        except Exception:
            lines.pop()
    X = UnionScheme.of([FatPoint(P, 2)] + [LineComp(l) for l in lines], P_)
    c = cohomology(X, 2)
    assert (c.h0, c.h1) == (1, 1)
    assert (c.h0, c.rank) == union_oracle(X, 2)


@pytest.mark.parametrize("seed", range(12))
def test_random_residual_instances_match_oracle(seed):
    X, F, x = sample_residual_instance(1000 + seed)
    x = min(x, 4)
    e = 1 if isinstance(F, PlaneP3) else 2
    if x - e < X.max_multiplicity() - 1:
        x = X.max_multiplicity() - 1 + e
    R, Tr = residual(X, F)
    cx = cohomology(X, x)
    assert (cx.h0, cx.rank) == union_oracle(X, x)
    cr = cohomology(R, x - e)
    assert (cr.h0, cr.rank) == union_oracle(R, x - e)
    assert cohomology(Tr, x).h0 == trace_oracle(Tr, x)


def test_quadric_line_and_points():
    rng = np.random.default_rng(2)
    Q = sample_quadric(rng, P_)
    B = sample_line(rng, P_, on_quadric=Q, ruling=(0, 1))
    Tr = TraceScheme.of(Q, [CurveOnSurface(B, (0, 1))], P_)
    assert cohomology(Tr, (3, 3)).h0 == 12
    pts = [SurfacePoint(sample_point(rng, P_, on=Q)) for _ in range(4)]
    c = cohomology(TraceScheme.of(Q, pts, P_), (1, 1))
    assert (c.h0, c.h1) == (0, 0)
    # unequal bidegree: (1,0) line has sigma fixed, so b+1 conditions
    A = sample_line(rng, P_, on_quadric=Q, ruling=(1, 0))
    c = cohomology(TraceScheme.of(Q, [CurveOnSurface(A, (1, 0))], P_), (2, 4))
    assert (c.h0, c.h1) == (15 - 5, 0)


def test_plane_conic_trace():
    from postlab.space import sample_conic

    rng = np.random.default_rng(8)
    H = PlaneP3.from_coeffs((1, 3, 5, 7), P_)
    C = sample_conic(rng, P_, H)
    c = cohomology(TraceScheme.of(H, [CurveOnSurface(C)], P_), 3)
    # plane cubics containing a conic: conic times a line
    assert (c.h0, c.h1, c.degree) == (3, 0, 7)


def test_field_too_small():
    p = 5
    X = UnionScheme.of([LineComp(sample_line(np.random.default_rng(0), p))], p)
    with pytest.raises(FieldTooSmall):
        build(X, 4)


def test_projective_invariance_of_fat_point_rows():
    """Rows taken in different charts span the same space."""
    p = 10007
    exps = monomials(4, 4)
    a = fatpoint_rows((1, 2, 3, 4), 3, exps, p)
    b = fatpoint_rows((2, 4, 6, 8), 3, exps, p)  # same point, scaled
    stacked = FMatrix(p, np.vstack([a, b]) % p)
    assert rank(stacked) == rank(FMatrix(p, a % p)) == 10


def test_point_with_zero_first_coordinate():
    q = ProjPoint.make((0, 0, 3, 1), P_)
    X = UnionScheme.of([FatPoint(q, 3)], P_)
    assert (cohomology(X, 3).h0, cohomology(X, 3).rank) == union_oracle(X, 3)
