import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from postlab.space import (
    ConicInPlane,
    LineP3,
    PlaneP3,
    ProjPoint,
    QuadricP3,
    ResamplingExhausted,
    incidence,
    line_plane,
    lines_relation,
    normalize,
    plane_line_meet,
    sample_conic,
    sample_line,
    sample_plane,
    sample_point,
    sample_quadric,
)

seeds = st.integers(0, 2**32 - 1)


def pt(*c, p=101):
    return ProjPoint.make(c, p)


def all_points_on(line, p):
    yield line.b
    for lam in range(p):
        yield line.point(lam, p)


def test_normalize_first_nonzero_is_one():
    assert normalize((0, 3, 6, 9), 7) == (0, 1, 2, 3)
    with pytest.raises(ValueError):
        normalize((0, 0, 0, 0), 7)


def test_line_relations():
    p = 101
    L1 = LineP3(pt(1, 0, 0, 0), pt(0, 1, 0, 0))
    L2 = LineP3(pt(0, 0, 1, 0), pt(0, 0, 0, 1))
    L3 = LineP3(pt(1, 0, 0, 0), pt(0, 0, 1, 0))
    assert lines_relation(L1, L2, p).relation == "skew"
    assert lines_relation(L1, LineP3(pt(1, 1, 0, 0), pt(1, 2, 0, 0)), p).relation == "equal"
    assert plane_line_meet(L1, L3, p) == pt(1, 0, 0, 0)
    with pytest.raises(ValueError):
        plane_line_meet(L1, L2, p)
    assert len(L1.equations(p)) == 2


def test_plane_coordinates_round_trip():
    p = 101
    H = PlaneP3.from_coeffs((1, 2, 3, 4), p)
    for u in [(1, 0, 0), (3, 5, 7), (0, 0, 1)]:
        x = H.from_plane_coords(u, p)
        assert H.contains(x, p)
        assert H.from_plane_coords(H.to_plane_coords(x, p), p) == x
    with pytest.raises(ValueError):
        H.to_plane_coords(pt(1, 0, 0, 0), p)
    L = LineP3(pt(1, 0, 0, 0), pt(0, 1, 0, 0))
    inc = line_plane(L, H, p)
    assert inc.relation == "point" and H.contains(inc.points[0], p)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_quadric_structure(seed):
    p = 10007
    rng = np.random.default_rng(seed)
    Q = sample_quadric(rng, p)
    q = sample_point(rng, p, on=Q)
    assert Q.contains(q, p)
    sigma, tau = Q.params(q, p)
    assert Q.point(sigma, tau, p) == q
    A = Q.ruling_line((1, 0), sigma, p)
    B = Q.ruling_line((0, 1), tau, p)
    assert A.contains(q, p) and B.contains(q, p)
    assert Q.line_ruling(A, p)[0] == (1, 0) and Q.line_ruling(B, p)[0] == (0, 1)
    T = Q.tangent_plane(q, p)
    assert all(T.contains(x, p) for x in (A.a, A.b, B.a, B.b))
    other = Q.ruling_line((1, 0), normalize((1, int(rng.integers(0, p))), p), p)
    if not other.same_as(A, p):
        assert lines_relation(A, other, p).relation == "skew"
        assert lines_relation(B, other, p).relation == "meet"
    # a secant through two surface points meets Q there and nowhere else
    r = sample_point(rng, p, on=Q, avoid=[q])
    secant = LineP3(q, r)
    if Q.line_ruling(secant, p) is None:
        kind, pts = Q.intersect_line(secant, p)
        assert kind == "points" and set(pts) == {q, r}


def test_quadric_intersections_by_enumeration():
    """Every intersection kind agrees with listing the p+1 points of the line."""
    p = 11
    rng = np.random.default_rng(5)
    Q = sample_quadric(rng, p)
    seen = set()
    for _ in range(400):
        line = sample_line(rng, p)
        kind, pts = Q.intersect_line(line, p)
        on = {x for x in all_points_on(line, p) if Q.contains(x, p)}
        seen.add(kind)
        if kind == "contained":
            assert len(on) == p + 1
        elif kind == "irrational":
            assert not on
        else:
            assert on == set(pts)
            assert len(pts) == (2 if kind == "points" else 1)
    assert {"points", "irrational", "tangent"} <= seen


def test_singular_parametrisation_rejected():
    p = 101
    with pytest.raises(ValueError):
        QuadricP3.from_param([(1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0), (0, 0, 1, 0)], p)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_conic_points(seed):
    p = 10007
    rng = np.random.default_rng(seed)
    H = sample_plane(rng, p)
    C = sample_conic(rng, p, H)
    assert C.sym_matrix_det(p) != 0
    for s, u in [(1, 0), (0, 1), (1, 1), (3, 7)]:
        x = C.point(s, u, p)
        assert H.contains(x, p) and C.contains(x, p)
    off = sample_point(rng, p, on=H)
    # five points determine the conic: a random plane point is almost never on it
    assert C.contains(off, p) == (C.form_plane(H.to_plane_coords(off, p), p) == 0)


def test_degenerate_conic_rejected():
    p = 101
    H = PlaneP3.from_coeffs((0, 0, 0, 1), p)
    with pytest.raises(ValueError):
        ConicInPlane.from_param(H, [(1, 0, 0), (1, 0, 0), (0, 0, 1)], p)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_samplers_respect_constraints(seed):
    p = 10007
    rng = np.random.default_rng(seed)
    P = sample_point(rng, p)
    H = sample_plane(rng, p, through=[P])
    assert H.contains(P, p)
    L = sample_line(rng, p, in_plane=H, avoid=[P])
    assert line_plane(L, H, p).relation == "contained" and not L.contains(P, p)
    M = sample_line(rng, p, through=P)
    assert M.contains(P, p)
    Q = sample_quadric(rng, p, avoid=[P])
    assert not Q.contains(P, p)
    R = sample_line(rng, p, on_quadric=Q, ruling=(0, 1))
    assert Q.line_ruling(R, p)[0] == (0, 1)


def test_sampling_budget_is_bounded():
    p = 2
    rng = np.random.default_rng(0)
    L = LineP3(pt(1, 0, 0, 0, p=p), pt(0, 1, 0, 0, p=p))
    every = list(all_points_on(L, p))
    with pytest.raises(ResamplingExhausted):
        sample_point(rng, p, on=L, avoid=every)


def test_incidence_dispatch():
    p = 101
    P = pt(1, 0, 0, 0)
    L = LineP3(P, pt(0, 1, 0, 0))
    H = PlaneP3.from_coeffs((0, 0, 0, 1), p)
    assert incidence(P, L, p).relation == "on"
    assert incidence(L, P, p).relation == "on"
    assert incidence(H, L, p).relation == "contained"
    assert incidence(P, P, p).relation == "equal"
    with pytest.raises(TypeError):
        incidence(H, H, p)
