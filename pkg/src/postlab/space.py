"""Points, lines, planes, smooth quadrics and plane conics in P^3 over F_p.

"General position" is realised by seeded uniform sampling followed by
explicit validity predicates; samplers retry a bounded number of times and
raise ``ResamplingExhausted`` when the constraint looks degenerate.
Every object stores plain Python ints; the prime is passed explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exactlin import inverse, matvec, nullspace, small_rank, solve

RESAMPLE_BUDGET = 64

Vec = tuple[int, ...]


class ResamplingExhausted(RuntimeError):
    pass


def normalize(v: Sequence[int], p: int) -> Vec:
    v = [x % p for x in v]
    for x in v:
        if x:
            inv = pow(x, p - 2, p)
            return tuple(y * inv % p for y in v)
    raise ValueError("zero vector is not a projective point")


def rand_vec(rng: np.random.Generator, n: int, p: int) -> list[int]:
    return [int(x) for x in rng.integers(0, p, size=n)]


def rand_nonzero(rng: np.random.Generator, p: int) -> int:
    return int(rng.integers(1, p))


def lincomb(coeffs: Sequence[int], vecs: Sequence[Sequence[int]], p: int) -> list[int]:
    n = len(vecs[0])
    return [sum(c * v[i] for c, v in zip(coeffs, vecs)) % p for i in range(n)]


def dot(u: Sequence[int], v: Sequence[int], p: int) -> int:
    return sum(a * b for a, b in zip(u, v)) % p


@dataclass(frozen=True)
class ProjPoint:
    coords: Vec

    @classmethod
    def make(cls, coords: Sequence[int], p: int) -> "ProjPoint":
        return cls(normalize(coords, p))

    def __iter__(self):
        return iter(self.coords)


@dataclass(frozen=True)
class LineP3:
    a: ProjPoint
    b: ProjPoint

    @classmethod
    def through(cls, x: ProjPoint, y: ProjPoint, p: int) -> "LineP3":
        if x == y:
            raise ValueError("a line needs two distinct points")
        return cls(x, y)

    def point(self, lam: int, p: int) -> ProjPoint:
        """The point a + lam*b (lam = None would be b itself)."""
        return ProjPoint.make(lincomb((1, lam), (self.a.coords, self.b.coords), p), p)

    def param_points(self, count: int, p: int) -> list[Vec]:
        """Unnormalised points a + i*b for i = 0..count-1 (distinct since p > count)."""
        return [tuple(lincomb((1, i), (self.a.coords, self.b.coords), p)) for i in range(count)]

    def contains(self, x: ProjPoint, p: int) -> bool:
        return small_rank([self.a.coords, self.b.coords, x.coords], p) == 2

    def same_as(self, other: "LineP3", p: int) -> bool:
        return other.contains(self.a, p) and other.contains(self.b, p)

    def equations(self, p: int) -> list[list[int]]:
        """Two independent linear forms cutting out the line."""
        return nullspace([self.a.coords, self.b.coords], 4, p)


@dataclass(frozen=True)
class PlaneP3:
    coeffs: Vec
    basis: tuple[Vec, Vec, Vec]
    _chart: tuple = field(default=(), compare=False, repr=False)

    @classmethod
    def from_coeffs(cls, h: Sequence[int], p: int) -> "PlaneP3":
        h = normalize(h, p)
        basis = tuple(tuple(v) for v in nullspace([h], 4, p))
        cols, inv = _chart(basis, p)
        return cls(h, basis, (cols, inv))

    @classmethod
    def spanned_by(cls, pts: Sequence[ProjPoint], p: int) -> "PlaneP3":
        ns = nullspace([q.coords for q in pts], 4, p)
        if len(ns) != 1:
            raise ValueError("points do not span a plane")
        return cls.from_coeffs(ns[0], p)

    def contains(self, x: ProjPoint | Sequence[int], p: int) -> bool:
        return dot(self.coeffs, _coords(x), p) == 0

    def to_plane_coords(self, x: ProjPoint | Sequence[int], p: int) -> Vec:
        """u with x = sum u_i basis_i (x must lie on the plane)."""
        x = _coords(x)
        cols, inv = self._chart
        u = tuple(matvec(inv, [x[c] for c in cols], p))
        if list(lincomb(u, self.basis, p)) != [c % p for c in x]:
            raise ValueError("point is not on the plane")
        return u

    def from_plane_coords(self, u: Sequence[int], p: int) -> ProjPoint:
        return ProjPoint.make(lincomb(u, self.basis, p), p)


def _chart(basis, p):
    """Three coordinate columns on which the 3x4 basis is invertible."""
    from itertools import combinations

    for cols in combinations(range(4), 3):
        sub = [[basis[j][c] for j in range(3)] for c in cols]  # sub[c][j]
        inv = inverse(sub, p)
        if inv is not None:
            return cols, inv
    raise ValueError("degenerate plane basis")


def _coords(x) -> Vec:
    return x.coords if isinstance(x, ProjPoint) else tuple(x)


@dataclass(frozen=True)
class QuadricP3:
    """Smooth quadric as the image of P^1 x P^1 under
    ((s:t),(u:v)) -> s*u*T00 + s*v*T01 + t*u*T10 + t*v*T11.

    Ruling type (1,0) lines have (s:t) fixed; type (0,1) lines have (u:v)
    fixed.
    """

    param: tuple[Vec, Vec, Vec, Vec]
    _inv: tuple = field(default=(), compare=False, repr=False)

    @classmethod
    def from_param(cls, T: Sequence[Sequence[int]], p: int) -> "QuadricP3":
        T = tuple(tuple(x % p for x in v) for v in T)
        M = [[T[j][i] for j in range(4)] for i in range(4)]  # columns are T_j
        inv = inverse(M, p)
        if inv is None:
            raise ValueError("parametrisation does not span P^3; quadric not smooth")
        return cls(T, tuple(tuple(r) for r in inv))

    def point(self, sigma: Sequence[int], tau: Sequence[int], p: int) -> ProjPoint:
        return ProjPoint.make(self.raw_point(sigma, tau, p), p)

    def raw_point(self, sigma, tau, p) -> list[int]:
        s, t = sigma
        u, v = tau
        return lincomb((s * u, s * v, t * u, t * v), self.param, p)

    def segre_coords(self, x, p) -> list[int]:
        return matvec(self._inv, _coords(x), p)

    def form(self, x, p: int) -> int:
        w = self.segre_coords(x, p)
        return (w[0] * w[3] - w[1] * w[2]) % p

    def contains(self, x, p: int) -> bool:
        return self.form(x, p) == 0

    def polar(self, x, y, p: int) -> int:
        """Symmetric bilinear form B with B(x,x) = 2 Q(x)."""
        wx, wy = self.segre_coords(x, p), self.segre_coords(y, p)
        return (wx[0] * wy[3] + wx[3] * wy[0] - wx[1] * wy[2] - wx[2] * wy[1]) % p

    def tangent_plane(self, x, p: int) -> PlaneP3:
        """Plane {y : B(x, y) = 0}; x must be on the quadric."""
        w = self.segre_coords(x, p)
        g = [w[3], -w[2], -w[1], w[0]]
        # pull back through the inverse: h_i = sum_j g_j inv[j][i]
        h = [sum(g[j] * self._inv[j][i] for j in range(4)) % p for i in range(4)]
        return PlaneP3.from_coeffs(h, p)

    def params(self, x, p: int) -> tuple[Vec, Vec]:
        """((s:t), (u:v)) of a point on the quadric."""
        w = self.segre_coords(x, p)
        if (w[0] * w[3] - w[1] * w[2]) % p:
            raise ValueError("point is not on the quadric")
        # w = [su, sv, tu, tv]: rows (su, sv), (tu, tv) are proportional to tau
        if w[0] or w[1]:
            tau = normalize((w[0], w[1]), p)
        else:
            tau = normalize((w[2], w[3]), p)
        if w[0] or w[2]:
            sigma = normalize((w[0], w[2]), p)
        else:
            sigma = normalize((w[1], w[3]), p)
        return sigma, tau

    def ruling_line(self, ruling: tuple[int, int], fixed: Sequence[int], p: int) -> LineP3:
        if ruling == (1, 0):
            return LineP3(self.point(fixed, (1, 0), p), self.point(fixed, (0, 1), p))
        if ruling == (0, 1):
            return LineP3(self.point((1, 0), fixed, p), self.point((0, 1), fixed, p))
        raise ValueError("ruling must be (1,0) or (0,1)")

    def line_ruling(self, line: LineP3, p: int) -> tuple[tuple[int, int], Vec] | None:
        """Ruling type and fixed parameter if the line lies on the quadric."""
        pts = [line.a, line.b, line.point(1, p)]
        if not all(self.contains(q, p) for q in pts):
            return None
        (sa, ta), (sb, tb) = self.params(line.a, p), self.params(line.b, p)
        if sa == sb:
            return (1, 0), sa
        if ta == tb:
            return (0, 1), ta
        raise AssertionError("line on a smooth quadric must be a ruling")

    def intersect_line(self, line: LineP3, p: int) -> tuple[str, list[ProjPoint]]:
        """'contained' | 'points' (two) | 'tangent' (one, double) | 'irrational'."""
        qa = self.form(line.a, p)
        qb = self.form(line.b, p)
        bab = self.polar(line.a, line.b, p)
        # Q(mu a + lam b) = qa mu^2 + bab mu lam + qb lam^2
        if qa == 0 and qb == 0 and bab == 0:
            return "contained", []
        roots: list[tuple[int, int]] = []
        if qb == 0:
            roots.append((0, 1))  # b itself
            # remaining linear factor: qa mu + bab lam = 0
            roots.append((bab % p, (-qa) % p) if (bab or qa) else (0, 1))
        else:
            disc = (bab * bab - 4 * qa * qb) % p
            from .exactlin import PrimeField

            r = PrimeField(p).sqrt(disc) if disc else 0
            if r is None:
                return "irrational", []
            inv2qb = pow(2 * qb % p, p - 2, p)
            for sgn in (1, -1):
                lam = (-bab + sgn * r) * inv2qb % p
                roots.append((1, lam))
        pts = [ProjPoint.make(lincomb(rt, (line.a.coords, line.b.coords), p), p) for rt in roots]
        if pts[0] == pts[1]:
            return "tangent", pts[:1]
        return "points", pts


@dataclass(frozen=True)
class ConicInPlane:
    """Smooth conic given as the image of (s:u) -> M (s^2, s u, u^2) in the
    plane's parametric coordinates."""

    plane: PlaneP3
    param: tuple[Vec, Vec, Vec]  # 3x3, rows indexed by plane coordinate
    coeffs: Vec = ()
    _inv: tuple = field(default=(), compare=False, repr=False)

    @classmethod
    def from_param(cls, plane: PlaneP3, M: Sequence[Sequence[int]], p: int) -> "ConicInPlane":
        M = tuple(tuple(x % p for x in r) for r in M)
        inv = inverse(M, p)
        if inv is None:
            raise ValueError("conic parametrisation is degenerate")
        # y = inv u ; form y0 y2 - y1^2, expanded in u as 6 coefficients
        # order: u0^2, u0u1, u0u2, u1^2, u1u2, u2^2
        r0, r1, r2 = inv
        idx = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
        co = []
        for i, j in idx:
            c = r0[i] * r2[j] - r1[i] * r1[j]
            if i != j:
                c += r0[j] * r2[i] - r1[j] * r1[i]
            co.append(c % p)
        return cls(plane, M, tuple(co), tuple(tuple(r) for r in inv))

    def form_plane(self, u: Sequence[int], p: int) -> int:
        y = matvec(self._inv, u, p)
        return (y[0] * y[2] - y[1] * y[1]) % p

    def contains(self, x, p: int) -> bool:
        if not self.plane.contains(x, p):
            return False
        return self.form_plane(self.plane.to_plane_coords(x, p), p) == 0

    def point(self, s: int, u: int, p: int) -> ProjPoint:
        pc = matvec(self.param, (s * s, s * u, u * u), p)
        return self.plane.from_plane_coords(pc, p)

    def sym_matrix_det(self, p: int) -> int:
        """Determinant of 2 * (symmetric matrix of the form); nonzero iff smooth."""
        c = self.coeffs
        S = [[2 * c[0], c[1], c[2]], [c[1], 2 * c[3], c[4]], [c[2], c[4], 2 * c[5]]]
        return _det3(S, p)


def _det3(S, p):
    return (
        S[0][0] * (S[1][1] * S[2][2] - S[1][2] * S[2][1])
        - S[0][1] * (S[1][0] * S[2][2] - S[1][2] * S[2][0])
        + S[0][2] * (S[1][0] * S[2][1] - S[1][1] * S[2][0])
    ) % p


# -- incidence ---------------------------------------------------------------


@dataclass(frozen=True)
class Incidence:
    relation: str
    points: tuple[ProjPoint, ...] = ()


def lines_relation(l1: LineP3, l2: LineP3, p: int) -> Incidence:
    r = small_rank([l1.a.coords, l1.b.coords, l2.a.coords, l2.b.coords], p)
    if r == 4:
        return Incidence("skew")
    if r == 2:
        return Incidence("equal")
    # coplanar: solve x l1.a + y l1.b = z l2.a + w l2.b
    ns = nullspace([[l1.a.coords[i], l1.b.coords[i], -l2.a.coords[i], -l2.b.coords[i]] for i in range(4)], 4, p)
    x, y = ns[0][0], ns[0][1]
    return Incidence("meet", (ProjPoint.make(lincomb((x, y), (l1.a.coords, l1.b.coords), p), p),))


def line_plane(line: LineP3, plane: PlaneP3, p: int) -> Incidence:
    ha, hb = dot(plane.coeffs, line.a.coords, p), dot(plane.coeffs, line.b.coords, p)
    if ha == 0 and hb == 0:
        return Incidence("contained")
    pt = ProjPoint.make(lincomb((hb, -ha), (line.a.coords, line.b.coords), p), p)
    return Incidence("point", (pt,))


def incidence(a, b, p: int) -> Incidence:
    """Membership / intersection report between two geometric objects."""
    if isinstance(b, ProjPoint) and not isinstance(a, ProjPoint):
        a, b = b, a
    if isinstance(a, ProjPoint):
        if isinstance(b, ProjPoint):
            return Incidence("equal" if a == b else "distinct")
        return Incidence("on" if b.contains(a, p) else "off")
    if isinstance(a, LineP3) and isinstance(b, LineP3):
        return lines_relation(a, b, p)
    if isinstance(b, LineP3):
        a, b = b, a
    if isinstance(a, LineP3) and isinstance(b, PlaneP3):
        return line_plane(a, b, p)
    if isinstance(a, LineP3) and isinstance(b, QuadricP3):
        kind, pts = b.intersect_line(a, p)
        names = {"contained": "contained", "points": "points", "tangent": "tangent", "irrational": "no rational intersection"}
        return Incidence(names[kind], tuple(pts))
    raise TypeError(f"unsupported incidence between {type(a).__name__} and {type(b).__name__}")


# -- sampling ----------------------------------------------------------------


def sample_point(rng: np.random.Generator, p: int, on=None, avoid: Iterable[ProjPoint] = ()) -> ProjPoint:
    avoid = set(avoid)
    for _ in range(RESAMPLE_BUDGET):
        if on is None:
            v = rand_vec(rng, 4, p)
            if not any(v):
                continue
            x = ProjPoint.make(v, p)
        elif isinstance(on, PlaneP3):
            u = rand_vec(rng, 3, p)
            if not any(u):
                continue
            x = on.from_plane_coords(u, p)
        elif isinstance(on, LineP3):
            x = on.point(int(rng.integers(0, p)), p)
        elif isinstance(on, QuadricP3):
            s, u = rand_vec(rng, 2, p)
            x = on.point((1, s), (1, u), p)
        elif isinstance(on, ConicInPlane):
            x = on.point(1, int(rng.integers(0, p)), p)
        else:
            raise TypeError(f"unsupported constraint {on!r}")
        if x not in avoid:
            return x
    raise ResamplingExhausted("could not sample a point avoiding the given set")


def sample_line(
    rng: np.random.Generator,
    p: int,
    *,
    in_plane: PlaneP3 | None = None,
    through: ProjPoint | None = None,
    on_quadric: QuadricP3 | None = None,
    ruling: tuple[int, int] = (1, 0),
    avoid: Iterable[ProjPoint] = (),
) -> LineP3:
    """Random line, optionally inside a plane, through a point, or a ruling
    line of a quadric (through ``through`` when given)."""
    avoid = list(avoid)
    if on_quadric is not None:
        for _ in range(RESAMPLE_BUDGET):
            if through is not None:
                sigma, tau = on_quadric.params(through, p)
            else:
                sigma = normalize((1, int(rng.integers(0, p))), p)
                tau = normalize((1, int(rng.integers(0, p))), p)
            line = on_quadric.ruling_line(ruling, sigma if ruling == (1, 0) else tau, p)
            if not any(line.contains(q, p) for q in avoid):
                return line
        raise ResamplingExhausted("ruling line avoiding points not found")
    for _ in range(RESAMPLE_BUDGET):
        x = through if through is not None else sample_point(rng, p, on=in_plane)
        y = sample_point(rng, p, on=in_plane, avoid=[x])
        line = LineP3(x, y)
        if not any(line.contains(q, p) for q in avoid):
            return line
    raise ResamplingExhausted("line avoiding points not found")


def sample_plane(rng: np.random.Generator, p: int, through: Sequence[ProjPoint] = ()) -> PlaneP3:
    for _ in range(RESAMPLE_BUDGET):
        if through:
            ns = nullspace([q.coords for q in through], 4, p)
            h = lincomb(rand_vec(rng, len(ns), p), ns, p)
        else:
            h = rand_vec(rng, 4, p)
        if any(h):
            return PlaneP3.from_coeffs(h, p)
    raise ResamplingExhausted("plane")


def sample_quadric(rng: np.random.Generator, p: int, avoid: Iterable[ProjPoint] = ()) -> QuadricP3:
    avoid = list(avoid)
    for _ in range(RESAMPLE_BUDGET):
        T = [rand_vec(rng, 4, p) for _ in range(4)]
        try:
            Q = QuadricP3.from_param(T, p)
        except ValueError:
            continue
        if not any(Q.contains(q, p) for q in avoid):
            return Q
    raise ResamplingExhausted("smooth quadric")


def sample_conic(rng: np.random.Generator, p: int, plane: PlaneP3, avoid: Iterable[ProjPoint] = ()) -> ConicInPlane:
    avoid = list(avoid)
    for _ in range(RESAMPLE_BUDGET):
        M = [rand_vec(rng, 3, p) for _ in range(3)]
        try:
            C = ConicInPlane.from_param(plane, M, p)
        except ValueError:
            continue
        if not any(C.contains(q, p) for q in avoid):
            return C
    raise ResamplingExhausted("smooth conic")


def plane_line_meet(l1: LineP3, l2: LineP3, p: int) -> ProjPoint:
    rel = lines_relation(l1, l2, p)
    if rel.relation != "meet":
        raise ValueError(f"lines do not meet in a point ({rel.relation})")
    return rel.points[0]
