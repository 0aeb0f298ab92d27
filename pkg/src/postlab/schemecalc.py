"""Scheme components, validated unions, degree accounting, and residual /
trace splitting with respect to a plane or a smooth quadric.

A union is built from four kinds of atoms: fat points, lines, simple
points and tangent vectors (degree-2 connected schemes).  A tangent vector
whose support lies on a line of the union is *decorated*: together with
the line it adds only one condition, the normal direction.

Residual rules, with F a plane or smooth quadric and q the support:

* line not in F: kept; trace gets its intersection points with F.
* line in F: dropped; trace gets the curve.
* fat point off F: kept.  On a plane F: multiplicity drops by one and the
  trace gets the planar fat point of the same multiplicity.
* free tangent vector inside F: dropped, trace gets it.  Support on F but
  transverse: residual gets the point, trace gets the point.  Off F: kept.
* decorated tangent vector, line in F: if the vector lies in F it goes to
  the trace (decorated on the curve), otherwise the residual gets the
  point q.  Line transverse to F at q: residual keeps only the line and
  the trace gets a free tangent vector at q along span(line, vector) ∩ T_qF.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from . import postnum
from .exactlin import nullspace
from .space import (
    ConicInPlane,
    LineP3,
    PlaneP3,
    ProjPoint,
    QuadricP3,
    lines_relation,
    line_plane,
)


class SchemeError(ValueError):
    """A union or trace violates its validity invariants."""


class NonTransverse(SchemeError):
    pass


class DegreeUndefined(ValueError):
    pass


# -- components ---------------------------------------------------------------


@dataclass(frozen=True)
class FatPoint:
    center: ProjPoint
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise SchemeError("fat point multiplicity must be >= 1 (0P is the empty scheme)")


@dataclass(frozen=True)
class LineComp:
    line: LineP3


@dataclass(frozen=True)
class SimplePoint:
    pt: ProjPoint


@dataclass(frozen=True)
class TangentVector:
    support: ProjPoint
    direction: ProjPoint

    def __post_init__(self):
        if self.support == self.direction:
            raise SchemeError("tangent vector direction must differ from its support")


Component = Union[FatPoint, LineComp, SimplePoint, TangentVector]


@dataclass(frozen=True)
class UnionScheme:
    p: int
    components: tuple[Component, ...]
    # for each component: index of the line carrying a tangent vector's support
    decorations: tuple[int | None, ...] = field(default=())

    @classmethod
    def of(cls, components: Iterable[Component], p: int) -> "UnionScheme":
        comps = tuple(components)
        return cls(p, comps, _validate_union(comps, p))

    @property
    def lines(self) -> list[LineP3]:
        return [c.line for c in self.components if isinstance(c, LineComp)]

    @property
    def fat_points(self) -> list[FatPoint]:
        return [c for c in self.components if isinstance(c, FatPoint)]

    def tangent_vectors(self) -> list[tuple[TangentVector, int | None]]:
        return [
            (c, dec)
            for c, dec in zip(self.components, self.decorations)
            if isinstance(c, TangentVector)
        ]

    def max_multiplicity(self) -> int:
        return max((f.m for f in self.fat_points), default=0)

    def summary(self) -> dict:
        kinds = {"fat_points": 0, "lines": 0, "simple_points": 0, "tangent_vectors": 0, "decorated": 0}
        for c, dec in zip(self.components, self.decorations):
            if isinstance(c, FatPoint):
                kinds["fat_points"] += 1
            elif isinstance(c, LineComp):
                kinds["lines"] += 1
            elif isinstance(c, SimplePoint):
                kinds["simple_points"] += 1
            else:
                kinds["tangent_vectors"] += 1
                kinds["decorated"] += dec is not None
        return kinds


def _validate_union(comps: tuple[Component, ...], p: int) -> tuple[int | None, ...]:
    line_idx = [i for i, c in enumerate(comps) if isinstance(c, LineComp)]
    for n, i in enumerate(line_idx):
        for j in line_idx[n + 1 :]:
            rel = lines_relation(comps[i].line, comps[j].line, p).relation
            if rel != "skew":
                raise SchemeError(f"lines {i} and {j} are not disjoint ({rel})")

    def on_line(x: ProjPoint) -> int | None:
        for i in line_idx:
            if comps[i].line.contains(x, p):
                return i
        return None

    seen: set[ProjPoint] = set()
    decorations: list[int | None] = []
    for i, c in enumerate(comps):
        dec = None
        if isinstance(c, FatPoint):
            if on_line(c.center) is not None:
                raise SchemeError("fat point center lies on a line of the union")
            _claim(seen, c.center)
        elif isinstance(c, SimplePoint):
            if on_line(c.pt) is not None:
                raise SchemeError("simple point lies on a line of the union")
            _claim(seen, c.pt)
        elif isinstance(c, TangentVector):
            dec = on_line(c.support)
            if dec is not None and comps[dec].line.contains(c.direction, p):
                raise SchemeError("tangent vector is contained in a line of the union")
            _claim(seen, c.support)
        decorations.append(dec)
    return tuple(decorations)


def _claim(seen: set, x: ProjPoint) -> None:
    if x in seen:
        raise SchemeError(f"two zero-dimensional components share the point {x.coords}")
    seen.add(x)


def degree(X: UnionScheme, t: int) -> int:
    """h^0(O_X(t)) for a valid union; needs t >= m-1 for every fat point."""
    total = 0
    for c, dec in zip(X.components, X.decorations):
        if isinstance(c, FatPoint):
            if t < c.m - 1:
                raise DegreeUndefined(f"t={t} < m-1={c.m - 1}")
            total += postnum.fatpoint_degree(c.m)
        elif isinstance(c, LineComp):
            total += t + 1
        elif isinstance(c, SimplePoint):
            total += 1
        else:
            total += 1 if dec is not None else 2
    return total


# -- traces ---------------------------------------------------------------------


@dataclass(frozen=True)
class PlaneFatPoint:
    center: ProjPoint
    m: int


@dataclass(frozen=True)
class SurfacePoint:
    pt: ProjPoint


@dataclass(frozen=True)
class SurfaceTangentVector:
    support: ProjPoint
    direction: ProjPoint


@dataclass(frozen=True)
class CurveOnSurface:
    curve: LineP3 | ConicInPlane
    ruling: tuple[int, int] | None = None


TraceItem = Union[PlaneFatPoint, SurfacePoint, SurfaceTangentVector, CurveOnSurface]
Surface = Union[PlaneP3, QuadricP3]


def surface_degree(F: Surface) -> int:
    return 1 if isinstance(F, PlaneP3) else 2


def tangent_plane(F: Surface, q: ProjPoint, p: int) -> PlaneP3:
    return F if isinstance(F, PlaneP3) else F.tangent_plane(q, p)


@dataclass(frozen=True)
class TraceScheme:
    p: int
    surface: Surface
    items: tuple[TraceItem, ...]
    decorations: tuple[int | None, ...] = ()
    meeting_pairs: int = 0

    @classmethod
    def of(cls, surface: Surface, items: Iterable[TraceItem], p: int) -> "TraceScheme":
        items = tuple(items)
        decs, meets = _validate_trace(surface, items, p)
        return cls(p, surface, items, decs, meets)

    def curves(self) -> list[CurveOnSurface]:
        return [c for c in self.items if isinstance(c, CurveOnSurface)]


def _curve_contains(curve, x, p) -> bool:
    return curve.contains(x, p)


def _validate_trace(F: Surface, items: tuple[TraceItem, ...], p: int):
    is_plane = isinstance(F, PlaneP3)
    curve_idx = [i for i, it in enumerate(items) if isinstance(it, CurveOnSurface)]
    meets = 0
    for i in curve_idx:
        cv = items[i].curve
        if isinstance(cv, ConicInPlane):
            if not is_plane or cv.plane.coeffs != F.coeffs:
                raise SchemeError("conics are only supported inside the trace plane")
        else:
            if is_plane:
                if line_plane(cv, F, p).relation != "contained":
                    raise SchemeError("trace line not contained in the plane")
            elif F.line_ruling(cv, p) is None:
                raise SchemeError("trace line not contained in the quadric")
    for n, i in enumerate(curve_idx):
        for j in curve_idx[n + 1 :]:
            a, b = items[i].curve, items[j].curve
            if isinstance(a, LineP3) and isinstance(b, LineP3):
                rel = lines_relation(a, b, p).relation
                if rel == "equal":
                    raise SchemeError("repeated trace curve")
                if rel == "meet":
                    meets += 1
            else:
                raise SchemeError("only lines may share a trace with other curves")
    if meets and len(curve_idx) > 2:
        raise SchemeError("at most two meeting trace lines are supported")

    def on_curve(x) -> int | None:
        for i in curve_idx:
            if _curve_contains(items[i].curve, x, p):
                return i
        return None

    seen: set = set()
    decs: list[int | None] = []
    for it in items:
        dec = None
        if isinstance(it, PlaneFatPoint):
            if not is_plane:
                raise SchemeError("fat points are traced only on planes")
            if not F.contains(it.center, p):
                raise SchemeError("trace fat point off the plane")
            if on_curve(it.center) is not None:
                raise SchemeError("trace fat point on a trace curve")
            _claim(seen, it.center)
        elif isinstance(it, SurfacePoint):
            if not F.contains(it.pt, p):
                raise SchemeError("trace point off the surface")
            if on_curve(it.pt) is not None:
                raise SchemeError("trace point on a trace curve")
            _claim(seen, it.pt)
        elif isinstance(it, SurfaceTangentVector):
            if not F.contains(it.support, p):
                raise SchemeError("trace tangent vector support off the surface")
            if not tangent_plane(F, it.support, p).contains(it.direction, p):
                raise SchemeError("trace tangent vector not tangent to the surface")
            dec = on_curve(it.support)
            if dec is not None and _vector_in_curve(items[dec].curve, it, p):
                raise SchemeError("trace tangent vector contained in a trace curve")
            _claim(seen, it.support)
        decs.append(dec)
    return tuple(decs), meets


def _vector_in_curve(curve, v: SurfaceTangentVector, p: int) -> bool:
    if isinstance(curve, LineP3):
        return curve.contains(v.direction, p)
    # conic: tangent iff the polar of support and direction vanishes
    pl = curve.plane
    u = pl.to_plane_coords(v.support, p)
    w = pl.to_plane_coords(v.direction, p)
    c = curve.coeffs
    idx = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
    pol = 0
    for co, (i, j) in zip(c, idx):
        pol += co * (u[i] * w[j] + u[j] * w[i])
    return pol % p == 0


def _bidegree(F: Surface, twist) -> tuple[int, int]:
    if isinstance(twist, tuple):
        return twist
    return (twist, twist)


def trace_degree(Tr: TraceScheme, twist) -> int:
    """h^0 of the trace's structure sheaf at ``twist`` (int for a plane,
    int or (a, b) for a quadric)."""
    total = 0
    plane = isinstance(Tr.surface, PlaneP3)
    if plane:
        x = twist
    else:
        a, b = _bidegree(Tr.surface, twist)
    for it, dec in zip(Tr.items, Tr.decorations):
        if isinstance(it, PlaneFatPoint):
            if x < it.m - 1:
                raise DegreeUndefined(f"x={x} < m-1={it.m - 1}")
            total += postnum.plane_fatpoint_degree(it.m)
        elif isinstance(it, SurfacePoint):
            total += 1
        elif isinstance(it, SurfaceTangentVector):
            total += 1 if dec is not None else 2
        else:
            if isinstance(it.curve, ConicInPlane):
                total += 2 * x + 1
            elif plane:
                total += x + 1
            else:
                rul, _ = Tr.surface.line_ruling(it.curve, Tr.p)
                total += (b + 1) if rul == (1, 0) else (a + 1)
    return total - Tr.meeting_pairs


# -- residual -------------------------------------------------------------------


def _in_tangent_space(F: Surface, q: ProjPoint, d: ProjPoint, p: int) -> bool:
    return tangent_plane(F, q, p).contains(d, p)


def _line_trace_points(line: LineP3, F: Surface, p: int) -> list[ProjPoint] | None:
    """Intersection points of a line with F, or None if contained."""
    if isinstance(F, PlaneP3):
        inc = line_plane(line, F, p)
        return None if inc.relation == "contained" else list(inc.points)
    kind, pts = F.intersect_line(line, p)
    if kind == "contained":
        return None
    if kind == "tangent":
        raise NonTransverse("line tangent to the quadric")
    if kind == "irrational":
        raise NonTransverse("line meets the quadric in no rational point")
    return pts


def _projected_direction(line: LineP3, d: ProjPoint, T: PlaneP3, q: ProjPoint, p: int) -> ProjPoint:
    """A point other than q on span(line, d) ∩ T."""
    span = nullspace([line.a.coords, line.b.coords, d.coords], 4, p)
    if len(span) != 1:
        raise SchemeError("tangent vector direction lies on its line")
    pts = nullspace([span[0], list(T.coeffs)], 4, p)
    for v in pts:
        x = ProjPoint.make(v, p)
        if x != q:
            return x
    raise SchemeError("degenerate projection of a tangent direction")


def residual(X: UnionScheme, F: Surface) -> tuple[UnionScheme, TraceScheme]:
    p = X.p
    is_plane = isinstance(F, PlaneP3)
    res: list[Component] = []
    trace: list[TraceItem] = []

    line_pts: dict[int, list[ProjPoint] | None] = {}
    for i, c in enumerate(X.components):
        if isinstance(c, LineComp):
            line_pts[i] = _line_trace_points(c.line, F, p)

    # decorated vectors may replace a line's trace point by a tangent vector
    absorbed: set[tuple[int, ProjPoint]] = set()
    vec_out: dict[int, tuple[list[Component], list[TraceItem]]] = {}
    for i, (c, dec) in enumerate(zip(X.components, X.decorations)):
        if not isinstance(c, TangentVector):
            continue
        q, d = c.support, c.direction
        on_F = F.contains(q, p)
        if dec is None:
            if not on_F:
                vec_out[i] = ([c], [])
            elif _in_tangent_space(F, q, d, p):
                vec_out[i] = ([], [SurfaceTangentVector(q, d)])
            else:
                vec_out[i] = ([SimplePoint(q)], [SurfacePoint(q)])
            continue
        line = X.components[dec].line
        if line_pts[dec] is None:  # line inside F
            if _in_tangent_space(F, q, d, p):
                vec_out[i] = ([], [SurfaceTangentVector(q, d)])
            else:
                vec_out[i] = ([SimplePoint(q)], [])
        elif on_F:
            T = tangent_plane(F, q, p)
            direction = _projected_direction(line, d, T, q, p)
            absorbed.add((dec, q))
            vec_out[i] = ([], [SurfaceTangentVector(q, direction)])
        else:
            vec_out[i] = ([c], [])

    for i, c in enumerate(X.components):
        if isinstance(c, LineComp):
            pts = line_pts[i]
            if pts is None:
                trace.append(CurveOnSurface(c.line, None if is_plane else F.line_ruling(c.line, p)[0]))
            else:
                res.append(c)
                trace.extend(SurfacePoint(x) for x in pts if (i, x) not in absorbed)
        elif isinstance(c, FatPoint):
            if not F.contains(c.center, p):
                res.append(c)
            elif not is_plane:
                raise SchemeError("fat points on the quadric are not supported")
            else:
                if c.m > 1:
                    res.append(FatPoint(c.center, c.m - 1))
                trace.append(PlaneFatPoint(c.center, c.m))
        elif isinstance(c, SimplePoint):
            if F.contains(c.pt, p):
                trace.append(SurfacePoint(c.pt))
            else:
                res.append(c)
        else:
            r, t = vec_out[i]
            res.extend(r)
            trace.extend(t)
    return UnionScheme.of(res, p), TraceScheme.of(F, trace, p)


# -- Castelnuovo ---------------------------------------------------------------


@dataclass(frozen=True)
class CastelnuovoReport:
    x: int
    surface_degree: int
    h0_X: int
    h1_X: int
    h0_res: int
    h1_res: int
    h0_trace: int
    h1_trace: int
    degree_X: int
    degree_res: int
    degree_trace: int

    @property
    def h0_inequality(self) -> bool:
        return self.h0_X <= self.h0_res + self.h0_trace

    @property
    def h1_inequality(self) -> bool:
        return self.h1_X <= self.h1_res + self.h1_trace

    @property
    def degree_conserved(self) -> bool:
        return self.degree_X == self.degree_res + self.degree_trace

    @property
    def vanishing_transfers(self) -> bool:
        """h1(Res) = h1(trace) = 0 forces h1(X) = 0."""
        return self.h1_res == 0 and self.h1_trace == 0

    def as_dict(self) -> dict:
        return {
            "x": self.x,
            "surface_degree": self.surface_degree,
            "h0": [self.h0_X, self.h0_res, self.h0_trace],
            "h1": [self.h1_X, self.h1_res, self.h1_trace],
            "degree": [self.degree_X, self.degree_res, self.degree_trace],
            "h0_inequality": self.h0_inequality,
            "h1_inequality": self.h1_inequality,
            "degree_conserved": self.degree_conserved,
        }


def castelnuovo_check(X: UnionScheme, F: Surface, x: int) -> CastelnuovoReport:
    from .conditions import cohomology

    e = surface_degree(F)
    if x < e:
        raise ValueError(f"x={x} must be >= deg F={e}")
    R, Tr = residual(X, F)
    cx = cohomology(X, x)
    cr = cohomology(R, x - e)
    ct = cohomology(Tr, x)
    return CastelnuovoReport(
        x, e, cx.h0, cx.h1, cr.h0, cr.h1, ct.h0, ct.h1, cx.degree, cr.degree, ct.degree
    )
