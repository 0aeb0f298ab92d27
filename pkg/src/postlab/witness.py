"""Explicit witness configurations B(m), R(m) and H_{m,k}.

Builders pick points on the surface first and then lines through them, so
every intersection stays rational.  Each builder records its structural
checks, asserts the degree identity before any rank computation, and ends
with the rank check that makes the configuration a witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import postnum
from .conditions import cohomology
from .exactlin import DEFAULT_PRIME, PrimeField
from .schemecalc import (
    FatPoint,
    LineComp,
    SchemeError,
    SimplePoint,
    TangentVector,
    UnionScheme,
    degree,
)
from .space import (
    ConicInPlane,
    LineP3,
    PlaneP3,
    ProjPoint,
    QuadricP3,
    ResamplingExhausted,
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

WITNESS_ATTEMPTS = 3
LINE_BUDGET = 64


class WitnessFailed(RuntimeError):
    def __init__(self, kind: str, check: str, detail: str = ""):
        super().__init__(f"{kind} witness failed at '{check}' {detail}".strip())
        self.kind = kind
        self.check = check
        self.detail = detail


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class WitnessConfig:
    kind: str
    m: int
    t: int
    prime: int
    seed: int
    P: ProjPoint
    scheme: UnionScheme
    lines: list[LineP3]
    plane: PlaneP3 | None = None
    quadric: QuadricP3 | None = None
    conic: ConicInPlane | None = None
    L: LineP3 | None = None
    R: LineP3 | None = None
    O: ProjPoint | None = None
    E: list[LineP3] = field(default_factory=list)
    S: list[ProjPoint] = field(default_factory=list)
    vectors: list[TangentVector] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    attempts: int = 1
    notes: list[str] = field(default_factory=list)
    N: int = 0
    degree: int = 0
    rank: int = 0
    h0: int = 0
    h1: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def digest(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(repr((self.kind, self.m, self.t, self.prime, self.P.coords)).encode())
        for line in self.lines:
            h.update(repr((line.a.coords, line.b.coords)).encode())
        for v in self.vectors:
            h.update(repr((v.support.coords, v.direction.coords)).encode())
        return h.hexdigest()[:16]

    def report(self) -> dict:
        return {
            "kind": self.kind,
            "m": self.m,
            "t": self.t,
            "prime": self.prime,
            "seed": self.seed,
            "attempts": self.attempts,
            "digest": self.digest(),
            "components": self.scheme.summary(),
            "N": self.N,
            "degree": self.degree,
            "rank": self.rank,
            "h0": self.h0,
            "h1": self.h1,
            "checks": [c.as_dict() for c in self.checks],
            "notes": list(self.notes),
            "passed": self.passed,
        }


def _rng(seed: int, kind: str, m: int, k: int, attempt: int, prime: int) -> np.random.Generator:
    code = {"B": 1, "R": 2, "H": 3}[kind]
    return np.random.default_rng(np.random.SeedSequence([seed, code, m, k, attempt, prime]))


class _Builder:
    """Accumulates pairwise-skew lines avoiding P."""

    def __init__(self, rng, p, P):
        self.rng, self.p, self.P = rng, p, P
        self.lines: list[LineP3] = []

    def accept(self, line: LineP3) -> bool:
        if line.contains(self.P, self.p):
            return False
        if any(lines_relation(line, other, self.p).relation != "skew" for other in self.lines):
            return False
        self.lines.append(line)
        return True

    def add(self, make) -> LineP3:
        for _ in range(LINE_BUDGET):
            line = make()
            if line is not None and self.accept(line):
                return line
        raise ResamplingExhausted("could not place a line in general position")


def _through_off_plane(b: _Builder, q: ProjPoint, H: PlaneP3):
    y = sample_point(b.rng, b.p)
    if H.contains(y, b.p):
        return None
    return LineP3(q, y)


def _check(cfg: WitnessConfig, name: str, ok: bool, detail: str = "") -> None:
    cfg.checks.append(Check(name, bool(ok), detail))


def _run(kind, m, k, seed, prime, attempts, build):
    PrimeField(prime).require_above(max(k + 1, m), "working degree")
    last = None
    for attempt in range(attempts):
        rng = _rng(seed, kind, m, k, attempt, prime)
        try:
            cfg = build(rng)
        except (ResamplingExhausted, SchemeError) as exc:
            last = WitnessFailed(kind, "construction", str(exc))
            continue
        cfg.seed, cfg.attempts = seed, attempt + 1
        failing = [c for c in cfg.checks if not c.passed]
        if not failing:
            return cfg
        last = WitnessFailed(kind, failing[0].name, failing[0].detail)
        # degree identities are pure ledger: resampling cannot fix them
        if failing[0].name.startswith("degree identity"):
            break
    raise last


def _finish(cfg: WitnessConfig, expected_degree: int, expect_rank_eq_N: bool) -> WitnessConfig:
    t = cfg.t
    cfg.N = postnum.forms_dim(t)
    cfg.degree = degree(cfg.scheme, t)
    _check(cfg, "degree identity", cfg.degree == expected_degree, f"{cfg.degree} vs {expected_degree}")
    if not cfg.passed:
        return cfg
    c = cohomology(cfg.scheme, t)
    cfg.rank, cfg.h0, cfg.h1 = c.rank, c.h0, c.h1
    _check(cfg, f"h1(I(t={t})) = 0", c.h1 == 0, f"rank {c.rank} of {c.rows}x{c.cols}")
    if expect_rank_eq_N:
        _check(cfg, f"h0(I(t={t})) = 0", c.h0 == 0, f"h0 = {c.h0}")
    else:
        _check(cfg, f"h0(I(t={t})) = 1", c.h0 == 1, f"h0 = {c.h0}")
    return cfg


def build_witness_B(m: int, seed: int = 0, prime: int = DEFAULT_PRIME, attempts: int = WITNESS_ATTEMPTS) -> WitnessConfig:
    """Plane H through P, two lines L, R of H, and a_{m,m+2} skew lines with
    prescribed numbers of their H-points on L and R.  For odd m, add
    tangent vectors of H at those points and the simple point O = L ∩ R."""
    if m < 2:
        raise ValueError("B(m) needs m >= 2")
    t = m + 2
    cell = postnum.ab(m, t)
    odd = m % 2 == 1

    def build(rng):
        p = prime
        P = sample_point(rng, p)
        H = sample_plane(rng, p, through=[P])
        L = sample_line(rng, p, in_plane=H, avoid=[P])
        for _ in range(LINE_BUDGET):
            R = sample_line(rng, p, in_plane=H, avoid=[P])
            if not R.same_as(L, p):
                break
        O = plane_line_meet(L, R, p)
        if odd:
            n_s = cell.b - 2
            n_l = -(-(m + 1) // 4)
            n_r = n_s - n_l
        else:
            n_l, n_r = -(-(m + 2) // 4), (m + 2) // 4
        b = _Builder(rng, p, P)
        S: list[ProjPoint] = []
        taken = {P, O}
        for carrier, count in ((L, n_l), (R, n_r)):
            for _ in range(count):
                q = sample_point(rng, p, on=carrier, avoid=taken)
                b.add(lambda q=q: _through_off_plane(b, q, H))
                S.append(q)
                taken.add(q)

        def generic():
            line = sample_line(rng, p)
            inc = line_plane(line, H, p)
            if inc.relation == "contained":
                return None
            x = inc.points[0]
            if x in taken or L.contains(x, p) or R.contains(x, p):
                return None
            return line

        while len(b.lines) < cell.a:
            b.add(generic)

        comps = [FatPoint(P, m)] + [LineComp(l) for l in b.lines]
        vectors = []
        if odd:
            for q in S:
                for _ in range(LINE_BUDGET):
                    d = sample_point(rng, p, on=H, avoid=[q])
                    if not L.contains(d, p) and not R.contains(d, p):
                        break
                vectors.append(TangentVector(q, d))
            comps += vectors + [SimplePoint(O)]
        X = UnionScheme.of(comps, p)
        cfg = WitnessConfig("B-odd" if odd else "B-even", m, t, p, seed, P, X, list(b.lines),
                            plane=H, L=L, R=R, O=O, S=S, vectors=vectors)
        hits = [line_plane(l, H, p).points[0] for l in b.lines]
        on_l = sum(L.contains(x, p) for x in hits)
        on_r = sum(R.contains(x, p) for x in hits)
        _check(cfg, "H contains P", H.contains(P, p))
        _check(cfg, "L != R inside H, P not on L or R",
               not L.same_as(R, p) and not L.contains(P, p) and not R.contains(P, p))
        _check(cfg, "Y has a_{m,m+2} disjoint lines avoiding P", len(b.lines) == cell.a)
        _check(cfg, "Y meets H in finitely many points",
               all(line_plane(l, H, p).relation == "point" for l in b.lines))
        if odd:
            printed = (-(-(m + 3) // 4), (m + 3) // 4)
            _check(cfg, "#S = b_{m,m+2} - 2", len(S) == cell.b - 2, f"#S={len(S)}")
            _check(cfg, "points of S on L and R", (on_l, on_r) == (n_l, n_r), f"L:{on_l} R:{on_r}")
            _check(cfg, "O not in S", O not in S)
            _check(cfg, "no tangent vector along L or R",
                   all(not L.contains(v.direction, p) and not R.contains(v.direction, p) for v in vectors))
            cfg.notes.append(
                f"S split {n_l}+{n_r} on L,R; printed counts {printed[0]}+{printed[1]} exceed #S={n_s} by "
                f"{printed[0] + printed[1] - n_s}"
            )
            return _finish(cfg, postnum.forms_dim(t) - 1, expect_rank_eq_N=False)
        _check(cfg, "#(Y∩H∩L), #(Y∩H∩R)", (on_l, on_r) == (n_l, n_r), f"L:{on_l} R:{on_r}")
        return _finish(cfg, postnum.forms_dim(t) - 1, expect_rank_eq_N=False)

    return _run("B", m, t, seed, prime, attempts, build)


def build_witness_R(m: int, seed: int = 0, prime: int = DEFAULT_PRIME, attempts: int = WITNESS_ATTEMPTS) -> WitnessConfig:
    """(3m+5)/2 skew lines, (m+5)/2 of them through points of a smooth conic
    D in a plane H through P, with a tangent vector at each of those points."""
    if m < 3 or m % 2 == 0:
        raise ValueError("R(m) needs an odd m >= 3")
    t = m + 2
    n_lines, n_s = (3 * m + 5) // 2, (m + 5) // 2

    def build(rng):
        p = prime
        P = sample_point(rng, p)
        H = sample_plane(rng, p, through=[P])
        D = sample_conic(rng, p, H, avoid=[P])
        b = _Builder(rng, p, P)
        S: list[ProjPoint] = []
        taken = {P}
        for _ in range(n_s):
            q = sample_point(rng, p, on=D, avoid=taken)
            b.add(lambda q=q: _through_off_plane(b, q, H))
            S.append(q)
            taken.add(q)

        def generic():
            line = sample_line(rng, p)
            inc = line_plane(line, H, p)
            if inc.relation == "contained" or D.contains(inc.points[0], p) or inc.points[0] in taken:
                return None
            return line

        while len(b.lines) < n_lines:
            b.add(generic)
        vectors = []
        for q, line in zip(S, b.lines):
            for _ in range(LINE_BUDGET):
                d = sample_point(rng, p, avoid=[q])
                if not line.contains(d, p):
                    break
            vectors.append(TangentVector(q, d))
        X = UnionScheme.of([FatPoint(P, m)] + [LineComp(l) for l in b.lines] + vectors, p)
        cfg = WitnessConfig("R", m, t, p, seed, P, X, list(b.lines), plane=H, conic=D, S=S, vectors=vectors)
        hits = [line_plane(l, H, p).points[0] for l in b.lines]
        _check(cfg, "H contains P", H.contains(P, p))
        _check(cfg, "D smooth, P not on D", D.sym_matrix_det(p) != 0 and not D.contains(P, p))
        _check(cfg, "Y has (3m+5)/2 disjoint lines avoiding P", len(b.lines) == n_lines)
        _check(cfg, "#((Y∩H)∩D) = (m+5)/2", sum(D.contains(x, p) for x in hits) == n_s)
        _check(cfg, "tangent vectors at S, none inside Y", sum(d is not None for d in X.decorations) == n_s)
        return _finish(cfg, postnum.forms_dim(t), expect_rank_eq_N=True)

    return _run("R", m, t, seed, prime, attempts, build)


def build_witness_H(m: int, k: int, seed: int = 0, prime: int = DEFAULT_PRIME, attempts: int = WITNESS_ATTEMPTS) -> WitnessConfig:
    """a_{m,k} skew lines transverse to a smooth quadric Q avoiding P, with
    b_{m,k} of their Q-points on ceil(b/2) lines of one ruling (at most two
    per line) and a tangent vector of P^3 at each of those points."""
    if m < 1 or k < m + 3:
        raise ValueError("H_{m,k} witnesses need m >= 1 and k >= m+3")
    cell = postnum.ab(m, k)
    n_e = -(-cell.b // 2)

    def build(rng):
        p = prime
        P = sample_point(rng, p)
        Q = sample_quadric(rng, p, avoid=[P])
        sigmas: list[tuple] = []
        while len(sigmas) < n_e:
            s = normalize((1, int(rng.integers(0, p))), p)
            if s not in sigmas:
                sigmas.append(s)
        E = [Q.ruling_line((1, 0), s, p) for s in sigmas]
        S: list[ProjPoint] = []
        for i, s in enumerate(sigmas):
            per_line = 2 if 2 * (i + 1) <= cell.b else 1
            taus: list[tuple] = []
            while len(taus) < per_line:
                tau = normalize((1, int(rng.integers(0, p))), p)
                if tau not in taus:
                    taus.append(tau)
            S += [Q.point(s, tau, p) for tau in taus]
        b = _Builder(rng, p, P)
        qpoints: list[ProjPoint] = list(S)

        def fresh(x: ProjPoint) -> bool:
            sx, _ = Q.params(x, p)
            return x not in qpoints and sx not in sigmas

        def through_S(q):
            y = sample_point(rng, p)
            if Q.contains(y, p):
                return None
            line = LineP3(q, y)
            kind, pts = Q.intersect_line(line, p)
            if kind != "points":
                return None
            other = pts[1] if pts[0] == q else pts[0]
            if not fresh(other):
                return None
            qpoints.append(other)
            return line

        for q in S:
            b.add(lambda q=q: through_S(q))

        def generic():
            x = sample_point(rng, p, on=Q)
            y = sample_point(rng, p, on=Q, avoid=[x])
            if not (fresh(x) and fresh(y)):
                return None
            (sx, tx), (sy, ty) = Q.params(x, p), Q.params(y, p)
            if sx == sy or tx == ty:
                return None
            qpoints.extend([x, y])
            return LineP3(x, y)

        while len(b.lines) < cell.a:
            b.add(generic)
        vectors = []
        for q, line in zip(S, b.lines):
            for _ in range(LINE_BUDGET):
                d = sample_point(rng, p, avoid=[q])
                if not line.contains(d, p) and not Q.tangent_plane(q, p).contains(d, p):
                    break
            vectors.append(TangentVector(q, d))
        X = UnionScheme.of([FatPoint(P, m)] + [LineComp(l) for l in b.lines] + vectors, p)
        cfg = WitnessConfig("H", m, k, p, seed, P, X, list(b.lines), quadric=Q, E=E, S=S, vectors=vectors)
        inter = [Q.intersect_line(l, p)[0] for l in b.lines]
        per_e = [sum(e.contains(s, p) for s in S) for e in E]
        _check(cfg, "P not on Q", not Q.contains(P, p))
        _check(cfg, "Y in L(P, a_{m,k}) transverse to Q", len(b.lines) == cell.a and all(kd == "points" for kd in inter))
        _check(cfg, "#S = b_{m,k}, S on Y∩Q",
               len(S) == cell.b and all(Q.contains(s, p) and any(l.contains(s, p) for l in b.lines) for s in S))
        _check(cfg, "E = ceil(b/2) disjoint ruling lines containing S, <= 2 points each",
               len(E) == n_e and sum(per_e) == cell.b and all(c <= 2 for c in per_e))
        _check(cfg, "no tangent vector inside Y or Q",
               all(not Q.tangent_plane(v.support, p).contains(v.direction, p) for v in vectors))
        return _finish(cfg, postnum.forms_dim(k), expect_rank_eq_N=True)

    return _run("H", m, k, seed, prime, attempts, build)
