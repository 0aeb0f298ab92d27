"""Maximal-rank certificates for mP ∪ (d lines) in P^3.

A single instance whose condition matrix has full rank certifies the same
for the general union (rank can only drop under specialisation).  A rank
deficit at sampled instances is only evidence, so such cells end as
``DeficitObserved`` (known exceptional cells) or ``Unconfirmed``.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import postnum
from .conditions import cohomology
from .exactlin import DEFAULT_PRIME, PrimeField, prev_prime
from .schemecalc import (
    CastelnuovoReport,
    FatPoint,
    LineComp,
    SchemeError,
    SimplePoint,
    TangentVector,
    UnionScheme,
    castelnuovo_check,
    residual,
    tangent_plane,
)
from .space import (
    LineP3,
    PlaneP3,
    ProjPoint,
    ResamplingExhausted,
    lines_relation,
    sample_line,
    sample_plane,
    sample_point,
    sample_quadric,
)
from .witness import WitnessFailed, build_witness_B, build_witness_H, build_witness_R

CERTIFIED = "MaximalRankCertified"
DEFICIT = "DeficitObserved"
UNCONFIRMED = "Unconfirmed"

STRATEGIES = ("random", "witness-B", "witness-R", "witness-H")
EXTRA_PRIMES = 2
GENERIC_CAVEAT = "upper bound for generic values (rank is lower semicontinuous)"


class InvalidUnion(RuntimeError):
    pass


@dataclass
class Certificate:
    m: int
    d: int
    t: int
    prime: int
    seed: int
    strategy: str
    N: int
    degree: int
    rank: int
    h0: int
    h1: int
    status: str
    attempts: int
    exceptional: bool
    expected: tuple[int, int]
    note: str = ""
    attempt_index: int = 0
    elapsed_ms: float = field(default=0.0, compare=False)

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def as_dict(self) -> dict:
        out = asdict(self)
        out["expected"] = list(self.expected)
        return out

    def stable_dict(self) -> dict:
        """Everything except timing, for reproducibility comparisons."""
        out = self.as_dict()
        out.pop("elapsed_ms")
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Certificate":
        names = {f.name for f in fields(cls)}
        kw = {k: v for k, v in data.items() if k in names}
        kw["expected"] = tuple(kw["expected"])
        return cls(**kw)


def cell_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for one cell, independent of scheduling."""
    return np.random.default_rng(np.random.SeedSequence([seed % 2**64, *key]))


def random_instance(m: int, d: int, p: int, rng: np.random.Generator) -> tuple[ProjPoint, list[LineP3]]:
    P = sample_point(rng, p)
    lines: list[LineP3] = []
    budget = 64 * (d + 1)
    while len(lines) < d:
        budget -= 1
        if budget < 0:
            raise InvalidUnion("could not sample pairwise skew lines avoiding P")
        line = sample_line(rng, p, avoid=[P])
        if all(lines_relation(line, other, p).relation == "skew" for other in lines):
            lines.append(line)
    return P, lines


def _witness_instance(strategy: str, m: int, d: int, t: int, p: int, seed: int) -> tuple[ProjPoint, list[LineP3]]:
    if strategy == "witness-B":
        cfg = build_witness_B(m, seed=seed, prime=p)
    elif strategy == "witness-R":
        cfg = build_witness_R(m, seed=seed, prime=p)
    else:
        cfg = build_witness_H(m, t, seed=seed, prime=p)
    if d > len(cfg.lines):
        raise InvalidUnion(f"{strategy} provides only {len(cfg.lines)} lines, {d} requested")
    return cfg.P, cfg.lines[:d]


def union_of(m: int, P: ProjPoint, lines: list[LineP3], p: int) -> UnionScheme:
    comps = ([FatPoint(P, m)] if m > 0 else []) + [LineComp(l) for l in lines]
    return UnionScheme.of(comps, p)


def _attempt_plan(prime: int, retries: int, floor: int) -> list[tuple[int, int]]:
    """(prime, attempt) pairs: fresh seeds first, then smaller primes above ``floor``."""
    plan = [(prime, i) for i in range(retries + 1)]
    q = prime
    for j in range(EXTRA_PRIMES):
        if q <= 2:
            break
        q = prev_prime(q)
        if q <= floor:
            break
        plan.append((q, retries + 1 + j))
    return plan


_STRATEGY_CODE = {s: i for i, s in enumerate(STRATEGIES)}


def certify_maximal_rank(
    m: int,
    d: int,
    t: int,
    strategy: str = "random",
    seed: int = 0,
    retries: int = 3,
    prime: int = DEFAULT_PRIME,
) -> Certificate:
    if d < 0 or t < 0 or m < 0 or t < m - 1:
        raise ValueError("need d >= 0, m >= 0, t >= m-1")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    floor = max(t + 1, m)
    PrimeField(prime).require_above(floor, "working degree")
    start = time.perf_counter()
    N = postnum.forms_dim(t)
    deg = postnum.scheme_degree(m, d, t)
    target = min(N, deg)
    exceptional = postnum.is_exceptional(m, d, t)
    best = None
    attempts = 0
    for p, attempt in _attempt_plan(prime, retries, floor):
        attempts += 1
        try:
            if strategy == "random":
                rng = cell_rng(seed, m, d, t, _STRATEGY_CODE[strategy], attempt, p)
                P, lines = random_instance(m, d, p, rng)
            else:
                P, lines = _witness_instance(strategy, m, d, t, p, seed + attempt)
            X = union_of(m, P, lines, p)
        except (ResamplingExhausted, SchemeError, WitnessFailed) as exc:
            raise InvalidUnion(str(exc)) from exc
        c = cohomology(X, t)
        if best is None or c.rank > best[0].rank:
            best = (c, p, attempt)
        if c.rank == target:
            break
    c, p, attempt = best
    if c.rank == target:
        status, note = CERTIFIED, "valid for the general union"
    elif exceptional:
        status, note = DEFICIT, GENERIC_CAVEAT
    else:
        status, note = UNCONFIRMED, "no full-rank instance found; this is not a proof of failure"
    return Certificate(
        m=m, d=d, t=t, prime=p, seed=seed, strategy=strategy, N=N, degree=deg,
        rank=c.rank, h0=c.h0, h1=c.h1, status=status, attempts=attempts,
        exceptional=exceptional, expected=postnum.expected_cohomology(m, d, t),
        note=note, attempt_index=attempt, elapsed_ms=round((time.perf_counter() - start) * 1000, 3),
    )


def matches_expectation(cert: Certificate) -> bool:
    """Certified with the expected (h0, h1), or a deficit on an exceptional cell."""
    if cert.exceptional:
        return cert.status == DEFICIT and cert.h0 >= 1 and cert.h1 >= 1
    return cert.certified and (cert.h0, cert.h1) == cert.expected


@dataclass
class CellVerdict:
    m: int
    d: int
    k: int
    lower: Certificate | None
    upper: Certificate
    probe: Certificate | None = None

    @property
    def ok(self) -> bool:
        if self.lower is not None and not (self.lower.certified and self.lower.h0 == 0):
            return False
        if not (self.upper.certified and self.upper.h1 == 0):
            return False
        if self.probe is not None and self.probe.status != DEFICIT:
            return False
        return True

    @property
    def status(self) -> str:
        if self.ok:
            return CERTIFIED
        certs = [c for c in (self.lower, self.upper, self.probe) if c is not None]
        return UNCONFIRMED if any(c.status == UNCONFIRMED for c in certs) else DEFICIT

    def certificates(self) -> list[Certificate]:
        return [c for c in (self.lower, self.upper, self.probe) if c is not None]

    def row(self) -> dict:
        return {
            "m": self.m,
            "d": self.d,
            "k": self.k,
            "h0@k-1": None if self.lower is None else self.lower.h0,
            "h1@k": self.upper.h1,
            "upper_t": self.upper.t,
            "probe": None if self.probe is None else [self.probe.h0, self.probe.h1],
            "status": self.status,
        }


def verify_theorem_cell(m: int, d: int, seed: int = 0, retries: int = 3, prime: int = DEFAULT_PRIME) -> CellVerdict:
    """Check h0 = 0 at k-1 and h1 = 0 at k, k the critical value of (m, d).

    For 2 <= d <= m the degree t = m is excluded; the deficit there is
    probed instead, and when k = m the vanishing h1 = 0 is checked at m+1.
    """
    if m < 1 or d < 1:
        raise ValueError("need m >= 1 and d >= 1")
    k = postnum.critical_value(m, d)
    run = lambda t: certify_maximal_rank(m, d, t, seed=seed, retries=retries, prime=prime)  # noqa: E731
    probe = None
    if postnum.is_exceptional(m, d, k):
        probe, lower, upper = run(m), None, run(m + 1)
    elif postnum.is_exceptional(m, d, k - 1):
        probe, lower, upper = run(m), None, run(k)
    else:
        lower, upper = run(k - 1), run(k)
    return CellVerdict(m, d, k, lower, upper, probe)


@dataclass
class ProbeResult:
    m: int
    d: int
    t: int
    h0: int
    h1: int
    samples: int
    caveat: str = GENERIC_CAVEAT
    observed: list[tuple[int, int]] = field(default_factory=list)


def exceptional_probe(m: int, d: int, samples: int = 5, seed: int = 0, prime: int = DEFAULT_PRIME) -> ProbeResult:
    """(h0, h1) at t = m over several random instances.  Any instance bounds
    the generic values from above, so the smallest observed pair is kept."""
    if not 2 <= d <= m:
        raise ValueError("exceptional cells have 2 <= d <= m")
    observed = []
    for s in range(samples):
        rng = cell_rng(seed, m, d, m, 99, s, prime)
        P, lines = random_instance(m, d, prime, rng)
        c = cohomology(union_of(m, P, lines, prime), m)
        observed.append((c.h0, c.h1))
    h0, h1 = min(observed)
    return ProbeResult(m, d, m, h0, h1, samples, observed=observed)


def derive_subunion(cert: Certificate, d_sub: int) -> Certificate:
    """Certificate for d_sub < d lines implied by h1 = 0 for d lines: the
    first d_sub lines of the same instance still impose independent
    conditions."""
    if not 0 <= d_sub <= cert.d:
        raise ValueError("sub-union must be smaller")
    if not (cert.certified and cert.h1 == 0):
        raise ValueError("only an h1 = 0 certificate transfers to sub-unions")
    N = cert.N
    deg = postnum.scheme_degree(cert.m, d_sub, cert.t)
    return Certificate(
        m=cert.m, d=d_sub, t=cert.t, prime=cert.prime, seed=cert.seed, strategy="derived-subunion",
        N=N, degree=deg, rank=deg, h0=N - deg, h1=0, status=CERTIFIED, attempts=0,
        exceptional=postnum.is_exceptional(cert.m, d_sub, cert.t),
        expected=postnum.expected_cohomology(cert.m, d_sub, cert.t),
        note=f"derived from the d={cert.d} certificate", attempt_index=cert.attempt_index,
    )


def subunion_rank(cert: Certificate, d_sub: int) -> int:
    """Direct rank of the first d_sub lines of the instance behind ``cert``."""
    if cert.strategy != "random":
        raise ValueError("direct re-check supports the random strategy")
    rng = cell_rng(cert.seed, cert.m, cert.d, cert.t, _STRATEGY_CODE["random"], cert.attempt_index, cert.prime)
    P, lines = random_instance(cert.m, cert.d, cert.prime, rng)
    return cohomology(union_of(cert.m, P, lines[:d_sub], cert.prime), cert.t).rank


def replay_castelnuovo_step(X: UnionScheme, F, x: int) -> dict:
    """Castelnuovo audit of one residual step: the three instance
    cohomologies, both inequalities, and whether the vanishing of h1 on the
    residual and on the trace accounts for h1(X) = 0."""
    rep: CastelnuovoReport = castelnuovo_check(X, F, x)
    out = rep.as_dict()
    out["suffices"] = rep.vanishing_transfers
    out["consistent"] = (not rep.vanishing_transfers) or rep.h1_X == 0
    return out


# -- random residual instances ------------------------------------------------

VECTOR_MODES = ("off", "tangent", "transverse", "on-contained", "on-crossing", "on-line-off")


def _off(rng, p, F, avoid=()):
    for _ in range(64):
        x = sample_point(rng, p, avoid=avoid)
        if not F.contains(x, p):
            return x
    raise ResamplingExhausted("point off the surface")


def _direction(rng, p, q, line=None, plane=None):
    for _ in range(64):
        d = sample_point(rng, p, on=plane, avoid=[q])
        if line is None or not line.contains(d, p):
            return d
    raise ResamplingExhausted("direction")


def _crossing_line(rng, p, F, avoid):
    if isinstance(F, PlaneP3):
        return sample_line(rng, p, avoid=avoid)
    for _ in range(64):
        a = sample_point(rng, p, on=F)
        b = sample_point(rng, p, on=F, avoid=[a])
        line = LineP3(a, b)
        if F.line_ruling(line, p) is None and not any(line.contains(q, p) for q in avoid):
            return line
    raise ResamplingExhausted("secant line")


def _build_residual_instance(rng, p):
    F = sample_plane(rng, p) if rng.random() < 0.5 else sample_quadric(rng, p)
    on_plane = isinstance(F, PlaneP3)
    m = int(rng.integers(1, 4))
    P = sample_point(rng, p, on=F) if on_plane and rng.random() < 0.5 else _off(rng, p, F)
    comps = [FatPoint(P, m)]

    inside = []
    for _ in range(int(rng.integers(0, 3))):
        if on_plane:
            inside.append(sample_line(rng, p, in_plane=F, avoid=[P]))
        else:
            inside.append(sample_line(rng, p, on_quadric=F, ruling=(1, 0), avoid=[P]))
    crossing = [_crossing_line(rng, p, F, [P]) for _ in range(int(rng.integers(1, 4)))]
    comps += [LineComp(l) for l in inside + crossing]

    for _ in range(int(rng.integers(1, 3))):
        pt = sample_point(rng, p, on=F) if rng.random() < 0.5 else _off(rng, p, F)
        comps.append(SimplePoint(pt))

    modes = list(rng.choice(VECTOR_MODES, size=int(rng.integers(2, 5))))
    used_cross = set()
    for mode in modes:
        if mode == "on-contained" and not inside:
            mode = "tangent"
        if mode == "on-crossing" and len(used_cross) == len(crossing):
            mode = "on-line-off"
        if mode == "off":
            q = _off(rng, p, F)
            comps.append(TangentVector(q, _direction(rng, p, q)))
        elif mode in ("tangent", "transverse"):
            q = sample_point(rng, p, on=F)
            plane = tangent_plane(F, q, p) if mode == "tangent" else None
            comps.append(TangentVector(q, _direction(rng, p, q, plane=plane)))
        elif mode == "on-contained":
            line = inside[int(rng.integers(0, len(inside)))]
            q = sample_point(rng, p, on=line)
            plane = tangent_plane(F, q, p) if rng.random() < 0.5 else None
            comps.append(TangentVector(q, _direction(rng, p, q, line=line, plane=plane)))
        elif mode == "on-crossing":
            i = next(j for j in range(len(crossing)) if j not in used_cross)
            used_cross.add(i)
            line = crossing[i]
            pts = [x for x in _crossing_points(line, F, p)]
            q = pts[int(rng.integers(0, len(pts)))]
            comps.append(TangentVector(q, _direction(rng, p, q, line=line)))
        else:
            line = crossing[int(rng.integers(0, len(crossing)))]
            q = _off_on_line(rng, p, F, line)
            comps.append(TangentVector(q, _direction(rng, p, q, line=line)))

    X = UnionScheme.of(comps, p)
    e = 1 if on_plane else 2
    x = int(rng.integers(m - 1 + e, 7))
    residual(X, F)  # surfaces NonTransverse and other rejections here
    return X, F, x


def _crossing_points(line, F, p):
    if isinstance(F, PlaneP3):
        from .space import line_plane

        return list(line_plane(line, F, p).points)
    return F.intersect_line(line, p)[1]


def _off_on_line(rng, p, F, line):
    for _ in range(64):
        q = sample_point(rng, p, on=line)
        if not F.contains(q, p):
            return q
    raise ResamplingExhausted("line point off the surface")


def sample_residual_instance(seed: int, p: int = DEFAULT_PRIME, budget: int = 64):
    """Seeded valid (X, F, x): X mixes a fat point, lines, simple points and
    tangent vectors (free and decorated), F is a plane or a smooth quadric."""
    for attempt in range(budget):
        rng = cell_rng(seed, 6, attempt, p)
        try:
            return _build_residual_instance(rng, p)
        except (SchemeError, ResamplingExhausted):
            continue
    raise InvalidUnion(f"no valid residual instance for seed {seed}")
