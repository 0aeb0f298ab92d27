"""Acceptance criteria, one test each.  Every test prints a single
``[PASS]``/``[FAIL]`` line with the measured time against its pinned limit.

Run just this module with ``pytest tests/test_acceptance.py -v``.
"""

import time
from math import comb

import pytest

from postlab import postnum as pn
from postlab.certify import (
    CERTIFIED,
    DEFICIT,
    certify_maximal_rank,
    replay_castelnuovo_step,
    sample_residual_instance,
    verify_theorem_cell,
)
from postlab.cli import main as cli_main
from postlab.cli import sweep_cells
from postlab.exactlin import DEFAULT_PRIME
from postlab.reconcile import build_rows, mismatches
from postlab.records import read_records
from postlab.witness import build_witness_B, build_witness_H, build_witness_R

# pinned limits (seconds) and budgets
LIMIT_LEDGER = 1.0
LIMIT_IDENTITIES = 1.0
LIMIT_BASELINE = 10.0
LIMIT_SWEEP = 120.0
LIMIT_WITNESS = 120.0
LIMIT_RESIDUAL = 30.0
MAX_RETRIES = 3
MASTER_SEED = 0
RESIDUAL_INSTANCES = 100

EXPECTED_MISMATCHES = {
    "ledger fat point term",
    "two-step recurrence, last b index",
    "shifted recurrence, second a index",
    "(m+3)a_{m,m+2}+b_{m,m+2}",
    "C(m+6,3)-C(m+2,3)",
    "(a,b)_{0,3}",
}


@pytest.fixture
def verdict(capsys):
    def emit(name, ok, detail, elapsed=None, limit=None):
        timing = ""
        if elapsed is not None:
            timing = f" [{elapsed:.2f}s" + (f" < {limit:.0f}s]" if limit else "]")
        with capsys.disabled():
            print(f"\n{'[PASS]' if ok else '[FAIL]'} {name}: {detail}{timing}")
        assert ok, detail

    return emit


def _theorem_sweep(seed=MASTER_SEED, prime=DEFAULT_PRIME):
    cells = [(m, d) for m, d in sweep_cells(5, 10) if m >= 2]
    return [verify_theorem_cell(m, d, seed=seed, retries=MAX_RETRIES, prime=prime) for m, d in cells]


def test_c1_ledger_suite(verdict):
    t0 = time.perf_counter()
    bad = []
    for m in range(61):
        for k in range(m, m + 41):
            c = pn.ab(m, k)
            if comb(m + 2, 3) + (k + 1) * c.a + c.b != comb(k + 3, 3) or not 0 <= c.b <= k:
                bad.append((m, k))
    for m in range(61):
        for j in (1, 2, 3, 4):
            cf = pn.closed_form(m, j)
            if cf is not None and cf != (pn.a_(m, m + j), pn.b_(m, m + j)):
                bad.append(("closed form", m, j))
    found = {r.label for r in mismatches(build_rows(60))}
    elapsed = time.perf_counter() - t0
    ok = not bad and found == EXPECTED_MISMATCHES and elapsed < LIMIT_LEDGER
    verdict("C1 ledger suite", ok, f"{len(bad)} ledger failures, report lists {sorted(found)}", elapsed, LIMIT_LEDGER)


def test_c2_identities_and_inequalities(verdict):
    t0 = time.perf_counter()
    fails = 0
    for m in range(21):
        for k in range(m + 2, m + 41):
            fails += not pn.identity_eq2(m, k)
    for m in range(1, 61):
        fails += not pn.identity_eq3(m)
        fails += not pn.identity_eq4(m)
    for m in range(21):
        for k in range(m + 3, m + 41):
            fails += not pn.gap_lemma(m, k)
    for m in range(1, 51):
        fails += not pn.claim1(m)
    elapsed = time.perf_counter() - t0
    verdict("C2 identity/inequality suite", fails == 0 and elapsed < LIMIT_IDENTITIES,
            f"{fails} failures", elapsed, LIMIT_IDENTITIES)


def test_c3_lines_only_baseline(verdict):
    t0 = time.perf_counter()
    bad = []
    largest = 0
    for d in range(0, 16):
        for t in range(0, 9):
            c = certify_maximal_rank(0, d, t, seed=MASTER_SEED, retries=MAX_RETRIES)
            largest = max(largest, c.N)
            if c.status != CERTIFIED or c.prime != DEFAULT_PRIME:
                bad.append((d, t, c.status, c.attempts))
    elapsed = time.perf_counter() - t0
    ok = not bad and largest == 165 and elapsed < LIMIT_BASELINE
    verdict("C3 skew lines baseline, d<=15, t<=8", ok, f"{len(bad)} uncertified, largest N={largest}",
            elapsed, LIMIT_BASELINE)


def test_c4_theorem_sweep(verdict):
    t0 = time.perf_counter()
    verdicts = _theorem_sweep()
    elapsed = time.perf_counter() - t0
    bad = [v.row() for v in verdicts if not v.ok]
    slow = [(c.m, c.d, c.t) for v in verdicts for c in v.certificates()
            if c.status == CERTIFIED and c.attempts > MAX_RETRIES + 1]
    probes = {(v.m, v.d): v.probe for v in verdicts if v.probe is not None}
    exc_cells = {(m, d) for m in range(2, 6) for d in range(2, m + 1)}
    exc_ok = exc_cells <= set(probes) and all(
        probes[c].status == DEFICIT and probes[c].h0 >= 1 and probes[c].h1 >= 1 for c in exc_cells
    )
    p22 = probes.get((2, 2))
    exact22 = p22 is not None and (p22.h0, p22.h1) == (1, 1)
    largest = max(c.N for v in verdicts for c in v.certificates())
    ok = not bad and not slow and exc_ok and exact22 and largest == 286 and elapsed < LIMIT_SWEEP
    verdict("C4 theorem sweep 2<=m<=5, k<=10", ok,
            f"{len(verdicts)} cells, {len(bad)} failed, {len(slow)} over budget, "
            f"exceptional ok={exc_ok}, (2,2,2)={None if p22 is None else (p22.h0, p22.h1)}, largest N={largest}",
            elapsed, LIMIT_SWEEP)


def test_c5_witness_suite(verdict):
    t0 = time.perf_counter()
    failed = []
    runs = 0
    for m in range(2, 9):
        runs += 1
        cfg = build_witness_B(m)
        if not cfg.passed or (m % 2 == 1 and cfg.degree != comb(m + 5, 3) - 1):
            failed.append(("B", m))
    for m in (3, 5, 7, 9):
        runs += 1
        cfg = build_witness_R(m)
        if not cfg.passed or cfg.degree != comb(m + 5, 3):
            failed.append(("R", m))
    for m in range(1, 5):
        for k in range(m + 3, 10):
            runs += 1
            cfg = build_witness_H(m, k)
            if not cfg.passed or cfg.degree != comb(k + 3, 3):
                failed.append(("H", m, k))
    elapsed = time.perf_counter() - t0
    verdict("C5 witness suite", not failed and elapsed < LIMIT_WITNESS,
            f"{runs} witnesses, failed {failed}", elapsed, LIMIT_WITNESS)


def test_c6_residual_property_suite(verdict):
    t0 = time.perf_counter()
    violations = []
    kinds = set()
    for seed in range(RESIDUAL_INSTANCES):
        X, F, x = sample_residual_instance(seed)
        s = X.summary()
        missing = [k for k in ("fat_points", "lines", "simple_points", "tangent_vectors") if not s[k]]
        kinds.add(type(F).__name__)
        r = replay_castelnuovo_step(X, F, x)
        if missing or not (r["degree_conserved"] and r["h0_inequality"] and r["h1_inequality"]):
            violations.append(seed)
    elapsed = time.perf_counter() - t0
    ok = not violations and kinds == {"PlaneP3", "QuadricP3"} and elapsed < LIMIT_RESIDUAL
    verdict("C6 residual/Castelnuovo suite", ok,
            f"{RESIDUAL_INSTANCES} instances on {sorted(kinds)}, violations {violations}", elapsed, LIMIT_RESIDUAL)


def test_c7_determinism(verdict, tmp_path):
    t0 = time.perf_counter()
    first = [[c.stable_dict() for c in v.certificates()] for v in _theorem_sweep()]
    second = [[c.stable_dict() for c in v.certificates()] for v in _theorem_sweep()]
    same_repeat = first == second
    a, b = tmp_path / "j1.jsonl", tmp_path / "j8.jsonl"
    cli_main(["sweep", "--m-max", "5", "--t-max", "10", "--jobs", "1", "--out", str(a), "--seed", str(MASTER_SEED)])
    cli_main(["sweep", "--m-max", "5", "--t-max", "10", "--jobs", "8", "--out", str(b), "--seed", str(MASTER_SEED)])
    ra = [r.stable_json() for r in read_records(a)]
    rb = [r.stable_json() for r in read_records(b)]
    same_jobs = ra == rb and len(ra) > 0
    elapsed = time.perf_counter() - t0
    verdict("C7 determinism", same_repeat and same_jobs,
            f"repeat identical={same_repeat}, jobs 1 vs 8 identical={same_jobs} ({len(ra)} records)", elapsed)
