import json

import pytest

from postlab import postnum
from postlab.certify import (
    CERTIFIED,
    DEFICIT,
    Certificate,
    InvalidUnion,
    cell_rng,
    certify_maximal_rank,
    derive_subunion,
    exceptional_probe,
    matches_expectation,
    random_instance,
    replay_castelnuovo_step,
    sample_residual_instance,
    subunion_rank,
    verify_theorem_cell,
)
from postlab.conditions import cohomology
from postlab.exactlin import DEFAULT_PRIME, FieldTooSmall
from postlab.space import lines_relation

import oracles


def test_one_point_three_lines():
    c = certify_maximal_rank(1, 3, 2)
    assert c.status == CERTIFIED and (c.h0, c.h1) == (0, 0)
    assert (c.N, c.degree, c.rank) == (10, 10, 10)


def test_double_point_two_lines_is_deficient():
    c = certify_maximal_rank(2, 2, 2)
    assert c.status == DEFICIT and c.exceptional
    assert (c.h0, c.h1) == (1, 1)
    assert "upper bound" in c.note
    # the budget is 4 seeds on the first prime, then two more primes
    assert c.attempts == 6


def test_double_point_six_lines_degree_four():
    c = certify_maximal_rank(2, 6, 4)
    assert c.status == CERTIFIED and (c.h0, c.h1) == (1, 0)


def test_random_instance_matches_oracle():
    p = DEFAULT_PRIME
    rng = cell_rng(5, 2, 3, 3)
    P, lines = random_instance(2, 3, p, rng)
    assert all(lines_relation(a, b, p).relation == "skew" for i, a in enumerate(lines) for b in lines[i + 1:])
    assert not any(l.contains(P, p) for l in lines)
    h0, r = oracles.p3_h(3, p, fat=[(P.coords, 2)], lines=[(l.a.coords, l.b.coords) for l in lines])
    from postlab.certify import union_of

    c = cohomology(union_of(2, P, lines, p), 3)
    assert (c.h0, c.rank) == (h0, r)


def test_certificate_invariants_over_a_grid():
    for m in range(0, 4):
        for d in range(0, 6):
            for t in range(max(m, 1), m + 4):
                c = certify_maximal_rank(m, d, t)
                assert c.h0 - c.h1 == c.N - c.degree
                assert (c.status == CERTIFIED) == (c.rank == min(c.N, c.degree))
                if c.certified:
                    assert c.h0 * c.h1 == 0
                    assert (c.h0, c.h1) == postnum.expected_cohomology(m, d, t)
                assert matches_expectation(c)


def test_certificate_round_trip_and_determinism():
    a = certify_maximal_rank(3, 4, 4, seed=99)
    b = certify_maximal_rank(3, 4, 4, seed=99)
    assert a.stable_dict() == b.stable_dict()
    back = Certificate.from_dict(json.loads(json.dumps(a.as_dict())))
    assert back == a


def test_preconditions():
    with pytest.raises(FieldTooSmall):
        certify_maximal_rank(1, 2, 5, prime=5)
    with pytest.raises(ValueError):
        certify_maximal_rank(3, 2, 1)
    with pytest.raises(ValueError):
        certify_maximal_rank(1, 2, 2, strategy="magic")
    with pytest.raises(InvalidUnion):
        # p = 3 leaves too few lines to pick many pairwise-skew ones
        certify_maximal_rank(0, 12, 1, prime=3)


@pytest.mark.parametrize(
    "m,d,k,lower,upper",
    [
        # (N, degree, rank) at k-1 and at k
        (1, 3, 2, (4, 7, 4), (10, 10, 10)),
        (2, 6, 4, (20, 28, 20), (35, 34, 34)),
    ],
)
def test_theorem_cell_examples(m, d, k, lower, upper):
    v = verify_theorem_cell(m, d)
    assert v.k == k and v.ok
    assert (v.lower.N, v.lower.degree, v.lower.rank) == lower
    assert (v.upper.N, v.upper.degree, v.upper.rank) == upper
    assert v.lower.h0 == 0 and v.upper.h1 == 0


def test_exceptional_cell_branches():
    v = verify_theorem_cell(3, 2)
    assert v.k == 3 and v.lower is None
    assert v.probe.status == DEFICIT and v.probe.t == 3
    assert v.upper.t == 4 and v.upper.h1 == 0
    assert v.ok
    # k - 1 = m exceptional, k itself is checked as usual
    v = verify_theorem_cell(3, 3)
    assert v.k == 4 and v.lower is None and v.probe.t == 3 and v.ok


@pytest.mark.parametrize("m,d", [(2, 2), (3, 2), (3, 3)])
def test_exceptional_probe(m, d):
    r = exceptional_probe(m, d)
    assert r.h0 >= 1 and r.h1 >= 1
    assert "upper bound" in r.caveat
    assert (r.h0, r.h1) == min(r.observed)
    if (m, d) == (2, 2):
        assert (r.h0, r.h1) == (1, 1)
    with pytest.raises(ValueError):
        exceptional_probe(2, 3)


def test_subunion_rule_and_spot_check():
    cert = certify_maximal_rank(3, 7, 5, seed=4)  # d = a_{3,5}
    assert cert.certified and cert.h1 == 0
    for d_sub in range(0, 7):
        derived = derive_subunion(cert, d_sub)
        assert derived.h1 == 0 and derived.certified
        assert subunion_rank(cert, d_sub) == derived.rank
    with pytest.raises(ValueError):
        derive_subunion(cert, 8)


def test_subunion_needs_vanishing_h1():
    with pytest.raises(ValueError):
        derive_subunion(certify_maximal_rank(2, 2, 2), 1)


@pytest.mark.parametrize("m", range(1, 6))
def test_one_line_too_many_kills_all_forms(m):
    d = postnum.a_(m, m + 2) + 1
    c = certify_maximal_rank(m, d, m + 2)
    assert c.certified and c.h0 == 0


def test_replay_on_random_instances():
    for seed in range(10):
        X, F, x = sample_residual_instance(seed)
        r = replay_castelnuovo_step(X, F, x)
        assert r["h0_inequality"] and r["h1_inequality"] and r["degree_conserved"]
        assert r["consistent"]
