from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfaffine import fixtures
from selfaffine.intlinalg import certify_expanding
from selfaffine.overlap import (
    NoOverlapProof,
    OSCCertificate,
    OverlapCertificate,
    bandt_criterion,
    classify,
    decide_overlaps,
    find_overlap_up_to,
)
from selfaffine.system import AffineMap, ScaledVector, Word, build_system, compose_word, normalize


def brute_overlap_depth(sys, n_max):
    """Least depth with two distinct words composing to the same map."""
    for n in range(1, n_max + 1):
        seen = {}
        for word in product(range(1, sys.n_maps + 1), repeat=n):
            f = compose_word(sys, word)
            if f in seen:
                return n
            seen[f] = word
    return None


def test_f2_overlap(F2):
    cert = find_overlap_up_to(F2, 4)
    assert cert.depth == 2
    assert cert.map == AffineMap(((Fraction(1, 9),),), (Fraction(1),))
    assert cert.verify(F2)
    assert {cert.word_a, cert.word_b} == {Word((2, 1)), Word((1, 3))}
    res = decide_overlaps(F2)
    assert isinstance(res, OverlapCertificate)
    assert res.depth == 2 and res.verify(F2)
    assert res.map == cert.map


def test_f1_no_overlap(F1):
    assert find_overlap_up_to(F1, 6) is None
    res = decide_overlaps(F1)
    assert isinstance(res, NoOverlapProof)
    assert res.state_bound == 1
    assert not res.reached_zero


def test_bandt_examples(F1, F2, fig1_osc, fig1_overlap):
    c = bandt_criterion(F1)
    assert c is not None and c.m0 == 0 and c.verify(F1)
    assert bandt_criterion(F2) is None
    c = bandt_criterion(fig1_osc)
    assert c is not None and c.verify(fig1_osc)
    assert len(set(c.labels)) == 5
    assert bandt_criterion(fig1_overlap) is None


def test_bandt_descends_common_factor():
    # digits 0, 3, 6 share a factor of A = 3
    sys = build_system(certify_expanding([[3]]), [(0,), (3,), (6,)])
    c = bandt_criterion(sys)
    assert c is not None and c.m0 == -1 and c.verify(sys)


def test_bandt_with_scaled_digits():
    m = certify_expanding([[3]])
    sys = build_system(m, [ScaledVector(2, (1,)), ScaledVector(2, (2,)), ScaledVector(0, (0,))])
    c = bandt_criterion(sys)
    assert c is not None and c.m0 == 2 and c.verify(sys)


def test_duplicate_digits_overlap_at_depth_one():
    sys = fixtures.all_zero()
    res = decide_overlaps(sys)
    assert isinstance(res, OverlapCertificate) and res.depth == 1 and res.verify(sys)


def test_fig1_overlap_depth(fig1_overlap):
    norm, _ = normalize(fig1_overlap)
    cert = find_overlap_up_to(norm, 4)
    assert cert is not None and cert.verify(norm)
    assert cert.depth == brute_overlap_depth(norm, 3)
    res = decide_overlaps(norm)
    assert isinstance(res, OverlapCertificate) and res.verify(norm)


def test_fig1_osc_no_overlap(fig1_osc):
    norm, _ = normalize(fig1_osc)
    assert isinstance(decide_overlaps(norm), NoOverlapProof)
    assert find_overlap_up_to(norm, 5) is None


def test_tampered_certificates_fail(F2, fig1_osc):
    cert = find_overlap_up_to(F2, 2)
    bad = OverlapCertificate(2, cert.word_a, Word((3, 3)), cert.map)
    assert not bad.verify(F2)
    same = OverlapCertificate(2, cert.word_a, cert.word_a, cert.map)
    assert not same.verify(F2)
    osc = bandt_criterion(fig1_osc)
    assert not OSCCertificate(osc.m0, osc.labels[::-1]).verify(fig1_osc)


def test_certificate_transport_through_conjugacy(fig1_overlap):
    norm, conj = normalize(fig1_overlap)
    cert = decide_overlaps(norm)
    # words are intrinsic: the same pair collides in the original coordinates
    assert compose_word(fig1_overlap, cert.word_a) == compose_word(fig1_overlap, cert.word_b)
    assert conj.transport(norm.matrix, compose_word(fig1_overlap, cert.word_a)) == cert.map


def test_budget_inconclusive_for_overlap_branch():
    sys = fixtures.fig1_overlap()
    rep = classify(sys, state_budget=1)
    assert rep.branch is None and rep.status == "inconclusive"
    assert rep.certificates == []


@pytest.mark.parametrize(
    "name, branch, kind",
    [("f1", "osc", "osc"), ("f2", "overlap", "overlap"), ("fig1_osc", "osc", "osc"), ("fig1_overlap", "overlap", "overlap")],
)
def test_classify_fixtures(name, branch, kind):
    sys = fixtures.NAMED[name]()
    rep = classify(sys)
    assert rep.branch == branch and rep.status == "definitive"
    assert [c.kind for c in rep.certificates] == [kind]


def test_classify_without_bandt_uses_no_overlap_proof():
    # a tile digit set that is not a complete residue system mod 4
    sys = build_system(certify_expanding([[4]]), [(0,), (1,), (8,), (9,)])
    assert bandt_criterion(sys) is None
    rep = classify(sys)
    assert rep.branch == "osc"
    assert [type(c) for c in rep.certificates] == [NoOverlapProof]
    assert brute_overlap_depth(rep.normalized, 5) is None


def test_bandt_failure_with_overlap_is_decided():
    sys = build_system(certify_expanding([[3]]), [(0,), (1,), (7,)])
    rep = classify(sys)
    assert rep.branch == "overlap"
    cert = rep.certificates[0]
    assert cert.depth == 3 == brute_overlap_depth(sys, 3)


def _random_normalized(data):
    rows = data.draw(st.sampled_from([[[3]], [[5]], [[1, -2], [2, 1]], [[1, 1], [-1, 2]]]))
    m = certify_expanding(rows)
    vec = st.tuples(*[st.integers(-4, 4)] * m.dim)
    rest = data.draw(st.lists(vec, min_size=m.det_abs - 1, max_size=m.det_abs - 1))
    return build_system(m, [(0,) * m.dim] + rest)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_decision_matches_brute_force(data):
    sys = _random_normalized(data)
    res = decide_overlaps(sys)
    oracle = find_overlap_up_to(sys, 5, budget=10**6)
    if oracle is not None:
        assert isinstance(res, OverlapCertificate)
        assert res.verify(sys)
        assert res.depth == oracle.depth
    if isinstance(res, OverlapCertificate):
        assert res.verify(sys)
    if bandt_criterion(sys) is not None:
        assert isinstance(res, NoOverlapProof)
    rep = classify(sys)
    kinds = {c.kind for c in rep.certificates}
    assert not ({"osc", "no_overlap"} & kinds and "overlap" in kinds)
    assert len(rep.certificates) == 1


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_digit_sum_scan_matches_map_enumeration(data):
    sys = _random_normalized(data)
    cert = find_overlap_up_to(sys, 3)
    assert (cert.depth if cert else None) == brute_overlap_depth(sys, 3)
