from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gspsieve.curves import HyperellipticCurve, good_reduction_check, weil_polynomial
from gspsieve.errors import EmptyFamily
from gspsieve.modarith import PrimeFieldPoly, factor_degrees, primes_up_to
from gspsieve.sieve import (
    WITNESS_POLICIES,
    FamilySpec,
    SieveParams,
    bernoulli_spread_limit,
    box_parameters,
    density_scan,
    equidistribution_sample,
    large_sieve_L,
    sieve_bound,
)

from oracles import prime_factors, squarefree_upto

BOX = "* * * * * *"


def brute_L(Q, omega):
    total = Fraction(0)
    for a in squarefree_upto(Q):
        term = Fraction(1)
        for p in prime_factors(a):
            w = Fraction(omega.get(p, 0))
            term *= w / (1 - w)
        total += term
    return total


def test_L_examples():
    assert large_sieve_L(SieveParams(10, 50)) == 1.0
    assert large_sieve_L(SieveParams.constant_omega(10, 30, 0.5)) == 19.0
    assert large_sieve_L(SieveParams(1, 2, omega={2: Fraction(1, 3)})) == 1.5


def test_bound_examples():
    assert sieve_bound(SieveParams(1, 1)) == 2.0
    assert sieve_bound(SieveParams.constant_omega(10, 30, 0.5)) == pytest.approx(910 / 19)
    a = sieve_bound(SieveParams(1, 8, 2))
    b = sieve_bound(SieveParams(1, 16, 2))
    # L stays 1 with omega = 0, so only the Q-term moves, by 2^(2r)
    assert (b - 1) == pytest.approx((a - 1) * 2**4)


def test_params_validation():
    with pytest.raises(ValueError):
        SieveParams(10, 10, omega={3: 1.0})
    with pytest.raises(ValueError):
        SieveParams(10, 10, omega={4: 0.5})
    with pytest.raises(ValueError):
        SieveParams(0.5, 10)


@pytest.mark.parametrize("Q", [1, 2, 17, 30, 64, 100])
def test_L_matches_bruteforce(Q):
    omega = {p: Fraction(1, p + 1) for p in primes_up_to(Q)}
    assert large_sieve_L(SieveParams(1, Q, omega=omega)) == pytest.approx(float(brute_L(Q, omega)), rel=1e-15)
    omega = {p: Fraction(p % 5, 7) for p in primes_up_to(Q)}
    assert large_sieve_L(SieveParams(1, Q, omega=omega)) == pytest.approx(float(brute_L(Q, omega)), rel=1e-15)


def test_L_exact_bruteforce_all_q():
    for Q in range(1, 101):
        omega = {p: Fraction(1, 2) for p in primes_up_to(Q)}
        assert large_sieve_L(SieveParams(1, Q, omega=omega)) == len(squarefree_upto(Q))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 80), st.integers(0, 20), st.dictionaries(st.sampled_from(primes_up_to(80)), st.fractions(0, Fraction(9, 10))))
def test_L_monotone(Q, dQ, omega):
    base = large_sieve_L(SieveParams(1, Q, omega=omega))
    assert base >= 1
    assert large_sieve_L(SieveParams(1, Q + dQ, omega=omega)) >= base
    bumped = {p: min(Fraction(95, 100), w + Fraction(1, 20)) for p, w in omega.items()}
    assert large_sieve_L(SieveParams(1, Q, omega=bumped)) >= base


def test_family_parse():
    fam = FamilySpec.parse("* * 0 0 0 1")
    assert fam.free == [0, 1] and fam.genus == 2
    assert fam.member((3, -4)) == (3, -4, 0, 0, 0, 1)
    assert str(fam) == "* * 0 0 0 1"


def test_box_parameters():
    fam = FamilySpec.parse("* * 0 0 0 1")
    U = box_parameters(fam, 2, 10**6, 0)
    assert U.shape == (25, 2)
    assert U[0].tolist() == [-2, -2] and U[-1].tolist() == [2, 2]
    assert [tuple(u) for u in U.tolist()] == sorted(tuple(u) for u in U.tolist())
    S = box_parameters(fam, 10, 50, 3)
    assert S.shape == (50, 2) and abs(S).max() <= 10
    assert len({tuple(u) for u in S.tolist()}) == 50
    assert (S == box_parameters(fam, 10, 50, 3)).all()


def test_sample_trivial_predicates():
    assert equidistribution_sample(BOX, 11, "true", 50, 0) == 1.0
    assert equidistribution_sample(BOX, 11, "false", 50, 0) == 0.0


def test_sample_golden_and_reproducible():
    f = equidistribution_sample(BOX, 11, "D4", 2000, 7)
    assert f == 0.5785
    assert equidistribution_sample(BOX, 11, "D4", 2000, 7) == f


def test_sample_pattern_predicate():
    f = equidistribution_sample(BOX, 11, "pattern:2+1+1@3", 400, 1)
    assert 0 < f < 1
    with pytest.raises(ValueError):
        equidistribution_sample(BOX, 11, "nonsense", 10, 1)


def test_sample_seed_spread():
    fs = [equidistribution_sample(BOX, 11, "D4", 2000, s) for s in range(10)]
    mean = sum(fs) / len(fs)
    assert max(fs) - min(fs) <= bernoulli_spread_limit(mean, 2000)


def test_scan_empty_family():
    with pytest.raises(EmptyFamily):
        density_scan("* 0 0 0 0 *", 0, [3], 50, 7)  # only f = 0 in the box


def test_scan_one_curve_golden():
    r = density_scan("1 -1 0 0 0 1", 1, [3], 50, 7)
    doc = r.to_document()
    assert doc["scanned"] == 1 and doc["witnessed_all"] == 1
    assert r.rows == [((), 3, "witnessed-maximal", 5, 11)]
    assert json.dumps(doc) == json.dumps(density_scan("1 -1 0 0 0 1", 1, [3], 50, 7).to_document())


def test_scan_counts_consistent():
    r = density_scan("* * 0 0 0 1", 6, [3, 5], 50, 7)
    for c in r.per_ell.values():
        assert c.scanned == c.witnessed + c.unknown
        assert 0 <= c.fraction <= 1
    assert r.members_in_box == 13 * 13
    assert r.scanned + r.excluded_singular == r.members_in_box
    lines = r.to_csv().splitlines()
    assert lines[0].startswith("schema_version,u,ell")
    assert len(lines) == 1 + 2 * r.scanned


def test_scan_witnesses_recomputed_independently():
    r = density_scan("* * 0 0 0 1", 4, [3], 50, 7)
    fam = FamilySpec.parse("* * 0 0 0 1")
    for u, ell, status, p_irr, p_sec in r.rows[:30]:
        c = HyperellipticCurve(fam.member(u))
        for p, pattern in ((p_irr, (4,)), (p_sec, (1, 1, 2))):
            if p is None:
                continue
            assert good_reduction_check(c, p) and p != ell
            w = weil_polynomial(c, p)
            assert factor_degrees(PrimeFieldPoly.from_ints(w.coefficients, ell)) == pattern
        assert (status == "witnessed-maximal") == (p_irr is not None and p_sec is not None)


def test_scan_one_sided_in_pmax():
    small = density_scan("* * 0 0 0 1", 8, [3], 30, 7)
    large = density_scan("* * 0 0 0 1", 8, [3], 60, 7)
    for a, b in zip(small.rows, large.rows):
        assert a[0] == b[0]
        if a[2] == "witnessed-maximal":
            assert b[2] == "witnessed-maximal"


def test_scan_strict_policy_is_weaker():
    loose = density_scan("* * 0 0 0 1", 8, [3], 50, 7)
    strict = density_scan("* * 0 0 0 1", 8, [3], 50, 7, policy=WITNESS_POLICIES[1])
    assert strict.witnessed_all <= loose.witnessed_all
    assert strict.to_document()["witness_policy"] == WITNESS_POLICIES[1]


def test_scan_parallel_matches_serial():
    a = density_scan("* * 0 0 0 1", 5, [3], 40, 7, jobs=1)
    b = density_scan("* * 0 0 0 1", 5, [3], 40, 7, jobs=2)
    assert a.to_csv() == b.to_csv()


def test_scan_rejects_bad_ells():
    with pytest.raises(ValueError):
        density_scan("* * 0 0 0 1", 5, [2], 40, 7)
    with pytest.raises(ValueError):
        density_scan("* * 0 0 0 1", 5, [9], 40, 7)
