"""The twelve acceptance criteria, each run at its stated tolerance and time limit.

Run with ``pytest tests/test_acceptance.py -v`` (a summary line per criterion
is printed at the end) or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from gspsieve import grouplab  # noqa: E402
from gspsieve.certify import alpha, certify_surface, log_b  # noqa: E402
from gspsieve.curves import (  # noqa: E402
    HyperellipticCurve,
    count_points,
    good_reduction_check,
    weil_polynomial,
)
from gspsieve.errors import Reducible, SingularModel  # noqa: E402
from gspsieve.galois import exceptional_prime_norm, quartic_galois_group, weil_galois_is_D4  # noqa: E402
from gspsieve.modarith import PrimeFieldPoly, factor_degrees, int_discriminant, primes_up_to  # noqa: E402
from gspsieve.sieve import (  # noqa: E402
    SieveParams,
    bernoulli_spread_limit,
    density_scan,
    equidistribution_sample,
    large_sieve_L,
)
from gspsieve.symplectic import (  # noqa: E402
    commutator_span,
    group_commutator_congruence,
    group_order,
    lie_dimension,
)

from oracles import pattern_statistics_group, prime_factors, squarefree_upto  # noqa: E402
from test_galois import CORPUS  # noqa: E402

DATA = Path(__file__).resolve().parent.parent / "data"
RESULTS: dict[int, str] = {}


def record(k: int, name: str, limit: float, body) -> None:
    t0 = time.perf_counter()
    ok, detail = False, ""
    try:
        ok, detail = body()
    except Exception as exc:  # report, then fail
        detail = f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - t0
    in_time = elapsed < limit
    status = "PASS" if ok and in_time else "FAIL"
    line = f"[{status}] {k:2d}. {name}: {detail} ({elapsed:.2f} s, limit {limit:g} s)"
    RESULTS[k] = line
    print(line)
    assert ok, line
    assert in_time, line


# 1 -------------------------------------------------------------------------
def c1():
    got = {(g, l): grouplab.sp_group(g, l).order for g, l in ((1, 2), (1, 3), (1, 5), (2, 2))}
    want = {(1, 2): 6, (1, 3): 24, (1, 5): 120, (2, 2): 720}
    ok = got == want and all(group_order(g, l) == n for (g, l), n in want.items())
    return ok, f"orders {list(got.values())}"


def test_c01_group_orders():
    record(1, "group orders by enumeration", 5, c1)


# 2 -------------------------------------------------------------------------
def c2():
    dims = {(g, l): commutator_span(g, l).dimension for g in (1, 2) for l in (3, 5, 7)}
    full = all(d == lie_dimension(g) for (g, _), d in dims.items())
    twice = all(commutator_span(g, 4).contains_twice_sp for g in (1, 2))
    return full and twice, f"full rank {full}, mod-4 contains 2*sp {twice}"


def test_c02_commutator_span():
    record(2, "commutator span (full rank mod l, 2*sp mod 4)", 5, c2)


# 3 -------------------------------------------------------------------------
def c3():
    rng = random.Random(20240303)
    bad = 0
    for _ in range(1000):
        ell = rng.choice([3, 5, 7])
        g = rng.choice([1, 2])
        m = rng.randint(1, 3)
        n = rng.randint(1, m)
        U = [[rng.randrange(ell**4) for _ in range(2 * g)] for _ in range(2 * g)]
        V = [[rng.randrange(ell**4) for _ in range(2 * g)] for _ in range(2 * g)]
        bad += not group_commutator_congruence(ell, n, m, U, V)
    return bad == 0, f"1000 samples, {bad} failures"


def test_c03_commutator_formula():
    record(3, "commutator formula congruence", 30, c3)


# 4 -------------------------------------------------------------------------
def c4():
    a = grouplab.lifting_check(2, 2, 2, trials=200, seed=1)
    b = grouplab.lifting_check(1, 5, 2, trials=200, seed=1)
    ok = a.passed and b.passed and set(a.orders) == {737280} and set(b.orders) == {15000}
    return ok, (f"Sp4(Z/4): {a.trials} trials, counterexample={a.counterexample is not None}; "
                f"SL2(Z/25): {b.trials} trials, counterexample={b.counterexample is not None}")


def test_c04_lifting():
    record(4, "lifting from Z/l to Z/l^2", 300, c4)


# 5 -------------------------------------------------------------------------
def c5():
    z2 = grouplab.permutation_group([(1, 0)])
    diag = grouplab.product_closure_test([((1, 0), (1, 0))], z2, z2)
    U = np.array([[1, 1], [0, 1]])
    L = np.array([[1, 0], [1, 1]])
    G5 = grouplab.tuple_matrix_group([U, L], 5)
    G7 = grouplab.tuple_matrix_group([U, L], 7)

    def flat(a, m):
        return tuple(int(x) % m for x in a.ravel())

    rep = grouplab.product_closure_test([(flat(U, 5), flat(U, 7)), (flat(L, 5), flat(L, 7))], G5, G7)
    ok = (diag.first_surjective and diag.second_surjective and not diag.is_full_product
          and rep.first_surjective and rep.second_surjective and rep.closure_order == 40320)
    return ok, f"diagonal closure {diag.closure_order} of {diag.product_order}; SL2(F5)xSL2(F7) closure {rep.closure_order}"


def test_c05_goursat():
    record(5, "Goursat finite cases", 120, c5)


# 6 -------------------------------------------------------------------------
def _seeded_curves(seed, count, primes):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        f = [rng.randint(-50, 50) for _ in range(6)]
        f[5] = f[5] or 1
        try:
            c = HyperellipticCurve(tuple(f))
        except SingularModel:
            continue
        p = rng.choice(primes)
        if good_reduction_check(c, p):
            out.append((c, p))
    return out


def c6():
    pairs = _seeded_curves(6, 100, [p for p in primes_up_to(31) if p > 2])
    fe = roots = n3 = 0
    worst = 0.0
    for c, p in pairs:
        w = weil_polynomial(c, p)
        fe += w.satisfies_functional_equation()
        dev = w.max_root_deviation()
        worst = max(worst, dev)
        roots += dev < 1e-9
        n3 += w.predicted_count(3) == count_points(c, p, 3)
    ok = fe == roots == n3 == 100
    return ok, f"functional eq {fe}/100, |root| = sqrt(p) {roots}/100 (worst {worst:.1e}), N3 {n3}/100"


def test_c06_weil_polynomials():
    record(6, "Weil polynomials", 300, c6)


# 7 -------------------------------------------------------------------------
def c7():
    primes = primes_up_to(10_000)

    def degs(f, p):
        return factor_degrees(PrimeFieldPoly.from_ints(f, p))

    agree = 0
    for f, _ in CORPUS:
        oracle, _ = pattern_statistics_group(f, 10_000, degs, primes, int_discriminant(f) * f[-1])
        agree += quartic_galois_group(f).label == oracle
    return agree == len(CORPUS) == 20, f"{agree}/{len(CORPUS)} agree with the pattern-statistics oracle"


def test_c07_quartic_classifier():
    record(7, "quartic classifier vs statistics oracle", 60, c7)


# 8 -------------------------------------------------------------------------
def c8():
    rng = random.Random(8)
    primes = [p for p in primes_up_to(60) if p > 2]
    labels = {}
    done = norms_ok = d4 = 0
    while done < 200:
        f = [rng.randint(-20, 20) for _ in range(6)]
        f[5] = f[5] or 1
        try:
            c = HyperellipticCurve(tuple(f))
        except SingularModel:
            continue
        p = rng.choice(primes)
        if not good_reduction_check(c, p):
            continue
        w = weil_polynomial(c, p)
        try:
            is_d4, lab = weil_galois_is_D4(w)
        except Reducible:
            continue
        done += 1
        labels[lab.label] = labels.get(lab.label, 0) + 1
        if is_d4:
            d4 += 1
            norms_ok += exceptional_prime_norm(w).value != 0
    ok = set(labels) <= {"D4", "C4", "V4"} and norms_ok == d4
    return ok, f"labels {dict(sorted(labels.items()))}; nonzero norm {norms_ok}/{d4}"


def test_c08_subgroup_of_d4_and_norm():
    record(8, "Galois group inside D4 and nonzero norm", 300, c8)


# 9 -------------------------------------------------------------------------
def c9():
    expected = 2097152 * math.log(28)
    rel = abs(log_b(1, 2, 1) - expected) / expected
    curve_line = next(ln.split("#")[0] for ln in (DATA / "curves.txt").read_text().splitlines()
                      if ln.split("#")[0].strip())
    curve = HyperellipticCurve.from_line(curve_line)
    a = certify_surface(curve, prime_search_limit=200).to_document()
    b = certify_surface(curve, prime_search_limit=200).to_document()
    ok = rel <= 1e-9 and alpha(2) == 8192 and alpha(4) == 65536 and a == b and a["label"] == "D4" and a["v"] <= 200
    return ok, f"log_b rel err {rel:.1e}; curve {curve_line.strip()} certified at v = {a['v']}"


def test_c09_explicit_bound():
    record(9, "explicit bound and certificate", 60, c9)


# 10 ------------------------------------------------------------------------
def c10():
    from fractions import Fraction

    mismatches = 0
    for Q in range(1, 101):
        omega = {p: Fraction(1, p) for p in primes_up_to(Q)}
        brute = Fraction(0)
        for a in squarefree_upto(Q):
            term = Fraction(1)
            for p in prime_factors(a):
                term *= omega[p] / (1 - omega[p])
            brute += term
        mismatches += large_sieve_L(SieveParams(1, Q, omega=omega)) != float(brute)
    L30 = large_sieve_L(SieveParams.constant_omega(10, 30, 0.5))
    return mismatches == 0 and L30 == 19, f"Q <= 100 mismatches {mismatches}; L(30) at omega 1/2 = {L30:g}"


def test_c10_large_sieve():
    record(10, "large sieve L(Q)", 1, c10)


# 11 ------------------------------------------------------------------------
def c11():
    fam = "* * 0 0 0 1"
    fracs = [density_scan(fam, B, [3], 50, seed=11).witnessed_fraction for B in (10, 30, 100)]
    again = density_scan(fam, 100, [3], 50, seed=11)
    first = density_scan(fam, 100, [3], 50, seed=11)
    identical = again.to_csv() == first.to_csv() and again.to_document() == first.to_document()
    ok = fracs[0] <= fracs[1] <= fracs[2] and fracs[2] >= 0.8 and identical
    return ok, f"fractions {[round(f, 4) for f in fracs]} for B = 10, 30, 100; rerun identical {identical}"


def test_c11_density_trend():
    record(11, "density trend", 600, c11)


# 12 ------------------------------------------------------------------------
def c12():
    fs = [equidistribution_sample("* * * * * *", 11, "D4", 2000, seed) for seed in range(10)]
    mean = sum(fs) / len(fs)
    spread = max(fs) - min(fs)
    limit = bernoulli_spread_limit(mean, 2000)
    return spread <= limit, f"mean {mean:.4f}, spread {spread:.4f} <= {limit:.4f}"


def test_c12_equidistribution():
    record(12, "equidistribution spread", 120, c12)


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
