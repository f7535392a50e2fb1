"""Brute-force reference computations used only by the test-suite.

Nothing here imports the code paths it checks.
"""

from __future__ import annotations

import itertools
from collections import Counter


def poly_mul_mod(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def poly_divides(d, f, p):
    """True iff monic d divides f over F_p (schoolbook long division)."""
    f = list(f)
    k = len(d) - 1
    for i in range(len(f) - 1, k - 1, -1):
        c = f[i] % p
        if c:
            for j in range(k + 1):
                f[i - k + j] = (f[i - k + j] - c * d[j]) % p
    return all(c % p == 0 for c in f[:k])


def poly_quot(f, d, p):
    f = list(f)
    k = len(d) - 1
    q = [0] * (len(f) - k)
    for i in range(len(f) - 1, k - 1, -1):
        c = f[i] % p
        q[i - k] = c
        if c:
            for j in range(k + 1):
                f[i - k + j] = (f[i - k + j] - c * d[j]) % p
    return q


def monic_polys(deg, p):
    for low in itertools.product(range(p), repeat=deg):
        yield list(low) + [1]


def brute_factor(f, p):
    """Factor f over F_p by trial division with every monic polynomial.

    Returns a sorted list of monic irreducible factors (with repetition) and the
    leading coefficient. Exponential in deg f; fine for deg <= 8 and small p.
    """
    f = [c % p for c in f]
    while f and f[-1] == 0:
        f.pop()
    lc = f[-1]
    inv = pow(lc, -1, p)
    f = [c * inv % p for c in f]
    factors = []
    d = 1
    while len(f) > 1:
        if 2 * d > len(f) - 1:
            factors.append(tuple(f))
            break
        found = False
        for cand in monic_polys(d, p):
            if poly_divides(cand, f, p):
                factors.append(tuple(cand))
                f = poly_quot(f, cand, p)
                found = True
                break
        if not found:
            d += 1
    return sorted(factors, key=lambda t: (len(t), t)), lc


def brute_degrees(f, p):
    return tuple(sorted(len(t) - 1 for t in brute_factor(f, p)[0]))


def squarefree_upto(q):
    out = []
    for a in range(1, int(q) + 1):
        if all(a % (k * k) for k in range(2, int(a ** 0.5) + 1)):
            out.append(a)
    return out


def prime_factors(n):
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def brute_count_points(f, p):
    """Points on the smooth model of y^2 = f(x) over the prime field F_p."""
    squares = Counter((y * y) % p for y in range(p))
    affine = 0
    for x in range(p):
        v = sum(c * pow(x, i, p) for i, c in enumerate(f)) % p
        affine += squares[v]
    d = len(f) - 1
    if d % 2:
        inf = 1
    else:
        inf = 2 if squares[f[-1] % p] else 0
    return affine + inf


def _ext_modulus(p, r):
    """First monic degree-r polynomial with no root mod p (irreducible for r <= 3)."""
    for cand in monic_polys(r, p):
        if all(sum(c * pow(x, i, p) for i, c in enumerate(cand)) % p for x in range(p)):
            return cand
    raise AssertionError


def brute_count_points_ext(f, p, r):
    """Projective point count of y^2 = f(x) over F_{p^r}, r <= 3, in pure Python."""
    m = _ext_modulus(p, r) if r > 1 else [0, 1]

    def mul(a, b):
        prod = poly_mul_mod(list(a), list(b), p)
        for k in range(len(prod) - 1, r - 1, -1):
            c = prod[k]
            if c:
                for j in range(r + 1):
                    prod[k - r + j] = (prod[k - r + j] - c * m[j]) % p
        return tuple((prod + [0] * r)[:r])

    elems = list(itertools.product(range(p), repeat=r))
    sq = Counter(mul(y, y) for y in elems)
    total = 0
    for x in elems:
        acc = (0,) * r
        for c in reversed(f):
            acc = mul(acc, x)
            acc = ((acc[0] + c) % p,) + acc[1:]
        total += sq[acc]
    d = max(i for i, c in enumerate(f) if c % p)
    if d % 2:
        return total + 1
    lc = (f[d] % p,) + (0,) * (r - 1)
    return total + (2 if sq[lc] else 0)


# cycle-type distributions of the transitive subgroups of S4 on the four roots
CYCLE_TYPES = {
    "S4": {(1, 1, 1, 1): 1 / 24, (1, 1, 2): 6 / 24, (2, 2): 3 / 24, (1, 3): 8 / 24, (4,): 6 / 24},
    "A4": {(1, 1, 1, 1): 1 / 12, (2, 2): 3 / 12, (1, 3): 8 / 12},
    "D4": {(1, 1, 1, 1): 1 / 8, (1, 1, 2): 2 / 8, (2, 2): 3 / 8, (4,): 2 / 8},
    "C4": {(1, 1, 1, 1): 1 / 4, (2, 2): 1 / 4, (4,): 2 / 4},
    "V4": {(1, 1, 1, 1): 1 / 4, (2, 2): 3 / 4},
}


def pattern_statistics_group(f, limit, degrees_mod_p, primes, bad):
    """Group whose cycle-type distribution is L1-closest to the observed
    factorization patterns of f mod p over good primes p <= limit.

    Chebotarev makes the empirical frequencies converge to the distribution
    of the Galois group acting on the roots.
    """
    counts = Counter()
    for p in primes:
        if p > limit or bad % p == 0:
            continue
        counts[degrees_mod_p(f, p)] += 1
    total = sum(counts.values())
    freq = {k: v / total for k, v in counts.items()}
    dist = {
        name: sum(abs(freq.get(k, 0) - law.get(k, 0)) for k in set(freq) | set(law))
        for name, law in CYCLE_TYPES.items()
    }
    best = min(dist, key=dist.get)
    return best, dist


def exact_triple_norm(f):
    """prod over ordered triples of distinct roots of (y^2 - x z), exactly.

    For a root y, f(t)/(t - y) = t^3 + a t^2 + b t + c has roots x1, x2, x3
    whose pairwise products are the roots of S(w) = w^3 - b w^2 + a c w - c^2.
    Ordered pairs count each product twice, so the norm is Res(f, S_y(y^2))^2
    with S_y(y^2) read as a polynomial in y.
    """
    import sympy

    t, y = sympy.symbols("t y")
    F = sum(sympy.Integer(c) * t**i for i, c in enumerate(f))
    cubic = sympy.Poly(sympy.quo(F, t - y, t), t)
    _, a, b, c = cubic.all_coeffs()
    H = sympy.expand(y**6 - b * y**4 + a * c * y**2 - c**2)
    Fy = F.subs(t, y)
    return int(sympy.resultant(Fy, H, y)) ** 2
