"""Galois groups of quartics, the D4 structure of Frobenius quartics, and
cycle-type witnesses for reciprocal polynomials.

Integer polynomials are coefficient lists, lowest degree first.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import mpmath

from .curves import WeilPolynomial
from .errors import NotD4, NotReciprocal, PrecisionFailure, Reducible, WitnessNotFound
from .modarith import (
    PrimeFieldPoly,
    ResidueValue,
    crt_combine,
    factor_degrees,
    int_discriminant,
    int_poly_mul,
    is_square_int,
    is_squarefree,
    primes_between,
    trial_factor,
)

log = logging.getLogger(__name__)

LABELS = ("S4", "A4", "D4", "C4", "V4")


# ---------------------------------------------------------------------------
# integer roots and quartic irreducibility

def _monic_quartic(f: Sequence[int]) -> tuple[int, int, int, int]:
    """(a, b, c, d) with x^4 + a x^3 + b x^2 + c x + d having the same splitting field.

    A leading coefficient l is absorbed by y = l x.
    """
    f = [int(c) for c in f]
    while f and f[-1] == 0:
        f.pop()
    if len(f) != 5:
        raise ValueError("expected a polynomial of degree exactly 4")
    c0, c1, c2, c3, l = f
    return c3, c2 * l, c1 * l * l, c0 * l**3


def integer_roots(f: Sequence[int]) -> list[int]:
    """Distinct integer roots of a monic integer polynomial (lowest first)."""
    f = [int(c) for c in f]
    if f[-1] != 1:
        raise ValueError("expected a monic polynomial")
    out = set()
    if f[0] == 0:
        out.add(0)
    n = len(f) - 1
    digits = max(len(str(abs(c))) for c in f)
    with mpmath.workdps(digits + 30):
        approx = mpmath.polyroots(list(reversed(f)), maxsteps=400, extraprec=4 * (digits + 30))
        for z in approx:
            if abs(mpmath.im(z)) > 1 + abs(z) * mpmath.mpf(10) ** (-digits):
                continue
            base = int(mpmath.nint(mpmath.re(z)))
            for r in (base - 1, base, base + 1):
                if sum(c * r**i for i, c in enumerate(f)) == 0:
                    out.add(r)
    assert len(out) <= n
    return sorted(out)


def resolvent_cubic(a: int, b: int, c: int, d: int) -> list[int]:
    """x^3 - b x^2 + (ac - 4d) x - (a^2 d - 4bd + c^2); roots a1a2 + a3a4 etc."""
    return [-(a * a * d - 4 * b * d + c * c), a * c - 4 * d, -b, 1]


def _quadratic_factor(a: int, b: int, c: int, d: int, thetas: Sequence[int]) -> tuple[list[int], list[int]] | None:
    """A factorization into monic integer quadratics, found from resolvent roots.

    If f = (x^2 + u x + v)(x^2 + w x + z) then v + z is a resolvent root and
    v, z are the roots of t^2 - (v + z) t + d.
    """
    for th in thetas:
        disc = th * th - 4 * d
        if not is_square_int(disc):
            continue
        s = math.isqrt(disc)
        if (th + s) % 2:
            continue
        v, z = (th + s) // 2, (th - s) // 2
        cands = []
        if z != v:
            num = c - a * v
            if num % (z - v) == 0:
                u = num // (z - v)
                cands.append(u)
        else:
            dd = a * a - 4 * (b - v - z)
            if is_square_int(dd) and (a + math.isqrt(dd)) % 2 == 0:
                cands.append((a + math.isqrt(dd)) // 2)
        for u in cands:
            p1, p2 = [v, u, 1], [z, a - u, 1]
            if int_poly_mul(p1, p2) == [d, c, b, a, 1]:
                return p1, p2
    return None


@dataclass(frozen=True)
class QuarticGaloisLabel:
    label: str
    monic: tuple[int, int, int, int]
    resolvent: tuple[int, ...]
    resolvent_roots: tuple[int, ...]
    discriminant: int
    disc_is_square: bool

    def __str__(self) -> str:
        return self.label


def is_irreducible_quartic(f: Sequence[int]) -> bool:
    a, b, c, d = _monic_quartic(f)
    if integer_roots([d, c, b, a, 1]):
        return False
    thetas = integer_roots(resolvent_cubic(a, b, c, d))
    return _quadratic_factor(a, b, c, d, thetas) is None


def _square_in_quadratic_field(D: int, delta: int) -> bool:
    """Is the rational integer D a square in Q(sqrt(delta))?"""
    return D == 0 or is_square_int(D) or is_square_int(D * delta)


def quartic_galois_group(f: Sequence[int]) -> QuarticGaloisLabel:
    """Galois group of an irreducible integer quartic.

    Decision tree on the resolvent cubic R and Delta = disc(f): R irreducible
    gives S4 or A4 by whether Delta is a square; R split gives V4; one
    rational root r gives C4 exactly when x^2 - r x + d and
    x^2 + a x + (b - r) both split over Q(sqrt(Delta)), otherwise D4.
    """
    a, b, c, d = _monic_quartic(f)
    quartic = [d, c, b, a, 1]
    if integer_roots(quartic):
        raise Reducible("quartic has a rational root")
    R = resolvent_cubic(a, b, c, d)
    thetas = integer_roots(R)
    if _quadratic_factor(a, b, c, d, thetas) is not None:
        raise Reducible("quartic is a product of two quadratics")
    delta = int_discriminant(quartic)
    square = is_square_int(delta)
    if not thetas:
        label = "A4" if square else "S4"
    elif len(thetas) == 3:
        label = "V4"
    else:
        # a repeated rational root would force Delta = 0, impossible here
        (r,) = thetas
        d1 = r * r - 4 * d
        d2 = a * a - 4 * (b - r)
        c4 = _square_in_quadratic_field(d1, delta) and _square_in_quadratic_field(d2, delta)
        label = "C4" if c4 else "D4"
    return QuarticGaloisLabel(label, (a, b, c, d), tuple(R), tuple(thetas), delta, square)


def weil_galois_is_D4(w: WeilPolynomial) -> tuple[bool, QuarticGaloisLabel]:
    """Whether the Frobenius quartic has Galois group D4, plus the full label."""
    if w.degree != 4:
        raise ValueError("expected a genus-2 Frobenius polynomial")
    lab = quartic_galois_group(w.coefficients)
    return lab.label == "D4", lab


# ---------------------------------------------------------------------------
# the norm of y^2 - xz

@dataclass(frozen=True)
class NormResult:
    value: int
    prime_divisors: tuple[int, ...]
    cofactor: int
    error_bound: float


def _root_radius(f: Sequence[int], z) -> mpmath.mpf:
    """Some root of f lies within n |f(z) / f'(z)| of z."""
    n = len(f) - 1
    fz = mpmath.polyval(list(reversed(f)), z)
    df = [i * f[i] for i in range(1, n + 1)]
    dfz = mpmath.polyval(list(reversed(df)), z)
    return n * abs(fz) / abs(dfz)


def _triple_norm(f: Sequence[int], q: int, dps: int) -> tuple[int, mpmath.mpf]:
    with mpmath.workdps(dps):
        roots = mpmath.polyroots(list(reversed(f)), maxsteps=400, extraprec=dps)
        delta = max(_root_radius(f, z) for z in roots)
        # the disks must separate the roots for each one to own a true root
        sep = min(abs(x - y) for x, y in itertools.combinations(roots, 2))
        if 2 * delta >= sep:
            raise PrecisionFailure("root isolation failed")
        R = mpmath.sqrt(q) + delta
        prod = mpmath.mpc(1)
        bound = mpmath.mpf(1)
        exact_bound = mpmath.mpf(1)
        for x, y, z in itertools.permutations(roots, 3):
            t = y * y - x * z
            prod *= t
            eps = 4 * R * delta + 2 * delta * delta
            bound *= abs(t) + eps
            exact_bound *= abs(t)
        err = bound - exact_bound
        # slack for rounding inside the product itself
        err += abs(bound) * mpmath.mpf(10) ** (-dps + 10)
        value = int(mpmath.nint(mpmath.re(prod)))
        window = err + abs(mpmath.im(prod)) + abs(mpmath.re(prod) - value)
        return value, window


def exceptional_prime_norm(w: WeilPolynomial, factor_budget: int = 10**6, max_attempts: int = 3) -> NormResult:
    """The integer prod over ordered triples of distinct roots of (y^2 - xz).

    Roots are isolated numerically with an a-posteriori radius bound, the
    error is pushed through all 24 factors, and the result is rounded only
    when the rigorous window is below 1/4.
    """
    is_d4, lab = weil_galois_is_D4(w)
    if not is_d4:
        raise NotD4(f"Galois group is {lab.label}")
    f = list(w.coefficients)
    dps = int(24 * math.log10(2 * w.q)) + 30
    for _ in range(max_attempts):
        value, window = _triple_norm(f, w.q, dps)
        if window < 0.25:
            break
        dps *= 2
    else:
        raise PrecisionFailure(f"rounding window {float(window):.3g} exceeds 0.25")
    if value == 0:
        return NormResult(0, (), 0, float(window))
    factors, cofactor = trial_factor(value, factor_budget)
    return NormResult(value, tuple(sorted(factors)), cofactor, float(window))


# ---------------------------------------------------------------------------
# cycle-type witnesses

def splitting_patterns(g: int) -> list[tuple[int, ...]]:
    """The partitions 2+1.., 4+1.., (2g-2)+1+1, 2g of 2g, deduplicated, sorted tuples."""
    if g < 2:
        raise ValueError("need g >= 2")
    raw = [
        (2,) + (1,) * (2 * g - 2),
        (4,) + (1,) * (2 * g - 4),
        (2 * g - 2, 1, 1),
        (2 * g,),
    ]
    out = []
    for pat in raw:
        key = tuple(sorted(pat))
        if key not in out:
            out.append(key)
    if len(out) < len(raw):
        log.info("genus %d: %d splitting patterns collapse to %d", g, len(raw), len(out))
    return out


def is_reciprocal(P: Sequence[int]) -> bool:
    P = list(P)
    while P and P[-1] == 0:
        P.pop()
    return bool(P) and P == P[::-1]


@dataclass(frozen=True)
class CycleTypeWitness:
    pattern: tuple[int, ...]
    prime: int
    degrees: tuple[int, ...]


def reduction_degrees(P: Sequence[int], ell: int) -> tuple[int, ...] | None:
    """Factor degrees of P mod ell, or None if the reduction is not squarefree
    of the same degree."""
    if P[-1] % ell == 0:
        return None
    f = PrimeFieldPoly.from_ints(P, ell)
    if not is_squarefree(f):
        return None
    return factor_degrees(f)


def cycle_type_witnesses(P: Sequence[int], C: int, bound: int) -> tuple[list[CycleTypeWitness], int]:
    """Least prime in (C, bound] realizing each splitting pattern, and their product.

    Only primes where P stays squarefree of full degree count, so the
    factor degrees are the cycle type of a Frobenius element.
    """
    P = [int(c) for c in P]
    while P and P[-1] == 0:
        P.pop()
    if not is_reciprocal(P):
        raise NotReciprocal("P(T) != T^deg P(1/T)")
    n = len(P) - 1
    if n % 2 or n < 4:
        raise ValueError("need even degree 2g >= 4")
    if bound < C:
        raise ValueError("bound must be at least C")
    patterns = splitting_patterns(n // 2)
    found: dict[tuple[int, ...], int] = {}
    for ell in primes_between(C + 1, bound):
        degs = reduction_degrees(P, ell)
        if degs in patterns and degs not in found:
            found[degs] = ell
            if len(found) == len(patterns):
                break
    for pat in patterns:
        if pat not in found:
            raise WitnessNotFound(pat, bound)
    witnesses = [CycleTypeWitness(pat, found[pat], pat) for pat in patterns]
    m = crt_combine(ResidueValue(0, w.prime) for w in witnesses).modulus
    return witnesses, m


def find_reciprocal_with_witnesses(g: int, C: int, bound: int, seed: int,
                                   box: int = 10, attempts: int = 1000) -> tuple[list[int], list[CycleTypeWitness], int]:
    """Seeded search of a coefficient box for a reciprocal P with every witness.

    Best effort: raises WitnessNotFound for the last failure when the box is
    exhausted.
    """
    import random

    rng = random.Random(seed)
    last: WitnessNotFound | None = None
    for _ in range(attempts):
        half = [rng.randint(-box, box) for _ in range(g)]
        P = [1] + half + half[-2::-1] + [1]
        try:
            wits, m = cycle_type_witnesses(P, C, bound)
            return P, wits, m
        except WitnessNotFound as exc:
            last = exc
    assert last is not None
    raise last
