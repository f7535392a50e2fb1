"""Exact arithmetic over Z/mZ, F_p[x] and F_{p^r}.

Polynomials over a prime field are coefficient tuples, lowest degree first.
Everything here is arbitrary precision except :class:`FiniteField`, which
vectorizes over numpy ``int64`` arrays and therefore caps the field size.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ConstantPolynomial, NonCoprimeModuli, ZeroPolynomial


# ---------------------------------------------------------------------------
# integers

def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24, trial division below 1000."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    if n < 1369:
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=32)
def _prime_table(limit: int) -> tuple[int, ...]:
    if limit < 2:
        return ()
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if flags[q]:
            flags[q * q::q] = False
    return tuple(int(x) for x in np.flatnonzero(flags))


def primes_up_to(limit: int) -> tuple[int, ...]:
    return _prime_table(int(limit))


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes p with lo < p <= hi."""
    return [p for p in primes_up_to(hi) if p > lo]


def trial_factor(n: int, budget: int = 10**6) -> tuple[dict[int, int], int]:
    """Split off prime factors of |n| up to ``budget``.

    Returns ``(factors, cofactor)``; the cofactor is 1 when n factored fully
    and otherwise a composite with no prime factor below ``budget``.
    """
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    for q in primes_up_to(min(budget, math.isqrt(n) + 1)):
        if q * q > n:
            break
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
    if n > 1 and is_prime(n):
        out[n] = out.get(n, 0) + 1
        n = 1
    return out, n


def divisors(n: int) -> list[int]:
    """Positive divisors of a nonzero integer (trial division, small n only)."""
    fac, rest = trial_factor(n, budget=max(10**6, math.isqrt(abs(n)) + 1))
    if rest != 1:
        fac[rest] = fac.get(rest, 0) + 1
    divs = [1]
    for q, e in fac.items():
        divs = [d * q**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def is_square_int(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


# ---------------------------------------------------------------------------
# residues and CRT

@dataclass(frozen=True)
class ResidueValue:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)

    def _check(self, other: "ResidueValue") -> None:
        if other.modulus != self.modulus:
            raise ValueError("moduli differ")

    def __add__(self, other: "ResidueValue") -> "ResidueValue":
        self._check(other)
        return ResidueValue(self.value + other.value, self.modulus)

    def __sub__(self, other: "ResidueValue") -> "ResidueValue":
        self._check(other)
        return ResidueValue(self.value - other.value, self.modulus)

    def __mul__(self, other: "ResidueValue") -> "ResidueValue":
        self._check(other)
        return ResidueValue(self.value * other.value, self.modulus)

    def __neg__(self) -> "ResidueValue":
        return ResidueValue(-self.value, self.modulus)

    def is_unit(self) -> bool:
        return math.gcd(self.value, self.modulus) == 1

    def inverse(self) -> "ResidueValue":
        return ResidueValue(pow(self.value, -1, self.modulus), self.modulus)

    def reduce(self, divisor: int) -> "ResidueValue":
        if self.modulus % divisor:
            raise ValueError(f"{divisor} does not divide {self.modulus}")
        return ResidueValue(self.value % divisor, divisor)


def crt_combine(residues: Iterable[ResidueValue]) -> ResidueValue:
    """Combine residues with pairwise-coprime moduli into one residue."""
    value, modulus = 0, 1
    for r in residues:
        if math.gcd(modulus, r.modulus) != 1:
            raise NonCoprimeModuli(f"modulus {r.modulus} shares a factor with {modulus}")
        # value + modulus * t == r.value  (mod r.modulus)
        t = (r.value - value) * pow(modulus, -1, r.modulus) % r.modulus
        value += modulus * t
        modulus *= r.modulus
    return ResidueValue(value, modulus)


# ---------------------------------------------------------------------------
# F_p[x] on plain lists, lowest degree first

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _norm(coeffs: Iterable[int], p: int) -> list[int]:
    return _trim([c % p for c in coeffs])


def _add(a, b, p):
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _sub(a, b, p):
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _divmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    q = [0] * max(len(a) - db, 0)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv % p
        if c:
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return _trim(q), _trim(a[:db] if db else [])


def _monic(a, p):
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, _divmod(a, b, p)[1]
    return _monic(a, p)


def _powmod(base, e, mod, p):
    result = [1]
    base = _divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _divmod(_mul(result, base, p), mod, p)[1]
        e >>= 1
        if e:
            base = _divmod(_mul(base, base, p), mod, p)[1]
    return result


def _deriv(a, p):
    return _trim([(i * a[i]) % p for i in range(1, len(a))])


@dataclass(frozen=True)
class PrimeFieldPoly:
    """A polynomial over F_p, coefficients lowest degree first."""

    coefficients: tuple[int, ...]
    p: int

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(_norm(self.coefficients, self.p)))

    @classmethod
    def from_ints(cls, coeffs: Sequence[int], p: int) -> "PrimeFieldPoly":
        return cls(tuple(coeffs), p)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def __add__(self, other):
        return PrimeFieldPoly(tuple(_add(self.coefficients, other.coefficients, self.p)), self.p)

    def __sub__(self, other):
        return PrimeFieldPoly(tuple(_sub(self.coefficients, other.coefficients, self.p)), self.p)

    def __mul__(self, other):
        return PrimeFieldPoly(tuple(_mul(self.coefficients, other.coefficients, self.p)), self.p)

    def __divmod__(self, other):
        q, r = _divmod(self.coefficients, other.coefficients, self.p)
        return PrimeFieldPoly(tuple(q), self.p), PrimeFieldPoly(tuple(r), self.p)

    def monic(self) -> "PrimeFieldPoly":
        return PrimeFieldPoly(tuple(_monic(list(self.coefficients), self.p)), self.p)

    def gcd(self, other) -> "PrimeFieldPoly":
        return PrimeFieldPoly(tuple(_gcd(self.coefficients, other.coefficients, self.p)), self.p)

    def derivative(self) -> "PrimeFieldPoly":
        return PrimeFieldPoly(tuple(_deriv(self.coefficients, self.p)), self.p)

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc * x + c) % self.p
        return acc


# ---------------------------------------------------------------------------
# factorization

def _squarefree_parts(f: list[int], p: int) -> list[tuple[list[int], int]]:
    """Squarefree decomposition of a monic f: [(g_i, i)] with f = prod g_i^i."""
    out: list[tuple[list[int], int]] = []
    c = _gcd(f, _deriv(f, p), p)
    w = _divmod(f, c, p)[0]
    i = 1
    while len(w) > 1:
        y = _gcd(w, c, p)
        fac = _divmod(w, y, p)[0]
        if len(fac) > 1:
            out.append((_monic(fac, p), i))
        w = y
        c = _divmod(c, y, p)[0]
        i += 1
    if len(c) > 1:
        # c is a p-th power; in F_p the p-th root just takes every p-th coefficient
        root = c[::p]
        out.extend((g, e * p) for g, e in _squarefree_parts(_monic(root, p), p))
    return out


def _distinct_degree(f: list[int], p: int) -> list[tuple[list[int], int]]:
    """Split a squarefree monic f into products of irreducibles of equal degree."""
    out = []
    x = [0, 1]
    h = x
    rest = f
    d = 1
    while len(rest) - 1 >= 2 * d:
        h = _powmod(h, p, rest, p)
        g = _gcd(rest, _sub(h, x, p), p)
        if len(g) > 1:
            out.append((g, d))
            rest = _divmod(rest, g, p)[0]
            h = _divmod(h, rest, p)[1]
        d += 1
    if len(rest) > 1:
        out.append((rest, len(rest) - 1))
    return out


def _equal_degree(f: list[int], d: int, p: int, rng: random.Random) -> list[list[int]]:
    """Cantor-Zassenhaus split of a product of degree-d irreducibles."""
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = _trim([rng.randrange(p) for _ in range(n)])
        if len(a) < 2:
            continue
        if p == 2:
            # trace map a + a^2 + ... + a^(2^(d-1))
            t, cur = list(a), list(a)
            for _ in range(d - 1):
                cur = _divmod(_mul(cur, cur, p), f, p)[1]
                t = _add(t, cur, p)
            b = t
        else:
            b = _sub(_powmod(a, (p**d - 1) // 2, f, p), [1], p)
        g = _gcd(f, b, p)
        if 1 < len(g) < len(f):
            h = _monic(_divmod(f, g, p)[0], p)
            return _equal_degree(g, d, p, rng) + _equal_degree(h, d, p, rng)


def factor(f: PrimeFieldPoly, seed: int = 0) -> list[tuple[PrimeFieldPoly, int]]:
    """Full factorization into monic irreducibles with multiplicities.

    The leading coefficient is dropped. Equal-degree splitting draws from a
    ``random.Random(seed)`` so the output order is reproducible.
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    p = f.p
    rng = random.Random(seed)
    out = []
    for part, mult in _squarefree_parts(_monic(list(f.coefficients), p), p):
        for block, d in _distinct_degree(part, p):
            for irr in _equal_degree(block, d, p, rng):
                out.append((PrimeFieldPoly(tuple(irr), p), mult))
    out.sort(key=lambda t: (t[0].degree, t[0].coefficients))
    return out


def factor_degrees(f: PrimeFieldPoly) -> tuple[int, ...]:
    """Degrees of the irreducible factors of f, with multiplicity, ascending."""
    if f.is_zero():
        raise ZeroPolynomial("factor_degrees of the zero polynomial")
    p = f.p
    degs: list[int] = []
    for part, mult in _squarefree_parts(_monic(list(f.coefficients), p), p):
        for block, d in _distinct_degree(part, p):
            degs.extend([d] * (((len(block) - 1) // d) * mult))
    return tuple(sorted(degs))


def is_squarefree(f: PrimeFieldPoly) -> bool:
    if f.is_zero():
        raise ZeroPolynomial("zero polynomial")
    return f.gcd(f.derivative()).degree == 0


def is_irreducible(f: PrimeFieldPoly) -> bool:
    if f.is_zero() or f.degree < 1:
        raise ConstantPolynomial("irreducibility is undefined for constants")
    return factor_degrees(f) == (f.degree,)


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, r: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree r over F_p.

    Candidates are ordered by the coefficient tuple (c_0, ..., c_{r-1}) read
    as a base-p integer, starting from 0.
    """
    for code in range(p**r):
        low = [(code // p**i) % p for i in range(r)]
        cand = PrimeFieldPoly(tuple(low) + (1,), p)
        if r == 1 or (low[0] != 0 and is_irreducible(cand)):
            return cand.coefficients
    raise AssertionError("unreachable: irreducibles exist in every degree")


# ---------------------------------------------------------------------------
# integer polynomials (lowest degree first)

def _bareiss_det(mat: list[list[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    m = [row[:] for row in mat]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def int_resultant(f: Sequence[int], g: Sequence[int]) -> int:
    """Resultant of two integer polynomials via the Sylvester determinant."""
    f = _trim(list(f))
    g = _trim(list(g))
    m, n = len(f) - 1, len(g) - 1
    if m < 0 or n < 0:
        return 0
    if m == 0:
        return f[0] ** n
    if n == 0:
        return g[0] ** m
    size = m + n
    rows = []
    fh, gh = f[::-1], g[::-1]
    for i in range(n):
        rows.append([0] * i + fh + [0] * (size - i - m - 1))
    for i in range(m):
        rows.append([0] * i + gh + [0] * (size - i - n - 1))
    return _bareiss_det(rows)


def int_discriminant(f: Sequence[int]) -> int:
    f = _trim(list(f))
    n = len(f) - 1
    if n < 1:
        raise ConstantPolynomial("discriminant of a constant")
    if n == 1:
        return 1
    df = [i * f[i] for i in range(1, n + 1)]
    res = int_resultant(f, df)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    q, r = divmod(sign * res, f[-1])
    assert r == 0
    return q


def int_poly_eval(f: Sequence[int], x):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def int_poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


# ---------------------------------------------------------------------------
# F_{p^r}, vectorized

class FiniteField:
    """F_{p^r} = F_p[t]/(m(t)) with m the lexicographically smallest irreducible.

    Elements are length-r coordinate vectors (numpy ``int64``); an element's
    integer key is sum(c_i p^i). All operations broadcast over leading axes.
    """

    MAX_SIZE = 10**7

    def __init__(self, p: int, r: int = 1):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if r < 1:
            raise ValueError("degree must be positive")
        self.p, self.r = p, r
        self.q = p**r
        if self.q > self.MAX_SIZE:
            raise ValueError(f"F_{p}^{r} exceeds {self.MAX_SIZE} elements")
        self.modulus = smallest_irreducible(p, r)
        self._weights = np.array([p**i for i in range(r)], dtype=np.int64)
        self._chi: np.ndarray | None = None

    def elements(self) -> np.ndarray:
        keys = np.arange(self.q, dtype=np.int64)
        return self.from_keys(keys)

    def from_keys(self, keys: np.ndarray) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.int64)
        return (keys[..., None] // self._weights) % self.p

    def keys(self, a: np.ndarray) -> np.ndarray:
        return a @ self._weights

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        p, r = self.p, self.r
        if r == 1:
            return a * b % p
        shape = np.broadcast_shapes(a.shape, b.shape)
        prod = np.zeros(shape[:-1] + (2 * r - 1,), dtype=np.int64)
        for i in range(r):
            prod[..., i:i + r] += a[..., i:i + 1] * b
        prod %= p
        m = self.modulus
        for k in range(2 * r - 2, r - 1, -1):
            c = prod[..., k:k + 1]
            # t^r = -sum m_j t^j
            prod[..., k - r:k] -= c * np.array(m[:r], dtype=np.int64)
            prod[..., k] = 0
            prod %= p
        return prod[..., :r]

    def power(self, a: np.ndarray, e: int) -> np.ndarray:
        result = np.zeros_like(a)
        result[..., 0] = 1
        base = a.copy()
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def chi_table(self) -> np.ndarray:
        """Quadratic character indexed by key: 0 at zero, +1 squares, -1 otherwise."""
        if self._chi is None:
            if self.p == 2:
                raise ValueError("quadratic character table needs odd characteristic")
            chi = -np.ones(self.q, dtype=np.int8)
            elts = self.elements()
            chi[self.keys(self.mul(elts, elts))] = 1
            chi[0] = 0
            self._chi = chi
        return self._chi

    def embed_scalar(self, c: int) -> np.ndarray:
        v = np.zeros(self.r, dtype=np.int64)
        v[0] = c % self.p
        return v

