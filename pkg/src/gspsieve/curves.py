"""Hyperelliptic curves y^2 = f(x) over Q, point counts, Frobenius polynomials.

Coefficient lists are lowest degree first throughout, matching the curve
line format ``a0 a1 ... ad``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .errors import BadReduction, FieldTooLarge, SingularModel
from .modarith import FiniteField, int_discriminant, is_prime

MAX_FIELD = 10**7
MAX_R = 3
_CHUNK = 1 << 18
_KEEP_ENTRIES = 1 << 21


@dataclass(frozen=True)
class HyperellipticCurve:
    """The affine model y^2 = f(x); the genus is floor((deg f - 1) / 2)."""

    f_coefficients: tuple[int, ...]
    discriminant: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        coeffs = [int(c) for c in self.f_coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 4:
            raise SingularModel("need deg f >= 3 for positive genus")
        object.__setattr__(self, "f_coefficients", tuple(coeffs))
        disc = int_discriminant(coeffs)
        if disc == 0:
            raise SingularModel(f"f = {coeffs} has a repeated root")
        object.__setattr__(self, "discriminant", disc)

    @classmethod
    def from_line(cls, line: str) -> "HyperellipticCurve":
        return cls(tuple(int(tok) for tok in line.split()))

    def to_line(self) -> str:
        return " ".join(map(str, self.f_coefficients))

    @property
    def degree(self) -> int:
        return len(self.f_coefficients) - 1

    @property
    def genus(self) -> int:
        return (self.degree - 1) // 2

    @property
    def leading_coefficient(self) -> int:
        return self.f_coefficients[-1]


def good_reduction_check(curve: HyperellipticCurve, p: int) -> bool:
    """True iff p does not divide 2 * disc(f) * lc(f)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return (2 * curve.discriminant * curve.leading_coefficient) % p != 0


def _check_field(p: int, r: int) -> None:
    if r < 1:
        raise ValueError("r must be positive")
    if r > MAX_R or p**r > MAX_FIELD:
        raise FieldTooLarge(f"F_{p}^{r} is beyond the counting budget (r <= {MAX_R}, q <= {MAX_FIELD})")


class PointCounter:
    """Batched point counts over one field F_{p^r} for curves of bounded degree.

    f(x) for every x and many curves is a single tensor contraction against
    the table of powers x^i, followed by a quadratic-character lookup.
    """

    def __init__(self, p: int, r: int, max_degree: int):
        _check_field(p, r)
        if p == 2:
            raise BadReduction("characteristic 2 is always bad for y^2 = f(x)")
        self.field = FiniteField(p, r)
        self.p, self.r, self.q = p, r, p**r
        self.max_degree = max_degree
        self.chi = self.field.chi_table()
        self._powers: list[np.ndarray] | None = None

    def _chunk_powers(self, start: int) -> np.ndarray:
        """(d+1, chunk, r) table of x^i for field elements with keys in one chunk."""
        F = self.field
        x = F.from_keys(np.arange(start, min(start + _CHUNK, self.q), dtype=np.int64))
        pw = np.empty((self.max_degree + 1,) + x.shape, dtype=np.int64)
        pw[0] = 0
        pw[0][..., 0] = 1
        for i in range(1, self.max_degree + 1):
            pw[i] = F.mul(pw[i - 1], x)
        return pw

    def _power_chunks(self):
        # small tables are kept; large fields are streamed chunk by chunk
        if self._powers is not None:
            yield from self._powers
            return
        starts = range(0, self.q, _CHUNK)
        if self.q * self.r * (self.max_degree + 1) <= _KEEP_ENTRIES:
            self._powers = [self._chunk_powers(s) for s in starts]
            yield from self._powers
        else:
            for s in starts:
                yield self._chunk_powers(s)

    def count_many(self, coeffs: np.ndarray) -> np.ndarray:
        """Projective point counts for rows of integer coefficients (lowest first).

        Each row's true degree is its last nonzero entry mod p; callers are
        responsible for good reduction.
        """
        A = np.atleast_2d(np.asarray(coeffs, dtype=np.int64)) % self.p
        if A.shape[1] > self.max_degree + 1:
            raise ValueError("coefficient rows longer than max_degree + 1")
        A = np.pad(A, ((0, 0), (0, self.max_degree + 1 - A.shape[1])))
        weights = self.field._weights
        total = np.zeros(A.shape[0], dtype=np.int64)
        batch = max(1, (1 << 22) // (min(self.q, _CHUNK) * self.r))
        for pw in self._power_chunks():
            for s in range(0, A.shape[0], batch):
                vals = np.tensordot(A[s:s + batch], pw, axes=1) % self.p
                total[s:s + batch] += self.chi[vals @ weights].sum(axis=1, dtype=np.int64)
        degs = np.array([np.flatnonzero(row).max() if row.any() else -1 for row in A])
        lcs = A[np.arange(A.shape[0]), np.maximum(degs, 0)]
        # a scalar's key is its value, so chi[lc] is its character in F_q
        infinity = np.where(degs % 2 == 1, 1, 1 + self.chi[lcs].astype(np.int64))
        return self.q + total + infinity


@functools.lru_cache(maxsize=128)
def point_counter(p: int, r: int, max_degree: int) -> PointCounter:
    return PointCounter(p, r, max_degree)


def count_points(curve: HyperellipticCurve, p: int, r: int = 1) -> int:
    """Points of the smooth projective model over F_{p^r}."""
    if not good_reduction_check(curve, p):
        raise BadReduction(f"p = {p} is a bad prime for {curve.to_line()}")
    _check_field(p, r)
    counter = point_counter(p, r, max(curve.degree, 6))
    return int(counter.count_many(np.array([curve.f_coefficients]))[0])


# ---------------------------------------------------------------------------
# Frobenius characteristic polynomial

def elementary_from_counts(counts: Sequence[int], q: int, g: int) -> list[int]:
    """e_0..e_2g of the Frobenius eigenvalues from N_1..N_g.

    s_r = q^r + 1 - N_r are the power sums; Newton gives
    k e_k = sum_{i=1..k} (-1)^(i-1) e_{k-i} s_i, and the functional equation
    fills in e_{2g-k} = q^(g-k) e_k.
    """
    if len(counts) < g:
        raise ValueError(f"need {g} point counts")
    s = [None] + [q**r + 1 - counts[r - 1] for r in range(1, g + 1)]
    e = [1] + [0] * (2 * g)
    for k in range(1, g + 1):
        acc = sum((-1) ** (i - 1) * e[k - i] * s[i] for i in range(1, k + 1))
        if acc % k:
            raise ValueError("point counts are not consistent with a Weil polynomial")
        e[k] = acc // k
    for k in range(g):
        e[2 * g - k] = q ** (g - k) * e[k]
    return e


def power_sums(e: Sequence[int], n: int) -> list[int]:
    """s_1..s_n from elementary symmetric e_0..e_d (e_k = 0 beyond d)."""
    d = len(e) - 1
    ek = lambda k: e[k] if k <= d else 0  # noqa: E731
    s = [0] * (n + 1)
    for k in range(1, n + 1):
        acc = sum((-1) ** (i - 1) * ek(i) * s[k - i] for i in range(1, k))
        s[k] = acc + (-1) ** (k - 1) * k * ek(k)
    return s[1:]


@dataclass(frozen=True)
class WeilPolynomial:
    """Monic degree-2g integer polynomial, coefficients lowest degree first."""

    coefficients: tuple[int, ...]
    q: int
    g: int

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))
        if len(self.coefficients) != 2 * self.g + 1 or self.coefficients[-1] != 1:
            raise ValueError("expected a monic polynomial of degree 2g")

    @classmethod
    def from_counts(cls, counts: Sequence[int], q: int, g: int) -> "WeilPolynomial":
        e = elementary_from_counts(counts, q, g)
        n = 2 * g
        return cls(tuple((-1) ** (n - i) * e[n - i] for i in range(n + 1)), q, g)

    @property
    def degree(self) -> int:
        return 2 * self.g

    def elementary(self) -> list[int]:
        n = self.degree
        return [(-1) ** k * self.coefficients[n - k] for k in range(n + 1)]

    def satisfies_functional_equation(self) -> bool:
        # x^2g f(q/x) / q^g = f(x)  <=>  c_{2g-i} q^(g-i) = c_i  for every i
        c, q, g = self.coefficients, self.q, self.g
        return all(c[2 * g - i] * q**g == c[i] * q**i for i in range(2 * g + 1))

    def roots(self, dps: int = 40) -> list:
        with mpmath.workdps(dps):
            return mpmath.polyroots(list(reversed(self.coefficients)), maxsteps=200, extraprec=2 * dps)

    def max_root_deviation(self) -> float:
        """max | |alpha| - sqrt(q) | over complex roots."""
        with mpmath.workdps(40):
            rq = mpmath.sqrt(self.q)
            return float(max(abs(abs(z) - rq) for z in self.roots()))

    def predicted_count(self, r: int) -> int:
        return self.q**r + 1 - power_sums(self.elementary(), r)[-1]

    def reduce(self, p: int) -> tuple[int, ...]:
        return tuple(c % p for c in self.coefficients)

    def __str__(self) -> str:
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coefficients[i]
            if c:
                terms.append(f"{c}*x^{i}" if i else str(c))
        return " + ".join(terms)


def weil_polynomial(curve: HyperellipticCurve, p: int, allow_genus3: bool = False) -> WeilPolynomial:
    """Frobenius characteristic polynomial at a good prime, from N_1..N_g."""
    g = curve.genus
    if g > 3 or (g == 3 and not allow_genus3):
        raise FieldTooLarge(f"genus {g} is beyond the default cap of 2")
    if not good_reduction_check(curve, p):
        raise BadReduction(f"p = {p} is a bad prime for {curve.to_line()}")
    counts = [count_points(curve, p, r) for r in range(1, g + 1)]
    return WeilPolynomial.from_counts(counts, p, g)


def weil_polynomials_mod_p(coeff_rows: np.ndarray, p: int, g: int = 2) -> list[WeilPolynomial]:
    """Batched Frobenius polynomials for many reductions mod the same prime.

    Rows must already have good reduction at p.
    """
    counts = [point_counter(p, r, 2 * g + 2).count_many(coeff_rows) for r in range(1, g + 1)]
    return [WeilPolynomial.from_counts([int(c[i]) for c in counts], p, g) for i in range(len(coeff_rows))]
