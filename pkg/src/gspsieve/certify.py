"""Explicit surjectivity certificates for genus-2 Jacobians over Q, and heights.

Everything that would be astronomically large is kept as a natural log.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import __version__
from .curves import HyperellipticCurve, good_reduction_check, weil_polynomial
from .errors import NoD4PrimeFound, NotD4, PrecisionFailure, Reducible, ZeroPoint
from .galois import exceptional_prime_norm, weil_galois_is_D4
from .modarith import primes_up_to


def alpha(g: int) -> int:
    """2^10 g^3."""
    if g < 1:
        raise ValueError("g must be positive")
    return 2**10 * g**3


def log_b(d: float, g: int, h: float) -> float:
    """ln b(d, g, h) where b = ((14g)^(64 g^2) d max(h, ln d, 1)^2)^alpha(g)."""
    if d < 1 or g < 1:
        raise ValueError("need d >= 1 and g >= 1")
    inner = 64 * g * g * math.log(14 * g) + math.log(d) + 2 * math.log(max(h, math.log(d), 1.0))
    return alpha(g) * inner


def height_naive(point: Sequence) -> int:
    """Multiplicative height of a point of projective space over Q.

    Coordinates may be ints, Fractions or strings like "3/4".
    """
    coords = [Fraction(c) for c in point]
    if not coords or all(c == 0 for c in coords):
        raise ZeroPoint("the zero vector is not a projective point")
    den = math.lcm(*(c.denominator for c in coords))
    ints = [int(c * den) for c in coords]
    g = math.gcd(*ints)
    return max(abs(x) // g for x in ints)


def faltings_proxy(Ht: float, c0: float = 1.0, d0: float = 0.0) -> float:
    """c0 ln Ht + d0, standing in for an upper bound on the Faltings height."""
    if Ht < 1 or c0 < 0:
        raise ValueError("need Ht >= 1 and c0 >= 0")
    return c0 * math.log(Ht) + d0


@dataclass(frozen=True)
class SurjectivityCertificate:
    curve: tuple[int, ...]
    v: int
    q_v: int
    label: str
    weil_coefficients: tuple[int, ...]
    h_bound: float
    ln_b: float
    ln_threshold: float
    assumptions: dict = field(default_factory=dict)
    exceptional_primes: tuple[int, ...] | None = None

    @property
    def statement(self) -> str:
        return (
            "rho_{l^infty} surjects onto GSp_4(Z_l) for every prime l with "
            f"ln l > {self.ln_threshold:.17g} (K = Q, so every l is unramified), "
            "assuming End(A) = Z"
        )

    def to_document(self) -> dict:
        return {
            "kind": "surjectivity-certificate",
            "curve": list(self.curve),
            "v": self.v,
            "q_v": self.q_v,
            "label": self.label,
            "weil_polynomial": list(self.weil_coefficients),
            "h_bound": self.h_bound,
            "ln_b": self.ln_b,
            "ln_threshold": self.ln_threshold,
            "assumptions": dict(self.assumptions),
            "exceptional_primes": None if self.exceptional_primes is None else list(self.exceptional_primes),
            "statement": self.statement,
            "tool_version": __version__,
        }


def certify_surface(curve: HyperellipticCurve, h_bound: float | None = None,
                    prime_search_limit: int = 200, c0: float = 1.0, d0: float = 0.0,
                    with_exceptional: bool = True) -> SurjectivityCertificate:
    """Scan good primes for a D4 Frobenius quartic and emit the certificate.

    With K = Q the degree parameter is d = 2 [K:Q] = 2 and the bound is
    evaluated at (2, 4, 2h). When ``h_bound`` is None the Faltings-height proxy
    of the naive height of the coefficient vector is used.
    """
    if curve.genus != 2:
        raise ValueError("certificates are for genus-2 curves")
    if h_bound is None:
        h = faltings_proxy(height_naive(curve.f_coefficients), c0, d0)
        source = f"faltings_proxy(c0={c0!r}, d0={d0!r})"
    else:
        if h_bound <= 0:
            raise ValueError("h_bound must be positive")
        h, source = float(h_bound), "supplied"
    for v in primes_up_to(prime_search_limit):
        if not good_reduction_check(curve, v):
            continue
        w = weil_polynomial(curve, v)
        try:
            is_d4, lab = weil_galois_is_D4(w)
        except Reducible:
            continue
        if not is_d4:
            continue
        ln_b = log_b(2, 4, 2 * h)
        ln_threshold = max(ln_b / 4, 8 * math.log(2 * v))
        exceptional = None
        if with_exceptional:
            try:
                exceptional = exceptional_prime_norm(w).prime_divisors
            except (PrecisionFailure, NotD4):
                exceptional = None
        return SurjectivityCertificate(
            curve=curve.f_coefficients,
            v=v,
            q_v=v,
            label=lab.label,
            weil_coefficients=w.coefficients,
            h_bound=h,
            ln_b=ln_b,
            ln_threshold=ln_threshold,
            assumptions={"End_Kbar(A) = Z": "asserted", "h_bound": source},
            exceptional_primes=exceptional,
        )
    raise NoD4PrimeFound(prime_search_limit)
