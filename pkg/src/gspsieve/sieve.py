"""Large-sieve arithmetic, Frobenius equidistribution sampling, density scans.

A family is written like a curve line with ``*`` for free coefficients:
``"* * 0 0 0 1"`` is y^2 = x^5 + a1 x + a0 with u = (a0, a1).
"""

from __future__ import annotations

import csv
import functools
import io
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import __version__
from .curves import WeilPolynomial, weil_polynomials_mod_p
from .errors import EmptyFamily, Reducible
from .galois import reduction_degrees, splitting_patterns, weil_galois_is_D4
from .modarith import PrimeFieldPoly, factor_degrees, int_discriminant, is_prime, is_squarefree, primes_up_to

SCHEMA_VERSION = 1
WITNESS_POLICIES = ("irreducible-plus-second-pattern/v1", "irreducible-plus-squarefree-second-pattern/v1")
WITNESS_POLICY = WITNESS_POLICIES[0]


# ---------------------------------------------------------------------------
# large sieve

@dataclass(frozen=True)
class SieveParams:
    B: float
    Q: float
    r: int = 1
    degree: int = 1
    omega: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.B < 1 or self.Q <= 0 or self.r < 1 or self.degree != 1:
            raise ValueError("need B >= 1, Q > 0, r >= 1 and degree 1 (K = Q)")
        for p, w in self.omega.items():
            if not is_prime(p):
                raise ValueError(f"omega key {p} is not prime")
            if not 0 <= w < 1:
                raise ValueError(f"omega_{p} = {w} is outside [0, 1)")

    @classmethod
    def constant_omega(cls, B: float, Q: float, value: float, r: int = 1) -> "SieveParams":
        return cls(B, Q, r, 1, {p: value for p in primes_up_to(int(Q))})


def large_sieve_L(params: SieveParams) -> float:
    """Sum over squarefree a <= Q of prod_{p | a} omega_p / (1 - omega_p)."""
    Q = int(math.floor(params.Q))
    weights = []
    for p in primes_up_to(Q):
        w = params.omega.get(p, 0)
        if w:
            weights.append((p, Fraction(w) / (1 - Fraction(w))))
    total = Fraction(1)

    # depth-first over increasing prime sequences, i.e. over squarefree a
    def walk(start: int, a: int, term: Fraction):
        nonlocal total
        for i in range(start, len(weights)):
            p, w = weights[i]
            if a * p > Q:
                break
            total += term * w
            walk(i + 1, a * p, term * w)

    walk(0, 1, Fraction(1))
    return float(total)


def sieve_bound(params: SieveParams) -> float:
    """(B^(degree r) + Q^(2r)) / L(Q), up to the sieve's absolute constant."""
    L = large_sieve_L(params)
    return (params.B ** (params.degree * params.r) + params.Q ** (2 * params.r)) / L


# ---------------------------------------------------------------------------
# families

@dataclass(frozen=True)
class FamilySpec:
    """Coefficients a0..ad, each an integer or None (free)."""

    slots: tuple[int | None, ...]

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        slots = tuple(None if tok == "*" else int(tok) for tok in text.split())
        if len(slots) < 4:
            raise ValueError("family needs degree >= 3")
        return cls(slots)

    def __str__(self) -> str:
        return " ".join("*" if s is None else str(s) for s in self.slots)

    @property
    def free(self) -> list[int]:
        return [i for i, s in enumerate(self.slots) if s is None]

    @property
    def genus(self) -> int:
        return (len(self.slots) - 2) // 2

    def member(self, u: Sequence[int]) -> tuple[int, ...]:
        it = iter(u)
        return tuple(next(it) if s is None else s for s in self.slots)

    def members_matrix(self, U: np.ndarray) -> np.ndarray:
        M = np.zeros((U.shape[0], len(self.slots)), dtype=np.int64)
        fixed = [(i, s) for i, s in enumerate(self.slots) if s is not None]
        for i, s in fixed:
            M[:, i] = s
        M[:, self.free] = U
        return M


def box_parameters(family: FamilySpec, B: int, budget: int, seed: int) -> np.ndarray:
    """Free-parameter vectors u with ||u|| <= B, lexicographic, sampled past budget.

    ||u|| is the height of the projective point (1 : u), which for integer u
    is max(1, max |u_i|).
    """
    k = len(family.free)
    side = 2 * B + 1
    total = side**k
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if total <= budget:
        idx = np.arange(total, dtype=np.int64)
    else:
        idx = np.array(sorted(random.Random(seed).sample(range(total), budget)), dtype=np.int64)
    digits = (idx[:, None] // side ** np.arange(k - 1, -1, -1, dtype=np.int64)) % side
    return digits - B


def _squarefree_full_degree(row: tuple[int, ...], p: int) -> bool:
    if row[-1] % p == 0:
        return False
    return is_squarefree(PrimeFieldPoly.from_ints(row, p))


# ---------------------------------------------------------------------------
# equidistribution

def _parse_predicate(predicate: str) -> Callable[[WeilPolynomial], bool]:
    if predicate == "true":
        return lambda w: True
    if predicate == "false":
        return lambda w: False
    if predicate == "D4":
        return _is_d4
    if predicate.startswith("pattern:"):
        body = predicate[len("pattern:"):]
        pat_text, _, ell_text = body.partition("@")
        pattern = tuple(sorted(int(x) for x in pat_text.split("+")))
        ell = int(ell_text)
        return lambda w: reduction_degrees(list(w.coefficients), ell) == pattern
    raise ValueError(f"unknown predicate {predicate!r}")


@functools.lru_cache(maxsize=1 << 16)
def _is_d4_coeffs(coeffs: tuple[int, ...], q: int) -> bool:
    try:
        return weil_galois_is_D4(WeilPolynomial(coeffs, q, 2))[0]
    except Reducible:
        return False


def _is_d4(w: WeilPolynomial) -> bool:
    return _is_d4_coeffs(w.coefficients, w.q)


def equidistribution_sample(family: FamilySpec | str, p: int, predicate: str,
                            samples: int, seed: int) -> float:
    """Fraction of uniformly drawn members over F_p whose Frobenius polynomial
    satisfies the predicate.

    Free coefficients are uniform in F_p; draws whose reduction is singular or
    drops degree are redrawn. Predicates: ``true``, ``false``, ``D4``, or
    ``pattern:2+1+1@3`` (factor degrees of f_v mod 3).
    """
    if isinstance(family, str):
        family = FamilySpec.parse(family)
    if samples < 1:
        raise ValueError("samples must be positive")
    if family.genus != 2:
        raise ValueError("sampling is for genus-2 families")
    test = _parse_predicate(predicate)
    rng = random.Random(seed)
    rows = []
    while len(rows) < samples:
        u = [rng.randrange(p) for _ in family.free]
        row = tuple(c % p for c in family.member(u))
        if _squarefree_full_degree(row, p):
            rows.append(row)
    uniq = sorted(set(rows))
    ws = dict(zip(uniq, weil_polynomials_mod_p(np.array(uniq, dtype=np.int64), p)))
    hits = sum(1 for row in rows if test(ws[row]))
    return hits / samples


def bernoulli_spread_limit(f: float, samples: int) -> float:
    """Allowed max - min across seeds: twice the 3-sigma Bernoulli half-width."""
    return 3 * math.sqrt(f * (1 - f) / samples) * 2


# ---------------------------------------------------------------------------
# density scan

@dataclass
class LevelCounts:
    scanned: int = 0
    witnessed: int = 0
    unknown: int = 0

    @property
    def fraction(self) -> float:
        return self.witnessed / self.scanned if self.scanned else 0.0


@dataclass
class DensityReport:
    family: str
    B: int
    ells: tuple[int, ...]
    P_max: int
    seed: int
    members_in_box: int
    excluded_singular: int
    per_ell: dict[int, LevelCounts]
    witnessed_all: int
    rows: list[tuple[tuple[int, ...], int, str, int | None, int | None]] = field(repr=False, default_factory=list)
    policy: str = WITNESS_POLICY

    @property
    def scanned(self) -> int:
        return self.per_ell[self.ells[0]].scanned if self.ells else 0

    @property
    def witnessed_fraction(self) -> float:
        """Members witnessed maximal at every l in the set."""
        return self.witnessed_all / self.scanned if self.scanned else 0.0

    def to_document(self) -> dict:
        return {
            "kind": "density-report",
            "schema_version": SCHEMA_VERSION,
            "family": self.family,
            "B": self.B,
            "ells": list(self.ells),
            "P_max": self.P_max,
            "seed": self.seed,
            "witness_policy": self.policy,
            "members_in_box": self.members_in_box,
            "excluded_singular": self.excluded_singular,
            "scanned": self.scanned,
            "per_ell": {
                str(ell): {
                    "scanned": c.scanned,
                    "witnessed_maximal": c.witnessed,
                    "unknown": c.unknown,
                    "witnessed_fraction": c.fraction,
                }
                for ell, c in self.per_ell.items()
            },
            "witnessed_all": self.witnessed_all,
            "witnessed_fraction": self.witnessed_fraction,
            "tool_version": __version__,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["schema_version", "u", "ell", "status", "p_irreducible", "p_second_pattern"])
        for u, ell, status, p1, p2 in self.rows:
            w.writerow([SCHEMA_VERSION, " ".join(map(str, u)), ell, status,
                        "" if p1 is None else p1, "" if p2 is None else p2])
        return buf.getvalue()


def _frobenius_table(args) -> tuple[int, dict]:
    """Weil polynomials for every distinct good residue row mod p."""
    p, rows = args
    good = [r for r in rows if _squarefree_full_degree(r, p)]
    if not good:
        return p, {}
    ws = weil_polynomials_mod_p(np.array(good, dtype=np.int64), p)
    return p, {r: w.coefficients for r, w in zip(good, ws)}


def density_scan(family: FamilySpec | str, B: int, ells: Iterable[int], P_max: int, seed: int,
                 budget: int = 50_000, jobs: int = 1, policy: str = WITNESS_POLICY) -> DensityReport:
    """Witness-based count of members whose mod-l image is certifiably large.

    A member counts as witnessed-maximal at l when, over good primes
    p <= P_max with p != l (ascending), one f_v is irreducible mod l and
    another f_v mod l has factor degrees 2+1+1 (for genus 2 the patterns
    collapse to these two). The stricter policy also demands that the second
    reduction be squarefree. Anything else is "unknown".
    """
    if policy not in WITNESS_POLICIES:
        raise ValueError(f"unknown witness policy {policy!r}")
    strict = policy == WITNESS_POLICIES[1]
    if isinstance(family, str):
        family = FamilySpec.parse(family)
    ells = tuple(sorted(set(int(x) for x in ells)))
    if not ells or any(ell == 2 or not is_prime(ell) for ell in ells):
        raise ValueError("need a nonempty set of odd primes")
    if family.genus != 2:
        raise ValueError("density scans support genus 2")
    patterns = splitting_patterns(family.genus)
    irreducible = (2 * family.genus,)
    second = [pat for pat in patterns if pat != irreducible]

    U = box_parameters(family, B, budget, seed)
    M = family.members_matrix(U)
    keep = []
    excluded = 0
    for i, row in enumerate(M.tolist()):
        if row[-1] == 0 or int_discriminant(row) == 0:
            excluded += 1
        else:
            keep.append(i)
    if not keep:
        raise EmptyFamily(f"no smooth members with ||u|| <= {B}")
    U, M = U[keep], M[keep]
    members = [tuple(r) for r in M.tolist()]
    discs = [2 * int_discriminant(r) * r[-1] for r in members]

    primes = [p for p in primes_up_to(P_max) if p != 2]
    tasks = [(p, sorted({tuple(c % p for c in r) for r in members})) for p in primes]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            tables = dict(ex.map(_frobenius_table, tasks))
    else:
        tables = dict(map(_frobenius_table, tasks))

    degree_cache: dict[tuple, tuple | None] = {}

    def degrees(coeffs, ell):
        key = (tuple(c % ell for c in coeffs), ell)
        if key not in degree_cache:
            if strict:
                degree_cache[key] = reduction_degrees(list(key[0]), ell)
            else:
                degree_cache[key] = factor_degrees(PrimeFieldPoly.from_ints(key[0], ell))
        return degree_cache[key]

    per_ell = {ell: LevelCounts() for ell in ells}
    rows = []
    witnessed_all = 0
    for u, r, disc in zip(U.tolist(), members, discs):
        all_ok = True
        for ell in ells:
            p_irr = p_sec = None
            for p in primes:
                if p == ell or disc % p == 0:
                    continue
                w = tables[p][tuple(c % p for c in r)]
                degs = degrees(w, ell)
                if p_irr is None and degs == irreducible:
                    p_irr = p
                elif p_sec is None and degs in second:
                    p_sec = p
                if p_irr is not None and p_sec is not None:
                    break
            ok = p_irr is not None and p_sec is not None
            c = per_ell[ell]
            c.scanned += 1
            if ok:
                c.witnessed += 1
            else:
                c.unknown += 1
                all_ok = False
            rows.append((tuple(u), ell, "witnessed-maximal" if ok else "unknown", p_irr, p_sec))
        witnessed_all += all_ok
    return DensityReport(
        family=str(family), B=B, ells=ells, P_max=P_max, seed=seed,
        members_in_box=len(keep) + excluded, excluded_singular=excluded,
        per_ell=per_ell, witnessed_all=witnessed_all, rows=rows, policy=policy,
    )
