"""GSp_{2g} / Sp_{2g} over Z/mZ and the Lie algebra sp_{2g}.

Matrices are numpy arrays. Entries stay in ``int64`` while the modulus is
below 2**30 (products of two residues plus a 2g-term sum cannot overflow);
larger moduli fall back to Python integers via ``dtype=object``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NotADivisor, NotInvertible, NotSymplectic, UnsupportedModulus
from .modarith import ResidueValue, crt_combine, is_prime, trial_factor

_INT64_SAFE = 2**30


def _dtype(modulus: int):
    return np.int64 if modulus < _INT64_SAFE else object


def as_matrix(entries, modulus: int) -> np.ndarray:
    a = np.array(entries, dtype=object)
    a = a % modulus
    return a.astype(_dtype(modulus))


def matmul_mod(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    return (a @ b) % modulus


def standard_form(g: int) -> np.ndarray:
    """Omega_{2g} = [[0, I_g], [-I_g, 0]] as an integer matrix."""
    if g < 1:
        raise ValueError("g must be positive")
    om = np.zeros((2 * g, 2 * g), dtype=np.int64)
    om[:g, g:] = np.eye(g, dtype=np.int64)
    om[g:, :g] = -np.eye(g, dtype=np.int64)
    return om


def _half(n: int) -> int:
    if n % 2:
        raise ValueError("matrix size must be even")
    return n // 2


def multiplier(S, modulus: int) -> int:
    """The unit lambda with S^T Omega S = lambda Omega mod ``modulus``.

    Read off the (0, g) entry, then verify the whole identity.
    """
    S = as_matrix(S, modulus)
    g = _half(S.shape[0])
    om = standard_form(g).astype(S.dtype)
    X = matmul_mod(matmul_mod(S.T, om, modulus), S, modulus)
    lam = int(X[0, g]) % modulus
    if math.gcd(lam, modulus) != 1 and modulus > 1:
        raise NotSymplectic(f"multiplier candidate {lam} is not a unit mod {modulus}")
    if not np.array_equal(X % modulus, (lam * om) % modulus):
        raise NotSymplectic("S^T Omega S is not a scalar multiple of Omega")
    return lam


def det_mod(S, modulus: int) -> int:
    """Determinant of an integer matrix reduced mod ``modulus`` (exact Bareiss)."""
    from .modarith import _bareiss_det

    rows = [[int(x) for x in row] for row in np.asarray(S)]
    return _bareiss_det(rows) % modulus


@dataclass(frozen=True)
class SympMatrix:
    """A matrix in GSp_{2g}(Z/mZ) together with its multiplier."""

    entries: tuple[tuple[int, ...], ...]
    modulus: int
    multiplier: int

    @classmethod
    def from_matrix(cls, S, modulus: int) -> "SympMatrix":
        arr = as_matrix(S, modulus)
        lam = multiplier(arr, modulus)
        return cls(tuple(tuple(int(x) for x in row) for row in arr), modulus, lam)

    @property
    def g(self) -> int:
        return len(self.entries) // 2

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=_dtype(self.modulus))

    def __matmul__(self, other: "SympMatrix") -> "SympMatrix":
        if other.modulus != self.modulus:
            raise ValueError("moduli differ")
        prod = matmul_mod(self.array, other.array, self.modulus)
        return SympMatrix(tuple(tuple(int(x) for x in row) for row in prod), self.modulus,
                          self.multiplier * other.multiplier % self.modulus)

    def inverse(self) -> "SympMatrix":
        # S^{-1} = -lambda^{-1} Omega S^T Omega
        m = self.modulus
        om = standard_form(self.g).astype(_dtype(m))
        inv_lam = pow(self.multiplier, -1, m) if m > 1 else 0
        inv = (-inv_lam * matmul_mod(matmul_mod(om, self.array.T, m), om, m)) % m
        return SympMatrix(tuple(tuple(int(x) for x in row) for row in inv), m, inv_lam)

    def is_identity(self) -> bool:
        n = len(self.entries)
        return all(self.entries[i][j] == (1 % self.modulus if i == j else 0)
                   for i in range(n) for j in range(n))

    def det(self) -> int:
        return det_mod(self.entries, self.modulus)


def identity(g: int, modulus: int) -> SympMatrix:
    return SympMatrix.from_matrix(np.eye(2 * g, dtype=np.int64), modulus)


def reduce_mod(S: SympMatrix, new_modulus: int) -> SympMatrix:
    if new_modulus < 1 or S.modulus % new_modulus:
        raise NotADivisor(f"{new_modulus} does not divide {S.modulus}")
    entries = tuple(tuple(x % new_modulus for x in row) for row in S.entries)
    return SympMatrix(entries, new_modulus, S.multiplier % new_modulus)


def group_order(g: int, ell: int, which: str = "Sp") -> int:
    """|Sp_{2g}(F_l)| = l^{g^2} prod_{i<=g} (l^{2i} - 1); GSp adds a factor l - 1."""
    if g < 1 or not is_prime(ell):
        raise ValueError("need g >= 1 and a prime l")
    order = ell ** (g * g)
    for i in range(1, g + 1):
        order *= ell ** (2 * i) - 1
    if which == "Sp":
        return order
    if which == "GSp":
        return order * (ell - 1)
    raise ValueError(f"unknown group {which!r}")


def group_order_mod_prime_power(g: int, ell: int, k: int, which: str = "Sp") -> int:
    """Order over Z/l^k: the kernel of reduction to F_l has l^{(k-1) g(2g+1)} elements."""
    base = group_order(g, ell, "Sp") * ell ** ((k - 1) * g * (2 * g + 1))
    if which == "Sp":
        return base
    return base * (ell - 1) * ell ** (k - 1)


def standard_generators(g: int, modulus: int, which: str = "Sp") -> list[np.ndarray]:
    """Elementary symplectic matrices generating Sp_{2g}(Z/m).

    Upper and lower unipotents [[I, S], [0, I]], [[I, 0], [S, I]] for S running
    over the symmetric elementary matrices, plus [[I + E_ij, 0], [0, I - E_ji]].
    For GSp, similitudes diag(I, c I) are added for a set of units c that
    generates (Z/m)^*.
    """
    n = 2 * g
    gens = []
    for i, j in itertools.combinations_with_replacement(range(g), 2):
        S = np.zeros((g, g), dtype=np.int64)
        S[i, j] = S[j, i] = 1
        up = np.eye(n, dtype=np.int64)
        up[:g, g:] = S
        lo = np.eye(n, dtype=np.int64)
        lo[g:, :g] = S
        gens.extend([up, lo])
    for i, j in itertools.permutations(range(g), 2):
        d = np.eye(n, dtype=np.int64)
        d[i, j] = 1
        d[g + j, g + i] = -1
        gens.append(d)
    if which == "GSp":
        for c in _unit_group_generators(modulus):
            sim = np.eye(n, dtype=np.int64)
            sim[g:, g:] *= c
            gens.append(sim)
    elif which != "Sp":
        raise ValueError(f"unknown group {which!r}")
    return [x % modulus for x in gens]


def _unit_group_generators(modulus: int) -> list[int]:
    units = [u for u in range(1, modulus) if math.gcd(u, modulus) == 1]
    if modulus <= 2:
        return []
    # greedy: add units until the generated subgroup is everything
    generated = {1}
    gens = []
    for u in units:
        if u in generated:
            continue
        gens.append(u)
        frontier = list(generated)
        while frontier:
            x = frontier.pop()
            for h in gens:
                y = x * h % modulus
                if y not in generated:
                    generated.add(y)
                    frontier.append(y)
        if len(generated) == len(units):
            break
    return gens


# ---------------------------------------------------------------------------
# Lie algebra

def _check_symmetric(X: np.ndarray, modulus: int) -> None:
    if not np.array_equal(X % modulus, X.T % modulus):
        raise ValueError("block must be symmetric")


@dataclass(frozen=True)
class SpLieElement:
    """[[A, B], [C, -A^T]] with B, C symmetric, entries mod ``modulus``."""

    A: tuple[tuple[int, ...], ...]
    B: tuple[tuple[int, ...], ...]
    C: tuple[tuple[int, ...], ...]
    modulus: int

    @staticmethod
    def _tup(X, m):
        return tuple(tuple(int(x) % m for x in row) for row in np.asarray(X))

    @classmethod
    def from_blocks(cls, A, B, C, modulus: int) -> "SpLieElement":
        A, B, C = (np.asarray(X, dtype=object) for X in (A, B, C))
        _check_symmetric(B, modulus)
        _check_symmetric(C, modulus)
        return cls(cls._tup(A, modulus), cls._tup(B, modulus), cls._tup(C, modulus), modulus)

    @classmethod
    def from_matrix(cls, M, modulus: int) -> "SpLieElement":
        M = np.asarray(M, dtype=object) % modulus
        g = _half(M.shape[0])
        om = standard_form(g).astype(object)
        if np.any((M.T @ om + om @ M) % modulus):
            raise ValueError("matrix is not in sp_2g")
        return cls.from_blocks(M[:g, :g], M[:g, g:], M[g:, :g], modulus)

    @property
    def g(self) -> int:
        return len(self.A)

    @property
    def matrix(self) -> np.ndarray:
        g, m = self.g, self.modulus
        A = np.array(self.A, dtype=object)
        M = np.zeros((2 * g, 2 * g), dtype=object)
        M[:g, :g] = A
        M[:g, g:] = np.array(self.B, dtype=object)
        M[g:, :g] = np.array(self.C, dtype=object)
        M[g:, g:] = -A.T
        return (M % m).astype(_dtype(m))

    def coords(self) -> tuple[int, ...]:
        """Coordinates in the basis of :func:`lie_basis`: A entries, then the upper
        triangles of B and C."""
        g = self.g
        out = [self.A[i][j] for i in range(g) for j in range(g)]
        tri = [(i, j) for i in range(g) for j in range(i, g)]
        out += [self.B[i][j] for i, j in tri]
        out += [self.C[i][j] for i, j in tri]
        return tuple(out)

    @classmethod
    def from_coords(cls, coords: Sequence[int], g: int, modulus: int) -> "SpLieElement":
        coords = list(coords)
        A = np.array(coords[:g * g], dtype=object).reshape(g, g)
        tri = [(i, j) for i in range(g) for j in range(i, g)]
        t = len(tri)
        B = np.zeros((g, g), dtype=object)
        C = np.zeros((g, g), dtype=object)
        for (i, j), b, c in zip(tri, coords[g * g:g * g + t], coords[g * g + t:]):
            B[i, j] = B[j, i] = b
            C[i, j] = C[j, i] = c
        return cls.from_blocks(A, B, C, modulus)

    def __add__(self, other: "SpLieElement") -> "SpLieElement":
        return SpLieElement.from_matrix(self.matrix.astype(object) + other.matrix.astype(object), self.modulus)

    def scale(self, c: int) -> "SpLieElement":
        return SpLieElement.from_matrix(c * self.matrix.astype(object), self.modulus)


def lie_dimension(g: int) -> int:
    return g * (2 * g + 1)


def lie_basis(g: int, modulus: int) -> list[SpLieElement]:
    n = lie_dimension(g)
    return [SpLieElement.from_coords([int(i == k) for i in range(n)], g, modulus) for k in range(n)]


def lie_bracket(M: SpLieElement, N: SpLieElement) -> SpLieElement:
    if M.g != N.g or M.modulus != N.modulus:
        raise ValueError("brackets need matching g and modulus")
    a, b = M.matrix.astype(object), N.matrix.astype(object)
    # from_matrix re-checks the sp identity
    return SpLieElement.from_matrix(a @ b - b @ a, M.modulus)


@dataclass(frozen=True)
class SpanDescriptor:
    """Span of all brackets [X, Y] inside sp_{2g}(Z/modulus).

    For a prime modulus ``dimension`` is the F_l-dimension and ``basis`` a
    reduced echelon basis in :meth:`SpLieElement.coords` coordinates. For
    modulus 4, ``basis`` is the Hermite basis of the preimage lattice in Z^n,
    ``dimension`` is log_2 of the span's order, and ``contains_twice_sp``
    says whether the span contains all of 2 sp_{2g}(Z/4).
    """

    g: int
    modulus: int
    dimension: int
    basis: tuple[tuple[int, ...], ...]
    contains_twice_sp: bool | None = None


def _rref_mod_prime(rows: list[list[int]], p: int) -> list[list[int]]:
    rows = [[x % p for x in r] for r in rows]
    out: list[list[int]] = []
    ncols = len(rows[0]) if rows else 0
    col = 0
    for col in range(ncols):
        piv = next((r for r in rows if r[col]), None)
        if piv is None:
            continue
        rows.remove(piv)
        inv = pow(piv[col], -1, p)
        piv = [x * inv % p for x in piv]
        rows = [[(x - r[col] * y) % p for x, y in zip(r, piv)] for r in rows]
        out = [[(x - r[col] * y) % p for x, y in zip(r, piv)] for r in out]
        out.append(piv)
        rows = [r for r in rows if any(r)]
    return sorted(out, key=lambda r: next(i for i, x in enumerate(r) if x))


def rank_mod_prime(rows: Iterable[Sequence[int]], p: int) -> int:
    rows = [list(r) for r in rows]
    return len(_rref_mod_prime(rows, p)) if rows else 0


def _hermite_basis(rows: list[list[int]]) -> list[list[int]]:
    """Upper-triangular Z-basis (row Hermite form) of the lattice spanned by rows."""
    rows = [list(r) for r in rows if any(r)]
    n = len(rows[0]) if rows else 0
    basis = []
    for col in range(n):
        active = [r for r in rows if r[col]]
        rows = [r for r in rows if not r[col]]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                if r[col]:
                    nxt.append(r)
                elif any(r):
                    rows.append(r)
            active = nxt
        if active:
            piv = active[0]
            if piv[col] < 0:
                piv = [-x for x in piv]
            basis.append(piv)
    return basis


def _lattice_contains(basis: list[list[int]], v: Sequence[int]) -> bool:
    v = list(v)
    for row in basis:
        col = next(i for i, x in enumerate(row) if x)
        if v[col] % row[col]:
            return False
        q = v[col] // row[col]
        v = [x - q * y for x, y in zip(v, row)]
    return not any(v)


def commutator_span(g: int, modulus: int) -> SpanDescriptor:
    """Span of [sp_{2g}, sp_{2g}] over Z/l (l >= 3 prime) or Z/4.

    Brackets are bilinear, so brackets of basis pairs span everything.
    """
    if g < 1 or g > 3:
        raise UnsupportedModulus("commutator_span is limited to 1 <= g <= 3")
    if modulus == 4:
        basis = lie_basis(g, 4)
    elif modulus >= 3 and is_prime(modulus):
        basis = lie_basis(g, modulus)
    else:
        raise UnsupportedModulus(f"modulus {modulus} is neither an odd prime nor 4")
    brackets = [lie_bracket(x, y).coords() for x, y in itertools.combinations(basis, 2)]
    n = lie_dimension(g)
    if modulus != 4:
        ech = _rref_mod_prime([list(b) for b in brackets], modulus)
        return SpanDescriptor(g, modulus, len(ech), tuple(tuple(r) for r in ech))
    # Z/4: work with the preimage lattice  brackets + 4 Z^n  in Z^n
    gens = [list(b) for b in brackets] + [[4 * int(i == k) for i in range(n)] for k in range(n)]
    herm = _hermite_basis(gens)
    twice = [[2 * int(i == k) for i in range(n)] for k in range(n)]
    contained = all(_lattice_contains(herm, t) for t in twice)
    # |span| = [Z^n : 4Z^n] / [Z^n : lattice] = prod 4 / diag
    pivots = [next(x for x in r if x) for r in herm]
    log2_order = sum({1: 2, 2: 1, 4: 0}[d] for d in pivots)
    return SpanDescriptor(g, 4, log2_order, tuple(tuple(r) for r in herm), contained)


# ---------------------------------------------------------------------------
# congruence subgroups

def _local_inverse(M: list[list[int]], p: int, k: int) -> list[list[int]]:
    """Gauss-Jordan inverse over Z/p^k, pivoting on units."""
    mod = p**k
    n = len(M)
    aug = [[x % mod for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] % p), None)
        if piv is None:
            raise NotInvertible(f"matrix is singular mod {p}")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, mod)
        aug[col] = [x * inv % mod for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                c = aug[r][col]
                aug[r] = [(x - c * y) % mod for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def mat_inv_mod(M, modulus: int) -> np.ndarray:
    """Inverse of an integer matrix modulo any m > 1 (local inverses + CRT)."""
    rows = [[int(x) for x in row] for row in np.asarray(M)]
    n = len(rows)
    fac, rest = trial_factor(modulus)
    if rest != 1:
        raise ValueError("modulus too large to factor")
    parts = [(p, e, _local_inverse(rows, p, e)) for p, e in fac.items()]
    out = [[crt_combine(ResidueValue(inv[i][j], p**e) for p, e, inv in parts).value
            for j in range(n)] for i in range(n)]
    return np.array(out, dtype=object)


def commutator_residue(ell: int, n: int, m: int, U, V, depth: int = 1) -> np.ndarray:
    """(I + l^n U)^{-1} (I + l^m V) (I + l^n U) (I + l^m V)^{-1} mod l^{2n+m}.

    The product is formed modulo l^{2n+m+depth} before the final reduction.
    """
    U = np.asarray(U, dtype=object)
    V = np.asarray(V, dtype=object)
    size = U.shape[0]
    work = ell ** (2 * n + m + depth)
    eye = np.eye(size, dtype=object)
    X = (eye + ell**n * U) % work
    Y = (eye + ell**m * V) % work
    lhs = mat_inv_mod(X, work) @ Y % work @ X % work @ mat_inv_mod(Y, work) % work
    return lhs % ell ** (2 * n + m)


def group_commutator_congruence(ell: int, n: int, m: int, U, V, depth: int = 1) -> bool:
    """Check (I+l^nU)^{-1}(I+l^mV)(I+l^nU)(I+l^mV)^{-1} == I + l^{n+m}(VU - UV) mod l^{2n+m}."""
    if not 1 <= n <= m:
        raise ValueError("need 1 <= n <= m")
    U = np.asarray(U, dtype=object)
    V = np.asarray(V, dtype=object)
    target = ell ** (2 * n + m)
    rhs = (np.eye(U.shape[0], dtype=object) + ell ** (n + m) * (V @ U - U @ V)) % target
    return bool(np.array_equal(commutator_residue(ell, n, m, U, V, depth), rhs))


def kernel_param(k: int, ell: int, M: SpLieElement) -> SympMatrix:
    """I + l^k M~ in ker(Sp(Z/l^{k+1}) -> Sp(Z/l^k)) for M in sp_{2g}(F_l)."""
    if k < 1:
        raise ValueError("k must be positive")
    if M.modulus != ell:
        raise ValueError("M must live in sp_2g(Z/l)")
    mod = ell ** (k + 1)
    lifted = M.matrix.astype(object)
    S = (np.eye(2 * M.g, dtype=object) + ell**k * lifted) % mod
    return SympMatrix.from_matrix(S, mod)
