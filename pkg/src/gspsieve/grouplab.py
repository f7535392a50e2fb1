"""Finite-truncation group experiments: closures, Goursat products, lifting.

Two closure engines share one contract. :func:`closure` is a plain BFS over
hashable elements with a caller-supplied multiplication. :func:`matrix_closure`
does the same for matrix groups over Z/m, with numpy frontiers and elements
encoded as base-m integers so that sets of elements are sorted ``int64``
arrays.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import CapExceeded, UnsupportedSize
from .symplectic import (
    group_order,
    group_order_mod_prime_power,
    lie_dimension,
    rank_mod_prime,
    standard_form,
    standard_generators,
)

log = logging.getLogger(__name__)

DEFAULT_CAP = 2_000_000


@dataclass
class FiniteGroupHandle:
    """A finite group given by its generators and the full element set."""

    generators: list
    multiply: Callable[[Any, Any], Any]
    identity: Any
    elements: frozenset

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.elements


def closure(generators: Iterable[Hashable], multiply: Callable, identity: Hashable,
            cap: int = DEFAULT_CAP) -> FiniteGroupHandle:
    """Subgroup generated by ``generators`` (finite, so the monoid closure)."""
    if cap < 1:
        raise ValueError("cap must be positive")
    gens = list(generators)
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = multiply(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise CapExceeded(cap, len(seen))
        frontier = nxt
    return FiniteGroupHandle(gens, multiply, identity, frozenset(seen))


# ---------------------------------------------------------------------------
# matrix groups over Z/m

class KeyCodec:
    """Bijection between n x n matrices over Z/m and integers < m^(n^2)."""

    def __init__(self, n: int, modulus: int):
        if modulus ** (n * n) >= 2**63:
            raise UnsupportedSize(f"{n}x{n} matrices mod {modulus} do not fit int64 keys")
        self.n, self.modulus = n, modulus
        self.weights = modulus ** np.arange(n * n, dtype=np.int64)

    def encode(self, mats: np.ndarray) -> np.ndarray:
        flat = mats.reshape(mats.shape[:-2] + (self.n * self.n,))
        return flat @ self.weights

    def decode(self, keys: np.ndarray) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.int64)
        return ((keys[..., None] // self.weights) % self.modulus).reshape(keys.shape + (self.n, self.n))


@dataclass
class MatrixGroup:
    """A matrix group over Z/m stored as a sorted array of element keys."""

    generators: list
    modulus: int
    keys: np.ndarray
    codec: KeyCodec = field(repr=False)

    @property
    def order(self) -> int:
        return int(self.keys.size)

    def __len__(self) -> int:
        return self.order

    def __contains__(self, mat) -> bool:
        k = int(self.codec.encode(np.asarray(mat, dtype=np.int64) % self.modulus))
        i = np.searchsorted(self.keys, k)
        return bool(i < self.keys.size and self.keys[i] == k)

    def contains_keys(self, keys: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.keys, keys)
        idx = np.minimum(idx, self.keys.size - 1)
        return self.keys[idx] == keys

    def elements(self) -> np.ndarray:
        return self.codec.decode(self.keys)


def _in_sorted(keys: np.ndarray, sorted_keys: np.ndarray) -> np.ndarray:
    if sorted_keys.size == 0:
        return np.zeros(keys.shape, dtype=bool)
    idx = np.minimum(np.searchsorted(sorted_keys, keys), sorted_keys.size - 1)
    return sorted_keys[idx] == keys


def matrix_closure(generators: Sequence[np.ndarray], modulus: int,
                   cap: int = DEFAULT_CAP) -> MatrixGroup:
    """Closure of matrices over Z/m by breadth-first search on numpy frontiers."""
    if cap < 1:
        raise ValueError("cap must be positive")
    gens = [np.asarray(s, dtype=np.int64) % modulus for s in generators]
    n = gens[0].shape[0] if gens else 1
    codec = KeyCodec(n, modulus)
    eye = np.eye(n, dtype=np.int64)[None] % modulus
    seen = codec.encode(eye)
    if not gens:
        return MatrixGroup([], modulus, seen, codec)
    G = np.stack(gens)
    frontier = eye
    while frontier.shape[0]:
        cand = (frontier[:, None] @ G[None]) % modulus
        cand = cand.reshape(-1, n, n)
        keys = codec.encode(cand)
        keys, first = np.unique(keys, return_index=True)
        fresh = ~_in_sorted(keys, seen)
        frontier = cand[first[fresh]]
        seen = np.union1d(seen, keys[fresh])
        if seen.size > cap:
            raise CapExceeded(cap, int(seen.size))
    return MatrixGroup(gens, modulus, seen, codec)


def sp_group(g: int, modulus: int, which: str = "Sp", cap: int = DEFAULT_CAP) -> MatrixGroup:
    return matrix_closure(standard_generators(g, modulus, which), modulus, cap)


def symplectic_inverse(S: np.ndarray, modulus: int) -> np.ndarray:
    """Inverse of multiplier-1 matrices (batched): -Omega S^T Omega."""
    g = S.shape[-1] // 2
    om = standard_form(g)
    St = np.swapaxes(S, -1, -2)
    return (-(om @ St @ om)) % modulus


def random_symplectic(g: int, modulus: int, count: int, rng: np.random.Generator,
                      batch: int = 200_000) -> np.ndarray:
    """Uniform elements of Sp_{2g}(Z/m) by rejection sampling raw matrices."""
    n = 2 * g
    om = standard_form(g) % modulus
    out = []
    have = 0
    while have < count:
        raw = rng.integers(0, modulus, size=(batch, n, n), dtype=np.int64)
        lhs = (np.swapaxes(raw, 1, 2) @ standard_form(g) @ raw) % modulus
        hits = raw[(lhs == om).all(axis=(1, 2))]
        out.append(hits)
        have += hits.shape[0]
    return np.concatenate(out)[:count]


# ---------------------------------------------------------------------------
# Goursat at finite scale

# Finite simple quotients (up to isomorphism) of the groups used in the
# product experiments. Not computed: normal-subgroup lattices are out of scope.
SIMPLE_QUOTIENTS: dict[str, frozenset[str]] = {
    "Z/2": frozenset({"C2"}),
    "S3": frozenset({"C2"}),
    "SL2(F3)": frozenset({"C3"}),
    "SL2(F5)": frozenset({"A5"}),
    "SL2(F7)": frozenset({"PSL2(F7)"}),
    "Sp4(F2)": frozenset({"C2"}),
    "Sp4(F3)": frozenset({"PSp4(F3)"}),
}


def disjoint_simple_quotients(a: str, b: str) -> bool:
    return not (SIMPLE_QUOTIENTS[a] & SIMPLE_QUOTIENTS[b])


@dataclass(frozen=True)
class ProductReport:
    first_surjective: bool
    second_surjective: bool
    closure_order: int
    product_order: int

    @property
    def is_full_product(self) -> bool:
        return self.closure_order == self.product_order


def product_closure_test(generators: Sequence[tuple[Hashable, Hashable]],
                         first: FiniteGroupHandle, second: FiniteGroupHandle,
                         cap: int = DEFAULT_CAP) -> ProductReport:
    """Close pairs inside first x second and compare with the full product."""
    m1, m2 = first.multiply, second.multiply

    def mul(x, y):
        return (m1(x[0], y[0]), m2(x[1], y[1]))

    H = closure(generators, mul, (first.identity, second.identity), cap)
    proj1 = {x for x, _ in H.elements}
    proj2 = {y for _, y in H.elements}
    return ProductReport(
        first_surjective=len(proj1) == first.order,
        second_surjective=len(proj2) == second.order,
        closure_order=H.order,
        product_order=first.order * second.order,
    )


def tuple_matmul(modulus: int) -> Callable:
    """Multiplication on matrices stored as flat row-major tuples."""

    def mul(a, b):
        n = int(round(len(a) ** 0.5))
        return tuple(
            sum(a[i * n + k] * b[k * n + j] for k in range(n)) % modulus
            for i in range(n) for j in range(n)
        )

    return mul


def tuple_matrix_group(gens: Sequence[np.ndarray], modulus: int, cap: int = DEFAULT_CAP) -> FiniteGroupHandle:
    n = np.asarray(gens[0]).shape[0]
    ident = tuple(int(i == j) for i in range(n) for j in range(n))
    flat = [tuple(int(x) % modulus for x in np.asarray(s).ravel()) for s in gens]
    return closure(flat, tuple_matmul(modulus), ident, cap)


def permutation_group(gens: Sequence[Sequence[int]], cap: int = DEFAULT_CAP) -> FiniteGroupHandle:
    def compose(a, b):
        return tuple(a[i] for i in b)

    n = len(gens[0])
    return closure([tuple(s) for s in gens], compose, tuple(range(n)), cap)


# ---------------------------------------------------------------------------
# lifting from Z/l to Z/l^2

SUPPORTED_LIFTS = {(2, 2, 2), (1, 5, 2), (1, 7, 2)}


@dataclass(frozen=True)
class LiftingReport:
    g: int
    ell: int
    k: int
    trials: int
    skipped: int
    expected_order: int
    orders: tuple[int, ...]
    counterexample: tuple | None

    @property
    def passed(self) -> bool:
        return self.counterexample is None


def _sp_coords(M: np.ndarray, g: int) -> np.ndarray:
    """Coordinates of a batch of sp_2g matrices (A entries, upper B, upper C)."""
    tri = [(i, j) for i in range(g) for j in range(i, g)]
    A = M[:, :g, :g].reshape(M.shape[0], -1)
    B = np.stack([M[:, i, g + j] for i, j in tri], axis=1)
    C = np.stack([M[:, g + i, j] for i, j in tri], axis=1)
    return np.concatenate([A, B, C], axis=1)


def lifted_closure_order(gens: Sequence[np.ndarray], g: int, ell: int, cap: int = DEFAULT_CAP) -> tuple[int, int]:
    """Order of <gens> in Sp_{2g}(Z/l^2) and of its image mod l.

    BFS over the mod-l image keeps one lift per element (a Schreier transversal);
    the Schreier generators t s rep(ts)^{-1} lie in the abelian kernel
    I + l sp_{2g}(F_l) and generate the intersection with it, whose order is
    l^rank of their sp-coordinates.
    """
    mod = ell * ell
    n = 2 * g
    G = np.stack([np.asarray(s, dtype=np.int64) % mod for s in gens])
    codec = KeyCodec(n, ell)
    eye = np.eye(n, dtype=np.int64)[None]
    seen = codec.encode(eye)
    reps = [eye]
    frontier = eye
    while frontier.shape[0]:
        cand = ((frontier[:, None] @ G[None]) % mod).reshape(-1, n, n)
        keys, first = np.unique(codec.encode(cand % ell), return_index=True)
        fresh = ~_in_sorted(keys, seen)
        frontier = cand[first[fresh]]
        reps.append(frontier)
        seen = np.union1d(seen, keys[fresh])
        if seen.size > cap:
            raise CapExceeded(cap, int(seen.size))
    lifts = np.concatenate(reps)
    order_mod_ell = lifts.shape[0]
    # index lifts by key of their reduction
    lift_keys = codec.encode(lifts % ell)
    sort = np.argsort(lift_keys)
    sorted_keys = lift_keys[sort]
    ts = ((lifts[:, None] @ G[None]) % mod).reshape(-1, n, n)
    rep = lifts[sort[np.searchsorted(sorted_keys, codec.encode(ts % ell))]]
    h = (ts @ symplectic_inverse(rep, mod)) % mod
    kernel_part = ((h - np.eye(n, dtype=np.int64)) % mod) // ell
    coords = np.unique(_sp_coords(kernel_part, g) % ell, axis=0)
    rank = rank_mod_prime(coords.tolist(), ell)
    return order_mod_ell * ell**rank, order_mod_ell


def lifting_check(g: int, ell: int, k: int, trials: int, seed: int,
                  n_generators: int = 2, max_resamples: int = 1000) -> LiftingReport:
    """Random subgroups of Sp_{2g}(Z/l^k) with full mod-l image must be everything.

    Draws whose mod-l image is not all of Sp_{2g}(F_l) are redrawn (they say
    nothing about lifting) and counted in ``skipped``.
    """
    if (g, ell, k) not in SUPPORTED_LIFTS:
        raise UnsupportedSize(f"lifting check supports only {sorted(SUPPORTED_LIFTS)}")
    rng = np.random.default_rng(seed)
    full_mod_ell = group_order(g, ell)
    expected = group_order_mod_prime_power(g, ell, k)
    orders = []
    skipped = 0
    for trial in range(trials):
        for _ in range(max_resamples):
            gens = list(random_symplectic(g, ell**k, n_generators, rng))
            order, image = lifted_closure_order(gens, g, ell)
            if image == full_mod_ell:
                break
            skipped += 1
        else:
            raise RuntimeError("could not draw generators with full mod-l image")
        orders.append(order)
        if order != expected:
            witness = tuple(tuple(map(int, s.ravel())) for s in gens)
            log.warning("lifting counterexample at trial %d: order %d", trial, order)
            return LiftingReport(g, ell, k, trial + 1, skipped, expected, tuple(orders), witness)
    return LiftingReport(g, ell, k, trials, skipped, expected, tuple(orders), None)


# ---------------------------------------------------------------------------
# perfectness

def commutator(x: np.ndarray, y: np.ndarray, modulus: int) -> np.ndarray:
    xi, yi = symplectic_inverse(x, modulus), symplectic_inverse(y, modulus)
    return x @ y % modulus @ xi % modulus @ yi % modulus


def derived_subgroup(G: MatrixGroup, extra_pairs: int = 0, seed: int = 0,
                     cap: int = DEFAULT_CAP) -> MatrixGroup:
    """[G, G] as the normal closure of commutators of generators.

    ``extra_pairs`` random commutators are thrown in up front; they cannot
    change the answer, only shorten the normal-closure loop.
    """
    m = G.modulus
    gens = G.generators
    comms = [commutator(a, b, m) for a, b in itertools.combinations(gens, 2)]
    if extra_pairs:
        rng = np.random.default_rng(seed)
        picks = G.codec.decode(rng.choice(G.keys, size=(extra_pairs, 2)))
        comms += [commutator(a, b, m) for a, b in picks]
    while True:
        N = matrix_closure(comms, m, cap)
        added = False
        for s in gens:
            si = symplectic_inverse(s, m)
            for c in list(comms):
                conj = s @ c % m @ si % m
                if conj not in N:
                    comms.append(conj)
                    added = True
        if not added:
            return N


def perfectness_check(g: int, ell: int, cap: int = DEFAULT_CAP, seed: int = 0) -> bool:
    """True iff Sp_{2g}(F_l) equals its own commutator subgroup."""
    G = sp_group(g, ell, "Sp", cap)
    D = derived_subgroup(G, extra_pairs=8, seed=seed, cap=cap)
    return D.order == G.order
