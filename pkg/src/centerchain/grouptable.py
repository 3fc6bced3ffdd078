"""Finite groups as explicit Cayley tables, with subgroup and series machinery.

Elements are integers 0..n-1 and index 0 is always the identity of a freshly
validated table.  Subgroups are immutable bitsets over element indices, so the
dominant operations (inclusion tests, chain checks) are single big-int ops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "GroupTable",
    "GroupTableError",
    "OrderCapExceeded",
    "Subgroup",
    "SubgroupSeries",
    "QuotientMap",
    "all_normal_subgroups",
    "center",
    "centralizer",
    "commutator_subgroup",
    "count_chief_series_capped",
    "derived_series",
    "exponent",
    "is_abelian",
    "is_cyclic",
    "is_elementary_abelian",
    "is_p_group",
    "is_maximal_class",
    "coclass",
    "is_waist",
    "lower_central_series",
    "minimal_normal_subgroups",
    "nilpotency_class",
    "is_solvable",
    "normal_closure",
    "quotient",
    "subgroup_generated",
    "upper_central_series",
]

# Full O(n^3) associativity checking is done up to this order; larger tables
# get a deterministic structured sample (the artifact uses no randomness).
FULL_ASSOC_LIMIT = 512
DEFAULT_LATTICE_ORDER_CAP = 4096


class GroupTableError(ValueError):
    """Raised when a multiplication table violates the group axioms."""


class OrderCapExceeded(RuntimeError):
    """Raised when an operation would exceed the configured order cap."""


def _bits_from_indices(idx: np.ndarray, n: int) -> int:
    mask = np.zeros(n, dtype=bool)
    mask[idx] = True
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def _indices_from_bits(bits: int, n: int) -> np.ndarray:
    nbytes = (n + 7) // 8
    raw = np.frombuffer(bits.to_bytes(nbytes, "little"), dtype=np.uint8)
    mask = np.unpackbits(raw, bitorder="little")[:n]
    return np.nonzero(mask)[0].astype(np.int64)


@dataclass(frozen=True)
class Subgroup:
    """Subset of element indices closed under the parent group operations."""

    bits: int
    size: int
    ambient: int

    @staticmethod
    def from_indices(idx: Iterable[int], n: int) -> "Subgroup":
        arr = np.asarray(sorted(set(int(i) for i in idx)), dtype=np.int64)
        return Subgroup(_bits_from_indices(arr, n), len(arr), n)

    def indices(self) -> np.ndarray:
        return _indices_from_bits(self.bits, self.ambient)

    def __contains__(self, g: int) -> bool:
        return bool((self.bits >> int(g)) & 1)

    def issubset(self, other: "Subgroup") -> bool:
        return self.bits & ~other.bits == 0

    def comparable(self, other: "Subgroup") -> bool:
        return self.issubset(other) or other.issubset(self)

    def intersect(self, other: "Subgroup") -> "Subgroup":
        b = self.bits & other.bits
        return Subgroup(b, b.bit_count(), self.ambient)

    def is_whole(self) -> bool:
        return self.size == self.ambient

    def is_trivial(self) -> bool:
        return self.size == 1


@dataclass(frozen=True)
class SubgroupSeries:
    """Ordered series of subgroups (chain-of-centers, central, derived, chief)."""

    terms: tuple[Subgroup, ...]
    kind: str

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class QuotientMap:
    source: "GroupTable"
    target: "GroupTable"
    projection: np.ndarray

    def kernel(self) -> Subgroup:
        idx = np.nonzero(self.projection == self.target.identity)[0]
        return Subgroup.from_indices(idx, self.source.order)

    def preimage(self, sub: Subgroup) -> Subgroup:
        mask = np.array([(sub.bits >> int(t)) & 1 for t in self.projection], dtype=bool)
        return Subgroup.from_indices(np.nonzero(mask)[0], self.source.order)

    def image(self, sub: Subgroup) -> Subgroup:
        idx = np.unique(self.projection[sub.indices()])
        return Subgroup.from_indices(idx, self.target.order)


class GroupTable:
    """A finite group given by its full multiplication table.

    The table is validated eagerly: Latin-square property, identity, inverses
    and associativity (complete up to order 512, a fixed structured sample of
    triples above that).
    """

    def __init__(self, product: np.ndarray, label: str = "", validate: bool = True):
        product = np.ascontiguousarray(np.asarray(product, dtype=np.int32))
        if product.ndim != 2 or product.shape[0] != product.shape[1]:
            raise GroupTableError("product table must be square")
        self.product = product
        self.order = int(product.shape[0])
        self.label = label
        self.identity = self._find_identity()
        self.inverse = self._find_inverses()
        if validate:
            self._validate()
        self.product.setflags(write=False)
        self.inverse.setflags(write=False)

    # -- construction-time checks -------------------------------------------------

    def _find_identity(self) -> int:
        n = self.order
        cols = np.arange(n, dtype=np.int32)
        for g in range(n):
            if np.array_equal(self.product[g], cols) and np.array_equal(self.product[:, g], cols):
                return g
        raise GroupTableError("table has no identity element")

    def _find_inverses(self) -> np.ndarray:
        hits = self.product == self.identity
        if not np.all(hits.sum(axis=1) == 1):
            raise GroupTableError("some element has no unique inverse")
        inv = hits.argmax(axis=1).astype(np.int32)
        if not np.all(self.product[np.arange(self.order), inv] == self.identity):
            raise GroupTableError("inverse map is inconsistent")
        return inv

    def _validate(self) -> None:
        n = self.order
        if self.product.min() < 0 or self.product.max() >= n:
            raise GroupTableError("table entries out of range")
        ref = np.arange(n, dtype=np.int32)
        if not (np.all(np.sort(self.product, axis=1) == ref) and np.all(np.sort(self.product, axis=0) == ref[:, None])):
            raise GroupTableError("table is not a Latin square")
        if n <= FULL_ASSOC_LIMIT:
            rows = range(n)
        else:
            # deterministic sample: a stride through rows plus all "small" rows
            stride = max(1, n // 97)
            rows = sorted(set(range(0, n, stride)) | set(range(min(n, 64))))
        P = self.product
        for a in rows:
            if not np.array_equal(P[P[a], :], P[a, P]):
                raise GroupTableError(f"associativity fails at row {a}")

    # -- basic maps ---------------------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return int(self.product[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def conj(self, g: int, h: int) -> int:
        """h^{-1} g h."""
        return int(self.product[self.product[self.inverse[h], g], h])

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        orders[self.identity] = 1
        cur = np.arange(n, dtype=np.int32)
        alive = orders == 0
        k = 1
        while alive.any():
            k += 1
            cur = self.product[cur, np.arange(n)]
            done = alive & (cur == self.identity)
            orders[done] = k
            alive &= ~done
        return orders

    def power(self, g: int, k: int) -> int:
        o = int(self.element_orders[g])
        k %= o
        out = self.identity
        for _ in range(k):
            out = int(self.product[out, g])
        return out

    @cached_property
    def commutator_bits(self) -> list[int]:
        """For each g, the bitset {[g, x] : x in G}; [g,x] = g^-1 x^-1 g x."""
        n = self.order
        P = self.product
        out = []
        ginv = self.inverse
        xs = np.arange(n, dtype=np.int32)
        for g in range(n):
            w = P[P[P[ginv[g], ginv], g], xs]
            out.append(_bits_from_indices(np.unique(w), n))
        return out

    def whole(self) -> Subgroup:
        return Subgroup((1 << self.order) - 1, self.order, self.order)

    def trivial(self) -> Subgroup:
        return Subgroup(1 << self.identity, 1, self.order)

    def __repr__(self) -> str:
        return f"GroupTable(order={self.order}, label={self.label!r})"


# -- elementwise/structure operations ----------------------------------------------


def is_abelian(G: GroupTable) -> bool:
    return bool(np.array_equal(G.product, G.product.T))


def center(G: GroupTable) -> Subgroup:
    central = np.all(G.product == G.product.T, axis=1)
    return Subgroup.from_indices(np.nonzero(central)[0], G.order)


def centralizer(G: GroupTable, g: int) -> Subgroup:
    mask = G.product[g, :] == G.product[:, g]
    return Subgroup.from_indices(np.nonzero(mask)[0], G.order)


def subgroup_generated(G: GroupTable, seeds: Iterable[int]) -> Subgroup:
    idx = np.unique(np.asarray(list(seeds) + [G.identity], dtype=np.int64))
    if idx.size == 0:
        raise ValueError("seed set must be nonempty")
    while True:
        prod = np.unique(G.product[np.ix_(idx, idx)])
        if prod.size == idx.size:
            return Subgroup.from_indices(idx, G.order)
        idx = prod


def conjugates_of_set(G: GroupTable, idx: np.ndarray) -> np.ndarray:
    n = G.order
    xs = np.arange(n, dtype=np.int32)
    out = G.product[G.product[np.ix_(G.inverse[xs], idx.astype(np.int32))].T, xs]
    return np.unique(out)


def normal_closure(G: GroupTable, seeds: Iterable[int]) -> Subgroup:
    idx = np.unique(np.asarray(list(seeds) + [G.identity], dtype=np.int64))
    if idx.size == 0:
        raise ValueError("seed set must be nonempty")
    while True:
        closed = subgroup_generated(G, idx)
        conj = conjugates_of_set(G, closed.indices())
        if conj.size == closed.size:
            return closed
        idx = conj


def is_normal(G: GroupTable, S: Subgroup) -> bool:
    conj = conjugates_of_set(G, S.indices())
    return conj.size == S.size and _bits_from_indices(conj, G.order) == S.bits


def normality_witness(G: GroupTable, S: Subgroup) -> Optional[tuple[int, int]]:
    """A pair (s, h) with h^-1 s h outside S, or None when S is normal."""
    idx = S.indices()
    for h in range(G.order):
        w = G.product[G.product[G.inverse[h], idx], h]
        bad = np.nonzero(np.array([(S.bits >> int(x)) & 1 == 0 for x in w]))[0]
        if bad.size:
            return int(idx[bad[0]]), h
    return None


def commutator_subgroup(G: GroupTable, H: Subgroup, K: Subgroup) -> Subgroup:
    """Subgroup generated by all [h,k] = h^-1 k^-1 h k with h in H, k in K."""
    hi = H.indices().astype(np.int32)
    ki = K.indices().astype(np.int32)
    P = G.product
    a = P[np.ix_(G.inverse[hi], G.inverse[ki])]
    b = P[np.ix_(hi, ki)]
    seeds = np.unique(P[a, b])
    return subgroup_generated(G, seeds)


def product_set(G: GroupTable, A: Subgroup, B: Subgroup) -> Subgroup:
    """AB as a subgroup; valid whenever one of A, B normalizes the other."""
    if B.issubset(A):
        return A
    if A.issubset(B):
        return B
    idx = np.unique(G.product[np.ix_(A.indices(), B.indices())])
    return Subgroup.from_indices(idx, G.order)


def quotient(G: GroupTable, N: Subgroup) -> QuotientMap:
    wit = normality_witness(G, N)
    if wit is not None:
        raise GroupTableError(
            f"subgroup is not normal: conjugating element {wit[0]} by {wit[1]} leaves the subgroup"
        )
    n = G.order
    ni = N.indices().astype(np.int32)
    # canonical coset representative: minimal element of gN
    cosets = G.product[np.ix_(np.arange(n, dtype=np.int32), ni)]
    rep_of = cosets.min(axis=1).astype(np.int32)
    reps = np.unique(rep_of)
    coset_id = np.full(n, -1, dtype=np.int32)
    coset_id[reps] = np.arange(reps.size, dtype=np.int32)
    proj = coset_id[rep_of]
    table = proj[G.product[np.ix_(reps, reps)]]
    target = GroupTable(table, label=f"{G.label}/N{N.size}" if G.label else f"Q{N.size}")
    # identity of the quotient table is the coset of the identity; reindex so
    # that projection maps G.identity to target.identity
    if target.identity != proj[G.identity]:  # pragma: no cover - cosets sorted, min(eN)=0
        raise GroupTableError("quotient identity mismatch")
    if not np.array_equal(proj[G.product], target.product[proj][:, proj]):
        raise GroupTableError("projection is not a homomorphism")
    return QuotientMap(G, target, proj)


def exponent(G: GroupTable) -> int:
    return int(reduce(math.lcm, (int(o) for o in np.unique(G.element_orders)), 1))


def is_cyclic(G: GroupTable) -> bool:
    return bool(np.any(G.element_orders == G.order))


def is_p_group(G: GroupTable) -> Optional[int]:
    """The prime p when |G| is a nontrivial p-power, else None."""
    n = G.order
    if n == 1:
        return None
    p = min(_prime_factors(n))
    return p if _is_power_of(n, p) else None


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_elementary_abelian(G: GroupTable, S: Optional[Subgroup] = None) -> bool:
    """Whether S (default: all of G) is abelian of prime exponent (or trivial)."""
    if S is None:
        S = G.whole()
    if S.size == 1:
        return True
    idx = S.indices()
    sub = G.product[np.ix_(idx, idx)]
    if not np.array_equal(sub, sub.T):
        return False
    nontriv = np.unique(G.element_orders[idx])
    nontriv = nontriv[nontriv > 1]
    return nontriv.size == 1 and len(_prime_factors(int(nontriv[0]))) == 1


def subgroup_table(G: GroupTable, S: Subgroup, label: str = "") -> tuple[GroupTable, np.ndarray]:
    """Cayley table of the subgroup S, plus the index map into G."""
    idx = S.indices().astype(np.int32)
    pos = np.full(G.order, -1, dtype=np.int32)
    pos[idx] = np.arange(idx.size, dtype=np.int32)
    table = pos[G.product[np.ix_(idx, idx)]]
    if table.min() < 0:
        raise GroupTableError("subset is not closed under multiplication")
    return GroupTable(table, label=label), idx


# -- series ------------------------------------------------------------------------


def upper_central_series(G: GroupTable) -> SubgroupSeries:
    """1 < Z_1 <= Z_2 <= ... up to the hypercenter (last term repeated stops)."""
    terms = [G.trivial()]
    K = G.commutator_bits
    while True:
        prev = terms[-1]
        nxt_idx = [g for g in range(G.order) if K[g] & ~prev.bits == 0]
        nxt = Subgroup.from_indices(nxt_idx, G.order)
        if nxt.bits == prev.bits:
            break
        terms.append(nxt)
    return SubgroupSeries(tuple(terms), "upper-central")


def lower_central_series(G: GroupTable) -> SubgroupSeries:
    """G = G_1 >= G_2 = [G,G] >= [G_2,G] >= ... down to the nilpotent residual."""
    whole = G.whole()
    terms = [whole]
    while True:
        nxt = commutator_subgroup(G, terms[-1], whole)
        if nxt.bits == terms[-1].bits:
            break
        terms.append(nxt)
    return SubgroupSeries(tuple(terms), "lower-central")


def derived_series(G: GroupTable) -> SubgroupSeries:
    terms = [G.whole()]
    while True:
        nxt = commutator_subgroup(G, terms[-1], terms[-1])
        if nxt.bits == terms[-1].bits:
            break
        terms.append(nxt)
    return SubgroupSeries(tuple(terms), "derived")


def is_solvable(G: GroupTable) -> bool:
    return derived_series(G).terms[-1].size == 1


def nilpotency_class(G: GroupTable) -> Optional[int]:
    lcs = lower_central_series(G)
    if lcs.terms[-1].size != 1:
        return None
    return len(lcs.terms) - 1


def coclass(G: GroupTable) -> Optional[int]:
    """Coclass of a p-group (|G| = p^m, class c -> m - c); None when not applicable."""
    p = is_p_group(G)
    if p is None:
        return None
    c = nilpotency_class(G)
    m = int(round(math.log(G.order, p)))
    return m - c


def is_maximal_class(G: GroupTable) -> Optional[bool]:
    """Maximal class <=> coclass 1; groups of order p and p^2 count as maximal class."""
    p = is_p_group(G)
    if p is None:
        return None
    if G.order == p:
        return True
    return coclass(G) == 1


# -- the normal subgroup lattice -----------------------------------------------------


def all_normal_subgroups(G: GroupTable, order_cap: int = DEFAULT_LATTICE_ORDER_CAP) -> list[Subgroup]:
    """Every normal subgroup of G, as the join-closure of element normal closures.

    Any normal subgroup is the join of the normal closures of its elements, so
    the fixpoint below is exhaustive.  Results are sorted by (size, bits).
    """
    if G.order > order_cap:
        raise OrderCapExceeded(f"group order {G.order} exceeds lattice cap {order_cap}")
    atoms: dict[int, Subgroup] = {}
    seen_class: set[int] = set()
    for g in range(G.order):
        if g in seen_class or g == G.identity:
            continue
        # conjugate elements share a normal closure, so one per class suffices
        seen_class.update(int(x) for x in conjugates_of_set(G, np.array([g], dtype=np.int64)))
        nc = normal_closure(G, [g])
        atoms[nc.bits] = nc
    atom_list = sorted(atoms.values(), key=lambda s: (s.size, s.bits))
    found: dict[int, Subgroup] = {G.trivial().bits: G.trivial()}
    queue = [G.trivial()]
    while queue:
        cur = queue.pop()
        for a in atom_list:
            if a.bits & ~cur.bits == 0:
                continue
            j = product_set(G, cur, a)
            if j.bits not in found:
                found[j.bits] = j
                queue.append(j)
    return sorted(found.values(), key=lambda s: (s.size, s.bits))


def lattice_is_chain(lattice: Sequence[Subgroup]) -> bool:
    ordered = sorted(lattice, key=lambda s: s.size)
    for a, b in zip(ordered, ordered[1:]):
        if not a.issubset(b):
            return False
    return True


def is_waist(G: GroupTable, W: Subgroup, lattice: Optional[Sequence[Subgroup]] = None) -> bool:
    """True when every normal subgroup is comparable with W (W itself normal)."""
    if lattice is None:
        lattice = all_normal_subgroups(G)
    return all(W.comparable(N) for N in lattice)


def minimal_normal_subgroups(
    G: GroupTable,
    above: Optional[Subgroup] = None,
    lattice: Optional[Sequence[Subgroup]] = None,
) -> list[Subgroup]:
    """Minimal elements of the normal lattice strictly above `above` (default 1)."""
    if lattice is None:
        lattice = all_normal_subgroups(G)
    if above is None:
        above = G.trivial()
    cands = [N for N in lattice if above.bits != N.bits and above.issubset(N)]
    cands.sort(key=lambda s: s.size)
    mins: list[Subgroup] = []
    for N in cands:
        if not any(M.issubset(N) for M in mins):
            mins.append(N)
    return mins


def count_chief_series_capped(G: GroupTable, cap: int, lattice: Optional[Sequence[Subgroup]] = None) -> int:
    """Number of chief series (maximal chains in the normal lattice), saturating at cap."""
    if lattice is None:
        lattice = all_normal_subgroups(G)
    whole_bits = G.whole().bits
    memo: dict[int, int] = {}

    def count_from(S: Subgroup) -> int:
        if S.bits == whole_bits:
            return 1
        if S.bits in memo:
            return memo[S.bits]
        total = 0
        for M in minimal_normal_subgroups(G, above=S, lattice=lattice):
            total += count_from(M)
            if total >= cap:
                total = cap
                break
        memo[S.bits] = total
        return total

    return count_from(G.trivial())


# -- assorted predicates used by the theorem harness ---------------------------------


def hall_divisor_subgroup(G: GroupTable, primes: set[int]) -> Optional[Subgroup]:
    """The set of elements whose order only involves `primes`, when it is a subgroup."""
    ords = G.element_orders
    keep = [g for g in range(G.order) if set(_prime_factors(int(ords[g]))) <= primes]
    S = Subgroup.from_indices(keep, G.order)
    closed = subgroup_generated(G, keep)
    return S if closed.bits == S.bits else None


def is_frobenius_with_kernel(G: GroupTable, N: Subgroup) -> bool:
    """Frobenius with kernel N: N a proper nontrivial normal Hall subgroup and
    C_G(g) meets N trivially for every g outside N."""
    if N.is_trivial() or N.is_whole() or not is_normal(G, N):
        return False
    if math.gcd(N.size, G.order // N.size) != 1:
        return False
    for g in range(G.order):
        if g in N:
            continue
        cz = centralizer(G, g)
        if (cz.bits & N.bits).bit_count() != 1:  # intersection always has identity
            return False
    return True
