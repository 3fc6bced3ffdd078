"""Explicit group families: the example constructions and standard auxiliaries.

Class-2 families with order-p generators are built as power-commutator
presentations; semidirect-product families get their tables filled directly
from the defining multiplication formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .grouptable import GroupTable, GroupTableError, Subgroup, subgroup_table
from . import grouptable as gt
from .pcpres import PcPresentation, build_from_pc_presentation

__all__ = [
    "Example1Spec",
    "Example4Spec",
    "example1",
    "example3",
    "example4",
    "cyclic",
    "abelian",
    "dihedral",
    "quaternion",
    "semidihedral",
    "extraspecial",
    "heisenberg",
    "sl_2_3",
    "frobenius_pqr",
    "direct_product",
    "pc_export",
]

DEFAULT_BUILD_CAP = 1 << 16


def _check_prime(p: int) -> None:
    if p < 2 or any(p % d == 0 for d in range(2, int(math.isqrt(p)) + 1)):
        raise ValueError(f"{p} is not prime")


def _check_cap(order: int, cap: int) -> None:
    if order > cap:
        raise GroupTableError(f"construction order {order} exceeds cap {cap}")


# -- paper example families ----------------------------------------------------------


@dataclass(frozen=True)
class Example1Spec:
    """Class-2 family with generators x_1..x_{2 n_m}, central z_1..z_m, all of order p."""

    p: int
    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        _check_prime(self.p)
        if not self.exponents or any(n <= 0 for n in self.exponents):
            raise ValueError("exponents must be positive")
        if list(self.exponents) != sorted(set(self.exponents)):
            raise ValueError("exponents must be strictly increasing")

    @property
    def ngens(self) -> int:
        return 2 * self.exponents[-1] + len(self.exponents)

    def order(self) -> int:
        return self.p**self.ngens


def example1(spec: Example1Spec, order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    """Group with cd = {1, p^{n_1}, ..., p^{n_m}}: commutators [x_i, x_{i+n_j}] = z_j."""
    _check_cap(spec.order(), order_cap)
    p = spec.p
    nm = spec.exponents[-1]
    m = len(spec.exponents)
    k = spec.ngens
    comms: dict[tuple[int, int], tuple[int, ...]] = {}
    for j, nj in enumerate(spec.exponents):
        for i in range(1, nj + 1):
            lo, hi = i - 1, i + nj - 1  # 0-based x_i, x_{i+n_j}
            word = [0] * k
            word[2 * nm + j] = (-1) % p  # [x_hi, x_lo] = z_j^{-1} since [x_lo, x_hi] = z_j
            comms[(hi, lo)] = tuple(word)
    pres = PcPresentation(
        (p,) * k,
        tuple((0,) * k for _ in range(k)),
        comms,
        label=f"example1(p={p},A={{{','.join(str(p**n) for n in spec.exponents)}}})",
    )
    return build_from_pc_presentation(pres, order_cap=order_cap)


def example3(p: int, n: int, order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    """C_{p^{n+1}} semidirect C_{p^n} with x^y = x^{1+p}; requires odd p."""
    _check_prime(p)
    if p == 2:
        raise ValueError("example3 requires an odd prime")
    if n < 1:
        raise ValueError("n must be positive")
    M = p ** (n + 1)
    N = p**n
    _check_cap(M * N, order_cap)
    a = np.arange(M * N, dtype=np.int64)
    i, j = divmod(a, N)
    # (i, j) * (i', j') = (i + i' (1+p)^j mod M, j + j' mod N)
    tpow = np.array([pow(1 + p, int(t), M) for t in range(N)], dtype=np.int64)
    I2 = i[:, None] + i[None, :] * tpow[j][:, None]
    J2 = j[:, None] + j[None, :]
    table = ((I2 % M) * N + (J2 % N)).astype(np.int32)
    return GroupTable(table, label=f"example3(p={p},n={n})")


@dataclass(frozen=True)
class Example4Spec:
    """Leveled class-2 family; level i carries m_i cross-commutator matrices.

    matrices[i][j] is the m_i x m_i matrix giving the z_{i,j} exponent of
    [x_k, x_{m_i + l}] (1-based k, l <= m_i within the level's window).
    """

    p: int
    sizes: tuple[int, ...]
    matrices: tuple[tuple[tuple[tuple[int, ...], ...], ...], ...]

    def __post_init__(self) -> None:
        _check_prime(self.p)
        if not self.sizes or any(s <= 0 for s in self.sizes):
            raise ValueError("sizes must be positive")
        for a, b in zip(self.sizes, self.sizes[1:]):
            if not a <= b // 2:
                raise ValueError("sizes must satisfy m_i <= m_{i+1}/2")
        if len(self.matrices) != len(self.sizes):
            raise ValueError("need one matrix family per level")
        for mi, fam in zip(self.sizes, self.matrices):
            if len(fam) != mi:
                raise ValueError(f"level with m={mi} needs exactly {mi} matrices")
            for A in fam:
                arr = np.array(A, dtype=np.int64)
                if arr.shape != (mi, mi):
                    raise ValueError(f"matrix shape {arr.shape} != ({mi},{mi})")
                if arr.min() < 0 or arr.max() >= self.p:
                    raise ValueError("matrix entries must lie in 0..p-1")

    def span_witness(self) -> Optional[np.ndarray]:
        """A nonzero singular member of some level's matrix span, or None."""
        for mi, fam in zip(self.sizes, self.matrices):
            mats = [np.array(A, dtype=np.int64) for A in fam]
            for coeffs in np.ndindex(*([self.p] * mi)):
                if not any(coeffs):
                    continue
                M = sum(c * A for c, A in zip(coeffs, mats)) % self.p
                if _det_mod(M, self.p) == 0:
                    return M
        return None

    def order(self) -> int:
        return self.p ** (2 * self.sizes[-1] + sum(self.sizes))

    @staticmethod
    def default(p: int, sizes: Sequence[int]) -> "Example4Spec":
        """Field-multiplication matrices over GF(p^{m_i}): a known nonsingular-span family."""
        fams = []
        for mi in sizes:
            mul = _gf_multiplication_matrices(p, mi)
            fams.append(tuple(tuple(tuple(int(x) for x in row) for row in A) for A in mul))
        return Example4Spec(p, tuple(int(s) for s in sizes), tuple(fams))


def _det_mod(M: np.ndarray, p: int) -> int:
    M = M.copy() % p
    n = M.shape[0]
    det = 1
    for c in range(n):
        piv = np.nonzero(M[c:, c])[0]
        if piv.size == 0:
            return 0
        t = c + int(piv[0])
        if t != c:
            M[[c, t]] = M[[t, c]]
            det = -det % p
        det = det * int(M[c, c]) % p
        inv = pow(int(M[c, c]), p - 2, p)
        for rr in range(c + 1, n):
            if M[rr, c]:
                M[rr] = (M[rr] - M[rr, c] * inv * M[c]) % p
    return det % p


def _gf_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree m over F_p."""
    if m == 1:
        return (0, 1)
    for tail in np.ndindex(*([p] * m)):
        coeffs = tuple(tail) + (1,)
        if _poly_is_irreducible(coeffs, p):
            return coeffs
    raise RuntimeError("no irreducible polynomial found")  # pragma: no cover


def _poly_is_irreducible(coeffs: tuple[int, ...], p: int) -> bool:
    m = len(coeffs) - 1
    # no roots and not divisible by any monic irreducible of smaller degree;
    # for the tiny m used here, trial division over all monic divisors is fine
    def poly_mod(num: list[int], den: tuple[int, ...]) -> list[int]:
        num = list(num)
        dn = len(den) - 1
        for i in range(len(num) - 1, dn - 1, -1):
            if num[i]:
                c = num[i]
                for t in range(dn + 1):
                    num[i - dn + t] = (num[i - dn + t] - c * den[t]) % p
        return num[:dn]

    for d in range(1, m // 2 + 1):
        for tail in np.ndindex(*([p] * d)):
            den = tuple(tail) + (1,)
            if not any(poly_mod(list(coeffs), den)):
                return False
    return True


def _gf_multiplication_matrices(p: int, m: int) -> list[np.ndarray]:
    """Matrices of multiplication by the basis 1, x, ..., x^{m-1} in GF(p^m)."""
    irr = _gf_irreducible(p, m)
    red = np.zeros((2 * m, m), dtype=np.int64)
    for s in range(m):
        red[s, s] = 1
    for s in range(m, 2 * m):
        row = np.zeros(2 * m, dtype=np.int64)
        row[s] = 1
        # reduce x^s
        for i in range(2 * m - 1, m - 1, -1):
            if row[i]:
                c = row[i]
                row[i] = 0
                for t in range(m):
                    row[i - m + t] = (row[i - m + t] + c * (-irr[t])) % p
        red[s] = row[:m]
    mats = []
    for j in range(m):
        A = np.zeros((m, m), dtype=np.int64)
        for k in range(m):
            A[k] = red[j + k]
        mats.append(A % p)
    return mats


def example4(spec: Example4Spec, order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    """Leveled generalization: cd = {1, p^{m_1}, ..., p^{m_r}}, |G'| = p^{sum m_i}."""
    _check_cap(spec.order(), order_cap)
    bad = spec.span_witness()
    if bad is not None:
        raise ValueError(f"matrix family has a singular nonzero span member:\n{bad}")
    p = spec.p
    sizes = spec.sizes
    nx = 2 * sizes[-1]
    nz = sum(sizes)
    k = nx + nz
    zoff = [nx + sum(sizes[:i]) for i in range(len(sizes))]
    comms: dict[tuple[int, int], tuple[int, ...]] = {}
    for li, mi in enumerate(sizes):
        fam = [np.array(A, dtype=np.int64) for A in spec.matrices[li]]
        for kk in range(1, mi + 1):  # 1-based x_k, k <= m_i
            for ll in range(1, mi + 1):  # x_{m_i + ll}
                hi = mi + ll - 1
                lo = kk - 1
                word = [0] * k
                nonzero = False
                for j in range(mi):
                    a = int(fam[j][kk - 1, ll - 1]) % p
                    if a:
                        word[zoff[li] + j] = (-a) % p  # [x_hi, x_lo] = prod z^{-a}
                        nonzero = True
                if nonzero:
                    comms[(hi, lo)] = tuple(word)
    label_sizes = ",".join(str(s) for s in sizes)
    pres = PcPresentation(
        (p,) * k,
        tuple((0,) * k for _ in range(k)),
        comms,
        label=f"example4(p={p},m=({label_sizes}))",
    )
    return build_from_pc_presentation(pres, order_cap=order_cap)


# -- standard families ---------------------------------------------------------------


def cyclic(n: int, order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    if n < 1:
        raise ValueError("order must be positive")
    _check_cap(n, order_cap)
    a = np.arange(n, dtype=np.int64)
    return GroupTable(((a[:, None] + a[None, :]) % n).astype(np.int32), label=f"C{n}")


def abelian(invariants: Sequence[int], order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    if not invariants:
        raise ValueError("need at least one cyclic factor")
    G = cyclic(int(invariants[0]), order_cap)
    for m in invariants[1:]:
        G = direct_product(G, cyclic(int(m), order_cap), order_cap=order_cap)
    G.label = "C" + "xC".join(str(int(m)) for m in invariants)
    return G


def direct_product(G: GroupTable, H: GroupTable, order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    n, m = G.order, H.order
    _check_cap(n * m, order_cap)
    gi, hi = np.divmod(np.arange(n * m, dtype=np.int64), m)
    gprod = G.product.astype(np.int64)[np.ix_(gi, gi)]
    hprod = H.product.astype(np.int64)[np.ix_(hi, hi)]
    table = (gprod * m + hprod).astype(np.int32)
    return GroupTable(table, label=f"{G.label}x{H.label}" if G.label and H.label else "")


def dihedral(order: int, order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    if order < 4 or order % 2:
        raise ValueError("dihedral order must be an even integer >= 4")
    _check_cap(order, order_cap)
    m = order // 2
    a = np.arange(order, dtype=np.int64)
    i, s = divmod(a, 2)
    sign = np.where(s == 1, -1, 1)
    I2 = (i[:, None] + sign[:, None] * i[None, :]) % m
    S2 = (s[:, None] + s[None, :]) % 2
    return GroupTable((I2 * 2 + S2).astype(np.int32), label=f"D{order}")


def quaternion(order: int, order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    if order < 8 or order & (order - 1):
        raise ValueError("generalized quaternion order must be a power of two >= 8")
    _check_cap(order, order_cap)
    m = order // 2
    a = np.arange(order, dtype=np.int64)
    i, s = divmod(a, 2)
    sign = np.where(s == 1, -1, 1)
    I2 = (i[:, None] + sign[:, None] * i[None, :] + (s[:, None] * s[None, :]) * (m // 2)) % m
    S2 = (s[:, None] + s[None, :]) % 2
    return GroupTable((I2 * 2 + S2).astype(np.int32), label=f"Q{order}")


def semidihedral(order: int, order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    if order < 16 or order & (order - 1):
        raise ValueError("semidihedral order must be a power of two >= 16")
    _check_cap(order, order_cap)
    m = order // 2
    t = m // 2 - 1  # a^b = a^t with t = 2^{k-2} - 1
    a = np.arange(order, dtype=np.int64)
    i, s = divmod(a, 2)
    tw = np.where(s == 1, t, 1)
    I2 = (i[:, None] + tw[:, None] * i[None, :]) % m
    S2 = (s[:, None] + s[None, :]) % 2
    return GroupTable((I2 * 2 + S2).astype(np.int32), label=f"SD{order}")


def extraspecial(p: int, variant: str, order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    """Order p^3: '+' is exponent p (D8 for p=2), '-' is exponent p^2 (Q8 for p=2)."""
    _check_prime(p)
    if variant not in {"+", "-"}:
        raise ValueError("variant must be '+' or '-'")
    _check_cap(p**3, order_cap)
    if p == 2:
        G = dihedral(8) if variant == "+" else quaternion(8)
        G.label = f"ES(2,{variant})"
        return G
    if variant == "+":
        pres = PcPresentation(
            (p, p, p),
            ((0, 0, 0), (0, 0, 0), (0, 0, 0)),
            {(1, 0): (0, 0, (-1) % p)},  # [y, x] = z^{-1}, i.e. [x, y] = z
            label=f"ES({p},+)",
        )
        return build_from_pc_presentation(pres, order_cap=order_cap)
    G = example3(p, 1, order_cap)
    G.label = f"ES({p},-)"
    return G


def heisenberg(p: int, m: int, order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    """Upper unitriangular 3x3 matrices over GF(p^m); ultraspecial of order p^{3m}."""
    _check_prime(p)
    if m < 1:
        raise ValueError("field degree must be positive")
    q = p**m
    _check_cap(q**3, order_cap)
    mats = _gf_multiplication_matrices(p, m)
    # field element index = base-p digits (digit t weighted by p^t)
    weights = np.array([p**t for t in range(m)], dtype=np.int64)
    digits = (np.arange(q, dtype=np.int64)[:, None] // weights[None, :]) % p
    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
    mulmat = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        va = digits[a]
        Ma = sum(int(va[j]) * mats[j] for j in range(m)) % p
        mulmat[a] = ((digits @ Ma.T) % p) @ weights
    n = q**3
    idx = np.arange(n, dtype=np.int64)
    ab, c = divmod(idx, q)
    a, b = divmod(ab, q)
    A2 = add[a[:, None], a[None, :]]
    B2 = add[b[:, None], b[None, :]]
    C2 = add[add[c[:, None], c[None, :]], mulmat[a[:, None], b[None, :]]]
    table = ((A2 * q + B2) * q + C2).astype(np.int32)
    return GroupTable(table, label=f"H({p}^{m})")


def sl_2_3(order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    """SL(2,3) as 2x2 matrices over F_3."""
    _check_cap(24, order_cap)
    mats = []
    for a in range(3):
        for b in range(3):
            for c in range(3):
                for d in range(3):
                    if (a * d - b * c) % 3 == 1:
                        mats.append((a, b, c, d))
    index = {m: i for i, m in enumerate(mats)}
    n = len(mats)
    table = np.zeros((n, n), dtype=np.int32)
    for i, (a, b, c, d) in enumerate(mats):
        for j, (e, f, g, h) in enumerate(mats):
            prod = ((a * e + b * g) % 3, (a * f + b * h) % 3, (c * e + d * g) % 3, (c * f + d * h) % 3)
            table[i, j] = index[prod]
    return GroupTable(table, label="SL(2,3)")


def frobenius_pqr(p: int, q: int, r: int, order_cap: int = DEFAULT_BUILD_CAP) -> GroupTable:
    """Frobenius group of order pqr with kernel C_q x C_r and complement C_p.

    The complement generator acts on each kernel part by the smallest residue
    of multiplicative order p, which makes the construction deterministic.
    """
    for x in (p, q, r):
        _check_prime(x)
    if q == r:
        raise ValueError("kernel primes must be distinct")
    if (q - 1) % p or (r - 1) % p:
        raise ValueError(f"need p | q-1 and p | r-1, got p={p}, q={q}, r={r}")
    _check_cap(p * q * r, order_cap)
    uq = _smallest_order_p_unit(p, q)
    ur = _smallest_order_p_unit(p, r)
    n = p * q * r
    idx = np.arange(n, dtype=np.int64)
    abq, c = divmod(idx, p)
    a, b = divmod(abq, r)
    uqp = np.array([pow(uq, int(t), q) for t in range(p)], dtype=np.int64)
    urp = np.array([pow(ur, int(t), r) for t in range(p)], dtype=np.int64)
    A2 = (a[:, None] + a[None, :] * uqp[c][:, None]) % q
    B2 = (b[:, None] + b[None, :] * urp[c][:, None]) % r
    C2 = (c[:, None] + c[None, :]) % p
    table = ((A2 * r + B2) * p + C2).astype(np.int32)
    return GroupTable(table, label=f"F({p},{q},{r})")


def _smallest_order_p_unit(p: int, q: int) -> int:
    for u in range(2, q):
        if pow(u, p, q) == 1 and u != 1:
            return u
    raise ValueError(f"no unit of order {p} mod {q}")  # pragma: no cover


# -- generic pc export ---------------------------------------------------------------


def pc_export(G: GroupTable, label: Optional[str] = None) -> PcPresentation:
    """Power-commutator presentation of a solvable group, via a subnormal
    chain with prime cyclic factors refined through derived subgroups."""
    if not gt.is_solvable(G):
        raise GroupTableError("pc export requires a solvable group")
    chain: list[Subgroup] = [G.whole()]
    while chain[-1].size > 1:
        chain.append(_prime_index_step(G, chain[-1]))
    gens: list[int] = []
    orders: list[int] = []
    for T, U in zip(chain, chain[1:]):
        cand = [int(x) for x in T.indices() if x not in U]
        gens.append(min(cand))
        orders.append(T.size // U.size)

    k = len(gens)
    memberships = [S.bits for S in chain]

    def normal_form(x: int) -> tuple[int, ...]:
        out = [0] * k
        for t in range(k):
            g = gens[t]
            for e in range(orders[t]):
                if (memberships[t + 1] >> x) & 1:
                    out[t] = e
                    break
                x = G.mul(G.inv(g), x)
            else:
                raise AssertionError("element escaped its coset chain")  # pragma: no cover
        return tuple(out)

    powers = []
    for t, g in enumerate(gens):
        powers.append(normal_form(G.power(g, orders[t])))
    comms = {}
    for j in range(k):
        for i in range(j):
            gj, gi = gens[j], gens[i]
            c = G.mul(G.mul(G.inv(gj), G.inv(gi)), G.mul(gj, gi))
            w = normal_form(c)
            if any(w):
                comms[(j, i)] = w
    return PcPresentation(tuple(orders), tuple(powers), comms, label=label or G.label)


def _prime_index_step(G: GroupTable, T: Subgroup) -> Subgroup:
    """A subgroup of prime index in T, normal in T, containing T'."""
    Ttab, idx = subgroup_table(G, T)
    D = gt.commutator_subgroup(Ttab, Ttab.whole(), Ttab.whole())
    qmap = gt.quotient(Ttab, D)
    Q = qmap.target
    q = min(gt._prime_factors(Q.order))
    # Q/<q-th powers> is elementary abelian; any of its hyperplanes pulls back
    # to an index-q subgroup of T containing T'
    qth = gt.subgroup_generated(Q, [int(Q.power(g, q)) for g in range(Q.order)] + [Q.identity])
    qq = gt.quotient(Q, qth)
    E = qq.target
    e0 = min(g for g in range(E.order) if g != E.identity)
    hyper = _hyperplane_avoiding(E, e0, q)
    inQ = qq.preimage(hyper)
    inT = Subgroup.from_indices(idx[qmap.preimage(inQ).indices()], G.order)
    assert T.size == inT.size * q
    return inT


def _hyperplane_avoiding(E: GroupTable, h: int, q: int) -> Subgroup:
    """An index-q subgroup of the elementary abelian E not containing h."""
    if E.order == q:
        return E.trivial()
    # grow a subgroup from elements independent of h until index q
    cur = E.trivial()
    for g in range(E.order):
        if g == E.identity or g in cur:
            continue
        grown = gt.subgroup_generated(E, list(cur.indices()) + [g])
        if h not in grown:
            cur = grown
            if cur.size * q == E.order:
                return cur
    raise AssertionError("no hyperplane found")  # pragma: no cover
