"""Exact ordinary character tables via the modular eigenvector method.

Class matrices are simultaneously diagonalized over F_p for a prime
p = 1 (mod exponent); each character value is then lifted to an exact
eigenvalue-multiplicity vector m with chi(g) = sum_k m[k] zeta_e^k, using the
discrete-Fourier multiplicity formula over powers of class representatives.
All multiplicities are bounded by the degree (< p), so the lift is exact.

Linear characters are stored as a single root-of-unity exponent per class;
nonlinear ones keep the full multiplicity vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cyclotomic import CyclotomicContext, CyclotomicValue, get_context
from .grouptable import GroupTable, Subgroup, exponent

__all__ = [
    "ClassData",
    "CharacterTable",
    "CharacterTableError",
    "conjugacy_classes",
    "compute_character_table",
    "verify_table",
]


class CharacterTableError(RuntimeError):
    """Internal failure while computing a character table."""


# -- conjugacy classes ---------------------------------------------------------------


@dataclass(frozen=True)
class ClassData:
    class_of: np.ndarray
    representatives: np.ndarray
    sizes: np.ndarray
    inverse_class: np.ndarray
    power_classes: tuple[tuple[int, ...], ...]  # per class, class of rep^t, t < order(rep)

    @property
    def nclasses(self) -> int:
        return int(self.representatives.size)

    def power_class(self, t: int, c: int) -> int:
        pc = self.power_classes[c]
        return pc[t % len(pc)]

    def rep_order(self, c: int) -> int:
        return len(self.power_classes[c])

    def members(self, c: int) -> np.ndarray:
        return np.nonzero(self.class_of == c)[0]

    def subgroup_from_classes(self, classes: np.ndarray, n: int) -> Subgroup:
        mask = classes[self.class_of]
        return Subgroup.from_indices(np.nonzero(mask)[0], n)


def conjugacy_classes(G: GroupTable) -> ClassData:
    n = G.order
    P = G.product
    xs = np.arange(n, dtype=np.int32)
    class_of = np.full(n, -1, dtype=np.int32)
    reps = []
    order = [G.identity] + [g for g in range(n) if g != G.identity]
    for g in order:
        if class_of[g] >= 0:
            continue
        orbit = np.unique(P[P[G.inverse[xs], g], xs])
        class_of[orbit] = len(reps)
        reps.append(g)
    reps_arr = np.array(reps, dtype=np.int32)
    sizes = np.bincount(class_of, minlength=len(reps)).astype(np.int64)
    inverse_class = class_of[G.inverse[reps_arr]].astype(np.int32)
    powers = []
    for g in reps:
        # seq[t] = class of g^t, t = 0..order(g)-1
        seq = []
        x = G.identity
        while True:
            seq.append(int(class_of[x]))
            x = int(P[x, g])
            if x == G.identity:
                break
        powers.append(tuple(seq))
    assert sizes.sum() == n and sizes[0] == 1
    return ClassData(class_of, reps_arr, sizes, inverse_class, tuple(powers))


# -- modular linear algebra ----------------------------------------------------------


def _inv_mod(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def _rref_mod(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    A = A.astype(np.int64) % p
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hit = np.nonzero(A[r:, c])[0]
        if hit.size == 0:
            continue
        t = r + int(hit[0])
        if t != r:
            A[[r, t]] = A[[t, r]]
        A[r] = (A[r] * _inv_mod(int(A[r, c]), p)) % p
        other = np.nonzero(A[:, c])[0]
        other = other[other != r]
        if other.size:
            A[other] = (A[other] - np.outer(A[other, c], A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def _nullspace_mod(A: np.ndarray, p: int) -> np.ndarray:
    """Kernel basis (rows) of A x = 0 over F_p."""
    R, pivots = _rref_mod(A, p)
    cols = A.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for t, fc in enumerate(free):
        basis[t, fc] = 1
        for rr, pc in enumerate(pivots):
            basis[t, pc] = (-R[rr, fc]) % p
    return basis


def _hessenberg_mod(A: np.ndarray, p: int) -> np.ndarray:
    H = A.astype(np.int64) % p
    d = H.shape[0]
    for c in range(d - 2):
        hit = np.nonzero(H[c + 1 :, c])[0]
        if hit.size == 0:
            continue
        t = c + 1 + int(hit[0])
        if t != c + 1:
            H[[c + 1, t]] = H[[t, c + 1]]
            H[:, [c + 1, t]] = H[:, [t, c + 1]]
        inv = _inv_mod(int(H[c + 1, c]), p)
        for rr in range(c + 2, d):
            if H[rr, c]:
                f = (H[rr, c] * inv) % p
                H[rr] = (H[rr] - f * H[c + 1]) % p
                H[:, c + 1] = (H[:, c + 1] + f * H[:, rr]) % p
    return H


def _charpoly_mod(A: np.ndarray, p: int) -> np.ndarray:
    """Coefficients (ascending) of det(xI - A) over F_p, via Hessenberg recurrence."""
    d = A.shape[0]
    if d == 0:
        return np.array([1], dtype=np.int64)
    H = _hessenberg_mod(A, p)
    polys = [np.array([1], dtype=np.int64)]
    for m in range(1, d + 1):
        cur = np.zeros(m + 1, dtype=np.int64)
        prev = polys[m - 1]
        cur[1 : m + 1] = prev
        cur[:m] = (cur[:m] - H[m - 1, m - 1] * prev) % p
        cur[m] %= p
        run = 1
        for t in range(1, m):
            run = (run * H[m - t, m - t - 1]) % p
            if run == 0:
                break
            coef = (H[m - 1 - t, m - 1] * run) % p
            if coef:
                cur[: m - t] = (cur[: m - t] - coef * polys[m - 1 - t]) % p
        polys.append(cur % p)
    return polys[d]


def _poly_roots_mod(coeffs: np.ndarray, p: int) -> list[int]:
    xs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in coeffs[::-1]:
        acc = (acc * xs + int(c)) % p
    return [int(x) for x in np.nonzero(acc == 0)[0]]


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    d = 3
    while d * d <= m:
        if m % d == 0:
            return False
        d += 2
    return True


def _dixon_prime(n: int, e: int, max_class: int, bound: int) -> int:
    lo = max(int(2 * math.isqrt(n)), max_class, 2)
    k = 1
    while True:
        p = k * e + 1
        if p > bound:
            raise CharacterTableError(f"no suitable prime = 1 mod {e} below {bound}")
        if p > lo and _is_prime(p):
            return p
        k += 1


def _simple_eigenvectors(A: np.ndarray, charpoly: np.ndarray, roots: list[int], p: int) -> list[np.ndarray]:
    """Left eigenvector rows of A when all d eigenvalues are simple.

    For each root lam, g_lam(x) = charpoly(x)/(x - lam) kills every other
    eigenspace, so g_lam(A^T) u projects u onto the lam-eigenline of A^T.  All
    projections share one Krylov basis, so the whole batch is a single matmul.
    """
    d = A.shape[0]
    At = A.T % p
    lam = np.array(sorted(roots), dtype=np.int64)
    # synthetic division columns: coeffs of charpoly/(x - lam) per root
    C = np.zeros((d, lam.size), dtype=np.int64)
    acc = np.full(lam.size, int(charpoly[d]) % p, dtype=np.int64)
    C[d - 1] = acc
    for t in range(d - 1, 0, -1):
        acc = (acc * lam + int(charpoly[t])) % p
        C[t - 1] = acc
    candidates = [np.ones(d, dtype=np.int64)] + [np.eye(d, dtype=np.int64)[i] for i in range(d)]
    found: dict[int, np.ndarray] = {}
    for u in candidates:
        if len(found) == lam.size:
            break
        K = np.zeros((d, d), dtype=np.int64)
        vec = u % p
        for t in range(d):
            K[:, t] = vec
            vec = (At @ vec) % p
        V = (K @ C) % p
        ok = np.all((At @ V) % p == (V * lam[None, :]) % p, axis=0) & np.any(V, axis=0)
        for j in np.nonzero(ok)[0]:
            found.setdefault(int(lam[j]), V[:, j].copy())
    if len(found) != lam.size:
        raise CharacterTableError("simple eigenvector batch failed")  # pragma: no cover
    return [found[int(l)] for l in lam]


def _primitive_root(p: int) -> int:
    fac = []
    m = p - 1
    d = 2
    while d * d <= m:
        if m % d == 0:
            fac.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        fac.append(m)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in fac):
            return g
    raise CharacterTableError("no primitive root found")  # pragma: no cover


# -- the character table -------------------------------------------------------------


class CharacterTable:
    """Exact character table; rows sorted by (degree, canonical value key).

    Rows 0..n_linear-1 are the linear characters (stored as root-of-unity
    exponents per class); the remaining rows carry full eigenvalue-multiplicity
    vectors of length `exponent`.
    """

    def __init__(
        self,
        group: GroupTable,
        classes: ClassData,
        exponent_: int,
        prime: int,
        lin_exp: np.ndarray,
        nl_mult: np.ndarray,
        nl_degrees: np.ndarray,
    ):
        self.group = group
        self.classes = classes
        self.exponent = exponent_
        self.prime = prime
        self.lin_exp = lin_exp  # (n_lin, r) int32
        self.nl_mult = nl_mult  # (n_nl, r, e) uint8
        self.nl_degrees = nl_degrees
        self.n_linear = int(lin_exp.shape[0])
        self.degrees = np.concatenate(
            [np.ones(self.n_linear, dtype=np.int64), nl_degrees.astype(np.int64)]
        )

    @property
    def nirreducibles(self) -> int:
        return int(self.degrees.size)

    @cached_property
    def context(self) -> CyclotomicContext:
        return get_context(self.exponent)

    def is_linear(self, i: int) -> bool:
        return i < self.n_linear

    def degree(self, i: int) -> int:
        return int(self.degrees[i])

    def value_mult(self, i: int, c: int) -> np.ndarray:
        out = np.zeros(self.exponent, dtype=np.int64)
        if i < self.n_linear:
            out[int(self.lin_exp[i, c])] = 1
        else:
            out[:] = self.nl_mult[i - self.n_linear, c]
        return out

    def value(self, i: int, c: int) -> CyclotomicValue:
        return CyclotomicValue.from_mult_vector(self.context, self.value_mult(i, c))

    def value_is_zero(self, i: int, c: int) -> bool:
        if i < self.n_linear:
            return False
        return bool(self.context.reduce_is_zero(self.value_mult(i, c)))

    @cached_property
    def zero_mask(self) -> np.ndarray:
        """(r_irr, r_cls) boolean: value is exactly zero."""
        r = self.classes.nclasses
        out = np.zeros((self.nirreducibles, r), dtype=bool)
        if self.nl_mult.shape[0]:
            red = self.context.reduce(self.nl_mult.astype(np.int64))
            out[self.n_linear :] = ~np.any(red, axis=-1)
        return out

    @cached_property
    def kernel_class_mask(self) -> np.ndarray:
        """(r_irr, r_cls) boolean: class is in ker(chi), i.e. value = degree at k=0."""
        out = np.zeros((self.nirreducibles, self.classes.nclasses), dtype=bool)
        out[: self.n_linear] = self.lin_exp == 0
        if self.nl_mult.shape[0]:
            out[self.n_linear :] = self.nl_mult[:, :, 0] == self.nl_degrees[:, None]
        return out

    @cached_property
    def center_class_mask(self) -> np.ndarray:
        """(r_irr, r_cls) boolean: |chi(g)| = chi(1), i.e. mult concentrated at one k."""
        out = np.ones((self.nirreducibles, self.classes.nclasses), dtype=bool)
        if self.nl_mult.shape[0]:
            out[self.n_linear :] = self.nl_mult.max(axis=-1) == self.nl_degrees[:, None]
        return out

    def kernel(self, i: int) -> Subgroup:
        return self.classes.subgroup_from_classes(self.kernel_class_mask[i], self.group.order)

    def char_center(self, i: int) -> Subgroup:
        return self.classes.subgroup_from_classes(self.center_class_mask[i], self.group.order)

    def cd_set(self) -> tuple[int, ...]:
        return tuple(sorted(set(int(d) for d in self.degrees)))

    # padded support arrays for the exact orthogonality engine
    @cached_property
    def _support(self) -> tuple[np.ndarray, np.ndarray]:
        r = self.classes.nclasses
        R = self.nirreducibles
        if self.nl_mult.shape[0]:
            mask = self.nl_mult > 0
            S = max(1, int(mask.sum(axis=-1).max()))
        else:
            S = 1
        exps = np.zeros((R, r, S), dtype=np.int64)
        muls = np.zeros((R, r, S), dtype=np.int64)
        exps[: self.n_linear, :, 0] = self.lin_exp
        muls[: self.n_linear, :, 0] = 1
        if self.nl_mult.shape[0]:
            mask = self.nl_mult > 0
            pos = np.argsort(~mask, axis=-1, kind="stable")[..., :S]
            exps[self.n_linear :] = pos
            muls[self.n_linear :] = np.take_along_axis(self.nl_mult, pos, axis=-1)
        return exps, muls


def compute_character_table(G: GroupTable, prime_bound: int = 10_000_000) -> CharacterTable:
    classes = conjugacy_classes(G)
    r = classes.nclasses
    n = G.order
    e = exponent(G)
    if n == 1:
        return CharacterTable(
            G, classes, 1, 2, np.zeros((1, 1), dtype=np.int32), np.zeros((0, 1, 1), dtype=np.uint8), np.zeros(0, dtype=np.int64)
        )
    p = _dixon_prime(n, e, int(classes.sizes.max()), prime_bound)
    reps = classes.representatives
    P = G.product
    class_of = classes.class_of

    def class_matrix(ci: int) -> np.ndarray:
        members = classes.members(ci).astype(np.int32)
        prod = P[np.ix_(G.inverse[members], reps.astype(np.int64))]
        J = class_of[prod]
        M = np.zeros((r, r), dtype=np.int64)
        cols = np.broadcast_to(np.arange(r, dtype=np.int64), J.shape)
        np.add.at(M, (J.ravel(), cols.ravel()), 1)
        return M % p

    # Rows of a basis B store eigenvector candidates v^T, so the action of the
    # class matrix M (columns convention M v = omega v) is B -> B M^T.
    spaces: list[tuple[np.ndarray, list[int]]] = [(np.eye(r, dtype=np.int64), list(range(r)))]
    by_size = sorted(range(1, r), key=lambda c: (int(classes.sizes[c]), c))
    for ci in by_size:
        if all(B.shape[0] == 1 for B, _ in spaces):
            break
        N = class_matrix(ci).T
        new_spaces: list[tuple[np.ndarray, list[int]]] = []
        for B, piv in spaces:
            d = B.shape[0]
            if d == 1:
                new_spaces.append((B, piv))
                continue
            BN = (B @ N) % p
            A = BN[:, piv] % p
            if not np.array_equal((A @ B) % p, BN):
                raise CharacterTableError("subspace is not invariant")  # pragma: no cover
            charpoly = _charpoly_mod(A, p)
            roots = _poly_roots_mod(charpoly, p)
            if len(roots) == 1:
                new_spaces.append((B, piv))
                continue
            if len(roots) == d:
                # all eigenvalues simple: batch eigenvectors via Krylov + synthetic division
                for row in _simple_eigenvectors(A, charpoly, roots, p):
                    nb, npiv = _rref_mod((row[None, :] @ B) % p, p)
                    new_spaces.append((nb, npiv))
                spaces_delta = d
            else:
                spaces_delta = 0
                for lam in sorted(roots):
                    K = _nullspace_mod(((A - lam * np.eye(d, dtype=np.int64)) % p).T, p)
                    if K.shape[0] == 0:
                        continue
                    nb, npiv = _rref_mod((K @ B) % p, p)
                    spaces_delta += nb.shape[0]
                    new_spaces.append((nb, npiv))
            if spaces_delta != d:
                raise CharacterTableError("eigenspace splitting failure")  # pragma: no cover
        spaces = new_spaces
    if any(B.shape[0] != 1 for B, _ in spaces):
        raise CharacterTableError("class matrices did not separate characters")  # pragma: no cover

    sizes = classes.sizes.astype(np.int64)
    inv_cls = classes.inverse_class
    size_inv = np.array([_inv_mod(int(h), p) for h in sizes], dtype=np.int64)
    g0 = _primitive_root(p)
    z_e = pow(g0, (p - 1) // e, p)
    # discrete logarithms base z_e over the subgroup of e-th roots of unity
    dlog = np.full(p, -1, dtype=np.int64)
    w = 1
    for k in range(e):
        dlog[w] = k
        w = (w * z_e) % p

    lin_chi = []
    nl_chi = []
    nl_deg_list = []
    for B, _ in spaces:
        v = B[0] % p
        if v[0] == 0:
            raise CharacterTableError("eigenvector with zero identity component")  # pragma: no cover
        v = (v * _inv_mod(int(v[0]), p)) % p
        s = int(np.sum(v * v[inv_cls] % p * size_inv % p) % p)
        d2 = (n * _inv_mod(s, p)) % p
        deg = next((t for t in range(1, math.isqrt(n) + 1) if (t * t) % p == d2), None)
        if deg is None:
            raise CharacterTableError("degree recovery failed")  # pragma: no cover
        chi_mod = (deg * v % p) * size_inv % p  # chi(x_j) mod p per class
        if deg == 1:
            lin_chi.append(chi_mod)
        else:
            nl_chi.append(chi_mod)
            nl_deg_list.append(deg)

    # linear rows: each value is a single e-th root of unity, so a discrete log
    lin_rows: list[np.ndarray] = []
    for chi_mod in lin_chi:
        ks = dlog[chi_mod]
        if np.any(ks < 0):
            raise CharacterTableError("linear value is not a root of unity")  # pragma: no cover
        lin_rows.append(ks.astype(np.int32))

    # nonlinear rows: inverse DFT over powers of each class representative,
    # batched across rows, one small matrix per representative order
    nl_rows: list[tuple[int, np.ndarray]] = []
    if nl_chi:
        X = np.stack(nl_chi)  # (n_nl, r)
        degs = np.array(nl_deg_list, dtype=np.int64)
        mvec = np.zeros((X.shape[0], r, e), dtype=np.int64)
        dft_cache: dict[int, np.ndarray] = {}
        for c in range(r):
            o = classes.rep_order(c)
            W = dft_cache.get(o)
            if W is None:
                zo_inv = _inv_mod(pow(z_e, e // o, p), p)
                col = np.array([pow(zo_inv, t, p) for t in range(o)], dtype=np.int64)
                W = np.ones((o, o), dtype=np.int64)
                for s_ in range(1, o):
                    W[s_] = (W[s_ - 1] * col) % p  # W[s, t] = zo^{-s t}
                W = (W * _inv_mod(o, p)) % p
                dft_cache[o] = W
            pc = np.array([classes.power_class(t, c) for t in range(o)], dtype=np.int64)
            mu = (X[:, pc] @ W.T) % p  # (n_nl, o)
            if np.any(mu > degs[:, None]):
                raise CharacterTableError("multiplicity lift out of range")  # pragma: no cover
            mvec[:, c, (np.arange(o) * (e // o)) % e] = mu
        if not np.array_equal(mvec.sum(axis=2), np.broadcast_to(degs[:, None], (X.shape[0], r))):
            raise CharacterTableError("multiplicities do not sum to the degree")  # pragma: no cover
        nl_rows = [(int(degs[t]), mvec[t].astype(np.uint8)) for t in range(X.shape[0])]

    lin_rows.sort(key=lambda row: row.tobytes())
    nl_rows.sort(key=lambda t: (t[0], t[1].tobytes()))
    lin_exp = np.array(lin_rows, dtype=np.int32).reshape(len(lin_rows), r)
    if nl_rows:
        nl_mult = np.stack([m for _, m in nl_rows])
        nl_deg = np.array([d for d, _ in nl_rows], dtype=np.int64)
    else:
        nl_mult = np.zeros((0, r, e), dtype=np.uint8)
        nl_deg = np.zeros(0, dtype=np.int64)
    table = CharacterTable(G, classes, e, p, lin_exp, nl_mult, nl_deg)
    if int(np.sum(table.degrees**2)) != n:
        raise CharacterTableError("degree squares do not sum to the group order")
    return table


# -- exact verification --------------------------------------------------------------


def _orthogonality_violations(table: CharacterTable) -> list[str]:
    ctx = table.context
    e = table.exponent
    cls = table.classes
    r = cls.nclasses
    R = table.nirreducibles
    n = table.group.order
    exps, muls = table._support
    inv = cls.inverse_class
    out: list[str] = []

    # rows: sum_c |c| chi_i(c) chi_j(c^-1) = n delta_ij
    exps_inv = exps[:, inv, :]
    muls_inv = muls[:, inv, :]
    weights = muls * cls.sizes[None, :, None]
    offset = (np.arange(R, dtype=np.int64) * e)[:, None, None, None]
    for i in range(R):
        idx = (exps[i][None, :, :, None] + exps_inv[:, :, None, :]) % e
        w = weights[i][None, :, :, None] * muls_inv[:, :, None, :]
        T = np.bincount((idx + offset).ravel(), weights=w.ravel().astype(np.float64), minlength=R * e)
        T = np.rint(T).astype(np.int64).reshape(R, e)
        red = ctx.reduce(T)
        expect = np.zeros_like(red)
        expect[i, 0] = n
        bad = np.nonzero(np.any(red != expect, axis=1))[0]
        for j in bad:
            out.append(f"row orthogonality fails for irreducibles ({i},{int(j)})")
    # columns: sum_i chi_i(c) chi_i(c'^-1) = delta_cc' |C_G(x_c)|
    offset_c = (np.arange(r, dtype=np.int64) * e)[None, :, None, None]
    for c in range(r):
        idx = (exps[:, c, :][:, None, :, None] + exps_inv[:, :, None, :]) % e
        w = muls[:, c, :][:, None, :, None] * muls_inv[:, :, None, :]
        T = np.bincount((idx + offset_c).ravel(), weights=w.ravel().astype(np.float64), minlength=r * e)
        T = np.rint(T).astype(np.int64).reshape(r, e)
        red = ctx.reduce(T)
        expect = np.zeros_like(red)
        expect[c, 0] = n // int(cls.sizes[c])
        bad = np.nonzero(np.any(red != expect, axis=1))[0]
        for cp in bad:
            out.append(f"column orthogonality fails for classes ({c},{int(cp)})")
    return out


def verify_table(table: CharacterTable, G: GroupTable | None = None) -> list[str]:
    """Exact self-consistency checks; returns human-readable violations (empty = ok)."""
    if G is None:
        G = table.group
    out: list[str] = []
    n = G.order
    if int(np.sum(table.degrees.astype(object) ** 2)) != n:
        out.append(f"sum of squared degrees {int(np.sum(table.degrees**2))} != group order {n}")
    if table.nirreducibles != table.classes.nclasses:
        out.append(
            f"irreducible count {table.nirreducibles} != class count {table.classes.nclasses}"
        )
        return out
    for d in table.cd_set():
        if n % d != 0:
            out.append(f"degree {d} does not divide the group order")
    out.extend(_orthogonality_violations(table))
    return out
