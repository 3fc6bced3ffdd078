"""Generate the bundled p-group corpora (orders 32 and 243, plus named entries).

Every group of order p^{k+1} is a central extension of a group of order p^k
by C_p, so the corpus is produced by walking extensions up from C_p and
deduplicating up to isomorphism.  Each stage's class count is checked against
the classical census (2, 5, 14, 51, 267 for 2-groups; 2, 5, 15, 67 for
3-groups), which makes the pipeline self-validating.

Run from the repository root:  python tools/gen_corpus.py
"""

from __future__ import annotations

import itertools
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from centerchain import grouptable as gt
from centerchain.chartable import conjugacy_classes, _nullspace_mod
from centerchain.classify import classify
from centerchain.formats import emit_pc
from centerchain.grouptable import GroupTable
from centerchain.pcpres import PcPresentation, build_from_pc_presentation

EXPECTED_COUNTS = {
    (2, 1): 1, (2, 2): 2, (2, 3): 5, (2, 4): 14, (2, 5): 51, (2, 6): 267,
    (3, 1): 1, (3, 2): 2, (3, 3): 5, (3, 4): 15, (3, 5): 67,
}


# -- symbolic collection with tail bookkeeping -----------------------------------


class TailCollector:
    """Collection in the extension of a parent presentation by a central C_p,
    tracking the z-exponent as an integer vector over the relation tails."""

    def __init__(self, parent: PcPresentation):
        self.parent = parent
        self.k = parent.ngens
        self.p = parent.orders[0]
        self.tail_pow = {i: i for i in range(self.k)}
        self.tail_comm = {}
        pos = self.k
        for j in range(1, self.k):
            for i in range(j):
                self.tail_comm[(j, i)] = pos
                pos += 1
        self.ntails = pos

    def collect(self, letters: list[int]) -> tuple[tuple[int, ...], np.ndarray]:
        word = list(letters)
        z = np.zeros(self.ntails, dtype=np.int64)
        pres = self.parent
        while True:
            pos = -1
            for t in range(len(word) - 1):
                if word[t] > word[t + 1]:
                    pos = t
                    break
            if pos >= 0:
                j, i = word[pos], word[pos + 1]
                word[pos : pos + 2] = [i, j] + pres._word_letters(pres.comm(j, i))
                z[self.tail_comm[(j, i)]] += 1
                continue
            pos = -1
            run = 0
            for t, g in enumerate(word):
                run = run + 1 if t > 0 and word[t - 1] == g else 1
                if run == pres.orders[g]:
                    pos = t - run + 1
                    break
            if pos < 0:
                break
            g = word[pos]
            word[pos : pos + pres.orders[g]] = pres._word_letters(pres.powers[g])
            z[self.tail_pow[g]] += 1
        out = [0] * self.k
        for g in word:
            out[g] += 1
        return tuple(out), z

    def consistency_equations(self) -> np.ndarray:
        """Rows: linear forms on tails that must vanish mod p (overlap identities)."""
        k, p = self.k, self.p
        pres = self.parent
        gen = [[i] for i in range(k)]
        rows = []

        def letters(word):
            return pres._word_letters(word)

        def emit(lhs, rhs):
            w1, z1 = self.collect(lhs)
            w2, z2 = self.collect(rhs)
            assert w1 == w2, "parent presentation is inconsistent"
            diff = (z1 - z2) % p
            if diff.any():
                rows.append(diff)

        for i in range(k):
            emit(letters(pres.powers[i]) + gen[i], gen[i] + letters(pres.powers[i]))
        for j in range(k):
            for i in range(j):
                w_ji, z_ji = self.collect(gen[j] + gen[i])
                emit(letters(pres.powers[j]) + gen[i], [j] * (p - 1) + letters(w_ji))
                # account for the tail picked up by the inner product g_j g_i
                rows[-1:] = rows[-1:]  # placeholder, corrected below
        return np.array(rows, dtype=np.int64) if rows else np.zeros((0, self.ntails), dtype=np.int64)


def consistency_system(parent: PcPresentation) -> tuple[TailCollector, np.ndarray]:
    """Full overlap system; each row must vanish mod p for a consistent extension."""
    tc = TailCollector(parent)
    k, p = tc.k, tc.p
    pres = parent
    rows: list[np.ndarray] = []

    def L(word):
        return pres._word_letters(word)

    def zdiff(lhs_letters, lhs_z0, rhs_letters, rhs_z0):
        w1, z1 = tc.collect(lhs_letters)
        w2, z2 = tc.collect(rhs_letters)
        assert w1 == w2, "parent presentation is inconsistent"
        return (z1 + lhs_z0) - (z2 + rhs_z0)

    zero = np.zeros(tc.ntails, dtype=np.int64)
    for i in range(k):
        d = zdiff(L(pres.powers[i]) + [i], zero, [i] + L(pres.powers[i]), zero)
        if (d % p).any():
            rows.append(d % p)
    for j in range(k):
        for i in range(j):
            # g_j^p * g_i  vs  g_j^{p-1} * (g_j g_i)
            w_ji, z_ji = tc.collect([j, i])
            d = zdiff(L(pres.powers[j]) + [i], zero, [j] * (p - 1) + L(w_ji), z_ji)
            if (d % p).any():
                rows.append(d % p)
            # g_j * g_i^p  vs  (g_j g_i) * g_i^{p-1}
            d = zdiff([j] + L(pres.powers[i]), zero, L(w_ji) + [i] * (p - 1), z_ji)
            if (d % p).any():
                rows.append(d % p)
    for l in range(k):
        for j in range(l):
            for i in range(j):
                w_lj, z_lj = tc.collect([l, j])
                w_ji, z_ji = tc.collect([j, i])
                d = zdiff(L(w_lj) + [i], z_lj, [l] + L(w_ji), z_ji)
                if (d % p).any():
                    rows.append(d % p)
    mat = np.array(rows, dtype=np.int64) % p if rows else np.zeros((0, tc.ntails), dtype=np.int64)
    return tc, mat


def child_presentation(parent: PcPresentation, tails: np.ndarray, tc: TailCollector) -> PcPresentation:
    k, p = tc.k, tc.p
    powers = []
    for i in range(k):
        powers.append(tuple(parent.powers[i]) + (int(tails[tc.tail_pow[i]]) % p,))
    powers.append((0,) * (k + 1))
    comms = {}
    for (j, i), pos in tc.tail_comm.items():
        w = tuple(parent.comm(j, i)) + (int(tails[pos]) % p,)
        if any(w):
            comms[(j, i)] = w
    return PcPresentation((p,) * (k + 1), tuple(powers), comms)


# -- candidates from an elementary abelian parent via GL-orbits --------------------


def elementary_orbit_tails(k: int, p: int) -> list[np.ndarray]:
    """Orbit representatives of GL(k,p) on (power tails d, commutator tails c)."""
    tc = TailCollector(PcPresentation((p,) * k, tuple((0,) * k for _ in range(k)), {}))
    D = tc.ntails
    npoints = p**D
    weights = np.array([p**t for t in range(D)], dtype=np.int64)
    states = (np.arange(npoints, dtype=np.int64)[:, None] // weights[None, :]) % p

    pairs = [(j, i) for j in range(1, k) for i in range(j)]

    def transform_perm(A: np.ndarray) -> np.ndarray:
        d = states[:, :k]
        C = np.zeros((npoints, k, k), dtype=np.int64)
        for t, (j, i) in enumerate(pairs):
            C[:, j, i] = states[:, k + t]
            C[:, i, j] = (-states[:, k + t]) % p
        Cp = np.einsum("st,ntu,vu->nsv", A, C, A) % p
        dp = (d @ A.T) % p
        if p == 2:
            # squaring is quadratic: correction sum_{t<u} A[s,t] A[s,u] c[t,u]
            corr = np.zeros((npoints, k), dtype=np.int64)
            for s in range(k):
                for tt in range(k):
                    for uu in range(tt + 1, k):
                        if A[s, tt] and A[s, uu]:
                            corr[:, s] += C[:, uu, tt]
            dp = (dp + corr) % p
        new = np.zeros((npoints, D), dtype=np.int64)
        new[:, :k] = dp
        for t, (j, i) in enumerate(pairs):
            new[:, k + t] = Cp[:, j, i] % p
        return (new @ weights).astype(np.int64)

    gens = []
    if k >= 2:
        P = np.eye(k, dtype=np.int64)[list(range(1, k)) + [0]]  # cycle
        T = np.eye(k, dtype=np.int64)
        T[0, 1] = 1  # transvection
        gens = [P, T]
        if p > 2:
            Dg = np.eye(k, dtype=np.int64)
            Dg[0, 0] = _primitive_root_mod(p)
            gens.append(Dg)
    else:
        if p > 2:
            gens = [np.array([[_primitive_root_mod(p)]], dtype=np.int64)]
        else:
            gens = [np.eye(1, dtype=np.int64)]
    perms = [transform_perm(A) for A in gens]
    seen = np.zeros(npoints, dtype=bool)
    reps = []
    for s in range(npoints):
        if seen[s]:
            continue
        reps.append(s)
        frontier = [s]
        seen[s] = True
        while frontier:
            nxt = []
            for perm in perms:
                imgs = perm[frontier]
                fresh = imgs[~seen[imgs]]
                if fresh.size:
                    seen[fresh] = True
                    nxt.extend(int(x) for x in np.unique(fresh))
            frontier = nxt
    return [states[s].copy() for s in reps]


def _primitive_root_mod(p: int) -> int:
    for g in range(2, p):
        vals = set()
        x = 1
        for _ in range(p - 1):
            x = x * g % p
            vals.add(x)
        if len(vals) == p - 1:
            return g
    raise RuntimeError


# -- fingerprints and isomorphism testing ------------------------------------------


def fingerprint(G: GroupTable) -> tuple:
    n = G.order
    p = gt.is_p_group(G)
    cd = conjugacy_classes(G)
    ords = G.element_orders
    reps = cd.representatives
    pw = np.array([cd.class_of[G.power(int(g), p)] for g in reps])
    cls_inv = [
        (int(cd.sizes[c]), int(ords[reps[c]]), int(cd.sizes[pw[c]]), int(ords[reps[pw[c]]]))
        for c in range(cd.nclasses)
    ]
    xs = np.arange(n, dtype=np.int32)
    P = G.product
    comm = P[P[np.ix_(G.inverse[xs], G.inverse[xs])], P[np.ix_(xs, xs)]]
    comm_hist = np.bincount(cd.class_of[comm].ravel(), minlength=cd.nclasses)
    comm_inv = sorted(zip(cls_inv, (int(x) for x in comm_hist)))
    Z = gt.center(G)
    Dv = gt.commutator_subgroup(G, G.whole(), G.whole())
    frat = gt.subgroup_generated(G, [G.power(g, p) for g in range(n)] + list(Dv.indices()))
    ab = gt.quotient(G, Dv).target
    ab_hist = tuple(int(x) for x in np.bincount(ab.element_orders, minlength=n + 1) if True)
    ucs = tuple(s.size for s in gt.upper_central_series(G).terms)
    lcs = tuple(s.size for s in gt.lower_central_series(G).terms)
    return (
        n,
        tuple(sorted(cls_inv)),
        tuple(map(tuple, comm_inv)),
        Z.size,
        Dv.size,
        frat.size,
        ab_hist,
        ucs,
        lcs,
        int(gt.exponent(G)),
    )


def _element_invariants(G: GroupTable, cd) -> list[tuple]:
    p = gt.is_p_group(G)
    ords = G.element_orders
    inv = []
    for g in range(G.order):
        c = int(cd.class_of[g])
        gp = G.power(g, p)
        inv.append((int(ords[g]), int(cd.sizes[c]), int(ords[gp]), int(cd.sizes[cd.class_of[gp]])))
    return inv


def minimal_generators(G: GroupTable) -> list[int]:
    p = gt.is_p_group(G)
    Dv = gt.commutator_subgroup(G, G.whole(), G.whole())
    frat = gt.subgroup_generated(G, [G.power(g, p) for g in range(G.order)] + list(Dv.indices()))
    gens: list[int] = []
    span = frat
    while span.size < G.order:
        g = next(x for x in range(G.order) if x not in span)
        gens.append(g)
        span = gt.subgroup_generated(G, list(span.indices()) + [g])
    return gens


def are_isomorphic(G: GroupTable, H: GroupTable) -> bool:
    if G.order != H.order:
        return False
    cdG = conjugacy_classes(G)
    cdH = conjugacy_classes(H)
    invG = _element_invariants(G, cdG)
    invH = _element_invariants(H, cdH)
    if sorted(invG) != sorted(invH):
        return False
    byinvH: dict[tuple, list[int]] = {}
    for h, iv in enumerate(invH):
        byinvH.setdefault(iv, []).append(h)
    gens = minimal_generators(G)
    class_reps_H = set(int(x) for x in cdH.representatives)

    def extend(mapping: dict[int, int], used: set[int], gpairs: list[tuple[int, int]], g: int, h: int):
        if invG[g] != invH[h]:
            return None
        mapping = dict(mapping)
        used = set(used)
        if g in mapping:
            return (mapping, used) if mapping[g] == h else None
        if h in used:
            return None
        mapping[g] = h
        used.add(h)
        gpairs = gpairs + [(g, h)]
        queue = list(mapping.items())
        while queue:
            a, b = queue.pop()
            for gg, hh in gpairs:
                c = G.mul(a, gg)
                d = H.mul(b, hh)
                if c in mapping:
                    if mapping[c] != d:
                        return None
                else:
                    if d in used:
                        return None
                    mapping[c] = d
                    used.add(d)
                    queue.append((c, d))
        return mapping, used, gpairs

    def dfs(level: int, mapping: dict[int, int], used: set[int], gpairs: list[tuple[int, int]]) -> bool:
        if level == len(gens):
            return len(mapping) == G.order
        g = gens[level]
        cands = byinvH.get(invG[g], [])
        if level == 0:
            cands = [h for h in cands if h in class_reps_H]
        for h in cands:
            if h in used:
                continue
            out = extend(mapping, used, gpairs, g, h)
            if out is None:
                continue
            m2, u2, gp2 = out
            if dfs(level + 1, m2, u2, gp2):
                return True
        return False

    return dfs(0, {G.identity: H.identity}, {H.identity}, [])


# -- the stage driver ----------------------------------------------------------------


def extend_stage(parents: list[PcPresentation], p: int) -> list[tuple[PcPresentation, GroupTable]]:
    found: dict[tuple, list[tuple[PcPresentation, GroupTable]]] = {}
    total_candidates = 0
    for pi, parent in enumerate(parents):
        is_elem = all(not any(w) for w in parent.powers) and not parent.comms
        if is_elem:
            tail_list = elementary_orbit_tails(parent.ngens, p)
            tc = TailCollector(parent)
        else:
            tc, system = consistency_system(parent)
            null = _nullspace_mod(system, p) if system.shape[0] else np.eye(tc.ntails, dtype=np.int64)
            dim = null.shape[0]
            if dim > 14:
                raise RuntimeError(f"tail space too large ({dim}) for parent {pi}")
            tail_list = []
            for coeffs in itertools.product(range(p), repeat=dim):
                tail_list.append((np.array(coeffs, dtype=np.int64) @ null) % p if dim else np.zeros(tc.ntails, dtype=np.int64))
        for tails in tail_list:
            total_candidates += 1
            pres = child_presentation(parent, np.asarray(tails), tc)
            try:
                G = build_from_pc_presentation(pres)
            except Exception:
                continue
            fp = fingerprint(G)
            bucket = found.setdefault(fp, [])
            if not any(are_isomorphic(G, H) for _, H in bucket):
                bucket.append((pres, G))
    reps = [item for bucket in found.values() for item in bucket]
    print(f"  {total_candidates} candidates -> {len(reps)} isomorphism classes")
    reps.sort(key=lambda t: fingerprint(t[1]))
    return reps


def run(p: int, max_exp: int) -> dict[int, list[tuple[PcPresentation, GroupTable]]]:
    pres1 = PcPresentation((p,), ((0,),), {}, label=f"C{p}")
    stages = {1: [(pres1, build_from_pc_presentation(pres1))]}
    for k in range(1, max_exp):
        t0 = time.time()
        print(f"order {p**(k+1)}:")
        reps = extend_stage([pres for pres, _ in stages[k]], p)
        expect = EXPECTED_COUNTS.get((p, k + 1))
        if expect is not None and len(reps) != expect:
            raise RuntimeError(f"count mismatch at order {p**(k+1)}: got {len(reps)}, expected {expect}")
        print(f"  ok ({time.time()-t0:.1f}s), expected {expect}")
        stages[k + 1] = reps
    return stages


def main() -> None:
    root = Path(__file__).resolve().parent.parent
    out32 = root / "corpus" / "order32"
    out243 = root / "corpus" / "order243"
    named = root / "corpus" / "named"
    for d in (out32, out243, named):
        d.mkdir(parents=True, exist_ok=True)

    stages2 = run(2, 6)
    stages3 = run(3, 5)

    for (order, stage, outdir) in ((32, stages2[5], out32), (243, stages3[5], out243)):
        for t, (pres, G) in enumerate(stage, start=1):
            label = f"{order}.g{t:02d}"
            (outdir / f"{label}.pc").write_text(emit_pc(pres, label=label))
        print(f"wrote {len(stage)} files for order {order}")

    # classification summaries feed the named-entry choices
    print("\norder-32 class-3 groups that are nested but not nested by degrees:")
    for t, (pres, G) in enumerate(stages2[5], start=1):
        r = classify(G, label=f"32.g{t:02d}")
        if r.nilpotency_class == 3 and r.is_nested and not r.is_nested_by_degrees:
            print(f"  32.g{t:02d} fp={fingerprint(G)[:1]} ab={r.cd_set} center? see details")
    print("\norder-64 class-3 groups nested by degrees but not GVZ:")
    for t, (pres, G) in enumerate(stages2[6], start=1):
        r = classify(G, label=f"64.g{t:03d}")
        if r.nilpotency_class == 3 and r.is_nested_by_degrees and not r.is_gvz:
            print(f"  64.g{t:03d}")


if __name__ == "__main__":
    main()
