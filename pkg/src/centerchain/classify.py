"""Predicates on groups built from character centers, kernels and the normal lattice.

The central object is `Analysis`, which lazily caches the expensive artifacts
of one group (character table, normal lattice, series) so that classification
and the theorem harness share them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import grouptable as gt
from .chartable import CharacterTable, compute_character_table, conjugacy_classes
from .grouptable import GroupTable, Subgroup

__all__ = [
    "Analysis",
    "ChainOfCenters",
    "IncomparableCenters",
    "DegreeCenters",
    "ClassificationReport",
    "chain_of_centers",
    "classify",
    "is_gvz",
    "is_vz",
    "is_camina_pair",
    "is_semi_extraspecial",
    "is_ultraspecial",
    "kernel_chain_predicates",
    "nested_by_degrees",
    "quotient_center",
    "quotient_center_family",
]


@dataclass(frozen=True)
class ChainOfCenters:
    """Distinct character centers G = X_0 > X_1 > ... > X_n, with [X_i, G]."""

    terms: tuple[Subgroup, ...]
    commutators: tuple[Subgroup, ...]

    @property
    def nested_length(self) -> int:
        return len(self.terms) - 1


@dataclass(frozen=True)
class IncomparableCenters:
    """Witness that a group is not nested: two characters with incomparable centers."""

    chi: int
    psi: int


@dataclass(frozen=True)
class DegreeCenters:
    """Per-degree common centers Y_0 >= Y_1 >= ... >= Y_r (defined when nested by degrees)."""

    degrees: tuple[int, ...]
    centers: tuple[Subgroup, ...]


@dataclass(frozen=True)
class ClassificationReport:
    label: str
    order: int
    nilpotency_class: Optional[int]
    coclass: Optional[int]
    cd_set: tuple[int, ...]
    is_nested: bool
    is_nested_by_degrees: bool
    is_strictly_nested_by_degrees: bool
    is_gvz: bool
    is_vz: bool
    is_semi_extraspecial: Optional[bool]
    is_ultraspecial: Optional[bool]
    kern_is_chain: bool
    nlkern_is_chain: bool
    normal_lattice_is_chain: bool
    unique_chief_series: bool
    chain: Optional[ChainOfCenters]
    degree_centers: Optional[DegreeCenters]

    FLAG_ORDER = (
        "is_nested",
        "is_nested_by_degrees",
        "is_strictly_nested_by_degrees",
        "is_gvz",
        "is_vz",
        "is_semi_extraspecial",
        "is_ultraspecial",
        "kern_is_chain",
        "nlkern_is_chain",
        "normal_lattice_is_chain",
        "unique_chief_series",
    )

    def to_dict(self) -> dict:
        """Numbering-independent serialization with a fixed key order."""
        out: dict = {
            "label": self.label,
            "order": self.order,
            "nilpotency_class": self.nilpotency_class,
            "coclass": self.coclass,
            "cd_set": list(self.cd_set),
        }
        for flag in self.FLAG_ORDER:
            out[flag] = getattr(self, flag)
        out["chain"] = (
            {
                "term_sizes": [t.size for t in self.chain.terms],
                "commutator_sizes": [c.size for c in self.chain.commutators],
                "nested_length": self.chain.nested_length,
            }
            if self.chain is not None
            else None
        )
        out["degree_centers"] = (
            {
                "degrees": list(self.degree_centers.degrees),
                "center_sizes": [c.size for c in self.degree_centers.centers],
            }
            if self.degree_centers is not None
            else None
        )
        return out


def _sorted_chain(subs: Sequence[Subgroup]) -> Optional[list[Subgroup]]:
    """Distinct subgroups sorted descending when they form a chain, else None."""
    distinct = {s.bits: s for s in subs}
    ordered = sorted(distinct.values(), key=lambda s: -s.size)
    for a, b in zip(ordered, ordered[1:]):
        if not b.issubset(a):
            return None
    return ordered


def chain_of_centers(G: GroupTable, table: CharacterTable):
    """The chain of distinct character centers, or a witness pair when not nested."""
    centers = [table.char_center(i) for i in range(table.nirreducibles)]
    ordered = _sorted_chain(centers)
    if ordered is None:
        reps: dict[int, int] = {}
        for i, s in enumerate(centers):
            reps.setdefault(s.bits, i)
        rows = sorted(reps.values())
        for a in range(len(rows)):
            for b in range(a + 1, len(rows)):
                if not centers[rows[a]].comparable(centers[rows[b]]):
                    return IncomparableCenters(rows[a], rows[b])
        raise AssertionError("unreachable")  # pragma: no cover
    comms = tuple(gt.commutator_subgroup(G, X, G.whole()) for X in ordered)
    return ChainOfCenters(tuple(ordered), comms)


def quotient_center(G: GroupTable, N: Subgroup) -> Subgroup:
    """Z_N with Z_N/N = Z(G/N), computed from commutator bitsets (no quotient table)."""
    K = G.commutator_bits
    idx = [g for g in range(G.order) if K[g] & ~N.bits == 0]
    return Subgroup.from_indices(idx, G.order)


def quotient_center_family(G: GroupTable, lattice: Sequence[Subgroup]) -> list[Subgroup]:
    seen: dict[int, Subgroup] = {}
    for N in lattice:
        Z = quotient_center(G, N)
        seen.setdefault(Z.bits, Z)
    return sorted(seen.values(), key=lambda s: (-s.size, s.bits))


def is_nested_via_quotient_centers(G: GroupTable, lattice: Sequence[Subgroup]) -> tuple[bool, object]:
    """Theorem-style oracle: all Z(G/N) preimages pairwise comparable.

    Returns (verdict, chain-or-witness); the witness is a pair of normal
    subgroups whose quotient centers are incomparable.
    """
    fam = quotient_center_family(G, lattice)
    ordered = _sorted_chain(fam)
    if ordered is not None:
        return True, ordered
    for a in range(len(fam)):
        for b in range(a + 1, len(fam)):
            if not fam[a].comparable(fam[b]):
                return False, (fam[a], fam[b])
    raise AssertionError("unreachable")  # pragma: no cover


def nested_by_degrees(G: GroupTable, table: CharacterTable):
    """(verdict, DegreeCenters when true, witness pair of irreducibles when false)."""
    degrees = sorted(set(int(d) for d in table.degrees))
    per_degree: list[Subgroup] = []
    for d in degrees:
        rows = [i for i in range(table.nirreducibles) if table.degree(i) == d]
        cents = [table.char_center(i) for i in rows]
        first = cents[0]
        for i, c in zip(rows[1:], cents[1:]):
            if c.bits != first.bits:
                return False, None, (rows[0], i)
        per_degree.append(first)
    for j in range(len(degrees) - 1):
        if not per_degree[j + 1].issubset(per_degree[j]):
            ri = next(i for i in range(table.nirreducibles) if table.degree(i) == degrees[j])
            rj = next(i for i in range(table.nirreducibles) if table.degree(i) == degrees[j + 1])
            return False, None, (ri, rj)
    return True, DegreeCenters(tuple(degrees), tuple(per_degree)), None


def strictly_nested_by_degrees(dc: Optional[DegreeCenters]) -> bool:
    if dc is None:
        return False
    return all(b.size < a.size for a, b in zip(dc.centers, dc.centers[1:]))


def is_gvz(G: GroupTable, table: CharacterTable) -> bool:
    """Every irreducible vanishes outside its center."""
    return bool(np.all(table.center_class_mask | table.zero_mask))


def is_vz(G: GroupTable, table: CharacterTable, center: Optional[Subgroup] = None) -> bool:
    """Every nonlinear irreducible vanishes outside Z(G)."""
    if table.n_linear == table.nirreducibles:
        return True
    if center is None:
        center = gt.center(G)
    reps = table.classes.representatives
    central_class = np.array([int(rp) in center for rp in reps], dtype=bool)
    nl_zero = table.zero_mask[table.n_linear :]
    return bool(np.all(nl_zero[:, ~central_class]))


def is_vz_classwise(G: GroupTable, center: Optional[Subgroup] = None) -> bool:
    """Character-free VZ test: cl(g) = g G' for every g outside the center."""
    if center is None:
        center = gt.center(G)
    gp = gt.commutator_subgroup(G, G.whole(), G.whole())
    cd = conjugacy_classes(G)
    for c in range(cd.nclasses):
        rep = int(cd.representatives[c])
        if rep in center:
            continue
        if int(cd.sizes[c]) != gp.size:
            return False
        coset = np.sort(G.product[rep, gp.indices()])
        if not np.array_equal(np.sort(cd.members(c)), coset):
            return False
    return True


def is_camina_pair(G: GroupTable, N: Subgroup) -> bool:
    """(G, N): for every g outside N the class of g contains the whole coset gN."""
    if not gt.is_normal(G, N):
        raise gt.GroupTableError("Camina pair requires a normal subgroup")
    cd = conjugacy_classes(G)
    ni = N.indices()
    for g in range(G.order):
        if g in N:
            continue
        coset = G.product[g, ni]
        if np.any(cd.class_of[coset] != cd.class_of[g]):
            return False
    return True


def _index_p_central_subgroups(G: GroupTable, Z: Subgroup, p: int) -> list[Subgroup]:
    """All index-p subgroups of the (abelian) center, as subgroups of G."""
    ztab, zidx = gt.subgroup_table(G, Z)
    tablez = compute_character_table(ztab)
    e = tablez.exponent
    out: dict[int, Subgroup] = {}
    reps = tablez.classes.representatives  # abelian: classes are singletons
    step = e // p
    for i in range(tablez.n_linear):
        row = tablez.lin_exp[i]
        if np.any(row) and np.all(row % step == 0):
            members = zidx[reps[np.nonzero(row == 0)[0]]]
            S = Subgroup.from_indices(members, G.order)
            if S.size * p == Z.size:
                out[S.bits] = S
    return sorted(out.values(), key=lambda s: s.bits)


def is_extraspecial(G: GroupTable) -> bool:
    p = gt.is_p_group(G)
    if p is None:
        return False
    Z = gt.center(G)
    gp = gt.commutator_subgroup(G, G.whole(), G.whole())
    if Z.size != p or gp.bits != Z.bits:
        return False
    q = gt.quotient(G, Z)
    return gt.is_elementary_abelian(q.target)


def is_semi_extraspecial(G: GroupTable) -> Optional[bool]:
    """For every index-p subgroup N of Z(G), G/N is extraspecial; None off p-groups."""
    p = gt.is_p_group(G)
    if p is None:
        return None
    Z = gt.center(G)
    if Z.is_whole():
        return False
    for N in _index_p_central_subgroups(G, Z, p):
        if not is_extraspecial(gt.quotient(G, N).target):
            return False
    return True


def is_ultraspecial(G: GroupTable) -> Optional[bool]:
    p = gt.is_p_group(G)
    if p is None:
        return None
    se = is_semi_extraspecial(G)
    Z = gt.center(G)
    return bool(se) and G.order == Z.size**3


def kernel_chain_predicates(G: GroupTable, table: CharacterTable) -> tuple[bool, bool]:
    """(Kern(G) is a chain, nlKern(G) is a chain); nlKern of an abelian group is empty."""
    kerns = [table.kernel(i) for i in range(table.nirreducibles)]
    nl = [kerns[i] for i in range(table.nirreducibles) if table.degree(i) > 1]
    return _sorted_chain(kerns) is not None, (len(nl) == 0 or _sorted_chain(nl) is not None)


class Analysis:
    """Lazy per-group cache shared by classification and the theorem harness."""

    def __init__(self, G: GroupTable, label: Optional[str] = None, order_cap: int = gt.DEFAULT_LATTICE_ORDER_CAP):
        self.G = G
        self.label = label if label is not None else G.label
        self.order_cap = order_cap

    @cached_property
    def table(self) -> CharacterTable:
        return compute_character_table(self.G)

    @cached_property
    def lattice(self) -> list[Subgroup]:
        return gt.all_normal_subgroups(self.G, self.order_cap)

    @cached_property
    def center(self) -> Subgroup:
        return gt.center(self.G)

    @cached_property
    def derived(self) -> Subgroup:
        return gt.commutator_subgroup(self.G, self.G.whole(), self.G.whole())

    @cached_property
    def chain(self):
        return chain_of_centers(self.G, self.table)

    @cached_property
    def char_centers(self) -> list[Subgroup]:
        return [self.table.char_center(i) for i in range(self.table.nirreducibles)]

    @cached_property
    def kernels(self) -> list[Subgroup]:
        return [self.table.kernel(i) for i in range(self.table.nirreducibles)]

    @cached_property
    def upper_central(self) -> gt.SubgroupSeries:
        return gt.upper_central_series(self.G)

    @cached_property
    def lower_central(self) -> gt.SubgroupSeries:
        return gt.lower_central_series(self.G)

    @cached_property
    def nilpotency_class(self) -> Optional[int]:
        return gt.nilpotency_class(self.G)

    @cached_property
    def nbd(self):
        return nested_by_degrees(self.G, self.table)

    @cached_property
    def report(self) -> ClassificationReport:
        G, table = self.G, self.table
        p = gt.is_p_group(G)
        chain = self.chain if isinstance(self.chain, ChainOfCenters) else None
        nbd_ok, dc, _ = self.nbd
        kern_chain, nlkern_chain = kernel_chain_predicates(G, table)
        lattice_chain = gt.lattice_is_chain(self.lattice)
        unique_chief = gt.count_chief_series_capped(G, 2, self.lattice) == 1
        return ClassificationReport(
            label=self.label,
            order=G.order,
            nilpotency_class=self.nilpotency_class,
            coclass=gt.coclass(G) if p is not None else None,
            cd_set=table.cd_set(),
            is_nested=chain is not None,
            is_nested_by_degrees=nbd_ok,
            is_strictly_nested_by_degrees=nbd_ok and strictly_nested_by_degrees(dc),
            is_gvz=is_gvz(G, table),
            is_vz=is_vz(G, table, self.center),
            is_semi_extraspecial=is_semi_extraspecial(G),
            is_ultraspecial=is_ultraspecial(G),
            kern_is_chain=kern_chain,
            nlkern_is_chain=nlkern_chain,
            normal_lattice_is_chain=lattice_chain,
            unique_chief_series=unique_chief,
            chain=chain,
            degree_centers=dc if nbd_ok else None,
        )


def classify(G: GroupTable, label: Optional[str] = None, order_cap: int = gt.DEFAULT_LATTICE_ORDER_CAP) -> ClassificationReport:
    """Full classification report for one group (character table computed once)."""
    return Analysis(G, label=label, order_cap=order_cap).report
