"""Power-commutator presentations and collection into full Cayley tables.

A presentation has generators g_1..g_k with prime relative orders p_i and
relations

    g_i^{p_i} = w_ii          (a normal word in generators of index > i)
    [g_j, g_i] = w_ji         (j > i, a normal word in generators of index > i)

Normal words are exponent vectors (e_1,...,e_k) with 0 <= e_i < p_i, read as
g_1^{e_1} ... g_k^{e_k}.  Multiplication is realized by collection from the
left; the full table is then filled in column order, so collection only runs
once per (element, generator) pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .grouptable import GroupTable, GroupTableError

__all__ = ["PcPresentation", "InconsistentPresentation", "build_from_pc_presentation"]

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d = 49
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class InconsistentPresentation(ValueError):
    """The relations do not define a group of the declared order."""


@dataclass
class PcPresentation:
    """Power-commutator data; `powers[i]` and `comms[(j,i)]` are exponent vectors."""

    orders: tuple[int, ...]
    powers: tuple[tuple[int, ...], ...]
    comms: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)
    label: str = ""

    def __post_init__(self) -> None:
        k = len(self.orders)
        for p in self.orders:
            if not _is_prime(p):
                raise ValueError(f"relative order {p} is not prime")
        if len(self.powers) != k:
            raise ValueError("need one power word per generator")
        for i, w in enumerate(self.powers):
            self._check_word(w, i, f"power relation g{i + 1}^{self.orders[i]}")
        for (j, i), w in self.comms.items():
            if not (0 <= i < j < k):
                raise ValueError(f"bad commutator pair {(j, i)}")
            self._check_word(w, i, f"commutator relation [g{j + 1},g{i + 1}]")

    def _check_word(self, w: Sequence[int], i: int, what: str) -> None:
        k = len(self.orders)
        if len(w) != k:
            raise ValueError(f"{what}: word length {len(w)} != {k}")
        for t, e in enumerate(w):
            if not 0 <= e < self.orders[t]:
                raise ValueError(f"{what}: exponent {e} out of range at position {t + 1}")
            if t <= i and e != 0:
                raise ValueError(f"{what}: word must involve only generators of index > {i + 1}")

    @property
    def ngens(self) -> int:
        return len(self.orders)

    def group_order(self) -> int:
        out = 1
        for p in self.orders:
            out *= p
        return out

    def comm(self, j: int, i: int) -> tuple[int, ...]:
        return self.comms.get((j, i), (0,) * self.ngens)

    # -- collection ------------------------------------------------------------

    def collect(self, letters: Iterable[int]) -> tuple[int, ...]:
        """Collect a letter sequence (generator indices) into normal form."""
        word = list(letters)
        orders = self.orders
        while True:
            # leftmost inversion g_j g_i with j > i
            pos = -1
            for t in range(len(word) - 1):
                if word[t] > word[t + 1]:
                    pos = t
                    break
            if pos >= 0:
                j, i = word[pos], word[pos + 1]
                repl = [i, j] + self._word_letters(self.comm(j, i))
                word[pos : pos + 2] = repl
                continue
            # leftmost overflowing run g_i^{p_i}
            pos = -1
            run = 0
            for t, g in enumerate(word):
                if t > 0 and word[t - 1] == g:
                    run += 1
                else:
                    run = 1
                if run == orders[g]:
                    pos = t - run + 1
                    break
            if pos < 0:
                break
            g = word[pos]
            word[pos : pos + orders[g]] = self._word_letters(self.powers[g])
        out = [0] * self.ngens
        for g in word:
            out[g] += 1
        return tuple(out)

    def _word_letters(self, w: Sequence[int]) -> list[int]:
        out: list[int] = []
        for t, e in enumerate(w):
            out.extend([t] * e)
        return out

    def _letters(self, word: Sequence[int]) -> list[int]:
        return self._word_letters(word)

    def multiply(self, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        return self.collect(self._letters(u) + self._letters(v))

    def consistency_failure(self) -> Optional[str]:
        """Check the standard overlap identities; returns a diagnostic or None."""
        k = self.ngens
        gen = [tuple(1 if t == i else 0 for t in range(k)) for i in range(k)]

        def mul(a, b):
            return self.multiply(a, b)

        for i in range(k):
            p = self.orders[i]
            lhs = mul(self.powers[i], gen[i])
            rhs = mul(gen[i], self.powers[i])
            if lhs != rhs:
                return f"overlap g{i + 1}^{p} * g{i + 1}"
        for j in range(k):
            for i in range(j):
                pj, pi = self.orders[j], self.orders[i]
                # g_j^{pj} g_i  vs  g_j^{pj-1} (g_j g_i)
                lhs = mul(self.powers[j], gen[i])
                rhs = self.collect([j] * (pj - 1) + self._letters(mul(gen[j], gen[i])))
                if lhs != rhs:
                    return f"overlap g{j + 1}^{pj} * g{i + 1}"
                # g_j g_i^{pi}  vs  (g_j g_i) g_i^{pi-1}
                lhs = mul(gen[j], self.powers[i])
                rhs = self.collect(self._letters(mul(gen[j], gen[i])) + [i] * (pi - 1))
                if lhs != rhs:
                    return f"overlap g{j + 1} * g{i + 1}^{pi}"
        for l in range(k):
            for j in range(l):
                for i in range(j):
                    lhs = mul(mul(gen[l], gen[j]), gen[i])
                    rhs = mul(gen[l], mul(gen[j], gen[i]))
                    if lhs != rhs:
                        return f"overlap g{l + 1} * g{j + 1} * g{i + 1}"
        return None


def _ranks(orders: Sequence[int]) -> np.ndarray:
    """Mixed-radix place values, most significant first."""
    k = len(orders)
    place = np.ones(k, dtype=np.int64)
    for i in range(k - 2, -1, -1):
        place[i] = place[i + 1] * orders[i + 1]
    return place


def build_from_pc_presentation(pres: PcPresentation, order_cap: int = 1 << 16) -> GroupTable:
    """Realize the presentation as a validated GroupTable.

    Element index of a normal word is its mixed-radix rank, so index 0 is the
    identity.  Raises InconsistentPresentation when the relations collapse.
    """
    n = pres.group_order()
    if n > order_cap:
        raise GroupTableError(f"presentation order {n} exceeds cap {order_cap}")
    bad = pres.consistency_failure()
    if bad is not None:
        raise InconsistentPresentation(f"inconsistent presentation at {bad}")
    k = pres.ngens
    place = _ranks(pres.orders)

    # right-multiplication permutation for each generator
    words = np.zeros((n, k), dtype=np.int16)
    idx = np.arange(n, dtype=np.int64)
    rem = idx.copy()
    for i in range(k):
        words[:, i], rem = divmod(rem, place[i])[0], rem % place[i]
    rmul = np.zeros((k, n), dtype=np.int32)
    for i in range(k):
        for u in range(n):
            w = pres.collect(pres._word_letters(words[u]) + [i])
            rmul[i, u] = int(np.dot(w, place))

    # fill columns: col(v * g_i) = rmul_i[col(v)]
    table = np.zeros((n, n), dtype=np.int32)
    table[:, 0] = np.arange(n, dtype=np.int32)
    for v in range(1, n):
        w = words[v]
        i = int(np.max(np.nonzero(w)[0]))
        parent = v - int(place[i])
        table[:, v] = rmul[i][table[:, parent]]
    try:
        return GroupTable(table, label=pres.label)
    except GroupTableError as exc:
        raise InconsistentPresentation(f"relations do not define a group: {exc}") from exc
