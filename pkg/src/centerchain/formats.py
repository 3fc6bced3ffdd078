"""Corpus file formats.

cayley format::

    cayley <n> <label>
    <n whitespace-separated element indices>      (n lines; element 0 is the identity)

pc format::

    pc <k> <label>
    <p_i> <e_1 ... e_k>        (k lines: relative prime order, then g_i^{p_i} in normal form)
    <e_1 ... e_k>              (k(k-1)/2 lines: [g_j, g_i] for j = 2..k, i = 1..j-1)

Lines starting with '#' and blank lines are ignored.  All indices in words are
exponents of g_1..g_k in normal form.
"""

from __future__ import annotations

import numpy as np

from .grouptable import GroupTable, GroupTableError
from .pcpres import PcPresentation, build_from_pc_presentation

__all__ = ["FormatError", "parse_cayley_file", "parse_pc_file", "parse_group_file", "emit_cayley", "emit_pc"]


class FormatError(ValueError):
    """Malformed corpus file; the message carries the offending line number."""


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            out.append((no, stripped))
    return out


def parse_cayley_file(text: str) -> GroupTable:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("line 1: empty file")
    no, head = lines[0]
    parts = head.split(None, 2)
    if len(parts) < 2 or parts[0] != "cayley":
        raise FormatError(f"line {no}: expected 'cayley <n> <label>'")
    try:
        n = int(parts[1])
    except ValueError:
        raise FormatError(f"line {no}: bad order {parts[1]!r}") from None
    label = parts[2] if len(parts) > 2 else ""
    body = lines[1:]
    if len(body) != n:
        raise FormatError(f"line {no}: expected {n} table rows, found {len(body)}")
    table = np.zeros((n, n), dtype=np.int32)
    for r, (lno, line) in enumerate(body):
        row = line.split()
        if len(row) != n:
            raise FormatError(f"line {lno}: expected {n} entries, found {len(row)}")
        try:
            vals = [int(x) for x in row]
        except ValueError:
            raise FormatError(f"line {lno}: non-integer entry") from None
        for x in vals:
            if not 0 <= x < n:
                raise FormatError(f"line {lno}: index {x} out of range 0..{n - 1}")
        table[r] = vals
    try:
        G = GroupTable(table, label=label)
    except GroupTableError as exc:
        raise FormatError(f"table invariant violated: {exc}") from exc
    if G.identity != 0:
        raise FormatError("element 0 is not the identity")
    return G


def parse_pc_file(text: str, order_cap: int = 1 << 16) -> GroupTable:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("line 1: empty file")
    no, head = lines[0]
    parts = head.split(None, 2)
    if len(parts) < 2 or parts[0] != "pc":
        raise FormatError(f"line {no}: expected 'pc <k> <label>'")
    try:
        k = int(parts[1])
    except ValueError:
        raise FormatError(f"line {no}: bad generator count {parts[1]!r}") from None
    label = parts[2] if len(parts) > 2 else ""
    need = k + k * (k - 1) // 2
    body = lines[1:]
    if len(body) != need:
        raise FormatError(f"line {no}: expected {need} relation lines, found {len(body)}")

    def word(lno: str | int, toks: list[str], expect: int) -> tuple[int, ...]:
        if len(toks) != expect:
            raise FormatError(f"line {lno}: expected {expect} integers, found {len(toks)}")
        try:
            return tuple(int(x) for x in toks)
        except ValueError:
            raise FormatError(f"line {lno}: non-integer entry") from None

    orders: list[int] = []
    powers: list[tuple[int, ...]] = []
    for i in range(k):
        lno, line = body[i]
        toks = line.split()
        vals = word(lno, toks, k + 1)
        orders.append(vals[0])
        powers.append(vals[1:])
    comms: dict[tuple[int, int], tuple[int, ...]] = {}
    pos = k
    for j in range(1, k):
        for i in range(j):
            lno, line = body[pos]
            w = word(lno, line.split(), k)
            if any(w):
                comms[(j, i)] = w
            pos += 1
    try:
        pres = PcPresentation(tuple(orders), tuple(powers), comms, label=label)
        return build_from_pc_presentation(pres, order_cap=order_cap)
    except (ValueError, GroupTableError) as exc:
        raise FormatError(str(exc)) from exc


def parse_group_file(text: str, order_cap: int = 1 << 16) -> GroupTable:
    """Dispatch on the first tag word (cayley or pc)."""
    lines = _content_lines(text)
    if not lines:
        raise FormatError("line 1: empty file")
    tag = lines[0][1].split(None, 1)[0]
    if tag == "cayley":
        G = parse_cayley_file(text)
        if G.order > order_cap:
            raise GroupTableError(f"group order {G.order} exceeds cap {order_cap}")
        return G
    if tag == "pc":
        return parse_pc_file(text, order_cap=order_cap)
    raise FormatError(f"line {lines[0][0]}: unknown format tag {tag!r}")


def emit_cayley(G: GroupTable, label: str | None = None) -> str:
    if G.identity != 0:
        # renumber so the identity is element 0
        perm = list(range(G.order))
        perm[0], perm[G.identity] = perm[G.identity], perm[0]
        inv = np.argsort(perm)
        table = inv[G.product[np.ix_(perm, perm)]]
        G = GroupTable(table, label=G.label)
    name = label if label is not None else G.label
    rows = [f"cayley {G.order} {name}".rstrip()]
    for r in range(G.order):
        rows.append(" ".join(str(int(x)) for x in G.product[r]))
    return "\n".join(rows) + "\n"


def emit_pc(pres: PcPresentation, label: str | None = None) -> str:
    k = pres.ngens
    name = label if label is not None else pres.label
    rows = [f"pc {k} {name}".rstrip()]
    for i in range(k):
        rows.append(str(pres.orders[i]) + " " + " ".join(str(e) for e in pres.powers[i]))
    for j in range(1, k):
        for i in range(j):
            w = pres.comms.get((j, i), (0,) * k)
            rows.append(" ".join(str(e) for e in w))
    return "\n".join(rows) + "\n"
