"""
Exact tangle crossing number.

Two matching edges a, b with left LCA u and right LCA w cross exactly when

    d(a, b) XOR left_bit[u] XOR right_bit[w] == 1,

where d(a, b) records whether the stored child orders at u and w already
disagree about a and b.  Once the left bits are fixed every right bit can be
chosen on its own: node w costs min(c0(w), c1(w)) with c0/c1 the crossings
among the pairs whose right LCA is w.  The solver enumerates left switch
vectors depth-first (root bit pinned to 0, since reflecting the whole
drawing changes nothing) and prunes prefixes whose lower bound already
reaches the incumbent.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field

from .core import Tanglegram, TanglegramError
from .layout import (
    SizeCapError,
    TanglegramLayout,
    crossing_count,
    is_realizable,
    leaf_order,
    switch_vector_for,
)

__all__ = [
    "CrossingReport",
    "PairLcaTable",
    "one_sided_optimum",
    "exact_crt",
    "is_planar",
    "EXACT_CAP",
]

EXACT_CAP = 20


@dataclass(frozen=True)
class PairLcaTable:
    """
    Edge pairs grouped by the LCA of their right endpoints.

    Edges are numbered by left leaf offset (``leaf id - (n-1)``).
    ``groups[w]`` lists ``(a, b)`` for right internal node ``w`` with the
    right endpoint of ``a`` under the first child of ``w`` and that of
    ``b`` under the second, so ``a`` is drawn above ``b`` when the bit at
    ``w`` is 0.
    """

    groups: tuple

    @classmethod
    def build(cls, t: Tanglegram) -> "PairLcaTable":
        right = t.right
        off = t.n - 1
        edge_of = [t.match_right(w) - off for w in right.leaves]
        groups = []
        for w in right.internal_nodes:
            c0, c1 = right.children[w]
            top = [edge_of[x - off] for x in right.clade(c0)]
            bottom = [edge_of[x - off] for x in right.clade(c1)]
            groups.append(tuple((a, b) for a in top for b in bottom))
        return cls(tuple(groups))

    def __len__(self):
        return sum(len(g) for g in self.groups)


@dataclass
class CrossingReport:
    crt: int
    witness: TanglegramLayout
    nodes: int = 0
    pruned: int = 0
    leaves: int = 0
    seconds: float = 0.0
    stats: dict = field(default_factory=dict)


def one_sided_optimum(t: Tanglegram, left_order, table: PairLcaTable | None = None) -> tuple:
    """
    Fewest crossings over all right switch vectors with the left leaf order
    fixed.  Returns ``(count, right_vector)``; ties pick bit 0.
    """
    left = t.left
    if not is_realizable(left, left_order):
        raise TanglegramError("left order is not realizable by the left tree")
    if table is None:
        table = PairLcaTable.build(t)
    off = t.n - 1
    rank = [0] * t.n
    for r, v in enumerate(left_order):
        rank[v - off] = r
    total = 0
    bits = []
    for group in table.groups:
        c0 = sum(1 for a, b in group if rank[a] > rank[b])
        c1 = len(group) - c0
        if c1 < c0:
            bits.append(1)
            total += c1
        else:
            bits.append(0)
            total += c0
    return total, tuple(bits)


def _pair_tables(t: Tanglegram):
    """
    Per left internal node u, the sparse rows ``[(w, n1, n0), ...]`` where
    n1 (n0) counts pairs with left LCA u, right LCA w, and d = 1 (d = 0).
    With bit[u] = 0 the pairs counted by n1 cross when bit[w] = 0.
    """
    left = t.left
    m = t.n - 1
    off = m
    first = left.first_leaf
    rows = [dict() for _ in range(m)]
    for w, group in enumerate(PairLcaTable.build(t).groups):
        for a, b in group:
            la, lb = a + off, b + off
            u = left.lca(la, lb)
            # a above b on the left (bit 0) iff a sits under the first child of u
            d = 0 if la < first[left.children[u][1]] else 1
            cell = rows[u].setdefault(w, [0, 0])
            cell[1 - d] += 1
    return [[(w, c[0], c[1]) for w, c in sorted(r.items())] for r in rows]


def exact_crt(
    t: Tanglegram,
    cap: int = EXACT_CAP,
    prune: bool = True,
    stop_at: int | None = None,
) -> CrossingReport:
    """
    Exact crt by branch and bound over left switch vectors.

    The witness is the lexicographically least optimal layout (left bits,
    then right bits).  ``stop_at`` ends the search as soon as a layout with
    at most that many crossings is found; the witness is then not
    necessarily lexicographically least.
    """
    n = t.n
    if n > cap:
        raise SizeCapError(f"exact solver limited to n <= {cap}, got n={n}")
    start = time.perf_counter()
    m = n - 1
    zeros = (0,) * m
    table = PairLcaTable.build(t)
    rows = _pair_tables(t)
    # crossings no completion of a prefix can avoid: sum_w min(n0, n1) over undecided rows
    slack = [0] * (m + 1)
    for u in range(m - 1, -1, -1):
        slack[u] = slack[u + 1] + sum(min(a, b) for _, a, b in rows[u])

    best, _ = one_sided_optimum(t, leaf_order(t.left, zeros), table)
    best_bits = list(zeros)
    c0 = [0] * m
    tot = [0] * m
    bits = [0] * m
    stats = {"nodes": 0, "pruned": 0, "leaves": 0}

    class _Done(Exception):
        pass

    def visit(u: int, fixed: int) -> None:
        nonlocal best, best_bits
        stats["nodes"] += 1
        if u == m:
            stats["leaves"] += 1
            if fixed < best:
                best = fixed
                best_bits = bits.copy()
                if stop_at is not None and best <= stop_at:
                    raise _Done
            return
        if prune and fixed + slack[u] >= best:
            stats["pruned"] += 1
            return
        row = rows[u]
        for bit in ((0,) if u == 0 else (0, 1)):
            bits[u] = bit
            delta = 0
            for w, n1, n0 in row:
                old = min(c0[w], tot[w] - c0[w])
                c0[w] += n1 if bit == 0 else n0
                tot[w] += n1 + n0
                delta += min(c0[w], tot[w] - c0[w]) - old
            visit(u + 1, fixed + delta)
            for w, n1, n0 in row:
                c0[w] -= n1 if bit == 0 else n0
                tot[w] -= n1 + n0
        bits[u] = 0

    if stop_at is None or best > stop_at:
        limit = sys.getrecursionlimit()
        if m + 50 > limit:
            sys.setrecursionlimit(m + 50)
        try:
            visit(0, 0)
        except _Done:
            pass
        finally:
            sys.setrecursionlimit(limit)

    order = leaf_order(t.left, best_bits)
    count, right = one_sided_optimum(t, order, table)
    witness = TanglegramLayout(tuple(best_bits), right)
    if count != best or crossing_count(t, witness) != best:
        raise AssertionError("witness does not realize the reported crossing number")
    return CrossingReport(
        crt=best,
        witness=witness,
        nodes=stats["nodes"],
        pruned=stats["pruned"],
        leaves=stats["leaves"],
        seconds=time.perf_counter() - start,
    )


def is_planar(t: Tanglegram, cap: int = EXACT_CAP) -> bool:
    """True iff some layout has no crossings."""
    return exact_crt(t, cap=cap, stop_at=0).crt == 0


def witness_for_order(t: Tanglegram, left_order) -> TanglegramLayout:
    """Layout pairing ``left_order`` with its one-sided optimal right vector."""
    _, right = one_sided_optimum(t, left_order)
    return TanglegramLayout(switch_vector_for(t.left, left_order), right)
