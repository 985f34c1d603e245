"""
Layouts of tanglegrams.

A layout is a pair of switch vectors, one bit per internal node of each
tree.  Bit 0 keeps the stored child order (first child drawn on top), bit 1
swaps it.  Two matching edges cross exactly when their endpoints appear in
opposite relative order on the two sides, so everything here works on leaf
ranks rather than coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .core import BinaryTree, Tanglegram, TanglegramError

__all__ = [
    "SizeCapError",
    "TanglegramLayout",
    "FenwickTree",
    "leaf_order",
    "leaf_ranks",
    "is_realizable",
    "switch_vector_for",
    "edge_ranks",
    "count_inversions",
    "crossing_count",
    "crossing_count_pairs",
    "mirror_right",
    "mirror_all",
    "apply_layout",
    "switch_vectors",
    "brute_force_crt",
    "BRUTE_FORCE_CAP",
]

BRUTE_FORCE_CAP = 10


class SizeCapError(TanglegramError):
    """Instance is larger than an exhaustive method is allowed to handle."""


def _bits(v: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in v)


@dataclass(frozen=True)
class TanglegramLayout:
    """Switch vectors for the left and right tree."""

    left: tuple
    right: tuple

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(int(b) for b in self.left))
        object.__setattr__(self, "right", tuple(int(b) for b in self.right))
        if any(b not in (0, 1) for b in self.left + self.right):
            raise TanglegramError("switch bits must be 0 or 1")

    @classmethod
    def zeros(cls, t: Tanglegram) -> "TanglegramLayout":
        return cls((0,) * (t.n - 1), (0,) * (t.n - 1))

    @classmethod
    def from_bits(cls, left: str, right: str) -> "TanglegramLayout":
        return cls(tuple(map(int, left)), tuple(map(int, right)))

    def bits(self) -> tuple:
        return _bits(self.left), _bits(self.right)

    def check(self, t: Tanglegram) -> None:
        if len(self.left) != t.n - 1 or len(self.right) != t.n - 1:
            raise TanglegramError(
                f"layout lengths ({len(self.left)}, {len(self.right)}) do not match n-1={t.n - 1}"
            )


def _check_vector(tree: BinaryTree, s) -> tuple:
    s = tuple(int(b) for b in s)
    if len(s) != tree.n - 1:
        raise TanglegramError(f"switch vector has length {len(s)}, tree needs {tree.n - 1}")
    return s


def leaf_order(tree: BinaryTree, s: Sequence[int]) -> tuple:
    """Leaf ids top to bottom under switch vector ``s``.

    >>> from tanglegram.core import build_tree
    >>> t = build_tree("((a,b),c)")
    >>> [t.labels[v] for v in leaf_order(t, (1, 0))]
    ['c', 'a', 'b']
    """
    s = _check_vector(tree, s)
    out = []
    stack = [tree.root]
    while stack:
        v = stack.pop()
        c = tree.children[v]
        if c:
            first, second = (c[1], c[0]) if s[v] else c
            stack.append(second)
            stack.append(first)
        else:
            out.append(v)
    return tuple(out)


def leaf_ranks(tree: BinaryTree, s: Sequence[int]) -> list:
    """``ranks[v - (n-1)]`` is the 0-based position of leaf ``v``."""
    ranks = [0] * tree.n
    off = tree.n - 1
    for r, v in enumerate(leaf_order(tree, s)):
        ranks[v - off] = r
    return ranks


def _order_ranks(tree: BinaryTree, order: Sequence[int]) -> list:
    off = tree.n - 1
    if sorted(order) != list(tree.leaves):
        raise TanglegramError("leaf order is not a permutation of the leaves")
    ranks = [0] * tree.n
    for r, v in enumerate(order):
        ranks[v - off] = r
    return ranks


def _spans(tree: BinaryTree, ranks: list):
    off = tree.n - 1
    lo = [0] * tree.size
    hi = [0] * tree.size
    for v in tree.postorder():
        c = tree.children[v]
        if c:
            lo[v] = min(lo[c[0]], lo[c[1]])
            hi[v] = max(hi[c[0]], hi[c[1]])
        else:
            lo[v] = hi[v] = ranks[v - off]
    return lo, hi


def is_realizable(tree: BinaryTree, order: Sequence[int]) -> bool:
    """True when every clade occupies a contiguous block of ``order``."""
    try:
        ranks = _order_ranks(tree, order)
    except TanglegramError:
        return False
    lo, hi = _spans(tree, ranks)
    counts = tree.leaf_counts
    return all(hi[v] - lo[v] + 1 == counts[v] for v in tree.internal_nodes)


def switch_vector_for(tree: BinaryTree, order: Sequence[int]) -> tuple:
    """The unique switch vector whose leaf order is ``order``."""
    if not is_realizable(tree, order):
        raise TanglegramError("leaf order is not realizable by any switch vector")
    lo, _ = _spans(tree, _order_ranks(tree, order))
    return tuple(int(lo[tree.children[v][0]] > lo[tree.children[v][1]]) for v in tree.internal_nodes)


def edge_ranks(t: Tanglegram, d: TanglegramLayout) -> tuple:
    """Per edge (left-leaf order): rank on the left and rank on the right."""
    d.check(t)
    rl = leaf_ranks(t.left, d.left)
    rr = leaf_ranks(t.right, d.right)
    off = t.n - 1
    return rl, [rr[w - off] for w in t.matching]


class FenwickTree:
    """Prefix counts over ``0 .. size-1`` with O(log n) updates."""

    def __init__(self, size: int):
        self._v = [0] * (size + 1)

    def add(self, i: int, delta: int = 1) -> None:
        i += 1
        while i < len(self._v):
            self._v[i] += delta
            i += i & -i

    def prefix(self, stop: int) -> int:
        """Sum of entries ``0 .. stop-1``."""
        total = 0
        while stop > 0:
            total += self._v[stop]
            stop &= stop - 1
        return total


def count_inversions(seq: Sequence[int]) -> int:
    """Pairs i < j with seq[i] > seq[j], for a permutation of 0..len-1."""
    tree = FenwickTree(len(seq))
    inv = 0
    for seen, x in enumerate(seq):
        inv += seen - tree.prefix(x + 1)
        tree.add(x)
    return inv


def crossing_count(t: Tanglegram, d: TanglegramLayout) -> int:
    """Number of crossing edge pairs in layout ``d``, in O(n log n)."""
    rl, rr = edge_ranks(t, d)
    seq = [0] * t.n
    for a, b in zip(rl, rr):
        seq[a] = b
    return count_inversions(seq)


def crossing_count_pairs(t: Tanglegram, d: TanglegramLayout) -> int:
    """All-pairs definition of :func:`crossing_count`; O(n^2), for checking."""
    rl, rr = edge_ranks(t, d)
    n = t.n
    return sum(
        1
        for i in range(n)
        for j in range(i + 1, n)
        if (rl[i] - rl[j]) * (rr[i] - rr[j]) < 0
    )


def mirror_right(d: TanglegramLayout) -> TanglegramLayout:
    """Switch at every right internal node; turns k crossings into C(n,2)-k."""
    return TanglegramLayout(d.left, tuple(1 - b for b in d.right))


def mirror_all(d: TanglegramLayout) -> TanglegramLayout:
    """Reflect the whole drawing; the crossing count is unchanged."""
    return TanglegramLayout(tuple(1 - b for b in d.left), tuple(1 - b for b in d.right))


def _switched(tree: BinaryTree, s) -> BinaryTree:
    s = _check_vector(tree, s)
    kids = {v: (c[1], c[0]) if s[v] else c for v, c in enumerate(tree.children) if c}
    labels = {v: tree.labels[v] for v in tree.leaves}
    return BinaryTree._from_links(tree.root, kids, labels)


def apply_layout(t: Tanglegram, d: TanglegramLayout) -> Tanglegram:
    """The same tanglegram stored so that layout ``d`` becomes the all-zero layout."""
    d.check(t)
    return Tanglegram(_switched(t.left, d.left), _switched(t.right, d.right))


def switch_vectors(m: int) -> Iterator[tuple]:
    """All 0/1 vectors of length ``m`` in lexicographic order."""
    for a in range(1 << m):
        yield tuple((a >> (m - 1 - i)) & 1 for i in range(m))


def _all_rank_rows(tree: BinaryTree, perm=None) -> np.ndarray:
    rows = []
    for s in switch_vectors(tree.n - 1):
        r = leaf_ranks(tree, s)
        rows.append(r if perm is None else [r[p] for p in perm])
    return np.asarray(rows, dtype=np.int64).reshape(len(rows), tree.n)


def brute_force_crt(t: Tanglegram, cap: int = BRUTE_FORCE_CAP) -> tuple:
    """
    Exhaustive minimum over all 4^(n-1) layouts.

    Returns ``(crt, layout)`` where ``layout`` is the lexicographically least
    optimum (left bits, then right bits).  Crossings are evaluated pair by
    pair: with ``A[a, p]`` telling whether pair p is ordered ascending under
    left vector a, and ``B[b, p]`` the same on the right, the count for
    (a, b) is ``|A_a| + |B_b| - 2 A_a.B_b``.
    """
    n = t.n
    if n > cap:
        raise SizeCapError(f"brute force limited to n <= {cap}, got n={n}")
    off = n - 1
    rl = _all_rank_rows(t.left)
    rr = _all_rank_rows(t.right, [w - off for w in t.matching])
    iu, ju = np.triu_indices(n, 1)
    a = (rl[:, iu] < rl[:, ju]).astype(np.int64)
    b = (rr[:, iu] < rr[:, ju]).astype(np.int64)
    cross = a.sum(axis=1)[:, None] + b.sum(axis=1)[None, :] - 2 * (a @ b.T)
    flat = int(np.argmin(cross))
    li, ri = divmod(flat, cross.shape[1])
    vecs = list(switch_vectors(n - 1))
    best = int(cross[li, ri])
    assert 0 <= best <= comb(n, 2)
    return best, TanglegramLayout(vecs[li], vecs[ri])
