"""
Polynomial lower bound on the tangle crossing number from clade partitions.

Each tree's leaves are cut into maximal clades of at most ``cap`` leaves.
For clades U_a, U_b on the left and V_c, V_d on the right, any layout makes
either every (U_a,V_c) edge cross every (U_b,V_d) edge or every (U_a,V_d)
edge cross every (U_b,V_c) edge, so

    sum over {a,b}, {c,d} of min(M_ac * M_bd, M_ad * M_bc)

never exceeds crt, where M counts matching edges between clades.  The bound
reads only tree structure, never a layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Real

import numpy as np

from .core import BinaryTree, Tanglegram, TanglegramError

__all__ = [
    "CladePartition",
    "clade_partition",
    "clade_matrix",
    "pair_min_sum",
    "pair_min_sum_reference",
    "crossing_lower_bound",
    "resolve_cap",
    "CAP_POLICIES",
]

# the s / m / l policies of the simulation harness
CAP_POLICIES = {
    "s": lambda n: 4,
    "m": lambda n: math.sqrt(n),
    "l": lambda n: n / 2,
}


@dataclass(frozen=True)
class CladePartition:
    """Leaf partition of one tree into clades; parts are in top-down order."""

    side: str
    parts: tuple  # leaf-id ranges, one per clade
    nodes: tuple  # defining node of each part
    cap: Real
    n: int

    @property
    def sizes(self) -> list:
        return [len(p) for p in self.parts]

    def __len__(self):
        return len(self.parts)

    def part_index(self) -> list:
        """``index[v - (n-1)]`` is the part containing leaf ``v``."""
        index = [-1] * self.n
        off = self.n - 1
        for i, part in enumerate(self.parts):
            for v in part:
                index[v - off] = i
        return index


def _check_cap(cap) -> None:
    if isinstance(cap, bool) or not isinstance(cap, Real) or not cap > 1:
        raise TanglegramError(f"clade size cap must be a real number > 1, got {cap!r}")


def clade_partition(tree: BinaryTree, cap: Real, side: str = "left") -> CladePartition:
    """
    Maximal clades with at most ``cap`` leaves: nodes whose leaf count is
    ``<= cap`` while their parent's exceeds it (the root qualifies on its own
    when ``cap >= n``).  Linear time.
    """
    _check_cap(cap)
    counts, first, parent = tree.preorder_clades
    above = np.where(parent < 0, np.inf, counts[parent])
    picked = np.flatnonzero((counts <= cap) & (above > cap))
    nodes = tuple(tree.preorder_array[picked].tolist())
    off = tree.n - 1
    lo = (first[picked] + off).tolist()
    hi = (first[picked] + off + counts[picked]).tolist()
    parts = tuple(map(range, lo, hi))
    return CladePartition(side, parts, tuple(nodes), cap, tree.n)


def clade_matrix(t: Tanglegram, left: CladePartition, right: CladePartition) -> np.ndarray:
    """``M[i, j]`` = number of matching edges from left part i to right part j."""
    if left.side != "left" or right.side != "right":
        raise TanglegramError("expected a left partition and a right partition")
    if left.n != t.n or right.n != t.n:
        raise TanglegramError("partition sizes do not match the tanglegram")
    li = left.part_index()
    ri = right.part_index()
    if min(li) < 0 or min(ri) < 0:
        raise TanglegramError("partition does not cover every leaf")
    off = t.n - 1
    m = np.zeros((len(left), len(right)), dtype=np.int64)
    for i, w in enumerate(t.matching):
        m[li[i], ri[w - off]] += 1
    return m


def pair_min_sum(matrix) -> int:
    """
    Sum over unordered row pairs {i1, i2} and column pairs {j1, j2} of
    ``min(M[i1,j1] * M[i2,j2], M[i1,j2] * M[i2,j1])``.

    For rows a, b the matrix P = outer(a, b) gives the pair terms as
    min(P, P^T) off the diagonal; only columns where ``a`` is nonzero can
    contribute.
    """
    m = np.asarray(matrix, dtype=np.int64)
    total = 0
    for i in range(m.shape[0] - 1):
        cols = np.flatnonzero(m[i])
        if len(cols) < 2:
            continue
        a = m[i, cols]
        b = m[i + 1:, cols]
        p = a[None, :, None] * b[:, None, :]
        s = np.minimum(p, p.transpose(0, 2, 1)).sum() - (a[None, :] * b).sum()
        total += int(s) // 2
    return total


def pair_min_sum_reference(matrix) -> int:
    """Plain quadruple loop over i1 < i2, j1 < j2."""
    m = [[int(x) for x in row] for row in np.asarray(matrix)]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    total = 0
    for i1 in range(rows):
        for i2 in range(i1 + 1, rows):
            for j1 in range(cols):
                for j2 in range(j1 + 1, cols):
                    total += min(m[i1][j1] * m[i2][j2], m[i1][j2] * m[i2][j1])
    return total


def crossing_lower_bound(t: Tanglegram, cap_left: Real, cap_right: Real) -> int:
    """Lower bound on crt(t) from clade partitions with the given caps."""
    _check_cap(cap_left)
    _check_cap(cap_right)
    lp = clade_partition(t.left, cap_left, "left")
    rp = clade_partition(t.right, cap_right, "right")
    return pair_min_sum(clade_matrix(t, lp, rp))


def resolve_cap(expr, n: int) -> Real:
    """
    Turn a cap expression into a number: ``"sqrt"`` is sqrt(n), ``"half"``
    is n/2, the policy letters ``s``/``m``/``l`` map to 4, sqrt(n), n/2, and
    anything else is read as a number.
    """
    if isinstance(expr, Real) and not isinstance(expr, bool):
        cap = expr
    else:
        key = str(expr).strip()
        named = {"sqrt": CAP_POLICIES["m"], "half": CAP_POLICIES["l"], **CAP_POLICIES}
        if key in named:
            cap = named[key](n)
        else:
            try:
                cap = int(key)
            except ValueError:
                try:
                    cap = float(key)
                except ValueError:
                    raise TanglegramError(f"cannot read cap expression {expr!r}") from None
    _check_cap(cap)
    return cap
