"""
Rooted binary trees, tanglegrams, the extremal constructions, and the
``.tgl`` text format.

Node numbering
--------------
Every :class:`BinaryTree` is stored in a normalized node table:

* internal nodes are ``0 .. n-2`` in preorder (root is ``0`` when ``n > 1``),
* leaves are ``n-1 .. 2n-2`` in stored left-to-right (top-to-bottom) order.

A switch vector is therefore index-aligned with the internal nodes, and the
leaves of any clade occupy a contiguous range of node ids.  Constructors
renumber their input into this form, so two trees with the same nested
structure always have identical tables.

All algorithms here are iterative; caterpillars with 10^4 leaves are fine.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "TanglegramError",
    "ParseError",
    "BinaryTree",
    "Tanglegram",
    "MatchingEdge",
    "CladeRef",
    "build_tree",
    "caterpillar",
    "caterpillar_tanglegram",
    "grid_family",
    "extend_family",
    "induce_subtanglegram",
    "remove_edge",
    "canonical_form",
    "isomorphic",
    "serialize",
    "parse",
    "load",
    "dump",
]

_LABEL_RE = re.compile(r"[^\s(),;]+")


class TanglegramError(ValueError):
    """Structural violation of a tree or tanglegram invariant."""


class ParseError(TanglegramError):
    """Malformed tree or ``.tgl`` text.  Carries a 1-based position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


# ====================================================================== #
# Trees                                                                  #
# ====================================================================== #


class BinaryTree:
    """
    A rooted binary tree with labeled leaves in normalized node order.

    Parameters
    ----------
    children : sequence
        ``children[v]`` is ``None``/``()`` for a leaf or a pair ``(c0, c1)``.
    labels : sequence
        ``labels[v]`` is the leaf label (ignored for internal nodes).
    root : int
        Index of the root in the given table.

    The given table is validated and renumbered; see the module docstring.
    Instances are immutable by convention.
    """

    def __init__(self, children: Sequence, labels: Sequence, root: int = 0):
        kids = {}
        for v, c in enumerate(children):
            if c:
                kids[v] = tuple(c)
        labs = {v: labels[v] for v in range(len(children)) if v not in kids}
        self._init_from_links(root, kids, labs, len(children))

    # -- construction --------------------------------------------------- #

    @classmethod
    def _from_links(cls, root, kids: Mapping, labels: Mapping, size=None) -> "BinaryTree":
        obj = cls.__new__(cls)
        obj._init_from_links(root, kids, labels, size)
        return obj

    def _init_from_links(self, root, kids, labels, size):
        internal_pre = []
        leaves = []
        preorder = []
        seen = set()
        stack = [root]
        while stack:
            v = stack.pop()
            if v in seen:
                raise TanglegramError("node table contains a cycle or shared child")
            seen.add(v)
            preorder.append(v)
            c = kids.get(v)
            if c:
                if len(c) != 2:
                    raise TanglegramError(f"node {v!r} has {len(c)} children; need 0 or 2")
                internal_pre.append(v)
                stack.append(c[1])
                stack.append(c[0])
            else:
                leaves.append(v)
        if size is not None and len(seen) != size:
            raise TanglegramError("node table is not connected to the root")
        n = len(leaves)
        index = {v: i for i, v in enumerate(internal_pre)}
        index.update({v: n - 1 + i for i, v in enumerate(leaves)})

        m = 2 * n - 1
        children = [None] * m
        parent = [-1] * m
        for v in internal_pre:
            a, b = kids[v]
            i, ia, ib = index[v], index[a], index[b]
            children[i] = (ia, ib)
            parent[ia] = i
            parent[ib] = i
        labs = [None] * m
        for v in leaves:
            lab = labels.get(v)
            if not isinstance(lab, str) or not _LABEL_RE.fullmatch(lab):
                raise TanglegramError(f"invalid leaf label {lab!r}")
            labs[index[v]] = lab

        self.children: tuple = tuple(children)
        self.parent: tuple = tuple(parent)
        self.labels: tuple = tuple(labs)
        self.root: int = 0
        self.n: int = n
        self._preorder: tuple = tuple(index[v] for v in preorder)

        leaf_index = {}
        for v in range(n - 1, m):
            if labs[v] in leaf_index:
                raise TanglegramError(f"duplicate leaf label {labs[v]!r}")
            leaf_index[labs[v]] = v
        self.leaf_index: dict = leaf_index

    @classmethod
    def from_nested(cls, nested) -> "BinaryTree":
        """
        Build from nested pairs, e.g. ``(("a", "b"), "c")``.

        >>> BinaryTree.from_nested((("a", "b"), "c")).to_string()
        '((a,b),c);'
        """
        kids, labels = {}, {}
        stack = [(nested, 0)]
        counter = 1
        while stack:
            obj, vid = stack.pop()
            if isinstance(obj, str):
                labels[vid] = obj
                continue
            obj = tuple(obj)
            if len(obj) != 2:
                raise TanglegramError(f"internal node with {len(obj)} children")
            ids = (counter, counter + 1)
            counter += 2
            kids[vid] = ids
            stack.append((obj[1], ids[1]))
            stack.append((obj[0], ids[0]))
        return cls._from_links(0, kids, labels)

    # -- basic queries -------------------------------------------------- #

    @property
    def size(self) -> int:
        return 2 * self.n - 1

    @property
    def internal_nodes(self) -> range:
        return range(self.n - 1)

    @property
    def leaves(self) -> range:
        return range(self.n - 1, 2 * self.n - 1)

    def is_leaf(self, v: int) -> bool:
        return v >= self.n - 1

    def preorder(self) -> tuple:
        return self._preorder

    def postorder(self) -> tuple:
        """Children always precede their parent (reversed preorder)."""
        return self._preorder[::-1]

    @cached_property
    def preorder_array(self) -> np.ndarray:
        return np.fromiter(self._preorder, dtype=np.int64, count=self.size)

    @cached_property
    def preorder_clades(self) -> tuple:
        """
        ``(counts, first, parent)`` indexed by preorder position: leaf count,
        offset of the first leaf (add n-1 for its id) and parent position
        (-1 at the root).  Linear time, no per-node Python work.

        The preorder walk steps +1 on internal nodes and -1 on leaves; the
        subtree starting at p ends at the first q >= p where the walk sits
        one below its level just before p.  A stable radix sort by level
        keeps positions ascending inside each level, so every such query is
        answered by the next walk entry after it in that order.
        """
        n, size = self.n, self.size
        internal = self.preorder_array < n - 1
        step = np.where(internal, 1, -1).astype(np.int32)
        walk = np.cumsum(step, dtype=np.int32)
        before = walk - step
        # interleave query p (target level) ahead of walk entry p
        levels = np.empty(2 * size, dtype=np.int16 if n < 2**15 - 2 else np.int32)
        levels[0::2] = before - 1
        levels[1::2] = walk
        order = np.argsort(levels, kind="stable")
        is_walk = (order & 1).astype(bool)
        slot = np.where(is_walk, np.arange(2 * size), 2 * size)
        following = np.minimum.accumulate(slot[::-1])[::-1]
        queries = np.flatnonzero(~is_walk)
        ends = np.empty(size, dtype=np.int64)
        ends[order[queries] >> 1] = order[following[queries]] >> 1
        pos = np.arange(size, dtype=np.int64)
        # a left child follows its parent; a right child follows the
        # parent's left subtree
        parent = np.empty(size, dtype=np.int64)
        parent[0] = -1
        parent[1:] = pos[:-1]
        inner = np.flatnonzero(internal)
        parent[ends[inner + 1] + 1] = inner
        return (ends - pos + 2) // 2, (pos - before) // 2, parent

    @cached_property
    def leaf_count_array(self) -> np.ndarray:
        counts = np.empty(self.size, dtype=np.int64)
        counts[self.preorder_array] = self.preorder_clades[0]
        return counts

    @cached_property
    def first_leaf_array(self) -> np.ndarray:
        first = np.empty(self.size, dtype=np.int64)
        first[self.preorder_array] = self.preorder_clades[1] + self.n - 1
        return first

    @cached_property
    def leaf_counts(self) -> tuple:
        return tuple(self.leaf_count_array.tolist())

    @cached_property
    def first_leaf(self) -> tuple:
        """Smallest leaf id below each node; clade of v is a contiguous range."""
        return tuple(self.first_leaf_array.tolist())

    def clade(self, v: int) -> range:
        """Leaf ids of the clade at ``v``."""
        lo = self.first_leaf[v]
        return range(lo, lo + self.leaf_counts[v])

    @cached_property
    def depths(self) -> tuple:
        d = [0] * self.size
        for v in self._preorder:
            p = self.parent[v]
            if p >= 0:
                d[v] = d[p] + 1
        return tuple(d)

    def lca(self, a: int, b: int) -> int:
        d = self.depths
        while d[a] > d[b]:
            a = self.parent[a]
        while d[b] > d[a]:
            b = self.parent[b]
        while a != b:
            a, b = self.parent[a], self.parent[b]
        return a

    def leaf_labels(self) -> list:
        return [self.labels[v] for v in self.leaves]

    # -- transforms ----------------------------------------------------- #

    def relabel(self, mapping: Mapping[str, str]) -> "BinaryTree":
        kids = {v: c for v, c in enumerate(self.children) if c}
        labels = {v: mapping.get(self.labels[v], self.labels[v]) for v in self.leaves}
        return BinaryTree._from_links(self.root, kids, labels)

    def restrict(self, keep: Iterable[str]) -> "BinaryTree":
        """
        Subtree induced by the leaves labeled in ``keep``: unused branches are
        dropped, degree-two nodes suppressed, and the surviving node closest to
        the old root becomes the root.
        """
        keep = set(keep)
        missing = keep - self.leaf_index.keys()
        if missing:
            raise TanglegramError(f"unknown leaf labels: {sorted(missing)}")
        if not keep:
            raise TanglegramError("cannot restrict a tree to no leaves")
        reduced = [None] * self.size
        kids = {}
        for v in self.postorder():
            c = self.children[v]
            if not c:
                reduced[v] = v if self.labels[v] in keep else None
                continue
            r0, r1 = reduced[c[0]], reduced[c[1]]
            if r0 is not None and r1 is not None:
                kids[v] = (r0, r1)
                reduced[v] = v
            else:
                reduced[v] = r0 if r0 is not None else r1
        labels = {v: self.labels[v] for v in self.leaves}
        return BinaryTree._from_links(reduced[self.root], kids, labels)

    def _links(self):
        kids = {v: c for v, c in enumerate(self.children) if c}
        labels = {v: self.labels[v] for v in self.leaves}
        return kids, labels

    # -- text ----------------------------------------------------------- #

    def to_string(self) -> str:
        """Parenthesized form terminated by ``;``, no whitespace."""
        out = []
        stack = [self.root]
        while stack:
            item = stack.pop()
            if isinstance(item, str):
                out.append(item)
                continue
            c = self.children[item]
            if c:
                stack.extend((")", c[1], ",", c[0]))
                out.append("(")
            else:
                out.append(self.labels[item])
        return "".join(out) + ";"

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        s = self.to_string()
        if len(s) > 60:
            s = s[:57] + "..."
        return f"BinaryTree({s!r})"

    def __eq__(self, other):
        if not isinstance(other, BinaryTree):
            return NotImplemented
        return self.children == other.children and self.labels == other.labels

    def __hash__(self):
        return hash((self.children, self.labels))


# ====================================================================== #
# Tanglegrams                                                            #
# ====================================================================== #


@dataclass(frozen=True)
class MatchingEdge:
    """A matching edge given by its left and right leaf node ids."""

    left: int
    right: int


@dataclass(frozen=True)
class CladeRef:
    side: str  # "left" or "right"
    node: int


class Tanglegram:
    """
    Two binary trees on the same leaf label set.  Shared labels define the
    perfect matching between the two leaf sets.
    """

    def __init__(self, left: BinaryTree, right: BinaryTree):
        if left.n != right.n:
            raise TanglegramError(f"tree sizes differ: {left.n} != {right.n}")
        if left.leaf_index.keys() != right.leaf_index.keys():
            diff = sorted(left.leaf_index.keys() ^ right.leaf_index.keys())
            raise TanglegramError(f"leaf label sets differ: {diff[:5]}")
        self.left = left
        self.right = right
        self.n = left.n
        ridx = right.leaf_index
        # indexed by left leaf id - (n - 1)
        self.matching: tuple = tuple(ridx[left.labels[v]] for v in left.leaves)

    def match_left(self, v: int) -> int:
        return self.matching[v - (self.n - 1)]

    @cached_property
    def matching_inverse(self) -> tuple:
        inv = [0] * self.n
        for i, r in enumerate(self.matching):
            inv[r - (self.n - 1)] = i + self.n - 1
        return tuple(inv)

    def match_right(self, w: int) -> int:
        return self.matching_inverse[w - (self.n - 1)]

    @property
    def edges(self) -> list:
        return [MatchingEdge(v, self.match_left(v)) for v in self.left.leaves]

    def edge(self, label: str) -> MatchingEdge:
        v = self.left.leaf_index[label]
        return MatchingEdge(v, self.match_left(v))

    def edge_label(self, e: MatchingEdge) -> str:
        return self.left.labels[e.left]

    @property
    def labels(self) -> list:
        """Edge labels in left-leaf order."""
        return self.left.leaf_labels()

    def tree(self, side: str) -> BinaryTree:
        if side == "left":
            return self.left
        if side == "right":
            return self.right
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")

    def __eq__(self, other):
        if not isinstance(other, Tanglegram):
            return NotImplemented
        return self.left == other.left and self.right == other.right

    def __hash__(self):
        return hash((self.left, self.right))

    def __repr__(self):
        return f"Tanglegram(n={self.n}, left={self.left!r}, right={self.right!r})"


def build_tree(text: str) -> BinaryTree:
    """
    Parse a parenthesization such as ``"((a,b),c)"``; the ``;`` is optional.

    >>> build_tree("((a,b),(c,d))").size
    7
    """
    tokens = list(_tokenize(text))
    tree, pos = _parse_tree_tokens(tokens, 0, require_semicolon=False)
    if pos != len(tokens):
        tok = tokens[pos]
        raise ParseError(f"unexpected {tok[1]!r} after tree", tok[2], tok[3])
    return tree


# ====================================================================== #
# Constructions                                                          #
# ====================================================================== #


def caterpillar(n: int, prefix: str = "u") -> BinaryTree:
    """
    The caterpillar C_n: one leaf at each depth 1..n-2, two at depth n-1.

    Leaves are labeled ``{prefix}1 .. {prefix}n`` by depth; ``{prefix}n`` is
    the second member of the deep cherry.
    """
    if n < 2:
        raise TanglegramError("caterpillar needs n >= 2")
    # spine node ("s", i) sits at depth i-1 and holds leaf i first
    kids = {("s", i): (("l", i), ("s", i + 1)) for i in range(1, n - 1)}
    kids[("s", n - 1)] = (("l", n - 1), ("l", n))
    labels = {("l", i): f"{prefix}{i}" for i in range(1, n + 1)}
    return BinaryTree._from_links(("s", 1), kids, labels)


def caterpillar_tanglegram(n: int) -> Tanglegram:
    """
    P_n: two caterpillars with u_i matched to v_(n-i) for i < n and u_n to v_n.

    Edge labels read ``u{i}v{j}``.
    """
    if n < 4:
        raise TanglegramError("caterpillar tanglegram needs n >= 4")
    left = {f"u{i}": f"u{i}v{n - i}" for i in range(1, n)}
    left[f"u{n}"] = f"u{n}v{n}"
    right = {f"v{j}": f"u{n - j}v{j}" for j in range(1, n)}
    right[f"v{n}"] = f"u{n}v{n}"
    return Tanglegram(caterpillar(n, "u").relabel(left), caterpillar(n, "v").relabel(right))


def _graft(base: BinaryTree, parts: Sequence[BinaryTree], names) -> BinaryTree:
    """Identify the root of ``parts[i]`` with the i-th leaf of ``base``.

    ``names(i, j)`` labels the j-th leaf (stored order) of ``parts[i]``;
    i and j are 1-based.
    """
    kids, labels = {}, {}
    bkids, _ = base._links()
    for v, (a, b) in bkids.items():
        kids[("b", v)] = (("b", a), ("b", b))
    for i, (leaf, part) in enumerate(zip(base.leaves, parts), start=1):
        pkids, _ = part._links()
        for v, (a, b) in pkids.items():
            kids[(i, v)] = ((i, a), (i, b))
        for j, v in enumerate(part.leaves, start=1):
            labels[(i, v)] = names(i, j)
        # the base leaf becomes the part's root
        p = base.parent[leaf]
        a, b = kids[("b", p)]
        kids[("b", p)] = ((i, part.root), b) if a == ("b", leaf) else (a, (i, part.root))
    return BinaryTree._from_links(("b", base.root), kids, labels)


def grid_family(subtrees: Sequence[BinaryTree]) -> Tanglegram:
    """
    Member of the grid family on k^2 leaves from ``(L_0..L_k, R_0..R_k)``.

    Leaf i of L_0 (stored order) is replaced by L_i, whose j-th leaf is
    v_ij; R is built the same way with leaves w_ij.  Edges match v_ij with
    w_ji and are labeled ``v{i}_{j}w{j}_{i}``.
    """
    subtrees = list(subtrees)
    if len(subtrees) % 2 or len(subtrees) < 6:
        raise TanglegramError("need a (2k+2)-tuple of trees with k >= 2")
    k = len(subtrees) // 2 - 1
    bad = [t.n for t in subtrees if t.n != k]
    if bad:
        raise TanglegramError(f"every component must have k={k} leaves, got sizes {bad}")
    ls, rs = subtrees[: k + 1], subtrees[k + 1:]
    left = _graft(ls[0], ls[1:], lambda i, j: f"v{i}_{j}w{j}_{i}")
    right = _graft(rs[0], rs[1:], lambda i, j: f"v{j}_{i}w{i}_{j}")
    return Tanglegram(left, right)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _subdivide(kids: dict, parent: dict, root, target, leaf, flip: bool):
    """Insert a new internal node above ``target`` carrying new ``leaf``."""
    node = ("x", leaf)
    kids[node] = (leaf, target) if flip else (target, leaf)
    p = parent.get(target)
    if p is None:
        root = node
    else:
        a, b = kids[p]
        kids[p] = (node, b) if a == target else (a, node)
        parent[node] = p
    parent[target] = node
    parent[leaf] = node
    return root


def extend_family(base: Tanglegram, n: int, rng=None) -> Tanglegram:
    """
    Grow a grid-family member of size k^2 to size n, k^2 <= n < (k+1)^2.

    Each extra matched pair ``x{m}`` hangs off an rng-chosen edge of each
    tree, the edge above the root included.  Restricting the result to the
    base labels gives back ``base``.
    """
    k = math.isqrt(base.n)
    if k * k != base.n or k < 2:
        raise TanglegramError(f"base size {base.n} is not k^2 with k >= 2")
    if not (k * k <= n < (k + 1) ** 2):
        raise TanglegramError(f"n={n} outside [{k * k}, {(k + 1) ** 2})")
    rng = _as_rng(rng)
    used = set(base.left.leaf_index)
    new_labels = []
    m = 0
    while len(new_labels) < n - base.n:
        m += 1
        if f"x{m}" not in used:
            new_labels.append(f"x{m}")

    out = []
    for tree in (base.left, base.right):
        kids, labels = tree._links()
        parent = {c: v for v, cs in kids.items() for c in cs}
        nodes = list(range(tree.size))
        root = tree.root
        for lab in new_labels:
            target = nodes[int(rng.integers(len(nodes)))]
            leaf = ("leaf", lab)
            labels[leaf] = lab
            root = _subdivide(kids, parent, root, target, leaf, bool(rng.integers(2)))
            nodes.extend((leaf, ("x", leaf)))
        out.append(BinaryTree._from_links(root, kids, labels))
    return Tanglegram(*out)


def _edge_labels(t: Tanglegram, keep) -> set:
    labels = set()
    for e in keep:
        if isinstance(e, MatchingEdge):
            lab = t.edge_label(e)
            if t.match_left(e.left) != e.right:
                raise TanglegramError(f"{e} is not a matching edge")
            labels.add(lab)
        else:
            labels.add(e)
    return labels


def induce_subtanglegram(t: Tanglegram, keep: Iterable) -> Tanglegram:
    """Subtanglegram induced by ``keep`` (MatchingEdges or edge labels)."""
    labels = _edge_labels(t, keep)
    if not labels:
        raise TanglegramError("keep set must be nonempty")
    return Tanglegram(t.left.restrict(labels), t.right.restrict(labels))


def remove_edge(t: Tanglegram, e) -> Tanglegram:
    """``T - e``: drop one matching edge (MatchingEdge or label)."""
    drop = _edge_labels(t, [e])
    return induce_subtanglegram(t, set(t.labels) - drop)


# ====================================================================== #
# Isomorphism                                                            #
# ====================================================================== #


def _shape_strings(tree: BinaryTree) -> list:
    shape = [""] * tree.size
    for v in tree.postorder():
        c = tree.children[v]
        if c:
            a, b = sorted((shape[c[0]], shape[c[1]]))
            shape[v] = "(" + a + b + ")"
        else:
            shape[v] = "."
    return shape


def canonical_form(t: Tanglegram) -> str:
    """
    Label-free canonical string; equal iff the tanglegrams are isomorphic.

    The left tree is ordered by unlabeled shape, trying both orders at nodes
    whose two child clades have the same shape; each resulting leaf ranking
    labels the right tree, which then has a unique sorted form.  The minimum
    over all rankings is returned, so the cost is exponential in the number
    of symmetric left nodes (fine for the sizes this package solves exactly).
    """
    left, right = t.left, t.right
    shape = _shape_strings(left)
    ties = [v for v in left.internal_nodes if shape[left.children[v][0]] == shape[left.children[v][1]]]
    base_flip = [False] * left.size
    for v in left.internal_nodes:
        a, b = left.children[v]
        base_flip[v] = shape[a] > shape[b]

    best = None
    for bits in itertools.product((False, True), repeat=len(ties)):
        flip = list(base_flip)
        for v, bit in zip(ties, bits):
            flip[v] = bit
        rank = {}
        stack = [left.root]
        while stack:
            v = stack.pop()
            c = left.children[v]
            if c:
                first, second = (c[1], c[0]) if flip[v] else c
                stack.append(second)
                stack.append(first)
            else:
                rank[left.labels[v]] = len(rank)
        form = [""] * right.size
        for w in right.postorder():
            c = right.children[w]
            if c:
                a, b = sorted((form[c[0]], form[c[1]]))
                form[w] = "(" + a + "," + b + ")"
            else:
                form[w] = str(rank[right.labels[w]])
        cand = form[right.root]
        if best is None or cand < best:
            best = cand
    return shape[left.root] + "|" + best


def isomorphic(a: Tanglegram, b: Tanglegram) -> bool:
    if a.n != b.n:
        return False
    return canonical_form(a) == canonical_form(b)


# ====================================================================== #
# Text format                                                            #
# ====================================================================== #

_HEADER = ("tgl", "v1")


def _tokenize(text: str):
    """Yield ``(kind, value, line, column)``; kinds: punct, label."""
    line, col = 1, 1
    i, end = 0, len(text)
    while i < end:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
        elif ch.isspace():
            i += 1
            col += 1
        elif ch in "(),;":
            yield ("punct", ch, line, col)
            i += 1
            col += 1
        else:
            m = _LABEL_RE.match(text, i)
            yield ("label", m.group(), line, col)
            col += m.end() - i
            i = m.end()


def _parse_tree_tokens(tokens, pos, require_semicolon=True):
    """Parse one tree starting at ``tokens[pos]``; returns (tree, next_pos)."""

    def err(msg, at):
        if at < len(tokens):
            raise ParseError(msg, tokens[at][2], tokens[at][3])
        last = tokens[-1] if tokens else ("", "", 1, 0)
        raise ParseError(msg + " (unexpected end of input)", last[2], last[3] + len(last[1]))

    kids, labels = {}, {}
    seen_labels = {}
    counter = 0
    # stack frames: [node_id, child_ids, opening token index]
    stack = []
    root = None
    expect_node = True
    while True:
        if pos >= len(tokens):
            err("incomplete tree", pos)
        kind, val, ln, cl = tokens[pos]
        if expect_node:
            if kind == "label":
                if val in seen_labels:
                    raise ParseError(f"duplicate label {val!r}", ln, cl)
                seen_labels[val] = (ln, cl)
                labels[counter] = val
                node = counter
                counter += 1
                pos += 1
                expect_node = False
                if stack:
                    stack[-1][1].append(node)
                else:
                    root = node
                    break
            elif val == "(":
                stack.append([counter, [], pos])
                counter += 1
                pos += 1
            else:
                err(f"expected a label or '(' but found {val!r}", pos)
        else:
            if val == ",":
                if not stack:
                    err("',' outside parentheses", pos)
                expect_node = True
                pos += 1
            elif val == ")":
                if not stack:
                    err("unbalanced ')'", pos)
                node, ch, opened = stack.pop()
                if len(ch) != 2:
                    _, _, oln, ocl = tokens[opened]
                    raise ParseError(f"internal node has {len(ch)} children; need exactly 2", oln, ocl)
                kids[node] = tuple(ch)
                pos += 1
                if stack:
                    stack[-1][1].append(node)
                else:
                    root = node
                    break
            else:
                err(f"expected ',' or ')' but found {val!r}", pos)
    if pos < len(tokens) and tokens[pos][1] == ";":
        pos += 1
    elif require_semicolon:
        err("expected ';' after tree", pos)
    return BinaryTree._from_links(root, kids, labels), pos


def serialize(t: Tanglegram) -> str:
    """``.tgl`` text: header line, left tree line, right tree line."""
    return f"{' '.join(_HEADER)}\n{t.left.to_string()}\n{t.right.to_string()}\n"


def parse(text: str) -> Tanglegram:
    """Inverse of :func:`serialize`; whitespace between tokens is ignored."""
    tokens = list(_tokenize(text))
    if len(tokens) < 2 or tuple(tok[1] for tok in tokens[:2]) != _HEADER:
        ln, cl = (tokens[0][2], tokens[0][3]) if tokens else (1, 1)
        raise ParseError("missing 'tgl v1' header", ln, cl)
    if tokens[0][2] != tokens[1][2]:
        raise ParseError("header must be on one line", tokens[1][2], tokens[1][3])
    left, pos = _parse_tree_tokens(tokens, 2)
    right, pos = _parse_tree_tokens(tokens, pos)
    if pos != len(tokens):
        tok = tokens[pos]
        raise ParseError(f"trailing content {tok[1]!r}", tok[2], tok[3])
    try:
        return Tanglegram(left, right)
    except TanglegramError as exc:
        raise ParseError(str(exc), tokens[-1][2], tokens[-1][3]) from None


def load(path) -> Tanglegram:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(t: Tanglegram, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(t))
