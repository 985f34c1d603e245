from itertools import combinations
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import relabeled
from tanglegram.core import (
    BinaryTree,
    MatchingEdge,
    ParseError,
    Tanglegram,
    TanglegramError,
    build_tree,
    canonical_form,
    caterpillar,
    caterpillar_tanglegram,
    extend_family,
    grid_family,
    induce_subtanglegram,
    isomorphic,
    parse,
    remove_edge,
    serialize,
)
from tanglegram.sampler import SampleConfig, random_tanglegram, random_tree

DATA = Path(__file__).parent / "data"


def leaf_depths(tree):
    return sorted(tree.depths[v] for v in tree.leaves)


def check_tree_invariants(tree):
    n = tree.n
    assert tree.size == 2 * n - 1
    assert sum(1 for c in tree.children if not c) == n
    assert sum(1 for c in tree.children if c) == n - 1
    assert [v for v in range(tree.size) if tree.parent[v] < 0] == [tree.root]
    for v, c in enumerate(tree.children):
        if c:
            assert tree.parent[c[0]] == v and tree.parent[c[1]] == v
    # every node reachable exactly once
    assert sorted(tree.preorder()) == list(range(tree.size))


# -- build_tree ----------------------------------------------------------


def test_build_cherry():
    t = build_tree("(a,b)")
    assert (t.n, t.size, len(t.internal_nodes)) == (2, 3, 1)
    check_tree_invariants(t)


def test_build_three_leaves_has_root_cherry():
    t = build_tree("((a,b),c)")
    assert t.n == 3
    cherry = t.children[t.root][0]
    assert {t.labels[v] for v in t.clade(cherry)} == {"a", "b"}


def test_build_balanced_four():
    t = build_tree("((a,b),(c,d))")
    assert t.size == 7
    assert len(t.internal_nodes) == 3
    assert leaf_depths(t) == [2, 2, 2, 2]


def test_build_single_leaf():
    t = build_tree("a;")
    assert (t.n, t.size, t.root) == (1, 1, 0)


@pytest.mark.parametrize(
    "text",
    ["(a)", "(a,b,c)", "((a,b),a)", "(a,b", "a,b)", "((a,b),)", "", "(a,b);x"],
)
def test_build_rejects(text):
    with pytest.raises(TanglegramError):
        build_tree(text)


def test_unary_node_error_has_position():
    with pytest.raises(ParseError) as info:
        build_tree("((a),b)")
    assert (info.value.line, info.value.column) == (1, 2)


def test_whitespace_tolerated():
    assert build_tree(" ( ( a ,b ) ,\n c ) ; ") == build_tree("((a,b),c)")


def test_constructor_validates_table():
    t = BinaryTree([(1, 2), None, None], ["", "a", "b"], root=0)
    assert t.to_string() == "(a,b);"
    with pytest.raises(TanglegramError):
        BinaryTree([(1,), None], ["", "a"])
    with pytest.raises(TanglegramError):
        BinaryTree([(1, 2), None, None, None], ["", "a", "b", "c"])  # node 3 unreachable
    with pytest.raises(TanglegramError):
        BinaryTree([(1, 2), (0, 2), None], ["", "", "a"])  # cycle


def test_normalized_numbering():
    t = build_tree("((a,b),(c,(d,e)))")
    assert t.root == 0
    assert list(t.internal_nodes) == [0, 1, 2, 3]
    assert [t.labels[v] for v in t.leaves] == ["a", "b", "c", "d", "e"]
    for v in t.internal_nodes:
        assert list(t.clade(v)) == sorted(t.clade(v))


# -- caterpillars --------------------------------------------------------


def test_caterpillar_two_is_cherry():
    assert leaf_depths(caterpillar(2)) == [1, 1]


@pytest.mark.parametrize("n, depths", [(4, [1, 2, 3, 3]), (6, [1, 2, 3, 4, 5, 5])])
def test_caterpillar_depths(n, depths):
    t = caterpillar(n)
    assert leaf_depths(t) == depths
    lab = {t.labels[v]: t.depths[v] for v in t.leaves}
    assert [lab[f"u{i}"] for i in range(1, n + 1)] == depths


def test_caterpillar_rejects_small():
    with pytest.raises(TanglegramError):
        caterpillar(1)


def test_deep_caterpillar_is_iterative():
    t = caterpillar(20000)
    assert t.n == 20000 and max(t.depths) == 19999
    check_tree_invariants(t)


def _matching_by_name(t):
    """{u_i: v_j} read back from the generated tanglegram."""
    out = {}
    for e in t.edges:
        u = t.left.labels[e.left]
        out[u.split("v")[0]] = "v" + u.split("v")[1]
    return out


def test_caterpillar_tanglegram_four():
    t = caterpillar_tanglegram(4)
    assert _matching_by_name(t) == {"u1": "v3", "u2": "v2", "u3": "v1", "u4": "v4"}
    # the labels also sit at the right depths
    for e in t.edges:
        u, v = t.left.labels[e.left][1:].split("v")
        assert t.left.depths[e.left] == min(int(u), 3)
        assert t.right.depths[e.right] == min(int(v), 3)


def test_caterpillar_tanglegram_eight():
    t = caterpillar_tanglegram(8)
    expect = {f"u{i}": f"v{8 - i}" for i in range(1, 8)}
    expect["u8"] = "v8"
    assert _matching_by_name(t) == expect


def test_caterpillar_tanglegram_rejects_small():
    with pytest.raises(TanglegramError):
        caterpillar_tanglegram(3)


# -- grid family ---------------------------------------------------------


def grid_edges_between(t, k):
    """For clades (i, j) left and (a, b) right, the 4 connecting edges exist."""
    names = set(t.labels)
    for i, j in combinations(range(1, k + 1), 2):
        for a, b in combinations(range(1, k + 1), 2):
            for x, y in ((i, a), (j, b), (j, a), (i, b)):
                assert f"v{x}_{y}w{y}_{x}" in names


def test_grid_family_k3_shape():
    t = grid_family([caterpillar(3)] * 8)
    assert t.n == 9
    grid_edges_between(t, 3)
    # each v_ij sits in the 3-leaf clade L_i
    for v in t.left.leaves:
        lab = t.left.labels[v]
        i = int(lab[1])
        anc = v
        while t.left.leaf_counts[anc] < 3:
            anc = t.left.parent[anc]
        assert {t.left.labels[x][1] for x in t.left.clade(anc)} == {str(i)}


def test_grid_family_k2():
    t = grid_family([caterpillar(2)] * 6)
    assert t.n == 4
    grid_edges_between(t, 2)


def test_grid_family_errors():
    with pytest.raises(TanglegramError):
        grid_family([caterpillar(3)] * 7)
    with pytest.raises(TanglegramError):
        grid_family([caterpillar(3)] * 7 + [caterpillar(4)])


@given(st.integers(2, 5), st.integers(0, 2**32))
@settings(max_examples=25, deadline=None)
def test_grid_family_random_components(k, seed):
    rng = np.random.default_rng(seed)
    t = grid_family([random_tree(k, rng) for _ in range(2 * k + 2)])
    assert t.n == k * k
    grid_edges_between(t, k)


# -- extend_family -------------------------------------------------------


def test_extend_identity():
    base = grid_family([caterpillar(2)] * 6)
    assert extend_family(base, 4, 0) == base


@pytest.mark.parametrize("k, n", [(2, 5), (2, 8), (3, 12), (3, 15)])
def test_extend_contains_base(k, n):
    base = grid_family([caterpillar(k)] * (2 * k + 2))
    for seed in range(5):
        t = extend_family(base, n, seed)
        assert t.n == n
        assert induce_subtanglegram(t, base.labels) == base


def test_extend_out_of_range():
    base = grid_family([caterpillar(2)] * 6)
    with pytest.raises(TanglegramError):
        extend_family(base, 9, 0)
    with pytest.raises(TanglegramError):
        extend_family(base, 3, 0)


# -- subtanglegrams ------------------------------------------------------


def test_induce_all_is_identity():
    t = random_tanglegram(SampleConfig(12, seed=3))
    assert induce_subtanglegram(t, t.edges) == t
    assert isomorphic(induce_subtanglegram(t, t.labels), t)


def test_induce_rejects_empty():
    t = caterpillar_tanglegram(5)
    with pytest.raises(TanglegramError):
        induce_subtanglegram(t, [])


def test_induce_suppresses_and_reroots():
    t = Tanglegram(build_tree("((a,b),(c,d))"), build_tree("(((a,c),b),d)"))
    s = induce_subtanglegram(t, ["a", "b", "c"])
    assert s.left.to_string() == "((a,b),c);"
    assert s.right.to_string() == "((a,c),b);"
    s = induce_subtanglegram(t, ["a", "b"])
    assert s.left.to_string() == "(a,b);" and s.right.to_string() == "(a,b);"


def test_induce_accepts_matching_edges():
    t = caterpillar_tanglegram(6)
    e = t.edges[0]
    assert remove_edge(t, e) == remove_edge(t, t.edge_label(e))
    with pytest.raises(TanglegramError):
        induce_subtanglegram(t, [MatchingEdge(e.left, t.edges[1].right)])


@pytest.mark.parametrize("n", range(5, 12))
def test_caterpillar_minus_interior_edge_is_smaller_caterpillar(n):
    t = caterpillar_tanglegram(n)
    smaller = caterpillar_tanglegram(n - 1)
    for j in range(2, n - 1):
        assert isomorphic(remove_edge(t, f"u{j}v{n - j}"), smaller)
    # removing u_n v_n does not give P_{n-1}
    assert not isomorphic(remove_edge(t, f"u{n}v{n}"), smaller)


# -- isomorphism ---------------------------------------------------------


@pytest.mark.parametrize("n", [4, 7, 10])
def test_caterpillar_tanglegram_isomorphic_under_relabeling(n, rng):
    t = caterpillar_tanglegram(n)
    assert isomorphic(t, relabeled(t, rng))


@given(st.integers(1, 12), st.integers(0, 2**32), st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_canonical_form_invariant_under_relabel_and_switches(n, seed, seed2):
    from tanglegram.layout import apply_layout
    from conftest import random_layout

    t = random_tanglegram(SampleConfig(n, seed=seed))
    rng = np.random.default_rng(seed2)
    u = apply_layout(relabeled(t, rng), random_layout(t, rng))
    assert canonical_form(u) == canonical_form(t)


def test_isomorphism_distinguishes_matchings():
    a = Tanglegram(build_tree("((a,b),(c,d))"), build_tree("((a,b),(c,d))"))
    b = Tanglegram(build_tree("((a,b),(c,d))"), build_tree("((a,c),(b,d))"))
    assert not isomorphic(a, b)
    assert isomorphic(a, Tanglegram(build_tree("((c,d),(b,a))"), build_tree("((a,b),(d,c))")))


def drawing_signatures(t):
    """Every drawing of t as (left plane shape, right plane shape, permutation)."""
    import re

    from tanglegram.layout import TanglegramLayout, apply_layout, switch_vectors

    sigs = set()
    for a in switch_vectors(t.n - 1):
        for b in switch_vectors(t.n - 1):
            u = apply_layout(t, TanglegramLayout(a, b))
            shape = lambda tree: re.sub(r"[^(),;]+", "*", tree.to_string())
            rpos = {lab: i for i, lab in enumerate(u.right.leaf_labels())}
            perm = tuple(rpos[lab] for lab in u.left.leaf_labels())
            sigs.add((shape(u.left), shape(u.right), perm))
    return sigs


def test_isomorphism_agrees_with_drawing_oracle():
    from itertools import permutations

    pool = []
    for ls in ["(((a,b),c),d)", "((a,b),(c,d))"]:
        for rs in ["(((a,b),c),d)", "((a,b),(c,d))"]:
            for perm in list(permutations("abcd"))[::3]:
                pool.append(Tanglegram(build_tree(ls), build_tree(rs).relabel(dict(zip("abcd", perm)))))
    pool += [random_tanglegram(SampleConfig(5, seed=9), i) for i in range(12)]
    sigs = [drawing_signatures(t) for t in pool]
    classes = set()
    for (x, sx), (y, sy) in combinations(zip(pool, sigs), 2):
        expect = bool(sx & sy)
        assert isomorphic(x, y) == expect
        classes.add(canonical_form(x))
    assert len(classes) > 3


# -- serialization -------------------------------------------------------


def test_p4_golden_file():
    text = (DATA / "p4.tgl").read_text()
    assert serialize(caterpillar_tanglegram(4)) == text
    assert parse(text) == caterpillar_tanglegram(4)


@given(st.integers(1, 30), st.integers(0, 2**32))
@settings(max_examples=50, deadline=None)
def test_round_trip(n, seed):
    t = random_tanglegram(SampleConfig(n, seed=seed))
    text = serialize(t)
    u = parse(text)
    assert u == t
    assert u.left.children == t.left.children and u.matching == t.matching
    assert serialize(u) == text


def test_parse_whitespace():
    t = parse("  tgl   v1 \n\n ( (a , b) , c ) ;\n( a ,\n (b,c) )\t;\n\n")
    assert serialize(t) == "tgl v1\n((a,b),c);\n(a,(b,c));\n"


@pytest.mark.parametrize(
    "text, line",
    [
        ("tgl v2\n(a,b);\n(a,b);\n", 1),
        ("tgl v1\n(a,(b));\n(a,b);\n", 2),
        ("tgl v1\n(a,b);\n(a,c);\n", 3),
        ("tgl v1\n(a,a);\n(a,b);\n", 2),
        ("tgl v1\n(a,b)\n(a,b);\n", 3),
        ("tgl v1\n(a,b);\n(a,b);\n(a,b);\n", 4),
        ("tgl v1\n(a,b);\n(a,b,c);\n", 3),
    ],
)
def test_parse_errors_report_line(text, line):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.line == line


def test_tanglegram_label_sets_must_agree():
    with pytest.raises(TanglegramError):
        Tanglegram(build_tree("(a,b)"), build_tree("(a,c)"))
    with pytest.raises(TanglegramError):
        Tanglegram(build_tree("(a,b)"), build_tree("((a,b),c)"))


def test_single_leaf_tanglegram():
    t = parse("tgl v1\nx;\nx;\n")
    assert t.n == 1 and t.edges == [MatchingEdge(0, 0)]


@given(st.integers(1, 80), st.integers(0, 2**32))
@settings(max_examples=100, deadline=None)
def test_leaf_counts_match_recursion(n, seed):
    tree = random_tree(n, np.random.default_rng(seed))

    def count(v):
        kids = tree.children[v]
        return 1 if not kids else count(kids[0]) + count(kids[1])

    assert list(tree.leaf_counts) == [count(v) for v in range(tree.size)]
    assert tree.leaf_counts[tree.root] == n
    pre = tree.preorder()
    for v in range(tree.size):
        first = v
        while tree.children[first]:
            first = tree.children[first][0]
        assert tree.first_leaf[v] == first
    parent_pos = tree.preorder_clades[2]
    assert [pre[p] if p >= 0 else -1 for p in parent_pos] == [tree.parent[v] for v in pre]
