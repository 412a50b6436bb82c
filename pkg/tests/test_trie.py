import pytest
from hypothesis import given, strategies as st

from sparsesuffix.builder import build_coarse_large, build_coarse_small, coarse_array_view
from sparsesuffix.fingerprint import fp_of, new_context
from sparsesuffix.lce import build_dc_lce
from sparsesuffix.text import Text, brute_sparse_sort, naive_lce
from sparsesuffix.trie import (NIL, CoarseTrie, CollisionDetected, LcpIndex, SparseTable,
                               array_view, check_coarse, coarse_canonical, coarse_insert_leaf,
                               dump, lcp_preprocess, lcp_query, trie_from_sorted)

from conftest import text_and_positions


def test_banana_trie(banana):
    trie = trie_from_sorted(banana, [1, 5, 3], [0, 2])
    assert dump(trie) == "root d=0\n  banana d=6 [1]\n  na d=2 [5]\n    na d=4 [3]"
    assert [trie.first_char(c) for c in trie.children[0]] == [ord("b"), ord("n")]
    idx = lcp_preprocess(trie)
    assert lcp_query(idx, 5, 3) == 2
    assert lcp_query(idx, 1, 1) == 6
    assert lcp_query(idx, 1, 3) == 0


def test_single_and_unary():
    t = Text(b"aaaa")
    single = trie_from_sorted(t, [2], [])
    assert dump(single) == "root d=0\n  aaa d=3 [2]"
    chain = trie_from_sorted(t, [4, 3, 2, 1], [1, 2, 3])
    assert dump(chain) == "root d=0\n  a d=1 [4]\n    a d=2 [3]\n      a d=3 [2]\n        a d=4 [1]"


def test_inconsistent_lcps_rejected(banana):
    with pytest.raises(ValueError):
        trie_from_sorted(banana, [1, 5, 3], [0, 3])
    with pytest.raises(ValueError):
        trie_from_sorted(banana, [1, 5], [0, 0])


@given(text_and_positions())
def test_roundtrip_and_lcp_queries(tp):
    t, pos = tp
    order, lcps = brute_sparse_sort(t, pos)
    trie = trie_from_sorted(t, order, lcps)
    assert array_view(trie) == (order, lcps)
    a = LcpIndex.from_trie(trie)
    b = LcpIndex.from_array(order, lcps, t.n)
    for i in pos:
        for j in pos:
            want = naive_lce(t, i, j)
            assert a.query(i, j) == want == b.query(i, j)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=80), st.data())
def test_sparse_table(values, data):
    st_ = SparseTable(values)
    lo = data.draw(st.integers(0, len(values) - 1))
    hi = data.draw(st.integers(lo, len(values) - 1))
    assert st_.query(lo, hi) == min(values[lo:hi + 1])


def test_coarse_banana(banana):
    ctx = new_context(banana, seed=0)
    lce = build_dc_lce(banana, ctx, 3)
    for build in (build_coarse_small, build_coarse_large):
        trie = build(banana, ctx, [1, 3, 5], lce)
        assert trie.g == 2
        check_coarse(trie, banana, ctx)
        kids = {trie.key(c): c for c in trie.children(0)}
        ba, na = fp_of(ctx, b"ba"), fp_of(ctx, b"na")
        assert set(kids) == {(ba.value, 2), (na.value, 2)}
        leaf, node = kids[(ba.value, 2)], kids[(na.value, 2)]
        assert (trie.depth[leaf], trie.term[leaf]) == (6, 1)
        assert (trie.depth[node], trie.term[node]) == (2, 5)
        (child,) = trie.children(node)
        assert (trie.depth[child], trie.term[child], trie.key(child)) == (4, 3, (na.value, 2))


def test_coarse_insert_into_empty():
    trie = CoarseTrie(5, 2)
    leaf, scanned = coarse_insert_leaf(trie, 0, 1, (7, 2), 99)
    assert scanned == [] and list(trie.children(0)) == [leaf]
    assert (trie.depth[leaf], trie.term[leaf], trie.parent[leaf]) == (5, 1, 0)


def test_coarse_collisions():
    trie = CoarseTrie(6, 2)
    v = trie.new_node(6, 1, (1, 2), 0)
    trie.link_sorted(0, v)
    w = trie.new_node(4, 3, (1, 2), 0)
    with pytest.raises(CollisionDetected):
        trie.link_sorted(0, w)
    trie.mark_terminal(v, 1)
    with pytest.raises(CollisionDetected):
        trie.mark_terminal(v, 3)
    with pytest.raises(CollisionDetected):
        trie.split_edge(v, 7, 0)


def test_sibling_list_order():
    trie = CoarseTrie(10, 2)
    nodes = []
    for key in [(5, 2), (1, 2), (3, 2), (3, 1)]:
        v = trie.new_node(4, 1, key, 0)
        trie.link_sorted(0, v)
        nodes.append(v)
    assert [trie.key(c) for c in trie.children(0)] == [(1, 2), (3, 1), (3, 2), (5, 2)]
    assert trie.find_child(0, (3, 2)) == (nodes[2], True)
    assert trie.find_child(0, (4, 0)) == (nodes[0], False)
    assert trie.find_child(0, (9, 9)) == (NIL, False)
    assert coarse_canonical(trie)[-1][0][2:4] == (1, 2)


@given(text_and_positions(40))
def test_coarse_paths_agree(tp):
    t, pos = tp
    ctx = new_context(t, seed=1)
    lce = build_dc_lce(t, ctx, len(pos))
    small = build_coarse_small(t, ctx, pos, lce)
    large = build_coarse_large(t, ctx, pos, lce)
    check_coarse(small, t, ctx)
    check_coarse(large, t, ctx)
    assert coarse_canonical(small) == coarse_canonical(large)
    order, _ = coarse_array_view(small)
    assert sorted(order) == pos
