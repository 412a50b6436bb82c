import random

import numpy as np
from hypothesis import given, strategies as st

from sparsesuffix.strsort import rank_values, sort_quadratic, sort_radix

words = st.lists(st.lists(st.integers(0, 3), max_size=10).map(bytes), max_size=40)


def batch_of(strings):
    return [(s, len(s), k) for k, s in enumerate(strings)]


def oracle(strings):
    return sorted(range(len(strings)), key=lambda k: (strings[k], k))


def test_examples():
    s = [b"ba", b"ab", b"aa"]
    assert [s[k] for k in sort_quadratic(batch_of(s))] == [b"aa", b"ab", b"ba"]
    done = [b"a", b"a", b"ab", b"b"]
    assert sort_quadratic(batch_of(done)) == [0, 1, 2, 3]
    assert sort_radix(batch_of([b"x"]), 256, 4) == [0]


def test_random_length_8():
    rng = random.Random(8)
    s = [bytes(rng.randrange(256) for _ in range(8)) for _ in range(50)]
    assert sort_quadratic(batch_of(s)) == oracle(s)
    assert sort_radix(batch_of(s), 256, 16) == oracle(s)


def test_radix_on_fingerprint_sized_symbols():
    rng = random.Random(61)
    vals = [rng.randrange(2 ** 61) for _ in range(30)] + [5, 5]
    s = [(v,) for v in vals]
    assert sort_radix(batch_of(s), 2 ** 61, 30) == oracle(s)
    wide = [(rng.randrange(2 ** 127),) for _ in range(20)]
    assert sort_radix(batch_of(wide), 2 ** 127, 20) == oracle(wide)


@given(words)
def test_quadratic_matches_sorted(strings):
    assert sort_quadratic(batch_of(strings)) == oracle(strings)


@given(words, st.integers(2, 1 << 12))
def test_radix_matches_sorted(strings, space):
    assert sort_radix(batch_of(strings), 4, space) == oracle(strings)


def test_refs_are_read_through_length():
    text = b"banana"
    batch = [(memoryview(text)[i:], 2, i) for i in range(5)]
    assert sort_quadratic(batch) == [1, 3, 0, 2, 4]


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 2 ** 40)), min_size=1, max_size=60),
       st.integers(2, 256))
def test_rank_values_dense(pairs, space):
    a = np.array([p[0] for p in pairs], dtype=np.uint64)
    b = np.array([p[1] for p in pairs], dtype=np.uint64)
    ranks, d = rank_values([a, b], [6, 2 ** 40 + 1], space)
    distinct = sorted(set(pairs))
    assert d == len(distinct)
    assert [int(r) for r in ranks] == [distinct.index(p) + 1 for p in pairs]
