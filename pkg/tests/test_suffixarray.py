from hypothesis import given, strategies as st

from sparsesuffix.suffixarray import kasai, suffix_array


def naive_sa(s):
    return sorted(range(len(s)), key=lambda i: s[i:])


@given(st.lists(st.integers(0, 3), max_size=200))
def test_sa_is_matches_naive(s):
    sa = suffix_array(s)
    assert sa == naive_sa(s)
    lcp = kasai(s, sa)
    for k in range(len(sa) - 1):
        a, b = s[sa[k]:], s[sa[k + 1]:]
        ell = 0
        while ell < min(len(a), len(b)) and a[ell] == b[ell]:
            ell += 1
        assert lcp[k] == ell


def test_examples():
    s = list(b"banana")
    assert suffix_array(s) == [5, 3, 1, 0, 4, 2]
    assert kasai(s, suffix_array(s)) == [1, 3, 0, 0, 2]
    assert suffix_array([]) == []
    assert suffix_array([7]) == [0]
    assert suffix_array([1] * 50) == list(range(49, -1, -1))
