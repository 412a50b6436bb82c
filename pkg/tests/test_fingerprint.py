import random

import pytest
from hypothesis import given, strategies as st

from sparsesuffix.fingerprint import (M61, M127, Fingerprint, fp_empty, fp_of, fp_solve,
                                      fragment_value, horner, max_text_length, new_context,
                                      phi_advance, phi_build, phi_fragment, security_bound_ok)
from sparsesuffix.text import Text

from conftest import texts


def _ctx(p, x):
    """Context with a fixed base for hand-computed examples."""
    ctx = new_context(Text(b"ab"), prime=p, seed=0)
    ctx.x = x
    ctx.xinv = pow(x, -1, p)
    return ctx


def test_fp_example():
    ctx = _ctx(101, 7)
    assert fp_of(ctx, b"ab") == Fingerprint(76, 49, 33, 2)
    assert fp_of(ctx, b"") == fp_empty() == Fingerprint(0, 1, 1, 0)


def test_solve_examples():
    ctx = _ctx(101, 7)
    a, b = fp_of(ctx, b"a"), fp_of(ctx, b"b")
    ab = fp_of(ctx, b"ab")
    assert fp_solve(ctx, u=a, v=b).value == 76
    assert fp_solve(ctx, u=ab, w=ab) == fp_empty()
    assert fp_solve(ctx, u=a, w=ab).value == 98
    assert fp_solve(ctx, v=b, w=ab) == a
    with pytest.raises(ValueError):
        fp_solve(ctx, u=a)


def test_context_selection():
    t = Text(b"x" * 10)
    ctx = new_context(t, 1, seed=3)
    assert ctx.p == M61
    assert new_context(t, 1, seed=3).x == ctx.x
    assert new_context(t, 1, seed=4).x != ctx.x
    assert 1 <= ctx.x < ctx.p
    with pytest.raises(ValueError):
        new_context(t, -1)


def test_security_bounds():
    assert security_bound_ok(10 ** 4, 1, M61)
    assert not security_bound_ok(10 ** 6, 1, M61)
    assert security_bound_ok(10 ** 6, 1, M127)
    assert not security_bound_ok(10 ** 9, 3, M127)
    n = max_text_length(1)
    assert n ** 4 <= M61 < (n + 1) ** 4


class _Len:
    """Stand-in text exposing only its length to the modulus choice."""

    def __init__(self, n):
        self.n, self.sigma, self.wide = n, 256, False


def test_large_texts_use_the_wide_modulus():
    assert new_context(_Len(10 ** 6), 1).p == M127
    with pytest.raises(ValueError):
        new_context(_Len(10 ** 9), 3)


@given(st.binary(max_size=40), st.binary(max_size=40), st.integers(0, 2 ** 32))
def test_concat_and_split(u, v, seed):
    ctx = new_context(Text(b"z"), seed=seed)
    fu, fv, fw = fp_of(ctx, u), fp_of(ctx, v), fp_of(ctx, u + v)
    assert fp_solve(ctx, u=fu, v=fv) == fw
    assert fp_solve(ctx, u=fu, w=fw) == fv
    assert fp_solve(ctx, v=fv, w=fw) == fu


@pytest.mark.parametrize("prime", [M61, M127, 1000003])
def test_horner_matches_definition(prime):
    rng = random.Random(prime)
    t = Text(bytes(rng.randrange(256) for _ in range(3000)))
    ctx = new_context(t, prime=prime, seed=1)
    for lo, hi in [(1, 3000), (5, 4), (17, 17), (100, 2099)]:
        assert horner(ctx, t, lo, hi, scratch=64) == fp_of(ctx, t.buf[lo - 1:hi]).value


def test_phi_examples():
    t = Text(b"abab")
    ctx = new_context(t, seed=0)
    phi = phi_build(ctx, t, 2)
    assert len(phi) == 2 and phi.position(1) == 3
    assert phi.whole == fp_of(ctx, b"abab")
    assert phi_fragment(ctx, phi, 1, 2) == fp_of(ctx, b"ab")
    assert phi_fragment(ctx, phi, 3, 2) == fp_empty()
    assert phi_fragment(ctx, phi, 3, 4) == phi.suffix(3)
    single = phi_build(ctx, t, 4)
    assert len(single) == 1 and single.suffix(1) == single.whole
    with pytest.raises(ValueError):
        phi_advance(ctx, t, phi_build(ctx, t, 1))


@given(texts(80, 3), st.integers(1, 9), st.integers(0, 2 ** 20))
def test_phi_rounds_match_direct(t, g, seed):
    g = min(g, t.n)
    ctx = new_context(t, seed=seed)
    phi = phi_build(ctx, t, g, scratch=8)
    for r in range(1, g + 1):
        if r > 1:
            phi = phi_advance(ctx, t, phi)
        assert phi.r == r
        starts = list(range(r, t.n + 1, g))
        assert len(phi) == len(starts)
        for a in starts:
            assert phi.suffix(a) == fp_of(ctx, t.buf[a - 1:])
            for c in [x for x in starts if x >= a] + [t.n + 1]:
                want = fp_of(ctx, t.buf[a - 1:c - 1])
                assert phi_fragment(ctx, phi, a, c - 1) == want
                assert fragment_value(ctx, phi, a, c - 1) == want.value
