import math
import random

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from sparsesuffix.builder import BuildConfig, build_sst
from sparsesuffix.text import Text, brute_sparse_sort, sample_positions
from sparsesuffix.verifier import (Equation, _spanning_forest, build_equation_graph, build_las_vegas,
                                   build_spanner, confirm_rejection, cycle_period, decompose, equations_from_sst,
                                   first_mismatch, gen_split_ok, merge_period_constraints,
                                   naive_check, replay_cycle, split_equation, verify_sst,
                                   verify_system)

from conftest import FAMILIES, make_text


class Arr:
    def __init__(self, positions, lcps):
        self.positions, self.lcps = list(positions), list(lcps)


def has_period(t, lo, hi, r):
    return hi - lo + 1 <= r or naive_check(t, Equation.of(lo, lo + r, hi - lo + 1 - r))


@st.composite
def noisy_periodic(draw, max_n=48):
    """Periodic text with a few flipped symbols: many equations hold, some barely fail."""
    period = draw(st.integers(1, 5))
    n = draw(st.integers(period, max_n))
    seed = draw(st.lists(st.integers(0, 1), min_size=period, max_size=period))
    s = bytearray(97 + seed[i % period] for i in range(n))
    for pos in draw(st.lists(st.integers(0, n - 1), max_size=2)):
        s[pos] ^= 1
    return Text(bytes(s)), period


# ---------------------------------------------------------------- examples

def test_naive_check_examples():
    t = Text(b"ababab")
    assert naive_check(t, Equation(1, 4, 3, 6))
    assert naive_check(Text(b"banana"), Equation(1, 4, 3, 6), shortage=2)
    assert not naive_check(Text(b"banana"), Equation(1, 2, 3, 4))
    assert first_mismatch(Text(b"banana"), Equation(1, 2, 3, 4)) == 0
    assert first_mismatch(t, Equation(1, 4, 3, 6)) is None


def test_equations_from_banana(banana):
    sst = build_sst(banana, [1, 3, 5])
    eqs, bad = equations_from_sst(banana, sst.positions, sst.lcps)
    assert bad is None and len(eqs) == 2
    assert eqs[1] == Equation(5, 6, 3, 4)
    assert verify_sst(banana, sst)
    assert verify_sst(banana, Arr([4], []))
    assert verify_system(banana, [])


def test_planted_sst_defects(banana):
    assert not verify_sst(banana, Arr([1, 5, 3], [0, 3]))
    assert not verify_sst(banana, Arr([1, 5, 3], [0, 1]))
    assert not verify_sst(banana, Arr([1, 3, 5], [0, 2]))
    assert not verify_sst(banana, Arr([1, 5, 3], [0, 2]), B=[1, 3, 4])


def test_split_example():
    parts = split_equation(Equation.of(1, 21, 12), 6)
    assert [e.p - 1 for e in parts] == [0, 2, 4, 6]
    assert all(e.length == 6 and e.shift == 20 for e in parts)
    assert split_equation(Equation.of(3, 9, 6), 6) == [Equation.of(3, 9, 6)]
    with pytest.raises(ValueError):
        split_equation(Equation.of(1, 2, 3), 4)


def test_cycle_period_examples():
    t = Text(b"aaaaaaa")
    e = Equation(1, 6, 2, 7)
    assert cycle_period([e]) == (1, 1)
    assert has_period(t, 2, 5, 1)
    assert cycle_period([e, e.swapped()])[0] == 0


def test_merge_period_example():
    t = Text(b"abababababab")
    a = Equation(1, 8, 5, 12)
    b = Equation(1, 6, 7, 12)
    merged = merge_period_constraints([a, b])
    assert merged == Equation(1, 10, 3, 12)
    assert naive_check(t, merged)
    assert merge_period_constraints([a]) == a


def test_spanner_triangle():
    # the ball around vertex 0 stops at radius 1, so edge 1-2 is left for the next ball
    edges = [(0, 1, 5), (1, 2, 3), (0, 2, 7)]
    res = build_spanner(3, edges, keep_trees=True)
    assert sorted(res.kept) == [0, 1, 2]
    assert res.c == [0, 0, 0]


def test_spanner_closes_triangle_inside_one_ball():
    # two pendant vertices push the first ball to radius 2
    edges = [(0, 1, 5), (1, 2, 3), (0, 2, 7), (0, 3, 1), (0, 4, 1)]
    res = build_spanner(5, edges, keep_trees=True)
    assert sorted(res.kept) == [0, 2, 3, 4]
    assert res.c[1] == 3 + (-7) - (-5) == 1
    cyc = replay_cycle(res, edges, 1)
    assert len(cyc) == 3 and sum(edges[e][2] * d for e, d in cyc) == 1


def test_spanner_keeps_trees():
    edges = [(0, 1, 2), (1, 2, -4), (1, 3, 9)]
    res = build_spanner(4, edges)
    assert sorted(res.kept) == [0, 1, 2] and res.c == [0, 0, 0]


def test_equation_graph_example():
    verts, edges, _ = build_equation_graph([Equation(2, 7, 10, 15)], 4)
    assert verts == [1, 9] and edges == [(0, 1, 8)]
    assert build_equation_graph([], 4) == ([], [], {})
    verts, edges, _ = build_equation_graph([Equation.of(5, 6, 2), Equation.of(8, 7, 1)], 4)
    assert verts == [5] and all(a == c == 0 for a, c, _ in edges)


def test_decompose_examples():
    k = 1
    short, rest = decompose([(1, 40, 3 * 2 ** (k + 1) - 1)], k, False, 100)
    assert rest == [] and all(e[2] == 6 for e in short)
    L = 3 * 2 ** (k + 2)
    short, rest = decompose([(1, 40, L)], k, False, 100)
    assert short == [(1, 40, 6), (1 + L - 6, 40 + L - 6, 6)] and rest == [(1, 40, L)]


def test_forest_drops_shortest_triangle_edge():
    a1, a2, a3 = 1, 3, 5
    eqs = [(a1, a2, 10), (a2, a3, 12), (a1, a3, 8)]
    kept = _spanning_forest(eqs)
    assert sorted(kept) == sorted(eqs[:2])
    t = Text(b"ab" * 10)
    assert all(naive_check(t, e) for e in kept) and naive_check(t, eqs[2])
    # chain replay: T[1..8] = T[3..10] = T[5..12]
    assert naive_check(t, (a1, a2, 8)) and naive_check(t, (a2, a3, 8))


# ---------------------------------------------------------------- shortage calculus

@settings(max_examples=300)
@given(noisy_periodic(), st.data())
def test_split_roundtrip(tp, data):
    t, period = tp
    L = data.draw(st.integers(1, t.n))
    p = data.draw(st.integers(1, t.n - L + 1))
    pp = data.draw(st.integers(1, t.n - L + 1))
    ell = data.draw(st.integers(1, L))
    e = Equation.of(p, pp, L)
    parts = split_equation(e, ell)
    assert len(parts) <= (L - ell) // max(1, ell // 3) + 2
    assert naive_check(t, e) == all(naive_check(t, x) for x in parts)
    S = data.draw(st.integers(0, ell // 3))
    if all(naive_check(t, x, S) for x in parts):
        assert naive_check(t, e, S)


@settings(max_examples=300)
@given(noisy_periodic(), st.data())
def test_gen_split(tp, data):
    t, _ = tp
    L = data.draw(st.integers(1, t.n))
    p = data.draw(st.integers(1, t.n - L + 1))
    pp = data.draw(st.integers(1, t.n - L + 1))
    q = p + L - 1
    m = data.draw(st.integers(1, 4))
    bounds = sorted(data.draw(st.lists(st.integers(p, q), min_size=2 * m, max_size=2 * m)))
    parts = [(bounds[2 * i], bounds[2 * i + 1]) for i in range(m)]
    slack = data.draw(st.lists(st.integers(0, 3), min_size=m, max_size=m))
    assume(gen_split_ok(parts, slack))
    eqs = [Equation(a, c, a + pp - p, c + pp - p) for a, c in parts]
    if naive_check(t, Equation.of(p, pp, L)):
        assert all(naive_check(t, x) for x in eqs)
    if all(naive_check(t, x, s) for x, s in zip(eqs, slack)):
        S = max(parts[0][0] - p + slack[0], q - parts[-1][1] + slack[-1])
        assert naive_check(t, Equation.of(p, pp, L), S)


@settings(max_examples=400)
@given(noisy_periodic(60), st.data())
def test_cycle_shift_transfers_period(tp, data):
    t, period = tp
    L = data.draw(st.integers(1, t.n))
    m = data.draw(st.integers(1, 4))
    starts = st.integers(1, t.n - L + 1)
    cyc = [Equation.of(data.draw(starts), data.draw(starts), L) for _ in range(m)]
    r, R = cycle_period(cyc)
    p1, q1 = cyc[0].p, cyc[0].q
    if all(naive_check(t, e) for e in cyc):
        assert has_period(t, p1 + R, q1 - R, r)
    S = data.draw(st.integers(1, 4))
    if has_period(t, p1 + S, q1 - S, r) and all(naive_check(t, e, S) for e in cyc[1:]):
        assert naive_check(t, cyc[0], R + S)


@settings(max_examples=300)
@given(noisy_periodic(60), st.data())
def test_period_merge(tp, data):
    t, _ = tp
    lo = data.draw(st.integers(1, t.n))
    hi = data.draw(st.integers(lo, t.n))
    size = hi - lo + 1
    assume(size >= 2)
    periods = data.draw(st.lists(st.integers(1, size // 2), min_size=1, max_size=4))
    cons = [Equation(lo, hi - r, lo + r, hi) for r in periods]
    merged = merge_period_constraints(cons)
    assert merged.shift == math.gcd(*periods)
    assert all(naive_check(t, e) for e in cons) == naive_check(t, merged)
    S = data.draw(st.integers(1, 5))
    if naive_check(t, merged, S):
        assert all(naive_check(t, e, S) for e in cons)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 256), st.data())
def test_spanner_witness_cycles(nv, data):
    m = data.draw(st.integers(0, 4 * nv))
    rng = random.Random(data.draw(st.integers(0, 2 ** 32)))
    edges = [(rng.randrange(nv), rng.randrange(nv), rng.randint(-50, 50)) for _ in range(m)]
    res = build_spanner(nv, edges, keep_trees=True)
    assert len(res.kept) <= 2 * nv
    kept = set(res.kept)
    bound = 2 * max(1, math.ceil(math.log2(nv))) if nv > 1 else 2
    for eid, (a, c, w) in enumerate(edges):
        cyc = replay_cycle(res, edges, eid)
        assert len(cyc) <= max(2, bound)
        assert cyc[0] == (eid, 1)
        assert all(e in kept for e, _ in cyc[1:])
        # the arcs chain head to tail and return to the start
        here = a
        for e, d in cyc:
            x, y, _ = edges[e]
            src, dst = (x, y) if d == 1 else (y, x)
            assert src == here
            here = dst
        assert here == a
        assert sum(edges[e][2] * d for e, d in cyc) == res.c[eid]


# ---------------------------------------------------------------- systems

@settings(max_examples=150, deadline=None)
@given(noisy_periodic(200), st.data(), st.sampled_from(["slow", "fast"]))
def test_random_systems(tp, data, mode):
    t, period = tp
    eqs = []
    for _ in range(data.draw(st.integers(0, 12))):
        L = data.draw(st.integers(1, t.n))
        p = data.draw(st.integers(1, t.n - L + 1))
        k = data.draw(st.integers(-3, 3))
        pp = p + k * period
        assume(1 <= pp <= t.n - L + 1)
        eqs.append(Equation.of(p, pp, L))
    truth = all(naive_check(t, e) for e in eqs)
    v = verify_system(t, eqs, mode, min_level=data.draw(st.sampled_from([None, 0])))
    assert bool(v) == truth
    if not v:
        assert confirm_rejection(t, v)


@pytest.mark.parametrize("mode", ["slow", "fast"])
@pytest.mark.parametrize("family", FAMILIES)
def test_long_systems_exercise_reductions(mode, family):
    t = make_text(7, family, 40000, 2)
    pos = sample_positions(np.random.default_rng(1), t.n, 64)
    order, lcps = brute_sparse_sort(t, pos)
    v = verify_sst(t, Arr(order, lcps), mode, min_level=0)
    assert v
    if family in ("periodic", "equal"):
        assert v.stats["levels"] > v.stats["fallbacks"]
    for k in range(len(lcps)):
        if lcps[k] > 10:
            a = order[k] + lcps[k] // 2
            s = bytearray(t.buf)
            s[a - 1] ^= 1
            bad = verify_sst(Text(bytes(s)), Arr(order, lcps), mode, min_level=0)
            assert not bad and confirm_rejection(Text(bytes(s)), bad)
            break


def test_cache_flag_agrees():
    t = make_text(3, "periodic", 30000, 2)
    pos = sample_positions(np.random.default_rng(2), t.n, 100)
    order, lcps = brute_sparse_sort(t, pos)
    for mode in ("slow", "fast"):
        a = verify_sst(t, Arr(order, lcps), mode, cache=True, min_level=0)
        b = verify_sst(t, Arr(order, lcps), mode, cache=False, min_level=0)
        assert a and b and a.stats == b.stats


def test_equations_must_fit():
    with pytest.raises(ValueError):
        verify_system(Text(b"abc"), [Equation(2, 4, 1, 3)])
    with pytest.raises(ValueError):
        verify_system(Text(b"abc"), [], mode="medium")


# ---------------------------------------------------------------- las vegas

def test_las_vegas_recovers_from_tiny_prime():
    t = make_text(5, "periodic", 600, 2)
    pos = sample_positions(np.random.default_rng(5), t.n, 60)
    want = brute_sparse_sort(t, pos)
    sst = build_las_vegas(t, pos, BuildConfig(seed=1), collision_prime=3, collision_attempts=1)
    assert (sst.positions, sst.lcps) == want
    assert sst.meta["mode"] == "lv"


def test_las_vegas_bottom():
    t = make_text(5, "periodic", 600, 2)
    pos = sample_positions(np.random.default_rng(5), t.n, 60)
    out = build_las_vegas(t, pos, BuildConfig(seed=1), retries=2, collision_prime=2)
    if out:
        assert (out.positions, out.lcps) == brute_sparse_sort(t, pos)
    else:
        assert len(out.attempts) == 3


def test_las_vegas_single(banana):
    sst = build_las_vegas(banana, [2])
    assert sst.positions == [2] and sst.meta["attempts"] == 1
