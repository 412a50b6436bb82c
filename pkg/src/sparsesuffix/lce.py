"""Longest-common-extension structures in ``O(b)`` words.

``BaselineLce`` stores the fingerprints of the suffixes starting at
``1, 1+g, 1+2g, ...`` (``g = ceil(n/b)``) and answers a query by a short
scan followed by a fingerprint search.  ``DcLce`` adds sparse suffix
arrays of difference covers: for a cover with shift ``h``,
``LCE(i, j) = h + LCE(i+h, j+h)`` whenever the first ``h`` symbols agree,
and the right-hand side is an LCA query on the cover's array.
"""
from __future__ import annotations

import math
from typing import Callable, Iterator, List, Optional, Sequence

import numpy as np

from .diffcover import DifferenceCover, build_cover
from .fingerprint import FpContext, horner, phi_build
from .instrument import meter, scratch_words
from .suffixarray import kasai, sa_is
from .text import Text, _scan_lce
from .trie import LcpIndex

# below this many symbols a Python loop beats a numpy round trip
_SCAN_SMALL = 64


def _mismatch(t: Text, i: int, j: int, length: int, scratch: int) -> int:
    """Length of the common prefix of ``T[i..i+length-1]`` and ``T[j..j+length-1]``."""
    if length <= _SCAN_SMALL:
        buf = t.buf
        a, c = i - 1, j - 1
        k = 0
        while k < length and buf[a + k] == buf[c + k]:
            k += 1
        return k
    view = t.view
    done = 0
    while done < length:
        w = min(scratch, length - done)
        a, c = i - 1 + done, j - 1 + done
        if view[a:a + w] != view[c:c + w]:
            diff = np.flatnonzero(t.np[a:a + w] != t.np[c:c + w])
            return done + int(diff[0])
        done += w
    return length


class BaselineLce:
    """Anchored fingerprints with a scan-then-search query."""

    def __init__(self, t: Text, ctx: FpContext, b: int, scratch: Optional[int] = None):
        if not 1 <= b <= t.n:
            raise ValueError("need 1 <= b <= n")
        self.t = t
        self.ctx = ctx
        self.n = t.n
        self.b = b
        self.g = -(-t.n // b)
        self.scratch = scratch or scratch_words(b)
        phi = phi_build(ctx, t, self.g, self.scratch)
        self.anchors: List[int] = [int(v) for v in phi.value]
        meter().alloc("baseline_lce", len(self.anchors))
        self.queries = 0

    def words(self) -> int:
        return len(self.anchors)

    def suffix_value(self, i: int) -> int:
        """Fingerprint value of ``T[i..]`` (``0`` for ``i = n+1``), O(g) time."""
        if i > self.n:
            return 0
        g = self.g
        k = -(-(i - 1) // g)
        a = 1 + k * g
        if a > self.n:
            return horner(self.ctx, self.t, i, self.n, self.scratch)
        if a == i:
            return self.anchors[k]
        p = self.ctx.p
        head = horner(self.ctx, self.t, i, a - 1, self.scratch)
        return (head + pow(self.ctx.x, a - i, p) * self.anchors[k]) % p

    def fragment_value(self, i: int, length: int, head: Optional[int] = None) -> int:
        p = self.ctx.p
        if head is None:
            head = self.suffix_value(i)
        return (head - pow(self.ctx.x, length, p) * self.suffix_value(i + length)) % p

    def fragments_equal(self, i: int, j: int, length: int) -> bool:
        if length <= 2 * self.g:
            return _mismatch(self.t, i, j, length, self.scratch) == length
        return self.fragment_value(i, length) == self.fragment_value(j, length)

    def query(self, i: int, j: int) -> int:
        self.queries += 1
        n = self.n
        if i == j:
            self.t.check(i)
            return n - i + 1
        self.t.check(i)
        self.t.check(j)
        limit = n - max(i, j) + 1
        first = min(limit, 2 * self.g)
        k = _mismatch(self.t, i, j, first, self.scratch)
        if k < first or first == limit:
            return k
        fi, fj = self.suffix_value(i), self.suffix_value(j)
        lo, hi = first, limit + 1  # T[i..i+lo-1] matches; length hi does not
        step = first
        while True:
            cand = min(limit, lo + step)
            if self.fragment_value(i, cand, fi) == self.fragment_value(j, cand, fj):
                lo = cand
                if cand == limit:
                    return limit
                step *= 2
            else:
                hi = cand
                break
        while hi - lo > self.g:
            mid = (lo + hi) // 2
            if self.fragment_value(i, mid, fi) == self.fragment_value(j, mid, fj):
                lo = mid
            else:
                hi = mid
        return lo + _mismatch(self.t, i + lo, j + lo, hi - 1 - lo, self.scratch)


def build_baseline(t: Text, ctx: FpContext, b: int, scratch: Optional[int] = None) -> BaselineLce:
    return BaselineLce(t, ctx, b, scratch)


def baseline_query(s: BaselineLce, i: int, j: int) -> int:
    return s.query(i, j)


class FullTextLce:
    """Suffix array, inverse and LCP range-minimum of the whole text (``b >= n/2``)."""

    def __init__(self, t: Text, baseline: BaselineLce):
        self.t = t
        self.n = t.n
        self.baseline = baseline
        sym = t.np.astype(np.int64)
        if t.wide:
            # compress a sparse wide alphabet before induced sorting
            _, sym = np.unique(sym, return_inverse=True)
        s = sym.tolist()
        sa = sa_is(s, max(s))
        lcp = kasai(s, sa)
        rank = np.empty(self.n + 1, dtype=np.int64)
        rank[np.asarray(sa, dtype=np.int64) + 1] = np.arange(self.n)
        self.index = LcpIndex.from_array([p + 1 for p in sa], lcp, self.n, rank=rank)
        meter().alloc("full_lce", 2 * self.n)
        meter().alloc("lcp_index", self.index.words())

    def query(self, i: int, j: int) -> int:
        self.t.check(i)
        self.t.check(j)
        return self.index.query(i, j)


class Level:
    """Sorted suffixes of one difference cover with an LCP index."""

    __slots__ = ("dc", "order", "index")

    def __init__(self, dc: DifferenceCover, order: Sequence[int], lcps: Sequence[int], n: int):
        self.dc = dc
        self.order = order
        rank = np.empty(len(order) + 1, dtype=np.int64)
        for k, p in enumerate(order):
            rank[dc.index(p)] = k
        self.index = LcpIndex.from_array(order, lcps, n, rank=_CoverRank(dc, rank))

    def words(self) -> int:
        return len(self.order) + len(self.order) + 1


class _CoverRank:
    __slots__ = ("dc", "rank")

    def __init__(self, dc: DifferenceCover, rank: np.ndarray):
        self.dc = dc
        self.rank = rank

    def __getitem__(self, p: int) -> int:
        return int(self.rank[self.dc.index(p)])


class DcLce:
    """Difference-cover levels on top of a baseline; level 1 answers queries."""

    def __init__(self, t: Text, baseline: BaselineLce, levels: List[Level],
                 full: Optional[FullTextLce] = None):
        self.t = t
        self.n = t.n
        self.baseline = baseline
        self.levels = levels
        self.full = full
        self.branches = {"full": 0, "baseline": 0, "cover": 0, "short": 0}

    @property
    def ctx(self) -> FpContext:
        return self.baseline.ctx

    def words(self) -> int:
        return self.baseline.words() + sum(lv.words() for lv in self.levels)

    def level_query(self, k: int, i: int, j: int) -> int:
        """LCE through level ``k`` (0-based); past the last level, the baseline."""
        if k >= len(self.levels):
            self.branches["baseline"] += 1
            return self.baseline.query(i, j)
        n = self.n
        self.t.check(i)
        self.t.check(j)
        if i == j:
            return n - i + 1
        lv = self.levels[k]
        dc = lv.dc
        if max(i, j) > n - dc.t_eff:
            self.branches["short"] += 1
            return self.baseline.query(i, j)
        h = dc.shift_unchecked(i, j)
        if h and not self.baseline.fragments_equal(i, j, h):
            # the answer is below h
            self.branches["baseline"] += 1
            return self.baseline.query(i, j)
        self.branches["cover"] += 1
        return h + lv.index.query(i + h, j + h)

    def query(self, i: int, j: int) -> int:
        if self.full is not None:
            self.branches["full"] += 1
            return self.full.query(i, j)
        return self.level_query(0, i, j)


def level_periods(n: int, b: int) -> List[DifferenceCover]:
    """Covers with ``t_i = (n/b)^(2(i+1))`` rounded up to squares, while ``t_eff <= n``."""
    covers = []
    i = 1
    while True:
        # (n/b)^(2(i+1)) exactly, rounded up
        num, den = n ** (2 * (i + 1)), b ** (2 * (i + 1))
        ti = -(-num // den)
        if ti > n:
            break
        dc = build_cover(ti, n)
        if dc.t_eff > n:
            break
        covers.append(dc)
        i += 1
    return covers


class LoserTree:
    """Tournament tree over sorted streams; each pop costs ``O(log k)`` comparisons."""

    def __init__(self, streams: Sequence[Iterator[int]], less: Callable[[int, int], bool]):
        self.less = less
        self.k = k = max(1, len(streams))
        self.streams = list(streams) + [iter(())] * (k - len(streams))
        self.heads: List[Optional[int]] = [next(s, None) for s in self.streams]
        self.tree = [-1] * k  # internal nodes keep losers; tree[0] keeps the winner
        winners = [-1] * (2 * k)
        for leaf in range(k):
            winners[k + leaf] = leaf
        for node in range(k - 1, 0, -1):
            a, c = winners[2 * node], winners[2 * node + 1]
            if self._beats(a, c):
                winners[node], self.tree[node] = a, c
            else:
                winners[node], self.tree[node] = c, a
        self.tree[0] = winners[1] if k > 1 else 0

    def _beats(self, a: int, c: int) -> bool:
        ha, hc = self.heads[a], self.heads[c]
        if ha is None:
            return False
        if hc is None:
            return True
        return self.less(ha, hc)

    def __iter__(self) -> Iterator[int]:
        while True:
            w = self.tree[0]
            head = self.heads[w]
            if head is None:
                return
            yield head
            self.heads[w] = next(self.streams[w], None)
            node = (w + self.k) // 2
            while node >= 1:
                if self._beats(self.tree[node], w):
                    self.tree[node], w = w, self.tree[node]
                node //= 2
            self.tree[0] = w


def suffix_less(t: Text, lce: Callable[[int, int], int]) -> Callable[[int, int], bool]:
    """Suffix order from an LCE oracle, one symbol compare and the prefix rule."""
    n, buf = t.n, t.buf

    def less(i: int, j: int) -> bool:
        ell = lce(i, j)
        if i + ell > n:
            return True
        if j + ell > n:
            return False
        return buf[i + ell - 1] < buf[j + ell - 1]

    return less


def build_dc_lce(t: Text, ctx: FpContext, b: int, hook=None,
                 scratch: Optional[int] = None) -> DcLce:
    """Build the levels bottom-up; each level's merge queries the level above it.

    ``hook(t, ctx, g, covers, scratch)`` yields, per round ``r``, the exact
    sorted order of the ``r``-aligned members of every cover.
    """
    n = t.n
    baseline = build_baseline(t, ctx, b, scratch)
    if 2 * b >= n:
        return DcLce(t, baseline, [], full=FullTextLce(t, baseline))
    if b * math.log2(n) <= n:
        return DcLce(t, baseline, [])
    covers = level_periods(n, b)
    if not covers:
        return DcLce(t, baseline, [])
    if hook is None:
        from .builder import round_subset_orders as hook
    g = baseline.g
    streams: List[List[List[int]]] = [[] for _ in covers]
    for per_level in hook(t, ctx, g, covers, baseline.scratch):
        for lvl, order in enumerate(per_level):
            if order:
                streams[lvl].append(order)
                meter().alloc("dc_streams", len(order))
    dc = DcLce(t, baseline, [])
    built: List[Level] = []
    for lvl in range(len(covers) - 1, -1, -1):
        dc.levels = built  # level lvl+1 sits at index 0 of the partial list
        def above(i, j):
            return dc.level_query(0, i, j)
        less = suffix_less(t, above)
        order = list(LoserTree([iter(s) for s in streams[lvl]], less))
        lcps = [above(a, c) for a, c in zip(order, order[1:])]
        level = Level(covers[lvl], order, lcps, n)
        meter().alloc("dc_level", level.words())
        meter().alloc("lcp_index", level.index.words())
        for s in streams[lvl]:
            meter().free("dc_streams", len(s))
        streams[lvl] = []
        built = [level] + built
    dc.levels = built
    return dc


def dc_query(s: DcLce, i: int, j: int) -> int:
    return s.query(i, j)
