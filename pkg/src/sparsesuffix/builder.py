"""Monte Carlo sparse suffix tree construction in ``O(b)`` working words.

The text is cut into blocks of ``g = ceil(n/b)`` symbols.  Round ``r``
handles the suffixes starting at ``r, r+g, r+2g, ...``, whose block
fingerprints all come from one rolling component.  A coarse trie over
blocks is grown round by round and finally refined to the exact trie by
sorting the first blocks below every branching node.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .fingerprint import FpContext, PhiComponent, fragment_value, horner, new_context, phi_advance, phi_build
from .instrument import SCRATCH_LIVE, meter, scratch_words
from .lce import _mismatch, build_baseline, build_dc_lce
from .strsort import radix_argsort, rank_values, sort_quadratic
from .suffixarray import kasai, sa_is
from .text import PositionSet, Text
from .trie import NIL, CoarseTrie, CollisionDetected, CompactedTrie, array_view, trie_from_sorted

# peak reported words of build_sst stay below SPACE_CONSTANT * b once b >= 64
SPACE_CONSTANT = 32


@dataclass
class BuildConfig:
    seed: int = 0
    c: int = 1
    lce: str = "dc"            # "dc" or "baseline"
    path: str = "auto"         # "auto", "small" or "large"
    prime: Optional[int] = None
    wide: bool = False
    scratch: Optional[int] = None


@dataclass
class SparseSuffixTree:
    trie: CompactedTrie
    positions: List[int]
    lcps: List[int]
    meta: Dict[str, object] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def b(self) -> int:
        return len(self.positions)


# ---------------------------------------------------------------------------
# per-round block strings

class RoundArray:
    """Suffix array of the block string of one round.

    ``positions[k]`` is the text position of the rank-``k`` suffix and
    ``lcp[k]`` the number of blocks it shares with rank ``k+1``.
    """

    __slots__ = ("r", "positions", "lcp")

    def __init__(self, r: int, positions: np.ndarray, lcp: np.ndarray):
        self.r = r
        self.positions = positions
        self.lcp = lcp

    def words(self) -> int:
        return 2 * len(self.positions)


def round_symbols(ctx: FpContext, phi: PhiComponent) -> Tuple[np.ndarray, np.ndarray]:
    """Fingerprint values and lengths of the blocks starting at ``r, r+g, ...``."""
    m = len(phi)
    vals = phi.value.copy()
    if m > 1:
        head = ctx.vmul(phi.pow[:-1], phi.ipow[1:])
        vals[:-1] = ctx.vsub(phi.value[:-1], ctx.vmul(head, phi.value[1:]))
    lens = np.full(m, phi.g, dtype=np.uint64)
    lens[-1] = phi.n - phi.position(m - 1) + 1
    return vals, lens


def round_suffix_array(ctx: FpContext, phi: PhiComponent, space: int) -> RoundArray:
    """Rank-normalize the block string and sort its suffixes."""
    vals, lens = round_symbols(ctx, phi)
    ranks, top = rank_values([vals, lens], [ctx.p, phi.g + 1], max(2, space))
    s = ranks.tolist()
    m = meter()
    with m.hold("round_string", 3 * len(s)):
        sa = sa_is(s, top)
        lcp = kasai(s, sa)
    sa_arr = np.asarray(sa, dtype=np.int64)
    return RoundArray(phi.r, phi.r + sa_arr * phi.g, np.asarray(lcp, dtype=np.int64))


def extract(ra: RoundArray, mask: np.ndarray, n: int, g: int) -> Tuple[List[int], List[int]]:
    """Sub-array of the selected suffixes with their coarse LCPs in symbols.

    ``mask`` is indexed by rank.  The LCP of two kept suffixes is the
    minimum of the adjacent LCPs between them.
    """
    idx = np.flatnonzero(mask)
    if len(idx) == 0:
        return [], []
    pos = ra.positions[idx]
    if len(idx) > 1:
        blocks = np.minimum.reduceat(ra.lcp[:idx[-1]], idx[:-1])
        lengths = n - pos + 1
        depths = np.minimum(blocks * g, np.minimum(lengths[:-1], lengths[1:]))
    else:
        depths = np.zeros(0, dtype=np.int64)
    return pos.tolist(), depths.tolist()


# ---------------------------------------------------------------------------
# coarse tries

class _Inserter:
    """Insertion of ``r``-aligned suffixes into a coarse trie during round ``r``."""

    def __init__(self, trie: CoarseTrie, t: Text, ctx: FpContext, phi: PhiComponent,
                 lce, scratch: int):
        self.trie = trie
        self.t = t
        self.ctx = ctx
        self.phi = phi
        self.lce = lce
        self.scratch = scratch
        self.n = t.n
        self.g = trie.g

    def block_phi(self, q: int) -> Tuple[int, int]:
        """Key of the aligned block at ``q`` in constant time."""
        end = min(self.n, q + self.g - 1)
        return fragment_value(self.ctx, self.phi, q, end), end - q + 1

    def block_scan(self, q: int) -> Tuple[int, int]:
        end = min(self.n, q + self.g - 1)
        meter().count("block_scans")
        return horner(self.ctx, self.t, q, end, self.scratch), end - q + 1

    def prefix_fval(self, s: int, d: int) -> int:
        if d == 0:
            return 0
        return fragment_value(self.ctx, self.phi, s, s + d - 1)

    def new_leaf(self, s: int, key: Tuple[int, int]) -> int:
        trie = self.trie
        leaf = trie.new_node(self.n - s + 1, s, key, self.phi.suffix_value(s))
        trie.term[leaf] = s
        trie.node_of[s] = leaf
        return leaf

    def split_insert(self, c: int, d: int, s: int) -> int:
        """Insert ``T[s..]`` branching off the edge into ``c`` at depth ``d``."""
        trie = self.trie
        w = trie.split_edge(c, d, self.prefix_fval(s, d))
        trie.kval[c], trie.klen[c] = self.block_scan(trie.anchor[c] + d)
        if self.n - s + 1 == d:
            trie.mark_terminal(w, s)
            return w
        key = self.block_phi(s + d)
        kc = trie.key(c)
        if key == kc:
            raise CollisionDetected("split produced equal sibling keys")
        leaf = self.new_leaf(s, key)
        trie.link(w, leaf, c if key < kc else NIL)
        return leaf

    def descend(self, u: int, start: int, s: int) -> int:
        """Walk down from ``u`` (scanning children from ``start``) and attach ``T[s..]``."""
        trie = self.trie
        depth, fval = trie.depth, trie.fval
        g = self.g
        length = self.n - s + 1
        while True:
            d = depth[u]
            if length == d:
                trie.mark_terminal(u, s)
                return u
            if length < d:
                raise CollisionDetected(f"suffix {s} shorter than its locus")
            key = self.block_phi(s + d)
            c, equal = trie.find_child(u, key, start)
            if not equal:
                leaf = self.new_leaf(s, key)
                trie.link(u, leaf, c)
                return leaf
            dc = depth[c]
            if dc <= length and dc % g == 0 and fval[c] == self.prefix_fval(s, dc):
                u, start = c, NIL
                continue
            ell = self.lce.query(s, trie.anchor[c])
            meter().count("lce_queries")
            cut = ell - ell % g
            if not d < cut < dc:
                raise CollisionDetected(f"LCE {ell} does not fit the edge ({d}, {dc})")
            return self.split_insert(c, cut, s)

    def insert_after(self, x: int, lam: int, s: int) -> int:
        """Attach ``T[s..]`` whose coarse LCP with the suffix at node ``x`` is ``lam``.

        The search resumes from ``x`` instead of the root: everything left of
        the path to ``x`` is smaller than ``T[s..]``.
        """
        trie = self.trie
        depth, parent = trie.depth, trie.parent
        v, c = x, NIL
        while depth[v] > lam:
            c, v = v, parent[v]
        if depth[v] < lam:
            return self.split_insert(c, lam, s)
        return self.descend(v, c, s)


def coarse_from_sorted(t: Text, ctx: FpContext, phi: PhiComponent,
                       positions: Sequence[int], depths: Sequence[int]) -> CoarseTrie:
    """Coarse trie of ``r``-aligned suffixes given in coarse order with coarse LCPs."""
    n, g = t.n, phi.g
    trie = CoarseTrie(n, g)
    ins = _Inserter(trie, t, ctx, phi, None, 0)
    depth = trie.depth
    stack = [0]
    for k, pos in enumerate(positions):
        length = n - pos + 1
        ell = 0 if k == 0 else depths[k - 1]
        popped = NIL
        while depth[stack[-1]] > ell:
            popped = stack.pop()
        top = stack[-1]
        if depth[top] < ell:
            w = trie.split_edge(popped, ell, ins.prefix_fval(pos, ell))
            # the split point is aligned for this round
            trie.kval[popped], trie.klen[popped] = ins.block_phi(trie.anchor[popped] + ell)
            stack.append(w)
            top = w
        if ell == length:
            trie.mark_terminal(top, pos)
        else:
            leaf = ins.new_leaf(pos, ins.block_phi(pos + ell))
            trie.link(top, leaf)
            stack.append(leaf)
    return trie


def coarse_array_view(trie: CoarseTrie) -> Tuple[List[int], List[int]]:
    """Terminals in sibling-list pre-order with coarse LCPs in symbols."""
    order: List[int] = []
    lcps: List[int] = []
    depth, term, first, nxt, parent = trie.depth, trie.term, trie.first, trie.nxt, trie.parent
    cur = 0
    u = 0
    while True:
        if term[u]:
            if order:
                lcps.append(cur)
            order.append(term[u])
            cur = depth[u]
        if first[u] != NIL:
            u = first[u]
            continue
        while u != 0 and nxt[u] == NIL:
            u = parent[u]
            cur = min(cur, depth[u])
        if u == 0:
            return order, lcps
        cur = min(cur, depth[parent[u]])
        u = nxt[u]


def _by_round(positions: Iterable[int], g: int) -> Dict[int, List[int]]:
    groups: Dict[int, List[int]] = {}
    for p in positions:
        groups.setdefault((p - 1) % g + 1, []).append(p)
    return groups


def _rounds(ctx: FpContext, t: Text, g: int, scratch: int) -> Iterator[PhiComponent]:
    m = meter()
    phi = phi_build(ctx, t, g, scratch)
    m.count("phi_ops", t.n)
    m.alloc("phi", phi.words())
    yield phi
    for _ in range(1, g):
        words = phi.words()
        phi = phi_advance(ctx, t, phi)
        m.count("phi_ops", len(phi))
        m.free("phi", words - phi.words())
        yield phi
    m.free("phi", phi.words())


def build_coarse_small(t: Text, ctx: FpContext, B: Sequence[int], lce,
                       scratch: Optional[int] = None) -> CoarseTrie:
    """One root-to-locus descent per suffix, in round order."""
    n, b = t.n, len(B)
    g = -(-n // b)
    scratch = scratch or scratch_words(b)
    trie = CoarseTrie(n, g)
    groups = _by_round(B, g)
    m = meter()
    m.alloc("rounds", b)
    for phi in _rounds(ctx, t, g, scratch):
        members = groups.get(phi.r)
        if not members:
            continue
        ins = _Inserter(trie, t, ctx, phi, lce, scratch)
        before = trie.words()
        for s in members:
            ins.descend(0, NIL, s)
        m.alloc("coarse_trie", trie.words() - before)
    m.free("rounds", b)
    m.free("coarse_trie", trie.words())
    return trie


def coarse_trie_of_round(t: Text, ctx: FpContext, phi: PhiComponent, space: int,
                         mask: Optional[np.ndarray] = None) -> CoarseTrie:
    """Coarse trie of the ``r``-aligned suffixes (or those selected by a rank mask)."""
    ra = round_suffix_array(ctx, phi, space)
    if mask is None:
        mask = np.ones(len(ra.positions), dtype=bool)
    positions, depths = extract(ra, mask, t.n, phi.g)
    return coarse_from_sorted(t, ctx, phi, positions, depths)


def merge_round(acc: CoarseTrie, part: CoarseTrie, t: Text, ctx: FpContext,
                phi: PhiComponent, lce, scratch: int) -> CoarseTrie:
    """Insert the terminals of ``part`` into ``acc`` in coarse order.

    Each insertion resumes from the node of the previous one.
    """
    if acc.g != part.g or acc.n != part.n:
        raise ValueError("tries over different block grids")
    positions, lam = coarse_array_view(part)
    ins = _Inserter(acc, t, ctx, phi, lce, scratch)
    x = NIL
    for k, s in enumerate(positions):
        if k == 0:
            x = ins.descend(0, NIL, s)
        else:
            x = ins.insert_after(x, lam[k - 1], s)
    return acc


def build_coarse_large(t: Text, ctx: FpContext, B: Sequence[int], lce,
                       scratch: Optional[int] = None) -> CoarseTrie:
    """Per round: suffix array of the block string, extract, bulk merge."""
    n, b = t.n, len(B)
    g = -(-n // b)
    scratch = scratch or scratch_words(b)
    acc = CoarseTrie(n, g)
    groups = _by_round(B, g)
    m = meter()
    m.alloc("rounds", b)
    for phi in _rounds(ctx, t, g, scratch):
        members = groups.get(phi.r)
        if not members:
            continue
        ra = round_suffix_array(ctx, phi, b)
        m.alloc("round_array", ra.words())
        ranks = np.empty(len(ra.positions), dtype=np.int64)
        ranks[(ra.positions - phi.r) // g] = np.arange(len(ra.positions))
        mask = np.zeros(len(ra.positions), dtype=bool)
        mask[ranks[(np.asarray(members, dtype=np.int64) - phi.r) // g]] = True
        positions, depths = extract(ra, mask, n, g)
        m.free("round_array", ra.words())
        part = coarse_from_sorted(t, ctx, phi, positions, depths)
        before = acc.words()
        with m.hold("round_part", part.words()):
            merge_round(acc, part, t, ctx, phi, lce, scratch)
        m.alloc("coarse_trie", acc.words() - before)
    m.free("rounds", b)
    m.free("coarse_trie", acc.words())
    return acc


# ---------------------------------------------------------------------------
# uncoarsening

def uncoarsen_array(t: Text, coarse: CoarseTrie, b: int,
                    scratch: Optional[int] = None) -> Tuple[List[int], List[int]]:
    """Exact sorted order and LCPs of the terminals of a coarse trie.

    The first blocks below all branching nodes are sorted as one batch;
    a stable scan then hands every node its children in lexicographic
    order, and a traversal reads off the order and LCPs.
    """
    n = t.n
    scratch = scratch or scratch_words(b)
    depth, anchor, klen, term = coarse.depth, coarse.anchor, coarse.klen, coarse.term
    first, nxt = coarse.first, coarse.nxt
    starts: List[int] = []
    lens: List[int] = []
    tags: List[Tuple[int, int]] = []
    for u in range(len(coarse)):
        c = first[u]
        if c == NIL or nxt[c] == NIL:
            continue
        while c != NIL:
            starts.append(anchor[c] + depth[u])
            lens.append(klen[c])
            tags.append((u, c))
            c = nxt[c]
    m = meter()
    m.alloc("uncoarsen", 4 * len(tags))
    if b * b <= n:
        view = t.view
        batch = [(view[s - 1:s - 1 + ln], ln, k) for k, (s, ln) in enumerate(zip(starts, lens))]
        perm = sort_quadratic(batch)
    else:
        st = np.asarray(starts, dtype=np.int64)
        ln = np.asarray(lens, dtype=np.int64)
        width = int(ln.max()) if len(ln) else 0

        def column(k: int) -> np.ndarray:
            col = np.zeros(len(st), dtype=np.uint64)
            sel = ln > k
            col[sel] = t.np[st[sel] + k - 1].astype(np.uint64) + np.uint64(1)
            return col

        perm = radix_argsort(column, len(st), width, t.sigma + 1, max(2, b)).tolist()
    ordered: Dict[int, List[int]] = {}
    for k in perm:
        u, c = tags[k]
        ordered.setdefault(u, []).append(c)
    key_start = {c: s for (u, c), s in zip(tags, starts)}
    del starts, lens, tags

    order: List[int] = []
    lcps: List[int] = []
    cur = 0
    stack: List[Tuple[int, List[int], int]] = [(0, _kids(coarse, 0, ordered), 0)]
    if term[0]:
        order.append(term[0])
    while stack:
        u, kids, k = stack.pop()
        if k >= len(kids):
            continue
        c = kids[k]
        stack.append((u, kids, k + 1))
        if k == 0:
            cur = min(cur, depth[u])
        else:
            a, bb = kids[k - 1], c
            la, lb = klen[a], klen[bb]
            common = _mismatch(t, key_start[a], key_start[bb], min(la, lb), scratch)
            cur = depth[u] + common
        if term[c]:
            if order:
                lcps.append(cur)
            order.append(term[c])
            cur = depth[c]
        stack.append((c, _kids(coarse, c, ordered), 0))
    m.free("uncoarsen", 4 * len(key_start))
    return order, lcps


def _kids(coarse: CoarseTrie, u: int, ordered: Dict[int, List[int]]) -> List[int]:
    got = ordered.get(u)
    if got is not None:
        return got
    c = coarse.first[u]
    return [] if c == NIL else [c]


def uncoarsen(t: Text, coarse: CoarseTrie, b: int, scratch: Optional[int] = None) -> CompactedTrie:
    order, lcps = uncoarsen_array(t, coarse, b, scratch)
    return trie_from_sorted(t, order, lcps)


def round_subset_orders(t: Text, ctx: FpContext, g: int, covers, scratch: int) -> Iterator[List[List[int]]]:
    """For each round, the exact order of the aligned members of every cover."""
    n = t.n
    b = -(-n // g)
    m = meter()
    for phi in _rounds(ctx, t, g, scratch):
        ra = round_suffix_array(ctx, phi, b)
        per_level: List[List[int]] = []
        with m.hold("round_array", ra.words()):
            for dc in covers:
                res = ra.positions % dc.t_eff
                mask = (res < dc.r) | (res % dc.r == 0)
                positions, depths = extract(ra, mask, n, g)
                if not positions:
                    per_level.append([])
                    continue
                part = coarse_from_sorted(t, ctx, phi, positions, depths)
                with m.hold("round_part", part.words()):
                    order, _ = uncoarsen_array(t, part, b, scratch)
                per_level.append(order)
        yield per_level


# ---------------------------------------------------------------------------
# top level

def build_sst(t: Text, B, cfg: Optional[BuildConfig] = None) -> SparseSuffixTree:
    """Sparse suffix tree of the suffixes starting at ``B``.

    Correct unless the random fingerprints collide on ``T`` (probability at
    most ``n^-c``); a collision may also surface as ``CollisionDetected``.
    """
    cfg = cfg or BuildConfig()
    if not isinstance(B, PositionSet):
        B = PositionSet(B, t.n)
    positions = list(B.positions)
    n, b = t.n, len(positions)
    timings: Dict[str, float] = {}
    clock = time.perf_counter()
    ctx = new_context(t, cfg.c, cfg.seed, prime=cfg.prime, wide=cfg.wide)
    scratch = cfg.scratch or scratch_words(b)
    m = meter()
    m.alloc("scratch", SCRATCH_LIVE * scratch)
    m.alloc("positions", b)
    if cfg.lce == "dc":
        lce = build_dc_lce(t, ctx, b, scratch=scratch)
    elif cfg.lce == "baseline":
        lce = build_baseline(t, ctx, b, scratch)
    else:
        raise ValueError(f"unknown LCE mode {cfg.lce!r}")
    timings["lce"] = time.perf_counter() - clock
    path = cfg.path
    if path == "auto":
        path = "small" if b * b <= n else "large"
    clock = time.perf_counter()
    if path == "small":
        coarse = build_coarse_small(t, ctx, positions, lce, scratch)
    elif path == "large":
        coarse = build_coarse_large(t, ctx, positions, lce, scratch)
    else:
        raise ValueError(f"unknown path {path!r}")
    timings["coarse"] = time.perf_counter() - clock
    clock = time.perf_counter()
    with m.hold("coarse_trie", coarse.words()):
        order, lcps = uncoarsen_array(t, coarse, b, scratch)
    del coarse
    trie = trie_from_sorted(t, order, lcps)
    m.alloc("result", trie.words() + 2 * b)
    timings["uncoarsen"] = time.perf_counter() - clock
    meta = {
        "n": n, "b": b, "seed": cfg.seed, "prime": ctx.p, "base": ctx.x, "c": cfg.c,
        "mode": "mc", "lce": cfg.lce, "path": path, "g": -(-n // b),
    }
    return SparseSuffixTree(trie, order, lcps, meta, timings)
