"""Compacted tries over suffixes of a text, exact and block-granular.

Edge labels are never stored: an edge into ``v`` is labelled
``T[anchor(v) + depth(parent) .. anchor(v) + depth(v) - 1]`` where
``anchor(v)`` is the start of any suffix passing through ``v``.
"""
from __future__ import annotations

from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .text import Text


class CompactedTrie:
    """Compacted trie with lexicographically ordered children."""

    def __init__(self, t: Text):
        self.t = t
        self.depth: List[int] = [0]
        self.parent: List[int] = [-1]
        self.children: List[List[int]] = [[]]
        self.term: List[int] = [0]
        self.anchor: List[int] = [0]
        self.node_of: Dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.depth)

    def words(self) -> int:
        # depth, parent, term, anchor, one child slot per node, terminal map
        return 5 * len(self.depth) + 2 * len(self.node_of)

    def _new(self, depth: int, parent: int, anchor: int) -> int:
        self.depth.append(depth)
        self.parent.append(parent)
        self.children.append([])
        self.term.append(0)
        self.anchor.append(anchor)
        return len(self.depth) - 1

    def first_char(self, v: int) -> int:
        return self.t.buf[self.anchor[v] + self.depth[self.parent[v]] - 1]

    def label(self, v: int) -> Tuple[int, int]:
        """Edge label of ``v`` as a 1-based inclusive range of the text."""
        a = self.anchor[v]
        return a + self.depth[self.parent[v]], a + self.depth[v] - 1

    @property
    def terminals(self) -> int:
        return len(self.node_of)


def trie_from_sorted(t: Text, order: Sequence[int], lcps: Sequence[int]) -> CompactedTrie:
    """Rightmost-path construction from sorted suffixes and adjacent LCPs."""
    if len(lcps) != max(0, len(order) - 1):
        raise ValueError("need exactly one LCP per adjacent pair")
    n = t.n
    trie = CompactedTrie(t)
    depth = trie.depth
    stack = [0]
    prev_len = 0
    for k, pos in enumerate(order):
        t.check(pos)
        length = n - pos + 1
        ell = 0 if k == 0 else lcps[k - 1]
        if ell < 0 or ell > min(length, prev_len):
            raise ValueError(f"LCP {ell} inconsistent with suffixes at rank {k}")
        popped = -1
        while depth[stack[-1]] > ell:
            popped = stack.pop()
        top = stack[-1]
        if depth[top] < ell:
            # split the edge into the last popped node
            w = trie._new(ell, top, trie.anchor[popped])
            trie.children[top][-1] = w
            trie.children[w].append(popped)
            trie.parent[popped] = w
            stack.append(w)
            top = w
        if ell == length:
            if trie.term[top]:
                raise ValueError(f"positions {trie.term[top]} and {pos} claim one node")
            trie.term[top] = pos
            trie.node_of[pos] = top
        else:
            leaf = trie._new(length, top, pos)
            trie.term[leaf] = pos
            trie.node_of[pos] = leaf
            trie.children[top].append(leaf)
            stack.append(leaf)
        prev_len = length
    return trie


def array_view(trie: CompactedTrie) -> Tuple[List[int], List[int]]:
    """Terminals in pre-order with the LCP of each adjacent pair."""
    order: List[int] = []
    lcps: List[int] = []
    depth, term, children = trie.depth, trie.term, trie.children
    cur = 0
    stack: List[Tuple[int, int]] = [(0, 0)]
    while stack:
        u, k = stack.pop()
        if k == 0 and term[u]:
            if order:
                lcps.append(cur)
            order.append(term[u])
            cur = depth[u]
        if k < len(children[u]):
            stack.append((u, k + 1))
            stack.append((children[u][k], 0))
        else:
            cur = min(cur, depth[trie.parent[u]]) if u else cur
    return order, lcps


def dump(trie: CompactedTrie) -> str:
    """Indented debug listing: depth, edge label and terminal tag per node."""
    lines: List[str] = []
    t = trie.t

    def show(v: int, indent: int) -> None:
        if v:
            lo, hi = trie.label(v)
            frag = t.fragment(lo, hi)
            text = bytes(frag).decode("latin-1") if not t.wide else " ".join(map(str, frag))
            tag = f" [{trie.term[v]}]" if trie.term[v] else ""
            lines.append(f"{'  ' * indent}{text} d={trie.depth[v]}{tag}")
        else:
            tag = f" [{trie.term[0]}]" if trie.term[0] else ""
            lines.append(f"root d=0{tag}")
        for c in trie.children[v]:
            show(c, indent + 1)

    show(0, 0)
    return "\n".join(lines)


class SparseTable:
    """Range-minimum over a fixed integer array, ``O(m log m)`` words."""

    def __init__(self, values):
        base = np.asarray(values, dtype=np.int64)
        self.levels = [base]
        k = 1
        while 2 * k <= len(base):
            prev = self.levels[-1]
            self.levels.append(np.minimum(prev[:-k], prev[k:]))
            k *= 2
        self._lists = [lvl.tolist() for lvl in self.levels]

    def words(self) -> int:
        return sum(len(lvl) for lvl in self.levels)

    def query(self, lo: int, hi: int) -> int:
        """Minimum of ``values[lo..hi]`` (inclusive, ``lo <= hi``)."""
        k = (hi - lo + 1).bit_length() - 1
        row = self._lists[k]
        a, c = row[lo], row[hi - (1 << k) + 1]
        return a if a < c else c


class LcpIndex:
    """LCP of two stored suffixes as the string depth of their LCA.

    Over a trie the Euler tour's depth sequence is range-minimum indexed;
    over a sorted array the adjacent LCPs are.
    """

    def __init__(self, rank, rmq: SparseTable, n: int, words: int, adjacent: bool):
        self._rank = rank
        self._rmq = rmq
        # over an array the minimum runs over adjacent pairs ra..rb-1
        self._adjacent = adjacent
        self.n = n
        self._words = words

    def words(self) -> int:
        return self._words

    @classmethod
    def from_trie(cls, trie: CompactedTrie) -> "LcpIndex":
        tour: List[int] = []
        first: Dict[int, int] = {}
        depth, children, term = trie.depth, trie.children, trie.term
        stack: List[Tuple[int, int]] = [(0, 0)]
        while stack:
            u, k = stack.pop()
            tour.append(depth[u])
            if k == 0 and term[u]:
                first[term[u]] = len(tour) - 1
            if k < len(children[u]):
                stack.append((u, k + 1))
                stack.append((children[u][k], 0))
        rmq = SparseTable(tour)
        return cls(first, rmq, trie.t.n, rmq.words() + 2 * len(first), False)

    @classmethod
    def from_array(cls, order: Sequence[int], lcps: Sequence[int], n: int, rank=None) -> "LcpIndex":
        """Index over a sorted array; ``rank`` maps a position to its rank."""
        if rank is None:
            rank = {p: k for k, p in enumerate(order)}
            extra = 2 * len(order)
        else:
            extra = len(order)
        rmq = SparseTable([0] if len(lcps) == 0 else lcps)
        return cls(_ArrayRank(rank), rmq, n, rmq.words() + extra, True)

    def query(self, a: int, b: int) -> int:
        if a == b:
            if a not in self._rank:
                raise KeyError(f"{a} is not stored")
            return self.n - a + 1
        ra, rb = self._rank[a], self._rank[b]
        if ra > rb:
            ra, rb = rb, ra
        return self._rmq.query(ra, rb - self._adjacent)


class _ArrayRank:
    __slots__ = ("m",)

    def __init__(self, m):
        self.m = m

    def __getitem__(self, p):
        return int(self.m[p])

    def __contains__(self, p):
        try:
            self.m[p]
        except (KeyError, IndexError, ValueError):
            return False
        return True


def lcp_preprocess(trie: CompactedTrie) -> LcpIndex:
    return LcpIndex.from_trie(trie)


def lcp_query(idx: LcpIndex, a: int, b: int) -> int:
    return idx.query(a, b)


# ---------------------------------------------------------------------------
# coarse tries

NIL = -1


class CoarseTrie:
    """Compacted trie over length-``g`` blocks.

    Explicit nodes store the fingerprint value of ``str(v)``; each edge
    stores the ``(value, length)`` fingerprint key of its first block.
    Children form a doubly linked list ordered by that key, which is not
    the lexicographic order.  Inner depths are multiples of ``g``; only a
    leaf can end inside a block, at the end of the text.
    """

    FIELDS = 11

    def __init__(self, n: int, g: int):
        self.n = n
        self.g = g
        self.depth = [0]
        self.parent = [NIL]
        self.first = [NIL]
        self.last = [NIL]
        self.nxt = [NIL]
        self.prv = [NIL]
        self.kval = [0]
        self.klen = [0]
        self.fval = [0]
        self.term = [0]
        self.anchor = [0]
        self.node_of: Dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.depth)

    def words(self) -> int:
        return self.FIELDS * len(self.depth) + 2 * len(self.node_of)

    def new_node(self, depth: int, anchor: int, key: Tuple[int, int], fval: int) -> int:
        self.depth.append(depth)
        self.parent.append(NIL)
        self.first.append(NIL)
        self.last.append(NIL)
        self.nxt.append(NIL)
        self.prv.append(NIL)
        self.kval.append(key[0])
        self.klen.append(key[1])
        self.fval.append(fval)
        self.term.append(0)
        self.anchor.append(anchor)
        return len(self.depth) - 1

    def key(self, v: int) -> Tuple[int, int]:
        return self.kval[v], self.klen[v]

    def children(self, u: int) -> Iterator[int]:
        c = self.first[u]
        while c != NIL:
            yield c
            c = self.nxt[c]

    def mark_terminal(self, v: int, pos: int) -> None:
        if self.term[v]:
            raise CollisionDetected(f"positions {self.term[v]} and {pos} share a coarse node")
        self.term[v] = pos
        self.node_of[pos] = v

    def link(self, u: int, v: int, before: int = NIL) -> None:
        """Attach ``v`` as a child of ``u`` right before sibling ``before`` (end if NIL)."""
        self.parent[v] = u
        if before == NIL:
            p = self.last[u]
            self.prv[v], self.nxt[v] = p, NIL
            if p == NIL:
                self.first[u] = v
            else:
                self.nxt[p] = v
            self.last[u] = v
        else:
            p = self.prv[before]
            self.prv[v], self.nxt[v] = p, before
            self.prv[before] = v
            if p == NIL:
                self.first[u] = v
            else:
                self.nxt[p] = v

    def link_sorted(self, u: int, v: int) -> None:
        key = (self.kval[v], self.klen[v])
        c = self.first[u]
        while c != NIL and (self.kval[c], self.klen[c]) < key:
            c = self.nxt[c]
        if c != NIL and (self.kval[c], self.klen[c]) == key:
            raise CollisionDetected("two sibling edges share a first-block fingerprint")
        self.link(u, v, c)

    def find_child(self, u: int, key: Tuple[int, int], start: int = NIL) -> Tuple[int, int]:
        """First child of ``u`` (from ``start``) with key ``>= key``; returns (child, equal)."""
        c = self.first[u] if start == NIL else start
        kv, kl = self.kval, self.klen
        while c != NIL:
            ck = (kv[c], kl[c])
            if ck >= key:
                return c, ck == key
            c = self.nxt[c]
        return NIL, False

    def split_edge(self, v: int, d: int, fval: int) -> int:
        """Subdivide the edge into ``v`` at string depth ``d``; return the new node.

        The new node takes ``v``'s place among its siblings and inherits its
        key.  ``v``'s own key becomes unknown and must be reset by the caller.
        """
        u = self.parent[v]
        if not self.depth[u] < d < self.depth[v]:
            raise CollisionDetected(f"split depth {d} outside edge ({self.depth[u]}, {self.depth[v]})")
        w = self.new_node(d, self.anchor[v], (self.kval[v], self.klen[v]), fval)
        self.parent[w] = u
        p, q = self.prv[v], self.nxt[v]
        self.prv[w], self.nxt[w] = p, q
        if p == NIL:
            self.first[u] = w
        else:
            self.nxt[p] = w
        if q == NIL:
            self.last[u] = w
        else:
            self.prv[q] = w
        self.prv[v] = self.nxt[v] = NIL
        self.parent[v] = w
        self.first[w] = self.last[w] = v
        return w


class CollisionDetected(RuntimeError):
    """Fingerprint comparisons produced a structurally impossible answer."""


def coarse_insert_leaf(trie: CoarseTrie, at, pos: int, leaf_key: Tuple[int, int],
                       leaf_fval: int, *, split_fval: int = 0,
                       block_key: Optional[Callable[[int], Tuple[int, int]]] = None,
                       before: Optional[int] = None) -> Tuple[int, List[int]]:
    """Attach the suffix ``T[pos..]`` at a node or inside an edge.

    ``at`` is a node, or ``(v, d)`` for the point at depth ``d`` on the edge
    into ``v``.  Splitting leaves ``v`` with a first block that is not
    aligned for the caller's fingerprints; ``block_key`` computes it by a
    scan and such nodes are returned.  ``before`` is a sibling hint to avoid
    rescanning the child list (``NIL`` appends).
    """
    scanned: List[int] = []
    if isinstance(at, tuple):
        v, d = at
        u = trie.split_edge(v, d, split_fval)
        if block_key is None:
            raise ValueError("splitting needs a block scanner")
        kv, kl = block_key(trie.anchor[v] + d)
        trie.kval[v], trie.klen[v] = kv, kl
        scanned.append(v)
    else:
        u = at
    length = trie.n - pos + 1
    if length == trie.depth[u]:
        trie.mark_terminal(u, pos)
        return u, scanned
    if length < trie.depth[u]:
        raise CollisionDetected(f"suffix {pos} shorter than its locus")
    leaf = trie.new_node(length, pos, leaf_key, leaf_fval)
    trie.term[leaf] = pos
    trie.node_of[pos] = leaf
    if before is None:
        trie.link_sorted(u, leaf)
    else:
        trie.link(u, leaf, before)
    return leaf, scanned


def coarse_canonical(trie: CoarseTrie, u: int = 0):
    """Nested-tuple form of a coarse trie for structural equality tests."""
    kids = tuple(coarse_canonical(trie, c) for c in trie.children(u))
    return (trie.depth[u], trie.term[u], trie.kval[u], trie.klen[u], trie.fval[u], kids)


def check_coarse(trie: CoarseTrie, t: Text, ctx) -> None:
    """Assert the stored annotations against direct evaluation (test helper)."""
    from .fingerprint import fp_of

    g, n = trie.g, trie.n
    for v in range(1, len(trie)):
        if trie.parent[v] == NIL:
            continue
        a, d = trie.anchor[v], trie.depth[v]
        pd = trie.depth[trie.parent[v]]
        assert pd % g == 0, "inner depth off the block grid"
        assert d % g == 0 or d == n - a + 1, "depth off the block grid"
        assert trie.fval[v] == fp_of(ctx, t.fragment(a, a + d - 1)).value, f"node {v} fingerprint"
        blk = t.fragment(a + pd, min(n, a + pd + g - 1))
        assert (trie.kval[v], trie.klen[v]) == (fp_of(ctx, blk).value, len(blk)), f"edge {v} key"
    for u in range(len(trie)):
        keys = [trie.key(c) for c in trie.children(u)]
        assert keys == sorted(keys) and len(set(keys)) == len(keys), f"sibling order at {u}"
        for c in trie.children(u):
            assert trie.parent[c] == u
