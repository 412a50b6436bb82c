"""Deterministic verification of substring-equation systems.

An equation ``T[p..q] = T[p'..q']`` is satisfied with shortage ``S`` when
``T[p+S..q-S] = T[p'+S..q'-S]``.  Long equations are cut into uniform
systems of length ``3 * 2^k``; each level is then shrunk to the next one
through a block graph whose spanner cycles turn into period constraints.
Only the short systems at the bottom are compared symbol by symbol, and
every equation produced along the way is implied by the input, so a
failing one is a valid rejection witness.
"""
from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .diffcover import cover_within
from .instrument import meter
from .lce import _mismatch
from .text import PositionSet, Text
from .trie import CollisionDetected

# internal form of an equation: (p, p', length)
Eq = Tuple[int, int, int]


class Equation(NamedTuple):
    p: int
    q: int
    pp: int
    qq: int

    @property
    def length(self) -> int:
        return self.q - self.p + 1

    @property
    def shift(self) -> int:
        return self.pp - self.p

    @classmethod
    def of(cls, p: int, pp: int, length: int) -> "Equation":
        return cls(p, p + length - 1, pp, pp + length - 1)

    def swapped(self) -> "Equation":
        return Equation(self.pp, self.qq, self.p, self.q)

    def compact(self) -> Eq:
        return self.p, self.pp, self.length


def _eq(e) -> Eq:
    return e.compact() if isinstance(e, Equation) else e


def naive_check(t: Text, e, shortage: int = 0) -> bool:
    """Symbol-by-symbol test of ``e`` with the given shortage."""
    p, pp, length = _eq(e)
    length -= 2 * shortage
    if length <= 0:
        return True
    a, c = p + shortage - 1, pp + shortage - 1
    return t.view[a:a + length] == t.view[c:c + length]


def first_mismatch(t: Text, e) -> Optional[int]:
    """Offset of the first differing position of ``e``, or ``None``."""
    p, pp, length = _eq(e)
    if length <= 0:
        return None
    k = _mismatch(t, p, pp, length, max(64, min(length, 1 << 16)))
    return None if k == length else k


@dataclass
class Verdict:
    accepted: bool
    witness: Optional[Equation] = None
    offset: Optional[int] = None
    reason: str = ""
    stats: Dict[str, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.accepted

    def line(self) -> str:
        if self.accepted:
            return "accept"
        w = self.witness
        return f"reject {w.p} {w.q} {w.pp} {w.qq} {self.offset}"


class _Reject(Exception):
    def __init__(self, e: Eq, offset: int, reason: str):
        super().__init__(reason)
        self.e, self.offset, self.reason = e, offset, reason


# ---------------------------------------------------------------------------
# splitting, cycles and periods

def split_equation(e, ell: int) -> List[Equation]:
    """Uniform parts of length ``ell`` with overlaps of at least ``2*floor(ell/3)``."""
    return [Equation.of(*x) for x in _split(_eq(e), ell)]


def _split(e: Eq, ell: int) -> List[Eq]:
    p, pp, length = e
    if not 1 <= ell <= length:
        raise ValueError(f"cannot split length {length} into parts of length {ell}")
    r = max(1, ell // 3)
    span = length - ell
    out = [(p + off, pp + off, ell) for off in range(0, span, r)]
    out.append((p + span, pp + span, ell))
    return out


def gen_split_ok(parts: Sequence[Tuple[int, int]], shortages: Sequence[int]) -> bool:
    """Overlap condition for parts ``(p_i, q_i)`` ordered by start."""
    return all(parts[i + 1][0] + shortages[i + 1] <= parts[i][1] - shortages[i] + 1
               for i in range(len(parts) - 1))


def cycle_period(cycle: Sequence[Equation]) -> Tuple[int, int]:
    """``(r, R)`` of a cyclic uniform system: the period and the slack it costs."""
    if not cycle:
        raise ValueError("empty cycle")
    length = cycle[0].length
    if any(e.length != length for e in cycle):
        raise ValueError("cycle is not uniform")
    total = slack = 0
    m = len(cycle)
    for i, e in enumerate(cycle):
        step = cycle[(i + 1) % m].p - e.pp
        total += step
        slack += abs(step)
    return abs(total), slack


def merge_period_constraints(constraints: Sequence[Equation]) -> Equation:
    """One constraint enforcing the gcd of all periods on their common fragment."""
    if not constraints:
        raise ValueError("no constraints")
    frags = {(min(e.p, e.pp), max(e.q, e.qq)) for e in constraints}
    if len(frags) != 1:
        raise ValueError("constraints concern different fragments")
    lo, hi = frags.pop()
    period = 0
    for e in constraints:
        if 2 * abs(e.shift) > hi - lo + 1:
            raise ValueError("shift too large for a period constraint")
        period = math.gcd(period, abs(e.shift))
    return Equation(lo, hi - period, lo + period, hi)


# ---------------------------------------------------------------------------
# spanners

@dataclass
class SpannerResult:
    kept: List[int]                 # edge ids forming the spanner
    c: List[int]                    # cycle weight of each edge, oriented as given
    cycle_len: List[int]            # length of each edge's witness cycle
    trees: List[Dict[int, Tuple[int, int]]] = field(default_factory=list)
    tree_of: List[int] = field(default_factory=list)


def build_spanner(vertices: int, edges: Sequence[Tuple[int, int, int]],
                  keep_trees: bool = False) -> SpannerResult:
    """Ball-growing spanner of a multigraph with oriented weights.

    ``edges[i] = (a, b, w)`` is the arc ``a -> b`` of weight ``w`` (its
    reverse weighs ``-w``).  Returns at most ``2 * vertices`` edges and, for
    every edge, the weight of a cycle closing it through the kept edges.
    """
    adj: List[List[int]] = [[] for _ in range(vertices)]
    for i, (a, b, _) in enumerate(edges):
        adj[a].append(i)
        if b != a:
            adj[b].append(i)
    alive = [bool(adj[v]) for v in range(vertices)]
    c = [0] * len(edges)
    clen = [0] * len(edges)
    kept: List[int] = []
    trees: List[Dict[int, Tuple[int, int]]] = []
    tree_of = [-1] * len(edges) if keep_trees else []
    done = [False] * len(edges)
    for root in range(vertices):
        if not alive[root]:
            continue
        # BFS layers until the ball stops doubling
        dist = {root: 0}
        pot = {root: 0}
        parent: Dict[int, Tuple[int, int]] = {}
        inner = [root]          # V_{d-1}
        frontier = [root]
        while True:
            nxt = []
            for u in frontier:
                for eid in adj[u]:
                    a, b, w = edges[eid]
                    v = b if a == u else a
                    if not alive[v] or v in dist:
                        continue
                    dist[v] = dist[u] + 1
                    # weight of the arc v -> u
                    pot[v] = (w if a == v else -w) + pot[u]
                    parent[v] = (u, eid)
                    nxt.append(v)
            ball = len(inner) + len(nxt)
            if ball <= 2 * len(inner) + 1:
                break
            inner.extend(nxt)
            frontier = nxt
        kept.extend(eid for _, eid in parent.values())
        if keep_trees:
            trees.append(dict(parent))
        tree_ids = {eid for _, eid in parent.values()}
        for u in inner:
            for eid in adj[u]:
                if done[eid]:
                    continue
                a, b, w = edges[eid]
                if not (alive[a] and alive[b]):
                    continue
                done[eid] = True
                c[eid] = w + pot[b] - pot[a]
                clen[eid] = 2 if eid in tree_ids else 1 + dist[a] + dist[b]
                if keep_trees:
                    tree_of[eid] = len(trees) - 1
        for u in inner:
            alive[u] = False
    return SpannerResult(kept, c, clen, trees, tree_of)


def replay_cycle(res: SpannerResult, edges: Sequence[Tuple[int, int, int]], eid: int) -> List[Tuple[int, int]]:
    """Witness cycle of ``eid`` as ``(edge id, direction)`` arcs (test helper)."""
    tree = res.trees[res.tree_of[eid]]
    a, b, _ = edges[eid]
    if tree.get(b, (None, None))[1] == eid or tree.get(a, (None, None))[1] == eid:
        return [(eid, 1), (eid, -1)]

    def up(v):
        path = []
        while v in tree:
            u, e = tree[v]
            path.append((e, 1 if edges[e][0] == v else -1))
            v = u
        return path

    down = [(e, -d) for e, d in reversed(up(a))]
    return [(eid, 1)] + up(b) + down


# ---------------------------------------------------------------------------
# block graphs and the reduction

def _block_size(n: int, s: int) -> int:
    """Largest ``B >= 1`` with ``B (2 ceil(log2(n/B)) + 1) <= s``, or 0."""
    def cost(bb: int) -> int:
        blocks = -(-n // bb)
        return bb * (2 * max(0, (blocks - 1).bit_length()) + 1)

    lo, hi = 0, max(1, s)
    # cost is not monotone at every step; scan down from the analytic bound
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if cost(mid) <= s:
            lo = mid
        else:
            hi = mid - 1
    best = lo
    for cand in range(lo + 1, min(s, lo + 64) + 1):
        if cost(cand) <= s:
            best = cand
    return best


def build_equation_graph(E: Sequence, B: int):
    """Vertices are aligned starts ``pred(p)``; returns (vertex list, edges, index)."""
    index: Dict[int, int] = {}
    verts: List[int] = []
    edges: List[Tuple[int, int, int]] = []
    for e in E:
        p, pp, _ = _eq(e)
        a = p - (p - 1) % B
        c = pp - (pp - 1) % B
        for v in (a, c):
            if v not in index:
                index[v] = len(verts)
                verts.append(v)
        edges.append((index[a], index[c], pp - p))
    return verts, edges, index


def reduce_system(E: Sequence[Eq], L: int, B: int, S: int, n: int,
                  naive: List[Eq]) -> List[Eq]:
    """Spanner equations plus one gcd-merged period constraint per canonical fragment.

    Edges whose witness cycle is too long for the slack are appended to
    ``naive`` instead (cannot happen when ``S`` meets the spanner bound).
    """
    verts, edges, _ = build_equation_graph(E, B)
    res = build_spanner(len(verts), edges)
    out: List[Eq] = [E[i] for i in res.kept]
    periods: Dict[int, int] = {}
    for i, e in enumerate(E):
        ci = abs(res.c[i])
        if ci == 0:
            continue
        if (res.cycle_len[i] + 1) * B > S:
            naive.append(e)
            continue
        v = verts[edges[i][0]]
        periods[v] = math.gcd(periods.get(v, 0), ci)
    for v, r in periods.items():
        lo, hi = v + S, v + L - 1 - S
        if hi - lo + 1 - r > 0:
            out.append((lo, lo + r, hi - lo + 1 - r))
    return out


def _reduce_level(E: Sequence[Eq], k: int, n: int, fast: bool,
                  naive: List[Eq]) -> Optional[List[Eq]]:
    """Turn a system of length ``3*2^k`` into one of length ``3*2^(k-1)``.

    Returns ``None`` when the level is too short for the reduction.
    """
    L = 3 << k
    if fast:
        if k < 3:
            return None
        S = 1 << (k - 3)
    else:
        if k < 2:
            return None
        S = 1 << (k - 2)
    B = _block_size(n, S)
    if B < 1:
        return None
    work: Sequence[Eq] = E
    length = L
    if fast:
        dc = cover_within(max(1, S // B), -(-n // B))
        moved = []
        for p, pp, _ in E:
            ia = (p - 1) // B + 1
            ic = (pp - 1) // B + 1
            h = dc.shift_unchecked(ia, ic) * B
            if h >= S:
                raise AssertionError("cover shift exceeds the slack")
            moved.append((p + h, pp + h, L - S))
        work = moved
        length = L - S
    reduced = reduce_system(work, length, B, S, n, naive)
    target = 3 << (k - 1)
    out: List[Eq] = []
    for e in reduced:
        if e[2] < target:
            # cannot happen for equations in the decomposed length range; keep it sound
            naive.append(e)
            continue
        out.extend(_split(e, target))
    return out


# ---------------------------------------------------------------------------
# decomposition

def decompose(E: Sequence, k: int, dc_mode: bool, n: int) -> Tuple[List[Eq], List[Eq]]:
    """Split off parts of length ``3*2^k``; longer remainders go to the next level."""
    unit = 3 << k
    short: List[Eq] = []
    rest: List[Eq] = []
    if not dc_mode:
        for e in E:
            p, pp, L = _eq(e)
            if L < unit:
                raise ValueError(f"equation shorter than {unit}")
            if L < 2 * unit:
                short.extend(_split((p, pp, L), unit))
            else:
                short.append((p, pp, unit))
                short.append((p + L - unit, pp + L - unit, unit))
                rest.append((p, pp, L))
        return short, rest
    half = 1 << k
    dc = cover_within(2 * half, n)
    for e in E:
        p, pp, L = _eq(e)
        if L < unit:
            raise ValueError(f"equation shorter than {unit}")
        if L < 8 * half:
            short.extend(_split((p, pp, L), unit))
            continue
        h = dc.shift_unchecked(p, pp)
        parts = [(p, p + unit - 1), (p + half, p + half + unit - 1),
                 (p + 2 * half, p + 2 * half + unit - 1), (p + h, p + L - 1),
                 (p + L - unit, p + L - 1)]
        slack = [half, half, half, 2 * half, half]
        if not gen_split_ok(parts, slack):
            raise AssertionError("cover shift breaks the overlap condition")
        short.append((p, pp, unit))
        short.append((p + half, pp + half, unit))
        short.append((p + 2 * half, pp + 2 * half, unit))
        short.append((p + L - unit, pp + L - unit, unit))
        rest.append((p + h, pp + h, L - h))
    return short, _spanning_forest(rest)


def _spanning_forest(E: List[Eq]) -> List[Eq]:
    """Maximum-length spanning forest over start positions (sort + union-find)."""
    parent: Dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != root:
            parent[x], x = root, parent[x]
        return root

    kept: List[Eq] = []
    for e in sorted(E, key=lambda e: -e[2]):
        a, c = find(e[0]), find(e[1])
        if a == c:
            continue
        parent[a] = c
        kept.append(e)
    return kept


# ---------------------------------------------------------------------------
# driver

def _levels(n: int, b: int, fast: bool) -> Tuple[int, int]:
    lb = max(1.0, math.log2(b)) if b > 1 else 1.0
    factor = math.sqrt(lb) if fast else lb
    ell = max(0, math.floor(math.log2(n * factor / b)))
    top = math.floor(math.log2(n / 3)) if n >= 3 else -1
    return ell, top


def _check_all(t: Text, E: Iterable[Eq], stats: Dict[str, int]) -> None:
    for e in E:
        stats["naive_checks"] += 1
        stats["naive_symbols"] += max(0, e[2])
        if not naive_check(t, e):
            raise _Reject(e, first_mismatch(t, e), "equation")


def verify_system(t: Text, E: Sequence, mode: str = "fast", *, cache: bool = False,
                  min_level: Optional[int] = None) -> Verdict:
    """Accept iff ``T`` satisfies every equation of ``E``.

    ``mode`` selects the plain (``slow``) or difference-cover (``fast``)
    reductions.  ``min_level`` lowers the naive-check threshold to force
    more reduction levels (testing aid).
    """
    if mode not in ("slow", "fast"):
        raise ValueError(f"unknown mode {mode!r}")
    fast = mode == "fast"
    n = t.n
    system = [e for e in (_eq(x) for x in E) if e[2] > 0]
    for p, pp, L in system:
        if p < 1 or pp < 1 or p + L - 1 > n or pp + L - 1 > n:
            raise ValueError(f"equation {(p, pp, L)} leaves the text")
    stats: Dict[str, int] = {"naive_checks": 0, "naive_symbols": 0, "levels": 0, "fallbacks": 0}
    m = meter()
    b = len(system)
    if b == 0:
        return Verdict(True, stats=stats)
    ell, top = _levels(n, b, fast)
    if min_level is not None:
        ell = max(0, min(ell, min_level))
    try:
        short = [e for e in system if e[2] < 3 << ell]
        _check_all(t, short, stats)
        base = [e for e in system if e[2] >= 3 << ell]
        del short
        if not base:
            return Verdict(True, stats=stats)
        if ell > top:
            _check_all(t, base, stats)
            return Verdict(True, stats=stats)

        def chain() -> Iterator[Tuple[int, List[Eq]]]:
            rest: List[Eq] = base
            for k in range(ell, top + 1):
                dc_mode = fast and len(rest) * math.sqrt(2 << k) > n
                part, rest = decompose(rest, k, dc_mode, n)
                yield k, part
            if rest:
                raise AssertionError("equations longer than the text")

        cached: Dict[int, List[Eq]] = {}
        if cache:
            cached = dict(chain())

        def level(k: int) -> List[Eq]:
            if cache:
                return cached[k]
            for kk, part in chain():
                if kk == k:
                    return part
            raise AssertionError(k)

        F: List[Eq] = []
        naive: List[Eq] = []
        for k in range(top - 1, ell - 1, -1):
            X = level(k + 1) + F
            words = 3 * len(X)
            m.alloc("verify_level", words)
            reduced = _reduce_level(X, k + 1, n, fast, naive)
            m.free("verify_level", words)
            stats["levels"] += 1
            if reduced is None:
                stats["fallbacks"] += 1
                _check_all(t, X, stats)
                F = []
            else:
                F = reduced
            if naive:
                _check_all(t, naive, stats)
                naive = []
        _check_all(t, level(ell) + F, stats)
    except _Reject as r:
        return Verdict(False, Equation.of(*r.e), r.offset, r.reason, stats)
    return Verdict(True, stats=stats)


# ---------------------------------------------------------------------------
# sparse suffix trees

def equations_from_sst(t: Text, positions: Sequence[int], lcps: Sequence[int]):
    """One equation per adjacent pair (possibly empty) plus the order checks.

    Returns ``(equations, None)`` or ``(None, Verdict)`` on a failed side check.
    """
    n = t.n
    if len(lcps) != max(0, len(positions) - 1):
        return None, Verdict(False, reason="lcp count does not match positions")
    out: List[Equation] = []
    for i, j, ell in zip(positions, positions[1:], lcps):
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            return None, Verdict(False, reason=f"bad pair ({i}, {j})")
        if ell < 0 or ell > min(n - i + 1, n - j + 1):
            return None, Verdict(False, Equation.of(i, j, max(0, ell)), max(0, ell),
                                 "lcp exceeds a suffix")
        if i + ell != n + 1:
            if j + ell == n + 1 or t.buf[i + ell - 1] >= t.buf[j + ell - 1]:
                return None, Verdict(False, Equation.of(i, j, ell), ell, "order or maximality")
        out.append(Equation.of(i, j, ell))
    return out, None


def confirm_rejection(t: Text, verdict: Verdict) -> bool:
    """Re-check a rejection witness by direct comparison."""
    if verdict.accepted or verdict.witness is None:
        return False
    w, n = verdict.witness, t.n
    if verdict.reason == "equation":
        return not naive_check(t, w) and first_mismatch(t, w) == verdict.offset
    i, j, ell = w.p, w.pp, verdict.offset
    if verdict.reason == "lcp exceeds a suffix":
        return ell < 0 or ell > min(n - i + 1, n - j + 1)
    if verdict.reason == "order or maximality":
        if i + ell == n + 1:
            return False
        return j + ell == n + 1 or t.buf[i + ell - 1] >= t.buf[j + ell - 1]
    return False


def verify_sst(t: Text, sst, mode: str = "fast", B: Optional[Iterable[int]] = None,
               **kw) -> Verdict:
    """Certify an array view (positions + LCPs); uses no randomness."""
    positions, lcps = sst.positions, sst.lcps
    if B is not None and sorted(positions) != sorted(B):
        return Verdict(False, reason="positions differ from the requested set")
    E, bad = equations_from_sst(t, positions, lcps)
    if bad is not None:
        return bad
    return verify_system(t, E, mode, **kw)


class Bottom:
    """Failure result of the Las Vegas build (falsy)."""

    def __init__(self, attempts: List[dict]):
        self.attempts = attempts

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return f"Bottom(attempts={len(self.attempts)})"


def attempt_seed(seed, attempt: int) -> int:
    if attempt == 0:
        return seed
    return random.Random(f"{seed}/retry/{attempt}").getrandbits(63)


def build_las_vegas(t: Text, B, cfg=None, *, retries: int = 3, verify_mode: str = "fast",
                    collision_prime: Optional[int] = None,
                    collision_attempts: Optional[int] = None):
    """Build, certify, and rebuild with fresh seeds on failure.

    ``collision_prime`` forces a small modulus on the first
    ``collision_attempts`` attempts (all if ``None``) to exercise failures.
    """
    from dataclasses import replace

    from .builder import BuildConfig, build_sst

    cfg = cfg or BuildConfig()
    if not isinstance(B, PositionSet):
        B = PositionSet(B, t.n)
    log: List[dict] = []
    for attempt in range(retries + 1):
        prime = cfg.prime
        if collision_prime is not None and (collision_attempts is None or attempt < collision_attempts):
            prime = collision_prime
        run = replace(cfg, seed=attempt_seed(cfg.seed, attempt), prime=prime)
        try:
            sst = build_sst(t, B, run)
        except (CollisionDetected, ValueError) as exc:
            log.append({"attempt": attempt, "seed": run.seed, "prime": prime, "error": str(exc)})
            continue
        verdict = verify_sst(t, sst, verify_mode, B=B.positions)
        log.append({"attempt": attempt, "seed": run.seed, "prime": sst.meta["prime"],
                    "verdict": verdict.line() if verdict.witness else
                    ("accept" if verdict else f"reject {verdict.reason}")})
        if verdict:
            sst.meta.update(mode="lv", attempts=attempt + 1, seed=run.seed)
            return sst
    return Bottom(log)
