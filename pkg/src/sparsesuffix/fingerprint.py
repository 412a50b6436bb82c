"""Augmented Karp-Rabin fingerprints and the rolling aligned-suffix component.

A fingerprint of ``w`` is ``(value, x^|w|, x^-|w|, |w|)`` with
``value = sum(w[i] * x^(i-1)) mod p``.  Two of the three fingerprints of
``u``, ``v`` and ``uv`` determine the third in constant time.
"""
from __future__ import annotations

import math
import random
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .instrument import meter
from .text import Text

M61 = (1 << 61) - 1
M127 = (1 << 127) - 1

_MASK30 = np.uint64((1 << 30) - 1)
_MASK31 = np.uint64((1 << 31) - 1)
_MASK32 = np.uint64((1 << 32) - 1)
_P61 = np.uint64(M61)
_SH30 = np.uint64(30)
_SH31 = np.uint64(31)
_SH32 = np.uint64(32)
_SH61 = np.uint64(61)
_ONE = np.uint64(1)

# lengths below this are evaluated with plain Python ints
SCALAR_CUTOFF = 48


class Fingerprint(NamedTuple):
    value: int
    pow: int
    ipow: int
    len: int


def _mul61(a, c):
    """Elementwise ``a * c mod 2^61-1`` for uint64 operands below 2^61."""
    a0 = a & _MASK31
    a1 = a >> _SH31
    c0 = c & _MASK31
    c1 = c >> _SH31
    mid = a1 * c0 + a0 * c1
    s = ((a1 * c1) << _ONE) + (mid >> _SH30) + ((mid & _MASK30) << _SH31) + a0 * c0
    s = (s & _P61) + (s >> _SH61)
    return _reduce61(s)


def _reduce61(s):
    # s < 2^62: one conditional subtraction, no wraparound
    return s - _P61 * (s >= _P61)


def _sum61(m, axis=None):
    """Sum modulo 2^61-1 of uint64 entries below 2^61 (at most 2^31 terms)."""
    lo = (m & _MASK32).sum(axis=axis, dtype=np.uint64)
    hi = (m >> _SH32).sum(axis=axis, dtype=np.uint64)
    lo = (lo & _P61) + (lo >> _SH61)
    hi = (hi & _P61) + (hi >> _SH61)
    r = _mul61(hi, np.uint64(1 << 32)) + lo
    r = (r & _P61) + (r >> _SH61)
    return _reduce61(r)


class FpContext:
    """Prime modulus ``p``, random base ``x`` and its inverse.

    Vector arithmetic runs on uint64 arrays for ``p = 2^61-1`` and on
    object arrays of Python ints for any other modulus.
    """

    def __init__(self, p: int, x: int, c: int, n: int, seed):
        if not 1 <= x < p:
            raise ValueError("base must lie in [1, p-1]")
        self.p = p
        self.x = x
        self.xinv = pow(x, p - 2, p)
        self.c = c
        self.n = n
        self.seed = seed
        self.fast = p == M61
        self.dtype = np.uint64 if self.fast else object
        self._powers = None

    def __repr__(self) -> str:
        return f"FpContext(p={self.p}, x={self.x}, c={self.c}, n={self.n}, seed={self.seed!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FpContext) and (self.p, self.x, self.c, self.n) == (
            other.p, other.x, other.c, other.n)

    # vector helpers -------------------------------------------------
    def asvec(self, values) -> np.ndarray:
        if self.fast:
            return np.asarray(values, dtype=np.uint64)
        out = np.empty(len(values), dtype=object)
        out[:] = [int(v) for v in values]
        return out

    def vmul(self, a, c):
        if self.fast:
            return _mul61(a, np.uint64(c) if isinstance(c, int) else c)
        return (a * c) % self.p

    def vadd(self, a, c):
        if self.fast:
            return _reduce61(a + (np.uint64(c) if isinstance(c, int) else c))
        return (a + c) % self.p

    def vsub(self, a, c):
        if self.fast:
            c = np.uint64(c) if isinstance(c, int) else c
            return _reduce61(a + (_P61 - c))
        return (a - c) % self.p

    def vsum(self, m, axis=None):
        if self.fast:
            return _sum61(m, axis)
        return m.sum(axis=axis) % self.p

    def symbols(self, chunk) -> np.ndarray:
        """Text symbols as field elements."""
        if self.fast:
            return chunk.astype(np.uint64)
        out = np.empty(len(chunk), dtype=object)
        out[:] = [int(v) % self.p for v in chunk]
        return out

    def powers(self, w: int) -> np.ndarray:
        """``x^0 .. x^(w-1)`` as a vector (cached, grows on demand)."""
        if self._powers is None or len(self._powers) < w:
            old = 0 if self._powers is None else len(self._powers)
            meter().alloc("powers", w - old)
            out = [1] * w
            acc = 1
            for k in range(1, w):
                acc = acc * self.x % self.p
                out[k] = acc
            self._powers = self.asvec(out)
        return self._powers[:w]


def new_context(t: Text, c: int = 1, seed=0, *, prime: Optional[int] = None,
                wide: bool = False) -> FpContext:
    """Seeded fingerprint context with ``p >= max(sigma, n^(3+c))``.

    The modulus is ``2^61-1`` when that satisfies the bound (single-word
    vector arithmetic) and ``2^127-1`` otherwise or when ``wide`` is set.
    ``prime`` bypasses the bound (test hook for forced collisions).
    """
    n = t.n
    if c < 0:
        raise ValueError("security exponent must be non-negative")
    if prime is not None:
        p = prime
        if p <= 1:
            raise ValueError("modulus must be prime")
    else:
        need = max(n ** (3 + c), t.sigma)
        for p in ((M127,) if wide else (M61, M127)):
            if need <= p:
                break
        else:
            raise ValueError(
                f"n^(3+c) = {n}^{3 + c} exceeds the largest supported modulus 2^127-1")
    rng = random.Random(f"{seed}/fingerprint")
    x = rng.randrange(1, p)
    return FpContext(p, x, c, n, seed)


def fp_empty() -> Fingerprint:
    return Fingerprint(0, 1, 1, 0)


def fp_of(ctx: FpContext, w: Sequence[int]) -> Fingerprint:
    """Evaluate the defining formula directly."""
    p, x = ctx.p, ctx.x
    value = 0
    for ch in reversed(w):
        value = (value * x + ch) % p
    k = len(w)
    return Fingerprint(value, pow(x, k, p), pow(ctx.xinv, k, p), k)


def fp_solve(ctx: FpContext, u: Optional[Fingerprint] = None,
             v: Optional[Fingerprint] = None,
             w: Optional[Fingerprint] = None) -> Fingerprint:
    """Given two of ``phi(u)``, ``phi(v)``, ``phi(uv)``, return the missing one."""
    p = ctx.p
    if sum(f is None for f in (u, v, w)) != 1:
        raise ValueError("exactly one fingerprint must be missing")
    if w is None:
        return Fingerprint((u.value + u.pow * v.value) % p, u.pow * v.pow % p,
                           u.ipow * v.ipow % p, u.len + v.len)
    if v is None:
        if u.len > w.len:
            raise ValueError("prefix longer than the whole")
        return Fingerprint((w.value - u.value) * u.ipow % p, w.pow * u.ipow % p,
                           w.ipow * u.pow % p, w.len - u.len)
    if v.len > w.len:
        raise ValueError("suffix longer than the whole")
    upow = w.pow * v.ipow % p
    return Fingerprint((w.value - upow * v.value) % p, upow, w.ipow * v.pow % p,
                       w.len - v.len)


def horner(ctx: FpContext, t: Text, lo: int, hi: int, scratch: int = 4096) -> int:
    """Fingerprint value of ``T[lo..hi]`` by direct evaluation, O(hi - lo) time.

    Long fragments are processed in vector chunks of ``scratch`` symbols.
    """
    length = hi - lo + 1
    if length <= 0:
        return 0
    p, x = ctx.p, ctx.x
    if length <= SCALAR_CUTOFF:
        buf = t.buf
        value = 0
        for k in range(hi - 1, lo - 2, -1):
            value = (value * x + buf[k]) % p
        return value
    w = max(SCALAR_CUTOFF, scratch)
    pw = ctx.powers(w)
    step = pow(x, w, p)
    value = 0
    # right to left so that each chunk shifts the accumulated value
    end = hi
    while end >= lo:
        start = max(lo, end - w + 1)
        seg = ctx.symbols(t.np[start - 1:end])
        part = int(ctx.vsum(ctx.vmul(seg, pw[:end - start + 1])))
        shift = step if end - start + 1 == w else pow(x, end - start + 1, p)
        value = (part + shift * value) % p
        end = start - 1
    return value


def block_values(ctx: FpContext, t: Text, starts: np.ndarray, g: int, scratch: int) -> np.ndarray:
    """Values of the length-``g`` blocks starting at ``starts`` (clipped at ``n``).

    ``starts`` is an increasing arithmetic progression with stride ``g``.
    At most ``scratch`` symbols are materialized at a time.
    """
    n = t.n
    out = []
    if g <= scratch:
        per = max(1, scratch // g)
        pw = ctx.powers(g)
        for k in range(0, len(starts), per):
            chunk = starts[k:k + per]
            s0 = int(chunk[0])
            full = [int(s) for s in chunk if int(s) + g - 1 <= n]
            vals = []
            if full:
                m = len(full)
                seg = ctx.symbols(t.np[s0 - 1:s0 - 1 + m * g]).reshape(m, g)
                vals = list(ctx.vsum(ctx.vmul(seg, pw), axis=1))
            for s in chunk[len(full):]:
                vals.append(horner(ctx, t, int(s), n, scratch))
            out.extend(int(v) for v in vals)
    else:
        for s in starts:
            s = int(s)
            out.append(horner(ctx, t, s, min(n, s + g - 1), scratch))
    return ctx.asvec(out)


class PhiComponent:
    """Fingerprints of all ``r``-aligned suffixes plus the whole text.

    Entry ``k`` describes the suffix starting at ``r + k*g``; the stored
    vectors are ``value``, ``pow = x^len`` and ``ipow = x^-len``.
    """

    __slots__ = ("r", "g", "n", "value", "pow", "ipow", "whole")

    def __init__(self, r, g, n, value, pw, ipw, whole):
        self.r, self.g, self.n = r, g, n
        self.value, self.pow, self.ipow = value, pw, ipw
        self.whole = whole

    def __len__(self) -> int:
        return len(self.value)

    def words(self) -> int:
        return 3 * len(self.value) + 4

    def position(self, k: int) -> int:
        return self.r + k * self.g

    def aligned(self, i: int) -> bool:
        return i >= self.r and (i - self.r) % self.g == 0

    def suffix(self, i: int) -> Fingerprint:
        """Stored fingerprint of ``T[i..]`` for aligned ``i`` (or ``i = n+1``)."""
        if i == self.n + 1:
            return Fingerprint(0, 1, 1, 0)
        if not self.aligned(i) or i > self.n:
            raise ValueError(f"position {i} is not {self.r}-aligned")
        k = (i - self.r) // self.g
        return Fingerprint(int(self.value[k]), int(self.pow[k]), int(self.ipow[k]), self.n - i + 1)

    def suffix_value(self, i: int) -> int:
        if i == self.n + 1:
            return 0
        return int(self.value[(i - self.r) // self.g])


def phi_build(ctx: FpContext, t: Text, g: int, scratch: int = 4096) -> PhiComponent:
    """Component for ``r = 1`` by one right-to-left pass over the text."""
    n = t.n
    if not 1 <= g <= n:
        raise ValueError("block length must lie in [1, n]")
    p, x, xinv = ctx.p, ctx.x, ctx.xinv
    starts = np.arange(1, n + 1, g, dtype=np.int64)
    blocks = block_values(ctx, t, starts, g, scratch)
    count = len(starts)
    values = [0] * count
    pows = [0] * count
    ipows = [0] * count
    last = n - int(starts[-1]) + 1
    acc = int(blocks[-1])
    accpow, accipow = pow(x, last, p), pow(xinv, last, p)
    values[-1], pows[-1], ipows[-1] = acc, accpow, accipow
    xg, xginv = pow(x, g, p), pow(xinv, g, p)
    for k in range(count - 2, -1, -1):
        acc = (int(blocks[k]) + xg * acc) % p
        accpow = accpow * xg % p
        accipow = accipow * xginv % p
        values[k], pows[k], ipows[k] = acc, accpow, accipow
    whole = Fingerprint(values[0], pows[0], ipows[0], n)
    return PhiComponent(1, g, n, ctx.asvec(values), ctx.asvec(pows), ctx.asvec(ipows), whole)


def phi_advance(ctx: FpContext, t: Text, phi: PhiComponent) -> PhiComponent:
    """Strip the leading symbol of every stored suffix: ``Phi_r -> Phi_(r+1)``."""
    if phi.r >= phi.g:
        raise ValueError("no further rounds: r = g")
    n, g = phi.n, phi.g
    r = phi.r
    count = -(-(n - r) // g)
    idx = np.arange(r - 1, r - 1 + count * g, g, dtype=np.int64)
    heads = ctx.symbols(t.np[idx])
    value = ctx.vmul(ctx.vsub(phi.value[:count], heads), ctx.xinv)
    pw = ctx.vmul(phi.pow[:count], ctx.xinv)
    ipw = ctx.vmul(phi.ipow[:count], ctx.x)
    return PhiComponent(r + 1, g, n, value, pw, ipw, phi.whole)


def phi_fragment(ctx: FpContext, phi: PhiComponent, i: int, j: int) -> Fingerprint:
    """Fingerprint of the aligned fragment ``T[i..j]`` from two stored suffixes."""
    if j == i - 1:
        return Fingerprint(0, 1, 1, 0)
    if j < i - 1 or not phi.aligned(i) or not (j == phi.n or phi.aligned(j + 1)):
        raise ValueError(f"T[{i}..{j}] is not a {phi.r}-aligned fragment")
    return fp_solve(ctx, v=phi.suffix(j + 1), w=phi.suffix(i))


def fragment_value(ctx: FpContext, phi: PhiComponent, i: int, j: int) -> int:
    """Value part of ``phi_fragment`` without building tuples (hot path)."""
    p = ctx.p
    k = (i - phi.r) // phi.g
    wv = int(phi.value[k])
    if j >= phi.n:
        return wv
    kk = (j + 1 - phi.r) // phi.g
    upow = int(phi.pow[k]) * int(phi.ipow[kk]) % p
    return (wv - upow * int(phi.value[kk])) % p


def security_bound_ok(n: int, c: int, p: int) -> bool:
    return n ** (3 + c) <= p


def max_text_length(c: int, p: int = M61) -> int:
    """Largest ``n`` with ``n^(3+c) <= p``."""
    lo = int(math.floor(p ** (1.0 / (3 + c))))
    while (lo + 1) ** (3 + c) <= p:
        lo += 1
    while lo ** (3 + c) > p:
        lo -= 1
    return lo
