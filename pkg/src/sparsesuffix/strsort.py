"""Bounded-space sorting of short strings given by random access.

A batch is a list of ``(ref, length, tag)`` triples: ``ref[:length]`` is
the string and ``tag`` is what the sort returns.  Shorter strings precede
their extensions.
"""
from __future__ import annotations

from typing import Callable, Hashable, List, Sequence, Tuple

import numpy as np

Batch = Sequence[Tuple[Sequence[int], int, Hashable]]


def _common(a, b, start: int, limit: int) -> int:
    """LCP of ``a`` and ``b`` restricted to ``[start, limit)`` (C-speed slice compares)."""
    if start >= limit or a[start:limit] == b[start:limit]:
        return limit
    lo, hi = start, limit - 1  # the answer lies in [lo, hi]
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if a[start:mid] == b[start:mid]:
            lo = mid
        else:
            hi = mid - 1
    return lo


def sort_quadratic(batch: Batch) -> List[Hashable]:
    """Stable insertion sort in ``O(b (b + l))`` time and ``O(b)`` extra words.

    Each new string narrows the class of already-sorted strings that agree
    with it on a growing prefix.  The class is a contiguous range, so it is
    two boundary indices; strings leave it from either end.  When the whole
    class shares a longer prefix than the current depth the scan jumps ahead.
    """
    strings = [ref[:length] for ref, length, _ in batch]
    order: List[int] = []
    for idx, s in enumerate(strings):
        ls = len(s)
        lo, hi = 0, len(order)
        k = 0
        while lo < hi:
            first, last = strings[order[lo]], strings[order[hi - 1]]
            shared = _common(first, last, k, min(len(first), len(last)))
            jump = _common(s, first, k, min(ls, shared))
            if jump < shared:
                # every string in the class carries first[jump] at depth jump
                if jump == ls or s[jump] < first[jump]:
                    hi = lo
                else:
                    lo = hi
                break
            k = shared
            c = s[k] if k < ls else -1
            while lo < hi:
                u = strings[order[lo]]
                if (u[k] if k < len(u) else -1) < c:
                    lo += 1
                else:
                    break
            while lo < hi:
                u = strings[order[hi - 1]]
                if (u[k] if k < len(u) else -1) > c:
                    hi -= 1
                else:
                    break
            if k >= ls:
                # survivors equal s; insert after them
                lo = hi
                break
            k += 1
        order.insert(lo, idx)
    return [batch[i][2] for i in order]


def radix_argsort(column: Callable[[int], np.ndarray], count: int, width: int,
                  sigma: int, space: int) -> np.ndarray:
    """Stable LSD order of ``count`` strings of at most ``width`` symbols.

    ``column(k)`` returns symbol ``k`` of every string shifted up by one, with
    0 for strings shorter than ``k + 1``.  Symbols are cut into chunks of
    ``floor(log2 space)`` bits and each chunk is one counting-sort pass.
    """
    if space < 2:
        raise ValueError("space budget must be at least 2")
    bits = space.bit_length() - 1
    chunks = -(-sigma.bit_length() // bits)
    mask = (1 << bits) - 1
    dtype = np.uint16 if bits <= 16 else np.uint32
    order = np.arange(count, dtype=np.int64)
    for k in range(width - 1, -1, -1):
        col = column(k)
        for c in range(chunks):
            vals = col[order]
            if vals.dtype == object:
                digits = np.array([(int(v) >> (c * bits)) & mask for v in vals], dtype=dtype)
            else:
                digits = ((vals >> np.uint64(c * bits)) & np.uint64(mask)).astype(dtype)
            # numpy's stable sort on 16-bit keys is a counting/radix pass
            order = order[np.argsort(digits, kind="stable")]
    return order


def sort_radix(batch: Batch, sigma: int, space: int) -> List[Hashable]:
    """Stable radix sort with ``O(b + space)`` working words."""
    if space < 2:
        raise ValueError("space budget must be at least 2")
    strings = [ref[:length] for ref, length, _ in batch]
    if not strings:
        return []
    width = max(len(s) for s in strings)
    big = sigma + 1 >= 1 << 63

    def column(k: int) -> np.ndarray:
        vals = [int(s[k]) + 1 if k < len(s) else 0 for s in strings]
        if big:
            out = np.empty(len(vals), dtype=object)
            out[:] = vals
            return out
        return np.asarray(vals, dtype=np.uint64)

    order = radix_argsort(column, len(strings), width, sigma + 1, space)
    return [batch[int(i)][2] for i in order]


def rank_values(keys: Sequence[np.ndarray], sigmas: Sequence[int], space: int) -> Tuple[np.ndarray, int]:
    """Dense ranks ``1..d`` of the tuples ``(keys[0][j], keys[1][j], ...)``.

    Used to map supercharacter fingerprints onto a small integer alphabet.
    The radix order is by the first key, ties broken by later keys.
    """
    m = len(keys[0])
    if m == 0:
        return np.zeros(0, dtype=np.int64), 0
    order = np.arange(m, dtype=np.int64)
    for key, sig in zip(reversed(keys), reversed(sigmas)):
        part = radix_argsort(lambda _k, key=key, order=order: key[order], m, 1, sig, space)
        order = order[part]
    diff = np.zeros(m, dtype=bool)
    diff[0] = True
    for key in keys:
        s = key[order]
        diff[1:] |= s[1:] != s[:-1]
    dense = np.cumsum(diff)
    ranks = np.empty(m, dtype=np.int64)
    ranks[order] = dense
    return ranks, int(dense[-1])
