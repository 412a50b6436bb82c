"""Read-only text, position sets and brute-force oracles.

Positions are 1-based throughout the package: ``T[1..n]``.
"""
from __future__ import annotations

import mmap
import os
from array import array
from typing import Iterable, List, Tuple

import numpy as np

LESS = -1
EQUAL = 0
GREATER = 1


class Text:
    """Immutable text over an integer alphabet.

    Byte texts (``sigma == 256``) keep the raw buffer; wide texts store
    machine-word symbols in an ``array('q')``.  ``buf`` supports fast
    scalar indexing, ``view`` zero-copy slicing and ``np`` vector access;
    all three share one buffer.
    """

    __slots__ = ("buf", "view", "np", "n", "sigma", "wide", "_mm")

    def __init__(self, data, sigma: int | None = None):
        self._mm = None
        if isinstance(data, str):
            data = data.encode("latin-1")
        if isinstance(data, (bytes, bytearray, mmap.mmap)):
            if isinstance(data, bytearray):
                data = bytes(data)
            self.buf = data
            self.wide = False
            self.sigma = 256 if sigma is None else sigma
            self.np = np.frombuffer(data, dtype=np.uint8)
        else:
            values = array("q", data)
            if values and min(values) < 0:
                raise ValueError("symbols must be non-negative")
            self.buf = values
            self.wide = True
            self.sigma = (max(values) + 1 if values else 1) if sigma is None else sigma
            self.np = np.frombuffer(values, dtype=np.int64) if values else np.zeros(0, np.int64)
        self.view = memoryview(self.buf)
        self.n = len(self.buf)
        if self.n < 1:
            raise ValueError("text must be non-empty")
        if self.wide and max(self.buf) >= self.sigma:
            raise ValueError("symbol outside alphabet")

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "Text":
        with open(path, "rb") as fh:
            size = os.fstat(fh.fileno()).st_size
            if size == 0:
                raise ValueError(f"{path}: empty text")
            mm = mmap.mmap(fh.fileno(), 0, access=mmap.ACCESS_READ)
        text = cls(mm)
        text._mm = mm
        return text

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} outside [1, {self.n}]")
        return self.buf[i - 1]

    def fragment(self, i: int, j: int):
        """Zero-copy view of ``T[i..j]`` (empty when ``j < i``)."""
        return self.view[i - 1:j]

    def check(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} outside [1, {self.n}]")

    def __repr__(self) -> str:
        head = bytes(self.buf[:16]) if not self.wide else list(self.buf[:8])
        return f"Text(n={self.n}, sigma={self.sigma}, head={head!r})"


class PositionSet:
    """Sorted set of distinct suffix starting positions."""

    __slots__ = ("positions", "b")

    def __init__(self, positions: Iterable[int], n: int):
        pos = sorted(positions)
        if not pos:
            raise ValueError("position set must be non-empty")
        for a, c in zip(pos, pos[1:]):
            if a == c:
                raise ValueError(f"duplicate position {a}")
        if pos[0] < 1 or pos[-1] > n:
            raise ValueError(f"positions must lie in [1, {n}]")
        self.positions: Tuple[int, ...] = tuple(pos)
        self.b = len(pos)

    def __iter__(self):
        return iter(self.positions)

    def __len__(self) -> int:
        return self.b

    @classmethod
    def from_file(cls, path: str | os.PathLike, n: int) -> "PositionSet":
        with open(path, encoding="utf-8") as fh:
            values = [int(line) for line in fh if line.strip()]
        return cls(values, n)

    @classmethod
    def stride(cls, k: int, n: int) -> "PositionSet":
        if k < 1:
            raise ValueError("stride must be positive")
        return cls(range(1, n + 1, k), n)


def naive_lce(t: Text, i: int, j: int) -> int:
    """Longest common prefix of ``T[i..]`` and ``T[j..]`` by character scan."""
    t.check(i)
    t.check(j)
    return _scan_lce(t.buf, t.n, i, j)


def _scan_lce(buf, n: int, i: int, j: int) -> int:
    if i == j:
        return n - i + 1
    a, c = i - 1, j - 1
    limit = n - max(a, c)
    k = 0
    while k < limit and buf[a + k] == buf[c + k]:
        k += 1
    return k


def suffix_compare(t: Text, i: int, j: int) -> int:
    """Order of ``T[i..]`` vs ``T[j..]``: LESS, EQUAL (same position) or GREATER.

    A suffix that is a proper prefix of the other is the smaller one.
    """
    ell = naive_lce(t, i, j)
    if i == j:
        return EQUAL
    if i + ell > t.n:
        return LESS
    if j + ell > t.n:
        return GREATER
    return LESS if t.buf[i + ell - 1] < t.buf[j + ell - 1] else GREATER


def brute_sparse_sort(t: Text, positions: Iterable[int]) -> Tuple[List[int], List[int]]:
    """Sort the suffixes starting at ``positions``; return order and adjacent LCPs."""
    pos = list(positions)
    for p in pos:
        t.check(p)
    if t.wide:
        order = sorted(pos, key=lambda p: t.buf[p - 1:])
    else:
        # bytes comparison is lexicographic with the proper-prefix rule built in
        view = t.view
        order = sorted(pos, key=lambda p: view[p - 1:].tobytes())
    lcps = [naive_lce(t, a, c) for a, c in zip(order, order[1:])]
    return order, lcps


def naive_equal(t: Text, i: int, j: int, length: int) -> bool:
    if length <= 0:
        return True
    return t.view[i - 1:i - 1 + length] == t.view[j - 1:j - 1 + length]


def random_text(rng: np.random.Generator, n: int, sigma: int) -> Text:
    if sigma <= 256:
        return Text(rng.integers(0, sigma, n, dtype=np.uint8).tobytes())
    return Text(rng.integers(0, sigma, n).tolist(), sigma=sigma)


def fibonacci_word(n: int, a: int = ord("a"), c: int = ord("b")) -> Text:
    s, prev = bytes([a]), bytes([c])
    while len(s) < n:
        s, prev = s + prev, s
    return Text(s[:n])


def periodic_text(rng: np.random.Generator, n: int, sigma: int, period: int) -> Text:
    seed = rng.integers(0, sigma, period, dtype=np.uint8)
    reps = -(-n // period)
    return Text(np.tile(seed, reps)[:n].tobytes())


def family_text(rng: np.random.Generator, family: str, n: int, sigma: int) -> Text:
    """Text generators used by the randomized suites."""
    if family == "uniform":
        return random_text(rng, n, sigma)
    if family == "periodic":
        return periodic_text(rng, n, sigma, int(rng.integers(1, max(2, min(n, 12)))))
    if family == "fibonacci":
        return fibonacci_word(n)
    if family == "equal":
        return Text(bytes([97]) * n)
    raise ValueError(f"unknown text family {family!r}")


def sample_positions(rng: np.random.Generator, n: int, b: int) -> List[int]:
    return sorted(int(p) + 1 for p in rng.choice(n, size=b, replace=False))
