"""Table-free difference covers of ``{1, ..., n}``.

With ``r = ceil(sqrt(t))`` and period ``r^2`` the residues
``{0, ..., r-1} U {r, 2r, ..., (r-1)r}`` cover every difference modulo
``r^2``.  Membership, the shift ``h(i, j)`` and the indexing bijection are
closed-form, so only ``(r, n)`` is stored.
"""
from __future__ import annotations

import math
from typing import Iterator, List


class DifferenceCover:
    __slots__ = ("t_requested", "r", "t_eff", "n", "size_p")

    def __init__(self, t_requested: int, r: int, n: int):
        self.t_requested = t_requested
        self.r = r
        self.t_eff = r * r
        self.n = n
        self.size_p = 2 * r - 1

    def __repr__(self) -> str:
        return f"DifferenceCover(t={self.t_requested}, t_eff={self.t_eff}, n={self.n})"

    @property
    def residues(self) -> List[int]:
        r = self.r
        return list(range(r)) + [k * r for k in range(1, r)]

    def covers(self, i: int) -> bool:
        m = i % self.t_eff
        return m < self.r or m % self.r == 0

    __contains__ = covers

    def _residue_rank(self, m: int) -> int:
        return m if m < self.r else self.r - 1 + m // self.r

    def __len__(self) -> int:
        q, m = divmod(self.n, self.t_eff)
        below = m + 1 if m < self.r else self.r + m // self.r
        return q * self.size_p + below - 1

    def members(self) -> Iterator[int]:
        for k in range(1, len(self) + 1):
            yield self.unindex(k)

    def shift(self, i: int, j: int) -> int:
        """Witness ``h < t_eff`` with ``i + h`` and ``j + h`` both covered."""
        if not (1 <= i <= self.n - self.t_eff and 1 <= j <= self.n - self.t_eff):
            raise ValueError(f"positions ({i}, {j}) too close to n = {self.n}")
        return self.shift_unchecked(i, j)

    def shift_unchecked(self, i: int, j: int) -> int:
        r, te = self.r, self.t_eff
        q, s = divmod((j - i) % te, r)
        if s == 0:
            w = 0
        elif q <= r - 2:
            w = r - s
        else:
            w = r
        return (w - i) % te

    def index(self, i: int) -> int:
        """Rank of the member ``i`` among all members (1-based)."""
        if not 1 <= i <= self.n or not self.covers(i):
            raise ValueError(f"{i} is not a member of the cover")
        q, m = divmod(i, self.t_eff)
        return q * self.size_p + self._residue_rank(m)

    def unindex(self, k: int) -> int:
        if not 1 <= k <= len(self):
            raise ValueError(f"rank {k} outside [1, {len(self)}]")
        q, rr = divmod(k, self.size_p)
        m = rr if rr < self.r else (rr - self.r + 1) * self.r
        return q * self.t_eff + m


def build_cover(t: int, n: int) -> DifferenceCover:
    """Cover with period ``t_eff = ceil(sqrt(t))^2 >= t``."""
    if not 1 <= t:
        raise ValueError("period must be positive")
    return DifferenceCover(t, math.isqrt(t - 1) + 1, n)


def cover_within(t: int, n: int) -> DifferenceCover:
    """Cover with period ``t_eff = floor(sqrt(t))^2 <= t`` (shift strictly below ``t``)."""
    if not 1 <= t:
        raise ValueError("period must be positive")
    return DifferenceCover(t, math.isqrt(t), n)


def shift(dc: DifferenceCover, i: int, j: int) -> int:
    return dc.shift(i, j)


def index(dc: DifferenceCover, i: int) -> int:
    return dc.index(i)


def unindex(dc: DifferenceCover, k: int) -> int:
    return dc.unindex(k)
