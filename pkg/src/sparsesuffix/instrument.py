"""Self-reported working-space accounting in machine words.

Structures report what they hold via :func:`meter`; nothing is measured
from the allocator.  The text itself is never reported.  Words under a
``SEPARATE`` tag are tracked on their own and kept out of the main peak.
"""
from __future__ import annotations

import contextvars
from collections import Counter
from contextlib import contextmanager
from typing import Dict, Iterator

SEPARATE = frozenset({"lcp_index"})


class SpaceMeter:
    def __init__(self) -> None:
        self.current = 0
        self.peak = 0
        self.separate_current = 0
        self.separate_peak = 0
        self.live: Counter = Counter()
        self.peak_by_tag: Dict[str, int] = {}
        self.counters: Counter = Counter()

    def alloc(self, tag: str, words: int) -> None:
        self.live[tag] += words
        if self.live[tag] > self.peak_by_tag.get(tag, 0):
            self.peak_by_tag[tag] = self.live[tag]
        if tag in SEPARATE:
            self.separate_current += words
            self.separate_peak = max(self.separate_peak, self.separate_current)
        else:
            self.current += words
            if self.current > self.peak:
                self.peak = self.current

    def free(self, tag: str, words: int) -> None:
        self.live[tag] -= words
        if tag in SEPARATE:
            self.separate_current -= words
        else:
            self.current -= words

    @contextmanager
    def hold(self, tag: str, words: int) -> Iterator[None]:
        self.alloc(tag, words)
        try:
            yield
        finally:
            self.free(tag, words)

    def count(self, name: str, k: int = 1) -> None:
        self.counters[name] += k

    def summary(self) -> dict:
        return {
            "peak_aux_words": self.peak,
            "separate_peak_words": self.separate_peak,
            "peak_by_tag": dict(self.peak_by_tag),
            "counters": dict(self.counters),
        }


class _NullMeter(SpaceMeter):
    def alloc(self, tag: str, words: int) -> None:
        pass

    def free(self, tag: str, words: int) -> None:
        pass

    @contextmanager
    def hold(self, tag: str, words: int) -> Iterator[None]:
        yield

    def count(self, name: str, k: int = 1) -> None:
        pass


NULL = _NullMeter()
_active: contextvars.ContextVar = contextvars.ContextVar("space_meter", default=NULL)


def meter() -> SpaceMeter:
    return _active.get()


@contextmanager
def metering() -> Iterator[SpaceMeter]:
    m = SpaceMeter()
    token = _active.set(m)
    try:
        yield m
    finally:
        _active.reset(token)


# numpy temporaries alive at once while one scratch chunk is processed
SCRATCH_LIVE = 8


def scratch_words(b: int) -> int:
    """Length of the vector chunk used for block-wise text processing."""
    return max(b, 64)
