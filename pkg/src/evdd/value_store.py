"""Concurrent deduplicating store for complex edge weights.

Two weights are considered the same value when both their real and
imaginary parts differ by less than a tolerance ``delta``.  Storage is a
fixed-capacity open-addressing hash table: the bucket index is computed
from the value rounded to the nearest multiple of ``delta`` (half away
from zero), but the slot keeps the first unrounded value written to it.
Lookups probe linearly with wrap-around and compare component-wise
against ``delta``; insertion claims an empty slot with a single-winner
check-and-set, so concurrent writers of close values converge on one
representative.

Slots are write-once.  Indices returned by ``find_or_put`` stay valid
for the lifetime of the table; there is no deletion or resizing.

A known property of this scheme: two values within ``delta`` of each
other that round to different multiples hash to different buckets and
are kept as distinct entries.  Merging is a compression heuristic, not
a correctness requirement, so neighbour buckets are not probed.
"""

from __future__ import annotations

import math
import threading

from .errors import InvalidIndexError, NonFiniteValueError, TableFullError

DEFAULT_TOLERANCE = 1e-14
DEFAULT_LOG2_SIZE = 23

ZERO_INDEX = 0
ONE_INDEX = 1

_MASK64 = (1 << 64) - 1


def _mix64(x: int) -> int:
    """splitmix64 finalizer; spreads consecutive grid multiples."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def round_to_grid(x: float, delta: float) -> int:
    """Nearest integer multiple of delta, rounding half away from zero."""
    q = x / delta
    return math.floor(q + 0.5) if q >= 0.0 else math.ceil(q - 0.5)


def values_close(a: complex, b: complex, delta: float = DEFAULT_TOLERANCE) -> bool:
    """True when both components of a and b differ by less than delta."""
    return abs(a.real - b.real) < delta and abs(a.imag - b.imag) < delta


class ValueStore:
    """Fixed-capacity find-or-put table of complex values.

    ``find_or_put`` and ``get`` are safe to call from any number of
    threads.  Reads never take the claim lock: slots are write-once, so
    a published value is immutable.
    """

    def __init__(self, log2_size: int = DEFAULT_LOG2_SIZE,
                 tolerance: float = DEFAULT_TOLERANCE):
        if log2_size < 2:
            raise ValueError("value table needs at least 4 slots")
        if tolerance < 0.0:
            raise ValueError("tolerance must be non-negative")
        self.capacity = 1 << log2_size
        self.delta = tolerance
        self._mask = self.capacity - 1
        self._slots: list[complex | None] = [None] * self.capacity
        self._claim_lock = threading.Lock()
        self._count = 0
        # Reserved identities: exact zero and exact one occupy fixed
        # indices so zero edges and unit weights compare by index.
        self._slots[ZERO_INDEX] = 0j
        self._slots[ONE_INDEX] = 1 + 0j
        self._count = 2

    def __len__(self) -> int:
        return self._count

    def _bucket(self, re: float, im: float) -> int:
        d = self.delta
        if d == 0.0:
            # Degenerate grid: every value is its own representative.
            return _mix64(hash((re, im)) & _MASK64) & self._mask
        h = _mix64((round_to_grid(re, d) & _MASK64) * 0x100000001B3
                   ^ (round_to_grid(im, d) & _MASK64))
        return h & self._mask

    def find_or_put(self, c: complex) -> int:
        """Index of a stored value component-wise within delta of c.

        Stores c itself (unrounded, but with components inside delta of
        zero snapped to exact zero) when no close value exists yet.
        Raises TableFullError when probing wraps around the whole table.
        """
        re = c.real
        im = c.imag
        if not (math.isfinite(re) and math.isfinite(im)):
            raise NonFiniteValueError(f"non-finite value {c!r} rejected")
        d = self.delta
        # Snap near-zero components so zero edges stay exactly zero and
        # near-identity weights land on the reserved slots.
        if abs(re) < d:
            re = 0.0
        if abs(im) < d:
            im = 0.0
        if im == 0.0:
            if re == 0.0:
                return ZERO_INDEX
            if abs(re - 1.0) < d:
                return ONE_INDEX
        v = complex(re, im)
        slots = self._slots
        mask = self._mask
        idx = self._bucket(re, im)
        for _ in range(self.capacity):
            cur = slots[idx]
            if cur is None:
                with self._claim_lock:
                    cur = slots[idx]
                    if cur is None:
                        slots[idx] = v
                        self._count += 1
                        return idx
                # Lost the race; fall through and compare the winner.
            if (cur.real == re and cur.imag == im) or \
                    (abs(re - cur.real) < d and abs(im - cur.imag) < d):
                # Exact duplicates merge even at delta = 0, where the
                # strict inequality alone would re-store them.
                return idx
            idx = (idx + 1) & mask
        raise TableFullError("value", self.capacity)

    def get(self, index: int) -> complex:
        """The exact value first stored at index."""
        if 0 <= index < self.capacity:
            v = self._slots[index]
            if v is not None:
                return v
        raise InvalidIndexError(f"value index {index} was never written")

    def close(self, a: complex, b: complex) -> bool:
        return values_close(a, b, self.delta)
