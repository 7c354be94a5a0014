"""Unique table of decision nodes and the normalizing node constructor.

A node has a variable index and two outgoing edges; an edge is a
``(weight index, target)`` pair where the target is either another
node's slot index or ``TERMINAL``.  Vectors over n qubits use variables
``0 .. n-1``; matrices interleave row and column bits as ``2q`` and
``2q+1`` so recursion descends by quadrant.

Nodes are stored in canonical form: the pair of edge weights is
normalized by a strategy-chosen divisor which is pushed onto the
incoming edge, a node whose two edges are identical is never stored,
and an all-zero pair short-circuits to the canonical zero edge.  With
weights deduplicated by the value store, structurally equal functions
built along any path produce the identical edge.

The table itself is open addressing with linear probing and wrap-around
over a fixed power-of-two capacity.  Slots are write-once and insertion
uses a single-winner claim, so the table can be shared by any number of
worker threads; there is no resizing.  An optional stop-the-world
mark-and-sweep (`collect`) compacts the table between operations when
the caller can enumerate every live root.
"""

from __future__ import annotations

import cmath
import threading
from enum import Enum

from .errors import DegenerateNodeError, OrderViolationError, TableFullError
from .value_store import ONE_INDEX, ZERO_INDEX, ValueStore, _MASK64, _mix64

DEFAULT_LOG2_SIZE = 24

TERMINAL = -1

Edge = tuple  # (weight index, target node index or TERMINAL)

ZERO_EDGE: Edge = (ZERO_INDEX, TERMINAL)
ONE_EDGE: Edge = (ONE_INDEX, TERMINAL)

# Test switch: when True, the L2 divisor uses the squared norm instead
# of its square root, which leaves stored pairs at non-unit norm.
L2_NORM_WITHOUT_SQRT = False


class NormStrategy(Enum):
    LOW = "low"
    MIN = "min"
    MAX = "max"
    L2 = "l2"


def _mag2(c: complex) -> float:
    return c.real * c.real + c.imag * c.imag


def normalize(alpha: complex, beta: complex,
              strategy: NormStrategy) -> tuple[complex, complex, complex]:
    """Divisor and normalized weight pair for an (alpha, beta) node.

    Returns (nu, alpha/nu, beta/nu) with the component that equals nu
    set to exactly 1.  Raises DegenerateNodeError when both inputs are
    zero; callers are expected to short-circuit that case to the zero
    edge before normalizing.

    MIN and MAX compare squared moduli and break ties positionally in
    favour of the low slot.  A positional tie-break keeps the divisor
    scale-covariant (nu of (c*alpha, c*beta) is c times nu of
    (alpha, beta)), which canonicity requires; an order on the values
    themselves would give proportional pairs different normal forms.
    """
    if alpha == 0 and beta == 0:
        raise DegenerateNodeError("cannot normalize an all-zero pair")
    if alpha == 0 or beta == 0:
        # One-sided pairs normalize to (1, 0) or (0, 1) with nu the
        # nonzero weight, whatever the strategy.
        if alpha == 0:
            return beta, 0j, 1 + 0j
        return alpha, 1 + 0j, 0j
    if strategy is NormStrategy.L2:
        r2 = abs(alpha) ** 2 + abs(beta) ** 2
        r = r2 if L2_NORM_WITHOUT_SQRT else cmath.sqrt(r2).real
        # Phase chosen so the low weight becomes real non-negative.
        nu = alpha / abs(alpha) * r
        return nu, abs(alpha) / r + 0j, beta / nu
    if strategy is NormStrategy.LOW:
        nu = alpha
    elif strategy is NormStrategy.MIN:
        nu = alpha if _mag2(alpha) <= _mag2(beta) else beta
    elif strategy is NormStrategy.MAX:
        nu = alpha if _mag2(alpha) >= _mag2(beta) else beta
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if nu == alpha:
        return nu, 1 + 0j, beta / nu
    return nu, alpha / nu, 1 + 0j


class NodeStore:
    """Fixed-capacity unique table with a strategy-bound constructor."""

    def __init__(self, values: ValueStore,
                 log2_size: int = DEFAULT_LOG2_SIZE,
                 strategy: NormStrategy = NormStrategy.MAX):
        if log2_size < 2:
            raise ValueError("node table needs at least 4 slots")
        self.values = values
        self.strategy = strategy
        self.capacity = 1 << log2_size
        self._mask = self.capacity - 1
        self._slots: list[tuple | None] = [None] * self.capacity
        self._claim_lock = threading.Lock()
        self._count = 0
        self._peak = 0

    # -- lookup ---------------------------------------------------------

    def node(self, index: int) -> tuple:
        """The (var, low, high) triple stored at a slot index."""
        return self._slots[index]

    def var(self, index: int) -> int:
        return self._slots[index][0]

    def lookup_stats(self) -> tuple[int, int]:
        """(live unique node count, high-water mark)."""
        return self._count, self._peak

    def iter_nodes(self):
        """Yield (index, (var, low, high)) for every stored node."""
        for i, entry in enumerate(self._slots):
            if entry is not None:
                yield i, entry

    # -- construction ---------------------------------------------------

    def edge(self, weight_index: int, target: int) -> Edge:
        """Canonical edge: zero weights always point at the terminal."""
        if weight_index == ZERO_INDEX:
            return ZERO_EDGE
        return (weight_index, target)

    def make_node(self, var: int, low: Edge, high: Edge,
                  strategy: NormStrategy | None = None) -> Edge:
        """Normalized, deduplicated edge onto a (var, low, high) node.

        Returns ``low`` unchanged when the two edges are identical (the
        node is redundant and the variable is skipped).  The divisor nu
        becomes the weight of the returned edge; callers fold their own
        incoming factor on top.
        """
        if low[0] == ZERO_INDEX and low[1] != TERMINAL:
            low = ZERO_EDGE
        if high[0] == ZERO_INDEX and high[1] != TERMINAL:
            high = ZERO_EDGE
        if low == high:
            return low
        lw, lt = low
        hw, ht = high
        if (lt != TERMINAL and self._slots[lt][0] <= var) or \
           (ht != TERMINAL and self._slots[ht][0] <= var):
            raise OrderViolationError(
                f"variable {var} is not above both children")
        if strategy is None:
            strategy = self.strategy

        values = self.values
        if lw == ZERO_INDEX:
            # One-sided: nu is the nonzero weight regardless of strategy.
            nu_idx, aw, bw = hw, ZERO_INDEX, ONE_INDEX
        elif hw == ZERO_INDEX:
            nu_idx, aw, bw = lw, ONE_INDEX, ZERO_INDEX
        else:
            alpha = values.get(lw)
            beta = values.get(hw)
            nu, a, b = normalize(alpha, beta, strategy)
            if nu == alpha:
                nu_idx = lw
            elif nu == beta:
                nu_idx = hw
            else:
                nu_idx = values.find_or_put(nu)
            aw = ONE_INDEX if a == 1 else values.find_or_put(a)
            bw = ONE_INDEX if b == 1 else values.find_or_put(b)
        node_idx = self._insert((var, self.edge(aw, lt), self.edge(bw, ht)))
        return (nu_idx, node_idx)

    def _insert(self, key: tuple) -> int:
        slots = self._slots
        mask = self._mask
        idx = _mix64(hash(key) & _MASK64) & mask
        for _ in range(self.capacity):
            cur = slots[idx]
            if cur is None:
                with self._claim_lock:
                    cur = slots[idx]
                    if cur is None:
                        slots[idx] = key
                        self._count += 1
                        if self._count > self._peak:
                            self._peak = self._count
                        return idx
            if cur == key:
                return idx
            idx = (idx + 1) & mask
        raise TableFullError("node", self.capacity)

    # -- traversal helpers ----------------------------------------------

    def reachable_count(self, *roots: Edge) -> int:
        """Number of distinct nodes reachable from the given root edges."""
        seen: set[int] = set()
        stack = [t for _, t in roots if t != TERMINAL]
        while stack:
            t = stack.pop()
            if t in seen:
                continue
            seen.add(t)
            _, (_, lt), (_, ht) = self._slots[t]
            if lt != TERMINAL:
                stack.append(lt)
            if ht != TERMINAL:
                stack.append(ht)
        return len(seen)

    # -- reclamation ------------------------------------------------------

    def collect(self, roots: list[Edge]) -> list[Edge]:
        """Stop-the-world mark and sweep; returns the remapped roots.

        Every live edge must be listed in ``roots``: surviving nodes are
        re-inserted into a fresh slot array, so node indices change and
        any edge not remapped here becomes invalid.  Callers must also
        drop memoization tables keyed on old indices.  Not thread-safe;
        run only while no operation is in flight.
        """
        marked: set[int] = set()
        stack = [t for _, t in roots if t != TERMINAL]
        while stack:
            t = stack.pop()
            if t in marked:
                continue
            marked.add(t)
            _, (_, lt), (_, ht) = self._slots[t]
            if lt != TERMINAL:
                stack.append(lt)
            if ht != TERMINAL:
                stack.append(ht)

        old_slots = self._slots
        self._slots = [None] * self.capacity
        self._count = 0
        remap: dict[int, int] = {TERMINAL: TERMINAL}

        def rebuild(t: int) -> int:
            new = remap.get(t)
            if new is not None:
                return new
            var, (lw, lt), (hw, ht) = old_slots[t]
            new = self._insert((var, (lw, rebuild(lt)), (hw, rebuild(ht))))
            remap[t] = new
            return new

        # Deepest variables first keeps the rebuild recursion shallow.
        for t in sorted(marked, key=lambda i: -old_slots[i][0]):
            rebuild(t)
        return [(w, remap[t]) for w, t in roots]
