"""Statevector simulation: repeated matrix-vector products on diagrams.

Gates apply in textual circuit order; recorded measurements are never
executed during simulation, the full final state is computed and
sampling happens afterwards.  Sampling walks the diagram top down using
memoized subtree norms and a counter-based generator (numpy Philox), so
a histogram is reproducible from its seed on any platform.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .errors import ZeroStateError
from .gates import build_gate_dd
from .node_store import Edge, TERMINAL, ZERO_EDGE
from .ops import DDEngine
from .value_store import ZERO_INDEX

HIGH_SHARING = "high-sharing"
SOME_SHARING = "some-sharing"
NO_SHARING = "no-sharing"


def sharing_class(final_nodes: int, n: int) -> str:
    """Size regime of a final state diagram.

    Below n*log2(n) nodes counts as high sharing; at or above 0.9*2^n
    (an essentially unshared binary tree) as no sharing; the rest in
    between.  Reporting only, nothing downstream branches on it.
    """
    if n > 1 and final_nodes < n * math.log2(n):
        return HIGH_SHARING
    if final_nodes >= 0.9 * (1 << n):
        return NO_SHARING
    return SOME_SHARING


@dataclass
class SimResult:
    state: Edge
    n: int
    gate_count: int
    l2_norm: float
    final_nodes: int
    peak_nodes: int
    wall_time: float
    sharing_class: str


def all_zero_state(engine: DDEngine, n: int) -> Edge:
    """Diagram of the basis state with every qubit at 0."""
    e = engine.terminal(1)
    for q in range(n - 1, -1, -1):
        e = engine.nodes.make_node(q, e, ZERO_EDGE)
    return e


def simulate(engine: DDEngine, circuit: Circuit,
             gc: bool = False, gc_threshold: int | None = None) -> SimResult:
    """Apply every gate of the circuit to the all-zero state.

    With ``gc`` enabled the node table is mark-and-swept between gate
    applications whenever its live count crosses the threshold
    (a quarter of capacity by default); the current state and the gate
    memo are the roots.
    """
    if circuit.n < 1:
        raise ValueError("circuit must declare at least one qubit")
    n = circuit.n
    if gc_threshold is None:
        gc_threshold = engine.nodes.capacity // 4
    start = time.perf_counter()
    state = all_zero_state(engine, n)
    for g in circuit.ops:
        state = engine.mat_vec(build_gate_dd(engine, n, g), state, n)
        if gc and engine.nodes.lookup_stats()[0] >= gc_threshold:
            state, = engine.collect([state])
    wall = time.perf_counter() - start
    final_nodes = engine.nodes.reachable_count(state)
    _, peak = engine.nodes.lookup_stats()
    return SimResult(
        state=state, n=n, gate_count=circuit.gate_count,
        l2_norm=engine.l2_norm_squared(state, n),
        final_nodes=final_nodes, peak_nodes=peak, wall_time=wall,
        sharing_class=sharing_class(final_nodes, n))


def sample(engine: DDEngine, state: Edge, shots: int, seed: int,
           n: int) -> dict[str, int]:
    """Measurement histogram: basis string -> count over ``shots`` draws.

    Each draw walks from the root, branching with probability
    proportional to squared edge weight times subtree norm; variables
    skipped by the diagram are unbiased coin flips.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    w, t = state
    total = engine.l2_norm_squared(state, n)
    if w == ZERO_INDEX or total <= 0.0:
        raise ZeroStateError("cannot sample from an all-zero state")
    rng = np.random.Generator(np.random.Philox(seed))
    draws = rng.random((shots, n))
    values = engine.values
    nodes = engine.nodes
    counts: dict[str, int] = {}
    for shot in range(shots):
        bits = []
        t_cur = t
        for v in range(n):
            if t_cur == TERMINAL or nodes.var(t_cur) > v:
                # Skipped variable: both branches carry equal mass.
                bits.append("1" if draws[shot, v] < 0.5 else "0")
                continue
            _, (lw, lt), (hw, ht) = nodes.node(t_cur)
            p_low = 0.0
            if lw != ZERO_INDEX:
                p_low = abs(values.get(lw)) ** 2 * engine._subnorm(lt, v + 1, n)
            p_high = 0.0
            if hw != ZERO_INDEX:
                p_high = abs(values.get(hw)) ** 2 * engine._subnorm(ht, v + 1, n)
            if draws[shot, v] < p_high / (p_low + p_high):
                bits.append("1")
                t_cur = ht
            else:
                bits.append("0")
                t_cur = lt
        key = "".join(bits)
        counts[key] = counts.get(key, 0) + 1
    return counts
