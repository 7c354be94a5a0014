"""Build interleaved matrix diagrams for the standard gate library.

Every supported gate reduces to a small sum of tensor-product terms,
each assigning a 2x2 block to the qubits it touches and implicit
identity elsewhere:

* an uncontrolled single-target gate U is one term with U at the target;
* a controlled gate is I + (|1><1| at each control) x (U - I) at the
  target, which keeps the diagram linear in the qubit count for any
  number of controls;
* swap contributes its four single-entry terms, and cswap controls them.

Terms are built bottom-up in one pass per term, so a k-control gate
costs O(n) node constructions.  Built diagrams are memoized per
(qubit count, gate) on the engine, since circuits repeat gates heavily.

Conventions: u1(l) is diag(1, e^il); rz(t) is the symmetric
diag(e^-it/2, e^it/2).  The two differ by a global factor only, which
proportionality-based checks ignore.
"""

from __future__ import annotations

import cmath
import math

from .circuit import GATE_SHAPES, GateSpec
from .errors import ArityMismatchError, QubitOutOfRangeError, UnknownGateError
from .node_store import Edge, ONE_EDGE
from .ops import DDEngine

Mat2 = tuple[tuple[complex, complex], tuple[complex, complex]]

_ID2: Mat2 = ((1 + 0j, 0j), (0j, 1 + 0j))
_PROJ1: Mat2 = ((0j, 0j), (0j, 1 + 0j))


def u3_matrix(theta: float, phi: float, lam: float) -> Mat2:
    """General single-qubit rotation in the OpenQASM parameterization."""
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return ((complex(c), -cmath.exp(1j * lam) * s),
            (cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c))


_SQRT1_2 = 1.0 / math.sqrt(2.0)


def base_matrix(kind: str, params: tuple[float, ...]) -> Mat2:
    """Closed-form 2x2 matrix for a single-target gate kind."""
    if kind == "x" or kind == "cx" or kind == "ccx":
        return ((0j, 1 + 0j), (1 + 0j, 0j))
    if kind == "y" or kind == "cy":
        return ((0j, -1j), (1j, 0j))
    if kind == "z" or kind == "cz":
        return ((1 + 0j, 0j), (0j, -1 + 0j))
    if kind == "h" or kind == "ch":
        return ((_SQRT1_2 + 0j, _SQRT1_2 + 0j), (_SQRT1_2 + 0j, -_SQRT1_2 + 0j))
    if kind == "s":
        return ((1 + 0j, 0j), (0j, 1j))
    if kind == "sdg":
        return ((1 + 0j, 0j), (0j, -1j))
    if kind == "t":
        return ((1 + 0j, 0j), (0j, cmath.exp(0.25j * math.pi)))
    if kind == "tdg":
        return ((1 + 0j, 0j), (0j, cmath.exp(-0.25j * math.pi)))
    if kind == "id":
        return _ID2
    if kind == "u1" or kind == "cu1":
        return ((1 + 0j, 0j), (0j, cmath.exp(1j * params[0])))
    if kind == "u2":
        return u3_matrix(math.pi / 2.0, params[0], params[1])
    if kind == "u3" or kind == "cu3":
        return u3_matrix(*params)
    if kind == "rx":
        c, s = math.cos(params[0] / 2.0), math.sin(params[0] / 2.0)
        return ((complex(c), -1j * s), (-1j * s, complex(c)))
    if kind == "ry":
        c, s = math.cos(params[0] / 2.0), math.sin(params[0] / 2.0)
        return ((complex(c), complex(-s)), (complex(s), complex(c)))
    if kind == "rz" or kind == "crz":
        return ((cmath.exp(-0.5j * params[0]), 0j),
                (0j, cmath.exp(0.5j * params[0])))
    raise UnknownGateError(f"no closed form for gate '{kind}'")


def _tensor_term(engine: DDEngine, n: int, blocks: dict[int, Mat2]) -> Edge:
    """Diagram of a tensor product of 2x2 blocks (identity elsewhere)."""
    nodes = engine.nodes
    e = ONE_EDGE
    for q in range(n - 1, -1, -1):
        b = blocks.get(q, _ID2)
        row0 = nodes.make_node(2 * q + 1,
                               engine.scalar_mul(b[0][0], e),
                               engine.scalar_mul(b[0][1], e))
        row1 = nodes.make_node(2 * q + 1,
                               engine.scalar_mul(b[1][0], e),
                               engine.scalar_mul(b[1][1], e))
        e = nodes.make_node(2 * q, row0, row1)
    return e


def _mat_sub(a: Mat2, b: Mat2) -> Mat2:
    return ((a[0][0] - b[0][0], a[0][1] - b[0][1]),
            (a[1][0] - b[1][0], a[1][1] - b[1][1]))


def identity_dd(engine: DDEngine, n: int) -> Edge:
    """Diagram of the 2^n identity; memoized so recognition is one
    edge comparison."""
    key = ("I", n)
    e = engine.gate_memo.get(key)
    if e is None:
        e = engine.gate_memo.setdefault(key, _tensor_term(engine, n, {}))
    return e


def pauli_dd(engine: DDEngine, n: int, which: str, j: int) -> Edge:
    """Diagram of identity everywhere and Pauli X or Z on qubit j."""
    if which not in ("X", "Z"):
        raise UnknownGateError(f"pauli_dd supports X and Z, not {which!r}")
    if not 0 <= j < n:
        raise QubitOutOfRangeError(f"qubit {j} out of range for n={n}")
    return build_gate_dd(engine, n, GateSpec(which.lower(), targets=(j,)))


# Single-entry matrices for the swap decomposition: _E[r][c] is |r><c|.
_E = [[((1 + 0j, 0j), (0j, 0j)), ((0j, 1 + 0j), (0j, 0j))],
      [((0j, 0j), (1 + 0j, 0j)), ((0j, 0j), (0j, 1 + 0j))]]


def _swap_terms(a: int, b: int):
    """SWAP on qubits a and b as four tensor-product terms."""
    for r in (0, 1):
        for c in (0, 1):
            yield {a: _E[r][c], b: _E[c][r]}


def build_gate_dd(engine: DDEngine, n: int, g: GateSpec) -> Edge:
    """Canonical matrix diagram of one gate application on n qubits."""
    shape = GATE_SHAPES.get(g.kind)
    if shape is None:
        raise UnknownGateError(f"unknown gate '{g.kind}'")
    n_params, n_controls, n_targets = shape
    if len(g.params) != n_params or len(g.controls) != n_controls \
            or len(g.targets) != n_targets:
        raise ArityMismatchError(
            f"gate '{g.kind}' expects {n_params} params, {n_controls} "
            f"controls, {n_targets} targets; got {g}")
    qubits = g.qubits
    if len(set(qubits)) != len(qubits):
        raise ArityMismatchError(f"repeated qubit in {g}")
    for q in qubits:
        if not 0 <= q < n:
            raise QubitOutOfRangeError(f"qubit {q} out of range for n={n}")

    key = (n, g)
    cached = engine.gate_memo.get(key)
    if cached is not None:
        return cached

    if g.kind in ("swap", "cswap"):
        a, b = g.targets
        if not g.controls:
            e = None
            for blocks in _swap_terms(a, b):
                term = _tensor_term(engine, n, blocks)
                e = term if e is None else engine.plus(e, term)
        else:
            e = identity_dd(engine, n)
            swap = list(_swap_terms(a, b))
            # swap - identity on the two targets: drop the diagonal
            # |00><00| and |11><11| terms, negate the remaining diagonal.
            deltas = [swap[1], swap[2],
                      {a: _E[0][0], b: _E[1][1]}, {a: _E[1][1], b: _E[0][0]}]
            signs = [1.0, 1.0, -1.0, -1.0]
            for blocks, sign in zip(deltas, signs):
                for c in g.controls:
                    blocks = {**blocks, c: _PROJ1}
                term = _tensor_term(engine, n, blocks)
                e = engine.plus(e, engine.scalar_mul(complex(sign), term))
    else:
        base = base_matrix(g.kind, g.params)
        target = g.targets[0]
        if not g.controls:
            e = _tensor_term(engine, n, {target: base})
        else:
            blocks = {c: _PROJ1 for c in g.controls}
            blocks[target] = _mat_sub(base, _ID2)
            e = engine.plus(identity_dd(engine, n),
                            _tensor_term(engine, n, blocks))
    return engine.gate_memo.setdefault(key, e)
