"""Dense linear-algebra reference path, used by tests only.

Everything here works on explicit numpy arrays built from Kronecker
products; none of the diagram machinery is imported, so agreement
between this module and the diagram kernels is a genuine cross-check.

Bit convention: qubit 0 is the most significant bit of a basis index,
so the amplitude of basis string b0 b1 .. b(n-1) sits at position
int(b, 2) of a state vector.
"""

from __future__ import annotations

import functools
import math

import numpy as np

from .circuit import GATE_SHAPES, Circuit, GateSpec
from .errors import (ArityMismatchError, QubitCountMismatchError,
                     TooManyQubitsError, UnknownGateError)

MAX_SIM_QUBITS = 10
MAX_EQUIV_QUBITS = 6

_I2 = np.eye(2, dtype=complex)
_PROJ1 = np.array([[0, 0], [0, 1]], dtype=complex)


def dense_base(kind: str, params: tuple[float, ...]) -> np.ndarray:
    """Closed-form 2x2 matrix for a (possibly controlled) gate kind."""
    t2 = params[0] / 2.0 if params else 0.0
    if kind in ("x", "cx", "ccx"):
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind in ("y", "cy"):
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if kind in ("z", "cz"):
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if kind in ("h", "ch"):
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
    if kind == "s":
        return np.diag([1, 1j]).astype(complex)
    if kind == "sdg":
        return np.diag([1, -1j]).astype(complex)
    if kind == "t":
        return np.diag([1, np.exp(0.25j * np.pi)])
    if kind == "tdg":
        return np.diag([1, np.exp(-0.25j * np.pi)])
    if kind == "id":
        return _I2.copy()
    if kind in ("u1", "cu1"):
        return np.diag([1, np.exp(1j * params[0])])
    if kind in ("rz", "crz"):
        return np.diag([np.exp(-1j * t2), np.exp(1j * t2)])
    if kind == "rx":
        c, s = math.cos(t2), math.sin(t2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "ry":
        c, s = math.cos(t2), math.sin(t2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "u2":
        return dense_base("u3", (math.pi / 2.0, params[0], params[1]))
    if kind in ("u3", "cu3"):
        theta, phi, lam = params
        c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
        return np.array([
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]])
    raise UnknownGateError(f"no dense form for gate '{kind}'")


def _kron_all(blocks: list[np.ndarray]) -> np.ndarray:
    return functools.reduce(np.kron, blocks)


def dense_gate(n: int, g: GateSpec) -> np.ndarray:
    """Full 2^n x 2^n matrix of one gate application."""
    if g.kind not in GATE_SHAPES:
        raise UnknownGateError(f"unknown gate '{g.kind}'")
    qubits = g.qubits
    if len(set(qubits)) != len(qubits):
        raise ArityMismatchError(f"repeated qubit in {g}")
    if g.kind in ("swap", "cswap"):
        a, b = g.targets
        total = np.zeros((1 << n, 1 << n), dtype=complex)
        for r in (0, 1):
            for c in (0, 1):
                blocks = [_I2] * n
                blocks[a] = np.zeros((2, 2), dtype=complex)
                blocks[a][r, c] = 1.0
                blocks[b] = np.zeros((2, 2), dtype=complex)
                blocks[b][c, r] = 1.0
                total = total + _kron_all(blocks)
        swap_full = total
        if not g.controls:
            return swap_full
        blocks = [_I2] * n
        for q in g.controls:
            blocks[q] = _PROJ1
        proj = _kron_all(blocks)
        eye = np.eye(1 << n, dtype=complex)
        return eye + proj @ (swap_full - eye)
    u = dense_base(g.kind, g.params)
    target = g.targets[0]
    if not g.controls:
        blocks = [_I2] * n
        blocks[target] = u
        return _kron_all(blocks)
    blocks = [_I2] * n
    for q in g.controls:
        blocks[q] = _PROJ1
    blocks[target] = u - _I2
    return np.eye(1 << n, dtype=complex) + _kron_all(blocks)


def dense_simulate(circuit: Circuit) -> np.ndarray:
    """State vector after applying every gate to the all-zero state."""
    if circuit.n > MAX_SIM_QUBITS:
        raise TooManyQubitsError(
            f"dense simulation capped at {MAX_SIM_QUBITS} qubits")
    state = np.zeros(1 << circuit.n, dtype=complex)
    state[0] = 1.0
    for g in circuit.ops:
        state = dense_gate(circuit.n, g) @ state
    return state


def dense_unitary(circuit: Circuit) -> np.ndarray:
    """Product of all gate matrices, later gates leftmost."""
    if circuit.n > MAX_SIM_QUBITS:
        raise TooManyQubitsError(
            f"dense unitary capped at {MAX_SIM_QUBITS} qubits")
    u = np.eye(1 << circuit.n, dtype=complex)
    for g in circuit.ops:
        u = dense_gate(circuit.n, g) @ u
    return u


def dense_equiv(u: Circuit, v: Circuit,
                tol: float = 1e-8) -> tuple[bool, complex | None]:
    """Brute-force proportionality referee: is U = c V for some c?

    The candidate factor is estimated from the largest-magnitude entry
    of V to stay away from near-zero divisions.
    """
    if u.n != v.n:
        raise QubitCountMismatchError(f"{u.n} qubits vs {v.n} qubits")
    if u.n > MAX_EQUIV_QUBITS:
        raise TooManyQubitsError(
            f"dense equivalence capped at {MAX_EQUIV_QUBITS} qubits")
    mu = dense_unitary(u)
    mv = dense_unitary(v)
    flat = np.argmax(np.abs(mv))
    c = mu.flat[flat] / mv.flat[flat]
    if np.max(np.abs(mu - c * mv)) < tol:
        return True, c
    return False, None
