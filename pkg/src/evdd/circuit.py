"""Circuit and gate-application records shared by the parser, the
builders, the simulator, and the dense reference path."""

from __future__ import annotations

from dataclasses import dataclass, field

# kind -> (number of angle parameters, controls, targets)
GATE_SHAPES: dict[str, tuple[int, int, int]] = {
    "u3": (3, 0, 1), "u2": (2, 0, 1), "u1": (1, 0, 1),
    "cx": (0, 1, 1), "id": (0, 0, 1),
    "x": (0, 0, 1), "y": (0, 0, 1), "z": (0, 0, 1), "h": (0, 0, 1),
    "s": (0, 0, 1), "sdg": (0, 0, 1), "t": (0, 0, 1), "tdg": (0, 0, 1),
    "rx": (1, 0, 1), "ry": (1, 0, 1), "rz": (1, 0, 1),
    "cz": (0, 1, 1), "cy": (0, 1, 1), "ch": (0, 1, 1),
    "ccx": (0, 2, 1), "crz": (1, 1, 1), "cu1": (1, 1, 1), "cu3": (3, 1, 1),
    "swap": (0, 0, 2), "cswap": (0, 1, 2),
}


@dataclass(frozen=True)
class GateSpec:
    """One gate application: kind, angles, control and target qubits."""

    kind: str
    params: tuple[float, ...] = ()
    controls: tuple[int, ...] = ()
    targets: tuple[int, ...] = ()

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets


@dataclass
class Circuit:
    """A parsed program: qubit count, gate list, recorded measurements."""

    n: int
    ops: list[GateSpec] = field(default_factory=list)
    measurements: list[tuple[int, int]] = field(default_factory=list)
    source_name: str = ""

    @property
    def gate_count(self) -> int:
        return len(self.ops)


def _fmt(x: float) -> str:
    return repr(float(x))


def to_qasm(circuit: Circuit) -> str:
    """Render a circuit back to QASM source.

    Re-parsing the output yields the same gate list, so generated and
    loaded circuits round-trip through files.
    """
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";',
             f"qreg q[{circuit.n}];"]
    if circuit.measurements:
        nbits = 1 + max(c for _, c in circuit.measurements)
        lines.append(f"creg c[{nbits}];")
    for g in circuit.ops:
        args = ", ".join(f"q[{i}]" for i in g.qubits)
        if g.params:
            lines.append(f"{g.kind}({', '.join(_fmt(p) for p in g.params)}) {args};")
        else:
            lines.append(f"{g.kind} {args};")
    for q, c in circuit.measurements:
        lines.append(f"measure q[{q}] -> c[{c}];")
    return "\n".join(lines) + "\n"


# -- equivalence-preserving rewrites and mutations --------------------------

_REWRITES = {
    "z": [("s", ()), ("s", ())],
    "x": [("h", ()), ("z", ()), ("h", ())],
    "s": [("t", ()), ("t", ())],
}

# Controlled gates whose control/target order changes the unitary.
_FLIPPABLE = {"cx", "cy", "ch", "crz", "cu3"}


def rewrite_equivalent(circuit: Circuit, seed: int = 0) -> Circuit:
    """Same unitary up to a global factor, different gate list.

    Applies local identities: z = s s, x = h z h, s = t t, and replaces
    rz(t) with u1(t), which differs by a phase only.  Circuits without
    any matching gate come back unchanged.
    """
    import random
    rng = random.Random(seed)
    out: list[GateSpec] = []
    for g in circuit.ops:
        if g.kind in _REWRITES and rng.random() < 0.8:
            for kind, params in _REWRITES[g.kind]:
                out.append(GateSpec(kind, params, g.controls, g.targets))
        elif g.kind == "rz" and rng.random() < 0.8:
            out.append(GateSpec("u1", g.params, g.controls, g.targets))
        else:
            out.append(g)
    return Circuit(circuit.n, out, list(circuit.measurements),
                   circuit.source_name + "_alt")


def _is_identity_gate(g: GateSpec) -> bool:
    if g.kind in ("id",):
        return True
    if g.kind in ("u1", "rz", "rx", "ry", "crz", "cu1") and g.params \
            and all(p == 0.0 for p in g.params):
        return True
    return False


def missing_gate_mutations(circuit: Circuit):
    """Each circuit with one (non-trivial) gate removed."""
    for i, g in enumerate(circuit.ops):
        if _is_identity_gate(g):
            continue
        yield i, Circuit(circuit.n, circuit.ops[:i] + circuit.ops[i + 1:],
                         list(circuit.measurements),
                         f"{circuit.source_name}_missing{i}")


def flipped_control_mutations(circuit: Circuit):
    """Each circuit with one control/target pair swapped."""
    for i, g in enumerate(circuit.ops):
        if g.kind not in _FLIPPABLE:
            continue
        flipped = GateSpec(g.kind, g.params, (g.targets[0],), (g.controls[0],))
        yield i, Circuit(circuit.n, circuit.ops[:i] + [flipped] + circuit.ops[i + 1:],
                         list(circuit.measurements),
                         f"{circuit.source_name}_flip{i}")
