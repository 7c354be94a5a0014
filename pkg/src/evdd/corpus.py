"""Deterministic mini-corpus of benchmark circuits.

Families: GHZ, W state, QFT, Deutsch-Jozsa, graph states, QAOA-style
rings, random Clifford, and random dense circuits, spanning 2 to 10
qubits.  ``write_corpus`` emits them as .qasm files; ``write_eq_pairs``
adds ``<name>_alt.qasm`` rewrites for the equivalence-checking sweep.

Everything is seeded, so regenerated files are byte-identical.
"""

from __future__ import annotations

import math
import os
import random

from .circuit import Circuit, GateSpec, rewrite_equivalent, to_qasm


def ghz(n: int) -> Circuit:
    ops = [GateSpec("h", targets=(0,))]
    ops += [GateSpec("cx", controls=(q,), targets=(q + 1,))
            for q in range(n - 1)]
    return Circuit(n, ops, source_name=f"ghz_{n:02d}")


def w_state(n: int) -> Circuit:
    """Uniform superposition of the weight-one basis states."""
    ops = [GateSpec("x", targets=(n - 1,))]
    for m in range(1, n):
        # Split amplitude off qubit n-m onto qubit n-m-1.
        theta = math.acos(math.sqrt(1.0 / (n - m + 1)))
        hi, lo = n - m, n - m - 1
        ops.append(GateSpec("ry", (-theta,), (), (lo,)))
        ops.append(GateSpec("cz", (), (hi,), (lo,)))
        ops.append(GateSpec("ry", (theta,), (), (lo,)))
    for k in range(n - 1, 0, -1):
        ops.append(GateSpec("cx", (), (k - 1,), (k,)))
    return Circuit(n, ops, source_name=f"wstate_{n:02d}")


def qft(n: int) -> Circuit:
    ops = []
    for i in range(n):
        ops.append(GateSpec("h", targets=(i,)))
        for j in range(i + 1, n):
            ops.append(GateSpec("cu1", (math.pi / 2 ** (j - i),), (j,), (i,)))
    for i in range(n // 2):
        ops.append(GateSpec("swap", (), (), (i, n - 1 - i)))
    return Circuit(n, ops, source_name=f"qft_{n:02d}")


def deutsch_jozsa(n: int, seed: int = 11) -> Circuit:
    """Balanced-oracle instance; the last qubit is the ancilla."""
    rng = random.Random(seed + n)
    ops = [GateSpec("x", targets=(n - 1,))]
    ops += [GateSpec("h", targets=(q,)) for q in range(n)]
    inputs = list(range(n - 1))
    marked = rng.sample(inputs, max(1, len(inputs) // 2))
    ops += [GateSpec("cx", (), (q,), (n - 1,)) for q in sorted(marked)]
    ops += [GateSpec("h", targets=(q,)) for q in inputs]
    c = Circuit(n, ops, source_name=f"dj_{n:02d}")
    c.measurements = [(q, q) for q in inputs]
    return c


def graph_state(n: int, seed: int = 5) -> Circuit:
    rng = random.Random(seed + n)
    edges = [(q, (q + 1) % n) for q in range(n)]
    extra = rng.sample([(a, b) for a in range(n) for b in range(a + 2, n)
                        if not (a == 0 and b == n - 1)],
                       k=min(n // 2, 3))
    ops = [GateSpec("h", targets=(q,)) for q in range(n)]
    ops += [GateSpec("cz", (), (a,), (b,)) for a, b in edges + sorted(extra)]
    return Circuit(n, ops, source_name=f"graphstate_{n:02d}")


def qaoa_ring(n: int, layers: int = 1, seed: int = 23) -> Circuit:
    """Max-cut style ansatz on a ring, cost terms as cx-rz-cx."""
    rng = random.Random(seed + n)
    ops = [GateSpec("h", targets=(q,)) for q in range(n)]
    for _ in range(layers):
        gamma = rng.uniform(0.2, math.pi - 0.2)
        beta = rng.uniform(0.2, math.pi - 0.2)
        for q in range(n):
            a, b = q, (q + 1) % n
            ops.append(GateSpec("cx", (), (a,), (b,)))
            ops.append(GateSpec("rz", (gamma,), (), (b,)))
            ops.append(GateSpec("cx", (), (a,), (b,)))
        for q in range(n):
            ops.append(GateSpec("rx", (beta,), (), (q,)))
    return Circuit(n, ops, source_name=f"qaoa_{n:02d}")


def random_clifford(n: int, depth: int, seed: int = 37) -> Circuit:
    rng = random.Random(seed + n)
    ops = []
    for _ in range(depth):
        r = rng.random()
        if r < 0.4:
            ops.append(GateSpec(rng.choice(["h", "s", "sdg"]),
                                targets=(rng.randrange(n),)))
        elif r < 0.55:
            ops.append(GateSpec(rng.choice(["x", "y", "z"]),
                                targets=(rng.randrange(n),)))
        else:
            a, b = rng.sample(range(n), 2)
            ops.append(GateSpec(rng.choice(["cx", "cz"]), (), (a,), (b,)))
    return Circuit(n, ops, source_name=f"clifford_{n:02d}")


def random_dense(n: int, layers: int = 2, seed: int = 41) -> Circuit:
    """Layers of generic rotations and ring entanglers; the state
    diagram quickly loses all sharing."""
    rng = random.Random(seed + n)
    ops = []
    for _ in range(layers):
        for q in range(n):
            ops.append(GateSpec("u3", (rng.uniform(0.3, math.pi - 0.3),
                                       rng.uniform(-math.pi, math.pi),
                                       rng.uniform(-math.pi, math.pi)),
                                (), (q,)))
        for q in range(n):
            ops.append(GateSpec("cx", (), (q,), ((q + 1) % n,)))
    return Circuit(n, ops, source_name=f"dense_{n:02d}")


def hostile_low_norm(n: int = 4, rounds: int = 150, seed: int = 3,
                     eps: float = 1e-7) -> Circuit:
    """Deep cascade of near-cancelling rotations hostile to the low
    normalization.

    Each round turns a low-branch weight into the residue of a
    catastrophic cancellation (h around a tiny rz, then x to move the
    residue into the low slot) and then mixes branches.  Dividing nodes
    by those noisy residues amplifies representation error; strategies
    that divide by the dominant weight shrug the same circuit off.
    """
    rng = random.Random(seed)
    ops = []
    for q in range(n):
        ops.append(GateSpec("ry", (eps,), (), (q,)))
        ops.append(GateSpec("x", (), (), (q,)))
    for r in range(rounds):
        q = r % n
        ops.append(GateSpec("h", (), (), (q,)))
        ops.append(GateSpec("rz", (eps * rng.uniform(0.9, 1.1),), (), (q,)))
        ops.append(GateSpec("h", (), (), (q,)))
        ops.append(GateSpec("x", (), (), (q,)))
        ops.append(GateSpec("cx", (), (q,), ((q + 1) % n,)))
    return Circuit(n, ops, source_name="hostile_low")


def standard_corpus() -> list[Circuit]:
    """The bundled mini-corpus: 37 circuits, 2 to 10 qubits."""
    circuits = []
    circuits += [ghz(n) for n in range(2, 11)]
    circuits += [w_state(n) for n in (3, 5, 7, 9)]
    circuits += [qft(n) for n in range(2, 7)]
    circuits += [deutsch_jozsa(n) for n in (4, 6, 8, 10)]
    circuits += [graph_state(n) for n in (4, 6, 8, 10)]
    circuits += [qaoa_ring(n) for n in (4, 6, 8)]
    circuits += [random_clifford(n, depth=3 * n) for n in (4, 6, 8)]
    circuits += [random_dense(n) for n in (4, 6, 8, 10)]
    deep = random_dense(10, layers=3, seed=97)
    deep.source_name = "dense_10_deep"
    circuits.append(deep)
    return circuits


def write_corpus(directory: str) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    paths = []
    for c in standard_corpus():
        path = os.path.join(directory, c.source_name + ".qasm")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(to_qasm(c))
        paths.append(path)
    return paths


def write_eq_pairs(directory: str) -> list[str]:
    """Equivalent pairs for the eqcheck sweep: base plus _alt rewrite."""
    os.makedirs(directory, exist_ok=True)
    picks = [ghz(4), ghz(6), w_state(5), qft(4), graph_state(6),
             qaoa_ring(4), random_clifford(5, depth=15), deutsch_jozsa(6)]
    paths = []
    for c in picks:
        alt = rewrite_equivalent(c, seed=13)
        for circ, suffix in ((c, ""), (alt, "_alt")):
            path = os.path.join(directory, c.source_name + suffix + ".qasm")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(to_qasm(circ))
            paths.append(path)
    return paths


def main(argv=None):
    import argparse
    parser = argparse.ArgumentParser(
        description="Write the bundled benchmark circuits as .qasm files.")
    parser.add_argument("directory")
    parser.add_argument("--eq-pairs", action="store_true",
                        help="write equivalent pairs instead of the "
                             "simulation corpus")
    args = parser.parse_args(argv)
    fn = write_eq_pairs if args.eq_pairs else write_corpus
    for path in fn(args.directory):
        print(path)


if __name__ == "__main__":
    main()
