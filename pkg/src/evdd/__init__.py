"""Parallel edge-valued decision diagrams for quantum circuits.

The package simulates and equivalence-checks OpenQASM 2.0 circuits on
shared, concurrently usable diagram tables.  Start with ``DDEngine``
for the data structure, ``qasm.parse`` for input, ``sim.simulate`` and
``eqcheck`` for the two use cases, or the ``evdd`` command line tool.
"""

from .errors import EvddError
from .node_store import NormStrategy, NodeStore, TERMINAL, ZERO_EDGE, ONE_EDGE
from .ops import DDEngine, OpCache
from .value_store import ONE_INDEX, ZERO_INDEX, ValueStore, values_close
from .circuit import Circuit, GateSpec, to_qasm

__all__ = [
    "Circuit", "DDEngine", "EvddError", "GateSpec", "NodeStore",
    "NormStrategy", "ONE_EDGE", "ONE_INDEX", "OpCache", "TERMINAL",
    "ValueStore", "ZERO_EDGE", "ZERO_INDEX", "to_qasm", "values_close",
]

__version__ = "0.1.0"
