"""Recursive diagram kernels: addition, multiplication, conjugate
transpose, evaluation, norms, and proportionality checks.

All operations run over a shared engine holding the value store, the
unique node table, a lossy memoization cache, and a fork-join pool.
Operand weights are folded into child edges on the way down (addition)
or stripped at the root and re-applied to the result (multiplication),
matching the recursion's cache discipline: entries are keyed on full
operand edges and multiplication caches the result before root-weight
scaling.

Variable skips are interpreted semantically: an operand whose top
variable lies below the current level is used unchanged on both
branches.  Multiplication sums over column bits, so every qubit level
skipped by both operands contributes a factor of two, applied from the
level gap outside the cached sub-result.
"""

from __future__ import annotations

from .errors import ComputationCancelledError, LengthMismatchError
from .node_store import Edge, NodeStore, NormStrategy, TERMINAL, ZERO_EDGE
from .parallel import WorkerPool
from .value_store import ONE_INDEX, ZERO_INDEX, ValueStore, _MASK64, _mix64

DEFAULT_OP_CACHE_LOG2 = 22
DEFAULT_PAR_CUTOFF = 6

_PLUS, _MATVEC, _MATMAT, _DAGGER = 1, 2, 3, 4


class OpCache:
    """Direct-mapped lossy memo table; colliding entries overwrite."""

    def __init__(self, log2_size: int = DEFAULT_OP_CACHE_LOG2,
                 enabled: bool = True):
        self.capacity = 1 << log2_size
        self._mask = self.capacity - 1
        self._slots: list[tuple | None] = [None] * self.capacity
        self.enabled = enabled

    def get(self, key):
        if not self.enabled:
            return None
        entry = self._slots[_mix64(hash(key) & _MASK64) & self._mask]
        if entry is not None and entry[0] == key:
            return entry[1]
        return None

    def put(self, key, value):
        if self.enabled:
            self._slots[_mix64(hash(key) & _MASK64) & self._mask] = (key, value)

    def clear(self):
        self._slots = [None] * self.capacity


class DDEngine:
    """Shared tables plus the kernel implementations.

    One engine instance is meant to be shared by all workers of a run;
    edges are plain value tuples and safe to pass between threads.  The
    normalization strategy and worker count are fixed at construction.
    """

    def __init__(self, workers: int = 1,
                 tolerance: float = 1e-14,
                 norm_strategy: NormStrategy = NormStrategy.MAX,
                 node_table_log2: int = 24,
                 value_table_log2: int = 23,
                 op_cache_log2: int = DEFAULT_OP_CACHE_LOG2,
                 par_cutoff: int = DEFAULT_PAR_CUTOFF,
                 cache_enabled: bool = True):
        self.values = ValueStore(value_table_log2, tolerance)
        self.nodes = NodeStore(self.values, node_table_log2, norm_strategy)
        self.cache = OpCache(op_cache_log2, cache_enabled)
        self.pool = WorkerPool(workers)
        self.par_cutoff = par_cutoff
        self.gate_memo: dict = {}
        self._norm_memo: dict = {}
        self._cancelled = False

    # -- lifecycle -------------------------------------------------------

    def close(self):
        self.pool.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def cancel(self):
        """Ask running kernels to abort at their next recursion entry."""
        self._cancelled = True

    def clear_caches(self):
        self.cache.clear()
        self._norm_memo.clear()

    def collect(self, roots: list[Edge]) -> list[Edge]:
        """Mark-and-sweep the node table; returns remapped roots.

        Memoized gate diagrams are treated as additional roots and
        remapped in place; operation caches are dropped since they key
        on old node indices.  Callers must be quiescent.
        """
        memo_keys = list(self.gate_memo)
        all_roots = list(roots) + [self.gate_memo[k] for k in memo_keys]
        remapped = self.nodes.collect(all_roots)
        self.clear_caches()
        for k, e in zip(memo_keys, remapped[len(roots):]):
            self.gate_memo[k] = e
        return remapped[:len(roots)]

    # -- weight arithmetic -------------------------------------------------

    def value(self, index: int) -> complex:
        return self.values.get(index)

    def vmul(self, i: int, j: int) -> int:
        if i == ZERO_INDEX or j == ZERO_INDEX:
            return ZERO_INDEX
        if i == ONE_INDEX:
            return j
        if j == ONE_INDEX:
            return i
        return self.values.find_or_put(self.values.get(i) * self.values.get(j))

    def vadd(self, i: int, j: int) -> int:
        if i == ZERO_INDEX:
            return j
        if j == ZERO_INDEX:
            return i
        return self.values.find_or_put(self.values.get(i) + self.values.get(j))

    def vconj(self, i: int) -> int:
        v = self.values.get(i)
        if v.imag == 0.0:
            return i
        return self.values.find_or_put(v.conjugate())

    def scalar_mul(self, c: complex, e: Edge) -> Edge:
        """Edge scaled by a complex constant, re-canonicalized."""
        if c == 1:
            return e
        return self.nodes.edge(
            self.vmul(self.values.find_or_put(c), e[0]), e[1])

    def terminal(self, c: complex) -> Edge:
        return self.nodes.edge(self.values.find_or_put(c), TERMINAL)

    # -- addition ----------------------------------------------------------

    def plus(self, a: Edge, b: Edge, n: int | None = None) -> Edge:
        """Entry-wise sum of two diagrams over the same variable set."""
        limit = -1
        if n is not None and self.pool.workers > 1:
            limit = n - self.par_cutoff - 1
        return self._plus(a, b, limit)

    def _weighted(self, w: int, child: Edge) -> Edge:
        if w == ONE_INDEX:
            return child
        return self.nodes.edge(self.vmul(w, child[0]), child[1])

    def _plus(self, a: Edge, b: Edge, limit: int) -> Edge:
        if self._cancelled:
            raise ComputationCancelledError("cancelled during addition")
        if a[0] == ZERO_INDEX:
            return b
        if b[0] == ZERO_INDEX:
            return a
        at, bt = a[1], b[1]
        if at == TERMINAL and bt == TERMINAL:
            return self.nodes.edge(self.vadd(a[0], b[0]), TERMINAL)
        if b < a:
            a, b = b, a
            at, bt = bt, at
        key = (_PLUS, a, b)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        nodes = self.nodes
        va = nodes.var(at) if at != TERMINAL else None
        vb = nodes.var(bt) if bt != TERMINAL else None
        v = va if vb is None else vb if va is None else min(va, vb)
        if va == v:
            _, al, ah = nodes.node(at)
            a0 = self._weighted(a[0], al)
            a1 = self._weighted(a[0], ah)
        else:
            a0 = a1 = a
        if vb == v:
            _, bl, bh = nodes.node(bt)
            b0 = self._weighted(b[0], bl)
            b1 = self._weighted(b[0], bh)
        else:
            b0 = b1 = b
        if v < limit:
            t1 = self.pool.spawn(self._plus, a1, b1, limit)
            r0 = self._plus(a0, b0, limit)
            r1 = self.pool.sync(t1)
        else:
            r0 = self._plus(a0, b0, limit)
            r1 = self._plus(a1, b1, limit)
        result = nodes.make_node(v, r0, r1)
        self.cache.put(key, result)
        return result

    # -- multiplication ----------------------------------------------------

    def _mat_quadrants(self, mt: int, q: int):
        """Quadrant edges (00, 01, 10, 11) of the node mt at qubit q.

        Child weights are folded in; the incoming root weight is not.
        Row or column variables this block does not depend on reuse the
        same edge for both bit values.
        """
        nodes = self.nodes
        if nodes.var(mt) == 2 * q:
            _, row0, row1 = nodes.node(mt)
        else:
            row0 = row1 = (ONE_INDEX, mt)
        out = []
        for rw, rt in (row0, row1):
            if rt != TERMINAL and nodes.var(rt) == 2 * q + 1:
                _, c0, c1 = nodes.node(rt)
                out.append(self._weighted(rw, c0))
                out.append(self._weighted(rw, c1))
            else:
                out.append((rw, rt))
                out.append((rw, rt))
        return out

    def _pow2(self, k: int) -> int:
        return self.values.find_or_put(complex(2.0 ** k))

    def mat_vec(self, m: Edge, v: Edge, n: int) -> Edge:
        """Matrix-vector product; m interleaved over n qubits, v plain."""
        limit = -1
        if self.pool.workers > 1:
            limit = n - self.par_cutoff - 1
        return self._mat_vec(m, v, 0, n, limit)

    def _mat_vec(self, m: Edge, v: Edge, q0: int, n: int, limit: int) -> Edge:
        if self._cancelled:
            raise ComputationCancelledError("cancelled during multiply")
        mw, mt = m
        vw, vt = v
        if mw == ZERO_INDEX or vw == ZERO_INDEX:
            return ZERO_EDGE
        if mt == TERMINAL and vt == TERMINAL:
            w = self.vmul(mw, vw)
            if n > q0:
                # Both sides constant on the remaining qubits: the sum
                # over column bits contributes 2 per qubit.
                w = self.vmul(w, self._pow2(n - q0))
            return self.nodes.edge(w, TERMINAL)
        nodes = self.nodes
        qm = nodes.var(mt) // 2 if mt != TERMINAL else n
        qv = nodes.var(vt) if vt != TERMINAL else n
        q = min(qm, qv)
        key = (_MATVEC, n, m, v)
        r = self.cache.get(key)
        if r is None:
            if qm == q:
                m00, m01, m10, m11 = self._mat_quadrants(mt, q)
            else:
                m00 = m01 = m10 = m11 = (ONE_INDEX, mt)
            if qv == q:
                _, v0, v1 = nodes.node(vt)
            else:
                v0 = v1 = (ONE_INDEX, vt)
            q1 = q + 1
            if q < limit:
                t11 = self.pool.spawn(self._mat_vec, m11, v1, q1, n, limit)
                t10 = self.pool.spawn(self._mat_vec, m10, v0, q1, n, limit)
                t01 = self.pool.spawn(self._mat_vec, m01, v1, q1, n, limit)
                r00 = self._mat_vec(m00, v0, q1, n, limit)
                r01 = self.pool.sync(t01)
                r10 = self.pool.sync(t10)
                r11 = self.pool.sync(t11)
            else:
                r00 = self._mat_vec(m00, v0, q1, n, limit)
                r01 = self._mat_vec(m01, v1, q1, n, limit)
                r10 = self._mat_vec(m10, v0, q1, n, limit)
                r11 = self._mat_vec(m11, v1, q1, n, limit)
            r0 = nodes.make_node(q, r00, r10)
            r1 = nodes.make_node(q, r01, r11)
            r = self._plus(r0, r1, limit)
            self.cache.put(key, r)
        scale = self.vmul(mw, vw)
        if q > q0:
            scale = self.vmul(scale, self._pow2(q - q0))
        return self.nodes.edge(self.vmul(scale, r[0]), r[1])

    def mat_mat(self, a: Edge, b: Edge, n: int) -> Edge:
        """Matrix-matrix product over the same n interleaved qubits."""
        limit = -1
        if self.pool.workers > 1:
            limit = 2 * n - self.par_cutoff - 1
        return self._mat_mat(a, b, 0, n, limit)

    def _mat_mat(self, a: Edge, b: Edge, q0: int, n: int, limit: int) -> Edge:
        if self._cancelled:
            raise ComputationCancelledError("cancelled during multiply")
        aw, at = a
        bw, bt = b
        if aw == ZERO_INDEX or bw == ZERO_INDEX:
            return ZERO_EDGE
        if at == TERMINAL and bt == TERMINAL:
            w = self.vmul(aw, bw)
            if n > q0:
                w = self.vmul(w, self._pow2(n - q0))
            return self.nodes.edge(w, TERMINAL)
        nodes = self.nodes
        qa = nodes.var(at) // 2 if at != TERMINAL else n
        qb = nodes.var(bt) // 2 if bt != TERMINAL else n
        q = min(qa, qb)
        key = (_MATMAT, n, a, b)
        r = self.cache.get(key)
        if r is None:
            if qa == q:
                a00, a01, a10, a11 = self._mat_quadrants(at, q)
            else:
                a00 = a01 = a10 = a11 = (ONE_INDEX, at)
            if qb == q:
                b00, b01, b10, b11 = self._mat_quadrants(bt, q)
            else:
                b00 = b01 = b10 = b11 = (ONE_INDEX, bt)
            q1 = q + 1

            def block(ar0, ar1, bc0, bc1):
                return self._plus(self._mat_mat(ar0, bc0, q1, n, limit),
                                  self._mat_mat(ar1, bc1, q1, n, limit),
                                  limit)

            if 2 * q < limit:
                t11 = self.pool.spawn(block, a10, a11, b01, b11)
                t10 = self.pool.spawn(block, a10, a11, b00, b10)
                t01 = self.pool.spawn(block, a00, a01, b01, b11)
                c00 = block(a00, a01, b00, b10)
                c01 = self.pool.sync(t01)
                c10 = self.pool.sync(t10)
                c11 = self.pool.sync(t11)
            else:
                c00 = block(a00, a01, b00, b10)
                c01 = block(a00, a01, b01, b11)
                c10 = block(a10, a11, b00, b10)
                c11 = block(a10, a11, b01, b11)
            row0 = nodes.make_node(2 * q + 1, c00, c01)
            row1 = nodes.make_node(2 * q + 1, c10, c11)
            r = nodes.make_node(2 * q, row0, row1)
            self.cache.put(key, r)
        scale = self.vmul(aw, bw)
        if q > q0:
            scale = self.vmul(scale, self._pow2(q - q0))
        return self.nodes.edge(self.vmul(scale, r[0]), r[1])

    # -- conjugate transpose -------------------------------------------------

    def dagger(self, m: Edge) -> Edge:
        """Conjugate transpose: swap row/column roles, conjugate weights."""
        mw, mt = m
        dw = self.vconj(mw) if mw != ZERO_INDEX else ZERO_INDEX
        if mt == TERMINAL:
            return self.nodes.edge(dw, TERMINAL)
        key = (_DAGGER, mt)
        r = self.cache.get(key)
        if r is None:
            q = self.nodes.var(mt) // 2
            q00, q01, q10, q11 = self._mat_quadrants(mt, q)
            d00 = self.dagger(q00)
            d01 = self.dagger(q01)
            d10 = self.dagger(q10)
            d11 = self.dagger(q11)
            row0 = self.nodes.make_node(2 * q + 1, d00, d10)
            row1 = self.nodes.make_node(2 * q + 1, d01, d11)
            r = self.nodes.make_node(2 * q, row0, row1)
            self.cache.put(key, r)
        return self.nodes.edge(self.vmul(dw, r[0]), r[1])

    # -- evaluation and norms -----------------------------------------------

    def evaluate(self, v: Edge, basis_state: str) -> complex:
        """Amplitude of one basis state; bit i of the string is qubit i."""
        if basis_state.strip("01"):
            raise LengthMismatchError(
                f"basis state {basis_state!r} must be a bit string")
        n = len(basis_state)
        w, t = v
        if w == ZERO_INDEX:
            return 0j
        acc = self.values.get(w)
        nodes = self.nodes
        while t != TERMINAL:
            var, low, high = nodes.node(t)
            if var >= n:
                raise LengthMismatchError(
                    f"basis state of length {n} too short for variable {var}")
            w, t = high if basis_state[var] == "1" else low
            if w == ZERO_INDEX:
                return 0j
            acc *= self.values.get(w)
        return acc

    def l2_norm_squared(self, v: Edge, n: int) -> float:
        """Sum of squared amplitude magnitudes over all 2**n states."""
        w, t = v
        if w == ZERO_INDEX:
            return 0.0
        return abs(self.values.get(w)) ** 2 * self._subnorm(t, 0, n)

    def _subnorm(self, t: int, vmin: int, n: int) -> float:
        if t == TERMINAL:
            return 2.0 ** (n - vmin)
        var = self.nodes.var(t)
        key = (t, n)
        acc = self._norm_memo.get(key)
        if acc is None:
            _, (lw, lt), (hw, ht) = self.nodes.node(t)
            acc = 0.0
            if lw != ZERO_INDEX:
                acc += (abs(self.values.get(lw)) ** 2
                        * self._subnorm(lt, var + 1, n))
            if hw != ZERO_INDEX:
                acc += (abs(self.values.get(hw)) ** 2
                        * self._subnorm(ht, var + 1, n))
            self._norm_memo[key] = acc
        return 2.0 ** (var - vmin) * acc

    # -- structural comparison ------------------------------------------------

    def equiv_up_to_factor(self, a: Edge, b: Edge) -> complex | None:
        """Factor c with a = c * b when both diagrams are proportional.

        Requires both edges canonical under the same strategy: then two
        functions are proportional exactly when they share the target
        node.  Returns None when not equivalent.
        """
        aw, at = a
        bw, bt = b
        if at != bt:
            return None
        if aw == ZERO_INDEX and bw == ZERO_INDEX:
            return 1 + 0j
        if aw == ZERO_INDEX or bw == ZERO_INDEX:
            return None
        return self.values.get(aw) / self.values.get(bw)

    # -- construction from dense data (plumbing for loaders and tests) -------

    def vector_from_amplitudes(self, amps) -> Edge:
        """Canonical diagram of a dense vector of length a power of two."""
        size = len(amps)
        n = size.bit_length() - 1
        if 1 << n != size:
            raise LengthMismatchError("amplitude count must be a power of 2")

        def build(lo: int, hi: int, var: int) -> Edge:
            if hi - lo == 1:
                return self.terminal(complex(amps[lo]))
            mid = (lo + hi) // 2
            return self.nodes.make_node(var,
                                        build(lo, mid, var + 1),
                                        build(mid, hi, var + 1))

        return build(0, size, 0)

    def matrix_from_entries(self, entries) -> Edge:
        """Canonical interleaved diagram of a dense 2^n by 2^n matrix."""
        size = len(entries)
        n = size.bit_length() - 1
        if 1 << n != size or any(len(row) != size for row in entries):
            raise LengthMismatchError("matrix must be square, power-of-2 size")

        def build(r: int, c: int, half: int, level: int) -> Edge:
            if half == 0:
                return self.terminal(complex(entries[r][c]))
            h = half // 2
            e00 = build(r, c, h, level + 2)
            e01 = build(r, c + half, h, level + 2)
            e10 = build(r + half, c, h, level + 2)
            e11 = build(r + half, c + half, h, level + 2)
            row0 = self.nodes.make_node(level + 1, e00, e01)
            row1 = self.nodes.make_node(level + 1, e10, e11)
            return self.nodes.make_node(level, row0, row1)

        return build(0, 0, size // 2, 0)
