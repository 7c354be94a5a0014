import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from evdd.circuit import GateSpec
from evdd.gates import build_gate_dd
from evdd.parallel import WorkerPool
from evdd.sim import simulate

from test_ops import amplitudes, rand_amps


class TestWorkerPool:
    def test_single_worker_runs_inline(self):
        pool = WorkerPool(1)
        log = []
        task = pool.spawn(log.append, "spawned")
        assert log == []
        pool.sync(task)
        assert log == ["spawned"]
        pool.close()

    def test_results_propagate(self):
        pool = WorkerPool(4)
        tasks = [pool.spawn(lambda k=k: k * k) for k in range(50)]
        assert [pool.sync(t) for t in tasks] == [k * k for k in range(50)]
        pool.close()

    def test_exceptions_propagate(self):
        pool = WorkerPool(3)

        def boom():
            raise ValueError("inner failure")

        task = pool.spawn(boom)
        with pytest.raises(ValueError, match="inner failure"):
            pool.sync(task)
        pool.close()

    def test_nested_fork_join(self):
        pool = WorkerPool(4)

        def fib(k):
            if k < 2:
                return k
            t = pool.spawn(fib, k - 2)
            a = fib(k - 1)
            return a + pool.sync(t)

        assert fib(16) == 987
        pool.close()

    def test_each_task_runs_once(self):
        pool = WorkerPool(4)
        counter = []
        lock = threading.Lock()

        def bump():
            with lock:
                counter.append(1)
            time.sleep(0.001)

        tasks = [pool.spawn(bump) for _ in range(100)]
        for t in tasks:
            pool.sync(t)
        time.sleep(0.05)
        assert len(counter) == 100
        pool.close()


class TestSharedTables:
    def test_concurrent_make_node_single_winner(self, engine):
        results = []

        def build(_):
            return engine.nodes.make_node(0, engine.terminal(0.6),
                                          engine.terminal(0.8))

        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(build, range(100)))
        assert len(set(results)) == 1
        count, _ = engine.nodes.lookup_stats()
        assert count == 1

    def test_concurrent_ops_share_engine(self, make_engine):
        engine = make_engine(workers=2, par_cutoff=1)
        rng = random.Random(9)
        amps = rand_amps(rng, 5)
        v = engine.vector_from_amplitudes(amps)
        h_all = [build_gate_dd(engine, 5, GateSpec("h", targets=(q,)))
                 for q in range(5)]

        def apply_chain(_):
            state = v
            for g in h_all:
                state = engine.mat_vec(g, state, 5)
            return amplitudes(engine, state, 5)

        with ThreadPoolExecutor(max_workers=4) as pool:
            outs = list(pool.map(apply_chain, range(4)))
        for other in outs[1:]:
            assert np.max(np.abs(other - outs[0])) < 1e-12


class TestParallelKernels:
    def test_mat_vec_same_result_any_worker_count(self, make_engine):
        rng = random.Random(23)
        amps = rand_amps(rng, 6)
        results = []
        for workers in (1, 2, 4):
            engine = make_engine(workers=workers, par_cutoff=1)
            v = engine.vector_from_amplitudes(amps)
            for q in range(6):
                g = build_gate_dd(engine, 6, GateSpec("h", targets=(q,)))
                v = engine.mat_vec(g, v, 6)
            results.append(amplitudes(engine, v, 6))
        for other in results[1:]:
            assert np.max(np.abs(other - results[0])) < 1e-9

    def test_cancellation_stops_parallel_run(self, make_engine):
        from evdd.circuit import Circuit
        from evdd.errors import ComputationCancelledError
        rng = random.Random(31)
        ops = []
        for layer in range(6):
            for q in range(12):
                ops.append(GateSpec("u3", (rng.uniform(0, 3),
                                           rng.uniform(-3, 3),
                                           rng.uniform(-3, 3)), (), (q,)))
            for q in range(12):
                ops.append(GateSpec("cx", (), (q,), ((q + 1) % 12,)))
        engine = make_engine(workers=2, node_table_log2=20,
                             value_table_log2=20)
        timer = threading.Timer(0.3, engine.cancel)
        timer.start()
        t0 = time.perf_counter()
        with pytest.raises(ComputationCancelledError):
            simulate(engine, Circuit(12, ops))
        assert time.perf_counter() - t0 < 10.0
        timer.cancel()
