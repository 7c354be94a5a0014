"""Fork-join task pool for recursive diagram operations.

``spawn`` enqueues a closure that any idle worker may steal; ``sync``
collects its result, running the task inline when nobody claimed it yet
and helping with other queued tasks while waiting otherwise.  Each task
is executed exactly once: execution rights are a non-blocking lock
acquire, so a task popped by a worker after its spawner already claimed
it is simply skipped.

With one worker the pool starts no threads and ``sync`` runs everything
inline, which doubles as the deterministic sequential baseline.
"""

from __future__ import annotations

import sys
import threading
from collections import deque


class Task:
    __slots__ = ("_fn", "_args", "_claim", "done", "result", "exception")

    def __init__(self, fn, args):
        self._fn = fn
        self._args = args
        self._claim = threading.Lock()
        self.done = threading.Event()
        self.result = None
        self.exception = None

    def try_run(self) -> bool:
        """Execute if nobody has yet; returns whether this call ran it."""
        if not self._claim.acquire(blocking=False):
            return False
        try:
            self.result = self._fn(*self._args)
        except BaseException as exc:
            self.exception = exc
        self.done.set()
        return True


class WorkerPool:
    def __init__(self, workers: int = 1):
        if workers < 1:
            raise ValueError("need at least one worker")
        self.workers = workers
        self._queue: deque[Task] = deque()
        self._cv = threading.Condition()
        self._shutdown = False
        self._threads: list[threading.Thread] = []
        if workers > 1:
            # Helping nests task frames on the waiter's stack; give deep
            # recursions headroom.
            sys.setrecursionlimit(max(sys.getrecursionlimit(), 1 << 16))
            for i in range(workers - 1):
                t = threading.Thread(target=self._worker_loop,
                                     name=f"evdd-worker-{i}", daemon=True)
                t.start()
                self._threads.append(t)

    def spawn(self, fn, *args) -> Task:
        task = Task(fn, args)
        if self.workers > 1:
            with self._cv:
                self._queue.appendleft(task)
                self._cv.notify()
        return task

    def sync(self, task: Task):
        if not task.try_run():
            while not task.done.is_set():
                other = self._steal(newest=True)
                if other is not None:
                    other.try_run()
                else:
                    task.done.wait(0.0005)
        if task.exception is not None:
            raise task.exception
        return task.result

    def _steal(self, newest: bool) -> Task | None:
        with self._cv:
            if not self._queue:
                return None
            return self._queue.popleft() if newest else self._queue.pop()

    def _worker_loop(self):
        while True:
            with self._cv:
                while not self._queue and not self._shutdown:
                    self._cv.wait()
                if self._shutdown and not self._queue:
                    return
                task = self._queue.pop()
            task.try_run()

    def close(self):
        with self._cv:
            self._shutdown = True
            self._cv.notify_all()
        for t in self._threads:
            t.join(timeout=2.0)
        self._threads.clear()
