import os
import sys

import pytest

from evdd import DDEngine

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CIRCUITS_DIR = os.path.join(REPO_ROOT, "benchmarks", "circuits")
EQPAIRS_DIR = os.path.join(REPO_ROOT, "benchmarks", "eqpairs")

# Helping in the fork-join pool nests task frames on waiter stacks.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 1 << 16))


@pytest.fixture
def engine():
    """Small-table engine, torn down after the test."""
    e = DDEngine(workers=1, node_table_log2=17, value_table_log2=17,
                 op_cache_log2=15)
    yield e
    e.close()


@pytest.fixture
def make_engine():
    """Factory for engines with overridable knobs; all closed on exit."""
    made = []

    def factory(**kwargs):
        kwargs.setdefault("workers", 1)
        kwargs.setdefault("node_table_log2", 17)
        kwargs.setdefault("value_table_log2", 17)
        kwargs.setdefault("op_cache_log2", 15)
        e = DDEngine(**kwargs)
        made.append(e)
        return e

    yield factory
    for e in made:
        e.close()


@pytest.fixture(scope="session")
def circuits_dir():
    assert os.path.isdir(CIRCUITS_DIR), "bundled corpus missing"
    return CIRCUITS_DIR


@pytest.fixture(scope="session")
def eqpairs_dir():
    assert os.path.isdir(EQPAIRS_DIR), "bundled eq pairs missing"
    return EQPAIRS_DIR
