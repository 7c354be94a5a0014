import random
from concurrent.futures import ThreadPoolExecutor

import pytest

from evdd.errors import InvalidIndexError, NonFiniteValueError, TableFullError
from evdd.value_store import (DEFAULT_TOLERANCE, ONE_INDEX, ZERO_INDEX,
                              ValueStore, round_to_grid, values_close)

DELTA = DEFAULT_TOLERANCE


def store(log2=12, tol=DELTA):
    return ValueStore(log2_size=log2, tolerance=tol)


class TestFindOrPut:
    def test_float_noise_merges(self):
        vs = store()
        a = vs.find_or_put(0.3 + 0j)
        b = vs.find_or_put(0.30000000000000004 + 0j)
        assert a == b

    def test_idempotent(self):
        vs = store()
        c = 0.123456789 + 0.987654321j
        assert vs.find_or_put(c) == vs.find_or_put(c)

    def test_two_delta_apart_distinct(self):
        vs = store()
        a = 0.5
        assert vs.find_or_put(a + 0j) != vs.find_or_put(a + 2 * DELTA + 0j)

    def test_read_your_writes(self):
        vs = store()
        c = -0.25 + 0.75j
        v = vs.get(vs.find_or_put(c))
        assert abs(v.real - c.real) < DELTA and abs(v.imag - c.imag) < DELTA

    def test_stored_value_never_changes(self):
        vs = store()
        i = vs.find_or_put(0.7 + 0j)
        first = vs.get(i)
        vs.find_or_put(0.7 + DELTA / 2 + 0j)
        assert vs.get(i) == first

    def test_rejects_non_finite(self):
        vs = store()
        for bad in (float("nan") + 0j, float("inf") + 0j, 1 - 1j * float("inf")):
            with pytest.raises(NonFiniteValueError):
                vs.find_or_put(bad)

    def test_table_full(self):
        vs = store(log2=3)
        with pytest.raises(TableFullError):
            for k in range(20):
                vs.find_or_put(complex(k, -k))


class TestReservedSlots:
    def test_zero_and_one_fixed(self):
        vs = store()
        assert vs.get(ZERO_INDEX) == 0j
        assert vs.get(ONE_INDEX) == 1 + 0j

    def test_near_zero_snaps(self):
        vs = store()
        assert vs.find_or_put(complex(DELTA / 3, -DELTA / 3)) == ZERO_INDEX

    def test_near_one_snaps(self):
        vs = store()
        assert vs.find_or_put(complex(1 - DELTA / 2, DELTA / 2)) == ONE_INDEX

    def test_component_snap_to_exact_zero(self):
        vs = store()
        i = vs.find_or_put(complex(DELTA / 2, 0.5))
        assert vs.get(i) == 0.5j


class TestGet:
    def test_never_written(self):
        vs = store()
        with pytest.raises(InvalidIndexError):
            vs.get(1234)
        with pytest.raises(InvalidIndexError):
            vs.get(1 << 30)


class TestValuesClose:
    def test_reflexive(self):
        assert values_close(1 + 0j, 1 + 0j)

    def test_within_delta(self):
        assert values_close(0.5 + 0.5j, 0.5 + (0.5 + DELTA / 2) * 1j)

    def test_outside_delta(self):
        assert not values_close(0j, 2 * DELTA + 0j)

    def test_componentwise_not_modulus(self):
        # Both components must be close; a small complex modulus with one
        # large component does not qualify.
        assert not values_close(0j, complex(1.5 * DELTA, 0.0), DELTA)


def test_zero_tolerance_degrades_to_exact_dedup():
    vs = ValueStore(log2_size=10, tolerance=0.0)
    assert vs.find_or_put(0.5 + 0.25j) == vs.find_or_put(0.5 + 0.25j)
    assert vs.find_or_put(0.5 + 0.25j) != vs.find_or_put(0.5 + 0.2500001j)


def test_round_to_grid_half_away_from_zero():
    assert round_to_grid(1.5, 1.0) == 2
    assert round_to_grid(-1.5, 1.0) == -2
    assert round_to_grid(0.49, 1.0) == 0
    assert round_to_grid(-0.49, 1.0) == 0


def test_fuzz_inserted_values_survive():
    vs = ValueStore(log2_size=18)
    rng = random.Random(99)
    seen = {}
    for _ in range(100_000):
        c = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        i = vs.find_or_put(c)
        if i in seen:
            assert vs.get(i) == seen[i]
        else:
            seen[i] = vs.get(i)
    for i, v in seen.items():
        assert vs.get(i) == v


def test_concurrent_same_value_single_representative():
    vs = store()
    c = 0.333333333 + 0.666666666j

    def insert(_):
        return vs.find_or_put(c)

    with ThreadPoolExecutor(max_workers=8) as pool:
        indices = set(pool.map(insert, range(200)))
    assert len(indices) == 1


def test_concurrent_mixed_inserts_consistent():
    vs = ValueStore(log2_size=16)
    rng = random.Random(5)
    values = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
              for _ in range(500)]

    def insert_all(_):
        return [vs.find_or_put(v) for v in values]

    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(insert_all, range(8)))
    for other in results[1:]:
        assert other == results[0]
