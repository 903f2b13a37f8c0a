"""Shared fixtures.

Certified transition runs are the expensive objects in this suite; a
session-scoped memo lets the basis tests and the acceptance checks share
one run per dimension vector.
"""

from __future__ import annotations

import itertools

import pytest

from semibasis import HallCache, Quiver, transition_matrix


def n2_grades() -> list[tuple[int, ...]]:
    """All dimension vectors on two vertices with total at most 6."""
    return [
        d for d in itertools.product(range(7), repeat=2) if sum(d) <= 6
    ]


def n3_grades() -> list[tuple[int, ...]]:
    """All dimension vectors on three vertices bounded by (2, 2, 2)."""
    return list(itertools.product(range(3), repeat=3))


@pytest.fixture(scope="session")
def hall_cache(tmp_path_factory):
    cache = HallCache(tmp_path_factory.mktemp("hall"))
    yield cache
    cache.close()


@pytest.fixture(scope="session")
def certified(hall_cache):
    """Memoized access to certified transition runs, keyed by (n, d)."""
    runs = {}

    def get(n: int, d: tuple[int, ...]):
        key = (n, tuple(d))
        if key not in runs:
            runs[key] = transition_matrix(Quiver(n), key[1], hall_cache=hall_cache)
        return runs[key]

    return get
