import sys
from functools import lru_cache

import pytest

from subdiv.engine import GameSpec, VirtualValue, build_table

ACCEPTANCE_LINES: list[str] = []


def record(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@lru_cache(maxsize=None)
def table_for(a: int, b: int, n_max: int, overrides: tuple = ()):
    return build_table(GameSpec(a, b, overrides=overrides), n_max)


@pytest.fixture(scope="session")
def t12():
    return table_for(1, 2, 200_000)


@pytest.fixture(scope="session")
def t14():
    return table_for(1, 4, 200_000)


@pytest.fixture(scope="session")
def t22():
    return table_for(2, 2, 200_000)


def game_tree_values(spec: GameSpec, n_max: int) -> dict[int, int]:
    """Grundy values by explicit top-down search over the move graph."""
    sys.setrecursionlimit(max(10_000, 4 * n_max))
    over = spec.override_map
    virtual = spec.boundary.value if isinstance(spec.boundary, VirtualValue) else None

    @lru_cache(maxsize=None)
    def value(n: int) -> int:
        if n in over:
            return over[n]
        if n == 1:
            return 0
        options = set()
        if n - spec.a >= 1:
            options.add(value(n - spec.a))
        elif virtual is not None:
            options.add(virtual)
        options.add(value(-(-n // spec.b)))
        g = 0
        while g in options:
            g += 1
        return g

    for n in range(1, n_max + 1):
        value(n)
    return {n: value(n) for n in range(1, n_max + 1)}


def minimax_wins(spec: GameSpec, n_max: int) -> dict[int, bool]:
    """Win/loss for the player to move, plain game normal play, overrides ignored."""
    win = {1: False}
    for n in range(2, n_max + 1):
        kids = [-(-n // spec.b)]
        if n - spec.a >= 1:
            kids.append(n - spec.a)
        win[n] = any(not win[k] for k in kids)
    return win
