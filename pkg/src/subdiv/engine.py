"""Sprague-Grundy tables for the subtraction-division games ``G_{a,b}``.

From a total ``n`` a player may move to ``n - a`` or to ``ceil(n / b)``; the
position ``1`` is terminal.  Every position has at most two options, so all
values lie in ``{0, 1, 2}``.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

SCHEMA_VERSION = 1


class ConfigurationError(ValueError):
    """Raised for game parameters or table requests that cannot be honoured."""


def mex(values: Iterable[int]) -> int:
    """Smallest non-negative integer not contained in ``values``."""
    seen = set(values)
    m = 0
    while m in seen:
        m += 1
    return m


@dataclass(frozen=True)
class VirtualValue:
    """A subtraction below position 1 contributes ``value`` to the mex set."""

    value: int = 1

    def __post_init__(self):
        if self.value not in (0, 1, 2):
            raise ConfigurationError(f"virtual value must be 0, 1 or 2, got {self.value}")


@dataclass(frozen=True)
class SubtractDisallowed:
    """A subtraction below position 1 is simply not a move."""


Boundary = Union[VirtualValue, SubtractDisallowed]


@dataclass(frozen=True)
class GameSpec:
    """Parameters of one game family.

    ``overrides`` pins the values of individual indices (misère play, perturbed
    prefixes).  Non-overridden indices above 1 follow the recursion; index 1 is
    0 unless overridden.
    """

    a: int
    b: int
    boundary: Boundary = field(default_factory=VirtualValue)
    overrides: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if int(self.a) != self.a or self.a < 1:
            raise ConfigurationError(f"a must be a positive integer, got {self.a!r}")
        if int(self.b) != self.b or self.b < 2:
            raise ConfigurationError(f"b must be an integer >= 2, got {self.b!r}")
        if not isinstance(self.boundary, (VirtualValue, SubtractDisallowed)):
            raise ConfigurationError(f"unknown boundary convention {self.boundary!r}")
        ov = self.overrides
        if isinstance(ov, Mapping):
            ov = ov.items()
        ov = tuple(sorted((int(i), int(v)) for i, v in ov))
        for i, v in ov:
            if i < 1:
                raise ConfigurationError(f"override index must be >= 1, got {i}")
            if v not in (0, 1, 2):
                raise ConfigurationError(f"override value must be 0, 1 or 2, got {v} at {i}")
        if len({i for i, _ in ov}) != len(ov):
            raise ConfigurationError("duplicate override index")
        object.__setattr__(self, "overrides", ov)

    @property
    def override_map(self) -> dict[int, int]:
        return dict(self.overrides)

    @property
    def misere(self) -> bool:
        return self.override_map.get(1, 0) == 1

    def to_dict(self) -> dict:
        if isinstance(self.boundary, VirtualValue):
            boundary = {"kind": "virtual", "value": self.boundary.value}
        else:
            boundary = {"kind": "disallowed"}
        return {
            "a": self.a,
            "b": self.b,
            "boundary": boundary,
            "overrides": [[i, v] for i, v in self.overrides],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "GameSpec":
        bd = data.get("boundary", {"kind": "virtual", "value": 1})
        if bd.get("kind") == "disallowed":
            boundary: Boundary = SubtractDisallowed()
        else:
            boundary = VirtualValue(int(bd.get("value", 1)))
        return cls(int(data["a"]), int(data["b"]), boundary, tuple(map(tuple, data.get("overrides", ()))))


class Outcome(enum.Enum):
    FIRST_PLAYER_WIN = "FirstPlayerWin"
    FIRST_PLAYER_LOSS = "FirstPlayerLoss"


class MoveKind(enum.Enum):
    SUBTRACT = "subtract"
    DIVIDE = "divide"


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    target: int


@dataclass(frozen=True, eq=False)
class SGTable:
    """Dense, read-only table of values for indices ``1..n_max``.

    ``values[0]`` is padding and carries no meaning.
    """

    spec: GameSpec
    n_max: int
    values: np.ndarray

    def __getitem__(self, n: int) -> int:
        return sg_value(self, n)

    def __len__(self) -> int:
        return self.n_max

    def __eq__(self, other):
        if not isinstance(other, SGTable):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.n_max == other.n_max
            and np.array_equal(self.values, other.values)
        )

    def as_list(self) -> list[int]:
        return self.values[1:].tolist()

    def children(self, n: int) -> list[tuple[MoveKind, int]]:
        """Legal moves from ``n`` that land on a real position."""
        _check_index(self, n)
        if n == 1:
            return []
        out = []
        if n - self.spec.a >= 1:
            out.append((MoveKind.SUBTRACT, n - self.spec.a))
        out.append((MoveKind.DIVIDE, -(-n // self.spec.b)))
        return out

    def is_recursive(self, n: int) -> bool:
        """True when the value at ``n`` comes from the mex recursion."""
        return n >= 2 and n not in self.spec.override_map


def build_table(spec: GameSpec, n_max: int) -> SGTable:
    """Compute values for ``1..n_max`` bottom-up in a single pass."""
    if int(n_max) != n_max or n_max < 1:
        raise ConfigurationError(f"n_max must be a positive integer, got {n_max!r}")
    n_max = int(n_max)
    overrides = spec.override_map
    if overrides and max(overrides) > n_max:
        raise ConfigurationError(
            f"override index {max(overrides)} lies beyond n_max={n_max}"
        )
    a, b = spec.a, spec.b
    virtual = spec.boundary.value if isinstance(spec.boundary, VirtualValue) else None

    v = bytearray(n_max + 1)
    for i, x in overrides.items():
        v[i] = x
    for n in range(2, n_max + 1):
        if n in overrides:
            continue
        q = v[-(-n // b)]
        if n > a:
            s = v[n - a]
        elif virtual is not None:
            s = virtual
        else:
            s = q
        m = 0
        while m == s or m == q:
            m += 1
        v[n] = m
    values = np.frombuffer(bytes(v), dtype=np.uint8)
    return SGTable(spec, n_max, values)


def _check_index(table: SGTable, n: int) -> None:
    if not 1 <= n <= table.n_max:
        raise IndexError(f"index {n} outside 1..{table.n_max}")


def sg_value(table: SGTable, n: int) -> int:
    _check_index(table, n)
    return int(table.values[n])


def outcome(table: SGTable, n: int) -> Outcome:
    return Outcome.FIRST_PLAYER_WIN if sg_value(table, n) else Outcome.FIRST_PLAYER_LOSS


def best_move(table: SGTable, n: int) -> Optional[Move]:
    """A move to a zero-valued position, preferring subtraction.

    Returns ``None`` for losing and terminal positions, and also when the only
    zero in the option set is a virtual boundary value.
    """
    if sg_value(table, n) == 0:
        return None
    for kind, target in table.children(n):
        if table.values[target] == 0:
            return Move(kind, target)
    return None


def to_csv(table: SGTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "sg"])
    for n, x in enumerate(table.values[1:].tolist(), start=1):
        w.writerow([n, x])
    return buf.getvalue()


def to_json(table: SGTable) -> str:
    return json.dumps(
        {"schema": SCHEMA_VERSION, "spec": table.spec.to_dict(), "values": table.as_list()}
    )


def from_json(text: str) -> SGTable:
    data = json.loads(text)
    spec = GameSpec.from_dict(data["spec"])
    vals = np.array([0] + list(data["values"]), dtype=np.uint8)
    vals.setflags(write=False)
    return SGTable(spec, len(vals) - 1, vals)
