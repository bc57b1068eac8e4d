"""Kernels and automata with output for SG sequences read in base ``b``.

The sequence is extended with ``s(0) = 0`` so that the kernel subsequences
``n -> s(b^e n + r)`` start at ``n = 0``.  For ``a > 1`` everything is done on
the block subsequence ``n -> SG(a n)``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .engine import SCHEMA_VERSION, ConfigurationError, GameSpec, SGTable, build_table

DEFAULT_PREFIX = 512


class DfaoValidationError(RuntimeError):
    def __init__(self, n: int, expected: int, got: int):
        super().__init__(f"automaton gives {got} at n={n}, table has {expected}")
        self.n, self.expected, self.got = n, expected, got


def _check_spec(spec: GameSpec) -> None:
    if spec.a > 1:
        rest = spec.a
        from math import gcd

        while (g := gcd(rest, spec.b)) > 1:
            rest //= g
        if rest != 1:
            raise ConfigurationError(
                f"a={spec.a} has a prime factor not dividing b={spec.b}; no automaton is claimed"
            )


def sequence(spec: GameSpec, length: int, table: Optional[SGTable] = None) -> np.ndarray:
    """``s(0..length-1)``: the values (or block values) with ``s(0) = 0``."""
    need = spec.a * (length - 1)
    if table is None:
        table = build_table(spec, max(need, 1))
    elif table.spec != spec:
        raise ConfigurationError("table was built for a different game")
    elif table.n_max < need:
        raise ConfigurationError(f"table covers {table.n_max} indices, need {need}")
    out = np.zeros(length, dtype=np.uint8)
    out[1:] = table.values[spec.a : need + 1 : spec.a]
    return out


@dataclass
class KernelReport:
    base: int
    e_max: int
    prefix_len: int
    counts: list[int]
    stabilized: bool
    block: int = 1

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def kernel_report(
    spec: GameSpec,
    e_max: int,
    L: int = DEFAULT_PREFIX,
    table: Optional[SGTable] = None,
) -> KernelReport:
    """Count distinct length-``L`` prefixes of kernel subsequences up to depth ``e``.

    ``counts[e]`` is cumulative over depths ``0..e``.
    """
    if spec.b < 2 or e_max < 1 or L < 1:
        raise ConfigurationError("need b >= 2, e_max >= 1 and L >= 1")
    _check_spec(spec)
    k = spec.b
    s = sequence(spec, k**e_max * L, table)
    seen: set[bytes] = set()
    counts = []
    for e in range(e_max + 1):
        K = k**e
        rows = s[: K * L].reshape(L, K).T
        for row in np.unique(rows, axis=0):
            seen.add(row.tobytes())
        counts.append(len(seen))
    stable = len(counts) >= 2 and counts[-1] == counts[-2]
    return KernelReport(k, e_max, L, counts, stable, spec.a)


@dataclass(frozen=True)
class Dfao:
    """Automaton reading base-``base`` digits least significant first."""

    base: int
    transitions: tuple[tuple[int, ...], ...]
    outputs: tuple[int, ...]
    start: int = 0
    spec: dict = field(default_factory=dict)

    @property
    def n_states(self) -> int:
        return len(self.outputs)

    def run(self, n: int) -> int:
        if n < 0:
            raise ValueError("n must be non-negative")
        q = self.start
        while n:
            n, x = divmod(n, self.base)
            q = self.transitions[q][x]
        return self.outputs[q]

    def run_many(self, ns: np.ndarray) -> np.ndarray:
        T = np.asarray(self.transitions, dtype=np.int64)
        out = np.asarray(self.outputs, dtype=np.uint8)
        ns = np.asarray(ns, dtype=np.int64).copy()
        q = np.full(ns.shape, self.start, dtype=np.int64)
        while ns.any():
            live = ns > 0
            ns_l, x = np.divmod(ns[live], self.base)
            q[live] = T[q[live], x]
            ns[live] = ns_l
        return out[q]

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "spec": self.spec,
            "base": self.base,
            "digit_order": "lsd",
            "start": self.start,
            "states": list(range(self.n_states)),
            "transitions": [list(t) for t in self.transitions],
            "outputs": list(self.outputs),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Dfao":
        if data.get("digit_order", "lsd") != "lsd":
            raise ConfigurationError("only lsd-first automata are supported")
        return cls(
            int(data["base"]),
            tuple(tuple(map(int, t)) for t in data["transitions"]),
            tuple(map(int, data["outputs"])),
            int(data.get("start", 0)),
            dict(data.get("spec", {})),
        )


MAX_LENGTH = 1 << 26


def build_dfao(
    spec: GameSpec,
    validation_bound: int,
    L: int = DEFAULT_PREFIX,
    e_max: Optional[int] = None,
    table: Optional[SGTable] = None,
) -> Dfao:
    """Automaton whose states are kernel classes, validated against the table.

    States are discovered breadth first from the whole sequence; reading digit
    ``j`` at depth ``e`` moves from ``n -> s(b^e n + r)`` to
    ``n -> s(b^(e+1) n + r + j b^e)``.  Without ``e_max`` the depth grows
    until the classes close up.  Raises if they never do or if validation
    fails.
    """
    _check_spec(spec)
    if validation_bound < 1:
        raise ConfigurationError("validation bound must be >= 1")
    k = spec.b
    depths = [e_max] if e_max is not None else range(2, 64)
    for e in depths:
        length = k**e * L
        if e_max is None and length > MAX_LENGTH:
            break
        length = max(length, validation_bound + 1)
        need = spec.a * (length - 1)
        if table is None or table.n_max < need:
            table = build_table(spec, need)
        s = sequence(spec, length, table)
        closed = _close(s, k, L, e)
        if closed is not None:
            break
    else:
        closed = None
    if closed is None:
        raise ConfigurationError("kernel not stabilized within the depth limit (raise e_max or L)")
    trans, reps = closed
    outs = [int(s[r]) for _, r in reps]
    info = {**spec.to_dict(), "block": spec.a, "prefix_len": L}
    dfao = Dfao(k, tuple(map(tuple, trans)), tuple(outs), 0, info)

    got = dfao.run_many(np.arange(1, validation_bound + 1, dtype=np.int64))
    want = s[1 : validation_bound + 1]
    bad = np.nonzero(got != want)[0]
    if bad.size:
        i = int(bad[0])
        raise DfaoValidationError(i + 1, int(want[i]), int(got[i]))
    return dfao


def _close(s: np.ndarray, k: int, L: int, e_max: int):
    """Breadth-first class discovery; ``None`` if a new class needs depth ``e_max``."""

    def prefix(e: int, r: int) -> bytes:
        return s[r : r + k**e * L : k**e].tobytes()

    ids = {prefix(0, 0): 0}
    reps = [(0, 0)]
    trans = []
    queue = deque([0])
    while queue:
        q = queue.popleft()
        e, r = reps[q]
        row = []
        for j in range(k):
            e2, r2 = e + 1, r + j * k**e
            if e2 > e_max:
                return None
            key = prefix(e2, r2)
            if key not in ids:
                if e2 == e_max:
                    return None
                ids[key] = len(reps)
                reps.append((e2, r2))
                queue.append(ids[key])
            row.append(ids[key])
        trans.append(row)
    return trans, reps
