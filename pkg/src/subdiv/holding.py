"""Holding: eventual constancy of values over aligned blocks of length ``s``.

For ``G_{a,b}`` the predicted holding length is ``a / a'`` where ``a'`` is the
largest divisor of ``a`` coprime to ``b``.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field
from math import gcd, prod
from typing import Optional

import numpy as np

from .engine import ConfigurationError, GameSpec, SGTable, build_table

MIN_BLOCKS = 10


def coprime_part(a: int, b: int) -> int:
    """Largest divisor of ``a`` that is coprime to ``b``."""
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive")
    while (g := gcd(a, b)) > 1:
        a //= g
    return a


def g_sequence(a: int, b: int) -> list[int]:
    """Successive holding factors ``g_i = gcd(a / (g_1...g_{i-1}), b)`` while > 1."""
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive")
    out = []
    rest = a
    while (g := gcd(rest, b)) > 1:
        out.append(g)
        rest //= g
    return out


def holding_bound(a: int, b: int) -> tuple[Optional[int], int]:
    """``(exact, rough)`` bounds on the index where full holding starts.

    The exact bound needs an even ``b``; for odd ``b`` it is ``None`` and a
    warning is issued.  The unsubscripted ``g`` of the general term is read as
    ``g_1``; the rough bound ``a * b**a`` is the one to rely on.
    """
    rough = a * b**a
    if b % 2:
        warnings.warn("exact holding bound is only defined for even b", stacklevel=2)
        return None, rough
    d = b // 2
    gs = g_sequence(a, b)
    k = len(gs)
    P = [prod(gs[:j]) for j in range(k + 1)]
    terms = [1]
    for j in range(1, k + 1):
        if j == k:
            terms.append((2 * d) ** k * P[k])
        elif j == 1:
            terms.append(2 * d * gs[0])
        else:
            terms.append((2 * d * gs[0]) ** j * P[j])
    return (4 * d * d + 2 * d + 2) * sum(terms), rough


def _constant_blocks(table: SGTable, s: int) -> np.ndarray:
    K = table.n_max // s
    blocks = table.values[1 : K * s + 1].reshape(K, s)
    return (blocks == blocks[:, :1]).all(axis=1)


def detect_holding(table: SGTable, s: int, min_blocks: int = MIN_BLOCKS) -> Optional[int]:
    """First index of the earliest block from which every complete block of
    length ``s`` is constant, or ``None``.

    Blocks are ``{ks-s+1, ..., ks}``.  At least ``min_blocks`` blocks must
    confirm the onset.
    """
    if s < 1:
        raise ValueError("block length must be >= 1")
    need = max(3 * s * table.spec.b, s * min_blocks)
    if table.n_max < need:
        raise ConfigurationError(f"table of length {table.n_max} too short; need {need}")
    const = _constant_blocks(table, s)
    bad = np.nonzero(~const)[0]
    m = int(bad[-1]) + 2 if bad.size else 1  # 1-based block number
    if len(const) - m + 1 < min_blocks:
        return None
    return m * s - s + 1


def detect_holding_length(table: SGTable, min_blocks: int = MIN_BLOCKS) -> int:
    """Longest block length, among divisors of ``a*b``, that eventually holds."""
    n = table.spec.a * table.spec.b
    best = 1
    for s in range(2, n + 1):
        if n % s == 0 and table.n_max >= max(3 * s * table.spec.b, s * min_blocks):
            if detect_holding(table, s, min_blocks) is not None:
                best = s
    return best


def verify_persistence(table: SGTable, g: int) -> tuple[bool, Optional[int]]:
    """Check that each constant block of length ``g`` is followed, ``a`` later,
    by another constant block.

    Returns ``(ok, first_bad_block_start)``; blocks whose indices are fixed by
    overrides or the terminal position are skipped.
    """
    if g < 1:
        raise ValueError("g must be >= 1")
    a = table.spec.a
    if a % g:
        raise ConfigurationError(f"g={g} does not divide a={a}")
    const = _constant_blocks(table, g)
    shift = a // g
    fixed = max([1, *table.spec.override_map])
    for k in range(len(const) - shift):
        start = k * g + a + 1
        if start <= fixed:
            continue
        if const[k] and not const[k + shift]:
            return False, start
    return True, None


def block_values(table: SGTable, a: int) -> np.ndarray:
    """The subsequence ``SG(a*n)`` for ``n = 1 .. n_max // a`` (index 0 padding)."""
    if a < 1:
        raise ValueError("a must be >= 1")
    out = np.zeros(table.n_max // a + 1, dtype=np.uint8)
    out[1:] = table.values[a::a][: len(out) - 1]
    out.setflags(write=False)
    return out


@dataclass
class HoldingProfile:
    a: int
    b: int
    g_sequence: list[int]
    a_prime: int
    s: int
    rough_bound: int
    exact_bound: Optional[int]
    onset_observed: Optional[int] = None
    detected_length: Optional[int] = None
    persistence_ok: Optional[bool] = None
    persistence_counterexample: Optional[int] = None
    n_max: Optional[int] = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def holding_profile(spec: GameSpec, n_max: int, table: Optional[SGTable] = None) -> HoldingProfile:
    """Predicted and observed holding for one game."""
    a, b = spec.a, spec.b
    gs = g_sequence(a, b)
    ap = coprime_part(a, b)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        exact, rough = holding_bound(a, b)
    prof = HoldingProfile(a, b, gs, ap, a // ap, rough, exact, n_max=n_max)
    if b % 2:
        prof.notes.append("exact bound omitted: b is odd")
    if table is None:
        table = build_table(spec, n_max)
    prof.onset_observed = detect_holding(table, prof.s)
    prof.detected_length = detect_holding_length(table)
    if gs:
        prof.persistence_ok, prof.persistence_counterexample = verify_persistence(table, gs[0])
    else:
        prof.persistence_ok = True
    return prof
