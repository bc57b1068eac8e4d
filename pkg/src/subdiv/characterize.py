"""Zero/non-zero oracles for ``SG_{a,2d}`` built from base-2d digit patterns.

Every oracle returns a :class:`ZeroVerdict`; ``UNKNOWN`` means the index is
below the closed-form regime and must be read from a table.  The oracles
never guess.
"""

from __future__ import annotations

import enum
from collections.abc import Callable
from dataclasses import dataclass, field
from math import gcd
from typing import Optional

from .digits import first_even_block_length, to_digits
from .engine import ConfigurationError, GameSpec, SGTable, build_table

MAX_REPORTED = 100


class Verdict(enum.Enum):
    ZERO = "Zero"
    NONZERO = "NonZero"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ZeroVerdict:
    verdict: Verdict
    rule_fired: str
    steps: int = 0
    reduced: Optional[int] = None

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict.value, "rule": self.rule_fired, "steps": self.steps}
        if self.reduced is not None:
            d["reduced"] = self.reduced
        return d


ZERO, NONZERO, UNKNOWN = Verdict.ZERO, Verdict.NONZERO, Verdict.UNKNOWN


def _flip(zero: bool, steps: int) -> Verdict:
    if steps % 2:
        zero = not zero
    return ZERO if zero else NONZERO


def residue_rule(n: int, d: int) -> ZeroVerdict:
    """Verdict from ``n mod 4d`` alone."""
    ell = n % (4 * d)
    if ell % 2 == 0:
        return ZeroVerdict(NONZERO, "residue-even")
    if ell > 2 * d:
        return ZeroVerdict(ZERO, "residue-upper-odd")
    return ZeroVerdict(UNKNOWN, "residue-lower-odd")


def characterize_1_2d(n: int, d: int, literal: bool = False) -> ZeroVerdict:
    """Complete zero characterization of ``SG_{1,2d}(n)``.

    With an odd first digit, the run of ``k`` even digits after it is removed
    one digit at a time, each removal flipping zero/non-zero.  When an odd
    digit ends the run the chain stops on a zero.  When the run reaches the
    top of the number the chain stops inside the first block, where every odd
    index except 1 is non-zero once ``2d > 2``.

    ``literal=True`` treats both endings alike (zero iff ``k`` even), which is
    wrong for ``d >= 2`` on indices of the form ``o e^k`` with ``n > 1``.
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    base = 2 * d
    n0, first = divmod(n, base)
    if first % 2 == 0:
        return ZeroVerdict(NONZERO, "even-first-digit")
    k = 0
    terminated = False
    while n0:
        n0, x = divmod(n0, base)
        if x % 2:
            terminated = True
            break
        k += 1
    if terminated or literal or d == 1:
        return ZeroVerdict(_flip(True, k), "even-block", steps=k)
    # the chain ends on a single odd digit: index 1 (zero) or 3..2d-1 (non-zero)
    end_zero = n == 1
    return ZeroVerdict(_flip(end_zero, k), "even-block-to-first-block", steps=k)


def perturbed_thresholds(d: int, N: int) -> dict[str, int]:
    """Index thresholds above which the perturbed-prefix lemmas apply."""
    return {
        "even": 2 * d * N,
        "upper_odd": 4 * d * d * N - 2 * d + 1,
        "lower_odd": 4 * d * N + 1,
        "reduced_floor": 2 * d * N + 1,
        "table": 4 * d * d * N,
    }


def _perturbed_core(
    n: int,
    d: int,
    th: dict[str, int],
    lookup: Callable[[int], int],
) -> ZeroVerdict:
    base = 2 * d
    ell = n % (2 * base)
    if ell % 2 == 0:
        if n >= th["even"]:
            return ZeroVerdict(NONZERO, "even-residue")
        return ZeroVerdict(UNKNOWN, "below-threshold")
    if ell > d * 2:
        if n >= th["upper_odd"]:
            return ZeroVerdict(ZERO, "upper-odd-residue")
        return ZeroVerdict(UNKNOWN, "below-threshold")
    if n < th["lower_odd"]:
        return ZeroVerdict(UNKNOWN, "below-threshold")
    floor = th["reduced_floor"]
    first = n % base
    m = n
    k = 0
    while True:
        high = m // base
        if high == 0 or (high % base) % 2:
            break
        cand = first + base * (high // base)
        if cand < floor:
            break
        m = cand
        k += 1
    second_odd = (m // base) % base % 2 == 1
    if second_odd and m >= th["upper_odd"]:
        return ZeroVerdict(_flip(True, k), "removal-closed-form", steps=k, reduced=m)
    return ZeroVerdict(_flip(lookup(m) == 0, k), "removal-lookup", steps=k, reduced=m)


def characterize_perturbed(
    n: int,
    d: int,
    N: int,
    prefix_table: SGTable,
    min_index: Optional[int] = None,
    min_reduced: Optional[int] = None,
) -> ZeroVerdict:
    """Zero verdict for ``G_{1,2d}`` whose first ``N - 1`` values are arbitrary.

    ``min_index`` and ``min_reduced`` replace the lower-odd threshold and the
    floor for the reduced index, for probing tighter bounds than the proven
    ones.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    th = perturbed_thresholds(d, N)
    if prefix_table.n_max < th["table"]:
        raise ConfigurationError(
            f"prefix table covers {prefix_table.n_max} indices, need {th['table']}"
        )
    if min_index is not None:
        th["lower_odd"] = min_index
    if min_reduced is not None:
        th["reduced_floor"] = min_reduced

    def lookup(i: int) -> int:
        if i > prefix_table.n_max:
            raise ConfigurationError(f"reduced index {i} beyond prefix table")
        return int(prefix_table.values[i])

    return _perturbed_core(n, d, th, lookup)


def coprime_free(a: int, b: int) -> bool:
    """True when every prime factor of ``a`` divides ``b``."""
    while (g := gcd(a, b)) > 1:
        a //= g
    return a == 1


def characterize_a_2d(
    index: int,
    a: int,
    d: int,
    prefix_table: SGTable,
    prefix_len: Optional[int] = None,
) -> ZeroVerdict:
    """Zero verdict for ``SG_{a,2d}(index)`` when ``a`` has no prime factor outside ``2d``.

    Above ``a (2d)^a`` values hold in blocks of ``a`` and the verdict is taken
    for the block value ``SG(a * n)``.  By default the digit thresholds
    ``(2d)^(a+1)``, ``(2d)^(a+2)`` and ``a (2d)^(a+2)`` are used as stated;
    passing ``prefix_len`` instead treats the block values as a ``G_{1,2d}``
    sequence whose first ``prefix_len - 1`` terms are arbitrary.
    """
    b = 2 * d
    if not coprime_free(a, b):
        raise ConfigurationError(f"a={a} has a prime factor not dividing {b}")
    if index < 1:
        raise ValueError("index must be >= 1")
    hold = a * b**a
    if index > hold:
        n = -(-index // a)
        rule = "holding"
    elif index % a == 0:
        n = index // a
        rule = "block-end"
    else:
        return ZeroVerdict(UNKNOWN, "before-holding")

    def lookup(i: int) -> int:
        if a * i > prefix_table.n_max:
            raise ConfigurationError(f"block {i} beyond prefix table")
        return int(prefix_table.values[a * i])

    if prefix_len is not None:
        v = _perturbed_core(n, d, perturbed_thresholds(d, prefix_len), lookup)
        return ZeroVerdict(v.verdict, f"{rule}/{v.rule_fired}", v.steps, v.reduced)

    ds = to_digits(n, b).digits
    if ds[0] % 2 == 0:
        if n >= b ** (a + 1):
            return ZeroVerdict(NONZERO, f"{rule}/even-first-digit")
        return ZeroVerdict(UNKNOWN, "below-threshold")
    if len(ds) >= 2 and ds[1] % 2:
        if n >= b ** (a + 2):
            return ZeroVerdict(ZERO, f"{rule}/oo")
        return ZeroVerdict(UNKNOWN, "below-threshold")
    stop = a * b ** (a + 2)
    k = first_even_block_length(to_digits(n, b))
    removed = 0
    cur = list(ds)
    # block removal is checked before the size floor
    while removed < k and len(cur) >= 2:
        value = sum(x * b**i for i, x in enumerate(cur))
        if value < stop:
            break
        cur.pop(1)
        removed += 1
    m = sum(x * b**i for i, x in enumerate(cur))
    if m >= stop and len(cur) >= 2 and cur[1] % 2:
        return ZeroVerdict(_flip(True, removed), f"{rule}/removal-closed-form", removed, m)
    return ZeroVerdict(_flip(lookup(m) == 0, removed), f"{rule}/removal-lookup", removed, m)


@dataclass
class MismatchReport:
    checked: int = 0
    unknown_count: int = 0
    mismatch_count: int = 0
    mismatches: list[dict] = field(default_factory=list)

    def add(self, n: int, verdict: ZeroVerdict, actual: int) -> None:
        self.mismatch_count += 1
        if len(self.mismatches) < MAX_REPORTED:
            self.mismatches.append({"n": n, "verdict": verdict.verdict.value,
                                    "rule": verdict.rule_fired, "sg": actual})

    @property
    def ok(self) -> bool:
        return self.mismatch_count == 0

    def to_dict(self) -> dict:
        return {
            "checked": self.checked,
            "unknown_count": self.unknown_count,
            "mismatch_count": self.mismatch_count,
            "mismatches": self.mismatches,
        }


ORACLES = ("residue", "theorem1", "theorem1-literal", "perturbed", "theorem2")


def _oracle_fn(name: str, spec: GameSpec, table: SGTable, **kw) -> Callable[[int], ZeroVerdict]:
    if spec.b % 2:
        raise ConfigurationError("characterizations need an even b")
    d = spec.b // 2
    if name in ("residue", "theorem1", "theorem1-literal"):
        if spec.a != 1 or spec.overrides:
            raise ConfigurationError(f"oracle {name!r} needs a=1 without overrides")
        if name == "residue":
            return lambda n: residue_rule(n, d)
        literal = name == "theorem1-literal"
        return lambda n: characterize_1_2d(n, d, literal=literal)
    if name == "perturbed":
        if spec.a != 1:
            raise ConfigurationError("oracle 'perturbed' needs a=1")
        N = kw.pop("N", None) or (max(spec.override_map, default=0) + 1)
        return lambda n: characterize_perturbed(n, d, N, table, **kw)
    if name == "theorem2":
        return lambda n: characterize_a_2d(n, spec.a, d, table, **kw)
    raise ConfigurationError(f"unknown oracle {name!r}; choose from {', '.join(ORACLES)}")


def verify_characterization(
    spec: GameSpec,
    n_max: int,
    oracle: str,
    table: Optional[SGTable] = None,
    start: int = 1,
    **kw,
) -> MismatchReport:
    """Compare an oracle against the engine on ``start..n_max``."""
    if table is None:
        table = build_table(spec, n_max)
    elif table.n_max < n_max:
        raise ConfigurationError("table shorter than n_max")
    fn = _oracle_fn(oracle, spec, table, **kw)
    vals = table.values
    rep = MismatchReport()
    for n in range(start, n_max + 1):
        v = fn(n)
        if v.verdict is UNKNOWN:
            rep.unknown_count += 1
            continue
        rep.checked += 1
        if (v.verdict is ZERO) != (vals[n] == 0):
            rep.add(n, v, int(vals[n]))
    return rep


def alternating_violations(table: SGTable, d: int, recursive_only: bool = False) -> list[int]:
    """Blocks ``k`` whose even-offset or odd-offset values are not all equal.

    Block ``k`` is ``2dk-2d+1 .. 2dk``.  With ``recursive_only`` the
    comparison skips indices whose value is fixed rather than computed by the
    mex recursion (the terminal index 1 and any overrides).
    """
    import numpy as np

    base = 2 * d
    K = table.n_max // base
    if K == 0:
        return []
    blocks = table.values[1 : K * base + 1].reshape(K, base).astype(np.int16)
    if recursive_only:
        mask = np.ones_like(blocks, dtype=bool)
        for i in [1, *table.spec.override_map]:
            if i <= K * base:
                mask[(i - 1) // base, (i - 1) % base] = False
        blocks = np.where(mask, blocks, -1)
        bad = []
        for k in range(K):
            for parity in (0, 1):
                row = blocks[k, parity::2]
                row = row[row >= 0]
                if row.size and (row != row[0]).any():
                    bad.append(k + 1)
                    break
        return bad
    odd = blocks[:, 0::2]
    even = blocks[:, 1::2]
    bad_rows = ((odd != odd[:, :1]).any(axis=1)) | ((even != even[:, :1]).any(axis=1))
    return (np.nonzero(bad_rows)[0] + 1).tolist()
