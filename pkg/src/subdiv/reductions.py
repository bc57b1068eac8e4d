"""Reduction rules showing ``SG_{1,2d}`` is ``2d``-regular.

An index is first normalized with the Alternating Property so that its
lowest base-``2d`` digit ``R`` is 0 or 1, then sorted into one of four cases
by ``R`` and the parity of ``c_1``.  Each case has a table of rules; a rule
either says the value is 0 or rewrites the index to a smaller one with the
same value.

Guards and transforms are plain arithmetic on the coefficients, so the same
rule objects evaluate one index (ints) or a whole sweep (numpy arrays).
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np

from .engine import ConfigurationError, GameSpec, SGTable, build_table
from .automata import Dfao, KernelReport, build_dfao, kernel_report  # noqa: F401  (re-exported)

GUARD_DIGITS = 9  # guards read R and c_1 .. c_8
MAX_CHAIN = 10_000


def sg_star(v: int) -> int:
    """Swap the non-zero values 1 and 2, fixing 0."""
    if v not in (0, 1, 2):
        raise ValueError(f"not a value: {v!r}")
    return (3 - v) % 3


def normalize(n: int, d: int) -> tuple[int, int]:
    """Representative ``m`` with ``SG(m) = SG(n)`` and lowest digit 0 or 1.

    Returns ``(m, R)``.  Valid in the recursive regime, away from index 1.
    """
    base = 2 * d
    r0 = n % base
    if r0 % 2:
        return n - r0 + 1, 1
    if r0 == 0:
        return n, 0
    return n - r0 + base, 0


def _odd(x):
    return x % 2 == 1


def _even(x):
    return x % 2 == 0


def _all_even(c, lo, hi):
    out = True
    for i in range(lo, hi + 1):
        out = out & _even(c[i])
    return out


@dataclass
class CoeffView:
    """``R`` and coefficients ``c_1, c_2, ...`` of a normalized index.

    ``c[0]`` is ``R``; entries past the top digit are zero.  Entries may be
    ints or equally shaped integer arrays.
    """

    d: int
    c: list

    @property
    def R(self):
        return self.c[0]

    @property
    def base(self) -> int:
        return 2 * self.d

    def __getitem__(self, i):
        return self.c[i] if i < len(self.c) else 0

    def val(self, digits) -> Union[int, np.ndarray]:
        """Integer with the given lsd-first digits (carries allowed)."""
        out = 0
        p = 1
        for x in digits:
            out = out + x * p
            p *= self.base
        return out

    def tail(self, k: int) -> list:
        return list(self.c[k:])

    @property
    def value(self):
        return self.val(self.c)

    @classmethod
    def of(cls, m: int, d: int, width: int = GUARD_DIGITS + 2) -> "CoeffView":
        base = 2 * d
        c = []
        while m:
            m, x = divmod(m, base)
            c.append(x)
        c += [0] * max(0, width - len(c))
        return cls(d, c)

    @classmethod
    def of_array(cls, m: np.ndarray, d: int, width: int) -> "CoeffView":
        base = 2 * d
        m = m.astype(np.int64)
        c = []
        for _ in range(width):
            m, x = np.divmod(m, base)
            c.append(x)
        if m.any():
            raise ValueError("width too small for values")
        return cls(d, c)


def classify_case(n: int, d: int) -> int:
    """Case 1..4 from ``R`` and the parity of ``c_1`` after normalization."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    m, R = normalize(n, d)
    c1 = (m // (2 * d)) % (2 * d)
    if R == 1:
        return 1 if c1 % 2 else 2
    return 3 if c1 % 2 else 4


class Kind(enum.Enum):
    TO_SG = "ToSG"
    TO_ZERO = "ToZero"


@dataclass(frozen=True)
class ReductionRule:
    id: str
    case: int
    guard_text: str
    guard: Callable[[CoeffView], object] = field(repr=False)
    transform: Optional[Callable[[CoeffView], object]] = field(default=None, repr=False)
    shift: Optional[int] = None
    kind: Kind = Kind.TO_SG
    pivot: Optional[Callable[[CoeffView], object]] = field(default=None, repr=False)


# Case 3 rows are shared with Case 4, where they act on the right-hand side.
# Each entry: (row, guard text, guard, transform, shift).
def _case3_rows():
    rows = [
        ("a", "c_2 odd", lambda c: _odd(c[2]),
         lambda c: c.val([0, c[1] - 1] + c.tail(2)), 0),
        ("b", "c_2 even, c_3 odd", lambda c: _even(c[2]) & _odd(c[3]),
         lambda c: c.val([0] + c.tail(2)), 1),
        ("c", "c_2, c_3 even, c_4 odd", lambda c: _all_even(c, 2, 3) & _odd(c[4]),
         lambda c: c.val([0, c[1] - 1] + c.tail(2)), 0),
        ("d", "c_2, c_3, c_4 even, c_5 odd", lambda c: _all_even(c, 2, 4) & _odd(c[5]),
         lambda c: c.val([0] + c.tail(2)), 1),
        ("e", "c_1 != 1, c_2..c_5 even, c_6 odd",
         lambda c: (c[1] != 1) & _all_even(c, 2, 5) & _odd(c[6]),
         lambda c: c.val([0, 0] + c.tail(3)), 1),
        ("f", "c_1 = 1, c_2..c_5 even, c_6 odd",
         lambda c: (c[1] == 1) & _all_even(c, 2, 5) & _odd(c[6]),
         lambda c: c.val([0] + c.tail(3)), 2),
        ("g", "c_2 != 0, c_2..c_6 even, c_7 odd",
         lambda c: (c[2] != 0) & _all_even(c, 2, 6) & _odd(c[7]),
         lambda c: c.val([0, 0] + c.tail(4)), 2),
        ("h", "c_2 = 0, c_3..c_6 even, c_7 odd",
         lambda c: (c[2] == 0) & _all_even(c, 3, 6) & _odd(c[7]),
         lambda c: c.val([0] + c.tail(4)), 3),
        ("i", "c_2..c_7 even, c_1 = 1",
         lambda c: _all_even(c, 2, 7) & (c[1] == 1),
         lambda c: c.val([0, c[2] + 1] + c.tail(3)), 1),
        ("j", "c_2..c_7 even, c_1 != 1, c_2 != 0",
         lambda c: _all_even(c, 2, 7) & (c[1] != 1) & (c[2] != 0),
         lambda c: c.val([0, 0, c[3] + 1] + c.tail(4)), 1),
        ("k", "c_2..c_7 even, c_1 != 1, c_2 = 0, c_3 != 0",
         lambda c: _all_even(c, 2, 7) & (c[1] != 1) & (c[2] == 0) & (c[3] != 0),
         lambda c: c.val([0, c[4] + 1] + c.tail(5)), 3),
        ("l", "c_2..c_7 even, c_1 != 1, c_2 = c_3 = 0, c_4 != 0",
         lambda c: _all_even(c, 2, 7) & (c[1] != 1) & (c[2] == 0) & (c[3] == 0) & (c[4] != 0),
         lambda c: c.val([0, 0, c[5] + 1] + c.tail(6)), 3),
        ("m", "c_2..c_7 even, c_1 != 1, c_2 = c_3 = c_4 = 0",
         lambda c: _all_even(c, 2, 7) & (c[1] != 1) & (c[2] == 0) & (c[3] == 0) & (c[4] == 0),
         lambda c: c.val([0, c[1], 0] + c.tail(5)), 2),
    ]
    return rows


def _rhs_view(c: CoeffView) -> CoeffView:
    """Right-hand side of a Case 4 index, written with an odd ``c_2'`` in place of ``c_1``."""
    c2p = np.where(c[1] == 0, c[2], c[2] + 1) if isinstance(c[1], np.ndarray) else (
        c[2] if c[1] == 0 else c[2] + 1
    )
    return CoeffView(c.d, [0, c2p] + c.tail(3))


def _c2p_odd(c: CoeffView):
    return ((c[1] == 0) & _odd(c[2])) | ((c[1] != 0) & _even(c[2]))


def _build_rules() -> tuple[ReductionRule, ...]:
    R1 = lambda c: c[0] == 1  # noqa: E731
    R0 = lambda c: c[0] == 0  # noqa: E731
    rules = [
        ReductionRule("C1", 1, "R = 1, c_1 odd", lambda c: R1(c) & _odd(c[1]), kind=Kind.TO_ZERO),
        ReductionRule("R1", 2, "c_2 odd", lambda c: R1(c) & _even(c[1]) & _odd(c[2]),
                      lambda c: c.val(c.tail(1)), 1),
        ReductionRule("R2", 2, "c_2 even, c_3 odd",
                      lambda c: R1(c) & _even(c[1]) & _even(c[2]) & _odd(c[3]), kind=Kind.TO_ZERO),
        ReductionRule("R3", 2, "c_2, c_3 even, c_4 odd",
                      lambda c: R1(c) & _even(c[1]) & _all_even(c, 2, 3) & _odd(c[4]),
                      lambda c: c.val(c.tail(1)), 1),
        ReductionRule("R4", 2, "c_1 = 0, c_2, c_3, c_4 even",
                      lambda c: R1(c) & (c[1] == 0) & _all_even(c, 2, 4),
                      lambda c: c.val([1] + c.tail(3)), 2),
        ReductionRule("R5.1", 2, "c_1 != 0, c_2, c_3, c_4 even, c_5 odd",
                      lambda c: R1(c) & _even(c[1]) & (c[1] != 0) & _all_even(c, 2, 4) & _odd(c[5]),
                      kind=Kind.TO_ZERO),
        ReductionRule("R5.2", 2, "c_1 != 0, c_2..c_5 even, c_6 odd",
                      lambda c: R1(c) & _even(c[1]) & (c[1] != 0) & _all_even(c, 2, 5) & _odd(c[6]),
                      lambda c: c.val([0] + c.tail(3)), 2),
        ReductionRule("R5.3", 2, "c_1 != 0, c_2..c_6 even, c_3 = 0",
                      lambda c: R1(c) & _even(c[1]) & (c[1] != 0) & _all_even(c, 2, 6) & (c[3] == 0),
                      lambda c: c.val([1, c[1], c[2]] + c.tail(5)), 2,
                      pivot=lambda c: c.val([1] + c.tail(5))),
        ReductionRule("R5.4", 2, "c_1, c_3 != 0, c_2..c_6 even",
                      lambda c: R1(c) & _even(c[1]) & (c[1] != 0) & (c[3] != 0) & _all_even(c, 2, 6),
                      lambda c: c.val([1] + c.tail(5)), 4),
    ]
    for row, text, g, t, s in _case3_rows():
        rules.append(ReductionRule(
            f"C3-{row}", 3, text,
            (lambda g: lambda c: R0(c) & _odd(c[1]) & g(c))(g), t, s))
    rules.append(ReductionRule(
        "C4.1", 4, "c_1 != 0, c_2 odd",
        lambda c: R0(c) & _even(c[1]) & (c[1] != 0) & _odd(c[2]),
        lambda c: (c[2] + 1) + c.base * c.val(c.tail(3)), 2))
    rules.append(ReductionRule(
        "C4.2", 4, "c_1 = 0, c_2 even",
        lambda c: R0(c) & (c[1] == 0) & _even(c[2]),
        lambda c: c.val(c.tail(2)), 2))
    for row, text, g, t, s in _case3_rows():
        rules.append(ReductionRule(
            f"C4-{row}", 4, f"c_2' odd; on c_2', c_3, ...: {text}",
            (lambda g: lambda c: R0(c) & _even(c[1]) & _c2p_odd(c) & g(_rhs_view(c)))(g),
            (lambda t: lambda c: c.base * t(_rhs_view(c)))(t), s))
    return tuple(rules)


RULES: tuple[ReductionRule, ...] = _build_rules()
RULES_BY_ID = {r.id: r for r in RULES}


@dataclass(frozen=True)
class Terminal:
    """Index left to direct lookup."""

    index: int
    reason: str


@dataclass(frozen=True)
class RuleApplication:
    rule: ReductionRule
    n: int
    normalized: int
    r: Optional[int]

    @property
    def shift(self) -> Optional[int]:
        return self.rule.shift


def _terminal_reason(n: int, d: int, rule: ReductionRule, cv: CoeffView, r) -> Optional[str]:
    if rule.kind is Kind.TO_ZERO:
        return None
    if r >= n:
        return "no-descent"
    pivot = r if rule.pivot is None else min(r, rule.pivot(cv))
    if d >= 2 and pivot == 1:
        return "through-index-1"
    return None


def applicable_rule(n: int, d: int) -> Union[RuleApplication, Terminal]:
    """The first rule, in table order, whose guard holds for ``n``."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    if n <= 2 * d:
        return Terminal(n, "first-block")
    m, _ = normalize(n, d)
    cv = CoeffView.of(m, d)
    for rule in RULES:
        if rule.guard(cv):
            r = None if rule.kind is Kind.TO_ZERO else int(rule.transform(cv))
            why = _terminal_reason(n, d, rule, cv, r)
            if why:
                return Terminal(n, why)
            return RuleApplication(rule, n, m, r)
    raise RuntimeError(f"no reduction rule matches n={n}, d={d}")


def matching_rules(n: int, d: int) -> list[str]:
    """Ids of every rule whose guard holds (should be exactly one)."""
    m, _ = normalize(n, d)
    cv = CoeffView.of(m, d)
    return [r.id for r in RULES if r.guard(cv)]


@dataclass(frozen=True)
class Chain:
    steps: tuple[tuple[str, int], ...]
    end: Union[Terminal, str]

    @property
    def final_index(self) -> Optional[int]:
        return self.end.index if isinstance(self.end, Terminal) else None

    def to_dict(self) -> dict:
        end = (
            {"terminal": self.end.index, "reason": self.end.reason}
            if isinstance(self.end, Terminal)
            else {"zero": True}
        )
        return {"steps": [{"rule": r, "index": i} for r, i in self.steps], "end": end}


def reduce_to_base(n: int, d: int) -> Chain:
    """Apply rules until a terminal index or a zero verdict."""
    steps = []
    cur = n
    for _ in range(MAX_CHAIN):
        app = applicable_rule(cur, d)
        if isinstance(app, Terminal):
            return Chain(tuple(steps), app)
        steps.append((app.rule.id, app.r if app.r is not None else 0))
        if app.rule.kind is Kind.TO_ZERO:
            return Chain(tuple(steps), "zero")
        if app.r >= cur:
            raise RuntimeError(f"reduction did not descend at {cur}")
        cur = app.r
    raise RuntimeError(f"reduction chain from {n} did not terminate")


def evaluate(n: int, d: int, table: Optional[SGTable] = None) -> int:
    """Value of ``SG_{1,2d}(n)`` from the rules plus a lookup at the terminal index."""
    chain = reduce_to_base(n, d)
    t = chain.final_index
    if t is None:
        return 0
    if table is None or table.n_max < t:
        table = _base_table(d, t)
    return int(table.values[t])


@lru_cache(maxsize=8)
def _cached_table(d: int, size: int) -> SGTable:
    return build_table(GameSpec(1, 2 * d), size)


def _base_table(d: int, t: int) -> SGTable:
    size = 1024
    while size < t:
        size *= 4
    return _cached_table(d, size)


# ---------------------------------------------------------------- verification


@dataclass
class RuleReport:
    d: int
    n_max: int
    checked: int = 0
    fires: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    failure_examples: list = field(default_factory=list)
    shift_failures: int = 0
    descent_failures: int = 0
    overlap_count: int = 0
    uncovered_count: int = 0
    uncovered_examples: list = field(default_factory=list)
    terminal_count: int = 0
    terminal_reasons: dict = field(default_factory=dict)
    terminal_floor: int = 0
    unfired_satisfiable: list = field(default_factory=list)
    unsatisfiable: list = field(default_factory=list)
    guards: dict = field(default_factory=dict)
    zero_prop: dict = field(default_factory=dict)
    reduction_sg: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (
            not self.failures
            and self.shift_failures == 0
            and self.descent_failures == 0
            and self.overlap_count == 0
            and self.uncovered_count == 0
            and not self.unfired_satisfiable
            and self.zero_prop.get("failures", 0) == 0
            and self.reduction_sg.get("failures", 0) == 0
        )

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items()}
        out["ok"] = self.ok
        return out


def _guard_matrix(cv: CoeffView, size: int) -> np.ndarray:
    mat = np.zeros((len(RULES), size), dtype=bool)
    for i, rule in enumerate(RULES):
        mat[i] = np.broadcast_to(rule.guard(cv), (size,))
    return mat


@lru_cache(maxsize=None)
def guard_minima(d: int) -> dict[str, Optional[int]]:
    """Smallest normalized index satisfying each guard, over all digit vectors
    ``R in {0,1}``, ``c_1..c_8 in [0, 2d)``; ``None`` when unsatisfiable."""
    base = 2 * d
    grids = np.meshgrid(np.arange(2), *[np.arange(base)] * (GUARD_DIGITS - 1), indexing="ij")
    c = [g.ravel().astype(np.int64) for g in grids]
    cv = CoeffView(d, c + [np.zeros_like(c[0])] * 2)
    values = cv.val(c)
    out = {}
    for rule in RULES:
        g = np.broadcast_to(rule.guard(cv), values.shape)
        out[rule.id] = int(values[g].min()) if g.any() else None
    return out


def _level_checks(d: int, m: np.ndarray, vals: np.ndarray, rep: RuleReport, width: int) -> None:
    """Sub-checks on Case 3 indices (``R = 0``, ``c_1`` odd).

    With a later odd coefficient, the first one ``c_i`` decides which term of
    the mex is zero: the lower-index term for odd ``i``, the divided term for
    even ``i``.  With every later coefficient even, pairing the two terms at
    shift levels one apart gives an index ``r3`` with the same value.
    """
    base = 2 * d
    cv = CoeffView.of_array(m, d, width)
    c = cv.c
    sel = (c[0] == 0) & _odd(c[1])
    zp_checked = zp_fail = 0
    sg_checked = sg_fail = sg_skipped = 0
    zp_examples, sg_examples = [], []
    idx = np.nonzero(sel)[0]
    for j in idx.tolist():
        mm = int(m[j])
        digits = [int(x[j]) for x in c]
        top = max(i for i, x in enumerate(digits) if x) if any(digits) else 0
        odd_after = [i for i in range(2, top + 1) if digits[i] % 2]
        lhs = int(vals[mm - 1])
        rhs = int(vals[-(-mm // base)])
        if odd_after:
            i = odd_after[0]
            zp_checked += 1
            want_lhs_zero = i % 2 == 1
            if (lhs == 0) != want_lhs_zero or (rhs == 0) == want_lhs_zero:
                zp_fail += 1
                if len(zp_examples) < 20:
                    zp_examples.append(mm)
            continue
        # every coefficient after c_1 is even
        lead = lambda s: digits[1] - 1 if s == 0 else digits[s + 1]  # noqa: E731
        star = {0: False, 1: False}
        s = 0
        found = None
        while s + 1 <= top:
            star[s + 2] = star[s] ^ (lead(s) != 0)
            if s >= 1 and star[s] == star[s + 1]:
                found = s
                break
            s += 1
        if found is None:
            sg_skipped += 1
            continue
        i = found + 1
        if star[found]:
            if i < 3:
                sg_skipped += 1
                continue
            r3 = cv.val([0, 0, digits[i] + 1] + digits[i + 1:])
        else:
            r3 = cv.val([0, digits[i] + 1] + digits[i + 1:])
        # levels that have reached index 1 leave the regime where the rules hold
        if -(-mm // base ** (i + 1)) <= 1 and d >= 2:
            sg_skipped += 1
            continue
        sg_checked += 1
        if not (r3 < mm and vals[r3] == vals[mm]):
            sg_fail += 1
            if len(sg_examples) < 20:
                sg_examples.append(mm)
    rep.zero_prop = {"checked": zp_checked, "failures": zp_fail, "examples": zp_examples}
    rep.reduction_sg = {
        "checked": sg_checked,
        "failures": sg_fail,
        "skipped": sg_skipped,
        "examples": sg_examples,
    }


def verify_rules(d: int, n_max: int, table: Optional[SGTable] = None, sub_checks: bool = True) -> RuleReport:
    """Check every rule against the engine on ``2d+1 .. n_max``."""
    if d < 1 or n_max < 2 * d + 1:
        raise ConfigurationError("need d >= 1 and n_max > 2d")
    base = 2 * d
    need = n_max + base
    if table is None or table.n_max < need:
        table = build_table(GameSpec(1, base), need)
    vals = table.values.astype(np.int64)
    rep = RuleReport(d, n_max)
    rep.guards = {r.id: r.guard_text for r in RULES}

    n = np.arange(base + 1, n_max + 1, dtype=np.int64)
    r0 = n % base
    m = np.where(r0 % 2 == 1, n - r0 + 1, np.where(r0 == 0, n, n - r0 + base))
    width = max(GUARD_DIGITS + 2, int(np.ceil(np.log(m.max() + 1) / np.log(base))) + 2)
    cv = CoeffView.of_array(m, d, width)
    W = width + 1
    shifted = CoeffView(d, cv.c + [np.zeros_like(n), np.ones_like(n)])  # adds base**W

    G = _guard_matrix(cv, len(n))
    count = G.sum(axis=0)
    rep.overlap_count = int((count > 1).sum())
    unc = count == 0
    rep.uncovered_count = int(unc.sum())
    rep.uncovered_examples = n[unc][:20].tolist()
    first = np.where(count > 0, G.argmax(axis=0), -1)

    terminal = np.zeros(len(n), dtype=bool)
    reasons: Counter = Counter()
    for i, rule in enumerate(RULES):
        mask = first == i
        if not mask.any():
            rep.fires[rule.id] = 0
            continue
        if rule.kind is Kind.TO_ZERO:
            rep.fires[rule.id] = int(mask.sum())
            bad = mask & (vals[m] != 0)
            _record(rep, rule.id, n[bad])
            continue
        r = np.broadcast_to(rule.transform(cv), n.shape)
        pivot = r if rule.pivot is None else np.minimum(r, rule.pivot(cv))
        nodesc = mask & (r >= n)
        via1 = mask & ~nodesc & (pivot == 1) & (d >= 2)
        reasons["no-descent"] += int(nodesc.sum())
        reasons["through-index-1"] += int(via1.sum())
        term = nodesc | via1
        terminal |= term
        live = mask & ~term
        rep.fires[rule.id] = int(live.sum())
        rr = np.where(live, r, 1)
        bad = live & (vals[np.minimum(rr, len(vals) - 1)] != vals[m])
        bad |= live & (rr > n_max + base)
        _record(rep, rule.id, n[bad])
        r_sh = np.broadcast_to(rule.transform(shifted), n.shape)
        expect = base ** (W - rule.shift)
        rep.shift_failures += int((live & (r_sh - r != expect)).sum())
        rep.descent_failures += int((live & (r >= n)).sum())

    rep.terminal_count = int(terminal.sum()) + base
    rep.terminal_reasons = {"first-block": base, **{k: v for k, v in reasons.items() if v}}
    rep.terminal_floor = int(n[terminal].max()) if terminal.any() else base
    rep.checked = int(len(n) - terminal.sum())

    minima = guard_minima(d)
    rep.unsatisfiable = [rid for rid, v in minima.items() if v is None]
    rep.unfired_satisfiable = [
        rid for rid, v in minima.items()
        if v is not None and v <= n_max and rep.fires.get(rid, 0) == 0
        and v > rep.terminal_floor
    ]
    if sub_checks:
        _level_checks(d, m, vals, rep, width)
    return rep


def _record(rep: RuleReport, rid: str, bad_n: np.ndarray) -> None:
    if bad_n.size:
        rep.failures[rid] = int(bad_n.size)
        room = 100 - len(rep.failure_examples)
        rep.failure_examples += [{"rule": rid, "n": int(x)} for x in bad_n[:room]]
