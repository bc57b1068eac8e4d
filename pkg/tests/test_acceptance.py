"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.
"""

import io
import math
import random
import time
from contextlib import redirect_stdout

import numpy as np

from subdiv import blockgraph, cli
from subdiv.automata import build_dfao, kernel_report
from subdiv.characterize import (
    NONZERO,
    UNKNOWN,
    ZERO,
    alternating_violations,
    characterize_1_2d,
    characterize_perturbed,
    perturbed_thresholds,
    residue_rule,
)
from subdiv.engine import GameSpec, build_table
from subdiv.holding import coprime_part, detect_holding, detect_holding_length, verify_persistence
from subdiv.reductions import verify_rules

try:
    from conftest import record
except ImportError:  # direct run
    def record(line):
        print(line)


# pinned limits
PAPER_SEQ = "0,2,1,0,0,2,1,1,2,2,0,0,2,2,0,0,1,1,0,0,1,1,2,2"
C1_SECONDS = 1.0
C2_SECONDS = 30.0
C6_SECONDS = 1.0
C7_SECONDS = 60.0
SWEEP = 10**6
KERNEL_PINS = {(1, 2): 8, (1, 4): 24, (2, 2): 67, (4, 2): 8}
KERNEL_DEPTHS = {(1, 2): 8, (1, 4): 6, (2, 2): 10, (4, 2): 8}
C8_SEED = 20240601
C8_ASSIGNMENTS = 100


def line(num, ok, text):
    record(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {text}")
    return ok


def test_c1_paper_sequence():
    buf = io.StringIO()
    t0 = time.perf_counter()
    with redirect_stdout(buf):
        code = cli.run(["compute", "--a", "2", "--b", "2", "--max", "24"])
    dt = time.perf_counter() - t0
    out = buf.getvalue().strip()
    ok = code == 0 and out == PAPER_SEQ and dt < C1_SECONDS
    line(1, ok, f"compute --a 2 --b 2 --max 24 -> {out} ({dt:.3f}s < {C1_SECONDS}s)")
    assert ok


def test_c2_theorem_zeroes1():
    t0 = time.perf_counter()
    mism = {}
    for d in (1, 2, 3, 4, 5):
        vals = build_table(GameSpec(1, 2 * d), SWEEP).values
        bad = 0
        for n in range(1, SWEEP + 1):
            v = characterize_1_2d(n, d).verdict
            if v is UNKNOWN or (v is ZERO) != (vals[n] == 0):
                bad += 1
        mism[d] = bad
    dt = time.perf_counter() - t0
    ok = not any(mism.values()) and dt < C2_SECONDS
    line(2, ok, f"characterize_1_2d vs engine, d=1..5, n<=10^6: mismatches {mism} ({dt:.1f}s < {C2_SECONDS}s)")
    assert ok


def test_c3_residue_lemma():
    mism = {}
    for d in (1, 2, 3):
        vals = build_table(GameSpec(1, 2 * d), SWEEP).values[1:]
        n = np.arange(1, SWEEP + 1)
        ell = n % (4 * d)
        nonzero_cls = ell % 2 == 0
        zero_cls = (ell % 2 == 1) & (ell > 2 * d)
        bad = int(((vals == 0) & nonzero_cls).sum() + ((vals != 0) & zero_cls).sum())
        # the scalar oracle must classify the same way
        sample = range(1, 20001)
        bad += sum(
            (residue_rule(k, d).verdict is NONZERO) != nonzero_cls[k - 1]
            or (residue_rule(k, d).verdict is ZERO) != zero_cls[k - 1]
            for k in sample
        )
        mism[d] = int(bad)
    ok = not any(mism.values())
    line(3, ok, f"residue lemma, d=1..3, n<=10^6: mismatches {mism}")
    assert ok


def test_c4_alternating_property():
    viol = {}
    for d in (1, 2, 3):
        t = build_table(GameSpec(1, 2 * d), SWEEP)
        viol[d] = alternating_violations(t, d)
    ok = not any(viol.values())
    detail = {d: v[:5] for d, v in viol.items()}
    line(4, ok, f"alternating property over every complete block to 10^6, d=1..3: violating blocks {detail}")
    assert ok, (
        "block 1 holds the terminal index 1, whose value 0 is not produced by the "
        f"recursion; violations: {detail}"
    )


def test_c4_alternating_property_recursive_indices():
    viol = {}
    for d in (1, 2, 3):
        t = build_table(GameSpec(1, 2 * d), SWEEP)
        viol[d] = alternating_violations(t, d, recursive_only=True)
    ok = not any(viol.values())
    line("4 (recursive indices)", ok,
         f"alternating property with the terminal index left out, d=1..3: violating blocks {viol}")
    assert ok


def test_c5_holding():
    pairs = [(2, 2), (4, 2), (8, 2), (2, 4), (4, 4), (6, 4), (4, 6)]
    rows = []
    ok = True
    for a, b in pairs:
        t = build_table(GameSpec(a, b), SWEEP)
        s = a // coprime_part(a, b)
        detected = detect_holding_length(t)
        onset = detect_holding(t, s)
        g1 = math.gcd(a, b)
        persist, _ = verify_persistence(t, g1)
        good = detected == s and onset is not None and onset <= a * b**a and persist
        ok &= good
        rows.append(f"({a},{b}) s={s} detected={detected} onset={onset}<={a * b**a} persist={persist}")
    line(5, ok, "; ".join(rows))
    assert ok


def test_c6_blockgraph():
    t0 = time.perf_counter()
    dg = blockgraph.build()
    sk = blockgraph.sinks(dg)
    esc1 = bool(blockgraph.bounded_escape(dg, 2, 4))
    esc2 = bool(blockgraph.bounded_escape(dg, 4, 16))
    layer = blockgraph.layer_check(dg)
    dt = time.perf_counter() - t0
    ok = (
        len(dg.vertices) == 27
        and len(dg.edges) == 81
        and sk == blockgraph.PAPER_SINKS
        and layer
        and esc1
        and esc2
        and dt < C6_SECONDS
    )
    line(6, ok, f"|V|={len(dg.vertices)} |E|={len(dg.edges)} sinks={sorted(map(str, sk))} "
                f"layer={layer} escape(2,4)={esc1} escape(4,16)={esc2} ({dt:.3f}s < {C6_SECONDS}s)")
    assert ok


def test_c7_reductions():
    t0 = time.perf_counter()
    ok = True
    parts = []
    for d in (1, 2, 3):
        rep = verify_rules(d, SWEEP)
        good = (
            not rep.failures
            and rep.uncovered_count == 0
            and rep.overlap_count == 0
            and rep.shift_failures == 0
            and rep.descent_failures == 0
            and not rep.unfired_satisfiable
        )
        ok &= good
        parts.append(
            f"d={d}: failures={sum(rep.failures.values())} uncovered={rep.uncovered_count} "
            f"overlaps={rep.overlap_count} unfired={rep.unfired_satisfiable} floor={rep.terminal_floor}"
        )
    dt = time.perf_counter() - t0
    ok &= dt < C7_SECONDS
    line(7, ok, "; ".join(parts) + f" ({dt:.1f}s < {C7_SECONDS}s)")
    assert ok


def _random_prefix(rng, N):
    return tuple((i, rng.randrange(3)) for i in range(1, N))


def test_c8_perturbed_prefix():
    rng = random.Random(C8_SEED)
    checked = mismatches = 0
    flips = 0
    for _ in range(C8_ASSIGNMENTS):
        d = rng.choice((1, 2))
        N = rng.randint(2, 32)
        spec = GameSpec(1, 2 * d, overrides=_random_prefix(rng, N))
        th = perturbed_thresholds(d, N)
        n_max = max(8 * th["table"], 4096)
        t = build_table(spec, n_max)
        vals = t.values
        for n in range(1, n_max + 1):
            v = characterize_perturbed(n, d, N, t)
            if v.verdict is UNKNOWN:
                continue
            checked += 1
            if v.rule_fired.startswith("removal"):
                flips += 1
            if (v.verdict is ZERO) != (vals[n] == 0):
                mismatches += 1
    ok = mismatches == 0 and checked > 0 and flips > 0
    line(8, ok, f"{C8_ASSIGNMENTS} random prefixes (seed {C8_SEED}): {checked} verdicts "
                f"({flips} by digit removal), mismatches {mismatches}")
    assert ok


def test_c9_misere_flip():
    top = 20
    normal = build_table(GameSpec(1, 2), 2**top + 1).values
    misere_t = build_table(GameSpec(1, 2, overrides=((1, 1),)), 2**top + 1)
    misere = misere_t.values
    sg3 = int(misere[3])
    bad = [i for i in range(2, top + 1) if (normal[2**i + 1] == 0) == (misere[2**i + 1] == 0)]
    # the removal rule, where its threshold allows (n >= 9), must give the engine's verdict
    lemma_bad = [
        i for i in range(3, top + 1)
        if (characterize_perturbed(2**i + 1, 1, 2, misere_t).verdict is ZERO) != (misere[2**i + 1] == 0)
    ]
    ok = sg3 != 0 and not bad and not lemma_bad
    line(9, ok, f"misere SG(3)={sg3}; flip fails at i={bad}; removal-rule disagreements at i={lemma_bad}")
    assert ok


def test_c10_automaticity():
    parts = []
    ok = True
    for (a, b), pin in KERNEL_PINS.items():
        rep = kernel_report(GameSpec(a, b), KERNEL_DEPTHS[(a, b)], 512)
        good = rep.stabilized and rep.counts[-1] == pin
        ok &= good
        parts.append(f"({a},{b}) counts={rep.counts[-3:]} pin={pin}")
    for a, b in [(1, 2), (1, 4)]:
        dfao = build_dfao(GameSpec(a, b), SWEEP)
        good = dfao.n_states == KERNEL_PINS[(a, b)]
        ok &= good
        parts.append(f"DFAO({a},{b}) states={dfao.n_states} validated to 10^6")
    line(10, ok, "; ".join(parts))
    assert ok


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
