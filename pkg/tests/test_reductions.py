import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import table_for
from subdiv.reductions import (
    RULES,
    RULES_BY_ID,
    CoeffView,
    Kind,
    Terminal,
    applicable_rule,
    classify_case,
    evaluate,
    guard_minima,
    matching_rules,
    normalize,
    reduce_to_base,
    sg_star,
    verify_rules,
)


def test_sg_star():
    assert [sg_star(v) for v in (0, 1, 2)] == [0, 2, 1]
    assert all(sg_star(sg_star(v)) == v for v in (0, 1, 2))
    with pytest.raises(ValueError):
        sg_star(3)


def test_sg_star_is_mex_with_zero(t12, t14):
    from subdiv.engine import mex

    for t in (t12, t14):
        for n in range(2, 5000, 2):
            v = int(t[n])
            assert v != 0 and mex({0, v}) == sg_star(v)


def test_classify_examples():
    assert classify_case(7, 1) == 1
    assert classify_case(9, 1) == 2
    assert classify_case(6, 1) == 3
    assert classify_case(8, 1) == 4


def test_normalize_preserves_value(t14):
    for n in range(5, 10_000):
        m, R = normalize(n, 2)
        assert R in (0, 1) and t14[m] == t14[n]


def test_rule_examples(t12):
    app = applicable_rule(5, 1)
    assert app.rule.id == "R1" and app.r == 2 and t12[5] == t12[2] == 1
    app = applicable_rule(9, 1)
    assert app.rule.id == "R2" and app.rule.kind is Kind.TO_ZERO and t12[9] == 0
    app = applicable_rule(13, 1)
    assert app.rule.id == "R1" and app.r == 6 and t12[13] == t12[6] == 2


def test_chains():
    c = reduce_to_base(9, 1)
    assert c.steps == (("R2", 0),) and c.end == "zero"
    c = reduce_to_base(5, 1)
    assert c.steps == (("R1", 2),) and c.final_index == 2
    assert isinstance(applicable_rule(2, 1), Terminal)


def test_chain_lengths_are_logarithmic():
    longest = max(len(reduce_to_base(n, 1).steps) for n in range(1, 200_000, 7))
    assert longest <= 40


@pytest.mark.parametrize("d", [1, 2, 3])
def test_evaluate_matches_engine(d):
    t = table_for(1, 2 * d, 200_000)
    for n in range(1, 20_000):
        assert evaluate(n, d, t) == t[n]


@given(st.integers(1, 10**7), st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_chain_descends(n, d):
    chain = reduce_to_base(n, d)
    idx = [n] + [i for rid, i in chain.steps if RULES_BY_ID[rid].kind is Kind.TO_SG]
    assert all(x > y for x, y in zip(idx, idx[1:]))


def test_guards_partition_small_indices():
    for d in (1, 2, 3):
        for n in range(2 * d + 1, 5000):
            assert len(matching_rules(n, d)) == 1, (n, d)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_verify_rules(d):
    rep = verify_rules(d, 200_000)
    assert rep.ok, rep.to_dict()
    assert rep.checked > 199_000
    assert rep.zero_prop["checked"] > 40_000


def test_unsatisfiable_guards_at_base_2():
    minima = guard_minima(1)
    dead = {k for k, v in minima.items() if v is None}
    assert {"R5.1", "R5.2", "R5.3", "R5.4", "C4.1"} <= dead
    assert all(v is not None for v in guard_minima(2).values())


def test_scalar_and_vector_rules_agree():
    d = 2
    ns = np.arange(5, 3000)
    ms = np.array([normalize(int(n), d)[0] for n in ns])
    cv = CoeffView.of_array(ms, d, 12)
    for rule in RULES:
        g = np.broadcast_to(rule.guard(cv), ns.shape)
        for k in np.nonzero(g)[0][:50]:
            one = CoeffView.of(int(ms[k]), d)
            assert rule.guard(one)
            if rule.transform is not None:
                assert int(rule.transform(one)) == int(np.broadcast_to(rule.transform(cv), ns.shape)[k])


def test_row_g_as_printed_fails():
    """The printed Case 3 row with c_2 != 0 and c_7 odd would send n to 4d^2 c_3 + ..."""
    d = 2
    t = table_for(1, 4, 200_000)
    rule = RULES_BY_ID["C3-g"]
    bad = tried = 0
    for n in range(5, 200_000):
        app = applicable_rule(n, d)
        if isinstance(app, Terminal) or app.rule is not rule:
            continue
        cv = CoeffView.of(app.normalized, d)
        printed = cv.val([0, 0] + cv.tail(3))
        tried += 1
        bad += t[printed] != t[n]
        assert t[app.r] == t[n]
    assert tried > 0 and bad > 0
