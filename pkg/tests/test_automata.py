import json

import numpy as np
import pytest

from subdiv.automata import Dfao, DfaoValidationError, build_dfao, kernel_report, sequence
from subdiv.engine import ConfigurationError, GameSpec


def test_kernel_counts_monotone_and_stable():
    rep = kernel_report(GameSpec(1, 2), 6, 512)
    assert rep.counts == sorted(rep.counts)
    assert rep.stabilized and rep.counts[-1] == 8


def test_kernel_misere_stabilizes():
    rep = kernel_report(GameSpec(1, 2, overrides={1: 1}), 9, 512)
    assert rep.stabilized and rep.counts[-1] == 20


def test_kernel_rejects_foreign_prime():
    with pytest.raises(ConfigurationError):
        kernel_report(GameSpec(3, 2), 4)


def test_sequence_block():
    s = sequence(GameSpec(2, 2), 13)
    assert s.tolist() == [0, 2, 0, 2, 1, 2, 0, 2, 0, 1, 0, 1, 2]


def test_dfao_runs_and_round_trips():
    d = build_dfao(GameSpec(1, 2), 100_000)
    assert d.n_states == 8
    data = json.loads(d.to_json())
    assert data["digit_order"] == "lsd" and data["schema"] == 1
    d2 = Dfao.from_dict(data)
    ns = np.arange(1, 5000)
    assert np.array_equal(d2.run_many(ns), d.run_many(ns))
    assert [d.run(n) for n in range(1, 11)] == [0, 1, 0, 2, 1, 2, 0, 1, 0, 2]


def test_dfao_block_subsequence():
    d = build_dfao(GameSpec(2, 2), 500_000)
    assert d.n_states == 67


def test_dfao_rejects():
    with pytest.raises(ConfigurationError):
        build_dfao(GameSpec(3, 2), 100)
    with pytest.raises(ConfigurationError):
        build_dfao(GameSpec(2, 2), 1000, L=64, e_max=3)


def test_validation_error_carries_witness():
    err = DfaoValidationError(7, 0, 2)
    assert err.n == 7 and "n=7" in str(err)
