import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import table_for
from subdiv.digits import (
    DigitString,
    first_even_block_length,
    format_pattern,
    from_digits,
    has_terminating_odd,
    parity_pattern,
    remove_second_digit,
    to_digits,
)


def test_examples():
    assert to_digits(9, 2).digits == (1, 0, 0, 1)
    assert to_digits(0, 4).digits == ()
    assert to_digits(19, 4).digits == (3, 0, 1)
    assert from_digits(DigitString(7, ())) == 0
    assert from_digits(DigitString(4, (3, 0, 1))) == 19
    assert parity_pattern(to_digits(9, 2)) == "oeeo"
    assert parity_pattern(to_digits(4, 2)) == "eeo"
    assert parity_pattern(to_digits(7, 2)) == "ooo"


def test_remove_second_digit():
    assert remove_second_digit(to_digits(9, 2)).value == 5
    assert remove_second_digit(to_digits(5, 2)).value == 3
    with pytest.raises(ValueError):
        remove_second_digit(to_digits(21, 4))
    with pytest.raises(ValueError):
        remove_second_digit(to_digits(4, 2))
    with pytest.raises(ValueError):
        remove_second_digit(to_digits(1, 2))


def test_even_block():
    assert first_even_block_length(to_digits(9, 2)) == 2
    assert first_even_block_length(to_digits(7, 2)) == 0
    assert first_even_block_length(to_digits(5, 2)) == 1
    with pytest.raises(ValueError):
        first_even_block_length(to_digits(4, 2))
    assert has_terminating_odd(to_digits(9, 2))
    assert not has_terminating_odd(to_digits(1, 2))
    assert format_pattern(to_digits(9, 2)) == "oee|o"
    assert format_pattern(to_digits(4, 2)) == "eeo"


def test_bad_digits():
    with pytest.raises(ValueError):
        DigitString(2, (2,))
    with pytest.raises(ValueError):
        DigitString(1, ())
    assert not DigitString(2, (1, 0)).canonical


@given(st.integers(0, 10**9), st.integers(2, 40))
def test_round_trip(n, base):
    ds = to_digits(n, base)
    assert ds.canonical
    assert from_digits(ds) == n
    if base <= 10:
        assert int(ds.msd_first(), base) == n


@given(st.integers(0, 10**12), st.integers(2, 12))
def test_lengths(n, base):
    ds = to_digits(n, base)
    assert len(parity_pattern(ds)) == len(ds)


@pytest.mark.parametrize("b", [2, 4, 6])
def test_removal_matches_ceiling_division(b):
    """Same value as ceil(n/b) in SG_{1,b}, for first digit 1 and an even second digit.

    A result of 1 is left out: the terminal index does not alternate with 3, 5, ...
    """
    t = table_for(1, b, 200_000)
    checked = 0
    for n in range(b + 1, t.n_max + 1):
        ds = to_digits(n, b)
        if ds[0] != 1 or ds[1] % 2 or ds[1] == b - 1:
            continue
        r = remove_second_digit(ds).value
        if r == 1:
            continue
        assert t[r] == t[-(-n // b)], n
        checked += 1
    assert checked > 1000
