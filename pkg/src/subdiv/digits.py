"""Base-b digit strings, least significant digit first."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class DigitString:
    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        ds = tuple(int(x) for x in self.digits)
        for x in ds:
            if not 0 <= x < self.base:
                raise ValueError(f"digit {x} out of range for base {self.base}")
        object.__setattr__(self, "digits", ds)

    def __len__(self) -> int:
        return len(self.digits)

    def __getitem__(self, i):
        return self.digits[i]

    @property
    def value(self) -> int:
        return from_digits(self)

    @property
    def canonical(self) -> bool:
        return not self.digits or self.digits[-1] != 0

    def msd_first(self) -> str:
        """Digits most significant first, for display."""
        sep = "" if self.base <= 10 else ","
        return sep.join(str(x) for x in reversed(self.digits)) or "0"


def to_digits(n: int, base: int) -> DigitString:
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    out = []
    while n:
        n, r = divmod(n, base)
        out.append(r)
    return DigitString(base, tuple(out))


def from_digits(ds: DigitString) -> int:
    v = 0
    for x in reversed(ds.digits):
        if not 0 <= x < ds.base:
            raise ValueError(f"digit {x} out of range for base {ds.base}")
        v = v * ds.base + x
    return v


def parity_pattern(ds: DigitString) -> str:
    return "".join("o" if x % 2 else "e" for x in ds.digits)


def remove_second_digit(ds: DigitString) -> DigitString:
    """Delete the digit at position 1.

    Only defined for an odd first digit followed by an even second digit;
    in that regime the result has the same value as ``ceil(n / base)`` up to
    the alternation of odd positions within a block.
    """
    d = ds.digits
    if len(d) < 2:
        raise ValueError("need at least two digits")
    if d[0] % 2 == 0:
        raise ValueError("first digit must be odd")
    if d[1] % 2:
        raise ValueError("second digit must be even")
    return DigitString(ds.base, (d[0],) + d[2:])


def first_even_block_length(ds: DigitString) -> int:
    """Length of the run of even digits starting at position 1."""
    d = ds.digits
    if not d or d[0] % 2 == 0:
        raise ValueError("first digit must be odd")
    k = 0
    for x in d[1:]:
        if x % 2:
            break
        k += 1
    return k


def has_terminating_odd(ds: DigitString) -> bool:
    """Whether an odd digit follows the first even block."""
    return 1 + first_even_block_length(ds) < len(ds.digits)


def format_pattern(ds: DigitString) -> str:
    """Parity pattern with the first even block fenced off, e.g. ``oee|o``."""
    pat = parity_pattern(ds)
    if not pat or pat[0] == "e":
        return pat
    k = first_even_block_length(ds)
    head, tail = pat[: 1 + k], pat[1 + k :]
    return f"{head}|{tail}" if tail else head
