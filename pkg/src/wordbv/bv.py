"""Arbitrary-width bit-vector values and machine arithmetic mod 2**w.

Values are elements of Z/2**w represented by their unsigned representative
in [0, 2**w).  Python integers back the representation, so widths of 256
bits and beyond work unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass


def mask(width: int) -> int:
    return (1 << width) - 1


def truncate(value: int, width: int) -> int:
    """Reduce an integer into the unsigned representative in [0, 2**width)."""
    return value & ((1 << width) - 1)


def to_signed(value: int, width: int) -> int:
    """Signed (two's complement) representative in [-2**(w-1), 2**(w-1))."""
    if value >= 1 << (width - 1):
        return value - (1 << width)
    return value


@dataclass(frozen=True)
class BvVal:
    """A bit-vector value together with its width."""

    width: int
    value: int

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError(f"width must be >= 1, got {self.width}")
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(f"value {self.value} out of range for width {self.width}")

    def __str__(self) -> str:
        if self.width % 4 == 0:
            return f"#x{self.value:0{self.width // 4}x}"
        return f"#b{self.value:0{self.width}b}"


def _check_widths(a: BvVal, b: BvVal) -> None:
    if a.width != b.width:
        raise ValueError(f"width mismatch: {a.width} vs {b.width}")


def add(a: BvVal, b: BvVal) -> BvVal:
    _check_widths(a, b)
    return BvVal(a.width, (a.value + b.value) & mask(a.width))


def sub(a: BvVal, b: BvVal) -> BvVal:
    _check_widths(a, b)
    return BvVal(a.width, (a.value - b.value) & mask(a.width))


def mul(a: BvVal, b: BvVal) -> BvVal:
    _check_widths(a, b)
    return BvVal(a.width, (a.value * b.value) & mask(a.width))


def neg(a: BvVal) -> BvVal:
    return BvVal(a.width, (-a.value) & mask(a.width))


def ult(a: BvVal, b: BvVal) -> bool:
    _check_widths(a, b)
    return a.value < b.value


def ule(a: BvVal, b: BvVal) -> bool:
    _check_widths(a, b)
    return a.value <= b.value


def slt(a: BvVal, b: BvVal) -> bool:
    # signed comparison via the offset identity: p <=s q iff p+2^(w-1) <=u q+2^(w-1)
    _check_widths(a, b)
    half = 1 << (a.width - 1)
    return (a.value + half) & mask(a.width) < (b.value + half) & mask(a.width)


def sle(a: BvVal, b: BvVal) -> bool:
    _check_widths(a, b)
    half = 1 << (a.width - 1)
    return (a.value + half) & mask(a.width) <= (b.value + half) & mask(a.width)


def ovfl_add(a: BvVal, b: BvVal) -> bool:
    """True iff the integer sum does not fit in the width."""
    _check_widths(a, b)
    return a.value + b.value >= (1 << a.width)


def ovfl_mul(a: BvVal, b: BvVal) -> bool:
    """True iff the integer product does not fit in the width."""
    _check_widths(a, b)
    return a.value * b.value >= (1 << a.width)


def udiv(a: BvVal, b: BvVal) -> BvVal:
    """Unsigned division; division by zero yields the all-ones value."""
    _check_widths(a, b)
    if b.value == 0:
        return BvVal(a.width, mask(a.width))
    return BvVal(a.width, a.value // b.value)


def urem(a: BvVal, b: BvVal) -> BvVal:
    """Unsigned remainder; remainder by zero yields the dividend."""
    _check_widths(a, b)
    if b.value == 0:
        return a
    return BvVal(a.width, a.value % b.value)


def parity_int(value: int, width: int) -> int:
    """Largest i in [0, width] such that 2**i divides value (width for zero)."""
    if value == 0:
        return width
    return min(width, (value & -value).bit_length() - 1)


def parity(a: BvVal) -> int:
    return parity_int(a.value, a.width)


def msb_index_int(value: int) -> int:
    """One-based index of the most significant set bit; 0 for zero."""
    return value.bit_length()


def msb_index(a: BvVal) -> int:
    return a.value.bit_length()


def bit(a: BvVal, i: int) -> bool:
    """Bit i of the value; index 0 is the least significant bit."""
    if not 0 <= i < a.width:
        raise ValueError(f"bit index {i} out of range for width {a.width}")
    return (a.value >> i) & 1 == 1


def extract(a: BvVal, hi: int, lo: int) -> BvVal:
    """Sub-slice from bit hi down to bit lo inclusive (width hi-lo+1)."""
    if not 0 <= lo <= hi < a.width:
        raise ValueError(f"bad slice [{hi}:{lo}] for width {a.width}")
    return BvVal(hi - lo + 1, (a.value >> lo) & mask(hi - lo + 1))


def concat(a: BvVal, b: BvVal) -> BvVal:
    """Concatenation with `a` on the high side."""
    return BvVal(a.width + b.width, (a.value << b.width) | b.value)


def band(a: BvVal, b: BvVal) -> BvVal:
    _check_widths(a, b)
    return BvVal(a.width, a.value & b.value)


def bor(a: BvVal, b: BvVal) -> BvVal:
    _check_widths(a, b)
    return BvVal(a.width, a.value | b.value)


def bnot(a: BvVal) -> BvVal:
    return BvVal(a.width, a.value ^ mask(a.width))


def shl(a: BvVal, b: BvVal) -> BvVal:
    _check_widths(a, b)
    if b.value >= a.width:
        return BvVal(a.width, 0)
    return BvVal(a.width, (a.value << b.value) & mask(a.width))


def lshr(a: BvVal, b: BvVal) -> BvVal:
    _check_widths(a, b)
    if b.value >= a.width:
        return BvVal(a.width, 0)
    return BvVal(a.width, a.value >> b.value)


def ashr(a: BvVal, b: BvVal) -> BvVal:
    _check_widths(a, b)
    sign = (a.value >> (a.width - 1)) & 1
    if b.value >= a.width:
        return BvVal(a.width, mask(a.width) if sign else 0)
    shifted = a.value >> b.value
    if sign:
        shifted |= mask(a.width) ^ mask(a.width - b.value)
    return BvVal(a.width, shifted)
