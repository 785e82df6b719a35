"""Half-open wrapping intervals [lo ; hi[ over Z/2**w.

Membership is decided by the single bit-vector inequality
(t - lo) <u (hi - lo).  An interval with lo == hi is empty under that
formula, so the full domain gets an explicit flag instead of a sentinel
encoding.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bv import truncate


@dataclass(frozen=True)
class WInterval:
    """Wrapping interval [lo ; hi[ of width-bit values."""

    width: int
    lo: int
    hi: int
    full: bool = False

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError("width must be >= 1")
        if not (0 <= self.lo < (1 << self.width) and 0 <= self.hi < (1 << self.width)):
            raise ValueError("interval bounds out of range")
        if self.full and self.lo != self.hi:
            raise ValueError("full interval must have lo == hi")

    @staticmethod
    def full_domain(width: int) -> "WInterval":
        return WInterval(width, 0, 0, full=True)

    @property
    def is_empty(self) -> bool:
        return not self.full and self.lo == self.hi

    def __str__(self) -> str:
        if self.full:
            return f"[full[ ({self.width} bits)"
        return f"[{self.lo} ; {self.hi}[ ({self.width} bits)"


def contains(ivl: WInterval, t: int) -> bool:
    """Membership test: full -> always; else (t - lo) <u (hi - lo)."""
    if ivl.full:
        return True
    m = (1 << ivl.width) - 1
    return (t - ivl.lo) & m < (ivl.hi - ivl.lo) & m


def length(ivl: WInterval) -> int:
    """Number of members, in [0, 2**width]."""
    if ivl.full:
        return 1 << ivl.width
    return (ivl.hi - ivl.lo) & ((1 << ivl.width) - 1)


def forward(x0: int, ivl: WInterval) -> int:
    """First value at or after x0 (wrapping upward) not covered by ivl.

    Requires contains(ivl, x0) and a non-full interval; the exit point is
    always the interval's upper bound.
    """
    if ivl.full:
        raise ValueError("full interval has no exit point")
    if not contains(ivl, x0):
        raise ValueError(f"{x0} not in {ivl}")
    return ivl.hi


def forward_step(x0: int, ivl: WInterval) -> int:
    """Distance from x0 to the exit point of ivl, in wrapping order (> 0)."""
    return (ivl.hi - x0) & ((1 << ivl.width) - 1)


def interval_of_complement(ivl: WInterval) -> WInterval:
    """The complementary interval [hi ; lo[ (empty <-> full swap)."""
    if ivl.full:
        return WInterval(ivl.width, ivl.lo, ivl.hi, full=False)
    if ivl.is_empty:
        return WInterval.full_domain(ivl.width)
    return WInterval(ivl.width, ivl.hi, ivl.lo)


def make(width: int, lo: int, hi: int) -> WInterval:
    """Interval from raw integer bounds, reduced mod 2**width.

    lo == hi after reduction yields the EMPTY interval; callers that mean
    the full domain must use WInterval.full_domain.
    """
    return WInterval(width, truncate(lo, width), truncate(hi, width))
