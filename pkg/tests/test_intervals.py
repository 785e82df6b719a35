"""Wrapping intervals: membership, length, forward stepping."""

import pytest

from wordbv import intervals as iv
from wordbv.intervals import WInterval


def members_by_cases(w, lo, hi):
    """Set-union oracle: [lo;hi[ is [0;hi[ u [lo;2^w[ when lo > hi."""
    if lo <= hi:
        return set(range(lo, hi))
    return set(range(0, hi)) | set(range(lo, 1 << w))


def test_contains_wrapping_examples():
    i = WInterval(3, 6, 2)
    assert iv.contains(i, 7)
    assert iv.contains(i, 0)
    assert not iv.contains(i, 3)
    assert iv.contains(WInterval(4, 2, 5), 3)
    assert not iv.contains(WInterval(4, 5, 5), 5)  # lo == hi, not full: empty
    assert iv.contains(WInterval.full_domain(4), 9)


def test_contains_matches_case_split_exhaustive():
    for w in range(1, 7):
        for lo in range(1 << w):
            for hi in range(1 << w):
                ref = members_by_cases(w, lo, hi) if lo != hi else set()
                i = WInterval(w, lo, hi)
                got = {t for t in range(1 << w) if iv.contains(i, t)}
                assert got == ref, (w, lo, hi)


def test_length():
    assert iv.length(WInterval(4, 2, 5)) == 3
    assert iv.length(WInterval(3, 6, 2)) == 4  # {6,7,0,1}
    assert iv.length(WInterval.full_domain(4)) == 16
    for w in range(1, 7):
        for lo in range(1 << w):
            for hi in range(1 << w):
                i = WInterval(w, lo, hi)
                assert iv.length(i) == sum(iv.contains(i, t) for t in range(1 << w))


def test_forward_examples():
    assert iv.forward(3, WInterval(4, 2, 5)) == 5
    assert iv.forward(7, WInterval(4, 6, 2)) == 2  # walk 7..15, 0, 1 exits at 2
    assert iv.forward(0, WInterval(4, 0, 8)) == 8


def test_forward_errors():
    with pytest.raises(ValueError):
        iv.forward(0, WInterval.full_domain(4))
    with pytest.raises(ValueError):
        iv.forward(3, WInterval(4, 6, 2))


def test_forward_exits_and_covers_exhaustive():
    # forward's result is not a member, and every value strictly between
    # x0 and the exit (in wrapping order) is a member
    for w in range(1, 6):
        n = 1 << w
        for lo in range(n):
            for hi in range(n):
                i = WInterval(w, lo, hi)
                if i.is_empty:
                    continue
                for x0 in range(n):
                    if not iv.contains(i, x0):
                        continue
                    out = iv.forward(x0, i)
                    assert not iv.contains(i, out)
                    t = x0
                    while t != out:
                        assert iv.contains(i, t)
                        t = (t + 1) % n


def test_render():
    assert str(WInterval(4, 2, 5)) == "[2 ; 5[ (4 bits)"
    assert str(WInterval.full_domain(4)) == "[full[ (4 bits)"
