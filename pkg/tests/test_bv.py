"""Machine arithmetic on bit-vector values, checked exhaustively at small widths."""

import pytest

from wordbv import bv
from wordbv.bv import BvVal


def test_ring_ops_w4():
    assert bv.mul(BvVal(4, 5), BvVal(4, 7)).value == 3  # 35 mod 16
    assert bv.add(BvVal(4, 15), BvVal(4, 1)).value == 0
    assert bv.neg(BvVal(4, 1)).value == 15


def test_width_mismatch_rejected():
    with pytest.raises(ValueError):
        bv.add(BvVal(4, 1), BvVal(5, 1))
    with pytest.raises(ValueError):
        bv.ult(BvVal(3, 1), BvVal(4, 1))


def test_comparisons():
    assert not bv.ult(BvVal(4, 15), BvVal(4, 0))
    assert bv.slt(BvVal(4, 15), BvVal(4, 0))  # 15 is -1 signed
    assert bv.ule(BvVal(4, 3), BvVal(4, 3))


def test_overflow_predicates():
    assert bv.ovfl_mul(BvVal(4, 5), BvVal(4, 7))
    assert not bv.ovfl_mul(BvVal(4, 0), BvVal(4, 15))
    assert bv.ovfl_add(BvVal(4, 15), BvVal(4, 1))


def test_division():
    assert bv.udiv(BvVal(4, 7), BvVal(4, 2)).value == 3
    assert bv.urem(BvVal(4, 7), BvVal(4, 2)).value == 1
    # division by zero: quotient is all-ones, remainder is the dividend
    assert bv.udiv(BvVal(4, 5), BvVal(4, 0)).value == 15
    assert bv.urem(BvVal(4, 5), BvVal(4, 0)).value == 5


def test_parity():
    assert bv.parity(BvVal(4, 0)) == 4
    assert bv.parity(BvVal(4, 12)) == 2
    assert bv.parity(bv.mul(BvVal(8, 4), BvVal(8, 2))) == 3


def test_msb_index():
    assert bv.msb_index(BvVal(4, 1)) == 1
    assert bv.msb_index(BvVal(4, 2)) == 2
    assert bv.msb_index(BvVal(4, 0)) == 0
    # defining equivalence: msb(p) >= i iff p >=u 2^(i-1)
    for w in range(1, 7):
        for p in range(1 << w):
            m = bv.msb_index(BvVal(w, p))
            for i in range(1, w + 1):
                assert (m >= i) == (p >= 1 << (i - 1))


def test_extract_concat_bit():
    a = BvVal(8, 0b10110100)
    assert bv.extract(a, 5, 2).value == 0b1101
    assert bv.extract(a, 5, 2).width == 4
    assert bv.concat(BvVal(2, 0b10), BvVal(1, 0b1)) == BvVal(3, 0b101)
    assert bv.extract(a, 7, 0) == a
    assert bv.bit(a, 0) is False
    assert bv.bit(a, 2) is True
    with pytest.raises(ValueError):
        bv.extract(a, 8, 0)


def test_ovfl_add_matches_wraparound_exhaustive():
    # ovfl_add(a, b) iff add(a, b) <u a, whenever b != 0
    for w in range(1, 7):
        for a in range(1 << w):
            for b in range(1, 1 << w):
                va, vb = BvVal(w, a), BvVal(w, b)
                assert bv.ovfl_add(va, vb) == bv.ult(bv.add(va, vb), va)


def test_signed_via_offset_exhaustive():
    for w in range(1, 7):
        half = BvVal(w, (1 << (w - 1)) % (1 << w)) if w > 1 else BvVal(1, 1)
        for a in range(1 << w):
            for b in range(1 << w):
                va, vb = BvVal(w, a), BvVal(w, b)
                assert bv.slt(va, vb) == bv.ult(bv.add(va, half), bv.add(vb, half))


def test_division_axiom_exhaustive():
    # a = udiv(a,b)*b + urem(a,b) without overflow in the sum, for b != 0
    for w in range(1, 7):
        for a in range(1 << w):
            for b in range(1, 1 << w):
                va, vb = BvVal(w, a), BvVal(w, b)
                q, r = bv.udiv(va, vb), bv.urem(va, vb)
                assert not bv.ovfl_mul(q, vb)
                prod = bv.mul(q, vb)
                assert not bv.ovfl_add(prod, r)
                assert bv.add(prod, r) == va


def test_parity_of_product_exhaustive():
    for w in range(1, 7):
        for p in range(1 << w):
            for q in range(1 << w):
                vp, vq = BvVal(w, p), BvVal(w, q)
                assert bv.parity(bv.mul(vp, vq)) == min(w, bv.parity(vp) + bv.parity(vq))


def test_msb_sum_overflow_split_exhaustive():
    for w in range(1, 7):
        for p in range(1 << w):
            for q in range(1 << w):
                vp, vq = BvVal(w, p), BvVal(w, q)
                s = bv.msb_index(vp) + bv.msb_index(vq)
                if s >= w + 2:
                    assert bv.ovfl_mul(vp, vq)
                if s <= w:
                    assert not bv.ovfl_mul(vp, vq)


def test_large_widths():
    w = 256
    big = BvVal(w, (1 << w) - 1)
    assert bv.add(big, BvVal(w, 1)).value == 0
    assert bv.mul(big, big).value == 1  # (-1)^2
    assert bv.msb_index(big) == 256
