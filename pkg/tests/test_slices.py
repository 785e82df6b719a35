"""Slice equality graph: range equalities, constant propagation, backtracking."""

import itertools
import random

from wordbv.slices import SliceConflict, SliceGraph

X, Y, Z = 0, 1, 2


def fresh(widths):
    g = SliceGraph()
    for v, w in widths.items():
        g.ensure_var(v, w)
    return g


def test_overlapping_self_equality_infers_shifted_pairs():
    g = fresh({X: 8})
    g.assert_slice_eq((X, 5, 2), (X, 3, 0))
    assert g.slices_equal((X, 5, 4), (X, 1, 0))
    assert g.slices_equal((X, 3, 2), (X, 1, 0))


def test_idempotent_and_reflexive():
    g = fresh({X: 8, Y: 8})
    first = g.assert_slice_eq((X, 3, 0), (Y, 3, 0))
    assert first
    again = g.assert_slice_eq((X, 3, 0), (Y, 3, 0))
    assert again == []
    assert g.assert_slice_eq((X, 7, 0), (X, 7, 0)) == []


def test_fixed_propagates_through_slicing():
    g = fresh({X: 8})
    g.assert_fixed((X, 7, 0), 0xA5)
    assert g.fixed_value((X, 3, 0))[0] == 0x5
    assert g.fixed_value((X, 7, 4))[0] == 0xA
    # distinct constants conflict
    g2 = fresh({X: 8})
    g2.assert_fixed((X, 3, 0), 1, reasons=(11,))
    res = g2.assert_fixed((X, 3, 0), 2, reasons=(22,))
    assert isinstance(res, SliceConflict)
    assert set(res.reasons) == {11, 22}


def test_fixed_through_merge():
    g = fresh({X: 8, Y: 8})
    g.assert_slice_eq((X, 3, 0), (Y, 3, 0))
    g.assert_fixed((Y, 1, 0), 2, reasons=(5,))
    got = g.fixed_value((X, 1, 0))
    assert got is not None and got[0] == 2 and 5 in got[1]
    info = g.fixed_prefix_info(X)
    assert any(hi == 1 and lo == 0 and val == 2 for hi, lo, val, _ in info)


def test_fixed_prefix_info_fresh_empty():
    g = fresh({X: 8})
    assert g.fixed_prefix_info(X) == []
    g.assert_fixed((X, 3, 2), 0b11)
    assert g.fixed_prefix_info(X) == [(3, 2, 3, ())]


def test_query_sixteen_bit_slice():
    g = fresh({Z: 16})
    g.assert_fixed((Z, 15, 8), 123)
    assert g.fixed_value((Z, 15, 8))[0] == 123


def test_concat_style_composition():
    # x.width 8 split as y ++ z; fixing both halves fixes x
    g = fresh({X: 8, Y: 4, Z: 4})
    g.assert_slice_eq((X, 7, 4), (Y, 3, 0))
    g.assert_slice_eq((X, 3, 0), (Z, 3, 0))
    g.assert_fixed((Y, 3, 0), 0xB)
    assert g.fixed_full_value(X) is None
    g.assert_fixed((Z, 3, 0), 0x6)
    assert g.fixed_full_value(X)[0] == 0xB6


def test_prefix_aliases():
    g = fresh({X: 8, Y: 4})
    g.assert_slice_eq((Y, 3, 0), (X, 3, 0))
    assert (Y, 3) in [(v, k) for v, k in g.prefix_aliases(X)]
    assert g.prefix_aliases(Y) == []  # X itself is wider, no alias the other way


def test_chained_equality_via_bit_shift():
    # x[7:1] = x[6:0] forces all bits equal
    g = fresh({X: 8})
    g.assert_slice_eq((X, 7, 1), (X, 6, 0))
    for i in range(7):
        assert g.slices_equal((X, i + 1, i + 1), (X, 0, 0))


def test_backtracking_restores_state():
    g = fresh({X: 8, Y: 8})
    g.assert_slice_eq((X, 3, 0), (Y, 3, 0))  # level-0 structure
    m = g.mark()
    g.assert_fixed((Y, 3, 0), 7, reasons=(1,))
    assert g.fixed_value((X, 3, 0))[0] == 7
    g.undo_to(m)
    assert g.fixed_value((X, 3, 0)) is None
    assert g.same_class((X, 3, 0), (Y, 3, 0))  # structure survives
    # refix differently after undo
    g.assert_fixed((Y, 3, 0), 9, reasons=(2,))
    assert g.fixed_value((X, 3, 0))[0] == 9


def _soundness_reference(widths, eqs, fixes):
    """Enumerate total assignments consistent with eqs and fixes."""
    vars_ = sorted(widths)
    models = []
    for vals in itertools.product(*(range(1 << widths[v]) for v in vars_)):
        asg = dict(zip(vars_, vals))
        ok = True
        for (va, ha, la), (vb, hb, lb) in eqs:
            if (asg[va] >> la) & ((1 << (ha - la + 1)) - 1) != (asg[vb] >> lb) & (
                (1 << (hb - lb + 1)) - 1
            ):
                ok = False
                break
        if ok:
            for (v, h, l), n in fixes:
                if (asg[v] >> l) & ((1 << (h - l + 1)) - 1) != n:
                    ok = False
                    break
        if ok:
            models.append(asg)
    return models


def test_implied_facts_sound_small_exhaustive():
    rng = random.Random(42)
    widths = {X: 4, Y: 4}
    for _ in range(60):
        g = fresh(widths)
        eqs = []
        fixes = []
        conflict = False
        for _ in range(3):
            if rng.random() < 0.6:
                w = rng.choice([1, 2, 3])
                la = rng.randrange(4 - w + 1)
                lb = rng.randrange(4 - w + 1)
                va, vb = rng.choice([(X, Y), (X, X), (Y, X)])
                e = ((va, la + w - 1, la), (vb, lb + w - 1, lb))
                eqs.append(e)
                if isinstance(g.assert_slice_eq(*e), SliceConflict):
                    conflict = True
                    break
            else:
                w = rng.choice([1, 2])
                lo = rng.randrange(4 - w + 1)
                v = rng.choice([X, Y])
                n = rng.randrange(1 << w)
                fixes.append(((v, lo + w - 1, lo), n))
                if isinstance(g.assert_fixed((v, lo + w - 1, lo), n), SliceConflict):
                    conflict = True
                    break
        models = _soundness_reference(widths, eqs, fixes)
        if conflict:
            assert models == [], (eqs, fixes)
            continue
        # every derived fixed chunk must hold in every model
        for v in widths:
            for hi, lo, val, _ in g.fixed_prefix_info(v):
                for m in models:
                    got = (m[v] >> lo) & ((1 << (hi - lo + 1)) - 1)
                    assert got == val, (eqs, fixes, v, hi, lo)
        # every derivable single-bit equality must agree in every model
        for i in range(4):
            for j in range(4):
                if g.slices_equal((X, i, i), (Y, j, j)):
                    for m in models:
                        assert (m[X] >> i) & 1 == (m[Y] >> j) & 1


def test_order_independence_of_closure():
    ops = [
        ("eq", (X, 5, 2), (X, 3, 0)),
        ("fix", (X, 1, 0), 2),
        ("eq", (Y, 7, 4), (X, 7, 4)),
    ]
    outcomes = set()
    for perm in itertools.permutations(ops):
        g = fresh({X: 8, Y: 8})
        ok = True
        for op in perm:
            if op[0] == "eq":
                res = g.assert_slice_eq(op[1], op[2])
            else:
                res = g.assert_fixed(op[1], op[2])
            if isinstance(res, SliceConflict):
                ok = False
        assert ok
        facts = []
        for v in (X, Y):
            facts.extend((v,) + f[:3] for f in g.fixed_prefix_info(v))
        outcomes.add(frozenset(facts))
    assert len(outcomes) == 1
