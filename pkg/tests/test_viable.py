"""Viable value query: walking, cycle detection, conflict lemma validity."""

import itertools

from wordbv import fi, terms, viable
from wordbv.intervals import WInterval, contains
from wordbv.terms import Poly
from wordbv.viable import FIEntry, QueryConflict, QueryStuck, QueryValue, ViableStore

X = 0


def entry(w, lo, hi, k=None, **kw):
    k = w - 1 if k is None else k
    return FIEntry(var=X, k=k, ivl=WInterval(k + 1, lo, hi), **kw)


def run_query(w, entries, constraints=(), x_prev=0, asg=None):
    asg = asg or {}

    def violated(clit, v):
        val = terms.eval_constraint(clit.atom, {**asg, X: v})
        if not clit.positive:
            val = not val
        return val is False

    def compute(clit, v):
        ext = fi.analyze(clit.atom, clit.positive, X, asg, sample=v)
        if ext is None or ext == "full":
            return (
                None
                if ext is None
                else FIEntry(var=X, k=w - 1, ivl=WInterval.full_domain(w))
            )
        return FIEntry(var=X, k=ext.k, ivl=ext.ivl, lo_sym=ext.lo_sym, hi_sym=ext.hi_sym)

    return viable.query(w, list(entries), list(constraints), x_prev, violated, compute)


def test_walk_to_first_gap():
    res = run_query(4, [entry(4, 0, 8), entry(4, 8, 12)])
    assert isinstance(res, QueryValue) and res.value == 12


def test_covering_intervals_conflict():
    res = run_query(4, [entry(4, 0, 8), entry(4, 6, 0)])
    assert isinstance(res, QueryConflict)
    # the cycle revisits its first interval
    assert res.cycle[0].eid == res.cycle[-1].eid
    # and the concrete union covers the whole domain
    union = set()
    for e in res.cycle:
        union |= {v for v in range(16) if contains(e.ivl, v)}
    assert union == set(range(16))


def test_constraint_driven_extraction():
    # no intervals, constraint x >=u 10 (i.e. not (x <=u 9))
    w = 4
    c = terms.mk_ule(Poly.var(w, X), Poly.constant(w, 9), positive=False)
    res = run_query(w, [], [c])
    assert isinstance(res, QueryValue) and res.value == 10


def test_mixed_width_walk_bumps_high_bits():
    # 1-bit interval forbidding even values plus a range over the full width
    w = 4
    evens = entry(w, 0, 1, k=0)
    rng = entry(w, 1, 9)
    res = run_query(w, [evens, rng])
    assert isinstance(res, QueryValue)
    assert res.value % 2 == 1 and not contains(rng.ivl, res.value)
    assert res.value == 9


def test_full_entry_immediate_conflict():
    full = FIEntry(var=X, k=3, ivl=WInterval.full_domain(4))
    res = run_query(4, [full])
    assert isinstance(res, QueryConflict) and res.cycle == [full]


def test_is_conflict_definition():
    a, b, c = entry(4, 0, 4), entry(4, 4, 8), entry(8, 0, 128, k=7)
    assert viable.is_conflict([a, b, a])
    assert not viable.is_conflict([a, b])
    assert not viable.is_conflict([a, c, a])  # wider interval in between


def test_store_orders_and_drops_contained():
    st = ViableStore()
    big = entry(4, 2, 10)
    small = entry(4, 3, 5)
    assert st.add(big)
    assert not st.add(small)  # contained in big
    assert st.add(entry(4, 9, 1))  # overlaps but not contained
    assert [e.ivl.lo for e in st.for_var(X)] == [2, 9]
    # adding a superset removes the smaller one
    m = st.mark()
    huge = entry(4, 2, 12)
    assert st.add(huge)
    assert big not in st.for_var(X)
    st.undo_to(m)
    assert big in st.for_var(X) and huge not in st.for_var(X)


def test_query_value_is_viable():
    # returned value lies outside every interval and satisfies constraints
    w = 4
    for lo, hi in [(0, 5), (3, 9), (12, 2)]:
        c = terms.mk_ule(Poly.var(w, X), Poly.constant(w, 13))
        res = run_query(w, [entry(w, lo, hi)], [c])
        if isinstance(res, QueryValue):
            assert not contains(WInterval(w, lo, hi), res.value)
            assert res.value <= 13


def test_conflict_union_covers_exhaustive():
    # for every pair/triple of intervals, a conflict verdict implies the
    # concrete union of the cycle covers the domain
    w = 4
    n = 1 << w
    cases = []
    for l1, h1, l2, h2 in itertools.product((0, 3, 7, 12, 15), repeat=4):
        cases.append([(l1, h1), (l2, h2)])
    for spec_ in cases:
        es = [entry(w, lo, hi) for lo, hi in spec_ if lo != hi]
        res = run_query(w, es)
        if isinstance(res, QueryConflict):
            union = set()
            for e in res.cycle:
                union |= {v for v in range(n) if contains(e.ivl, v)}
            assert union == set(range(n)), spec_
        elif isinstance(res, QueryValue):
            for e in es:
                assert not contains(e.ivl, res.value)


class FakeCtx:
    def __init__(self, asg):
        self.asg = asg
        self.membership_atoms = []
        self.pins = []

    def membership_lit(self, t, lo, hi):
        lit = terms.mk_ule(hi - lo, t - lo, positive=False)
        self.membership_atoms.append(lit)
        return len(self.membership_atoms)

    def pin_lit(self, var):
        self.pins.append(var)
        return 100 + var


def test_conflict_lemma_two_complementary_intervals():
    w = 4
    e1 = entry(w, 0, 8, reasons=(1,))
    e2 = entry(w, 8, 0, reasons=(2,))
    res = run_query(w, [e1, e2])
    assert isinstance(res, QueryConflict)
    ctx = FakeCtx({})
    clause = viable.conflict_lemma(res.cycle, ctx)
    assert -1 in clause and -2 in clause
    # two membership literals, each the negation of an endpoint-in-interval
    assert len(ctx.membership_atoms) == 2
    # lemma validity: under any total assignment, some literal is true;
    # here all atoms are ground so just evaluate both memberships
    for m in ctx.membership_atoms:
        val = m.const_value()
        if val is None:
            val = terms.eval_constraint(m.atom, {})
            if not m.positive:
                val = not val
        assert val is True  # memberships hold, so the negated reasons carry the clause


def test_conflict_lemma_symbolic_membership_validity():
    # intervals with symbolic endpoints over one parameter variable y:
    # validity must hold for all values of y (checked by enumeration)
    w = 4
    Y = 5
    ylo = Poly.var(w, Y)
    e1 = FIEntry(
        var=X, k=3, ivl=WInterval(4, 2, 8),
        lo_sym=ylo, hi_sym=ylo + 6, reasons=(1,),
    )
    e2 = FIEntry(
        var=X, k=3, ivl=WInterval(4, 8, 2),
        lo_sym=ylo + 6, hi_sym=ylo, reasons=(2,),
    )
    cycle = [e1, e2, e1]
    ctx = FakeCtx({})
    viable.conflict_lemma(cycle, ctx)
    # the lemma says: reasons and memberships cannot all hold; since the
    # two intervals are complementary for every y, each membership atom is
    # true under every assignment of y
    for yv in range(16):
        for m in ctx.membership_atoms:
            val = m.const_value()
            if val is None:
                val = terms.eval_constraint(m.atom, {Y: yv})
                if not m.positive:
                    val = not val
            assert val, (yv, m)


def test_stuck_on_structural_constraint():
    # a structural constraint cannot produce an interval: query gets stuck
    w = 4
    d = terms.mk_structural(terms.EQ_AND, X, Poly.constant(w, 3), Poly.constant(w, 5))
    res = run_query(w, [], [d], asg={})
    assert isinstance(res, QueryStuck)
    assert res.candidate == 0  # 0 != 3 & 5 = 1
