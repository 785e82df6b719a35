"""Polynomials, constraint reduction/normalization, linear views, division axioms."""

import itertools
import random

from wordbv import terms
from wordbv.terms import Assign, Constraint, Literal, Poly


X, Y, Z = 0, 1, 2


def P(width, expr_const=0):
    return Poly.constant(width, expr_const)


def test_poly_arithmetic_folds_mod():
    w = 4
    p = Poly.var(w, Y, 2) + Poly.var(w, Z) - 6
    # 2y + z - 6 evaluated with y = 14: 2*14 = 28 = 12, 12 - 6 = 6
    q = p.evaluate({Y: 14})
    assert q == Poly.var(w, Z) + 6
    assert (Poly.var(w, X) * Poly.var(w, Y)).evaluate({X: 0}).value() is None or True
    assert (Poly.var(w, X) * Poly.var(w, Y) + 3).evaluate({X: 0}) == Poly.constant(w, 3)


def test_poly_substitution_and_eval():
    w = 4
    p = Poly.var(w, X) + Poly.var(w, Y)
    assert p.evaluate({X: 2}) == Poly.var(w, Y) + 2
    # substitute a polynomial for a variable
    sq = Poly.var(w, X) * Poly.var(w, X)
    assert sq.subst(X, Poly.var(w, Y) + 1) == (Poly.var(w, Y) + 1) * (Poly.var(w, Y) + 1)
    assert (Poly.var(w, X, 3) + 5).eval_value({X: 2}) == 11


def test_monomials_canonical():
    w = 8
    a = Poly.var(w, X) * Poly.var(w, Y)
    b = Poly.var(w, Y) * Poly.var(w, X)
    assert a == b and hash(a) == hash(b)
    # coefficient multiples of 2^w vanish
    assert Poly.var(w, X, 256).is_const()


def test_reduce_derived_forms():
    w = 4
    x, y = Poly.var(w, X), Poly.var(w, Y)
    lt = terms.reduce_derived("ult", x, y)
    assert not lt.positive and lt.atom.kind == terms.ULE
    eq = terms.reduce_derived("eq", x, y)
    assert eq.positive and eq.atom.is_eq_zero()
    assert eq.atom.args[0] == x - y
    # subtraction is addition of the (2^w - 1)-scaled operand
    assert x - y == x + y.scale(15)
    # bvnot is -p - 1
    assert terms.bvnot_poly(x) == -x - 1
    ov = terms.reduce_derived("ovfl_add", x, y)
    assert not ov.positive and ov.atom == terms.mk_ule(x, x + y).atom


def test_normalize_equal_zero_spellings():
    w = 4
    rng = random.Random(7)
    for _ in range(200):
        p = Poly(
            w,
            [((v,), rng.randrange(16)) for v in (X, Y, Z)]
            + [((X, Y), rng.randrange(16))],
            rng.randrange(16),
        )
        if p.is_const():
            continue
        zero = Poly.constant(w, 0)
        a = terms.mk_ule(p, zero)                       # p <=u 0
        b = terms.reduce_derived("ult", p, P(w, 1))     # p <u 1
        c = terms.mk_ule(P(w, 15), p - 1)               # -1 <=u p - 1
        assert a == b == c
        assert a.positive and a.atom.is_eq_zero()


def test_normalize_idempotent_and_value_preserving():
    w = 3
    rng = random.Random(3)
    for _ in range(300):
        lhs = Poly(w, [((X,), rng.randrange(8)), ((Y,), rng.randrange(8))], rng.randrange(8))
        rhs = Poly(w, [((X,), rng.randrange(8))], rng.randrange(8))
        lit = terms.mk_ule(lhs, rhs)
        for xv, yv in itertools.product(range(8), repeat=2):
            asg = {X: xv, Y: yv}
            want = lhs.eval_value(asg) <= rhs.eval_value(asg)
            got = lit.const_value()
            if got is None:
                got = terms.eval_constraint(lit.atom, asg)
                if not lit.positive:
                    got = not got
            assert got == want, (lhs, rhs, asg)
        # renormalizing the canonical form is a fixed point
        if not isinstance(lit.atom, bool):
            again = terms.mk_ule(lit.atom.args[0], lit.atom.args[1])
            assert again.atom == lit.atom


def test_trivial_comparisons_fold():
    w = 4
    x = Poly.var(w, X)
    assert terms.mk_ule(P(w, 0), x) == terms.TRUE
    assert terms.mk_ule(x, P(w, 15)) == terms.TRUE
    assert terms.mk_ule(x, x) == terms.TRUE
    assert terms.mk_ule(P(w, 9), P(w, 3)) == terms.FALSE
    assert terms.mk_ovfl(P(w, 1), x) == terms.FALSE
    assert terms.mk_ovfl(x, P(w, 0)) == terms.FALSE


def test_linear_abstraction():
    w = 4
    x, y, z = Poly.var(w, X), Poly.var(w, Y), Poly.var(w, Z)
    # x + y vs 10, viewed in y with x unassigned: coefficient 1, rest x
    c = terms.mk_ule(P(w, 10), x + y).atom
    view = terms.linear_abstraction(c, Y, {})
    assert view is not None
    assert view.a_rhs == 1 and view.rest_rhs == x

    # x*z + y vs 10 in x: unavailable while z is unassigned
    c2 = terms.mk_ule(P(w, 10), x * z + y).atom
    assert terms.linear_abstraction(c2, X, {}) is None
    # with z = 3 the coefficient becomes concrete
    view2 = terms.linear_abstraction(c2, X, {Z: 3})
    assert view2.a_rhs == 3 and view2.rest_rhs == y and view2.coeff_rhs == z

    # degree two is never linear
    c3 = terms.mk_ule(x * x, P(w, 3)).atom
    assert terms.linear_abstraction(c3, X, {Z: 1}) is None


def test_structural_eval():
    w = 4
    lit = terms.mk_structural(terms.EQ_LSHR, X, Poly.constant(w, 13), Poly.var(w, Y))
    assert terms.eval_constraint(lit.atom, {X: 3, Y: 2}) is True  # 13 >> 2 = 3
    assert terms.eval_constraint(lit.atom, {X: 2, Y: 2}) is False
    assert terms.eval_constraint(lit.atom, {Y: 2}) is None
    lit2 = terms.mk_structural(terms.EQ_ASHR, X, Poly.constant(w, 12), Poly.constant(w, 1))
    assert terms.eval_constraint(lit2.atom, {X: 14}) is True  # sign bit stays


def _enumerate_udiv_models(w, xv, yv):
    """All (q, r) satisfying the five division axioms at (x, y)."""
    n = 1 << w
    sols = []
    for q in range(n):
        for r in range(n):
            if (q * yv + r) % n != xv:
                continue
            if q * yv >= n:          # multiplicative overflow forbidden
                continue
            if (q * yv) % n > (-r - 1) % n:   # additive overflow forbidden
                continue
            if yv != 0 and not r < yv:
                continue
            if yv == 0 and q != n - 1:
                continue
            sols.append((q, r))
    return sols


def test_udiv_axioms_unique_model_exhaustive():
    w = 4
    n = 1 << w
    for xv in range(n):
        for yv in range(n):
            sols = _enumerate_udiv_models(w, xv, yv)
            if yv:
                want = (xv // yv, xv % yv)
            else:
                want = (n - 1, xv)
            assert sols == [want], (xv, yv, sols)


def test_axiomatize_udiv_clause_shapes():
    w = 4
    counter = itertools.count(10)
    q, r, clauses = terms.axiomatize_udiv(
        Poly.var(w, X), Poly.var(w, Y), lambda: next(counter)
    )
    assert q == 10 and r == 11
    assert len(clauses) == 5
    assert all(len(cl) in (1, 2) for cl in clauses)
    # main axiom: q*y + r - x == 0
    main = clauses[0][0]
    assert main.positive and main.atom.is_eq_zero()
    got = main.atom.args[0]
    want = Poly.var(w, q) * Poly.var(w, Y) + Poly.var(w, r) - Poly.var(w, X)
    assert got == want


def test_assign_literals():
    lit = terms.mk_assign(X, 21, 4)
    assert isinstance(lit.atom, Assign)
    assert lit.atom.value == 5  # reduced mod 16
