"""Lemma rule templates: spot checks here, exhaustive validity in acceptance."""

from wordbv import lemmas, oracle, terms
from wordbv.terms import Assign, Literal, Poly

P, Q, X, R, S = 10, 11, 12, 13, 14


def fresh_polys(w, n):
    return [Poly.var(w, v) for v in (P, Q, X, R, S)[:n]]


def widths_for(w):
    return {v: w for v in (P, Q, X, R, S)}


def check_template_valid(tpl, w):
    polys = fresh_polys(w, tpl.nvars)
    for params in tpl.params(w):
        clause = tpl.build(w, *polys, *params)
        assert oracle.clause_valid(clause, widths_for(w)), (tpl.name, w, params)


def check_structural_valid(tpl, w):
    # defined variable X plus polynomial arguments P, Q
    pp, qq = Poly.var(w, P), Poly.var(w, Q)
    for params in tpl.params(w):
        clause = tpl.build(w, X, pp, qq, *params)
        assert oracle.clause_valid(clause, widths_for(w)), (tpl.name, w, params)


def test_all_templates_valid_w3():
    for tpl in lemmas.TEMPLATES:
        check_template_valid(tpl, 3)
    for tpl in lemmas.STRUCTURAL_TEMPLATES:
        check_structural_valid(tpl, 3)


def test_sqrt_bounds():
    # overflow with p >= q pushes p above ceil(sqrt(2^w))
    assert lemmas.ceil_sqrt_pow2w(4) == 4
    assert lemmas.ceil_sqrt_pow2w(3) == 3  # ceil(sqrt 8) = 3
    # and no-overflow keeps q strictly below the corrected floor bound
    assert lemmas.floor_sqrt_bound(3) == 3  # q = 2 must stay allowed at w=3
    assert lemmas.floor_sqrt_bound(4) == 4


def test_ovfl_sqrt_low_example():
    # w=4: asserted ovfl(3,3) forces 3 >= 4, an immediate contradiction
    w = 4
    clause = lemmas.ovfl_sqrt_low(w, Poly.constant(w, 3), Poly.constant(w, 3))
    # all literals are ground: the clause must contain a true literal only
    # via the negated overflow premise (3*3 = 9 < 16)
    values = [lit.const_value() for lit in clause]
    assert True in values


def test_eq_resolvent_matches_paper_chain():
    # from 2y + z - 6 = 0 and 3x + 6yz + 3z^2 - 1 = 0, eliminating y gives
    # 6x + 36z - 2 = 0
    w = 32
    x, y, z = 100, 101, 102
    p1 = Poly.var(w, y, 2) + Poly.var(w, z) - 6
    p2 = (
        Poly.var(w, x, 3)
        + Poly.var(w, y, 6) * Poly.var(w, z)
        + Poly.var(w, z) * Poly.var(w, z, 3)
        - 1
    )
    clause = lemmas.eq_resolvent(w, p1, p2, y)
    assert clause is not None
    concl = clause[-1]
    want = Poly.var(w, x, 6) + Poly.var(w, z, 36) - 2
    assert concl.atom.args[0] in (want, -want)


def test_eq_substitution_odd_inverse():
    # 3x + 1 = 0 at w=4 forces x = 5; substituting into x - 5 = 0 yields truth
    w = 4
    x = 50
    pivot = Poly.var(w, x, 3) + 1
    target = terms.mk_eq_zero(Poly.var(w, x) - 5).atom
    clause = lemmas.eq_substitution(w, pivot, x, target, True)
    assert clause is not None
    assert clause[-1] == terms.TRUE  # 5 - 5 = 0 folds to true
    # even pivot coefficient: no substitution possible
    assert lemmas.eq_substitution(w, Poly.var(w, x, 2) + 1, x, target, True) is None


def test_substitution_into_structural():
    w = 4
    x, y, d = 60, 61, 62
    pivot = Poly.var(w, x) - 3  # x = 3
    target = terms.mk_structural(
        terms.EQ_AND, d, Poly.var(w, y), Poly.var(w, x)
    ).atom
    clause = lemmas.eq_substitution(w, pivot, x, target, True)
    assert clause is not None
    concl = clause[-1].atom
    assert concl.kind == terms.EQ_AND
    assert Poly.constant(w, 3) in concl.args


def test_parity_rule_example():
    # p*q = 0 at w=4 with p = 2: the instance forces q*2 = 0 (parity(q) >= 3)
    w = 4
    clause = lemmas.parity_product_zero(w, Poly.var(w, P), Poly.var(w, Q), 1)
    # find the parity(q) >= 3 disjunct: q * 2^(4-3) = 2q = 0
    want = terms.mk_eq_zero(Poly.var(w, Q, 2))
    assert want in clause
    assert oracle.clause_valid(clause, widths_for(w))


def test_linearization_pow2_example():
    w = 4
    clause = lemmas.lin_pow2(w, Poly.var(w, P), Poly.var(w, Q), 1)
    assert oracle.clause_valid(clause, widths_for(w))
    # premise is p = 2
    assert clause[0] == terms.mk_eq_zero(Poly.var(w, P) - 2, positive=False)


def test_msb_split_examples():
    w = 4
    # p = q = 4: msb sum 3 + 3 = 6 >= w + 2 implies overflow (16 >= 16)
    clause = lemmas.ovfl_msb_high(w, Poly.constant(w, 4), Poly.constant(w, 4), 3, 3)
    assert any(lit.const_value() is True for lit in clause)
    # p=2, q=2: msb sum 4 <= w implies no overflow
    clause = lemmas.ovfl_msb_low(w, Poly.constant(w, 2), Poly.constant(w, 2), 2, 2)
    assert any(lit.const_value() is True for lit in clause)
    # boundary p=3, q=5: sum = w+1, product 15 < 16: no overflow
    clause = lemmas.ovfl_value_pinned(w, Poly.constant(w, 3), Poly.constant(w, 5), 3, 5)
    lit = clause[-1]
    assert lit.atom is False or lit.const_value() is True  # folds: not ovfl is true


def test_lshr_blast_example():
    # w=4: x = lshr(p, q) with q=2, p=13: true x is 3
    w = 4
    x = 70
    clause = lemmas.bb_lshr_const(w, x, Poly.constant(w, 13), Poly.constant(w, 2), 2, 0)
    # with x = 3: 2^2*3 = 12 <= 13 holds; clause valid overall
    assert oracle.clause_valid(clause, {x: w})


def test_ashr_sign_example():
    # w=4: x = ashr(p, q), p = 12 (sign set), q = 1: x >= 16 - 2^(4-1-1) = 12
    w = 4
    x = 71
    clause = lemmas.bb_ashr_sign(w, x, Poly.constant(w, 12), Poly.constant(w, 1), 1, True)
    assert oracle.clause_valid(clause, {x: w})
    tail = clause[-1]
    assert tail == terms.mk_ule(Poly.constant(w, 12), Poly.var(w, x))


def test_product_bit_pins():
    w = 4
    pins = lemmas.product_bit_pins(w, X, 0b1010)
    assert len(pins) == w
    # pins negate the bits of the value: under X=0b1010 every pin is false
    arrays = {X: __import__("numpy").array([0b1010])}
    for lit in pins:
        assert not oracle.eval_literal_vec(lit, arrays)[0]


def test_scan_equalities_ground_substitution():
    # falsified constraint grounds through a trail assignment
    w = 4
    c = terms.mk_eq_zero(Poly.var(w, X) * Poly.var(w, Q) - 6).atom
    state = lemmas.ScanState(
        width_of=lambda v: w,
        asg={X: 2, Q: 5},  # 2*5 = 10 != 6: falsified
        constraints=[(7, c, True)],
        assignments={X: (3, 2), Q: (4, 5)},
        emitted=set(),
        # the constraint is boolean-asserted true even though it evaluates false
        bool_lookup=lambda l: l.positive if l.atom == c else None,
    )
    got = lemmas.scan_equalities(state)
    assert got is not None
    name, clause, key = got
    assert name == "ground_subst"
    assert oracle.clause_valid(clause, {X: w, Q: w})


def test_scan_mul_inequalities_first_row():
    # asserted p*x <u q*x with values making overflow false and p >= q:
    # some saturation row must fire
    w = 4
    px = Poly.var(w, P) * Poly.var(w, X)
    qx = Poly.var(w, Q) * Poly.var(w, X)
    lt = terms.mk_ule(qx, px, positive=False)  # px <u qx ~> not(qx <= px)
    state = lemmas.ScanState(
        width_of=lambda v: w,
        asg={P: 3, Q: 2, X: 5},  # px = 15 >u qx = 10: the premise is conflicted
        constraints=[(9, lt.atom, lt.positive)],
        assignments={},
        emitted=set(),
        bool_lookup=lambda l: (l.positive == lt.positive) if l.atom == lt.atom else None,
    )
    got = lemmas.scan_mul_inequalities(state)
    assert got is not None
    name, clause, _ = got
    assert oracle.clause_valid(clause, widths_for(w))
