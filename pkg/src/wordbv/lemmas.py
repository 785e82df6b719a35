"""On-demand lemma generation for non-linear conflicts.

Three stages, tried in order when interval reasoning cannot explain a
falsified constraint: saturation (consequences of multiplication
inequalities, overflow predicates, equalities and parities), incremental
linearization (products specialized at 0, 1, -1 and powers of two), and
bit-blasting rules (structural operations unfolded per case or per bit,
and most-significant-bit case splits for overflow).

Every rule is a clause template: a function from polynomials (and small
integer parameters) to a list of literals whose disjunction is valid over
bit-vector semantics.  The TEMPLATES registry drives exhaustive validity
testing; the scan_* functions match templates against the current trail
and return instantiated clauses that are falsified or propagating under
the current assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .bv import parity_int
from .terms import (
    OVFL,
    ULE,
    STRUCTURAL_KINDS,
    EQ_AND,
    EQ_OR,
    EQ_SHL,
    EQ_LSHR,
    EQ_ASHR,
    Assign,
    Constraint,
    Literal,
    Poly,
    eval_constraint,
    mk_eq_zero,
    mk_ovfl,
    mk_ule,
    reduce_bit,
    reduce_ovfl_add,
    subst_constraint,
)

Clause = list[Literal]


def _lt(p: Poly, q: Poly) -> Literal:
    return mk_ule(q, p, positive=False)  # p <u q


def _ge(p: Poly, q: Poly) -> Literal:
    return mk_ule(q, p)  # p >=u q


# ---------------------------------------------------------------------------
# Saturation: multiplication inequalities (premise -> conclusion as clause)
# ---------------------------------------------------------------------------

def mul_lt_distinct(w: int, p: Poly, q: Poly, x: Poly) -> Clause:
    return [_lt(p * x, q * x).negate(), mk_eq_zero(p - q, positive=False)]


def mul_lt_ovfl_px(w, p, q, x) -> Clause:
    return [_lt(p * x, q * x).negate(), mk_ovfl(p, x), _lt(p, q)]


def mul_lt_ovfl_nqx(w, p, q, x) -> Clause:
    return [_lt(p * x, q * x).negate(), mk_ovfl(-q, x), _lt(p, q)]


def mul_lt_ovfl_qnx(w, p, q, x) -> Clause:
    return [_lt(p * x, q * x).negate(), mk_ovfl(q, -x), _lt(q, p), mk_eq_zero(p)]


def mul_lt_ovfl_npnx(w, p, q, x) -> Clause:
    return [_lt(p * x, q * x).negate(), mk_ovfl(-p, -x), _lt(q, p), mk_eq_zero(p)]


def mul_le_ovfl_px(w, p, q, x) -> Clause:
    return [mk_ule(p * x, q * x).negate(), mk_ovfl(p, x), mk_ule(p, q), mk_eq_zero(x)]


def mul_le_ovfl_nqx(w, p, q, x) -> Clause:
    return [
        mk_ule(p * x, q * x).negate(),
        mk_ovfl(-q, x),
        mk_ule(p, q),
        mk_eq_zero(x),
        mk_eq_zero(q),
    ]


def mul_le_ovfl_qnx(w, p, q, x) -> Clause:
    return [
        mk_ule(p * x, q * x).negate(),
        mk_ovfl(q, -x),
        _ge(p, q),
        mk_eq_zero(x),
        mk_eq_zero(p),
    ]


def mul_le_ovfl_npnx(w, p, q, x) -> Clause:
    return [
        mk_ule(p * x, q * x).negate(),
        mk_ovfl(-p, -x),
        _ge(p, q),
        mk_eq_zero(x),
        mk_eq_zero(p),
    ]


def mul_shifted_bound(w, p, x, s, q, r) -> Clause:
    # p*x + s <=u q  =>  ovfl(p,x) \/ ovfl_add(px, s) \/ p*r <=u q \/ x <u r
    return [
        mk_ule(p * x + s, q).negate(),
        mk_ovfl(p, x),
        reduce_ovfl_add(p * x, s),
        mk_ule(p * r, q),
        _lt(x, r),
    ]


def mul_chain_le_le(w, p, q, x, r) -> Clause:
    # p <=u x and q*x <=u r  =>  ovfl(q,x) \/ p*q <=u r
    return [
        mk_ule(p, x).negate(),
        mk_ule(q * x, r).negate(),
        mk_ovfl(q, x),
        mk_ule(p * q, r),
    ]


def mul_chain_le_lt(w, p, q, x, r) -> Clause:
    return [
        mk_ule(p, x).negate(),
        _lt(q * x, r).negate(),
        mk_ovfl(q, x),
        _lt(p * q, r),
    ]


def mul_chain_lt_le_q(w, p, q, x, r) -> Clause:
    return [
        _lt(p, x).negate(),
        mk_ule(q * x, r).negate(),
        mk_ovfl(q, x),
        _lt(p * q, r),
        mk_eq_zero(q),
    ]


def mul_chain_lt_le_r(w, p, q, x, r) -> Clause:
    return [
        _lt(p, x).negate(),
        mk_ule(q * x, r).negate(),
        mk_ovfl(q, x),
        _lt(p * q, r),
        mk_eq_zero(r),
    ]


def mul_scaled_le_le(w, p, q, x, r) -> Clause:
    # p <=u q*x and x <=u r  =>  ovfl(q,r) \/ p <=u q*r
    return [
        mk_ule(p, q * x).negate(),
        mk_ule(x, r).negate(),
        mk_ovfl(q, r),
        mk_ule(p, q * r),
    ]


def mul_scaled_lt_le(w, p, q, x, r) -> Clause:
    return [
        _lt(p, q * x).negate(),
        mk_ule(x, r).negate(),
        mk_ovfl(q, r),
        _lt(p, q * r),
    ]


def mul_scaled_le_lt_p(w, p, q, x, r) -> Clause:
    return [
        mk_ule(p, q * x).negate(),
        _lt(x, r).negate(),
        mk_ovfl(q, r),
        _lt(p, q * r),
        mk_eq_zero(p),
    ]


def mul_scaled_le_lt_q(w, p, q, x, r) -> Clause:
    return [
        mk_ule(p, q * x).negate(),
        _lt(x, r).negate(),
        mk_ovfl(q, r),
        _lt(p, q * r),
        mk_eq_zero(q),
    ]


# ---------------------------------------------------------------------------
# Saturation: overflow predicates
# ---------------------------------------------------------------------------

def ceil_sqrt_pow2w(w: int) -> int:
    return math.isqrt((1 << w) - 1) + 1


def floor_sqrt_bound(w: int) -> int:
    # smallest b with: q*q < 2^w implies q < b (exact also at odd widths)
    return math.isqrt((1 << w) - 1) + 1


def ovfl_monotone_lower(w, p, q) -> Clause:
    # not ovfl(p,q) and q != 0  =>  p <=u p*q
    return [mk_ovfl(p, q), mk_eq_zero(q), mk_ule(p, p * q)]


def ovfl_pairwise(w, p, q, r, s) -> Clause:
    # ovfl(p,q) and not ovfl(r,s)  =>  p >u r \/ q >u s
    return [
        mk_ovfl(p, q, positive=False),
        mk_ovfl(r, s),
        _lt(r, p),
        _lt(s, q),
    ]


def ovfl_sqrt_low(w, p, q) -> Clause:
    # ovfl(p,q) and p >=u q  =>  p >=u ceil(sqrt(2^w))
    return [
        mk_ovfl(p, q, positive=False),
        _ge(p, q).negate(),
        _ge(p, Poly.constant(w, ceil_sqrt_pow2w(w))),
    ]


def ovfl_sqrt_high(w, p, q) -> Clause:
    # not ovfl(p,q) and p >=u q  =>  q <u isqrt(2^w - 1) + 1
    return [
        mk_ovfl(p, q),
        _ge(p, q).negate(),
        _lt(q, Poly.constant(w, floor_sqrt_bound(w))),
    ]


# ---------------------------------------------------------------------------
# Saturation: equalities and parity
# ---------------------------------------------------------------------------

def linear_decompose(p: Poly, x: int) -> Optional[tuple[Poly, Poly]]:
    """Write p as a*x + b with a, b free of x (a may mention other vars)."""
    a_terms = []
    a_const = 0
    b_terms = []
    for vs, c in p.monos:
        k = vs.count(x)
        if k == 0:
            b_terms.append((vs, c))
        elif k == 1:
            others = tuple(v for v in vs if v != x)
            if others:
                a_terms.append((others, c))
            else:
                a_const += c
        else:
            return None
    return Poly(p.width, a_terms, a_const), Poly(p.width, b_terms, p.const)


def eq_resolvent(w: int, p1: Poly, p2: Poly, x: int) -> Optional[Clause]:
    # a*x + b = 0 and c*x + d = 0  =>  a*d - b*c = 0
    d1 = linear_decompose(p1, x)
    d2 = linear_decompose(p2, x)
    if d1 is None or d2 is None:
        return None
    a, b = d1
    c, d = d2
    return [
        mk_eq_zero(p1, positive=False),
        mk_eq_zero(p2, positive=False),
        mk_eq_zero(a * d - b * c),
    ]


def eq_substitution(
    w: int, pivot: Poly, x: int, target: Constraint, target_positive: bool
) -> Optional[Clause]:
    # a*x + b = 0 with odd constant a, and c[x]  =>  c[-b * a^-1]
    d = linear_decompose(pivot, x)
    if d is None:
        return None
    a, b = d
    av = a.value()
    if av is None or av % 2 == 0:
        return None
    inv = pow(av, -1, 1 << w)
    repl = (-b).scale(inv)
    conclusion = subst_constraint(target, x, repl)
    if conclusion is None:
        return None
    if not target_positive:
        conclusion = conclusion.negate()
    return [
        mk_eq_zero(pivot, positive=False),
        Literal(target, not target_positive),
        conclusion,
    ]


def parity_ge_lit(t: Poly, i: int) -> Literal:
    """parity(t) >= i as a linear equation; trivial outside (0, w]."""
    w = t.width
    if i <= 0:
        return Literal(True)
    if i > w:
        return Literal(False)
    return mk_eq_zero(t.scale(1 << (w - i)))


def parity_product_zero(w, p, q, jp: int) -> Clause:
    # p*q = 0  =>  parity(p) > jp \/ parity(q) >= w - jp
    return [
        mk_eq_zero(p * q, positive=False),
        parity_ge_lit(p, jp + 1),
        parity_ge_lit(q, w - jp),
    ]


def parity_product_one(w, p, q) -> Clause:
    # p*q = 1  =>  parity(p) = 0
    return [
        mk_eq_zero(p * q - 1, positive=False),
        parity_ge_lit(p, 1).negate(),
    ]


def parity_product_fixpoint(w, p, q, jp: int) -> Clause:
    # p*q = q  =>  parity(p - 1) > jp \/ parity(q) >= w - jp
    return [
        mk_eq_zero(p * q - q, positive=False),
        parity_ge_lit(p - 1, jp + 1),
        parity_ge_lit(q, w - jp),
    ]


def parity_product_lower(w, p, q, jp: int, jq: int) -> Clause:
    # parity(p) >= jp and parity(q) >= jq  =>  parity(p*q) >= min(w, jp+jq)
    return [
        parity_ge_lit(p, jp).negate(),
        parity_ge_lit(q, jq).negate(),
        parity_ge_lit(p * q, min(w, jp + jq)),
    ]


def parity_product_upper(w, p, q, jp: int, jq: int) -> Clause:
    # parity(p*q) > jp + jq  =>  parity(p) > jp \/ parity(q) > jq
    return [
        parity_ge_lit(p * q, jp + jq + 1).negate(),
        parity_ge_lit(p, jp + 1),
        parity_ge_lit(q, jq + 1),
    ]


# ---------------------------------------------------------------------------
# Incremental linearization
# ---------------------------------------------------------------------------

def lin_zero(w, p, q) -> Clause:
    return [mk_eq_zero(p, positive=False), mk_eq_zero(p * q)]


def lin_one(w, p, q) -> Clause:
    return [mk_eq_zero(p - 1, positive=False), mk_eq_zero(p * q - q)]


def lin_minus_one(w, p, q) -> Clause:
    return [mk_eq_zero(p + 1, positive=False), mk_eq_zero(p * q + q)]


def lin_pow2(w, p, q, k: int) -> Clause:
    return [
        mk_eq_zero(p - (1 << k), positive=False),
        mk_eq_zero(p * q - q.scale(1 << k)),
    ]


def lin_product_one(w, p, q) -> Clause:
    return [mk_eq_zero(p * q - 1, positive=False), mk_eq_zero(p - 1), mk_ovfl(p, q)]


def lin_product_fix(w, p, q) -> Clause:
    return [
        mk_eq_zero(p * q - q, positive=False),
        mk_eq_zero(p - 1),
        mk_eq_zero(q),
        mk_ovfl(p, q),
    ]


# ---------------------------------------------------------------------------
# Bit-blasting rules
# ---------------------------------------------------------------------------

def _def_lit(kind: str, x: int, p: Poly, q: Poly) -> Literal:
    from .terms import mk_structural

    return mk_structural(kind, x, p, q)


def bb_and_ule(w, x: int, p, q, side: int) -> Clause:
    bound = (p, q)[side]
    return [_def_lit(EQ_AND, x, p, q).negate(), mk_ule(Poly.var(w, x), bound)]


def bb_and_zero(w, x, p, q, side) -> Clause:
    arg = (p, q)[side]
    return [
        _def_lit(EQ_AND, x, p, q).negate(),
        mk_eq_zero(arg, positive=False),
        mk_eq_zero(Poly.var(w, x)),
    ]


def bb_and_ones(w, x, p, q, side) -> Clause:
    arg, other = ((p, q), (q, p))[side][0], ((q, p), (p, q))[side][0]
    return [
        _def_lit(EQ_AND, x, p, q).negate(),
        mk_eq_zero(arg + 1, positive=False),
        mk_eq_zero(Poly.var(w, x) - other),
    ]


def bb_and_idem(w, x, p, q) -> Clause:
    return [
        _def_lit(EQ_AND, x, p, q).negate(),
        mk_eq_zero(p - q, positive=False),
        mk_eq_zero(Poly.var(w, x) - p),
    ]


def bb_and_bit_up(w, x, p, q, i: int) -> Clause:
    return [
        _def_lit(EQ_AND, x, p, q).negate(),
        reduce_bit(p, i).negate(),
        reduce_bit(q, i).negate(),
        reduce_bit(Poly.var(w, x), i),
    ]


def bb_and_bit_down(w, x, p, q, i: int, side: int) -> Clause:
    return [
        _def_lit(EQ_AND, x, p, q).negate(),
        reduce_bit(Poly.var(w, x), i).negate(),
        reduce_bit((p, q)[side], i),
    ]


def bb_or_uge(w, x, p, q, side) -> Clause:
    return [_def_lit(EQ_OR, x, p, q).negate(), _ge(Poly.var(w, x), (p, q)[side])]


def bb_or_zero(w, x, p, q, side) -> Clause:
    arg, other = ((p, q), (q, p))[side][0], ((q, p), (p, q))[side][0]
    return [
        _def_lit(EQ_OR, x, p, q).negate(),
        mk_eq_zero(arg, positive=False),
        mk_eq_zero(Poly.var(w, x) - other),
    ]


def bb_or_ones(w, x, p, q, side) -> Clause:
    arg = (p, q)[side]
    return [
        _def_lit(EQ_OR, x, p, q).negate(),
        mk_eq_zero(arg + 1, positive=False),
        mk_eq_zero(Poly.var(w, x) + 1),
    ]


def bb_or_idem(w, x, p, q) -> Clause:
    return [
        _def_lit(EQ_OR, x, p, q).negate(),
        mk_eq_zero(p - q, positive=False),
        mk_eq_zero(Poly.var(w, x) - p),
    ]


def bb_or_bit_up(w, x, p, q, i: int, side: int) -> Clause:
    return [
        _def_lit(EQ_OR, x, p, q).negate(),
        reduce_bit((p, q)[side], i).negate(),
        reduce_bit(Poly.var(w, x), i),
    ]


def bb_or_bit_down(w, x, p, q, i: int) -> Clause:
    return [
        _def_lit(EQ_OR, x, p, q).negate(),
        reduce_bit(Poly.var(w, x), i).negate(),
        reduce_bit(p, i),
        reduce_bit(q, i),
    ]


def _shift_def(kind):
    return lambda w, x, p, q: _def_lit(kind, x, p, q).negate()


def bb_shift_big(w, x, p, q, kind: str) -> Clause:
    # shift amount at or beyond the width
    head = [_def_lit(kind, x, p, q).negate(), _ge(q, Poly.constant(w, w % (1 << w))).negate()]
    xv = Poly.var(w, x)
    if kind == EQ_ASHR:
        # x is all-zeros or all-ones: x + 1 <=u 1
        return head + [mk_ule(xv + 1, Poly.constant(w, 1))]
    return head + [mk_eq_zero(xv)]


def bb_shift_big_signed(w, x, p, q, sign_set: bool) -> Clause:
    head = [
        _def_lit(EQ_ASHR, x, p, q).negate(),
        _ge(q, Poly.constant(w, w % (1 << w))).negate(),
        reduce_bit(p, w - 1).negate() if sign_set else reduce_bit(p, w - 1),
    ]
    xv = Poly.var(w, x)
    return head + [mk_eq_zero(xv + 1) if sign_set else mk_eq_zero(xv)]


def bb_shift_zero(w, x, p, q, kind: str) -> Clause:
    return [
        _def_lit(kind, x, p, q).negate(),
        mk_eq_zero(q, positive=False),
        mk_eq_zero(Poly.var(w, x) - p),
    ]


def bb_shl_const(w, x, p, q, i: int) -> Clause:
    return [
        _def_lit(EQ_SHL, x, p, q).negate(),
        mk_eq_zero(q - i, positive=False),
        mk_eq_zero(Poly.var(w, x) - p.scale(1 << i)),
    ]


def bb_lshr_const(w, x, p, q, i: int, part: int) -> Clause:
    # q = i  =>  2^i x <=u p <=u 2^i x + 2^i - 1 and x <u 2^(w-i)
    head = [_def_lit(EQ_LSHR, x, p, q).negate(), mk_eq_zero(q - i, positive=False)]
    xv = Poly.var(w, x)
    parts = [
        mk_ule(xv.scale(1 << i), p),
        mk_ule(p, xv.scale(1 << i) + ((1 << i) - 1)),
        _lt(xv, Poly.constant(w, 1 << (w - i))) if w - i < w else Literal(True),
    ]
    return head + [parts[part]]


def bb_ashr_const(w, x, p, q, i: int, part: int) -> Clause:
    head = [_def_lit(EQ_ASHR, x, p, q).negate(), mk_eq_zero(q - i, positive=False)]
    xv = Poly.var(w, x)
    parts = [
        mk_ule(xv.scale(1 << i), p),
        mk_ule(p, xv.scale(1 << i) + ((1 << i) - 1)),
    ]
    return head + [parts[part]]


def bb_ashr_sign(w, x, p, q, i: int, sign_set: bool) -> Clause:
    head = [
        _def_lit(EQ_ASHR, x, p, q).negate(),
        mk_eq_zero(q - i, positive=False),
        reduce_bit(p, w - 1).negate() if sign_set else reduce_bit(p, w - 1),
    ]
    xv = Poly.var(w, x)
    if sign_set:
        return head + [_ge(xv, Poly.constant(w, (1 << w) - (1 << (w - i - 1))))]
    return head + [_lt(xv, Poly.constant(w, 1 << (w - i - 1)))]


def product_bit_pins(w: int, v: int, value: int) -> Clause:
    """Negated bit pins for variable v at a concrete value (w literals)."""
    out = []
    vp = Poly.var(w, v)
    for i in range(w):
        lit = reduce_bit(vp, i)
        out.append(lit.negate() if (value >> i) & 1 else lit)
    return out


def ovfl_msb_high(w, p, q, i: int, j: int) -> Clause:
    # msb(p) >= i and msb(q) >= j with i+j >= w+2  =>  ovfl(p,q)
    assert i + j >= w + 2
    return [
        _ge(p, Poly.constant(w, 1 << (i - 1))).negate(),
        _ge(q, Poly.constant(w, 1 << (j - 1))).negate(),
        mk_ovfl(p, q),
    ]


def ovfl_msb_low(w, p, q, i: int, j: int) -> Clause:
    # msb(p) <= i and msb(q) <= j with i+j <= w  =>  not ovfl(p,q)
    assert i + j <= w
    out = []
    if i < w:
        out.append(_ge(p, Poly.constant(w, 1 << i)))
    if j < w:
        out.append(_ge(q, Poly.constant(w, 1 << j)))
    out.append(mk_ovfl(p, q, positive=False))
    return out


def ovfl_msb_mid(w, p, q, i: int) -> Clause:
    # msb(p) = i, msb(q) = w+1-i: the product needs exactly one extra bit,
    # so without overflow it keeps its top bit: not ovfl => p*q >=u 2^(w-1)
    j = w + 1 - i
    out = [
        _ge(p, Poly.constant(w, 1 << (i - 1))).negate(),
        _ge(q, Poly.constant(w, 1 << (j - 1))).negate(),
        mk_ovfl(p, q),
        _ge(p * q, Poly.constant(w, 1 << (w - 1))),
    ]
    if i < w:
        out.insert(1, _ge(p, Poly.constant(w, 1 << i)))
    if j < w:
        out.insert(3, _ge(q, Poly.constant(w, 1 << j)))
    return out


def ovfl_value_pinned(w, p, q, pv: int, qv: int) -> Clause:
    # p = pv and q = qv decide the overflow predicate outright
    decided = pv * qv >= (1 << w)
    return [
        mk_eq_zero(p - pv, positive=False),
        mk_eq_zero(q - qv, positive=False),
        mk_ovfl(p, q, positive=decided),
    ]


# ---------------------------------------------------------------------------
# Template registry (drives exhaustive validity testing)
# ---------------------------------------------------------------------------

@dataclass
class Template:
    name: str
    nvars: int
    build: Callable  # (w, *var_polys, *params) -> Clause
    params: Callable[[int], list[tuple]] = field(default=lambda w: [()])


def _no_params(w: int) -> list[tuple]:
    return [()]


def _bit_params(w: int) -> list[tuple]:
    return [(i,) for i in range(w)]


def _shift_params(w: int) -> list[tuple]:
    return [(i,) for i in range(1, w)]


TEMPLATES: list[Template] = [
    Template("mul_lt_distinct", 3, mul_lt_distinct),
    Template("mul_lt_ovfl_px", 3, mul_lt_ovfl_px),
    Template("mul_lt_ovfl_nqx", 3, mul_lt_ovfl_nqx),
    Template("mul_lt_ovfl_qnx", 3, mul_lt_ovfl_qnx),
    Template("mul_lt_ovfl_npnx", 3, mul_lt_ovfl_npnx),
    Template("mul_le_ovfl_px", 3, mul_le_ovfl_px),
    Template("mul_le_ovfl_nqx", 3, mul_le_ovfl_nqx),
    Template("mul_le_ovfl_qnx", 3, mul_le_ovfl_qnx),
    Template("mul_le_ovfl_npnx", 3, mul_le_ovfl_npnx),
    Template("mul_shifted_bound", 5, mul_shifted_bound),
    Template("mul_chain_le_le", 4, mul_chain_le_le),
    Template("mul_chain_le_lt", 4, mul_chain_le_lt),
    Template("mul_chain_lt_le_q", 4, mul_chain_lt_le_q),
    Template("mul_chain_lt_le_r", 4, mul_chain_lt_le_r),
    Template("mul_scaled_le_le", 4, mul_scaled_le_le),
    Template("mul_scaled_lt_le", 4, mul_scaled_lt_le),
    Template("mul_scaled_le_lt_p", 4, mul_scaled_le_lt_p),
    Template("mul_scaled_le_lt_q", 4, mul_scaled_le_lt_q),
    Template("ovfl_monotone_lower", 2, ovfl_monotone_lower),
    Template("ovfl_pairwise", 4, ovfl_pairwise),
    Template("ovfl_sqrt_low", 2, ovfl_sqrt_low),
    Template("ovfl_sqrt_high", 2, ovfl_sqrt_high),
    Template("parity_product_zero", 2, parity_product_zero, lambda w: [(j,) for j in range(w + 1)]),
    Template("parity_product_one", 2, parity_product_one),
    Template(
        "parity_product_fixpoint", 2, parity_product_fixpoint, lambda w: [(j,) for j in range(w + 1)]
    ),
    Template(
        "parity_product_lower",
        2,
        parity_product_lower,
        lambda w: [(i, j) for i in range(w + 1) for j in range(w + 1)],
    ),
    Template(
        "parity_product_upper",
        2,
        parity_product_upper,
        lambda w: [(i, j) for i in range(w + 1) for j in range(w + 1)],
    ),
    Template("lin_zero", 2, lin_zero),
    Template("lin_one", 2, lin_one),
    Template("lin_minus_one", 2, lin_minus_one),
    Template("lin_pow2", 2, lin_pow2, _shift_params),
    Template("lin_product_one", 2, lin_product_one),
    Template("lin_product_fix", 2, lin_product_fix),
    Template(
        "ovfl_msb_high",
        2,
        ovfl_msb_high,
        lambda w: [(i, j) for i in range(1, w + 1) for j in range(1, w + 1) if i + j >= w + 2],
    ),
    Template(
        "ovfl_msb_low",
        2,
        ovfl_msb_low,
        lambda w: [(i, j) for i in range(w + 1) for j in range(w + 1) if i + j <= w],
    ),
    Template("ovfl_msb_mid", 2, ovfl_msb_mid, lambda w: [(i,) for i in range(1, w + 1)]),
    Template(
        "ovfl_value_pinned",
        2,
        ovfl_value_pinned,
        lambda w: [(1, 1), (1 << (w - 1), 2), ((1 << w) - 1, (1 << w) - 1)],
    ),
]

# structural templates take a defined variable id as first argument
STRUCTURAL_TEMPLATES: list[Template] = [
    Template("bb_and_ule", 2, bb_and_ule, lambda w: [(0,), (1,)]),
    Template("bb_and_zero", 2, bb_and_zero, lambda w: [(0,), (1,)]),
    Template("bb_and_ones", 2, bb_and_ones, lambda w: [(0,), (1,)]),
    Template("bb_and_idem", 2, bb_and_idem),
    Template("bb_and_bit_up", 2, bb_and_bit_up, _bit_params),
    Template("bb_and_bit_down", 2, bb_and_bit_down, lambda w: [(i, s) for i in range(w) for s in (0, 1)]),
    Template("bb_or_uge", 2, bb_or_uge, lambda w: [(0,), (1,)]),
    Template("bb_or_zero", 2, bb_or_zero, lambda w: [(0,), (1,)]),
    Template("bb_or_ones", 2, bb_or_ones, lambda w: [(0,), (1,)]),
    Template("bb_or_idem", 2, bb_or_idem),
    Template("bb_or_bit_up", 2, bb_or_bit_up, lambda w: [(i, s) for i in range(w) for s in (0, 1)]),
    Template("bb_or_bit_down", 2, bb_or_bit_down, _bit_params),
    Template("bb_shift_big", 2, bb_shift_big, lambda w: [(k,) for k in (EQ_SHL, EQ_LSHR, EQ_ASHR)]),
    Template("bb_shift_big_signed", 2, bb_shift_big_signed, lambda w: [(False,), (True,)]),
    Template("bb_shift_zero", 2, bb_shift_zero, lambda w: [(k,) for k in (EQ_SHL, EQ_LSHR, EQ_ASHR)]),
    Template("bb_shl_const", 2, bb_shl_const, _shift_params),
    Template(
        "bb_lshr_const", 2, bb_lshr_const, lambda w: [(i, p) for i in range(1, w) for p in range(3)]
    ),
    Template(
        "bb_ashr_const", 2, bb_ashr_const, lambda w: [(i, p) for i in range(1, w) for p in range(2)]
    ),
    Template(
        "bb_ashr_sign", 2, bb_ashr_sign, lambda w: [(i, s) for i in range(1, w) for s in (False, True)]
    ),
]


# ---------------------------------------------------------------------------
# Trail scanning
# ---------------------------------------------------------------------------

@dataclass
class ScanState:
    """What the scanners need to know about the current trail."""

    width_of: Callable[[int], int]
    asg: dict[int, int]
    # asserted constraint literals: (trail-literal, constraint, positive)
    constraints: list[tuple[int, Constraint, bool]]
    # asserted variable assignments: var -> (trail-literal, value)
    assignments: dict[int, tuple[int, int]]
    emitted: set
    # Boolean trail value of an existing atom's literal, None if unknown;
    # must not create atoms as a side effect
    bool_lookup: Callable[[Literal], Optional[bool]] = lambda lit: None

    def ev(self, p: Poly) -> Optional[int]:
        return p.eval_value(self.asg)

    def lit_status(self, lit: Literal) -> Optional[bool]:
        v = lit.const_value()
        if v is not None:
            return v
        b = self.bool_lookup(lit)
        if b is not None:
            return b
        if isinstance(lit.atom, Assign):
            got = self.asg.get(lit.atom.var)
            if got is None:
                return None
            return (got == lit.atom.value) == lit.positive
        v = eval_constraint(lit.atom, self.asg)
        if v is None:
            return None
        return v == lit.positive


Emission = tuple[str, Clause, tuple]


def _useful(state: ScanState, clause: Clause, require_conclusion_false=True) -> bool:
    """A clause is worth adding when nothing in it is already true and at
    most one literal is undetermined under the current assignment."""
    unknown = 0
    for lit in clause:
        s = state.lit_status(lit)
        if s is True:
            return False
        if s is None:
            unknown += 1
    return unknown <= 1


def _falsified_constraints(state: ScanState) -> list[tuple[int, Constraint, bool]]:
    out = []
    for lit, c, pos in state.constraints:
        v = eval_constraint(c, state.asg)
        if v is not None and v != pos:
            out.append((lit, c, pos))
    return out


def _eq_zero_polys(state: ScanState) -> list[tuple[int, Poly]]:
    return [
        (lit, c.args[0])
        for lit, c, pos in state.constraints
        if pos and c.kind == ULE and c.is_eq_zero()
    ]


def scan_equalities(state: ScanState) -> Optional[Emission]:
    """Variable elimination and substitution between asserted equalities."""
    eqs = _eq_zero_polys(state)
    # resolvents between pairs sharing a variable
    for i in range(len(eqs)):
        for j in range(i + 1, len(eqs)):
            l1, p1 = eqs[i]
            l2, p2 = eqs[j]
            for x in sorted(p1.vars() & p2.vars()):
                key = ("eq_resolve", min(l1, l2), max(l1, l2), x)
                if key in state.emitted:
                    continue
                clause = eq_resolvent(p1.width, p1, p2, x)
                if clause is not None and _useful(state, clause):
                    return "eq_resolve", clause, key
    # substitution instances: odd-coefficient pivots into other constraints;
    # structural targets first, since they unlock the bit-level rules
    targets = sorted(
        state.constraints, key=lambda t: (t[1].kind in (ULE, OVFL), abs(t[0]))
    )
    for l1, p1 in eqs:
        for x in sorted(p1.vars()):
            d = linear_decompose(p1, x)
            if d is None:
                continue
            av = d[0].value()
            if av is None or av % 2 == 0:
                continue
            for l2, c2, pos2 in targets:
                if l2 == l1 or x not in c2.vars():
                    continue
                key = ("eq_subst", l1, l2, x)
                if key in state.emitted:
                    continue
                clause = eq_substitution(p1.width, p1, x, c2, pos2)
                if clause is not None and _useful(state, clause):
                    return "eq_subst", clause, key
    # substitution by trail assignment into falsified constraints
    for lit, c, pos in _falsified_constraints(state):
        for x in sorted(c.vars()):
            if x not in state.assignments:
                continue
            alit, value = state.assignments[x]
            key = ("ground_subst", lit, alit)
            if key in state.emitted:
                continue
            conclusion = subst_constraint(c, x, Poly.constant(c.width, value))
            if conclusion is None:
                continue
            if not pos:
                conclusion = conclusion.negate()
            clause = [
                Literal(Assign(x, value, state.width_of(x)), False),
                Literal(c, not pos),
                conclusion,
            ]
            if _useful(state, clause):
                return "ground_subst", clause, key
    return None


def _split_factor(p: Poly, x: int) -> Optional[Poly]:
    """p as q*x for a plain variable x: returns q or None."""
    if not p.monos or p.const != 0:
        return None
    out = []
    for vs, c in p.monos:
        if x not in vs:
            return None
        rest = list(vs)
        rest.remove(x)
        out.append((tuple(rest), c))
    return Poly(p.width, out)


def scan_mul_inequalities(state: ScanState) -> Optional[Emission]:
    """Saturation rows for multiplication inequalities on the trail."""
    ules = [(l, c, pos) for l, c, pos in state.constraints if c.kind == ULE]
    for lit, c, pos in ules:
        lhs, rhs = c.args
        w = c.width
        # px <[=]u qx family: both sides share a factor variable
        for x in sorted(lhs.vars() & rhs.vars()):
            p = _split_factor(lhs, x)
            q = _split_factor(rhs, x)
            if p is None or q is None:
                continue
            xp = Poly.var(w, x)
            rows = (
                [
                    ("mul_le_ovfl_px", mul_le_ovfl_px),
                    ("mul_le_ovfl_nqx", mul_le_ovfl_nqx),
                    ("mul_le_ovfl_qnx", mul_le_ovfl_qnx),
                    ("mul_le_ovfl_npnx", mul_le_ovfl_npnx),
                ]
                if pos
                else [
                    ("mul_lt_distinct", lambda w_, a, b, v: mul_lt_distinct(w_, b, a, v)),
                    ("mul_lt_ovfl_px", lambda w_, a, b, v: mul_lt_ovfl_px(w_, b, a, v)),
                    ("mul_lt_ovfl_nqx", lambda w_, a, b, v: mul_lt_ovfl_nqx(w_, b, a, v)),
                    ("mul_lt_ovfl_qnx", lambda w_, a, b, v: mul_lt_ovfl_qnx(w_, b, a, v)),
                    ("mul_lt_ovfl_npnx", lambda w_, a, b, v: mul_lt_ovfl_npnx(w_, b, a, v)),
                ]
            )
            for name, build in rows:
                key = (name, lit, x)
                if key in state.emitted:
                    continue
                # negated ULE(lhs, rhs) asserts rhs <u lhs: swap handled above
                clause = build(w, p, q, xp)
                if _useful(state, clause):
                    return name, clause, key
        # px + s <=u q with a violating bound r drawn from the trail value
        if pos:
            for x in sorted(lhs.vars()):
                view = lhs.linear_view(x, state.asg)
                if view is None or view[0] == 0:
                    continue
                xv = state.asg.get(x)
                if xv is None:
                    continue
                coeffs = _split_coeff_rest(lhs, x)
                if coeffs is None:
                    continue
                pc, sc = coeffs
                key = ("mul_shifted_bound", lit, x, xv)
                if key in state.emitted:
                    continue
                clause = mul_shifted_bound(
                    c.width, pc, Poly.var(c.width, x), sc, rhs, Poly.constant(c.width, xv)
                )
                if _useful(state, clause):
                    return "mul_shifted_bound", clause, key
    # chained pairs: p <=u x (or qx) together with a second inequality
    for l1, c1, pos1 in ules:
        lhs1, rhs1 = c1.args
        for l2, c2, pos2 in ules:
            if l1 == l2:
                continue
            lhs2, rhs2 = c2.args
            w = c1.width
            if w != c2.width:
                continue
            # orient both as strict/non-strict 'lo <= hi' facts
            a1, b1, strict1 = (lhs1, rhs1, False) if pos1 else (rhs1, lhs1, True)
            a2, b2, strict2 = (lhs2, rhs2, False) if pos2 else (rhs2, lhs2, True)
            # p <(=) x and q*x <(=) r
            for x in sorted(b1.vars()):
                if b1 != Poly.var(w, x):
                    continue
                qf = _split_factor(a2, x)
                if qf is None:
                    continue
                rows = {
                    (False, False): ("mul_chain_le_le", mul_chain_le_le),
                    (False, True): ("mul_chain_le_lt", mul_chain_le_lt),
                    (True, False): ("mul_chain_lt_le_q", mul_chain_lt_le_q),
                }
                row = rows.get((strict1, strict2))
                if row is None:
                    continue
                key = (row[0], l1, l2, x)
                if key in state.emitted:
                    continue
                clause = row[1](w, a1, qf, Poly.var(w, x), b2)
                if _useful(state, clause):
                    return row[0], clause, key
            # p <(=) q*x and x <(=) r
            for x in sorted(b1.vars() | a2.vars()):
                qf = _split_factor(b1, x)
                if qf is None or a2 != Poly.var(w, x):
                    continue
                rows = {
                    (False, False): ("mul_scaled_le_le", mul_scaled_le_le),
                    (True, False): ("mul_scaled_lt_le", mul_scaled_lt_le),
                    (False, True): ("mul_scaled_le_lt_p", mul_scaled_le_lt_p),
                }
                row = rows.get((strict1, strict2))
                if row is None:
                    continue
                key = (row[0], l1, l2, x)
                if key in state.emitted:
                    continue
                clause = row[1](w, a1, qf, Poly.var(w, x), b2)
                if _useful(state, clause):
                    return row[0], clause, key
    return None


def _split_coeff_rest(p: Poly, x: int) -> Optional[tuple[Poly, Poly]]:
    d = linear_decompose(p, x)
    if d is None or d[0].value() in (None, 0):
        return None
    return d


def scan_overflow(state: ScanState) -> Optional[Emission]:
    """Consequences of overflow predicates on the trail."""
    ovfls = [(l, c, pos) for l, c, pos in state.constraints if c.kind == OVFL]
    for lit, c, pos in ovfls:
        p, q = c.args
        w = c.width
        if not pos:
            for name, build in (("ovfl_monotone_lower", ovfl_monotone_lower),):
                for a, b in ((p, q), (q, p)):
                    key = (name, lit, a.monos, a.const)
                    if key in state.emitted:
                        continue
                    clause = build(w, a, b)
                    if _useful(state, clause):
                        return name, clause, key
            key = ("ovfl_sqrt_high", lit)
            if key not in state.emitted:
                for a, b in ((p, q), (q, p)):
                    clause = ovfl_sqrt_high(w, a, b)
                    if _useful(state, clause):
                        return "ovfl_sqrt_high", clause, key
        else:
            key = ("ovfl_sqrt_low", lit)
            if key not in state.emitted:
                for a, b in ((p, q), (q, p)):
                    clause = ovfl_sqrt_low(w, a, b)
                    if _useful(state, clause):
                        return "ovfl_sqrt_low", clause, key
        for lit2, c2, pos2 in ovfls:
            if lit2 == lit or c2.width != w or pos == pos2:
                continue
            big, small = (c, c2) if pos else (c2, c)
            key = ("ovfl_pairwise", lit, lit2)
            if key in state.emitted:
                continue
            clause = ovfl_pairwise(w, big.args[0], big.args[1], small.args[0], small.args[1])
            if _useful(state, clause):
                return "ovfl_pairwise", clause, key
    return None


def scan_parity(state: ScanState) -> Optional[Emission]:
    """Parity consequences of product equations on the trail."""
    for lit, c, pos in state.constraints:
        if not pos or c.kind != ULE or not c.is_eq_zero():
            continue
        poly = c.args[0]
        w = c.width
        for p, q, shape in _product_shapes(poly, w):
            pv = state.ev(p)
            qv = state.ev(q)
            if shape == "zero":
                if pv is not None:
                    jp = parity_int(pv, w)
                    key = ("parity_product_zero", lit, 0, jp)
                    if key not in state.emitted:
                        clause = parity_product_zero(w, p, q, jp)
                        if _useful(state, clause):
                            return "parity_product_zero", clause, key
                if qv is not None:
                    jq = parity_int(qv, w)
                    key = ("parity_product_zero", lit, 1, jq)
                    if key not in state.emitted:
                        clause = parity_product_zero(w, q, p, jq)
                        if _useful(state, clause):
                            return "parity_product_zero", clause, key
            elif shape == "one":
                for a in (p, q):
                    key = ("parity_product_one", lit, a.monos)
                    if key not in state.emitted:
                        clause = parity_product_one(w, a, q if a is p else p)
                        if _useful(state, clause):
                            return "parity_product_one", clause, key
            elif shape == "fix" and pv is not None:
                jp = parity_int((pv - 1) % (1 << w), w)
                key = ("parity_product_fixpoint", lit, jp)
                if key not in state.emitted:
                    clause = parity_product_fixpoint(w, p, q, jp)
                    if _useful(state, clause):
                        return "parity_product_fixpoint", clause, key
    return None


def _product_shapes(poly: Poly, w: int):
    """Match p*q = 0 / p*q = 1 / p*q = q shapes inside an equality poly."""
    out = []
    if len(poly.monos) == 1:
        vs, coeff = poly.monos[0]
        if len(vs) >= 2:
            p = Poly.monomial(w, vs[:1], coeff)
            q = Poly.monomial(w, vs[1:])
            if poly.const == 0:
                out.append((p, q, "zero"))
            elif poly.const == (1 << w) - 1:
                out.append((p, q, "one"))
    if len(poly.monos) == 2 and poly.const == 0:
        (vs1, c1), (vs2, c2) = poly.monos
        # q*(p - 1) pattern: c1*vs1 = -c2*vs2 with vs2 a sub-multiset of vs1
        for (va, ca), (vb, cb) in (((vs1, c1), (vs2, c2)), ((vs2, c2), (vs1, c1))):
            if (ca + cb) % (1 << w) != 0:
                continue
            if len(va) == len(vb) + 1 and all(v in va for v in vb):
                rest = list(va)
                for v in vb:
                    rest.remove(v)
                p = Poly.monomial(w, tuple(rest), ca if ca % 2 else 1)
                # p*q = q with q = cb*vb only when the coefficient matches
                if ca % (1 << w) == 1 or True:
                    out.append((Poly.monomial(w, tuple(rest)), Poly.monomial(w, vb, (-cb) % (1 << w)), "fix"))
    return out


def scan_linearization(state: ScanState) -> Optional[Emission]:
    """Products whose factors sit at distinguished values under the trail."""
    ones_all = {}
    for lit, c, pos in _falsified_constraints(state):
        w = c.width
        ones = (1 << w) - 1
        for mono_vars in _product_monomials(c):
            for x in set(mono_vars):
                xv = state.asg.get(x)
                if xv is None:
                    continue
                rest = list(mono_vars)
                rest.remove(x)
                p = Poly.var(w, x)
                q = Poly.monomial(w, tuple(rest))
                if xv == 0:
                    name, clause = "lin_zero", lin_zero(w, p, q)
                elif xv == 1:
                    name, clause = "lin_one", lin_one(w, p, q)
                elif xv == ones:
                    name, clause = "lin_minus_one", lin_minus_one(w, p, q)
                elif xv & (xv - 1) == 0:
                    name, clause = "lin_pow2", lin_pow2(w, p, q, xv.bit_length() - 1)
                else:
                    continue
                key = (name, x, xv, tuple(mono_vars))
                if key in state.emitted:
                    continue
                if _useful(state, clause):
                    return name, clause, key
    # product-shape equations pq = 1 / pq = q
    for lit, c, pos in state.constraints:
        if not pos or c.kind != ULE or not c.is_eq_zero():
            continue
        w = c.width
        for p, q, shape in _product_shapes(c.args[0], w):
            if shape == "one":
                key = ("lin_product_one", lit)
                if key not in state.emitted:
                    clause = lin_product_one(w, p, q)
                    if _useful(state, clause):
                        return "lin_product_one", clause, key
            elif shape == "fix":
                key = ("lin_product_fix", lit)
                if key not in state.emitted:
                    clause = lin_product_fix(w, p, q)
                    if _useful(state, clause):
                        return "lin_product_fix", clause, key
    return None


def _product_monomials(c: Constraint) -> list[tuple[int, ...]]:
    out = []
    for a in c.args:
        if isinstance(a, Poly):
            for vs, _ in a.monos:
                if len(vs) >= 2:
                    out.append(vs)
    return out


def scan_bitblast(state: ScanState) -> Optional[Emission]:
    """Last-resort rules: structural unfolding, msb splits, product pins."""
    # algebraic per-index rules: bit premises that normalize to constants
    # can fire without any variable values (e.g. after a substitution makes
    # an argument's low bit a known constant)
    for lit, c, pos in state.constraints:
        if not pos or c.kind not in (EQ_AND, EQ_OR):
            continue
        x, p, q = c.args
        w = c.width
        for i in range(w):
            pb = reduce_bit(p, i).const_value()
            qb = reduce_bit(q, i).const_value()
            cands: list[tuple[str, Clause]] = []
            if c.kind == EQ_AND:
                if pb is True and qb is True:
                    cands.append(("bb_and_bit_up", bb_and_bit_up(w, x, p, q, i)))
                if pb is False:
                    cands.append(("bb_and_bit_down", bb_and_bit_down(w, x, p, q, i, 0)))
                if qb is False:
                    cands.append(("bb_and_bit_down", bb_and_bit_down(w, x, p, q, i, 1)))
            else:
                if pb is True:
                    cands.append(("bb_or_bit_up", bb_or_bit_up(w, x, p, q, i, 0)))
                if qb is True:
                    cands.append(("bb_or_bit_up", bb_or_bit_up(w, x, p, q, i, 1)))
                if pb is False and qb is False:
                    cands.append(("bb_or_bit_down", bb_or_bit_down(w, x, p, q, i)))
            for name, clause in cands:
                key = (name, lit, i, "algebraic")
                if key in state.emitted:
                    continue
                if _useful(state, clause):
                    return name, clause, key
    for lit, c, pos in _falsified_constraints(state):
        w = c.width
        if c.kind in STRUCTURAL_KINDS and pos:
            got = _blast_structural(state, lit, c)
            if got is not None:
                return got
        if c.kind == OVFL:
            got = _blast_ovfl(state, lit, c, pos)
            if got is not None:
                return got
        # polynomial constraints: pin one assigned product variable per bit
        for mono_vars in _product_monomials(c):
            for x in set(mono_vars):
                xv = state.asg.get(x)
                if xv is None:
                    continue
                key = ("product_pins", lit, x, xv)
                if key in state.emitted:
                    continue
                conclusion = subst_constraint(c, x, Poly.constant(w, xv))
                if conclusion is None:
                    continue
                if not pos:
                    conclusion = conclusion.negate()
                clause = product_bit_pins(state.width_of(x), x, xv) + [
                    Literal(c, not pos),
                    conclusion,
                ]
                if _useful(state, clause):
                    return "product_pins", clause, key
    return None


def _blast_structural(state: ScanState, lit: int, c: Constraint) -> Optional[Emission]:
    x, p, q = c.args
    w = c.width
    xv = state.asg.get(x)
    pv = state.ev(p)
    qv = state.ev(q)
    if xv is None or pv is None or qv is None:
        return None
    rules: list[tuple[str, Clause]] = []
    if c.kind in (EQ_AND, EQ_OR):
        if c.kind == EQ_AND:
            rules += [("bb_and_ule", bb_and_ule(w, x, p, q, s)) for s in (0, 1)]
            rules += [("bb_and_zero", bb_and_zero(w, x, p, q, s)) for s in (0, 1)]
            rules += [("bb_and_ones", bb_and_ones(w, x, p, q, s)) for s in (0, 1)]
            rules.append(("bb_and_idem", bb_and_idem(w, x, p, q)))
            for i in range(w):
                pb, qb, xb = (pv >> i) & 1, (qv >> i) & 1, (xv >> i) & 1
                if pb and qb and not xb:
                    rules.append(("bb_and_bit_up", bb_and_bit_up(w, x, p, q, i)))
                if xb and not pb:
                    rules.append(("bb_and_bit_down", bb_and_bit_down(w, x, p, q, i, 0)))
                if xb and not qb:
                    rules.append(("bb_and_bit_down", bb_and_bit_down(w, x, p, q, i, 1)))
        else:
            rules += [("bb_or_uge", bb_or_uge(w, x, p, q, s)) for s in (0, 1)]
            rules += [("bb_or_zero", bb_or_zero(w, x, p, q, s)) for s in (0, 1)]
            rules += [("bb_or_ones", bb_or_ones(w, x, p, q, s)) for s in (0, 1)]
            rules.append(("bb_or_idem", bb_or_idem(w, x, p, q)))
            for i in range(w):
                pb, qb, xb = (pv >> i) & 1, (qv >> i) & 1, (xv >> i) & 1
                if pb and not xb:
                    rules.append(("bb_or_bit_up", bb_or_bit_up(w, x, p, q, i, 0)))
                if qb and not xb:
                    rules.append(("bb_or_bit_up", bb_or_bit_up(w, x, p, q, i, 1)))
                if xb and not pb and not qb:
                    rules.append(("bb_or_bit_down", bb_or_bit_down(w, x, p, q, i)))
    elif c.kind in (EQ_SHL, EQ_LSHR, EQ_ASHR):
        if qv >= w:
            if c.kind == EQ_ASHR:
                sign = (pv >> (w - 1)) & 1 == 1
                rules.append(("bb_shift_big_signed", bb_shift_big_signed(w, x, p, q, sign)))
                rules.append(("bb_shift_big", bb_shift_big(w, x, p, q, c.kind)))
            else:
                rules.append(("bb_shift_big", bb_shift_big(w, x, p, q, c.kind)))
        elif qv == 0:
            rules.append(("bb_shift_zero", bb_shift_zero(w, x, p, q, c.kind)))
        else:
            i = qv
            if c.kind == EQ_SHL:
                rules.append(("bb_shl_const", bb_shl_const(w, x, p, q, i)))
            elif c.kind == EQ_LSHR:
                rules += [("bb_lshr_const", bb_lshr_const(w, x, p, q, i, part)) for part in range(3)]
            else:
                sign = (pv >> (w - 1)) & 1 == 1
                rules.append(("bb_ashr_sign", bb_ashr_sign(w, x, p, q, i, sign)))
                rules += [("bb_ashr_const", bb_ashr_const(w, x, p, q, i, part)) for part in range(2)]
    for idx, (name, clause) in enumerate(rules):
        key = (name, lit, idx, xv, pv, qv)
        if key in state.emitted:
            continue
        if _useful(state, clause):
            return name, clause, key
    return None


def _blast_ovfl(state: ScanState, lit: int, c: Constraint, pos: bool) -> Optional[Emission]:
    p, q = c.args
    w = c.width
    pv = state.ev(p)
    qv = state.ev(q)
    if pv is None or qv is None:
        return None
    i = pv.bit_length()
    j = qv.bit_length()
    if i + j >= w + 2 and not pos:
        key = ("ovfl_msb_high", lit, i, j)
        if key not in state.emitted:
            clause = ovfl_msb_high(w, p, q, i, j)
            if _useful(state, clause):
                return "ovfl_msb_high", clause, key
    if i + j <= w and pos:
        key = ("ovfl_msb_low", lit, i, j)
        if key not in state.emitted:
            clause = ovfl_msb_low(w, p, q, i, j)
            if _useful(state, clause):
                return "ovfl_msb_low", clause, key
    if i + j == w + 1:
        key = ("ovfl_msb_mid", lit, i)
        if key not in state.emitted:
            clause = ovfl_msb_mid(w, p, q, i)
            if _useful(state, clause):
                return "ovfl_msb_mid", clause, key
        key = ("ovfl_value_pinned", lit, pv, qv)
        if key not in state.emitted:
            clause = ovfl_value_pinned(w, p, q, pv, qv)
            if _useful(state, clause):
                return "ovfl_value_pinned", clause, key
    return None


SCAN_STAGES: list[tuple[str, Callable[[ScanState], Optional[Emission]]]] = [
    ("saturate_equalities", scan_equalities),
    ("saturate_mul_ineq", scan_mul_inequalities),
    ("saturate_overflow", scan_overflow),
    ("saturate_parity", scan_parity),
    ("linearize", scan_linearization),
    ("bitblast", scan_bitblast),
]


def next_lemma(state: ScanState, start: int = 0) -> Optional[Emission]:
    """First new, currently useful lemma clause.

    The scan begins at stage `start` (mod the stage count) and wraps, so a
    caller rotating the start index prevents an endlessly productive early
    stage from starving the later ones.
    """
    n = len(SCAN_STAGES)
    for k in range(n):
        _, scan = SCAN_STAGES[(start + k) % n]
        got = scan(state)
        if got is not None:
            return got
    return None
