"""Polynomial terms over bit-vector variables and primitive constraints.

Variables are integer identifiers; widths and names live with the owner
(solver or front end).  A Poly maps monomials (sorted tuples of variable
ids, so multisets) to nonzero coefficients in [0, 2**w), plus a constant.
All arithmetic folds coefficients mod 2**w, which both keeps values
canonical and silently erases monomials whose coefficient becomes a
multiple of 2**w.

Constraints come in the primitive kinds handled by the solver: unsigned
inequality, multiplicative overflow, and the structural definitions
(bit-wise and/or, shifts, division).  Richer surface constraints reduce
to these via `reduce_*`; several syntactic variants of "p equals zero"
normalize to one canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

from .bv import truncate

Monomial = tuple[int, ...]


class Poly:
    """Immutable polynomial: sum of coeff * var-products plus a constant."""

    __slots__ = ("width", "monos", "const", "_hash")

    def __init__(self, width: int, monos: Iterable[tuple[Monomial, int]] = (), const: int = 0):
        m = (1 << width) - 1
        items: dict[Monomial, int] = {}
        for vs, c in monos:
            c &= m
            if c == 0:
                continue
            key = tuple(sorted(vs))
            c2 = (items.get(key, 0) + c) & m
            if c2:
                items[key] = c2
            else:
                items.pop(key, None)
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "monos", tuple(sorted(items.items())))
        object.__setattr__(self, "const", const & m)
        object.__setattr__(self, "_hash", hash((width, self.monos, self.const)))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Poly is immutable")

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def constant(width: int, c: int) -> "Poly":
        return Poly(width, (), c)

    @staticmethod
    def var(width: int, v: int, coeff: int = 1) -> "Poly":
        return Poly(width, [((v,), coeff)], 0)

    @staticmethod
    def monomial(width: int, vs: Monomial, coeff: int = 1) -> "Poly":
        return Poly(width, [(vs, coeff)], 0)

    # -- basics ---------------------------------------------------------------

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Poly)
            and self.width == other.width
            and self.const == other.const
            and self.monos == other.monos
        )

    def is_const(self) -> bool:
        return not self.monos

    def value(self) -> Optional[int]:
        return self.const if not self.monos else None

    def vars(self) -> set[int]:
        out: set[int] = set()
        for vs, _ in self.monos:
            out.update(vs)
        return out

    def degree(self) -> int:
        return max((len(vs) for vs, _ in self.monos), default=0)

    def __repr__(self) -> str:
        if not self.monos:
            return f"{self.const}"
        parts = []
        for vs, c in self.monos:
            term = "*".join(f"v{v}" for v in vs)
            parts.append(term if c == 1 else f"{c}*{term}")
        if self.const:
            parts.append(str(self.const))
        return " + ".join(parts)

    # -- ring operations ------------------------------------------------------

    def __add__(self, other: Union["Poly", int]) -> "Poly":
        if isinstance(other, int):
            return Poly(self.width, self.monos, self.const + other)
        assert self.width == other.width
        return Poly(self.width, list(self.monos) + list(other.monos), self.const + other.const)

    def __sub__(self, other: Union["Poly", int]) -> "Poly":
        if isinstance(other, int):
            return Poly(self.width, self.monos, self.const - other)
        return self + other.scale(-1)

    def __radd__(self, other: int) -> "Poly":
        return self + other

    def __rsub__(self, other: int) -> "Poly":
        return self.scale(-1) + other

    def __neg__(self) -> "Poly":
        return self.scale(-1)

    def scale(self, k: int) -> "Poly":
        k = truncate(k, self.width)
        return Poly(
            self.width,
            [(vs, c * k) for vs, c in self.monos],
            self.const * k,
        )

    def __mul__(self, other: Union["Poly", int]) -> "Poly":
        if isinstance(other, int):
            return self.scale(other)
        assert self.width == other.width
        out: list[tuple[Monomial, int]] = []
        const = self.const * other.const
        for vs, c in self.monos:
            if other.const:
                out.append((vs, c * other.const))
            for vs2, c2 in other.monos:
                out.append((tuple(sorted(vs + vs2)), c * c2))
        if self.const:
            for vs2, c2 in other.monos:
                out.append((vs2, self.const * c2))
        return Poly(self.width, out, const)

    # -- evaluation / substitution ---------------------------------------------

    def evaluate(self, asg: dict[int, int]) -> "Poly":
        """Substitute assigned variables and fold constants mod 2**w."""
        if not self.monos:
            return self
        out: list[tuple[Monomial, int]] = []
        const = self.const
        for vs, c in self.monos:
            coeff = c
            rest: list[int] = []
            for v in vs:
                if v in asg:
                    coeff *= asg[v]
                else:
                    rest.append(v)
            if rest:
                out.append((tuple(rest), coeff))
            else:
                const += coeff
        return Poly(self.width, out, const)

    def eval_value(self, asg: dict[int, int]) -> Optional[int]:
        """Concrete value under asg, or None if some variable is unassigned."""
        total = self.const
        m = (1 << self.width) - 1
        for vs, c in self.monos:
            prod = c
            for v in vs:
                a = asg.get(v)
                if a is None:
                    return None
                prod *= a
            total += prod
        return total & m

    def subst(self, var: int, repl: "Poly") -> "Poly":
        """Replace every occurrence of var by the polynomial repl."""
        if var not in self.vars():
            return self
        result = Poly.constant(self.width, self.const)
        for vs, c in self.monos:
            term = Poly.constant(self.width, c)
            for v in vs:
                term = term * (repl if v == var else Poly.var(self.width, v))
            result = result + term
        return result

    def linear_view(self, x: int, asg: dict[int, int]) -> Optional[tuple[int, "Poly", "Poly"]]:
        """Write self = a*x + rest with a concrete under asg.

        Returns (a, coeff_poly, rest) where coeff_poly is the symbolic
        coefficient of x (its evaluation under asg is a) and rest is the
        x-free remainder, unevaluated.  Returns None when x occurs with
        degree >= 2 or multiplied by an unassigned variable.
        """
        a = 0
        coeff_terms: list[tuple[Monomial, int]] = []
        coeff_const = 0
        rest_terms: list[tuple[Monomial, int]] = []
        for vs, c in self.monos:
            k = vs.count(x)
            if k == 0:
                rest_terms.append((vs, c))
                continue
            if k > 1:
                return None
            others = tuple(v for v in vs if v != x)
            prod = c
            for v in others:
                v_val = asg.get(v)
                if v_val is None:
                    return None
                prod *= v_val
            a += prod
            if others:
                coeff_terms.append((others, c))
            else:
                coeff_const += c
        return (
            truncate(a, self.width),
            Poly(self.width, coeff_terms, coeff_const),
            Poly(self.width, rest_terms, self.const),
        )


# ---------------------------------------------------------------------------
# Constraints
# ---------------------------------------------------------------------------

ULE = "ule"        # lhs <=u rhs
OVFL = "ovfl"      # integer product of p and q exceeds 2**w - 1
EQ_AND = "and"     # x = p & q
EQ_OR = "or"       # x = p | q
EQ_SHL = "shl"     # x = p << q
EQ_LSHR = "lshr"   # x = p >>u q
EQ_ASHR = "ashr"   # x = p >>s q
EQ_UDIV = "udiv"   # x = p /u q   (front end axiomatizes these upfront)
EQ_UREM = "urem"   # x = p %u q

STRUCTURAL_KINDS = (EQ_AND, EQ_OR, EQ_SHL, EQ_LSHR, EQ_ASHR, EQ_UDIV, EQ_UREM)
COMMUTATIVE_KINDS = (OVFL, EQ_AND, EQ_OR)


class Constraint:
    """A primitive constraint in canonical positive form.

    args is (lhs, rhs) for ULE, (p, q) for OVFL and (x, p, q) for the
    structural kinds with x a plain variable id.
    """

    __slots__ = ("kind", "width", "args", "_hash")

    def __init__(self, kind: str, width: int, args: tuple):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash((kind, width, args)))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Constraint is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Constraint)
            and self.kind == other.kind
            and self.width == other.width
            and self.args == other.args
        )

    def vars(self) -> set[int]:
        out: set[int] = set()
        for a in self.args:
            if isinstance(a, Poly):
                out |= a.vars()
            else:
                out.add(a)
        return out

    def is_eq_zero(self) -> bool:
        return self.kind == ULE and self.args[1].is_const() and self.args[1].const == 0

    def __repr__(self) -> str:
        if self.kind == ULE:
            lhs, rhs = self.args
            if self.is_eq_zero():
                return f"({lhs!r} == 0)"
            return f"({lhs!r} <=u {rhs!r})"
        if self.kind == OVFL:
            return f"ovfl({self.args[0]!r}, {self.args[1]!r})"
        x, p, q = self.args
        return f"(v{x} = {self.kind}({p!r}, {q!r}))"


@dataclass(frozen=True)
class Assign:
    """Variable-assignment atom x = n."""

    var: int
    value: int
    width: int

    def __repr__(self) -> str:
        return f"(v{self.var} = {self.value})"


@dataclass(frozen=True)
class Literal:
    """A constraint or assignment atom with a sign, or a decided truth."""

    atom: Union[Constraint, Assign, bool]
    positive: bool = True

    def negate(self) -> "Literal":
        if isinstance(self.atom, bool):
            return Literal(not self.atom, True)
        return Literal(self.atom, not self.positive)

    def const_value(self) -> Optional[bool]:
        if isinstance(self.atom, bool):
            return self.atom if self.positive else not self.atom
        return None


TRUE = Literal(True)
FALSE = Literal(False)


def _poly_key(p: Poly) -> tuple:
    return (p.monos, p.const)


def mk_ule(lhs: Poly, rhs: Poly, positive: bool = True) -> Literal:
    """Canonical literal for (lhs <=u rhs) or its negation.

    Folds constant comparisons and maps the equivalent spellings of
    "p equals zero" (p <=u 0, p <u 1, -1 <=u p - 1, p <=u -2 for the
    disequality side, ...) onto one canonical zero-equality form.
    """
    assert lhs.width == rhs.width
    w = lhs.width
    ones = (1 << w) - 1
    lv, rv = lhs.value(), rhs.value()
    if lv is not None and rv is not None:
        return TRUE if (lv <= rv) == positive else FALSE
    if _poly_key(lhs) == _poly_key(rhs):
        return TRUE if positive else FALSE
    if lv == 0 or rv == ones:
        return TRUE if positive else FALSE
    if rv == 0:
        # canonical equality-with-zero form
        return Literal(Constraint(ULE, w, (lhs, rhs)), positive)
    if lv == ones:
        # -1 <=u rhs  <->  rhs + 1 == 0
        return mk_eq_zero(rhs + 1, positive)
    if lv == 1:
        # 1 <=u rhs  <->  rhs != 0
        return mk_eq_zero(rhs, not positive)
    if rv == ones - 1:
        # lhs <=u -2  <->  lhs + 1 != 0
        return mk_eq_zero(lhs + 1, not positive)
    return Literal(Constraint(ULE, w, (lhs, rhs)), positive)


def mk_eq_zero(p: Poly, positive: bool = True) -> Literal:
    v = p.value()
    if v is not None:
        return TRUE if (v == 0) == positive else FALSE
    return Literal(Constraint(ULE, p.width, (p, Poly.constant(p.width, 0))), positive)


def mk_ovfl(p: Poly, q: Poly, positive: bool = True) -> Literal:
    assert p.width == q.width
    w = p.width
    pv, qv = p.value(), q.value()
    if pv is not None and qv is not None:
        return TRUE if (pv * qv >= (1 << w)) == positive else FALSE
    if pv in (0, 1) or qv in (0, 1):
        return FALSE if positive else TRUE
    if _poly_key(p) > _poly_key(q):
        p, q = q, p
    return Literal(Constraint(OVFL, w, (p, q)), positive)


def mk_structural(kind: str, x: int, p: Poly, q: Poly) -> Literal:
    assert kind in STRUCTURAL_KINDS
    assert p.width == q.width
    if kind in COMMUTATIVE_KINDS and _poly_key(p) > _poly_key(q):
        p, q = q, p
    return Literal(Constraint(kind, p.width, (x, p, q)))


def mk_assign(var: int, value: int, width: int, positive: bool = True) -> Literal:
    return Literal(Assign(var, truncate(value, width), width), positive)


# ---------------------------------------------------------------------------
# Reduction of derived constraints
# ---------------------------------------------------------------------------

def reduce_ule(p: Poly, q: Poly) -> Literal:
    return mk_ule(p, q)


def reduce_ult(p: Poly, q: Poly) -> Literal:
    # p <u q  ~>  not (q <=u p)
    return mk_ule(q, p, positive=False)


def reduce_sle(p: Poly, q: Poly) -> Literal:
    # signed via the offset identity
    half = 1 << (p.width - 1)
    return mk_ule(p + half, q + half)


def reduce_slt(p: Poly, q: Poly) -> Literal:
    half = 1 << (p.width - 1)
    return mk_ule(q + half, p + half, positive=False)


def reduce_eq(p: Poly, q: Poly) -> Literal:
    # p = q  ~>  p - q <=u 0
    return mk_eq_zero(p - q)


def reduce_distinct(p: Poly, q: Poly) -> Literal:
    return mk_eq_zero(p - q, positive=False)


def reduce_ovfl_add(p: Poly, q: Poly) -> Literal:
    # ovfl_add(p, q)  ~>  p + q <u p
    return mk_ule(p, p + q, positive=False)


def reduce_bit(p: Poly, i: int) -> Literal:
    # bit(p, i)  ~>  2^(w-1) <=u 2^(w-i-1) * p
    w = p.width
    return mk_ule(Poly.constant(w, 1 << (w - 1)), p.scale(1 << (w - i - 1)))


def bvnot_poly(p: Poly) -> Poly:
    # ~p  ~>  -p - 1
    return -p - 1


REDUCERS: dict[str, Callable[..., Literal]] = {
    "ule": reduce_ule,
    "ult": reduce_ult,
    "sle": reduce_sle,
    "slt": reduce_slt,
    "eq": reduce_eq,
    "distinct": reduce_distinct,
    "ovfl_add": reduce_ovfl_add,
    "bit": reduce_bit,
    "ovfl_mul": mk_ovfl,
}


def reduce_derived(kind: str, *args) -> Literal:
    """Reduce a surface comparison to a primitive-constraint literal."""
    return REDUCERS[kind](*args)


# ---------------------------------------------------------------------------
# Evaluation of constraints
# ---------------------------------------------------------------------------

def eval_constraint(c: Constraint, asg: dict[int, int]) -> Optional[bool]:
    """Truth value of c under a (partial) assignment, None if undetermined."""
    w = c.width
    if c.kind == ULE:
        lv = c.args[0].eval_value(asg)
        rv = c.args[1].eval_value(asg)
        if lv is None or rv is None:
            return None
        return lv <= rv
    if c.kind == OVFL:
        pv = c.args[0].eval_value(asg)
        qv = c.args[1].eval_value(asg)
        if pv is None or qv is None:
            return None
        return pv * qv >= (1 << w)
    x, p, q = c.args
    xv = asg.get(x)
    pv = p.eval_value(asg)
    qv = q.eval_value(asg)
    if xv is None or pv is None or qv is None:
        return None
    ones = (1 << w) - 1
    if c.kind == EQ_AND:
        return xv == (pv & qv)
    if c.kind == EQ_OR:
        return xv == (pv | qv)
    if c.kind == EQ_SHL:
        return xv == ((pv << qv) & ones if qv < w else 0)
    if c.kind == EQ_LSHR:
        return xv == (pv >> qv if qv < w else 0)
    if c.kind == EQ_ASHR:
        sign = (pv >> (w - 1)) & 1
        if qv >= w:
            return xv == (ones if sign else 0)
        sv = pv >> qv
        if sign:
            sv |= ones ^ ((1 << (w - qv)) - 1)
        return xv == sv
    if c.kind == EQ_UDIV:
        return xv == (pv // qv if qv else ones)
    if c.kind == EQ_UREM:
        return xv == (pv % qv if qv else pv)
    raise ValueError(f"unknown constraint kind {c.kind}")


def subst_constraint(c: Constraint, var: int, repl: Poly) -> Optional[Literal]:
    """Substitute repl for var throughout c; None if var defines a structure.

    For structural kinds the defined variable x cannot be replaced by a
    polynomial, only the argument sides can.
    """
    if c.kind == ULE:
        return mk_ule(c.args[0].subst(var, repl), c.args[1].subst(var, repl))
    if c.kind == OVFL:
        return mk_ovfl(c.args[0].subst(var, repl), c.args[1].subst(var, repl))
    x, p, q = c.args
    if x == var:
        return None
    return mk_structural(c.kind, x, p.subst(var, repl), q.subst(var, repl))


# ---------------------------------------------------------------------------
# Linear abstraction of inequality/overflow constraints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearSides:
    """Both sides of a two-sided constraint written as a*x + rest."""

    a_lhs: int
    coeff_lhs: Poly
    rest_lhs: Poly
    a_rhs: int
    coeff_rhs: Poly
    rest_rhs: Poly


def linear_abstraction(c: Constraint, x: int, asg: dict[int, int]) -> Optional[LinearSides]:
    """Linear decomposition of both sides of c with respect to x.

    Only inequality and overflow constraints participate; occurrences of
    x of degree >= 2 or multiplied by unassigned variables make the view
    unavailable.
    """
    if c.kind not in (ULE, OVFL):
        return None
    lv = c.args[0].linear_view(x, asg)
    rv = c.args[1].linear_view(x, asg)
    if lv is None or rv is None:
        return None
    return LinearSides(lv[0], lv[1], lv[2], rv[0], rv[1], rv[2])


# ---------------------------------------------------------------------------
# Division axiomatization
# ---------------------------------------------------------------------------

def axiomatize_udiv(
    x: Poly, y: Poly, fresh_var: Callable[[], int]
) -> tuple[int, int, list[list[Literal]]]:
    """Quotient/remainder variables and the five defining axiom clauses.

    Returns (q, r, clauses) where q, r are fresh variable ids and each
    clause is a list of literals:
      x = q*y + r
      no multiplicative overflow in q*y
      no additive overflow in q*y + r   (as q*y <=u -r-1)
      y = 0  or  r <u y
      y != 0  or  q = -1
    """
    w = x.width
    qv = fresh_var()
    rv = fresh_var()
    qp = Poly.var(w, qv)
    rp = Poly.var(w, rv)
    clauses = [
        [mk_eq_zero(qp * y + rp - x)],
        [mk_ovfl(qp, y, positive=False)],
        [mk_ule(qp * y, -rp - 1)],
        [mk_eq_zero(y), mk_ule(y, rp, positive=False)],
        [mk_eq_zero(y, positive=False), mk_eq_zero(qp + 1)],
    ]
    return qv, rv, clauses
