"""Brute-force enumeration oracle.

Evaluates polynomials, constraints and clauses over every assignment of
their variables using vectorized integer arithmetic; the ground truth for
differential testing and for exhaustive lemma validity checks.  Keeps all
intermediate products below 2**62, so the total enumerated width is
capped (24 bits by default for formulas, which also bounds individual
variable widths).
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .terms import (
    OVFL,
    ULE,
    EQ_AND,
    EQ_OR,
    EQ_SHL,
    EQ_LSHR,
    EQ_ASHR,
    EQ_UDIV,
    EQ_UREM,
    Assign,
    Constraint,
    Literal,
    Poly,
)

DEFAULT_WIDTH_BUDGET = 24


class WidthBudgetExceeded(Exception):
    """Raised when enumerating all assignments would be unreasonable."""


def eval_poly_vec(p: Poly, arrays: dict[int, np.ndarray]) -> np.ndarray:
    mask = (1 << p.width) - 1
    shape = next(iter(arrays.values())).shape if arrays else ()
    acc = np.full(shape, p.const, dtype=np.int64)
    for vs, c in p.monos:
        term = np.full(shape, c, dtype=np.int64)
        for v in vs:
            term = (term * arrays[v]) & mask
        acc = (acc + term) & mask
    return acc & mask


def eval_constraint_vec(c: Constraint, arrays: dict[int, np.ndarray]) -> np.ndarray:
    w = c.width
    mask = (1 << w) - 1
    if c.kind == ULE:
        return eval_poly_vec(c.args[0], arrays) <= eval_poly_vec(c.args[1], arrays)
    if c.kind == OVFL:
        pv = eval_poly_vec(c.args[0], arrays)
        qv = eval_poly_vec(c.args[1], arrays)
        return pv * qv > mask
    x, p, q = c.args
    xv = arrays[x]
    pv = eval_poly_vec(p, arrays)
    qv = eval_poly_vec(q, arrays)
    if c.kind == EQ_AND:
        return xv == (pv & qv)
    if c.kind == EQ_OR:
        return xv == (pv | qv)
    sh = np.minimum(qv, w)
    if c.kind == EQ_SHL:
        return xv == np.where(qv >= w, 0, (pv << sh) & mask)
    if c.kind == EQ_LSHR:
        return xv == np.where(qv >= w, 0, pv >> sh)
    if c.kind == EQ_ASHR:
        sign = (pv >> (w - 1)) & 1
        fill = np.where(sign == 1, mask ^ (mask >> sh), 0)
        shifted = (pv >> sh) | fill
        return xv == np.where(qv >= w, np.where(sign == 1, mask, 0), shifted & mask)
    if c.kind == EQ_UDIV:
        return xv == np.where(qv == 0, mask, pv // np.maximum(qv, 1))
    if c.kind == EQ_UREM:
        return xv == np.where(qv == 0, pv, pv % np.maximum(qv, 1))
    raise ValueError(f"unknown constraint kind {c.kind}")


def eval_literal_vec(lit: Literal, arrays: dict[int, np.ndarray]) -> np.ndarray:
    if isinstance(lit.atom, bool):
        shape = next(iter(arrays.values())).shape if arrays else ()
        return np.full(shape, lit.atom == lit.positive, dtype=bool)
    if isinstance(lit.atom, Assign):
        res = arrays[lit.atom.var] == lit.atom.value
        return res if lit.positive else ~res
    res = eval_constraint_vec(lit.atom, arrays)
    return res if lit.positive else ~res


def assignment_grid(
    widths: dict[int, int], budget: int = DEFAULT_WIDTH_BUDGET
) -> dict[int, np.ndarray]:
    """Flat arrays enumerating every total assignment of the variables."""
    total = sum(widths.values())
    if total > budget:
        raise WidthBudgetExceeded(
            f"enumeration over {total} total bits exceeds the {budget}-bit budget"
        )
    vars_sorted = sorted(widths)
    axes = [np.arange(1 << widths[v], dtype=np.int64) for v in vars_sorted]
    grids = np.meshgrid(*axes, indexing="ij") if axes else []
    return {v: g.ravel() for v, g in zip(vars_sorted, grids)}


def clause_counterexamples(
    clause: list[Literal], widths: dict[int, int], budget: int = DEFAULT_WIDTH_BUDGET
) -> np.ndarray:
    """Boolean array marking assignments that falsify every literal."""
    var_widths: dict[int, int] = {}
    for lit in clause:
        if isinstance(lit.atom, bool):
            continue
        if isinstance(lit.atom, Assign):
            var_widths[lit.atom.var] = lit.atom.width
        else:
            for v in lit.atom.vars():
                var_widths[v] = widths[v]
    arrays = assignment_grid(var_widths, budget)
    if not arrays:
        value = any(lit.const_value() for lit in clause)
        return np.zeros(0 if value else 1, dtype=bool)
    falsified = np.ones(next(iter(arrays.values())).shape, dtype=bool)
    for lit in clause:
        falsified &= ~eval_literal_vec(lit, arrays)
    return falsified


def clause_valid(
    clause: list[Literal], widths: dict[int, int], budget: int = DEFAULT_WIDTH_BUDGET
) -> bool:
    """Whether the disjunction holds under every total assignment."""
    return not clause_counterexamples(clause, widths, budget).any()


def formula_models(
    widths: dict[int, int],
    literals: list[Literal],
    budget: int = DEFAULT_WIDTH_BUDGET,
) -> Optional[dict[int, int]]:
    """First satisfying assignment of a conjunction of literals, or None."""
    arrays = assignment_grid(widths, budget)
    if not arrays:
        return {} if all(lit.const_value() for lit in literals) else None
    ok = np.ones(next(iter(arrays.values())).shape, dtype=bool)
    for lit in literals:
        v = lit.const_value()
        if v is True:
            continue
        if v is False:
            return None
        ok &= eval_literal_vec(lit, arrays)
        if not ok.any():
            return None
    idx = int(np.argmax(ok))
    return {v: int(a[idx]) for v, a in arrays.items()}
