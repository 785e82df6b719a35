"""Per-variable viable-value tracking.

Each variable owns an ordered set of forbidden intervals over its low
prefixes (an interval of bit-width k+1 constrains x[k:0]).  The value
query walks a candidate upward through forbidden intervals, jumping to
each interval's exit point, until it either escapes all of them and
satisfies the relevant univariate constraints, or revisits an interval
with no wider interval in between, which certifies that the intervals
cover the whole domain and yields a conflict cycle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Union

from .intervals import WInterval, contains, forward_step
from .terms import Poly

_next_eid = itertools.count(1)


@dataclass
class FIEntry:
    """Forbidden interval for the low k+1 bits of var, with justification.

    reasons are the trail literals (source constraint and side conditions)
    under which every value inside ivl falsifies the source; lo_sym/hi_sym
    are symbolic endpoint terms when available.
    """

    var: int
    k: int
    ivl: WInterval
    lo_sym: Optional[Poly] = None
    hi_sym: Optional[Poly] = None
    reasons: tuple[int, ...] = ()
    tag: str = ""
    eid: int = field(default_factory=lambda: next(_next_eid))

    def __repr__(self) -> str:
        return f"FI(v{self.var}[{self.k}:0] not in {self.ivl} <{self.tag}>)"


def _contained(inner: WInterval, outer: WInterval) -> bool:
    if outer.full:
        return True
    if inner.full:
        return False
    m = (1 << inner.width) - 1
    off = (inner.lo - outer.lo) & m
    inner_len = (inner.hi - inner.lo) & m
    outer_len = (outer.hi - outer.lo) & m
    return off < outer_len and off + inner_len <= outer_len


class ViableStore:
    """Trail-scoped forbidden-interval sets for every variable."""

    def __init__(self) -> None:
        self.entries: dict[int, list[FIEntry]] = {}
        self.x_prev: dict[int, int] = {}
        self._log: list[tuple[str, int, FIEntry]] = []

    def for_var(self, var: int) -> list[FIEntry]:
        return self.entries.get(var, [])

    def add(self, entry: FIEntry) -> bool:
        """Insert keeping start-point order; drop same-width containments."""
        if entry.ivl.is_empty:
            return False
        lst = self.entries.setdefault(entry.var, [])
        for e in lst:
            if e.k == entry.k and _contained(entry.ivl, e.ivl):
                return False
        for e in [e for e in lst if e.k == entry.k and _contained(e.ivl, entry.ivl)]:
            lst.remove(e)
            self._log.append(("removed", entry.var, e))
        lst.append(entry)
        lst.sort(key=lambda e: (e.k, e.ivl.lo, e.eid))
        self._log.append(("added", entry.var, entry))
        return True

    def mark(self) -> int:
        return len(self._log)

    def undo_to(self, mark: int) -> None:
        while len(self._log) > mark:
            op, var, entry = self._log.pop()
            lst = self.entries.get(var, [])
            if op == "added":
                lst.remove(entry)
            else:
                lst.append(entry)
                lst.sort(key=lambda e: (e.k, e.ivl.lo, e.eid))


# ---------------------------------------------------------------------------
# The viable value query
# ---------------------------------------------------------------------------

@dataclass
class QueryValue:
    value: int


@dataclass
class QueryConflict:
    cycle: list[FIEntry]


@dataclass
class QueryStuck:
    """A constraint is violated at the candidate but yields no interval."""

    candidate: int
    constraint_ref: object


QueryResult = Union[QueryValue, QueryConflict, QueryStuck]


def _prefix(x0: int, k: int) -> int:
    return x0 & ((1 << (k + 1)) - 1)


def lifted_forward(x0: int, entry: FIEntry, width: int) -> int:
    """Advance the full-width candidate past a prefix interval's exit.

    Moving the low k+1 bits to the interval's upper bound, carrying into
    the high bits when the prefix wraps.
    """
    kw = entry.k + 1
    step = forward_step(_prefix(x0, entry.k), entry.ivl)
    return (x0 + step) & ((1 << width) - 1)


def _find_cycle(just: list[FIEntry]) -> Optional[list[FIEntry]]:
    """Tail cycle: last entry seen before, nothing wider in between."""
    last = just[-1]
    for i in range(len(just) - 2, -1, -1):
        if just[i].k > last.k:
            return None
        if just[i].eid == last.eid:
            return just[i:]
    return None


def is_conflict(just: list[FIEntry]) -> bool:
    return bool(just) and _find_cycle(just) is not None


def query(
    width: int,
    entries: list[FIEntry],
    constraints: list[object],
    x_prev: int,
    violated: Callable[[object, int], bool],
    compute_interval: Callable[[object, int], Union[FIEntry, None]],
    trace: Optional[Callable[[str], None]] = None,
) -> QueryResult:
    """Find a value outside all forbidden intervals satisfying constraints.

    `violated(c, v)` tests a constraint at a candidate; `compute_interval`
    extracts a forbidden interval around a violating candidate (None when
    no extraction applies, full-interval entries signal that the
    constraint excludes everything).
    """
    x0 = x_prev & ((1 << width) - 1)
    just: list[FIEntry] = []
    pool = [e for e in entries if not e.ivl.is_empty]
    for e in pool:
        if e.ivl.full:
            return QueryConflict([e])
    cap = 64 + 8 * (len(pool) + len(constraints) + 4) ** 2
    steps = 0
    while True:
        while True:
            steps += 1
            if steps > cap:
                cap = 64 + 8 * (len(pool) + len(constraints) + 4) ** 2
                if steps > cap:
                    raise RuntimeError("viable walk exceeded its step bound")
            cands = [e for e in pool if contains(e.ivl, _prefix(x0, e.k))]
            if not cands:
                break
            kmin = min(e.k for e in cands)
            best = max(
                (e for e in cands if e.k == kmin),
                key=lambda e: (forward_step(_prefix(x0, e.k), e.ivl), -e.eid),
            )
            just.append(best)
            if trace:
                trace(f"walk\tv{best.var}\t{x0}\t{best.ivl}")
            cycle = _find_cycle(just)
            if cycle is not None:
                return QueryConflict(cycle)
            x0 = lifted_forward(x0, best, width)
        for c in constraints:
            if violated(c, x0):
                fresh = compute_interval(c, x0)
                if fresh is None:
                    return QueryStuck(x0, c)
                if fresh.ivl.full:
                    return QueryConflict([fresh])
                if fresh.ivl.is_empty or not contains(fresh.ivl, _prefix(x0, fresh.k)):
                    # extraction failed to cover the sample; defer
                    return QueryStuck(x0, c)
                pool.append(fresh)
                break
        else:
            return QueryValue(x0)


# ---------------------------------------------------------------------------
# Conflict lemma construction
# ---------------------------------------------------------------------------

class LemmaContext(Protocol):
    def membership_lit(self, t: Poly, lo: Poly, hi: Poly) -> int:
        """Literal asserting t in [lo;hi[, i.e. t - lo <u hi - lo."""
        ...

    def pin_lit(self, var: int) -> int:
        """Literal asserting var equals its current trail value."""
        ...


def conflict_lemma(cycle: list[FIEntry], ctx: LemmaContext) -> list[int]:
    """Clause blocking a covering cycle of forbidden intervals.

    For a single full-domain entry or an equal-width cycle the clause is
    the negated reasons plus the negated chained endpoint memberships
    (upper bound of each interval inside the next); the memberships do not
    mention the conflicted variable.  Mixed-width cycles fall back to
    pinning the variables appearing in symbolic endpoints.
    """
    lits: list[int] = []
    seen: set[int] = set()

    def add(lit: int) -> None:
        if lit not in seen:
            seen.add(lit)
            lits.append(lit)

    for e in cycle:
        for r in e.reasons:
            add(-r)

    widths = {e.k for e in cycle}
    if len(cycle) == 1 and cycle[0].ivl.full:
        return lits
    if len(widths) == 1 and all(not e.ivl.full for e in cycle):
        w = cycle[0].k + 1
        n = len(cycle) - 1  # cycle[-1] repeats cycle[0]
        for i in range(n):
            cur, nxt = cycle[i], cycle[i + 1]
            hi_i = cur.hi_sym if cur.hi_sym is not None else Poly.constant(w, cur.ivl.hi)
            lo_n = nxt.lo_sym if nxt.lo_sym is not None else Poly.constant(w, nxt.ivl.lo)
            hi_n = nxt.hi_sym if nxt.hi_sym is not None else Poly.constant(w, nxt.ivl.hi)
            lit = ctx.membership_lit(hi_i, lo_n, hi_n)
            if lit:
                add(-lit)
        return lits
    # mixed widths: pin every variable appearing in a symbolic endpoint
    pin_vars: set[int] = set()
    for e in cycle:
        for p in (e.lo_sym, e.hi_sym):
            if p is not None:
                pin_vars |= p.vars()
    for v in sorted(pin_vars):
        add(-ctx.pin_lit(v))
    return lits
