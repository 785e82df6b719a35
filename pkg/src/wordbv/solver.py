"""CDCL(T) search core.

A self-contained Boolean engine (two watched literals, first-UIP clause
learning, phase saving, Luby restarts) cooperating with the theory layers:
the slice graph propagates constants across bit ranges, the viable store
tracks forbidden intervals per variable, interval extraction explains
falsified linear constraints, and the lemma stages (saturation,
linearization, bit-blasting) handle non-linear conflicts on demand.

Atoms are either constraints in canonical positive form, variable
assignments x = n, or plain Boolean variables; literals are signed atom
ids.  Theory-evaluable atoms are propagated eagerly with evaluation
reasons (the conjunction of the participating assignments), which keeps
every conflict clause fully assigned and lets standard resolution work
unchanged.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional, Union

from . import fi, lemmas
from . import viable as viable_mod
from .intervals import WInterval
from .slices import SliceConflict, SliceGraph
from .terms import (
    OVFL,
    ULE,
    Assign,
    Constraint,
    Literal,
    Poly,
    eval_constraint,
    mk_eq_zero,
    mk_ule,
)
from .viable import FIEntry, QueryConflict, QueryStuck, QueryValue, ViableStore, query


@dataclass
class SolveResult:
    status: str  # "sat" | "unsat" | "unknown"
    model: Optional[dict[int, int]] = None
    bool_model: Optional[dict[str, bool]] = None
    reason: str = ""


@dataclass
class Stats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    lemmas: int = 0
    restarts: int = 0


def luby(i: int) -> int:
    """The reluctant-doubling sequence 1,1,2,1,1,2,4,..."""
    k = 1
    while (1 << (k + 1)) - 1 <= i:
        k += 1
    while i != (1 << k) - 1:
        i = i - (1 << (k - 1)) + 1
        k = 1
        while (1 << (k + 1)) - 1 <= i:
            k += 1
    return 1 << (k - 1)


class Solver:
    def __init__(
        self,
        max_conflicts: int = 10**6,
        timeout: float = 60.0,
        seed: int = 0,
        trace: Optional[Callable[[str], None]] = None,
    ) -> None:
        self.max_conflicts = max_conflicts
        self.timeout = timeout
        self.seed = seed
        self.trace = trace
        self.stats = Stats()

        self.var_width: list[int] = []
        self.var_name: list[str] = []

        # atoms: index 0 unused; ("c", Constraint) | ("a", Assign) | ("b", name)
        self.atoms: list = [None]
        self.atom_ids: dict = {}
        self.atoms_of_var: dict[int, list[int]] = {}

        self.values: list[Optional[bool]] = [None]
        self.levels: list[int] = [0]
        self.reasons: list[Optional[list[int]]] = [None]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.theory_head = 0
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.phase: dict[int, bool] = {}

        self.gamma: dict[int, int] = {}
        self.gamma_log: list[int] = []
        self.slices = SliceGraph()
        self.store = ViableStore()
        self.level_marks: list[tuple[int, int, int]] = []

        self.mismatched: set[int] = set()
        self.emitted: set = set()
        self.clause_sigs: set = set()
        self.unsat = False

    # ------------------------------------------------------------------#
    # problem construction
    # ------------------------------------------------------------------#

    def new_var(self, width: int, name: str = "") -> int:
        v = len(self.var_width)
        self.var_width.append(width)
        self.var_name.append(name or f"v{v}")
        self.slices.ensure_var(v, width)
        return v

    def new_bool_atom(self, name: str) -> int:
        return self._intern(("b", name))

    def _intern(self, desc) -> int:
        key = (desc[0], desc[1])
        got = self.atom_ids.get(key)
        if got is not None:
            return got
        aid = len(self.atoms)
        self.atoms.append(desc)
        self.atom_ids[key] = aid
        self.values.append(None)
        self.levels.append(0)
        self.reasons.append(None)
        if desc[0] == "c":
            for v in desc[1].vars():
                self.atoms_of_var.setdefault(v, []).append(aid)
        elif desc[0] == "a":
            self.atoms_of_var.setdefault(desc[1].var, []).append(aid)
        return aid

    def intern_literal(self, lit: Literal) -> Union[int, bool]:
        if isinstance(lit.atom, bool):
            return lit.atom == lit.positive
        kind = "a" if isinstance(lit.atom, Assign) else "c"
        aid = self._intern((kind, lit.atom))
        return aid if lit.positive else -aid

    def lookup_literal(self, lit: Literal) -> Optional[bool]:
        """Boolean trail value of an existing atom's literal (no interning)."""
        v = lit.const_value()
        if v is not None:
            return v
        kind = "a" if isinstance(lit.atom, Assign) else "c"
        aid = self.atom_ids.get((kind, lit.atom))
        if aid is None or self.values[aid] is None:
            return None
        return self.values[aid] == lit.positive

    def assert_literal(self, lit: Literal) -> None:
        self.add_clause([lit])

    def add_clause(self, lits: list[Literal], tag: str = "input") -> None:
        out: list[int] = []
        for lit in lits:
            got = self.intern_literal(lit)
            if got is True:
                return
            if got is False:
                continue
            out.append(got)
        self._add_clause_ints(out, tag)

    def _add_clause_ints(self, out: list[int], tag: str) -> None:
        seen: set[int] = set()
        dedup: list[int] = []
        for l in out:
            if -l in seen:
                return  # tautology
            if l not in seen:
                seen.add(l)
                dedup.append(l)
        out = dedup
        sig = frozenset(out)
        if sig in self.clause_sigs:
            return
        self.clause_sigs.add(sig)
        if not out:
            self.unsat = True
            return
        if len(out) == 1:
            if not self._enqueue(out[0], [out[0]]):
                self.unsat = True
            return
        # watch two not-false literals when possible; among false ones
        # prefer the latest-assigned so watches break on backjumping
        out.sort(key=lambda l: (self._lit_value(l) is False, -self.levels[abs(l)]))
        ci = len(self.clauses)
        self.clauses.append(out)
        self.watches.setdefault(out[0], []).append(ci)
        self.watches.setdefault(out[1], []).append(ci)
        v0, v1 = self._lit_value(out[0]), self._lit_value(out[1])
        if v0 is False and self.level == 0:
            self.unsat = True
        elif v0 is None and v1 is False:
            self._enqueue(out[0], out)

    def assert_slice_equal(self, a, b) -> None:
        res = self.slices.assert_slice_eq(a, b)
        if isinstance(res, SliceConflict):
            self.unsat = True

    def assert_slice_const(self, s, value: int) -> None:
        res = self.slices.assert_fixed(s, value, reasons=())
        if isinstance(res, SliceConflict):
            self.unsat = True

    # ------------------------------------------------------------------#
    # boolean machinery
    # ------------------------------------------------------------------#

    def _lit_value(self, l: int) -> Optional[bool]:
        v = self.values[abs(l)]
        if v is None:
            return None
        return v if l > 0 else not v

    def _level_of(self, l: int) -> int:
        return self.levels[abs(l)]

    @property
    def level(self) -> int:
        return len(self.trail_lim)

    def _enqueue(self, l: int, reason: Optional[list[int]]) -> bool:
        cur = self._lit_value(l)
        if cur is True:
            return True
        if cur is False:
            return False
        aid = abs(l)
        self.values[aid] = l > 0
        self.levels[aid] = self.level
        self.reasons[aid] = reason
        self.trail.append(l)
        self.stats.propagations += 1
        return True

    def _bool_propagate(self) -> Optional[list[int]]:
        while self.qhead < len(self.trail):
            l = self.trail[self.qhead]
            self.qhead += 1
            watchlist = self.watches.get(-l)
            if not watchlist:
                continue
            i = 0
            while i < len(watchlist):
                ci = watchlist[i]
                cl = self.clauses[ci]
                if cl[0] == -l:
                    cl[0], cl[1] = cl[1], cl[0]
                if self._lit_value(cl[0]) is True:
                    i += 1
                    continue
                moved = False
                for j in range(2, len(cl)):
                    if self._lit_value(cl[j]) is not False:
                        cl[1], cl[j] = cl[j], cl[1]
                        self.watches.setdefault(cl[1], []).append(ci)
                        watchlist[i] = watchlist[-1]
                        watchlist.pop()
                        moved = True
                        break
                if moved:
                    continue
                if self._lit_value(cl[0]) is False:
                    return list(cl)
                self._enqueue(cl[0], cl)
                i += 1
        return None

    # ------------------------------------------------------------------#
    # theory integration
    # ------------------------------------------------------------------#

    def _assign_lit(self, var: int) -> int:
        got = self.intern_literal(
            Literal(Assign(var, self.gamma[var], self.var_width[var]))
        )
        assert isinstance(got, int)
        return got

    def _eval_reason(self, aid: int, value: bool, vars_: set[int]) -> list[int]:
        out = [aid if value else -aid]
        for v in sorted(vars_):
            out.append(-self._assign_lit(v))
        return out

    def _eval_propagate_atom(self, aid: int) -> Optional[list[int]]:
        """Evaluate an all-assigned atom; returns a conflict for assignment
        atoms whose boolean value clashes; constraint clashes are queued."""
        desc = self.atoms[aid]
        if desc[0] == "b":
            return None
        if desc[0] == "a":
            a: Assign = desc[1]
            got = self.gamma.get(a.var)
            if got is None:
                return None
            value = got == a.value
            vars_ = {a.var}
        else:
            ev = eval_constraint(desc[1], self.gamma)
            if ev is None:
                return None
            value = ev
            vars_ = desc[1].vars()
        cur = self.values[aid]
        if cur is None:
            self._enqueue(aid if value else -aid, self._eval_reason(aid, value, vars_))
            return None
        if cur == value:
            return None
        if desc[0] == "c":
            self.mismatched.add(aid)
            return None
        return self._eval_reason(aid, value, vars_)

    def _ensure_assigned(self, l: int) -> None:
        """Conflict-clause literals must be on the trail; evaluate fresh atoms."""
        if self._lit_value(l) is not None:
            return
        aid = abs(l)
        desc = self.atoms[aid]
        if desc[0] == "a":
            a = desc[1]
            value = self.gamma.get(a.var) == a.value
            vars_ = {a.var}
        else:
            value = eval_constraint(desc[1], self.gamma)
            vars_ = desc[1].vars()
        assert value is not None, "conflict literal not evaluable"
        self._enqueue(aid if value else -aid, self._eval_reason(aid, value, vars_))

    def _membership_true_lit(self, entry: FIEntry) -> Optional[int]:
        """Literal asserting that entry.var's low prefix lies inside entry.ivl.

        Encoded at full width: prefix membership of x[k:0] scales both the
        offset and the length by 2^(w-k-1).  Returns None when the
        membership folds to a constant truth (full intervals, or constant
        endpoints), which is sound to omit from conflict clauses.
        """
        if entry.ivl.full:
            return None
        w = self.var_width[entry.var]
        kw = entry.k + 1
        j = w - kw
        xv = Poly.var(w, entry.var)
        if j == 0 and entry.lo_sym is not None and entry.hi_sym is not None:
            lit = mk_ule(entry.hi_sym - entry.lo_sym, xv - entry.lo_sym, positive=False)
        else:
            lo = entry.ivl.lo << j
            span = ((entry.ivl.hi - entry.ivl.lo) % (1 << kw)) << j
            lit = mk_ule(Poly.constant(w, span), xv.scale(1 << j) - lo, positive=False)
        got = self.intern_literal(lit)
        if isinstance(got, bool):
            assert got, "membership literal folded false for a covering entry"
            return None
        return got

    def _entry_conflict_clause(self, entry: FIEntry) -> list[int]:
        """The entry's defining implication as a clause (falsified now)."""
        out = list(dict.fromkeys(-r for r in entry.reasons))
        m = self._membership_true_lit(entry)
        if m is not None:
            self._ensure_assigned(m)
            out.append(-m)
        for l in out:
            self._ensure_assigned(l)
        return out

    def _materialize(self, ext: fi.Extraction, source_lit: int, tag: str) -> FIEntry:
        reasons = [source_lit] if source_lit else []
        for poly, val in ext.side_eqs:
            lit = mk_eq_zero(poly - val)
            got = self.intern_literal(lit)
            if got is True:
                continue
            assert isinstance(got, int)
            if self._lit_value(got) is None:
                self._eval_propagate_atom(abs(got))
            reasons.append(got)
        entry = FIEntry(
            var=ext.var,
            k=ext.k,
            ivl=ext.ivl,
            lo_sym=ext.lo_sym,
            hi_sym=ext.hi_sym,
            reasons=tuple(reasons),
            tag=tag,
        )
        if self.trace:
            self.trace(f"fi\tv{entry.var}[{entry.k}:0] not in {entry.ivl} from {tag}")
        return entry

    def _asserted_constraints(self) -> list[tuple[int, Constraint, bool]]:
        out = []
        for aid in range(1, len(self.atoms)):
            desc = self.atoms[aid]
            if desc[0] != "c" or self.values[aid] is None:
                continue
            out.append((aid if self.values[aid] else -aid, desc[1], self.values[aid]))
        return out

    def _scan_state(self) -> lemmas.ScanState:
        assignments = {v: (self._assign_lit(v), n) for v, n in self.gamma.items()}
        return lemmas.ScanState(
            width_of=lambda v: self.var_width[v],
            asg=self.gamma,
            constraints=self._asserted_constraints(),
            assignments=assignments,
            emitted=self.emitted,
            bool_lookup=self.lookup_literal,
        )

    def _try_stage_lemma(self) -> tuple[Optional[list[int]], bool]:
        """One new lemma from the stage pipeline: (conflict, emitted)."""
        em = lemmas.next_lemma(self._scan_state())
        if em is None:
            return None, False
        name, clause, key = em
        self.emitted.add(key)
        self.stats.lemmas += 1
        out: list[int] = []
        for lit in clause:
            got = self.intern_literal(lit)
            if got is True:
                return None, True  # folded satisfied after interning
            if got is False:
                continue
            out.append(got)
        if self.trace:
            self.trace(f"lemma\t{name}\t{self._fmt_clause(out)}")
        if not out:
            self.unsat = True
            return [], True
        for l in out:
            if self._lit_value(l) is None:
                self._eval_propagate_atom(abs(l))
        falsified = all(self._lit_value(l) is False for l in out)
        self._add_clause_ints(list(out), f"lemma:{name}")
        if falsified:
            for l in out:
                self._ensure_assigned(l)
            return out, True
        return None, True

    def _explain_falsified(self, aid: int, c: Constraint, asserted: bool) -> Optional[list[int]]:
        """Conflict ladder for an asserted constraint that evaluates false.

        Returns a falsified conflict clause, or None when a propagating
        lemma was added instead (progress without an immediate conflict).
        """
        source_lit = aid if asserted else -aid
        conflict: Optional[list[int]] = None
        for v in sorted(c.vars()):
            if v not in self.gamma:
                return None  # no longer fully assigned
            ext = fi.analyze(c, asserted, v, self.gamma, sample=self.gamma[v])
            if isinstance(ext, fi.Extraction):
                entry = self._materialize(ext, source_lit, tag=f"explain:{c.kind}")
                if not entry.ivl.full:
                    self.store.add(entry)
                conflict = self._entry_conflict_clause(entry)
                break
        stage_conflict, emitted = self._try_stage_lemma()
        if conflict is not None:
            return conflict
        if stage_conflict is not None:
            return stage_conflict
        if emitted:
            return None
        out = [-source_lit]
        for v in sorted(c.vars()):
            out.append(-self._assign_lit(v))
        return out

    def _propagation_extract(self, lit: int, c: Constraint, positive: bool) -> Optional[list[int]]:
        """Sample-free interval extraction for constraints newly univariate."""
        if c.kind not in (ULE, OVFL):
            return None
        unassigned = [v for v in c.vars() if v not in self.gamma]
        if len(unassigned) != 1:
            return None
        y = unassigned[0]
        ext = fi.analyze(c, positive, y, self.gamma, sample=None)
        if not isinstance(ext, fi.Extraction):
            return None
        entry = self._materialize(ext, lit, tag=f"propagate:{c.kind}")
        if entry.ivl.full:
            return self._entry_conflict_clause(entry)
        self.store.add(entry)
        return None

    def _theory_check(self) -> Optional[list[int]]:
        while self.theory_head < len(self.trail):
            l = self.trail[self.theory_head]
            self.theory_head += 1
            aid = abs(l)
            desc = self.atoms[aid]
            if desc[0] == "a":
                a: Assign = desc[1]
                if l > 0:
                    got = self.gamma.get(a.var)
                    if got is not None:
                        if got != a.value:
                            return [-l, -self._assign_lit(a.var)]
                        continue
                    self.gamma[a.var] = a.value
                    self.gamma_log.append(a.var)
                    if self.trace:
                        self.trace(f"assignment\t{self.var_name[a.var]}\t{a.value}")
                    res = self.slices.assert_fixed(
                        (a.var, a.width - 1, 0), a.value, reasons=(l,)
                    )
                    if isinstance(res, SliceConflict):
                        out = list(dict.fromkeys(-r for r in res.reasons))
                        return out
                    confl = self._after_assignment(a.var)
                    if confl is not None:
                        return confl
                else:
                    w = self.var_width[a.var]
                    self.store.add(
                        FIEntry(
                            var=a.var,
                            k=w - 1,
                            ivl=WInterval(w, a.value, (a.value + 1) % (1 << w)),
                            lo_sym=Poly.constant(w, a.value),
                            hi_sym=Poly.constant(w, (a.value + 1) % (1 << w)),
                            reasons=(l,),
                            tag="flip",
                        )
                    )
            elif desc[0] == "c":
                c: Constraint = desc[1]
                ev = eval_constraint(c, self.gamma)
                if ev is not None:
                    if ev != (l > 0):
                        self.mismatched.add(aid)
                else:
                    confl = self._propagation_extract(l, c, l > 0)
                    if confl is not None:
                        return confl
        return None

    def _after_assignment(self, var: int) -> Optional[list[int]]:
        for aid in self.atoms_of_var.get(var, []):
            confl = self._eval_propagate_atom(aid)
            if confl is not None:
                return confl
        for aid in list(self.atoms_of_var.get(var, [])):
            desc = self.atoms[aid]
            if desc[0] != "c" or self.values[aid] is None:
                continue
            confl = self._propagation_extract(
                aid if self.values[aid] else -aid, desc[1], self.values[aid]
            )
            if confl is not None:
                return confl
        # slice-composed values for other variables
        for other in range(len(self.var_width)):
            if other in self.gamma:
                continue
            got = self.slices.fixed_full_value(other)
            if got is None:
                continue
            value, reasons = got
            lit = self.intern_literal(Literal(Assign(other, value, self.var_width[other])))
            assert isinstance(lit, int)
            if self._lit_value(lit) is None:
                self._enqueue(lit, [lit] + [-r for r in reasons])
        return None

    def _next_mismatch(self) -> Optional[int]:
        while self.mismatched:
            aid = self.mismatched.pop()
            if self.values[aid] is None:
                continue
            desc = self.atoms[aid]
            ev = eval_constraint(desc[1], self.gamma)
            if ev is None or ev == self.values[aid]:
                continue
            return aid
        return None

    # ------------------------------------------------------------------#
    # decisions: the viable value query
    # ------------------------------------------------------------------#

    def _query_entries(self, x: int) -> list[FIEntry]:
        out = list(self.store.for_var(x))
        w = self.var_width[x]
        for hi, lo, val, reasons in self.slices.fixed_prefix_info(x):
            if hi == w - 1 and lo == 0:
                continue  # fully fixed variables propagate as assignments
            out.append(
                FIEntry(
                    var=x,
                    k=hi,
                    ivl=fi.fixed_chunk_interval(hi, lo, val),
                    reasons=tuple(reasons),
                    tag="fixed-bits",
                )
            )
        for y, k in self.slices.prefix_aliases(x):
            for e in self.store.for_var(y):
                out.append(
                    FIEntry(
                        var=x, k=min(e.k, k), ivl=e.ivl, lo_sym=e.lo_sym,
                        hi_sym=e.hi_sym, reasons=e.reasons, tag=f"alias:v{y}",
                    )
                )
        # projections from composite variables containing x as a chunk
        for s in range(len(self.var_width)):
            if s == x or self.var_width[s] <= w:
                continue
            chunks = self.slices.decomposition(s)
            target = None
            for hi, lo, _, _ in chunks:
                if hi - lo + 1 == w and self.slices.slices_equal((s, hi, lo), (x, w - 1, 0)):
                    target = (hi, lo)
                    break
            if target is None:
                continue
            fixed_reasons: tuple[int, ...] = ()
            for _, _, fv, fr in chunks:
                if fv is not None:
                    fixed_reasons += tuple(r for r in fr if r not in fixed_reasons)
            for e in self.store.for_var(s):
                if e.k != self.var_width[s] - 1:
                    continue
                proj = fi.project_chain(
                    [(hi, lo, fv) for hi, lo, fv, _ in chunks], e.ivl, *target
                )
                if proj is None:
                    continue
                ivl = WInterval.full_domain(w) if proj == fi.BOT else proj
                out.append(
                    FIEntry(
                        var=x, k=w - 1, ivl=ivl,
                        reasons=tuple(dict.fromkeys(e.reasons + fixed_reasons)),
                        tag=f"project:v{s}",
                    )
                )
        return out

    def _query_constraints(self, x: int) -> list[tuple[int, Constraint, bool]]:
        out = []
        for aid in self.atoms_of_var.get(x, []):
            desc = self.atoms[aid]
            if desc[0] != "c" or self.values[aid] is None:
                continue
            c = desc[1]
            if c.kind not in (ULE, OVFL):
                continue
            if any(v != x and v not in self.gamma for v in c.vars()):
                continue
            out.append((aid if self.values[aid] else -aid, c, self.values[aid]))
        return out

    class _LemmaCtx:
        def __init__(self, solver: "Solver"):
            self.solver = solver

        def membership_lit(self, t: Poly, lo: Poly, hi: Poly) -> int:
            lit = mk_ule(hi - lo, t - lo, positive=False)
            got = self.solver.intern_literal(lit)
            if got is True:
                return 0
            assert got is not False, "membership concretely false inside a cycle"
            return got

        def pin_lit(self, var: int) -> int:
            return self.solver._assign_lit(var)

    def _decide_var(self, x: int) -> Optional[list[int]]:
        w = self.var_width[x]
        entries = self._query_entries(x)

        def violated(ref, v) -> bool:
            _, c, pos = ref
            got = eval_constraint(c, {**self.gamma, x: v})
            return got is not None and got != pos

        def compute(ref, v) -> Optional[FIEntry]:
            lit, c, pos = ref
            ext = fi.analyze(c, pos, x, self.gamma, sample=v)
            if not isinstance(ext, fi.Extraction):
                return None
            entry = self._materialize(ext, lit, tag=f"query:{c.kind}")
            if not entry.ivl.full:
                self.store.add(entry)
            return entry

        res = query(
            w,
            entries,
            self._query_constraints(x),
            self.store.x_prev.get(x, 0),
            violated,
            compute,
            trace=self.trace,
        )
        if isinstance(res, (QueryValue, QueryStuck)):
            value = res.value if isinstance(res, QueryValue) else res.candidate
            self.store.x_prev[x] = value
            self._push_level()
            lit = self.intern_literal(Literal(Assign(x, value, w)))
            assert isinstance(lit, int)
            self.stats.decisions += 1
            if self.trace:
                self.trace(f"decide\t{self.var_name[x]}\t{value}")
            if not self._enqueue(lit, None):
                # the candidate's assignment atom is already false: the query
                # walked into a booleanly excluded value; flip it to a
                # forbidden singleton by conflicting on the existing literal
                return [lit]
            return None
        assert isinstance(res, QueryConflict)
        clause = viable_mod.conflict_lemma(res.cycle, self._LemmaCtx(self))
        for l in clause:
            self._ensure_assigned(l)
        if self.trace:
            self.trace(f"cycle\t{self.var_name[x]}\t{self._fmt_clause(clause)}")
        return clause

    # ------------------------------------------------------------------#
    # conflict analysis / backjumping
    # ------------------------------------------------------------------#

    def _push_level(self) -> None:
        self.trail_lim.append(len(self.trail))
        self.level_marks.append(
            (self.slices.mark(), self.store.mark(), len(self.gamma_log))
        )

    def _backjump(self, target: int) -> None:
        if self.trace and target < self.level:
            self.trace(f"backjump\t{self.level}\t{target}")
        while self.level > target:
            lim = self.trail_lim.pop()
            smark, vmark, gmark = self.level_marks.pop()
            for l in self.trail[lim:]:
                aid = abs(l)
                self.values[aid] = None
                self.reasons[aid] = None
                self.phase[aid] = l > 0
            del self.trail[lim:]
            self.slices.undo_to(smark)
            self.store.undo_to(vmark)
            while len(self.gamma_log) > gmark:
                del self.gamma[self.gamma_log.pop()]
        self.qhead = min(self.qhead, len(self.trail))
        self.theory_head = min(self.theory_head, len(self.trail))

    def _analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        """First-UIP resolution; returns (learned clause, backjump level)."""
        for l in conflict:
            assert self._lit_value(l) is False, "conflict clause literal not false"
        top = max((self._level_of(l) for l in conflict), default=0)
        if top == 0:
            return [], 0
        if top < self.level:
            self._backjump(top)
        seen: set[int] = set()
        learned: list[int] = []
        counter = 0

        def bump(l: int) -> None:
            nonlocal counter
            aid = abs(l)
            if aid in seen:
                return
            seen.add(aid)
            lv = self._level_of(l)
            if lv == top:
                counter += 1
            elif lv > 0:
                learned.append(l)

        for l in conflict:
            bump(l)
        idx = len(self.trail) - 1
        uip: Optional[int] = None
        while True:
            while idx >= 0:
                l = self.trail[idx]
                idx -= 1
                if abs(l) in seen and self._level_of(l) == top:
                    break
            else:
                raise AssertionError("no UIP found")
            counter -= 1
            if counter == 0:
                uip = l
                break
            reason = self.reasons[abs(l)]
            assert reason is not None, "decision reached before exhausting the level"
            for r in reason:
                if abs(r) != abs(l):
                    bump(r)
        learned.sort(key=self._level_of, reverse=True)
        learned = [-uip] + learned
        back = self._level_of(learned[1]) if len(learned) > 1 else 0
        return learned, back

    def _handle_conflict(self, conflict: list[int]) -> bool:
        self.stats.conflicts += 1
        if not conflict:
            return False
        learned, back = self._analyze(conflict)
        if not learned:
            return False
        self._backjump(back)
        if self.trace:
            self.trace(f"learn\t{self._fmt_clause(learned)}")
        if len(learned) == 1:
            self.clause_sigs.add(frozenset(learned))
            if not self._enqueue(learned[0], [learned[0]]):
                return False
        else:
            sig = frozenset(learned)
            if sig not in self.clause_sigs:
                self.clause_sigs.add(sig)
                ci = len(self.clauses)
                self.clauses.append(learned)
                self.watches.setdefault(learned[0], []).append(ci)
                self.watches.setdefault(learned[1], []).append(ci)
            if not self._enqueue(learned[0], learned):
                return False
        return True

    # ------------------------------------------------------------------#
    # main loop
    # ------------------------------------------------------------------#

    def _propagate_all(self) -> Optional[list[int]]:
        while True:
            confl = self._bool_propagate()
            if confl is not None:
                return confl
            confl = self._theory_check()
            if confl is not None:
                return confl
            if self.qhead < len(self.trail) or self.theory_head < len(self.trail):
                continue
            aid = self._next_mismatch()
            if aid is None:
                return None
            confl = self._explain_falsified(aid, self.atoms[aid][1], self.values[aid])
            if confl is not None:
                return confl
            # a propagating lemma was added; keep the atom pending in case
            # nothing changes its status
            if self.qhead == len(self.trail) and self.theory_head == len(self.trail):
                desc = self.atoms[aid]
                ev = eval_constraint(desc[1], self.gamma)
                if ev is not None and self.values[aid] is not None and ev != self.values[aid]:
                    self.mismatched.add(aid)

    def _decide(self) -> Union[None, str, list[int]]:
        for x in range(len(self.var_width)):
            if x not in self.gamma:
                return self._decide_var(x)
        for aid in range(1, len(self.atoms)):
            if self.values[aid] is None and self.atoms[aid][0] == "b":
                self._push_level()
                self.stats.decisions += 1
                self._enqueue(aid if self.phase.get(aid, False) else -aid, None)
                return None
        return "sat"

    def solve(self) -> SolveResult:
        start = time.monotonic()
        deadline = start + self.timeout if self.timeout else None
        self.slices.freeze_structure()
        restart_budget = luby(self.stats.restarts + 1) * 256
        conflicts_here = 0
        while True:
            if self.unsat:
                if self.trace:
                    self.trace("result\tunsat")
                return SolveResult("unsat")
            confl = self._propagate_all()
            if confl is not None:
                if not self._handle_conflict(confl):
                    if self.trace:
                        self.trace("result\tunsat")
                    return SolveResult("unsat")
                conflicts_here += 1
                if self.stats.conflicts >= self.max_conflicts:
                    return SolveResult("unknown", reason="conflict budget exhausted")
                if deadline and time.monotonic() > deadline:
                    return SolveResult("unknown", reason="timeout")
                if conflicts_here >= restart_budget:
                    conflicts_here = 0
                    self.stats.restarts += 1
                    restart_budget = luby(self.stats.restarts + 1) * 256
                    self._backjump(0)
                    if self.trace:
                        self.trace(f"restart\t{self.stats.restarts}")
                continue
            if deadline and time.monotonic() > deadline:
                return SolveResult("unknown", reason="timeout")
            got = self._decide()
            if got == "sat":
                return self._finish_sat()
            if isinstance(got, list):
                if not self._handle_conflict(got):
                    if self.trace:
                        self.trace("result\tunsat")
                    return SolveResult("unsat")
                if self.stats.conflicts >= self.max_conflicts:
                    return SolveResult("unknown", reason="conflict budget exhausted")

    def _finish_sat(self) -> SolveResult:
        model = dict(self.gamma)
        # internal consistency: every asserted constraint atom must agree
        # with its evaluation (an unsound interval or lemma surfaces here)
        for aid in range(1, len(self.atoms)):
            desc = self.atoms[aid]
            if desc[0] != "c" or self.values[aid] is None:
                continue
            ev = eval_constraint(desc[1], model)
            if ev != self.values[aid]:
                raise AssertionError(
                    f"model check failed on {desc[1]!r}: {ev} vs {self.values[aid]}"
                )
        bools = {}
        for aid in range(1, len(self.atoms)):
            if self.atoms[aid][0] == "b":
                bools[self.atoms[aid][1]] = bool(self.values[aid])
        if self.trace:
            self.trace("result\tsat")
        return SolveResult("sat", model=model, bool_model=bools)

    # ------------------------------------------------------------------#
    # debugging helpers
    # ------------------------------------------------------------------#

    def _fmt_lit(self, l: int) -> str:
        desc = self.atoms[abs(l)]
        return f"{'' if l > 0 else '~'}{desc[1]!r}"

    def _fmt_clause(self, cl: list[int]) -> str:
        return " | ".join(self._fmt_lit(l) for l in cl)
