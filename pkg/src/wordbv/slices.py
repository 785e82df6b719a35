"""Equality graph over bit-vector slices.

Each variable is partitioned into contiguous chunks; equalities between
slices refine the partitions until both sides decompose into aligned
chunks, which are then merged class by class (union-find).  Classes may
carry a fixed constant; fixing and merging propagate constants in both
directions and detect clashes.

Structural equalities only arrive while the problem is internalized
(decision level zero), so partition refinement is permanent; merges and
fixed values are undone on backjumps through an explicit log.

A slice is a triple (var, hi, lo) with hi/lo inclusive bit positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

Slice = tuple[int, int, int]  # (var, hi, lo)


@dataclass
class SliceConflict:
    """Two incompatible fixed values met; reasons are trail literals."""

    reasons: tuple[int, ...]


def slice_width(s: Slice) -> int:
    return s[1] - s[2] + 1


class SliceGraph:
    def __init__(self) -> None:
        self.width: dict[int, int] = {}
        # chunk boundaries per var: sorted bit positions, always contains 0 and width
        self.bounds: dict[int, list[int]] = {}
        self.parent: dict[Slice, Slice] = {}
        self.rank: dict[Slice, int] = {}
        self.members: dict[Slice, list[Slice]] = {}
        self.fixedv: dict[Slice, tuple[int, tuple[int, ...]]] = {}
        self._log: list[tuple] = []
        self._frozen_structure = False

    # -- registration ----------------------------------------------------------

    def ensure_var(self, var: int, width: int) -> None:
        if var in self.width:
            assert self.width[var] == width
            return
        self.width[var] = width
        self.bounds[var] = [0, width]
        node = (var, width - 1, 0)
        self.parent[node] = node
        self.rank[node] = 0
        self.members[node] = [node]

    def freeze_structure(self) -> None:
        """No further partition refinement allowed (search has started)."""
        self._frozen_structure = True

    # -- union-find ------------------------------------------------------------

    def find(self, n: Slice) -> Slice:
        p = self.parent
        while p[n] != n:
            n = p[n]
        return n

    def same_class(self, a: Slice, b: Slice) -> bool:
        return self.find(a) == self.find(b)

    def slices_equal(self, a: Slice, b: Slice) -> bool:
        """Whether equality of two arbitrary equal-width slices is derivable."""
        if slice_width(a) != slice_width(b):
            return False
        width = slice_width(a)
        pos = 0
        while pos < width:
            ca = self.chunks_covering(a[0], a[2] + pos, a[2] + pos)[0]
            cb = self.chunks_covering(b[0], b[2] + pos, b[2] + pos)[0]
            off_a = a[2] + pos - ca[2]
            off_b = b[2] + pos - cb[2]
            if off_a != off_b or self.find(ca) != self.find(cb):
                return False
            pos += ca[1] - (a[2] + pos) + 1
        return True

    # -- chunk bookkeeping -------------------------------------------------------

    def chunks_covering(self, var: int, hi: int, lo: int) -> list[Slice]:
        """Current chunks overlapping [hi:lo], low to high."""
        bs = self.bounds[var]
        out = []
        for i in range(len(bs) - 1):
            c_lo, c_hi = bs[i], bs[i + 1] - 1
            if c_hi < lo or c_lo > hi:
                continue
            out.append((var, c_hi, c_lo))
        return out

    def chunks_of(self, var: int) -> list[Slice]:
        return self.chunks_covering(var, self.width[var] - 1, 0)

    def _split_at(self, var: int, pos: int) -> None:
        """Refine var's partition so a chunk boundary exists at bit pos."""
        bs = self.bounds[var]
        if pos in bs:
            return
        if self._frozen_structure:
            raise RuntimeError("partition refinement after structure freeze")
        for i in range(len(bs) - 1):
            if bs[i] < pos < bs[i + 1]:
                self._split_chunk((var, bs[i + 1] - 1, bs[i]), pos)
                return
        raise AssertionError("position out of range")

    def _split_chunk(self, node: Slice, pos: int) -> None:
        """Split node (and every member of its class) at absolute bit pos."""
        var, hi, lo = node
        offset = pos - lo
        root = self.find(node)
        mem = list(self.members[root])
        fixed = self.fixedv.pop(root, None)
        del self.members[root]
        highs: list[Slice] = []
        lows: list[Slice] = []
        for v2, h2, l2 in mem:
            cut = l2 + offset
            self.bounds[v2].append(cut)
            self.bounds[v2].sort()
            hi_node = (v2, h2, cut)
            lo_node = (v2, cut - 1, l2)
            for n in (hi_node, lo_node):
                self.parent[n] = n
                self.rank[n] = 0
                self.members[n] = [n]
            del self.parent[(v2, h2, l2)]
            del self.rank[(v2, h2, l2)]
            highs.append(hi_node)
            lows.append(lo_node)
        for group in (highs, lows):
            for other in group[1:]:
                self._union(group[0], other)
        if fixed is not None:
            value, reasons = fixed
            self._set_fixed(self.find(highs[0]), value >> offset, reasons)
            self._set_fixed(self.find(lows[0]), value & ((1 << offset) - 1), reasons)

    # -- low-level class operations ------------------------------------------------

    def _set_fixed(self, root: Slice, value: int, reasons: tuple[int, ...]):
        """Record a constant on a class root.

        Returns True if newly recorded, False if already known equal, or a
        SliceConflict when the class holds a different constant.
        """
        old = self.fixedv.get(root)
        if old is not None:
            if old[0] != value:
                return SliceConflict(old[1] + reasons)
            return False
        self.fixedv[root] = (value, reasons)
        self._log.append(("fix", root))
        return True

    def _union(self, a: Slice, b: Slice) -> Optional[SliceConflict]:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return None
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        fa = self.fixedv.get(ra)
        fb = self.fixedv.get(rb)
        if fa is not None and fb is not None and fa[0] != fb[0]:
            return SliceConflict(fa[1] + fb[1])
        rank_bump = self.rank[ra] == self.rank[rb]
        migrated = fa is None and fb is not None
        self._log.append(("union", ra, rb, rank_bump, len(self.members[ra]), fb, migrated))
        self.parent[rb] = ra
        if rank_bump:
            self.rank[ra] += 1
        self.members[ra].extend(self.members.pop(rb))
        if migrated:
            self.fixedv[ra] = fb
        self.fixedv.pop(rb, None)
        return None

    # -- public assertion API ------------------------------------------------------

    def assert_slice_eq(self, a: Slice, b: Slice) -> list[tuple[Slice, Slice]] | SliceConflict:
        """Assert equality of two equal-width slices; returns performed merges.

        Overlapping or self-referential equalities are decomposed by
        refining partitions until both sides align, then merging chunk
        pairs to a fixpoint.
        """
        if slice_width(a) != slice_width(b):
            raise ValueError("slice width mismatch")
        merges: list[tuple[Slice, Slice]] = []
        work = [(a, b)]
        while work:
            sa, sb = work.pop()
            va, ha, la = sa
            vb, hb, lb = sb
            for var, pos in ((va, la), (va, ha + 1), (vb, lb), (vb, hb + 1)):
                self._split_at(var, pos)
            ca = self.chunks_covering(va, ha, la)
            cb = self.chunks_covering(vb, hb, lb)
            ia = ib = 0
            while ia < len(ca) and ib < len(cb):
                na, nb = ca[ia], cb[ib]
                wa, wb = slice_width(na), slice_width(nb)
                if wa == wb:
                    if self.find(na) != self.find(nb):
                        res = self._union(na, nb)
                        if isinstance(res, SliceConflict):
                            return res
                        merges.append((na, nb))
                    ia += 1
                    ib += 1
                elif wa > wb:
                    # splitting may cascade through merged classes on either
                    # side, so recompute both chunk lists afterwards
                    self._split_at(va, na[2] + wb)
                    work.append((sa, sb))
                    break
                else:
                    self._split_at(vb, nb[2] + wa)
                    work.append((sa, sb))
                    break
        return merges

    def assert_fixed(
        self, s: Slice, value: int, reasons: tuple[int, ...] = ()
    ) -> list[tuple[Slice, int]] | SliceConflict:
        """Record a constant for a slice; propagates across its chunks.

        Returns the chunk-level facts newly recorded, or a conflict carrying
        the literals responsible for the clashing constants.
        """
        var, hi, lo = s
        assert 0 <= value < (1 << slice_width(s))
        self._split_at(var, lo)
        self._split_at(var, hi + 1)
        implied: list[tuple[Slice, int]] = []
        for chunk in self.chunks_covering(var, hi, lo):
            _, c_hi, c_lo = chunk
            piece = (value >> (c_lo - lo)) & ((1 << slice_width(chunk)) - 1)
            res = self._set_fixed(self.find(chunk), piece, reasons)
            if isinstance(res, SliceConflict):
                return res
            if res:
                implied.append((chunk, piece))
        return implied

    # -- queries -------------------------------------------------------------------

    def fixed_value(self, s: Slice) -> Optional[tuple[int, tuple[int, ...]]]:
        """Constant for the slice if every covering chunk is fixed."""
        var, hi, lo = s
        value = 0
        reasons: tuple[int, ...] = ()
        for chunk in self.chunks_covering(var, hi, lo):
            got = self.fixedv.get(self.find(chunk))
            if got is None:
                return None
            piece, why = got
            _, c_hi, c_lo = chunk
            take_lo = max(c_lo, lo)
            take_hi = min(c_hi, hi)
            piece = (piece >> (take_lo - c_lo)) & ((1 << (take_hi - take_lo + 1)) - 1)
            value |= piece << (take_lo - lo)
            reasons = reasons + tuple(r for r in why if r not in reasons)
        return value, reasons

    def fixed_full_value(self, var: int) -> Optional[tuple[int, tuple[int, ...]]]:
        return self.fixed_value((var, self.width[var] - 1, 0))

    def fixed_prefix_info(self, var: int) -> list[tuple[int, int, int, tuple[int, ...]]]:
        """All fixed chunks of var as (hi, lo, value, reasons)."""
        out = []
        for chunk in self.chunks_of(var):
            got = self.fixedv.get(self.find(chunk))
            if got is not None:
                out.append((chunk[1], chunk[2], got[0], got[1]))
        return out

    def prefix_aliases(self, var: int) -> list[tuple[int, int]]:
        """Variables y whose full value equals the prefix var[k:0]; (y, k) pairs."""
        out = []
        my_w = self.width[var]
        for y, wy in self.width.items():
            if y == var or wy > my_w:
                continue
            if wy != my_w and wy not in self.bounds[var]:
                continue
            mine = self.chunks_covering(var, wy - 1, 0)
            theirs = self.chunks_of(y)
            if len(mine) != len(theirs):
                continue
            ok = all(
                slice_width(a) == slice_width(b) and self.find(a) == self.find(b)
                for a, b in zip(mine, theirs)
            )
            if ok:
                out.append((y, wy - 1))
        return out

    def decomposition(self, var: int) -> list[tuple[int, int, Optional[int], tuple[int, ...]]]:
        """Chunks of var, high to low, with fixed info: (hi, lo, value|None, reasons)."""
        out = []
        for chunk in reversed(self.chunks_of(var)):
            got = self.fixedv.get(self.find(chunk))
            if got is None:
                out.append((chunk[1], chunk[2], None, ()))
            else:
                out.append((chunk[1], chunk[2], got[0], got[1]))
        return out

    # -- backtracking ----------------------------------------------------------------

    def mark(self) -> int:
        return len(self._log)

    def undo_to(self, mark: int) -> None:
        while len(self._log) > mark:
            entry = self._log.pop()
            if entry[0] == "fix":
                self.fixedv.pop(entry[1], None)
            else:
                _, ra, rb, rank_bump, n_members, old_fb, migrated = entry
                self.parent[rb] = rb
                if rank_bump:
                    self.rank[ra] -= 1
                moved = self.members[ra][n_members:]
                del self.members[ra][n_members:]
                self.members[rb] = moved
                if old_fb is not None:
                    self.fixedv[rb] = old_fb
                if migrated:
                    del self.fixedv[ra]
