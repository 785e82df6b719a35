"""Forbidden-interval extraction from constraints.

Given a constraint that is linear in a variable x under the current
assignment, these routines compute a wrapping interval of x-values (or of
values of a low prefix of x) that all falsify the constraint, together
with the side conditions under which the interval is valid.

Four extraction families:
  * fixed bits recorded in the slice graph,
  * inequalities whose two sides carry the same (or one-sided) coefficient,
    reduced via the +-1 transformation and the power-of-two bit-width
    reduction,
  * general odd coefficients, by extending a no-overflow core interval
    period by period while the coefficient lattice keeps landing inside
    the target band (the drift procedure),
  * inequalities with different coefficients on the two sides, by safe
    step bounds computed from four sign embeddings of the coefficients.

Plus projection of intervals from a composite variable onto its high or
low parts, used when slice structure relates variables of different
widths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .bv import parity_int, truncate
from .intervals import WInterval, contains
from .terms import OVFL, ULE, Constraint, Poly


def ceil_div(n: int, d: int) -> int:
    """Mathematical ceiling of n/d for d > 0 (n may be negative)."""
    assert d > 0
    return -((-n) // d)


# ---------------------------------------------------------------------------
# Extraction result
# ---------------------------------------------------------------------------

@dataclass
class Extraction:
    """A forbidden interval for the low k+1 bits of a variable.

    side_eqs are (poly, value) pairs that must hold for the interval to be
    valid; lo_sym/hi_sym give symbolic endpoint terms when the endpoints
    are value-independent of the pinned polys (only for coefficient +-1 at
    full width), else None.
    """

    var: int
    k: int
    ivl: WInterval
    lo_sym: Optional[Poly] = None
    hi_sym: Optional[Poly] = None
    side_eqs: list[tuple[Poly, int]] = field(default_factory=list)

    @property
    def full(self) -> bool:
        return self.ivl.full


def _pin(side_eqs: list[tuple[Poly, int]], poly: Poly, value: int) -> None:
    if poly.value() is None:
        side_eqs.append((poly, value))


# ---------------------------------------------------------------------------
# Fixed bits
# ---------------------------------------------------------------------------

def fixed_chunk_interval(h: int, l: int, n: int) -> WInterval:
    """Forbidden interval on x[h:0] given the fixed sub-slice x[h:l] = n."""
    width = h + 1
    lo = truncate((n + 1) << l, width)
    hi = truncate(n << l, width)
    return WInterval(width, lo, hi)


def from_fixed_bits(x: int, x0: int, fixed: tuple[int, int, int]) -> Optional[Extraction]:
    """Entry for x[h:0] when the sample x0 contradicts x[h:l] = n."""
    h, l, n = fixed
    if (x0 >> l) & ((1 << (h - l + 1)) - 1) == n:
        return None
    return Extraction(var=x, k=h, ivl=fixed_chunk_interval(h, l, n))


# ---------------------------------------------------------------------------
# General coefficients: the drift procedure
# ---------------------------------------------------------------------------

def _representative_index(x0: int, a: int, l: int, h: int, m: int) -> int:
    """The i with l + i*m <= a*x0 <= h + i*m; ValueError if none exists."""
    k0 = ceil_div(l - a * x0, m)
    if a * x0 + k0 * m > h:
        raise ValueError("sample point not inside the target band")
    return -k0


def upper_extent(x0: int, a: int, l: int, h: int, m: int) -> Optional[int]:
    """Maximal x_h >= x0 in Z with a*x mod m in [l, h] for all x in [x0, x_h].

    None means the run covers a full period, i.e. there is no upper bound
    and the modular interval is the whole domain.
    """
    if not (1 <= a < m and -m < l <= h < m and h - l + 1 < m):
        raise ValueError("preconditions violated")
    i = _representative_index(x0, a, l, h, m)
    xh = (h + i * m) // a
    while True:
        if xh - x0 >= m:
            return None
        nxt = a * (xh + 1)
        if l + (i + 1) * m <= nxt <= h + (i + 1) * m:
            i += 1
            xh = (h + i * m) // a
        else:
            return xh


def core_extent(x0: int, a: int, l: int, h: int, m: int) -> tuple[int, int]:
    """The no-overflow interval: maximal [xl', xh'] around x0 within one band."""
    i = _representative_index(x0, a, l, h, m)
    return ceil_div(l + i * m, a), (h + i * m) // a


def from_general_coeff(
    a: int, x0: int, l: int, h: int, m: int
) -> tuple[Optional[int], Optional[int]]:
    """Maximal integer run [x_l, x_h] around x0 with a*x mod m in [l, h].

    Either bound is None when unbounded (the run is periodic and the
    modular interval covers the full domain).  The lower bound reuses the
    upper-bound procedure by mirroring the configuration across zero.
    """
    xh = upper_extent(x0, a, l, h, m)
    mirrored = upper_extent(-x0, a, -h, -l, m)
    xl = None if mirrored is None else -mirrored
    if xh is not None and xl is not None and xh - xl + 1 >= m:
        return None, None
    if (xh is None) != (xl is None):
        return None, None
    return xl, xh


# ---------------------------------------------------------------------------
# Different coefficients: safe step bounds around a violating sample
# ---------------------------------------------------------------------------

def _delta_upper(pe: int, re: int, a: int, b: int, x0: int, w: int, d_gap: int) -> int:
    terms = [(1 << w) - x0]
    if pe > 0:
        terms.append(ceil_div((1 << w) - a, pe))
    if re > pe:
        terms.append(ceil_div(d_gap, re - pe))
    if re < 0:
        terms.append(b // (-re) + 1)
    return min(terms) - 1


def _delta_lower(pe: int, re: int, a: int, b: int, x0: int, w: int, d_gap: int) -> int:
    terms = [x0 + 1]
    if re > 0:
        terms.append(ceil_div(b + 1, re))
    if pe > re:
        terms.append(ceil_div(d_gap, pe - re))
    if pe < 0:
        terms.append(ceil_div((1 << w) - a, -pe))
    return min(terms) - 1


def diff_coeff_deltas_base(
    p: int, q: int, r: int, s: int, x0: int, w: int, strict: bool = False
) -> tuple[int, int]:
    """The (delta_h, delta_l) pair from the base embedding only."""
    m = 1 << w
    a = (p * x0 + q) % m
    b = (r * x0 + s) % m
    d_gap = a - b + (1 if strict else 0)
    return (
        _delta_upper(p, r, a, b, x0, w, d_gap),
        _delta_lower(p, r, a, b, x0, w, d_gap),
    )


def from_diff_coeffs(
    p: int, q: int, r: int, s: int, x0: int, w: int, strict: bool = False
) -> tuple[int, int]:
    """Safe violating range [x_l, x_h] around x0 for p*x + q <=u r*x + s.

    Requires p, r nonzero and distinct mod 2**w and that x0 violates the
    constraint.  All four sign embeddings of the coefficients are tried
    and the widest safe bound kept for each side independently.
    """
    m = 1 << w
    p %= m
    r %= m
    if p == 0 or r == 0 or p == r:
        raise ValueError("coefficient preconditions violated")
    a = (p * x0 + q) % m
    b = (r * x0 + s) % m
    if a < b or (not strict and a == b):
        raise ValueError("sample point does not violate the constraint")
    d_gap = a - b + (1 if strict else 0)
    best_h = 0
    best_l = 0
    for pe in (p, p - m):
        for re in (r, r - m):
            best_h = max(best_h, _delta_upper(pe, re, a, b, x0, w, d_gap))
            best_l = max(best_l, _delta_lower(pe, re, a, b, x0, w, d_gap))
    return x0 - best_l, x0 + best_h


# ---------------------------------------------------------------------------
# Equal/one-sided coefficients: table rows plus coefficient reduction
# ---------------------------------------------------------------------------

def _ax_interval_rows(
    a_l: int, a_r: int, qh: int, sh: int, q_sym: Poly, s_sym: Poly, positive: bool, w: int
) -> Union[None, str, tuple[int, int, int, Optional[Poly], Optional[Poly]]]:
    """Forbidden interval for a*x implied by (a_l*x + q <=u a_r*x + s)^sign.

    Returns (a, lo, hi, lo_sym, hi_sym), None when the constraint cannot
    be falsified by any x (no interval), or "full" when every x falsifies
    it under the side conditions.
    """
    one = Poly.constant(w, 1)
    if a_l == a_r:
        a = a_l
        # a*x + q <= a*x + s: falsified iff a*x in [-s ; -q[ (complement when negated)
        if positive:
            if qh == sh:
                return None
            return a, truncate(-sh, w), truncate(-qh, w), -s_sym, -q_sym
        if qh == sh:
            return "full"
        return a, truncate(-qh, w), truncate(-sh, w), -q_sym, -s_sym
    if a_r == 0:
        a = a_l
        # a*x + q <= s: falsified iff a*x in [s - q + 1 ; -q[
        if positive:
            if sh == (1 << w) - 1:
                return None
            return a, truncate(sh - qh + 1, w), truncate(-qh, w), s_sym - q_sym + one, -q_sym
        if sh == (1 << w) - 1:
            return "full"
        return a, truncate(-qh, w), truncate(sh - qh + 1, w), -q_sym, s_sym - q_sym + one
    if a_l == 0:
        a = a_r
        # q <= a*x + s: falsified iff a*x in [-s ; q - s[
        if positive:
            if qh == 0:
                return None
            return a, truncate(-sh, w), truncate(qh - sh, w), -s_sym, q_sym - s_sym
        if qh == 0:
            return "full"
        return a, truncate(qh - sh, w), truncate(-sh, w), q_sym - s_sym, -s_sym
    return None  # genuinely different coefficients: not this family


def _reduce_ax_interval(
    var: int,
    a: int,
    lo: int,
    hi: int,
    lo_sym: Optional[Poly],
    hi_sym: Optional[Poly],
    w: int,
    sample: Optional[int],
    side_eqs: list[tuple[Poly, int]],
) -> Union[None, str, Extraction]:
    """Turn a forbidden interval on a*x into one on x or a low prefix of x."""
    ones = (1 << w) - 1
    if a == 0:
        # the x-term vanished: constraint is violated for every x or none;
        # 0 in [lo;hi[ decides (side conditions pin the vanished coefficient)
        return "full" if contains(WInterval(w, lo, hi), 0) else None
    if a == 1:
        return Extraction(var, w - 1, WInterval(w, lo, hi), lo_sym, hi_sym, side_eqs)
    if a == ones:
        # -x in [lo;hi[  <->  x in [1-hi ; 1-lo[
        return Extraction(
            var,
            w - 1,
            WInterval(w, truncate(1 - hi, w), truncate(1 - lo, w)),
            None if hi_sym is None else 1 - hi_sym,
            None if lo_sym is None else 1 - lo_sym,
            side_eqs,
        )
    k = parity_int(a, w)
    if k > 0:
        # the top k bits of x cannot matter; reduce to the low w-k bits
        wr = w - k
        lo_r = ceil_div(lo, 1 << k) % (1 << wr)
        hi_r = ceil_div(hi, 1 << k) % (1 << wr)
        alpha = a >> k
        if lo_r == hi_r:
            return "full" if contains(WInterval(w, lo, hi), 0) else None
        return _reduce_ax_interval(
            var, alpha, lo_r, hi_r, None, None, wr,
            None if sample is None else sample % (1 << wr),
            side_eqs,
        )
    # odd coefficient other than +-1: sample-driven drift extraction
    if sample is None:
        return None
    m = 1 << w
    # translate the wrapping interval [lo;hi[ to a closed integer band
    if lo < hi:
        band_l, band_h = lo, hi - 1
    else:
        band_l, band_h = lo - m, hi - 1
    ax0 = (a * sample) % m
    if not (band_l <= ax0 - m <= band_h or band_l <= ax0 <= band_h):
        return None  # sample does not violate; nothing to extract here
    xl, xh = from_general_coeff(a, sample, band_l, band_h, m)
    if xl is None or xh is None or xh - xl + 1 >= m:
        return "full"
    return Extraction(var, w - 1, WInterval(w, xl % m, (xh + 1) % m), None, None, side_eqs)


# ---------------------------------------------------------------------------
# Constraint-level driver
# ---------------------------------------------------------------------------

def analyze(
    c: Constraint,
    positive: bool,
    x: int,
    asg: dict[int, int],
    sample: Optional[int] = None,
) -> Union[None, str, Extraction]:
    """Forbidden interval for x implied by the signed constraint under asg.

    Returns an Extraction, "full" when the constraint (under its side
    conditions) excludes every value of x, or None when nothing can be
    extracted (not linear in x, trivially satisfied, or a sample point is
    required but missing/consistent).
    """
    w = c.width
    if c.kind == ULE:
        lhs, rhs = c.args
        lview = lhs.linear_view(x, asg)
        rview = rhs.linear_view(x, asg)
        if lview is None or rview is None:
            return None
        a_l, coeff_l, rest_l = lview
        a_r, coeff_r, rest_r = rview
        if a_l == 0 and a_r == 0:
            return None
        qh = rest_l.eval_value(asg)
        sh = rest_r.eval_value(asg)
        if qh is None or sh is None:
            return None
        side_eqs: list[tuple[Poly, int]] = []
        _pin(side_eqs, coeff_l, a_l)
        _pin(side_eqs, coeff_r, a_r)
        row = _ax_interval_rows(a_l, a_r, qh, sh, rest_l, rest_r, positive, w)
        if row is None and a_l != 0 and a_r != 0 and a_l != a_r:
            # different coefficients on the two sides: sample-driven bounds
            if sample is None:
                return None
            # orient so the violated relation is lhs > rhs (or >= if the
            # asserted constraint was strict)
            if positive:
                p_c, q_c, r_c, s_c, strict = a_l, qh, a_r, sh, False
            else:
                p_c, q_c, r_c, s_c, strict = a_r, sh, a_l, qh, True
            m = 1 << w
            av = (p_c * sample + q_c) % m
            bv = (r_c * sample + s_c) % m
            if av < bv or (not strict and av == bv):
                return None  # sample does not violate
            xl, xh = from_diff_coeffs(p_c, q_c, r_c, s_c, sample, w, strict)
            _pin(side_eqs, rest_l, qh)
            _pin(side_eqs, rest_r, sh)
            if (xh - xl + 1) >= m:
                return "full"
            return Extraction(x, w - 1, WInterval(w, xl % m, (xh + 1) % m), None, None, side_eqs)
        if row is None:
            return None
        if row == "full":
            _pin(side_eqs, rest_l, qh)
            _pin(side_eqs, rest_r, sh)
            return Extraction(x, w - 1, WInterval.full_domain(w), None, None, side_eqs)
        a, lo, hi, lo_sym, hi_sym = row
        if a not in (1, (1 << w) - 1):
            # endpoints must be pinned once the bounds stop being symbolic
            _pin(side_eqs, rest_l, qh)
            _pin(side_eqs, rest_r, sh)
            lo_sym = hi_sym = None
        out = _reduce_ax_interval(x, a, lo, hi, lo_sym, hi_sym, w, sample, side_eqs)
        if out == "full":
            return Extraction(x, w - 1, WInterval.full_domain(w), None, None, side_eqs)
        return out

    if c.kind == OVFL:
        p, q = c.args
        for self_side, other in ((p, q), (q, p)):
            view = self_side.linear_view(x, asg)
            if view is None or view[0] == 0 or x in other.vars():
                continue
            a, coeff, rest = view
            cval = other.eval_value(asg)
            rh = rest.eval_value(asg)
            if cval is None or rh is None:
                continue
            side_eqs = []
            _pin(side_eqs, coeff, a)
            _pin(side_eqs, other, cval)
            m = 1 << w
            if positive:
                # asserted overflow: falsified where t * cval < 2^w
                if cval <= 1:
                    return Extraction(x, w - 1, WInterval.full_domain(w), None, None, side_eqs)
                t_hi = ceil_div(m, cval) % m
                lo, hi = 0, t_hi
                lo_sym: Optional[Poly] = None
                hi_sym: Optional[Poly] = None
                if rest.value() is None:
                    lo_sym = -rest
                    hi_sym = Poly.constant(w, t_hi) - rest
            else:
                # asserted no-overflow: falsified where t * cval >= 2^w
                if cval <= 1:
                    return None
                t_lo = ceil_div(m, cval) % m
                lo, hi = t_lo, 0
                lo_sym = hi_sym = None
                if rest.value() is None:
                    lo_sym = Poly.constant(w, t_lo) - rest
                    hi_sym = -rest
            lo = truncate(lo - rh, w)
            hi = truncate(hi - rh, w)
            if lo == hi:
                return None
            out = _reduce_ax_interval(x, a, lo, hi, lo_sym, hi_sym, w, sample, side_eqs)
            if out == "full":
                return Extraction(x, w - 1, WInterval.full_domain(w), None, None, side_eqs)
            return out
        return None

    return None  # structural constraints carry no interval information


# ---------------------------------------------------------------------------
# Projection onto sub-slices
# ---------------------------------------------------------------------------

BOT = "bot"


def project_high_general(u: int, v: int, ivl: WInterval) -> Optional[WInterval]:
    """Interval for the high u bits of x = y ++ z, no fixed value known.

    Sound only when the interval is long enough to contain a whole aligned
    low-part block (length >= 2^v).
    """
    if ivl.full or (ivl.hi - ivl.lo) % (1 << (u + v)) < (1 << v):
        return None
    l_y = ceil_div(ivl.lo, 1 << v) % (1 << u)
    h_y = ivl.hi >> v
    if l_y == h_y:
        return None
    return WInterval(u, l_y, h_y)


def project_low_general(u: int, v: int, ivl: WInterval) -> Optional[WInterval]:
    """Interval for the low v bits; needs all but a fraction of the domain."""
    if ivl.full:
        return None
    if (ivl.hi - ivl.lo) % (1 << (u + v)) <= (1 << (u + v)) - (1 << v):
        return None
    l_z = ivl.lo % (1 << v)
    h_z = ivl.hi % (1 << v)
    if l_z == h_z:
        return None
    return WInterval(v, l_z, h_z)


def project_high_fixed(u: int, v: int, ivl: WInterval, n: int) -> Union[None, str, WInterval]:
    """Interval for the high part given the low part fixed to n (exact)."""
    total = 1 << (u + v)
    l_y = ceil_div((ivl.lo - n) % total, 1 << v) % (1 << u)
    h_y = ceil_div((ivl.hi - n) % total, 1 << v) % (1 << u)
    if l_y != h_y:
        return WInterval(u, l_y, h_y)
    witness = (h_y * (1 << v) + n) % total
    if ivl.full or contains(ivl, witness):
        return BOT
    return None


def project_low_fixed(u: int, v: int, ivl: WInterval, n: int) -> Union[None, str, WInterval]:
    """Interval for the low part given the high part fixed to n (exact)."""
    l_z = ivl.lo % (1 << v) if (ivl.lo >> v) == n else 0
    h_z = ivl.hi % (1 << v) if (ivl.hi >> v) == n else 0
    if l_z != h_z:
        return WInterval(v, l_z, h_z)
    if ivl.full or contains(ivl, n << v):
        return BOT
    return None


def project_chain(
    chunks: list[tuple[int, int, Optional[int]]],
    ivl: WInterval,
    target_hi: int,
    target_lo: int,
) -> Union[None, str, WInterval]:
    """Project an interval over a composite value onto one of its chunks.

    chunks lists (hi, lo, fixed-or-None) high to low and must cover the
    interval's width exactly; target must be one of the chunks.  Uses the
    fixed-value projections when available and the general ones otherwise;
    returns the final interval, BOT on contradiction, or None when some
    step cannot be projected.
    """
    cur = list(chunks)
    cur_hi, cur_lo = cur[0][0], cur[-1][1]
    assert ivl.width == cur_hi - cur_lo + 1
    while len(cur) > 1:
        if ivl.full:
            return BOT
        hi_chunk = cur[0]
        lo_chunk = cur[-1]
        if target_hi < hi_chunk[0]:
            # strip the highest chunk
            u = hi_chunk[0] - hi_chunk[1] + 1
            v = hi_chunk[1] - cur_lo
            step = (
                project_low_fixed(u, v, ivl, hi_chunk[2])
                if hi_chunk[2] is not None
                else project_low_general(u, v, ivl)
            )
            cur = cur[1:]
            cur_hi = cur[0][0]
        else:
            # strip the lowest chunk
            v = lo_chunk[0] - lo_chunk[1] + 1
            u = cur_hi - lo_chunk[0]
            step = (
                project_high_fixed(u, v, ivl, lo_chunk[2])
                if lo_chunk[2] is not None
                else project_high_general(u, v, ivl)
            )
            cur = cur[:-1]
            cur_lo = cur[-1][1]
        if step is None or step == BOT:
            return step
        ivl = step
    return ivl
