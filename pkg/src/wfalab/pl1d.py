"""Exact piecewise-linear functions of one real variable.

A PL1D is total on the line and affine outside its breakpoint range.  The
representation is canonical: breakpoints are strictly increasing, adjacent
segments with equal slope are merged, and the value is anchored at the first
breakpoint (at 0 for a purely affine function).  Canonical form makes
structural equality coincide with functional equality, which the tests rely
on.

All arithmetic is in fractions.Fraction; crossings and maxima are solved
exactly, never sampled.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from .errors import EmptySetError, UnboundedDifferenceError, WfalabError
from .exact import frac


@dataclass(frozen=True)
class PL1D:
    anchor_x: Fraction
    anchor_value: Fraction
    breakpoints: Tuple[Fraction, ...]
    slopes: Tuple[Fraction, ...]  # one more slope than breakpoints

    def __post_init__(self) -> None:
        if len(self.slopes) != len(self.breakpoints) + 1:
            raise WfalabError("slope count must be breakpoint count + 1")
        for a, b in zip(self.breakpoints, self.breakpoints[1:]):
            if a >= b:
                raise WfalabError("breakpoints must be strictly increasing")

    def __call__(self, s) -> Fraction:
        return evaluate(self, s)


def _eval_raw(anchor_x: Fraction, anchor_value: Fraction,
              bps: Sequence[Fraction], slopes: Sequence[Fraction],
              s: Fraction) -> Fraction:
    """Evaluate a possibly non-canonical representation at s."""
    v = anchor_value
    x = anchor_x
    if s >= x:
        j = bisect_right(bps, x)
        while j < len(bps) and bps[j] <= s:
            v += slopes[j] * (bps[j] - x)
            x = bps[j]
            j += 1
        return v + slopes[j] * (s - x)
    j = bisect_right(bps, x)
    while j > 0 and bps[j - 1] >= s:
        v -= slopes[j] * (x - bps[j - 1])
        x = bps[j - 1]
        j -= 1
    return v - slopes[j] * (x - s)


def _build(anchor_x, anchor_value, bps, slopes) -> PL1D:
    """Canonicalize: merge equal-slope neighbours, re-anchor."""
    kept_bps = []
    kept_slopes = [slopes[0]]
    for i, b in enumerate(bps):
        if slopes[i + 1] != kept_slopes[-1]:
            kept_bps.append(b)
            kept_slopes.append(slopes[i + 1])
    if kept_bps:
        a = kept_bps[0]
    else:
        a = Fraction(0)
    av = _eval_raw(anchor_x, anchor_value, tuple(bps), tuple(slopes), a)
    return PL1D(a, av, tuple(kept_bps), tuple(kept_slopes))


def evaluate(f: PL1D, s) -> Fraction:
    s = frac(s)
    return _eval_raw(f.anchor_x, f.anchor_value, f.breakpoints, f.slopes, s)


def constant(c) -> PL1D:
    return PL1D(Fraction(0), frac(c), (), (Fraction(0),))


def affine(slope, value_at_zero) -> PL1D:
    return PL1D(Fraction(0), frac(value_at_zero), (), (frac(slope),))


def cone(apex, offset, weight) -> PL1D:
    """The vee function offset + weight * |s - apex| with weight > 0."""
    weight = frac(weight)
    if weight <= 0:
        raise WfalabError(f"cone weight must be positive, got {weight}")
    apex = frac(apex)
    return PL1D(apex, frac(offset), (apex,), (-weight, weight))


def cone_envelope(anchors: Iterable[tuple]) -> PL1D:
    """Pointwise min of cones (apex, offset, weight); the lower envelope."""
    anchors = list(anchors)
    if not anchors:
        raise EmptySetError("cone_envelope needs at least one anchor")
    out = cone(*anchors[0])
    for a in anchors[1:]:
        out = pointwise_min(out, cone(*a))
    return out


def _segment_slopes(f: PL1D, pts: Sequence[Fraction]):
    """Slopes of f on the len(pts)+1 segments cut by the merged points pts,
    which must include every breakpoint of f."""
    out = []
    j = 0
    for p in pts:
        out.append(f.slopes[j])
        if j < len(f.breakpoints) and f.breakpoints[j] == p:
            j += 1
    out.append(f.slopes[j])
    return out


def _merged(f: PL1D, g: PL1D):
    pts = sorted(set(f.breakpoints) | set(g.breakpoints))
    return pts, _segment_slopes(f, pts), _segment_slopes(g, pts)


def _slope_at(f: PL1D, x: Fraction) -> Fraction:
    """Slope of the segment containing x (x must not be a breakpoint)."""
    return f.slopes[bisect_right(f.breakpoints, x)]


def _combine(f: PL1D, g: PL1D, sign: int) -> PL1D:
    """f + sign*g without searching for crossings (a linear combination)."""
    pts, fs, gs = _merged(f, g)
    slopes = [a + sign * b for a, b in zip(fs, gs)]
    ref = pts[0] if pts else Fraction(0)
    value = evaluate(f, ref) + sign * evaluate(g, ref)
    return _build(ref, value, pts, slopes)


def add(f: PL1D, g: PL1D) -> PL1D:
    return _combine(f, g, 1)


def sub(f: PL1D, g: PL1D) -> PL1D:
    return _combine(f, g, -1)


def add_const(f: PL1D, c) -> PL1D:
    return PL1D(f.anchor_x, f.anchor_value + frac(c), f.breakpoints, f.slopes)


def pointwise_min(f: PL1D, g: PL1D) -> PL1D:
    """Exact pointwise minimum.

    Candidate breakpoints are the union of both functions' breakpoints plus
    the crossing points of f - g, found by solving each affine segment.
    """
    pts, fs, gs = _merged(f, g)

    if not pts:
        df = f.slopes[0] - g.slopes[0]
        if df == 0:
            return f if f.anchor_value - f.slopes[0] * f.anchor_x <= \
                g.anchor_value - g.slopes[0] * g.anchor_x else g
        x = -(evaluate(f, Fraction(0)) - evaluate(g, Fraction(0))) / df
        left, right = (f, g) if evaluate(f, x - 1) < evaluate(g, x - 1) else (g, f)
        return _build(x, evaluate(f, x), [x], [left.slopes[0], right.slopes[0]])

    diff_at = [evaluate(f, p) - evaluate(g, p) for p in pts]
    crossings = set()
    # leftmost unbounded segment
    ds = fs[0] - gs[0]
    if ds != 0:
        x = pts[0] - diff_at[0] / ds
        if x < pts[0]:
            crossings.add(x)
    # bounded segments
    for k in range(1, len(pts)):
        ds = fs[k] - gs[k]
        if ds != 0:
            x = pts[k - 1] - diff_at[k - 1] / ds
            if pts[k - 1] < x < pts[k]:
                crossings.add(x)
    # rightmost unbounded segment
    ds = fs[-1] - gs[-1]
    if ds != 0:
        x = pts[-1] - diff_at[-1] / ds
        if x > pts[-1]:
            crossings.add(x)

    allpts = sorted(set(pts) | crossings)
    slopes = []
    for k in range(len(allpts) + 1):
        if k == 0:
            probe = allpts[0] - 1
        elif k == len(allpts):
            probe = allpts[-1] + 1
        else:
            probe = (allpts[k - 1] + allpts[k]) / 2
        fv, gv = evaluate(f, probe), evaluate(g, probe)
        slopes.append(_slope_at(f, probe) if fv <= gv else _slope_at(g, probe))
    v0 = min(evaluate(f, allpts[0]), evaluate(g, allpts[0]))
    return _build(allpts[0], v0, allpts, slopes)


def max_difference(f: PL1D, g: PL1D,
                   domain: Optional[tuple] = None) -> Tuple[Fraction, Fraction]:
    """Exact max of f - g and its smallest argmax.

    With domain=None the maximum is over the whole line, which exists only if
    the difference does not grow toward either infinity; otherwise
    UnboundedDifferenceError is raised.  A flat tail attaining the maximum is
    reported at its extreme breakpoint.
    """
    h = sub(f, g)
    if domain is None:
        if h.slopes[0] < 0 or h.slopes[-1] > 0:
            raise UnboundedDifferenceError(
                "difference is unbounded above on the whole line")
        if not h.breakpoints:
            return h.anchor_value, Fraction(0)
        candidates = list(h.breakpoints)
    else:
        lo, hi = frac(domain[0]), frac(domain[1])
        if lo > hi:
            raise WfalabError(f"empty domain [{lo}, {hi}]")
        candidates = [lo] + [b for b in h.breakpoints if lo < b < hi]
        if hi != lo:
            candidates.append(hi)
    best_v = None
    best_x = None
    for x in candidates:
        v = evaluate(h, x)
        if best_v is None or v > best_v:
            best_v, best_x = v, x
    return best_v, best_x
