"""Brute-force oracles, kept deliberately independent of the engine.

The path oracle computes work-function values by minimizing over explicit
serving paths whose serve points run over grid coordinates (a Bellman sweep
over the candidate lists; optimal substructure collapses the enumeration
without changing what is enumerated).  A literal product-of-candidates
enumeration is also provided for very small prefixes so the sweep itself can
be cross-checked.

Dense-grid maximizers for slack quantities sample a fine lattice in float64.
They back tolerance-style comparisons (2^-5 and coarser), far above float
noise; all exact claims are checked elsewhere in rational arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import List, Tuple

import numpy as np

from .errors import SizeGuardError
from .exact import frac
from .metric import IndexPoint, ProductPoint, RealPoint
from .problem import Instance, RequestPoint, grid_after, grid_points_on
from .workfn import WorkFunction, _param_value

MAX_ORACLE_REQUESTS = 6
MAX_ENUMERATION_REQUESTS = 4


def _serve_candidates(instance: Instance, i: int) -> List[List[ProductPoint]]:
    grid = grid_after(instance, i)
    return [list(grid_points_on(grid, r)) for r in instance.requests[:i]]


def _guard(i: int, limit: int, what: str) -> None:
    if i > limit:
        raise SizeGuardError(f"{what} supports at most {limit} requests, got {i}")


def brute_force_work_value(instance: Instance, i: int, s: ProductPoint) -> Fraction:
    """Cheapest path origin -> serve r_1 .. r_i -> s over grid serve points."""
    _guard(i, MAX_ORACLE_REQUESTS, "the path oracle")
    d = instance.distance
    best = {instance.origin: Fraction(0)}
    for cands in _serve_candidates(instance, i):
        best = {p: min(c + d(q, p) for q, c in best.items()) for p in cands}
    return min(c + d(q, s) for q, c in best.items())


def brute_force_path(instance: Instance, i: int,
                     s: ProductPoint) -> Tuple[Fraction, Tuple[ProductPoint, ...]]:
    """Like brute_force_work_value but also returns one optimal serve path."""
    _guard(i, MAX_ORACLE_REQUESTS, "the path oracle")
    d = instance.distance
    best = {instance.origin: (Fraction(0), (instance.origin,))}
    for cands in _serve_candidates(instance, i):
        nxt = {}
        for p in cands:
            cost, path = min(
                ((c + d(q, p), path) for q, (c, path) in best.items()),
                key=lambda t: t[0])
            nxt[p] = (cost, path + (p,))
        best = nxt
    cost, path = min(((c + d(q, s), path) for q, (c, path) in best.items()),
                     key=lambda t: t[0])
    return cost, path[1:]


def enumerate_work_value(instance: Instance, i: int, s: ProductPoint) -> Fraction:
    """Plain product enumeration of serve paths; tiny prefixes only."""
    _guard(i, MAX_ENUMERATION_REQUESTS, "path enumeration")
    d = instance.distance
    best = None
    for path in product(*_serve_candidates(instance, i)):
        at = instance.origin
        cost = Fraction(0)
        for p in path:
            cost += d(at, p)
            at = p
        cost += d(at, s)
        if best is None or cost < best:
            best = cost
    return best


def brute_force_opt(instance: Instance) -> Fraction:
    """Optimal offline cost: cheapest full serving path, ending anywhere."""
    _guard(instance.n, MAX_ORACLE_REQUESTS, "the path oracle")
    d = instance.distance
    best = {instance.origin: Fraction(0)}
    for cands in _serve_candidates(instance, instance.n):
        best = {p: min(c + d(q, p) for q, c in best.items()) for p in cands}
    return min(best.values())


# -- dense float lattices --------------------------------------------------


def _coord_range(points) -> Tuple[Fraction, Fraction]:
    vals = [p.value for p in points]
    return min(vals), max(vals)


def _axis_samples(axis, coords, step: Fraction) -> list:
    """Sample positions along one axis: a lattice for lines, everything for
    finite spaces.  Returned as SpacePoints."""
    if axis.kind == "finite":
        return [IndexPoint(j) for j in range(axis.size)]
    lo, hi = _coord_range(coords)
    count = int((hi - lo) / step) if hi > lo else 0
    return [RealPoint(lo + k * step) for k in range(count + 1)]


def dense_slack_max(wf: WorkFunction, r_next: RequestPoint, lam,
                    step=Fraction(1, 64)) -> float:
    """Float approximation of the extended cost by dense sampling of the
    previous request's lines (the origin before the first request)."""
    lam = float(_param_value(lam))
    inst = wf.instance
    if wf.i == 0:
        lines = [[inst.origin]]
    else:
        ax, ay = inst._axes
        step = frac(step)
        r_prev = wf.last_request
        ys = _axis_samples(ay, list(wf.grid.ys), step)
        xs = _axis_samples(ax, list(wf.grid.xs), step)
        lines = [[ProductPoint(r_prev.x, y) for y in ys],
                 [ProductPoint(x, r_prev.y) for x in xs]]
    best = -np.inf
    for line in lines:
        for s in line:
            cands = wf._line_candidates(s, r_next)
            w_s = float(wf.evaluate(s))
            v = min(float(wf.evaluate(t)) + lam * float(inst.distance(t, s))
                    for t in cands) - w_s
            if v > best:
                best = v
    return best


def _region_axis_samples(region, axis, coord, step: Fraction) -> list:
    """Sample points of one axis that cover the region's extent there.

    The extent is re-derived from the region's definition: a box spans the
    coordinates of its two corners, a product of spheres reaches eta times
    the center distance from the first point (scale weights cancel on a
    line).  Finite axes are enumerated outright.
    """
    from .potential import Boks

    if axis.kind == "finite":
        return [IndexPoint(j) for j in range(axis.size)]
    c1 = coord(region.s1).value
    c2 = coord(region.s2).value
    if isinstance(region, Boks):
        lo, hi = min(c1, c2), max(c1, c2)
    else:
        r = region.eta * abs(c1 - c2)
        lo, hi = c1 - r, c1 + r
    count = int((hi - lo) / step) if hi > lo else 0
    return [RealPoint(lo + k * step) for k in range(count + 1)]


def dense_region_slack(wf: WorkFunction, s3: ProductPoint, region, param,
                       step=Fraction(1, 64)) -> float:
    """Float approximation of region slack by sampling the region."""
    from .potential import region_membership

    p = float(_param_value(param))
    inst = wf.instance
    ax, ay = inst._axes
    step = frac(step)
    xs = _region_axis_samples(region, ax, lambda s: s.x, step)
    ys = _region_axis_samples(region, ay, lambda s: s.y, step)
    best = np.inf
    w_s3 = float(wf.evaluate(s3))
    for x in xs:
        for y in ys:
            t = ProductPoint(x, y)
            if not region_membership(region, t, instance=inst):
                continue
            v = float(wf.evaluate(t)) + p * float(inst.distance(t, s3)) - w_s3
            if v < best:
                best = v
    return best
