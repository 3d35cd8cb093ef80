"""The work function: exact maintenance, slack, domination, extended cost.

W after a request sequence maps each configuration s to the cheapest way of
starting at the origin, serving every request in order, and ending at s.  The
engine keeps W's values on the coordinate grid; every configuration is
dominated by a grid point on the last request's lines, so evaluation anywhere
is an exact minimum over those anchor points.

Internally values are stored as numpy int64 at a fixed per-instance scale
(the lcm of all coordinate and weight denominators), which keeps the update
exact while letting it vectorize.  The public API only speaks Fraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Optional, Tuple, Union

import numpy as np

from . import metric, pl1d
from .errors import (ConfigError, EmptySetError, RequestIndexError,
                     SpaceMismatchError, WfalabError)
from .exact import common_denominator, frac, scaled_int
from .metric import (IndexPoint, ProductPoint, RealPoint, ResolvedAxis,
                     SpacePoint, point_key, product_key)
from .problem import Grid, Instance, RequestPoint, grid_after, grid_points_on


@dataclass(frozen=True)
class SlackParam:
    """A slack coefficient, tagged with which role it plays."""

    kind: str
    value: Fraction

    def __post_init__(self) -> None:
        if self.kind not in ("lambda", "mu"):
            raise ConfigError(f"slack parameter kind must be lambda or mu, got {self.kind!r}")
        object.__setattr__(self, "value", frac(self.value))
        if not (0 < self.value < 1):
            raise ConfigError(f"slack parameter must lie in (0, 1), got {self.value}")

    @classmethod
    def lam(cls, value) -> "SlackParam":
        return cls("lambda", value)

    @classmethod
    def mu(cls, value) -> "SlackParam":
        return cls("mu", value)


def _param_value(param) -> Fraction:
    if isinstance(param, SlackParam):
        return param.value
    value = frac(param)
    if not (0 < value <= 1):
        raise ConfigError(f"slack coefficient must lie in (0, 1], got {value}")
    return value


@lru_cache(maxsize=None)
def instance_scale(instance: Instance) -> int:
    """Common denominator of every distance the instance can produce."""
    parts = []
    for axis_idx, resolved in enumerate(instance._axes):
        if resolved.kind == "line":
            coords = [instance.origin.x if axis_idx == 0 else instance.origin.y]
            for r in instance.requests:
                coords.append(r.x if axis_idx == 0 else r.y)
            parts.extend(resolved.weight * c.value for c in coords)
        else:
            for row in resolved.matrix:
                parts.extend(resolved.weight * e for e in row)
    return common_denominator(parts)


class _AxisKit:
    """Scaled-integer positions and distances for one component space."""

    def __init__(self, resolved: ResolvedAxis, scale: int):
        self.kind = resolved.kind
        self.weight = resolved.weight
        self.scale = scale
        if self.kind == "finite":
            self.D = np.array(
                [[scaled_int(self.weight * e, scale) for e in row]
                 for row in resolved.matrix],
                dtype=np.int64)

    def pos(self, points: Iterable[SpacePoint]) -> np.ndarray:
        if self.kind == "line":
            return np.array(
                [scaled_int(p.value * self.weight, self.scale) for p in points],
                dtype=np.int64)
        return np.array([p.index for p in points], dtype=np.int64)

    def dists(self, apos: np.ndarray, bpos: np.ndarray) -> np.ndarray:
        if self.kind == "line":
            return np.abs(apos[:, None] - bpos[None, :])
        return self.D[np.ix_(apos, bpos)]


@lru_cache(maxsize=None)
def _kits(instance: Instance) -> tuple:
    scale = instance_scale(instance)
    ax, ay = instance._axes
    return _AxisKit(ax, scale), _AxisKit(ay, scale)


@dataclass(frozen=True, eq=False)
class WorkFunction:
    instance: Instance
    i: int
    grid: Grid
    last_request: Optional[RequestPoint]
    vals: np.ndarray = field(repr=False)
    scale: int = 1

    # -- derived structure -------------------------------------------------

    @cached_property
    def _xi(self) -> dict:
        return {p: k for k, p in enumerate(self.grid.xs)}

    @cached_property
    def _yi(self) -> dict:
        return {p: k for k, p in enumerate(self.grid.ys)}

    @cached_property
    def values(self) -> dict:
        """All grid values as exact Fractions."""
        out = {}
        for xi, x in enumerate(self.grid.xs):
            for yi, y in enumerate(self.grid.ys):
                out[ProductPoint(x, y)] = Fraction(int(self.vals[xi, yi]), self.scale)
        return out

    @cached_property
    def anchor_points(self) -> Tuple[ProductPoint, ...]:
        """Undominated grid points on the last request's lines.

        Every configuration is dominated by one of them, so minimizing over
        this support evaluates W anywhere.  Points dominated by another
        anchor are pruned: they can never realize a strict minimum.
        """
        if self.last_request is None:
            return (self.instance.origin,)
        pts = grid_points_on(self.grid, self.last_request)
        kx, ky = _kits(self.instance)
        apx = kx.pos([p.x for p in pts])
        apy = ky.pos([p.y for p in pts])
        av = np.array([int(self.vals[self._xi[p.x], self._yi[p.y]])
                       for p in pts], dtype=np.int64)
        pair = av[:, None] + kx.dists(apx, apx) + ky.dists(apy, apy)
        dominated = pair <= av[None, :]
        np.fill_diagonal(dominated, False)
        keep = ~dominated.any(axis=0)
        return tuple(p for p, k in zip(pts, keep) if k)

    @cached_property
    def anchors(self) -> Tuple[tuple, ...]:
        return tuple((p, self.value_at(p)) for p in self.anchor_points)

    @cached_property
    def _anchor_arrays(self) -> tuple:
        kx, ky = _kits(self.instance)
        pts = self.anchor_points
        apx = kx.pos([p.x for p in pts])
        apy = ky.pos([p.y for p in pts])
        av = np.array([int(self.vals[self._xi[p.x], self._yi[p.y]]) for p in pts],
                      dtype=np.int64)
        return apx, apy, av

    # -- evaluation --------------------------------------------------------

    def value_at(self, g: ProductPoint) -> Fraction:
        try:
            return Fraction(int(self.vals[self._xi[g.x], self._yi[g.y]]), self.scale)
        except KeyError:
            raise WfalabError(f"{g} is not a grid point") from None

    def evaluate(self, s: ProductPoint) -> Fraction:
        """W at an arbitrary configuration, via the dominating anchors."""
        xi = self._xi.get(s.x)
        if xi is not None:
            yi = self._yi.get(s.y)
            if yi is not None:
                return Fraction(int(self.vals[xi, yi]), self.scale)
        inst = self.instance
        best = None
        for p, v in self.anchors:
            c = v + inst.distance(p, s)
            if best is None or c < best:
                best = c
        return best

    def opt_cost(self) -> Fraction:
        """min over all configurations of W; the offline optimum so far."""
        return Fraction(int(self.vals.min()), self.scale)

    def dominates(self, t: ProductPoint, s: ProductPoint) -> bool:
        """True when W(s) = W(t) + d(t, s)."""
        return self.evaluate(s) == self.evaluate(t) + self.instance.distance(t, s)

    # -- update ------------------------------------------------------------

    def update(self, r: RequestPoint) -> "WorkFunction":
        inst = self.instance
        if self.i >= inst.n or inst.requests[self.i] != r:
            raise RequestIndexError(
                f"request {r} is not request #{self.i} of the instance")
        new_grid = grid_after(inst, self.i + 1)
        cands = grid_points_on(new_grid, r)
        kx, ky = _kits(inst)
        apx, apy, av = self._anchor_arrays
        cpx = kx.pos([c.x for c in cands])
        cpy = ky.pos([c.y for c in cands])
        cand_w = (av[:, None] + kx.dists(apx, cpx) + ky.dists(apy, cpy)).min(axis=0)
        gx = kx.pos(new_grid.xs)
        gy = ky.pos(new_grid.ys)
        dx = kx.dists(cpx, gx)
        dy = ky.dists(cpy, gy)
        vals = (cand_w[:, None, None] + dx[:, :, None] + dy[:, None, :]).min(axis=0)
        if int(vals.max()) >= 2 ** 62:
            raise WfalabError("work-function values overflow the integer kernel")
        return WorkFunction(inst, self.i + 1, new_grid, r, vals, self.scale)

    # -- slack -------------------------------------------------------------

    def _line_candidates(self, s: ProductPoint, r: RequestPoint) -> list:
        """Points where min over r's lines of W(t) + p*d(t, s) can be attained."""
        ax, ay = self.instance._axes
        out = []
        if ay.kind == "finite":
            out.extend(ProductPoint(r.x, IndexPoint(j)) for j in range(ay.size))
        else:
            out.extend(ProductPoint(r.x, y) for y in self.grid.ys)
            out.append(ProductPoint(r.x, s.y))
        if ax.kind == "finite":
            out.extend(ProductPoint(IndexPoint(j), r.y) for j in range(ax.size))
        else:
            out.extend(ProductPoint(x, r.y) for x in self.grid.xs)
            out.append(ProductPoint(s.x, r.y))
        seen = set()
        uniq = []
        for p in out:
            if p not in seen:
                seen.add(p)
                uniq.append(p)
        return uniq

    def slack(self, s: ProductPoint, C, param) -> Fraction:
        """min over t in C of W(t) + p*d(t, s), minus W(s).

        C may be a single point, a finite iterable of points, a request
        (meaning both its lines), or a region from the potential module.
        """
        p = _param_value(param)
        if isinstance(C, ProductPoint):
            pts = [C]
        elif isinstance(C, RequestPoint):
            pts = self._line_candidates(s, C)
        else:
            from .potential import Boks, Spheres, region_slack  # avoids a cycle

            if isinstance(C, (Boks, Spheres)):
                return region_slack(self, s, C, param)
            pts = list(C)
        if not pts:
            raise EmptySetError("slack needs a non-empty comparison set")
        inst = self.instance
        best = min(self.evaluate(t) + p * inst.distance(t, s) for t in pts)
        return best - self.evaluate(s)

    # -- extended cost -----------------------------------------------------

    def extended_cost(self, r_next: RequestPoint, lam) -> tuple:
        """max over all configurations of the slack against r_next's lines.

        Every configuration is dominated by a point of the last request's
        lines and slack only grows along dominations, so the outer maximum is
        taken there (over the origin alone before the first request).
        Returns (value, witness); tie on value picks the lexicographically
        smallest witness.
        """
        lam = _param_value(lam)
        if self.i == 0:
            o = self.instance.origin
            return self.slack(o, r_next, lam), o
        best = None
        witness = None
        for fixed in ("x", "y"):
            v, w = self._line_max(fixed, r_next, lam)
            if best is None or v > best or (v == best and product_key(w) < product_key(witness)):
                best, witness = v, w
        return best, witness

    def _line_max(self, fixed: str, r_next: RequestPoint, lam: Fraction) -> tuple:
        """Maximize s -> slack(s; r_next) over one line of the last request."""
        inst = self.instance
        ax, ay = inst._axes
        r_prev = self.last_request
        varying = ay if fixed == "x" else ax

        if varying.kind == "finite":
            best = None
            witness = None
            for j in range(varying.size):
                s = (ProductPoint(r_prev.x, IndexPoint(j)) if fixed == "x"
                     else ProductPoint(IndexPoint(j), r_prev.y))
                v = self.slack(s, r_next, lam)
                if best is None or v > best:
                    best, witness = v, s
            return best, witness

        # Continuous case: build exact piecewise-linear functions of the free
        # coordinate and maximize their difference.
        w_var = varying.weight
        if fixed == "x":
            fix_prev, fix_next = r_prev.x, r_next.x
            var_next = r_next.y
            d_fix = inst.distance_x
            d_var = inst.distance_y
            a_fix = lambda p: p.x
            a_var = lambda p: p.y
        else:
            fix_prev, fix_next = r_prev.y, r_next.y
            var_next = r_next.x
            d_fix = inst.distance_y
            d_var = inst.distance_x
            a_fix = lambda p: p.y
            a_var = lambda p: p.x

        w_restr = pl1d.cone_envelope(
            (a_var(p).value, v + d_fix(a_fix(p), fix_prev), w_var)
            for p, v in self.anchors)
        shift = lam * d_fix(fix_next, fix_prev)
        inner_same = pl1d.cone_envelope(
            (a_var(p).value, v + d_fix(a_fix(p), fix_next) + shift, lam * w_var)
            for p, v in self.anchors)
        k_cross = min(v + d_var(a_var(p), var_next) + lam * d_fix(a_fix(p), fix_prev)
                      for p, v in self.anchors)
        inner_cross = pl1d.cone(var_next.value, k_cross, lam * w_var)
        inner = pl1d.pointwise_min(inner_same, inner_cross)
        value, arg = pl1d.max_difference(inner, w_restr, None)
        s = (ProductPoint(fix_prev, RealPoint(arg)) if fixed == "x"
             else ProductPoint(RealPoint(arg), fix_prev))
        return value, s

    # -- reporting ---------------------------------------------------------

    def snapshot(self) -> dict:
        """JSON-ready dump of the grid and its values."""
        return {
            "index": self.i,
            "xs": [metric.point_to_json(p) for p in self.grid.xs],
            "ys": [metric.point_to_json(p) for p in self.grid.ys],
            "values": [
                [metric.point_to_json(x), metric.point_to_json(y),
                 str(Fraction(int(self.vals[xi, yi]), self.scale))]
                for xi, x in enumerate(self.grid.xs)
                for yi, y in enumerate(self.grid.ys)
            ],
        }


def initial(instance: Instance) -> WorkFunction:
    """W of the empty sequence: distance from the origin."""
    grid = grid_after(instance, 0)
    vals = np.zeros((len(grid.xs), len(grid.ys)), dtype=np.int64)
    return WorkFunction(instance, 0, grid, None, vals, instance_scale(instance))


def update(wf: WorkFunction, r: RequestPoint) -> WorkFunction:
    return wf.update(r)


def evaluate(wf: WorkFunction, s: ProductPoint) -> Fraction:
    return wf.evaluate(s)
