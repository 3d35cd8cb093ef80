"""Potential-function machinery and the per-step lemma verification suite.

Three layered functions over configuration pairs and triples drive the
amortized analysis.  H couples two configurations through the work function
and their distance; F subtracts a slack term for a third configuration
against the pair; G replaces the pair by a region around it (an axis-aligned
box on the plane, a product of metric balls in general spaces).  The
potential is a weighted mix of the exact minima of F and G over triples.

verify_step recomputes, in exact rational arithmetic, every inequality the
amortized argument relies on for one request transition and reports the
margins.  There is no tolerance knob: a failed check means the engine and
the mathematics disagree somewhere.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np

from .errors import AuditError, ConfigError, RegionSpaceError, WfalabError
from .exact import common_denominator, frac, scaled_int
from .metric import IndexPoint, ProductPoint, RealPoint, product_key
from .problem import Instance, RequestPoint, grid_points_on, serves
from .workfn import WorkFunction, _AxisKit, _param_value, initial

HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# Configurations


@dataclass(frozen=True)
class CnnPotential:
    """Plane-variant constants: one slack coefficient and the F/G mix."""

    lam: Fraction
    alpha: Fraction
    gamma: Fraction

    variant = "cnn"

    def __post_init__(self) -> None:
        for name in ("lam", "alpha", "gamma"):
            object.__setattr__(self, name, frac(getattr(self, name)))
        if not (0 < self.lam < 1):
            raise ConfigError(f"lambda must lie in (0, 1), got {self.lam}")
        if not (0 < self.alpha < HALF):
            raise ConfigError(f"alpha must lie in (0, 1/2), got {self.alpha}")
        if self.alpha > (1 - self.lam) / (12 + 4 * self.lam):
            raise ConfigError(
                f"alpha={self.alpha} exceeds (1-lambda)/(12+4*lambda)")
        if self.alpha >= (1 - self.lam) / (2 * (1 + self.lam)):
            raise ConfigError(
                f"alpha={self.alpha} must stay below (1-lambda)/(2+2*lambda)")
        if not (0 < self.gamma < 1):
            raise ConfigError(f"gamma must lie in (0, 1), got {self.gamma}")

    @property
    def coeff(self) -> Fraction:
        return self.alpha

    @property
    def weight(self) -> Fraction:
        return self.gamma

    @property
    def pair_param(self) -> Fraction:
        return self.lam

    @property
    def triple_param(self) -> Fraction:
        return self.lam

    def region(self, s1: ProductPoint, s2: ProductPoint) -> "Boks":
        return Boks(s1, s2)

    def constants(self) -> dict:
        lam, a = self.lam, self.alpha
        c1 = a
        c2 = a * (1 - lam)
        c3 = min(a,
                 a * (1 - lam) / (1 + lam),
                 (HALF * (1 - lam) - a * (3 + lam)) / (1 + lam))
        c4 = 2 + 2 * a * (1 + lam) + c3 * (1 + lam)
        c5 = min((1 - self.gamma) * c1, self.gamma * c3)
        return {"c1": c1, "c2": c2, "c3": c3, "c4": c4, "c5": c5}

    def dominate_bounds(self) -> dict:
        """Per-slot lower-bound coefficients for replacing a dominated point."""
        outer = self.alpha * (1 - self.lam)
        inner = HALF * (1 - self.lam) - self.alpha * (1 + self.lam)
        return {"a": outer, "b": inner, "c": inner,
                "d": outer, "e": inner, "f": inner}


@dataclass(frozen=True)
class GeneralPotential:
    """Arbitrary-space constants: dual slack parameters and ball regions."""

    lam: Fraction
    mu: Fraction
    eta: Fraction
    beta: Fraction
    kappa: Fraction

    variant = "general"

    def __post_init__(self) -> None:
        for name in ("lam", "mu", "eta", "beta", "kappa"):
            object.__setattr__(self, name, frac(getattr(self, name)))
        if not (0 < self.lam < self.mu < 1):
            raise ConfigError(
                f"need 0 < lambda < mu < 1, got lambda={self.lam}, mu={self.mu}")
        if self.eta < 1:
            raise ConfigError(f"eta must be at least 1, got {self.eta}")
        if self.eta * (self.mu - self.lam) < 1 + self.mu:
            raise ConfigError(
                f"eta={self.eta} too small: need eta*(mu-lambda) >= 1+mu")
        if not (0 < self.beta < HALF):
            raise ConfigError(f"beta must lie in (0, 1/2), got {self.beta}")
        if not (0 < self.kappa < 1):
            raise ConfigError(f"kappa must lie in (0, 1), got {self.kappa}")
        if min(self.dominate_bounds().values()) <= 0:
            raise ConfigError(
                f"beta={self.beta} too large: a replacement bound is not positive")
        if self.constants()["c3"] <= 0:
            raise ConfigError(f"beta={self.beta} too large for a positive c3")

    @property
    def coeff(self) -> Fraction:
        return self.beta

    @property
    def weight(self) -> Fraction:
        return self.kappa

    @property
    def pair_param(self) -> Fraction:
        return self.mu

    @property
    def triple_param(self) -> Fraction:
        return self.lam

    def region(self, s1: ProductPoint, s2: ProductPoint) -> "Spheres":
        return Spheres(s1, s2, self.eta)

    def constants(self) -> dict:
        lam, mu, eta, b = self.lam, self.mu, self.eta, self.beta
        c1 = b
        c2 = min(self.dominate_bounds().values())
        c3 = min(b,
                 b * (1 - lam) / (1 + lam),
                 (HALF * (1 - mu) - (eta + 1) * b * (1 + lam) - 2 * b) / (1 + lam))
        c4 = 2 + 2 * b * (1 + lam) + c3 * (1 + lam)
        c5 = min((1 - self.kappa) * c1, self.kappa * c3)
        return {"c1": c1, "c2": c2, "c3": c3, "c4": c4, "c5": c5}

    def dominate_bounds(self) -> dict:
        lam, mu, eta, b = self.lam, self.mu, self.eta, self.beta
        outer = b * (1 - lam)
        inner = HALF * (1 - mu) - b * (1 + lam)
        return {"a": outer,
                "b": inner,
                "c": inner,
                "d": outer,
                "e": HALF * (1 - mu) - eta * b * (1 + lam),
                "f": HALF * (1 - mu) - (eta + 1) * b * (1 + lam)}


PotentialConfig = Union[CnnPotential, GeneralPotential]


def default_constants(lam, variant: str = "cnn") -> PotentialConfig:
    """Constants derived from lambda alone, with the F/G mix balanced so the
    minor-axis terms cancel in the potential-increase bound."""
    lam = frac(lam)
    if not (0 < lam < 1):
        raise ConfigError(f"lambda must lie in (0, 1), got {lam}")
    if variant == "cnn":
        alpha = (1 - lam) / (12 + 4 * lam)
        draft = CnnPotential(lam, alpha, HALF)
        c = draft.constants()
        return dataclasses.replace(draft, gamma=c["c2"] / (c["c2"] + c["c4"]))
    if variant == "general":
        mu = (1 + lam) / 2
        eta = Fraction(math.ceil((1 + mu) / (mu - lam)) + 1)
        cap = min((1 - mu) / (2 * (1 + lam)),
                  (1 - mu) / (2 * eta * (1 + lam)),
                  (1 - mu) / (2 * (eta + 1) * (1 + lam)),
                  HALF)
        draft = GeneralPotential(lam, mu, eta, cap / 2, HALF)
        c = draft.constants()
        return dataclasses.replace(draft, kappa=c["c2"] / (c["c2"] + c["c4"]))
    raise ConfigError(f"unknown potential variant {variant!r}")


def config_to_json(cfg: PotentialConfig) -> dict:
    if isinstance(cfg, CnnPotential):
        return {"variant": "cnn", "lambda": str(cfg.lam),
                "alpha": str(cfg.alpha), "gamma": str(cfg.gamma)}
    return {"variant": "general", "lambda": str(cfg.lam), "mu": str(cfg.mu),
            "eta": str(cfg.eta), "beta": str(cfg.beta), "kappa": str(cfg.kappa)}


def config_from_json(raw: dict) -> PotentialConfig:
    try:
        variant = raw.get("variant", "cnn")
        if variant == "cnn":
            return CnnPotential(frac(raw["lambda"]), frac(raw["alpha"]),
                                frac(raw["gamma"]))
        if variant == "general":
            return GeneralPotential(frac(raw["lambda"]), frac(raw["mu"]),
                                    frac(raw["eta"]), frac(raw["beta"]),
                                    frac(raw["kappa"]))
    except KeyError as exc:
        raise ConfigError(f"potential config is missing field {exc}") from None
    raise ConfigError(f"unknown potential variant {variant!r}")


# ---------------------------------------------------------------------------
# Regions


@dataclass(frozen=True)
class Boks:
    """Axis-aligned rectangle spanned by two plane configurations."""

    s1: ProductPoint
    s2: ProductPoint


@dataclass(frozen=True)
class Spheres:
    """Product of per-axis balls centered at s1, radii eta times the
    component distances to s2."""

    s1: ProductPoint
    s2: ProductPoint
    eta: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "eta", frac(self.eta))
        if self.eta < 0:
            raise ConfigError(f"eta must be nonnegative, got {self.eta}")


Region = Union[Boks, Spheres]


def _interval_coords(a, b) -> tuple:
    if not (isinstance(a, RealPoint) and isinstance(b, RealPoint)):
        raise RegionSpaceError("box regions are only defined over line components")
    return (a.value, b.value) if a.value <= b.value else (b.value, a.value)


def region_membership(region: Region, t: ProductPoint,
                      instance: Optional[Instance] = None) -> bool:
    """Exact membership test; finite-axis ball tests need the instance for
    the distance table."""
    if isinstance(region, Boks):
        lo, hi = _interval_coords(region.s1.x, region.s2.x)
        if not (isinstance(t.x, RealPoint) and lo <= t.x.value <= hi):
            return False
        lo, hi = _interval_coords(region.s1.y, region.s2.y)
        return isinstance(t.y, RealPoint) and lo <= t.y.value <= hi
    if isinstance(region, Spheres):
        return (_in_ball(region.s1.x, region.s2.x, t.x, region.eta, instance, 0)
                and _in_ball(region.s1.y, region.s2.y, t.y, region.eta, instance, 1))
    raise RegionSpaceError(f"unknown region {region!r}")


def _in_ball(center, other, t, eta, instance, axis) -> bool:
    if isinstance(center, RealPoint) and isinstance(other, RealPoint):
        if not isinstance(t, RealPoint):
            return False
        return abs(t.value - center.value) <= eta * abs(center.value - other.value)
    if instance is None:
        raise RegionSpaceError(
            "ball membership on a finite component needs the instance")
    table = instance._axes[axis].matrix
    if table is None or not isinstance(t, IndexPoint):
        raise RegionSpaceError("point kind does not match the component space")
    return table[center.index][t.index] <= eta * table[center.index][other.index]


def _axis_constraint(region: Region, axis: int, resolved) -> tuple:
    """The region's footprint on one axis: an interval or an index set."""
    a = region.s1.x if axis == 0 else region.s1.y
    b = region.s2.x if axis == 0 else region.s2.y
    if isinstance(region, Boks):
        if resolved.kind != "line":
            raise RegionSpaceError("box regions are only defined over line components")
        lo, hi = _interval_coords(a, b)
        return ("interval", lo, hi)
    if resolved.kind == "line":
        rad = region.eta * abs(a.value - b.value)
        return ("interval", a.value - rad, a.value + rad)
    table = resolved.matrix
    limit = region.eta * table[a.index][b.index]
    return ("set", tuple(j for j in range(resolved.size)
                         if table[a.index][j] <= limit))


def _axis_min_cost(resolved, cons, g, s, p: Fraction) -> Fraction:
    """min over t in the constraint of d(g, t) + p*d(t, s) on one axis.

    On a line the constrained minimum sits at the clamped coordinate of one
    endpoint; finite components are enumerated.
    """
    w = resolved.weight
    if cons[0] == "interval":
        lo, hi = cons[1], cons[2]
        best = None
        for raw in (g.value, s.value):
            t = min(max(raw, lo), hi)
            c = w * abs(g.value - t) + p * w * abs(t - s.value)
            if best is None or c < best:
                best = c
        return best
    table = resolved.matrix
    return min(w * table[g.index][j] + p * w * table[j][s.index]
               for j in cons[1])


def region_slack(wf: WorkFunction, s3: ProductPoint, region: Region,
                 param) -> Fraction:
    """min over t in the region of W(t) + p*d(t, s3), minus W(s3).

    W(t) itself is a minimum over the work function's anchors, so the joint
    minimization runs per anchor with per-axis clamped candidates.
    """
    p = _param_value(param)
    ax, ay = wf.instance._axes
    cons_x = _axis_constraint(region, 0, ax)
    cons_y = _axis_constraint(region, 1, ay)
    best = None
    for g, v in wf.anchors:
        tot = (v + _axis_min_cost(ax, cons_x, g.x, s3.x, p)
               + _axis_min_cost(ay, cons_y, g.y, s3.y, p))
        if best is None or tot < best:
            best = tot
    return best - wf.evaluate(s3)


# ---------------------------------------------------------------------------
# H, F, G


def h_value(wf: WorkFunction, s1: ProductPoint, s2: ProductPoint,
            param) -> Fraction:
    """Half the sum of the work-function values minus half the scaled
    distance; equivalently W(s1) minus half the slack of s2 against s1."""
    p = _param_value(param)
    w1, w2 = wf.evaluate(s1), wf.evaluate(s2)
    closed = HALF * (w1 + w2) - p / 2 * wf.instance.distance(s1, s2)
    assert closed == w1 - HALF * wf.slack(s2, s1, p)
    return closed


def f_value(wf: WorkFunction, s1: ProductPoint, s2: ProductPoint,
            s3: ProductPoint, cfg: PotentialConfig) -> Fraction:
    return (h_value(wf, s1, s2, cfg.pair_param)
            - cfg.coeff * wf.slack(s3, (s1, s2), cfg.triple_param))


def g_value(wf: WorkFunction, s1: ProductPoint, s2: ProductPoint,
            s3: ProductPoint, cfg: PotentialConfig) -> Fraction:
    sl = region_slack(wf, s3, cfg.region(s1, s2), cfg.triple_param)
    return h_value(wf, s1, s2, cfg.pair_param) - cfg.coeff * sl


# ---------------------------------------------------------------------------
# Exact triple minimization


def _wval(wf: WorkFunction, p: ProductPoint) -> Fraction:
    try:
        return wf.value_at(p)
    except WfalabError:
        return wf.evaluate(p)


def _candidates(wf: WorkFunction) -> tuple:
    """Triple-minimization candidates: every point of the last request's two
    lines with coordinates from the grid (full enumeration on finite axes)."""
    if wf.last_request is None:
        return (wf.instance.origin,)
    pts = grid_points_on(wf.grid, wf.last_request, wf.instance.space_x,
                         wf.instance.space_y, full_lines=True)
    return tuple(sorted(set(pts), key=product_key))


def _kernel_scale(wf: WorkFunction, cands: tuple) -> int:
    ax, ay = wf.instance._axes
    parts = [Fraction(1, wf.scale)]
    for p in list(cands) + [g for g, _ in wf.anchors]:
        if ax.kind == "line":
            parts.append(p.x.value * ax.weight)
        if ay.kind == "line":
            parts.append(p.y.value * ay.weight)
        parts.append(_wval(wf, p))
    return common_denominator(parts)


class _Frame:
    """Integer tables shared by the triple-minimization kernels.

    Everything is scaled to a common denominator so the inner loops run on
    int64 arrays; results convert back to Fraction at the end.
    """

    def __init__(self, wf: WorkFunction, cands: tuple):
        self.wf = wf
        self.cands = cands
        self.scale = _kernel_scale(wf, cands)
        ax, ay = wf.instance._axes
        self.ax, self.ay = ax, ay
        self.kx = _AxisKit(ax, self.scale)
        self.ky = _AxisKit(ay, self.scale)
        self.X = self.kx.pos([c.x for c in cands])
        self.Y = self.ky.pos([c.y for c in cands])
        self.W = np.array([scaled_int(_wval(wf, c), self.scale) for c in cands],
                          dtype=np.int64)
        self.D = self.kx.dists(self.X, self.X) + self.ky.dists(self.Y, self.Y)
        anchors = wf.anchors
        self.GX = self.kx.pos([g.x for g, _ in anchors])
        self.GY = self.ky.pos([g.y for g, _ in anchors])
        self.GW = np.array([scaled_int(v, self.scale) for _, v in anchors],
                           dtype=np.int64)

    def h_table(self, pair_param: Fraction) -> tuple:
        pn, pd = pair_param.numerator, pair_param.denominator
        return (self.W[:, None] + self.W[None, :]) * pd - pn * self.D, pd


def _min_f_frame(fr: _Frame, cfg: PotentialConfig) -> tuple:
    k = len(fr.cands)
    ln, ld = cfg.triple_param.numerator, cfg.triple_param.denominator
    cn, cd = cfg.coeff.numerator, cfg.coeff.denominator
    HT, pd = fr.h_table(cfg.pair_param)
    # SLT[i, m]: slack of candidate m against candidate i alone.
    SLT = (fr.W[:, None] - fr.W[None, :]) * ld + ln * fr.D
    M = np.minimum(SLT[:, None, :], SLT[None, :, :])
    MT = M.max(axis=2)
    AM = M.argmax(axis=2)
    FT = HT * (ld * cd) - cn * (2 * pd) * MT
    flat = int(np.argmin(FT))
    i, j = divmod(flat, k)
    value = Fraction(int(FT[i, j]), 2 * fr.scale * pd * ld * cd)
    return value, (fr.cands[i], fr.cands[j], fr.cands[int(AM[i, j])])


def _axis_pair_cost(kit: _AxisKit, resolved, C: np.ndarray, G: np.ndarray,
                    ln: int, ld: int, en: int, ed: int, boks: bool):
    """Per-pair cost tables for the region kernel on one axis.

    The returned closure maps a candidate pair (i, j) to an (anchors x
    candidates) array: the minimum of d(g, t) + lambda*d(t, m) over t in the
    region's footprint, at scale frame*ed*ld.
    """
    if resolved.kind == "line":
        Cq = C * ed
        Gq = G * ed

        def cost(i: int, j: int) -> np.ndarray:
            if boks:
                lo = int(min(Cq[i], Cq[j]))
                hi = int(max(Cq[i], Cq[j]))
            else:
                rad = en * abs(int(C[i]) - int(C[j]))
                lo = int(Cq[i]) - rad
                hi = int(Cq[i]) + rad
            clg = np.clip(Gq, lo, hi)
            clm = np.clip(Cq, lo, hi)
            a1 = (np.abs(Gq - clg) * ld)[:, None] + ln * np.abs(clg[:, None] - Cq[None, :])
            a2 = np.abs(Gq[:, None] - clm[None, :]) * ld + (ln * np.abs(clm - Cq))[None, :]
            return np.minimum(a1, a2)

        return cost
    if boks:
        raise RegionSpaceError("box regions are only defined over line components")
    D = kit.D

    def cost(i: int, j: int) -> np.ndarray:
        row = D[int(C[i])]
        allowed = np.nonzero(row * ed <= en * row[int(C[j])])[0]
        t1 = D[np.ix_(G, allowed)]
        t2 = D[np.ix_(allowed, C)]
        return ((t1 * ld)[:, :, None] + ln * t2[None, :, :]).min(axis=1) * ed

    return cost


def _min_g_frame(fr: _Frame, cfg: PotentialConfig) -> tuple:
    k = len(fr.cands)
    ln, ld = cfg.triple_param.numerator, cfg.triple_param.denominator
    cn, cd = cfg.coeff.numerator, cfg.coeff.denominator
    boks = cfg.variant == "cnn"
    en, ed = (0, 1) if boks else (cfg.eta.numerator, cfg.eta.denominator)
    cost_x = _axis_pair_cost(fr.kx, fr.ax, fr.X, fr.GX, ln, ld, en, ed, boks)
    cost_y = _axis_pair_cost(fr.ky, fr.ay, fr.Y, fr.GY, ln, ld, en, ed, boks)
    WG = fr.GW * (ld * ed)
    WC = fr.W * (ld * ed)
    RT = np.empty((k, k), dtype=np.int64)
    AM = np.empty((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            cost = cost_x(i, j) + cost_y(i, j)
            rs = (WG[:, None] + cost).min(axis=0) - WC
            a = int(np.argmax(rs))
            AM[i, j] = a
            RT[i, j] = rs[a]
    HT, pd = fr.h_table(cfg.pair_param)
    GT = HT * (ld * ed * cd) - cn * (2 * pd) * RT
    flat = int(np.argmin(GT))
    i, j = divmod(flat, k)
    value = Fraction(int(GT[i, j]), 2 * fr.scale * pd * ld * ed * cd)
    return value, (fr.cands[i], fr.cands[j], fr.cands[int(AM[i, j])])


def _min_h_frame(fr: _Frame, cfg: PotentialConfig) -> tuple:
    HT, pd = fr.h_table(cfg.pair_param)
    flat = int(np.argmin(HT))
    i, j = divmod(flat, len(fr.cands))
    return Fraction(int(HT[i, j]), 2 * fr.scale * pd), (fr.cands[i], fr.cands[j])


@lru_cache(maxsize=256)
def _base_frame(wf: WorkFunction) -> _Frame:
    return _Frame(wf, _candidates(wf))


@lru_cache(maxsize=1024)
def _min_f_cached(wf: WorkFunction, cfg: PotentialConfig) -> tuple:
    return _min_f_frame(_base_frame(wf), cfg)


@lru_cache(maxsize=1024)
def _min_g_cached(wf: WorkFunction, cfg: PotentialConfig) -> tuple:
    return _min_g_frame(_base_frame(wf), cfg)


@lru_cache(maxsize=1024)
def _min_h_cached(wf: WorkFunction, cfg: PotentialConfig) -> tuple:
    return _min_h_frame(_base_frame(wf), cfg)


def min_f(wf: WorkFunction, cfg: PotentialConfig) -> tuple:
    """(exact minimum of F over triples, lexicographically first minimizer)."""
    return _min_f_cached(wf, cfg)


def min_g(wf: WorkFunction, cfg: PotentialConfig) -> tuple:
    return _min_g_cached(wf, cfg)


def min_h(wf: WorkFunction, cfg: PotentialConfig) -> tuple:
    return _min_h_cached(wf, cfg)


def phi(wf: WorkFunction, cfg: PotentialConfig) -> Fraction:
    """Weighted mix of the F and G minima."""
    return (1 - cfg.weight) * min_f(wf, cfg)[0] + cfg.weight * min_g(wf, cfg)[0]


# ---------------------------------------------------------------------------
# Verification


def _fs(v) -> Optional[str]:
    return None if v is None else str(v)


@dataclass(frozen=True)
class CheckResult:
    name: str
    holds: bool
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None
    margin: Optional[Fraction] = None
    note: str = ""
    advisory: bool = False

    def to_json(self) -> dict:
        return {"name": self.name, "holds": self.holds, "lhs": _fs(self.lhs),
                "rhs": _fs(self.rhs), "margin": _fs(self.margin),
                "note": self.note, "advisory": self.advisory}


@dataclass(frozen=True)
class LemmaReport:
    step: int
    case: str
    nabla: Fraction
    delta_max: Fraction
    delta_min: Fraction
    swapped: bool
    phi_before: Fraction
    phi_after: Fraction
    ratio: Optional[Fraction]
    checks: Tuple[CheckResult, ...]
    constants: dict

    @property
    def failures(self) -> int:
        return sum(1 for c in self.checks if not c.holds and not c.advisory)

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "case": self.case,
            "nabla": str(self.nabla),
            "deltaMax": str(self.delta_max),
            "deltaMin": str(self.delta_min),
            "swapped": self.swapped,
            "phiBefore": str(self.phi_before),
            "phiAfter": str(self.phi_after),
            "ratio": _fs(self.ratio),
            "failures": self.failures,
            "constants": {k: str(v) for k, v in self.constants.items()},
            "checks": [c.to_json() for c in self.checks],
        }


def _dominate_checks(wf: WorkFunction, r: RequestPoint, cfg: PotentialConfig,
                     context: tuple) -> list:
    """Sampled replace-a-dominated-point bounds, slots (a) through (f).

    Samples are grid points off the request paired with their dominating
    candidate on it; the context triple fills the untouched slots.
    """
    inst = wf.instance
    bounds = cfg.dominate_bounds()
    samples = []
    two_candidate = True
    grid_pts = sorted((ProductPoint(x, y) for x in wf.grid.xs for y in wf.grid.ys),
                      key=product_key)
    for s in grid_pts:
        if serves(s, r):
            continue
        t = next((c for c in (ProductPoint(r.x, s.y), ProductPoint(s.x, r.y))
                  if wf.dominates(c, s)), None)
        if t is None:
            two_candidate = False
            continue
        samples.append((s, t, inst.distance(s, t)))
        if len(samples) == 6:
            break
    out = [CheckResult(
        "dominated_by_request_candidate", two_candidate,
        note="every sampled point must be dominated by one of its two "
             "projections onto the request")]
    u1, u2, u3 = context
    evaluators = {
        "a": lambda s: f_value(wf, u1, u2, s, cfg),
        "b": lambda s: f_value(wf, u1, s, u3, cfg),
        "c": lambda s: f_value(wf, s, u2, u3, cfg),
        "d": lambda s: g_value(wf, u1, u2, s, cfg),
        "e": lambda s: g_value(wf, u1, s, u3, cfg),
        "f": lambda s: g_value(wf, s, u2, u3, cfg),
    }
    for letter, ev in evaluators.items():
        worst = None
        holds = True
        for s, t, d in samples:
            lhs = ev(s) - ev(t)
            rhs = d * bounds[letter]
            margin = lhs - rhs
            holds = holds and margin >= 0
            if worst is None or margin < worst[2]:
                worst = (lhs, rhs, margin)
        if worst is None:
            out.append(CheckResult(f"dominate_{letter}", True,
                                   note="no dominated pairs to sample"))
        else:
            out.append(CheckResult(f"dominate_{letter}", holds,
                                   worst[0], worst[1], worst[2]))
    return out


def _domination_candidates_check(wf_before: WorkFunction, r_prev: RequestPoint,
                                 r_next: RequestPoint, pts) -> CheckResult:
    """Minimizer points sharing a coordinate with the new request must be
    dominated, against the previous work function, by the single candidate
    on the previous request."""
    bad = []
    for s in sorted(pts, key=product_key):
        if s.x == r_next.x and s.y != r_prev.y:
            if not wf_before.dominates(ProductPoint(r_prev.x, s.y), s):
                bad.append(s)
        if s.y == r_next.y and s.x != r_prev.x:
            if not wf_before.dominates(ProductPoint(s.x, r_prev.y), s):
                bad.append(s)
    note = "" if not bad else f"undominated minimizer points: {bad}"
    return CheckResult("domination_candidates", not bad, note=note)


def _lipschitz_probe(wf_before: WorkFunction, r_next: RequestPoint,
                     cfg: PotentialConfig, lam: Fraction, nabla: Fraction,
                     mg_after: Fraction, swapped: bool) -> list:
    """Advisory: nudge the minor-axis coordinate of the request and compare
    the extended cost and min G shifts against the documented constants."""
    inst = wf_before.instance
    ax, ay = inst._axes
    minor_is_y = not swapped
    if (ay if minor_is_y else ax).kind != "line":
        return [CheckResult("lipschitz_probe", True, advisory=True,
                            note="skipped: the minor axis is finite")]
    eps = Fraction(1, 32)
    if minor_is_y:
        r_mod = RequestPoint(r_next.x, RealPoint(r_next.y.value + eps))
        d_eps = inst.distance_y(r_next.y, r_mod.y)
    else:
        r_mod = RequestPoint(RealPoint(r_next.x.value + eps), r_next.y)
        d_eps = inst.distance_x(r_next.x, r_mod.x)
    i = wf_before.i
    inst2 = Instance(inst.space_x, inst.space_y, inst.origin,
                     inst.requests[:i] + (r_mod,))
    wf2 = initial(inst2)
    for r in inst2.requests[:i]:
        wf2 = wf2.update(r)
    nabla2, _ = wf2.extended_cost(r_mod, lam)
    mg2 = min_g(wf2.update(r_mod), cfg)[0]
    shift_n = abs(nabla2 - nabla)
    bound_n = (1 + lam) * d_eps
    shift_g = abs(mg2 - mg_after)
    bound_g = (2 + 2 * cfg.coeff * (1 + lam)) * d_eps
    return [
        CheckResult("lipschitz_nabla", shift_n <= bound_n, shift_n, bound_n,
                    bound_n - shift_n, advisory=True),
        CheckResult("lipschitz_min_g", shift_g <= bound_g, shift_g, bound_g,
                    bound_g - shift_g, advisory=True),
    ]


def _refined_candidates(wf: WorkFunction, r: RequestPoint) -> tuple:
    """Base candidates plus midpoints between consecutive grid coordinates
    along each line axis of the request."""
    ax, ay = wf.instance._axes
    pts = list(_candidates(wf))
    if ay.kind == "line":
        ys = sorted(p.value for p in wf.grid.ys)
        pts.extend(ProductPoint(r.x, RealPoint((a + b) / 2))
                   for a, b in zip(ys, ys[1:]))
    if ax.kind == "line":
        xs = sorted(p.value for p in wf.grid.xs)
        pts.extend(ProductPoint(RealPoint((a + b) / 2), r.y)
                   for a, b in zip(xs, xs[1:]))
    return tuple(sorted(set(pts), key=product_key))


def _dense_line_points(wf: WorkFunction, r: RequestPoint,
                       around: ProductPoint) -> list:
    """Step-1/16 sweeps of both request lines, windowed near the given point
    when the grid hull is wide."""
    ax, ay = wf.instance._axes
    step = Fraction(1, 16)
    out = []

    def sweep(coords, center):
        lo, hi = min(coords), max(coords)
        if hi - lo > 16:
            lo = max(lo, center - 8)
            hi = min(hi, center + 8)
        v = Fraction(math.ceil(lo * 16), 16)
        vals = []
        while v <= hi:
            vals.append(v)
            v += step
        return vals

    if ay.kind == "line":
        for v in sweep([p.value for p in wf.grid.ys], around.y.value):
            out.append(ProductPoint(r.x, RealPoint(v)))
    if ax.kind == "line":
        for v in sweep([p.value for p in wf.grid.xs], around.x.value):
            out.append(ProductPoint(RealPoint(v), r.y))
    return out


def _audit(wf_after: WorkFunction, r_next: RequestPoint, cfg: PotentialConfig,
           mf: Fraction, tf: tuple, mg: Fraction, tg: tuple) -> CheckResult:
    """Refine the candidate set and assert the base minima survive.

    Midpoints refine everywhere; a full-grid pass covers off-request triples
    for F (and for G on small grids); dense step-1/16 sweeps vary one triple
    slot at a time around each winner.  Any strict improvement raises.
    """
    fr = _Frame(wf_after, _refined_candidates(wf_after, r_next))
    v = _min_f_frame(fr, cfg)[0]
    if v != mf:
        raise AuditError(f"midpoint refinement improved min F: {v} < {mf}")
    v = _min_g_frame(fr, cfg)[0]
    if v != mg:
        raise AuditError(f"midpoint refinement improved min G: {v} < {mg}")

    full = tuple(sorted((ProductPoint(x, y)
                         for x in wf_after.grid.xs for y in wf_after.grid.ys),
                        key=product_key))
    fr_full = _Frame(wf_after, full)
    v = _min_f_frame(fr_full, cfg)[0]
    if v < mf:
        raise AuditError(f"a full-grid triple improves min F: {v} < {mf}")
    if len(full) <= 40:
        v = _min_g_frame(fr_full, cfg)[0]
        if v < mg:
            raise AuditError(f"a full-grid triple improves min G: {v} < {mg}")

    for label, triple, base, fun in (("F", tf, mf, f_value),
                                     ("G", tg, mg, g_value)):
        for slot in range(3):
            for p in _dense_line_points(wf_after, r_next, triple[slot]):
                varied = list(triple)
                varied[slot] = p
                val = fun(wf_after, varied[0], varied[1], varied[2], cfg)
                if val < base:
                    raise AuditError(
                        f"dense sweep improves min {label} at {varied}: "
                        f"{val} < {base}")
    return CheckResult("audit_no_improvement", True,
                       note="midpoint, full-grid, and dense sweeps found no "
                            "better triples")


def verify_step(wf_before: WorkFunction, wf_after: WorkFunction,
                r_next: RequestPoint, cfg: PotentialConfig, lam, *,
                probe: bool = True, audit: bool = False,
                _nabla: Optional[Fraction] = None) -> LemmaReport:
    """Machine-check the per-step inequalities for one request transition.

    wf_before and wf_after are the work functions around the update with
    r_next.  All checks are exact; advisory entries (the Lipschitz probe) are
    recorded but never counted as failures.
    """
    lam = _param_value(lam)
    if cfg.triple_param != lam:
        raise ConfigError("the potential's lambda must match the accounting lambda")
    inst = wf_before.instance
    if wf_after.instance != inst or wf_after.i != wf_before.i + 1 \
            or wf_after.last_request != r_next:
        raise ConfigError("wf_after must be wf_before updated with r_next")

    origin = inst.origin
    r_prev = wf_before.last_request
    if r_prev is None:
        r_prev = RequestPoint(origin.x, origin.y)
    dx = inst.distance_x(r_prev.x, r_next.x)
    dy = inst.distance_y(r_prev.y, r_next.y)
    swapped = dx < dy
    dmax, dmin = (dy, dx) if swapped else (dx, dy)

    nabla = _nabla
    if nabla is None:
        nabla, _ = wf_before.extended_cost(r_next, lam)

    consts = cfg.constants()
    mf1, _tf1 = min_f(wf_before, cfg)
    mg1, _tg1 = min_g(wf_before, cfg)
    mf2, tf2 = min_f(wf_after, cfg)
    mg2, tg2 = min_g(wf_after, cfg)
    mh2, _ = min_h(wf_after, cfg)
    w = cfg.weight
    phi1 = (1 - w) * mf1 + w * mg1
    phi2 = (1 - w) * mf2 + w * mg2
    case = "A" if len(set(tf2)) <= 2 else "B"

    checks = []
    if wf_before.i == 0:
        checks.append(CheckResult("phi_epsilon", phi1 == 0, phi1, Fraction(0),
                                  -abs(phi1)))

    checks.append(CheckResult(
        "minimum_in_r", all(serves(p, r_next) for p in (*tf2, *tg2)),
        note="F and G minimizers must serve the new request"))

    checks.extend(_dominate_checks(wf_after, r_next, cfg, tf2))

    checks.append(CheckResult("chain_f_g_h", mf2 <= mg2 <= mh2, mf2, mh2,
                              min(mg2 - mf2, mh2 - mg2)))

    lhs = mf2 - mf1
    if case == "A":
        rhs = consts["c1"] * nabla
        checks.append(CheckResult("f_increase_case_a", lhs >= rhs, lhs, rhs,
                                  lhs - rhs))
    else:
        rhs = consts["c2"] * dmin
        checks.append(CheckResult("f_increase_case_b", lhs >= rhs, lhs, rhs,
                                  lhs - rhs))

    lhs = mg2 - mg1
    rhs = consts["c3"] * nabla - consts["c4"] * dmin
    checks.append(CheckResult("g_increase", lhs >= rhs, lhs, rhs, lhs - rhs))

    if case == "A":
        checks.append(CheckResult("g_monotone_case_a", mg2 >= mg1, mg2, mg1,
                                  mg2 - mg1))
        spread = max(mg2 - mf2, mh2 - mg2)
        checks.append(CheckResult(
            "cardinality_collapse", mf2 == mg2 == mh2, mf2, mh2, -spread,
            note="a two-point F minimizer forces min F = min G = min H"))

    checks.append(CheckResult("nabla_le_delta", nabla <= (1 + lam) * dmax,
                              nabla, (1 + lam) * dmax,
                              (1 + lam) * dmax - nabla))

    lhs = phi2 - phi1
    rhs = consts["c5"] * nabla
    checks.append(CheckResult("phi_increase", lhs >= rhs, lhs, rhs, lhs - rhs))
    ratio = lhs / nabla if nabla > 0 else None

    checks.append(_domination_candidates_check(wf_before, r_prev, r_next,
                                               set((*tf2, *tg2))))

    if (tg2[0].x == tg2[1].x == tg2[2].x) or (tg2[0].y == tg2[1].y == tg2[2].y):
        best_h = min(h_value(wf_after, u1, u2, cfg.pair_param)
                     for u1 in tg2 for u2 in tg2)
        checks.append(CheckResult("convex_containment", best_h <= mg2,
                                  best_h, mg2, mg2 - best_h,
                                  note="aligned G minimizer admits a pair "
                                       "with H at most min G"))

    if probe:
        checks.extend(_lipschitz_probe(wf_before, r_next, cfg, lam, nabla,
                                       mg2, swapped))

    if audit:
        checks.append(_audit(wf_after, r_next, cfg, mf2, tf2, mg2, tg2))

    return LemmaReport(wf_before.i, case, nabla, dmax, dmin, swapped,
                       phi1, phi2, ratio, tuple(checks),
                       {**consts, "weight": w})
