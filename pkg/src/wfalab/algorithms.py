"""Online algorithms over the work function, and the run loop.

The work-function family moves, after each request, to a point minimizing
W(t) + lam * d(current, t) against the updated work function.  lam = 1 is the
classic rule, lam < 1 biases toward staying put just enough that the argmin
always serves the request, lam -> 0 chases the retrospective optimum.  Greedy
ignores W entirely.

run() drives one algorithm over one instance, recording per-step movement
cost, the extended cost (computed against the work function *before* the
update), and optionally a lemma report from the potential verifier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .errors import ConfigError, WfalabError
from .exact import frac
from .metric import ProductPoint, product_key
from .problem import Instance, RequestPoint, grid_points_on, serves
from .workfn import WorkFunction, _param_value, initial


@dataclass(frozen=True)
class AlgorithmConfig:
    kind: str  # "wfa" | "greedy" | "retrospective"
    lam: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.kind not in ("wfa", "greedy", "retrospective"):
            raise ConfigError(f"unknown algorithm kind {self.kind!r}")
        if self.kind == "wfa":
            if self.lam is None:
                raise ConfigError("wfa needs a lambda")
            object.__setattr__(self, "lam", frac(self.lam))
            if not (0 < self.lam <= 1):
                raise ConfigError(f"wfa lambda must lie in (0, 1], got {self.lam}")
        elif self.lam is not None:
            raise ConfigError(f"{self.kind} takes no lambda")

    @property
    def label(self) -> str:
        if self.kind == "wfa":
            return f"wfa[{self.lam}]"
        return self.kind


def _argmin_candidates(wf_after: WorkFunction, current: ProductPoint,
                       r: RequestPoint) -> list:
    cands = list(grid_points_on(wf_after.grid, r))
    seen = set(cands)
    for p in (ProductPoint(r.x, current.y), ProductPoint(current.x, r.y)):
        if p not in seen:
            seen.add(p)
            cands.append(p)
    return cands


def wfa_minimizers(wf_after: WorkFunction, current: ProductPoint,
                   r: RequestPoint, lam) -> list:
    """All points minimizing W(t) + lam*d(current, t), in candidate order.

    The minimum over the whole space is attained on the request's lines
    (every point is dominated by one there), and along each line at a grid
    coordinate or at the projection of the current position; those are
    exactly the candidates scored here.
    """
    lam = _param_value(lam)
    inst = wf_after.instance
    best = None
    out = []
    for t in _argmin_candidates(wf_after, current, r):
        score = wf_after.evaluate(t) + lam * inst.distance(current, t)
        if best is None or score < best:
            best = score
            out = [t]
        elif score == best:
            out.append(t)
    return out


def wfa_step(wf_after: WorkFunction, current: ProductPoint,
             r: RequestPoint, lam) -> ProductPoint:
    """Move of the work-function rule; ties resolved by smallest move, then
    lexicographically."""
    mins = wfa_minimizers(wf_after, current, r, lam)
    inst = wf_after.instance
    return min(mins, key=lambda t: (inst.distance(current, t), product_key(t)))


def greedy_step(instance: Instance, current: ProductPoint,
                r: RequestPoint) -> ProductPoint:
    """Nearest point of the request's lines; a tie keeps the x-projection."""
    move_x = ProductPoint(r.x, current.y)
    move_y = ProductPoint(current.x, r.y)
    if instance.distance(current, move_x) <= instance.distance(current, move_y):
        return move_x
    return move_y


def retrospective_step(wf_after: WorkFunction, r: RequestPoint) -> ProductPoint:
    """Grid point of the request minimizing the updated work function."""
    cands = grid_points_on(wf_after.grid, r)
    best = min(wf_after.value_at(t) for t in cands)
    return min((t for t in cands if wf_after.value_at(t) == best), key=product_key)


@dataclass(frozen=True)
class StepRecord:
    index: int
    request: RequestPoint
    position_before: ProductPoint
    position_after: ProductPoint
    move_cost: Fraction
    nabla: Fraction
    delta_x: Fraction
    delta_y: Fraction
    ties: int
    phi_before: Optional[Fraction] = None
    phi_after: Optional[Fraction] = None
    lemma_report: Optional[object] = None


@dataclass(frozen=True)
class RunTrace:
    algorithm: AlgorithmConfig
    records: Tuple[StepRecord, ...]
    total_cost: Fraction
    opt_cost: Fraction
    ratio: Optional[Fraction]
    total_extended_cost: Fraction
    identity_holds: Optional[bool]
    final_position: ProductPoint
    final_work_at_position: Fraction
    lemma_failures: int = 0
    min_phi_increase_over_nabla: Optional[Fraction] = None
    phi_final: Optional[Fraction] = None

    @property
    def n(self) -> int:
        return len(self.records)


def run(instance: Instance, config: AlgorithmConfig, verify: bool = False,
        potential_config=None, *, audit: bool = False,
        accounting_lam=None) -> RunTrace:
    """Drive one algorithm over the full request sequence.

    The extended cost of each step uses the accounting lambda: the
    algorithm's own for wfa, 1 for the others unless overridden.  With
    verify=True each step is also pushed through the potential verifier,
    which needs a potential configuration (or a wfa lambda strictly below 1
    to derive default constants from).
    """
    from . import potential

    if config.kind == "wfa":
        acct_lam = config.lam if accounting_lam is None else frac(accounting_lam)
    else:
        acct_lam = Fraction(1) if accounting_lam is None else frac(accounting_lam)

    pcfg = potential_config
    if verify and pcfg is None:
        if acct_lam >= 1:
            raise ConfigError(
                "verification needs lambda < 1 (or an explicit potential config)")
        pcfg = potential.default_constants(acct_lam)
    if verify and pcfg is not None and pcfg.lam != acct_lam:
        raise ConfigError("potential lambda must match the accounting lambda")

    wf = initial(instance)
    pos = instance.origin
    records = []
    total_cost = Fraction(0)
    nabla_total = Fraction(0)
    lemma_failures = 0
    min_ratio = None
    prev_request = None

    for j, r in enumerate(instance.requests):
        nabla, _witness = wf.extended_cost(r, acct_lam)
        nabla_total += nabla
        ref = prev_request if prev_request is not None else RequestPoint(
            instance.origin.x, instance.origin.y)
        delta_x = instance.distance_x(ref.x, r.x)
        delta_y = instance.distance_y(ref.y, r.y)

        wf_next = wf.update(r)

        ties = 1
        if config.kind == "wfa":
            mins = wfa_minimizers(wf_next, pos, r, config.lam)
            ties = len(mins)
            new_pos = min(mins, key=lambda t: (instance.distance(pos, t),
                                               product_key(t)))
        elif config.kind == "greedy":
            new_pos = greedy_step(instance, pos, r)
        else:
            new_pos = retrospective_step(wf_next, r)
        if not serves(new_pos, r):
            raise WfalabError(f"step {j}: position {new_pos} does not serve {r}")

        report = None
        phi_before = phi_after = None
        if verify:
            report = potential.verify_step(wf, wf_next, r, pcfg, acct_lam,
                                           audit=audit, _nabla=nabla)
            phi_before = report.phi_before
            phi_after = report.phi_after
            lemma_failures += report.failures
            if nabla > 0:
                step_ratio = (phi_after - phi_before) / nabla
                if min_ratio is None or step_ratio < min_ratio:
                    min_ratio = step_ratio

        move = instance.distance(pos, new_pos)
        total_cost += move
        records.append(StepRecord(j, r, pos, new_pos, move, nabla,
                                  delta_x, delta_y, ties,
                                  phi_before, phi_after, report))
        pos = new_pos
        wf = wf_next
        prev_request = r

    opt = wf.opt_cost() if instance.n else Fraction(0)
    ratio = total_cost / opt if opt > 0 else None
    w_final = wf.evaluate(pos)
    identity = None
    if config.kind == "wfa":
        identity = total_cost <= (nabla_total - w_final) / config.lam
    phi_final = None
    if verify:
        phi_final = records[-1].phi_after if records else Fraction(0)
        if phi_final is not None and phi_final > opt:
            lemma_failures += 1
    return RunTrace(config, tuple(records), total_cost, opt, ratio,
                    nabla_total, identity, pos, w_final,
                    lemma_failures, min_ratio, phi_final)
