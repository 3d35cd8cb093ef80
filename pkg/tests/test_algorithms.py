"""Online algorithms: the work-function rule, greedy, and retrospective."""

import random
from fractions import Fraction

import pytest

from wfalab import (AlgorithmConfig, ConfigError, Instance, RealLine,
                    greedy_step, initial, pt, request, retrospective_step, run,
                    serves, wfa_minimizers, wfa_step)
from wfalab.harness import example_trace

from conftest import finite_instance, plane_instance

HALF = Fraction(1, 2)


def single_request_wf(x, y):
    inst = Instance(RealLine(), RealLine(), pt(0, 0), (request(x, y),))
    return inst, initial(inst).update(inst.requests[0])


def test_config_validation():
    assert AlgorithmConfig("wfa", HALF).label == "wfa[1/2]"
    assert AlgorithmConfig("greedy").label == "greedy"
    assert AlgorithmConfig("wfa", 1).lam == 1
    with pytest.raises(ConfigError):
        AlgorithmConfig("wfa")
    with pytest.raises(ConfigError):
        AlgorithmConfig("wfa", 0)
    with pytest.raises(ConfigError):
        AlgorithmConfig("wfa", Fraction(3, 2))
    with pytest.raises(ConfigError):
        AlgorithmConfig("greedy", HALF)
    with pytest.raises(ConfigError):
        AlgorithmConfig("retrospective", 1)
    with pytest.raises(ConfigError):
        AlgorithmConfig("nearest")


def test_wfa_step_prefers_small_moves_then_lex():
    inst, wf = single_request_wf(1, 1)
    mins = wfa_minimizers(wf, pt(0, 0), inst.requests[0], 1)
    assert set(mins) == {pt(1, 0), pt(0, 1)}
    assert wfa_step(wf, pt(0, 0), inst.requests[0], 1) == pt(0, 1)
    mins = wfa_minimizers(wf, pt(1, 2), inst.requests[0], 1)
    assert pt(1, 2) in mins and len(mins) == 4
    assert wfa_step(wf, pt(1, 2), inst.requests[0], 1) == pt(1, 2)


def test_greedy_tie_keeps_x_projection():
    inst, _ = single_request_wf(2, -2)
    assert greedy_step(inst, pt(0, 0), inst.requests[0]) == pt(2, 0)
    assert greedy_step(inst, pt(0, -3), inst.requests[0]) == pt(0, -2)


def test_retrospective_breaks_ties_lexicographically():
    inst, wf = single_request_wf(1, 1)
    assert retrospective_step(wf, inst.requests[0]) == pt(0, 1)


def test_straight_line_family_at_lambda_one():
    trace = example_trace(5, 1)
    assert trace.total_cost == 5
    assert trace.opt_cost == 2
    assert trace.ratio == Fraction(5, 2)
    for j, rec in enumerate(trace.records):
        assert rec.position_after == pt(j + 1, 2) or rec.position_after == pt(j + 1, 0)
        assert rec.move_cost == 1
    assert trace.final_position == pt(5, 0)


def test_straight_line_family_plateaus_at_half():
    costs = [example_trace(m, HALF).total_cost for m in range(1, 7)]
    assert costs == [1, 2, 3, 4, 10, 10]


def test_identity_bound_on_random_runs():
    rng = random.Random(51)
    for lam in (Fraction(1, 4), HALF, Fraction(3, 4), Fraction(1)):
        inst = plane_instance(rng, 5)
        trace = run(inst, AlgorithmConfig("wfa", lam))
        assert trace.identity_holds is True
        assert trace.total_cost == sum(r.move_cost for r in trace.records)
        for rec in trace.records:
            assert serves(rec.position_after, rec.request)
            assert rec.ties >= 1
        assert trace.total_cost * lam <= trace.total_extended_cost - trace.final_work_at_position


def test_verified_run_populates_reports():
    rng = random.Random(52)
    inst = plane_instance(rng, 4)
    trace = run(inst, AlgorithmConfig("wfa", HALF), verify=True)
    assert trace.lemma_failures == 0
    assert trace.phi_final is not None and trace.phi_final <= trace.opt_cost
    for rec in trace.records:
        assert rec.lemma_report is not None
        assert rec.lemma_report.failures == 0
        assert rec.phi_before is not None and rec.phi_after is not None
    if any(rec.nabla > 0 for rec in trace.records):
        assert trace.min_phi_increase_over_nabla is not None


def test_other_algorithms_cost_at_least_opt():
    rng = random.Random(53)
    inst = finite_instance(rng, 5)
    for kind in ("greedy", "retrospective"):
        trace = run(inst, AlgorithmConfig(kind))
        assert trace.identity_holds is None
        assert trace.total_cost >= trace.opt_cost
        assert trace.phi_final is None
        for rec in trace.records:
            assert serves(rec.position_after, rec.request)


def test_verify_needs_a_sub_unit_lambda_or_explicit_config():
    rng = random.Random(54)
    inst = plane_instance(rng, 2)
    with pytest.raises(ConfigError):
        run(inst, AlgorithmConfig("wfa", 1), verify=True)
    from wfalab.potential import default_constants

    with pytest.raises(ConfigError):
        run(inst, AlgorithmConfig("wfa", HALF), verify=True,
            potential_config=default_constants(Fraction(1, 4)))
