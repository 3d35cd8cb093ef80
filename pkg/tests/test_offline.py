"""Brute-force path oracles and their agreement with the grid recursion."""

import random
from fractions import Fraction

import pytest

from wfalab import ProductPoint, SizeGuardError, initial, pt, serves
from wfalab.offline import (MAX_ENUMERATION_REQUESTS, MAX_ORACLE_REQUESTS,
                            brute_force_opt, brute_force_path,
                            brute_force_work_value, enumerate_work_value)

from conftest import finite_instance, plane_instance, quarter


def probe_points(rng, inst, count=3):
    points = []
    for _ in range(count):
        if inst._axes[0].kind == "line":
            points.append(pt(quarter(rng, 4), quarter(rng, 4)))
        else:
            from wfalab import idx

            size = inst._axes[0].size
            points.append(ProductPoint(idx(rng.randrange(size)),
                                       idx(rng.randrange(size))))
    return points


def test_bellman_matches_literal_enumeration():
    rng = random.Random(41)
    for trial in range(6):
        inst = plane_instance(rng, 4) if trial % 2 else finite_instance(rng, 4)
        for i in range(inst.n + 1):
            for s in probe_points(rng, inst):
                assert (brute_force_work_value(inst, i, s)
                        == enumerate_work_value(inst, i, s))


def test_path_serves_the_prefix_and_costs_the_work_value():
    rng = random.Random(42)
    for trial in range(6):
        inst = plane_instance(rng, 4)
        s = pt(quarter(rng, 4), quarter(rng, 4))
        for i in range(inst.n + 1):
            value, path = brute_force_path(inst, i, s)
            assert value == brute_force_work_value(inst, i, s)
            assert len(path) == i
            for p, r in zip(path, inst.requests):
                assert serves(p, r)
            cost = Fraction(0)
            at = inst.origin
            for p in path:
                cost += inst.distance(at, p)
                at = p
            assert cost + inst.distance(at, s) == value


def test_opt_matches_work_function_minimum():
    rng = random.Random(43)
    for trial in range(6):
        inst = plane_instance(rng, 5) if trial % 2 else finite_instance(rng, 5)
        wf = initial(inst)
        for r in inst.requests:
            wf = wf.update(r)
        assert brute_force_opt(inst) == wf.opt_cost()


def test_work_value_agrees_with_work_function_everywhere():
    rng = random.Random(44)
    for trial in range(4):
        inst = plane_instance(rng, 4)
        wf = initial(inst)
        for i, r in enumerate(inst.requests):
            wf = wf.update(r)
            for s in probe_points(rng, inst):
                assert wf.evaluate(s) == brute_force_work_value(inst, i + 1, s)


def test_size_guards():
    rng = random.Random(45)
    inst = plane_instance(rng, MAX_ORACLE_REQUESTS + 1)
    with pytest.raises(SizeGuardError):
        brute_force_work_value(inst, inst.n, inst.origin)
    with pytest.raises(SizeGuardError):
        brute_force_opt(inst)
    small = plane_instance(rng, MAX_ENUMERATION_REQUESTS + 1)
    with pytest.raises(SizeGuardError):
        enumerate_work_value(small, small.n, small.origin)
