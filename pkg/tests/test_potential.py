"""Potential constants, regions, triple minima, and the step verifier."""

import random
from fractions import Fraction

import pytest

from wfalab import (AlgorithmConfig, AuditError, ConfigError, ProductPoint,
                    RegionSpaceError, idx, initial, pt, run)
from wfalab.metric import product_key
from wfalab.offline import dense_region_slack
from wfalab.potential import (Boks, CnnPotential, GeneralPotential, Spheres,
                              _audit, config_from_json, config_to_json,
                              default_constants, f_value, g_value, h_value,
                              min_f, min_g, min_h, phi, region_membership,
                              region_slack, verify_step)
from wfalab.problem import grid_points_on

from conftest import finite_instance, plane_instance, quarter, weighted_instance

HALF = Fraction(1, 2)


def run_to_end(inst):
    wf = initial(inst)
    for r in inst.requests:
        wf = wf.update(r)
    return wf


def test_default_cnn_constants_at_half():
    cfg = default_constants(HALF)
    assert cfg.variant == "cnn"
    assert cfg.alpha == Fraction(1, 28)
    assert cfg.gamma == Fraction(1, 120)
    c = cfg.constants()
    assert c == {"c1": Fraction(1, 28), "c2": Fraction(1, 56),
                 "c3": Fraction(1, 84), "c4": Fraction(17, 8),
                 "c5": Fraction(1, 10080)}
    b = cfg.dominate_bounds()
    assert b["a"] == b["d"] == Fraction(1, 56)
    assert b["b"] == b["c"] == b["e"] == b["f"] == Fraction(11, 56)


def test_default_general_constants_at_half():
    cfg = default_constants(HALF, "general")
    assert cfg.variant == "general"
    assert cfg.mu == Fraction(3, 4)
    assert cfg.eta == 8
    assert cfg.beta == Fraction(1, 216)
    assert cfg.kappa == Fraction(1, 872)
    c = cfg.constants()
    assert c == {"c1": Fraction(1, 216), "c2": Fraction(1, 432),
                 "c3": Fraction(1, 648), "c4": Fraction(871, 432),
                 "c5": Fraction(1, 565056)}
    b = cfg.dominate_bounds()
    assert b["a"] == b["d"] == Fraction(1, 432)
    assert b["b"] == b["c"] == Fraction(17, 144)
    assert b["e"] == Fraction(5, 72)
    assert b["f"] == Fraction(1, 16)


def test_constants_positive_across_lambdas():
    for num in range(1, 10):
        lam = Fraction(num, 10)
        for variant in ("cnn", "general"):
            c = default_constants(lam, variant).constants()
            assert all(v > 0 for v in c.values())


def test_config_validation():
    with pytest.raises(ConfigError):
        CnnPotential(Fraction(3, 2), Fraction(1, 28), HALF)
    with pytest.raises(ConfigError):
        CnnPotential(HALF, Fraction(1, 4), HALF)
    with pytest.raises(ConfigError):
        CnnPotential(HALF, Fraction(1, 28), 0)
    with pytest.raises(ConfigError):
        GeneralPotential(HALF, Fraction(1, 4), 8, Fraction(1, 216), HALF)
    with pytest.raises(ConfigError):
        GeneralPotential(HALF, Fraction(3, 4), 2, Fraction(1, 216), HALF)
    with pytest.raises(ConfigError):
        GeneralPotential(HALF, Fraction(3, 4), 8, Fraction(1, 10), HALF)
    with pytest.raises(ConfigError):
        GeneralPotential(HALF, Fraction(3, 4), 8, Fraction(1, 216), 1)
    with pytest.raises(ConfigError):
        default_constants(1)
    with pytest.raises(ConfigError):
        default_constants(HALF, "weird")


def test_config_json_round_trip():
    for variant in ("cnn", "general"):
        cfg = default_constants(Fraction(2, 5), variant)
        assert config_from_json(config_to_json(cfg)) == cfg
    with pytest.raises(ConfigError):
        config_from_json({"variant": "cnn", "lambda": "1/2"})
    with pytest.raises(ConfigError):
        config_from_json({"variant": "banana"})


def test_box_membership():
    box = Boks(pt(0, 0), pt(2, 3))
    assert region_membership(box, pt(1, 1))
    assert region_membership(box, pt(0, 3))
    assert region_membership(box, pt(2, Fraction(3, 2)))
    assert not region_membership(box, pt(-1, 1))
    assert not region_membership(box, pt(1, 4))
    finite_point = ProductPoint(idx(0), idx(1))
    with pytest.raises(RegionSpaceError):
        region_membership(Boks(finite_point, finite_point), finite_point)


def test_sphere_membership():
    ball = Spheres(pt(0, 0), pt(1, 2), 2)
    assert region_membership(ball, pt(2, -4))
    assert region_membership(ball, pt(-2, 4))
    assert not region_membership(ball, pt(Fraction(9, 4), 0))
    assert not region_membership(ball, pt(0, Fraction(17, 4)))
    rng = random.Random(61)
    inst = finite_instance(rng, 1)
    a, b = ProductPoint(idx(0), idx(0)), ProductPoint(idx(1), idx(2))
    wide = Spheres(a, b, 1)
    assert region_membership(wide, ProductPoint(idx(3), idx(3)), inst)
    tight = Spheres(a, a, 1)
    assert region_membership(tight, a, inst)
    assert not region_membership(tight, b, inst)
    with pytest.raises(RegionSpaceError):
        region_membership(wide, b)


def test_degenerate_box_slack_is_point_slack():
    rng = random.Random(62)
    wf = run_to_end(plane_instance(rng, 3))
    for _ in range(5):
        s1 = pt(quarter(rng, 4), quarter(rng, 4))
        s3 = pt(quarter(rng, 4), quarter(rng, 4))
        assert region_slack(wf, s3, Boks(s1, s1), HALF) == wf.slack(s3, s1, HALF)


def test_region_slack_against_dense_sampling():
    rng = random.Random(63)
    wf = run_to_end(plane_instance(rng, 3))
    step = Fraction(1, 16)
    for _ in range(3):
        s1 = pt(quarter(rng, 2), quarter(rng, 2))
        s2 = pt(quarter(rng, 2), quarter(rng, 2))
        s3 = pt(quarter(rng, 2), quarter(rng, 2))
        for region in (Boks(s1, s2), Spheres(s1, s2, 1)):
            exact = region_slack(wf, s3, region, HALF)
            approx = dense_region_slack(wf, s3, region, HALF, step=step)
            assert float(exact) <= approx + 1e-9
            assert approx - float(exact) <= (1 + HALF) * float(step)


def test_region_slack_smaller_on_larger_region():
    rng = random.Random(64)
    wf = run_to_end(plane_instance(rng, 3))
    s1 = pt(1, 2)
    s2 = pt(-1, 0)
    s3 = pt(0, 1)
    pair = wf.slack(s3, (s1, s2), HALF)
    assert region_slack(wf, s3, Boks(s1, s2), HALF) <= pair
    assert region_slack(wf, s3, Spheres(s1, s2, 1), HALF) <= wf.slack(s3, s1, HALF)


def triple_candidates(wf):
    pts = grid_points_on(wf.grid, wf.last_request, wf.instance.space_x,
                         wf.instance.space_y, full_lines=True)
    return sorted(set(pts), key=product_key)


def lex3(triple):
    return tuple(product_key(p) for p in triple)


@pytest.mark.parametrize("maker", ["plane", "finite", "weighted"])
def test_triple_minima_match_direct_scan(maker):
    rng = random.Random(65)
    if maker == "plane":
        inst = plane_instance(rng, 2, bound=2)
    elif maker == "finite":
        inst = finite_instance(rng, 3)
    else:
        inst = weighted_instance(rng, 2, bound=2)
    wf = run_to_end(inst)
    for variant in ("cnn", "general"):
        if variant == "cnn" and maker == "finite":
            continue
        cfg = default_constants(HALF, variant)
        cands = triple_candidates(wf)
        best_f = min(((f_value(wf, a, b, c, cfg), (a, b, c))
                      for a in cands for b in cands for c in cands),
                     key=lambda t: (t[0], lex3(t[1])))
        vf, tf = min_f(wf, cfg)
        assert (vf, tf) == (best_f[0], best_f[1])
        best_g = min(((g_value(wf, a, b, c, cfg), (a, b, c))
                      for a in cands for b in cands for c in cands),
                     key=lambda t: (t[0], lex3(t[1])))
        vg, tg = min_g(wf, cfg)
        assert (vg, tg) == (best_g[0], best_g[1])
        best_h = min(((h_value(wf, a, b, cfg.pair_param), (a, b))
                      for a in cands for b in cands),
                     key=lambda t: (t[0], lex3(t[1])))
        vh, th = min_h(wf, cfg)
        assert (vh, th) == (best_h[0], best_h[1])
        assert vf <= vg <= vh
        assert phi(wf, cfg) == (1 - cfg.weight) * vf + cfg.weight * vg


def test_h_value_is_symmetric():
    rng = random.Random(66)
    wf = run_to_end(plane_instance(rng, 3))
    for _ in range(5):
        s1 = pt(quarter(rng, 4), quarter(rng, 4))
        s2 = pt(quarter(rng, 4), quarter(rng, 4))
        assert h_value(wf, s1, s2, HALF) == h_value(wf, s2, s1, HALF)


def test_phi_vanishes_before_any_request():
    rng = random.Random(67)
    wf = initial(plane_instance(rng, 2))
    for variant in ("cnn", "general"):
        assert phi(wf, default_constants(HALF, variant)) == 0


def test_verify_step_all_green_on_plane():
    rng = random.Random(68)
    for lam in (Fraction(1, 4), HALF, Fraction(3, 4)):
        inst = plane_instance(rng, 4)
        cfg = default_constants(lam)
        wf = initial(inst)
        for r in inst.requests:
            nxt = wf.update(r)
            report = verify_step(wf, nxt, r, cfg, lam)
            assert report.failures == 0
            assert report.case in ("A", "B")
            names = [c.name for c in report.checks]
            assert "chain_f_g_h" in names
            assert "phi_increase" in names
            assert "nabla_le_delta" in names
            if wf.i == 0:
                assert "phi_epsilon" in names
            wf = nxt


def test_verify_step_report_shape():
    rng = random.Random(69)
    inst = plane_instance(rng, 2)
    cfg = default_constants(HALF)
    wf = initial(inst)
    nxt = wf.update(inst.requests[0])
    report = verify_step(wf, nxt, inst.requests[0], cfg, HALF)
    payload = report.to_json()
    assert payload["step"] == 0
    assert payload["failures"] == 0
    assert set(payload["constants"]) == {"c1", "c2", "c3", "c4", "c5", "weight"}
    for entry in payload["checks"]:
        assert set(entry) >= {"name", "holds"}
    case_a = [c for c in report.checks if c.name == "cardinality_collapse"]
    if report.case == "A":
        assert case_a and case_a[0].holds
    else:
        assert not case_a


def test_verify_step_config_mismatches():
    rng = random.Random(70)
    inst = plane_instance(rng, 2)
    wf = initial(inst)
    nxt = wf.update(inst.requests[0])
    with pytest.raises(ConfigError):
        verify_step(wf, nxt, inst.requests[0], default_constants(Fraction(1, 4)),
                    HALF)
    with pytest.raises(ConfigError):
        verify_step(nxt, nxt, inst.requests[0], default_constants(HALF), HALF)


def test_verify_step_finite_general_and_convexity():
    rng = random.Random(71)
    inst = finite_instance(rng, 6)
    cfg = default_constants(HALF, "general")
    wf = initial(inst)
    saw_convexity = False
    for r in inst.requests:
        nxt = wf.update(r)
        report = verify_step(wf, nxt, r, cfg, HALF)
        assert report.failures == 0
        for c in report.checks:
            if c.name == "convex_containment":
                saw_convexity = True
                assert c.holds
        wf = nxt
    assert saw_convexity


def test_lipschitz_probe_is_advisory():
    rng = random.Random(72)
    inst = plane_instance(rng, 2)
    cfg = default_constants(HALF)
    wf = initial(inst)
    nxt = wf.update(inst.requests[0])
    report = verify_step(wf, nxt, inst.requests[0], cfg, HALF, probe=True)
    probe_names = {c.name for c in report.checks if c.advisory}
    assert probe_names <= {"lipschitz_nabla", "lipschitz_min_g", "lipschitz_probe"}
    assert probe_names
    quiet = verify_step(wf, nxt, inst.requests[0], cfg, HALF, probe=False)
    assert not [c for c in quiet.checks if c.advisory]


def test_audit_passes_and_detects_false_minima():
    rng = random.Random(73)
    inst = plane_instance(rng, 3, bound=2)
    cfg = default_constants(HALF)
    wf = initial(inst)
    for r in inst.requests:
        nxt = wf.update(r)
        report = verify_step(wf, nxt, r, cfg, HALF, audit=True)
        assert report.failures == 0
        assert any(c.name == "audit_no_improvement" and c.holds
                   for c in report.checks)
        wf = nxt
    vf, tf = min_f(wf, cfg)
    vg, tg = min_g(wf, cfg)
    with pytest.raises(AuditError):
        _audit(wf, inst.requests[-1], cfg, vf + 1, tf, vg, tg)
    with pytest.raises(AuditError):
        _audit(wf, inst.requests[-1], cfg, vf, tf, vg + 1, tg)


def test_verified_runs_with_general_constants_on_weighted_lines():
    rng = random.Random(74)
    inst = weighted_instance(rng, 4)
    cfg = default_constants(HALF, "general")
    trace = run(inst, AlgorithmConfig("wfa", HALF), verify=True,
                potential_config=cfg)
    assert trace.lemma_failures == 0
    assert trace.phi_final <= trace.opt_cost
