import random

import pytest

from nicehfk import moves
from nicehfk.fixtures import NAMES, load_fixture
from nicehfk.homology import compute_hfk
from nicehfk.nicefy import (MODES, NicefyReport, StuckStep, nicefy, step1_kill_bigons,
                            step2_kill_nondisks, step3_distance_one, step4_sw_loop, sw_step)


def test_step1_removes_a_finger_and_its_inverse():
    d = load_fixture("U1")
    r = d.regions[0]
    b = next(es for es in r.edge_sides if d.edges[es[0]].kind == moves.BETA)
    a = next(es for es in r.edge_sides if d.edges[es[0]].kind == moves.ALPHA)
    pushed = moves.push_finger(d, b, [a]).new_diagram
    assert pushed.num_vertices == 3
    report = NicefyReport()
    out, info = step1_kill_bigons(pushed, report)
    assert out.num_vertices == 1 and info["eliminated"] == 1
    assert report.passed


def test_step2_on_annulus(fixtures):
    report = NicefyReport()
    out, info = step2_kill_nondisks(fixtures["A1"], report)
    assert info["cuts"] == 1
    assert all(r.is_disk for r in out.regions)
    assert report.passed


def test_step3_on_h2(fixtures):
    d = fixtures["H2"]
    report = NicefyReport()
    out, info = step3_distance_one(d, report)
    assert info["handles"] >= 1
    assert out.metrics.distance <= 1
    assert report.passed
    names = [c.name for c in report.bound_checks]
    assert "handle 1: b'=b+2" in names and "handle 1: new vertices = d+1" in names


def test_step3_reports_the_known_false_inequality_as_non_gating(fixtures):
    d = fixtures["H2"]
    report = NicefyReport()
    step3_distance_one(d, report)
    (c,) = [c for c in report.bound_checks if c.name == "step3: v3 <= v2 b2"]
    assert not c.gating


def test_sw_step_on_h1_is_a_terminal_finger(fixtures):
    out, log = sw_step(fixtures["H1"])
    assert log["case"] == "terminal"
    assert log["distance"] == 1
    assert out.new_diagram.metrics.badness == fixtures["H1"].metrics.badness - 1


def test_sw_step_refuses_nice_diagram(fixtures):
    with pytest.raises(StuckStep):
        sw_step(fixtures["U1"])
    with pytest.raises(ValueError):
        sw_step(fixtures["H1"], mode="bogus")


@pytest.mark.parametrize("name", ["U1", "T2"])
def test_pipeline_on_unknot_fixtures(fixtures, name):
    out, report = nicefy(fixtures[name])
    assert out.metrics.nice and report.passed
    assert out.genus <= 3


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("mode", MODES)
def test_pipeline_checks_pass_on_fixtures(fixtures, name, mode):
    out, report = nicefy(fixtures[name], mode=mode)
    assert out.metrics.nice
    assert report.passed, [c.to_json() for c in report.failed_checks]
    assert [s.step for s in report.steps] == [0, 1, 2, 3, 4]
    assert report.steps[-1].badness == 0


def test_sw_loop_records_complexity(fixtures):
    d, _ = step1_kill_bigons(fixtures["H1"])
    report = NicefyReport()
    out, info = step4_sw_loop(d, "modified", report)
    assert out.metrics.nice and info["sw_steps"] == len(report.sw_log)
    for log in report.sw_log:
        assert tuple(log["c_d_before"]) >= tuple(log["c_d_after"]) or log["case"] == "hard-keep"


@pytest.mark.parametrize("name", ["TREF", "F8", "H1"])
def test_both_modes_give_the_same_homology(fixtures, name):
    tables = {m: compute_hfk(nicefy(fixtures[name], mode=m)[0]).ranks for m in MODES}
    assert tables["modified"] == tables["original"]


def test_modified_mode_never_adds_more_vertices(fixtures):
    for name in ("TREF", "F8", "H1"):
        mod = nicefy(fixtures[name], "modified")[1].total_new_vertices
        orig = nicefy(fixtures[name], "original")[1].total_new_vertices
        assert mod <= orig


def test_trace_receives_intermediate_diagrams(fixtures):
    seen = []
    nicefy(fixtures["TREF"], trace=lambda label, d: seen.append(label))
    assert seen and all(label.startswith("step") for label in seen)


@pytest.mark.parametrize("seed", range(3))
def test_scrambled_fixtures_nicefy(seed):
    rng = random.Random(seed)
    d = moves.scramble(load_fixture("TREF"), rng, 4)
    out, report = nicefy(d)
    assert out.metrics.nice and report.passed


def test_report_json_shape(fixtures):
    _, report = nicefy(fixtures["TREF"])
    data = report.to_json()
    assert set(data) == {"mode", "steps", "sw_log", "bound_checks", "passed"}
    for c in data["bound_checks"]:
        assert {"name", "lhs", "rhs", "pass"} <= set(c)
