from fractions import Fraction

import pytest

from nicehfk.diagram import (ALPHA, BETA, Diagram, MalformedDiagram, canonical, complexity,
                             parse, serialize)
from nicehfk.fixtures import NAMES, fixture_text


def test_u1_single_rectangle(fixtures):
    d = fixtures["U1"]
    assert (d.num_vertices, len(d.edges), len(d.regions), d.genus) == (1, 2, 1, 1)
    (r,) = d.regions
    assert r.edge_count == 4 and r.is_rectangle and r.badness == 0
    assert r.euler_measure == 0
    m = d.metrics
    assert (m.badness, m.bigons, m.nice, m.distance) == (0, 0, True, 0)
    assert m.euler_identity() == (0, 0)


def test_t2_metrics(fixtures):
    m = fixtures["T2"].metrics
    assert (m.genus, m.badness, m.badness_z, m.bigons, m.distance) == (1, 1, 1, 2, 1)
    assert m.euler_identity() == (2, 2)


@pytest.mark.parametrize("name", NAMES)
def test_every_corner_in_exactly_one_region(fixtures, name):
    d = fixtures[name]
    corners = [c for r in d.regions for c in r.corners]
    assert sorted(corners) == [(v, q) for v in range(d.num_vertices) for q in range(4)]


@pytest.mark.parametrize("name", NAMES)
def test_total_euler_measure_is_two_minus_two_g(fixtures, name):
    d = fixtures[name]
    assert sum(r.euler_measure for r in d.regions) == 2 - 2 * d.genus


@pytest.mark.parametrize("name", [n for n in NAMES if n != "A1"])
def test_euler_identity_on_disk_fixtures(fixtures, name):
    lhs, rhs = fixtures[name].metrics.euler_identity()
    assert lhs == rhs


def test_disk_region_euler_measures(fixtures):
    for d in fixtures.values():
        for r in d.regions:
            if r.is_disk:
                n = r.edge_count // 2
                assert r.euler_measure == 1 - Fraction(n, 2)


def test_annulus_fixture(fixtures):
    d = fixtures["A1"]
    (ann,) = [r for r in d.regions if not r.is_disk]
    assert len(ann.boundary) == 2 and ann.genus == 0 and ann.ugliness == 1
    assert ann.euler_characteristic == 0
    assert d.genus == 1


def test_distances(fixtures):
    assert fixtures["U1"].distances == (0,)
    h2 = fixtures["H2"]
    far = [r for r in h2.regions if r.is_bad and r.id != h2.z_region and h2.distances[r.id] == 2]
    assert len(far) == 1
    path = h2.heegaard_path(far[0].id)
    assert len(path) == 2 and all(h2.edges[e].kind == BETA for e, _ in path)


def test_h1_chain_of_two_rectangles_into_z(fixtures):
    from nicehfk.nicefy import _select
    d = fixtures["H1"]
    D, phi, dist = _select(d)
    assert D.edge_count == 6 and dist == 1
    cyc = list(D.boundary[0])
    a2 = cyc[(cyc.index(phi) + 3) % len(cyc)]
    chain, terminal, _ = d.walk_rectangle_chain(a2, 1)
    assert len(chain) == 2 and terminal == d.z_region
    assert all(d.regions[r].is_rectangle for r in chain)


def test_complexity_orders_lexicographically(fixtures):
    d = fixtures["TREF"]
    assert complexity(d, 1) == (2, -2)
    assert (1, -1) < (2, -2) and (2, -2) < (2, -1, -1)


@pytest.mark.parametrize("name", NAMES)
def test_serialize_round_trip(fixtures, name):
    d = fixtures[name]
    again = parse(serialize(d))
    assert again == canonical(d)
    assert serialize(again) == serialize(d)


def test_fixture_files_carry_provenance():
    for name in NAMES:
        text = fixture_text(name)
        assert text.splitlines()[1].startswith(f"# {name}:")


def test_renumbering_preserves_structure():
    text = "heegaard v1\nalpha 0: 7\nbeta 0: 7\nsign 7 +\nz 7 0\nw 7 1\n"
    d = parse(text)
    assert d.alpha == ((0,),) and d.z == (0, 0) and d.w == (0, 1)


@pytest.mark.parametrize("text, fragment", [
    ("alpha 0: 0\n", "header"),
    ("heegaard v1\nalpha 0: 0\nbeta 0: 0\nsign 0 +\nz 0 0\n", "missing w"),
    ("heegaard v1\nalpha 0: 0\nbeta 0: 0\nsign 0 +\nz 0 4\nw 0 0\n", "quadrant"),
    ("heegaard v1\nalpha 0: 0 1\nalpha 1: 1\nbeta 0: 0 1\nsign 0 +\nsign 1 -\nz 0 0\nw 0 0\n",
     "appears twice"),
    ("heegaard v1\nalpha 0: 0\nbeta 0: 0\nz 0 0\nw 0 0\n", "without sign"),
    ("heegaard v1\nalpha 0: 0\nbeta 0: 0\nsign 0 +\nz 0 0\nw 0 0\nbogus\n", "unrecognised"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(MalformedDiagram) as info:
        parse(text)
    assert fragment in str(info.value)


def test_parse_error_reports_line_number():
    with pytest.raises(MalformedDiagram) as info:
        parse("heegaard v1\nalpha 0: 0\nbeta 0: x\n")
    assert info.value.line == 3


def test_sphere_rejected():
    # two opposite-sign points on one curve pair bound four bigons: genus 0
    d = Diagram(((0, 1),), ((0, 1),), (1, -1), (0, 0), (0, 1))
    assert any("genus" in p for p in d.problems())


def test_edge_ids_alpha_first(fixtures):
    d = fixtures["TREF"]
    kinds = [e.kind for e in d.edges]
    assert kinds == sorted(kinds) and kinds[0] == ALPHA
