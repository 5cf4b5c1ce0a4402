#!/usr/bin/env python3
"""Tests for PD parsing, validation, resolutions and diagram matching."""
import json
import logging

import pytest

from conftest import TREFOIL
from khtorsion.diagram import (
    OrientedDiagram,
    UnionFind,
    crossing_signs,
    diagram_from_json,
    load_diagram,
    match_diagrams,
    mirror_diagram,
    parse_pd,
    resolve_state,
)
from khtorsion.errors import ArcMultiplicity, MalformedPD, MultiComponentWhereKnotRequired
from khtorsion.moves import R2Plus


def test_trefoil_shape(trefoil):
    assert len(trefoil.crossings) == 3
    assert trefoil.arc_count == 6
    assert trefoil.is_knot
    assert sorted(trefoil.components[0]) == [1, 2, 3, 4, 5, 6]
    assert len(trefoil.faces) == 5
    assert trefoil.render() == TREFOIL


def test_crossing_signs_and_mirror(trefoil):
    assert crossing_signs(trefoil) == (3, 0)
    mirrored = mirror_diagram(trefoil)
    assert crossing_signs(mirrored) == (0, 3)
    assert crossing_signs(mirror_diagram(mirrored)) == (3, 0)


def test_figure_eight_is_amphichiral_in_signs(figure_eight):
    assert crossing_signs(figure_eight) == (2, 2)


@pytest.mark.parametrize("state, circles", [((0, 0, 0), 2), ((1, 1, 1), 3), ((1, 0, 0), 1)])
def test_resolve_state(trefoil, state, circles):
    cs = resolve_state(trefoil, state)
    assert cs.circle_count == circles
    assert sorted(a for c in cs.circles for a in c) == [1, 2, 3, 4, 5, 6]
    assert cs.basepoint_circle == cs.arc_to_circle[1]


def test_resolve_state_length(trefoil):
    with pytest.raises(ValueError):
        resolve_state(trefoil, (0, 1))


@pytest.mark.parametrize("text, error", [
    ("X(1,2,3)", MalformedPD),
    ("Y(1)", MalformedPD),
    ("X(1,2,a,4)", MalformedPD),
    ("X(1,2,3,4)", ArcMultiplicity),
    ("O(1) O(1)", ArcMultiplicity),
    ("O(2)", ArcMultiplicity),
    ("", MalformedPD),
])
def test_parse_pd_rejects(text, error):
    with pytest.raises(error):
        parse_pd(text)


def test_empty_text_with_component_count():
    d = parse_pd("", components=1)
    assert d.loops == (1,)
    assert d.is_knot


def test_basepoint_must_be_an_arc():
    with pytest.raises(MalformedPD):
        parse_pd(TREFOIL, basepoint=9)
    assert parse_pd(TREFOIL, basepoint=4).basepoint == 4


def test_link_warns_unless_knot_required(caplog):
    with caplog.at_level(logging.WARNING, logger="khtorsion.diagram"):
        d = parse_pd("O(1) O(2)")
    assert len(d.components) == 2
    assert "2 components" in caplog.text
    with pytest.raises(MultiComponentWhereKnotRequired):
        parse_pd("O(1) O(2)", require_knot=True)


def test_diagram_from_json_forms(trefoil):
    as_list = diagram_from_json({"pd": [[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]], "basepoint": 2})
    assert as_list.crossings == trefoil.crossings
    assert as_list.basepoint == 2
    assert diagram_from_json({"pd": TREFOIL}).over_forward == trefoil.over_forward
    assert diagram_from_json(TREFOIL) == trefoil
    assert diagram_from_json({"pd": [], "components": 1}).loops == (1,)
    with pytest.raises(MalformedPD):
        diagram_from_json({"crossings": []})
    with pytest.raises(MalformedPD):
        diagram_from_json({"pd": [["a", 1, 2, 3]]})


def test_to_json_reloads(trefoil):
    again = diagram_from_json(trefoil.to_json())
    assert again == trefoil


def test_load_diagram(tmp_path, trefoil):
    pd_file = tmp_path / "trefoil.pd"
    pd_file.write_text(TREFOIL + "\n")
    assert load_diagram(pd_file) == trefoil
    assert load_diagram(pd_file, basepoint=3).basepoint == 3

    json_file = tmp_path / "trefoil.json"
    json_file.write_text(json.dumps({"pd": TREFOIL, "basepoint": 5}))
    assert load_diagram(json_file).basepoint == 5

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(MalformedPD):
        load_diagram(broken)


def test_match_relabelled_trefoil(trefoil):
    shifted = parse_pd("X(2,5,3,6) X(4,1,5,2) X(6,3,1,4)", basepoint=2)
    m = match_diagrams(trefoil, shifted)
    assert m is not None
    assert m.arc_map[1] == 2
    assert sorted(m.crossing_map) == [0, 1, 2]


def test_match_respects_basepoint_and_chirality(trefoil):
    assert match_diagrams(trefoil, trefoil.with_basepoint(2)) is None
    assert match_diagrams(trefoil, mirror_diagram(trefoil)) is None
    assert match_diagrams(parse_pd("O(1) O(2)"), parse_pd("O(1) O(2)", basepoint=2)) is not None


def test_union_find_groups():
    uf = UnionFind(range(5))
    assert uf.union(0, 3)
    assert not uf.union(3, 0)
    uf.union(1, 4)
    assert sorted(uf.groups()) == [[0, 3], [1, 4], [2]]


def test_json_keeps_orientations_that_pd_text_loses():
    clasp = R2Plus((1, 2), 2).apply(parse_pd("O(1) O(2)")).target
    flipped = OrientedDiagram(clasp.crossings, tuple(not f for f in clasp.over_forward), clasp.loops,
                              clasp.basepoint)
    assert diagram_from_json(flipped.to_json()) == flipped
    assert diagram_from_json({"pd": flipped.render(), "over_forward": list(flipped.over_forward)}) == flipped
    assert parse_pd(flipped.render()).over_forward == parse_pd(clasp.render()).over_forward
