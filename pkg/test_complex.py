#!/usr/bin/env python3
"""Tests for the cube of resolutions over F_p[x]."""
import pytest

from conftest import random_diagram
from khtorsion.algebra import PolyMatrix, Polynomial
from khtorsion.complex import (
    BIRTH,
    DEATH,
    DOT,
    MERGE,
    SPLIT,
    ChainMap,
    FrobeniusData,
    build_complex,
    dot_map,
)
from khtorsion.diagram import mirror_diagram, parse_pd, resolve_state
from khtorsion.errors import NotAChainMap, NotAKnot
from khtorsion.homology import homology

P = 10007


def test_frobenius_axioms():
    assert FrobeniusData.verify(P)
    assert FrobeniusData.verify(3)


def test_frobenius_tables():
    one = Polynomial.one(P)
    x_times_x = FrobeniusData.apply(MERGE, {(1, 1): one}, 0, 2)
    assert x_times_x == {(0,): Polynomial.x(P) ** 2}
    assert FrobeniusData.apply(SPLIT, {(0,): one}, 0, 1) == {(0, 1): one, (1, 0): one}
    assert FrobeniusData.apply(BIRTH, {(): one}, 0, 0) == {(0,): one}
    assert FrobeniusData.apply(DEATH, {(0,): one}, 0, 1) == {}
    assert FrobeniusData.apply(DOT, {(1,): one}, 0, 1) == {(0,): Polynomial.x(P) ** 2}


def test_unknot_complex(unknot):
    c = build_complex(unknot, P)
    assert c.degrees == [0]
    assert c.grades(0) == [(0, 1)]
    assert not c.differentials


def test_trefoil_ranks_follow_resolutions(trefoil):
    c = build_complex(trefoil, P)
    assert c.degrees == [0, 1, 2, 3]
    expected = {}
    for g in c.generators[0] + c.generators[1] + c.generators[2] + c.generators[3]:
        expected.setdefault(sum(g.state), set()).add(g.state)
    for i in c.degrees:
        states = expected[i + trefoil.n_minus]
        assert c.rank(i) == sum(2 ** (resolve_state(trefoil, s).circle_count - 1) for s in states)
    assert c.rank(0) == 2


def assert_differentials_homogeneous(c):
    for i, M in c.differentials.items():
        assert M.shape == (c.rank(i + 1), c.rank(i))
        for r, col, e in M.items():
            assert e.is_monomial
            assert 2 * e.degree == c.generators[i + 1][r].j_grade - c.generators[i][col].j_grade


def test_differentials_square_to_zero_and_are_homogeneous(figure_eight):
    c = build_complex(figure_eight, P)
    c.check()
    assert_differentials_homogeneous(c)


@pytest.mark.parametrize("seed", [pytest.param(s, marks=pytest.mark.slow) if s >= 5 else s for s in range(50)])
def test_random_diagrams(seed):
    knot, d = random_diagram(seed)
    c = build_complex(d, P)
    for i in c.degrees:
        assert (c.d(i + 1) @ c.d(i)).is_zero()
    assert_differentials_homogeneous(c)
    expected = homology(build_complex(knot, P)).decomposition.signature()
    assert homology(c).decomposition.signature() == expected


def test_mirror_degrees(trefoil):
    c = build_complex(mirror_diagram(trefoil), P)
    assert c.degrees == [-3, -2, -1, 0]


def test_links_need_permission():
    link = parse_pd("O(1) O(2)")
    with pytest.raises(NotAKnot):
        build_complex(link, P)
    c = build_complex(link, P, allow_links=True)
    assert c.rank(0) == 2
    assert sorted(j for _, j in c.grades(0)) == [0, 2]


def test_dot_on_basepoint_circle_is_x(trefoil):
    c = build_complex(trefoil, P)
    f = dot_map(c, trefoil.basepoint)
    assert f.j_degree == -2
    x = Polynomial.x(P)
    for i in c.degrees:
        assert f.block(i) == PolyMatrix.identity(c.rank(i), P).scale(x)


def test_dot_squares_to_t(trefoil):
    c = build_complex(trefoil, P)
    for arc in range(1, trefoil.arc_count + 1):
        f = dot_map(c, arc)
        twice = f @ f
        for i in c.degrees:
            assert twice.block(i) == PolyMatrix.identity(c.rank(i), P).scale(Polynomial.x(P) ** 2)


def test_dot_map_rejects_unknown_arc(trefoil):
    with pytest.raises(ValueError):
        dot_map(build_complex(trefoil, P), 7)


def test_chain_map_algebra(trefoil):
    c = build_complex(trefoil, P)
    ident = ChainMap.identity(c).check()
    assert (ident @ ident).blocks == ident.blocks
    assert (ident + ident).block(0) == PolyMatrix.identity(c.rank(0), P).scale(2)
    assert ident.scale(Polynomial.x(P)).j_degree == -2
    assert not ident.is_zero()
    with pytest.raises(ValueError):
        ident + dot_map(c, 1)


def test_chain_maps_must_share_complexes(trefoil, figure_eight):
    a = ChainMap.identity(build_complex(trefoil, P))
    b = ChainMap.identity(build_complex(figure_eight, P))
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ValueError):
        a @ b
    assert (a + ChainMap.identity(build_complex(trefoil, P))).block(0) == a.block(0).scale(2)


def test_broken_chain_map_is_caught(trefoil):
    c = build_complex(trefoil, P)
    blocks = {i: PolyMatrix.identity(c.rank(i), P) for i in c.degrees}
    blocks[1] = PolyMatrix.zeros(c.rank(1), c.rank(1), P)
    with pytest.raises(NotAChainMap):
        ChainMap(c, c, blocks, 0).check()
