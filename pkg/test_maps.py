#!/usr/bin/env python3
"""Tests for elementary cobordism maps and movie maps."""
import pytest

from khtorsion.complex import ChainMap
from khtorsion.diagram import parse_pd
from khtorsion.errors import MoveNotApplicable
from khtorsion.homology import homology, identity_homology_map, induced_homology_map
from khtorsion.maps import (
    MORSE_DEGREES,
    clear_cache,
    elementary_map,
    frame_complex,
    frame_homology,
    is_quasi_isomorphism,
    mirror_movie_map,
    movie_map,
    reidemeister_inverse,
)
from khtorsion.movie import load_movie, mirror_movie
from khtorsion.moves import Birth, Death, Dot, R1Plus, R2Plus, Saddle

P = 10007


@pytest.mark.parametrize("move", [Birth(), Saddle((1, 1)), Dot(1)])
def test_morse_maps_on_the_unknot(unknot, move):
    f = elementary_map(move, frame_complex(unknot, P))
    assert f.j_degree == MORSE_DEGREES[move.kind]
    f.check()


def test_death_after_birth(unknot):
    born = elementary_map(Birth(), frame_complex(unknot, P))
    f = elementary_map(Death(2), born.target)
    assert f.j_degree == 1
    assert f.target.diagram.loops == (1,)
    composite = induced_homology_map(f @ born)
    assert composite.matrices[0].is_zero()


def test_split_then_merge_is_multiplication_by_2x(unknot):
    split = elementary_map(Saddle((1, 1)), frame_complex(unknot, P))
    merge = elementary_map(Saddle((1, 2)), split.target)
    composite = induced_homology_map(merge @ split)
    assert composite.j_degree == -2
    entry = composite.matrices[0][0, 0]
    assert entry.is_monomial and entry.degree == 1
    assert entry.leading_coefficient.signed() in (2, -2)


@pytest.mark.parametrize("move", [R1Plus(1, 1, True), R1Plus(1, -1, False)])
def test_reidemeister_one_is_a_quasi_isomorphism(unknot, move):
    source = frame_complex(unknot, P)
    f = elementary_map(move, source)
    assert f.j_degree == 0
    assert is_quasi_isomorphism(f)
    phi = induced_homology_map(f, homology(source), homology(f.target))
    assert phi.is_injective()
    assert phi.source.free_rank_total == phi.target.free_rank_total == 1


def test_reidemeister_two_on_two_loops():
    source = frame_complex(parse_pd("O(1) O(2)"), P)
    f = elementary_map(R2Plus((1, 2), 2), source)
    assert len(f.target.diagram.crossings) == 2
    assert is_quasi_isomorphism(f)
    assert not is_quasi_isomorphism(ChainMap(f.source, f.target, {}, 0))


def test_solved_maps_are_cached_and_recomputable(unknot):
    source = frame_complex(unknot, P)
    first = elementary_map(R1Plus(1, 1, True), source)
    assert elementary_map(R1Plus(1, 1, True), source) is first
    clear_cache()
    again = elementary_map(R1Plus(1, 1, True), frame_complex(unknot, P))
    assert again is not first
    assert all(again.block(i) == first.block(i) for i in first.degrees)


def test_step_must_start_at_the_given_complex(corpus):
    mov = load_movie(corpus / "r1_kinks.json")
    with pytest.raises(MoveNotApplicable):
        elementary_map(mov.steps[1], frame_complex(mov.frames[0], P))


def test_movie_map_degree(corpus):
    mov = load_movie(corpus / "ribbon.json")
    f = movie_map(mov, P)
    assert f.j_degree == mov.j_degree == 0
    assert f.source.diagram == mov.frames[0]
    assert f.target.diagram == mov.frames[-1]


def test_reidemeister_map_ignores_earlier_solves(corpus):
    clear_cache()
    mov = load_movie(corpus / "r1_kinks.json")
    alone = elementary_map(mov.steps[1], frame_complex(mov.frames[1], P))
    blocks = {i: alone.block(i) for i in alone.degrees}
    clear_cache()
    elementary_map(mov.steps[0], frame_complex(mov.frames[0], P))
    after = elementary_map(mov.steps[1], frame_complex(mov.frames[1], P))
    assert after.degrees == alone.degrees
    assert all(after.block(i) == blocks[i] for i in after.degrees)


def _reidemeister_steps(mov):
    return [k for k, step in enumerate(mov.steps) if step.kind not in MORSE_DEGREES]


@pytest.mark.parametrize("name", ["r1_kinks", "r2_ribbon", pytest.param("r3_pass", marks=pytest.mark.slow)])
def test_reidemeister_moves_keep_homology(corpus, name):
    mov = load_movie(corpus / f"{name}.json")
    for k in _reidemeister_steps(mov):
        before = frame_homology(mov.frames[k], P).decomposition.signature()
        after = frame_homology(mov.frames[k + 1], P).decomposition.signature()
        assert before == after, f"step {k}"


@pytest.mark.parametrize("name", ["r1_kinks", "r2_ribbon", pytest.param("r3_pass", marks=pytest.mark.slow)])
def test_reidemeister_map_and_its_reverse_compose_to_the_identity(corpus, name):
    mov = load_movie(corpus / f"{name}.json")
    mirrored = mirror_movie(mov)
    n = len(mov.steps)
    for k in _reidemeister_steps(mov):
        back_step = mirrored.steps[n - 1 - k]
        f = elementary_map(mov.steps[k], frame_complex(mov.frames[k], P))
        g = reidemeister_inverse(back_step, f.target, f.source, f)
        h0, h1 = frame_homology(mov.frames[k], P), frame_homology(mov.frames[k + 1], P)
        assert induced_homology_map(g @ f, h0, h0).scalar_to(identity_homology_map(h0)).value == 1
        assert induced_homology_map(f @ g, h1, h1).scalar_to(identity_homology_map(h1)).value == 1
        solved = elementary_map(back_step, f.target)
        assert induced_homology_map(solved @ f, h0, h0).is_injective()


def test_solved_reverse_of_a_kink_is_a_unit_multiple_of_the_identity(corpus):
    mov = load_movie(corpus / "r1_kinks.json")
    mirrored = mirror_movie(mov)
    for k in _reidemeister_steps(mov):
        f = elementary_map(mov.steps[k], frame_complex(mov.frames[k], P))
        back = elementary_map(mirrored.steps[len(mov.steps) - 1 - k], f.target)
        h = frame_homology(mov.frames[k], P)
        lam = induced_homology_map(back @ f, h, h).scalar_to(identity_homology_map(h))
        assert lam is not None


def test_mirror_movie_map_undoes_reidemeister_moves(corpus):
    mov = load_movie(corpus / "r1_kinks.json")
    f, back = movie_map(mov, P), mirror_movie_map(mov, P)
    assert back.source.diagram == mov.frames[-1]
    assert back.target.diagram == mov.frames[0]
    h = frame_homology(mov.frames[0], P)
    assert induced_homology_map(back @ f, h, h).is_identity()
