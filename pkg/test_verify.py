#!/usr/bin/env python3
"""Tests for movies and the cobordism relations checked on them."""
import pytest

from khtorsion.errors import (
    EndpointNotKnot,
    FrameMismatch,
    MalformedMovie,
    MovieError,
    NoSuchHandle,
    NotConnected,
    NotReversePair,
)
from khtorsion.movie import (
    band_unlinking_witness,
    concatenate,
    load_movie,
    mirror_movie,
    parse_movie,
    surface_components,
)
from khtorsion.verify import (
    check_ribbon_injective,
    corollary_bounds,
    dotted_movie,
    find_saddle_pairs,
    verify_neck_cutting,
    verify_reverse_saddles,
    verify_theorem1,
)

P = 10007

DISCONNECTED = {
    "frames": ["O(1)", None, None],
    "moves": [{"type": "birth", "locus": {}}, {"type": "death", "locus": {"loop": 2}}],
}


@pytest.fixture
def movie(corpus):
    def load(name):
        return load_movie(corpus / f"{name}.json")
    return load


@pytest.mark.parametrize("name, stats, genus", [
    ("ribbon", (1, 1, 0), 0),
    ("tube", (0, 2, 0), 1),
    ("genus0", (1, 2, 1), 0),
    ("trefoil_band_death", (0, 1, 1), 0),
    ("trefoil_band_unknotting", (0, 2, 0), 1),
    ("r1_kinks", (0, 0, 0), 0),
])
def test_corpus_statistics(movie, name, stats, genus):
    mov = movie(name)
    assert mov.name == name
    assert mov.statistics == stats
    assert mov.connected
    assert mov.genus == genus
    assert mov.j_degree == stats[0] + stats[2] - stats[1]


@pytest.mark.parametrize("name", ["ribbon", "tube", "genus0", "trefoil_band_death"])
def test_theorem1_on_morse_movies(movie, name):
    report = verify_theorem1(movie(name), P)
    assert report.passed
    assert report.unit_scalar in (1, -1)
    assert report.to_json()["pass"] is True


@pytest.mark.slow
@pytest.mark.parametrize("name", ["r1_kinks", "r2_ribbon", "r3_pass", "trefoil_band_unknotting"])
def test_theorem1_through_reidemeister_moves(movie, name):
    report = verify_theorem1(movie(name), P)
    assert report.passed
    assert report.unit_scalar in (1, -1)


def test_theorem1_needs_a_connected_surface():
    mov = parse_movie(DISCONNECTED)
    assert surface_components(mov) == 2
    assert mov.genus is None
    with pytest.raises(NotConnected):
        verify_theorem1(mov, P)


def test_neck_cutting_on_the_tube(movie):
    report = verify_neck_cutting(movie("tube"), 0, P)
    assert report.passed
    assert report.details["feet"] == [1, 1]


def test_neck_cutting_preconditions(movie):
    with pytest.raises(NoSuchHandle):
        verify_neck_cutting(movie("ribbon"), 0, P)
    with pytest.raises(NoSuchHandle):
        verify_neck_cutting(movie("genus0"), 1, P)
    with pytest.raises(NoSuchHandle):
        verify_neck_cutting(movie("tube"), 1, P)


def test_reverse_saddles(movie):
    mov = movie("genus0")
    assert find_saddle_pairs(mov) == [1]
    assert find_saddle_pairs(movie("tube")) == [0]
    assert find_saddle_pairs(movie("ribbon")) == []
    report = verify_reverse_saddles(mov, 1, P)
    assert report.passed
    assert report.details["moves"] == [1, 2]
    with pytest.raises(NotReversePair):
        verify_reverse_saddles(mov, 0, P)


def test_dotted_movie_replaces_the_pair(movie):
    dotted = dotted_movie(movie("genus0"), 1, 2)
    assert [s.kind for s in dotted.steps] == ["birth", "dot", "death"]
    assert dotted.statistics == (1, 0, 1)


def test_ribbon_movies_are_injective(movie):
    report = check_ribbon_injective(movie("ribbon"), P)
    assert report.passed
    assert report.details["injective"]
    assert report.details["free_rank_source"] == report.details["free_rank_target"] == 1
    with pytest.raises(MovieError):
        check_ribbon_injective(movie("genus0"), P)


def test_corollary_on_a_knot_alone(trefoil, unknot):
    report = corollary_bounds(trefoil, p=P)
    assert report.passed
    assert report.details["xo"] == report.details["band_unlinking_lower_bound"] == 1
    assert corollary_bounds(unknot, p=P).details["xo"] == 0


def test_corollary_on_a_concordance(movie, trefoil):
    report = corollary_bounds(trefoil, movie("trefoil_band_death"), P)
    assert report.passed
    assert report.details["xo_start"] == report.details["xo_end"] == 1
    assert report.details["genus_bound"]["holds"]
    assert report.details["concordance"] == {"modules_agree": True, "maps_agree": True}
    assert "band_unlinking_upper_bound" not in report.details


@pytest.mark.slow
def test_corollary_with_an_unknotting_witness(movie, trefoil):
    mov = movie("trefoil_band_unknotting")
    assert band_unlinking_witness(mov) == 2
    report = corollary_bounds(trefoil, mov, P)
    assert report.passed
    assert report.details["band_unlinking_upper_bound"] == 2
    assert report.details["genus_bound"]["forward"] == "1 <= max(0, 0) + 2"


def test_corollary_needs_the_knot_at_an_end(movie, figure_eight):
    with pytest.raises(MovieError):
        corollary_bounds(figure_eight, movie("ribbon"), P)


def test_bad_frame_names_the_move(corpus):
    with pytest.raises(FrameMismatch) as info:
        load_movie(corpus / "bad_frame.json")
    assert info.value.move_index == 0


@pytest.mark.parametrize("obj, error", [
    ({"frames": []}, MalformedMovie),
    ({"frames": ["O(1)"], "moves": [{"type": "birth", "locus": {}}]}, MalformedMovie),
    ({"schema": 2, "frames": ["O(1)"]}, MalformedMovie),
    ({"frames": ["O(1)", None], "moves": [{"type": "birth", "locus": {}}]}, EndpointNotKnot),
])
def test_parse_movie_rejects(obj, error):
    with pytest.raises(error):
        parse_movie(obj)


def test_parse_movie_rejects_bad_json():
    with pytest.raises(MalformedMovie):
        parse_movie("{frames")


def test_mirror_movie(movie):
    mov = movie("ribbon")
    mirrored = mirror_movie(mov)
    assert mirrored.statistics == (0, 1, 1)
    assert mirrored.name == "ribbon-mirror"
    assert [s.kind for s in mirrored.steps] == ["saddle", "death"]


def test_concatenate(movie):
    tube = movie("tube")
    twice = concatenate(tube, tube)
    assert twice.statistics == (0, 4, 0)
    assert twice.genus == 2
    assert twice.name == "tube+tube"
    with pytest.raises(FrameMismatch):
        concatenate(tube, movie("trefoil_band_death"))


def test_movie_json_reloads(movie):
    mov = movie("genus0")
    again = parse_movie(mov.to_json())
    assert again.statistics == mov.statistics
    assert again.frames == mov.frames
    assert mov.summary()["genus"] == 0


def test_band_unlinking_witness(movie):
    assert band_unlinking_witness(movie("ribbon")) == 0
    assert band_unlinking_witness(movie("trefoil_band_death")) is None
