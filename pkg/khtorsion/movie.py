"""
Movies: sequences of diagrams joined by elementary moves.

A movie file is JSON::

    {
      "schema": 1,
      "name": "ribbon",
      "frames": [<diagram JSON>, null, ...],
      "moves": [{"type": "birth", "locus": {}}, ...],
      "basepoint_map": [1, 1, ...]
    }

Only the first frame is required. A null frame is the result of applying
the move; a declared frame must be the same diagram up to relabelling and
then replaces the derived one, so later loci use its labels.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .diagram import OrientedDiagram, UnionFind, diagram_from_json, match_diagrams
from .errors import (
    EndpointNotKnot,
    FrameMismatch,
    InputError,
    MalformedMovie,
    MoveNotApplicable,
    MovieError,
)
from .moves import Move, MoveOutcome, R2Minus, R2Plus, move_from_json, reverse_outcome

logger = logging.getLogger(__name__)

MOVIE_SCHEMA = 1


@dataclass(frozen=True)
class Step:
    """One move of a movie, with labels of the frames as the movie declares them."""
    move: Move
    source: OrientedDiagram
    target: OrientedDiagram
    crossing_map: Mapping[int, int]
    arc_map: Mapping[int, int]
    source_arcs: Tuple[int, ...]
    target_arcs: Tuple[int, ...]
    reverse: Move

    @property
    def kind(self) -> str:
        return self.move.kind


@dataclass(frozen=True)
class Movie:
    frames: Tuple[OrientedDiagram, ...]
    steps: Tuple[Step, ...]
    name: str = ""

    @property
    def moves(self) -> Tuple[Move, ...]:
        return tuple(s.move for s in self.steps)

    def _count(self, kind: str) -> int:
        return sum(1 for s in self.steps if s.kind == kind)

    @property
    def births(self) -> int:
        return self._count("birth")

    @property
    def saddles(self) -> int:
        return self._count("saddle")

    @property
    def deaths(self) -> int:
        return self._count("death")

    @property
    def dots(self) -> int:
        return self._count("dot")

    @property
    def connected(self) -> bool:
        return surface_components(self) == 1

    @property
    def genus(self) -> Optional[int]:
        """Genus from 2g = b - m - M; None for disconnected surfaces."""
        if not self.connected:
            return None
        return (self.saddles - self.births - self.deaths) // 2

    @property
    def statistics(self) -> Tuple[int, int, int]:
        """(m, b, M): births, saddles, deaths."""
        return self.births, self.saddles, self.deaths

    @property
    def j_degree(self) -> int:
        return self.births + self.deaths - self.saddles - 2 * self.dots

    def to_json(self) -> Dict[str, Any]:
        return {
            "schema": MOVIE_SCHEMA,
            "name": self.name,
            "frames": [f.to_json() for f in self.frames],
            "moves": [s.move.to_json() for s in self.steps],
            "basepoint_map": [f.basepoint for f in self.frames],
        }

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "m": self.births,
            "b": self.saddles,
            "M": self.deaths,
            "dots": self.dots,
            "genus": self.genus,
            "connected": self.connected,
            "frames": len(self.frames),
        }

    def __len__(self) -> int:
        return len(self.steps)


def surface_components(mov: Movie) -> int:
    """Number of connected components of the surface the movie traces out."""
    uf = UnionFind()
    for k, frame in enumerate(mov.frames):
        for c in range(len(frame.components)):
            uf.add((k, c))
    for k, step in enumerate(mov.steps):
        src, tgt = mov.frames[k], mov.frames[k + 1]
        for a, b in step.arc_map.items():
            uf.union((k, src.component_of(a)), (k + 1, tgt.component_of(b)))
        if step.kind == "saddle":
            touched = [(k, src.component_of(a)) for a in step.source_arcs]
            touched += [(k + 1, tgt.component_of(a)) for a in step.target_arcs]
            for node in touched[1:]:
                uf.union(touched[0], node)
    return len(uf.groups())


def _match_frame(derived: OrientedDiagram, declared: Any, basepoint: Optional[int], index: int):
    """Match a derived frame against its declaration; returns (frame, match)."""
    explicit = basepoint is not None or (isinstance(declared, Mapping) and "basepoint" in declared)
    try:
        frame = diagram_from_json(declared, basepoint)
    except InputError as e:
        raise MalformedMovie(f"frame {index + 1}: {e}")
    candidates = [frame] if explicit else [frame.with_basepoint(a) for a in range(1, frame.arc_count + 1)]
    for candidate in candidates:
        m = match_diagrams(derived, candidate)
        if m is not None:
            return candidate, m
    raise FrameMismatch(f"move produced {derived.render()}, frame declares {frame.render()}", index)


def step_from_outcome(outcome: MoveOutcome, frame: OrientedDiagram, match=None) -> Step:
    """Restate a move outcome in the labels of the frame the movie declares."""
    if match is None:
        return Step(outcome.move, outcome.source, frame, dict(outcome.crossing_map), dict(outcome.arc_map),
                    outcome.source_arcs, outcome.target_arcs, outcome.reverse)
    perm = match.crossing_map
    cmap = {x: perm[y] for x, y in outcome.crossing_map.items()}
    amap = {a: match.arc_map[b] for a, b in outcome.arc_map.items()}
    reverse = outcome.reverse.relabel(match.arc_map, dict(enumerate(perm)))
    if isinstance(outcome.reverse, R2Plus) and outcome.reverse.face is not None:
        x, s = outcome.target.faces[outcome.reverse.face].darts[0]
        face = next(k for k, f in enumerate(frame.faces) if (perm[x], s) in f.darts)
        reverse = R2Plus(reverse.arcs, reverse.over, face)
    target_arcs = tuple(sorted(match.arc_map[a] for a in outcome.target_arcs))
    return Step(outcome.move, outcome.source, frame, cmap, amap, outcome.source_arcs, target_arcs, reverse)


def build_movie(frames: Sequence[Any], moves: Sequence[Move], name: str = "",
                basepoints: Optional[Sequence[Optional[int]]] = None) -> Movie:
    """Apply moves to the first frame, checking every declared frame.

    Args:
        frames: OrientedDiagram, diagram JSON or None per frame; only the
            first must be given.
        moves: one fewer than frames.
        basepoints: optional basepoint arc per frame.

    Raises:
        MalformedMovie: for a missing first frame or a length mismatch.
        FrameMismatch, BadLocus, MoveNotApplicable: at the offending move.
        EndpointNotKnot: if the first or last frame is not a knot.
    """
    if len(frames) != len(moves) + 1:
        raise MalformedMovie(f"{len(frames)} frames for {len(moves)} moves")
    basepoints = list(basepoints or [None] * len(frames))
    if len(basepoints) != len(frames):
        raise MalformedMovie(f"basepoint_map has {len(basepoints)} entries for {len(frames)} frames")
    first = frames[0]
    if first is None:
        raise MalformedMovie("the first frame is required")
    if not isinstance(first, OrientedDiagram):
        try:
            first = diagram_from_json(first, basepoints[0])
        except InputError as e:
            raise MalformedMovie(f"frame 0: {e}")
    elif basepoints[0] is not None:
        first = first.with_basepoint(basepoints[0])
    out_frames = [first]
    steps = []
    for k, move in enumerate(moves):
        current = out_frames[-1]
        try:
            outcome = move.apply(current)
        except MovieError as e:
            if e.move_index is None:
                raise type(e)(str(e), k) from e
            raise
        except InputError as e:
            raise MoveNotApplicable(f"{move.kind} does not yield a valid diagram: {e}", k) from e
        if isinstance(move, R2Minus):
            back = reverse_outcome(outcome)
            outcome = MoveOutcome(outcome.move, outcome.source, outcome.target, outcome.crossing_map,
                                  outcome.arc_map, outcome.source_arcs, outcome.target_arcs, back.move)
        declared = frames[k + 1]
        if isinstance(declared, OrientedDiagram):
            declared = declared.to_json()
        if declared is None:
            frame, match = outcome.target, None
            if basepoints[k + 1] is not None and basepoints[k + 1] != frame.basepoint:
                raise FrameMismatch(
                    f"basepoint moves to arc {frame.basepoint}, basepoint_map says {basepoints[k + 1]}", k)
        else:
            frame, match = _match_frame(outcome.target, declared, basepoints[k + 1], k)
        out_frames.append(frame)
        steps.append(step_from_outcome(outcome, frame, match))
        logger.debug("move %d (%s): %s -> %s", k, move.kind, current.render(), frame.render())
    for where, frame in (("first", out_frames[0]), ("last", out_frames[-1])):
        if not frame.is_knot:
            raise EndpointNotKnot(f"{where} frame {frame.render()} has {len(frame.components)} components")
    mov = Movie(tuple(out_frames), tuple(steps), name)
    logger.info("movie %s: m=%d b=%d M=%d dots=%d genus=%s", name or "<unnamed>",
                mov.births, mov.saddles, mov.deaths, mov.dots, mov.genus)
    return mov


def movie_from_json(obj: Mapping[str, Any]) -> Movie:
    if not isinstance(obj, Mapping):
        raise MalformedMovie("a movie is a JSON object")
    schema = obj.get("schema", MOVIE_SCHEMA)
    if schema != MOVIE_SCHEMA:
        raise MalformedMovie(f"unsupported movie schema {schema!r}")
    frames = obj.get("frames")
    moves = obj.get("moves", [])
    if not isinstance(frames, list) or not frames:
        raise MalformedMovie("a movie needs a non-empty 'frames' list")
    if not isinstance(moves, list):
        raise MalformedMovie("'moves' must be a list")
    return build_movie(frames, [move_from_json(m) for m in moves], str(obj.get("name", "")),
                       obj.get("basepoint_map"))


def parse_movie(text: Union[str, Mapping[str, Any]]) -> Movie:
    """Parse and validate a movie from JSON text (or an already decoded object)."""
    if isinstance(text, Mapping):
        return movie_from_json(text)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedMovie(f"movie is not valid JSON: {e}")
    return movie_from_json(obj)


def load_movie(path: Union[str, Path]) -> Movie:
    path = Path(path)
    mov = parse_movie(path.read_text())
    if not mov.name:
        mov = Movie(mov.frames, mov.steps, path.stem)
    return mov


def mirror_movie(mov: Movie) -> Movie:
    """The same surface run backwards: frames reversed, every move replaced by its reverse."""
    frames: List[Any] = list(reversed(mov.frames))
    moves = [s.reverse for s in reversed(mov.steps)]
    return build_movie(frames, moves, f"{mov.name}-mirror" if mov.name else "")


def concatenate(first: Movie, second: Movie) -> Movie:
    """Run one movie after another; the last frame of the first must be the first of the second."""
    if match_diagrams(first.frames[-1], second.frames[0]) is None:
        raise FrameMismatch("movies do not meet in the same frame", len(first.steps))
    frames: List[Any] = list(first.frames[:-1]) + list(second.frames)
    moves = list(first.moves) + list(second.moves)
    name = f"{first.name}+{second.name}" if first.name or second.name else ""
    return build_movie(frames, moves, name)


def band_unlinking_witness(mov: Movie) -> Optional[int]:
    """Saddles used to reach a crossingless frame using only bands and Reidemeister moves.

    Returns None when the movie contains births, deaths or dots before such
    a frame, or never reaches one.
    """
    bands = 0
    if not mov.frames[0].crossings:
        return 0
    for step, frame in zip(mov.steps, mov.frames[1:]):
        if step.kind in ("birth", "death", "dot"):
            return None
        if step.kind == "saddle":
            bands += 1
        if not frame.crossings:
            return bands
    return None
