"""
Elementary moves on diagrams.

Every move applied to a diagram yields a MoveOutcome: the new diagram,
which crossings and arcs persist (and under which labels), the arcs the
move touches on either side, and the move that undoes it. Arc labels of
the result are compacted to 1..n keeping their order; new arcs take the
next free labels and new crossings go to the end of the list.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, List, Mapping, Optional, Sequence, Tuple, Type

from .diagram import Face, OrientedDiagram, Slot, UnionFind, compact_diagram, match_diagrams
from .errors import BadLocus, MalformedMovie, MapConstructionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MoveOutcome:
    move: "Move"
    source: OrientedDiagram
    target: OrientedDiagram
    crossing_map: Mapping[int, int]
    arc_map: Mapping[int, int]
    source_arcs: Tuple[int, ...]
    target_arcs: Tuple[int, ...]
    reverse: "Move" = field(repr=False)


class _Working:
    """Mutable copy of a diagram while a move is carried out."""

    def __init__(self, d: OrientedDiagram):
        self.d = d
        self.crossings: List[List[int]] = [list(c) for c in d.crossings]
        self.over_forward: List[bool] = list(d.over_forward)
        self.loops: List[int] = list(d.loops)
        self.basepoint = d.basepoint
        self._next = d.arc_count + 1
        self.removed: set = set()

    def fresh(self) -> int:
        label = self._next
        self._next += 1
        return label

    def set(self, slot: Slot, arc: int):
        self.crossings[slot[0]][slot[1]] = arc

    def add_crossing(self, arcs: Sequence[int], over_forward: bool) -> int:
        self.crossings.append(list(arcs))
        self.over_forward.append(over_forward)
        return len(self.crossings) - 1

    def finish(self, move: "Move", persisting: Mapping[int, int], source_arcs: Sequence[int],
               target_arcs: Sequence[int], reverse_of) -> MoveOutcome:
        """Compact labels and package the outcome.

        Args:
            persisting: source arc -> working label, for arcs that survive.
            reverse_of: callable (relabel map, crossing map) -> reverse move.
        """
        kept = [k for k in range(len(self.crossings)) if k not in self.removed]
        crossing_pos = {k: n for n, k in enumerate(kept)}
        target, relabel = compact_diagram(
            [self.crossings[k] for k in kept],
            [self.over_forward[k] for k in kept],
            self.loops,
            self.basepoint,
        )
        crossing_map = {k: crossing_pos[k] for k in range(len(self.d.crossings)) if k in crossing_pos}
        arc_map = {a: relabel[w] for a, w in persisting.items() if w in relabel}
        return MoveOutcome(
            move=move,
            source=self.d,
            target=target,
            crossing_map=crossing_map,
            arc_map=arc_map,
            source_arcs=tuple(sorted(set(source_arcs))),
            target_arcs=tuple(sorted({relabel[w] for w in target_arcs})),
            reverse=reverse_of(relabel, crossing_pos),
        )


def _check_arc(d: OrientedDiagram, arc: int):
    if not 1 <= arc <= d.arc_count:
        raise BadLocus(f"arc {arc} is not in {d.render()}")


def _check_crossing(d: OrientedDiagram, x: int):
    if not 0 <= x < len(d.crossings):
        raise BadLocus(f"crossing {x} is not in {d.render()}")


def _identity(d: OrientedDiagram) -> Dict[int, int]:
    return {a: a for a in range(1, d.arc_count + 1)}


def _darts_of(d: OrientedDiagram, face: Face, arc: int) -> List[Slot]:
    return [x for x in face.darts if d.crossings[x[0]][x[1]] == arc]


@dataclass(frozen=True)
class Move:
    """Base class; ``kind`` is the JSON type tag."""
    kind: ClassVar[str] = ""
    morse: ClassVar[bool] = False

    def apply(self, d: OrientedDiagram) -> MoveOutcome:
        raise NotImplementedError

    def locus(self) -> Dict[str, Any]:
        return {}

    def to_json(self) -> Dict[str, Any]:
        return {"type": self.kind, "locus": self.locus()}

    def relabel(self, arc_map: Mapping[int, int], crossing_map: Mapping[int, int]) -> "Move":
        """The same move with its locus renamed."""
        return self


@dataclass(frozen=True)
class Birth(Move):
    kind: ClassVar[str] = "birth"
    morse: ClassVar[bool] = True

    def apply(self, d: OrientedDiagram) -> MoveOutcome:
        w = _Working(d)
        loop = w.fresh()
        w.loops.append(loop)
        return w.finish(self, _identity(d), (), (loop,),
                        lambda rl, cm: Death(rl[loop]))


@dataclass(frozen=True)
class Death(Move):
    loop: int = 0
    kind: ClassVar[str] = "death"
    morse: ClassVar[bool] = True

    def apply(self, d: OrientedDiagram) -> MoveOutcome:
        if self.loop not in d.loops:
            raise BadLocus(f"arc {self.loop} is not a crossingless circle of {d.render()}")
        if self.loop == d.basepoint:
            raise BadLocus(f"death of the basepoint circle {self.loop}; move the basepoint first")
        w = _Working(d)
        w.loops.remove(self.loop)
        persisting = {a: a for a in range(1, d.arc_count + 1) if a != self.loop}
        return w.finish(self, persisting, (self.loop,), (), lambda rl, cm: Birth())

    def locus(self):
        return {"loop": self.loop}

    def relabel(self, arc_map, crossing_map):
        return Death(arc_map[self.loop])


@dataclass(frozen=True)
class Saddle(Move):
    """An oriented band joining two arcs (or pinching one arc off itself)."""
    arcs: Tuple[int, int] = (0, 0)
    kind: ClassVar[str] = "saddle"
    morse: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(sorted(self.arcs)))

    def apply(self, d: OrientedDiagram) -> MoveOutcome:
        a, b = self.arcs
        _check_arc(d, a)
        _check_arc(d, b)
        w = _Working(d)
        ident = _identity(d)
        if a == b:
            loop = w.fresh()
            w.loops.append(loop)
            return w.finish(self, ident, (a,), (a, loop),
                            lambda rl, cm: Saddle((rl[a], rl[loop])))
        loop_a, loop_b = d.is_loop(a), d.is_loop(b)
        if loop_a or loop_b:
            if loop_a and loop_b:
                keep, drop = min(a, b), max(a, b)
            else:
                keep, drop = (b, a) if loop_a else (a, b)
            w.loops.remove(drop)
            if w.basepoint == drop:
                w.basepoint = keep
            persisting = {k: k for k in ident if k != drop}
            return w.finish(self, persisting, (a, b), (keep,),
                            lambda rl, cm: Saddle((rl[keep], rl[keep])))
        for face in d.faces:
            for x in _darts_of(d, face, a):
                for y in _darts_of(d, face, b):
                    if d.dart_is_forward(x) == d.dart_is_forward(y):
                        ha, hb = d.head(a), d.head(b)
                        w.set(ha, b)
                        w.set(hb, a)
                        return w.finish(self, ident, (a, b), (a, b),
                                        lambda rl, cm: Saddle((rl[a], rl[b])))
        raise BadLocus(f"arcs {a} and {b} share no face they run around coherently")

    def locus(self):
        return {"arcs": list(self.arcs)}

    def relabel(self, arc_map, crossing_map):
        return Saddle((arc_map[self.arcs[0]], arc_map[self.arcs[1]]))


@dataclass(frozen=True)
class Dot(Move):
    arc: int = 0
    kind: ClassVar[str] = "dot"

    def apply(self, d: OrientedDiagram) -> MoveOutcome:
        _check_arc(d, self.arc)
        w = _Working(d)
        return w.finish(self, _identity(d), (self.arc,), (self.arc,),
                        lambda rl, cm: Dot(rl[self.arc]))

    def locus(self):
        return {"arc": self.arc}

    def relabel(self, arc_map, crossing_map):
        return Dot(arc_map[self.arc])


@dataclass(frozen=True)
class R1Plus(Move):
    """Add a kink on ``arc``; ``under_first`` says whether the strand meets the crossing first as under-strand."""
    arc: int = 0
    sign: int = 1
    under_first: bool = True
    kind: ClassVar[str] = "r1+"

    def apply(self, d: OrientedDiagram) -> MoveOutcome:
        e = self.arc
        _check_arc(d, e)
        if self.sign not in (1, -1):
            raise BadLocus(f"kink sign must be +1 or -1, got {self.sign}")
        w = _Working(d)
        f = w.fresh()
        if d.is_loop(e):
            g = e
            w.loops.remove(e)
        else:
            g = w.fresh()
            w.set(d.head(e), g)
        if self.under_first:
            arcs = (e, f, f, g) if self.sign > 0 else (e, g, f, f)
        else:
            arcs = (f, e, g, f) if self.sign > 0 else (f, f, g, e)
        new = w.add_crossing(arcs, self.sign > 0)
        return w.finish(self, _identity(d), (e,), (e, f, g),
                        lambda rl, cm: R1Minus(cm[new], rl[f]))

    def locus(self):
        return {"arc": self.arc, "sign": self.sign, "under_first": self.under_first}

    def relabel(self, arc_map, crossing_map):
        return R1Plus(arc_map[self.arc], self.sign, self.under_first)


@dataclass(frozen=True)
class R1Minus(Move):
    """Remove the kink at ``crossing``; ``loop`` names the kink's small arc when two qualify."""
    crossing: int = 0
    loop: Optional[int] = None
    kind: ClassVar[str] = "r1-"

    def apply(self, d: OrientedDiagram) -> MoveOutcome:
        x = self.crossing
        _check_crossing(d, x)
        c = d.crossings[x]
        candidates = sorted({c[s] for s in range(4) if c[s] == c[(s + 1) % 4]})
        if not candidates:
            raise BadLocus(f"crossing {x} of {d.render()} is not a kink")
        if self.loop is not None:
            if self.loop not in candidates:
                raise BadLocus(f"arc {self.loop} is not a kink loop at crossing {x}")
            f = self.loop
        else:
            f = sorted(candidates, key=lambda a: (a == d.basepoint, a))[0]
        if f == d.basepoint:
            raise BadLocus(f"the basepoint lies on the kink loop {f}")
        rest = [s for s in range(4) if c[s] != f]
        e_slot = next(s for s in rest if d.role((x, s)) == "head")
        g_slot = next(s for s in rest if d.role((x, s)) == "tail")
        e, g = c[e_slot], c[g_slot]
        w = _Working(d)
        w.removed.add(x)
        if e == g:
            w.loops.append(e)
        else:
            w.set(d.head(g), e)
            if w.basepoint == g:
                w.basepoint = e
        gone = {f} if e == g else {f, g}
        persisting = {a: a for a in range(1, d.arc_count + 1) if a not in gone}
        sign, under_first = d.signs[x], e_slot == 0
        return w.finish(self, persisting, (e, f, g), (e,),
                        lambda rl, cm: R1Plus(rl[e], sign, under_first))

    def locus(self):
        out = {"crossing": self.crossing}
        if self.loop is not None:
            out["loop"] = self.loop
        return out

    def relabel(self, arc_map, crossing_map):
        return R1Minus(crossing_map[self.crossing], None if self.loop is None else arc_map[self.loop])


@dataclass(frozen=True)
class R2Plus(Move):
    """Push arc ``over`` across the other arc inside a common face, creating two crossings."""
    arcs: Tuple[int, int] = (0, 0)
    over: int = 0
    face: Optional[int] = None
    kind: ClassVar[str] = "r2+"

    def _face(self, d: OrientedDiagram) -> Optional[Face]:
        needed = [a for a in self.arcs if not d.is_loop(a)]
        if not needed:
            return None
        if self.face is not None:
            if not 0 <= self.face < len(d.faces):
                raise BadLocus(f"face {self.face} is not in {d.render()}")
            face = d.faces[self.face]
            if not all(_darts_of(d, face, a) for a in needed):
                raise BadLocus(f"face {self.face} does not touch arcs {needed}")
            return face
        for face in d.faces:
            if all(_darts_of(d, face, a) for a in needed):
                return face
        raise BadLocus(f"arcs {list(self.arcs)} share no face")

    def apply(self, d: OrientedDiagram) -> MoveOutcome:
        a, b = self.arcs
        _check_arc(d, a)
        _check_arc(d, b)
        if a == b:
            raise BadLocus("a Reidemeister II move needs two different arcs")
        if self.over not in (a, b):
            raise BadLocus(f"over arc {self.over} is not one of {list(self.arcs)}")
        face = self._face(d)
        w = _Working(d)

        def forward(arc: int) -> bool:
            return d.is_loop(arc) or d.dart_is_forward(_darts_of(d, face, arc)[0])

        def split(arc: int, fwd: bool) -> Tuple[int, int, int]:
            mid = w.fresh()
            if d.is_loop(arc):
                w.loops.remove(arc)
                return arc, mid, arc
            head = w.fresh()
            w.set(d.head(arc), head)
            return (arc, mid, head) if fwd else (head, mid, arc)

        fa, fb = forward(a), forward(b)
        a1, a2, a3 = split(a, fa)
        b1, b2, b3 = split(b, fb)
        under_is_a = self.over == b
        incoming = {
            "P1": {"a": a1 if fa else a2, "b": b2 if fb else b3},
            "P2": {"a": a2 if fa else a3, "b": b1 if fb else b2},
        }
        rings = {"P1": [b2, a1, b3, a2], "P2": [b1, a3, b2, a2]}
        new = []
        for name in ("P1", "P2"):
            ring = rings[name]
            under_in = incoming[name]["a" if under_is_a else "b"]
            over_in = incoming[name]["b" if under_is_a else "a"]
            k = next(s for s in range(4) if ring[s] == under_in and (s % 2 == (1 if under_is_a else 0)))
            rotated = ring[k:] + ring[:k]
            new.append(w.add_crossing(rotated, rotated[1] == over_in))
        return w.finish(self, _identity(d), (a, b), (a1, a2, a3, b1, b2, b3),
                        lambda rl, cm: R2Minus((cm[new[0]], cm[new[1]])))

    def locus(self):
        out = {"arcs": list(self.arcs), "over": self.over}
        if self.face is not None:
            out["face"] = self.face
        return out

    def relabel(self, arc_map, crossing_map):
        return R2Plus((arc_map[self.arcs[0]], arc_map[self.arcs[1]]), arc_map[self.over])


def _find_face(d: OrientedDiagram, crossings: Sequence[int]) -> Optional[Face]:
    want = sorted(crossings)
    for face in d.faces:
        if len(face.darts) == len(want) and sorted(x for x, _ in face.darts) == want:
            return face
    return None


@dataclass(frozen=True)
class R2Minus(Move):
    """Remove a bigon whose two crossings share the same over-strand."""
    crossings: Tuple[int, int] = (0, 0)
    kind: ClassVar[str] = "r2-"

    def apply(self, d: OrientedDiagram) -> MoveOutcome:
        i, j = self.crossings
        _check_crossing(d, i)
        _check_crossing(d, j)
        if i == j:
            raise BadLocus("a Reidemeister II move needs two different crossings")
        bigon = _find_face(d, (i, j))
        if bigon is None:
            raise BadLocus(f"crossings {i} and {j} do not bound a bigon")
        u, v = bigon.arcs
        parity = {arc: {s % 2 for _, s in d.slots[arc]} for arc in (u, v)}
        if len(parity[u]) != 1 or len(parity[v]) != 1 or parity[u] == parity[v]:
            raise BadLocus(f"crossings {i} and {j} do not share an over-strand")
        w = _Working(d)
        w.removed.update((i, j))
        strands = []
        for arc in (u, v):
            tx, ts = d.tail(arc)
            hx, hs = d.head(arc)
            strands.append((arc, d.crossings[tx][(ts + 2) % 4], d.crossings[hx][(hs + 2) % 4]))
        uf = UnionFind(range(1, d.arc_count + 1))
        entering = set()
        for _, inp, outp in strands:
            uf.union(inp, outp)
            entering.add(inp)
        rep = {}
        for group in uf.groups():
            firsts = [a for a in group if a in entering]
            for a in group:
                rep[a] = min(firsts) if firsts else a
        for k, c in enumerate(w.crossings):
            if k not in w.removed:
                w.crossings[k] = [rep[a] for a in c]
        gone = {u, v} | {outp for _, inp, outp in strands if rep[outp] != outp}
        still = {a for k, c in enumerate(w.crossings) if k not in w.removed for a in c}
        for _, inp, _ in strands:
            r = rep[inp]
            if r not in still and r not in w.loops:
                w.loops.append(r)
        bp = d.basepoint
        if bp in (u, v):
            bp = next(inp for arc, inp, _ in strands if arc == bp)
        w.basepoint = rep[bp]
        persisting = {a: rep[a] for a in range(1, d.arc_count + 1) if a not in gone}
        source_arcs = [a for s in strands for a in s]
        target_arcs = sorted({rep[inp] for _, inp, _ in strands})
        over_strand = next(inp for arc, inp, _ in strands if parity[arc] == {1})
        under_strand = next(inp for arc, inp, _ in strands if parity[arc] == {0})
        return w.finish(self, persisting, source_arcs, target_arcs,
                        lambda rl, cm: R2Plus((rl[rep[under_strand]], rl[rep[over_strand]]),
                                              rl[rep[over_strand]]))

    def locus(self):
        return {"crossings": list(self.crossings)}

    def relabel(self, arc_map, crossing_map):
        return R2Minus((crossing_map[self.crossings[0]], crossing_map[self.crossings[1]]))


@dataclass(frozen=True)
class R3(Move):
    """Slide the bottom strand of a triangle across the crossing of the other two."""
    crossings: Tuple[int, int, int] = (0, 0, 0)
    kind: ClassVar[str] = "r3"

    def apply(self, d: OrientedDiagram) -> MoveOutcome:
        for x in self.crossings:
            _check_crossing(d, x)
        if len(set(self.crossings)) != 3:
            raise BadLocus("a Reidemeister III move needs three different crossings")
        tri = _find_face(d, self.crossings)
        if tri is None:
            raise BadLocus(f"crossings {list(self.crossings)} do not bound a triangle")
        kinds = {}
        for arc in tri.arcs:
            parities = sorted(s % 2 for _, s in d.slots[arc])
            kinds[arc] = {(1, 1): "top", (0, 1): "middle", (0, 0): "bottom"}[tuple(parities)]
        if sorted(kinds.values()) != ["bottom", "middle", "top"]:
            raise BadLocus(f"triangle at crossings {list(self.crossings)} is not a Reidemeister III triangle")
        if d.basepoint in kinds:
            raise BadLocus(f"the basepoint lies on side {d.basepoint} of the triangle")
        w = _Working(d)
        old = d.crossings
        for arc in tri.arcs:
            (P, si), (R, sj) = d.slots[arc]
            w.crossings[P][(si + 2) % 4] = arc
            w.crossings[P][si] = old[R][(sj + 2) % 4]
            w.crossings[R][(sj + 2) % 4] = arc
            w.crossings[R][sj] = old[P][(si + 2) % 4]
        touched = sorted({a for x in self.crossings for a in old[x]})
        return w.finish(self, _identity(d), touched, touched,
                        lambda rl, cm: R3(tuple(cm[x] for x in self.crossings)))

    def locus(self):
        return {"crossings": list(self.crossings)}

    def relabel(self, arc_map, crossing_map):
        return R3(tuple(crossing_map[x] for x in self.crossings))


MOVE_TYPES: Dict[str, Type[Move]] = {
    cls.kind: cls for cls in (Birth, Death, Saddle, Dot, R1Plus, R1Minus, R2Plus, R2Minus, R3)
}


def move_from_json(obj: Mapping[str, Any]) -> Move:
    """Build a move from ``{"type": ..., "locus": {...}}``."""
    if not isinstance(obj, Mapping) or "type" not in obj:
        raise MalformedMovie(f"move {obj!r} has no 'type'")
    kind = obj["type"]
    if kind not in MOVE_TYPES:
        raise MalformedMovie(f"unknown move type {kind!r}; expected one of {sorted(MOVE_TYPES)}")
    locus = obj.get("locus") or {}
    try:
        if kind == "birth":
            return Birth()
        if kind == "death":
            return Death(int(locus["loop"]))
        if kind == "saddle":
            a, b = locus["arcs"]
            return Saddle((int(a), int(b)))
        if kind == "dot":
            return Dot(int(locus["arc"]))
        if kind == "r1+":
            return R1Plus(int(locus["arc"]), int(locus.get("sign", 1)), bool(locus.get("under_first", True)))
        if kind == "r1-":
            loop = locus.get("loop")
            return R1Minus(int(locus["crossing"]), None if loop is None else int(loop))
        if kind == "r2+":
            a, b = locus["arcs"]
            face = locus.get("face")
            return R2Plus((int(a), int(b)), int(locus.get("over", a)), None if face is None else int(face))
        if kind == "r2-":
            i, j = locus["crossings"]
            return R2Minus((int(i), int(j)))
        i, j, k = locus["crossings"]
        return R3((int(i), int(j), int(k)))
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedMovie(f"bad locus for {kind} move: {locus!r} ({e})")


def reverse_outcome(outcome: MoveOutcome) -> MoveOutcome:
    """Apply the reverse move to the target, checking it lands back on the source.

    The reverse of a Reidemeister II removal is re-derived by search when the
    recorded candidate does not reproduce the source diagram.
    """
    back = outcome.reverse.apply(outcome.target)
    if match_diagrams(back.target, outcome.source) is not None:
        return back
    if isinstance(outcome.reverse, R2Plus):
        a, b = outcome.reverse.arcs
        for arcs in ((a, b), (b, a)):
            for face in [None] + list(range(len(outcome.target.faces))):
                candidate = R2Plus(arcs, outcome.reverse.over, face)
                try:
                    back = candidate.apply(outcome.target)
                except BadLocus:
                    continue
                if match_diagrams(back.target, outcome.source) is not None:
                    return back
    raise MapConstructionError(f"no reverse found for {outcome.move} on {outcome.target.render()}")
