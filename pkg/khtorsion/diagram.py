"""
Planar diagrams of knots and links.

A crossing is written ``X(a,b,c,d)``: the four arcs meeting there, listed
counterclockwise starting with the incoming under-strand, so the under
strand runs a -> c. The over strand runs either b -> d (positive crossing)
or d -> b (negative crossing). Crossingless components are written
``O(k)``.

The 0-smoothing of ``X(a,b,c,d)`` joins a with d and b with c; the
1-smoothing joins a with b and c with d.
"""
import json
import logging
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import (
    ArcMultiplicity,
    InconsistentOrientation,
    MalformedPD,
    MultiComponentWhereKnotRequired,
    NonPlanarDiagram,
)

logger = logging.getLogger(__name__)

Crossing = Tuple[int, int, int, int]
Slot = Tuple[int, int]
State = Tuple[int, ...]

_TEXT = re.compile(r"\s*(?:[XO]\([^()]*\)\s*)*")
_TERM = re.compile(r"([XO])\(([^()]*)\)")


class UnionFind:
    """Disjoint sets over hashable items."""

    def __init__(self, items: Iterable = ()):
        self._parent: Dict[Any, Any] = {}
        for item in items:
            self.add(item)

    def add(self, item):
        self._parent.setdefault(item, item)

    def find(self, item):
        parent = self._parent
        root = item
        while parent[root] != root:
            root = parent[root]
        while parent[item] != root:
            parent[item], item = root, parent[item]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self._parent[rb] = ra
        return True

    def groups(self) -> List[List]:
        out: Dict[Any, List] = {}
        for item in self._parent:
            out.setdefault(self.find(item), []).append(item)
        return [sorted(g) for g in out.values()]


@dataclass(frozen=True)
class Face:
    """A region of the diagram complement, as its boundary darts.

    A dart ``(X, s)`` runs along the arc at slot s of crossing X, away from X.
    """
    darts: Tuple[Slot, ...]
    arcs: Tuple[int, ...]


@dataclass(frozen=True)
class CircleSet:
    """Circles of one resolution; circle k is the one with the k-th smallest least arc."""
    circle_count: int
    arc_to_circle: Mapping[int, int]
    basepoint_circle: int
    circles: Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class OrientedDiagram:
    """A validated PD diagram.

    ``over_forward[X]`` is True when the over strand at crossing X runs from
    slot 1 to slot 3; that makes X a positive crossing.
    """
    crossings: Tuple[Crossing, ...]
    over_forward: Tuple[bool, ...]
    loops: Tuple[int, ...] = ()
    basepoint: int = 1

    def __post_init__(self):
        object.__setattr__(self, "crossings", tuple(tuple(int(a) for a in c) for c in self.crossings))
        object.__setattr__(self, "over_forward", tuple(bool(f) for f in self.over_forward))
        object.__setattr__(self, "loops", tuple(sorted(int(k) for k in self.loops)))
        object.__setattr__(self, "basepoint", int(self.basepoint))
        self._validate()

    def _validate(self):
        if len(self.over_forward) != len(self.crossings):
            raise InconsistentOrientation(
                f"{len(self.over_forward)} orientations for {len(self.crossings)} crossings")
        counts: Dict[int, int] = {}
        for c in self.crossings:
            if len(c) != 4:
                raise MalformedPD(f"crossing {c} does not have four arcs")
            for a in c:
                if a <= 0:
                    raise MalformedPD(f"arc label {a} is not positive")
                counts[a] = counts.get(a, 0) + 1
        if len(set(self.loops)) != len(self.loops):
            raise ArcMultiplicity(f"loops {list(self.loops)} repeat a label")
        for k in self.loops:
            if k in counts:
                raise ArcMultiplicity(f"loop {k} also appears at a crossing")
            counts[k] = 2
        bad = sorted(a for a, n in counts.items() if n != 2)
        if bad:
            raise ArcMultiplicity(f"arcs {bad} do not appear exactly twice")
        if sorted(counts) != list(range(1, len(counts) + 1)):
            raise ArcMultiplicity(f"arc labels are not 1..{len(counts)}")
        if not counts:
            raise MalformedPD("a diagram needs at least one component")
        if self.basepoint not in counts:
            raise MalformedPD(f"basepoint {self.basepoint} is not an arc")
        for arc, slots in self.slots.items():
            roles = sorted(self.role(s) for s in slots)
            if roles != ["head", "tail"]:
                raise InconsistentOrientation(f"arc {arc} has ends {roles}")
        if self.crossings:
            expected = len(self.crossings) + 2 * self.crossing_component_count
            found = len(self.faces)
            if found != expected:
                raise NonPlanarDiagram(f"{found} faces where a planar diagram has {expected}")

    @cached_property
    def arc_count(self) -> int:
        return 2 * len(self.crossings) + len(self.loops)

    @cached_property
    def slots(self) -> Dict[int, Tuple[Slot, Slot]]:
        """Both crossing occurrences of every non-loop arc."""
        out: Dict[int, List[Slot]] = {}
        for x, c in enumerate(self.crossings):
            for s, a in enumerate(c):
                out.setdefault(a, []).append((x, s))
        return {a: tuple(v) for a, v in out.items()}

    def role(self, slot: Slot) -> str:
        """'head' if the arc at this slot enters the crossing, 'tail' if it leaves."""
        x, s = slot
        if s in (0, 2):
            return "head" if s == 0 else "tail"
        entering = (s == 1) == self.over_forward[x]
        return "head" if entering else "tail"

    def head(self, arc: int) -> Slot:
        return next(s for s in self.slots[arc] if self.role(s) == "head")

    def tail(self, arc: int) -> Slot:
        return next(s for s in self.slots[arc] if self.role(s) == "tail")

    def other_end(self, slot: Slot) -> Slot:
        first, second = self.slots[self.crossings[slot[0]][slot[1]]]
        return second if first == slot else first

    def is_loop(self, arc: int) -> bool:
        return arc in self.loops

    def next_arc(self, arc: int) -> int:
        """The arc that continues after ``arc`` passes through its head crossing."""
        if arc in self.loops:
            return arc
        x, s = self.head(arc)
        return self.crossings[x][(s + 2) % 4]

    @cached_property
    def signs(self) -> Tuple[int, ...]:
        return tuple(1 if f else -1 for f in self.over_forward)

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @cached_property
    def components(self) -> Tuple[Tuple[int, ...], ...]:
        """Components as arc sequences in the direction of travel."""
        seen = set()
        out = []
        for start in range(1, self.arc_count + 1):
            if start in seen:
                continue
            comp = [start]
            seen.add(start)
            arc = self.next_arc(start)
            while arc != start:
                comp.append(arc)
                seen.add(arc)
                arc = self.next_arc(arc)
            out.append(tuple(comp))
        return tuple(out)

    def component_of(self, arc: int) -> int:
        return next(k for k, comp in enumerate(self.components) if arc in comp)

    @property
    def is_knot(self) -> bool:
        return len(self.components) == 1

    @cached_property
    def crossing_component_count(self) -> int:
        uf = UnionFind(range(len(self.crossings)))
        for first, second in self.slots.values():
            uf.union(first[0], second[0])
        return len(uf.groups())

    @cached_property
    def faces(self) -> Tuple[Face, ...]:
        """Faces in order of their least dart; each dart turns right at the next crossing."""
        seen = set()
        out = []
        for x in range(len(self.crossings)):
            for s in range(4):
                if (x, s) in seen:
                    continue
                darts = []
                dart = (x, s)
                while dart not in seen:
                    seen.add(dart)
                    darts.append(dart)
                    y, j = self.other_end(dart)
                    dart = (y, (j + 1) % 4)
                arcs = tuple(self.crossings[d[0]][d[1]] for d in darts)
                out.append(Face(tuple(darts), arcs))
        return tuple(out)

    def dart_is_forward(self, dart: Slot) -> bool:
        """True when the dart runs along its arc's orientation."""
        return self.role(dart) == "tail"

    def render(self) -> str:
        """PD text of the diagram.

        PD text carries no over-strand orientations; reading it back derives
        them again. Use ``to_json`` to keep orientations set by hand.
        """
        terms = [f"X({a},{b},{c},{d})" for a, b, c, d in self.crossings]
        terms += [f"O({k})" for k in self.loops]
        return " ".join(terms)

    def to_json(self) -> Dict[str, Any]:
        return {
            "pd": [list(c) for c in self.crossings],
            "loops": list(self.loops),
            "basepoint": self.basepoint,
            "over_forward": list(self.over_forward),
        }

    def with_basepoint(self, arc: int) -> "OrientedDiagram":
        return OrientedDiagram(self.crossings, self.over_forward, self.loops, arc)

    def __str__(self) -> str:
        return self.render()


def crossing_signs(d: OrientedDiagram) -> Tuple[int, int]:
    """(n_plus, n_minus) of a diagram."""
    return d.n_plus, d.n_minus


def resolve_state(d: OrientedDiagram, state: Sequence[int]) -> CircleSet:
    """Circles of the resolution of d given by one bit per crossing."""
    if len(state) != len(d.crossings):
        raise ValueError(f"state of length {len(state)} for {len(d.crossings)} crossings")
    uf = UnionFind(range(1, d.arc_count + 1))
    for (a, b, c, e), bit in zip(d.crossings, state):
        if bit:
            uf.union(a, b)
            uf.union(c, e)
        else:
            uf.union(a, e)
            uf.union(b, c)
    circles = tuple(tuple(g) for g in sorted(uf.groups()))
    arc_to_circle = {a: k for k, circle in enumerate(circles) for a in circle}
    return CircleSet(len(circles), arc_to_circle, arc_to_circle[d.basepoint], circles)


def mirror_diagram(d: OrientedDiagram) -> OrientedDiagram:
    """Swap over and under at every crossing, keeping arc labels."""
    crossings = []
    for (a, b, c, e), fwd in zip(d.crossings, d.over_forward):
        crossings.append((b, c, e, a) if fwd else (e, a, b, c))
    return OrientedDiagram(tuple(crossings), tuple(not f for f in d.over_forward), d.loops, d.basepoint)


def derive_over_forward(crossings: Sequence[Crossing]) -> Tuple[bool, ...]:
    """Orient over strands from the under strands they continue.

    Components that never pass under are oriented by the table convention
    that labels increase along the strand.
    """
    slots: Dict[int, List[Slot]] = {}
    for x, c in enumerate(crossings):
        for s, a in enumerate(c):
            slots.setdefault(a, []).append((x, s))
    fwd: List[Optional[bool]] = [None] * len(crossings)

    def role(x: int, s: int) -> Optional[str]:
        if s in (0, 2):
            return "head" if s == 0 else "tail"
        if fwd[x] is None:
            return None
        return "head" if (s == 1) == fwd[x] else "tail"

    while None in fwd:
        progress = False
        for x, c in enumerate(crossings):
            if fwd[x] is not None:
                continue
            for s in (1, 3):
                occ = slots.get(c[s], [])
                if len(occ) != 2:
                    raise ArcMultiplicity(f"arc {c[s]} does not appear exactly twice")
                other = occ[1] if occ[0] == (x, s) else occ[0]
                r = role(*other)
                if r is None:
                    continue
                mine = "tail" if r == "head" else "head"
                fwd[x] = (s == 1) == (mine == "head")
                progress = True
                break
        if not progress:
            x = fwd.index(None)
            b, e = crossings[x][1], crossings[x][3]
            fwd[x] = e == b + 1 or b > e + 1
            logger.debug("crossing %d lies on an over-only strand; oriented %s", x,
                         "b->d" if fwd[x] else "d->b")
    return tuple(fwd)


def parse_pd(text: str, basepoint: Optional[int] = None, components: Optional[int] = None,
             over_forward: Optional[Sequence[bool]] = None,
             require_knot: bool = False) -> OrientedDiagram:
    """Parse PD text such as ``"X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)"``.

    Args:
        text: whitespace separated ``X(a,b,c,d)`` and ``O(k)`` terms.
        basepoint: marked arc, arc 1 when omitted.
        components: required for empty text, which then means that many
            crossingless unknots; otherwise checked against the diagram.
        over_forward: explicit over-strand orientations, one per crossing.
        require_knot: raise instead of warning when the diagram has more
            than one component.

    Raises:
        MalformedPD, ArcMultiplicity, InconsistentOrientation,
        NonPlanarDiagram, MultiComponentWhereKnotRequired.
    """
    if not _TEXT.fullmatch(text):
        raise MalformedPD(f"cannot parse PD text {text!r}")
    crossings: List[Crossing] = []
    loops: List[int] = []
    for kind, body in _TERM.findall(text):
        try:
            labels = [int(v) for v in body.split(",")]
        except ValueError:
            raise MalformedPD(f"non-integer label in {kind}({body})")
        if kind == "X":
            if len(labels) != 4:
                raise MalformedPD(f"X({body}) needs four arcs")
            crossings.append(tuple(labels))
        else:
            if len(labels) != 1:
                raise MalformedPD(f"O({body}) needs one arc")
            loops.append(labels[0])
    if not crossings and not loops:
        if not components:
            raise MalformedPD("empty PD text needs an explicit component count")
        loops = list(range(1, components + 1))
    d = build_diagram(crossings, loops, basepoint, over_forward)
    if components is not None and len(d.components) != components:
        raise MalformedPD(f"diagram has {len(d.components)} components, expected {components}")
    if not d.is_knot:
        if require_knot:
            raise MultiComponentWhereKnotRequired(f"diagram has {len(d.components)} components")
        logger.warning("diagram %s has %d components", d.render(), len(d.components))
    return d


def build_diagram(crossings: Sequence[Sequence[int]], loops: Sequence[int] = (),
                  basepoint: Optional[int] = None,
                  over_forward: Optional[Sequence[bool]] = None) -> OrientedDiagram:
    crossings = tuple(tuple(int(a) for a in c) for c in crossings)
    for c in crossings:
        if len(c) != 4:
            raise MalformedPD(f"crossing {list(c)} does not have four arcs")
    if over_forward is None:
        over_forward = derive_over_forward(crossings)
    return OrientedDiagram(crossings, tuple(over_forward), tuple(loops),
                           1 if basepoint is None else basepoint)


def compact_diagram(crossings: Sequence[Crossing], over_forward: Sequence[bool],
                    loops: Sequence[int], basepoint: int) -> Tuple[OrientedDiagram, Dict[int, int]]:
    """Relabel arcs order-preservingly to 1..n.

    Returns:
        The diagram and the map old label -> new label.
    """
    used = sorted({a for c in crossings for a in c} | set(loops))
    relabel = {a: k + 1 for k, a in enumerate(used)}
    d = OrientedDiagram(
        tuple(tuple(relabel[a] for a in c) for c in crossings),
        tuple(over_forward),
        tuple(relabel[k] for k in loops),
        relabel[basepoint],
    )
    return d, relabel


def diagram_from_json(obj: Mapping[str, Any], basepoint: Optional[int] = None) -> OrientedDiagram:
    """Build a diagram from ``{"pd": [[a,b,c,d], ...], "loops": [...], "basepoint": a}``."""
    if isinstance(obj, str):
        return parse_pd(obj, basepoint=basepoint)
    if not isinstance(obj, Mapping) or "pd" not in obj:
        raise MalformedPD("diagram JSON needs a 'pd' field")
    pd = obj["pd"]
    if isinstance(pd, str):
        return parse_pd(pd, basepoint=basepoint or obj.get("basepoint"),
                        components=obj.get("components"), over_forward=obj.get("over_forward"))
    try:
        crossings = [tuple(int(a) for a in c) for c in pd]
        loops = [int(k) for k in obj.get("loops", [])]
    except (TypeError, ValueError):
        raise MalformedPD("diagram JSON 'pd' must be a list of integer 4-tuples")
    if not crossings and not loops:
        loops = list(range(1, int(obj.get("components", 0)) + 1))
        if not loops:
            raise MalformedPD("empty diagram needs 'loops' or 'components'")
    if basepoint is None:
        basepoint = obj.get("basepoint")
    return build_diagram(crossings, loops, basepoint, obj.get("over_forward"))


def load_diagram(path: Union[str, Path], basepoint: Optional[int] = None) -> OrientedDiagram:
    """Read a diagram file holding either PD text or diagram JSON."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise MalformedPD(f"{path}: {e}")
        return diagram_from_json(obj, basepoint)
    return parse_pd(text.strip(), basepoint=basepoint, components=None if text.strip() else 1)


@dataclass(frozen=True)
class DiagramMatch:
    """crossing_map[X] is the crossing of the other diagram that X corresponds to."""
    crossing_map: Tuple[int, ...]
    arc_map: Mapping[int, int]


def match_diagrams(a: OrientedDiagram, b: OrientedDiagram) -> Optional[DiagramMatch]:
    """Find a crossing permutation and arc bijection carrying a onto b.

    Slot positions, over-strand orientations and the basepoint must be
    preserved. Returns None when the diagrams differ.
    """
    if (len(a.crossings) != len(b.crossings) or len(a.loops) != len(b.loops)
            or (a.basepoint in a.loops) != (b.basepoint in b.loops)):
        return None
    arc_map: Dict[int, int] = {}
    a_loops, b_loops = list(a.loops), list(b.loops)
    if a.basepoint in a.loops:
        arc_map[a.basepoint] = b.basepoint
        a_loops.remove(a.basepoint)
        b_loops.remove(b.basepoint)
    arc_map.update(zip(a_loops, b_loops))

    uf = UnionFind(range(len(a.crossings)))
    for first, second in a.slots.values():
        uf.union(first[0], second[0])
    starts = [g[0] for g in sorted(uf.groups())]

    def search(k: int, cmap: Dict[int, int], amap: Dict[int, int]):
        if k == len(starts):
            return cmap, amap
        for y in range(len(b.crossings)):
            if y in cmap.values():
                continue
            found = _propagate(a, b, starts[k], y, cmap, amap)
            if found is None:
                continue
            if a.basepoint in found[1] and found[1][a.basepoint] != b.basepoint:
                continue
            result = search(k + 1, *found)
            if result is not None:
                return result
        return None

    result = search(0, {}, arc_map)
    if result is None:
        return None
    cmap, amap = result
    return DiagramMatch(tuple(cmap[x] for x in range(len(a.crossings))), amap)


def _propagate(a: OrientedDiagram, b: OrientedDiagram, x0: int, y0: int,
               cmap: Dict[int, int], amap: Dict[int, int]):
    cmap, amap = dict(cmap), dict(amap)
    used, used_arcs = set(cmap.values()), set(amap.values())
    cmap[x0] = y0
    used.add(y0)
    queue = [(x0, y0)]
    while queue:
        x, y = queue.pop()
        if a.over_forward[x] != b.over_forward[y]:
            return None
        for s in range(4):
            alpha, beta = a.crossings[x][s], b.crossings[y][s]
            if alpha in amap:
                if amap[alpha] != beta:
                    return None
            else:
                if beta in used_arcs:
                    return None
                amap[alpha] = beta
                used_arcs.add(beta)
            xo, so = a.other_end((x, s))
            yo, to = b.other_end((y, s))
            if so != to:
                return None
            if xo in cmap:
                if cmap[xo] != yo:
                    return None
            else:
                if yo in used:
                    return None
                cmap[xo] = yo
                used.add(yo)
                queue.append((xo, yo))
    return cmap, amap
