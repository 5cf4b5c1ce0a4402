"""
The cube of resolutions as a chain complex over F_p[x], with t = x^2.

Circle labels are 0 for the unit 1 and 1 for x. The circle through the
basepoint arc always carries label 0: its x-content lives in the F[x]
coefficient, so every local map that would leave x on the basepoint
circle instead multiplies the coefficient by x.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .algebra import DEFAULT_PRIME, PolyMatrix, Polynomial
from .diagram import CircleSet, OrientedDiagram, State, resolve_state
from .errors import D2NotZero, NotAChainMap, NotAKnot, NotHomogeneous

logger = logging.getLogger(__name__)

Labels = Tuple[int, ...]
Images = Tuple[Tuple[int, Labels], ...]

MERGE = "merge"
SPLIT = "split"
BIRTH = "birth"
DEATH = "death"
DOT = "dot"
IDENTITY = "identity"


class FrobeniusData:
    """Structure maps of A = F[x]/(x^2 - t) on the basis {1, x}.

    Each table sends a tuple of input labels to its images, a tuple of
    (power of x in the coefficient, output labels).
    """
    multiply = {
        (0, 0): ((0, (0,)),),
        (0, 1): ((0, (1,)),),
        (1, 0): ((0, (1,)),),
        (1, 1): ((2, (0,)),),
    }
    comultiply = {
        (0,): ((0, (0, 1)), (0, (1, 0))),
        (1,): ((0, (1, 1)), (2, (0, 0))),
    }
    unit = {(): ((0, (0,)),)}
    counit = {(0,): (), (1,): ((0, ()),)}
    dot = {(0,): ((0, (1,)),), (1,): ((2, (0,)),)}
    identity = {(0,): ((0, (0,)),), (1,): ((0, (1,)),)}

    @classmethod
    def table(cls, op: str) -> Mapping[Labels, Images]:
        return {
            MERGE: cls.multiply,
            SPLIT: cls.comultiply,
            BIRTH: cls.unit,
            DEATH: cls.counit,
            DOT: cls.dot,
            IDENTITY: cls.identity,
        }[op]

    @classmethod
    def apply(cls, op: str, element: Mapping[Labels, Polynomial], position: int,
              arity: int) -> Dict[Labels, Polynomial]:
        """Apply op to tensor factors position..position+arity-1 of an element of A^{⊗n}."""
        table = cls.table(op)
        out: Dict[Labels, Polynomial] = {}
        for labels, coeff in element.items():
            head, mid, tail = labels[:position], labels[position:position + arity], labels[position + arity:]
            for power, image in table[mid]:
                key = head + image + tail
                term = coeff.shift(power)
                out[key] = out[key] + term if key in out else term
        return {k: v for k, v in out.items() if v}

    @classmethod
    def verify(cls, p: int = DEFAULT_PRIME) -> bool:
        """Check the Frobenius algebra axioms on basis elements."""
        one = Polynomial.one(p)

        def basis(*labels):
            return {tuple(labels): one}

        for a, b, c in product((0, 1), repeat=3):
            e = basis(a, b, c)
            if cls.apply(MERGE, cls.apply(MERGE, e, 0, 2), 0, 2) != cls.apply(MERGE, cls.apply(MERGE, e, 1, 2), 0, 2):
                return False
        for a in (0, 1):
            e = basis(a)
            split = cls.apply(SPLIT, e, 0, 1)
            if cls.apply(SPLIT, split, 0, 1) != cls.apply(SPLIT, split, 1, 1):
                return False
            if cls.apply(DEATH, split, 0, 1) != e:
                return False
            if cls.apply(MERGE, cls.apply(BIRTH, e, 0, 0), 0, 2) != e:
                return False
            if cls.apply(DOT, cls.apply(DOT, e, 0, 1), 0, 1) != {k: v.shift(2) for k, v in e.items()}:
                return False
        for a, b in product((0, 1), repeat=2):
            e = basis(a, b)
            if cls.apply(SPLIT, cls.apply(MERGE, e, 0, 2), 0, 1) != cls.apply(MERGE, cls.apply(SPLIT, e, 1, 1), 0, 2):
                return False
        return True


@dataclass(frozen=True)
class CircleCorrespondence:
    """How a local cobordism carries the circles of one resolution to another.

    Passive circles are carried along unchanged; the active ones undergo op.
    """
    op: str
    passive: Mapping[int, int]
    active_in: Tuple[int, ...]
    active_out: Tuple[int, ...]
    target_count: int
    source_basepoint: int
    target_basepoint: int


def correspond_circles(source: CircleSet, target: CircleSet, arc_map: Mapping[int, int],
                       source_arcs: Sequence[int], target_arcs: Sequence[int],
                       op: Optional[str] = None) -> CircleCorrespondence:
    """Match circles of two resolutions.

    Args:
        arc_map: source arc -> target arc for arcs away from the change.
        source_arcs, target_arcs: arcs on the circles taking part in the change.
        op: the local operation; inferred from circle counts when omitted.
    """
    active_in = tuple(sorted({source.arc_to_circle[a] for a in source_arcs}))
    active_out = tuple(sorted({target.arc_to_circle[a] for a in target_arcs}))
    if op is None:
        op = {(2, 1): MERGE, (1, 2): SPLIT, (0, 1): BIRTH, (1, 0): DEATH,
              (1, 1): IDENTITY}[(len(active_in), len(active_out))]
    passive: Dict[int, int] = {}
    for k, circle in enumerate(source.circles):
        if k in active_in:
            continue
        images = {target.arc_to_circle[arc_map[a]] for a in circle if a in arc_map}
        if len(images) != 1:
            raise ValueError(f"circle {circle} has no single image under the arc map")
        passive[k] = images.pop()
    return CircleCorrespondence(op, passive, active_in, active_out, target.circle_count,
                                source.basepoint_circle, target.basepoint_circle)


def transport(labels: Labels, corr: CircleCorrespondence) -> Images:
    """Images of one labelled resolution under a local cobordism."""
    active = tuple(labels[k] for k in corr.active_in)
    out = []
    for power, image in FrobeniusData.table(corr.op)[active]:
        new = [0] * corr.target_count
        for s, t in corr.passive.items():
            new[t] = labels[s]
        for t, v in zip(corr.active_out, image):
            new[t] = v
        if new[corr.target_basepoint]:
            new[corr.target_basepoint] = 0
            power += 1
        out.append((power, tuple(new)))
    return tuple(out)


@dataclass(frozen=True)
class Generator:
    state: State
    labels: Labels
    i_grade: int
    j_grade: int

    @property
    def grade(self) -> Tuple[int, int]:
        return self.i_grade, self.j_grade


@dataclass
class ChainComplex:
    """Free F[x]-chain complex of a diagram.

    ``differentials[i]`` maps degree i to degree i + 1 and has shape
    (rank of degree i + 1, rank of degree i).
    """
    diagram: OrientedDiagram
    p: int
    generators: Dict[int, Tuple[Generator, ...]]
    differentials: Dict[int, PolyMatrix]
    circles: Dict[State, CircleSet] = field(repr=False)
    index: Dict[int, Dict[Tuple[State, Labels], int]] = field(repr=False)

    @property
    def degrees(self) -> List[int]:
        return sorted(self.generators)

    def rank(self, i: int) -> int:
        return len(self.generators.get(i, ()))

    def d(self, i: int) -> PolyMatrix:
        if i in self.differentials:
            return self.differentials[i]
        return PolyMatrix.zeros(self.rank(i + 1), self.rank(i), self.p)

    def grades(self, i: int) -> List[Tuple[int, int]]:
        return [g.grade for g in self.generators.get(i, ())]

    def find(self, i: int, state: State, labels: Labels) -> int:
        return self.index[i][(state, labels)]

    def check(self):
        """Raise D2NotZero unless consecutive differentials compose to zero."""
        for i in self.degrees:
            if not (self.d(i + 1) @ self.d(i)).is_zero():
                raise D2NotZero(f"d{i + 1}·d{i} != 0 for {self.diagram.render()}")

    def chain_ranks(self) -> Dict[int, int]:
        return {i: self.rank(i) for i in self.degrees}


def state_degree(state: State, n_minus: int) -> int:
    return sum(state) - n_minus


def labelings(cs: CircleSet) -> Iterator[Labels]:
    free = [k for k in range(cs.circle_count) if k != cs.basepoint_circle]
    for bits in product((0, 1), repeat=len(free)):
        labels = [0] * cs.circle_count
        for k, b in zip(free, bits):
            labels[k] = b
        yield tuple(labels)


def quantum_grade(labels: Labels, cs: CircleSet, state: State, d: OrientedDiagram) -> int:
    deg = sum(1 - 2 * v for k, v in enumerate(labels) if k != cs.basepoint_circle) + 1
    return deg + sum(state) + d.n_plus - 2 * d.n_minus


def enumerate_generators(d: OrientedDiagram) -> Tuple[Dict[int, Tuple[Generator, ...]], Dict[State, CircleSet]]:
    """Generators by homological degree, in canonical order (state bits, then labels)."""
    n = len(d.crossings)
    circles: Dict[State, CircleSet] = {}
    generators: Dict[int, Tuple[Generator, ...]] = {}
    for k in range(n + 1):
        states = sorted(tuple(1 if c in ones else 0 for c in range(n)) for ones in combinations(range(n), k))
        gens = []
        for s in states:
            cs = resolve_state(d, s)
            circles[s] = cs
            for labels in labelings(cs):
                gens.append(Generator(s, labels, k - d.n_minus, quantum_grade(labels, cs, s, d)))
        generators[k - d.n_minus] = tuple(gens)
    return generators, circles


def edge_correspondence(d: OrientedDiagram, crossing: int, source: CircleSet,
                        target: CircleSet) -> CircleCorrespondence:
    a, b, c, _ = d.crossings[crossing]
    identity = {arc: arc for arc in range(1, d.arc_count + 1)}
    return correspond_circles(source, target, identity, (a, b), (a, c))


@lru_cache(maxsize=4096)
def _monomial(c: int, k: int, p: int) -> Polynomial:
    return Polynomial.monomial(c, k, p)


def build_complex(d: OrientedDiagram, p: int = DEFAULT_PRIME, allow_links: bool = False) -> ChainComplex:
    """Build the chain complex of a diagram.

    Edge maps are the multiplication and comultiplication of A, signed by
    (-1)^(number of 1s before the changed crossing). Homogeneity is checked
    entry by entry and d^2 = 0 afterwards.

    Raises:
        NotAKnot: for a link diagram unless allow_links is set.
        NotHomogeneous, D2NotZero: if the construction is inconsistent.
    """
    if not allow_links and not d.is_knot:
        raise NotAKnot(f"{d.render()} has {len(d.components)} components")
    generators, circles = enumerate_generators(d)
    index = {i: {(g.state, g.labels): k for k, g in enumerate(gens)} for i, gens in generators.items()}
    n = len(d.crossings)
    differentials: Dict[int, PolyMatrix] = {}
    for i in sorted(generators):
        if i + 1 not in generators:
            continue
        entries: Dict[Tuple[int, int], List[int]] = {}
        for col, g in enumerate(generators[i]):
            s = g.state
            ones_before = 0
            for c in range(n):
                if s[c]:
                    ones_before += 1
                    continue
                t = s[:c] + (1,) + s[c + 1:]
                sign = -1 if ones_before % 2 else 1
                corr = edge_correspondence(d, c, circles[s], circles[t])
                for power, labels in transport(g.labels, corr):
                    row = index[i + 1][(t, labels)]
                    h = generators[i + 1][row]
                    if 2 * power != h.j_grade - g.j_grade:
                        raise NotHomogeneous(f"edge {s}->{t} sends j={g.j_grade} to j={h.j_grade} with x^{power}")
                    acc = entries.setdefault((row, col), [0, power])
                    acc[0] += sign
        differentials[i] = PolyMatrix.from_entries(
            {key: _monomial(c % p, k, p) for key, (c, k) in entries.items() if c % p},
            len(generators[i + 1]), len(generators[i]), p)
    cx = ChainComplex(d, p, generators, differentials, circles, index)
    cx.check()
    logger.debug("complex of %s: ranks %s", d.render(), cx.chain_ranks())
    return cx


def _same_complex(a: ChainComplex, b: ChainComplex, action: str):
    if a is not b and (a.diagram != b.diagram or a.p != b.p):
        raise ValueError(f"cannot {action} maps through {a.diagram.render()} and {b.diagram.render()}")


@dataclass
class ChainMap:
    """F[x]-linear map of complexes; ``blocks[i]`` has shape (target rank, source rank)."""
    source: ChainComplex
    target: ChainComplex
    blocks: Dict[int, PolyMatrix]
    j_degree: int

    def block(self, i: int) -> PolyMatrix:
        if i in self.blocks:
            return self.blocks[i]
        return PolyMatrix.zeros(self.target.rank(i), self.source.rank(i), self.source.p)

    @property
    def degrees(self) -> List[int]:
        return sorted(set(self.source.degrees) | set(self.target.degrees))

    @classmethod
    def identity(cls, cx: ChainComplex) -> "ChainMap":
        return cls(cx, cx, {i: PolyMatrix.identity(cx.rank(i), cx.p) for i in cx.degrees}, 0)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """self ∘ other."""
        _same_complex(other.target, self.source, "compose")
        blocks = {i: self.block(i) @ other.block(i) for i in self.degrees}
        return ChainMap(other.source, self.target, blocks, self.j_degree + other.j_degree)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        _same_complex(self.source, other.source, "add")
        _same_complex(self.target, other.target, "add")
        if other.j_degree != self.j_degree:
            raise ValueError(f"adding maps of j-degree {self.j_degree} and {other.j_degree}")
        return ChainMap(self.source, self.target,
                        {i: self.block(i) + other.block(i) for i in self.degrees}, self.j_degree)

    def scale(self, c) -> "ChainMap":
        power = 0
        if isinstance(c, Polynomial) and c.is_monomial:
            power = c.degree
        return ChainMap(self.source, self.target, {i: b.scale(c) for i, b in self.blocks.items()},
                        self.j_degree - 2 * power)

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.blocks.values())

    def check(self) -> "ChainMap":
        """Raise NotAChainMap unless d∘f = f∘d and every entry has the stated j-degree."""
        for i in self.degrees:
            if (self.target.d(i) @ self.block(i)) != (self.block(i + 1) @ self.source.d(i)):
                raise NotAChainMap(f"d∘f != f∘d in degree {i}")
        for i, b in self.blocks.items():
            src, tgt = self.source.generators.get(i, ()), self.target.generators.get(i, ())
            for r, c, e in b.items():
                if not e.is_monomial or 2 * e.degree != tgt[r].j_grade - src[c].j_grade - self.j_degree:
                    raise NotAChainMap(
                        f"entry {e} from j={src[c].j_grade} to j={tgt[r].j_grade} is not of j-degree {self.j_degree}")
        return self


def dot_map(c: ChainComplex, arc: int) -> ChainMap:
    """Multiplication by x on the circle through ``arc``."""
    if not 1 <= arc <= c.diagram.arc_count:
        raise ValueError(f"arc {arc} is not in {c.diagram.render()}")
    identity = {a: a for a in range(1, c.diagram.arc_count + 1)}
    blocks = {}
    for i in c.degrees:
        entries = {}
        for col, g in enumerate(c.generators[i]):
            cs = c.circles[g.state]
            corr = correspond_circles(cs, cs, identity, (arc,), (arc,), DOT)
            for power, labels in transport(g.labels, corr):
                row = c.find(i, g.state, labels)
                entries[(row, col)] = _monomial(1, power, c.p)
        blocks[i] = PolyMatrix.from_entries(entries, c.rank(i), c.rank(i), c.p)
    return ChainMap(c, c, blocks, -2).check()
