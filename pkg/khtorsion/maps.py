"""
Chain maps of elementary cobordisms and of whole movies.

Morse moves and dots act locally through the Frobenius structure maps,
state by state. Reidemeister moves get a chain map found by linear
algebra: every j-degree 0 map that is the identity away from the move,
commutes with the differentials and with the dot actions of the arcs the
move keeps, is a solution of a linear system over F_p. Among those the
first quasi-isomorphism is taken, so the map depends only on the move
and its frames. Running a movie backwards inverts those maps on homology
rather than solving the reversed moves afresh.
"""
import logging
import random
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple, Union

from .algebra import DEFAULT_PRIME, PolyMatrix, Polynomial, field_matrix, field_nullspace, field_rank
from .complex import BIRTH, DEATH, DOT, ChainComplex, ChainMap, build_complex, correspond_circles, dot_map, transport
from .diagram import OrientedDiagram, State
from .errors import MapConstructionError, MoveNotApplicable
from .homology import HomologyResult, homology, induced_homology_map
from .movie import Movie, Step, mirror_movie, step_from_outcome
from .moves import Move

logger = logging.getLogger(__name__)

MORSE_DEGREES = {"birth": 1, "death": 1, "saddle": -1, "dot": -2}
_MORSE_OPS = {"birth": BIRTH, "death": DEATH, "saddle": None, "dot": DOT}
RANDOM_ATTEMPTS = 20

Key = Tuple[int, int, int]


@lru_cache(maxsize=256)
def frame_complex(d: OrientedDiagram, p: int = DEFAULT_PRIME) -> ChainComplex:
    """Chain complex of a movie frame; frames in the middle of a movie may be links."""
    return build_complex(d, p, allow_links=True)


@lru_cache(maxsize=256)
def frame_homology(d: OrientedDiagram, p: int = DEFAULT_PRIME) -> HomologyResult:
    return homology(frame_complex(d, p))


def _permute(state: State, crossing_map: Mapping[int, int], n: int) -> State:
    out = [0] * n
    for c, bit in enumerate(state):
        out[crossing_map[c]] = bit
    return tuple(out)


def _gauge(state: State, crossing_map: Mapping[int, int]) -> int:
    """Sign that turns a reordering of the crossings into a chain map."""
    ones = [c for c, bit in enumerate(state) if bit]
    flips = sum(1 for a in range(len(ones)) for b in range(a + 1, len(ones))
                if crossing_map[ones[a]] > crossing_map[ones[b]])
    return -1 if flips % 2 else 1


def _morse_map(step: Step, source: ChainComplex, target: ChainComplex) -> ChainMap:
    op = _MORSE_OPS[step.kind]
    n = len(target.diagram.crossings)
    p = source.p
    blocks = {}
    for i in source.degrees:
        entries: Dict[Tuple[int, int], Polynomial] = {}
        for col, g in enumerate(source.generators[i]):
            t = _permute(g.state, step.crossing_map, n)
            sign = _gauge(g.state, step.crossing_map)
            corr = correspond_circles(source.circles[g.state], target.circles[t], step.arc_map,
                                      step.source_arcs, step.target_arcs, op)
            for power, labels in transport(g.labels, corr):
                row = target.find(i, t, labels)
                term = Polynomial.monomial(sign, power, p)
                entries[(row, col)] = entries[(row, col)] + term if (row, col) in entries else term
        blocks[i] = PolyMatrix.from_entries({k: v for k, v in entries.items() if v},
                                            target.rank(i), source.rank(i), p)
    return ChainMap(source, target, blocks, MORSE_DEGREES[step.kind]).check()


@dataclass
class _Unknowns:
    """Entries a Reidemeister map may have, one F_p unknown each."""
    keys: List[Key]
    powers: List[int]
    index: Dict[Key, int]

    def __len__(self) -> int:
        return len(self.keys)


def _far_pairs(step: Step, cs, ct) -> List[Tuple[int, int]]:
    """(source circle, target circle) for circles the move does not touch."""
    touched = set(step.source_arcs)
    pairs = []
    for k, circle in enumerate(cs.circles):
        if k == cs.basepoint_circle or touched.intersection(circle):
            continue
        arc = next((a for a in circle if a in step.arc_map), None)
        if arc is None:
            continue
        image = ct.arc_to_circle[step.arc_map[arc]]
        if image != ct.basepoint_circle:
            pairs.append((k, image))
    return pairs


def _unknowns(step: Step, source: ChainComplex, target: ChainComplex) -> _Unknowns:
    local = set(step.move.crossings) if step.kind == "r3" else set()
    far = {c: x for c, x in step.crossing_map.items() if c not in local}
    keys, powers = [], []
    for i in source.degrees:
        if i not in target.generators:
            continue
        src_by_state, tgt_by_state = defaultdict(list), defaultdict(list)
        for col, g in enumerate(source.generators[i]):
            src_by_state[g.state].append((col, g))
        for row, h in enumerate(target.generators[i]):
            tgt_by_state[h.state].append((row, h))
        for s, src in src_by_state.items():
            for t, tgt in tgt_by_state.items():
                if any(t[x] != s[c] for c, x in far.items()):
                    continue
                pairs = _far_pairs(step, source.circles[s], target.circles[t])
                for col, g in src:
                    for row, h in tgt:
                        gap = h.j_grade - g.j_grade
                        if gap < 0 or gap % 2:
                            continue
                        if any(g.labels[a] != h.labels[b] for a, b in pairs):
                            continue
                        keys.append((i, row, col))
                        powers.append(gap // 2)
    keys_sorted = sorted(range(len(keys)), key=lambda k: keys[k])
    keys = [keys[k] for k in keys_sorted]
    powers = [powers[k] for k in keys_sorted]
    return _Unknowns(keys, powers, {key: n for n, key in enumerate(keys)})


def _lead(e: Polynomial) -> int:
    return e.leading_coefficient.value


def _transposes(matrices: Mapping[int, PolyMatrix]) -> Dict[int, PolyMatrix]:
    return {i: M.transpose() for i, M in matrices.items()}


def _equations(unk: _Unknowns, step: Step, source: ChainComplex,
               target: ChainComplex) -> List[Dict[int, int]]:
    """Linear conditions: chain map, and commuting with the kept dots."""
    p = source.p
    eqs: Dict[tuple, Dict[int, int]] = defaultdict(dict)

    def add(key, u, c):
        row = eqs[key]
        row[u] = (row.get(u, 0) + c) % p

    target_dT = _transposes({i: target.d(i) for i in target.degrees})
    for u, (i, row, col) in enumerate(unk.keys):
        if i in target_dT:
            for r2, e in target_dT[i].row(row).items():
                add(("d", i, r2, col), u, _lead(e))
        for c0, e in source.d(i - 1).row(col).items():
            add(("d", i - 1, row, c0), u, -_lead(e))

    for a, b in sorted(step.arc_map.items()):
        X = dot_map(source, a).blocks
        Y = _transposes(dot_map(target, b).blocks)
        for u, (i, row, col) in enumerate(unk.keys):
            for g, e in X[i].row(col).items():
                add(("x", a, i, row, g), u, _lead(e))
            if i in Y:
                for h, e in Y[i].row(row).items():
                    add(("x", a, i, h, col), u, -_lead(e))

    seen = set()
    out = []
    for row in eqs.values():
        row = {u: c for u, c in row.items() if c}
        if not row:
            continue
        frozen = frozenset(row.items())
        if frozen in seen:
            continue
        seen.add(frozen)
        out.append(row)
    return out


def _solution_space(step: Step, source: ChainComplex, target: ChainComplex) -> Tuple[_Unknowns, List[List[int]]]:
    unk = _unknowns(step, source, target)
    eqs = _equations(unk, step, source, target)
    logger.debug("%s map: %d unknowns, %d equations", step.kind, len(unk), len(eqs))
    entries = {(r, u): c for r, row in enumerate(eqs) for u, c in row.items()}
    basis = field_nullspace(field_matrix(entries, (len(eqs), len(unk)), source.p), source.p)
    if not basis:
        raise MapConstructionError(f"no chain map for {step.kind} from {step.source.render()}")
    logger.debug("%s map: solution space of dimension %d", step.kind, len(basis))
    return unk, basis


def _to_chain_map(unk: _Unknowns, vector: Sequence[int], source: ChainComplex,
                  target: ChainComplex) -> ChainMap:
    p = source.p
    data: Dict[int, Dict[Tuple[int, int], Polynomial]] = defaultdict(dict)
    for (i, row, col), power, c in zip(unk.keys, unk.powers, vector):
        if c % p:
            data[i][(row, col)] = Polynomial.monomial(c, power, p)
    blocks = {i: PolyMatrix.from_entries(data.get(i, {}), target.rank(i), source.rank(i), p)
              for i in source.degrees if i in target.generators}
    return ChainMap(source, target, blocks, 0)


def _constant_entries(M: PolyMatrix, row_offset: int, col_offset: int, sign: int,
                      out: Dict[Tuple[int, int], int]):
    for r, c, e in M.items():
        v = e.coefficient(0).value
        if v:
            out[(r + row_offset, c + col_offset)] = sign * v


def is_quasi_isomorphism(f: ChainMap) -> bool:
    """True when the mapping cone of f is acyclic.

    Both complexes are graded and free over F[x], so it is enough to look
    at the cone with x set to 0.
    """
    S, T = f.source, f.target
    p = S.p
    degrees = sorted(set(S.degrees) | set(T.degrees))
    total = ranks = 0
    for i in range(degrees[0] - 1, degrees[-1] + 1):
        a, b = S.rank(i + 1), T.rank(i)
        a2, b2 = S.rank(i + 2), T.rank(i + 1)
        entries: Dict[Tuple[int, int], int] = {}
        _constant_entries(S.d(i + 1), 0, 0, -1, entries)
        _constant_entries(f.block(i + 1), a2, 0, 1, entries)
        _constant_entries(T.d(i), a2, a, 1, entries)
        ranks += field_rank(field_matrix(entries, (a2 + b2, a + b), p))
        total += a + b
    return 2 * ranks == total


def _normalize(vector: Sequence[int], p: int) -> List[int]:
    lead = next((c for c in vector if c % p), None)
    if lead is None:
        return list(vector)
    inv = pow(lead, p - 2, p)
    return [c * inv % p for c in vector]


def _candidates(basis: List[List[int]], p: int) -> Iterator[List[int]]:
    yield from basis
    if len(basis) > 1:
        yield [sum(col) % p for col in zip(*basis)]
    rng = random.Random(0)
    for attempt in range(RANDOM_ATTEMPTS):
        if attempt == 0:
            logger.warning("falling back to random combinations of %d chain maps", len(basis))
        coeffs = [rng.randrange(1, p) for _ in basis]
        yield [sum(c * v[k] for c, v in zip(coeffs, basis)) % p for k in range(len(basis[0]))]


def _forward_map(step: Step, source: ChainComplex, target: ChainComplex) -> ChainMap:
    unk, basis = _solution_space(step, source, target)
    for n, vector in enumerate(_candidates(basis, source.p)):
        f = _to_chain_map(unk, _normalize(vector, source.p), source, target)
        if is_quasi_isomorphism(f):
            logger.debug("%s map: candidate %d is a quasi-isomorphism", step.kind, n)
            return f.check()
    raise MapConstructionError(f"no quasi-isomorphism found for {step.kind} from {step.source.render()}")


def _inverse_map(step: Step, source: ChainComplex, target: ChainComplex, forward: ChainMap) -> ChainMap:
    """A map g with H(g)·H(forward) = id, where forward runs target -> source."""
    p = source.p
    unk, basis = _solution_space(step, source, target)
    h = frame_homology(target.diagram, p)
    columns = []
    for vector in basis:
        g = _to_chain_map(unk, vector, source, target)
        columns.append(induced_homology_map(g @ forward, h, h).matrices)
    eqs: Dict[tuple, Dict[int, int]] = defaultdict(dict)
    for k, matrices in enumerate(columns):
        for i, M in matrices.items():
            for r, c, e in M.items():
                for power, coeff in enumerate(e.coeffs):
                    if coeff:
                        eqs[(i, r, c, power)][k] = coeff
    rhs_col = len(basis)
    for i in h.degrees:
        for r in range(len(h.generators(i))):
            eqs[(i, r, r, 0)][rhs_col] = p - 1
    entries = {(n, k): c for n, row in enumerate(eqs.values()) for k, c in row.items()}
    null = field_nullspace(field_matrix(entries, (len(eqs), rhs_col + 1), p), p)
    solution = next((v for v in null if v[rhs_col] % p), None)
    if solution is None:
        raise MapConstructionError(f"no homology inverse for {step.kind} from {step.source.render()}")
    inv = pow(solution[rhs_col], p - 2, p)
    coeffs = [c * inv % p for c in solution[:rhs_col]]
    vector = [sum(c * v[u] for c, v in zip(coeffs, basis)) % p for u in range(len(unk))]
    return _to_chain_map(unk, vector, source, target).check()


_REIDEMEISTER_MAPS: Dict[Tuple[OrientedDiagram, OrientedDiagram, int], ChainMap] = {}
_INVERSE_MAPS: Dict[Tuple[OrientedDiagram, OrientedDiagram, int], ChainMap] = {}


def reidemeister_map(step: Step, source: ChainComplex, target: ChainComplex) -> ChainMap:
    """Chain homotopy equivalence for a Reidemeister move, solved once per pair of frames."""
    key = (step.source, step.target, source.p)
    if key not in _REIDEMEISTER_MAPS:
        _REIDEMEISTER_MAPS[key] = _forward_map(step, source, target)
    return _REIDEMEISTER_MAPS[key]


def reidemeister_inverse(step: Step, source: ChainComplex, target: ChainComplex, forward: ChainMap) -> ChainMap:
    """Map for ``step`` that undoes ``forward`` on homology; ``forward`` runs target -> source."""
    key = (step.source, step.target, source.p)
    if key not in _INVERSE_MAPS:
        _INVERSE_MAPS[key] = _inverse_map(step, source, target, forward)
    return _INVERSE_MAPS[key]


def clear_cache():
    """Forget solved Reidemeister maps and cached frame complexes."""
    _REIDEMEISTER_MAPS.clear()
    _INVERSE_MAPS.clear()
    frame_complex.cache_clear()
    frame_homology.cache_clear()


def elementary_map(move: Union[Move, Step], source: ChainComplex) -> ChainMap:
    """Chain map of one move starting at the complex ``source``.

    Raises:
        MoveNotApplicable: if a Step is given whose source frame is not
            the diagram of ``source``.
        NotAChainMap, MapConstructionError: if the construction fails.
    """
    if isinstance(move, Step):
        step = move
        if step.source != source.diagram:
            raise MoveNotApplicable(f"{step.kind} starts at {step.source.render()}, not {source.diagram.render()}")
    else:
        outcome = move.apply(source.diagram)
        step = step_from_outcome(outcome, outcome.target)
    target = frame_complex(step.target, source.p)
    if step.kind in MORSE_DEGREES:
        return _morse_map(step, source, target)
    return reidemeister_map(step, source, target)


def movie_map(mov: Movie, p: int = DEFAULT_PRIME) -> ChainMap:
    """Composite of the elementary maps, first move applied first."""
    current = frame_complex(mov.frames[0], p)
    f = ChainMap.identity(current)
    for step in mov.steps:
        e = elementary_map(step, current)
        f = e @ f
        current = e.target
    logger.info("movie map of %s: j-degree %d", mov.name or "<unnamed>", f.j_degree)
    return f


def mirror_movie_map(mov: Movie, p: int = DEFAULT_PRIME) -> ChainMap:
    """Map of the movie run backwards.

    Morse moves are replaced by their reverses. A Reidemeister move gets
    the homology inverse of the map ``movie_map`` uses for it.
    """
    mirrored = mirror_movie(mov)
    n = len(mov.steps)
    current = frame_complex(mirrored.frames[0], p)
    f = ChainMap.identity(current)
    for k, step in enumerate(mirrored.steps):
        if step.kind in MORSE_DEGREES:
            e = elementary_map(step, current)
        else:
            original = n - 1 - k
            forward = elementary_map(mov.steps[original], frame_complex(mov.frames[original], p))
            if forward.target.diagram != current.diagram:
                raise MapConstructionError(f"mirrored frame {k} does not match frame {original + 1}")
            e = reidemeister_inverse(step, current, frame_complex(step.target, p), forward)
        f = e @ f
        current = e.target
    logger.info("mirror map of %s: j-degree %d", mov.name or "<unnamed>", f.j_degree)
    return f
