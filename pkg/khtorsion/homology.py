"""
Homology of Khovanov complexes over F_p[x].

The complex is first shrunk by cancelling unit entries of the
differential (Gaussian elimination). The small complex that survives is
then handled by Smith normal forms, one degree at a time: the SNF of d_i
gives kernel coordinates, the SNF of the image of d_{i-1} in those
coordinates gives the cyclic decomposition. Homology generators are kept
as honest cycles of the original complex so chain maps can be pushed
through them.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple, Union

from .algebra import (
    FieldElement,
    ModuleDecomposition,
    PolyMatrix,
    Polynomial,
    Summand,
    field_homology_dimension,
    field_matrix,
    field_rank,
    snf,
)
from .complex import ChainComplex, ChainMap
from .errors import NonMonomialTorsion, NotHomogeneous, NotWellDefined

logger = logging.getLogger(__name__)

Vector = Dict[int, Polynomial]
Grade = Tuple[int, int]


def _add_to(v: Vector, key: int, value: Polynomial):
    new = v[key] + value if key in v else value
    if new:
        v[key] = new
    else:
        v.pop(key, None)


@dataclass(frozen=True)
class Cancellation:
    """One Gaussian elimination step: the unit entry phi = d_degree[target, source]."""
    degree: int
    source: int
    target: int
    phi_inv: int
    delta: Mapping[int, Polynomial]
    gamma: Mapping[int, Polynomial]


class Reduction:
    """Cancels every unit entry of a complex, keeping the homotopy equivalence.

    Indices are those of the original complex throughout; ``alive[i]`` lists
    the degree-i basis elements that survived.
    """

    def __init__(self, cx: ChainComplex):
        self.cx = cx
        self.p = cx.p
        self.alive: Dict[int, set] = {i: set(range(cx.rank(i))) for i in cx.degrees}
        self.rows: Dict[int, Dict[int, Vector]] = {}
        self.cols: Dict[int, Dict[int, Vector]] = {}
        for i in cx.degrees:
            rows: Dict[int, Vector] = {}
            cols: Dict[int, Vector] = {c: {} for c in range(cx.rank(i))}
            for r, c, e in cx.d(i).items():
                rows.setdefault(r, {})[c] = e
                cols[c][r] = e
            self.rows[i] = rows
            self.cols[i] = cols
        self.steps: List[Cancellation] = []

    def run(self) -> "Reduction":
        for i in self.cx.degrees:
            progress = True
            while progress:
                progress = False
                for r in sorted(self.rows[i]):
                    row = self.rows[i].get(r)
                    if not row:
                        continue
                    best = None
                    for c, e in row.items():
                        if e.is_unit:
                            key = (len(self.cols[i][c]), c)
                            if best is None or key < best:
                                best = key
                    if best is not None:
                        self._cancel(i, best[1], r)
                        progress = True
        logger.debug("reduction of %s: %d cancellations, ranks %s", self.cx.diagram.render(),
                     len(self.steps), {i: len(a) for i, a in self.alive.items()})
        return self

    def _cancel(self, i: int, source: int, target: int):
        R, C = self.rows[i], self.cols[i]
        phi = R[target][source]
        phi_inv = phi.leading_coefficient.inverse().value
        delta = {c: e for c, e in R[target].items() if c != source}
        gamma = {r: e for r, e in C[source].items() if r != target}
        for c in R.pop(target):
            C[c].pop(target, None)
        for r in C.pop(source):
            if r in R:
                R[r].pop(source, None)
        for r, g in gamma.items():
            coef = g * (-phi_inv % self.p)
            row = R.setdefault(r, {})
            for c, dl in delta.items():
                new = coef * dl + row[c] if c in row else coef * dl
                if new:
                    row[c] = new
                    C.setdefault(c, {})[r] = new
                else:
                    row.pop(c, None)
                    C.get(c, {}).pop(r, None)
        if i - 1 in self.rows:
            Rm, Cm = self.rows[i - 1], self.cols[i - 1]
            for c in Rm.pop(source, {}):
                Cm[c].pop(source, None)
        if i + 1 in self.rows:
            Rp, Cp = self.rows[i + 1], self.cols[i + 1]
            for r in Cp.pop(target, {}):
                Rp[r].pop(target, None)
        self.alive[i].discard(source)
        self.alive[i + 1].discard(target)
        self.steps.append(Cancellation(i, source, target, phi_inv, delta, gamma))

    def basis(self, i: int) -> List[int]:
        return sorted(self.alive.get(i, ()))

    def matrix(self, i: int) -> PolyMatrix:
        """The reduced differential on the surviving bases of degrees i and i + 1."""
        cols, rows = self.basis(i), self.basis(i + 1)
        col_pos = {c: k for k, c in enumerate(cols)}
        row_pos = {r: k for k, r in enumerate(rows)}
        data: Dict[int, Dict[int, Polynomial]] = {}
        for r, row in self.rows.get(i, {}).items():
            if r in row_pos:
                data[row_pos[r]] = {col_pos[c]: e for c, e in row.items() if c in col_pos}
        return PolyMatrix(len(rows), len(cols), self.p, data)

    def project(self, i: int, v: Vector) -> Vector:
        """Carry a degree-i chain of the original complex to the reduced one."""
        v = dict(v)
        for st in self.steps:
            if st.degree == i:
                v.pop(st.source, None)
            elif st.degree + 1 == i and st.target in v:
                a = v.pop(st.target) * (-st.phi_inv % self.p)
                for r, g in st.gamma.items():
                    _add_to(v, r, g * a)
        return v

    def lift(self, i: int, u: Vector) -> Vector:
        """Carry a degree-i chain of the reduced complex back to the original one."""
        u = dict(u)
        for st in reversed(self.steps):
            if st.degree == i:
                s = Polynomial.zero(self.p)
                for c, e in st.delta.items():
                    if c in u:
                        s = s + e * u[c]
                if s:
                    u[st.source] = s * (-st.phi_inv % self.p)
        return u


@dataclass(frozen=True)
class HomologyGenerator:
    order: int
    grade: Grade
    vector: Mapping[int, Polynomial] = field(repr=False)

    @property
    def is_free(self) -> bool:
        return self.order == 0


@dataclass
class DegreeHomology:
    degree: int
    basis: List[int]
    rank: int
    V: PolyMatrix = field(repr=False)
    V_inv: PolyMatrix = field(repr=False)
    U2: PolyMatrix = field(repr=False)
    rows: List[int]
    generators: List[HomologyGenerator]


def _vector_grade(cx: ChainComplex, i: int, v: Mapping[int, Polynomial]) -> Grade:
    found = None
    for m, e in v.items():
        if not e.is_monomial:
            raise NotHomogeneous(f"homology generator has coefficient {e}")
        g = (i, cx.generators[i][m].j_grade - 2 * e.degree)
        if found is not None and g != found:
            raise NotHomogeneous(f"homology generator mixes grades {found} and {g}")
        found = g
    if found is None:
        raise NotHomogeneous("homology generator is zero")
    return found


def _degree_homology(red: Reduction, i: int) -> DegreeHomology:
    cx = red.cx
    basis = red.basis(i)
    m = len(basis)
    sf = snf(red.matrix(i))
    r = sf.rank
    prev = red.matrix(i - 1)
    P = (sf.V_inv @ prev).submatrix(list(range(r, m)), list(range(prev.cols)))
    sf2 = snf(P)
    rows, gens = [], []
    for k in range(m - r):
        if k < sf2.rank:
            d = sf2.D[k, k]
            if d.is_unit:
                continue
            if not d.is_monomial:
                raise NonMonomialTorsion(f"degree {i}: invariant factor {d} is not a power of x")
            order = d.degree
        else:
            order = 0
        y = [sf2.U_inv[l, k] for l in range(m - r)]
        reduced: Vector = {}
        for l, yl in enumerate(y):
            if not yl:
                continue
            for pos in range(m):
                e = sf.V[pos, r + l]
                if e:
                    _add_to(reduced, basis[pos], e * yl)
        vector = red.lift(i, reduced)
        vector = {key: val for key, val in vector.items() if val}
        rows.append(k)
        gens.append(HomologyGenerator(order, _vector_grade(cx, i, vector), vector))
    return DegreeHomology(i, basis, r, sf.V, sf.V_inv, sf2.U, rows, gens)


@dataclass
class HomologyResult:
    complex: ChainComplex
    reduction: Reduction = field(repr=False)
    degrees: Dict[int, DegreeHomology] = field(repr=False)

    @property
    def p(self) -> int:
        return self.complex.p

    def generators(self, i: int) -> List[HomologyGenerator]:
        dh = self.degrees.get(i)
        return dh.generators if dh else []

    @property
    def decomposition(self) -> ModuleDecomposition:
        return ModuleDecomposition(tuple(Summand(g.order, g.grade)
                                         for i in sorted(self.degrees) for g in self.degrees[i].generators))

    @property
    def by_bigrade(self) -> Dict[Grade, ModuleDecomposition]:
        return dict(sorted(self.decomposition.by_grade().items()))

    @property
    def free_rank_total(self) -> int:
        return self.decomposition.free_rank

    @property
    def torsion_exponents_total(self) -> Tuple[int, ...]:
        return self.decomposition.torsion_exponents

    @property
    def xo(self) -> int:
        return max(self.torsion_exponents_total, default=0)

    def free_rank(self, i: int) -> int:
        return sum(1 for g in self.generators(i) if g.is_free)

    def torsion(self, i: int) -> List[int]:
        return sorted(g.order for g in self.generators(i) if not g.is_free)

    def orders(self, i: int) -> List[int]:
        return [g.order for g in self.generators(i)]

    def coordinates(self, i: int, v: Mapping[int, Polynomial]) -> List[Polynomial]:
        """Coordinates of the class of a degree-i cycle on the homology generators.

        Raises:
            NotWellDefined: if v is not a cycle.
        """
        dh = self.degrees.get(i)
        if dh is None:
            return []
        reduced = self.reduction.project(i, v)
        pos = {b: k for k, b in enumerate(dh.basis)}
        dense = [Polynomial.zero(self.p)] * len(dh.basis)
        for key, val in reduced.items():
            dense[pos[key]] = val
        w = dh.V_inv.apply(dense)
        if any(w[:dh.rank]):
            raise NotWellDefined(f"degree {i}: vector is not a cycle")
        y2 = dh.U2.apply(w[dh.rank:])
        out = []
        for k, g in zip(dh.rows, dh.generators):
            c = y2[k]
            out.append(c.truncate(g.order) if g.order else c)
        return out

    def summary(self) -> Dict:
        return {
            "free_rank": self.free_rank_total,
            "torsion_exponents": list(self.torsion_exponents_total),
            "xo": self.xo,
            "bigrades": [
                {"i": g[0], "j": g[1], "free_rank": dec.free_rank, "torsion": list(dec.torsion_exponents)}
                for g, dec in self.by_bigrade.items()
            ],
        }


def homology(c: ChainComplex) -> HomologyResult:
    """Graded F[x]-module decomposition of H(c), with explicit cycle generators."""
    red = Reduction(c).run()
    degrees = {i: _degree_homology(red, i) for i in c.degrees}
    result = HomologyResult(c, red, degrees)
    logger.info("homology of %s: free rank %d, torsion %s", c.diagram.render(),
                result.free_rank_total, list(result.torsion_exponents_total))
    return result


def torsion_order(h: Union[HomologyResult, ModuleDecomposition]) -> int:
    """Least n with x^n killing the torsion part; 0 when there is none."""
    if isinstance(h, ModuleDecomposition):
        return h.torsion_order
    return h.xo


def _specialized_entries(M: PolyMatrix, t: int, p: int) -> Dict[Tuple[int, int], int]:
    """Write M over F[x]/(x^2 - t) on the F-basis {g, x·g} of each generator."""
    out: Dict[Tuple[int, int], int] = {}
    for r, c, e in M.items():
        for k, coef in enumerate(e.coeffs):
            if not coef:
                continue
            for src in (0, 1):
                total = k + src
                key = (2 * r + total % 2, 2 * c + src)
                out[key] = (out.get(key, 0) + coef * pow(t, total // 2, p)) % p
    return out


def specialize_dimension(c: ChainComplex, t_value: Union[int, FieldElement]) -> Dict[int, int]:
    """F-dimension of H(c ⊗ F[x]/(x^2 - t_value)) per homological degree.

    Computed by ranks over F on the unreduced complex, independently of the
    Smith normal form path.
    """
    t = int(t_value) % c.p
    dims = {}
    for i in c.degrees:
        n = 2 * c.rank(i)
        dA = field_matrix(_specialized_entries(c.d(i - 1), t, c.p), (n, 2 * c.rank(i - 1)), c.p)
        dB = field_matrix(_specialized_entries(c.d(i), t, c.p), (2 * c.rank(i + 1), n), c.p)
        dims[i] = field_homology_dimension(dA, dB)
    return dims


def specialize_bigraded(c: ChainComplex) -> Dict[Grade, int]:
    """Bigraded F-dimensions of the t = 0 specialization (Khovanov homology)."""

    def j_of(i: int, k: int) -> int:
        return c.generators[i][k // 2].j_grade - 2 * (k % 2)

    def split(i: int) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for k in range(2 * c.rank(i)):
            out.setdefault(j_of(i, k), []).append(k)
        return out

    def block_rank(i: int, j: int, entries, pieces) -> int:
        cols = pieces.get(i, {}).get(j, [])
        rows = pieces.get(i + 1, {}).get(j, [])
        if not cols or not rows:
            return 0
        cpos = {k: n for n, k in enumerate(cols)}
        rpos = {k: n for n, k in enumerate(rows)}
        sub = {(rpos[r], cpos[col]): v for (r, col), v in entries[i].items() if r in rpos and col in cpos}
        return field_rank(field_matrix(sub, (len(rows), len(cols)), c.p))

    entries = {i: _specialized_entries(c.d(i), 0, c.p) for i in c.degrees}
    pieces = {i: split(i) for i in c.degrees}
    dims: Dict[Grade, int] = {}
    for i in c.degrees:
        for j, ks in pieces[i].items():
            dim = len(ks) - block_rank(i, j, entries, pieces) - block_rank(i - 1, j, entries, pieces)
            if dim:
                dims[(i, j)] = dim
    return dict(sorted(dims.items()))


def graded_euler_characteristic(dims: Mapping[Grade, int]) -> Dict[int, int]:
    """Sum of (-1)^i dim over i, as {j: coefficient of q^j}."""
    out: Dict[int, int] = {}
    for (i, j), d in dims.items():
        out[j] = out.get(j, 0) + (-1) ** (i % 2) * d
    return {j: v for j, v in sorted(out.items()) if v}


def chain_euler_characteristic(c: ChainComplex) -> Dict[int, int]:
    """The same alternating sum taken over chain groups of the t = 0 specialization."""
    dims: Dict[Grade, int] = {}
    for i in c.degrees:
        for g in c.generators[i]:
            for j in (g.j_grade, g.j_grade - 2):
                dims[(i, j)] = dims.get((i, j), 0) + 1
    return graded_euler_characteristic(dims)


def predicted_t0_dimensions(h: HomologyResult) -> Dict[int, int]:
    """dim H_i(C ⊗ F[x]/(x^2)) from the F[x]-decomposition.

    Each F[x] contributes 2; each F[x]/(x^k) contributes min(k, 2) in its own
    degree and again, through Tor, in the degree below.
    """
    out = {}
    for i in h.complex.degrees:
        out[i] = (2 * h.free_rank(i) + sum(min(k, 2) for k in h.torsion(i))
                  + sum(min(k, 2) for k in h.torsion(i + 1)))
    return out


def predicted_t1_dimensions(h: HomologyResult) -> Dict[int, int]:
    """dim H_i(C ⊗ F[x]/(x^2 - 1)): x is invertible there, so torsion dies."""
    return {i: 2 * h.free_rank(i) for i in h.complex.degrees}


@dataclass
class HomologyMap:
    """An F[x]-linear map between homologies, on their cyclic generators.

    ``matrices[i]`` has shape (target generators, source generators); entry
    (l, k) is reduced modulo x^order of target generator l.
    """
    source: HomologyResult
    target: HomologyResult
    matrices: Dict[int, PolyMatrix]
    j_degree: int = 0

    @property
    def degrees(self) -> List[int]:
        return sorted(self.matrices)

    def _reduce(self, i: int, M: PolyMatrix) -> PolyMatrix:
        orders = self.target.orders(i)
        data = {}
        for r, c, e in M.items():
            data.setdefault(r, {})[c] = e.truncate(orders[r]) if orders[r] else e
        return PolyMatrix(M.rows, M.cols, M.p, data)

    def scale(self, c: Union[int, Polynomial]) -> "HomologyMap":
        power = c.degree if isinstance(c, Polynomial) and c.is_monomial else 0
        return HomologyMap(self.source, self.target,
                           {i: self._reduce(i, M.scale(c)) for i, M in self.matrices.items()},
                           self.j_degree - 2 * power)

    def is_zero(self) -> bool:
        return all(M.is_zero() for M in self.matrices.values())

    def is_identity(self) -> bool:
        return self == identity_homology_map(self.source)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomologyMap):
            return NotImplemented
        return all(self.matrices.get(i) == other.matrices.get(i)
                   for i in set(self.matrices) | set(other.matrices))

    __hash__ = None

    def scalar_to(self, other: "HomologyMap") -> Optional[FieldElement]:
        """The unit λ with self = λ·other, or None if there is none."""
        p = self.source.p
        lam = None
        for i in sorted(set(self.matrices) | set(other.matrices)):
            mine, theirs = self.matrices.get(i), other.matrices.get(i)
            if theirs is None or mine is None:
                continue
            for r, c, e in theirs.items():
                k = e.valuation
                lam = FieldElement(mine[r, c].coefficient(k).value * e.coefficient(k).inverse().value, p)
                break
            if lam is not None:
                break
        if lam is None:
            return FieldElement(1, p) if self.is_zero() else None
        if not lam:
            return None
        if self != other.scale(lam.value):
            return None
        return lam

    def is_injective(self) -> bool:
        """True when the map has trivial kernel as a map of F[x]-modules."""
        for i, Phi in self.matrices.items():
            src_orders = self.source.orders(i)
            tgt_orders = self.target.orders(i)
            L, K = Phi.rows, Phi.cols
            torsion_rows = [l for l in range(L) if tgt_orders[l]]
            data = {r: dict(Phi.row(r)) for r in range(L)}
            for n, l in enumerate(torsion_rows):
                data.setdefault(l, {})[K + n] = Polynomial.monomial(1, tgt_orders[l], self.source.p)
            A = PolyMatrix(L, K + len(torsion_rows), self.source.p, data)
            sf = snf(A)
            for col in range(sf.rank, A.cols):
                for k in range(K):
                    a = sf.V[k, col]
                    if not a:
                        continue
                    if not src_orders[k] or a.valuation < src_orders[k]:
                        return False
        return True

    def to_json(self) -> Dict:
        return {str(i): [[str(e) for e in row] for row in M.to_rows()] for i, M in sorted(self.matrices.items())}


def identity_homology_map(h: HomologyResult) -> HomologyMap:
    return HomologyMap(h, h, {i: PolyMatrix.identity(len(h.generators(i)), h.p) for i in h.degrees})


def induced_homology_map(f: ChainMap, source: Optional[HomologyResult] = None,
                         target: Optional[HomologyResult] = None) -> HomologyMap:
    """Push the homology generators of f.source through f.

    Raises:
        NotWellDefined: if an image is not a cycle, or a torsion relation is
            not respected.
    """
    source = source or homology(f.source)
    target = target or homology(f.target)
    p = f.source.p
    matrices = {}
    for i in source.degrees:
        gens = source.generators(i)
        tgt_gens = target.generators(i)
        data: Dict[int, Dict[int, Polynomial]] = {}
        block = f.block(i)
        for k, g in enumerate(gens):
            dense = [Polynomial.zero(p)] * f.source.rank(i)
            for key, val in g.vector.items():
                dense[key] = val
            image = {r: e for r, e in enumerate(block.apply(dense)) if e}
            coords = target.coordinates(i, image)
            for l, cl in enumerate(coords):
                if g.order:
                    killed = cl.shift(g.order)
                    order = tgt_gens[l].order
                    if (killed.truncate(order) if order else killed):
                        raise NotWellDefined(f"degree {i}: torsion relation of generator {k} not respected")
                if cl:
                    data.setdefault(l, {})[k] = cl
        matrices[i] = PolyMatrix(len(tgt_gens), len(gens), p, data)
    return HomologyMap(source, target, matrices, f.j_degree)
