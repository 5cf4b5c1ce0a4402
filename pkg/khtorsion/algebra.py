"""
Exact arithmetic over F_p and F_p[x].

Polynomials keep their coefficients lowest degree first and hand the
arithmetic to ``sympy.polys.galoistools``. Linear algebra over the prime
field itself goes through ``sympy.polys.matrices.DomainMatrix`` over
``GF(p)``. Everything in here is immutable once built, except the scratch
state of the Smith normal form reducer.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import GF, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_add, gf_div, gf_gcdex, gf_monic, gf_mul, gf_sub
from sympy.polys.matrices import DomainMatrix

from .errors import ComposeNotZero, ConfigError, NonMonomialTorsion, NotHomogeneous

logger = logging.getLogger(__name__)

DEFAULT_PRIME = 32003

Grade = Tuple[int, int]


def check_prime(p: int) -> int:
    """Validate a field characteristic and return it as an int.

    Raises:
        ConfigError: if p is 2 (2 must be invertible in the base field) or
            is not a prime at all.
    """
    try:
        p = int(p)
    except (TypeError, ValueError):
        raise ConfigError(f"prime must be an integer, got {p!r}")
    if p == 2:
        raise ConfigError("prime 2 rejected: the base field must be one in which 2 is invertible")
    if p < 2 or not isprime(p):
        raise ConfigError(f"{p} is not an odd prime")
    return p


@lru_cache(maxsize=None)
def prime_field(p: int):
    """The sympy domain GF(p) with residues represented as 0..p-1."""
    return GF(p, symmetric=False)


@dataclass(frozen=True)
class FieldElement:
    """A residue modulo the odd prime p."""
    value: int
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise ValueError(f"mixing fields F_{self.p} and F_{other.p}")
            return other.value
        return int(other)

    def __add__(self, other) -> "FieldElement":
        return FieldElement(self.value + self._other(other), self.p)

    __radd__ = __add__

    def __sub__(self, other) -> "FieldElement":
        return FieldElement(self.value - self._other(other), self.p)

    def __rsub__(self, other) -> "FieldElement":
        return FieldElement(self._other(other) - self.value, self.p)

    def __mul__(self, other) -> "FieldElement":
        return FieldElement(self.value * self._other(other), self.p)

    __rmul__ = __mul__

    def __neg__(self) -> "FieldElement":
        return FieldElement(-self.value, self.p)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return FieldElement(ZZ.invert(self.value, self.p), self.p)

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def signed(self) -> int:
        """Representative in (-p/2, p/2), used for display."""
        return self.value - self.p if self.value > self.p // 2 else self.value

    def __str__(self) -> str:
        return str(self.signed())


def signed_residue(value: int, p: int) -> int:
    value %= p
    return value - p if value > p // 2 else value


@dataclass(frozen=True)
class Polynomial:
    """A polynomial in F_p[x].

    ``coeffs[k]`` is the coefficient of x^k. The tuple never ends in a zero,
    so the zero polynomial is the empty tuple.
    """
    coeffs: Tuple[int, ...] = ()
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        c = [int(a) % self.p for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def zero(cls, p: int = DEFAULT_PRIME) -> "Polynomial":
        return cls((), p)

    @classmethod
    def one(cls, p: int = DEFAULT_PRIME) -> "Polynomial":
        return cls((1,), p)

    @classmethod
    def constant(cls, c: Union[int, FieldElement], p: int = DEFAULT_PRIME) -> "Polynomial":
        return cls((int(c),), p)

    @classmethod
    def monomial(cls, c: Union[int, FieldElement], k: int, p: int = DEFAULT_PRIME) -> "Polynomial":
        if k < 0:
            raise ValueError(f"negative exponent {k}")
        return cls((0,) * k + (int(c),), p)

    @classmethod
    def x(cls, p: int = DEFAULT_PRIME) -> "Polynomial":
        return cls((0, 1), p)

    @classmethod
    def _from_gf(cls, f: Sequence, p: int) -> "Polynomial":
        return cls(tuple(int(a) for a in reversed(f)), p)

    def _gf(self) -> List[int]:
        return [ZZ(a) for a in reversed(self.coeffs)]

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.p != self.p:
                raise ValueError(f"mixing F_{self.p}[x] and F_{other.p}[x]")
            return other
        return Polynomial((int(other),), self.p)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_unit(self) -> bool:
        return len(self.coeffs) == 1

    @property
    def is_monomial(self) -> bool:
        return bool(self.coeffs) and all(a == 0 for a in self.coeffs[:-1])

    @property
    def leading_coefficient(self) -> FieldElement:
        return FieldElement(self.coeffs[-1] if self.coeffs else 0, self.p)

    @property
    def valuation(self) -> int:
        """Largest k with x^k dividing self; -1 for zero."""
        for k, a in enumerate(self.coeffs):
            if a:
                return k
        return -1

    def coefficient(self, k: int) -> FieldElement:
        return FieldElement(self.coeffs[k] if 0 <= k < len(self.coeffs) else 0, self.p)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        return Polynomial._from_gf(gf_add(self._gf(), other._gf(), self.p, ZZ), self.p)

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        return Polynomial._from_gf(gf_sub(self._gf(), other._gf(), self.p, ZZ), self.p)

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-a for a in self.coeffs), self.p)

    def __mul__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return Polynomial((), self.p)
        return Polynomial._from_gf(gf_mul(self._gf(), other._gf(), self.p, ZZ), self.p)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError(f"negative power {k} of a polynomial")
        result = Polynomial.one(self.p)
        for _ in range(k):
            result = result * self
        return result

    def __divmod__(self, other) -> Tuple["Polynomial", "Polynomial"]:
        other = self._coerce(other)
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        q, r = gf_div(self._gf(), other._gf(), self.p, ZZ)
        return Polynomial._from_gf(q, self.p), Polynomial._from_gf(r, self.p)

    def __floordiv__(self, other) -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Polynomial":
        return divmod(self, other)[1]

    def divides(self, other: "Polynomial") -> bool:
        if not self.coeffs:
            return not other.coeffs
        return not (other % self).coeffs

    def shift(self, k: int) -> "Polynomial":
        """Multiply by x^k."""
        if not self.coeffs or k == 0:
            return self
        return Polynomial((0,) * k + self.coeffs, self.p)

    def truncate(self, k: int) -> "Polynomial":
        """Reduce modulo x^k."""
        return Polynomial(self.coeffs[:k], self.p)

    def monic(self) -> Tuple[FieldElement, "Polynomial"]:
        """Split into (leading coefficient, monic polynomial)."""
        lc, f = gf_monic(self._gf(), self.p, ZZ)
        return FieldElement(int(lc), self.p), Polynomial._from_gf(f, self.p)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = signed_residue(self.coeffs[k], self.p)
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                power = "x" if k == 1 else f"x^{k}"
                body = power if mag == 1 else f"{mag}{power}"
            terms.append((sign, body))
        head_sign, head = terms[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def poly_gcd(a: Polynomial, b: Polynomial) -> Tuple[Polynomial, Polynomial, Polynomial]:
    """Extended Euclid in F_p[x].

    Returns:
        (g, u, v) with g monic (or zero when a = b = 0) and g = u*a + v*b.
    """
    if a.p != b.p:
        raise ValueError("polynomials over different fields")
    s, t, h = gf_gcdex(a._gf(), b._gf(), a.p, ZZ)
    return Polynomial._from_gf(h, a.p), Polynomial._from_gf(s, a.p), Polynomial._from_gf(t, a.p)


Entry = Union[int, FieldElement, Polynomial]


class PolyMatrix:
    """A rows x cols matrix over F_p[x].

    Storage is a dict of rows holding only the nonzero entries; the public
    view is the dense one (``entries`` is row-major, ``self[i, j]`` answers
    for every position).
    """

    __slots__ = ("rows", "cols", "p", "_data")

    def __init__(self, rows: int, cols: int, p: int = DEFAULT_PRIME,
                 data: Optional[Mapping[int, Mapping[int, Polynomial]]] = None):
        if rows < 0 or cols < 0:
            raise ValueError(f"bad shape ({rows}, {cols})")
        self.rows = rows
        self.cols = cols
        self.p = p
        self._data: Dict[int, Dict[int, Polynomial]] = {}
        for i, row in (data or {}).items():
            kept = {j: v for j, v in row.items() if v}
            if kept:
                self._data[i] = kept

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int = DEFAULT_PRIME) -> "PolyMatrix":
        return cls(rows, cols, p)

    @classmethod
    def identity(cls, n: int, p: int = DEFAULT_PRIME) -> "PolyMatrix":
        one = Polynomial.one(p)
        return cls(n, n, p, {i: {i: one} for i in range(n)})

    @classmethod
    def diagonal(cls, entries: Sequence[Entry], p: int = DEFAULT_PRIME) -> "PolyMatrix":
        n = len(entries)
        return cls(n, n, p, {i: {i: _as_poly(e, p)} for i, e in enumerate(entries)})

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Entry]], p: int = DEFAULT_PRIME,
                  cols: Optional[int] = None) -> "PolyMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        data = {}
        for i, row in enumerate(rows):
            if len(row) != cols:
                raise ValueError(f"row {i} has {len(row)} entries, expected {cols}")
            data[i] = {j: _as_poly(e, p) for j, e in enumerate(row)}
        return cls(len(rows), cols, p, data)

    @classmethod
    def from_entries(cls, entries: Mapping[Tuple[int, int], Entry], rows: int, cols: int,
                     p: int = DEFAULT_PRIME) -> "PolyMatrix":
        data: Dict[int, Dict[int, Polynomial]] = {}
        for (i, j), e in entries.items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i}, {j}) outside {rows}x{cols}")
            data.setdefault(i, {})[j] = _as_poly(e, p)
        return cls(rows, cols, p, data)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> Tuple[Polynomial, ...]:
        zero = Polynomial.zero(self.p)
        return tuple(self._data.get(i, {}).get(j, zero)
                     for i in range(self.rows) for j in range(self.cols))

    def __getitem__(self, key: Tuple[int, int]) -> Polynomial:
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"({i}, {j}) outside {self.rows}x{self.cols}")
        return self._data.get(i, {}).get(j, Polynomial.zero(self.p))

    def row(self, i: int) -> Dict[int, Polynomial]:
        """Nonzero entries of row i as {column: entry}."""
        return dict(self._data.get(i, {}))

    def items(self) -> Iterator[Tuple[int, int, Polynomial]]:
        """Nonzero entries in row-major order."""
        for i in sorted(self._data):
            row = self._data[i]
            for j in sorted(row):
                yield i, j, row[j]

    def to_rows(self) -> List[List[Polynomial]]:
        zero = Polynomial.zero(self.p)
        return [[self._data.get(i, {}).get(j, zero) for j in range(self.cols)]
                for i in range(self.rows)]

    @property
    def nonzero_count(self) -> int:
        return sum(len(r) for r in self._data.values())

    def is_zero(self) -> bool:
        return not self._data

    def is_identity(self) -> bool:
        if self.rows != self.cols or len(self._data) != self.rows:
            return False
        return all(row.keys() == {i} and row[i].coeffs == (1,) for i, row in self._data.items())

    def _check_same_shape(self, other: "PolyMatrix"):
        if self.shape != other.shape or self.p != other.p:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_same_shape(other)
        data = {i: dict(r) for i, r in self._data.items()}
        for i, j, v in other.items():
            row = data.setdefault(i, {})
            row[j] = row[j] + v if j in row else v
        return PolyMatrix(self.rows, self.cols, self.p, data)

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, self.p,
                          {i: {j: -v for j, v in r.items()} for i, r in self._data.items()})

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + (-other)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        data: Dict[int, Dict[int, Polynomial]] = {}
        for i, row in self._data.items():
            acc: Dict[int, Polynomial] = {}
            for k, a in row.items():
                for j, b in other._data.get(k, {}).items():
                    prod = a * b
                    acc[j] = acc[j] + prod if j in acc else prod
            data[i] = acc
        return PolyMatrix(self.rows, other.cols, self.p, data)

    def scale(self, c: Entry) -> "PolyMatrix":
        c = _as_poly(c, self.p)
        return PolyMatrix(self.rows, self.cols, self.p,
                          {i: {j: c * v for j, v in r.items()} for i, r in self._data.items()})

    def __mul__(self, c: Entry) -> "PolyMatrix":
        return self.scale(c)

    __rmul__ = __mul__

    def transpose(self) -> "PolyMatrix":
        data: Dict[int, Dict[int, Polynomial]] = {}
        for i, j, v in self.items():
            data.setdefault(j, {})[i] = v
        return PolyMatrix(self.cols, self.rows, self.p, data)

    def submatrix(self, row_index: Sequence[int], col_index: Sequence[int]) -> "PolyMatrix":
        col_pos = {j: n for n, j in enumerate(col_index)}
        data = {}
        for m, i in enumerate(row_index):
            row = self._data.get(i, {})
            data[m] = {col_pos[j]: v for j, v in row.items() if j in col_pos}
        return PolyMatrix(len(row_index), len(col_index), self.p, data)

    def apply(self, vector: Sequence[Polynomial]) -> List[Polynomial]:
        """Matrix times column vector."""
        zero = Polynomial.zero(self.p)
        out = [zero] * self.rows
        for i, row in self._data.items():
            acc = zero
            for j, a in row.items():
                if vector[j]:
                    acc = acc + a * vector[j]
            out[i] = acc
        return out

    def determinant(self) -> Polynomial:
        """Cofactor expansion; meant for the small matrices of sanity checks."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return _det(self.to_rows(), self.p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self.p == other.p and self._data == other._data

    __hash__ = None

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(v) for v in row) for row in self.to_rows())
        return f"PolyMatrix({self.rows}x{self.cols}, p={self.p}, [{body}])"


def _as_poly(e: Entry, p: int) -> Polynomial:
    if isinstance(e, Polynomial):
        return e
    return Polynomial((int(e),), p)


def _det(rows: List[List[Polynomial]], p: int) -> Polynomial:
    n = len(rows)
    if n == 0:
        return Polynomial.one(p)
    if n == 1:
        return rows[0][0]
    total = Polynomial.zero(p)
    for j, a in enumerate(rows[0]):
        if not a:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = a * _det(minor, p)
        total = total + term if j % 2 == 0 else total - term
    return total


@dataclass(frozen=True)
class SmithForm:
    """U·A·V = D with U, V unimodular; the inverses come along for free."""
    U: PolyMatrix
    D: PolyMatrix
    V: PolyMatrix
    U_inv: PolyMatrix
    V_inv: PolyMatrix
    rank: int

    @property
    def invariant_factors(self) -> Tuple[Polynomial, ...]:
        return tuple(self.D[k, k] for k in range(self.rank))

    def holds_for(self, A: PolyMatrix) -> bool:
        """Check U·A·V = D and that the stored inverses are inverses."""
        return (self.U @ A @ self.V == self.D
                and (self.U @ self.U_inv).is_identity()
                and (self.V @ self.V_inv).is_identity())


class _SmithReducer:
    """Dense scratch state for snf(); every operation keeps U·A·V = M."""

    def __init__(self, A: PolyMatrix):
        p = A.p
        self.p = p
        self.m, self.n = A.rows, A.cols
        self.M = A.to_rows()
        self.U = PolyMatrix.identity(self.m, p).to_rows()
        self.Uinv = PolyMatrix.identity(self.m, p).to_rows()
        self.V = PolyMatrix.identity(self.n, p).to_rows()
        self.Vinv = PolyMatrix.identity(self.n, p).to_rows()

    def swap_rows(self, a: int, b: int):
        if a == b:
            return
        for X in (self.M, self.U):
            X[a], X[b] = X[b], X[a]
        for r in self.Uinv:
            r[a], r[b] = r[b], r[a]

    def swap_cols(self, a: int, b: int):
        if a == b:
            return
        for X in (self.M, self.V):
            for r in X:
                r[a], r[b] = r[b], r[a]
        self.Vinv[a], self.Vinv[b] = self.Vinv[b], self.Vinv[a]

    def row_sub(self, i: int, t: int, q: Polynomial):
        """R_i -= q·R_t."""
        for X in (self.M, self.U):
            X[i] = [a - q * b if b else a for a, b in zip(X[i], X[t])]
        for r in self.Uinv:
            if r[i]:
                r[t] = r[t] + q * r[i]

    def row_add(self, t: int, i: int):
        """R_t += R_i."""
        for X in (self.M, self.U):
            X[t] = [a + b for a, b in zip(X[t], X[i])]
        for r in self.Uinv:
            if r[t]:
                r[i] = r[i] - r[t]

    def col_sub(self, j: int, t: int, q: Polynomial):
        """C_j -= q·C_t."""
        for X in (self.M, self.V):
            for r in X:
                if r[t]:
                    r[j] = r[j] - q * r[t]
        self.Vinv[t] = [a + q * b if b else a for a, b in zip(self.Vinv[t], self.Vinv[j])]

    def scale_row(self, t: int, c: FieldElement):
        for X in (self.M, self.U):
            X[t] = [a * c.value for a in X[t]]
        inv = c.inverse().value
        for r in self.Uinv:
            r[t] = r[t] * inv

    def pivot(self, t: int) -> Optional[Tuple[int, int]]:
        best = None
        for i in range(t, self.m):
            for j in range(t, self.n):
                e = self.M[i][j]
                if e and (best is None or e.degree < best[0]):
                    best = (e.degree, i, j)
        return None if best is None else (best[1], best[2])

    def clear(self, t: int) -> bool:
        """Eliminate row t and column t against the pivot; False if a remainder survived."""
        piv = self.M[t][t]
        for i in range(t + 1, self.m):
            if self.M[i][t]:
                q, r = divmod(self.M[i][t], piv)
                self.row_sub(i, t, q)
                if r:
                    return False
        for j in range(t + 1, self.n):
            if self.M[t][j]:
                q, r = divmod(self.M[t][j], piv)
                self.col_sub(j, t, q)
                if r:
                    return False
        return True

    def non_divisible_row(self, t: int) -> Optional[int]:
        piv = self.M[t][t]
        for i in range(t + 1, self.m):
            for j in range(t + 1, self.n):
                if self.M[i][j] and not piv.divides(self.M[i][j]):
                    return i
        return None

    def run(self) -> int:
        t = 0
        while t < min(self.m, self.n):
            found = self.pivot(t)
            if found is None:
                break
            i, j = found
            self.swap_rows(t, i)
            self.swap_cols(t, j)
            if not self.clear(t):
                continue
            bad = self.non_divisible_row(t)
            if bad is not None:
                self.row_add(t, bad)
                continue
            lc = self.M[t][t].leading_coefficient
            if lc.value != 1:
                self.scale_row(t, lc.inverse())
            t += 1
        return t


def snf(A: PolyMatrix) -> SmithForm:
    """Smith normal form over F_p[x].

    Pivots are the entries of least degree (first in row-major order among
    ties) and diagonal entries are made monic, so D is reproducible.

    Returns:
        SmithForm with U·A·V = D, d_1 | d_2 | ... and the inverses of U, V.
    """
    red = _SmithReducer(A)
    rank = red.run()
    p = A.p
    logger.debug("snf %dx%d: rank %d", A.rows, A.cols, rank)

    def pack(rows, r, c):
        return PolyMatrix(r, c, p, {i: dict(enumerate(row)) for i, row in enumerate(rows)})

    D = PolyMatrix(A.rows, A.cols, p, {k: {k: red.M[k][k]} for k in range(rank)})
    return SmithForm(
        U=pack(red.U, A.rows, A.rows),
        D=D,
        V=pack(red.V, A.cols, A.cols),
        U_inv=pack(red.Uinv, A.rows, A.rows),
        V_inv=pack(red.Vinv, A.cols, A.cols),
        rank=rank,
    )


@dataclass(frozen=True)
class Summand:
    """One cyclic summand: F[x] when order is 0, F[x]/(x^order) otherwise."""
    order: int
    grade: Optional[Grade] = None

    @property
    def is_free(self) -> bool:
        return self.order == 0


@dataclass(frozen=True)
class ModuleDecomposition:
    summands: Tuple[Summand, ...] = ()

    @property
    def free_rank(self) -> int:
        return sum(1 for s in self.summands if s.is_free)

    @property
    def torsion_exponents(self) -> Tuple[int, ...]:
        return tuple(sorted(s.order for s in self.summands if not s.is_free))

    @property
    def torsion_order(self) -> int:
        return max(self.torsion_exponents, default=0)

    def __add__(self, other: "ModuleDecomposition") -> "ModuleDecomposition":
        return ModuleDecomposition(self.summands + other.summands)

    def by_grade(self) -> Dict[Optional[Grade], "ModuleDecomposition"]:
        out: Dict[Optional[Grade], List[Summand]] = {}
        for s in self.summands:
            out.setdefault(s.grade, []).append(s)
        return {g: ModuleDecomposition(tuple(v)) for g, v in out.items()}

    def times_x_power(self, k: int) -> "ModuleDecomposition":
        """Decomposition of the submodule x^k·M."""
        kept = []
        for s in self.summands:
            if s.is_free or s.order > k:
                grade = None if s.grade is None else (s.grade[0], s.grade[1] - 2 * k)
                kept.append(Summand(0 if s.is_free else s.order - k, grade))
        return ModuleDecomposition(tuple(kept))

    def signature(self) -> Tuple:
        """Grade-aware comparison key that ignores summand order."""
        return tuple(sorted((s.order, s.grade or (0, 0)) for s in self.summands))


def module_decompose(presentation: PolyMatrix,
                     generator_grades: Optional[Sequence[Grade]] = None) -> ModuleDecomposition:
    """Decompose the cokernel F[x]^cols / rowspace(presentation).

    Rows are relations, columns are generators. Unit invariant factors are
    dropped; a torsion factor that is not a power of x raises
    NonMonomialTorsion. With generator grades the new generators (rows of
    V^-1) are graded too, x lowering j by 2.
    """
    if generator_grades is not None and len(generator_grades) != presentation.cols:
        raise ValueError(f"{len(generator_grades)} grades for {presentation.cols} generators")
    sf = snf(presentation)
    summands = []
    for k in range(presentation.cols):
        if k < sf.rank:
            d = sf.D[k, k]
            if d.is_unit:
                continue
            if not d.is_monomial:
                raise NonMonomialTorsion(f"invariant factor {d} is not a power of x")
            order = d.degree
        else:
            order = 0
        grade = None
        if generator_grades is not None:
            grade = _row_grade(sf.V_inv.row(k), generator_grades)
        summands.append(Summand(order, grade))
    return ModuleDecomposition(tuple(summands))


def _row_grade(row: Mapping[int, Polynomial], grades: Sequence[Grade]) -> Grade:
    found = None
    for m, e in row.items():
        if not e.is_monomial:
            raise NotHomogeneous(f"generator coefficient {e} is not a monomial")
        i, j = grades[m]
        g = (i, j - 2 * e.degree)
        if found is not None and g != found:
            raise NotHomogeneous(f"generator mixes grades {found} and {g}")
        found = g
    return found


def field_matrix(entries: Mapping[Tuple[int, int], int], shape: Tuple[int, int], p: int) -> DomainMatrix:
    """Sparse DomainMatrix over GF(p) from {(i, j): value}."""
    K = prime_field(p)
    rep: Dict[int, Dict[int, object]] = {}
    for (i, j), v in entries.items():
        v = int(v) % p
        if v:
            rep.setdefault(i, {})[j] = K(v)
    return DomainMatrix(rep, shape, K)


def field_rank(M: DomainMatrix) -> int:
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return 0
    return M.rank()


def field_nullspace(M: DomainMatrix, p: int) -> List[List[int]]:
    """Basis of {v : M v = 0} as integer vectors."""
    rows, cols = M.shape
    if cols == 0:
        return []
    if rows == 0 or M.is_zero_matrix:
        return [[1 if k == j else 0 for k in range(cols)] for j in range(cols)]
    basis = M.nullspace().to_list()
    return [[int(v) % p for v in vec] for vec in basis]


def field_homology_dimension(dA: DomainMatrix, dB: DomainMatrix) -> int:
    """dim ker(dB) - dim im(dA) for F-linear maps U -dA-> V -dB-> W.

    Raises:
        ComposeNotZero: if dB·dA is not the zero map.
    """
    middle = dA.shape[0]
    if dB.shape[1] != middle:
        raise ValueError(f"incompatible shapes {dA.shape} and {dB.shape}")
    if middle and dA.shape[1] and dB.shape[0]:
        if not dB.matmul(dA).is_zero_matrix:
            raise ComposeNotZero("dB·dA is not zero")
    return middle - field_rank(dB) - field_rank(dA)
