"""Exact integer linear algebra and finitely generated abelian groups.

Everything in this module is over Z with arbitrary-precision Python ints:
Smith normal form with tracked unimodular transforms, cokernels and kernels
of integer matrices, finitely generated abelian groups in invariant-factor
form, homomorphisms given by integer matrices on generators, and presented
subquotients of Z^n with explicit generator lifts (the workhorse for
computing induced maps on quotients and kernels).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional


class DimensionError(ValueError):
    """Shapes of the inputs do not line up."""


class PreconditionError(ValueError):
    """A stated precondition fails (non-commuting maps, ill-defined hom, ...)."""


# ---------------------------------------------------------------------------
# integer matrices


class IntMatrix:
    """Immutable dense matrix of Python ints.

    Entries are arbitrary-precision, so no operation can overflow.

    >>> a = IntMatrix([[1, 2], [3, 4]])
    >>> a @ IntMatrix.identity(2) == a
    True
    >>> a.transpose()[0, 1]
    3
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable[int]], cols: Optional[int] = None):
        rows = tuple(tuple(int(x) for x in row) for row in data)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise DimensionError("ragged rows")
            if cols is not None and cols != width:
                raise DimensionError("cols does not match row width")
            cols = width
        else:
            cols = 0 if cols is None else cols
        self.rows = len(rows)
        self.cols = cols
        self._data = rows

    # -- construction helpers

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix([[0] * cols for _ in range(rows)], cols=cols)

    @staticmethod
    def from_columns(columns: Iterable[Iterable[int]], rows: Optional[int] = None) -> "IntMatrix":
        cols = [tuple(int(x) for x in c) for c in columns]
        if cols:
            rows = len(cols[0])
        elif rows is None:
            rows = 0
        return IntMatrix([[c[i] for c in cols] for i in range(rows)], cols=len(cols))

    @staticmethod
    def column_vector(entries: Iterable[int]) -> "IntMatrix":
        return IntMatrix([[int(x)] for x in entries], cols=1)

    @staticmethod
    def hstack(*mats: "IntMatrix") -> "IntMatrix":
        if not mats:
            raise DimensionError("hstack of nothing")
        rows = mats[0].rows
        if any(m.rows != rows for m in mats):
            raise DimensionError("hstack: row counts differ")
        return IntMatrix(
            [sum((list(m._data[i]) for m in mats), []) for i in range(rows)],
            cols=sum(m.cols for m in mats),
        )

    @staticmethod
    def vstack(*mats: "IntMatrix") -> "IntMatrix":
        if not mats:
            raise DimensionError("vstack of nothing")
        cols = mats[0].cols
        if any(m.cols != cols for m in mats):
            raise DimensionError("vstack: column counts differ")
        data = []
        for m in mats:
            data.extend(list(r) for r in m._data)
        return IntMatrix(data, cols=cols)

    @staticmethod
    def block_diag(*mats: "IntMatrix") -> "IntMatrix":
        rows = sum(m.rows for m in mats)
        cols = sum(m.cols for m in mats)
        out = [[0] * cols for _ in range(rows)]
        r0 = c0 = 0
        for m in mats:
            for i in range(m.rows):
                for j in range(m.cols):
                    out[r0 + i][c0 + j] = m._data[i][j]
            r0 += m.rows
            c0 += m.cols
        return IntMatrix(out, cols=cols)

    # -- access

    def __getitem__(self, key) -> int:
        i, j = key
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def column(self, j: int) -> tuple:
        return tuple(self._data[i][j] for i in range(self.rows))

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def submatrix(self, row_indices, col_indices) -> "IntMatrix":
        rows = list(row_indices)
        cols = list(col_indices)
        return IntMatrix([[self._data[i][j] for j in cols] for i in rows], cols=len(cols))

    def to_lists(self) -> list:
        return [list(r) for r in self._data]

    def __iter__(self):
        return iter(self._data)

    # -- arithmetic

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"matmul: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ot = [other.column(j) for j in range(other.cols)]
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in ot] for row in self._data],
            cols=other.cols,
        )

    def apply(self, vector) -> tuple:
        """Matrix times a plain vector (sequence of ints)."""
        vec = tuple(int(x) for x in vector)
        if len(vec) != self.cols:
            raise DimensionError("apply: bad vector length")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self._data)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._data, other._data)],
            cols=self.cols,
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self._data, other._data)],
            cols=self.cols,
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-x for x in r] for r in self._data], cols=self.cols)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * x for x in r] for r in self._data], cols=self.cols)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            [[self._data[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    # -- comparison

    def _same_shape(self, other: "IntMatrix") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionError(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.cols == other.cols
            and self._data == other._data
        )

    def __hash__(self):
        return hash((self.cols, self._data))

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self._data]!r}, cols={self.cols})"


def _det(m: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if m.rows != m.cols:
        raise DimensionError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return 1
    a = m.to_lists()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfResult:
    """U @ M @ V == S with U, V unimodular and S in Smith normal form."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> tuple:
        n = min(self.S.rows, self.S.cols)
        return tuple(self.S[i, i] for i in range(n))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(m: IntMatrix) -> SnfResult:
    """Compute U, S, V with U @ m @ V = S diagonal, d1 | d2 | ... >= 0.

    Pivoting always promotes a nonzero entry of minimal absolute value, which
    keeps intermediate entries small in practice. Postconditions (the
    factorization identity, the divisibility chain, unimodularity of the
    transforms) are asserted on every call.

    >>> smith_normal_form(IntMatrix([[2, 4], [6, 8]])).diagonal
    (2, 4)
    """
    r, c = m.rows, m.cols
    a = m.to_lists()
    u = IntMatrix.identity(r).to_lists()
    v = IntMatrix.identity(c).to_lists()

    def add_row(i, j, q):  # row_i += q * row_j
        a[i] = [x + q * y for x, y in zip(a[i], a[j])]
        u[i] = [x + q * y for x, y in zip(u[i], u[j])]

    def add_col(j, k, q):  # col_j += q * col_k
        for row in a:
            row[j] += q * row[k]
        for row in v:
            row[j] += q * row[k]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(r, c):
        best = None
        pi = pj = -1
        for i in range(t, r):
            for j in range(t, c):
                x = a[i][j]
                if x != 0 and (best is None or abs(x) < best):
                    best = abs(x)
                    pi, pj = i, j
        if best is None:
            break
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            if a[t][t] < 0:
                negate_row(t)
            restart = False
            for i in range(t + 1, r):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    if q:
                        add_row(i, t, -q)
                    if a[i][t] != 0:
                        swap_rows(t, i)  # strictly smaller pivot
                        restart = True
                        break
            if restart:
                continue
            for j in range(t + 1, c):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    if q:
                        add_col(j, t, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        restart = True
                        break
            if restart:
                continue
            # pivot is alone in its row and column; force divisibility
            d = a[t][t]
            bad = -1
            for i in range(t + 1, r):
                if any(x % d != 0 for x in a[i][t + 1 :]):
                    bad = i
                    break
            if bad >= 0:
                add_row(t, bad, 1)
                continue
            break
        t += 1

    result = SnfResult(
        IntMatrix(u, cols=r), IntMatrix(a, cols=c), IntMatrix(v, cols=c)
    )
    assert result.U @ m @ result.V == result.S, "SNF factorization identity failed"
    diag = result.diagonal
    for i in range(len(diag) - 1):
        if diag[i + 1] != 0:
            assert diag[i] != 0 and diag[i + 1] % diag[i] == 0, "divisibility chain broken"
        assert diag[i] >= 0
    assert abs(_det(result.U)) == 1, "U not unimodular"
    assert abs(_det(result.V)) == 1, "V not unimodular"
    return result


def unimodular_inverse(w: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular integer matrix."""
    res = smith_normal_form(w)
    if res.diagonal != tuple([1] * w.rows) or w.rows != w.cols:
        raise PreconditionError("matrix is not unimodular")
    inv = res.V @ res.U
    assert inv @ w == IntMatrix.identity(w.rows)
    return inv


# ---------------------------------------------------------------------------
# lattices (subgroups of Z^n given by generating columns)


def solve_columns(a: IntMatrix, b: IntMatrix) -> Optional[IntMatrix]:
    """Solve a @ X = b over the integers; None when no solution exists."""
    if a.rows != b.rows:
        raise DimensionError("solve: row counts differ")
    res = smith_normal_form(a)
    rank = res.rank
    diag = res.diagonal
    w = res.U @ b
    cols = []
    for j in range(b.cols):
        z = [0] * a.cols
        ok = True
        for i in range(a.rows):
            wi = w[i, j]
            if i < rank:
                if wi % diag[i] != 0:
                    ok = False
                    break
                z[i] = wi // diag[i]
            elif wi != 0:
                ok = False
                break
        if not ok:
            return None
        cols.append(z)
    x = res.V @ IntMatrix.from_columns(cols, rows=a.cols)
    assert a @ x == b
    return x


def lattice_contains(gens: IntMatrix, vector) -> bool:
    """Is the vector in the subgroup of Z^rows generated by the columns?"""
    return solve_columns(gens, IntMatrix.column_vector(vector)) is not None


def lattice_basis(gens: IntMatrix) -> IntMatrix:
    """A basis (independent columns) of the lattice spanned by the columns."""
    res = smith_normal_form(gens)
    rank = res.rank
    uinv = unimodular_inverse(res.U)
    cols = [
        [uinv[i, j] * res.diagonal[j] for i in range(gens.rows)] for j in range(rank)
    ]
    return IntMatrix.from_columns(cols, rows=gens.rows)


def lattices_equal(a: IntMatrix, b: IntMatrix):
    """Mutual containment of two column-generated lattices.

    Returns (equal, witness) where witness is a generator of one lattice that
    is missing from the other (None when equal).
    """
    for j in range(b.cols):
        if not lattice_contains(a, b.column(j)):
            return False, tuple(b.column(j))
    for j in range(a.cols):
        if not lattice_contains(b, a.column(j)):
            return False, tuple(a.column(j))
    return True, None


def cokernel(m: IntMatrix) -> "FgAbGroup":
    """Z^rows modulo the column span of m, in invariant-factor form.

    >>> cokernel(IntMatrix([[1, -1], [-1, 1]]))
    FgAbGroup(free_rank=1, torsion=())
    """
    res = smith_normal_form(m)
    torsion = tuple(d for d in res.diagonal if d > 1)
    return FgAbGroup(m.rows - res.rank, torsion)


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a basis of {x in Z^cols : m @ x = 0} (a saturated lattice)."""
    res = smith_normal_form(m)
    rank = res.rank
    cols = [res.V.column(j) for j in range(rank, m.cols)]
    out = IntMatrix.from_columns(cols, rows=m.cols)
    assert (m @ out).is_zero()
    return out


# ---------------------------------------------------------------------------
# finitely generated abelian groups


def _factorint(n: int) -> dict:
    """Prime factorization by trial division (desk-scale inputs)."""
    out: dict = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def invariant_factors(divisors) -> tuple:
    """Normalize arbitrary cyclic orders to the invariant-factor chain.

    >>> invariant_factors([2, 3])
    (6,)
    >>> invariant_factors([4, 2, 2])
    (2, 2, 4)
    >>> invariant_factors([1, 1])
    ()
    """
    primes: dict = {}
    for d in divisors:
        d = int(d)
        if d < 1:
            raise ValueError("cyclic orders must be positive")
        for p, e in _factorint(d).items():
            primes.setdefault(p, []).append(e)
    k = max((len(v) for v in primes.values()), default=0)
    factors = []
    for slot in range(k):  # slot 0 collects the largest exponents
        f = 1
        for p, exps in primes.items():
            exps = sorted(exps, reverse=True)
            if slot < len(exps):
                f *= p ** exps[slot]
        factors.append(f)
    return tuple(sorted(f for f in factors if f > 1))


@dataclass(frozen=True)
class FgAbGroup:
    """A finitely generated abelian group Z^free_rank + sum Z/d_i.

    torsion is the invariant-factor chain d1 | d2 | ..., every d_i >= 2.
    Generator order everywhere in this package: free generators first, then
    torsion generators in increasing invariant-factor order.

    >>> FgAbGroup.from_divisors(1, [2, 3])
    FgAbGroup(free_rank=1, torsion=(6,))
    >>> str(FgAbGroup(2, (2, 4)))
    'Z^2 + Z/2 + Z/4'
    """

    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        for i, d in enumerate(self.torsion):
            if d < 2:
                raise ValueError("invariant factors must be >= 2")
            if i and d % self.torsion[i - 1] != 0:
                raise ValueError("torsion list is not a divisibility chain")

    @staticmethod
    def from_divisors(free_rank: int, divisors) -> "FgAbGroup":
        return FgAbGroup(free_rank, invariant_factors(divisors))

    @staticmethod
    def trivial() -> "FgAbGroup":
        return FgAbGroup(0, ())

    @staticmethod
    def free(rank: int) -> "FgAbGroup":
        return FgAbGroup(rank, ())

    @property
    def n_generators(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.torsion:
            out *= d
        return out

    @property
    def is_trivial(self) -> bool:
        return self.n_generators == 0

    def direct_sum(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup.from_divisors(
            self.free_rank + other.free_rank, self.torsion + other.torsion
        )

    def relations(self) -> IntMatrix:
        """Columns generate the relation lattice in generator coordinates."""
        n = self.n_generators
        cols = []
        for i, d in enumerate(self.torsion):
            col = [0] * n
            col[self.free_rank + i] = d
            cols.append(col)
        return IntMatrix.from_columns(cols, rows=n)

    def generator_orders(self) -> tuple:
        return tuple([0] * self.free_rank) + self.torsion

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class GroupHom:
    """A homomorphism given by an integer matrix on generator tuples.

    Column j is the image of the j-th domain generator written in codomain
    generator coordinates. The matrix is only meaningful when the map is
    well defined on torsion; see hom_well_defined.
    """

    dom: FgAbGroup
    cod: FgAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.rows != self.cod.n_generators or self.matrix.cols != self.dom.n_generators:
            raise DimensionError(
                f"hom matrix is {self.matrix.rows}x{self.matrix.cols}, expected "
                f"{self.cod.n_generators}x{self.dom.n_generators}"
            )

    @staticmethod
    def identity(group: FgAbGroup) -> "GroupHom":
        return GroupHom(group, group, IntMatrix.identity(group.n_generators))

    @staticmethod
    def zero(dom: FgAbGroup, cod: FgAbGroup) -> "GroupHom":
        return GroupHom(dom, cod, IntMatrix.zeros(cod.n_generators, dom.n_generators))

    def compose(self, first: "GroupHom") -> "GroupHom":
        """self o first (apply first, then self)."""
        if first.cod != self.dom:
            raise DimensionError("compose: middle groups differ")
        return GroupHom(first.dom, self.cod, self.matrix @ first.matrix)


def hom_well_defined(f: GroupHom) -> bool:
    """Does the generator matrix define a map on the quotient groups?

    For each torsion generator g of the domain with invariant factor d, the
    vector d * f(g) must lie in the codomain relation lattice (an SNF
    membership test, uniform with the exactness machinery).
    """
    rel = f.cod.relations()
    orders = f.dom.generator_orders()
    for j, d in enumerate(orders):
        if d == 0:
            continue
        vec = [d * f.matrix[i, j] for i in range(f.matrix.rows)]
        if any(vec):
            if rel.cols == 0 or not lattice_contains(rel, vec):
                return False
    return True


def hom_equal(f: GroupHom, g: GroupHom) -> bool:
    """Equality as maps (entries may differ by codomain relations)."""
    if f.dom != g.dom or f.cod != g.cod:
        return False
    rel = f.cod.relations()
    diff = f.matrix - g.matrix
    for j in range(diff.cols):
        col = diff.column(j)
        if any(col):
            if rel.cols == 0 or not lattice_contains(rel, col):
                return False
    return True


# ---------------------------------------------------------------------------
# presented subquotients with generator tracking


class Presentation:
    """A subquotient N/D of Z^ambient with explicit generator lifts.

    N is the column span of ``basis`` (independent columns), D the span of
    ``basis @ rels``. The canonical isomorphism class is ``group``; for each
    canonical generator, ``gen_lift`` returns a representative in Z^ambient
    and ``reduce`` writes any element of N in canonical generator
    coordinates. This is what makes induced maps on stage-one K-groups
    computable instead of merely knowing their isomorphism class.
    """

    __slots__ = ("ambient", "basis", "rels", "group", "_u", "_uinv", "_orders", "_kept")

    def __init__(self, ambient: int, basis: IntMatrix, rels: IntMatrix):
        if basis.rows != ambient or rels.rows != basis.cols:
            raise DimensionError("presentation shapes do not line up")
        self.ambient = ambient
        self.basis = basis
        self.rels = rels
        res = smith_normal_form(rels)
        s = basis.cols
        diag = list(res.diagonal) + [0] * (s - min(rels.rows, rels.cols))

        def order(i):
            return diag[i] if i < len(diag) else 0

        free = [i for i in range(s) if order(i) == 0]
        tors = [i for i in range(s) if order(i) >= 2]
        self._kept = free + tors
        self._orders = tuple([0] * len(free)) + tuple(order(i) for i in tors)
        self.group = FgAbGroup(len(free), tuple(order(i) for i in tors))
        self._u = res.U
        self._uinv = unimodular_inverse(res.U)

    # -- constructors

    @staticmethod
    def free(n: int) -> "Presentation":
        return Presentation(n, IntMatrix.identity(n), IntMatrix.zeros(n, 0))

    @staticmethod
    def cokernel_of(m: IntMatrix) -> "Presentation":
        return Presentation(m.rows, IntMatrix.identity(m.rows), m)

    @staticmethod
    def kernel_of(m: IntMatrix) -> "Presentation":
        basis = kernel_basis(m)
        return Presentation(m.cols, basis, IntMatrix.zeros(basis.cols, 0))

    @staticmethod
    def subquotient(numerator: IntMatrix, denominator: IntMatrix) -> "Presentation":
        """numerator, denominator: generating columns, denominator inside."""
        basis = lattice_basis(numerator)
        rels = solve_columns(basis, denominator)
        if rels is None:
            raise PreconditionError("denominator is not inside the numerator lattice")
        return Presentation(numerator.rows, basis, rels)

    @staticmethod
    def of_group(group: FgAbGroup) -> "Presentation":
        n = group.n_generators
        return Presentation(n, IntMatrix.identity(n), group.relations())

    @staticmethod
    def direct_sum(a: "Presentation", b: "Presentation") -> "Presentation":
        return Presentation(
            a.ambient + b.ambient,
            IntMatrix.block_diag(a.basis, b.basis),
            IntMatrix.block_diag(a.rels, b.rels),
        )

    # -- generator bookkeeping

    def gen_lift(self, j: int) -> tuple:
        """Ambient representative of the j-th canonical generator."""
        col = self._uinv.column(self._kept[j])
        return self.basis.apply(col)

    def gen_lift_matrix(self) -> IntMatrix:
        return IntMatrix.from_columns(
            [self.gen_lift(j) for j in range(self.group.n_generators)], rows=self.ambient
        )

    def reduce(self, vector) -> tuple:
        """Canonical generator coordinates of the class of an ambient vector."""
        x = solve_columns(self.basis, IntMatrix.column_vector(vector))
        if x is None:
            raise PreconditionError("vector is not in the numerator lattice")
        y = self._u.apply(x.column(0))
        out = []
        for j, i in enumerate(self._kept):
            d = self._orders[j]
            out.append(y[i] % d if d else y[i])
        return tuple(out)

    def class_is_zero(self, vector) -> bool:
        return not any(self.reduce(vector))

    def hom_to(self, target: "Presentation", ambient_matrix: IntMatrix) -> GroupHom:
        """The induced map on subquotients of an ambient integer matrix.

        Raises PreconditionError when the matrix does not map numerator into
        numerator or denominator into denominator.
        """
        if ambient_matrix.rows != target.ambient or ambient_matrix.cols != self.ambient:
            raise DimensionError("ambient matrix has the wrong shape")
        den = self.basis @ self.rels
        for j in range(den.cols):
            image = ambient_matrix.apply(den.column(j))
            if not target.class_is_zero(image):
                raise PreconditionError(
                    "matrix does not descend: denominator generator "
                    f"{tuple(den.column(j))} maps to a nonzero class"
                )
        cols = [
            target.reduce(ambient_matrix.apply(self.gen_lift(j)))
            for j in range(self.group.n_generators)
        ]
        hom = GroupHom(
            self.group,
            target.group,
            IntMatrix.from_columns(cols, rows=target.group.n_generators),
        )
        assert hom_well_defined(hom)
        return hom


# ---------------------------------------------------------------------------
# induced maps on cokernels and kernels


def _require_commuting(b: IntMatrix, m: IntMatrix) -> None:
    if b.rows != b.cols or m.rows != m.cols or b.rows != m.rows:
        raise DimensionError("induced maps need square matrices of equal size")
    left = b @ m
    right = m @ b
    if left != right:
        for i in range(left.rows):
            for j in range(left.cols):
                if left[i, j] != right[i, j]:
                    raise PreconditionError(
                        f"matrices do not commute: (B@M)[{i},{j}] = {left[i, j]} "
                        f"but (M@B)[{i},{j}] = {right[i, j]}"
                    )


def induced_on_cokernel(b: IntMatrix, m: IntMatrix) -> GroupHom:
    """The endomorphism of Z^n/im(m) induced by b (requires b @ m = m @ b).

    >>> f = induced_on_cokernel(IntMatrix([[3]]), IntMatrix([[-2]]))
    >>> (str(f.dom), f.matrix[0, 0])
    ('Z/2', 1)
    """
    _require_commuting(b, m)
    pres = Presentation.cokernel_of(m)
    return pres.hom_to(pres, b)


def induced_on_kernel(b: IntMatrix, m: IntMatrix) -> GroupHom:
    """The endomorphism of ker(m) (a free group) induced by b."""
    _require_commuting(b, m)
    pres = Presentation.kernel_of(m)
    return pres.hom_to(pres, b)


# ---------------------------------------------------------------------------
# image / kernel / cokernel of homs between presented groups


def hom_image_lattice(f: GroupHom) -> IntMatrix:
    """Generators (columns) of the preimage in Z^{cod gens} of im(f)."""
    return IntMatrix.hstack(f.matrix, f.cod.relations())


def hom_kernel_lattice(f: GroupHom) -> IntMatrix:
    """Generators of the preimage in Z^{dom gens} of ker(f)."""
    stacked = IntMatrix.hstack(f.matrix, f.cod.relations())
    full = kernel_basis(stacked)
    n = f.dom.n_generators
    cols = [full.column(j)[:n] for j in range(full.cols)]
    cols.extend(f.dom.relations().columns())
    return IntMatrix.from_columns(cols, rows=n)


def hom_cokernel_presentation(f: GroupHom) -> Presentation:
    """cod(f) / im(f) as a presented subquotient of Z^{cod gens}."""
    return Presentation.cokernel_of(hom_image_lattice(f))


def hom_kernel_presentation(f: GroupHom) -> Presentation:
    """ker(f) as a presented subquotient of Z^{dom gens}."""
    if not hom_well_defined(f):
        raise PreconditionError("kernel of an ill-defined hom")
    return Presentation.subquotient(hom_kernel_lattice(f), f.dom.relations())


def hom_cokernel(f: GroupHom) -> FgAbGroup:
    return hom_cokernel_presentation(f).group


def hom_kernel(f: GroupHom) -> FgAbGroup:
    return hom_kernel_presentation(f).group
