"""Exact linear algebra over Z and Z[T^{+-1}].

Everything downstream (cube complexes, chain maps, spectral pages,
S-complexes) reduces to a handful of primitives implemented here:

* ``IntMatrix`` -- sparse integer matrices with arbitrary-precision entries;
* ``smith_normal_form`` -- SNF with unimodular transforms, minimal-pivot
  selection to limit coefficient growth;
* ``homology_at`` / ``subquotient_group`` -- finitely generated abelian
  groups presented as ``AbelianGroup`` values, with coordinate systems for
  mapping elements of quotients around;
* ``solve_linear`` -- integer linear systems, certified through SNF;
* ``LaurentPoly`` -- the coefficient ring Z[T^{+-1}] used by the
  equivariant complexes.

All values are immutable by convention: no public method mutates its
receiver, so everything here is safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional


class CompositionNotZero(Exception):
    """d_out . d_in != 0 where a chain-complex pair was expected."""


class DenominatorNotContained(Exception):
    """Denominator generators fall outside the numerator span."""


class DimensionMismatch(Exception):
    """Operands have incompatible shapes."""


# ---------------------------------------------------------------------------
# integer matrices


class IntMatrix:
    """A rows x cols integer matrix, stored sparsely as {(i, j): entry}.

    Entries are plain Python ints, so no overflow is possible.  Zero
    entries are never stored.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[dict] = None):
        if rows < 0 or cols < 0:
            raise DimensionMismatch("negative matrix dimension")
        self.rows = rows
        self.cols = cols
        ent = {}
        if entries:
            for (i, j), v in entries.items():
                if v:
                    if not (0 <= i < rows and 0 <= j < cols):
                        raise DimensionMismatch(f"entry ({i},{j}) out of bounds")
                    ent[(i, j)] = v
        self.entries = ent

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if rows else 0
        ent = {}
        for i, r in enumerate(rows):
            if len(r) != m:
                raise DimensionMismatch("ragged rows")
            for j, v in enumerate(r):
                if v:
                    ent[(i, j)] = v
        return cls(n, m, ent)

    @classmethod
    def column(cls, vec: Iterable[int]) -> "IntMatrix":
        vec = list(vec)
        return cls(len(vec), 1, {(i, 0): v for i, v in enumerate(vec) if v})

    # -- basic access ---------------------------------------------------

    def __getitem__(self, ij) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise DimensionMismatch(f"index ({i},{j}) out of bounds")
        return self.entries.get((i, j), 0)

    def to_rows(self) -> list:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def column_vector(self, j: int) -> dict:
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(sorted(self.entries.items()))))

    def __repr__(self) -> str:
        if self.rows * self.cols <= 64:
            return f"IntMatrix({self.to_rows()!r})"
        return f"IntMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix addition shape mismatch")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            w = ent.get(k, 0) + v
            if w:
                ent[k] = w
            else:
                ent.pop(k, None)
        return IntMatrix(self.rows, self.cols, ent)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, {k: -v for k, v in self.entries.items()})

    def scale(self, c: int) -> "IntMatrix":
        if c == 0:
            return IntMatrix(self.rows, self.cols)
        return IntMatrix(self.rows, self.cols, {k: c * v for k, v in self.entries.items()})

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        # column-major view of other for sparse accumulation
        by_col: dict = {}
        for (k, j), v in other.entries.items():
            by_col.setdefault(k, []).append((j, v))
        ent: dict = {}
        for (i, k), u in self.entries.items():
            for j, v in by_col.get(k, ()):
                key = (i, j)
                w = ent.get(key, 0) + u * v
                if w:
                    ent[key] = w
                else:
                    del ent[key]
        return IntMatrix(self.rows, other.cols, ent)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise DimensionMismatch("hstack row mismatch")
        ent = dict(self.entries)
        for (i, j), v in other.entries.items():
            ent[(i, j + self.cols)] = v
        return IntMatrix(self.rows, self.cols + other.cols, ent)

    def submatrix(self, row_idx: list, col_idx: list) -> "IntMatrix":
        rmap = {r: i for i, r in enumerate(row_idx)}
        cmap = {c: j for j, c in enumerate(col_idx)}
        ent = {}
        for (i, j), v in self.entries.items():
            if i in rmap and j in cmap:
                ent[(rmap[i], cmap[j])] = v
        return IntMatrix(len(row_idx), len(col_idx), ent)

    def apply(self, vec: dict) -> dict:
        """Apply to a sparse column vector {index: coeff}."""
        out: dict = {}
        by_col: dict = {}
        for (i, j), v in self.entries.items():
            by_col.setdefault(j, []).append((i, v))
        for j, c in vec.items():
            for i, v in by_col.get(j, ()):
                w = out.get(i, 0) + v * c
                if w:
                    out[i] = w
                else:
                    del out[i]
        return out


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(m: IntMatrix, with_inverses: bool = False):
    """Return (S, U, V) with S = U*M*V, U and V unimodular, S diagonal
    with nonnegative diagonal entries d_1 | d_2 | ... ; with
    ``with_inverses`` the result extends to (S, U, V, Uinv, Vinv).

    Large sparse inputs go through a fill-minimizing unit-pivot phase
    first; the dense core uses minimal-absolute-value pivoting to keep
    intermediate entries small.
    """
    if min(m.rows, m.cols) >= 64 and len(m.entries) * 4 < m.rows * m.cols:
        return _smith_sparse(m, with_inverses)
    return _smith_dense(m, with_inverses)


def _smith_dense(m: IntMatrix, with_inverses: bool = False):
    a = m.to_rows()
    n, mm = m.rows, m.cols
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    v = [[1 if i == j else 0 for j in range(mm)] for i in range(mm)]
    ui = [[1 if i == j else 0 for j in range(n)] for i in range(n)] if with_inverses else None
    vi = [[1 if i == j else 0 for j in range(mm)] for i in range(mm)] if with_inverses else None

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            u[i], u[j] = u[j], u[i]
            if ui is not None:
                for row in ui:
                    row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        if i != j:
            for r in a:
                r[i], r[j] = r[j], r[i]
            for r in v:
                r[i], r[j] = r[j], r[i]
            if vi is not None:
                vi[i], vi[j] = vi[j], vi[i]

    def add_row(src, dst, c):
        # row dst += c * row src; Uinv: col src -= c * col dst
        ar, ur = a[src], u[src]
        ad, ud = a[dst], u[dst]
        for k in range(mm):
            if ar[k]:
                ad[k] += c * ar[k]
        for k in range(n):
            if ur[k]:
                ud[k] += c * ur[k]
        if ui is not None:
            for row in ui:
                if row[dst]:
                    row[src] -= c * row[dst]

    def add_col(src, dst, c):
        for r in a:
            if r[src]:
                r[dst] += c * r[src]
        for r in v:
            if r[src]:
                r[dst] += c * r[src]
        if vi is not None:
            rs, rd = vi[src], vi[dst]
            for k in range(mm):
                if rd[k]:
                    rs[k] -= c * rd[k]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]
        if ui is not None:
            for row in ui:
                row[i] = -row[i]

    def find_pivot(t):
        piv = None
        best = None
        for i in range(t, n):
            row = a[i]
            for j in range(t, mm):
                x = row[j]
                if x:
                    ax = abs(x)
                    if best is None or ax < best:
                        best = ax
                        piv = (i, j)
                        if ax == 1:
                            return piv
        return piv

    t = 0
    size = min(n, mm)
    while t < size:
        # re-select the minimal pivot on every clearing round so the
        # working entries shrink instead of exploding
        piv = find_pivot(t)
        if piv is None:
            break
        swap_rows(piv[0], t)
        swap_cols(piv[1], t)
        for i in range(t + 1, n):
            x = a[i][t]
            if x:
                q = x // a[t][t]
                if q:
                    add_row(t, i, -q)
        for j in range(t + 1, mm):
            x = a[t][j]
            if x:
                q = x // a[t][t]
                if q:
                    add_col(t, j, -q)
        if any(a[i][t] for i in range(t + 1, n)) or any(
            a[t][j] for j in range(t + 1, mm)
        ):
            continue  # remainders left: pick the new smaller pivot
        d = a[t][t]
        fix = None
        for i in range(t + 1, n):
            for j in range(t + 1, mm):
                if a[i][j] % d:
                    fix = i
                    break
            if fix is not None:
                break
        if fix is not None:
            add_row(fix, t, 1)
            continue
        if d < 0:
            negate_row(t)
        t += 1

    s_ent = {}
    for i in range(min(n, mm)):
        if a[i][i]:
            s_ent[(i, i)] = a[i][i]
    s = IntMatrix(n, mm, s_ent)
    um = IntMatrix.from_rows(u)
    vm = IntMatrix.from_rows(v)
    if with_inverses:
        return s, um, vm, IntMatrix.from_rows(ui), IntMatrix.from_rows(vi)
    return s, um, vm


def _unimodular_inverse(u: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular matrix, via its own SNF (S = identity)."""
    s, p, q = smith_normal_form(u)
    for i in range(u.rows):
        if s[i, i] != 1:
            raise DimensionMismatch("matrix is not unimodular")
    # p*u*q = 1  =>  u^{-1} = q*p
    return q * p


def smith_with_inverses(m: IntMatrix):
    return smith_normal_form(m, with_inverses=True)


# ---------------------------------------------------------------------------
# abelian groups


@dataclass(frozen=True)
class AbelianGroup:
    """Isomorphism type of a finitely generated abelian group.

    ``torsion`` is the invariant-factor chain d_1 | d_2 | ..., every
    d_i >= 2.  Construction canonicalizes, so equality is structural.
    """

    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        tor = [t for t in self.torsion if t not in (0, 1, -1)]
        tor = [abs(t) for t in tor]
        # re-run the divisibility chain
        changed = True
        while changed:
            changed = False
            for i in range(len(tor)):
                for j in range(i + 1, len(tor)):
                    a, b = tor[i], tor[j]
                    if b % a:
                        import math

                        g = math.gcd(a, b)
                        tor[i], tor[j] = g, a * b // g
                        changed = True
            tor = [t for t in tor if t != 1]
        tor.sort()
        object.__setattr__(self, "torsion", tuple(tor))

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def direct_sum(self, other: "AbelianGroup") -> "AbelianGroup":
        return AbelianGroup(self.free_rank + other.free_rank, self.torsion + other.torsion)

    def torsion_order(self) -> int:
        n = 1
        for t in self.torsion:
            n *= t
        return n

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"rank": self.free_rank, "torsion": list(self.torsion)}


def group_from_invariant_factors(factors: Iterable[int], ambient_rank: int) -> AbelianGroup:
    """Cokernel Z^ambient_rank / <relations with the given SNF diagonal>."""
    factors = list(factors)
    nonzero = [f for f in factors if f]
    free = ambient_rank - len(nonzero)
    return AbelianGroup(free, tuple(f for f in nonzero if abs(f) > 1))


def cokernel(m: IntMatrix) -> AbelianGroup:
    """Z^rows / column span of m."""
    s, _, _ = smith_normal_form(m)
    return group_from_invariant_factors([s[i, i] for i in range(min(m.rows, m.cols))], m.rows)


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a basis of the integer kernel of m (a saturated lattice)."""
    s, _, v = smith_normal_form(m)
    rank = sum(1 for i in range(min(m.rows, m.cols)) if s[i, i])
    idx = list(range(rank, m.cols))
    return v.submatrix(list(range(m.cols)), idx)


def column_space_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a basis of the subgroup of Z^rows spanned by m's columns."""
    s, u, _v, uinv, _vi = smith_normal_form(m, with_inverses=True)
    cols = []
    rank = 0
    for i in range(min(m.rows, m.cols)):
        if s[i, i]:
            rank += 1
    ent = {}
    for j in range(rank):
        d = s[j, j]
        for i in range(m.rows):
            x = uinv[i, j]
            if x:
                ent[(i, j)] = x * d
    b = IntMatrix(m.rows, rank, ent)
    return b


def solve_linear(a: IntMatrix, b: IntMatrix) -> Optional[IntMatrix]:
    """Solve a*x = b over the integers; None when no solution exists.

    ``b`` may have several columns; solves all simultaneously.
    """
    if a.rows != b.rows:
        raise DimensionMismatch("solve_linear: row mismatch")
    s, u, v = smith_normal_form(a)
    c = u * b
    k = min(a.rows, a.cols)
    y_ent = {}
    for j in range(b.cols):
        for i in range(a.rows):
            ci = c[i, j]
            if i < k and s[i, i]:
                if ci % s[i, i]:
                    return None
                q = ci // s[i, i]
                if q:
                    y_ent[(i, j)] = q
            else:
                if ci:
                    return None
    y = IntMatrix(a.cols, b.cols, y_ent)
    return v * y


def homology_at(d_in: IntMatrix, d_out: IntMatrix) -> AbelianGroup:
    """ker(d_out)/im(d_in) as an abelian group.

    Raises CompositionNotZero unless d_out . d_in = 0.
    """
    if d_in.cols and d_out.rows:
        if d_in.rows != d_out.cols:
            raise DimensionMismatch("homology_at: middle dimension mismatch")
        if not (d_out * d_in).is_zero():
            raise CompositionNotZero("d_out . d_in != 0")
    k = kernel_basis(d_out) if d_out.rows else IntMatrix.identity(d_in.rows)
    if k.cols == 0:
        return AbelianGroup(0)
    if d_in.cols == 0:
        return AbelianGroup(k.cols)
    z = solve_linear(k, d_in)
    if z is None:
        # cannot happen for a genuine complex: im(d_in) lies in the
        # saturated lattice ker(d_out)
        raise CompositionNotZero("image does not lie in the kernel lattice")
    s, _, _ = smith_normal_form(z)
    return group_from_invariant_factors(
        [s[i, i] for i in range(min(z.rows, z.cols))], k.cols
    )


# ---------------------------------------------------------------------------
# subquotients with coordinates


@dataclass(frozen=True)
class Subquotient:
    """(span of numerator columns) / (span of denominator columns) in Z^ambient."""

    ambient_dim: int
    numerator: IntMatrix
    denominator: IntMatrix

    def __post_init__(self):
        if self.numerator.rows != self.ambient_dim or self.denominator.rows != self.ambient_dim:
            raise DimensionMismatch("subquotient ambient dimension mismatch")


class QuotientCoordinates:
    """Coordinate system for a subquotient N/D of Z^n.

    ``project`` sends an ambient vector lying in span(N) to canonical
    coordinates of the quotient (free coordinates first, then torsion
    coordinates reduced mod their invariant factor); ``lift`` picks an
    ambient representative of a coordinate tuple.
    """

    def __init__(self, basis: IntMatrix, rel: IntMatrix):
        self.basis = basis  # ambient x r, basis of span(N)
        s, u, _v = smith_normal_form(rel)  # rel in basis coordinates
        self.u = u
        self.uinv = _unimodular_inverse(u)
        k = min(rel.rows, rel.cols)
        diag = [s[i, i] for i in range(k)] + [0] * (rel.rows - k)
        self.free_idx = [i for i, d in enumerate(diag) if d == 0]
        self.tor_idx = [i for i, d in enumerate(diag) if d > 1]
        self.tor_mod = [diag[i] for i in self.tor_idx]
        self.group = AbelianGroup(len(self.free_idx), tuple(self.tor_mod))

    def project(self, ambient_vec: IntMatrix) -> Optional[tuple]:
        """Coordinates of [v] in the quotient; None when v is not in span(N)."""
        x = solve_linear(self.basis, ambient_vec)
        if x is None:
            return None
        y = self.u * x
        free = tuple(y[i, 0] for i in self.free_idx)
        tor = tuple(y[i, 0] % m for i, m in zip(self.tor_idx, self.tor_mod))
        return free + tor

    def lift(self, coords) -> IntMatrix:
        coords = list(coords)
        if len(coords) != len(self.free_idx) + len(self.tor_idx):
            raise DimensionMismatch("coordinate length mismatch")
        y = {}
        for c, i in zip(coords[: len(self.free_idx)], self.free_idx):
            if c:
                y[(i, 0)] = c
        for c, i in zip(coords[len(self.free_idx) :], self.tor_idx):
            if c:
                y[(i, 0)] = c
        x = self.uinv * IntMatrix(self.u.rows, 1, y)
        return self.basis * x

    def zero(self) -> tuple:
        return (0,) * (len(self.free_idx) + len(self.tor_idx))


def subquotient_group(sq: Subquotient):
    """Return (AbelianGroup, QuotientCoordinates) for a subquotient.

    Raises DenominatorNotContained when the denominator span escapes
    the numerator span.
    """
    n = sq.numerator
    if n.cols == 0:
        if not sq.denominator.is_zero():
            raise DenominatorNotContained("nonzero denominator under zero numerator")
        coords = QuotientCoordinates(IntMatrix(sq.ambient_dim, 0), IntMatrix(0, 0))
        return AbelianGroup(0), coords
    basis = column_space_basis(n)
    rel = solve_linear(basis, sq.denominator)
    if rel is None:
        raise DenominatorNotContained("denominator is not contained in numerator span")
    coords = QuotientCoordinates(basis, rel)
    return coords.group, coords


def intersect_column_spans(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    """Basis (columns) of span(a) & span(b) inside Z^rows."""
    if a.rows != b.rows:
        raise DimensionMismatch("intersection row mismatch")
    if a.cols == 0 or b.cols == 0:
        return IntMatrix(a.rows, 0)
    stacked = a.hstack(-b)
    ker = kernel_basis(stacked)
    xpart = ker.submatrix(list(range(a.cols)), list(range(ker.cols)))
    gens = a * xpart
    if gens.cols == 0:
        return gens
    return column_space_basis(gens)


# ---------------------------------------------------------------------------
# Laurent polynomials over Z


class LaurentPoly:
    """An element of Z[T^{+-1}], stored as {exponent: coefficient}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        c = {}
        if isinstance(coeffs, int):
            if coeffs:
                c[0] = coeffs
        elif coeffs:
            for e, v in coeffs.items():
                if v:
                    c[e] = v
        self.coeffs = c

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls(1)

    @classmethod
    def T(cls, exp: int = 1, coeff: int = 1) -> "LaurentPoly":
        return cls({exp: coeff})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly(other)
        return isinstance(other, LaurentPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly(other)
        c = dict(self.coeffs)
        for e, v in other.coeffs.items():
            w = c.get(e, 0) + v
            if w:
                c[e] = w
            else:
                del c[e]
        return LaurentPoly(c)

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return LaurentPoly({e: -v for e, v in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            other = LaurentPoly(other)
        c: dict = {}
        for e1, v1 in self.coeffs.items():
            for e2, v2 in other.coeffs.items():
                e = e1 + e2
                w = c.get(e, 0) + v1 * v2
                if w:
                    c[e] = w
                else:
                    del c[e]
        return LaurentPoly(c)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("use explicit units for negative powers")
        out = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_unit(self) -> bool:
        """Units of Z[T^{+-1}] are exactly +-T^n."""
        return len(self.coeffs) == 1 and abs(next(iter(self.coeffs.values()))) == 1

    def evaluate(self, t: int) -> int:
        """Evaluate at an integer unit (t = +-1 keeps T^{-1} integral)."""
        if t not in (1, -1):
            raise ValueError("only T = +-1 specializations stay integral")
        return sum(v * (t ** (e % 2)) for e, v in self.coeffs.items())

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            v = self.coeffs[e]
            if e == 0:
                parts.append(f"{v:+d}")
            elif e == 1:
                parts.append(f"{v:+d}*T")
            else:
                parts.append(f"{v:+d}*T^{e}")
        s = " ".join(parts)
        return s[1:] if s.startswith("+") else s

    def to_json(self):
        return {str(e): v for e, v in sorted(self.coeffs.items())}


def solve_sparse(entries: dict, nrows: int, ncols: int, b: dict):
    """Solve A x = b over Z for a large sparse system.

    ``entries`` maps (row, col) to value and ``b`` maps row to value.
    Unit pivots are eliminated sparsely (Markowitz-style choice), the
    dense core that remains is handed to SNF.  Returns {col: value} or
    None when no integer solution exists.
    """
    rows: dict = {}
    cols: dict = {}
    for (r, c), v in entries.items():
        if v:
            rows.setdefault(r, {})[c] = v
            cols.setdefault(c, {})[r] = v
    bb = {r: v for r, v in b.items() if v}
    assignments = []  # (col, eps, row_content, b_value) for back-substitution

    import heapq

    heap = []
    for r, rowr in rows.items():
        for c, v in rowr.items():
            if v in (1, -1):
                cost = (len(rowr) - 1) * (len(cols[c]) - 1)
                heapq.heappush(heap, (cost, r, c))

    def next_pivot():
        while heap:
            cost, r, c = heapq.heappop(heap)
            v = rows.get(r, {}).get(c, 0)
            if v not in (1, -1):
                continue
            cur = (len(rows[r]) - 1) * (len(cols[c]) - 1)
            if cur > cost:
                heapq.heappush(heap, (cur, r, c))
                continue
            return r, c, v
        # sweep for units created by eliminations that never entered
        # the heap with a current cost
        best = None
        for r, rowr in rows.items():
            for c, v in rowr.items():
                if v in (1, -1):
                    cost = (len(rowr) - 1) * (len(cols[c]) - 1)
                    if best is None or cost < best[0]:
                        best = (cost, r, c, v)
        if best is None:
            return None
        return best[1], best[2], best[3]

    while True:
        piv = next_pivot()
        if piv is None:
            break
        r0, c0, eps = piv
        row0 = dict(rows[r0])
        b0 = bb.get(r0, 0)
        # eliminate column c0 from every other row
        for r in list(cols[c0]):
            if r == r0:
                continue
            a = rows[r].get(c0)
            if not a:
                continue
            coef = -a * eps
            for c, v in row0.items():
                w = rows[r].get(c, 0) + coef * v
                if w:
                    rows[r][c] = w
                    cols[c].setdefault(r, 0)
                    cols[c][r] = w
                else:
                    rows[r].pop(c, None)
                    cols.get(c, {}).pop(r, None)
            if b0:
                nb = bb.get(r, 0) + coef * b0
                if nb:
                    bb[r] = nb
                else:
                    bb.pop(r, None)
        # retire the pivot row and column
        for c in row0:
            cols.get(c, {}).pop(r0, None)
        rows.pop(r0, None)
        for r in list(cols.get(c0, ())):
            rows.get(r, {}).pop(c0, None)
        cols.pop(c0, None)
        bb.pop(r0, None)
        assignments.append((c0, eps, row0, b0))
        # seed the heap with fresh unit entries near the elimination
        for r in list(cols.get(c0, ())) or ():
            pass
        for c in row0:
            col = cols.get(c)
            if not col:
                continue
            for r, v in col.items():
                if v in (1, -1):
                    heapq.heappush(heap, ((len(rows[r]) - 1) * (len(col) - 1), r, c))

    # dense core
    x: dict = {}
    live_rows = [r for r, rowr in rows.items() if rowr or bb.get(r)]
    live_cols = sorted({c for r in live_rows for c in rows.get(r, ())})
    if live_rows:
        rmap = {r: i for i, r in enumerate(live_rows)}
        cmap = {c: i for i, c in enumerate(live_cols)}
        a_core = IntMatrix(len(live_rows), len(live_cols),
                           {(rmap[r], cmap[c]): v
                            for r in live_rows for c, v in rows.get(r, {}).items()})
        b_core = IntMatrix(len(live_rows), 1,
                           {(rmap[r], 0): bb[r] for r in live_rows if bb.get(r)})
        sol = solve_linear(a_core, b_core)
        if sol is None:
            return None
        for c, i in cmap.items():
            v = sol[i, 0]
            if v:
                x[c] = v
    else:
        # no constraints left beyond the eliminated ones
        for r, v in bb.items():
            if v and r not in rows:
                return None
    # back-substitute
    for c0, eps, row0, b0 in reversed(assignments):
        acc = b0
        for c, v in row0.items():
            if c == c0:
                continue
            acc -= v * x.get(c, 0)
        val = acc * eps
        if val:
            x[c0] = val
    return x


def _smith_sparse(m: IntMatrix, with_inverses: bool):
    """Smith normal form for large sparse matrices.

    Unit pivots are eliminated with a fill-minimizing choice on sparse
    row/column structures; whatever remains is handed to the dense
    routine and the transforms are glued together.
    """
    rows: dict = {}
    cols: dict = {}
    for (i, j), v in m.entries.items():
        rows.setdefault(i, {})[j] = v
        cols.setdefault(j, {})[i] = v
    n, mm = m.rows, m.cols
    u_rows = {i: {i: 1} for i in range(n)}
    v_cols = {j: {j: 1} for j in range(mm)}
    ui_cols = {i: {i: 1} for i in range(n)} if with_inverses else None
    vi_rows = {j: {j: 1} for j in range(mm)} if with_inverses else None
    active_rows = set(range(n))
    active_cols = set(range(mm))
    pivots = []  # (row, col) with entry normalized to +1

    def add_row(src, dst, c):
        # row dst += c * row src (matrix and U); Uinv col src -= c * col dst
        for j, v in list(rows.get(src, {}).items()):
            w = rows.setdefault(dst, {}).get(j, 0) + c * v
            if w:
                rows[dst][j] = w
                cols.setdefault(j, {})[dst] = w
            else:
                rows[dst].pop(j, None)
                cols.get(j, {}).pop(dst, None)
        ur = u_rows.get(src, {})
        ud = u_rows.setdefault(dst, {})
        for k, v in ur.items():
            w = ud.get(k, 0) + c * v
            if w:
                ud[k] = w
            else:
                del ud[k]
        if ui_cols is not None:
            cs = ui_cols.setdefault(src, {})
            cd = ui_cols.get(dst, {})
            for k, v in cd.items():
                w = cs.get(k, 0) - c * v
                if w:
                    cs[k] = w
                else:
                    del cs[k]

    def add_col(src, dst, c):
        for i, v in list(cols.get(src, {}).items()):
            w = rows.setdefault(i, {}).get(dst, 0) + c * v
            if w:
                rows[i][dst] = w
                cols.setdefault(dst, {})[i] = w
            else:
                rows[i].pop(dst, None)
                cols.get(dst, {}).pop(i, None)
        vs = v_cols.get(src, {})
        vd = v_cols.setdefault(dst, {})
        for k, v in vs.items():
            w = vd.get(k, 0) + c * v
            if w:
                vd[k] = w
            else:
                del vd[k]
        if vi_rows is not None:
            rs = vi_rows.setdefault(src, {})
            rd = vi_rows.get(dst, {})
            for k, v in rd.items():
                w = rs.get(k, 0) - c * v
                if w:
                    rs[k] = w
                else:
                    del rs[k]

    _steps = 0
    while True:
        _steps += 1
        if _steps > 5 * (min(n, mm) + 2):
            raise RuntimeError("sparse SNF pivot loop runaway")
        best = None
        for i in active_rows:
            rowi = rows.get(i)
            if not rowi:
                continue
            for j, v in rowi.items():
                if v in (1, -1):
                    cost = (len(rowi) - 1) * (len(cols[j]) - 1)
                    if best is None or cost < best[0]:
                        best = (cost, i, j, v)
                        if cost == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, r0, c0, eps = best
        if eps == -1:
            # negate the pivot row of the matrix and U; column r0 of Uinv
            rows[r0] = {j: -v for j, v in rows[r0].items()}
            for j in rows[r0]:
                cols[j][r0] = rows[r0][j]
            u_rows[r0] = {k: -v for k, v in u_rows[r0].items()}
            if ui_cols is not None and r0 in ui_cols:
                ui_cols[r0] = {k: -v for k, v in ui_cols[r0].items()}
        for i in list(cols.get(c0, {})):
            if i == r0:
                continue
            a = rows[i].get(c0)
            if a:
                add_row(r0, i, -a)
        for j in list(rows.get(r0, {})):
            if j == c0:
                continue
            b = rows[r0].get(j)
            if b:
                add_col(c0, j, -b)
        active_rows.discard(r0)
        active_cols.discard(c0)
        pivots.append((r0, c0))

    # the residual block
    res_rows = sorted(active_rows)
    res_cols = sorted(active_cols)
    rmap = {r: i for i, r in enumerate(res_rows)}
    cmap = {c: j for j, c in enumerate(res_cols)}
    res_ent = {}
    for r in res_rows:
        for c, v in rows.get(r, {}).items():
            res_ent[(rmap[r], cmap[c])] = v
    core = IntMatrix(len(res_rows), len(res_cols), res_ent)
    if with_inverses:
        s2, u2, v2, u2i, v2i = _smith_dense(core, with_inverses=True)
    else:
        s2, u2, v2 = _smith_dense(core)
        u2i = v2i = None

    # global row order: pivot rows first, then residual rows
    row_order = [r for r, _c in pivots] + res_rows
    col_order = [c for _r, c in pivots] + res_cols
    row_pos = {r: i for i, r in enumerate(row_order)}
    col_pos = {c: j for j, c in enumerate(col_order)}
    k = len(pivots)

    # U_final = (dense-u2 acting on residual rows) . permutation . U_sparse
    u_ent = {}
    for r, urow in u_rows.items():
        if r in rmap:
            continue
        if r not in row_pos:
            continue
        for kk, v in urow.items():
            u_ent[(row_pos[r], kk)] = v
    for i2 in range(len(res_rows)):
        # row i2 of u2 combines residual U rows
        acc = {}
        for jj in range(len(res_rows)):
            coeff = u2[i2, jj]
            if not coeff:
                continue
            for kk, v in u_rows.get(res_rows[jj], {}).items():
                acc[kk] = acc.get(kk, 0) + coeff * v
        for kk, v in acc.items():
            if v:
                u_ent[(k + i2, kk)] = v
    u_final = IntMatrix(n, n, u_ent)

    v_ent = {}
    for c, vcol in v_cols.items():
        if c in cmap:
            continue
        if c not in col_pos:
            continue
        for kk, v in vcol.items():
            v_ent[(kk, col_pos[c])] = v
    for j2 in range(len(res_cols)):
        acc = {}
        for ii in range(len(res_cols)):
            coeff = v2[ii, j2]
            if not coeff:
                continue
            for kk, v in v_cols.get(res_cols[ii], {}).items():
                acc[kk] = acc.get(kk, 0) + coeff * v
        for kk, v in acc.items():
            if v:
                v_ent[(kk, k + j2)] = v
    v_final = IntMatrix(mm, mm, v_ent)

    s_ent = {(i, i): 1 for i in range(k)}
    for i in range(min(s2.rows, s2.cols)):
        if s2[i, i]:
            s_ent[(k + i, k + i)] = s2[i, i]
    s_final = IntMatrix(n, mm, s_ent)

    if not with_inverses:
        return s_final, u_final, v_final

    ui_ent = {}
    for orig, col in ui_cols.items():
        pos = row_pos.get(orig)
        if pos is None:
            continue
        if orig in rmap:
            continue
        for kk, v in col.items():
            ui_ent[(kk, pos)] = v
    for j2 in range(len(res_rows)):
        acc = {}
        for ii in range(len(res_rows)):
            coeff = u2i[ii, j2]
            if not coeff:
                continue
            for kk, v in ui_cols.get(res_rows[ii], {}).items():
                acc[kk] = acc.get(kk, 0) + coeff * v
        for kk, v in acc.items():
            if v:
                ui_ent[(kk, k + j2)] = v
    uinv_final = IntMatrix(n, n, ui_ent)

    vi_ent = {}
    for orig, rowv in vi_rows.items():
        pos = col_pos.get(orig)
        if pos is None or orig in cmap:
            continue
        for kk, v in rowv.items():
            vi_ent[(pos, kk)] = v
    for i2 in range(len(res_cols)):
        acc = {}
        for jj in range(len(res_cols)):
            coeff = v2i[i2, jj]
            if not coeff:
                continue
            for kk, v in vi_rows.get(res_cols[jj], {}).items():
                acc[kk] = acc.get(kk, 0) + coeff * v
        for kk, v in acc.items():
            if v:
                vi_ent[(k + i2, kk)] = v
    vinv_final = IntMatrix(mm, mm, vi_ent)
    return s_final, u_final, v_final, uinv_final, vinv_final
