"""Khovanov cube complexes for the Frobenius algebra R[X]/(X^2 - hX - t).

The complex of a diagram D is built over Z with integer parameters
(h, t); (0, 0) is plain Khovanov homology, (0, 1) the Lee-type and
(1, 0) the Bar-Natan-type deformation.  Gradings follow the standard
conventions

    h_deg = |v| - n_minus,
    q_deg = (#1-labels - #X-labels) + |v| + n_plus - 2 n_minus,

so the differential preserves q at (0, 0) and raises it by 0, 2 or 4
otherwise.  Cube edge signs are (-1)^(number of 1-bits before the
flipped coordinate).

``reduce`` performs unit-pivot Gaussian elimination, returning the
small complex together with the chain homotopy equivalences in both
directions; it is the engine behind homology at scale and behind the
Reidemeister move maps.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Optional

from .diagram import Diagram
from .linalg import AbelianGroup, IntMatrix, homology_at

LABEL_ONE = 0
LABEL_X = 1


@dataclass(frozen=True)
class FrobeniusParams:
    h: int = 0
    t: int = 0

    @property
    def is_plain(self) -> bool:
        return self.h == 0 and self.t == 0


@dataclass(frozen=True)
class Generator:
    """An enhanced state: a vertex of the cube plus a label per circle."""

    state: tuple
    labels: tuple


class KhComplex:
    """A finitely generated bigraded complex of free Z-modules.

    ``gens[h]`` is the ordered basis in homological degree h, ``qdeg``
    assigns each generator its quantum grading, and ``diff[h]`` holds
    the sparse matrix of d: C^h -> C^{h+1} as {(row, col): entry}.
    """

    def __init__(self, params, gens, qdeg, diff, diagram: Optional[Diagram] = None,
                 shifts=(0, 0)):
        self.params = params
        self.gens = {h: tuple(gs) for h, gs in gens.items() if gs}
        self.qdeg = dict(qdeg)
        self.diff = {h: dict(m) for h, m in diff.items()}
        self.diagram = diagram
        self.shifts = shifts
        self._index = {
            h: {g: i for i, g in enumerate(gs)} for h, gs in self.gens.items()
        }

    # -- bookkeeping -----------------------------------------------------

    def degrees(self):
        return sorted(self.gens)

    def dim(self, h: int) -> int:
        return len(self.gens.get(h, ()))

    def total_dim(self) -> int:
        return sum(len(g) for g in self.gens.values())

    def index_of(self, h: int, g) -> int:
        return self._index[h][g]

    def matrix(self, h: int) -> IntMatrix:
        return IntMatrix(self.dim(h + 1), self.dim(h), self.diff.get(h, {}))

    def q_of(self, h: int, i: int) -> int:
        return self.qdeg[self.gens[h][i]]

    def check_d_squared(self) -> None:
        for h in self.degrees():
            a = self.diff.get(h)
            b = self.diff.get(h + 1)
            if not a or not b:
                continue
            if _sparse_mul(b, a):
                raise AssertionError(f"d^2 != 0 out of degree {h}")

    def check_q_degrees(self) -> None:
        """d never lowers q; at (0,0) it preserves q exactly."""
        for h, m in self.diff.items():
            for (r, c), v in m.items():
                dq = self.q_of(h + 1, r) - self.q_of(h, c)
                if self.params.is_plain:
                    assert dq == 0, f"q jump {dq} at (0,0)"
                else:
                    assert dq in (0, 2, 4), f"q jump {dq}"


class BigradedHomology:
    """Map (h_deg, q_deg) -> AbelianGroup; q_deg is None in filtered mode."""

    def __init__(self, groups: dict):
        self.groups = {k: v for k, v in groups.items() if not v.is_trivial}

    def __eq__(self, other):
        return isinstance(other, BigradedHomology) and self.groups == other.groups

    def __getitem__(self, key):
        return self.groups.get(key, AbelianGroup(0))

    def at_h(self, h: int) -> AbelianGroup:
        total = AbelianGroup(0)
        for (hh, _q), g in sorted(self.groups.items()):
            if hh == h:
                total = total.direct_sum(g)
        return total

    def total(self) -> AbelianGroup:
        total = AbelianGroup(0)
        for _k, g in sorted(self.groups.items()):
            total = total.direct_sum(g)
        return total

    def h_range(self):
        hs = [h for (h, _q) in self.groups]
        return (min(hs), max(hs)) if hs else (0, 0)

    def to_json(self) -> dict:
        out = {}
        for (h, q), g in sorted(self.groups.items(), key=lambda kv: (kv[0][0], kv[0][1] if kv[0][1] is not None else 0)):
            key = f"({h},{q})" if q is not None else f"({h})"
            out[key] = g.to_json()
        return out

    def json_string(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self):
        return f"BigradedHomology({self.to_json()})"


# ---------------------------------------------------------------------------
# the cube


def _merge_terms(la, lb, h, t):
    """m(la (x) lb) as [(label, coeff)]."""
    if la == LABEL_ONE and lb == LABEL_ONE:
        return [(LABEL_ONE, 1)]
    if la == LABEL_X and lb == LABEL_X:
        out = []
        if h:
            out.append((LABEL_X, h))
        if t:
            out.append((LABEL_ONE, t))
        return out
    return [(LABEL_X, 1)]


def _split_terms(l, h, t):
    """Delta(l) as [(label_first, label_second, coeff)]."""
    if l == LABEL_ONE:
        out = [(LABEL_ONE, LABEL_X, 1), (LABEL_X, LABEL_ONE, 1)]
        if h:
            out.append((LABEL_ONE, LABEL_ONE, -h))
        return out
    out = [(LABEL_X, LABEL_X, 1)]
    if t:
        out.append((LABEL_ONE, LABEL_ONE, t))
    return out


def build_cube(d: Diagram, p: FrobeniusParams = FrobeniusParams()) -> KhComplex:
    """The Khovanov complex of a diagram over A_{h,t}."""
    n = d.n_crossings
    n_plus, n_minus = d.n_plus, d.n_minus
    res = {}
    for state in itertools.product((0, 1), repeat=n):
        res[state] = d.resolve(state)

    gens: dict = {}
    qdeg: dict = {}
    for state in sorted(res):
        r = res[state]
        w = sum(state)
        h_deg = w - n_minus
        base_q = w + n_plus - 2 * n_minus
        for labels in itertools.product((LABEL_ONE, LABEL_X), repeat=r.circle_count):
            g = Generator(state, labels)
            ones = labels.count(LABEL_ONE)
            qdeg[g] = base_q + ones - (len(labels) - ones)
            gens.setdefault(h_deg, []).append(g)

    index = {h: {g: i for i, g in enumerate(gs)} for h, gs in gens.items()}
    diff: dict = {}

    for state in sorted(res):
        r = res[state]
        w = sum(state)
        h_deg = w - n_minus
        circles = r.circles
        for ci in range(n):
            if state[ci] == 1:
                continue
            sign = -1 if sum(state[:ci]) % 2 else 1
            nstate = state[:ci] + (1,) + state[ci + 1 :]
            r2 = res[nstate]
            ncircles = r2.circles
            # circles unaffected by the flip keep their edge sets
            tgt_index = {c: i for i, c in enumerate(ncircles)}
            a_circ, b_circ = r.incidence[ci]
            if a_circ != b_circ:
                # merge: circles a_circ, b_circ -> one target circle
                merged_edges = tuple(sorted(circles[a_circ] + circles[b_circ]))
                m_tgt = tgt_index[merged_edges]
                carry = {}
                for i, c in enumerate(circles):
                    if i not in (a_circ, b_circ):
                        carry[i] = tgt_index[c]
                for labels in itertools.product((0, 1), repeat=len(circles)):
                    src = Generator(state, labels)
                    col = index[h_deg][src]
                    for lab, coeff in _merge_terms(labels[a_circ], labels[b_circ], p.h, p.t):
                        nl = [0] * len(ncircles)
                        for i, j in carry.items():
                            nl[j] = labels[i]
                        nl[m_tgt] = lab
                        tgt = Generator(nstate, tuple(nl))
                        row = index[h_deg + 1][tgt]
                        key = (row, col)
                        blk = diff.setdefault(h_deg, {})
                        vnew = blk.get(key, 0) + sign * coeff
                        if vnew:
                            blk[key] = vnew
                        else:
                            blk.pop(key, None)
            else:
                # split: circle a_circ -> two target circles; the first
                # is the one carrying the slot-0 corner arc of crossing ci
                fa, fb = r2.incidence[ci]
                carry = {}
                for i, c in enumerate(circles):
                    if i != a_circ:
                        carry[i] = tgt_index[c]
                for labels in itertools.product((0, 1), repeat=len(circles)):
                    src = Generator(state, labels)
                    col = index[h_deg][src]
                    for l1, l2, coeff in _split_terms(labels[a_circ], p.h, p.t):
                        nl = [0] * len(ncircles)
                        for i, j in carry.items():
                            nl[j] = labels[i]
                        nl[fa] = l1
                        nl[fb] = l2
                        tgt = Generator(nstate, tuple(nl))
                        row = index[h_deg + 1][tgt]
                        key = (row, col)
                        blk = diff.setdefault(h_deg, {})
                        vnew = blk.get(key, 0) + sign * coeff
                        if vnew:
                            blk[key] = vnew
                        else:
                            blk.pop(key, None)

    return KhComplex(p, gens, qdeg, diff, diagram=d, shifts=(n_plus, n_minus))


# ---------------------------------------------------------------------------
# chain maps


class ChainMap:
    """A chain map between KhComplexes, homogeneous in homological degree.

    ``blocks[h]`` is the sparse matrix from source degree h to target
    degree h + dh.  The chain identity d.f = f.d is checked exactly by
    ``verify`` and asserted at construction unless suppressed.
    """

    def __init__(self, source: KhComplex, target: KhComplex, blocks: dict, dh: int = 0,
                 check: bool = True):
        self.source = source
        self.target = target
        self.dh = dh
        self.blocks = {h: {k: v for k, v in m.items() if v} for h, m in blocks.items()}
        self.blocks = {h: m for h, m in self.blocks.items() if m}
        if check:
            self.verify()

    @classmethod
    def identity(cls, c: KhComplex) -> "ChainMap":
        blocks = {h: {(i, i): 1 for i in range(c.dim(h))} for h in c.degrees()}
        return cls(c, c, blocks, 0, check=False)

    @classmethod
    def zero(cls, source, target, dh=0) -> "ChainMap":
        return cls(source, target, {}, dh, check=False)

    @classmethod
    def from_function(cls, source, target, dh, fn: Callable, check=True) -> "ChainMap":
        """fn(h, gen) -> iterable of (target_gen, coeff) in degree h + dh."""
        blocks: dict = {}
        for h in source.degrees():
            for j, g in enumerate(source.gens[h]):
                for tg, coeff in fn(h, g):
                    if not coeff:
                        continue
                    i = target.index_of(h + dh, tg)
                    blk = blocks.setdefault(h, {})
                    key = (i, j)
                    v = blk.get(key, 0) + coeff
                    if v:
                        blk[key] = v
                    else:
                        del blk[key]
        return cls(source, target, blocks, dh, check=check)

    def entry(self, h: int, i: int, j: int) -> int:
        return self.blocks.get(h, {}).get((i, j), 0)

    def block_matrix(self, h: int) -> IntMatrix:
        return IntMatrix(self.target.dim(h + self.dh), self.source.dim(h),
                         self.blocks.get(h, {}))

    def is_zero(self) -> bool:
        return not self.blocks

    def verify(self) -> None:
        for h in set(self.source.degrees()) | set(self.blocks):
            lhs = _sparse_mul(
                self.target.diff.get(h + self.dh, {}), self.blocks.get(h, {})
            )
            rhs = _sparse_mul(
                self.blocks.get(h + 1, {}), self.source.diff.get(h, {})
            )
            if lhs != rhs:
                raise AssertionError(f"chain identity fails out of degree {h}")

    def compose(self, inner: "ChainMap") -> "ChainMap":
        """self . inner (inner applied first)."""
        if inner.target is not self.source:
            if inner.target.gens != self.source.gens:
                raise AssertionError("compose: middle complexes disagree")
        blocks = {}
        for h, m in inner.blocks.items():
            outer = self.blocks.get(h + inner.dh)
            if not outer:
                continue
            prod = _sparse_mul(outer, m)
            if prod:
                blocks[h] = prod
        return ChainMap(inner.source, self.target, blocks, self.dh + inner.dh,
                        check=False)

    def add(self, other: "ChainMap") -> "ChainMap":
        assert self.dh == other.dh
        blocks = {h: dict(m) for h, m in self.blocks.items()}
        for h, m in other.blocks.items():
            blk = blocks.setdefault(h, {})
            for k, v in m.items():
                w = blk.get(k, 0) + v
                if w:
                    blk[k] = w
                else:
                    del blk[k]
        return ChainMap(self.source, self.target, blocks, self.dh, check=False)

    def scale(self, c: int) -> "ChainMap":
        return ChainMap(self.source, self.target,
                        {h: {k: c * v for k, v in m.items()} for h, m in self.blocks.items()},
                        self.dh, check=False)

    def __eq__(self, other):
        return (
            isinstance(other, ChainMap)
            and self.dh == other.dh
            and self.source.gens == other.source.gens
            and self.target.gens == other.target.gens
            and self.blocks == other.blocks
        )

    def equals_up_to_sign(self, other: "ChainMap") -> bool:
        return self == other or self == other.scale(-1)

    def measured_bidegree(self):
        """(dh, dq) when every entry shifts q by the same amount, else
        (dh, (min_dq, max_dq))."""
        dqs = set()
        for h, m in self.blocks.items():
            for (i, j), _v in m.items():
                dqs.add(self.target.q_of(h + self.dh, i) - self.source.q_of(h, j))
        if not dqs:
            return (self.dh, None)
        if len(dqs) == 1:
            return (self.dh, dqs.pop())
        return (self.dh, (min(dqs), max(dqs)))


def _sparse_mul(a: dict, b: dict) -> dict:
    """{(i,k)} * {(k,j)} -> {(i,j)} for dict-of-pairs sparse matrices."""
    if not a or not b:
        return {}
    a_by_col: dict = {}
    for (i, k), v in a.items():
        a_by_col.setdefault(k, []).append((i, v))
    out: dict = {}
    for (k, j), w in b.items():
        for i, v in a_by_col.get(k, ()):
            key = (i, j)
            x = out.get(key, 0) + v * w
            if x:
                out[key] = x
            else:
                del out[key]
    return out


# ---------------------------------------------------------------------------
# homology


def homology(c: KhComplex, reduce_first: bool = True) -> BigradedHomology:
    """Bigraded homology at (0,0); per-h homology otherwise.

    ``reduce_first`` routes through unit-pivot reduction (which never
    changes the answer) to keep Smith normal forms small; disable it to
    compute straight from the cube as an independent cross-check.
    """
    if reduce_first:
        c = reduce(c)[0]
    groups = {}
    if c.params.is_plain:
        for h in c.degrees():
            qs = sorted({c.qdeg[g] for g in c.gens[h]})
            for q in qs:
                d_in = _q_block(c, h - 1, q)
                d_out = _q_block(c, h, q)
                g = homology_at(d_in, d_out)
                if not g.is_trivial:
                    groups[(h, q)] = g
    else:
        for h in c.degrees():
            d_in = c.matrix(h - 1)
            d_out = c.matrix(h)
            g = homology_at(d_in, d_out)
            if not g.is_trivial:
                groups[(h, None)] = g
    return BigradedHomology(groups)


def _q_block(c: KhComplex, h: int, q: int) -> IntMatrix:
    src = [j for j, g in enumerate(c.gens.get(h, ())) if c.qdeg[g] == q]
    tgt = [i for i, g in enumerate(c.gens.get(h + 1, ())) if c.qdeg[g] == q]
    src_pos = {j: jj for jj, j in enumerate(src)}
    tgt_pos = {i: ii for ii, i in enumerate(tgt)}
    ent = {}
    for (i, j), v in c.diff.get(h, {}).items():
        if j in src_pos and i in tgt_pos:
            ent[(tgt_pos[i], src_pos[j])] = v
    return IntMatrix(len(tgt), len(src), ent)


# ---------------------------------------------------------------------------
# reduction


class _Eliminator:
    """Shared state for unit-pivot Gaussian elimination with tracked
    retraction (f) and inclusion (g) maps."""

    def __init__(self, c: KhComplex):
        self.c = c
        degrees = c.degrees()
        self.cols = {h: {} for h in degrees}
        self.rows = {h: {} for h in degrees}
        for h, m in c.diff.items():
            for (i, j), v in m.items():
                self.cols[h].setdefault(j, {})[i] = v
                self.rows[h].setdefault(i, {})[j] = v
        self.alive = {h: set(range(c.dim(h))) for h in degrees}
        self.f_rows = {(h, i): {(h, i): 1} for h in degrees for i in range(c.dim(h))}
        self.g_cols = {(h, i): {(h, i): 1} for h in degrees for i in range(c.dim(h))}

    def eliminate(self, h: int, j: int, i: int):
        """Eliminate the pivot at diff[h][(i, j)], which must be +-1."""
        cols, rows = self.cols, self.rows
        eps = cols[h].get(j, {}).get(i, 0)
        if eps not in (1, -1):
            raise AssertionError(f"pivot at degree {h} ({i},{j}) is {eps}, not a unit")
        gamma = {y: v for y, v in cols[h].get(j, {}).items() if y != i}
        delta = {x: v for x, v in rows[h].get(i, {}).items() if x != j}
        self.alive[h].discard(j)
        self.alive[h + 1].discard(i)
        for y in list(cols[h].get(j, {})):
            rows[h][y].pop(j, None)
        cols[h].pop(j, None)
        for x in list(rows[h].get(i, {})):
            cols[h][x].pop(i, None)
        rows[h].pop(i, None)
        if j in rows.get(h - 1, {}):
            for x in list(rows[h - 1][j]):
                cols[h - 1][x].pop(j, None)
                if not cols[h - 1][x]:
                    cols[h - 1].pop(x)
            rows[h - 1].pop(j, None)
        if i in cols.get(h + 1, {}):
            for y in list(cols[h + 1][i]):
                rows[h + 1][y].pop(i, None)
                if not rows[h + 1][y]:
                    rows[h + 1].pop(y)
            cols[h + 1].pop(i, None)
        # d' = d - delta eps^{-1} gamma
        for x, dx in delta.items():
            coef = -dx * eps
            colx = cols[h].setdefault(x, {})
            for y, gy in gamma.items():
                w = colx.get(y, 0) + coef * gy
                if w:
                    colx[y] = w
                    rows[h].setdefault(y, {})[x] = w
                else:
                    colx.pop(y, None)
                    rows[h].get(y, {}).pop(x, None)
        row_t = self.f_rows.pop((h + 1, i))
        self.f_rows.pop((h, j), None)
        for y, gy in gamma.items():
            ry = self.f_rows[(h + 1, y)]
            coef = -eps * gy
            for orig, v in row_t.items():
                w = ry.get(orig, 0) + coef * v
                if w:
                    ry[orig] = w
                else:
                    del ry[orig]
        col_s = self.g_cols.pop((h, j))
        self.g_cols.pop((h + 1, i), None)
        for x, dx in delta.items():
            cx = self.g_cols[(h, x)]
            coef = -eps * dx
            for orig, v in col_s.items():
                w = cx.get(orig, 0) + coef * v
                if w:
                    cx[orig] = w
                else:
                    del cx[orig]


def reduce(c: KhComplex, pivot_filter: Optional[Callable] = None,
           planned_pivots: Optional[list] = None):
    """Eliminate unit pivots, tracking the homotopy equivalence.

    Returns (c_small, f, g) with f: c -> c_small, g: c_small -> c chain
    maps, f.g = id and g.f homotopic to the identity.  By default all
    unit pivots are eliminated, in increasing homological degree and
    basis order; ``pivot_filter(h, src_gen, tgt_gen)`` restricts the
    admissible pivots, and ``planned_pivots`` (a list of
    (h, src_gen, tgt_gen)) executes exactly the given eliminations, in
    order -- the Reidemeister move constructions use the latter.
    """
    state = _Eliminator(c)
    degrees = c.degrees()

    if planned_pivots is not None:
        for h, src, tgt in planned_pivots:
            j = c.index_of(h, src)
            i = c.index_of(h + 1, tgt)
            state.eliminate(h, j, i)
    else:
        cols = state.cols
        for h in degrees:
            if h + 1 not in state.alive:
                continue
            progress = True
            while progress:
                progress = False
                for j in sorted(state.alive[h]):
                    col = cols[h].get(j, {})
                    pivot = None
                    for i in sorted(col):
                        v = col[i]
                        if v in (1, -1):
                            if pivot_filter is None or pivot_filter(
                                h, c.gens[h][j], c.gens[h + 1][i]
                            ):
                                pivot = i
                                break
                    if pivot is None:
                        continue
                    state.eliminate(h, j, pivot)
                    progress = True

    alive, cols, f_rows, g_cols = state.alive, state.cols, state.f_rows, state.g_cols

    # assemble the small complex
    new_gens = {}
    new_index = {}
    for h in degrees:
        keep = sorted(alive[h])
        if keep:
            new_gens[h] = [c.gens[h][i] for i in keep]
            new_index[h] = {i: ii for ii, i in enumerate(keep)}
    new_diff = {}
    for h in degrees:
        if h not in new_index or (h + 1) not in new_index:
            continue
        blk = {}
        for j, colj in cols[h].items():
            if j not in new_index[h]:
                continue
            for i, v in colj.items():
                blk[(new_index[h + 1][i], new_index[h][j])] = v
        if blk:
            new_diff[h] = blk
    qdeg = {g: c.qdeg[g] for h, gs in new_gens.items() for g in gs}
    small = KhComplex(c.params, new_gens, qdeg, new_diff, diagram=c.diagram,
                      shifts=c.shifts)

    f_blocks: dict = {}
    for (h, i), row in f_rows.items():
        ii = new_index[h][i]
        for (ho, io), v in row.items():
            assert ho == h
            f_blocks.setdefault(h, {})[(ii, io)] = v
    g_blocks: dict = {}
    for (h, i), colv in g_cols.items():
        jj = new_index[h][i]
        for (ho, io), v in colv.items():
            assert ho == h
            g_blocks.setdefault(h, {})[(io, jj)] = v

    f = ChainMap(c, small, f_blocks, 0, check=False)
    g = ChainMap(small, c, g_blocks, 0, check=False)
    return small, f, g


class HomologyPresentation:
    """Presentation of H_h(C) = ker d_h / im d_{h-1} with coordinates."""

    def __init__(self, c: KhComplex, h: int):
        from .linalg import Subquotient, kernel_basis, subquotient_group

        self.complex = c
        self.h = h
        d_out = c.matrix(h)
        d_in = c.matrix(h - 1)
        ker = kernel_basis(d_out) if c.dim(h) else IntMatrix(0, 0)
        self.cycles = ker
        self.boundaries = d_in
        sq = Subquotient(c.dim(h), ker, d_in)
        self.group, self.coords = subquotient_group(sq)

    def class_of(self, vec: IntMatrix):
        return self.coords.project(vec)

    def representative(self, coords) -> IntMatrix:
        return self.coords.lift(coords)


def induced_homology_map(f: ChainMap, h: int):
    """The map H_h(source) -> H_{h+dh}(target) in quotient coordinates.

    Returns (src_pres, tgt_pres, matrix) where matrix columns are the
    images of the source coordinate basis.
    """
    src = HomologyPresentation(f.source, h)
    tgt = HomologyPresentation(f.target, h + f.dh)
    n_src = len(src.coords.free_idx) + len(src.coords.tor_idx)
    cols = {}
    block = f.block_matrix(h)
    for j in range(n_src):
        basis = [0] * n_src
        basis[j] = 1
        rep = src.representative(basis)
        img = block * rep
        c = tgt.class_of(img)
        if c is None:
            raise AssertionError("image of a cycle is not a cycle")
        for i, v in enumerate(c):
            if v:
                cols[(i, j)] = v
    n_tgt = len(tgt.coords.free_idx) + len(tgt.coords.tor_idx)
    return src, tgt, IntMatrix(n_tgt, n_src, cols)


def image_subgroup(f: ChainMap, h: int):
    """(image iso type, target group) of H_h(source) -> H_{h+dh}(target)."""
    from .linalg import Subquotient, subquotient_group

    src = HomologyPresentation(f.source, h)
    tgt = HomologyPresentation(f.target, h + f.dh)
    n_src = len(src.coords.free_idx) + len(src.coords.tor_idx)
    block = f.block_matrix(h)
    img_cols = IntMatrix(f.target.dim(h + f.dh), 0)
    for j in range(n_src):
        basis = [0] * n_src
        basis[j] = 1
        rep = src.representative(basis)
        img_cols = img_cols.hstack(block * rep)
    denom = tgt.boundaries
    num = img_cols.hstack(denom)
    g_img, _ = subquotient_group(Subquotient(f.target.dim(h + f.dh), num, denom))
    # surjectivity: cycles / (image + boundaries) trivial
    quot, _ = subquotient_group(
        Subquotient(f.target.dim(h + f.dh), tgt.cycles, num)
    )
    return g_img, tgt.group, quot.is_trivial
