"""Oriented link diagrams as PD codes.

A crossing is a 4-tuple of edge labels listed counterclockwise starting
from the incoming under-strand, so slots 0/2 hold the under-strand and
slots 1/3 the over-strand.  A crossing is positive exactly when the
over-strand runs from slot 3 to slot 1.  Crossingless unknot components
("free loops") are carried as bare edge labels with no crossing
occurrences.

Orientations are part of the diagram: each component is an oriented
cycle of edges.  The text format is

    PD[n_circles=1; X(0,3,1,2), X(2,1,3,0)] O[0>1] O[2>3]

where ``n_circles`` (optional) counts free loops and each ``O[...]``
lists one component's edges in traversal order.  Orientation recovery
order: an O[...] list fixes a component's direction whenever the
sequence distinguishes the two (length >= 3); otherwise the canonical
rooting of the printed tuples does (slot 0 = incoming under).  Printing
is always canonical, and parse_pd(d.pd_string()) == d.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence


class ParseError(Exception):
    pass


class DanglingEdge(Exception):
    """An edge label does not appear exactly twice among the crossings."""


class InconsistentOrientation(Exception):
    pass


def _uf_find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def _uf_union(parent, x, y):
    rx, ry = _uf_find(parent, x), _uf_find(parent, y)
    if rx != ry:
        parent[max(rx, ry)] = min(rx, ry)


@dataclass(frozen=True)
class ResolvedDiagram:
    """A full smoothing of a diagram: the resulting circle collection.

    ``circles`` lists each circle as a sorted tuple of the edges lying
    on it, ordered by smallest edge.  ``incidence[i]`` gives, for
    crossing i, the indices of the circles carrying its two smoothing
    arcs; for a 1-smoothing the first entry is the arc containing the
    slot-0/slot-3 corner (the anchor for ordering dotted endomorphisms).
    """

    circles: tuple
    incidence: tuple

    @property
    def circle_count(self) -> int:
        return len(self.circles)

    def circle_of(self, edge: int) -> int:
        for i, c in enumerate(self.circles):
            if edge in c:
                return i
        raise KeyError(edge)


class Diagram:
    """An oriented link diagram."""

    def __init__(self, crossings: Sequence[Sequence[int]], loops: Sequence[int] = (),
                 comps: Optional[Sequence[Sequence[int]]] = None,
                 heads: Optional[dict] = None):
        crossings = tuple(tuple(int(x) for x in c) for c in crossings)
        loops = tuple(int(x) for x in loops)
        for c in crossings:
            if len(c) != 4:
                raise ParseError(f"crossing {c} is not a 4-tuple")
        occ: dict = {}
        for ci, c in enumerate(crossings):
            for s, e in enumerate(c):
                occ.setdefault(e, []).append((ci, s))
        for e, places in occ.items():
            if len(places) != 2:
                raise DanglingEdge(f"edge {e} appears {len(places)} times")
        for e in loops:
            if e in occ:
                raise DanglingEdge(f"free loop {e} also appears at a crossing")
        if len(set(loops)) != len(loops):
            raise DanglingEdge("duplicate free loop label")
        self.loops = tuple(sorted(loops))

        head_of = self._orient(crossings, occ, comps, heads)

        # re-root each crossing so slot 0 is the incoming under-edge
        rot_by = []
        new_cross = []
        incoming = {p: False for places in occ.values() for p in places}
        for e, p in head_of.items():
            incoming[p] = True
        for ci, c in enumerate(crossings):
            if incoming[(ci, 0)]:
                rot = 0
            elif incoming[(ci, 2)]:
                rot = 2
            else:
                raise InconsistentOrientation(f"under-strand of crossing {ci} unoriented")
            rot_by.append(rot)
            new_cross.append(tuple(c[(s + rot) % 4] for s in range(4)))
        self.crossings = tuple(new_cross)
        occ2: dict = {}
        for ci, c in enumerate(self.crossings):
            for s, e in enumerate(c):
                occ2.setdefault(e, []).append((ci, s))
        self._occ = {e: tuple(p) for e, p in occ2.items()}
        self.head_of = {
            e: (ci, (s - rot_by[ci]) % 4) for e, (ci, s) in head_of.items()
        }
        self._incoming = {p: False for places in self._occ.values() for p in places}
        for e, p in self.head_of.items():
            self._incoming[p] = True
        self.comps = self._walk_components()
        self.signs = tuple(self._sign(ci) for ci in range(len(self.crossings)))

    # -- construction helpers -------------------------------------------

    @staticmethod
    def _walk(crossings, occ, start_edge, head_side):
        """Walk a component as [(edge, head_occurrence_index)]."""
        e, h = start_edge, head_side
        seq = []
        while True:
            seq.append((e, h))
            ci, s = occ[e][h]
            out = (ci, (s + 2) % 4)
            f = crossings[ci][out[1]]
            places = occ[f]
            hf = 1 if places[0] == out else 0
            e, h = f, hf
            if (e, h) == seq[0]:
                return seq

    def _orient(self, crossings, occ, comps, heads):
        """Return {edge: head occurrence (ci, slot)}; loops excluded."""
        if heads is not None:
            for e, p in heads.items():
                if p not in occ.get(e, ()):
                    raise InconsistentOrientation(f"head {p} is not an endpoint of {e}")
            if set(heads) != set(occ):
                raise InconsistentOrientation("heads must cover every edge")
            return dict(heads)

        seen = set()
        walks = []
        for e in sorted(occ):
            if e in seen:
                continue
            seq = self._walk(crossings, occ, e, 0)
            seen.update(x for x, _ in seq)
            walks.append((e, seq))

        def rooting_votes(seq):
            v = 0
            for e, h in seq:
                s = occ[e][h][1]
                if s == 0:
                    v += 1
                elif s == 2:
                    v -= 1
            return v

        given = None
        if comps is not None:
            loops_set = set(self.loops)
            given = [
                tuple(int(x) for x in comp)
                for comp in comps
                if not (len(comp) == 1 and int(comp[0]) in loops_set)
            ]

        head_of = {}

        def commit(seq):
            for e, h in seq:
                head_of[e] = occ[e][h]

        used = set()
        for start, fwd_seq in walks:
            fwd = [x for x, _ in fwd_seq]
            rev_seq = self._walk(crossings, occ, start, 1)
            rev = [x for x, _ in rev_seq]
            chosen = None
            if given is not None:
                match = None
                for idx, comp in enumerate(given):
                    if idx not in used and set(comp) == set(fwd):
                        match = idx
                        break
                if match is None:
                    raise InconsistentOrientation(f"no orientation list covers edge {start}")
                used.add(match)
                comp = given[match]
                fwd_ok = _cyclic_equal(comp, fwd)
                rev_ok = _cyclic_equal(comp, rev)
                if fwd_ok and not rev_ok:
                    chosen = fwd_seq
                elif rev_ok and not fwd_ok:
                    chosen = rev_seq
                elif not fwd_ok and not rev_ok:
                    raise InconsistentOrientation(
                        f"orientation list {comp} is not a traversal"
                    )
            if chosen is None:
                # undetermined: fall back to the rooting of the tuples
                chosen = fwd_seq if rooting_votes(fwd_seq) >= rooting_votes(rev_seq) else rev_seq
            commit(chosen)
        if given is not None and len(used) != len(given):
            raise InconsistentOrientation("unused orientation list")
        return head_of

    def _walk_components(self):
        comps = []
        seen = set()
        for e in sorted(self._occ):
            if e in seen:
                continue
            h = self._occ[e].index(self.head_of[e])
            seq = [x for x, _ in self._walk(self.crossings, self._occ, e, h)]
            seen.update(seq)
            m = seq.index(min(seq))
            comps.append(tuple(seq[m:] + seq[:m]))
        for l in self.loops:
            comps.append((l,))
        return tuple(sorted(comps))

    def _sign(self, ci: int) -> int:
        # positive iff the over-strand runs slot 3 -> slot 1
        return 1 if self._incoming[(ci, 3)] else -1

    # -- basic data ------------------------------------------------------

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @property
    def writhe(self) -> int:
        return self.n_plus - self.n_minus

    @property
    def n_components(self) -> int:
        return len(self.comps)

    @property
    def edges(self) -> tuple:
        return tuple(sorted(set(self._occ) | set(self.loops)))

    def incoming(self, ci: int, slot: int) -> bool:
        return self._incoming[(ci, slot)]

    def edge_occurrences(self, e: int) -> tuple:
        return self._occ.get(e, ())

    def max_edge(self) -> int:
        es = self.edges
        return max(es) if es else -1

    def __eq__(self, other):
        return (
            isinstance(other, Diagram)
            and self.crossings == other.crossings
            and self.loops == other.loops
            and self.head_of == other.head_of
        )

    def __hash__(self):
        return hash((self.crossings, self.loops, tuple(sorted(self.head_of.items()))))

    def __repr__(self):
        return f"Diagram({self.pd_string()!r})"

    # -- resolutions -------------------------------------------------------

    def resolve(self, state: Sequence[int]) -> ResolvedDiagram:
        state = tuple(state)
        if len(state) != self.n_crossings:
            raise ParseError("resolution state length mismatch")
        edges = self.edges
        parent = {e: e for e in edges}
        for ci, c in enumerate(self.crossings):
            a, b, cc, d = c
            if state[ci] == 0:
                _uf_union(parent, a, b)
                _uf_union(parent, cc, d)
            else:
                _uf_union(parent, a, d)
                _uf_union(parent, b, cc)
        groups: dict = {}
        for e in edges:
            groups.setdefault(_uf_find(parent, e), []).append(e)
        circles = sorted(tuple(sorted(g)) for g in groups.values())
        index = {}
        for i, circ in enumerate(circles):
            for e in circ:
                index[e] = i
        incidence = []
        for ci, c in enumerate(self.crossings):
            a, b, cc, d = c
            if state[ci] == 0:
                incidence.append((index[a], index[cc]))
            else:
                incidence.append((index[a], index[b]))
        return ResolvedDiagram(tuple(circles), tuple(incidence))

    # -- diagram operations -------------------------------------------------

    def mirror(self) -> "Diagram":
        new_cross = []
        slot_map = []
        for c, s in zip(self.crossings, self.signs):
            a, b, cc, d = c
            if s > 0:
                new_cross.append((d, a, b, cc))
                slot_map.append(lambda sl: (sl + 1) % 4)
            else:
                new_cross.append((b, cc, d, a))
                slot_map.append(lambda sl: (sl - 1) % 4)
        heads = {e: (ci, slot_map[ci](sl)) for e, (ci, sl) in self.head_of.items()}
        return Diagram(new_cross, self.loops, heads=heads)

    def disjoint_union(self, other: "Diagram") -> "Diagram":
        off = self.max_edge() + 1
        nc = len(self.crossings)
        cross = list(self.crossings) + [tuple(e + off for e in c) for c in other.crossings]
        loops = list(self.loops) + [l + off for l in other.loops]
        heads = dict(self.head_of)
        heads.update({e + off: (ci + nc, s) for e, (ci, s) in other.head_of.items()})
        return Diagram(cross, loops, heads=heads)

    def reverse_component(self, comp_index: int) -> "Diagram":
        comp = set(self.comps[comp_index])
        heads = {}
        for e, p in self.head_of.items():
            if e in comp:
                places = self._occ[e]
                heads[e] = places[1] if places[0] == p else places[0]
            else:
                heads[e] = p
        return Diagram(self.crossings, self.loops, heads=heads)

    # -- text format -------------------------------------------------------

    def pd_string(self) -> str:
        inner = []
        if self.loops:
            inner.append(f"n_circles={len(self.loops)}")
        xs = ", ".join("X(%d,%d,%d,%d)" % c for c in self.crossings)
        if xs:
            inner.append(xs)
        s = "PD[" + "; ".join(inner) + "]"
        for comp in self.comps:
            if len(comp) == 1 and comp[0] in self.loops:
                continue
            s += " O[" + ">".join(str(e) for e in comp) + "]"
        return s


def _cyclic_equal(a, b):
    if len(a) != len(b):
        return False
    if not a:
        return True
    bb = list(b) + list(b)
    la = list(a)
    n = len(a)
    for i in range(n):
        if bb[i : i + n] == la:
            return True
    return False


_PD_RE = re.compile(r"PD\[(.*?)\]", re.S)
_X_RE = re.compile(r"X\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)")
_O_RE = re.compile(r"O\[([^\]]*)\]")
_NC_RE = re.compile(r"n_circles\s*=\s*(\d+)")


def parse_pd(text: str) -> Diagram:
    """Parse the PD text grammar; the inverse of Diagram.pd_string."""
    m = _PD_RE.search(text)
    if not m:
        raise ParseError("no PD[...] block found")
    body = m.group(1)
    ncm = _NC_RE.search(body)
    n_circles = int(ncm.group(1)) if ncm else 0
    crossings = [tuple(int(g) for g in x) for x in _X_RE.findall(body)]
    known = _X_RE.sub("", _NC_RE.sub("", body))
    if re.sub(r"[\s;,]", "", known):
        raise ParseError(f"unparsed PD content: {known.strip()!r}")
    comps = []
    for om in _O_RE.finditer(text):
        items = [p for p in om.group(1).split(">") if p.strip() != ""]
        try:
            comps.append(tuple(int(p) for p in items))
        except ValueError as exc:
            raise ParseError(f"bad orientation list {om.group(1)!r}") from exc
    used = set()
    for c in crossings:
        used.update(c)
    loops = []
    nxt = (max(used) + 1) if used else 0
    for _ in range(n_circles):
        loops.append(nxt)
        nxt += 1
    return Diagram(crossings, loops, comps=comps if comps else None)


# -- stock diagrams ---------------------------------------------------------


def unknot() -> Diagram:
    """The 0-crossing unknot diagram."""
    return Diagram((), loops=(0,))


def unlink(n: int) -> Diagram:
    return Diagram((), loops=tuple(range(n)))


def torus_2_strand(q: int) -> Diagram:
    """Closure of the 2-braid with |q| half twists; q < 0 gives all-negative
    crossings (torus_2_strand(-(2k+1)) is the T*_{2,2k+1} input diagram,
    crossings ordered top to bottom)."""
    if q == 0:
        return unlink(2)
    n = abs(q)
    a = list(range(n))
    b = [n + i for i in range(n)]
    cross = []
    for i in range(n):
        j = (i + 1) % n
        if q < 0:
            cross.append((b[i], a[i], a[j], b[j]))
        else:
            cross.append((a[i], a[j], b[j], b[i]))
    return Diagram(cross)


def braid_closure(n_strands: int, word) -> Diagram:
    """Close up the braid given by ``word`` on ``n_strands`` strands.

    Letters are nonzero integers: +i crosses strands i, i+1 (1-based)
    with the right strand over (a positive crossing for downward flow),
    -i with the left strand over.
    """
    if not word:
        return unlink(n_strands)
    pos = list(range(n_strands))  # current edge at each position
    nxt = n_strands
    crossings = []
    touched = set()
    for s in word:
        if s == 0 or abs(s) >= n_strands:
            raise ParseError(f"bad braid letter {s}")
        i = abs(s) - 1
        e_l, e_r = pos[i], pos[i + 1]
        bl, br = nxt, nxt + 1
        nxt += 2
        if s > 0:
            crossings.append((e_l, bl, br, e_r))
        else:
            crossings.append((e_r, e_l, bl, br))
        pos[i], pos[i + 1] = bl, br
        touched.update({i, i + 1})
    # close up: the final edge at each touched position is the initial one
    rename = {}
    for j in sorted(touched):
        rename[pos[j]] = j
    fixed = [tuple(rename.get(e, e) for e in c) for c in crossings]
    loops = tuple(j for j in range(n_strands) if j not in touched)
    return Diagram(fixed, loops)


def hopf(sign: int = 1) -> Diagram:
    """The standard Hopf link diagram: positive (sign=+1) or negative."""
    return torus_2_strand(2 if sign > 0 else -2)


def trefoil(sign: int = -1) -> Diagram:
    return torus_2_strand(3 if sign > 0 else -3)
