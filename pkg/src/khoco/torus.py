"""Closed-form structures and verification harnesses for the negative
(2, 2k+1) torus knots.

``expected_structure`` builds the small complex

    (+) over i = 1..k of  [A --U--> A]  in degrees (-2i-1, -2i),
    plus a top copy of A in degree 0,

with U = 2X - h represented by [[-h, 2t], [2, h]] on the basis {1, X};
its homology reproduces the brute-force cube computation.  ``gbar``
returns the inclusion-like maps between consecutive small complexes,
``unknot_movie`` builds the immersed/embedded movies from the unknot,
and the two ``verify`` harnesses check that the movie maps hit the
stated homology in the stated degrees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

from . import cobordism as cob
from .diagram import Diagram, torus_2_strand, trefoil, unknot
from .khovanov import (
    ChainMap,
    FrobeniusParams,
    KhComplex,
    build_cube,
    homology,
    image_subgroup,
    induced_homology_map,
)
from .linalg import AbelianGroup


def expected_structure(k: int, p: FrobeniusParams = FrobeniusParams()) -> KhComplex:
    """The small complex homotopy-equivalent to CKh(T*_{2,2k+1})."""
    if k < 1:
        raise ValueError("k must be positive")
    gens: dict = {}
    qdeg: dict = {}
    diff: dict = {}
    for i in range(1, k + 1):
        h_src = -2 * i - 1
        q_src = -2 * k - 4 * i - 1
        src1, srcx = f"b{i}.1", f"b{i}.x"
        tgt1, tgtx = f"t{i}.1", f"t{i}.x"
        gens[h_src] = [src1, srcx]
        gens[h_src + 1] = [tgt1, tgtx]
        qdeg[src1] = q_src
        qdeg[srcx] = q_src - 2
        qdeg[tgt1] = q_src + 2
        qdeg[tgtx] = q_src
        # U = 2X - h on {1, X}: columns are images of (1, X)
        blk = {}
        if p.h:
            blk[(0, 0)] = -p.h
            blk[(1, 1)] = p.h
        blk[(1, 0)] = 2
        if p.t:
            blk[(0, 1)] = 2 * p.t
        diff[h_src] = blk
    gens[0] = ["a.1", "a.x"]
    qdeg["a.1"] = -2 * k + 1
    qdeg["a.x"] = -2 * k - 1
    return KhComplex(p, gens, qdeg, diff, diagram=None, shifts=(0, 2 * k + 1))


@dataclass
class GbarPair:
    """The two chain maps TorusSmall(k) -> TorusSmall(k+1)."""

    k: int
    g0: ChainMap
    g1: ChainMap


def gbar(k: int, p: FrobeniusParams = FrobeniusParams()) -> GbarPair:
    """g1 is the right-aligned identity inclusion (bidegree (0, -2));
    g0 shifts every block one step down and carries the top copy of A
    onto the first quotient slot (bidegree (-2, -6))."""
    src = expected_structure(k, p)
    tgt = expected_structure(k + 1, p)

    def name_index(c, h, name):
        return c.index_of(h, name)

    g1_blocks: dict = {}
    for h in src.degrees():
        blk = {}
        for j, g in enumerate(src.gens[h]):
            blk[(name_index(tgt, h, g), j)] = 1
        g1_blocks[h] = blk
    g1 = ChainMap(src, tgt, g1_blocks, 0, check=False)
    g1.verify()

    g0_blocks: dict = {}
    for h in src.degrees():
        blk = {}
        for j, g in enumerate(src.gens[h]):
            if g.startswith("a."):
                tgt_name = "t1.1" if g.endswith(".1") else "t1.x"
            else:
                kind, suffix = g.split(".")
                idx = int(kind[1:]) + 1
                tgt_name = f"{kind[0]}{idx}.{suffix}"
            blk[(name_index(tgt, h - 2, tgt_name), j)] = 1
        g0_blocks[h] = blk
    g0 = ChainMap(src, tgt, g0_blocks, -2, check=False)
    g0.verify()
    return GbarPair(k, g0, g1)


class BadPattern(Exception):
    pass


def unknot_movie(k: int, pattern: Sequence[str], s_check: Optional[int] = None) -> cob.Movie:
    """The movie U_1 -> T*_{2,2k+1}: a negative kink, then k full-twist
    insertions, each an R2 poke followed by either the embedded genus-1
    step or a crossing change.

    ``pattern`` entries are "embedded" or "crossing_change" (or "e"/"c").
    """
    pattern = [x[0] for x in pattern]
    if len(pattern) != k or any(x not in ("e", "c") for x in pattern):
        raise BadPattern("pattern must have length k over {embedded, crossing_change}")
    if s_check is not None and pattern.count("c") != s_check:
        raise BadPattern("s_check does not count the crossing_change entries")
    mv = cob.Movie(unknot())
    mv.r1(0, -1, "R")
    _twist_steps(mv, pattern)
    return mv


def trefoil_movie(k: int, pattern: Sequence[str]) -> cob.Movie:
    """The movie T*_{2,3} -> T*_{2,2k+1} with k-1 full-twist insertions."""
    pattern = [x[0] for x in pattern]
    if len(pattern) != k - 1 or any(x not in ("e", "c") for x in pattern):
        raise BadPattern("pattern must have length k-1")
    mv = cob.Movie(torus_2_strand(-3))
    _twist_steps(mv, pattern)
    return mv


def _twist_steps(mv: cob.Movie, pattern):
    for step in pattern:
        d = mv.end
        last = d.n_crossings - 1
        _a, _b, c_e, d_e = d.crossings[last]
        mv.r2(c_e, d_e, True)
        pos = [i for i, s in enumerate(mv.end.signs) if s > 0][0]
        if step == "c":
            mv.crossing_change(pos)
        else:
            mv.genus1_crossing_change(pos)
    return mv


def verify_T2q_part1(k: int, s_minus: int,
                     p: FrobeniusParams = FrobeniusParams()) -> dict:
    """Theorem check: phi^low of a genus (k - s_minus) movie with s_minus
    negative double points surjects Kh^0(U_1) onto Kh^{-2 s_minus}."""
    if not (0 <= s_minus <= k):
        raise BadPattern("need 0 <= s_minus <= k")
    pattern = ["e"] * (k - s_minus) + ["c"] * s_minus
    mv = unknot_movie(k, pattern)
    f, ledger = cob.assemble(mv, p, preset="low")
    img, tgt_group, surj = image_subgroup(f, 0)
    expected = AbelianGroup(2) if s_minus == 0 else AbelianGroup(1, (2,))
    return {
        "claim": "T2q-part1",
        "k": k,
        "s_minus": s_minus,
        "expected_group": expected.to_json(),
        "target_group": tgt_group.to_json(),
        "image_group": img.to_json(),
        "ledger": ledger.to_json(),
        "pass": bool(surj and tgt_group == expected and ledger.s_minus == s_minus),
    }


def verify_T2q_part2(k: int, s_minus: int,
                     p: FrobeniusParams = FrobeniusParams()) -> dict:
    """Theorem check: phi^low restricted to Kh^{-3}(T*_{2,3}) = Z is a
    bijection onto Kh^{-2 s_minus - 3}(T*_{2,2k+1}) = Z."""
    if not (0 <= s_minus <= k - 1):
        raise BadPattern("need 0 <= s_minus <= k - 1")
    pattern = ["e"] * (k - 1 - s_minus) + ["c"] * s_minus
    mv = trefoil_movie(k, pattern)
    f, ledger = cob.assemble(mv, p, preset="low")
    src, tgt, mat = induced_homology_map(f, -3)
    bijective = (
        src.group == AbelianGroup(1)
        and tgt.group == AbelianGroup(1)
        and abs(mat[0, 0]) == 1
    )
    return {
        "claim": "T2q-part2",
        "k": k,
        "s_minus": s_minus,
        "source_group": src.group.to_json(),
        "target_group": tgt.group.to_json(),
        "matrix_entry": mat[0, 0] if mat.rows and mat.cols else 0,
        "ledger": ledger.to_json(),
        "pass": bool(bijective),
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True)
