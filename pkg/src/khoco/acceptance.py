"""The acceptance suite: one callable per criterion, used both by
``khoco selftest`` and by tests/test_acceptance.py.

Each criterion function returns (ok, detail).  Everything here is an
exact check; tolerances do not appear anywhere in the library.
"""

from __future__ import annotations

import random
import time

from . import cobordism as cob
from . import scomplex as sc
from . import spectral as sp
from . import torus as tor
from .diagram import braid_closure, hopf, torus_2_strand, unknot
from .khovanov import (
    ChainMap,
    FrobeniusParams,
    build_cube,
    homology,
    reduce as kh_reduce,
)
from .linalg import AbelianGroup, LaurentPoly


def criterion_1_torus_tables():
    """Kh_{0,0}(T*_{2,2k+1}) equals the small-complex homology, with the
    stated total group, for k = 1..4."""
    for k in range(1, 5):
        big = homology(build_cube(torus_2_strand(-(2 * k + 1))))
        small = homology(tor.expected_structure(k), reduce_first=False)
        if big != small:
            return False, f"bigraded tables differ at k={k}"
        expected_total = AbelianGroup(2 * k + 2, tuple([2] * k))
        if big.total() != expected_total:
            return False, f"total group differs at k={k}"
    return True, "bigraded tables and totals match for k=1..4"


def criterion_2_hopf_generators():
    """Kh(H) is free of rank 4 in the stated bigradings; the zeta
    cycles sit where they should; F(zeta_i) = f_i exactly."""
    kh = homology(build_cube(hopf(+1)))
    want = {(0, 0): AbelianGroup(1), (0, 2): AbelianGroup(1),
            (2, 4): AbelianGroup(1), (2, 6): AbelianGroup(1)}
    if kh.groups != want:
        return False, "Kh(H^+) bigradings are wrong"
    z0m, z1m = cob.zeta(0, -1), cob.zeta(1, -1)
    z0p, z1p = cob.zeta(0, +1), cob.zeta(1, +1)
    if z0m.is_zero() or z1m.is_zero() or z0m.bigrading != (-2, -4) or z1m.bigrading != (0, 0):
        return False, "zeta cycles in CKh(H^-) are misplaced"
    if z0p.bigrading != (0, 2) or z1p.bigrading != (2, 6):
        return False, "zeta cycles in CKh(H^+) are misplaced"
    # the homology classes generate: rank-4 check through X-multiples
    for d, sign, (z0, z1) in ((hopf(+1), -1, (z0m, z1m)), (hopf(-1), +1, (z0p, z1p))):
        c = build_cube(d)
        c2 = build_cube(cob.apply_crossing_change(d, 0))
        f0 = cob.crossing_change_map(c, c2, 0, "f0")
        f1 = cob.crossing_change_map(c, c2, 0, "f1")
        if cob.hopf_surgery_map(z0, c, 0, sign) != f0:
            return False, f"F(zeta_0) != f_0 on side {sign}"
        if cob.hopf_surgery_map(z1, c, 0, sign) != f1:
            return False, f"F(zeta_1) != f_1 on side {sign}"
    h_diag, _ = cob.hopf_standard(-1)
    ch = build_cube(h_diag)
    ranks = sum(g.free_rank for g in homology(ch).groups.values())
    if ranks != 4:
        return False, "Kh(H^-) total rank is not 4"
    return True, "Kh(H) rank 4 in place; F(zeta_i) = f_i exactly on both sides"


def criterion_3_degree_table():
    """Measured bidegrees (f0^+, f0^-, f1^+, f1^-) = ((0,0), (-2,-6),
    (2,4), (0,-2))."""
    out = {}
    for d, label in ((hopf(+1), "-"), (hopf(-1), "+")):
        c = build_cube(d)
        c2 = build_cube(cob.apply_crossing_change(d, 0))
        for variant in ("f0", "f1"):
            m = cob.crossing_change_map(c, c2, 0, variant)
            out[variant + label] = m.measured_bidegree()
    want = {"f0+": (0, 0), "f0-": (-2, -6), "f1+": (2, 4), "f1-": (0, -2)}
    ok = out == want
    return ok, f"measured {out}"


def criterion_4_move_calculus():
    """cc-rm1/cc-rm2 on the nose; cc-rm3 homotopies from the solver;
    twist and finger composites at (h,t) in {(0,0),(1,0),(0,1)}."""
    D = torus_2_strand(-3)
    for ht in ((0, 0), (1, 0), (0, 1)):
        p = FrobeniusParams(*ht)
        c = build_cube(D, p)
        for side in ("R", "L"):
            # cc-rm1: R1+ = f0+ . R1-
            Dm, ci = cob.apply_r1(D, 0, -1, side)
            Dp, ci2 = cob.apply_r1(D, 0, +1, side)
            if cob.apply_crossing_change(Dm, ci) != Dp:
                return False, "kink rewrites disagree"
            cm, cp = build_cube(Dm, p), build_cube(Dp, p)
            r1m = cob._retract_map(c, cm, (ci,), True)
            r1p = cob._retract_map(c, cp, (ci2,), True)
            f0 = cob.crossing_change_map(cm, cp, ci, "f0")
            if f0.compose(r1m) != r1p:
                return False, f"cc-rm1 fails at {ht} side {side}"
            # twist moves
            r1p_inv = cob._retract_map(c, cp, (ci,), False)
            f1 = cob.crossing_change_map(cm, cp, ci, "f1")
            if r1p_inv.compose(f0.compose(r1m)) != ChainMap.identity(c):
                return False, f"forward twist i=0 not Id at {ht}"
            if not r1p_inv.compose(f1.compose(r1m)).is_zero():
                return False, f"forward twist i=1 not 0 at {ht}"
            Dp2, cj = cob.apply_r1(D, 0, +1, side)
            cp2 = build_cube(Dp2, p)
            Dm2 = cob.apply_crossing_change(Dp2, cj)
            cm2 = build_cube(Dm2, p)
            r1p2 = cob._retract_map(c, cp2, (cj,), True)
            r1m_inv = cob._retract_map(c, cm2, (cj,), False)
            g0 = cob.crossing_change_map(cp2, cm2, cj, "f0")
            g1 = cob.crossing_change_map(cp2, cm2, cj, "f1")
            if not r1m_inv.compose(g0.compose(r1p2)).is_zero():
                return False, f"reverse twist i=0 not 0 at {ht}"
            psi_u = cob.psi_endo(c, (0, 0))
            rc1 = r1m_inv.compose(g1.compose(r1p2))
            if not rc1.equals_up_to_sign(psi_u):
                return False, f"reverse twist i=1 not +-(2X-h) at {ht}"
        # cc-rm2: the R2 square commutes on the nose for i = 0, 1
        u, w = 0, 3
        D1, (y1, y2), (m_u, m_w, _u2, _w2) = cob.apply_r2(D, u, w, True)
        c1 = build_cube(D1, p)
        rho = cob._retract_map(c, c1, (y1, y2), True, local={m_u, m_w})
        x = y1 if D1.signs[y1] > 0 else y2
        Dx = cob.apply_crossing_change(D, 0)
        # change an original crossing (index 0) before/after the poke
        Dxp, (z1, z2), (n_u, n_w, _a, _b) = cob.apply_r2(Dx, u, w, True)
        cx = build_cube(Dx, p)
        cxp = build_cube(Dxp, p)
        rho_x = cob._retract_map(cx, cxp, (z1, z2), True, local={n_u, n_w})
        D1x = cob.apply_crossing_change(D1, 0)
        if D1x != Dxp:
            return False, "R2/crossing-change rewrites do not commute"
        for i in ("f0", "f1"):
            top = cob.crossing_change_map(c, cx, 0, i)
            bot = cob.crossing_change_map(c1, cxp, 0, i)
            if bot.compose(rho) != rho_x.compose(top):
                return False, f"cc-rm2 square fails for {i} at {ht}"
        # finger moves
        pos = y1 if D1.signs[y1] > 0 else y2
        neg = y2 if pos == y1 else y1
        results = {}
        for i in (0, 1):
            for j in (0, 1):
                Da = cob.apply_crossing_change(D1, pos)
                ca = build_cube(Da, p)
                fi = cob.crossing_change_map(c1, ca, pos, f"f{i}")
                Db = cob.apply_crossing_change(Da, neg)
                cb2 = build_cube(Db, p)
                fj = cob.crossing_change_map(ca, cb2, neg, f"f{j}")
                rinv = cob._retract_map(c, cb2, (y1, y2), False, local={m_u, m_w})
                results[(i, j)] = rinv.compose(fj.compose(fi.compose(rho)))
        phi = cob.phi_endo(c, (u, w))
        psi = cob.psi_endo(c, (u, w))
        if not (results[(0, 0)].is_zero() and results[(1, 1)].is_zero()):
            return False, f"finger move diagonal not 0 at {ht}"
        mixed = [results[(0, 1)], results[(1, 0)]]
        if not (
            (mixed[0].equals_up_to_sign(phi) and mixed[1].equals_up_to_sign(psi))
            or (mixed[0].equals_up_to_sign(psi) and mixed[1].equals_up_to_sign(phi))
        ):
            return False, f"finger move mixed cases wrong at {ht}"
    # cc-rm3 on a 4-crossing instance (at (0,0))
    D = braid_closure(3, [1, 2, 1, -2])
    Dp = cob.apply_r3(D, (0, 1, 2), 2)
    Dc = cob.apply_crossing_change(D, 3)
    Dpc = cob.apply_crossing_change(Dp, 3)
    c, cp, cc_, cpc = map(build_cube, (D, Dp, Dc, Dpc))
    r3_top = cob.r3_map(c, cp, (0, 1, 2), 2)
    r3_bot = cob.r3_map(cc_, cpc, (0, 1, 2), 2)
    for i in ("f0", "f1"):
        for (ftop, fbot, a, b) in (
            (cob.crossing_change_map(c, cc_, 3, i),
             cob.crossing_change_map(cp, cpc, 3, i), r3_bot, r3_top),
            (cob.crossing_change_map(cc_, c, 3, i),
             cob.crossing_change_map(cpc, cp, 3, i), r3_top, r3_bot),
        ):
            lhs = a.compose(ftop)
            rhs = fbot.compose(b)
            if cob.chain_homotopic(lhs, rhs) is None:
                return False, f"cc-rm3 homotopy not found for {i}"
    return True, "cc-rm1/2 exact, cc-rm3 homotopies found, twist and finger laws hold"


def criterion_5_genus1_movie():
    """The embedded genus-1 movie equals f_1^- and its reverse equals
    f_0^+ f_1^- f_0^+, on the nose."""
    D = hopf(+1)
    cD = build_cube(D)
    Dm = cob.apply_crossing_change(D, 0)
    cDm = build_cube(Dm)
    f1m = cob.crossing_change_map(cD, cDm, 0, "f1")
    mv = cob.Movie(D).genus1_crossing_change(0)
    F, ledger = cob.assemble(mv, preset="low")
    iso = cob.identify_complexes(F.target, cDm)
    if iso.compose(F) != f1m:
        return False, "genus-1 movie differs from f_1^-"
    if (ledger.chi, ledger.s_minus, ledger.s_plus) != (-2, 0, 0):
        return False, "genus-1 ledger wrong"
    # reverse: from D^-, same capping recipe with the opposite kinks
    f0p = cob.crossing_change_map(cDm, cD, 0, "f0")
    rhs = f0p.compose(f1m.compose(f0p))
    mv2 = cob.Movie(Dm).genus1_reverse(0)
    G, _ = cob.assemble(mv2, preset="low")
    iso2 = cob.identify_complexes(G.target, cD)
    if iso2.compose(G) != rhs:
        return False, "reverse movie differs from f_0^+ f_1^- f_0^+"
    return True, "both chain-level identities hold on the nose"


def criterion_6_theorem_T2q(k_max: int = 3):
    """Theorem parts 1 and 2 for all admissible (k, s_minus), k <= 3."""
    for k in range(1, k_max + 1):
        for s in range(k + 1):
            r = tor.verify_T2q_part1(k, s)
            if not r["pass"]:
                return False, f"part 1 fails at (k,s)=({k},{s}): {r}"
        for s in range(k):
            r = tor.verify_T2q_part2(k, s)
            if not r["pass"]:
                return False, f"part 2 fails at (k,s)=({k},{s}): {r}"
    return True, f"surjectivity and bijectivity verified for k <= {k_max}"


def criterion_7_spectral(k_max: int = 2):
    """Spectral engine on T*_{2,2k+1} at (0,1) and (1,0), k <= 2."""
    for k in range(1, k_max + 1):
        d = torus_2_strand(-(2 * k + 1))
        kh00 = homology(build_cube(d))
        for ht in ((0, 1), (1, 0)):
            p = FrobeniusParams(*ht)
            f = sp.quantum_filtration(build_cube(d, p))
            pg1 = sp.page(f, 1)
            for q in sorted({key[1] for key in kh00.groups}):
                tot = AbelianGroup(0)
                for (hh, qq), g in kh00.groups.items():
                    if qq == q:
                        tot = tot.direct_sum(g)
                if pg1.groups.get(q, AbelianGroup(0)) != tot:
                    return False, f"E^1 != Kh_00 at q={q}, k={k}, ht={ht}"
            h_total = f.homology()
            rmax = f.max_page()
            pginf = sp.page(f, rmax)
            if pginf.rank_total() != h_total.free_rank or h_total.free_rank != 2:
                return False, f"rank E^infty wrong at k={k}, ht={ht}"
            first = None
            for r0 in range(rmax + 2):
                if sp.degenerates_at(f, r0):
                    first = r0
                    break
            if first is None:
                return False, "no degeneration below the stable page"
            for r0 in range(first + 1):
                crit = sp.degeneration_criterion(f, r0)
                direct = sp.degenerates_at(f, r0)
                if crit and not direct:
                    return False, f"criterion contradicts direct check at r0={r0}"
            if not sp.degeneration_criterion(f, first):
                return False, f"criterion false at the degeneration page k={k} ht={ht}"
            rep = sp.einfty_vs_graded(f, first)
            if not rep["all_equal"]:
                return False, f"E^infty != graded pieces at k={k}, ht={ht}"
    return True, "E^1 identification, ranks, criterion and convergence all hold"


def criterion_8_scomplex():
    """Validation, sharp homology, c_j symbolics, free-basis claims."""
    u = sc.U_poly()
    for k in range(7):
        sc.torus_scomplex(k).validate()
    for k in range(6):
        g = sc.sharp_homology_at_T1(sc.torus_scomplex(k))
        if g["0"] != AbelianGroup(k + 2, tuple([2] * k)) or g["1"] != AbelianGroup(k):
            return False, f"sharp homology wrong at k={k}"
    for k in range(1, 6):
        for s_plus in range(k + 1):
            m = sc.model_morphism(k, s_plus, tail=[0] * (k - s_plus))
            for j in range(s_plus):
                if not sc.c_constants(m, j).is_zero():
                    return False, f"c_{j} nonzero below the height at (k,s+)=({k},{s_plus})"
            if sc.c_constants(m, s_plus) != u ** s_plus:
                return False, f"c_i wrong at (k,s+)=({k},{s_plus})"
    for k in range(1, 5):
        rep = sc.z2_reduction_check(sc.torus_scomplex(k))
        if not (rep["mod2_split"] and rep["unknot_family_free_basis"]
                and rep["trefoil_family_free_basis"]):
            return False, f"free-basis claims fail at k={k}"
    return True, "S-complex relations, sharp homology, c_j and free bases verified"


def _random_diagram(rng: random.Random, max_crossings: int = 7):
    strands = rng.choice((2, 3, 4))
    n = rng.randint(1, max_crossings)
    word = [rng.choice((1, -1)) * rng.randint(1, strands - 1) for _ in range(n)]
    return braid_closure(strands, word)


def criterion_9_property_suite(n_diagrams: int = 200, n_pairs: int = 20,
                               seed: int = 2026):
    """d^2 = 0 and reduce-preserves-homology on a random corpus;
    Reidemeister pairs compose to homotopy inverses."""
    rng = random.Random(seed)
    for trial in range(n_diagrams):
        d = _random_diagram(rng)
        p = FrobeniusParams(rng.randint(-2, 2), rng.randint(-2, 2))
        c = build_cube(d, p)
        c.check_d_squared()
        c.check_q_degrees()
        small, f, g = kh_reduce(c)
        small.check_d_squared()
        if f.compose(g) != ChainMap.identity(small):
            return False, f"f.g != id on trial {trial}"
        if homology(small, reduce_first=False) != homology(c, reduce_first=False):
            return False, f"reduce changed homology on trial {trial}"
    for trial in range(n_pairs):
        d = _random_diagram(rng, max_crossings=4)
        c = build_cube(d)
        kind = rng.choice(("r1", "r2"))
        if kind == "r1":
            edge = rng.choice(d.edges)
            sign = rng.choice((1, -1))
            side = rng.choice(("R", "L"))
            d2, ci = cob.apply_r1(d, edge, sign, side)
            c2 = build_cube(d2)
            fwd = cob._retract_map(c, c2, (ci,), True)
            back = cob._retract_map(c, c2, (ci,), False)
        else:
            e1, e2 = rng.sample(list(d.edges), 2) if len(d.edges) >= 2 else (d.edges[0], d.edges[0])
            if e1 == e2:
                continue
            d2, ys, (m_u, m_w, _u, _w) = cob.apply_r2(d, e1, e2, rng.choice((True, False)))
            c2 = build_cube(d2)
            fwd = cob._retract_map(c, c2, ys, True, local={m_u, m_w})
            back = cob._retract_map(c, c2, ys, False, local={m_u, m_w})
        if back.compose(fwd) != ChainMap.identity(c):
            return False, f"move inverse not left-identity on pair trial {trial}"
        h = cob.chain_homotopic(fwd.compose(back), ChainMap.identity(c2))
        if h is None:
            return False, f"move pair not homotopy-inverse on pair trial {trial}"
    return True, f"{n_diagrams} diagrams and {n_pairs} move pairs verified"


CRITERIA = [
    ("1 torus homology tables", criterion_1_torus_tables),
    ("2 Hopf generators and surgery", criterion_2_hopf_generators),
    ("3 crossing change degree table", criterion_3_degree_table),
    ("4 move calculus", criterion_4_move_calculus),
    ("5 genus-1 movie identities", criterion_5_genus1_movie),
    ("6 theorem on torus knots", criterion_6_theorem_T2q),
    ("7 spectral engine", criterion_7_spectral),
    ("8 S-complex suite", criterion_8_scomplex),
    ("9 property suite", criterion_9_property_suite),
]


def run_all(fast: bool = False) -> bool:
    ok_all = True
    for name, fn in CRITERIA:
        t0 = time.time()
        if fn is criterion_9_property_suite and fast:
            ok, detail = fn(n_diagrams=25, n_pairs=8)
        elif fn is criterion_6_theorem_T2q and fast:
            ok, detail = fn(k_max=2)
        else:
            ok, detail = fn()
        status = "PASS" if ok else "FAIL"
        print(f"{status} criterion {name}: {detail} [{time.time() - t0:.1f}s]")
        ok_all = ok_all and ok
    return ok_all
