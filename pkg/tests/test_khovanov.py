import random

from khoco.diagram import hopf, torus_2_strand, unknot, unlink
from khoco.khovanov import (
    BigradedHomology,
    ChainMap,
    FrobeniusParams,
    build_cube,
    homology,
    reduce,
)
from khoco.linalg import AbelianGroup

Z = AbelianGroup(1)
Z2 = AbelianGroup(0, (2,))


def bg(d):
    return BigradedHomology({k: AbelianGroup(*v) if isinstance(v, tuple) else v
                             for k, v in d.items()})


class TestBuildCube:
    def test_unknot(self):
        c = build_cube(unknot())
        assert c.total_dim() == 2
        assert sorted(c.qdeg.values()) == [-1, 1]
        assert not c.diff

    def test_hopf_generator_counts(self):
        c = build_cube(hopf(+1))
        assert [c.dim(h) for h in (0, 1, 2)] == [4, 4, 4]
        c.check_d_squared()
        c.check_q_degrees()

    def test_trefoil_support(self):
        c = build_cube(torus_2_strand(-3))
        assert c.degrees() == [-3, -2, -1, 0]
        c.check_d_squared()
        c.check_q_degrees()

    def test_d_squared_deformed(self):
        for h, t in [(1, 0), (0, 1), (2, -1)]:
            c = build_cube(torus_2_strand(-3), FrobeniusParams(h, t))
            c.check_d_squared()
            c.check_q_degrees()


class TestHomology:
    def test_unknot(self):
        assert homology(build_cube(unknot())) == bg({(0, 1): Z, (0, -1): Z})

    def test_unlink2(self):
        got = homology(build_cube(unlink(2)))
        assert got == bg({(0, 2): Z, (0, 0): AbelianGroup(2), (0, -2): Z})

    def test_positive_hopf(self):
        got = homology(build_cube(hopf(+1)))
        assert got == bg({(0, 0): Z, (0, 2): Z, (2, 4): Z, (2, 6): Z})

    def test_negative_trefoil(self):
        got = homology(build_cube(torus_2_strand(-3)))
        want = bg({(0, -1): Z, (0, -3): Z, (-2, -5): Z, (-2, -7): Z2, (-3, -9): Z})
        assert got == want

    def test_negative_t25(self):
        got = homology(build_cube(torus_2_strand(-5)))
        want = bg({
            (0, -3): Z, (0, -5): Z,
            (-2, -7): Z, (-2, -9): Z2,
            (-3, -11): Z,
            (-4, -11): Z, (-4, -13): Z2,
            (-5, -15): Z,
        })
        assert got == want

    def test_reduce_route_equals_direct_route(self):
        for q in (-3, 2, -4):
            c = build_cube(torus_2_strand(q))
            assert homology(c, reduce_first=True) == homology(c, reduce_first=False)

    def test_lee_type_deformation_rank(self):
        # at (0,1) the homology of a knot collapses to total rank 2
        c = build_cube(torus_2_strand(-3), FrobeniusParams(0, 1))
        got = homology(c)
        assert got.total().free_rank == 2

    def test_bar_natan_type_deformation(self):
        c = build_cube(torus_2_strand(-3), FrobeniusParams(1, 0))
        got = homology(c)
        assert got.total().free_rank == 2


class TestReduce:
    def test_unknot_unchanged(self):
        c = build_cube(unknot())
        small, f, g = reduce(c)
        assert small.total_dim() == 2
        assert f.compose(g) == ChainMap.identity(small)

    def test_trefoil_small_complex(self):
        c = build_cube(torus_2_strand(-3))
        small, f, g = reduce(c)
        assert small.total_dim() == 6
        assert small.dim(0) == 2 and small.dim(-2) == 2 and small.dim(-3) == 2
        # the surviving differential is a single U-block of matrix [[0,0],[2,0]]
        m = small.matrix(-3)
        vals = sorted(abs(v) for v in m.entries.values())
        assert vals == [2]
        # no unit entries anywhere
        for h in small.degrees():
            for v in small.diff.get(h, {}).values():
                assert abs(v) != 1

    def test_t25_small_complex(self):
        small, _, _ = reduce(build_cube(torus_2_strand(-5)))
        assert small.total_dim() == 10

    def test_fg_identities(self):
        for q, (h, t) in [(-3, (0, 0)), (2, (0, 1)), (-4, (1, 0))]:
            c = build_cube(torus_2_strand(q), FrobeniusParams(h, t))
            small, f, g = reduce(c)
            f.verify()
            g.verify()
            assert f.compose(g) == ChainMap.identity(small)
            small.check_d_squared()

    def test_homology_preserved_random(self):
        rng = random.Random(1)
        for _ in range(10):
            q = rng.choice([-5, -4, -3, -2, 2, 3, 4])
            h = rng.randint(-2, 2)
            t = rng.randint(-2, 2)
            c = build_cube(torus_2_strand(q), FrobeniusParams(h, t))
            small, _, _ = reduce(c)
            assert homology(small, reduce_first=False) == homology(c, reduce_first=False)


class TestChainMap:
    def test_identity_and_compose(self):
        c = build_cube(hopf(+1))
        i = ChainMap.identity(c)
        assert i.compose(i) == i
        assert i.measured_bidegree() == (0, 0)

    def test_chain_identity_checked(self):
        c = build_cube(torus_2_strand(-3))
        small, f, g = reduce(c)
        gf = g.compose(f)
        gf.verify()
        assert not gf.is_zero()
