import pytest

from khoco.diagram import (
    DanglingEdge,
    Diagram,
    InconsistentOrientation,
    ParseError,
    hopf,
    parse_pd,
    torus_2_strand,
    trefoil,
    unknot,
    unlink,
)


class TestParsing:
    def test_hopf_counts(self):
        d = hopf(+1)
        assert d.n_plus == 2 and d.n_minus == 0
        assert d.n_components == 2
        assert d.n_crossings == 2

    def test_reversed_component_flips_signs(self):
        d = hopf(+1).reverse_component(0)
        assert d.n_plus == 0 and d.n_minus == 2

    def test_trefoil(self):
        d = torus_2_strand(-3)
        assert d.n_minus == 3 and d.n_plus == 0
        assert d.n_components == 1

    def test_roundtrip(self):
        for d in [hopf(1), hopf(-1), torus_2_strand(-5), unlink(2), unknot()]:
            assert parse_pd(d.pd_string()) == d

    def test_parse_with_orientation_lists(self):
        d = hopf(+1)
        text = d.pd_string()
        assert "O[" in text
        assert parse_pd(text).signs == (1, 1)

    def test_dangling(self):
        with pytest.raises(DanglingEdge):
            Diagram([(0, 1, 2, 3)])

    def test_bad_orientation_list(self):
        d = hopf(+1)
        base = d.pd_string().split(" O[")[0]
        with pytest.raises(InconsistentOrientation):
            parse_pd(base + " O[0>1>2>3]")

    def test_parse_error(self):
        with pytest.raises(ParseError):
            parse_pd("nothing here")
        with pytest.raises(ParseError):
            parse_pd("PD[X(0,1,2)]")


class TestResolve:
    def test_hopf_states(self):
        d = hopf(+1)
        # oriented resolution of an all-positive diagram is the all-0 state
        assert d.resolve((0, 0)).circle_count == 2
        assert d.resolve((0, 1)).circle_count == 1
        assert d.resolve((1, 0)).circle_count == 1
        assert d.resolve((1, 1)).circle_count == 2

    def test_one_crossing_kink(self):
        d = torus_2_strand(-1)
        assert d.n_components == 1
        assert d.n_minus == 1
        # oriented resolution of a negative crossing is the 1-smoothing
        assert d.resolve((1,)).circle_count == 2
        assert d.resolve((0,)).circle_count == 1

    def test_partition_property(self):
        import itertools

        for d in [hopf(1), torus_2_strand(-3), torus_2_strand(4)]:
            for state in itertools.product((0, 1), repeat=d.n_crossings):
                r = d.resolve(state)
                all_edges = sorted(e for c in r.circles for e in c)
                assert all_edges == list(d.edges)

    def test_single_bit_flip_changes_circles_by_one(self):
        import itertools

        for d in [hopf(1), torus_2_strand(-5), trefoil(1)]:
            n = d.n_crossings
            for state in itertools.product((0, 1), repeat=n):
                c0 = d.resolve(state).circle_count
                for i in range(n):
                    flipped = list(state)
                    flipped[i] ^= 1
                    c1 = d.resolve(flipped).circle_count
                    assert abs(c0 - c1) == 1


class TestOperations:
    def test_mirror_involution(self):
        for d in [hopf(1), torus_2_strand(-3), torus_2_strand(5)]:
            assert d.mirror().mirror() == d

    def test_mirror_signs(self):
        d = torus_2_strand(-3)
        m = d.mirror()
        assert m.n_plus == 3 and m.n_minus == 0
        assert d.writhe == -m.writhe

    def test_mirror_hopf(self):
        assert hopf(1).mirror().n_minus == 2

    def test_disjoint_union(self):
        d = unknot().disjoint_union(unknot())
        assert d.n_components == 2 and d.n_crossings == 0
        e = torus_2_strand(-3).disjoint_union(hopf(1))
        assert e.n_minus == 3 and e.n_plus == 2
        assert e.n_components == 3

    def test_union_with_empty(self):
        empty = Diagram(())
        d = torus_2_strand(-3)
        assert d.disjoint_union(empty).n_crossings == 3
        assert d.disjoint_union(empty).comps == d.comps

    def test_torus_knot_vs_link(self):
        assert torus_2_strand(-5).n_components == 1
        assert torus_2_strand(-4).n_components == 2
        assert torus_2_strand(2).n_components == 2
