import pytest

from khoco import scomplex as sc
from khoco.linalg import AbelianGroup, LaurentPoly

U = sc.U_poly()


class TestSComplex:
    def test_torus_validates(self):
        for k in range(7):
            sc.torus_scomplex(k).validate()

    def test_trivial_complex(self):
        sc.torus_scomplex(0).validate()

    def test_relation_violation_detected(self):
        s = sc.torus_scomplex(2)
        bad = sc.SComplex(2, s.z4_grades, s.v, s.v, s.delta1, s.delta2)
        with pytest.raises(sc.RelationViolated):
            bad.validate()

    def test_perturbed_delta1_stays_valid_when_d_zero(self):
        # with d = delta2 = 0 the mixed relation is vacuous, so changing
        # delta1 keeps the complex valid
        s = sc.torus_scomplex(1)
        d1 = sc.LMap(1, 1, {(0, 0): U + 1})
        sc.SComplex(1, s.z4_grades, s.d, s.v, d1, s.delta2).validate()

    def test_grades(self):
        s = sc.torus_scomplex(3)
        assert s.z4_grades == (1, 3, 1)

    def test_delta1_v_pattern(self):
        s = sc.torus_scomplex(3)
        for i in range(1, 4):
            for j in range(1, 5):
                vec = s.v.power_apply({i - 1: sc.R_ONE}, j - 1)
                val = s.delta1.apply(vec).get(0, sc.R_ZERO)
                assert val == (U ** i if j == i else sc.R_ZERO)

    def test_evaluate_lemma(self):
        # delta1 v^{i-1}(sum a_i zeta^i) = a_i U^i
        s = sc.torus_scomplex(3)
        a = [LaurentPoly({1: 2}), LaurentPoly(3), U]
        vec = {i: a[i] for i in range(3)}
        for i in range(1, 4):
            out = s.delta1.apply(s.v.power_apply(dict(vec), i - 1)).get(0, sc.R_ZERO)
            assert out == a[i - 1] * U ** i


class TestSharp:
    def test_dsquared(self):
        for k in (0, 1, 3):
            sc.sharp_complex(sc.torus_scomplex(k)).check()

    @pytest.mark.parametrize("k", range(6))
    def test_homology_at_T1(self, k):
        g = sc.sharp_homology_at_T1(sc.torus_scomplex(k))
        assert g["0"] == AbelianGroup(k + 2, tuple([2] * k))
        assert g["1"] == AbelianGroup(k)

    def test_unknot_case(self):
        g = sc.sharp_homology_at_T1(sc.torus_scomplex(0))
        assert g["0"] == AbelianGroup(2) and g["1"].is_trivial


class TestMorphisms:
    def test_identity_height_zero_strong(self):
        s = sc.torus_scomplex(2)
        ident = sc.SMorphism(s, s, sc.LMap.identity(2), sc.LMap.zero(2, 2),
                             sc.LMap.zero(1, 2), sc.LMap.zero(2, 1), sc.R_ONE, 0)
        ident.validate()
        hc = sc.height_check(ident, 0)
        assert hc["is_height_i"] and hc["is_strong"]

    def test_zero_morphism_constants(self):
        s = sc.torus_scomplex(2)
        zero = sc.SMorphism(s, s, sc.LMap.zero(2, 2), sc.LMap.zero(2, 2),
                            sc.LMap.zero(1, 2), sc.LMap.zero(2, 1), sc.R_ZERO, 0)
        for j in range(4):
            assert sc.c_constants(zero, j).is_zero()

    @pytest.mark.parametrize("k,s_plus", [(1, 0), (1, 1), (2, 1), (3, 2), (5, 5)])
    def test_model_c_pattern(self, k, s_plus):
        m = sc.model_morphism(k, s_plus, tail=[0] * (k - s_plus))
        for j in range(s_plus):
            assert sc.c_constants(m, j).is_zero()
        assert sc.c_constants(m, s_plus) == U ** s_plus

    def test_model_not_strong_over_laurent(self):
        m = sc.model_morphism(2, 1, tail=[0])
        hc = sc.height_check(m, 1)
        assert hc["is_height_i"] and not hc["is_strong"]

    def test_model_with_unit_c0_strong(self):
        m = sc.model_morphism(1, 0, tail=[1])
        hc = sc.height_check(m, 0)
        assert hc["is_height_i"] and hc["is_strong"]

    def test_composite_multiplies_leading_constants(self):
        mt = sc.model_morphism_from_trefoil(3, 1, tail=[0])
        m1 = sc.model_morphism(1, 1)
        comp = mt.compose(m1)
        assert sc.c_constants(comp, 2) == U ** 2
        assert sc.c_constants(comp, 0).is_zero()
        assert sc.c_constants(comp, 1).is_zero()

    def test_trefoil_model_lands_in_grading1(self):
        m = sc.model_morphism_from_trefoil(3, 1, tail=[0])
        vec = m.tilde_matrix().apply({0: sc.R_ONE})
        n = m.target.rank
        assert all(idx < n for idx in vec)


class TestZ2Reduction:
    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_report(self, k):
        rep = sc.z2_reduction_check(sc.torus_scomplex(k))
        assert rep["mod2_split"]
        assert rep["rank_grading0"] == k + 1
        assert rep["rank_grading1"] == k
        assert rep["unknot_family_free_basis"]
        assert rep["trefoil_family_free_basis"]


class TestHat:
    def test_iota_examples(self):
        s = sc.torus_scomplex(2)
        small, large = sc.hat_small(s, window=4)
        assert small.iota(sc.HatElement({1: 1}, {})) == {-2: U * U}
        assert small.iota(sc.HatElement({}, {3: 1})) == {3: sc.R_ONE}

    def test_x_action(self):
        s = sc.torus_scomplex(2)
        small, _ = sc.hat_small(s, window=4)
        el = small.x_action(sc.HatElement({1: 1}, {}))
        assert el.alpha == {0: U} and not el.poly
        # x on the polynomial part shifts and records delta1
        el2 = small.x_action(sc.HatElement({0: 1}, {0: 1}))
        assert el2.poly == {0: U, 1: sc.R_ONE}

    def test_window_too_small(self):
        s = sc.torus_scomplex(2)
        small, _ = sc.hat_small(s, window=2)
        with pytest.raises(sc.WindowTooSmall):
            small.x_action(sc.HatElement({}, {1: 1}))

    def test_x_commutes_with_differential(self):
        s = sc.torus_scomplex(3)
        small, _ = sc.hat_small(s, window=5)
        el = sc.HatElement({2: U, 0: 1}, {0: 1, 1: 2})
        lhs = small.differential(small.x_action(el))
        rhs = small.x_action(small.differential(el))
        # d = 0 on torus complexes, so both vanish in the alpha part
        assert lhs.alpha == {} == rhs.alpha


class TestSpecialCycles:
    def test_torus_generators(self):
        s = sc.torus_scomplex(3)
        _, large = sc.hat_small(s, window=5)
        for i in (1, 2, 3):
            z = large.psi_hat(sc.HatElement({i - 1: 1}, {}))
            assert sc.special_cycle_check(z, i, U ** i, s, window=5)
            assert not sc.special_cycle_check(z, i, U ** (i + 1), s, window=5)

    def test_constant_cycle(self):
        s = sc.torus_scomplex(2)
        _, large = sc.hat_small(s, window=4)
        z = large.psi_hat(sc.HatElement({}, {0: 1}))
        assert sc.special_cycle_check(z, 0, sc.R_ONE, s, window=4)

    @pytest.mark.parametrize("k,s_plus", [(2, 1), (3, 2), (3, 3)])
    def test_morphism_image(self, k, s_plus):
        m = sc.model_morphism(k, s_plus, tail=[0] * (k - s_plus))
        src = sc.torus_scomplex(0)
        _, large0 = sc.hat_small(src, window=k + 2)
        z = large0.psi_hat(sc.HatElement({}, {0: 1}))
        tgt = sc.torus_scomplex(k)
        _, large_t = sc.hat_small(tgt, window=k + 2)
        frak = large_t.phi_hat(large_t.apply_morphism(m, z))
        z2 = large_t.psi_hat(frak)
        ci = sc.c_constants(m, s_plus)
        assert sc.special_cycle_check(z2, s_plus, ci, tgt, window=k + 2)


class TestSerialization:
    def test_json(self):
        import json

        s = sc.torus_scomplex(2)
        data = sc.scomplex_json(s)
        assert json.dumps(data, sort_keys=True)
        assert data["rank"] == 2
