import logging

import pytest

from fflab.errors import (PreconditionViolated, WrongCharacteristic, SingularModel,
                          UnsupportedCharacteristic, SizeOverflow)
from fflab.ff_core import build_field
from fflab.counting import p_m_bruteforce, system_count
from fflab.charsum import kloosterman_integer
from fflab.classnum import kronecker_H
from fflab.curves import (PlaneCubic, WeierstrassModel, CubicModel, PointCount, count_points,
                          is_singular, system_curve, p3_via_curve, singular_case_p3,
                          to_char3_form, reduced_char3_form, j_invariant, is_supersingular,
                          twist_relation, kloosterman_via_curve, weierstrass_classes,
                          deuring_census)

@pytest.fixture
def f3():
    return build_field("3")

@pytest.fixture
def f5():
    return build_field("5")

class Test_point_counts(object):
    def test_examples(self, f3, f5):
        assert count_points(CubicModel(f5, 1)).total == 9
        assert count_points(CubicModel(f5, 2)).total == 3
        assert count_points(CubicModel(f3, 1)) == PointCount(3, -1)
    @pytest.mark.parametrize("spec", ["2", "4", "5", "8", "9", "7"])
    def test_fast_path_matches_plane_count(self, spec):
        ctx = build_field(spec)
        models = [WeierstrassModel(ctx, a1=1, a3=c) for c in range(1, ctx.q)]
        models += [WeierstrassModel(ctx, a2=1, a4=ctx.gamma, a6=c) for c in range(ctx.q)]
        models += [WeierstrassModel(ctx, a1=ctx.gamma, a3=1, a6=c) for c in range(ctx.q)]
        for model in models:
            assert count_points(model) == count_points(model.to_plane_cubic())
    @pytest.mark.parametrize("spec", ["7", "9", "11", "16"])
    def test_hasse_weil(self, spec):
        ctx = build_field(spec)
        for c in range(1, ctx.q):
            model = CubicModel(ctx, c)
            if not is_singular(model):
                assert count_points(model).hasse_weil_holds(ctx.q)
    def test_errors(self):
        with pytest.raises(PreconditionViolated):
            CubicModel(build_field("5"), 0)
        with pytest.raises(SizeOverflow):
            count_points(CubicModel(build_field("2^17"), 1))

class Test_singularity(object):
    def test_char5(self, f5):
        # 1/27 = 3 in F_5
        assert is_singular(CubicModel(f5, 3))
        assert CubicModel(f5, 3).singular_by_formula()
        assert not is_singular(CubicModel(f5, 1))
    def test_char3_never_singular(self):
        ctx = build_field("9")
        assert not any(is_singular(CubicModel(ctx, c)) for c in range(1, 9))
    @pytest.mark.parametrize("spec", ["2", "4", "7", "8", "13"])
    def test_formula_matches_search(self, spec):
        ctx = build_field(spec)
        for c in range(1, ctx.q):
            model = CubicModel(ctx, c)
            assert is_singular(model) == model.singular_by_formula()
    def test_plane_cubic(self, f5):
        # the nodal cubic y^2 z = x^3 + x^2 z
        F = PlaneCubic(f5, {(0, 2, 1): 1, (3, 0, 0): 4, (2, 0, 1): 4})
        assert is_singular(F)
        assert F.derivative(1).terms == {(0, 1, 1): 2}

class Test_cubic_counting(object):
    @pytest.mark.parametrize("spec", ["2", "3", "4", "5", "7", "8", "9"])
    def test_p3_via_curve(self, spec):
        ctx = build_field(spec)
        for a in range(1, ctx.q):
            for b in range(1, ctx.q):
                assert p3_via_curve(ctx, a, b) == p_m_bruteforce(ctx, 3, a, b)
    def test_p3_examples(self, f3, f5):
        assert p3_via_curve(f5, 1, 1) == 3
        assert p3_via_curve(f3, 1, 1) == 1
        assert p3_via_curve(build_field("4"), 1, 1) == 1
        with pytest.raises(PreconditionViolated):
            p3_via_curve(f5, 0, 1)
    @pytest.mark.parametrize("spec,expected", [("2", 1), ("4", 1), ("5", 2), ("7", 2), ("8", 3),
                                               ("16", 5)])
    def test_singular_case(self, spec, expected):
        ctx = build_field(spec)
        third = ctx.inv(ctx.scalar(3))
        for a in range(1, ctx.q):
            assert singular_case_p3(ctx, a) == expected
            if ctx.q <= 8:
                b = ctx.pow(ctx.mul(a, third), 3)
                assert p_m_bruteforce(ctx, 3, a, b) == expected
    def test_singular_case_errors(self, f3, f5):
        with pytest.raises(WrongCharacteristic):
            singular_case_p3(f3, 1)
        with pytest.raises(PreconditionViolated):
            singular_case_p3(f5, 0)
    @pytest.mark.parametrize("spec", ["3", "4", "5", "7"])
    def test_system_curve(self, spec):
        ctx = build_field(spec)
        for c0 in range(1, ctx.q):
            assert count_points(system_curve(ctx, c0)).total == system_count(ctx, 3, c0) + 3
    def test_system_curve_example(self, f5):
        assert count_points(system_curve(f5, 1)).total == 9

class Test_char3(object):
    @pytest.mark.parametrize("spec", ["3", "9", "27"])
    def test_char3_form_preserves_count(self, spec):
        ctx = build_field(spec)
        for c in range(1, ctx.q):
            model = CubicModel(ctx, c)
            assert count_points(to_char3_form(model)) == count_points(model)
    def test_char3_form_example(self, f3):
        assert to_char3_form(CubicModel(f3, 1)) == WeierstrassModel(f3, a2=1, a6=2)
        with pytest.raises(WrongCharacteristic):
            to_char3_form(CubicModel(build_field("5"), 1))
    def test_j_invariant(self, f3):
        assert j_invariant(WeierstrassModel(f3, a2=1, a6=2)) == 1
        f9 = build_field("9")
        assert j_invariant(WeierstrassModel(f9, a2=2, a6=1)) == 1
        assert j_invariant(WeierstrassModel(f3, a4=1, a6=1)) == 0
    def test_reduced_form(self):
        f9 = build_field("9")
        model = WeierstrassModel(f9, a1=1, a3=f9.gamma)
        red = reduced_char3_form(model)
        assert red.a1 == red.a3 == red.a4 == 0
        assert count_points(red) == count_points(model)
    def test_singular_models(self, f3):
        with pytest.raises(SingularModel):
            j_invariant(WeierstrassModel(f3, a2=1))
        with pytest.raises(SingularModel):
            j_invariant(WeierstrassModel(f3, a6=1))
    @pytest.mark.parametrize("spec", ["3", "9", "27"])
    def test_supersingular_iff_trace_divisible(self, spec):
        ctx = build_field(spec)
        for a in range(ctx.q):
            for b in range(1, ctx.q):
                for a4 in (0, 1):
                    model = WeierstrassModel(ctx, a2=a, a4=a4 if a == 0 else 0, a6=b)
                    if a == 0 and a4 == 0:
                        continue
                    t = count_points(model).trace_t
                    assert is_supersingular(model) == (t % 3 == 0)
    def test_supersingular_example(self, f3):
        model = WeierstrassModel(f3, a4=1, a6=1)
        assert is_supersingular(model)
        assert count_points(model).trace_t == 0
    def test_twist_examples(self, f3):
        assert twist_relation(f3, 1, 2) == (3, 3)
        assert twist_relation(f3, 2, 1) == (5, 3)
        with pytest.raises(SingularModel):
            twist_relation(f3, 0, 1)
    def test_twist_relation(self):
        ctx = build_field("9")
        for a in range(1, 9):
            for b in range(1, 9):
                E, X = twist_relation(ctx, a, b)
                if ctx.is_square(a):
                    assert E == X
                else:
                    assert E + X == 2 * (ctx.q + 1)
    @pytest.mark.parametrize("spec", ["3", "9", "27"])
    def test_kloosterman_via_curve(self, spec):
        ctx = build_field(spec)
        for c in range(1, ctx.q):
            assert kloosterman_via_curve(ctx, c) == kloosterman_integer(ctx, 1, c)
    def test_kloosterman_examples(self, f3):
        assert kloosterman_via_curve(f3, 1) == -1
        assert kloosterman_via_curve(f3, 2) == 2
        with pytest.raises(WrongCharacteristic):
            kloosterman_via_curve(build_field("4"), 1)

class Test_deuring(object):
    def test_example(self, f5):
        assert deuring_census(f5, 2) == 2
    @pytest.mark.parametrize("spec", ["5", "7", "11", "13"])
    def test_matches_class_numbers(self, spec):
        ctx = build_field(spec)
        q = ctx.q
        t = 1
        while t * t < 4 * q:
            for s in (t, -t):
                if s % ctx.p:
                    assert deuring_census(ctx, s) == kronecker_H(s * s - 4 * q)
            t += 1
    def test_classes_partition(self):
        ctx = build_field("7")
        classes = weierstrass_classes(ctx)
        assert sum(c.size for c in classes) == ctx.q * (ctx.q - 1)
        assert all(c.trace_t ** 2 <= 4 * ctx.q for c in classes)
        assert classes == weierstrass_classes(ctx)
    def test_inadmissible_trace(self, f5, caplog):
        with caplog.at_level(logging.WARNING, logger="fflab.curves"):
            assert deuring_census(f5, 5) == 0
        assert "not admissible" in caplog.text
    def test_characteristic(self, f3):
        with pytest.raises(UnsupportedCharacteristic):
            deuring_census(f3, 1)
        with pytest.raises(UnsupportedCharacteristic):
            weierstrass_classes(build_field("4"))
