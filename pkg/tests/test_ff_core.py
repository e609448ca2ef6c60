import itertools

import numpy as np
import pytest

from fflab.errors import (FFLabError, NonPrime, ReducibleModulus, NonPrimitiveModulusRoot,
                          SizeOverflow, ZeroHasNoLog, PreconditionViolated)
from fflab.ff_core import (FieldSpec, build_field, build_tower, field_trace, field_norm,
                           discrete_log, solve_norm_congruence, default_modulus)

@pytest.fixture
def f4():
    return build_field("2^2:1,1,1")

@pytest.fixture
def f9():
    return build_field("3^2")

class Test_FieldSpec(object):
    def test_parse_power(self):
        assert FieldSpec.parse("3^2") == FieldSpec(3, 2)
        assert FieldSpec.parse("3^2:1,1,2") == FieldSpec(3, 2, (1, 1, 2))
    def test_parse_bare_q(self):
        assert FieldSpec.parse("7") == FieldSpec(7, 1)
        assert FieldSpec.parse("64") == FieldSpec(2, 6)
        assert FieldSpec.parse(25).q == 25
    def test_parse_errors(self):
        with pytest.raises(NonPrime):
            FieldSpec.parse("6")
        with pytest.raises(FFLabError):
            FieldSpec.parse("3^x")
    def test_str(self):
        assert str(FieldSpec(2, 2, (1, 1, 1))) == "2^2:1,1,1"
        assert str(FieldSpec(5)) == "5^1"

class Test_build_field(object):
    def test_prime_field_gamma(self):
        assert build_field(FieldSpec(3, 1)).gamma == 2
        assert build_field("5").gamma == 3
    def test_f4(self, f4):
        g = f4.gamma
        assert g == 2
        assert f4.mul(g, g) == f4.add(g, 1)
        assert f4.pow(g, 3) == 1
    def test_default_modulus(self):
        assert default_modulus(3, 2) == (1, 1, 2)
        assert default_modulus(2, 2) == (1, 1, 1)
        assert build_field("3^2").modulus == (1, 1, 2)
    def test_reducible(self):
        with pytest.raises(ReducibleModulus):
            build_field("2^2:1,0,1")
    def test_not_primitive(self):
        # x^2 + 1 is irreducible over F_3 but its root has order 4
        with pytest.raises(NonPrimitiveModulusRoot):
            build_field("3^2:1,0,1")
    def test_non_prime(self):
        with pytest.raises(NonPrime):
            build_field(FieldSpec(4, 1))
    def test_size_overflow(self):
        with pytest.raises(SizeOverflow):
            build_field(FieldSpec(2, 21))
    def test_bad_modulus_shape(self):
        with pytest.raises(FFLabError):
            build_field("3^2:1,1")
    def test_deterministic(self):
        assert build_field("3^3") is build_field(FieldSpec(3, 3))
        assert default_modulus(5, 2) == default_modulus(5, 2)

@pytest.mark.parametrize("spec", ["2", "3", "2^3", "3^2", "5^2", "2^4", "7"])
def test_table_invariants(spec):
    ctx = build_field(spec)
    exp = ctx.exp_table
    assert len(set(exp.tolist())) == ctx.q - 1
    assert (ctx.log_table[exp] == np.arange(ctx.q - 1)).all()
    for i, j in itertools.product(range(ctx.order), repeat=2):
        assert ctx.mul(int(exp[i]), int(exp[j])) == exp[(i + j) % ctx.order]

@pytest.mark.parametrize("spec", ["3^2", "5^2", "3^3", "2^3"])
def test_scalar_matches_vector(spec):
    ctx = build_field(spec)
    x, y = (a.ravel() for a in np.meshgrid(ctx.elements(), ctx.elements()))
    assert [ctx.add(int(a), int(b)) for a, b in zip(x, y)] == ctx.vadd(x, y).tolist()
    assert [ctx.sub(int(a), int(b)) for a, b in zip(x, y)] == ctx.vsub(x, y).tolist()
    assert [ctx.mul(int(a), int(b)) for a, b in zip(x, y)] == ctx.vmul(x, y).tolist()
    assert [ctx.neg(int(a)) for a in ctx.elements()] == ctx.vneg(ctx.elements()).tolist()
    assert [ctx.pow(int(a), 5) for a in ctx.elements()] == ctx.vpow(ctx.elements(), 5).tolist()

class Test_arithmetic(object):
    def test_inverse(self, f9):
        for x in f9.nonzero():
            assert f9.mul(int(x), f9.inv(int(x))) == 1
        with pytest.raises(ZeroHasNoLog):
            f9.inv(0)
        with pytest.raises(ZeroHasNoLog):
            f9.vinv(f9.elements())
    def test_trace_and_eta(self, f9):
        assert f9.trace(0) == 0
        # trace of 1 in F_9 over F_3 is 2
        assert f9.trace(1) == 2
        assert sum(f9.eta(int(x)) for x in f9.nonzero()) == 0
        assert f9.is_square(f9.pow(f9.gamma, 2)) and not f9.is_square(f9.gamma)
    def test_relative_trace(self):
        ctx = build_field("2^4")
        tw = build_tower("2^2", 2)
        assert tw.top.modulus == ctx.modulus
        for x in ctx.elements():
            assert tw.embed(tw.trace(int(x))) == ctx.relative_trace(int(x), 2)
        with pytest.raises(PreconditionViolated):
            ctx.relative_trace(1, 3)
    def test_element_strings(self, f9):
        assert f9.element("g") == f9.gamma
        assert f9.element("g^2") == f9.mul(f9.gamma, f9.gamma)
        assert f9.element("-1") == 2
        assert f9.element("7") == 7
        with pytest.raises(FFLabError):
            f9.element("9")
        with pytest.raises(FFLabError):
            f9.element("h")
    def test_digits(self, f9):
        assert f9.digits(7).tolist() == [1, 2]
        assert f9.from_digits([1, 2]) == 7

class Test_tower(object):
    def test_f4_over_f2(self):
        tw = build_tower("2", 2)
        g = tw.top.gamma
        assert field_trace(tw, g) == 1
        assert field_trace(tw, 1) == 0
        assert field_trace(tw, 0) == 0
        assert field_norm(tw, g) == 1
        assert tw.g == 1
    def test_trivial(self):
        tw = build_tower("7", 1)
        for x in tw.top.elements():
            assert tw.trace(int(x)) == x
            assert tw.norm(int(x)) == x
    def test_f9_over_f3(self):
        tw = build_tower("3", 2)
        assert field_norm(tw, tw.top.gamma) == 2
    def test_f125_over_f5(self):
        tw = build_tower("5", 3)
        assert tw.base_gamma_exponent == 31
        assert tw.norm(tw.top.gamma) == tw.g
        assert len({tw.base.pow(tw.g, k) for k in range(4)}) == 4
    def test_subfield(self):
        tw = build_tower("2^2", 3)
        sub = [int(y) for y in tw.top.elements() if tw.top.pow(int(y), 4) == y]
        assert sorted(sub) == sorted(tw.embed_table.tolist())
        with pytest.raises(PreconditionViolated):
            tw.restrict(tw.top.gamma)
    @pytest.mark.parametrize("base,t", [("2", 3), ("3", 2), ("2^2", 2), ("5", 2), ("3", 3)])
    def test_surjectivity(self, base, t):
        tw = build_tower(base, t)
        q = tw.base_q
        assert (np.bincount(tw.trace_table, minlength=q) == q ** (t - 1)).all()
        fibres = np.bincount(tw.norm_table[1:], minlength=q)
        assert fibres[0] == 0
        assert (fibres[1:] == (q ** t - 1) // (q - 1)).all()
    def test_embed_is_homomorphism(self):
        tw = build_tower("3^2", 2)
        base, top = tw.base, tw.top
        for x, y in itertools.product(range(base.q), repeat=2):
            assert tw.embed(base.add(x, y)) == top.add(tw.embed(x), tw.embed(y))
            assert tw.embed(base.mul(x, y)) == top.mul(tw.embed(x), tw.embed(y))
    def test_size_overflow(self):
        with pytest.raises(SizeOverflow):
            build_tower("2^11", 2)

class Test_discrete_log(object):
    def test_examples(self, f9):
        assert discrete_log(f9, 1) == 0
        assert discrete_log(f9, f9.gamma) == 1
        assert discrete_log(f9, f9.mul(f9.pow(f9.gamma, 5), f9.pow(f9.gamma, 6))) == 3
    def test_zero(self, f9):
        with pytest.raises(ZeroHasNoLog):
            discrete_log(f9, 0)

class Test_solve_norm_congruence(object):
    def test_m_equals_t(self):
        tw = build_tower("7", 2)
        for b in tw.base.nonzero():
            sol = solve_norm_congruence(tw, 2, int(b))
            assert sol.d == 1 and sol.solvable
            assert sol.i0 == tw.ind_g(int(b))
    def test_f5_examples(self):
        tw = build_tower("5^1:1,3", 1)
        assert tw.base.gamma == 2
        sol = solve_norm_congruence(tw, 3, 2)
        assert (sol.d, sol.solvable, sol.i0) == (1, True, 3)
        sol = solve_norm_congruence(tw, 2, 2)
        assert (sol.d, sol.solvable) == (2, False)
    @pytest.mark.parametrize("base,t,m", [("5", 1, 2), ("7", 1, 3), ("7", 2, 6), ("9", 2, 4),
                                          ("4", 1, 3)])
    def test_solution_property(self, base, t, m):
        tw = build_tower(base, t)
        k = m // t
        for b in tw.base.nonzero():
            sol = solve_norm_congruence(tw, m, int(b))
            assert sol.solvable == (tw.ind_g(int(b)) % sol.d == 0)
            if sol.solvable:
                assert 0 <= sol.i0 < (tw.base_q - 1) // sol.d
                y = tw.norm(tw.top.pow(tw.top.gamma, sol.i0))
                assert tw.base.pow(y, k) == b
    def test_preconditions(self):
        tw = build_tower("5", 2)
        with pytest.raises(PreconditionViolated):
            solve_norm_congruence(tw, 3, 1)
        with pytest.raises(PreconditionViolated):
            solve_norm_congruence(tw, 4, 0)
