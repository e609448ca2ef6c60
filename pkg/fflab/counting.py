#----------------------------------------------------------------------------
# Created By  : fflab developers
# Date: 2024
# --------------------------------------------------------------------------
"""
N_t(a,b): elements x of F_{q^t}^* with tr_m(x) = a and N_m(x) = b.
P_m(a,b): irreducible x^m - a x^(m-1) + ... + (-1)^m b over F_q.

Each quantity is available through several independent routes so that
they can be checked against each other.
"""
import math
import logging
import functools
import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np
import sympy
import tqdm

from .errors import PreconditionViolated, NonIntegralResult, SizeOverflow
from .ff_core import FieldSpec, FieldCtx, build_field, build_tower, solve_norm_congruence
from .ffpoly import is_irreducible
from .charsum import (exp_sum_power, sigma_t, kloosterman_integer, tuple_sums_and_logs,
                      deligne_holds)

__all__ = ["CountInstance", "CountRecord", "BoundCheck", "BoundReport", "RadicalSum",
           "n_t_bruteforce", "n_t_formula", "system_count", "n_t_via_system",
           "p_m_bruteforce", "p_m_moebius", "p_m_closed_forms", "irreducible_census",
           "expected_irreducible_total", "bounds_report", "count_all_routes",
           "n_t_routes", "p_m_routes", "cubic_bounds", "mobius", "is_prime_power_of"]

logger = logging.getLogger(__name__)

MAX_ENUMERATION = 1 << 20

def mobius(n):
    exps = sympy.factorint(n).values()
    if any(e > 1 for e in exps):
        return 0
    return -1 if len(exps) % 2 else 1

def is_prime_power_of(m, p):
    """True iff m = p^k with k >= 1."""
    if m < p:
        return False
    while m % p == 0:
        m //= p
    return m == 1

def _exact_div(num, den, what):
    if num % den:
        raise NonIntegralResult("{}: {} is not divisible by {}".format(what, num, den))
    return num // den

def _spec_of(field_):
    if isinstance(field_, FieldCtx):
        return field_.spec
    if isinstance(field_, FieldSpec):
        return field_
    return FieldSpec.parse(field_)

@dataclass(frozen=True)
class CountInstance:
    """A point (q, m, t, a, b) of the counting problem."""
    field: FieldSpec
    m: int
    t: int
    a: int
    b: int

    def __post_init__(self):
        object.__setattr__(self, "field", _spec_of(self.field))
        if self.m < 2:
            raise PreconditionViolated("m must be at least 2, got {}".format(self.m))
        if self.t < 1 or self.m % self.t:
            raise PreconditionViolated("t={} does not divide m={}".format(self.t, self.m))
        q = self.field.q
        if not (0 <= self.a < q and 0 < self.b < q):
            raise PreconditionViolated("need a in F_q and b != 0, got a={} b={}".format(
                                       self.a, self.b))

    @property
    def ctx(self):
        return build_field(self.field)

    @property
    def q(self):
        return self.field.q

    def with_t(self, t):
        return replace(self, t=t)

    def label(self):
        return "q={},m={},t={},a={},b={}".format(self.q, self.m, self.t, self.a, self.b)

@dataclass
class CountRecord:
    instance: CountInstance
    quantity: str
    value: int
    route: str
    slack: dict = field(default_factory=dict)

# --- N_t ------------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def _joint_counts(tw, m):
    """Table [a, b] of the number of x != 0 with tr_m(x) = a, N_m(x) = b."""
    base = tw.base
    k = m // tw.t
    tr = base.vmul(base.scalar(k), tw.trace_table[1:])
    nm = base.vpow(tw.norm_table[1:], k)
    counts = np.bincount(tr * base.q + nm, minlength=base.q * base.q)
    return counts.reshape(base.q, base.q)

def n_t_bruteforce(inst):
    """Count inside F_{q^t} using tr_m = (m/t) tr_t and N_m = N_t^(m/t)."""
    tw = build_tower(inst.field, inst.t)
    return int(_joint_counts(tw, inst.m)[inst.a, inst.b])

def n_t_formula(inst):
    tw = build_tower(inst.field, inst.t)
    base, top = tw.base, tw.top
    q, Q, p = base.q, top.q, base.p
    k = inst.m // inst.t

    sol = solve_norm_congruence(tw, inst.m, inst.b)
    if not sol.solvable:
        return 0
    d = sol.d
    if k % p == 0:
        # tr_m vanishes identically, only the norm condition remains
        return d * (Q - 1) // (q - 1) if inst.a == 0 else 0
    if inst.a == 0:
        s = math.gcd(inst.t, (q - 1) // d)
        total = exp_sum_power(top, top.exp_table[sol.i0 % top.order], s).to_integer() + 1
        num = d * ((Q // q - 1) * q + (q - 1) * total)
    else:
        num = d * (Q - 1 + sigma_t(tw, inst.m, inst.a, inst.b).to_integer())
    return _exact_div(num, q * (q - 1), "N_{} for {}".format(inst.t, inst.label()))

def system_count(ctx, t, c):
    """Solutions of x_1 + ... + x_t = 1, x_1 ... x_t = c over F_q."""
    if c == 0:
        raise PreconditionViolated("c must be nonzero")
    if not 1 <= t <= 4:
        raise PreconditionViolated("system size t={} outside 1..4".format(t))
    if t == 1:
        return int(c == 1)
    if ctx.q ** (t - 1) > MAX_ENUMERATION:
        raise SizeOverflow("q^(t-1) = {}^{}".format(ctx.q, t - 1))
    sums, logs = tuple_sums_and_logs(ctx, t - 1)
    last = ctx.vsub(1, sums)
    llast = ctx.log_table[last]
    hits = (llast >= 0) & ((llast + logs) % ctx.order == ctx.log(c))
    return int(hits.sum())

def _system_constants(tw, m, a, b, sol):
    """c_i = g^((q-1)/d i + i0) a0^-t for i < d."""
    base = tw.base
    a0 = base.div(a, base.scalar(m // tw.t))
    step = base.order // sol.d
    scale = base.pow(a0, -tw.t)
    return [base.mul(base.pow(tw.g, step * i + sol.i0), scale) for i in range(sol.d)]

def n_t_via_system(inst):
    tw = build_tower(inst.field, inst.t)
    base = tw.base
    q, t, k = base.q, inst.t, inst.m // inst.t
    if inst.a == 0 or k % base.p == 0 or t > 4:
        raise PreconditionViolated("system route needs a != 0, p not dividing m/t and t <= 4")
    sol = solve_norm_congruence(tw, inst.m, inst.b)
    if not sol.solvable:
        raise PreconditionViolated("d={} does not divide ind_g({})".format(sol.d, inst.b))
    total = sum(system_count(base, t, c)
                for c in _system_constants(tw, inst.m, inst.a, inst.b, sol))
    d = sol.d
    num = d * (q ** t - 1) + (-1) ** (t - 1) * (q * (q - 1) * total - d * (q - 1) ** t)
    return _exact_div(num, q * (q - 1), "system route for {}".format(inst.label()))

# --- P_m ------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _slice_count(spec, m, a, b):
    ctx = build_field(spec)
    head = [1, ctx.neg(a)]
    tail = [b if m % 2 == 0 else ctx.neg(b)]
    count = 0
    for middle in itertools.product(range(ctx.q), repeat=m - 2):
        if is_irreducible(ctx, head + list(middle) + tail):
            count += 1
    return count

def p_m_bruteforce(ctx, m, a, b):
    """Enumerate x^m - a x^(m-1) + ... + (-1)^m b and test each for irreducibility."""
    spec = _spec_of(ctx)
    if m < 2:
        raise PreconditionViolated("m must be at least 2, got {}".format(m))
    if b == 0:
        raise PreconditionViolated("b must be nonzero")
    if spec.q ** (m - 2) > MAX_ENUMERATION:
        raise SizeOverflow("q^(m-2) = {}^{}".format(spec.q, m - 2))
    return _slice_count(spec, m, a, b)

def irreducible_census(ctx, m, progress=False):
    """
    Table [a, b] of P_m(a, b); the b = 0 column is zero.
    """
    spec = _spec_of(ctx)
    q = spec.q
    table = np.zeros((q, q), dtype=np.int64)
    pairs = [(a, b) for a in range(q) for b in range(1, q)]
    for a, b in tqdm.tqdm(pairs, desc="census q={} m={}".format(q, m), disable=not progress,
                          leave=False):
        table[a, b] = p_m_bruteforce(spec, m, a, b)
    return table

def expected_irreducible_total(q, m):
    """Monic irreducibles of degree m >= 2 (all have nonzero constant term)."""
    total = sum(mobius(t) * (q ** (m // t) - 1) for t in sympy.divisors(m))
    return _exact_div(total, m, "irreducible total for q={} m={}".format(q, m))

def p_m_moebius(ctx, m, a, b):
    """(1/m) sum over t | m of mu(t) N_(m/t)(a, b)."""
    spec = _spec_of(ctx)
    total = 0
    for t in sympy.divisors(m):
        mu = mobius(t)
        if mu:
            total += mu * n_t_formula(CountInstance(spec, m, m // t, a, b))
    return _exact_div(total, m, "Moebius sum for q={} m={} a={} b={}".format(
                      spec.q, m, a, b))

def p_m_closed_forms(ctx, m, a, b):
    """
    P_m(a, b) when an explicit formula applies, otherwise None.

    - a = 0, gcd(m, p(q-1)) = 1
    - a = 0, m a power of p
    - ab != 0, m = p^k > 2, through k_(m-2)(b / a^m)
    """
    ctx = build_field(_spec_of(ctx))
    q, p = ctx.q, ctx.p
    if a == 0:
        if math.gcd(m, p * (q - 1)) == 1:
            total = sum(mobius(m // t) * (q ** (t - 1) - 1) for t in sympy.divisors(m))
            return _exact_div(total, m * (q - 1), "closed form (gcd case)")
        if is_prime_power_of(m, p):
            total = (q ** (m - 1) - 1) // (q - 1) - (q ** (m // p) - 1) // (q - 1)
            return _exact_div(total, m, "closed form (m = p^k, a = 0)")
        return None
    if is_prime_power_of(m, p) and m > 2:
        c = ctx.div(b, ctx.pow(a, m))
        total = (q ** (m - 1) - 1) // (q - 1) + (-1) ** (m - 1) * kloosterman_integer(ctx, m - 2, c)
        return _exact_div(total, m, "closed form (m = p^k, ab != 0)")
    return None

# --- bounds -----------------------------------------------------------------

class RadicalSum(object):
    """
    sum of coeff * q^e with rational coefficients and exponents.

    Comparisons are exact: a single square root is compared by squaring,
    anything else through integer n-th root intervals refined until decided.
    """

    def __init__(self, q, terms):
        self.q = q
        self.terms = [(Fraction(c), Fraction(e)) for c, e in terms]

    @classmethod
    def constant(cls, value):
        return cls(2, [(value, 0)])

    def __float__(self):
        return float(sum(float(c) * self.q ** float(e) for c, e in self.terms))

    def _sqrt_form(self):
        """(A, B) with self = A + B sqrt(q), or None if a root of higher degree occurs."""
        A, B = Fraction(0), Fraction(0)
        for c, e in self.terms:
            if e.denominator == 1:
                A += c * Fraction(self.q) ** int(e)
            elif e.denominator == 2:
                B += c * Fraction(self.q) ** ((e.numerator - 1) // 2)
            else:
                return None
        return A, B

    def _power_interval(self, e, scale):
        num, den = e.numerator, e.denominator
        X = self.q ** abs(num)
        root, exact = sympy.integer_nthroot(X * scale ** den, den)
        lo, hi = Fraction(root, scale), Fraction(root + (0 if exact else 1), scale)
        if num < 0:
            lo, hi = 1 / hi, 1 / lo
        return lo, hi

    def ge(self, lhs):
        """True iff lhs <= self."""
        lhs = Fraction(lhs)
        form = self._sqrt_form()
        if form is not None:
            A, B = form
            L = lhs - A
            if B >= 0:
                return L <= 0 or L * L <= B * B * self.q
            return L <= 0 and L * L >= B * B * self.q
        for bits in (64, 128, 256, 512, 1024, 2048):
            scale = 1 << bits
            lo = hi = Fraction(0)
            for c, e in self.terms:
                plo, phi = self._power_interval(e, scale)
                if c >= 0:
                    lo, hi = lo + c * plo, hi + c * phi
                else:
                    lo, hi = lo + c * phi, hi + c * plo
            if lhs <= lo:
                return True
            if lhs > hi:
                return False
        raise AssertionError("radical comparison undecided at 2048 bits")

@dataclass
class BoundCheck:
    name: str
    lhs: Fraction
    rhs: RadicalSum
    holds: bool
    slack: float

    @classmethod
    def evaluate(cls, name, lhs, rhs):
        if not isinstance(rhs, RadicalSum):
            rhs = RadicalSum.constant(rhs)
        lhs = Fraction(lhs)
        return cls(name, lhs, rhs, rhs.ge(lhs), float(rhs) - float(lhs))

@dataclass
class BoundReport:
    instance: CountInstance
    checks: list

    @property
    def holds(self):
        return all(c.holds for c in self.checks)

    def names(self):
        return [c.name for c in self.checks]

    def get(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __iter__(self):
        return iter(self.checks)

def cubic_bounds(q):
    """(3 ceil((q+1-2 sqrt q)/3), 3 floor((q+1+2 sqrt q)/3)) in exact integers."""
    s = math.isqrt(4 * q)
    upper = (q + 1 + s) // 3
    if s * s == 4 * q:
        lower = -((-(q + 1 - s)) // 3)
    else:
        lower = (q - s) // 3 + 1
    return 3 * lower, 3 * upper

def _squarefree_kernel_divisors(m):
    primes = sympy.primefactors(m)
    kernel = 1
    for ell in primes:
        kernel *= ell
    return primes, kernel, sympy.divisors(kernel)

def bounds_report(inst):
    """Evaluate every inequality that applies to (q, m, a, b); N and P come from brute force."""
    from .curves import CubicModel, count_points, is_singular

    ctx = inst.ctx
    q, m, a, b, p = ctx.q, inst.m, inst.a, inst.b, ctx.p
    full = inst.with_t(m)
    N = n_t_bruteforce(full)
    P = p_m_bruteforce(ctx, m, a, b)
    checks = []

    checks.append(BoundCheck.evaluate(
        "wan", abs(m * (q - 1) * P - q ** (m - 1)),
        RadicalSum(q, [(3 * (q - 1), Fraction(m, 2))])))

    if a != 0:
        checks.append(BoundCheck.evaluate(
            "katz", abs(q * (q - 1) * N - (q ** m - 1)),
            RadicalSum(q, [(m * (q - 1), Fraction(m, 2))])))
        checks.append(BoundCheck.evaluate(
            "nonzero_trace_poly", abs(Fraction(m * P) - Fraction(q ** m - 1, q * (q - 1))),
            RadicalSum(q, [(m, Fraction(m - 2, 2)),
                           (Fraction(m, q * (q - 1)), Fraction(m, 2)),
                           (Fraction(-m, q * (q - 1)), 0),
                           (Fraction(m * m, 2), Fraction(m - 4, 4))])))
    else:
        s = math.gcd(m, q - 1)
        checks.append(BoundCheck.evaluate(
            "zero_trace_norm", abs((q - 1) * N - (q ** (m - 1) - 1)),
            RadicalSum(q, [((s - 1) * (q - 1), Fraction(m - 2, 2))])))
        checks.append(BoundCheck.evaluate(
            "zero_trace_poly", abs(Fraction(m * P) - Fraction(q ** (m - 1) - 1, q - 1)),
            RadicalSum(q, [(s - 1, Fraction(m - 2, 2)),
                           (Fraction(m, q - 1), Fraction(m, 2)),
                           (Fraction(-m, q - 1), 0)])))

    if m == 3:
        lower, upper = cubic_bounds(q)
        checks.append(BoundCheck.evaluate("cubic_lower", lower, N))
        checks.append(BoundCheck.evaluate("cubic_upper", N, upper))

    primes, kernel, kernel_divisors = _squarefree_kernel_divisors(m)
    odd = [h for h in kernel_divisors if len(sympy.primefactors(h)) % 2 == 1]
    even = [s for s in kernel_divisors if s > 1 and len(sympy.primefactors(s)) % 2 == 0]
    M1 = max(n_t_bruteforce(inst.with_t(m // h)) for h in odd)
    M2 = max((n_t_bruteforce(inst.with_t(m // s)) for s in even), default=0)
    checks.append(BoundCheck.evaluate("moebius_lower", Fraction(2 * N - M1 * kernel, 2), m * P))
    checks.append(BoundCheck.evaluate("moebius_upper", m * P,
                                      Fraction(2 * N + M2 * (kernel - 2), 2)))

    if a != 0 and is_prime_power_of(m, p) and m > 2:
        checks.append(BoundCheck.evaluate(
            "p_power_norm", abs((q - 1) * N - (q ** (m - 1) - 1)),
            RadicalSum(q, [((m - 1) * (q - 1), Fraction(m - 2, 2))])))
        k = kloosterman_integer(ctx, m - 2, ctx.div(b, ctx.pow(a, m)))
        check = BoundCheck.evaluate("deligne", abs(k),
                                    RadicalSum(q, [(m - 1, Fraction(m - 2, 2))]))
        assert check.holds == deligne_holds(k, m - 2, q)
        checks.append(check)

    if a != 0 and 2 <= m <= 4:
        c = ctx.div(b, ctx.pow(a, m))
        Nc = system_count(ctx, m, c)
        checks.append(BoundCheck.evaluate(
            "system_solutions", abs(q * (q - 1) * Nc - (q - 1) ** m),
            RadicalSum(q, [(m * (q - 1), Fraction(m, 2))])))

    if a != 0 and m == 3:
        model = CubicModel(ctx, ctx.div(b, ctx.pow(a, 3)))
        if not is_singular(model):
            t = count_points(model).trace_t
            checks.append(BoundCheck.evaluate("hasse_weil", abs(t),
                                              RadicalSum(q, [(2, Fraction(1, 2))])))

    return BoundReport(inst, checks)

def n_t_routes(inst):
    """Every applicable route for N_t, brute force first."""
    records = [CountRecord(inst, "N", n_t_bruteforce(inst), "bruteforce"),
               CountRecord(inst, "N", n_t_formula(inst), "formula")]
    k = inst.m // inst.t
    if inst.a != 0 and k % inst.field.p and inst.t <= 4:
        if solve_norm_congruence(build_tower(inst.field, inst.t), inst.m, inst.b).solvable:
            records.append(CountRecord(inst, "N", n_t_via_system(inst), "system"))
    return records

def p_m_routes(inst):
    """Every applicable route for P_m, brute force first."""
    ctx, m, a, b = inst.ctx, inst.m, inst.a, inst.b
    records = [CountRecord(inst, "P", p_m_bruteforce(ctx, m, a, b), "bruteforce"),
               CountRecord(inst, "P", p_m_moebius(ctx, m, a, b), "moebius")]
    closed = p_m_closed_forms(ctx, m, a, b)
    if closed is not None:
        records.append(CountRecord(inst, "P", closed, "closed"))
    return records

def count_all_routes(inst):
    return n_t_routes(inst) + p_m_routes(inst)
