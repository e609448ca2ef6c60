#----------------------------------------------------------------------------
# Created By  : fflab developers
# Date: 2024
# --------------------------------------------------------------------------
"""
Plane cubics over F_q: projective point counts, singularity, the cubic
X_c: y^2 + cy + xy = x^3 attached to P_3(a, b), characteristic 3 forms
and the isomorphism-class census of short Weierstrass curves.
"""
import math
import logging
import functools
from dataclasses import dataclass

import numpy as np
import networkx as nx

from .errors import (PreconditionViolated, WrongCharacteristic, SingularModel,
                     UnsupportedCharacteristic, SizeOverflow, NonIntegralResult)

__all__ = ["PlaneCubic", "WeierstrassModel", "CubicModel", "PointCount", "IsoClass",
           "count_points", "is_singular", "system_curve", "p3_via_curve", "singular_case_p3",
           "to_char3_form", "reduced_char3_form", "j_invariant", "is_supersingular",
           "twist_relation", "kloosterman_via_curve", "weierstrass_classes", "deuring_census",
           "MAX_CURVE_FIELD"]

logger = logging.getLogger(__name__)

MAX_CURVE_FIELD = 1 << 16
MAX_CENSUS_FIELD = 1 << 8
_ROW_CHUNK = 1 << 18

@dataclass(frozen=True)
class PointCount:
    total: int
    trace_t: int

    @classmethod
    def from_total(cls, total, q):
        return cls(int(total), int(total) - q - 1)

    def hasse_weil_holds(self, q):
        return self.trace_t ** 2 <= 4 * q

class PlaneCubic(object):
    """
    A homogeneous form in X, Y, Z given by {(i, j, k): coefficient} for the
    monomials X^i Y^j Z^k. Partial derivatives are forms of the same kind.
    """

    def __init__(self, ctx, terms):
        self.ctx = ctx
        self.terms = {tuple(e): int(c) for e, c in terms.items() if c}

    def __repr__(self):
        return "PlaneCubic({}, {})".format(self.ctx.q, self.terms)

    def evaluate(self, X, Y, Z):
        ctx = self.ctx
        X, Y, Z = (np.asarray(v, dtype=np.int64) for v in (X, Y, Z))
        acc = np.zeros(np.broadcast(X, Y, Z).shape, dtype=np.int64)
        for (i, j, k), c in self.terms.items():
            mono = ctx.vmul(ctx.vmul(ctx.vpow(X, i), ctx.vpow(Y, j)), ctx.vpow(Z, k))
            acc = ctx.vadd(acc, ctx.vmul(c, mono))
        return acc

    def derivative(self, axis):
        ctx = self.ctx
        terms = {}
        for e, c in self.terms.items():
            if e[axis] == 0:
                continue
            lowered = list(e)
            lowered[axis] -= 1
            terms[tuple(lowered)] = ctx.mul(c, ctx.scalar(e[axis]))
        return PlaneCubic(ctx, terms)

    def infinity_points(self):
        """Points (x : 1 : 0) and (1 : 0 : 0) of the line Z = 0."""
        ctx = self.ctx
        x = ctx.elements()
        X = np.concatenate((x, [1]))
        Y = np.concatenate((np.ones_like(x), [0]))
        return X, Y, np.zeros_like(X)

    def affine_rows(self):
        """Chunks of the affine plane as (X, Y, 1) arrays."""
        q = self.ctx.q
        rows = max(1, _ROW_CHUNK // q)
        y = self.ctx.elements()
        for start in range(0, q, rows):
            x = np.arange(start, min(q, start + rows), dtype=np.int64)
            X = np.repeat(x, q)
            Y = np.tile(y, x.size)
            yield X, Y, np.ones_like(X)

    def count_infinity(self):
        return int((self.evaluate(*self.infinity_points()) == 0).sum())

    def count_affine(self):
        return int(sum((self.evaluate(*pts) == 0).sum() for pts in self.affine_rows()))

@dataclass(frozen=True)
class WeierstrassModel:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""
    ctx: object
    a1: int = 0
    a2: int = 0
    a3: int = 0
    a4: int = 0
    a6: int = 0

    def to_plane_cubic(self):
        ctx = self.ctx
        return PlaneCubic(ctx, {(0, 2, 1): 1, (1, 1, 1): self.a1, (0, 1, 2): self.a3,
                                (3, 0, 0): ctx.neg(1), (2, 0, 1): ctx.neg(self.a2),
                                (1, 0, 2): ctx.neg(self.a4), (0, 0, 3): ctx.neg(self.a6)})

    def count_affine(self):
        """For each x, solve y^2 + B y = C with B = a1 x + a3."""
        ctx = self.ctx
        x = ctx.elements()
        B = ctx.vadd(ctx.vmul(self.a1, x), self.a3)
        C = ctx.vadd(ctx.vpow(x, 3), ctx.vmul(self.a2, ctx.vpow(x, 2)))
        C = ctx.vadd(C, ctx.vadd(ctx.vmul(self.a4, x), self.a6))
        if ctx.p != 2:
            D = ctx.vadd(ctx.vmul(B, B), ctx.vmul(ctx.scalar(4), C))
            return int((1 + ctx.veta(D)).sum())
        zero = B == 0
        # y = Bz turns the equation into z^2 + z = C / B^2
        u = ctx.vdiv(C[~zero], ctx.vmul(B[~zero], B[~zero]))
        return int(zero.sum() + 2 * (ctx.vtrace(u) == 0).sum())

@dataclass(frozen=True)
class CubicModel:
    """X_c: y^2 + cy + xy = x^3."""
    ctx: object
    c: int

    def __post_init__(self):
        if self.c == 0:
            raise PreconditionViolated("X_c needs c != 0")

    def weierstrass(self):
        return WeierstrassModel(self.ctx, a1=1, a3=self.c)

    def singular_by_formula(self):
        """X_c is singular exactly when p != 3 and c = 1/27."""
        ctx = self.ctx
        return ctx.p != 3 and self.c == ctx.inv(ctx.scalar(27))

def _plane(model):
    if isinstance(model, PlaneCubic):
        return model
    if isinstance(model, CubicModel):
        model = model.weierstrass()
    return model.to_plane_cubic()

def count_points(model):
    """Projective points of a CubicModel, WeierstrassModel or PlaneCubic."""
    ctx = model.ctx
    if ctx.q > MAX_CURVE_FIELD:
        raise SizeOverflow("q={} exceeds {}".format(ctx.q, MAX_CURVE_FIELD))
    if isinstance(model, CubicModel):
        model = model.weierstrass()
    if isinstance(model, WeierstrassModel):
        total = model.count_affine() + model.to_plane_cubic().count_infinity()
    else:
        total = model.count_affine() + model.count_infinity()
    return PointCount.from_total(total, ctx.q)

def is_singular(model):
    """
    Search all rational points for a common zero of F and its partials.
    A singular plane cubic curve that is irreducible has a rational singular point.
    """
    F = _plane(model)
    forms = [F] + [F.derivative(axis) for axis in range(3)]
    chunks = [F.infinity_points()] + list(F.affine_rows())
    for pts in chunks:
        zero = np.ones(pts[0].shape, dtype=bool)
        for G in forms:
            zero &= G.evaluate(*pts) == 0
        if zero.any():
            return True
    return False

def system_curve(ctx, c0):
    """x^2 y + x y^2 - x y + c0 = 0, whose affine points solve x + y + z = 1, xyz = c0."""
    return PlaneCubic(ctx, {(2, 1, 0): 1, (1, 2, 0): 1, (1, 1, 1): ctx.neg(1), (0, 0, 3): c0})

def p3_via_curve(ctx, a, b):
    """P_3(a, b) = (|X(F_q)| - eps) / 3 with c = b / a^3."""
    if a == 0 or b == 0:
        raise PreconditionViolated("p3_via_curve needs a, b != 0")
    model = CubicModel(ctx, ctx.div(b, ctx.pow(a, 3)))
    eps = 1 if model.singular_by_formula() else 0
    total = count_points(model).total - eps
    if total % 3:
        raise NonIntegralResult("|X| - eps = {} is not divisible by 3".format(total))
    return total // 3

def singular_case_p3(ctx, a):
    """P_3(a, (a/3)^3) = (q +- 1)/3, plus iff p = 2 mod 3 and r odd."""
    if ctx.p == 3:
        raise WrongCharacteristic("the singular cubic case needs p != 3")
    if a == 0:
        raise PreconditionViolated("a must be nonzero")
    plus = ctx.p % 3 == 2 and ctx.r % 2 == 1
    return (ctx.q + 1) // 3 if plus else (ctx.q - 1) // 3

def _require_char3(ctx):
    if ctx.p != 3:
        raise WrongCharacteristic("characteristic 3 required, got p={}".format(ctx.p))

def to_char3_form(model):
    """
    y^2 = x^3 + x^2 - c. Completing the square in X_c gives x^3 + x^2 - c^3,
    whose Frobenius image this is, so the point counts agree.
    """
    _require_char3(model.ctx)
    return WeierstrassModel(model.ctx, a2=1, a6=model.ctx.neg(model.c))

def reduced_char3_form(model):
    """
    Bring a long Weierstrass model to y^2 = x^3 + a x^2 + b (a != 0)
    or y^2 = x^3 + c x + b.
    """
    ctx = model.ctx
    _require_char3(ctx)
    half = ctx.inv(ctx.scalar(2))
    quarter = ctx.mul(half, half)
    # y -> y - (a1 x + a3)/2
    A = ctx.add(model.a2, ctx.mul(quarter, ctx.mul(model.a1, model.a1)))
    C = ctx.add(model.a4, ctx.mul(half, ctx.mul(model.a1, model.a3)))
    D = ctx.add(model.a6, ctx.mul(quarter, ctx.mul(model.a3, model.a3)))
    if A == 0:
        return WeierstrassModel(ctx, a4=C, a6=D)
    # x -> x + C/A kills the linear term
    e = ctx.div(C, A)
    B = ctx.add(ctx.add(ctx.pow(e, 3), ctx.mul(A, ctx.mul(e, e))), ctx.add(ctx.mul(C, e), D))
    return WeierstrassModel(ctx, a2=A, a6=B)

def j_invariant(model):
    red = reduced_char3_form(model)
    ctx = red.ctx
    if red.a2:
        if red.a6 == 0:
            raise SingularModel("y^2 = x^3 + a x^2 with b = 0 is singular")
        return ctx.neg(ctx.div(ctx.pow(red.a2, 3), red.a6))
    if red.a4 == 0:
        raise SingularModel("y^2 = x^3 + b is singular in characteristic 3")
    return 0

def is_supersingular(model):
    return j_invariant(model) == 0

def twist_relation(ctx, a, b):
    """Point counts of E: y^2 = x^3 + a x^2 + b and X': y^2 = x^3 + x^2 + b/a^3."""
    _require_char3(ctx)
    if a == 0 or b == 0:
        raise SingularModel("E: y^2 = x^3 + a x^2 + b needs ab != 0")
    E = WeierstrassModel(ctx, a2=a, a6=b)
    X = WeierstrassModel(ctx, a2=1, a6=ctx.div(b, ctx.pow(a, 3)))
    return count_points(E).total, count_points(X).total

def kloosterman_via_curve(ctx, c):
    """k(c) = |X_c(F_q)| - q - 1."""
    _require_char3(ctx)
    return count_points(CubicModel(ctx, c)).trace_t

@dataclass(frozen=True)
class IsoClass:
    rep: tuple
    size: int
    trace_t: int

@functools.lru_cache(maxsize=None)
def weierstrass_classes(ctx):
    """
    Isomorphism classes of y^2 = x^3 + Ax + B over F_q, p >= 5, as the
    connected components of (A, B) ~ (u^4 A, u^6 B) with u = gamma.
    """
    if ctx.p < 5:
        raise UnsupportedCharacteristic("short Weierstrass census needs p >= 5, got {}".format(
                                        ctx.p))
    if ctx.q > MAX_CENSUS_FIELD:
        raise SizeOverflow("census over q={} exceeds {}".format(ctx.q, MAX_CENSUS_FIELD))
    q = ctx.q
    u4, u6 = ctx.pow(ctx.gamma, 4), ctx.pow(ctx.gamma, 6)
    four, k27 = ctx.scalar(4), ctx.scalar(27)
    G = nx.Graph()
    for A in range(q):
        for B in range(q):
            disc = ctx.add(ctx.mul(four, ctx.pow(A, 3)), ctx.mul(k27, ctx.mul(B, B)))
            if disc == 0:
                continue
            G.add_edge((A, B), (ctx.mul(u4, A), ctx.mul(u6, B)))
    classes = []
    for component in nx.connected_components(G):
        A, B = min(component)
        trace = count_points(WeierstrassModel(ctx, a4=A, a6=B)).trace_t
        classes.append(IsoClass((A, B), len(component), trace))
    classes.sort(key=lambda c: c.rep)
    logger.debug("F_%d: %d isomorphism classes", q, len(classes))
    return tuple(classes)

def deuring_census(ctx, t):
    """Number of isomorphism classes with q + 1 + t points."""
    q = ctx.q
    if ctx.p < 5:
        raise UnsupportedCharacteristic("Deuring census needs p >= 5, got {}".format(ctx.p))
    if math.gcd(q, t) != 1 or t * t >= 4 * q:
        logger.warning("t=%d is not admissible over F_%d", t, q)
        return 0
    return sum(1 for c in weierstrass_classes(ctx) if c.trace_t == t)
