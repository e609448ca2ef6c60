#----------------------------------------------------------------------------
# Created By  : fflab developers
# Date: 2024
# --------------------------------------------------------------------------
"""
Dense polynomials over a FieldCtx.

A polynomial is a list of field encodings, most significant coefficient
first, without leading zeros; [] is the zero polynomial.
"""
import logging

import numpy as np
import sympy
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irred_p_rabin

__all__ = ["poly_strip", "poly_add", "poly_sub", "poly_mul", "poly_divmod", "poly_rem",
           "poly_monic", "poly_mulmod", "poly_powmod", "poly_gcd", "poly_eval",
           "is_irreducible"]

logger = logging.getLogger(__name__)

def poly_strip(f):
    i = 0
    while i < len(f) and f[i] == 0:
        i += 1
    return list(f[i:])

def poly_add(ctx, f, g):
    if len(f) < len(g):
        f, g = g, f
    shift = len(f) - len(g)
    out = list(f[:shift]) + [ctx.add(a, b) for a, b in zip(f[shift:], g)]
    return poly_strip(out)

def poly_sub(ctx, f, g):
    return poly_add(ctx, f, [ctx.neg(c) for c in g])

def poly_mul(ctx, f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            if b:
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b))
    return poly_strip(out)

def poly_divmod(ctx, f, g):
    g = poly_strip(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = poly_strip(f)
    if len(f) < len(g):
        return [], f
    lead_inv = ctx.inv(g[0])
    rem = list(f)
    quo = []
    for i in range(len(f) - len(g) + 1):
        c = ctx.mul(rem[i], lead_inv)
        quo.append(c)
        if c:
            for j in range(1, len(g)):
                rem[i + j] = ctx.sub(rem[i + j], ctx.mul(c, g[j]))
    return poly_strip(quo), poly_strip(rem[len(f) - len(g) + 1:])

def poly_rem(ctx, f, g):
    return poly_divmod(ctx, f, g)[1]

def poly_monic(ctx, f):
    f = poly_strip(f)
    if not f or f[0] == 1:
        return f
    lead_inv = ctx.inv(f[0])
    return [ctx.mul(c, lead_inv) for c in f]

def poly_mulmod(ctx, f, g, h):
    return poly_rem(ctx, poly_mul(ctx, f, g), h)

def poly_powmod(ctx, f, n, h):
    """f**n mod h by repeated squaring."""
    result = [1]
    base = poly_rem(ctx, f, h)
    while n:
        if n & 1:
            result = poly_mulmod(ctx, result, base, h)
        n >>= 1
        if n:
            base = poly_mulmod(ctx, base, base, h)
    return poly_rem(ctx, result, h)

def poly_gcd(ctx, f, g):
    """Monic gcd."""
    f, g = poly_strip(f), poly_strip(g)
    while g:
        f, g = g, poly_rem(ctx, f, g)
    return poly_monic(ctx, f)

def poly_eval(ctx, f, x):
    """Horner evaluation at one element or an array of elements."""
    if isinstance(x, np.ndarray):
        acc = np.zeros_like(x)
        for c in f:
            acc = ctx.vadd(ctx.vmul(acc, x), c)
        return acc
    acc = 0
    for c in f:
        acc = ctx.add(ctx.mul(acc, x), c)
    return acc

def is_irreducible(ctx, f):
    """
    Rabin's test: f of degree n is irreducible iff x^(q^n) = x mod f and
    gcd(x^(q^(n/l)) - x, f) = 1 for every prime l dividing n.
    """
    f = poly_monic(ctx, f)
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    if n <= 3:
        # a reducible quadratic or cubic has a linear factor
        return not (poly_eval(ctx, f, ctx.elements()) == 0).any()
    if ctx.r == 1:
        return gf_irred_p_rabin(ZZ.map(f), ctx.p, ZZ)

    x = [1, 0]
    wanted = {n} | {n // ell for ell in sympy.primefactors(n)}
    frobenius = {}
    h = x
    for k in range(1, n + 1):
        h = poly_powmod(ctx, h, ctx.q, f)
        if k in wanted:
            frobenius[k] = h
    if poly_sub(ctx, frobenius[n], x):
        return False
    for ell in sympy.primefactors(n):
        g = poly_gcd(ctx, poly_sub(ctx, frobenius[n // ell], x), f)
        if len(g) != 1:
            return False
    return True
