#----------------------------------------------------------------------------
# Created By  : fflab developers
# Date: 2024
# --------------------------------------------------------------------------
"""
Exact character sums.

Every sum is evaluated by the histogram method: count how often each
exponent of zeta_n occurs, then turn the counts into a CycInt.
"""
import math
import logging
import functools
from dataclasses import dataclass

import numpy as np
import sympy

from .errors import (NotRational, OrderMismatch, PreconditionViolated, WrongCharacteristic,
                     SizeOverflow)
from .ff_core import solve_norm_congruence

__all__ = ["CycInt", "MultCharIndex", "additive_char", "exp_sum_power", "gauss_sum",
           "kloosterman", "kloosterman_integer", "kloosterman_table", "kloosterman_is_rational",
           "deligne_holds", "sigma_t", "tuple_sums_and_logs", "verify_gaussreps",
           "verify_carlitz", "verify_moisio",
           "MAX_KLOOSTERMAN_TERMS"]

logger = logging.getLogger(__name__)

MAX_KLOOSTERMAN_TERMS = 1 << 22
_INT64_SAFE = 1 << 62

@functools.lru_cache(maxsize=None)
def _cyclotomic(n):
    """Coefficients of Phi_n, lowest degree first."""
    coeffs = sympy.cyclotomic_poly(n, polys=True).all_coeffs()
    return np.array([int(c) for c in reversed(coeffs)], dtype=np.int64)

def _reduce(coeffs, n):
    """Reduce a length-n vector modulo Phi_n in place; the result has degree < phi(n)."""
    phi = _cyclotomic(n)
    deg = len(phi) - 1
    for k in range(n - 1, deg - 1, -1):
        c = coeffs[k]
        if c:
            coeffs[k - deg:k + 1] -= c * phi
    return coeffs

class CycInt(object):
    """
    An element of Z[zeta_n], kept as the unique representative of degree
    below phi(n) in the basis 1, zeta, zeta^2, ...

    Coefficients are int64 while they provably fit, Python ints otherwise.
    """
    __slots__ = ("order", "coeffs")

    def __init__(self, order, coeffs=None):
        order = int(order)
        if order < 1:
            raise ValueError("order must be positive, got {}".format(order))
        self.order = order
        full = np.zeros(order, dtype=np.int64)
        if coeffs is not None:
            coeffs = np.asarray(coeffs)
            if coeffs.dtype == object or (coeffs.size and np.abs(coeffs).max() >= 1 << 40):
                full = full.astype(object)
            for start in range(0, coeffs.size, order):
                chunk = coeffs[start:start + order]
                full[:chunk.size] += chunk
        self.coeffs = _reduce(full, order)

    @classmethod
    def integer(cls, order, k):
        return cls(order, [k])

    @classmethod
    def zeta(cls, order, k=1):
        c = np.zeros(order, dtype=np.int64)
        c[k % order] = 1
        return cls(order, c)

    def _coerce(self, other):
        if isinstance(other, CycInt):
            if other.order != self.order:
                raise OrderMismatch("orders {} and {} differ".format(self.order, other.order))
            return other
        if isinstance(other, (int, np.integer)):
            return CycInt.integer(self.order, int(other))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return CycInt(self.order, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.order, -self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return CycInt(self.order, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        x, y = self.coeffs, other.coeffs
        nz = np.flatnonzero(x)
        if nz.size == 0 or not y.any():
            return CycInt(self.order)
        bound = int(np.abs(x).max()) * int(np.abs(y).max()) * int(nz.size)
        if bound >= _INT64_SAFE or x.dtype == object or y.dtype == object:
            x, y = x.astype(object), y.astype(object)
        out = np.zeros(self.order, dtype=x.dtype)
        for i in nz:
            out += x[i] * np.roll(y, int(i))
        return CycInt(self.order, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return bool(np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash((self.order, tuple(int(c) for c in self.coeffs)))

    def __repr__(self):
        terms = ["{}*z^{}".format(int(c), k) for k, c in enumerate(self.coeffs) if c]
        return "CycInt({}, {})".format(self.order, " + ".join(terms) if terms else "0")

    def conjugate(self):
        """zeta -> zeta^-1."""
        return CycInt(self.order, np.roll(self.coeffs[::-1], 1))

    def shift(self, k):
        """Multiply by zeta^k."""
        return CycInt(self.order, np.roll(self.coeffs, int(k) % self.order))

    def embed(self, order):
        """The same number written in Z[zeta_order]; order must be a multiple."""
        if order % self.order:
            raise OrderMismatch("{} does not embed into order {}".format(self.order, order))
        c = np.zeros(order, dtype=self.coeffs.dtype)
        c[::order // self.order] = self.coeffs
        return CycInt(order, c)

    def is_rational_integer(self):
        return not self.coeffs[1:].any()

    def to_integer(self):
        if not self.is_rational_integer():
            raise NotRational("{!r} is not a rational integer".format(self))
        return int(self.coeffs[0])

    @classmethod
    def from_histogram(cls, order, values):
        """Sum of zeta^v over the integer array `values`."""
        counts = np.bincount(np.asarray(values, dtype=np.int64).ravel() % order,
                             minlength=order)
        return cls(order, counts)

@dataclass(frozen=True)
class MultCharIndex:
    """The multiplicative character gamma^k -> zeta_order^(j k)."""
    j: int
    order: int

    def __post_init__(self):
        object.__setattr__(self, "j", self.j % self.order)

    def is_trivial(self):
        return self.j == 0

    def conj(self):
        return MultCharIndex(-self.j, self.order)

    def in_subgroup(self, n):
        """True iff the character lies in H_n, the subgroup of order n."""
        if self.order % n:
            raise PreconditionViolated("{} does not divide {}".format(n, self.order))
        return self.j % (self.order // n) == 0

def additive_char(ctx, x):
    return CycInt.zeta(ctx.p, ctx.trace(x))

def _trace_sum(ctx, values):
    return CycInt.from_histogram(ctx.p, ctx.vtrace(values))

def exp_sum_power(ctx, alpha, n):
    """sum over x != 0 of e(alpha x^n)."""
    return _trace_sum(ctx, ctx.vmul(alpha, ctx.vpow(ctx.nonzero(), n)))

def gauss_sum(ctx, psi):
    """
    G(psi) = sum over x != 0 of e(x) psi(x), in Z[zeta_(p * psi.order)].
    """
    if ctx.order % psi.order:
        raise PreconditionViolated("character order {} does not divide q-1={}".format(
                                   psi.order, ctx.order))
    n = ctx.p * psi.order
    k = np.arange(ctx.order, dtype=np.int64)
    tr = ctx.abs_trace_table[ctx.exp_table]
    return CycInt.from_histogram(n, psi.order * tr + ctx.p * ((psi.j * k) % psi.order))

@functools.lru_cache(maxsize=4)
def tuple_sums_and_logs(ctx, n):
    """Sums and log-products over all n-tuples of nonzero elements."""
    if n < 1:
        raise PreconditionViolated("tuple length must be at least 1, got {}".format(n))
    nz = ctx.nonzero()
    lnz = ctx.log_table[nz]
    sums, logs = nz, lnz
    for _ in range(n - 1):
        sums = ctx.vadd(sums[:, None], nz[None, :]).ravel()
        logs = ((logs[:, None] + lnz[None, :]) % ctx.order).ravel()
    sums, logs = np.array(sums), np.array(logs)
    sums.flags.writeable = False
    logs.flags.writeable = False
    return sums, logs

def kloosterman(ctx, n, c):
    """
    k_n(c) = sum of chi(x_1 + ... + x_n + c/(x_1...x_n)) over nonzero x_i.

    k_0(c) is chi(c).
    """
    if n < 0:
        raise PreconditionViolated("Kloosterman degree must be nonnegative, got {}".format(n))
    if c == 0:
        raise PreconditionViolated("Kloosterman sums need c != 0")
    if n == 0:
        return additive_char(ctx, c)
    if ctx.order ** n > MAX_KLOOSTERMAN_TERMS:
        raise SizeOverflow("(q-1)^n = {}^{} terms".format(ctx.order, n))
    sums, logs = tuple_sums_and_logs(ctx, n)
    return _trace_sum(ctx, ctx.vadd(sums, ctx.exp_table[(ctx.log(c) - logs) % ctx.order]))

def kloosterman_integer(ctx, n, c):
    return kloosterman(ctx, n, c).to_integer()

def kloosterman_table(ctx, n, integer=True):
    """All k_n(c), keyed by the encoding of c."""
    return {int(c): (kloosterman_integer if integer else kloosterman)(ctx, n, int(c))
            for c in ctx.nonzero()}

def kloosterman_is_rational(p, n):
    """Whether every k_n(c) over a field of characteristic p lies in Z."""
    return p == 2 or (n + 1) % (p - 1) == 0

def deligne_holds(k, n, q):
    """|k_n(c)| <= (n+1) q^(n/2), compared squared."""
    return k * k <= (n + 1) ** 2 * q ** n

@functools.lru_cache(maxsize=256)
def _inner_histograms(tw, i0, s):
    """Row c: trace histogram of c * gamma_t^i0 * x^s over nonzero x of the top field."""
    top, base = tw.top, tw.base
    y = top.vmul(top.exp_table[i0 % top.order], top.vpow(top.nonzero(), s))
    rows = np.empty((base.order, base.p), dtype=np.int64)
    for idx, c in enumerate(base.nonzero()):
        vals = top.vmul(tw.embed(int(c)), y)
        rows[idx] = np.bincount(top.vtrace(vals), minlength=base.p)
    return rows

def sigma_t(tw, m, a, b):
    """
    sum over c != 0 in F_q of chi(-c a0) sum over x != 0 in F_{q^t} of
    e(c gamma_t^i0 x^((q-1)/d)), with a0 = (t/m) a.
    """
    base = tw.base
    if m % tw.t:
        raise PreconditionViolated("t={} does not divide m={}".format(tw.t, m))
    k = m // tw.t
    if k % base.p == 0:
        raise PreconditionViolated("p={} divides m/t={}".format(base.p, k))
    sol = solve_norm_congruence(tw, m, b)
    if not sol.solvable:
        raise PreconditionViolated("d={} does not divide ind_g({})".format(sol.d, b))
    a0 = base.div(a, base.scalar(k))
    rows = _inner_histograms(tw, sol.i0, base.order // sol.d)
    total = np.zeros(base.p, dtype=np.int64)
    for idx, c in enumerate(base.nonzero()):
        total += np.roll(rows[idx], base.trace(base.neg(base.mul(int(c), a0))))
    return CycInt(base.p, total)

def verify_gaussreps(tw, n, alpha):
    """
    Check sum_x e(alpha x^n) = sum over lambda in H_n of
    G(conj(lambda) o N_t) lambda(N_t(alpha)) in Z[zeta_(p(q-1))].
    """
    q, top = tw.base_q, tw.top
    if (q - 1) % n:
        raise PreconditionViolated("n={} does not divide q-1={}".format(n, q - 1))
    order = top.p * (q - 1)
    lhs = exp_sum_power(top, alpha, n).embed(order)
    ind = top.log(alpha) % (q - 1)
    rhs = CycInt(order)
    for k in range(n):
        j = k * (q - 1) // n
        G = gauss_sum(top, MultCharIndex(-j, q - 1))
        rhs = rhs + G.shift(top.p * j * ind)
    return lhs == rhs

def verify_carlitz(ctx, c):
    if ctx.p != 2:
        raise WrongCharacteristic("the k_2 = k_1^2 - q identity needs p = 2, got {}".format(ctx.p))
    k1 = kloosterman_integer(ctx, 1, c)
    return kloosterman_integer(ctx, 2, c) == k1 * k1 - ctx.q

def verify_moisio(tw, alpha):
    """
    Check sum over x != 0 of e(alpha x^(q-1)) = (-1)^(m-1) (q-1) k_(m-1)(N_m(alpha)),
    where m is the tower degree.
    """
    m, q = tw.t, tw.base_q
    lhs = exp_sum_power(tw.top, alpha, q - 1)
    rhs = kloosterman(tw.base, m - 1, tw.norm(alpha)) * ((-1) ** (m - 1) * (q - 1))
    return lhs == rhs
