#----------------------------------------------------------------------------
# Created By  : fflab developers
# Date: 2024
# --------------------------------------------------------------------------
"""
Finite fields F_{p^r} stored as integers in [0, q-1].

The integer sum_j d_j p^j encodes the polynomial sum_j d_j x^j modulo the
field modulus. Multiplication goes through exponent/log tables of a primitive
element gamma, addition through base-p digits (XOR when p = 2).
"""
import math
import logging
import functools
import itertools
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import sympy
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_pow_mod

from .errors import (FFLabError, NonPrime, ReducibleModulus, NonPrimitiveModulusRoot,
                     SizeOverflow, ZeroHasNoLog, PreconditionViolated)

__all__ = ["MAX_FIELD_SIZE", "FieldSpec", "FieldCtx", "TowerCtx", "CongruenceSolution",
           "build_field", "build_tower", "field_trace", "field_norm", "discrete_log",
           "solve_norm_congruence", "default_modulus"]

logger = logging.getLogger(__name__)

MAX_FIELD_SIZE = 1 << 20

@dataclass(frozen=True)
class FieldSpec:
    """
    Parameters
    ----------
    p : int
        characteristic
    r : int
        degree over F_p
    modulus : tuple of int or None
        coefficients c_r, ..., c_0 of the defining polynomial, most
        significant first. None selects the default modulus.
    """
    p: int
    r: int = 1
    modulus: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.modulus is not None:
            object.__setattr__(self, "modulus", tuple(int(c) for c in self.modulus))

    @property
    def q(self):
        return self.p ** self.r

    @classmethod
    def parse(cls, text):
        """Parse `p^r`, `p^r:c_r,...,c_0` or a bare prime power `q`."""
        text = str(text).strip()
        head, _, tail = text.partition(":")
        try:
            if "^" in head:
                p, r = (int(s) for s in head.split("^"))
            else:
                n = int(head)
                if sympy.isprime(n):
                    p, r = n, 1
                else:
                    pp = sympy.perfect_power(n)
                    if not pp or not sympy.isprime(pp[0]):
                        raise NonPrime("{} is not a prime power".format(n))
                    p, r = int(pp[0]), int(pp[1])
            modulus = None
            if tail:
                modulus = tuple(int(c) for c in tail.split(","))
        except ValueError as err:
            if isinstance(err, FFLabError):
                raise
            raise FFLabError("invalid field spec {!r}".format(text))
        return cls(p, r, modulus)

    def __str__(self):
        s = "{}^{}".format(self.p, self.r)
        if self.modulus is not None:
            s += ":" + ",".join(str(c) for c in self.modulus)
        return s

def _check_spec(spec):
    if not sympy.isprime(spec.p):
        raise NonPrime("p={} is not prime".format(spec.p))
    if spec.r < 1:
        raise FFLabError("r must be positive, got {}".format(spec.r))
    if spec.q > MAX_FIELD_SIZE:
        raise SizeOverflow("q={}^{} exceeds {}".format(spec.p, spec.r, MAX_FIELD_SIZE))
    if spec.modulus is not None:
        f = spec.modulus
        if len(f) != spec.r + 1 or f[0] != 1 or any(c < 0 or c >= spec.p for c in f):
            raise FFLabError("modulus {} is not monic of degree {} over F_{}".format(
                             f, spec.r, spec.p))

def _root_is_primitive(f, p, r):
    q = p ** r
    if f[-1] == 0:
        return False
    f = ZZ.map(list(f))
    x = ZZ.map([1, 0])
    for ell in sympy.primefactors(q - 1):
        if gf_pow_mod(x, (q - 1) // ell, f, p, ZZ) == [ZZ.one]:
            return False
    return True

def default_modulus(p, r):
    """Lexicographically smallest monic irreducible with a primitive root."""
    for tail in itertools.product(range(p), repeat=r):
        f = (1,) + tail
        if f[-1] == 0:
            continue
        if gf_irreducible_p(ZZ.map(list(f)), p, ZZ) and _root_is_primitive(f, p, r):
            return f
    raise AssertionError("no primitive modulus for F_{}^{}".format(p, r))

def _power_table(p, r, modulus):
    """Encodings of gamma^0, ..., gamma^(q-2)."""
    q = p ** r
    table = np.empty(q - 1, dtype=np.int64)
    if p == 2:
        reduce = sum(c << j for j, c in enumerate(reversed(modulus)))
        v = 1
        for i in range(q - 1):
            table[i] = v
            v <<= 1
            if v & q:
                v ^= reduce
        return table
    low = list(reversed(modulus[1:]))  # c_0 .. c_{r-1}
    powers = [p ** j for j in range(r)]
    digits = [1] + [0] * (r - 1)
    for i in range(q - 1):
        table[i] = sum(d * w for d, w in zip(digits, powers))
        lead = digits[-1]
        digits = [0] + digits[:-1]
        if lead:
            digits = [(d - lead * c) % p for d, c in zip(digits, low)]
    return table

class FieldCtx(object):
    """
    A concrete field F_q with tables for gamma, the root of the modulus.

    Scalar methods (add, mul, ...) take and return Python ints; the `v`
    variants work on numpy arrays.
    """

    def __init__(self, spec, modulus, exp_table):
        self.spec = spec
        self.p = spec.p
        self.r = spec.r
        self.q = spec.q
        self.order = self.q - 1
        self.modulus = tuple(modulus)

        exp_table = np.asarray(exp_table, dtype=np.int64)
        log_table = np.full(self.q, -1, dtype=np.int64)
        log_table[exp_table] = np.arange(self.order)
        assert (log_table[1:] >= 0).all(), "gamma does not generate F_q^*"
        exp_table.flags.writeable = False
        log_table.flags.writeable = False
        self.exp_table = exp_table
        self.log_table = log_table
        self.gamma = int(exp_table[1 % self.order])

        self._exp = exp_table.tolist()
        self._log = log_table.tolist()
        self._powers = self.p ** np.arange(self.r, dtype=np.int64)
        self._half = self.order // 2 if self.p != 2 else 0
        if self.p != 2 and self.r > 1:
            self._zech = self._log_of(self.vadd(exp_table, 1)).tolist()

        basis_traces = np.array([self._trace_slow(self.p ** j) for j in range(self.r)],
                                dtype=np.int64)
        self.abs_trace_table = (self.digits(np.arange(self.q)) @ basis_traces) % self.p
        self.abs_trace_table.flags.writeable = False

    def __repr__(self):
        return "FieldCtx(F_{}, modulus={}, gamma={})".format(self.q, self.modulus, self.gamma)

    def _log_of(self, x):
        return self.log_table[x]

    def _trace_slow(self, x):
        acc, y = 0, x
        for _ in range(self.r):
            acc = self.add(acc, y)
            y = self.pow(y, self.p)
        assert acc < self.p
        return acc

    # --- encodings ---------------------------------------------------------

    def digits(self, x):
        x = np.asarray(x, dtype=np.int64)
        return (x[..., None] // self._powers) % self.p

    def from_digits(self, d):
        return (np.asarray(d, dtype=np.int64) % self.p) @ self._powers

    def elements(self):
        return np.arange(self.q, dtype=np.int64)

    def nonzero(self):
        return np.arange(1, self.q, dtype=np.int64)

    def scalar(self, k):
        """The prime-field element k mod p."""
        return int(k) % self.p

    def element(self, text):
        """Parse an element string: decimal encoding, `g^k` or `-x`."""
        text = str(text).strip()
        if text.startswith("-"):
            return self.neg(self.element(text[1:]))
        try:
            if text.startswith("g"):
                k = 1
                if text.startswith("g^"):
                    k = int(text[2:])
                elif text != "g":
                    raise FFLabError("invalid element {!r}".format(text))
                return self._exp[k % self.order]
            x = int(text)
        except ValueError as err:
            if isinstance(err, FFLabError):
                raise
            raise FFLabError("invalid element {!r}".format(text))
        if not 0 <= x < self.q:
            raise FFLabError("element {} outside [0, {}]".format(x, self.q - 1))
        return x

    # --- scalar arithmetic -------------------------------------------------

    def add(self, x, y):
        if self.p == 2:
            return x ^ y
        if self.r == 1:
            return (x + y) % self.p
        if x == 0:
            return y
        if y == 0:
            return x
        lx = self._log[x]
        n = self._log[y] - lx
        if n < 0:
            n += self.order
        z = self._zech[n]
        if z < 0:
            return 0
        return self._exp[(lx + z) % self.order]

    def neg(self, x):
        if self.p == 2 or x == 0:
            return x
        if self.r == 1:
            return self.p - x
        return self._exp[(self._log[x] + self._half) % self.order]

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if x == 0 or y == 0:
            return 0
        return self._exp[(self._log[x] + self._log[y]) % self.order]

    def inv(self, x):
        if x == 0:
            raise ZeroHasNoLog("0 has no inverse in F_{}".format(self.q))
        return self._exp[-self._log[x] % self.order]

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def pow(self, x, k):
        if k == 0:
            return 1
        if x == 0:
            if k < 0:
                raise ZeroHasNoLog("0 has no inverse in F_{}".format(self.q))
            return 0
        return self._exp[(self._log[x] * k) % self.order]

    def log(self, x):
        if x == 0:
            raise ZeroHasNoLog("discrete log of 0 in F_{}".format(self.q))
        return self._log[x]

    def trace(self, x):
        """Absolute trace to F_p, as an integer in [0, p)."""
        return int(self.abs_trace_table[x])

    def relative_trace(self, x, k):
        """Trace from F_q down to F_{p^k}; k must divide r."""
        if self.r % k:
            raise PreconditionViolated("{} does not divide r={}".format(k, self.r))
        acc, y = 0, x
        for _ in range(self.r // k):
            acc = self.add(acc, y)
            y = self.pow(y, self.p ** k)
        return acc

    def is_square(self, x):
        return x == 0 or self.p == 2 or self._log[x] % 2 == 0

    def eta(self, x):
        """Quadratic character, eta(0) = 0."""
        if x == 0:
            return 0
        if self.p == 2:
            return 1
        return 1 if self._log[x] % 2 == 0 else -1

    # --- vectorised arithmetic ---------------------------------------------

    def vadd(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor(x, y)
        if self.r == 1:
            return (x + y) % self.p
        return ((self.digits(x) + self.digits(y)) % self.p) @ self._powers

    def vneg(self, x):
        x = np.asarray(x, dtype=np.int64)
        if self.p == 2:
            return x.copy()
        if self.r == 1:
            return (-x) % self.p
        return ((-self.digits(x)) % self.p) @ self._powers

    def vsub(self, x, y):
        return self.vadd(x, self.vneg(y))

    def vmul(self, x, y):
        lx = self.log_table[np.asarray(x, dtype=np.int64)]
        ly = self.log_table[np.asarray(y, dtype=np.int64)]
        out = self.exp_table[(lx + ly) % self.order]
        return np.where((lx < 0) | (ly < 0), 0, out)

    def vinv(self, x):
        lx = self.log_table[np.asarray(x, dtype=np.int64)]
        if (lx < 0).any():
            raise ZeroHasNoLog("0 has no inverse in F_{}".format(self.q))
        return self.exp_table[(-lx) % self.order]

    def vdiv(self, x, y):
        return self.vmul(x, self.vinv(y))

    def vpow(self, x, k):
        x = np.asarray(x, dtype=np.int64)
        if k == 0:
            return np.ones_like(x)
        lx = self.log_table[x]
        if k < 0 and (lx < 0).any():
            raise ZeroHasNoLog("0 has no inverse in F_{}".format(self.q))
        out = self.exp_table[(lx * (k % self.order)) % self.order]
        return np.where(lx < 0, 0, out)

    def vtrace(self, x):
        return self.abs_trace_table[np.asarray(x, dtype=np.int64)]

    def veta(self, x):
        x = np.asarray(x, dtype=np.int64)
        if self.p == 2:
            return (x != 0).astype(np.int64)
        lx = self.log_table[x]
        return np.where(lx < 0, 0, np.where(lx % 2 == 0, 1, -1))

@functools.lru_cache(maxsize=None)
def _build_field(spec):
    _check_spec(spec)
    if spec.modulus is None:
        modulus = default_modulus(spec.p, spec.r)
    else:
        modulus = spec.modulus
        if not gf_irreducible_p(ZZ.map(list(modulus)), spec.p, ZZ):
            raise ReducibleModulus("{} is reducible over F_{}".format(modulus, spec.p))
        if not _root_is_primitive(modulus, spec.p, spec.r):
            raise NonPrimitiveModulusRoot("root of {} is not primitive in F_{}".format(
                                          modulus, spec.q))
    ctx = FieldCtx(spec, modulus, _power_table(spec.p, spec.r, modulus))
    logger.debug("built %r", ctx)
    return ctx

def build_field(spec):
    """
    Construct F_q from a FieldSpec (or a spec string).

    Calls with equal specs return the same cached context.
    """
    if not isinstance(spec, FieldSpec):
        spec = FieldSpec.parse(spec)
    return _build_field(spec)

class TowerCtx(object):
    """
    F_{q^t} over F_q, with the base field living inside the top field.

    The base primitive element is g = N_t(gamma_t) = gamma_t^e with
    e = (q^t-1)/(q-1). `embed` maps base encodings to top encodings and
    `restrict` is its inverse on the subfield (-1 elsewhere).
    """

    def __init__(self, base, top, t):
        self.base = base
        self.top = top
        self.t = t
        self.base_q = base.q
        self.base_gamma_exponent = e = top.order // base.order
        Q = top.q

        if t == 1:
            embed = np.arange(base.q, dtype=np.int64)
        else:
            sub = np.concatenate(([0], top.exp_table[(e * np.arange(base.order)) % top.order]))
            vals = np.zeros_like(sub)
            for c in base.modulus:
                vals = top.vadd(top.vmul(vals, sub), c)
            rho = int(sub[vals == 0].min())
            embed = np.zeros(base.q, dtype=np.int64)
            digits = base.digits(np.arange(base.q))
            for j in range(base.r):
                embed = top.vadd(embed, top.vmul(digits[:, j], top.pow(rho, j)))
        restrict = np.full(Q, -1, dtype=np.int64)
        restrict[embed] = np.arange(base.q)
        assert (restrict >= 0).sum() == base.q
        self.embed_table = embed
        self.restrict_table = restrict

        self.g = int(restrict[top.exp_table[e % top.order]])
        assert math.gcd(base.log(self.g), base.order) == 1

        elems = top.elements()
        tr = np.zeros(Q, dtype=np.int64)
        y = elems
        for _ in range(t):
            tr = top.vadd(tr, y)
            y = top.vpow(y, base.q)
        self.trace_table = restrict[tr]
        self.norm_table = restrict[top.vpow(elems, e)]
        assert (self.trace_table >= 0).all() and (self.norm_table >= 0).all()
        for a in (self.embed_table, self.restrict_table, self.trace_table, self.norm_table):
            a.flags.writeable = False

    def __repr__(self):
        return "TowerCtx(F_{}/F_{}, g={})".format(self.top.q, self.base_q, self.g)

    def embed(self, b):
        return int(self.embed_table[b])

    def restrict(self, y):
        v = int(self.restrict_table[y])
        if v < 0:
            raise PreconditionViolated("{} is not in the base field".format(y))
        return v

    def trace(self, x):
        return self.trace_table[x] if isinstance(x, np.ndarray) else int(self.trace_table[x])

    def norm(self, x):
        return self.norm_table[x] if isinstance(x, np.ndarray) else int(self.norm_table[x])

    def ind_g(self, b):
        """Index of the base element b with respect to g."""
        k = self.top.log(self.embed(b))
        assert k % self.base_gamma_exponent == 0
        return k // self.base_gamma_exponent

@functools.lru_cache(maxsize=None)
def _build_tower(spec, t):
    base = build_field(spec)
    if t < 1:
        raise FFLabError("extension degree must be positive, got {}".format(t))
    if base.q ** t > MAX_FIELD_SIZE:
        raise SizeOverflow("q^t={}^{} exceeds {}".format(base.q, t, MAX_FIELD_SIZE))
    top = base if t == 1 else build_field(FieldSpec(base.p, base.r * t))
    tw = TowerCtx(base, top, t)
    logger.debug("built %r", tw)
    return tw

def build_tower(base, t):
    """Tower F_{q^t}/F_q; `base` is a FieldSpec, a spec string or a FieldCtx."""
    if isinstance(base, FieldCtx):
        base = base.spec
    elif not isinstance(base, FieldSpec):
        base = FieldSpec.parse(base)
    return _build_tower(base, int(t))

def field_trace(tw, x):
    return tw.trace(x)

def field_norm(tw, x):
    return tw.norm(x)

def discrete_log(ctx, x):
    return ctx.log(x)

@dataclass(frozen=True)
class CongruenceSolution:
    d: int
    solvable: bool
    i0: Optional[int] = None

def solve_norm_congruence(tw, m, b):
    """
    Solve (m/t) i = ind_g(b) mod (q-1) for the exponent i of gamma_t.

    Return
    ------
    CongruenceSolution with the least i0 in [0, (q-1)/d) when solvable
    """
    t, q = tw.t, tw.base_q
    if m % t:
        raise PreconditionViolated("t={} does not divide m={}".format(t, m))
    if b == 0:
        raise PreconditionViolated("b must be nonzero")
    k = m // t
    d = math.gcd(q - 1, k)
    ind = tw.ind_g(b)
    if ind % d:
        return CongruenceSolution(d, False)
    M = (q - 1) // d
    i0 = 0 if M == 1 else (ind // d) * pow(k // d, -1, M) % M
    return CongruenceSolution(d, True, i0)
