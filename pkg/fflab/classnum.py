#----------------------------------------------------------------------------
# Created By  : fflab developers
# Date: 2024
# --------------------------------------------------------------------------
"""
Class numbers of negative discriminants by counting reduced binary
quadratic forms ax^2 + bxy + cy^2.
"""
import math
import logging
import functools
from dataclasses import dataclass

from .errors import InvalidDiscriminant

__all__ = ["Discriminant", "reduced_forms", "class_number_h", "kronecker_H"]

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class Discriminant:
    d: int

    def __post_init__(self):
        d = int(self.d)
        if d >= 0 or d % 4 not in (0, 1):
            raise InvalidDiscriminant("{} is not a negative discriminant".format(d))
        object.__setattr__(self, "d", d)

    def __int__(self):
        return self.d

def _as_discriminant(d):
    return d if isinstance(d, Discriminant) else Discriminant(d)

def reduced_forms(d, primitive=True):
    """
    Yield the reduced forms (a, b, c) of discriminant d: |b| <= a <= c and
    b >= 0 whenever |b| = a or a = c.
    """
    d = _as_discriminant(d).d
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if primitive and math.gcd(math.gcd(a, b), c) != 1:
                continue
            yield a, b, c
        a += 1

@functools.lru_cache(maxsize=None)
def _h(d):
    h = sum(1 for _ in reduced_forms(d))
    logger.debug("h(%d) = %d", d, h)
    return h

def class_number_h(d):
    """Number of primitive reduced forms of discriminant d."""
    return _h(_as_discriminant(d).d)

@functools.lru_cache(maxsize=None)
def _H(d):
    total, f = 0, 1
    while f * f <= -d:
        if d % (f * f) == 0 and (d // (f * f)) % 4 in (0, 1):
            total += _h(d // (f * f))
        f += 1
    return total

def kronecker_H(d):
    """Kronecker class number: sum of h(d/f^2) over admissible f, unweighted."""
    return _H(_as_discriminant(d).d)
