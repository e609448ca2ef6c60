#----------------------------------------------------------------------------
# Created By  : fflab developers
# Date: 2024
# --------------------------------------------------------------------------
"""Exceptions raised by fflab. All of them are ValueErrors."""

__all__ = ["FFLabError", "NonPrime", "ReducibleModulus", "NonPrimitiveModulusRoot",
           "SizeOverflow", "ZeroHasNoLog", "NotRational", "OrderMismatch",
           "PreconditionViolated", "WrongCharacteristic", "NonIntegralResult",
           "SingularModel", "UnsupportedCharacteristic", "InvalidDiscriminant",
           "ConfigError"]

class FFLabError(ValueError):
    pass

class NonPrime(FFLabError):
    pass

class ReducibleModulus(FFLabError):
    pass

class NonPrimitiveModulusRoot(FFLabError):
    pass

class SizeOverflow(FFLabError):
    pass

class ZeroHasNoLog(FFLabError):
    pass

class NotRational(FFLabError):
    pass

class OrderMismatch(FFLabError):
    pass

class PreconditionViolated(FFLabError):
    pass

class WrongCharacteristic(FFLabError):
    pass

class NonIntegralResult(FFLabError):
    """An exact division guaranteed by the algebra left a remainder."""
    pass

class SingularModel(FFLabError):
    pass

class UnsupportedCharacteristic(FFLabError):
    pass

class InvalidDiscriminant(FFLabError):
    pass

class ConfigError(FFLabError):
    pass
