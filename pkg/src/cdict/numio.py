"""Number text I/O and tolerance-aware float comparison.

``format_float`` emits either the shortest decimal that reads back to the
same binary64 or a fixed number of significant digits; ``parse_float``
returns the correctly rounded binary64 for any JSON number. Both lean on
CPython's correctly rounded dtoa/strtod and only add the JSON grammar,
the notation rules and the error contract on top.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import NonFinite, NumberOverflow, NumberSyntax, OutOfRange

INT_MIN = -(1 << 63)
INT_MAX = (1 << 63) - 1
UINT_MAX = (1 << 64) - 1

# exponents rendered in plain notation
PLAIN_MIN_EXP = -4
PLAIN_MAX_EXP = 16

_JSON_NUMBER = re.compile(r"-?(?:0|[1-9][0-9]*)(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?\Z")
_INTEGER = re.compile(r"[+-]?[0-9]+\Z")


class UInt(int):
    """An unsigned 64-bit integer, kept distinct from the signed Int tag."""

    __slots__ = ()

    def __new__(cls, value=0):
        v = int.__new__(cls, value)
        if not 0 <= v <= UINT_MAX:
            raise OutOfRange(f"{int(v)} does not fit an unsigned 64-bit integer")
        return v

    def __repr__(self):
        return f"UInt({int(self)})"

    __str__ = int.__repr__


def check_sig_digits(n):
    if n is None:
        return
    if type(n) is not int or not 1 <= n <= 17:
        raise ValueError(f"significant digits must be in [1, 17], got {n!r}")


@dataclass(frozen=True)
class CompareMode:
    """How two floats are judged equal: ``exact``, ``absolute`` or ``relative``."""

    kind: str = "exact"
    eps: float = 0.0

    def __post_init__(self):
        if self.kind not in ("exact", "absolute", "relative"):
            raise ValueError(f"unknown compare mode {self.kind!r}")
        if not self.eps >= 0:
            raise ValueError("tolerance must be >= 0")

    @classmethod
    def absolute(cls, eps):
        return cls("absolute", eps)

    @classmethod
    def relative(cls, eps):
        return cls("relative", eps)


EXACT = CompareMode()


@dataclass(frozen=True)
class FloatPolicy:
    """Output precision (``sig_digits=None`` means shortest round trip) and
    the comparison mode used for sorting and equality."""

    sig_digits: int | None = None
    compare: CompareMode = EXACT

    def __post_init__(self):
        check_sig_digits(self.sig_digits)


DEFAULT_POLICY = FloatPolicy()


def _render(negative, digits, exp):
    # digits: significand digits d1 d2 ... with value d1.d2... x 10**exp
    if PLAIN_MIN_EXP <= exp <= PLAIN_MAX_EXP:
        if exp >= 0:
            head = digits[: exp + 1]
            if len(head) < exp + 1:
                head += "0" * (exp + 1 - len(head))
            tail = digits[exp + 1 :]
            s = head + "." + tail if tail else head
        else:
            s = "0." + "0" * (-exp - 1) + digits
    else:
        s = digits[0] + ("." + digits[1:] if len(digits) > 1 else "") + f"e{exp:+d}"
    return "-" + s if negative else s


def format_float(x, sig_digits=None):
    """Render a finite float as JSON number text.

    With ``sig_digits=None`` the result is the shortest text that parses back
    to ``x`` exactly (closest candidate, ties to even). Otherwise exactly
    ``sig_digits`` significant digits, rounded half-to-even from the exact
    binary value. Plain notation is used for decimal exponents in [-4, 16].
    """
    if x - x != 0:
        raise NonFinite(f"cannot format non-finite value {x!r}")
    if sig_digits is None:
        r = repr(x)
        if "e" not in r:
            return r[:-2] if r.endswith(".0") else r
        mant, _, e = r.partition("e")
        exp = int(e)
        if exp != PLAIN_MAX_EXP:
            return f"{mant}e{exp:+d}"
    else:
        check_sig_digits(sig_digits)
        mant, _, e = ("%.*e" % (sig_digits - 1, x)).partition("e")
        exp = int(e)
    negative = mant[0] == "-"
    if negative:
        mant = mant[1:]
    return _render(negative, mant.replace(".", ""), exp)


def parse_float(text):
    """Correctly rounded binary64 for a JSON number (round half to even)."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii", "replace")
    if not _JSON_NUMBER.match(text):
        raise NumberSyntax(f"not a JSON number: {text!r}")
    x = float(text)
    if x - x != 0:
        raise NumberOverflow(f"{text!r} exceeds the largest finite double")
    return x


def parse_int(text):
    """Parse an integer; ``int`` when it fits signed 64-bit, ``UInt`` above that."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii", "replace")
    if not _INTEGER.match(text):
        raise NumberSyntax(f"not an integer: {text!r}")
    if len(text.lstrip("+-0")) > 20:
        raise OutOfRange(f"{text!r} exceeds the unsigned 64-bit range")
    v = int(text)
    if INT_MIN <= v <= INT_MAX:
        return v
    if 0 <= v <= UINT_MAX:
        return UInt(v)
    raise OutOfRange(f"{text!r} exceeds the unsigned 64-bit range")


def compare_floats(a, b, mode=EXACT):
    """Three-way comparison of finite floats: -1, 0 or 1."""
    kind = mode.kind
    if kind != "exact":
        diff = abs(a - b)
        if kind == "absolute":
            if diff <= mode.eps:
                return 0
        elif diff <= mode.eps * max(abs(a), abs(b)):
            return 0
    return (a > b) - (a < b)


def compare_numbers(a, b, mode=EXACT):
    """Three-way comparison of int/float values by mathematical value.

    Integer pairs compare exactly; once a float is involved the tolerance of
    ``mode`` applies. Python's int/float ordering is exact, so the exact mode
    needs no conversion.
    """
    if mode.kind != "exact" and (type(a) is float or type(b) is float):
        return compare_floats(float(a), float(b), mode)
    return (a > b) - (a < b)


__all__ = [
    "INT_MIN", "INT_MAX", "UINT_MAX", "UInt", "CompareMode", "EXACT",
    "FloatPolicy", "DEFAULT_POLICY", "format_float", "parse_float", "parse_int",
    "compare_floats", "compare_numbers",
]
