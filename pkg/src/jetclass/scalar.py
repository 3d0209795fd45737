"""Scalar backends: exact rationals (``Fraction``) and 64-bit floats.

Integers are accepted everywhere and promoted to the backend of the
surrounding computation; a ``Fraction`` meeting a ``float`` is an error.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Union

from .errors import BackendMismatchError

EXACT = "exact"
FLOAT = "float"

Scalar = Union[Fraction, float]

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def backend_of(value) -> str | None:
    """Backend of a single value; ``None`` for plain ints (backend-neutral)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, Fraction):
        return EXACT
    if isinstance(value, int):
        return None
    if isinstance(value, float):
        return FLOAT
    raise TypeError(f"unsupported scalar type {type(value).__name__}")


def common_backend(values: Iterable, default: str = EXACT) -> str:
    found = None
    for value in values:
        b = backend_of(value)
        if b is None:
            continue
        if found is None:
            found = b
        elif found != b:
            raise BackendMismatchError("exact and float scalars mixed in one object")
    return found or default


def check_same(*backends: str) -> str:
    first = backends[0]
    for b in backends[1:]:
        if b != first:
            raise BackendMismatchError(f"backend mismatch: {first} vs {b}")
    return first


def coerce(value, backend: str) -> Scalar:
    b = backend_of(value)
    if b is not None and b != backend:
        raise BackendMismatchError(f"{b} value used in {backend} computation")
    if backend == EXACT:
        return Fraction(value)
    return float(value)


def parse_scalar(text: str) -> Scalar:
    """Parse ``"p/q"``/``"p"`` to a Fraction and decimal strings to float."""
    if not isinstance(text, str):
        raise TypeError("coefficients must be given as strings")
    if _RATIONAL_RE.match(text):
        num, _, den = text.replace(" ", "").partition("/")
        if den and int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den) if den else 1)
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"malformed coefficient {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"non-finite coefficient {text!r}")
    return value


def format_scalar(value) -> str:
    """Inverse of :func:`parse_scalar`; floats use the shortest round-trip repr."""
    if isinstance(value, float):
        text = repr(value)
        # keep the decimal marker so the value re-parses into the float backend
        if _RATIONAL_RE.match(text):
            text += ".0"
        return text
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def is_exact_zero(value) -> bool:
    return value == 0


def rational_sqrt(value: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if value < 0:
        return None
    n, d = value.numerator, value.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None
