"""Exact coefficient fields: the rationals and prime fields F_p.

Higher layers never touch ``FieldElement``; they store raw values (``Fraction``
for Q, ``int`` in ``[0, p)`` for F_p) and call the owning ``Field`` for
arithmetic.  ``FieldElement`` is the checked, operator-overloaded wrapper for
callers that want values which know their field.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

import numpy as np


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


class Field:
    """Base class; see :class:`Rationals` and :class:`PrimeField`."""

    characteristic = 0
    name = "?"

    def __eq__(self, other):
        return type(self) is type(other) and self.characteristic == other.characteristic

    def __hash__(self):
        return hash((type(self).__name__, self.characteristic))

    def __repr__(self):
        return self.name

    def __call__(self, value) -> "FieldElement":
        return FieldElement(self, self.convert(value))

    # raw arithmetic, overridden by subclasses
    zero = 0
    one = 1

    def convert(self, value):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == 0

    def reduce_array(self, arr: np.ndarray) -> np.ndarray:
        return arr

    def format(self, a) -> str:
        return str(a)


class Rationals(Field):
    characteristic = 0
    name = "Q"
    zero = Fraction(0)
    one = Fraction(1)

    def convert(self, value):
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError(f"cannot convert element of {value.field} to Q")
            return value.value
        if isinstance(value, float):
            raise TypeError("floating point coefficients are not exact")
        return Fraction(value)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return a / b


class PrimeField(Field):
    def __init__(self, p: int):
        if not isinstance(p, int) or not _is_prime(p) or p >= 2**31:
            raise ValueError(f"F_p requires a prime p < 2^31, got {p!r}")
        self.p = p
        self.characteristic = p
        self.name = f"F{p}"
        self.zero = 0
        self.one = 1

    def convert(self, value):
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError(f"cannot convert element of {value.field} to {self}")
            return value.value
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ZeroDivisionError(f"{value} has no image in {self}")
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        if isinstance(value, (int, np.integer)):
            return int(value) % self.p
        raise TypeError(f"cannot convert {value!r} to {self}")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def reduce_array(self, arr):
        return arr % self.p

    def format(self, a):
        return str(a)


QQ = Rationals()
_prime_fields: dict[int, PrimeField] = {}


def GF(p: int) -> PrimeField:
    if p not in _prime_fields:
        _prime_fields[p] = PrimeField(p)
    return _prime_fields[p]


class FieldElement:
    """An element of ``Q`` or ``F_p`` that refuses to mix with other fields."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value):
        self.field = field
        self.value = value

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError(f"mixed-field arithmetic: {self.field} and {other.field}")
            return other.value
        if isinstance(other, (int, Fraction)):
            return self.field.convert(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.div(self.value, o))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def inv(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.value == o

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return not self.field.is_zero(self.value)

    def __repr__(self):
        return f"{self.field}({self.value})"
