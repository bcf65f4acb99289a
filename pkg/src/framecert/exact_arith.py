"""Exact rationals and Gaussian rationals.

Rationals are :class:`fractions.Fraction` (always in lowest terms with a
positive denominator).  :class:`GaussRational` pairs two of them.
"""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

BigRational = Fraction

__all__ = [
    "BigRational",
    "GaussRational",
    "I",
    "ONE",
    "ZERO",
    "as_gauss",
    "format_rational",
    "gr_arith",
    "gr_conj",
    "parse_rational",
]


def parse_rational(text) -> Fraction:
    """Parse ``"3"``, ``"-2/7"`` or a decimal string like ``"0.125"``."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    s = str(text).strip()
    if not s:
        raise ValueError("empty rational literal")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational literal {text!r}") from exc


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


_GAUSS_TERM = re.compile(r"([+-]?)\s*([0-9/.]*)\s*(\*?\s*i)?")


class GaussRational:
    """An element ``re + im*i`` of Q(i).  Immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if type(re) is Fraction else Fraction(re))
        object.__setattr__(self, "im", im if type(im) is Fraction else Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational is immutable")

    def __reduce__(self):
        return (GaussRational._raw, (self.re, self.im))

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussRational":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    # -- predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return GaussRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return GaussRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b:
            return GaussRational._raw(a * c, a * d)
        if not d:
            return GaussRational._raw(a * c, b * c)
        return GaussRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError("division by zero in Q(i)")
        c, d = other.re, other.im
        if not d:
            return GaussRational._raw(self.re / c, self.im / c)
        norm = c * c + d * d
        return GaussRational._raw(
            (self.re * c + self.im * d) / norm, (self.im * c - self.re * d) / norm
        )

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __neg__(self):
        return GaussRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (ONE / self) ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "GaussRational":
        return GaussRational._raw(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    # -- text ------------------------------------------------------------
    def __repr__(self):
        return f"GaussRational({format_rational(self.re)!r}, {format_rational(self.im)!r})"

    def __str__(self):
        if not self.im:
            return format_rational(self.re)
        im = self.im
        if im == 1:
            imag = "i"
        elif im == -1:
            imag = "-i"
        else:
            imag = f"{format_rational(im)}*i"
        if not self.re:
            return imag
        sign = "" if imag.startswith("-") else "+"
        return f"{format_rational(self.re)}{sign}{imag}"

    @classmethod
    def parse(cls, text) -> "GaussRational":
        """Parse strings such as ``"3"``, ``"-2/3*i"``, ``"1/2-7*i"``, ``"-5-7i"``."""
        if isinstance(text, GaussRational):
            return text
        if isinstance(text, (int, Fraction)):
            return cls(text)
        s = str(text).replace(" ", "")
        if not s:
            raise ValueError("empty Gaussian rational literal")
        re_part, im_part = Fraction(0), Fraction(0)
        pos = 0
        while pos < len(s):
            m = _GAUSS_TERM.match(s, pos)
            if m is None or m.end() == pos:
                raise ValueError(f"bad Gaussian rational literal {text!r}")
            sign, mag, imag = m.groups()
            if not mag and not imag:
                raise ValueError(f"bad Gaussian rational literal {text!r}")
            value = parse_rational(mag) if mag else Fraction(1)
            if sign == "-":
                value = -value
            if imag:
                im_part += value
            else:
                re_part += value
            pos = m.end()
        return cls(re_part, im_part)

    def to_pair(self) -> list[str]:
        return [format_rational(self.re), format_rational(self.im)]

    @classmethod
    def from_pair(cls, pair) -> "GaussRational":
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValueError(f"expected [re, im] pair, got {pair!r}")
        return cls(parse_rational(pair[0]), parse_rational(pair[1]))


def _coerce(value):
    if type(value) is GaussRational:
        return value
    if isinstance(value, (int, Rational)):
        return GaussRational._raw(Fraction(value), Fraction(0))
    if isinstance(value, complex):
        raise TypeError("floating complex values are not exact; use GaussRational")
    return NotImplemented


def as_gauss(value) -> GaussRational:
    """Coerce ints, Fractions, Gaussian rationals and strings into Q(i)."""
    if isinstance(value, str):
        return GaussRational.parse(value)
    out = _coerce(value)
    if out is NotImplemented:
        raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")
    return out


ZERO = GaussRational(0, 0)
ONE = GaussRational(1, 0)
I = GaussRational(0, 1)


def gr_arith(a, b, op: str) -> GaussRational:
    """Exact field arithmetic; ``op`` is one of add, sub, mul, div."""
    a, b = as_gauss(a), as_gauss(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def gr_conj(a) -> GaussRational:
    return as_gauss(a).conj()
