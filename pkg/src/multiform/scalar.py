"""Exact Gaussian-rational scalars.

Real values are plain ``gmpy2.mpq`` rationals; only values with a nonzero
imaginary part are wrapped in :class:`Gaussian`.  Keeping the real case on the
native rational type keeps the hot polynomial loops cheap.
"""

from __future__ import annotations

from fractions import Fraction

from gmpy2 import mpq
from numbers import Rational
from typing import Union

Q = type(mpq(0))

__all__ = ["Q", "mpq", "as_scalar", "Gaussian", "Scalar", "I", "scalar", "conj", "real_part", "imag_part", "is_scalar"]


class Gaussian:
    """a + b*i with rational a, b and b != 0 (use ``scalar`` to construct)."""

    __slots__ = ("re", "im")

    def __init__(self, re: Q, im: Q):
        self.re = re
        self.im = im

    # construction helpers -------------------------------------------------
    @staticmethod
    def _split(x):
        if isinstance(x, Gaussian):
            return x.re, x.im
        if isinstance(x, (int, Q)):
            return mpq(x), mpq(0)
        if isinstance(x, Rational) and not isinstance(x, bool):
            return scalar(x), mpq(0)
        return None

    @staticmethod
    def make(re: Q, im: Q) -> "Scalar":
        if im == 0:
            return re
        return Gaussian(re, im)

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        s = Gaussian._split(other)
        if s is None:
            return NotImplemented
        return Gaussian.make(self.re + s[0], self.im + s[1])

    __radd__ = __add__

    def __sub__(self, other):
        s = Gaussian._split(other)
        if s is None:
            return NotImplemented
        return Gaussian.make(self.re - s[0], self.im - s[1])

    def __rsub__(self, other):
        s = Gaussian._split(other)
        if s is None:
            return NotImplemented
        return Gaussian.make(s[0] - self.re, s[1] - self.im)

    def __mul__(self, other):
        if isinstance(other, (int, Q)):
            return Gaussian.make(self.re * other, self.im * other)
        if isinstance(other, Gaussian):
            a, b, c, d = self.re, self.im, other.re, other.im
            return Gaussian.make(a * c - b * d, a * d + b * c)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        s = Gaussian._split(other)
        if s is None:
            return NotImplemented
        return self * _inverse(*s)

    def __rtruediv__(self, other):
        s = Gaussian._split(other)
        if s is None:
            return NotImplemented
        return Gaussian.make(*s) * _inverse(self.re, self.im)

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (1 / self) ** (-k)
        out: Scalar = mpq(1)
        base: Scalar = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Gaussian):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Q)):
            return False  # im != 0 by construction
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return True

    def __repr__(self):
        return f"Gaussian({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[Q, Gaussian]

I = Gaussian(mpq(0), mpq(1))


def _inverse(a: Q, b: Q) -> Scalar:
    den = a * a + b * b
    if den == 0:
        raise ZeroDivisionError("division by zero scalar")
    return Gaussian.make(a / den, -b / den)


def scalar(x, im=0) -> Scalar:
    """Coerce ints, Fractions, strings like '3/4' or (re, im) into a Scalar."""
    if isinstance(x, Gaussian):
        return x + mpq(im) * I if im else x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, (int, Q, str, Fraction)):
        re = mpq(x)
    elif isinstance(x, Rational):
        re = mpq(int(x.numerator), int(x.denominator))
    else:
        raise TypeError(f"cannot make a scalar from {type(x).__name__}")
    return Gaussian.make(re, mpq(im))


def is_scalar(x) -> bool:
    return isinstance(x, (Q, Gaussian)) or (isinstance(x, Rational) and not isinstance(x, bool))


def real_part(x: Scalar) -> Q:
    return x.re if isinstance(x, Gaussian) else mpq(x)


def imag_part(x: Scalar) -> Q:
    return x.im if isinstance(x, Gaussian) else mpq(0)


def conj(x: Scalar) -> Scalar:
    if isinstance(x, Gaussian):
        return Gaussian(x.re, -x.im)
    return x


def format_scalar(x: Scalar) -> str:
    """Plain-text form that the DSL parser reads back, e.g. ``-3/2``, ``1/2*i``."""
    re, im = real_part(x), imag_part(x)
    if im == 0:
        return str(re)
    imag = "i" if im == 1 else "-i" if im == -1 else f"{im}*i"
    if re == 0:
        return imag
    if imag.startswith("-"):
        return f"({re} - {imag[1:]})"
    return f"({re} + {imag})"


def as_scalar(x) -> Scalar:
    """Fast path for values that are already scalars."""
    t = type(x)
    if t is Q or t is Gaussian:
        return x
    return scalar(x)
