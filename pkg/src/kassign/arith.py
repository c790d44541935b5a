"""Exact scalar substrates: rationals, prime-field residues and dual numbers.

``fractions.Fraction`` is the rational type throughout the package; it is
always normalized and never rounds.  :class:`ModScalar` and :class:`Dual`
interoperate with ``int`` and ``Fraction`` operands so that the same generic
formula code can run over any of the three.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import DomainError, UnluckyPointError

Rational = Fraction

#: Default verification prime, the Mersenne prime 2**61 - 1.
DEFAULT_PRIME = (1 << 61) - 1


def binomial(top: int, bottom: int) -> int:
    """Generalized binomial coefficient ``top*(top-1)*...*(top-bottom+1)/bottom!``.

    ``top`` may be any integer, including negative ones; ``bottom`` must be
    nonnegative.  The result is always an integer.
    """
    if bottom < 0:
        raise DomainError(f"binomial lower index must be >= 0, got {bottom}")
    if top >= 0:
        return math.comb(top, bottom)
    # upper negation
    sign = -1 if bottom % 2 else 1
    return sign * math.comb(bottom - top - 1, bottom)


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, an integer string, or a JSON number into a Fraction."""
    if isinstance(text, bool):
        raise DomainError(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(text)
    if isinstance(text, str):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational: {text!r}") from exc
    raise DomainError(f"not a rational: {text!r}")


def format_rational(x) -> str:
    """Render a rational as ``"num/den"`` (``"0/1"`` for zero)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class ModScalar:
    """An element of the prime field Z/pZ."""

    __slots__ = ("residue", "p")

    def __init__(self, residue: int, p: int = DEFAULT_PRIME):
        self.p = p
        self.residue = residue % p

    def _coerce(self, other):
        if isinstance(other, ModScalar):
            if other.p != self.p:
                raise DomainError(f"mixed moduli {self.p} and {other.p}")
            return other.residue
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, _RationalABC):
            return rational_to_mod(Fraction(other), self.p).residue
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModScalar(self.residue + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModScalar(self.residue - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModScalar(o - self.residue, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModScalar(self.residue * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModScalar(self.residue * _inverse(o, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModScalar(o * _inverse(self.residue, self.p), self.p)

    def __neg__(self):
        return ModScalar(-self.residue, self.p)

    def __pow__(self, e: int):
        if e < 0:
            return ModScalar(pow(_inverse(self.residue, self.p), -e, self.p), self.p)
        return ModScalar(pow(self.residue, e, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, float) else NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return self.residue == o

    def __hash__(self):
        return hash((self.residue, self.p))

    def __bool__(self):
        return self.residue != 0

    def __int__(self):
        return self.residue

    def __repr__(self):
        return f"ModScalar({self.residue}, p={self.p})"


def _inverse(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise UnluckyPointError(f"division by zero modulo {p}")
    return pow(a, -1, p)


def mod_inverse(a: ModScalar) -> ModScalar:
    """Multiplicative inverse in the field; zero raises ``UnluckyPointError``."""
    return ModScalar(_inverse(a.residue, a.p), a.p)


def rational_to_mod(x, p: int = DEFAULT_PRIME) -> ModScalar:
    """Map ``num/den`` to ``num * den^-1 mod p``.

    Raises ``UnluckyPointError`` when ``p`` divides the denominator.
    """
    x = Fraction(x)
    if x.denominator % p == 0:
        raise UnluckyPointError(f"denominator {x.denominator} divisible by {p}")
    return ModScalar(x.numerator * pow(x.denominator, -1, p), p)


class Dual:
    """First-order dual number ``value + deriv*eps`` with ``eps**2 == 0``.

    Components may be any field scalar (normally ``Fraction``).
    """

    __slots__ = ("value", "deriv")

    def __init__(self, value, deriv=0):
        self.value = value
        self.deriv = deriv

    @staticmethod
    def _parts(other):
        if isinstance(other, Dual):
            return other.value, other.deriv
        return other, 0

    def __add__(self, other):
        v, d = self._parts(other)
        return Dual(self.value + v, self.deriv + d)

    __radd__ = __add__

    def __sub__(self, other):
        v, d = self._parts(other)
        return Dual(self.value - v, self.deriv - d)

    def __rsub__(self, other):
        v, d = self._parts(other)
        return Dual(v - self.value, d - self.deriv)

    def __mul__(self, other):
        v, d = self._parts(other)
        return Dual(self.value * v, self.value * d + self.deriv * v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v, d = self._parts(other)
        if v == 0:
            raise ZeroDivisionError("dual division by a zero value part")
        return Dual(self.value / v, (self.deriv * v - self.value * d) / (v * v))

    def __rtruediv__(self, other):
        v, d = self._parts(other)
        return Dual(v, d) / self

    def __neg__(self):
        return Dual(-self.value, -self.deriv)

    def __pow__(self, e: int):
        if e == 0:
            return Dual(1, 0)
        if e < 0:
            return 1 / (self ** -e)
        return Dual(self.value ** e, e * self.value ** (e - 1) * self.deriv)

    def __eq__(self, other):
        v, d = self._parts(other)
        return self.value == v and self.deriv == d

    def __hash__(self):
        return hash((self.value, self.deriv))

    def __repr__(self):
        return f"Dual({self.value!r}, {self.deriv!r})"


#: Dual numbers over the rationals, used for exact first derivatives.
DualRational = Dual
