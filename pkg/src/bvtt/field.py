"""Exact scalar fields: the rationals and prime fields F_p."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@total_ordering
class Mod:
    """Residue class modulo a prime, stored as its least non-negative representative."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.p = p
        self.value = value % p

    def _coerce(self, other):
        if isinstance(other, Mod):
            if other.p != self.p:
                raise ValueError(f"mixing F_{self.p} and F_{other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return (other.numerator * pow(other.denominator, -1, self.p)) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.value * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return Mod(self.value * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.value == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return Mod(o * pow(self.value, -1, self.p), self.p)

    def __neg__(self):
        return Mod(-self.value, self.p)

    def __pos__(self):
        return self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.value == o

    def __lt__(self, other):
        return self.value < self._coerce(other)

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} mod {self.p}"

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class FieldSpec:
    """The ground field K: ``FieldSpec("Q")`` or ``FieldSpec("F", p)``."""

    kind: str = "Q"
    p: int | None = None

    def __post_init__(self):
        if self.kind == "Q":
            if self.p is not None:
                raise ValueError("the rationals take no modulus")
        elif self.kind == "F":
            if self.p is None or not is_prime(self.p):
                raise ValueError(f"F_p needs a prime p, got {self.p!r}")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls("Q")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls("F", p)

    @property
    def is_prime_field(self) -> bool:
        return self.kind == "F"

    def characteristic(self) -> int:
        return 0 if self.kind == "Q" else self.p

    def __call__(self, x) -> Fraction | Mod:
        """Coerce an int, Fraction or residue into this field."""
        if self.kind == "Q":
            if type(x) is Fraction:
                return x
            if isinstance(x, Mod):
                raise TypeError("cannot lift a residue to Q")
            return Fraction(x)
        if type(x) is Mod:
            if x.p != self.p:
                raise ValueError(f"residue mod {x.p} is not in F_{self.p}")
            return x
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise ZeroDivisionError(f"{x} has no image in F_{self.p}")
        return Mod(x.numerator * pow(x.denominator, -1, self.p), self.p)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def describe(self) -> str:
        return "Q" if self.kind == "Q" else f"F {self.p}"

    def __str__(self):
        return "Q" if self.kind == "Q" else f"F_{self.p}"


QQ = FieldSpec.rationals()


def format_scalar(c) -> str:
    if isinstance(c, Mod):
        return str(c.value)
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
