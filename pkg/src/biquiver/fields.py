"""Exact scalars: the rationals, prime fields, and univariate polynomials.

Everything is integer/Fraction arithmetic; no floats anywhere. Field objects
are small stateless value types that the rest of the package threads through
wherever scalars are produced or consumed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class RationalField:
    """The field of rational numbers, elements are Fraction."""

    name = "Q"
    characteristic = 0
    finite = False

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "RationalField()"

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def add(self, a: Fraction, b: Fraction) -> Fraction:
        return a + b

    def sub(self, a: Fraction, b: Fraction) -> Fraction:
        return a - b

    def mul(self, a: Fraction, b: Fraction) -> Fraction:
        return a * b

    def neg(self, a: Fraction) -> Fraction:
        return -a

    def inv(self, a: Fraction) -> Fraction:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def is_zero(self, a: Fraction) -> bool:
        return a == 0

    def from_fraction(self, q: Fraction) -> Fraction:
        return Fraction(q)

    def format(self, a: Fraction) -> str:
        return str(a)

    def parse(self, s: str) -> Fraction:
        return Fraction(s)

    def random_element(self, rng) -> Fraction:
        # small numerators keep hom-space sampling exact and readable
        return Fraction(rng.randint(-9, 9))

    def candidates(self) -> Iterator[Fraction]:
        """0, 1, -1, 2, -2, ... for deterministic searches."""
        yield Fraction(0)
        n = 1
        while True:
            yield Fraction(n)
            yield Fraction(-n)
            n += 1


class PrimeField:
    """F_p for a prime p, elements are ints in range(p)."""

    finite = True

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"not a prime: {p}")
        self.p = p
        self.name = f"F{p}"
        self.characteristic = p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def is_zero(self, a: int) -> bool:
        return a % self.p == 0

    def from_fraction(self, q: Fraction) -> int:
        den = q.denominator % self.p
        if den == 0:
            raise ZeroDivisionError(f"denominator of {q} vanishes mod {self.p}")
        return (q.numerator % self.p) * self.inv(den) % self.p

    def format(self, a: int) -> str:
        return str(a % self.p)

    def parse(self, s: str) -> int:
        return self.from_fraction(Fraction(s))

    def random_element(self, rng) -> int:
        return rng.randrange(self.p)

    def elements(self) -> range:
        return range(self.p)

    def candidates(self) -> range:
        return range(self.p)


class PolyRing:
    """Univariate polynomials over a base field, for one-parameter families.

    Elements are tuples of base-field coefficients, ascending degree,
    trailing zeros trimmed; () is zero. Not a field: no inv.
    """

    def __init__(self, base):
        self.base = base
        self.name = f"{base.name}[t]"
        self.characteristic = base.characteristic

    def __eq__(self, other):
        return isinstance(other, PolyRing) and other.base == self.base

    def __hash__(self):
        return hash(("poly", self.base))

    def __repr__(self):
        return f"PolyRing({self.base!r})"

    @property
    def zero(self) -> tuple:
        return ()

    @property
    def one(self) -> tuple:
        return (self.base.one,)

    def variable(self) -> tuple:
        return (self.base.zero, self.base.one)

    def _trim(self, coeffs) -> tuple:
        cs = list(coeffs)
        while cs and self.base.is_zero(cs[-1]):
            cs.pop()
        return tuple(cs)

    def constant(self, a) -> tuple:
        return self._trim([a])

    def add(self, f: tuple, g: tuple) -> tuple:
        n = max(len(f), len(g))
        pad_f = f + (self.base.zero,) * (n - len(f))
        pad_g = g + (self.base.zero,) * (n - len(g))
        return self._trim(self.base.add(a, b) for a, b in zip(pad_f, pad_g))

    def sub(self, f: tuple, g: tuple) -> tuple:
        return self.add(f, self.neg(g))

    def neg(self, f: tuple) -> tuple:
        return tuple(self.base.neg(a) for a in f)

    def mul(self, f: tuple, g: tuple) -> tuple:
        if not f or not g:
            return ()
        out = [self.base.zero] * (len(f) + len(g) - 1)
        for i, a in enumerate(f):
            for j, b in enumerate(g):
                out[i + j] = self.base.add(out[i + j], self.base.mul(a, b))
        return self._trim(out)

    def is_zero(self, f: tuple) -> bool:
        return len(f) == 0

    def from_fraction(self, q: Fraction) -> tuple:
        return self._trim([self.base.from_fraction(q)])

    def evaluate(self, f: tuple, x):
        """Value of f at a base-field point, by Horner."""
        acc = self.base.zero
        for a in reversed(f):
            acc = self.base.add(self.base.mul(acc, x), a)
        return acc

    def format(self, f: tuple) -> str:
        if not f:
            return "0"
        parts = []
        for i, a in enumerate(f):
            if self.base.is_zero(a):
                continue
            c = self.base.format(a)
            if i == 0:
                parts.append(c)
            elif i == 1:
                parts.append("t" if c == "1" else f"{c}*t")
            else:
                parts.append(f"t^{i}" if c == "1" else f"{c}*t^{i}")
        return " + ".join(parts)


def field_from_spec(s: str):
    """"Q" or "F<p>" to a field object."""
    if s == "Q":
        return RationalField()
    if s.startswith("F"):
        return PrimeField(int(s[1:]))
    raise ValueError(f"unknown field spec: {s!r}")


def field_to_spec(field) -> str:
    return field.name
