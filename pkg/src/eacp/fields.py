"""Scalar backends for the exact algebra kernel.

Four ground-field backends: rational numbers, Gaussian rationals,
quadratic extensions Q(sqrt(d)), and certified complex floats with an
explicit zero-test tolerance.  Every algebra fixes one backend and all
of its scalars live there.  Exact backends compare bit-exactly; the
certified backend compares within epsilon and says so in provenance.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, ClassVar, Optional, Union


class BackendError(TypeError):
    """Scalars from incompatible backends were mixed."""


class PromotionError(TypeError):
    """No common exact field contains both operands."""


class ScalarFormatError(ValueError):
    """A scalar literal could not be parsed."""


def as_fraction(x: Any) -> Fraction:
    """Interpret ints, 'p/q' strings and Fractions as exact rationals."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ScalarFormatError(f"bad rational literal {x!r}: {exc}") from None
    raise ScalarFormatError(f"cannot interpret {x!r} as a rational number")


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write n = s*s*d with d squarefree, sign(d) = sign(n).  n != 0."""
    if n == 0:
        raise ValueError("0 has no squarefree decomposition")
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, d = 1, 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                d *= p
        p += 1 if p == 2 else 2
    d *= n  # leftover factor is 1 or prime
    return s, sign * d


def fraction_sqrt(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a rational, or None if irrational/negative."""
    if q < 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def _binpow(x, k: int):
    out = None
    base = x
    while k:
        if k & 1:
            out = base if out is None else out * base
        base = base * base
        k >>= 1
    return out


@dataclass(frozen=True)
class GaussianRational:
    """Element a + b*i of Q(i) with exact rational parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def _lift(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(Fraction(x), Fraction(0))
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        c = o.conjugate()
        num = self * c
        return GaussianRational(num.re / n, num.im / n)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k == 0:
            return GaussianRational(Fraction(1), Fraction(0))
        if k < 0:
            return 1 / (self ** (-k))
        return _binpow(self, k)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    __repr__ = __str__


@dataclass(frozen=True)
class QuadExt:
    """Element a + b*sqrt(d) of Q(sqrt d); d squarefree, not 0 or 1."""

    a: Fraction
    b: Fraction
    d: int

    def _lift(self, x) -> "QuadExt":
        if isinstance(x, QuadExt):
            if x.d != self.d:
                raise BackendError(f"mixed radicands sqrt({self.d}) and sqrt({x.d})")
            return x
        if isinstance(x, (int, Fraction)):
            return QuadExt(Fraction(x), Fraction(0), self.d)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExt(
            self.a * o.a + self.b * o.b * self.d,
            self.a * o.b + self.b * o.a,
            self.d,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic extension")
        num = self * o.conjugate()
        return QuadExt(num.a / n, num.b / n, self.d)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k == 0:
            return QuadExt(Fraction(1), Fraction(0), self.d)
        if k < 0:
            return 1 / (self ** (-k))
        return _binpow(self, k)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadExt):
            return self.d == other.d and self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def to_complex(self) -> complex:
        root = cmath.sqrt(self.d)
        return complex(self.a) + complex(self.b) * root

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        tail = f"{abs(self.b)}*sqrt({self.d})" if abs(self.b) != 1 else f"sqrt({self.d})"
        if self.a == 0:
            return tail if self.b > 0 else "-" + tail
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{tail}"

    __repr__ = __str__


Scalar = Union[Fraction, GaussianRational, QuadExt, complex]


class Field:
    """Shared backend behavior; concrete fields fill in the specifics."""

    name: ClassVar[str] = "abstract"
    exact: ClassVar[bool] = True

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    @property
    def half(self):
        return self.coerce(Fraction(1, 2))

    def coerce(self, x) -> Scalar:
        raise NotImplementedError

    def is_zero(self, s) -> bool:
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        return self.is_zero(a - b)

    def sqrt(self, s) -> Optional[Scalar]:
        """A square root of s inside the field, or None."""
        raise NotImplementedError

    def is_real_nonneg(self, s) -> Optional[bool]:
        """True/False when the sign is provable, None when it is not."""
        return None

    def parse_json(self, v) -> Scalar:
        raise NotImplementedError

    def to_json(self, s):
        raise NotImplementedError

    def fmt(self, s) -> str:
        return str(s)

    def provenance(self) -> str:
        return "exact" if self.exact else "certified"

    def pivot_key(self, s) -> float:
        """Pivot preference for elimination; exact fields only need nonzero."""
        return 0.0 if self.is_zero(s) else 1.0

    def describe(self) -> dict:
        return {"field": self.name}


@dataclass(frozen=True)
class RationalField(Field):
    name: ClassVar[str] = "rational"

    def coerce(self, x):
        if isinstance(x, QuadExt):
            if x.b == 0:
                return x.a
            raise BackendError(f"{x} is not rational")
        if isinstance(x, GaussianRational):
            if x.im == 0:
                return x.re
            raise BackendError(f"{x} is not rational")
        return as_fraction(x)

    def is_zero(self, s):
        return s == 0

    def sqrt(self, s):
        return fraction_sqrt(s)

    def is_real_nonneg(self, s):
        return s >= 0

    def parse_json(self, v):
        if isinstance(v, bool) or isinstance(v, (list, dict, float)):
            raise ScalarFormatError(
                f"rational entries must be integers or 'p/q' strings, got {v!r}"
            )
        return as_fraction(v)

    def to_json(self, s):
        return str(s)


@dataclass(frozen=True)
class GaussianField(Field):
    name: ClassVar[str] = "gaussian"

    def coerce(self, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, QuadExt):
            if x.b == 0:
                return GaussianRational(x.a, Fraction(0))
            if x.d == -1:
                return GaussianRational(x.a, x.b)
            raise BackendError(f"{x} is not a Gaussian rational")
        return GaussianRational(as_fraction(x), Fraction(0))

    def is_zero(self, s):
        return s.re == 0 and s.im == 0

    def sqrt(self, s):
        # (x + yi)^2 = a + bi  =>  x^2 - y^2 = a, 2xy = b
        a, b = s.re, s.im
        if b == 0:
            r = fraction_sqrt(a) if a >= 0 else fraction_sqrt(-a)
            if r is None:
                return None
            if a >= 0:
                return GaussianRational(r, Fraction(0))
            return GaussianRational(Fraction(0), r)
        n = fraction_sqrt(a * a + b * b)
        if n is None:
            return None
        x = fraction_sqrt((a + n) / 2)
        if x is None or x == 0:
            return None
        return GaussianRational(x, b / (2 * x))

    def is_real_nonneg(self, s):
        if s.im != 0:
            return False
        return s.re >= 0

    def parse_json(self, v):
        if isinstance(v, dict):
            extra = set(v) - {"re", "im"}
            if extra:
                raise ScalarFormatError(f"unexpected keys {sorted(extra)} in gaussian scalar")
            return GaussianRational(
                as_fraction(v.get("re", 0)), as_fraction(v.get("im", 0))
            )
        return GaussianRational(as_fraction(v), Fraction(0))

    def to_json(self, s):
        return {"re": str(s.re), "im": str(s.im)}


@dataclass(frozen=True)
class QuadraticField(Field):
    d: int
    name: ClassVar[str] = "quadratic"

    def __post_init__(self):
        if self.d in (0, 1):
            raise ValueError("radicand must not be 0 or 1")
        s, d0 = squarefree_decompose(self.d)
        if s != 1 or d0 != self.d:
            raise ValueError(f"radicand {self.d} is not squarefree")

    def coerce(self, x):
        if isinstance(x, QuadExt):
            if x.d == self.d:
                return x
            if x.b == 0:
                return QuadExt(x.a, Fraction(0), self.d)
            raise BackendError(f"cannot place {x} into Q(sqrt {self.d})")
        if isinstance(x, GaussianRational):
            if x.im == 0:
                return QuadExt(x.re, Fraction(0), self.d)
            if self.d == -1:
                return QuadExt(x.re, x.im, self.d)
            raise BackendError(f"cannot place {x} into Q(sqrt {self.d})")
        return QuadExt(as_fraction(x), Fraction(0), self.d)

    def is_zero(self, s):
        return s.a == 0 and s.b == 0

    def sqrt(self, s):
        # (x + y sqrt d)^2 = a + b sqrt d
        a, b = s.a, s.b
        if b == 0:
            r = fraction_sqrt(a)
            if r is not None:
                return QuadExt(r, Fraction(0), self.d)
            if self.d != 0 and a != 0:
                r = fraction_sqrt(a / self.d)
                if r is not None:
                    return QuadExt(Fraction(0), r, self.d)
            return None
        n = fraction_sqrt(a * a - b * b * self.d)
        if n is None:
            return None
        for t in ((a + n) / 2, (a - n) / 2):
            x = fraction_sqrt(t)
            if x is not None and x != 0:
                return QuadExt(x, b / (2 * x), self.d)
        return None

    def is_real_nonneg(self, s):
        if self.d < 0:
            if s.b != 0:
                return False
            return s.a >= 0
        a, b = s.a, s.b
        if b == 0:
            return a >= 0
        if a == 0:
            return b > 0
        if a > 0 and b > 0:
            return True
        if a < 0 and b < 0:
            return False
        if a > 0:  # b < 0: nonneg iff a >= |b| sqrt d
            return a * a >= b * b * self.d
        return b * b * self.d >= a * a

    def parse_json(self, v):
        if isinstance(v, dict):
            extra = set(v) - {"a", "b"}
            if extra:
                raise ScalarFormatError(f"unexpected keys {sorted(extra)} in quadratic scalar")
            return QuadExt(as_fraction(v.get("a", 0)), as_fraction(v.get("b", 0)), self.d)
        return QuadExt(as_fraction(v), Fraction(0), self.d)

    def to_json(self, s):
        return {"a": str(s.a), "b": str(s.b)}

    def describe(self):
        return {"field": self.name, "d": self.d}


DEFAULT_EPSILON = Fraction(1, 10**12)


@dataclass(frozen=True)
class CertifiedField(Field):
    epsilon: Fraction = DEFAULT_EPSILON
    name: ClassVar[str] = "float"
    exact: ClassVar[bool] = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    def coerce(self, x):
        if isinstance(x, complex):
            return x
        if isinstance(x, (int, float, Fraction)):
            return complex(x)
        if isinstance(x, GaussianRational):
            return complex(float(x.re), float(x.im))
        if isinstance(x, QuadExt):
            return x.to_complex()
        if isinstance(x, str):
            return complex(float(as_fraction(x)))
        raise BackendError(f"cannot interpret {x!r} as a certified float")

    def is_zero(self, s):
        return abs(s) <= float(self.epsilon)

    def sqrt(self, s):
        return cmath.sqrt(s)

    def parse_json(self, v):
        if isinstance(v, dict):
            return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
        if isinstance(v, bool):
            raise ScalarFormatError("booleans are not scalars")
        if isinstance(v, (int, float)):
            return complex(v)
        if isinstance(v, str):
            return complex(float(as_fraction(v)))
        raise ScalarFormatError(f"bad float scalar {v!r}")

    def to_json(self, s):
        return {"re": s.real, "im": s.imag}

    def fmt(self, s):
        if abs(s.imag) <= float(self.epsilon):
            return repr(s.real)
        return repr(s)

    def provenance(self):
        return f"certified(epsilon={self.epsilon})"

    def pivot_key(self, s):
        return abs(s)

    def describe(self):
        return {"field": self.name, "epsilon": str(self.epsilon)}


RATIONAL = RationalField()
GAUSSIAN = GaussianField()


def field_from_json(obj: dict) -> Field:
    """Build a field from the JSON header of an algebra file."""
    name = obj.get("field", "rational")
    if name == "rational":
        return RATIONAL
    if name == "gaussian":
        return GAUSSIAN
    if name == "quadratic":
        if "d" not in obj:
            raise ScalarFormatError("quadratic field requires a radicand 'd'")
        return QuadraticField(int(obj["d"]))
    if name == "float":
        eps = obj.get("epsilon")
        return CertifiedField(as_fraction(eps)) if eps is not None else CertifiedField()
    raise ScalarFormatError(f"unknown field {name!r}")


def common_field(f: Field, g: Field) -> Field:
    """Smallest supported field containing both; raises PromotionError."""
    if f == g:
        return f
    if isinstance(f, RationalField):
        return g
    if isinstance(g, RationalField):
        return f
    if isinstance(f, CertifiedField) and g.exact:
        return f
    if isinstance(g, CertifiedField) and f.exact:
        return g
    raise PromotionError(f"no common exact field for {f.name} and {g.name}")
