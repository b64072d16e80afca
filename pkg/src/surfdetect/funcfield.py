"""Exact arithmetic in Q(t) with the t-adic valuation.

Elements are kept in a canonical form ``t**shift * num / den`` where both
``num`` and ``den`` have nonzero constant term, are coprime, and ``den`` is
monic.  The valuation is then just ``shift``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

__all__ = [
    "Poly",
    "RatFunc",
    "ZeroDivision",
    "INF",
    "t",
    "ONE",
    "ZERO",
    "monomial",
    "valuation",
    "laurent_prefix",
    "parse",
]

INF = math.inf

Coeffs = tuple  # tuple[Fraction, ...], ascending degree


class ZeroDivision(ZeroDivisionError):
    """Raised when dividing by the zero element of Q(t)."""


# -- polynomial helpers on coefficient tuples --------------------------------


def _trim(c: list) -> tuple:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a: Coeffs, b: Coeffs) -> Coeffs:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out)


def _psub(a: Coeffs, b: Coeffs) -> Coeffs:
    return _padd(a, tuple(-x for x in b))


def _pmul(a: Coeffs, b: Coeffs) -> Coeffs:
    if not a or not b:
        return ()
    if len(a) == 1:
        return tuple(a[0] * x for x in b)
    if len(b) == 1:
        return tuple(b[0] * x for x in a)
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _pdivmod(a: Coeffs, b: Coeffs) -> tuple[Coeffs, Coeffs]:
    if not b:
        raise ZeroDivision("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    if len(r) <= db:
        return (), tuple(r)
    q = [Fraction(0)] * (len(r) - db)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] / lb
        if c:
            q[k - db] = c
            for j in range(db + 1):
                r[k - db + j] -= c * b[j]
    return _trim(q), _trim(r[:db])


def _monic(a: Coeffs) -> Coeffs:
    lead = a[-1]
    if lead == 1:
        return a
    return tuple(x / lead for x in a)


def _pgcd(a: Coeffs, b: Coeffs) -> Coeffs:
    """Monic gcd over Q."""
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, (_monic(r) if r else r)
    return _monic(a) if a else a


# -- Poly --------------------------------------------------------------------


class Poly:
    """Polynomial in t over Q, coefficients indexed by degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs = _trim([Fraction(c) for c in coeffs])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(("Poly", self.coeffs))

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(_padd(self.coeffs, other.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return Poly(_psub(self.coeffs, other.coeffs))

    def __mul__(self, other: "Poly") -> "Poly":
        return Poly(_pmul(self.coeffs, other.coeffs))

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        q, r = _pdivmod(self.coeffs, other.coeffs)
        return Poly(q), Poly(r)

    def gcd(self, other: "Poly") -> "Poly":
        return Poly(_pgcd(self.coeffs, other.coeffs))

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        return f"Poly({[str(c) for c in self.coeffs]})"


# -- RatFunc -----------------------------------------------------------------

_ONE_C: Coeffs = (Fraction(1),)


def _strip_t(c: Coeffs) -> tuple[int, Coeffs]:
    k = 0
    while k < len(c) and c[k] == 0:
        k += 1
    return k, c[k:]


class RatFunc:
    """An element of Q(t) in canonical form.

    Construct with :func:`monomial`, :func:`parse` or ``RatFunc.from_polys``;
    the raw constructor trusts its arguments to be canonical already.
    """

    __slots__ = ("shift", "num", "den")

    def __init__(self, shift: int, num: Coeffs, den: Coeffs):
        self.shift = shift
        self.num = num
        self.den = den

    # construction

    @classmethod
    def from_polys(cls, num: Union[Poly, Sequence], den: Union[Poly, Sequence] = (1,)) -> "RatFunc":
        n = num.coeffs if isinstance(num, Poly) else _trim([Fraction(c) for c in num])
        d = den.coeffs if isinstance(den, Poly) else _trim([Fraction(c) for c in den])
        if not d:
            raise ZeroDivision("zero denominator")
        return cls._normalize(0, n, d)

    @classmethod
    def const(cls, c) -> "RatFunc":
        c = Fraction(c)
        if c == 0:
            return ZERO
        return cls(0, (c,), _ONE_C)

    @staticmethod
    def _normalize(shift: int, num: Coeffs, den: Coeffs) -> "RatFunc":
        if not num:
            return ZERO
        kn, num = _strip_t(num)
        kd, den = _strip_t(den)
        shift += kn - kd
        if len(den) > 1 and len(num) > 1:
            g = _pgcd(num, den)
            if len(g) > 1:
                num, _ = _pdivmod(num, g)
                den, _ = _pdivmod(den, g)
        lead = den[-1]
        if lead != 1:
            num = tuple(x / lead for x in num)
            den = tuple(x / lead for x in den)
        return RatFunc(shift, num, den)

    # predicates / accessors

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def valuation(self) -> Union[int, float]:
        return INF if not self.num else self.shift

    def is_monomial(self) -> bool:
        return len(self.num) == 1 and len(self.den) == 1

    def is_laurent_poly(self) -> bool:
        return len(self.den) == 1

    def laurent_coeffs(self) -> dict[int, Fraction]:
        """Degree -> coefficient, only for Laurent polynomials."""
        if len(self.den) != 1:
            raise ValueError(f"{self} is not a Laurent polynomial")
        return {self.shift + i: c for i, c in enumerate(self.num) if c}

    def unit_part(self) -> "RatFunc":
        return RatFunc(0, self.num, self.den) if self.num else ZERO

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFunc):
            if isinstance(other, (int, Fraction)):
                other = RatFunc.const(other)
            else:
                return NotImplemented
        return self.num == other.num and self.den == other.den and (
            not self.num or self.shift == other.shift
        )

    def __hash__(self) -> int:
        if not self.num:
            return hash(("RatFunc", 0))
        return hash(("RatFunc", self.shift, self.num, self.den))

    # arithmetic

    @staticmethod
    def _coerce(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, (int, Fraction)):
            return RatFunc.const(x)
        return NotImplemented

    def __neg__(self) -> "RatFunc":
        if not self.num:
            return self
        return RatFunc(self.shift, tuple(-x for x in self.num), self.den)

    def __add__(self, other) -> "RatFunc":
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num:
            return other
        if not other.num:
            return self
        s = min(self.shift, other.shift)
        a = (Fraction(0),) * (self.shift - s) + self.num
        b = (Fraction(0),) * (other.shift - s) + other.num
        if self.den == other.den:
            return RatFunc._normalize(s, _padd(a, b), self.den)
        num = _padd(_pmul(a, other.den), _pmul(b, self.den))
        return RatFunc._normalize(s, num, _pmul(self.den, other.den))

    __radd__ = __add__

    def __sub__(self, other) -> "RatFunc":
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "RatFunc":
        return RatFunc._coerce(other) - self

    def __mul__(self, other) -> "RatFunc":
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return ZERO
        shift = self.shift + other.shift
        if len(self.den) == 1 and len(other.den) == 1:
            if self.num == _ONE_C:
                return RatFunc(shift, other.num, _ONE_C)
            if other.num == _ONE_C:
                return RatFunc(shift, self.num, _ONE_C)
            return RatFunc(shift, _pmul(self.num, other.num), _ONE_C)
        n1, d2 = _cancel(self.num, other.den)
        n2, d1 = _cancel(other.num, self.den)
        num = _pmul(n1, n2)
        den = _pmul(d1, d2)
        lead = den[-1]
        if lead != 1:
            num = tuple(x / lead for x in num)
            den = tuple(x / lead for x in den)
        return RatFunc(shift, num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise ZeroDivision("inverse of zero in Q(t)")
        lead = self.num[-1]
        if lead == 1:
            return RatFunc(-self.shift, self.den, self.num)
        num = tuple(x / lead for x in self.den)
        den = tuple(x / lead for x in self.num)
        return RatFunc(-self.shift, num, den)

    def __truediv__(self, other) -> "RatFunc":
        other = RatFunc._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> "RatFunc":
        return RatFunc._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "RatFunc":
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def numerator_denominator(self) -> tuple[Poly, Poly]:
        """Plain polynomials (N, D) with self = N / D."""
        if not self.num:
            return Poly(()), Poly((1,))
        if self.shift >= 0:
            return Poly((0,) * self.shift + self.num), Poly(self.den)
        return Poly(self.num), Poly((0,) * (-self.shift) + self.den)

    def __call__(self, x):
        """Evaluate at a rational point (denominator must not vanish)."""
        n, d = self.numerator_denominator()
        dv = d(x)
        if dv == 0:
            raise ZeroDivision(f"pole at t = {x}")
        return n(x) / dv

    def __str__(self) -> str:
        if not self.num:
            return "0"
        n, d = self.numerator_denominator()
        ns = _poly_str(n.coeffs)
        if d.coeffs == _ONE_C:
            return ns
        ds = _poly_str(d.coeffs)
        if len(n.coeffs) - _lowest(n.coeffs) > 1:
            ns = f"({ns})"
        if len([c for c in d.coeffs if c]) > 1 or d.coeffs[-1] != 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self) -> str:
        return f"RatFunc({self})"


def _cancel(a: Coeffs, b: Coeffs) -> tuple[Coeffs, Coeffs]:
    if len(a) > 1 and len(b) > 1:
        g = _pgcd(a, b)
        if len(g) > 1:
            return _pdivmod(a, g)[0], _pdivmod(b, g)[0]
    return a, b


def _lowest(c: Coeffs) -> int:
    k = 0
    while k < len(c) and c[k] == 0:
        k += 1
    return k


def _term_str(c: Fraction, k: int) -> str:
    mag = abs(c)
    if k == 0:
        body = str(mag)
    else:
        tp = "t" if k == 1 else f"t^{k}"
        body = tp if mag == 1 else f"{mag}*{tp}"
    return body


def _poly_str(c: Coeffs) -> str:
    parts = []
    for k, x in enumerate(c):
        if not x:
            continue
        term = _term_str(x, k)
        if not parts:
            parts.append(f"-{term}" if x < 0 else term)
        else:
            parts.append(f" - {term}" if x < 0 else f" + {term}")
    return "".join(parts) if parts else "0"


ZERO = RatFunc(0, (), _ONE_C)
ONE = RatFunc(0, _ONE_C, _ONE_C)
t = RatFunc(1, _ONE_C, _ONE_C)

_MONO_CACHE: dict[int, RatFunc] = {}


def monomial(k: int, c=1) -> RatFunc:
    """c * t**k."""
    if c == 1:
        m = _MONO_CACHE.get(k)
        if m is None:
            m = _MONO_CACHE[k] = RatFunc(k, _ONE_C, _ONE_C)
        return m
    c = Fraction(c)
    if c == 0:
        return ZERO
    return RatFunc(k, (c,), _ONE_C)


def valuation(a: RatFunc) -> Union[int, float]:
    """Lowest degree of the Laurent expansion at t = 0; +inf for zero."""
    return a.valuation()


def laurent_prefix(a: RatFunc, k: int) -> tuple[int, list[Fraction]]:
    """Coefficients of t**v, ..., t**k in the Laurent expansion of ``a``.

    Returns ``(v, coeffs)`` with ``v = valuation(a)``.
    """
    if not a.num:
        raise ValueError("laurent_prefix of zero")
    v = a.shift
    if k < v:
        raise ValueError(f"k={k} below valuation {v}")
    n = k - v + 1
    num = list(a.num) + [Fraction(0)] * max(0, n - len(a.num))
    den = a.den
    d0 = den[0]
    out = []
    # power series of num/den by long division from the constant term
    for i in range(n):
        c = num[i] / d0
        out.append(c)
        if c:
            for j in range(1, len(den)):
                if i + j < n:
                    num[i + j] -= c * den[j]
    return v, out


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(t)|(\*\*|[-+*/^()]))")


def parse(text: str) -> RatFunc:
    """Parse expressions such as ``(t^2 + t^3)/(2 - t)`` or ``t^-1``."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected input at {pos}: {text[pos:]!r}")
        pos = m.end()
        if m.group(1):
            toks.append(("num", int(m.group(1))))
        elif m.group(2):
            toks.append(("t", None))
        else:
            op = m.group(3)
            toks.append(("op", "^" if op == "**" else op))
    p = _Parser(toks)
    val = p.expr()
    if p.i != len(toks):
        raise ValueError(f"trailing input in {text!r}")
    return val


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if kind and tok[0] != kind or val and tok[1] != val:
            raise ValueError(f"expected {val or kind}, got {tok}")
        self.i += 1
        return tok

    def expr(self) -> RatFunc:
        acc = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> RatFunc:
        acc = self.unary()
        while True:
            tok = self.peek()
            if tok in (("op", "*"), ("op", "/")):
                self.take()
                rhs = self.unary()
                acc = acc * rhs if tok[1] == "*" else acc / rhs
            elif tok[0] in ("num", "t") or tok == ("op", "("):
                acc = acc * self.unary()  # implicit multiplication: 2t
            else:
                return acc

    def unary(self) -> RatFunc:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> RatFunc:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            if self.peek() == ("op", "("):
                self.take()
                if self.peek() == ("op", "-"):
                    self.take()
                    sign = -sign
                e = self.take("num")[1]
                self.take("op", ")")
            else:
                e = self.take("num")[1]
            return base ** (sign * e)
        return base

    def atom(self) -> RatFunc:
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return RatFunc.const(val)
        if kind == "t":
            self.take()
            return t
        if (kind, val) == ("op", "("):
            self.take()
            v = self.expr()
            self.take("op", ")")
            return v
        raise ValueError(f"unexpected token {val!r}")
