"""Exact arithmetic: integer polynomials, rational functions, truncated
power series with rational coefficients, and the cyclotomic fields Q(zeta_q).

Everything here is immutable and arbitrary precision. Nothing touches
floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence, Union

Rational = Union[int, Fraction]


class NonExpandable(ValueError):
    """The rational function has a pole at z = 0 and no Maclaurin series."""


class NotRational(ValueError):
    """A cyclotomic quantity that should be rational is not."""


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class IntPoly:
    """Polynomial in z with arbitrary-precision integer coefficients.

    ``coeffs[i]`` is the coefficient of ``z**i``. The tuple is trimmed so the
    last entry is nonzero; the zero polynomial has ``coeffs == ()``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = _trim(int(x) for x in coeffs)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("IntPoly is immutable")

    def __reduce__(self):
        return (IntPoly, (self.coeffs,))

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> IntPoly:
        return cls([0] * k + [c])

    @classmethod
    def const(cls, c: int) -> IntPoly:
        return cls([c])

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int) -> int:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = IntPoly.const(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(("IntPoly", self.coeffs))

    def __repr__(self) -> str:
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = "z" if k == 1 else f"z^{k}"
                if c == 1:
                    terms.append(mono)
                elif c == -1:
                    terms.append("-" + mono)
                else:
                    terms.append(f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ")

    def _coerce(self, other) -> IntPoly:
        if isinstance(other, IntPoly):
            return other
        if isinstance(other, int):
            return IntPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return IntPoly(out)

    __radd__ = __add__

    def __neg__(self) -> IntPoly:
        return IntPoly(-x for x in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(x * other for x in self.coeffs) if other else IntPoly()
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPoly()
        if len(a) < len(b):
            a, b = b, a
        out = [0] * (len(a) + len(b) - 1)
        # b is the shorter factor; sparse factors like (1 - z^q)^k are common
        for j, y in enumerate(b):
            if y == 0:
                continue
            for i, x in enumerate(a, j):
                out[i] += x * y
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> IntPoly:
        if e < 0:
            raise ValueError("negative exponent")
        result = IntPoly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def shift(self, k: int) -> IntPoly:
        """Multiply by z**k (k >= 0)."""
        if not self.coeffs:
            return self
        return IntPoly((0,) * k + self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def low_order(self) -> int:
        """Multiplicity of z as a factor (0 for the zero polynomial)."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return 0

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def primitive(self) -> IntPoly:
        g = self.content()
        if g == 0:
            return self
        if self.lead < 0:
            g = -g
        return IntPoly(c // g for c in self.coeffs)

    def divexact(self, other: IntPoly) -> IntPoly:
        """Exact quotient; raises ValueError if ``other`` does not divide."""
        q, r = self.divmod(other)
        if r:
            raise ValueError("division is not exact")
        return q

    def divmod(self, other: IntPoly) -> tuple[IntPoly, IntPoly]:
        """Division with remainder, requiring integer quotient coefficients."""
        if not other:
            raise ZeroDivisionError("division by zero polynomial")
        rem = list(self.coeffs)
        db, lb = other.degree, other.lead
        if len(rem) - 1 < db:
            return IntPoly(), self
        quot = [0] * (len(rem) - db)
        b = other.coeffs
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            qk, r = divmod(c, lb)
            if r:
                raise ValueError("non-integral quotient")
            quot[k - db] = qk
            for i, y in enumerate(b):
                rem[k - db + i] -= qk * y
        return IntPoly(quot), IntPoly(rem)

    def pseudo_rem(self, other: IntPoly) -> IntPoly:
        rem = list(self.coeffs)
        db, lb = other.degree, other.lead
        b = other.coeffs
        while len(rem) - 1 >= db and rem:
            k = len(rem) - 1
            c = rem[k]
            rem = [x * lb for x in rem]
            for i, y in enumerate(b):
                rem[k - db + i] -= c * y
            while rem and rem[-1] == 0:
                rem.pop()
        return IntPoly(rem)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> IntPoly:
        return cls(int(x) for x in data)


Z = IntPoly([0, 1])
ONE = IntPoly([1])


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd over Q[z], normalised to positive leading coefficient."""
    a, b = a.primitive(), b.primitive()
    if not a:
        return b
    if not b:
        return a
    if a.degree < b.degree:
        a, b = b, a
    while b:
        r = a.pseudo_rem(b)
        a, b = b, r.primitive()
    return a.primitive()


def poly_arith(a: IntPoly, b: IntPoly, op: str) -> IntPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def one_minus_zk_pow(k: int, e: int) -> IntPoly:
    """(1 - z^k)^e, built directly from binomial coefficients."""
    out = [0] * (k * e + 1)
    for i in range(e + 1):
        out[k * i] = (-1) ** i * math.comb(e, i)
    return IntPoly(out)


class RationalFunction:
    """``z**zpow * num / den`` with integer polynomials.

    Factors of z are moved from num/den into ``zpow`` on construction and the
    denominator gets a positive leading coefficient. Full gcd reduction is
    deferred to :meth:`reduced`; equality is by cross-multiplication.
    """

    __slots__ = ("num", "den", "zpow")

    def __init__(self, num, den=ONE, zpow: int = 0):
        if isinstance(num, int):
            num = IntPoly.const(num)
        if isinstance(den, int):
            den = IntPoly.const(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if num:
            k = num.low_order()
            if k:
                num = IntPoly(num.coeffs[k:])
                zpow += k
        else:
            zpow = 0
            den = ONE
        k = den.low_order()
        if k:
            den = IntPoly(den.coeffs[k:])
            zpow -= k
        if den.lead < 0:
            num, den = -num, -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "zpow", zpow)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    def __reduce__(self):
        return (RationalFunction, (self.num, self.den, self.zpow))

    def __repr__(self) -> str:
        return f"RationalFunction(num={self.num}, den={self.den}, zpow={self.zpow})"

    def is_zero(self) -> bool:
        return not self.num

    def _aligned(self, other: RationalFunction) -> tuple[IntPoly, IntPoly, IntPoly, IntPoly, int]:
        m = min(self.zpow, other.zpow)
        return (self.num.shift(self.zpow - m), self.den,
                other.num.shift(other.zpow - m), other.den, m)

    def __add__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return other
        a, da, b, db, m = self._aligned(other)
        if da == db:
            return RationalFunction(a + b, da, m)
        return RationalFunction(a * db + b * da, da * db, m)

    __radd__ = __add__

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.num, self.den, self.zpow)

    def __sub__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return other
        return RationalFunction(self.num * other.num, self.den * other.den,
                                self.zpow + other.zpow)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num,
                                self.zpow - other.zpow)

    def __eq__(self, other) -> bool:
        other = _as_rf(other)
        if other is NotImplemented:
            return other
        return rat_equal(self, other)

    def __hash__(self) -> int:
        r = self.reduced()
        return hash((r.num, r.den, r.zpow))

    def reduced(self) -> RationalFunction:
        """Cancel the polynomial gcd and common integer content."""
        g = poly_gcd(self.num, self.den)
        num, den = self.num, self.den
        if g.degree > 0:
            num, den = num.divexact(g), den.divexact(g)
        c = math.gcd(num.content(), den.content())
        if c > 1:
            num = IntPoly(x // c for x in num.coeffs)
            den = IntPoly(x // c for x in den.coeffs)
        return RationalFunction(num, den, self.zpow)

    def to_json(self) -> dict:
        r = self.reduced()
        return {"num": r.num.to_json(), "den": r.den.to_json(), "zpow": r.zpow}

    @classmethod
    def from_json(cls, data: dict) -> RationalFunction:
        return cls(IntPoly.from_json(data["num"]), IntPoly.from_json(data["den"]),
                   int(data["zpow"]))


def _as_rf(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, (int, IntPoly)):
        return RationalFunction(x)
    return NotImplemented


def rat_equal(f: RationalFunction, g: RationalFunction) -> bool:
    """Equality as rational functions, decided by cross-multiplication."""
    a, da, b, db, _ = f._aligned(g)
    if da == db:
        return a == b
    return a * db == b * da


class TruncatedSeries:
    """Power series prefix ``sum_{k <= order} coeffs[k] z^k`` over Q."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable[Rational], order: int):
        c = [Fraction(x) for x in coeffs][: order + 1]
        c += [Fraction(0)] * (order + 1 - len(c))
        object.__setattr__(self, "coeffs", tuple(c))
        object.__setattr__(self, "order", order)

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedSeries is immutable")

    def __reduce__(self):
        return (TruncatedSeries, (self.coeffs, self.order))

    def __repr__(self) -> str:
        return f"TruncatedSeries({[str(c) for c in self.coeffs]}, order={self.order})"

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def __len__(self) -> int:
        return self.order + 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        k = min(self.order, other.order)
        return self.coeffs[: k + 1] == other.coeffs[: k + 1]

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def truncate(self, order: int) -> TruncatedSeries:
        return TruncatedSeries(self.coeffs, min(order, self.order))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedSeries([other], self.order)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        k = min(self.order, other.order)
        return TruncatedSeries((a + b for a, b in zip(self.coeffs, other.coeffs)), k)

    __radd__ = __add__

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries((-a for a in self.coeffs), self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries((a * other for a in self.coeffs), self.order)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        k = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (k + 1)
        for i in range(k + 1):
            if a[i]:
                ai = a[i]
                for j in range(k + 1 - i):
                    out[i + j] += ai * b[j]
        return TruncatedSeries(out, k)

    __rmul__ = __mul__

    def inverse(self) -> TruncatedSeries:
        c = self.coeffs
        if c[0] == 0:
            raise NonExpandable("series with zero constant term has no inverse")
        out = [Fraction(0)] * (self.order + 1)
        inv0 = 1 / c[0]
        out[0] = inv0
        for k in range(1, self.order + 1):
            s = sum(c[i] * out[k - i] for i in range(1, k + 1))
            out[k] = -s * inv0
        return TruncatedSeries(out, self.order)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)


def series_expand(f: RationalFunction, K: int) -> TruncatedSeries:
    """Maclaurin coefficients 0..K of ``f``, exactly."""
    num, den, zpow = f.num, f.den, f.zpow
    if not num:
        return TruncatedSeries([], K)
    d0 = den[0]
    if d0 == 0:
        raise NonExpandable("denominator vanishes at z = 0")
    # coefficients of num/den up to degree K - zpow
    top = K - zpow
    if top < 0:
        if zpow < 0:
            raise NonExpandable("pole at z = 0")
        return TruncatedSeries([], K)
    d = den.coeffs
    out: list[Fraction] = []
    integral = d0 in (1, -1)
    for k in range(top + 1):
        s = num[k] - sum(d[i] * out[k - i] for i in range(1, min(k, len(d) - 1) + 1))
        out.append(s * d0 if integral else Fraction(s, d0))
    if zpow < 0:
        if any(out[: -zpow]):
            raise NonExpandable("pole at z = 0")
        out = out[-zpow:]
    else:
        out = [0] * zpow + out
    return TruncatedSeries(out, K)


@lru_cache(maxsize=None)
def cyclotomic_poly(q: int) -> IntPoly:
    """The q-th cyclotomic polynomial, by exact division of z^q - 1."""
    if q < 1:
        raise ValueError("q must be positive")
    p = IntPoly.monomial(q) - ONE
    for d in range(1, q):
        if q % d == 0:
            p = p.divexact(cyclotomic_poly(d))
    return p


def euler_phi(q: int) -> int:
    return sum(1 for k in range(1, q + 1) if math.gcd(k, q) == 1)


@lru_cache(maxsize=None)
def _power_basis(q: int) -> tuple[tuple[int, ...], ...]:
    """Coordinates of zeta^k modulo Phi_q for 0 <= k < q."""
    phi = cyclotomic_poly(q)
    m = phi.degree
    rows = []
    for k in range(q):
        _, r = IntPoly.monomial(k).divmod(phi)
        rows.append(tuple(r[i] for i in range(m)))
    return tuple(rows)


class CycloElem:
    """Element of Q(zeta_q) as rational coordinates in 1, zeta, ..., zeta^(phi-1)."""

    __slots__ = ("q", "coords")

    def __init__(self, q: int, coords: Iterable[Rational]):
        m = cyclotomic_poly(q).degree
        c = list(coords)
        if len(c) > m:
            c = _reduce_mod_phi(q, c)
        c += [0] * (m - len(c))
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "coords", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("CycloElem is immutable")

    def __reduce__(self):
        return (CycloElem, (self.q, self.coords))

    @classmethod
    def zeta(cls, q: int, k: int = 1) -> CycloElem:
        return cls(q, _power_basis(q)[k % q])

    @classmethod
    def rational(cls, q: int, r: Rational) -> CycloElem:
        return cls(q, [r])

    def __repr__(self) -> str:
        return f"CycloElem(q={self.q}, coords={[str(c) for c in self.coords]})"

    def _check(self, other) -> CycloElem:
        if isinstance(other, (int, Fraction)):
            return CycloElem.rational(self.q, other)
        if not isinstance(other, CycloElem):
            return NotImplemented
        if other.q != self.q:
            raise ValueError("conductor mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return CycloElem(self.q, (a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self) -> CycloElem:
        return CycloElem(self.q, (-a for a in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElem(self.q, (a * other for a in self.coords))
        other = self._check(other)
        if other is NotImplemented:
            return other
        a, b = self.coords, other.coords
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return CycloElem(self.q, _reduce_mod_phi(self.q, prod))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> CycloElem:
        if e < 0:
            raise ValueError("negative exponent")
        out = CycloElem.rational(self.q, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CycloElem.rational(self.q, other)
        if not isinstance(other, CycloElem):
            return NotImplemented
        return self.q == other.q and self.coords == other.coords

    def __hash__(self) -> int:
        return hash((self.q, self.coords))

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise NotRational(f"{self!r} is not rational")
        return Fraction(self.coords[0])


def _reduce_mod_phi(q: int, coeffs: Sequence[Rational]) -> list:
    phi = cyclotomic_poly(q)
    m = phi.degree
    c = list(coeffs)
    p = phi.coeffs
    # phi is monic
    for k in range(len(c) - 1, m - 1, -1):
        x = c[k]
        if x:
            for i in range(m + 1):
                c[k - m + i] -= x * p[i]
    return c[:m]


def cyclo_average(q: int, term: Callable[[int], object]):
    """Sum ``term(h)`` over h = 0..q-1 and demand a rational result.

    ``term`` may yield numbers, :class:`CycloElem`, :class:`TruncatedSeries`,
    or lists of CycloElem read as series coefficients. Numbers come back as a
    Fraction, series as a TruncatedSeries; anything irrational raises
    :class:`NotRational`.
    """
    total = None
    for h in range(q):
        t = term(h)
        if isinstance(t, (list, tuple)):
            if total is None:
                total = list(t)
            else:
                total = [a + b for a, b in zip(total, t)]
        elif total is None:
            total = t
        else:
            total = total + t
    if isinstance(total, list):
        out = []
        for c in total:
            out.append(c.to_rational() if isinstance(c, CycloElem) else Fraction(c))
        return TruncatedSeries(out, len(out) - 1)
    if isinstance(total, CycloElem):
        return total.to_rational()
    if isinstance(total, (int, Fraction)):
        return Fraction(total)
    return total
