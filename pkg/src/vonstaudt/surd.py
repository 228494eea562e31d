"""Exact real numbers in multi-quadratic extensions of the rationals.

A :class:`Surd` is a finite sum ``c_0 + c_1*sqrt(r_1) + c_2*sqrt(r_1)*sqrt(r_2) + ...``
with rational coefficients and positive integer radicands.  Square roots are
always the positive real root, so every value is a definite real number and
comparisons are exact.

Sign determination uses the classical recursion on one generator at a time:
for ``a + b*sqrt(g)`` with ``a, b`` free of ``g``, the sign is decided by the
signs of ``a``, ``b`` and ``a**2 - g*b**2``.  A floating point filter answers
the easy cases first; the recursion only runs when the filter is inconclusive.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

__all__ = ["Surd", "as_exact", "exact_sign", "sqrt"]

_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % q for q in range(2, int(p**0.5) + 1))]


def _split_square(m: int) -> tuple[int, int]:
    """Return ``(s, r)`` with ``m == s*s*r``; ``r`` is squarefree w.r.t. small primes."""
    s = 1
    for p in _SMALL_PRIMES:
        pp = p * p
        if pp > m:
            break
        while m % pp == 0:
            m //= pp
            s *= p
    root = math.isqrt(m)
    if root * root == m:
        return s * root, 1
    return s, m


def _key_product(k1: frozenset, k2: frozenset) -> tuple[int, frozenset]:
    factor = 1
    for g in k1 & k2:
        factor *= g
    return factor, k1 ^ k2


def _mul_terms(t1: dict, t2: dict) -> dict:
    out: dict = {}
    for k1, c1 in t1.items():
        for k2, c2 in t2.items():
            factor, key = _key_product(k1, k2)
            val = out.get(key, 0) + c1 * c2 * factor
            if val:
                out[key] = val
            else:
                out.pop(key, None)
    return out


def _add_terms(t1: dict, t2: dict, scale: int = 1) -> dict:
    out = dict(t1)
    for k, c in t2.items():
        val = out.get(k, 0) + scale * c
        if val:
            out[k] = val
        else:
            out.pop(k, None)
    return out


def _float_estimate(terms: dict) -> tuple[float, float] | None:
    total = 0.0
    magnitude = 0.0
    try:
        for k, c in terms.items():
            v = float(c)
            for g in k:
                v *= math.sqrt(g)
            total += v
            magnitude += abs(v)
    except OverflowError:
        return None
    if math.isinf(magnitude) or math.isnan(total):
        return None
    return total, magnitude


def _exact_sign(terms: dict) -> int:
    if not terms:
        return 0
    gens = set().union(*terms)
    if not gens:
        c = terms[frozenset()]
        return (c > 0) - (c < 0)
    est = _float_estimate(terms)
    if est is not None:
        total, magnitude = est
        if abs(total) > 1e-9 * magnitude:
            return 1 if total > 0 else -1
    g = max(gens)
    a: dict = {}
    b: dict = {}
    for k, c in terms.items():
        if g in k:
            b[k - {g}] = c
        else:
            a[k] = c
    sa = _exact_sign(a)
    sb = _exact_sign(b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    s = _exact_sign(_add_terms(_mul_terms(a, a), _mul_terms(b, b), scale=-g))
    if s > 0:
        return sa
    if s < 0:
        return sb
    return 0


class Surd:
    """Exact element of Q(sqrt(r_1), ..., sqrt(r_k)) with positive roots."""

    __slots__ = ("terms",)

    def __init__(self, value=0, _terms: dict | None = None):
        if _terms is not None:
            self.terms = _terms
            return
        if isinstance(value, Surd):
            self.terms = dict(value.terms)
            return
        q = Fraction(value)
        self.terms = {frozenset(): q} if q else {}

    # construction -------------------------------------------------------
    @classmethod
    def sqrt(cls, value) -> "Surd":
        """Positive square root of a non-negative rational."""
        q = Fraction(value) if not isinstance(value, Surd) else value.to_fraction()
        if q < 0:
            raise ValueError(f"no real square root of {q}")
        if q == 0:
            return cls()
        m = q.numerator * q.denominator
        s, r = _split_square(m)
        coef = Fraction(s, q.denominator)
        if r == 1:
            return cls(coef)
        return cls(_terms={frozenset([r]): coef})

    # queries ---------------------------------------------------------------
    def is_rational(self) -> bool:
        return all(not k for k in self.terms)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.terms.get(frozenset(), Fraction(0))

    def generators(self) -> frozenset:
        return frozenset().union(*self.terms) if self.terms else frozenset()

    def sign(self) -> int:
        return _exact_sign(self.terms)

    def __float__(self) -> float:
        est = _float_estimate(self.terms)
        if est is None:
            raise OverflowError("surd too large for float")
        return est[0]

    # arithmetic ---------------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Surd | None":
        if isinstance(other, Surd):
            return other
        if isinstance(other, (int, Rational)):
            return Surd(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Surd(_terms=_add_terms(self.terms, o.terms))

    __radd__ = __add__

    def __neg__(self):
        return Surd(_terms={k: -c for k, c in self.terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Surd(_terms=_add_terms(self.terms, o.terms, scale=-1))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Surd(_terms=_mul_terms(self.terms, o.terms))

    __rmul__ = __mul__

    def inverse(self) -> "Surd":
        if not self.terms:
            raise ZeroDivisionError("Surd division by zero")
        num = Surd(1)
        den = self
        while not den.is_rational():
            g = max(den.generators())
            conj = Surd(_terms={k: (-c if g in k else c) for k, c in den.terms.items()})
            num = num * conj
            den = den * conj
        d = den.to_fraction()
        if d == 0:
            raise ZeroDivisionError("Surd division by zero")
        return Surd(_terms={k: c / d for k, c in num.terms.items()})

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_rational():
            d = o.to_fraction()
            if d == 0:
                raise ZeroDivisionError("Surd division by zero")
            return Surd(_terms={k: c / d for k, c in self.terms.items()})
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = Surd(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison ---------------------------------------------------------------
    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare Surd with {type(other).__name__}")
        return (self - o).sign()

    def __eq__(self, other):
        if self._coerce(other) is None:
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return self.sign() != 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __hash__(self):
        if self.is_rational():
            return hash(self.to_fraction())
        return hash(frozenset(self.terms.items()))

    # text ---------------------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda k: (len(k), sorted(k))):
            c = self.terms[k]
            radicals = "".join(f"*sqrt({g})" for g in sorted(k))
            if radicals and abs(c) == 1:
                body = radicals[1:]
            else:
                body = f"{abs(c)}{radicals}"
            parts.append(("-" if c < 0 else "+") + body)
        text = "".join(parts)
        return text[1:] if text.startswith("+") else text

    def __repr__(self) -> str:
        return f"Surd('{self}')"

    @classmethod
    def parse(cls, text: str) -> "Surd":
        """Inverse of ``str``: accepts sums of ``c*sqrt(n)*sqrt(m)`` terms."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty number")
        terms = re.findall(r"[+-]?[^+-]+", s)
        if "".join(terms) != s:
            raise ValueError(f"malformed number {text!r}")
        total = cls()
        for term in terms:
            sign = -1 if term.startswith("-") else 1
            term = term.lstrip("+-")
            value = cls(sign)
            for factor in term.split("*"):
                m = re.fullmatch(r"sqrt\((\d+)\)", factor)
                if m:
                    value = value * cls.sqrt(int(m.group(1)))
                elif re.fullmatch(r"\d+(/\d+)?", factor):
                    value = value * Fraction(factor)
                else:
                    raise ValueError(f"malformed factor {factor!r} in {text!r}")
            total = total + value
        return total


def sqrt(value) -> Surd:
    return Surd.sqrt(value)


def as_exact(value):
    """Collapse rational surds to Fraction; leave everything else alone."""
    if isinstance(value, Surd) and value.is_rational():
        return value.to_fraction()
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    return value


def exact_sign(value) -> int:
    if isinstance(value, Surd):
        return value.sign()
    return (value > 0) - (value < 0)
