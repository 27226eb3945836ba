"""Exact arithmetic on rational combinations of prime logarithms.

Every quantity the package compares (descriptive lengths, entropies,
redundancies) has the form ``sum(r_p * ln p)`` with rational ``r_p``.
:class:`ExactReal` stores the coefficient map and decides order by unique
factorisation, so no comparison ever depends on rounding.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

import mpmath
from sympy import factorint, isprime

RationalLike = Union[int, Fraction]

# fixed-point scale of the fast comparison filter
_FILTER_BITS = 256
# largest product (in bits) compared by direct multiplication
_FACTOR_BITS = 1 << 16


@lru_cache(maxsize=None)
def _ln_bounds(p: int, bits: int) -> tuple[int, int]:
    """Integers lo, hi with lo <= ln(p) * 2**bits <= hi."""
    with mpmath.workprec(bits + 64):
        v = mpmath.log(p) * mpmath.mpf(2) ** bits
        f = int(mpmath.floor(v))
    # mpmath is accurate to far below one unit at this scale; widen anyway
    return f - 2, f + 3


class ExactReal:
    """Immutable value ``sum(coeff * ln(prime))``.

    Zero coefficients are never stored, so two values are equal exactly when
    their term maps coincide.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, RationalLike] | None = None):
        clean = {}
        for p, c in (terms or {}).items():
            c = Fraction(c)
            if c == 0:
                continue
            if not isinstance(p, int) or not isprime(p):
                raise ValueError(f"basis element {p!r} is not a prime")
            clean[p] = c
        self._terms = tuple(sorted(clean.items()))
        self._hash = None

    @classmethod
    def _raw(cls, items) -> "ExactReal":
        obj = cls.__new__(cls)
        obj._terms = tuple(sorted((p, c) for p, c in items if c != 0))
        obj._hash = None
        return obj

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: "ExactReal") -> "ExactReal":
        if not isinstance(other, ExactReal):
            if other == 0:
                return self
            return NotImplemented
        acc = dict(self._terms)
        for p, c in other._terms:
            acc[p] = acc.get(p, 0) + c
        return ExactReal._raw(acc.items())

    __radd__ = __add__

    def __neg__(self) -> "ExactReal":
        return ExactReal._raw((p, -c) for p, c in self._terms)

    def __sub__(self, other: "ExactReal") -> "ExactReal":
        return self + (-other)

    def __mul__(self, k: RationalLike) -> "ExactReal":
        if isinstance(k, ExactReal):
            return NotImplemented
        k = Fraction(k)
        return ExactReal._raw((p, c * k) for p, c in self._terms)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, ExactReal):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __lt__(self, other: "ExactReal") -> bool:
        return exact_compare(self, other) < 0

    def __le__(self, other: "ExactReal") -> bool:
        return exact_compare(self, other) <= 0

    def __gt__(self, other: "ExactReal") -> bool:
        return exact_compare(self, other) > 0

    def __ge__(self, other: "ExactReal") -> bool:
        return exact_compare(self, other) >= 0

    def __repr__(self) -> str:
        if not self._terms:
            return "ExactReal(0)"
        parts = [f"{c}*ln{p}" for p, c in self._terms]
        return "ExactReal(" + " + ".join(parts) + ")"

    def pretty(self) -> str:
        """Human form such as ``9/4 ln2 - ln3``."""
        if not self._terms:
            return "0"
        out = []
        for p, c in self._terms:
            mag = abs(c)
            coeff = "" if mag == 1 else f"{mag} "
            sign = "-" if c < 0 else "+"
            out.append((sign, f"{coeff}ln{p}"))
        text = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text

    def to_decimal(self, digits: int = 6) -> str:
        return exact_to_decimal(self, digits)

    def __float__(self) -> float:
        # display only; never used for decisions
        return float(sum(float(c) * math.log(p) for p, c in self._terms))


ZERO = ExactReal()


def _factor_rational(x: Fraction) -> dict[int, int]:
    exps: dict[int, int] = {}
    for p, e in factorint(x.numerator).items():
        exps[p] = exps.get(p, 0) + e
    for p, e in factorint(x.denominator).items():
        exps[p] = exps.get(p, 0) - e
    return {p: e for p, e in exps.items() if e}


def exact_from_ln(x: RationalLike) -> ExactReal:
    """``ln(x)`` for a positive rational ``x``, as prime-log coefficients."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError(f"logarithm of non-positive value {x}")
    return ExactReal._raw(
        (p, Fraction(e)) for p, e in _factor_rational(x).items()
    )


@lru_cache(maxsize=4096)
def ln_int(q: int) -> ExactReal:
    return exact_from_ln(q)


def _integer_exponents(d: ExactReal) -> list[tuple[int, int]]:
    terms = d._terms
    lcm = 1
    for _, c in terms:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    return [(p, int(c * lcm)) for p, c in terms]


def _sign_by_filter(exps: list[tuple[int, int]], bits: int = _FILTER_BITS) -> int:
    lo = hi = 0
    for p, n in exps:
        a, b = _ln_bounds(p, bits)
        if n > 0:
            lo += n * a
            hi += n * b
        else:
            lo += n * b
            hi += n * a
    if lo > 0:
        return 1
    if hi < 0:
        return -1
    return 0


def _sign_by_factorisation(exps: list[tuple[int, int]]) -> int:
    pos = neg = 1
    for p, n in exps:
        if n > 0:
            pos *= p**n
        else:
            neg *= p ** (-n)
    return (pos > neg) - (pos < neg)


def _sign_by_refinement(exps: list[tuple[int, int]]) -> int:
    # a non-zero difference is a non-zero real, so some precision separates it from 0
    bits = _FILTER_BITS
    while True:
        s = _sign_by_filter(exps, bits)
        if s:
            return s
        bits *= 2


def exact_compare(a: ExactReal, b: ExactReal, fast: bool = True) -> int:
    """Sign of ``a - b`` as -1, 0 or 1, decided exactly.

    Prime logarithms are linearly independent over the rationals, so the
    difference is zero exactly when its coefficients vanish.  Otherwise the
    coefficients are scaled to integers ``n_p`` and ``prod(p**n_p for n_p > 0)``
    is compared against the product of the negative part when those integers
    are small; large exponents go to certified interval refinement instead.
    With ``fast`` a fixed-precision interval bound is tried first.
    """
    d = a - b
    if d.is_zero():
        return 0
    exps = _integer_exponents(d)
    if fast:
        s = _sign_by_filter(exps)
        if s:
            return s
    size = sum(abs(n) * p.bit_length() for p, n in exps)
    if size <= _FACTOR_BITS:
        return _sign_by_factorisation(exps)
    return _sign_by_refinement(exps)


def _value_bounds(a: ExactReal, bits: int) -> tuple[Fraction, Fraction]:
    lo = hi = Fraction(0)
    for p, c in a._terms:
        x, y = _ln_bounds(p, bits)
        if c > 0:
            lo += c * x
            hi += c * y
        else:
            lo += c * y
            hi += c * x
    scale = Fraction(1, 2**bits)
    return lo * scale, hi * scale


def exact_to_decimal(a: ExactReal, digits: int = 6) -> str:
    """Correctly rounded fixed-point rendering with ``digits`` decimals."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    if a.is_zero():
        return "0." + "0" * digits
    ten = 10**digits
    bits = 64
    while True:
        lo, hi = _value_bounds(a, bits)
        r_lo = math.floor(lo * ten + Fraction(1, 2))
        r_hi = math.floor(hi * ten + Fraction(1, 2))
        if r_lo == r_hi:
            break
        bits *= 2
    sign = "-" if r_lo < 0 else ""
    mag = abs(r_lo)
    return f"{sign}{mag // ten}.{mag % ten:0{digits}d}"


def exact_sum(values: Iterable[ExactReal]) -> ExactReal:
    acc: dict[int, Fraction] = {}
    for v in values:
        for p, c in v._terms:
            acc[p] = acc.get(p, 0) + c
    return ExactReal._raw(acc.items())
