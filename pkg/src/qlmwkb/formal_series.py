"""Exact differential polynomials in k, k', k'', ... and truncated series in g.

A monomial is ``c * k**p * prod_j (k^(j))**e_j`` with a Gaussian-rational
coefficient ``c``, a signed power ``p`` of k itself and positive exponents
``e_j`` of the derivatives.  Everything here is immutable and exact; floats
only appear in :func:`poly_eval`.

Text form of a polynomial (one line, canonical order)::

    (-297/128 i) k^-7 k1^4 + (99/32 i) k^-6 k1^2 k2 + ...

JSON form: a list of ``{"kpow", "dexp": {"j": e}, "re": [num, den], "im": [num, den]}``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import lcm, gcd
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    MissingDerivativeError,
    SingularJetError,
    SingularLeadingTermError,
    UsageError,
)

# Exact rationals are the stdlib Fraction: always reduced, denominator > 0.
ExactRational = Fraction

DEFAULT_ORDER_CAP = 8


class GaussRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussRational":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    def __add__(self, other):
        other = _as_gauss(other)
        return GaussRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gauss(other)
        return GaussRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_gauss(other) - self

    def __neg__(self):
        return GaussRational._raw(-self.re, -self.im)

    def __mul__(self, other):
        other = _as_gauss(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussRational._raw(a * c, b)
        return GaussRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "GaussRational":
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise ZeroDivisionError("inverse of zero")
        return GaussRational._raw(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        return self * _as_gauss(other).inverse()

    def __rtruediv__(self, other):
        return _as_gauss(other) * self.inverse()

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            other = _as_gauss(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self) -> "GaussRational":
        return GaussRational._raw(self.re, -self.im)

    def __repr__(self):
        return f"GaussRational({self.re!s}, {self.im!s})"

    def __str__(self):
        return _format_coeff(self)


def _as_gauss(x) -> GaussRational:
    if isinstance(x, GaussRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussRational._raw(Fraction(x), Fraction(0))
    if isinstance(x, complex) and x.real.is_integer() and x.imag.is_integer():
        return GaussRational(int(x.real), int(x.imag))
    raise TypeError(f"cannot convert {x!r} to an exact Gaussian rational")


I = GaussRational(0, 1)
ONE = GaussRational(1, 0)
ZERO = GaussRational(0, 0)


# A monomial key is (kpow, dexp) with dexp a tuple of (j, e) pairs, j >= 1
# increasing, e >= 1.
Key = tuple


def _normalize_dexp(dexp) -> tuple:
    if isinstance(dexp, Mapping):
        items = dexp.items()
    else:
        items = dexp
    out = {}
    for j, e in items:
        j, e = int(j), int(e)
        if j < 1:
            raise UsageError(f"derivative order must be >= 1, got {j}")
        if e < 0:
            raise UsageError("negative powers are only allowed on k itself")
        if e:
            out[j] = out.get(j, 0) + e
    return tuple(sorted(out.items()))


def _key_weight(key: Key) -> int:
    return sum(j * e for j, e in key[1])


def _key_degree(key: Key) -> int:
    return key[0] + sum(e for _, e in key[1])


def _sort_key(key: Key):
    # graded: weight, then degree, then derivative exponents (higher k' first)
    return (_key_weight(key), _key_degree(key), tuple((j, -e) for j, e in key[1]), key[0])


@dataclass(frozen=True)
class DiffMonomial:
    kpow: int
    dexp: tuple  # ((j, e), ...)
    coeff: GaussRational

    @property
    def key(self) -> Key:
        return (self.kpow, self.dexp)

    @property
    def degree(self) -> int:
        return _key_degree(self.key)

    @property
    def weight(self) -> int:
        return _key_weight(self.key)


class DiffPolynomial:
    """Finite sum of :class:`DiffMonomial` with distinct keys and nonzero coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | Iterable = ()):
        collected: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for item in items:
            if isinstance(item, DiffMonomial):
                key, c = (item.kpow, _normalize_dexp(item.dexp)), item.coeff
            else:
                key, c = item
                key = (int(key[0]), _normalize_dexp(key[1]))
            c = _as_gauss(c)
            collected[key] = collected.get(key, ZERO) + c
        self._terms = {k: v for k, v in collected.items() if v}
        self._hash = None

    @classmethod
    def _from_clean(cls, terms: dict) -> "DiffPolynomial":
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # construction helpers
    @classmethod
    def monomial(cls, coeff=1, kpow: int = 0, dexp=()) -> "DiffPolynomial":
        return cls([((kpow, dexp), coeff)])

    @classmethod
    def zero(cls) -> "DiffPolynomial":
        return cls._from_clean({})

    # access
    def __iter__(self) -> Iterator[DiffMonomial]:
        for key in sorted(self._terms, key=_sort_key):
            yield DiffMonomial(key[0], key[1], self._terms[key])

    def __len__(self):
        return len(self._terms)

    def keys(self) -> set:
        return set(self._terms)

    def coeff(self, kpow: int, dexp=()) -> GaussRational:
        return self._terms.get((kpow, _normalize_dexp(dexp)), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, DiffPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"DiffPolynomial({self.to_text()!r})"

    def __str__(self):
        return self.to_text()

    # ring operations
    def __add__(self, other: "DiffPolynomial") -> "DiffPolynomial":
        if not isinstance(other, DiffPolynomial):
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return DiffPolynomial._from_clean(out)

    def __neg__(self) -> "DiffPolynomial":
        return DiffPolynomial._from_clean({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "DiffPolynomial") -> "DiffPolynomial":
        if not isinstance(other, DiffPolynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "DiffPolynomial":
        if isinstance(other, DiffPolynomial):
            return _mul(self, other)
        c = _as_gauss(other)
        if not c:
            return DiffPolynomial.zero()
        return DiffPolynomial._from_clean({k: v * c for k, v in self._terms.items()})

    def __rmul__(self, other) -> "DiffPolynomial":
        return self * other

    def diff(self) -> "DiffPolynomial":
        """Total derivative in r: k^(j) -> k^(j+1), k^p -> p k^(p-1) k'."""
        out: dict = {}

        def put(key, c):
            s = out.get(key)
            s = c if s is None else s + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)

        for (p, dexp), c in self._terms.items():
            if p:
                d = dict(dexp)
                d[1] = d.get(1, 0) + 1
                put((p - 1, tuple(sorted(d.items()))), c * p)
            for j, e in dexp:
                d = dict(dexp)
                d[j] -= 1
                if not d[j]:
                    del d[j]
                d[j + 1] = d.get(j + 1, 0) + 1
                put((p, tuple(sorted(d.items()))), c * e)
        return DiffPolynomial._from_clean(out)

    # serialization
    def to_text(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(_format_monomial(m) for m in self)

    @classmethod
    def from_text(cls, text: str) -> "DiffPolynomial":
        return parse_polynomial(text)

    def to_json(self) -> list:
        return [
            {
                "kpow": m.kpow,
                "dexp": {str(j): e for j, e in m.dexp},
                "re": [m.coeff.re.numerator, m.coeff.re.denominator],
                "im": [m.coeff.im.numerator, m.coeff.im.denominator],
            }
            for m in self
        ]

    @classmethod
    def from_json(cls, data: Sequence[Mapping]) -> "DiffPolynomial":
        terms = []
        for t in data:
            c = GaussRational(Fraction(*t["re"]), Fraction(*t["im"]))
            terms.append(((t["kpow"], {int(j): e for j, e in t["dexp"].items()}), c))
        return cls(terms)


def _mul(a: DiffPolynomial, b: DiffPolynomial) -> DiffPolynomial:
    out: dict = {}
    for (pa, da), ca in a._terms.items():
        for (pb, db), cb in b._terms.items():
            if not db:
                dexp = da
            elif not da:
                dexp = db
            else:
                d = dict(da)
                for j, e in db:
                    d[j] = d.get(j, 0) + e
                dexp = tuple(sorted(d.items()))
            key = (pa + pb, dexp)
            c = ca * cb
            s = out.get(key)
            out[key] = c if s is None else s + c
    return DiffPolynomial._from_clean({k: v for k, v in out.items() if v})


# -- text form ---------------------------------------------------------------

def _format_coeff(c: GaussRational) -> str:
    if not c.im:
        return f"({c.re})"
    if not c.re:
        return f"({c.im} i)"
    sign = "+" if c.im > 0 else "-"
    return f"({c.re} {sign} {abs(c.im)} i)"


def _format_monomial(m: DiffMonomial) -> str:
    parts = [_format_coeff(m.coeff)]
    if m.kpow:
        parts.append("k" if m.kpow == 1 else f"k^{m.kpow}")
    for j, e in m.dexp:
        parts.append(f"k{j}" if e == 1 else f"k{j}^{e}")
    return " ".join(parts)


_RAT = r"-?\d+(?:/\d+)?"
_COEFF_RE = re.compile(
    rf"^\s*(?:(?P<re>{_RAT})\s*(?:(?P<sign>[+-])\s*(?P<im>\d+(?:/\d+)?)\s*i)?"
    rf"|(?P<im_only>{_RAT})\s*i)\s*$"
)
_TERM_RE = re.compile(r"\(([^()]*)\)((?:\s*k\d*(?:\^-?\d+)?)*)")
_FACTOR_RE = re.compile(r"k(\d*)(?:\^(-?\d+))?")


def _parse_coeff(text: str) -> GaussRational:
    m = _COEFF_RE.match(text)
    if not m:
        raise UsageError(f"malformed coefficient {text!r}")
    if m.group("im_only") is not None:
        return GaussRational(0, Fraction(m.group("im_only")))
    re_part = Fraction(m.group("re"))
    im_part = Fraction(0)
    if m.group("im") is not None:
        im_part = Fraction(m.group("im"))
        if m.group("sign") == "-":
            im_part = -im_part
    return GaussRational(re_part, im_part)


def parse_polynomial(text: str) -> DiffPolynomial:
    """Inverse of :meth:`DiffPolynomial.to_text`; also accepts non-canonical order."""
    text = text.strip()
    if text == "0":
        return DiffPolynomial.zero()
    terms = []
    pos = 0
    for i, m in enumerate(_TERM_RE.finditer(text)):
        gap = text[pos:m.start()].strip()
        if (i == 0 and gap) or (i > 0 and gap != "+"):
            raise UsageError(f"unexpected text {gap!r} in polynomial")
        pos = m.end()
        coeff = _parse_coeff(m.group(1))
        kpow = 0
        dexp: dict = {}
        for f in _FACTOR_RE.finditer(m.group(2)):
            e = int(f.group(2)) if f.group(2) else 1
            if f.group(1):
                j = int(f.group(1))
                if e < 0:
                    raise UsageError("negative powers are only allowed on k itself")
                dexp[j] = dexp.get(j, 0) + e
            else:
                kpow += e
        terms.append(((kpow, dexp), coeff))
    if text[pos:].strip() or not terms:
        raise UsageError(f"could not parse polynomial {text!r}")
    return DiffPolynomial(terms)


# -- LaTeX -------------------------------------------------------------------

def _latex_symbol(j: int) -> str:
    if j == 1:
        return "k'"
    if j == 2:
        return "k''"
    return f"k^{{({j})}}"


def _latex_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return rf"\frac{{{q.numerator}}}{{{q.denominator}}}"


def poly_to_latex(poly: DiffPolynomial) -> str:
    """Render with the common power of k and the common numeric factor pulled out.

    The g^2 WKB coefficient comes out as
    ``\\frac{i}{8 k^{3}} \\left( 3 {k'}^{2} - 2 k k'' \\right)``.
    """
    if poly.is_zero():
        return "0"
    terms = list(poly)
    kmin = min(m.kpow for m in terms)
    all_imag = all(not m.coeff.re for m in terms)
    all_real = all(not m.coeff.im for m in terms)
    unit = I if all_imag and not all_real else ONE
    if all_imag or all_real:
        parts = [(m.coeff / unit).re for m in terms]
        den = lcm(*(q.denominator for q in parts))
        nums = [int(q * den) for q in parts]
        g = 0
        for n in nums:
            g = gcd(g, n)
        common = Fraction(g, den)
        # keep the leading bracket term positive unless all are negative
        if all(n < 0 for n in nums):
            common = -common
        inner = [Fraction(n, den) / common for n in nums]
    else:
        common = Fraction(1)
        inner = None

    def factors(m: DiffMonomial, shift: int) -> str:
        out = []
        p = m.kpow - shift
        if p:
            out.append("k" if p == 1 else f"k^{{{p}}}")
        for j, e in m.dexp:
            sym = _latex_symbol(j)
            out.append(sym if e == 1 else f"{{{sym}}}^{{{e}}}")
        return " ".join(out)

    body = []
    for idx, m in enumerate(terms):
        if inner is not None:
            c = inner[idx]
            coeff_str = "" if abs(c) == 1 else _latex_rational(abs(c))
            sign = "-" if c < 0 else "+"
        else:
            coeff_str = rf"\left({_format_coeff(m.coeff)[1:-1]}\right)"
            sign = "+"
        f = factors(m, kmin)
        piece = " ".join(s for s in (coeff_str, f) if s) or "1"
        if idx == 0:
            body.append(("- " if sign == "-" else "") + piece)
        else:
            body.append(f"{sign} {piece}")
    bracket = " ".join(body)

    num_parts = []
    if unit is I:
        num_parts.append("i")
    pref_num = abs(common.numerator)
    if pref_num != 1:
        num_parts.insert(0, str(pref_num))
    numerator = " ".join(num_parts) or "1"
    den_parts = []
    if common.denominator != 1:
        den_parts.append(str(common.denominator))
    if kmin < 0:
        den_parts.append("k" if kmin == -1 else f"k^{{{-kmin}}}")
    sign = "-" if common < 0 else ""
    if kmin > 0:
        bracket_prefix = "k" if kmin == 1 else f"k^{{{kmin}}}"
        numerator = f"{numerator} {bracket_prefix}" if numerator != "1" else bracket_prefix
    if den_parts:
        prefactor = rf"{sign}\frac{{{numerator}}}{{{' '.join(den_parts)}}}"
    else:
        prefactor = sign + ("" if numerator == "1" else numerator)
    if len(terms) == 1 and inner is not None:
        return (prefactor + " " + factors(terms[0], kmin)).strip() if factors(terms[0], kmin) else (prefactor or "1")
    return rf"{prefactor} \left( {bracket} \right)".strip()


# -- numeric evaluation ------------------------------------------------------

@dataclass(frozen=True)
class NumericJet:
    """Values ``[k, k', k'', ...]`` at one point."""

    values: tuple

    def __init__(self, values):
        object.__setattr__(self, "values", tuple(complex(v) for v in values))


def poly_eval(a: DiffPolynomial, jet: NumericJet | Sequence) -> complex:
    vals = jet.values if isinstance(jet, NumericJet) else tuple(complex(v) for v in jet)
    total = 0j
    for (p, dexp), c in a._terms.items():
        term = complex(c)
        if p:
            if not vals:
                raise MissingDerivativeError("jet has no value for k")
            if vals[0] == 0 and p < 0:
                raise SingularJetError("negative power of k at k = 0")
            term *= vals[0] ** p
        for j, e in dexp:
            if j >= len(vals):
                raise MissingDerivativeError(f"jet lacks derivative k^({j})")
            term *= vals[j] ** e
        total += term
    return total


# -- polynomial operations by name -------------------------------------------

def poly_add(a: DiffPolynomial, b: DiffPolynomial) -> DiffPolynomial:
    return a + b


def poly_mul(a: DiffPolynomial, b: DiffPolynomial) -> DiffPolynomial:
    return a * b


def poly_diff(a: DiffPolynomial) -> DiffPolynomial:
    return a.diff()


MIXED = "mixed"


def homogeneity_signature(a: DiffPolynomial):
    """(degree, weight), each an int when uniform across monomials, else ``"mixed"``.

    The zero polynomial has no monomials and returns ``(None, None)``.
    """
    if a.is_zero():
        return (None, None)
    degrees = {_key_degree(k) for k in a._terms}
    weights = {_key_weight(k) for k in a._terms}
    return (
        degrees.pop() if len(degrees) == 1 else MIXED,
        weights.pop() if len(weights) == 1 else MIXED,
    )


def is_pure_imaginary(a: DiffPolynomial) -> bool:
    return all(not c.re for c in a._terms.values())


def is_pure_real(a: DiffPolynomial) -> bool:
    return all(not c.im for c in a._terms.values())


# -- common atoms ------------------------------------------------------------

def k_power(p: int, coeff=1) -> DiffPolynomial:
    """``coeff * k**p``."""
    return DiffPolynomial.monomial(coeff, p)


def k_deriv(j: int, coeff=1) -> DiffPolynomial:
    """``coeff * k^(j)``; ``j = 0`` gives k itself."""
    if j == 0:
        return k_power(1, coeff)
    return DiffPolynomial.monomial(coeff, 0, ((j, 1),))


# -- graded series -----------------------------------------------------------

class GradedSeries:
    """Truncated series ``sum_{m < order_cap} g**m * coeffs[m]``."""

    __slots__ = ("order_cap", "coeffs")

    def __init__(self, coeffs: Sequence[DiffPolynomial], order_cap: int | None = None):
        coeffs = list(coeffs)
        if order_cap is None:
            order_cap = len(coeffs)
        if order_cap < 1:
            raise UsageError("order_cap must be >= 1")
        if len(coeffs) > order_cap:
            coeffs = coeffs[:order_cap]
        coeffs += [DiffPolynomial.zero()] * (order_cap - len(coeffs))
        self.order_cap = int(order_cap)
        self.coeffs = tuple(coeffs)

    @classmethod
    def constant(cls, poly: DiffPolynomial, order_cap: int) -> "GradedSeries":
        return cls([poly], order_cap)

    @classmethod
    def unit(cls, order_cap: int) -> "GradedSeries":
        return cls([k_power(0)], order_cap)

    def __getitem__(self, m: int) -> DiffPolynomial:
        return self.coeffs[m]

    def __len__(self):
        return self.order_cap

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return self.order_cap == other.order_cap and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order_cap, self.coeffs))

    def __repr__(self):
        return f"GradedSeries(order_cap={self.order_cap})"

    def _check(self, other: "GradedSeries"):
        if not isinstance(other, GradedSeries):
            raise UsageError(f"expected GradedSeries, got {type(other).__name__}")
        if other.order_cap != self.order_cap:
            raise UsageError(f"order caps differ: {self.order_cap} vs {other.order_cap}")

    def __add__(self, other: "GradedSeries") -> "GradedSeries":
        self._check(other)
        return GradedSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order_cap)

    def __sub__(self, other: "GradedSeries") -> "GradedSeries":
        self._check(other)
        return GradedSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order_cap)

    def __neg__(self) -> "GradedSeries":
        return GradedSeries([-a for a in self.coeffs], self.order_cap)

    def __mul__(self, other) -> "GradedSeries":
        if isinstance(other, GradedSeries):
            return series_mul(self, other)
        return GradedSeries([a * other for a in self.coeffs], self.order_cap)

    def __rmul__(self, other) -> "GradedSeries":
        return GradedSeries([other * a for a in self.coeffs], self.order_cap)

    def g_diff(self) -> "GradedSeries":
        """``g * d/dr``: differentiate each coefficient and raise its order by one."""
        shifted = [DiffPolynomial.zero()] + [a.diff() for a in self.coeffs[:-1]]
        return GradedSeries(shifted, self.order_cap)

    def with_cap(self, order_cap: int) -> "GradedSeries":
        return GradedSeries(self.coeffs, order_cap)

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coeffs)

    # serialization
    def to_text(self) -> str:
        lines = [f"[{m}] {a.to_text()}" for m, a in enumerate(self.coeffs)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, order_cap: int | None = None) -> "GradedSeries":
        coeffs: dict = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            m = re.match(r"^\[(\d+)\]\s*(.*)$", line)
            if not m:
                raise UsageError(f"malformed series line {raw!r}")
            order = int(m.group(1))
            if order in coeffs:
                raise UsageError(f"order {order} given twice")
            coeffs[order] = parse_polynomial(m.group(2))
        if not coeffs:
            raise UsageError("empty series text")
        cap = max(coeffs) + 1 if order_cap is None else order_cap
        return cls([coeffs.get(m, DiffPolynomial.zero()) for m in range(cap)], cap)

    def to_json(self) -> dict:
        return {"order_cap": self.order_cap, "coeffs": [a.to_json() for a in self.coeffs]}

    @classmethod
    def from_json(cls, data: Mapping) -> "GradedSeries":
        return cls([DiffPolynomial.from_json(c) for c in data["coeffs"]], data["order_cap"])


def series_mul(a: GradedSeries, b: GradedSeries) -> GradedSeries:
    """Cauchy product truncated at the common order cap."""
    a._check(b)
    n = a.order_cap
    out = []
    for m in range(n):
        acc = DiffPolynomial.zero()
        for j in range(m + 1):
            if a.coeffs[j] and b.coeffs[m - j]:
                acc = acc + a.coeffs[j] * b.coeffs[m - j]
        out.append(acc)
    return GradedSeries(out, n)


def series_reciprocal(a: GradedSeries) -> GradedSeries:
    """Formal inverse; the order-0 coefficient must be a single ``c * k**d``."""
    lead = a.coeffs[0]
    if len(lead) != 1:
        raise SingularLeadingTermError(
            "leading coefficient must be a single monomial c*k^d, got "
            + (lead.to_text() if lead else "0")
        )
    (m0,) = list(lead)
    if m0.dexp:
        raise SingularLeadingTermError("leading monomial must not contain derivatives of k")
    b0 = k_power(-m0.kpow, m0.coeff.inverse())
    out = [b0]
    for m in range(1, a.order_cap):
        acc = DiffPolynomial.zero()
        for j in range(1, m + 1):
            if a.coeffs[j] and out[m - j]:
                acc = acc + a.coeffs[j] * out[m - j]
        out.append(-(b0 * acc))
    return GradedSeries(out, a.order_cap)


def match_orders(a: GradedSeries, b: GradedSeries) -> list:
    """Per-order exact equality flags."""
    a._check(b)
    return [x == y for x, y in zip(a.coeffs, b.coeffs)]
