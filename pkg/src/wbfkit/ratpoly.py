"""Exact arithmetic kernel: rationals, quadratic surds, polynomials, exp-polynomials,
definite integration and certified real-root isolation.

Everything here is exact: rationals never round, surd arithmetic stays inside the
field Q(sqrt(n)), and root isolation/sign certification is backed by Sturm chains
whose sign evaluations are integer computations.  The only place floating point
appears is in *optional* numeric rendering (arbitrary-precision via mpmath), which
never feeds back into a verdict.
"""
from __future__ import annotations

import decimal
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd as _int_gcd, isqrt
from typing import Callable, Iterable, Mapping, Sequence, Union

import mpmath as mp

Rational = Fraction

__all__ = [
    "Rational", "rat", "rat_str", "Surd", "Polynomial", "MPoly", "BiPolynomial",
    "ExpTerm", "ExpPolynomial", "ExpValue", "IsolatedRoot", "SturmRecord",
    "SignCertificate", "ZeroPolynomial", "ClaimRefuted",
    "poly_arith", "integrate_definite", "integrate_exp_definite",
    "isolate_roots", "count_roots", "certify_sign", "require_sign",
    "decimal_str",
]


class ZeroPolynomial(ValueError):
    """Raised when an operation requires a nonzero polynomial."""


class ClaimRefuted(ValueError):
    """A sign/identity claim failed; carries a refuting witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def rat(value: Union[int, str, Fraction], den: int | None = None) -> Fraction:
    """Build an exact rational; accepts ints, Fractions and "p/q" strings."""
    if den is not None:
        return Fraction(value, den)
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


def rat_str(q: Fraction) -> str:
    """Serialize a rational as "p/q" (or "p" when integral); never a float."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _square_free_part(n: int) -> tuple[int, int]:
    """Write n = m^2 * k with k square-free(-ish); returns (m, k).

    Trial division up to cbrt-scale is enough here: the radicands occurring in
    practice are small (3, 6, 10, 11, 61, ...) or have tiny square parts, except
    for a handful of large ones (182167945) that we simply leave untouched after
    a bounded search.
    """
    if n == 0:
        return 1, 0
    m, k, p = 1, n, 2
    while p * p <= k and p < 100000:
        while k % (p * p) == 0:
            k //= p * p
            m *= p
        p += 1 if p == 2 else 2
    r = isqrt(k)
    if r * r == k:
        return m * r, 1
    return m, k


class Surd:
    """An element a + b*sqrt(n) of the real quadratic field Q(sqrt(n)).

    n is a nonnegative integer, normalized square-free on construction; when the
    radical collapses (n in {0, 1} or b = 0) the value is still carried as a Surd
    with b = 0 so arithmetic stays closed.  Comparisons and sign are exact.
    """

    __slots__ = ("a", "b", "n")

    def __init__(self, a, b=0, n: int = 0):
        a, b = Fraction(a), Fraction(b)
        n = int(n)
        if n < 0:
            raise ValueError("radicand must be nonnegative")
        if b:
            m, k = _square_free_part(n)
            if k <= 1:
                a, b, n = a + b * m * k, Fraction(0), 0
            else:
                b, n = b * m, k
        else:
            n = 0
        self.a, self.b, self.n = a, b, n

    # -- ring/field structure ------------------------------------------------
    def _coerce(self, other) -> "Surd":
        if isinstance(other, Surd):
            if self.b and other.b and self.n != other.n:
                raise ValueError(f"incompatible radicands {self.n} vs {other.n}")
            return other
        if isinstance(other, (int, Fraction)):
            return Surd(other)
        return NotImplemented  # type: ignore[return-value]

    def _radicand(self, other: "Surd") -> int:
        return self.n if self.b else other.n

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Surd(self.a + o.a, self.b + o.b, self._radicand(o))

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.n)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = self._radicand(o)
        return Surd(self.a * o.a + self.b * o.b * n, self.a * o.b + self.b * o.a, n)

    __rmul__ = __mul__

    def inverse(self) -> "Surd":
        den = self.a * self.a - self.b * self.b * self.n
        if den == 0:
            raise ZeroDivisionError("division by zero surd")
        return Surd(self.a / den, -self.b / den, self.n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out, base = Surd(1), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- order structure -----------------------------------------------------
    def sign(self) -> int:
        """Exact sign via integer comparisons (no radicals evaluated)."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with b^2 n
        lhs, rhs = a * a, b * b * self.n
        if a > 0:  # b < 0
            return 1 if lhs > rhs else (-1 if lhs < rhs else 0)
        return 1 if lhs < rhs else (-1 if lhs > rhs else 0)

    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b:
            raise ValueError("not rational")
        return self.a

    def conjugate(self) -> "Surd":
        return Surd(self.a, -self.b, self.n)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (ValueError, TypeError):
            return NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.n == o.n)

    def __hash__(self):
        return hash((self.a, self.b, self.n))

    def __lt__(self, other):
        o = self._coerce(other)
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        return (self - o).sign() >= 0

    def __bool__(self):
        return bool(self.a or self.b)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- rendering -----------------------------------------------------------
    def evalf(self, dps: int = 50) -> mp.mpf:
        with mp.workdps(dps):
            return mp.mpf(self.a.numerator) / self.a.denominator + (
                mp.mpf(self.b.numerator) / self.b.denominator
            ) * mp.sqrt(self.n)

    def __float__(self):
        return float(self.evalf(30))

    def __repr__(self):
        if self.b == 0:
            return f"Surd({self.a})"
        return f"Surd({self.a} + {self.b}*sqrt({self.n}))"

    def __str__(self):
        if self.b == 0:
            return rat_str(self.a)
        bs = "" if self.b == 1 else ("-" if self.b == -1 else rat_str(self.b) + "*")
        head = "" if self.a == 0 else rat_str(self.a) + ("+" if self.b > 0 and self.b != 1 else "")
        if self.a != 0 and self.b > 0 and bs == "":
            head = rat_str(self.a) + "+"
        return f"{head}{bs}sqrt({self.n})"

    def to_json(self) -> dict:
        return {"a": rat_str(self.a), "b": rat_str(self.b), "n": self.n}

    @staticmethod
    def from_json(obj: Mapping) -> "Surd":
        return Surd(Fraction(obj["a"]), Fraction(obj["b"]), int(obj["n"]))


Coefficient = Union[Fraction, int, Surd]


def _sign_of(v) -> int:
    """Exact sign of a Fraction/int/Surd."""
    if isinstance(v, Surd):
        return v.sign()
    return (v > 0) - (v < 0)


class Polynomial:
    """Dense univariate polynomial; index = degree of the monomial.

    Coefficients are exact rationals by default; quadratic surds are supported
    transparently (all arithmetic stays in the field generated by them).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Coefficient] = ()):
        cs = [c.as_fraction() if isinstance(c, Surd) and c.is_rational()
              else (c if isinstance(c, Surd) else Fraction(c)) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors ----------------------------------------------------------
    @staticmethod
    def constant(c) -> "Polynomial":
        return Polynomial([c])

    @staticmethod
    def variable() -> "Polynomial":
        return Polynomial([0, 1])

    @staticmethod
    def from_roots(roots: Sequence[Coefficient]) -> "Polynomial":
        p = Polynomial([1])
        for r in roots:
            p = p * Polynomial([-r, 1])
        return p

    # -- basic structure ---------------------------------------------------------
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self):
        if not self.coeffs:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    # -- ring operations ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial([self[i] + other[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("pow exponent must be a nonnegative integer")
        out, base = Polynomial([1]), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Exact euclidean division (coefficients in a field)."""
        if other.is_zero():
            raise ZeroPolynomial("division by zero polynomial")
        q = [Fraction(0)] * max(0, len(self.coeffs) - len(other.coeffs) + 1)
        r = list(self.coeffs)
        d, lc = other.degree(), other.leading()
        while len(r) - 1 >= d and any(r):
            while r and not r[-1]:
                r.pop()
            if len(r) - 1 < d:
                break
            f = r[-1] / lc
            k = len(r) - 1 - d
            q[k] = f
            for i, c in enumerate(other.coeffs):
                r[k + i] = r[k + i] - f * c
            r.pop()
        return Polynomial(q), Polynomial(r)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    # -- calculus ---------------------------------------------------------------
    def derive(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def antiderivative(self) -> "Polynomial":
        """The antiderivative with zero constant term."""
        out = [Fraction(0)]
        for i, c in enumerate(self.coeffs):
            out.append(c / (i + 1))
        return Polynomial(out)

    def integrate(self, a, b):
        """Exact definite integral over [a, b]."""
        P = self.antiderivative()
        return P(b) - P(a)

    # -- evaluation / composition -------------------------------------------------
    def __call__(self, x):
        out = None
        for c in reversed(self.coeffs):
            out = c if out is None else out * x + c
        if out is None:
            return Fraction(0)
        return out

    def compose(self, inner: "Polynomial") -> "Polynomial":
        out = Polynomial()
        for c in reversed(self.coeffs):
            out = out * inner + Polynomial.constant(c)
        return out

    def shift(self, c) -> "Polynomial":
        """p(x + c), exactly."""
        return self.compose(Polynomial([c, 1]))

    # -- number theory helpers ----------------------------------------------------
    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lc = self.leading()
        return Polynomial([c / lc for c in self.coeffs])

    def gcd(self, other: "Polynomial") -> "Polynomial":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def squarefree(self) -> "Polynomial":
        """The square-free part p / gcd(p, p')."""
        if self.is_zero():
            raise ZeroPolynomial("square-free part of the zero polynomial")
        g = self.gcd(self.derive())
        if g.degree() <= 0:
            return self.monic()
        return (self // g).monic()

    def deflate_root(self, r) -> "Polynomial":
        """Divide by the exact linear factor (x - r); requires p(r) = 0."""
        if self(r) != 0:
            raise ValueError("not a root; cannot deflate")
        q, rem = self.divmod(Polynomial([-r, 1]))
        assert rem.is_zero()
        return q

    def has_surd_coeffs(self) -> bool:
        return any(isinstance(c, Surd) and not c.is_rational() for c in self.coeffs)

    # -- integer fast path ----------------------------------------------------------
    def _int_coeffs(self) -> list[int]:
        """Scaled integer coefficients (positive rational multiple of self)."""
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // _int_gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = _int_gcd(g, abs(v))
        return [v // g for v in ints] if g > 1 else ints

    # -- rendering --------------------------------------------------------------------
    def evalf(self, x, dps: int = 50) -> mp.mpf:
        with mp.workdps(dps):
            acc = mp.mpf(0)
            xf = mp.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mp.mpf(x)
            for c in reversed(self.coeffs):
                cf = c.evalf(dps) if isinstance(c, Surd) else mp.mpf(c.numerator) / c.denominator
                acc = acc * xf + cf
            return acc

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            cs = str(c) if not isinstance(c, Fraction) else rat_str(c)
            term = cs if i == 0 else (f"({cs})*t^{i}" if i > 1 else f"({cs})*t")
            parts.append(term)
        return " + ".join(parts)

    def to_json(self) -> list:
        out = []
        for c in self.coeffs:
            out.append(c.to_json() if isinstance(c, Surd) else rat_str(c))
        return out


# ---------------------------------------------------------------------------
# Sturm machinery and root isolation
# ---------------------------------------------------------------------------

def _sturm_chain(p: Polynomial) -> list[Polynomial]:
    """Sturm chain of a square-free polynomial (generic coefficients)."""
    chain = [p, p.derive()]
    while chain[-1].degree() > 0:
        rem = chain[-2] % chain[-1]
        if rem.is_zero():
            break
        chain.append(-rem)
    return [q for q in chain if not q.is_zero()]


class _IntChain:
    """Sturm chain with integer-scaled entries for fast exact sign evaluation."""

    def __init__(self, p: Polynomial):
        self.entries = [q._int_coeffs() for q in _sturm_chain(p)]

    @staticmethod
    def _sign_at(ints: list[int], x: Fraction) -> int:
        # sign of p(num/den) equals sign of sum c_i num^i den^(n-i), all integers
        num, den = x.numerator, x.denominator
        acc = ints[-1]
        p = 1
        for c in reversed(ints[:-1]):
            p *= den
            acc = acc * num + c * p
        return (acc > 0) - (acc < 0)

    def variations(self, x: Fraction) -> int:
        signs = [s for s in (self._sign_at(e, x) for e in self.entries) if s != 0]
        return sum(1 for u, v in zip(signs, signs[1:]) if u * v < 0)


class _GenericChain:
    """Sturm chain evaluated with exact surd arithmetic (slow path)."""

    def __init__(self, p: Polynomial):
        self.entries = _sturm_chain(p)

    def variations(self, x) -> int:
        signs = [s for s in (_sign_of(q(x)) for q in self.entries) if s != 0]
        return sum(1 for u, v in zip(signs, signs[1:]) if u * v < 0)


def _chain_for(p: Polynomial):
    return _GenericChain(p) if p.has_surd_coeffs() else _IntChain(p)


@dataclass(frozen=True)
class SturmRecord:
    """Evidence backing a root count: chain sign-variation numbers at the endpoints."""
    lower: Fraction
    upper: Fraction
    variations_lower: int
    variations_upper: int

    @property
    def count(self) -> int:
        return self.variations_lower - self.variations_upper

    def to_json(self) -> dict:
        return {
            "interval": [rat_str(self.lower), rat_str(self.upper)],
            "variations": [self.variations_lower, self.variations_upper],
            "count": self.count,
        }


@dataclass
class IsolatedRoot:
    """A certified bracket around a single real root, with exact value when known.

    Invariants: the square-free certified polynomial changes sign exactly once on
    [lower, upper]; when `exact` is set, it annihilates the polynomial exactly.
    """
    lower: Fraction
    upper: Fraction
    exact: Union[Fraction, Surd, None]
    sign_certificate: SturmRecord
    poly: Polynomial = field(repr=False, default_factory=Polynomial)

    def midpoint(self) -> Fraction:
        if isinstance(self.exact, Fraction):
            return self.exact
        return (self.lower + self.upper) / 2

    def value(self, dps: int = 50):
        if self.exact is not None:
            return self.exact.evalf(dps) if isinstance(self.exact, Surd) else self.exact
        return self.midpoint()

    def width(self) -> Fraction:
        return self.upper - self.lower

    def __float__(self):
        v = self.value(30)
        return float(v) if not isinstance(v, Fraction) else v.numerator / v.denominator

    def refine(self, width: Fraction) -> "IsolatedRoot":
        if self.exact is not None or self.width() <= width:
            return self
        lo, hi = self.lower, self.upper
        p = self.poly
        slo = _sign_of(p(lo))
        while hi - lo > width:
            mid = (lo + hi) / 2
            sm = _sign_of(p(mid))
            if sm == 0:
                return IsolatedRoot(lo, hi, mid, self.sign_certificate, p)
            if sm == slo:
                lo = mid
            else:
                hi = mid
        return IsolatedRoot(lo, hi, None, self.sign_certificate, p)

    def to_json(self) -> dict:
        out: dict = {"lower": rat_str(self.lower), "upper": rat_str(self.upper)}
        if isinstance(self.exact, Surd):
            out["exact"] = self.exact.to_json()
        elif isinstance(self.exact, Fraction):
            out["exact"] = rat_str(self.exact)
        out["sturm"] = self.sign_certificate.to_json()
        return out


def count_roots(p: Polynomial, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots of p in the open interval (a, b).

    Endpoint roots are deflated away first, so they are never counted.
    """
    if p.is_zero():
        raise ZeroPolynomial("cannot count roots of the zero polynomial")
    g = p.squarefree()
    while g(a) == 0:
        g = g.deflate_root(a)
    while g(b) == 0:
        g = g.deflate_root(b)
    if g.degree() <= 0:
        return 0
    ch = _chain_for(g)
    return ch.variations(a) - ch.variations(b)


def _quadratic_roots(p: Polynomial) -> list[Union[Fraction, Surd]]:
    """Exact roots of a polynomial of degree <= 2 (real ones only)."""
    if p.degree() == 1:
        return [-p[0] / p[1]]
    if p.degree() == 2:
        c, b, a = p[0], p[1], p[2]
        disc = b * b - 4 * a * c
        dsign = _sign_of(disc)
        if dsign < 0:
            return []
        if isinstance(disc, Surd):
            raise ValueError("nested radicals not supported")
        if dsign == 0:
            return [-b / (2 * a)]
        m, k = _square_free_part(disc.numerator * disc.denominator)
        # sqrt(disc) = (m / den) sqrt(k) with den = disc.denominator
        root_part = Surd(0, Fraction(m, disc.denominator), k)
        return [(-b - root_part) / (2 * a), (-b + root_part) / (2 * a)]
    raise ValueError("expected degree <= 2")


def _rational_candidates(lo: Fraction, hi: Fraction, max_den: int = 10 ** 7):
    """Continued-fraction convergents of the midpoint that land inside (lo, hi)."""
    mid = (lo + hi) / 2
    p0, q0, p1, q1 = 0, 1, 1, 0
    num, den = mid.numerator, mid.denominator
    out = []
    while den and q1 <= max_den:
        a = num // den
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        cand = Fraction(p1, q1)
        if lo < cand < hi:
            out.append(cand)
        num, den = den, num - a * den
    return out


def isolate_roots(p: Polynomial, interval: tuple[Fraction, Fraction],
                  width: Fraction = Fraction(1, 10 ** 12)) -> list[IsolatedRoot]:
    """Isolate all distinct real roots of p in the open interval, certified by Sturm.

    Roots at the interval endpoints are deflated away before isolation; each
    returned bracket has width <= `width` and carries an exact value whenever the
    root is rational or a quadratic surd (after square-free factorization and
    deflation of discovered rational roots).
    """
    if p.is_zero():
        raise ZeroPolynomial("cannot isolate roots of the zero polynomial")
    a, b = Fraction(interval[0]), Fraction(interval[1])
    if a >= b:
        raise ValueError("empty interval")
    g = p.squarefree()
    while g(a) == 0:
        g = g.deflate_root(a)
    while g(b) == 0:
        g = g.deflate_root(b)
    if g.degree() <= 0:
        return []

    chain = _chain_for(g)
    exact_rationals: list[Fraction] = []

    def var(x: Fraction) -> int:
        return chain.variations(x)

    # recursively split until every bracket holds exactly one root
    brackets: list[tuple[Fraction, Fraction, int, int]] = []

    def split(lo: Fraction, hi: Fraction, vlo: int, vhi: int):
        n = vlo - vhi
        if n == 0:
            return
        if n == 1:
            brackets.append((lo, hi, vlo, vhi))
            return
        mid = (lo + hi) / 2
        if g(mid) == 0:
            exact_rationals.append(mid)
            # bracket the known root tightly, then recurse outside it
            eps = (hi - lo) / 2 ** 20
            while g(mid - eps) == 0 or g(mid + eps) == 0:
                eps /= 2
            split(lo, mid - eps, vlo, var(mid - eps))
            split(mid + eps, hi, var(mid + eps), vhi)
            return
        vm = var(mid)
        split(lo, mid, vlo, vm)
        split(mid, hi, vm, vhi)

    va, vb = var(a), var(b)
    split(a, b, va, vb)

    roots: list[IsolatedRoot] = []
    for lo, hi, vlo, vhi in brackets:
        rec = SturmRecord(lo, hi, vlo, vhi)
        root = IsolatedRoot(lo, hi, None, rec, g).refine(width)
        roots.append(root)
    for r in exact_rationals:
        eps = width / 2
        while g(r - eps) == 0 or g(r + eps) == 0:
            eps /= 2
        rec = SturmRecord(r - eps, r + eps, var(r - eps), var(r + eps))
        roots.append(IsolatedRoot(r - eps, r + eps, r, rec, g))

    # exact values: rational reconstruction, then quadratic leftovers
    remaining = g
    for r in roots:
        if r.exact is not None:
            continue
        tight = r if r.width() < Fraction(1, 10 ** 15) else r.refine(Fraction(1, 10 ** 15))
        for cand in _rational_candidates(tight.lower, tight.upper):
            if g(cand) == 0:
                r.exact = cand
                r.lower, r.upper = tight.lower, tight.upper
                break
        else:
            r.lower, r.upper = tight.lower, tight.upper
    for r in roots:
        if isinstance(r.exact, Fraction):
            remaining = remaining.deflate_root(r.exact)
    if 1 <= remaining.degree() <= 2 and not remaining.has_surd_coeffs():
        for cand in _quadratic_roots(remaining):
            for r in roots:
                if r.exact is None and _contains(r, cand):
                    r.exact = cand
    roots.sort(key=lambda r: (r.lower, r.upper))
    return roots


def _contains(root: IsolatedRoot, value) -> bool:
    if isinstance(value, Fraction):
        return root.lower <= value <= root.upper
    return (value - root.lower).sign() >= 0 and (value - root.upper).sign() <= 0


# ---------------------------------------------------------------------------
# Sign certification
# ---------------------------------------------------------------------------

@dataclass
class SignCertificate:
    """Outcome of a sign claim on an interval: Sturm evidence or a counterexample."""
    claim: str
    interval: tuple[Fraction, Fraction]
    verdict: str                       # "certified" | "refuted"
    interior_root_count: int
    sample_point: Fraction | None = None
    sample_sign: int | None = None
    witness: Fraction | None = None
    method: str = "sturm"

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_json(self) -> dict:
        out = {
            "claim": self.claim,
            "interval": [rat_str(self.interval[0]), rat_str(self.interval[1])],
            "verdict": self.verdict,
            "interior_roots": self.interior_root_count,
            "method": self.method,
        }
        if self.sample_point is not None:
            out["sample"] = rat_str(self.sample_point)
        if self.witness is not None:
            out["witness"] = rat_str(self.witness)
        return out


_CLAIM_OK = {
    "positive": lambda s: s > 0,
    "negative": lambda s: s < 0,
    "nonneg": lambda s: s >= 0,
    "nonpos": lambda s: s <= 0,
}


def _find_sign_witness(p: Polynomial, lo: Fraction, hi: Fraction, bad) -> Fraction | None:
    """Search a dyadic grid for a point where `bad(sign p(x))` holds."""
    for k in (2, 4, 8, 16, 64, 256, 1024, 4096):
        step = (hi - lo) / k
        for i in range(1, k):
            x = lo + i * step
            if bad(_sign_of(p(x))):
                return x
    return None


def certify_sign(p: Polynomial, interval: tuple[Fraction, Fraction], claimed: str) -> SignCertificate:
    """Certify that p has the claimed sign on the open interval, or refute with a witness.

    Strict claims fail when p has an interior root; lax claims (nonneg/nonpos)
    tolerate roots provided the sign never flips, which is checked on samples
    between consecutive isolated roots.
    """
    if claimed not in _CLAIM_OK:
        raise ValueError(f"unknown claim {claimed!r}")
    a, b = Fraction(interval[0]), Fraction(interval[1])
    ok = _CLAIM_OK[claimed]
    if p.is_zero():
        verdict = "certified" if ok(0) else "refuted"
        return SignCertificate(claimed, (a, b), verdict, 0, witness=None if ok(0) else (a + b) / 2)

    strict = claimed in ("positive", "negative")
    n_interior = count_roots(p, a, b)
    mid = (a + b) / 2
    if n_interior == 0:
        s = _sign_of(p(mid))
        if s == 0:  # p vanishes identically-ish at midpoint only if root; cannot happen
            mid = a + (b - a) / 3
            s = _sign_of(p(mid))
        if ok(s):
            return SignCertificate(claimed, (a, b), "certified", 0, mid, s)
        w = mid if not ok(s) else None
        return SignCertificate(claimed, (a, b), "refuted", 0, mid, s, witness=w)

    if strict:
        # an interior root of p itself refutes a strict claim; find a usable witness
        roots = isolate_roots(p, (a, b), width=Fraction(1, 10 ** 6))
        w = None
        for r in roots:
            if isinstance(r.exact, Fraction):
                w = r.exact
                break
        if w is None:
            w = _find_sign_witness(p, a, b, lambda s: not ok(s))
        if w is None:
            w = roots[0].midpoint() if roots else mid
        return SignCertificate(claimed, (a, b), "refuted", n_interior, witness=w)

    # lax claim: sign must never flip across the isolated roots
    roots = isolate_roots(p, (a, b), width=Fraction(1, 10 ** 6))
    probes = []
    prev_hi = a
    for r in roots:
        probes.append((prev_hi + r.lower) / 2)
        prev_hi = r.upper
    probes.append((prev_hi + b) / 2)
    for x in probes:
        s = _sign_of(p(x))
        if not ok(s):
            return SignCertificate(claimed, (a, b), "refuted", n_interior, witness=x)
    return SignCertificate(claimed, (a, b), "certified", n_interior, probes[0], _sign_of(p(probes[0])))


def require_sign(p: Polynomial, interval: tuple[Fraction, Fraction], claimed: str) -> SignCertificate:
    """Like certify_sign, but raises ClaimRefuted on failure."""
    cert = certify_sign(p, interval, claimed)
    if not cert.certified:
        raise ClaimRefuted(f"{claimed} claim refuted on {interval}", witness=cert.witness)
    return cert


# ---------------------------------------------------------------------------
# Spec facade operations
# ---------------------------------------------------------------------------

def poly_arith(p: Polynomial, q: Union[Polynomial, int], op: str) -> Polynomial:
    """Exact polynomial arithmetic dispatcher: add/sub/mul/pow/compose/derive."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "pow":
        if not isinstance(q, int) or q < 0:
            raise ValueError("pow exponent must be a nonnegative integer")
        return p ** q
    if op == "compose":
        return p.compose(q)
    if op == "derive":
        return p.derive()
    raise ValueError(f"unknown op {op!r}")


def integrate_definite(p: Polynomial, a: Fraction, b: Fraction):
    """Exact definite integral of a polynomial over [a, b]."""
    return p.integrate(Fraction(a), Fraction(b))


# ---------------------------------------------------------------------------
# Exp-polynomials: sums of e^{k (t - shift)} q(t)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpTerm:
    k: Fraction
    q: Polynomial
    shift: Fraction = Fraction(0)


class ExpValue:
    """A finite exact combination sum_i c_i e^{a_i} with rational c_i, a_i.

    By Lindemann-Weierstrass such a combination vanishes iff all coefficients at
    distinct exponents vanish, so `is_zero`/`sign` are exactly decidable; numeric
    evaluation refines mpmath interval arithmetic until the sign separates.
    """

    def __init__(self, terms: Mapping[Fraction, Fraction] | None = None):
        self.terms: dict[Fraction, Fraction] = {}
        if terms:
            for arg, c in terms.items():
                if c:
                    self.terms[Fraction(arg)] = self.terms.get(Fraction(arg), Fraction(0)) + Fraction(c)
            self.terms = {a: c for a, c in self.terms.items() if c}

    @staticmethod
    def from_rational(c) -> "ExpValue":
        return ExpValue({Fraction(0): Fraction(c)})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExpValue.from_rational(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, Fraction(0)) + c
        return ExpValue(out)

    __radd__ = __add__

    def __neg__(self):
        return ExpValue({a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExpValue.from_rational(other)
        return self + (-other)

    def scale(self, c) -> "ExpValue":
        return ExpValue({a: v * c for a, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(a == 0 for a in self.terms)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational value")
        return self.terms.get(Fraction(0), Fraction(0))

    def evaluate(self, dps: int = 50) -> mp.mpf:
        with mp.workdps(dps):
            acc = mp.mpf(0)
            for a, c in sorted(self.terms.items()):
                acc += (mp.mpf(c.numerator) / c.denominator) * mp.e ** (
                    mp.mpf(a.numerator) / a.denominator)
            return acc

    def sign(self) -> int:
        """Exact sign; decidable because the e^{a_i} are linearly independent over Q."""
        if self.is_zero():
            return 0
        if self.is_rational():
            c = self.as_fraction()
            return (c > 0) - (c < 0)
        dps = 40
        while dps <= 5000:
            old = mp.iv.dps
            try:
                mp.iv.dps = dps
                total = mp.iv.mpf(0)
                for a, c in sorted(self.terms.items()):
                    ci = mp.iv.mpf(c.numerator) / c.denominator
                    ai = mp.iv.mpf(a.numerator) / a.denominator
                    total += ci * mp.iv.exp(ai)
            finally:
                mp.iv.dps = old
            if total.a > 0:
                return 1
            if total.b < 0:
                return -1
            dps *= 2
        raise ArithmeticError("sign did not separate; combination may be zero")

    def __float__(self):
        return float(self.evaluate(40))

    def to_json(self) -> dict:
        return {rat_str(a): rat_str(c) for a, c in sorted(self.terms.items())}

    def __repr__(self):
        inner = " + ".join(f"({rat_str(c)})e^{rat_str(a)}" for a, c in sorted(self.terms.items()))
        return f"ExpValue({inner or '0'})"


class ExpPolynomial:
    """Finite sum of e^{k(t - shift)} q(t) with rational k and rational q.

    Closed under differentiation and antidifferentiation (integration by parts
    terminates after deg(q) + 1 steps); definite integrals come out as exact
    ExpValue combinations.
    """

    def __init__(self, terms: Iterable[ExpTerm] = ()):
        merged: dict[tuple[Fraction, Fraction], Polynomial] = {}
        for t in terms:
            key = (Fraction(t.k), Fraction(t.shift))
            merged[key] = merged.get(key, Polynomial()) + t.q
        self.terms = tuple(ExpTerm(k, q, sh) for (k, sh), q in sorted(merged.items())
                           if not q.is_zero())

    @staticmethod
    def from_polynomial(q: Polynomial) -> "ExpPolynomial":
        return ExpPolynomial([ExpTerm(Fraction(0), q)])

    def derive(self) -> "ExpPolynomial":
        out = []
        for t in self.terms:
            out.append(ExpTerm(t.k, t.q.derive() + t.q * t.k, t.shift))
        return ExpPolynomial(out)

    def antiderivative(self) -> "ExpPolynomial":
        out = []
        for t in self.terms:
            if t.k == 0:
                out.append(ExpTerm(t.k, t.q.antiderivative(), t.shift))
                continue
            psi = Polynomial()
            deriv = t.q
            sign, j = 1, 0
            while not deriv.is_zero():
                psi = psi + deriv * Fraction(sign, 1) * (Fraction(1) / Fraction(t.k) ** (j + 1))
                deriv = deriv.derive()
                sign, j = -sign, j + 1
            out.append(ExpTerm(t.k, psi, t.shift))
        return ExpPolynomial(out)

    def definite(self, a: Fraction, b: Fraction) -> ExpValue:
        """Exact closed form of the integral over [a, b]."""
        a, b = Fraction(a), Fraction(b)
        anti = self.antiderivative()
        acc = ExpValue()
        for t in anti.terms:
            hi, lo = t.q(b), t.q(a)
            acc = acc + ExpValue({t.k * (b - t.shift): hi}) - ExpValue({t.k * (a - t.shift): lo})
        return acc

    def evaluate(self, t0, dps: int = 50) -> mp.mpf:
        t0 = Fraction(t0)
        with mp.workdps(dps):
            acc = mp.mpf(0)
            for term in self.terms:
                qv = term.q(t0)
                arg = term.k * (t0 - term.shift)
                acc += (mp.mpf(qv.numerator) / qv.denominator) * mp.e ** (
                    mp.mpf(arg.numerator) / arg.denominator)
            return acc

    def value_exact(self, t0) -> ExpValue:
        """Exact value at a rational point, as an ExpValue."""
        t0 = Fraction(t0)
        acc = ExpValue()
        for term in self.terms:
            acc = acc + ExpValue({term.k * (t0 - term.shift): term.q(t0)})
        return acc

    def is_polynomial(self) -> bool:
        return all(t.k == 0 for t in self.terms)

    def polynomial_part(self) -> Polynomial:
        acc = Polynomial()
        for t in self.terms:
            if t.k == 0:
                acc = acc + t.q
        return acc

    def to_json(self) -> list:
        return [{"k": rat_str(t.k), "shift": rat_str(t.shift), "q": t.q.to_json()}
                for t in self.terms]


def integrate_exp_definite(e: ExpPolynomial, a: Fraction, b: Fraction) -> ExpValue:
    """Exact closed-form definite integral of an exp-polynomial over [a, b]."""
    return e.definite(a, b)


# ---------------------------------------------------------------------------
# Sparse multivariate polynomials (used for bivariate expansion work)
# ---------------------------------------------------------------------------

class MPoly:
    """Sparse exact polynomial in named variables; exponent tuple -> rational.

    Substitutions are performed by exact expansion, never numerically.  The
    two-variable case realizes the BiPolynomial contract.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple[int, ...], Fraction] | None = None):
        self.vars = tuple(vars)
        self.terms: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[tuple(e)] = c

    # -- constructors -----------------------------------------------------------
    @staticmethod
    def constant(vars: Sequence[str], c) -> "MPoly":
        return MPoly(vars, {tuple(0 for _ in vars): Fraction(c)})

    @staticmethod
    def var(vars: Sequence[str], name: str) -> "MPoly":
        e = tuple(1 if v == name else 0 for v in vars)
        if sum(e) != 1:
            raise KeyError(name)
        return MPoly(vars, {e: Fraction(1)})

    @staticmethod
    def gens(names: Sequence[str]) -> list["MPoly"]:
        return [MPoly.var(names, n) for n in names]

    # -- ring ops ---------------------------------------------------------------
    def _check(self, other: "MPoly"):
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch {self.vars} vs {other.vars}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.constant(self.vars, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MPoly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.constant(self.vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MPoly(self.vars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(i + j for i, j in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MPoly(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        out = MPoly.constant(self.vars, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.constant(self.vars, other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms.items()))))

    def is_zero(self) -> bool:
        return not self.terms

    # -- calculus / substitution ---------------------------------------------------
    def _axis(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise KeyError(name) from None

    def diff(self, name: str) -> "MPoly":
        ax = self._axis(name)
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            if e[ax] == 0:
                continue
            e2 = list(e)
            e2[ax] -= 1
            e2 = tuple(e2)
            out[e2] = out.get(e2, Fraction(0)) + c * e[ax]
        return MPoly(self.vars, out)

    def substitute(self, name: str, value: Union["MPoly", Fraction, int]) -> "MPoly":
        """Exact substitution of a variable by a rational or another MPoly."""
        ax = self._axis(name)
        if isinstance(value, (int, Fraction)):
            out: dict[tuple[int, ...], Fraction] = {}
            for e, c in self.terms.items():
                c2 = c * Fraction(value) ** e[ax]
                e2 = list(e)
                e2[ax] = 0
                e2 = tuple(e2)
                out[e2] = out.get(e2, Fraction(0)) + c2
            return MPoly(self.vars, out)
        self._check(value)
        acc = MPoly(self.vars, {})
        powers: dict[int, MPoly] = {0: MPoly.constant(self.vars, 1)}

        def power(k: int) -> MPoly:
            if k not in powers:
                powers[k] = power(k - 1) * value
            return powers[k]

        for e, c in self.terms.items():
            e2 = list(e)
            k = e2[ax]
            e2[ax] = 0
            mono = MPoly(self.vars, {tuple(e2): c})
            acc = acc + mono * power(k)
        return acc

    def rename(self, mapping: Mapping[str, str]) -> "MPoly":
        return MPoly([mapping.get(v, v) for v in self.vars], self.terms)

    def eval(self, values: Mapping[str, object]):
        """Exact evaluation; values may be Fractions or Surds."""
        acc = None
        for e, c in sorted(self.terms.items()):
            term = c
            for ax, k in enumerate(e):
                if k:
                    term = term * values[self.vars[ax]] ** k
            acc = term if acc is None else acc + term
        return Fraction(0) if acc is None else acc

    def integrate_over(self, name: str, a: Fraction, b: Fraction) -> "MPoly":
        """Exact definite integral in one variable; result lives in the same ring."""
        ax = self._axis(name)
        a, b = Fraction(a), Fraction(b)
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            k = e[ax]
            val = c * (b ** (k + 1) - a ** (k + 1)) / (k + 1)
            if not val:
                continue
            e2 = list(e)
            e2[ax] = 0
            e2 = tuple(e2)
            out[e2] = out.get(e2, Fraction(0)) + val
        return MPoly(self.vars, out)

    def depends_on(self, name: str) -> bool:
        ax = self._axis(name)
        return any(e[ax] for e in self.terms)

    def to_polynomial(self, name: str) -> Polynomial:
        """Convert to a dense univariate Polynomial; other variables must be absent."""
        ax = self._axis(name)
        coeffs: list[Fraction] = []
        for e, c in self.terms.items():
            if any(v for i, v in enumerate(e) if i != ax):
                raise ValueError("polynomial still depends on other variables")
            k = e[ax]
            if len(coeffs) <= k:
                coeffs.extend([Fraction(0)] * (k + 1 - len(coeffs)))
            coeffs[k] += c
        return Polynomial(coeffs)

    def coefficients_in(self, *names: str) -> dict[tuple[int, ...], "MPoly"]:
        """Collect by monomials in `names`; values are MPolys in the rest."""
        axes = [self._axis(n) for n in names]
        out: dict[tuple[int, ...], dict[tuple[int, ...], Fraction]] = {}
        for e, c in self.terms.items():
            key = tuple(e[ax] for ax in axes)
            rest = list(e)
            for ax in axes:
                rest[ax] = 0
            bucket = out.setdefault(key, {})
            rest = tuple(rest)
            bucket[rest] = bucket.get(rest, Fraction(0)) + c
        return {k: MPoly(self.vars, v) for k, v in sorted(out.items())}

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __repr__(self):
        if not self.terms:
            return "MPoly(0)"
        bits = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            bits.append(f"({rat_str(c)}){'*' + mono if mono else ''}")
        return "MPoly(" + " + ".join(bits) + ")"


def BiPolynomial(terms: Mapping[tuple[int, int], Fraction], vars: Sequence[str] = ("x", "y")) -> MPoly:
    """Bivariate polynomial as a sparse (i, j) -> coefficient map."""
    if len(vars) != 2:
        raise ValueError("BiPolynomial takes exactly two variables")
    return MPoly(vars, terms)


# ---------------------------------------------------------------------------
# Deterministic decimal rendering
# ---------------------------------------------------------------------------

def decimal_str(value, digits: int = 15) -> str:
    """Round-half-even decimal rendering at `digits` significant digits.

    Exact inputs (Fraction) are rounded directly; surds/exp-values are evaluated
    with generous guard precision first.  Deterministic across runs.
    """
    if isinstance(value, IsolatedRoot):
        value = value.exact if value.exact is not None else value.midpoint()
    if isinstance(value, Surd) and value.is_rational():
        value = value.as_fraction()
    ctx = decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN)
    if isinstance(value, (int, Fraction)):
        q = Fraction(value)
        d = ctx.divide(decimal.Decimal(q.numerator), decimal.Decimal(q.denominator))
        return format(d, "f")
    if isinstance(value, Surd):
        v = value.evalf(digits + 25)
    elif isinstance(value, ExpValue):
        v = value.evaluate(digits + 25)
    else:
        v = mp.mpf(value)
    # exact mpf -> Decimal via binary mantissa/exponent, then one half-even rounding
    sign, man, exp, _ = v._mpf_
    man = int(man) if not sign else -int(man)
    with decimal.localcontext(decimal.Context(prec=digits + 30)):
        exact = decimal.Decimal(man) * (decimal.Decimal(2) ** int(exp))
    d = ctx.plus(exact)
    return format(d, "f")
