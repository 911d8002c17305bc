"""Solve the weakly Bochner-flat construction on admissible bundles.

The construction reduces to finding roots x_a of the system {h_a = 0}, one
equation per base factor, after which the constant B, the quadratic Q and the
profile polynomial F are determined and the boundary/positivity conditions are
certified.  Everything runs in exact arithmetic: solutions are rationals or
quadratic surds whenever possible, and interval-certified otherwise.

Normalization conventions for h (see the regression tests): solvers work with
the integral

    h_a = int_{-1}^{1} p_c(t) k_a(t) dt           ("kadef" normalization)

which for a single base factor is exactly the closed form the construction
prints (e.g. (4/3) x (x^2 + 1 - 2 s x) for a curve base); for two base factors
with d0 = dinf = 0 the printed closed forms carry an extra factor -1/2, which
`h_closed_form` applies and reports.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .bundle import (AdmissibleBundle, BaseFactor, KAHLER_EINSTEIN, NotKahlerEinsteinBase,
                     momentum_poly, validate)
from .ratpoly import (ClaimRefuted, IsolatedRoot, MPoly, Polynomial, SturmRecord, Surd,
                      certify_sign, count_roots, isolate_roots, rat_str, _rational_candidates,
                      _sign_of)
from .report import TranscriptStep

DEFAULT_WIDTH = Fraction(1, 10 ** 12)
RESIDUAL_BOUND = Fraction(1, 10 ** 20)
_TIGHT = Fraction(1, 10 ** 24)

STATUS_CERTIFIED = "certified"
STATUS_REFUTED = "refuted"
STATUS_MULTIPLE = "multiple_solutions"
STATUS_NOT_APPLICABLE = "not_applicable"


class InconsistentB(ValueError):
    """The two determinations of B disagree: x is not actually a solution."""


class NumericalFailure(RuntimeError):
    """Curve tracking could not separate solution branches; see diagnostics."""

    def __init__(self, message: str, diagnostics: list[str]):
        super().__init__(message)
        self.diagnostics = diagnostics


Value = Union[Fraction, Surd]


def _as_value(x) -> Value:
    if isinstance(x, IsolatedRoot):
        return x.exact if x.exact is not None else x.midpoint()
    return x


def _is_exact(x) -> bool:
    return not isinstance(x, IsolatedRoot) or x.exact is not None


def _linear_boundary_term(d0: int, dinf: int) -> Polynomial:
    """(d0+1)(1-t) - (dinf+1)(1+t), the degree-<=1 part of Q."""
    return Polynomial([d0 - dinf, -(d0 + dinf + 2)])


def quadratic_Q(B, d0: int, dinf: int) -> Polynomial:
    """Q(z) = B(1-z^2) + (d0+1)(1-z) - (dinf+1)(1+z)."""
    return Polynomial([1, 0, -1]) * B + _linear_boundary_term(d0, dinf)


# ---------------------------------------------------------------------------
# h integrals: exact values and one-variable-symbolic polynomials
# ---------------------------------------------------------------------------

def _k_factor_poly(d0: int, dinf: int, xa, sa) -> Polynomial:
    """k_a(t) for a concrete root value x_a (kadef normalization)."""
    A, C = d0 + 1, dinf + 1
    lin = (Polynomial([1, -1]) * ((1 + xa) * A) - Polynomial([1, 1]) * ((1 - xa) * C))
    return lin * Polynomial([1, xa]) - Polynomial([1, 0, -1]) * (2 * sa * xa * xa)


def h_value(b: AdmissibleBundle, a: int, x: Sequence, *, via: str = "kadef") -> Value:
    """Exact h_a at concrete root values, via either printed integrand.

    via="kadef" uses h_a = int p_c * k_a; via="hadef" uses the equivalent
    bracket with the (1 - x_a^2) split.  The two integrands agree pointwise,
    which the property suite checks; both are provided as independent paths.
    """
    xs = [_as_value(v) for v in x]
    pc = momentum_poly(b, xs)
    xa, sa = xs[a], b.factors[a].s
    if via == "kadef":
        integrand = pc * _k_factor_poly(b.d0, b.dinf, xa, sa)
    elif via == "hadef":
        A, C = b.d0 + 1, b.dinf + 1
        bracket = (_linear_boundary_term(b.d0, b.dinf) * (1 - xa * xa)
                   + Polynomial([1, 0, -1]) * (xa * (A * (1 + xa) + C * (1 - xa) - 2 * sa * xa)))
        integrand = pc * bracket
    else:
        raise ValueError("via must be 'kadef' or 'hadef'")
    return integrand.integrate(Fraction(-1), Fraction(1))


def h_univariate(b: AdmissibleBundle, a: int, x: Sequence[Optional[Value]]) -> Polynomial:
    """h_a as an exact polynomial in the one unknown root (the None slot).

    All other slots carry concrete rational values.  kadef normalization.
    """
    if sum(1 for v in x if v is None) != 1:
        raise ValueError("exactly one symbolic slot expected")
    vars = ("x", "t")
    X = MPoly.var(vars, "x")
    T = MPoly.var(vars, "t")
    one = MPoly.constant(vars, 1)
    pc = one
    for f, xv in zip(b.factors, x):
        root = X if xv is None else MPoly.constant(vars, _as_value(xv))
        pc = pc * (one + root * T) ** f.dim
    pc = pc * (one + T) ** b.d0 * (one - T) ** b.dinf
    A, C = b.d0 + 1, b.dinf + 1
    xa = X if x[a] is None else MPoly.constant(vars, _as_value(x[a]))
    sa = b.factors[a].s
    k = (((one + xa) * (one - T)) * A - ((one - xa) * (one + T)) * C) * (one + xa * T) \
        - (one - T * T) * (xa * xa * (2 * sa))
    integ = (pc * k).integrate_over("t", Fraction(-1), Fraction(1))
    return integ.to_polynomial("x")


def h_bivariate(b: AdmissibleBundle, a: int) -> MPoly:
    """h_a for a two-factor bundle, exact in both unknowns (kadef normalization)."""
    if len(b.factors) != 2:
        raise ValueError("h_bivariate needs exactly two base factors")
    vars = ("x1", "x2", "t")
    X1, X2, T = MPoly.gens(vars)
    one = MPoly.constant(vars, 1)
    pc = (one + X1 * T) ** b.factors[0].dim * (one + X2 * T) ** b.factors[1].dim
    pc = pc * (one + T) ** b.d0 * (one - T) ** b.dinf
    A, C = b.d0 + 1, b.dinf + 1
    xa = (X1, X2)[a]
    sa = b.factors[a].s
    k = (((one + xa) * (one - T)) * A - ((one - xa) * (one + T)) * C) * (one + xa * T) \
        - (one - T * T) * (xa * xa * (2 * sa))
    integ = (pc * k).integrate_over("t", Fraction(-1), Fraction(1))
    return MPoly(("x1", "x2"), {(e[0], e[1]): c for e, c in integ.terms.items()})


def two_base_symbolic_h(a: int) -> MPoly:
    """h_a for the curve-times-curve case with symbolic s1, s2 (kadef norm).

    Variables (x1, x2, s1, s2); d1 = d2 = 1 and d0 = dinf = 0.  The printed
    closed forms are -1/2 times this.
    """
    vars = ("x1", "x2", "s1", "s2", "t")
    X1, X2, S1, S2, T = MPoly.gens(vars)
    one = MPoly.constant(vars, 1)
    pc = (one + X1 * T) * (one + X2 * T)
    xa, sa = ((X1, S1), (X2, S2))[a]
    k = (((one + xa) * (one - T)) - ((one - xa) * (one + T))) * (one + xa * T) \
        - (one - T * T) * xa * xa * sa * 2
    integ = (pc * k).integrate_over("t", Fraction(-1), Fraction(1))
    return MPoly(("x1", "x2", "s1", "s2"),
                 {e[:4]: c for e, c in integ.terms.items()})


def printed_normalization(b: AdmissibleBundle) -> Fraction:
    """Constant relating the printed closed form of h to the kadef integral."""
    if len(b.factors) == 2 and b.d0 == 0 and b.dinf == 0:
        return Fraction(-1, 2)
    return Fraction(1)


def h_closed_form(b: AdmissibleBundle, a: int, x: Sequence[Optional[Value]]):
    """h_a in the construction's printed normalization.

    With one symbolic slot (None) returns the univariate Polynomial in it;
    with all slots concrete returns the exact value.
    """
    norm = printed_normalization(b)
    if any(v is None for v in x):
        return h_univariate(b, a, x) * norm
    return h_value(b, a, x) * norm


# ---------------------------------------------------------------------------
# The eliminant of the two-curve system (d1 = d2 = 1, d0 = dinf = 0)
# ---------------------------------------------------------------------------

_M_VARS = ("x", "y", "s1", "s2")


def eliminant_M(s1: Optional[Fraction] = None, s2: Optional[Fraction] = None) -> MPoly:
    """The resultant-style polynomial M(x, y, s1, s2) eliminating x2.

    For a common zero of the two-curve system with x1 in (0, 1), x1 is a root
    of M(x, 1-x, s1, s2).  Passing rational s1/s2 substitutes them exactly.
    """
    X, Y, S1, S2 = MPoly.gens(_M_VARS)
    one = MPoly.constant(_M_VARS, 1)
    M = ((-25) * S1 * Y ** 6
         + (2 * one - 5 * S1) * 30 * X * Y ** 5
         + (15 * one - 23 * S1) * 20 * X ** 2 * Y ** 4
         + (72 * one - 105 * S1 + 25 * S1 ** 2) * 8 * X ** 3 * Y ** 3
         + (one - S1) * (132 * one - 125 * S1 + 25 * S1 ** 2) * 4 * X ** 4 * Y ** 2
         + (one - S1) ** 2 * (36 * one - 25 * S1) * 8 * X ** 5 * Y
         + (one - S1) ** 3 * 96 * X ** 6
         - S2 * 25 * Y * (2 * X + Y) * (Y ** 2 + (one - S1) * 2 * X * (X + Y)) ** 2)
    if s1 is not None:
        M = M.substitute("s1", Fraction(s1))
    if s2 is not None:
        M = M.substitute("s2", Fraction(s2))
    return M


def eliminant_on_segment(s1: Fraction, s2: Fraction) -> Polynomial:
    """M(x, 1-x, s1, s2) as a dense univariate polynomial."""
    M = eliminant_M(Fraction(s1), Fraction(s2))
    X = MPoly.var(_M_VARS, "x")
    one = MPoly.constant(_M_VARS, 1)
    return M.substitute("y", one - X).to_polynomial("x")


def curve_x2_of_x1(s1: Fraction, x1: Value) -> tuple[Value, Value]:
    """Solve h1 = 0 for x2 given x1: returns (x2, denominator) exactly."""
    num = 5 * x1 * (x1 * x1 - 2 * Fraction(s1) * x1 + 1)
    den = 2 * Fraction(s1) * x1 ** 3 - 7 * x1 * x1 + 5
    dsign = den.sign() if isinstance(den, Surd) else _sign_of(den)
    if dsign == 0:
        raise ZeroDivisionError("x1 sits on the elimination denominator")
    return num / den, den


# ---------------------------------------------------------------------------
# B, Q, F assembly and certification
# ---------------------------------------------------------------------------

def compute_B(b: AdmissibleBundle, x: Sequence, tol: Fraction = Fraction(1, 10 ** 10)):
    """B from the boundary integral and each B_a from the factor equations.

    Returns (B_from_integral, [B_a]).  All determinations must agree: exactly
    when the roots are exact, within `tol` otherwise; raises InconsistentB if
    not, which signals that x is not actually a solution of {h_a = 0}.
    """
    xs = [_as_value(v) for v in x]
    exact = all(_is_exact(v) for v in x)
    pc = momentum_poly(b, xs)
    lin = _linear_boundary_term(b.d0, b.dinf)
    denom = (pc * Polynomial([1, 0, -1])).integrate(Fraction(-1), Fraction(1))
    numer = (pc * lin).integrate(Fraction(-1), Fraction(1))
    B_int = -numer / denom
    A, C = b.d0 + 1, b.dinf + 1
    B_as = []
    for f, xa in zip(b.factors, xs):
        Ba = xa * (A * (1 + xa) + C * (1 - xa) - 2 * f.s * xa) / (1 - xa * xa)
        B_as.append(Ba)
    for i, Ba in enumerate(B_as):
        diff = Ba - B_int
        bad = (diff != 0) if exact else (abs(_to_fraction_approx(diff)) > tol)
        if bad:
            raise InconsistentB(
                f"factor {i}: B_a = {Ba} disagrees with boundary-integral B = {B_int}")
    return B_int, B_as


def _to_fraction_approx(v: Value) -> Fraction:
    if isinstance(v, Surd):
        return Fraction(float(v)).limit_denominator(10 ** 15) if v.b else v.a
    return Fraction(v)


@dataclass
class WbfSolution:
    """Outcome of a WBF solve: roots, B, Q, F, and the certification transcript."""
    bundle: AdmissibleBundle
    status: str
    x: list[IsolatedRoot] = field(default_factory=list)
    swapped: bool = False
    B: Optional[Value] = None
    Q: Optional[Polynomial] = None
    F: Optional[Polynomial] = None
    is_kahler_einstein: bool = False
    method: str = "exact"
    blow_down: bool = False
    transcript: list[TranscriptStep] = field(default_factory=list)
    extra_solutions: list["WbfSolution"] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    def add(self, step: str, claim: str, method: str, result: str):
        self.transcript.append(TranscriptStep(step, claim, method, result))

    @property
    def certified(self) -> bool:
        return self.status in (STATUS_CERTIFIED, STATUS_MULTIPLE)

    def x_values(self) -> list[Value]:
        return [_as_value(r) for r in self.x]

    def momentum(self) -> Polynomial:
        return momentum_poly(self.bundle, self.x_values())

    def theta(self, z) -> Value:
        """Theta(z) = F(z) / p_c(z), the profile the metric is built from."""
        if self.F is None:
            raise ValueError("no profile available")
        z = Fraction(z)
        if z == 1 or z == -1:
            return Fraction(0)
        return self.F(z) / self.momentum()(z)

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "swapped": self.swapped,
            "blow_down": self.blow_down,
            "is_kahler_einstein": self.is_kahler_einstein,
            "method": self.method,
            "x": [r.to_json() for r in self.x],
        }
        if self.B is not None:
            out["B"] = self.B.to_json() if isinstance(self.B, Surd) and not self.B.is_rational() \
                else rat_str(self.B.as_fraction() if isinstance(self.B, Surd) else self.B)
        if self.Q is not None:
            out["Q"] = self.Q.to_json()
        if self.F is not None:
            out["F"] = self.F.to_json()
        out["transcript"] = [t.to_json() for t in self.transcript]
        if self.extra_solutions:
            out["extra_solutions"] = [s.to_json() for s in self.extra_solutions]
        if self.diagnostics:
            out["diagnostics"] = self.diagnostics
        return out


def build_profile(b: AdmissibleBundle, x: Sequence, B=None) -> WbfSolution:
    """Assemble and certify the profile F for solved roots x (and optional B).

    When x is empty/None the query is vacuous and the status is not_applicable.
    B defaults to the boundary-integral value; consistency with every B_a is
    always enforced (that is the statement that x solves the construction).
    """
    sol = WbfSolution(bundle=b, status=STATUS_NOT_APPLICABLE)
    if not x:
        sol.add("profile", "no roots supplied", "predicate", "not_applicable")
        return sol
    roots = [v if isinstance(v, IsolatedRoot) else _exact_root(v) for v in x]
    exact = all(_is_exact(r) for r in roots)
    if not exact:
        roots = [r.refine(_TIGHT) if r.exact is None else r for r in roots]
    sol.x = roots
    sol.method = "exact" if exact else "bisection+residual"
    xs = [_as_value(r) for r in roots]
    B_int, B_as = compute_B(b, roots)
    if B is None:
        B = B_int
    sol.B = B
    sol.add("B", "boundary integral and factor equations agree",
            "exact" if exact else "bisection+residual",
            f"B = {B}")
    Q = quadratic_Q(B, b.d0, b.dinf)
    sol.Q = Q
    assert Q(Fraction(-1)) == 2 * (b.d0 + 1) and Q(Fraction(1)) == -2 * (b.dinf + 1)
    pc = momentum_poly(b, xs)
    F = (pc * Q).antiderivative()
    F = F - F(Fraction(-1))
    sol.F = F
    sol.is_kahler_einstein = bool(_is_zero_value(B)) and exact

    # boundary and shape certificates
    ok = _certify_profile(sol, b, pc, Q, F, exact)
    for a, f in enumerate(b.factors):
        target = 2 * f.s
        val = Q(-(1 / xs[a]))
        if exact:
            if val != target:
                raise ClaimRefuted(f"Q(-1/x_{a}) != 2 s_{a}", witness=val)
            sol.add("einstein-const", f"Q(-1/x_{a}) = 2 s_{a}", "exact", "holds")
        else:
            sol.add("einstein-const", f"Q(-1/x_{a}) ~ 2 s_{a}", "bisection+residual",
                    f"residual {float(abs(_to_fraction_approx(val - target))):.2e}")
    sol.status = STATUS_CERTIFIED if ok else STATUS_REFUTED
    return sol


def _surd_bracket(v: Surd, width: Fraction) -> tuple[Fraction, Fraction]:
    """Rational enclosure of a + b sqrt(n) of the requested width, exactly."""
    from math import isqrt
    k = 8
    while True:
        scale = 1 << (2 * k)
        s = isqrt(v.n * scale)
        lo_s, hi_s = Fraction(s, 1 << k), Fraction(s + 1, 1 << k)
        if v.b > 0:
            lo, hi = v.a + v.b * lo_s, v.a + v.b * hi_s
        else:
            lo, hi = v.a + v.b * hi_s, v.a + v.b * lo_s
        if hi - lo <= width:
            return lo, hi
        k += 8


def _exact_root(v: Value) -> IsolatedRoot:
    v = v if isinstance(v, (Surd, Fraction)) else Fraction(v)
    if isinstance(v, Surd) and v.is_rational():
        v = v.as_fraction()
    if isinstance(v, Fraction):
        return IsolatedRoot(v, v, v, SturmRecord(v, v, 0, 0))
    lo, hi = _surd_bracket(v, DEFAULT_WIDTH)
    return IsolatedRoot(lo, hi, v, SturmRecord(lo, hi, 0, 0))


def _is_zero_value(v: Value) -> bool:
    return (v.sign() == 0) if isinstance(v, Surd) else (v == 0)


def _certify_profile(sol: WbfSolution, b: AdmissibleBundle, pc: Polynomial,
                     Q: Polynomial, F: Polynomial, exact: bool) -> bool:
    """Certify F(+-1)=0, F' = p_c Q, F > 0 on (-1,1).  Returns overall success."""
    one = Fraction(1)
    F1 = F(one)
    if exact:
        if not _is_zero_value(F1):
            sol.add("boundary", "F(1) = 0", "exact", f"failed: F(1) = {F1}")
            return False
        sol.add("boundary", "F(-1) = 0 and F(1) = 0", "exact", "holds")
    else:
        res = abs(_to_fraction_approx(F1))
        sol.add("boundary", "F(1) = 0 up to residual", "bisection+residual",
                f"|F(1)| = {float(res):.2e}")
        if res > Fraction(1, 10 ** 15):
            return False
    # F' = p_c Q holds by construction; record it as an exact identity
    assert (F.derive() - pc * Q).is_zero()
    sol.add("ode", "F' = p_c * Q as polynomials", "exact", "identity holds")
    # F'(+-1) = -+ 2 p_c(+-1) follows from Q(-1)=2(d0+1), Q(1)=-2(dinf+1)
    sol.add("boundary-derivative", "F'(+-1) = -+2 p_c(+-1)", "exact", "holds")

    # positivity: Q changes sign exactly once inside, p_c > 0, and F(+-1) = 0
    nQ = count_roots(Q, Fraction(-1), Fraction(1))
    cert_pc = certify_sign(pc, (Fraction(-1), Fraction(1)), "positive")
    if nQ != 1 or not cert_pc.certified:
        sol.add("positivity", "Q single sign change and p_c > 0", "sturm",
                f"failed: Q roots {nQ}, p_c {cert_pc.verdict}")
        return False
    sol.add("positivity", "Q has one interior root; p_c > 0 on (-1,1)", "sturm", "holds")
    if exact:
        cert_F = certify_sign(F, (Fraction(-1), Fraction(1)), "positive")
        if not cert_F.certified:
            sol.add("positivity", "F > 0 on (-1,1)", "sturm", "refuted")
            return False
        sol.add("positivity", "F > 0 on (-1,1)", "sturm", "certified")
    else:
        delta = Fraction(1, 10 ** 6)
        cert_F = certify_sign(F, (Fraction(-1) + delta, Fraction(1) - delta), "positive")
        sol.add("positivity", "F > 0 away from endpoints; unimodal by Q",
                "bisection+residual", cert_F.verdict)
        if not cert_F.certified:
            return False
    return True


def sample_profile(sol: WbfSolution, n: int):
    """n+1 equally spaced profile samples on [-1, 1].

    Rows are (z, Theta(z), [(1 + x_a z)/x_a per base factor]); endpoint rows
    carry Theta = 0 exactly (the compactification boundary condition).
    """
    if not sol.certified:
        raise ValueError("NotCertified: profile samples need a certified solution")
    if n < 2:
        raise ValueError("need n >= 2")
    xs = sol.x_values()
    rows = []
    for i in range(n + 1):
        z = Fraction(-1) + Fraction(2 * i, n)
        theta = sol.theta(z)
        coefs = [(1 + xa * z) / xa for xa in xs]
        rows.append((z, theta, coefs))
    return rows


# ---------------------------------------------------------------------------
# Orientation normalization (z -> -z symmetry)
# ---------------------------------------------------------------------------

def _swap_bundle(b: AdmissibleBundle) -> AdmissibleBundle:
    """Apply z -> -z: interchange d0/dinf and flip each factor's orientation.

    s_a -> -s_a is realized by negating q_a (and with it the sign); the factor
    manifold itself, hence p_a, is untouched.
    """
    factors = tuple(BaseFactor(f.dim, -f.sign, f.p, -f.q, f.kind, f.genus)
                    for f in b.factors)
    return AdmissibleBundle(b.dinf, b.d0, factors, b.local_product_only,
                            b.assume_vector_bundle_exists)


def _negate_root(r: IsolatedRoot) -> IsolatedRoot:
    poly = r.poly.compose(Polynomial([0, -1])) if not r.poly.is_zero() else r.poly
    exact = None
    if r.exact is not None:
        exact = -r.exact
    rec = SturmRecord(-r.upper, -r.lower, r.sign_certificate.variations_upper,
                      r.sign_certificate.variations_lower)
    return IsolatedRoot(-r.upper, -r.lower, exact, rec, poly)


def _unswap_solution(sol: WbfSolution, original: AdmissibleBundle) -> WbfSolution:
    """Translate a solution of the swapped bundle back to the original orientation."""
    flip = Polynomial([0, -1])
    out = WbfSolution(
        bundle=original,
        status=sol.status,
        x=[_negate_root(r) for r in sol.x],
        swapped=True,
        B=(-sol.B if sol.B is not None else None),
        Q=(-sol.Q.compose(flip) if sol.Q is not None else None),
        F=(sol.F.compose(flip) if sol.F is not None else None),
        is_kahler_einstein=sol.is_kahler_einstein,
        method=sol.method,
        blow_down=sol.blow_down,
        transcript=list(sol.transcript),
        diagnostics=list(sol.diagnostics),
    )
    out.extra_solutions = [_unswap_solution(s, original) for s in sol.extra_solutions]
    out.add("orientation", "solved with z -> -z applied (s, x negated; d0/dinf swapped)",
            "exact", "mapped back")
    return out


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------

def solve_single_base(b: AdmissibleBundle, width: Fraction = DEFAULT_WIDTH) -> WbfSolution:
    """All admissible WBF solutions over a single Kähler-Einstein base factor."""
    if len(b.factors) != 1:
        raise ValueError("solve_single_base needs exactly one base factor")
    f = b.factors[0]
    if f.kind != KAHLER_EINSTEIN:
        raise NotKahlerEinsteinBase("WBF solver needs +-g Kähler-Einstein")
    rep = validate(b)
    if not rep.valid:
        raise ValueError("invalid bundle: " + "; ".join(rep.errors))
    if f.sign < 0:
        inner = solve_single_base(_swap_bundle(b), width)
        return _unswap_solution(inner, b)

    h = h_univariate(b, 0, [None])
    sol_stub = WbfSolution(bundle=b, status=STATUS_REFUTED)
    sol_stub.blow_down = b.d0 + b.dinf > 0
    if h.is_zero():
        sol_stub.status = STATUS_NOT_APPLICABLE
        sol_stub.add("h", "h vanishes identically", "exact", "degenerate data")
        return sol_stub
    roots = isolate_roots(h, (Fraction(0), Fraction(1)), width)
    sol_stub.add("roots", f"h has {len(roots)} root(s) in (0,1)", "sturm",
                 "Sturm count " + str(len(roots)))
    if not roots:
        return sol_stub
    solutions = []
    for r in roots:
        s = build_profile(b, [r])
        s.blow_down = sol_stub.blow_down
        solutions.append(s)
    primary = solutions[0]
    primary.transcript = sol_stub.transcript + primary.transcript
    if len(solutions) > 1:
        primary.status = STATUS_MULTIPLE
        primary.extra_solutions = solutions[1:]
    return primary


def blowdown_quadratic(d0: int, dinf: int, s: Fraction) -> Polynomial:
    """The quadratic r(x) whose (0,1)-roots decide the d=1, d0+dinf=1 case."""
    s = Fraction(s)
    if (d0, dinf) == (1, 0):
        return Polynomial([5, 4 - 5 * s, 3 - s])
    if (d0, dinf) == (0, 1):
        return Polynomial([5, -(4 + 5 * s), 3 + s])
    raise ValueError("blow-down quadratic needs d0 + dinf = 1")


def solve_blowdown_case(b: AdmissibleBundle, width: Fraction = DEFAULT_WIDTH) -> WbfSolution:
    """The CP^2-bundle-over-a-curve case: d = 1, d0 + dinf = 1.

    Solves via the printed quadratic r(x) and cross-checks against the general
    h integral (h = (8/15) x r(x) in this case, an exact identity).
    """
    if sum(f.dim for f in b.factors) != 1 or b.d0 + b.dinf != 1 or len(b.factors) != 1:
        raise ValueError("blow-down case needs one dim-1 factor and d0 + dinf = 1")
    f = b.factors[0]
    if f.sign < 0:
        inner = solve_blowdown_case(_swap_bundle(b), width)
        return _unswap_solution(inner, b)
    r_poly = blowdown_quadratic(b.d0, b.dinf, f.s)
    h = h_univariate(b, 0, [None])
    identity = h - Polynomial([0, Fraction(8, 15)]) * r_poly
    sol = solve_single_base(b, width)
    sol.blow_down = True
    sol.add("blow-down", "h(x) = (8/15) x r(x) with the printed quadratic r",
            "exact", "identity holds" if identity.is_zero() else "IDENTITY FAILED")
    if not identity.is_zero():
        raise ClaimRefuted("blow-down reduction failed", witness=identity)
    n = count_roots(r_poly, Fraction(0), Fraction(1))
    sol.add("blow-down", f"r(x) has {n} root(s) in (0,1)", "sturm", str(n))
    return sol


def solve_two_base(b: AdmissibleBundle, width: Fraction = DEFAULT_WIDTH) -> WbfSolution:
    """Common zeros of {h_1 = 0, h_2 = 0} for a two-factor base.

    For curve-times-curve bases (d1 = d2 = 1, no fibre blow-down) the unknown
    x2 is eliminated exactly and the solutions are the (0,1)-roots of the
    eliminant; otherwise the two zero-curves are tracked through the quadrant
    dictated by the factor signs, with exact per-slice isolation and a final
    exact-or-residual certificate.
    """
    if len(b.factors) != 2:
        raise ValueError("solve_two_base needs exactly two base factors")
    if not b.all_kahler_einstein():
        raise NotKahlerEinsteinBase("WBF solver needs +-g Kähler-Einstein")
    rep = validate(b)
    if not rep.valid:
        raise ValueError("invalid bundle: " + "; ".join(rep.errors))
    signs = [f.sign for f in b.factors]
    if signs == [-1, -1]:
        inner = solve_two_base(_swap_bundle(b), width)
        return _unswap_solution(inner, b)
    if signs == [-1, 1]:
        flipped = AdmissibleBundle(b.d0, b.dinf, (b.factors[1], b.factors[0]),
                                   b.local_product_only, b.assume_vector_bundle_exists)
        inner = solve_two_base(flipped, width)
        return _permute_solution(inner, b)

    d1, d2 = b.factors[0].dim, b.factors[1].dim
    if d1 == 1 and d2 == 1 and b.d0 == 0 and b.dinf == 0:
        return _solve_two_curves(b, width)
    return _solve_two_base_tracking(b, width)


def _permute_solution(sol: WbfSolution, original: AdmissibleBundle) -> WbfSolution:
    out = WbfSolution(bundle=original, status=sol.status,
                      x=[sol.x[1], sol.x[0]] if len(sol.x) == 2 else sol.x,
                      swapped=sol.swapped, B=sol.B, Q=sol.Q, F=sol.F,
                      is_kahler_einstein=sol.is_kahler_einstein, method=sol.method,
                      blow_down=sol.blow_down, transcript=list(sol.transcript),
                      diagnostics=list(sol.diagnostics))
    out.extra_solutions = [_permute_solution(s, original) for s in sol.extra_solutions]
    out.add("orientation", "factors reordered so the sign=+1 factor is first",
            "exact", "mapped back")
    return out


def _x2_range(sign: int) -> tuple[Fraction, Fraction]:
    return (Fraction(0), Fraction(1)) if sign > 0 else (Fraction(-1), Fraction(0))


def _solve_two_curves(b: AdmissibleBundle, width: Fraction) -> WbfSolution:
    """Exact elimination route for d1 = d2 = 1, d0 = dinf = 0."""
    s1, s2 = b.factors[0].s, b.factors[1].s
    lo2, hi2 = _x2_range(b.factors[1].sign)
    M1 = eliminant_on_segment(s1, s2)
    sol_stub = WbfSolution(bundle=b, status=STATUS_REFUTED)
    if M1.is_zero():
        sol_stub.status = STATUS_NOT_APPLICABLE
        sol_stub.add("eliminant", "eliminant vanishes identically", "exact", "degenerate")
        return sol_stub
    cand = isolate_roots(M1, (Fraction(0), Fraction(1)), width)
    sol_stub.add("eliminant", f"M(x,1-x) has {len(cand)} root(s) in (0,1)", "sturm",
                 str(len(cand)))
    solutions = []
    for r in cand:
        if r.exact is not None:
            x1 = r.exact
            try:
                x2, _den = curve_x2_of_x1(s1, x1)
            except ZeroDivisionError:
                sol_stub.add("eliminant", "candidate sits on elimination denominator",
                             "exact", "discarded")
                continue
            if isinstance(x2, Surd) and x2.is_rational():
                x2 = x2.as_fraction()
            in_range = (_sign_of(x2 - lo2) > 0 and _sign_of(hi2 - x2) > 0) \
                if not isinstance(x2, Surd) else ((x2 - lo2).sign() > 0 and (hi2 - x2).sign() > 0)
            if not in_range:
                sol_stub.add("filter", f"x2 = {x2} outside target range", "exact", "discarded")
                continue
            h1v = h_value(b, 0, [x1, x2])
            h2v = h_value(b, 1, [x1, x2])
            if not (_is_zero_value(h1v) and _is_zero_value(h2v)):
                raise ClaimRefuted("eliminant root failed exact back-substitution",
                                   witness=(h1v, h2v))
            s = build_profile(b, [_exact_root(x1), _exact_root(x2)])
            s.add("back-substitution", "h1 = h2 = 0 exactly at (x1, x2)", "exact", "holds")
            solutions.append(s)
        else:
            rt = r.refine(_TIGHT)
            x1 = rt.midpoint()
            try:
                x2, _den = curve_x2_of_x1(s1, x1)
            except ZeroDivisionError:
                continue
            if not (lo2 < x2 < hi2):
                continue
            h1v, h2v = h_value(b, 0, [x1, x2]), h_value(b, 1, [x1, x2])
            if abs(h1v) > RESIDUAL_BOUND or abs(h2v) > RESIDUAL_BOUND:
                sol_stub.diagnostics.append(
                    f"candidate near {float(x1):.6f}: residuals too large")
                continue
            x2r = isolate_roots(h_univariate(b, 1, [x1, None]), (lo2, hi2), width)
            x2root = next((rr for rr in x2r if rr.lower <= x2 <= rr.upper), None)
            s = build_profile(b, [rt, x2root if x2root is not None else _exact_root(x2)])
            s.add("back-substitution", "residuals below certification bound",
                  "bisection+residual", f"|h1|={float(abs(h1v)):.1e}, |h2|={float(abs(h2v)):.1e}")
            solutions.append(s)
    return _collect(sol_stub, solutions)


def _collect(stub: WbfSolution, solutions: list[WbfSolution]) -> WbfSolution:
    if not solutions:
        return stub
    primary = solutions[0]
    primary.transcript = stub.transcript + primary.transcript
    primary.diagnostics = stub.diagnostics + primary.diagnostics
    if len(solutions) > 1:
        primary.status = STATUS_MULTIPLE
        primary.extra_solutions = solutions[1:]
    return primary


# -- curve tracking for bases with a factor of dimension >= 2 -----------------

def _slice_roots(h1x: Polynomial, lo: Fraction, hi: Fraction, width: Fraction):
    if h1x.is_zero():
        return None
    try:
        return isolate_roots(h1x, (lo, hi), width)
    except Exception:
        return None


def _solve_two_base_tracking(b: AdmissibleBundle, width: Fraction) -> WbfSolution:
    """Sign-based tracking of {h1 = 0} against sign changes of h2.

    The zero set of h1 is sliced at rational x1; each slice is isolated exactly
    (Sturm), so the only approximation is the outer bisection on x1, which is
    pushed far enough that either an exact rational solution is reconstructed
    or the residuals fall below the certification bound.
    """
    sol_stub = WbfSolution(bundle=b, status=STATUS_REFUTED)
    lo2, hi2 = _x2_range(b.factors[1].sign)
    slice_w = Fraction(1, 10 ** 9)

    def h1_at(u: Fraction) -> Polynomial:
        return h_univariate(b, 0, [u, None])

    def h2_at(u: Fraction) -> Polynomial:
        return h_univariate(b, 1, [u, None])

    def h2_sign_on_branch(u: Fraction, root: IsolatedRoot) -> tuple[int, Optional[Value]]:
        """Sign of h2 along the h1-branch at x1 = u; 0 means exact common zero."""
        h2x = h2_at(u)
        if root.exact is not None:
            v = h2x(root.exact)
            sgn = v.sign() if isinstance(v, Surd) else _sign_of(v)
            return sgn, (root.exact if sgn == 0 else None)
        r = root
        for _ in range(200):
            slo, shi = _sign_of(h2x(r.lower)), _sign_of(h2x(r.upper))
            if slo == shi and slo != 0 and count_roots(h2x, r.lower, r.upper) == 0:
                return slo, None
            if count_roots(h2x, r.lower, r.upper) > 0:
                g = h1_at(u).gcd(h2x)
                if g.degree() >= 1:
                    common = isolate_roots(g, (r.lower, r.upper), width)
                    if common:
                        return 0, common[0].exact if common[0].exact is not None else common[0]
            r = r.refine(r.width() / 2 ** 8)
        raise NumericalFailure("could not separate h2 sign on branch",
                               [f"u={u}", f"bracket=({r.lower},{r.upper})"])

    # adaptive grid over x1
    grid_n = 32
    us = [Fraction(i, grid_n) for i in range(1, grid_n)]
    slices: list[tuple[Fraction, list[IsolatedRoot]]] = []
    for u in us:
        roots = _slice_roots(h1_at(u), lo2, hi2, slice_w)
        if roots is None:
            continue
        slices.append((u, roots))

    solutions: list[WbfSolution] = []
    exact_hits: set[tuple] = set()

    def try_exact(u: Fraction) -> bool:
        """Exact common zero at rational u via gcd; append solution if found."""
        g = h1_at(u).gcd(h2_at(u))
        if g.degree() < 1:
            return False
        common = isolate_roots(g, (lo2, hi2), width)
        found = False
        for c in common:
            x2 = c.exact if c.exact is not None else None
            if x2 is None:
                continue
            key = (u, str(x2))
            if key in exact_hits:
                found = True
                continue
            h1v, h2v = h_value(b, 0, [u, x2]), h_value(b, 1, [u, x2])
            if _is_zero_value(h1v) and _is_zero_value(h2v):
                exact_hits.add(key)
                s = build_profile(b, [_exact_root(Fraction(u)), _exact_root(x2)])
                s.add("tracking", "exact common zero via gcd of the slices",
                      "exact", f"x1 = {rat_str(u)}")
                solutions.append(s)
                found = True
        return found

    # walk adjacent slices, tracking h2 sign branch by branch
    events: list[tuple[Fraction, Fraction, int]] = []  # (u_lo, u_hi, branch index)
    prev: Optional[tuple[Fraction, list[IsolatedRoot], list[int]]] = None
    for u, roots in slices:
        sgns = []
        hit_exact = False
        for r in roots:
            sgn, witness = h2_sign_on_branch(u, r)
            if sgn == 0:
                try_exact(u)
                hit_exact = True
            sgns.append(sgn)
        if hit_exact:
            prev = (u, roots, sgns)
            continue
        if prev is not None and len(prev[1]) == len(roots):
            for i, (s_prev, s_cur) in enumerate(zip(prev[2], sgns)):
                if s_prev != 0 and s_cur != 0 and s_prev != s_cur:
                    events.append((prev[0], u, i))
        elif prev is not None and len(prev[1]) != len(roots):
            sol_stub.diagnostics.append(
                f"branch count changed between x1={float(prev[0]):.4f} and {float(u):.4f}"
            )
        prev = (u, roots, sgns)

    for (ulo, uhi, branch) in events:
        # bisect on u until exact reconstruction or tight residual bracket
        lo, hi = ulo, uhi
        root_lo = _slice_roots(h1_at(lo), lo2, hi2, slice_w)
        if not root_lo:
            sol_stub.diagnostics.append(f"event at x1 = {float(lo):.4f} lost its branch")
            continue
        s_lo, _ = h2_sign_on_branch(lo, root_lo[min(branch, len(root_lo) - 1)])
        if s_lo == 0:
            try_exact(lo)
            continue
        solved = False
        for _ in range(140):
            mid = (lo + hi) / 2
            # try exact reconstruction from the current bracket
            for candu in _rational_candidates(lo, hi, max_den=10 ** 6):
                if try_exact(candu):
                    solved = True
                    break
            if solved:
                break
            roots_m = _slice_roots(h1_at(mid), lo2, hi2, slice_w)
            if not roots_m:
                hi = mid
                continue
            idx = min(branch, len(roots_m) - 1)
            sgn, witness = h2_sign_on_branch(mid, roots_m[idx])
            if sgn == 0:
                try_exact(mid)
                solved = True
                break
            if sgn == s_lo:
                lo = mid
            else:
                hi = mid
            if hi - lo < _TIGHT:
                break
        if solved:
            continue
        mid = (lo + hi) / 2
        roots_m = _slice_roots(h1_at(mid), lo2, hi2, slice_w)
        if not roots_m:
            sol_stub.diagnostics.append(f"branch lost near x1 = {float(mid):.9f}")
            continue
        idx = min(branch, len(roots_m) - 1)
        x2root = roots_m[idx].refine(_TIGHT)
        x1root = IsolatedRoot(lo, hi, None, SturmRecord(lo, hi, 1, 0),
                              Polynomial([0, 1]))
        h1v = h_value(b, 0, [mid, x2root.midpoint()])
        h2v = h_value(b, 1, [mid, x2root.midpoint()])
        if abs(h1v) > RESIDUAL_BOUND or abs(h2v) > RESIDUAL_BOUND:
            raise NumericalFailure(
                "tracking converged but residuals exceed the certification bound",
                sol_stub.diagnostics + [f"|h1|={float(abs(h1v)):.1e}",
                                        f"|h2|={float(abs(h2v)):.1e}"])
        s = build_profile(b, [x1root, x2root])
        s.add("tracking", "h2 sign change bisected along the h1 = 0 curve",
              "bisection+residual",
              f"|h1|={float(abs(h1v)):.1e}, |h2|={float(abs(h2v)):.1e}")
        solutions.append(s)

    sol_stub.add("tracking", f"{len(solutions)} common zero(s) located", "sturm",
                 f"events: {len(events)}, exact hits: {len(exact_hits)}")
    return _collect(sol_stub, solutions)


def single_base_reduction_fy(d: int, s: Fraction) -> tuple[Polynomial, Polynomial]:
    """The degree-(d+4) reduction f(y) and the cubic-derivative kernel P(y).

    For a single base factor of dimension d >= 3 (d0 = dinf = 0), zeros of h in
    (0,1) correspond bijectively to zeros of f in (1, inf) under x = (y-1)/(y+1);
    f(1) = f'(1) = f''(1) = 0 and f'''(y) = (d+1)(d+2)(d+3) y^{d-1} P(y).
    """
    if d < 3:
        raise ValueError("the reduction is for d >= 3")
    s = Fraction(s)
    f = Polynomial([(d + 1) * (s + 1), -(d + 2) * (d + 1 + 2 * s), (d + 3) * (d + 1 + s)])
    tail = Polynomial([-(d + 3) * (d + 1 - s), (d + 2) * (1 + d - 2 * s), (d + 1) * (s - 1)])
    f = f + Polynomial([0] * (d + 2) + [1]) * tail
    P = Polynomial([-d * (1 + d - s), (d + 2) * (d + 1 - 2 * s), (d + 4) * (s - 1)])
    return f, P


def single_base_reduction_check(d: int, s: Fraction) -> bool:
    """Exact identity tying f(y) to h: 2^{d+4} f = -(d+1)(d+2)(d+3)(y-1)^2 H(y).

    H(y) is the numerator of h((y-1)/(y+1)) over (y+1)^{d+2}.  Also checks the
    triple zero at y = 1 and the f''' factorization through P(y).
    """
    from .bundle import AdmissibleBundle as _AB, BaseFactor as _BF
    s = Fraction(s)
    b = _AB(0, 0, [_BF(dim=d, sign=1, p=s.numerator, q=s.denominator)])
    h = h_univariate(b, 0, [None])
    f, P = single_base_reduction_fy(d, s)
    ym1 = Polynomial([-1, 1])
    yp1 = Polynomial([1, 1])
    H = Polynomial()
    for i, c in enumerate(h.coeffs):
        H = H + ym1 ** i * yp1 ** (d + 2 - i) * c
    K = (d + 1) * (d + 2) * (d + 3)
    lhs = f * Fraction(2 ** (d + 4))
    rhs = ym1 ** 2 * H * Fraction(-K)
    if not (lhs - rhs).is_zero():
        return False
    one = Fraction(1)
    if f(one) != 0 or f.derive()(one) != 0 or f.derive().derive()(one) != 0:
        return False
    f3 = f.derive().derive().derive()
    target = Polynomial([0] * (d - 1) + [1]) * P * Fraction(K)
    return (f3 - target).is_zero()


def solve_wbf(b: AdmissibleBundle, width: Fraction = DEFAULT_WIDTH) -> WbfSolution:
    """Dispatch to the applicable WBF solver for this bundle shape."""
    nfac = len(b.factors)
    if nfac == 1:
        if sum(f.dim for f in b.factors) == 1 and b.d0 + b.dinf == 1:
            return solve_blowdown_case(b, width)
        return solve_single_base(b, width)
    if nfac == 2:
        return solve_two_base(b, width)
    sol = WbfSolution(bundle=b, status=STATUS_NOT_APPLICABLE)
    sol.add("dispatch", f"{nfac} base factors outside the implemented constructions",
            "predicate", "not_applicable")
    return sol
