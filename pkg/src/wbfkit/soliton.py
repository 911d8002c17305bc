"""The admissible Kähler-Ricci soliton system.

On a Fano admissible bundle the soliton data is rigid: 2*lambda = d0 + dinf + 2,
each root is the rational x_a = (d0 + dinf + 2)/(2 s_a + dinf - d0), and the
soliton constant c is the unique zero of

    G(k) = int_{-1}^{1} e^{kt} ((d0+1)(1-t) - (dinf+1)(1+t)) p_c(t) dt,

a strictly decreasing function (after positive normalization) with opposite
infinite limits.  c = 0, equivalently G(0) = 0 decided in exact rational
arithmetic, is the Kähler-Einstein case.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .bundle import AdmissibleBundle, NotKahlerEinsteinBase, fano_check, momentum_poly, validate
from .ratpoly import (ExpPolynomial, ExpTerm, ExpValue, Polynomial, certify_sign, rat_str)
from .report import TranscriptStep, Verdict
from .wbf import _linear_boundary_term

C_WIDTH = Fraction(1, 10 ** 12)

LAMBDA_NOTE = ("lambda follows the boundary identity 2*lambda = d0 + dinf + 2; the "
               "alternative constant (d0 + dinf + 1)/2 printed alongside the "
               "soliton classification statement is inconsistent with that "
               "identity and is not used")


class NotFano(ValueError):
    """The bundle fails the Fano inequalities; no soliton exists."""


class BracketFailure(RuntimeError):
    """The bracket for the soliton constant failed to grow a sign change."""


def soliton_parameters(b: AdmissibleBundle) -> tuple[Fraction, list[Fraction]]:
    """lambda and the rigid roots x_a; requires the Fano inequalities."""
    verdict = fano_check(b)
    if not verdict.ok:
        raise NotFano("; ".join(verdict.reasons))
    lam = Fraction(b.d0 + b.dinf + 2, 2)
    xs = []
    for f in b.factors:
        xa = Fraction(b.d0 + b.dinf + 2) / (2 * f.s + b.dinf - b.d0)
        if not (0 < abs(xa) < 1):
            raise AssertionError(f"x_a = {xa} escaped (0,1); Fano inequalities violated?")
        if (xa > 0) != (f.sign > 0):
            raise AssertionError(f"x_a = {xa} has the wrong orientation")
        xs.append(xa)
    return lam, xs


@dataclass
class GFunction:
    """The boundary defect G(k), exactly evaluable at rational k."""
    integrand_poly: Polynomial   # L(t) * p_c(t)
    t0: Fraction                 # interior zero of the linear factor L

    def __call__(self, k) -> ExpValue:
        k = Fraction(k)
        e = ExpPolynomial([ExpTerm(k, self.integrand_poly)])
        return e.definite(Fraction(-1), Fraction(1))

    def at0(self) -> Fraction:
        """G(0), exact."""
        return self.integrand_poly.integrate(Fraction(-1), Fraction(1))

    def normalized(self, k, dps: int = 50):
        """e^{-k t0} G(k), numerically (strictly decreasing in k)."""
        import mpmath as mp
        with mp.workdps(dps):
            g = self(k).evaluate(dps)
            return g * mp.e ** (-mp.mpf(Fraction(k).numerator) / Fraction(k).denominator
                                * (mp.mpf(self.t0.numerator) / self.t0.denominator))


def G_function(b: AdmissibleBundle, x: list[Fraction]) -> GFunction:
    """Build G for the given bundle at the soliton roots x."""
    L = _linear_boundary_term(b.d0, b.dinf)
    pc = momentum_poly(b, x)
    t0 = Fraction(b.d0 - b.dinf, b.d0 + b.dinf + 2)
    return GFunction(L * pc, t0)


@dataclass
class SolitonSolution:
    bundle: AdmissibleBundle
    status: str                                  # "certified" | "not_fano"
    fano: Verdict
    lam: Optional[Fraction] = None
    x: list[Fraction] = field(default_factory=list)
    c: Optional[Fraction] = None                 # exact 0 or bisection midpoint
    c_bracket: Optional[tuple[Fraction, Fraction]] = None
    G0: Optional[Fraction] = None
    F: Optional[ExpPolynomial] = None
    is_kahler_einstein: bool = False
    residual_max: float = 0.0
    transcript: list[TranscriptStep] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, step: str, claim: str, method: str, result: str):
        self.transcript.append(TranscriptStep(step, claim, method, result))

    def momentum(self) -> Polynomial:
        return momentum_poly(self.bundle, self.x)

    def theta(self, z, dps: int = 50):
        """Theta(z) = F(z)/p_c(z); exact Fraction when c = 0, mpf otherwise."""
        z = Fraction(z)
        if z == 1 or z == -1:
            return Fraction(0)
        pc_z = self.momentum()(z)
        if self.F.is_polynomial():
            return self.F.polynomial_part()(z) / pc_z
        import mpmath as mp
        with mp.workdps(dps):
            return self.F.evaluate(z, dps) / (mp.mpf(pc_z.numerator) / pc_z.denominator)

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "fano": self.fano.to_json(),
            "is_kahler_einstein": self.is_kahler_einstein,
        }
        if self.lam is not None:
            out["lambda"] = rat_str(self.lam)
            out["x"] = [rat_str(v) for v in self.x]
        if self.G0 is not None:
            out["G0"] = rat_str(self.G0)
        if self.c is not None:
            out["c"] = rat_str(self.c)
            if self.c_bracket is not None:
                out["c_bracket"] = [rat_str(self.c_bracket[0]), rat_str(self.c_bracket[1])]
        if self.F is not None:
            out["F"] = self.F.to_json()
        out["residual_max"] = self.residual_max
        out["notes"] = list(self.notes)
        out["transcript"] = [t.to_json() for t in self.transcript]
        return out


def _bracket_soliton_constant(G: GFunction, g0: Fraction, width: Fraction,
                              residual: Fraction = Fraction(1, 10 ** 15)
                              ) -> tuple[Fraction, Fraction]:
    """Grow then bisect a bracket for the unique zero of G.

    The normalized G decreases from +inf to -inf, so sign(G) is + left of the
    zero and - right of it; with G(0) != 0 we grow away from 0 on the side the
    sign dictates.  Signs of G at rational points are exactly decidable.
    Bisection continues past the width target until |G(midpoint)| < residual.
    """
    if g0 < 0:
        lo, hi = Fraction(-1), Fraction(0)
        while G(lo).sign() < 0:
            lo *= 2
            if lo < -2 ** 40:
                raise BracketFailure("no sign change found growing left")
    else:
        lo, hi = Fraction(0), Fraction(1)
        while G(hi).sign() > 0:
            hi *= 2
            if hi > 2 ** 40:
                raise BracketFailure("no sign change found growing right")
    steps = 0
    while hi - lo > width or abs(G((lo + hi) / 2).evaluate(60)) >= mp_residual(residual):
        mid = (lo + hi) / 2
        if G(mid).sign() > 0:
            lo = mid
        else:
            hi = mid
        steps += 1
        if steps > 240:
            raise BracketFailure("bisection failed to meet the residual target")
    return lo, hi


def mp_residual(residual: Fraction):
    import mpmath as mp
    return mp.mpf(residual.numerator) / residual.denominator


def _soliton_profile(c: Fraction, integrand: Polynomial) -> ExpPolynomial:
    """F(z) = e^{-cz} int_{-1}^z e^{ct} L(t) p_c(t) dt, exactly.

    With psi the by-parts antiderivative (psi' + c psi = L p_c identically),
    F(z) = psi(z) - psi(-1) e^{-c(z+1)}; for c = 0 it is the plain polynomial
    antiderivative vanishing at -1.
    """
    if c == 0:
        psi = integrand.antiderivative()
        return ExpPolynomial([ExpTerm(Fraction(0), psi - psi(Fraction(-1)))])
    inner = ExpPolynomial([ExpTerm(c, integrand)]).antiderivative()
    (term,) = inner.terms
    psi = term.q
    boundary = Polynomial([-psi(Fraction(-1))])
    return ExpPolynomial([ExpTerm(Fraction(0), psi),
                          ExpTerm(-c, boundary, Fraction(-1))])


def solve_soliton(b: AdmissibleBundle, width: Fraction = C_WIDTH) -> SolitonSolution:
    """Decide and construct the admissible Kähler-Ricci soliton on the bundle."""
    if not b.all_kahler_einstein():
        raise NotKahlerEinsteinBase("soliton system needs Kähler-Einstein factors")
    rep = validate(b)
    if not rep.valid:
        raise ValueError("invalid bundle: " + "; ".join(rep.errors))
    verdict = fano_check(b)
    if not verdict.ok:
        sol = SolitonSolution(bundle=b, status="not_fano", fano=verdict)
        sol.add("fano", "Fano inequalities", "exact", "failed: " + "; ".join(verdict.reasons))
        sol.notes.append("no Kähler-Ricci soliton: the bundle is not Fano")
        return sol

    lam, xs = soliton_parameters(b)
    sol = SolitonSolution(bundle=b, status="certified", fano=verdict, lam=lam, x=xs)
    sol.notes.append(LAMBDA_NOTE)
    sol.add("parameters", "2*lambda = d0+dinf+2 and 2 s_a x_a = "
            "(dinf+1)(1-x_a) + (d0+1)(1+x_a)", "exact",
            f"lambda = {rat_str(lam)}, x = [{', '.join(map(rat_str, xs))}]")

    G = G_function(b, xs)
    g0 = G.at0()
    sol.G0 = g0
    sol.add("G0", "G(0) computed in exact rational arithmetic", "exact", rat_str(g0))

    if g0 == 0:
        c = Fraction(0)
        sol.c = c
        sol.is_kahler_einstein = True
        sol.add("c", "G(0) = 0: the soliton is Kähler-Einstein (c = 0)", "exact", "c = 0")
    else:
        lo, hi = _bracket_soliton_constant(G, g0, width)
        c = (lo + hi) / 2
        sol.c = c
        sol.c_bracket = (lo, hi)
        sol.is_kahler_einstein = False
        gc = abs(float(G(c).evaluate(40)))
        sol.add("c", "unique zero of G bisected to width " + rat_str(width),
                "bisection+residual", f"c in [{float(lo):.15f}, {float(hi):.15f}], "
                f"|G(c)| = {gc:.2e}")

    F = _soliton_profile(c, G.integrand_poly)
    sol.F = F

    # certification ---------------------------------------------------------
    fm1 = F.value_exact(Fraction(-1))
    if not fm1.is_zero():
        raise AssertionError("F(-1) != 0; construction broken")
    sol.add("boundary", "F(-1) = 0", "exact", "holds")
    f1 = F.value_exact(Fraction(1))
    if f1.is_zero():
        sol.add("boundary", "F(1) = 0", "exact", "holds")
    else:
        r = abs(float(f1.evaluate(40)))
        sol.add("boundary", "F(1) = e^{-c} G(c), small with the bisected c",
                "bisection+residual", f"|F(1)| = {r:.2e}")

    # the first-order equation F' + cF = L p_c holds as an exact identity
    Fp = F.derive()
    acc: dict[tuple, Polynomial] = {}
    for t in Fp.terms:
        acc[(t.k, t.shift)] = acc.get((t.k, t.shift), Polynomial()) + t.q
    for t in F.terms:
        acc[(t.k, t.shift)] = acc.get((t.k, t.shift), Polynomial()) + t.q * c
    target = {(Fraction(0), Fraction(0)): G.integrand_poly}
    residual_zero = all(
        (q - target.get(key, Polynomial())).is_zero() for key, q in acc.items())
    if not residual_zero:
        raise AssertionError("F' + cF != L p_c; construction broken")
    sol.add("ode", "F' + c F = ((d0+1)(1-z) - (dinf+1)(1+z)) p_c as exp-polynomials",
            "exact", "identity holds")

    # numeric residual sampling (belt and braces; the identity above is exact)
    res = 0.0
    pcf = [float(v) for v in momentum_poly(b, xs).coeffs]
    Lf = [float(v) for v in _linear_boundary_term(b.d0, b.dinf).coeffs]
    cf = float(c)
    for i in range(101):
        z = -1 + i / 50
        pz = _horner(pcf, z)
        fz = _eval_F_float(F, z)
        fpz = _eval_F_float(Fp, z)
        res = max(res, abs(fpz + cf * fz - _horner(Lf, z) * pz))
    sol.residual_max = res
    sol.add("residual", "pointwise check of the soliton ODE at 101 samples",
            "numeric", f"max residual {res:.2e}")

    # positivity: W(z) = e^{cz} F(z) has W' = e^{cz} L p_c with a single interior
    # sign change at t0, W(-1) = 0 and W(1) = G(c) (0 exactly when c = 0)
    pc = momentum_poly(b, xs)
    cert = certify_sign(pc, (Fraction(-1), Fraction(1)), "positive")
    if not cert.certified:
        raise AssertionError("momentum polynomial failed positivity")
    inside = Fraction(-1) < G.t0 < Fraction(1)
    sol.add("positivity", "p_c > 0 on (-1,1); linear factor changes sign once at t0",
            "sturm", f"t0 = {rat_str(G.t0)}, interior: {inside}")
    samples_ok = True
    worst = 1.0
    for i in range(1, 2000):
        z = -1 + i / 1000
        fz = _eval_F_float(F, z)
        worst = min(worst, fz)
        if fz <= 0:
            samples_ok = False
    sol.add("positivity", "F > 0 sampled at 10^-3 spacing", "numeric",
            f"min sample {worst:.3e}" + ("" if samples_ok else " (VIOLATION)"))
    if not samples_ok:
        raise AssertionError("profile positivity violated at a sample point")
    return sol


def _horner(coeffs: list[float], z: float) -> float:
    acc = 0.0
    for cc in reversed(coeffs):
        acc = acc * z + cc
    return acc


def _eval_F_float(F: ExpPolynomial, z: float) -> float:
    acc = 0.0
    for t in F.terms:
        acc += _horner([float(v) for v in t.q.coeffs], z) * math.exp(float(t.k) * (z - float(t.shift)))
    return acc


def ke_exists_on_fano(b: AdmissibleBundle) -> Verdict:
    """Exact Kähler-Einstein existence test on a Fano bundle: G(0) = 0.

    Equivalent to the soliton constant vanishing, and to B = 0 in the WBF
    construction at the soliton's roots.
    """
    verdict = fano_check(b)
    if not verdict.ok:
        raise NotFano("; ".join(verdict.reasons))
    _, xs = soliton_parameters(b)
    g0 = G_function(b, xs).at0()
    ok = g0 == 0
    return Verdict(ok, "Kähler-Einstein metric exists" if ok else
                   "no Kähler-Einstein metric (soliton only)",
                   [f"G(0) = {rat_str(g0)} (exact)"])
