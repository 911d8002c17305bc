"""Data model and validators for admissible projective bundles.

An admissible bundle is the combinatorial input of every solver: fibre dimension
data (d0, dinf), and one entry per Kähler-Einstein base factor carrying its
complex dimension, the sign of its metric, and the integer pair (p, q) whose
ratio s = p/q is the normalized Einstein constant.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .ratpoly import Polynomial, Surd, rat_str
from .report import Verdict


class InvalidFactor(ValueError):
    def __init__(self, index: int, rule: str):
        super().__init__(f"factor {index}: {rule}")
        self.index = index
        self.rule = rule


class NotKahlerEinsteinBase(ValueError):
    """A solver that needs Kähler-Einstein factors met a csc_hodge factor."""


class RootOutOfRange(ValueError):
    """A momentum-polynomial root violates 0 < |x_a| < 1."""


KAHLER_EINSTEIN = "kahler_einstein"
CSC_HODGE = "csc_hodge"


@dataclass(frozen=True)
class BaseFactor:
    """One Kähler(-Einstein) factor of the base.

    dim   -- complex dimension d_a (positive)
    sign  -- +1 / -1, the sign of (g_a, omega_a); equals sign(q)
    p     -- integer with rho_a = p alpha_a (Fano index when positive)
    q     -- nonzero integer with omega_a = q alpha_a
    kind  -- kahler_einstein (usable by all solvers) or csc_hodge (profile only)
    genus -- for dim = 1 factors, the genus (then p = 2(1-genus))
    """
    dim: int
    sign: int
    p: int
    q: int
    kind: str = KAHLER_EINSTEIN
    genus: int | None = None

    @property
    def s(self) -> Fraction:
        """Normalized Einstein constant s = p/q (Scal = +-2 d s)."""
        if self.kind != KAHLER_EINSTEIN:
            raise NotKahlerEinsteinBase("s is defined for Kähler-Einstein factors")
        return Fraction(self.p, self.q)

    def check(self, index: int) -> list[str]:
        """All invariant violations for this factor (empty when valid)."""
        errs = []
        if self.dim < 1:
            errs.append("dim must be a positive integer")
        if self.sign not in (1, -1):
            errs.append("sign must be +1 or -1")
        if self.q == 0:
            errs.append("q must be nonzero")
        elif (self.q > 0) - (self.q < 0) != self.sign:
            errs.append("sign(q) must equal sign")
        if self.p > self.dim + 1:
            errs.append(f"Kobayashi-Ochiai bound violated: p={self.p} > dim+1={self.dim + 1}")
        if self.genus is not None:
            if self.dim != 1:
                errs.append("genus is only meaningful for dim = 1 factors")
            elif self.genus < 0:
                errs.append("genus must be nonnegative")
            elif self.p != 2 * (1 - self.genus):
                errs.append(f"curve of genus {self.genus} needs p = {2 * (1 - self.genus)}")
        if self.kind not in (KAHLER_EINSTEIN, CSC_HODGE):
            errs.append(f"unknown kind {self.kind!r}")
        return errs

    def to_json(self) -> dict:
        out = {"dim": self.dim, "sign": self.sign, "p": self.p, "q": self.q}
        if self.kind != KAHLER_EINSTEIN:
            out["kind"] = self.kind
        if self.genus is not None:
            out["genus"] = self.genus
        return out


@dataclass(frozen=True)
class AdmissibleBundle:
    """P(E0 + Einf) -> S with S a (local) product of the given factors.

    d0 = rank E0 - 1 and dinf = rank Einf - 1.  The H^2(S, O*) torsion
    obstruction has no effective test from this data; it is carried as the
    user-asserted flag `assume_vector_bundle_exists`.
    """
    d0: int
    dinf: int
    factors: tuple[BaseFactor, ...]
    local_product_only: bool = False
    assume_vector_bundle_exists: bool = True

    def __init__(self, d0, dinf, factors, local_product_only=False,
                 assume_vector_bundle_exists=True):
        object.__setattr__(self, "d0", int(d0))
        object.__setattr__(self, "dinf", int(dinf))
        object.__setattr__(self, "factors", tuple(factors))
        object.__setattr__(self, "local_product_only", bool(local_product_only))
        object.__setattr__(self, "assume_vector_bundle_exists", bool(assume_vector_bundle_exists))

    @property
    def total_dim(self) -> int:
        """Complex dimension m = d0 + dinf + 1 + sum of factor dimensions."""
        return self.d0 + self.dinf + 1 + sum(f.dim for f in self.factors)

    def s_values(self) -> list[Fraction]:
        return [f.s for f in self.factors]

    def all_kahler_einstein(self) -> bool:
        return all(f.kind == KAHLER_EINSTEIN for f in self.factors)

    def to_json(self) -> dict:
        out = {
            "d0": self.d0,
            "dinf": self.dinf,
            "factors": [f.to_json() for f in self.factors],
            "local_product_only": self.local_product_only,
        }
        if not self.assume_vector_bundle_exists:
            out["assume_vector_bundle_exists"] = False
        return out

    @staticmethod
    def from_json(obj: Mapping) -> "AdmissibleBundle":
        try:
            factors = tuple(
                BaseFactor(
                    dim=int(f["dim"]), sign=int(f["sign"]), p=int(f["p"]), q=int(f["q"]),
                    kind=f.get("kind", KAHLER_EINSTEIN),
                    genus=(int(f["genus"]) if "genus" in f and f["genus"] is not None else None),
                )
                for f in obj["factors"]
            )
            return AdmissibleBundle(
                d0=int(obj["d0"]), dinf=int(obj["dinf"]), factors=factors,
                local_product_only=bool(obj.get("local_product_only", False)),
                assume_vector_bundle_exists=bool(obj.get("assume_vector_bundle_exists", True)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed bundle JSON: {exc}") from exc


@dataclass(frozen=True)
class RuledSurfaceBase:
    """A Hodge 4-manifold base S = P(E) -> Sigma with local product metric.

    c1(L) = (q1/2) v + q2 f; q2 is an integer unless q1 is odd and E is not
    spin (possible only for genus > 1), in which case q2 + 1/2 is an integer.
    """
    genus: int
    q1: int
    q2: Fraction
    spin: bool = True

    def check(self) -> list[str]:
        errs = []
        q2 = Fraction(self.q2)
        if self.genus < 0:
            errs.append("genus must be nonnegative")
        if self.q1 <= 0:
            errs.append("q1 must be a positive integer (normalize by L -> L^-1)")
        if (2 * q2).denominator != 1:
            errs.append("2*q2 must be an integer")
        if q2 == 0:
            errs.append("q2 must be nonzero")
        half_integral = q2.denominator == 2
        if half_integral:
            if self.spin or self.q1 % 2 == 0:
                errs.append("half-integral q2 requires q1 odd and a non-spin E")
            if self.genus <= 1:
                errs.append("non-spin E is only possible for genus > 1")
        if self.genus <= 1 and not self.spin:
            errs.append("genus <= 1 forces spin (deg E is even)")
        return errs

    @property
    def s1(self) -> Fraction:
        return Fraction(2, self.q1)

    @property
    def s2(self) -> Fraction:
        return Fraction(2 * (1 - self.genus)) / Fraction(self.q2)

    def to_json(self) -> dict:
        return {"genus": self.genus, "q1": self.q1, "q2": rat_str(Fraction(self.q2)),
                "spin": self.spin}


@dataclass
class ValidationReport:
    valid: bool
    s_values: list[str] = field(default_factory=list)
    ricci_flat_factors: list[int] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "s": self.s_values,
            "ricci_flat_factors": self.ricci_flat_factors,
            "errors": self.errors,
            "notes": self.notes,
        }


def validate(b: AdmissibleBundle, strict: bool = False) -> ValidationReport:
    """Check all bundle invariants; with strict=True raise InvalidFactor instead."""
    report = ValidationReport(valid=True)
    if b.d0 < 0 or b.dinf < 0:
        report.valid = False
        report.errors.append("d0 and dinf must be nonnegative")
    if not b.factors:
        report.valid = False
        report.errors.append("at least one base factor is required")
    for i, f in enumerate(b.factors):
        errs = f.check(i)
        if errs:
            report.valid = False
            report.errors.extend(f"factor {i}: {e}" for e in errs)
            if strict:
                raise InvalidFactor(i, errs[0])
        if f.kind == KAHLER_EINSTEIN and f.q != 0:
            report.s_values.append(rat_str(Fraction(f.p, f.q)))
            if f.p == 0:
                report.ricci_flat_factors.append(i)
                report.notes.append(f"factor {i} is Ricci-flat (p = 0, s = 0)")
        else:
            report.s_values.append("csc_hodge")
    report.notes.append(f"total complex dimension m = {b.total_dim}")
    if not b.assume_vector_bundle_exists:
        report.notes.append("caller did not assert existence of E0/Einf "
                            "(torsion obstruction in H^2(S, O*))")
    return report


def fano_check(b: AdmissibleBundle) -> Verdict:
    """Decide whether P(E0 + Einf) -> S is Fano.

    Positivity of c1 is equivalent to: s_a > d0 + 1 on sign=+1 factors and
    s_a < -(dinf + 1) on sign=-1 factors.
    """
    if not b.all_kahler_einstein():
        raise NotKahlerEinsteinBase("Fano test needs a Kähler-Einstein base")
    reasons = []
    ok = True
    for i, f in enumerate(b.factors):
        s = f.s
        if f.sign > 0:
            cond = s > b.d0 + 1
            reasons.append(f"factor {i}: s={rat_str(s)} {'>' if cond else '<='} d0+1={b.d0 + 1}")
        else:
            cond = s < -(b.dinf + 1)
            reasons.append(
                f"factor {i}: s={rat_str(s)} {'<' if cond else '>='} -(dinf+1)={-(b.dinf + 1)}")
        ok = ok and cond
    return Verdict(ok, "Fano" if ok else "not Fano", reasons)


def momentum_poly(b: AdmissibleBundle, x: Sequence[Union[Fraction, Surd]]) -> Polynomial:
    """The momentum polynomial p_c(t) = prod (1 + x_a t)^{d_a}.

    x supplies one root per base factor; the fibre roots x_0 = 1 (multiplicity
    d0) and x_inf = -1 (multiplicity dinf) are appended automatically.
    """
    if len(x) != len(b.factors):
        raise ValueError("need exactly one root per base factor")
    p = Polynomial([1])
    for f, xa in zip(b.factors, x):
        mag_ok = (abs(xa) < 1 and xa != 0) if not isinstance(xa, Surd) else (
            xa.sign() != 0 and (abs(xa) - 1).sign() < 0)
        if not mag_ok:
            raise RootOutOfRange(f"|x| must lie in (0,1), got {xa}")
        p = p * Polynomial([1, xa]) ** f.dim
    p = p * Polynomial([1, 1]) ** b.d0 * Polynomial([1, -1]) ** b.dinf
    return p
