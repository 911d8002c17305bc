"""Uniform report model, serialization and certification transcripts.

Reports are deterministic: identical inputs produce byte-identical output
(stable key order, stable row order).  Exact values are serialized as "p/q"
strings or {a, b, n} surd objects, never as floats; decimal renderings are
presentation-only.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .ratpoly import ExpValue, IsolatedRoot, Polynomial, Surd, decimal_str, rat_str

VERSION = "0.1.0"

CERTIFYING_METHODS = ("exact", "sturm", "bisection+residual")


class UnsupportedFormat(ValueError):
    pass


@dataclass
class Verdict:
    """A machine-readable yes/no decision with its supporting reasons."""
    ok: bool
    label: str
    reasons: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "label": self.label, "reasons": list(self.reasons)}


@dataclass
class TranscriptStep:
    step: str
    claim: str
    method: str    # exact | sturm | bisection+residual | predicate | numeric
    result: str

    def to_json(self) -> dict:
        return {"step": self.step, "claim": self.claim,
                "method": self.method, "result": self.result}


def jsonable(value: Any) -> Any:
    """Recursively convert exact values into the canonical JSON encoding."""
    if isinstance(value, Fraction):
        return rat_str(value)
    if isinstance(value, Surd):
        return rat_str(value.as_fraction()) if value.is_rational() else value.to_json()
    if isinstance(value, (IsolatedRoot, Polynomial, ExpValue)):
        return value.to_json()
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_json"):
        return value.to_json()
    return value


@dataclass
class Report:
    """Envelope shared by all solver and classification outputs."""
    query: dict
    verdict: str
    witnesses: list = field(default_factory=list)
    transcript: list[TranscriptStep] = field(default_factory=list)
    citations: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    version: str = VERSION

    def add(self, step: str, claim: str, method: str, result: str) -> None:
        self.transcript.append(TranscriptStep(step, claim, method, result))

    def check_invariant(self) -> None:
        """Certified/refuted verdicts must rest on at least one certifying step."""
        if self.verdict in ("certified", "refuted"):
            if not any(t.method in CERTIFYING_METHODS for t in self.transcript):
                raise ValueError("verdict lacks a certifying transcript step")

    def to_json(self) -> dict:
        out = {
            "query": jsonable(self.query),
            "verdict": self.verdict,
            "witnesses": [jsonable(w) for w in self.witnesses],
            "transcript": [t.to_json() for t in self.transcript],
            "citations": list(self.citations),
            "version": self.version,
        }
        if self.extra:
            out["extra"] = jsonable(self.extra)
        return out


def _emit_json(payload: Any) -> bytes:
    return (json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode()


def _emit_table(rows: Sequence[dict]) -> bytes:
    if not rows:
        return b"(empty)\n"
    cols = list(rows[0].keys())
    for r in rows[1:]:
        for k in r:
            if k not in cols:
                cols.append(k)
    rendered = [[str(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in rendered)) for i, c in enumerate(cols)]
    buf = io.StringIO()
    buf.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
    buf.write("  ".join("-" * w for w in widths) + "\n")
    for row in rendered:
        buf.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")
    return buf.getvalue().encode()


def _emit_csv(rows: Sequence[Sequence], header: Sequence[str]) -> bytes:
    # numeric-only fields by contract: comma separator, LF endings, no quoting
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(str(v) for v in row) + "\n")
    return buf.getvalue().encode()


def emit(report: Report | dict | list, format: str = "json", *,
         rows: Sequence[Sequence] | None = None,
         header: Sequence[str] | None = None) -> bytes:
    """Serialize a report deterministically; formats: json, table, csv."""
    if format == "json":
        payload = report.to_json() if isinstance(report, Report) else jsonable(report)
        if isinstance(report, Report):
            report.check_invariant()
        return _emit_json(payload)
    if format == "table":
        if isinstance(report, list):
            return _emit_table(report)
        payload = report.to_json() if isinstance(report, Report) else report
        flat = [{"field": k, "value": json.dumps(v, sort_keys=True, ensure_ascii=False)}
                for k, v in sorted(payload.items())]
        return _emit_table(flat)
    if format == "csv":
        if rows is None or header is None:
            raise UnsupportedFormat("csv emission needs rows and header")
        return _emit_csv(rows, header)
    raise UnsupportedFormat(f"unknown format {format!r}")


def render_value(value, digits: int = 15) -> str:
    """Human decimal with exactness annotation, e.g. "0.875 (exact: 7/8")."""
    if isinstance(value, Fraction):
        return f"{decimal_str(value, digits)} (exact: {rat_str(value)})"
    if isinstance(value, Surd):
        if value.is_rational():
            return render_value(value.as_fraction(), digits)
        return f"{decimal_str(value, digits)} (exact: {value})"
    if isinstance(value, IsolatedRoot) and value.exact is not None:
        return render_value(value.exact, digits)
    return decimal_str(value, digits)
