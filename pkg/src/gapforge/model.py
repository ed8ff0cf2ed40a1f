"""Domain types and their JSON wire formats.

Arbitrary-precision integers (CRT witnesses, primorials) are plain Python
ints; they serialize as decimal strings so consumers in other languages can
parse them losslessly.  Everything else is 64-bit scale and serializes as a
JSON number.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


@dataclass(frozen=True)
class Rational:
    """Non-negative rational kept in lowest terms, den > 0."""

    num: int
    den: int = 1

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        if self.num < 0:
            raise ValueError("negative rationals do not occur here")
        g = math.gcd(self.num, self.den)
        if g > 1:
            object.__setattr__(self, "num", self.num // g)
            object.__setattr__(self, "den", self.den // g)

    def __float__(self) -> float:
        return self.num / self.den

    def __le__(self, other: "Rational") -> bool:
        return self.num * other.den <= other.num * self.den

    def __lt__(self, other: "Rational") -> bool:
        return self.num * other.den < other.num * self.den

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"

    def to_json(self) -> dict:
        return {"num": self.num, "den": self.den}

    @classmethod
    def from_json(cls, obj: dict) -> "Rational":
        return cls(int(obj["num"]), int(obj["den"]))


class ClassKind(Enum):
    FORCED = "forced"
    GREEDY = "greedy"
    MATCHED = "matched"


@dataclass(frozen=True)
class ResidueClass:
    """The class a mod p, tagged with how the pipeline chose it."""

    p: int
    a: int
    kind: ClassKind

    def to_json(self) -> dict:
        return {"p": self.p, "a": self.a, "kind": self.kind.value}

    @classmethod
    def from_json(cls, obj: dict) -> "ResidueClass":
        return cls(int(obj["p"]), int(obj["a"]), ClassKind(obj["kind"]))


@dataclass(frozen=True)
class GapRecord:
    """A gap between consecutive members of some set, with witnesses.

    hi - lo = gap, and no member of the set lies strictly between lo and hi.
    Witnesses from certificate-derived records may exceed 64 bits.
    """

    gap: int
    lo: int
    hi: int

    def to_json(self) -> dict:
        return {"gap": self.gap, "lo": self.lo, "hi": self.hi}

    @classmethod
    def from_json(cls, obj: dict) -> "GapRecord":
        return cls(int(obj["gap"]), int(obj["lo"]), int(obj["hi"]))


@dataclass(frozen=True)
class ProgressionStats:
    """Measured prime count in the progression b mod q up to x.

    delta is the exact deficit parameter count * phi(q) / x.
    """

    q: int
    b: int
    x: int
    count: int
    delta: Rational

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "b": self.b,
            "x": self.x,
            "count": self.count,
            "delta": self.delta.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ProgressionStats":
        return cls(
            q=int(obj["q"]),
            b=int(obj["b"]),
            x=int(obj["x"]),
            count=int(obj["count"]),
            delta=Rational.from_json(obj["delta"]),
        )


@dataclass(frozen=True)
class JacobsthalValue:
    """A value of (or lower bound on) the maximal rough-number gap at u.

    exact values come from a full-period scan; bounds come from certificates,
    in which case value = y + 2 and gap_lower_rational carries the reported
    (x - b)/q form.
    """

    u: int
    value: int
    witness: GapRecord
    exact: bool
    gap_lower_rational: Optional[Rational] = None

    def to_json(self) -> dict:
        out = {
            "u": self.u,
            "value": self.value,
            "witness": self.witness.to_json(),
            "exact": self.exact,
        }
        if self.gap_lower_rational is not None:
            out["gap_lower_rational"] = self.gap_lower_rational.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "JacobsthalValue":
        bound = obj.get("gap_lower_rational")
        return cls(
            u=int(obj["u"]),
            value=int(obj["value"]),
            witness=GapRecord.from_json(obj["witness"]),
            exact=bool(obj["exact"]),
            gap_lower_rational=None if bound is None else Rational.from_json(bound),
        )


@dataclass(frozen=True)
class CrtWitness:
    """Integer T with every T + n, 0 <= n <= y, divisible by a class prime.

    P is the product of the class primes.  y is meaningful only for
    witnesses produced and validated by covering.crt_witness; the raw
    combiner arith.crt_combine leaves it at 0 and claims nothing about runs.
    """

    T: int
    P: int
    y: int = 0


@dataclass(frozen=True)
class ScenarioResult:
    """Log-space evaluation of the gap bound for hypothetical (q, delta, B)."""

    log_q: float
    delta: float
    B: float
    log_x: float
    log_u: float
    log_gap_bound: float

    def to_json(self) -> dict:
        return {
            "log_q": self.log_q,
            "delta": self.delta,
            "B": self.B,
            "log_x": self.log_x,
            "log_u": self.log_u,
            "log_gap_bound": self.log_gap_bound,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ScenarioResult":
        return cls(**{k: float(obj[k]) for k in (
            "log_q", "delta", "B", "log_x", "log_u", "log_gap_bound")})


@dataclass(frozen=True)
class CoveringCertificate:
    """Everything needed to re-check one run of the covering construction."""

    x: int
    q: int
    b: int
    delta: Rational
    u: int
    y: int
    classes: tuple[ResidueClass, ...]
    survivors_initial: int
    survivors_after_greedy: int

    def bound_rational(self) -> Rational:
        """The reported lower-bound form (x - b)/q."""
        return Rational(self.x - self.b, self.q)


@dataclass(frozen=True)
class CheckResult:
    check: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"check": self.check, "pass": self.passed, "detail": self.detail}


@dataclass
class VerificationReport:
    entries: list[CheckResult] = field(default_factory=list)

    def add(self, check: str, passed: bool, detail: str = "") -> None:
        self.entries.append(CheckResult(check, passed, detail))

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failures(self) -> list[CheckResult]:
        return [e for e in self.entries if not e.passed]

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.entries]


def certificate_to_dict(
    cert: CoveringCertificate, witness: Optional[CrtWitness] = None
) -> dict:
    """Certificate as a JSON-ready dict with the stable field order."""
    out = {
        "x": cert.x,
        "q": cert.q,
        "b": cert.b,
        "delta": cert.delta.to_json(),
        "u": cert.u,
        "y": cert.y,
        "survivors_initial": cert.survivors_initial,
        "survivors_after_greedy": cert.survivors_after_greedy,
        "classes": [c.to_json() for c in cert.classes],
    }
    if witness is not None:
        out["witness"] = {"T": str(witness.T), "P": str(witness.P)}
    out["bound"] = {
        "jacobsthal_u": cert.u,
        "gap_lower_rational": cert.bound_rational().to_json(),
    }
    return out


def certificate_to_json(
    cert: CoveringCertificate, witness: Optional[CrtWitness] = None
) -> str:
    """Deterministic JSON text; identical inputs give identical bytes."""
    return json.dumps(certificate_to_dict(cert, witness), indent=2) + "\n"


def certificate_from_dict(obj: dict) -> tuple[CoveringCertificate, Optional[CrtWitness]]:
    """Parse a certificate dict; returns (certificate, stored witness or None).

    Raises KeyError / ValueError / TypeError on malformed input; callers that
    need an I/O-style failure should catch those.
    """
    cert = CoveringCertificate(
        x=int(obj["x"]),
        q=int(obj["q"]),
        b=int(obj["b"]),
        delta=Rational.from_json(obj["delta"]),
        u=int(obj["u"]),
        y=int(obj["y"]),
        classes=tuple(ResidueClass.from_json(c) for c in obj["classes"]),
        survivors_initial=int(obj["survivors_initial"]),
        survivors_after_greedy=int(obj["survivors_after_greedy"]),
    )
    witness = None
    if "witness" in obj:
        w = obj["witness"]
        witness = CrtWitness(T=int(w["T"]), P=int(w["P"]), y=cert.y)
    return cert, witness
