"""The covering-system pipeline.

Turns a measured prime deficit in a progression b mod q into an explicit,
machine-checkable set of residue classes a_p mod p (one per prime p <= u)
covering every integer in [0, y], y = floor((x - b)/q).  Each stage is
exposed on its own so any step can be re-checked independently; the
verifier re-derives everything a certificate claims.

Also hosts the log-space scenario calculator for parameter regimes far
beyond anything constructible.
"""

from __future__ import annotations

import logging
import math
from decimal import Decimal, localcontext
from typing import Optional

from .arith import crt_combine, factorize, is_prime, mod_inverse, multi_mod
from .config import DEFAULT, Config
from .errors import (
    BadProgression,
    DomainError,
    GapforgeError,
    InsufficientPrimes,
    InvalidCertificate,
    Overflow,
    ResourceLimit,
)
from .model import (
    ClassKind,
    CoveringCertificate,
    CrtWitness,
    Rational,
    ResidueClass,
    ScenarioResult,
    VerificationReport,
)
from .sieve import prime_count_ap, primes_in_range, primes_up_to

logger = logging.getLogger(__name__)

_U64_MAX = 2**64 - 1


def _ratio_ok(u: int, lhs_factor: int, log_factor: int) -> bool:
    """Decide u * lhs_factor >= log_factor * ln(u) without rounding doubt.

    Fast float path with an error band; ambiguous comparisons re-run under
    Decimal at increasing precision.  Exact ties cannot occur (ln of an
    integer >= 2 is irrational), so the loop always terminates.
    """
    if log_factor <= 0:
        return True
    lhs = u * lhs_factor
    try:
        approx = log_factor * math.log(u)
        if lhs > approx * (1 + 1e-12):
            return True
        if lhs < approx * (1 - 1e-12):
            return False
    except OverflowError:
        pass
    prec = 50
    while True:
        with localcontext() as ctx:
            ctx.prec = prec
            rhs = Decimal(log_factor) * Decimal(u).ln()
            band = Decimal(10) ** (rhs.adjusted() - prec + 2)
            if Decimal(lhs) > rhs + band:
                return True
            if Decimal(lhs) < rhs - band:
                return False
        prec *= 2


def compute_u(x: int, q: int, delta: Rational) -> int:
    """Least integer u with u^2 > 4x and u / ln(u) >= 10 * delta * x / q.

    The square condition is checked in exact integers; the ratio condition
    compares u * q * delta.den against 10 * delta.num * x * ln(u) with a
    precision guard, so boundary values never depend on float rounding.
    """
    if not x > q >= 1:
        raise ValueError(f"need x > q >= 1, got x={x}, q={q}")
    if not Rational(0) <= delta <= Rational(1):
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    u_sq = math.isqrt(4 * x) + 1
    if delta.num == 0:
        return u_sq
    lhs_factor = q * delta.den
    log_factor = 10 * delta.num * x
    hi = max(4, u_sq)
    while not _ratio_ok(hi, lhs_factor, log_factor):
        hi *= 2
        if hi > 2 * _U64_MAX:
            raise Overflow("u exceeds the 64-bit range")
    lo = 3
    while lo < hi:
        mid = (lo + hi) // 2
        if _ratio_ok(mid, lhs_factor, log_factor):
            hi = mid
        else:
            lo = mid + 1
    u = max(u_sq, lo)
    if u > _U64_MAX:
        raise Overflow("u exceeds the 64-bit range")
    return u


def forced_classes(u: int, q: int, b: int) -> list[ResidueClass]:
    """The unique class killing the progression mod p, for each p <= u/2, p not dividing q.

    a_p solves q * a_p + b == 0 (mod p).
    """
    if u < 3:
        raise ValueError("need u >= 3")
    if math.gcd(b, q) != 1:
        raise ValueError(f"need gcd(b, q) = 1, got gcd = {math.gcd(b, q)}")
    out = []
    for p in primes_up_to(u // 2):
        if q % p == 0:
            continue
        a = (-b) * mod_inverse(q % p, p) % p
        out.append(ResidueClass(p, a, ClassKind.FORCED))
    return out


def sieve_survivors(
    y: int, forced: list[ResidueClass], *, config: Optional[Config] = None
) -> list[int]:
    """Ascending n in [0, y] avoiding every forced class."""
    cfg = config or DEFAULT
    if y < 0:
        raise ValueError("need y >= 0")
    if y + 1 > cfg.memory_budget:
        raise ResourceLimit(f"survivor sieve over [0, {y}] exceeds the memory budget")
    seen = set()
    for cls in forced:
        if cls.p in seen:
            raise ValueError(f"duplicate forced prime {cls.p}")
        seen.add(cls.p)
    flags = bytearray(y + 1)
    for cls in forced:
        start = cls.a % cls.p
        if start <= y:
            flags[start :: cls.p] = b"\x01" * ((y - start) // cls.p + 1)
    return [n for n in range(y + 1) if not flags[n]]


def best_residue(survivors: list[int], p: int) -> tuple[int, int]:
    """Residue mod p hitting the most survivors; ties take the smallest.

    Returns (residue, hit count); an empty survivor list gives (0, 0).
    """
    if not survivors:
        return 0, 0
    counts: dict[int, int] = {}
    for n in survivors:
        r = n % p
        counts[r] = counts.get(r, 0) + 1
    top = max(counts.values())
    return min(r for r, c in counts.items() if c == top), top


def greedy_cover(
    survivors: list[int], q: int, u: int
) -> tuple[list[ResidueClass], list[int]]:
    """Greedily cover survivors with one class per prime p | q, p <= u/2.

    Primes are taken in ascending order; each step picks the residue hitting
    the most remaining survivors (covering at least a 1/p share).  The at
    most one prime factor of q above u/2 is skipped.  Returns the chosen
    classes and the still-uncovered survivors.
    """
    if any(a >= b for a, b in zip(survivors, survivors[1:])):
        raise ValueError("survivors must be ascending and distinct")
    classes = []
    remaining = list(survivors)
    for p, _ in factorize(q):
        if 2 * p > u:
            continue
        a, _hits = best_residue(remaining, p)
        classes.append(ResidueClass(p, a, ClassKind.GREEDY))
        remaining = [n for n in remaining if n % p != a]
    return classes, remaining


def match_large_primes(remaining: list[int], u: int) -> list[ResidueClass]:
    """Pair leftover survivors with distinct fresh primes in (u/2, u].

    The i-th survivor (ascending) gets the i-th fresh prime (ascending) and
    the class n mod p aimed straight at it.  Raises InsufficientPrimes when
    the fresh primes run out, reporting whether the sufficient condition
    |N'| <= u / (5 ln u) held.
    """
    if any(a >= b for a, b in zip(remaining, remaining[1:])):
        raise ValueError("remaining survivors must be ascending and distinct")
    if not remaining:
        return []
    fresh = primes_in_range(u // 2, u)
    if len(remaining) > len(fresh):
        holds = len(remaining) * 5 * math.log(u) <= u
        raise InsufficientPrimes(len(remaining), len(fresh), holds)
    return [
        ResidueClass(p, n % p, ClassKind.MATCHED)
        for n, p in zip(remaining, fresh)
    ]


def build_certificate(
    x: int,
    q: int,
    b: int,
    delta_override: Optional[Rational] = None,
    *,
    config: Optional[Config] = None,
) -> CoveringCertificate:
    """Run the whole construction for (x, q, b) and self-check the result.

    delta is measured exactly from the primes unless an override is given
    (the override explores the construction under a hypothetical deficit).
    Deterministic: identical arguments give byte-identical certificates.
    """
    cfg = config or DEFAULT
    if not 0 < b < q < x:
        raise BadProgression(f"need 0 < b < q < x, got b={b}, q={q}, x={x}")
    if math.gcd(b, q) != 1:
        raise BadProgression(f"gcd({b}, {q}) > 1")
    if delta_override is not None:
        delta = delta_override
    else:
        delta = prime_count_ap(x, q, b, config=cfg).delta
    u = compute_u(x, q, delta)
    y = (x - b) // q
    forced = forced_classes(u, q, b)
    survivors = sieve_survivors(y, forced, config=cfg)
    greedy, remaining = greedy_cover(survivors, q, u)
    if remaining and len(remaining) * 5 * math.log(u) > u:
        logger.warning(
            "matching %d survivors at u=%d: the sufficient condition "
            "|N'| <= u/(5 ln u) fails, proceeding on the actual prime supply",
            len(remaining),
            u,
        )
    matched = match_large_primes(remaining, u)
    cert = CoveringCertificate(
        x=x,
        q=q,
        b=b,
        delta=delta,
        u=u,
        y=y,
        classes=tuple(forced + greedy + matched),
        survivors_initial=len(survivors),
        survivors_after_greedy=len(remaining),
    )
    report = verify_certificate(cert, config=cfg)
    if not report.ok:  # pragma: no cover - indicates an internal bug
        raise InvalidCertificate(
            "freshly built certificate failed self-verification: "
            + "; ".join(f"{e.check}: {e.detail}" for e in report.failures)
        )
    return cert


def _coverage_gap(cert: CoveringCertificate, cfg: Config) -> Optional[int]:
    """Smallest n in [0, y] covered by no class, or None if all covered."""
    if cert.y + 1 > cfg.memory_budget:
        raise ResourceLimit("coverage check exceeds the memory budget")
    flags = bytearray(cert.y + 1)
    for cls in cert.classes:
        start = cls.a % cls.p
        if start <= cert.y:
            flags[start :: cls.p] = b"\x01" * ((cert.y - start) // cls.p + 1)
    pos = flags.find(0)
    return None if pos == -1 else pos


def verify_certificate(
    cert: CoveringCertificate, strict: bool = False, *, config: Optional[Config] = None
) -> VerificationReport:
    """Check a certificate and report every failure; never raises.

    Structural checks re-examine what the certificate states: distinct prime
    moduli, kind placement, y and u consistency, and complete coverage of
    [0, y].  strict additionally re-derives each pipeline stage from
    (x, q, b, delta) and compares, and re-measures the prime count behind
    delta, so any tampering with a pipeline-produced certificate shows up.
    """
    cfg = config or DEFAULT
    report = VerificationReport()
    primes = [c.p for c in cert.classes]
    report.add(
        "class_primes_distinct",
        len(set(primes)) == len(primes),
        "" if len(set(primes)) == len(primes) else "a modulus repeats",
    )
    bad_prime = next((p for p in primes if not is_prime(p)), None)
    report.add(
        "class_primes_prime",
        bad_prime is None,
        "" if bad_prime is None else f"p={bad_prime} is not prime",
    )
    over = next((p for p in primes if p > cert.u), None)
    report.add(
        "class_primes_at_most_u",
        over is None,
        "" if over is None else f"p={over} exceeds u={cert.u}",
    )
    bad_res = next((c for c in cert.classes if not 0 <= c.a < c.p), None)
    report.add(
        "residues_in_range",
        bad_res is None,
        "" if bad_res is None else f"a={bad_res.a} outside [0, {bad_res.p})",
    )
    placement = ""
    for c in cert.classes:
        if c.kind is ClassKind.MATCHED:
            if 2 * c.p <= cert.u:
                placement = f"matched p={c.p} is not above u/2"
        elif 2 * c.p > cert.u:
            placement = f"{c.kind.value} p={c.p} is above u/2"
        elif c.kind is ClassKind.GREEDY and cert.q % c.p != 0:
            placement = f"greedy p={c.p} does not divide q"
        elif c.kind is ClassKind.FORCED and cert.q % c.p == 0:
            placement = f"forced p={c.p} divides q"
        if placement:
            break
    report.add("kind_placement", not placement, placement)
    y_ok = cert.q > 0 and cert.y == (cert.x - cert.b) // cert.q
    report.add(
        "y_matches",
        y_ok,
        "" if y_ok else f"y={cert.y} but floor((x-b)/q) disagrees",
    )
    u_ok = cert.u * cert.u > 4 * cert.x
    report.add("u_exceeds_2sqrt", u_ok, "" if u_ok else f"u^2 <= 4x at u={cert.u}")
    try:
        gap = _coverage_gap(cert, cfg)
        report.add(
            "covers_range",
            gap is None,
            "" if gap is None else f"n={gap} is covered by no class",
        )
    except ResourceLimit as exc:
        report.add("covers_range", False, str(exc))

    if not strict:
        return report

    by_kind = {
        kind: [c for c in cert.classes if c.kind is kind] for kind in ClassKind
    }
    bad_cong = next(
        (
            c
            for c in by_kind[ClassKind.FORCED]
            if (cert.q * c.a + cert.b) % c.p != 0
        ),
        None,
    )
    report.add(
        "forced_congruence",
        bad_cong is None,
        ""
        if bad_cong is None
        else f"q*a+b != 0 mod {bad_cong.p} for a={bad_cong.a}",
    )
    try:
        expected_forced = forced_classes(cert.u, cert.q, cert.b)
        match = set(expected_forced) == set(by_kind[ClassKind.FORCED])
        report.add(
            "forced_classes_match",
            match,
            "" if match else "forced classes differ from re-derivation",
        )
    except (GapforgeError, ValueError) as exc:
        expected_forced = None
        report.add("forced_classes_match", False, str(exc))
    try:
        measured = prime_count_ap(cert.x, cert.q, cert.b, config=cfg).delta
        hyp_ok = measured <= cert.delta
        report.add(
            "delta_hypothesis",
            hyp_ok,
            f"measured {measured}, recorded {cert.delta}",
        )
    except (GapforgeError, ValueError) as exc:
        report.add("delta_hypothesis", False, str(exc))
    try:
        u_re = compute_u(cert.x, cert.q, cert.delta)
        report.add(
            "u_matches_recompute",
            u_re == cert.u,
            "" if u_re == cert.u else f"recomputed u={u_re}, recorded {cert.u}",
        )
    except (GapforgeError, ValueError) as exc:
        report.add("u_matches_recompute", False, str(exc))
    if expected_forced is None:
        report.add("survivor_accounting", False, "forced re-derivation failed")
        report.add("greedy_classes_match", False, "forced re-derivation failed")
        report.add("matched_classes_match", False, "forced re-derivation failed")
        return report
    try:
        survivors = sieve_survivors(cert.y, expected_forced, config=cfg)
        init_ok = len(survivors) == cert.survivors_initial
        greedy_set = {(c.p, c.a) for c in by_kind[ClassKind.GREEDY]}
        after = [
            n
            for n in survivors
            if all(n % p != a for p, a in greedy_set)
        ]
        after_ok = len(after) == cert.survivors_after_greedy
        report.add(
            "survivor_accounting",
            init_ok and after_ok,
            f"|N|={len(survivors)} recorded {cert.survivors_initial}; "
            f"|N'|={len(after)} recorded {cert.survivors_after_greedy}",
        )
        expected_greedy, remaining = greedy_cover(survivors, cert.q, cert.u)
        g_ok = expected_greedy == by_kind[ClassKind.GREEDY]
        report.add(
            "greedy_classes_match",
            g_ok,
            "" if g_ok else "greedy classes differ from deterministic re-run",
        )
        expected_matched = match_large_primes(remaining, cert.u)
        m_ok = expected_matched == by_kind[ClassKind.MATCHED]
        report.add(
            "matched_classes_match",
            m_ok,
            "" if m_ok else "matched classes differ from deterministic re-run",
        )
    except (GapforgeError, ValueError) as exc:
        report.add("pipeline_re_run", False, str(exc))
    return report


def crt_witness(
    cert: CoveringCertificate, *, config: Optional[Config] = None
) -> CrtWitness:
    """Concrete T with T + n divisible by a class prime for all n in [0, y].

    T solves T == -a_p (mod p) over every class; a T of 0 is shifted up by
    one period so the witness run sits strictly inside the positive
    integers.  Validation walks all y + 1 offsets through the actual
    residues of T, which is the gcd(T + n, P) > 1 check evaluated without
    materializing y big gcds.
    """
    cfg = config or DEFAULT
    report = verify_certificate(cert, config=cfg)
    if not report.ok:
        raise InvalidCertificate(
            "; ".join(f"{e.check}: {e.detail}" for e in report.failures)
        )
    combined = crt_combine(cert.classes)
    T, P = combined.T, combined.P
    if T == 0:
        T += P
    primes = [c.p for c in cert.classes]
    residues = multi_mod(T, primes)
    flags = bytearray(cert.y + 1)
    for p, r in zip(primes, residues):
        start = (-r) % p
        if start <= cert.y:
            flags[start::p] = b"\x01" * ((cert.y - start) // p + 1)
    miss = flags.find(0)
    if miss != -1:  # pragma: no cover - coverage check above rules this out
        raise InvalidCertificate(f"gcd(T+{miss}, P) = 1; witness is not covered")
    return CrtWitness(T=T, P=P, y=cert.y)


def scenario_bound(log_q: float, delta: float, B: float) -> ScenarioResult:
    """Evaluate the exceptional-zero gap bound in log space.

    Pure arithmetic on the asymptotic forms: log_x = B log q,
    u ~ delta * x * log x / q, and the bound u / (delta log u); nothing is
    constructed.  Raises DomainError outside log_q > 0, 0 < delta < 1, B > 1
    or when the implied u drops to 1 or below (iterated log undefined).
    """
    if not (math.isfinite(log_q) and math.isfinite(delta) and math.isfinite(B)):
        raise DomainError("inputs must be finite")
    if log_q <= 0:
        raise DomainError(f"log_q must be positive, got {log_q}")
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie strictly in (0, 1), got {delta}")
    if B <= 1:
        raise DomainError(f"B must exceed 1, got {B}")
    log_x = B * log_q
    log_u = math.log(delta) + log_x + math.log(log_x) - log_q
    if log_u <= 0:
        raise DomainError(
            f"implied u is at or below 1 (log_u = {log_u:.4g}); scenario is degenerate"
        )
    log_gap_bound = log_u - math.log(delta) - math.log(log_u)
    return ScenarioResult(
        log_q=log_q,
        delta=delta,
        B=B,
        log_x=log_x,
        log_u=log_u,
        log_gap_bound=log_gap_bound,
    )
