"""Exact integer primitives: modular arithmetic, primality, totient,
primorials, and CRT combination over arbitrary precision.

Everything here is a pure function; results are exact, never probabilistic.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

from .errors import DuplicateModulus, NotInvertible, ZeroModulus
from .model import CrtWitness, ResidueClass

# Small primes used both for trial division and to seed the factorizer.
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Fixed witness set proving primality for every n < 2**64
# (the classic seven-base set from miller-rabin.appspot.com).
_MR_BASES = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m, in [1, m).

    Raises ZeroModulus for m < 2 and NotInvertible when gcd(a, m) > 1.
    """
    if m < 2:
        raise ZeroModulus(f"modulus must be at least 2, got {m}")
    try:
        return pow(a, -1, m)
    except ValueError:
        raise NotInvertible(f"{a} is not invertible modulo {m}") from None


def is_prime(n: int) -> bool:
    """Deterministic primality test, exact for all n < 2**64."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """A nontrivial factor of composite n (Brent's cycle variant).

    Deterministic: tries increasing polynomial offsets until one succeeds.
    """
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"rho failed to factor {n}")  # pragma: no cover


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization [(p, e), ...] with p ascending.

    Trial division by small primes, then Pollard rho on what remains;
    fine for the 64-bit desk-scale inputs this package deals with.
    """
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    # continue trial division a bit beyond the fixed table
    p = _SMALL_PRIMES[-1] + 2
    while p * p <= n and p < 10_000:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 2
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return sorted(out.items())


def totient(q: int) -> int:
    """Euler's phi, computed from the factorization of q."""
    if q < 1:
        raise ValueError("totient expects q >= 1")
    phi = 1
    for p, e in factorize(q):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def small_primes_up_to(n: int) -> list[int]:
    """Plain Eratosthenes, for the modest limits arith itself needs."""
    if n < 2:
        return []
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = b"\x00" * ((n - p * p) // p + 1)
    return [i for i in range(2, n + 1) if flags[i]]


def primorial(u: int) -> int:
    """Product of all primes <= u."""
    if u < 2:
        raise ValueError("primorial expects u >= 2")
    out = 1
    for p in small_primes_up_to(u):
        out *= p
    return out


def _product_tree(values: Sequence[int]) -> list[list[int]]:
    """Levels of pairwise products; level 0 is the input, the last is [prod]."""
    tree = [list(values)]
    while len(tree[-1]) > 1:
        prev = tree[-1]
        tree.append(
            [
                prev[i] * prev[i + 1] if i + 1 < len(prev) else prev[i]
                for i in range(0, len(prev), 2)
            ]
        )
    return tree


def multi_mod(value: int, mods: Sequence[int]) -> list[int]:
    """value mod m for each m, via a remainder tree.

    Much faster than a loop of big-by-small divisions when value is huge
    and there are many moduli.
    """
    if not mods:
        return []
    tree = _product_tree(mods)
    rems = [value % tree[-1][0]]
    for level in reversed(tree[:-1]):
        rems = [rems[i // 2] % m for i, m in enumerate(level)]
    return rems


def _normalize_classes(classes: Iterable) -> list[tuple[int, int]]:
    pairs = []
    for cls in classes:
        if isinstance(cls, ResidueClass):
            pairs.append((cls.p, cls.a))
        else:
            p, a = cls
            pairs.append((int(p), int(a)))
    return pairs


def crt_combine(classes: Iterable) -> CrtWitness:
    """Combine residue classes into T with T == -a_p (mod p) for each (p, a_p).

    Accepts ResidueClass objects or bare (p, a) pairs; the moduli must be
    distinct primes.  Returns T in [0, P) with P the product of the moduli.

    Uses a product/remainder-tree CRT basis, so even tens of thousands of
    classes combine in well under a second without any big-integer inverses.
    """
    pairs = _normalize_classes(classes)
    if not pairs:
        raise ValueError("crt_combine needs at least one class")
    seen = set()
    for p, _ in pairs:
        if p in seen:
            raise DuplicateModulus(f"modulus {p} appears twice")
        seen.add(p)
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")

    primes = [p for p, _ in pairs]
    residues = [(-a) % p for p, a in pairs]
    if len(pairs) == 1:
        return CrtWitness(T=residues[0], P=primes[0])

    tree = _product_tree(primes)
    P = tree[-1][0]
    # (P/p) mod p, extracted from P mod p^2: P = K*p^2 + s with p | s.
    squares = [p * p for p in primes]
    s_vals = multi_mod(P, squares)
    coeffs = []
    for p, r, s in zip(primes, residues, s_vals):
        lam = pow(s // p, -1, p)  # inverse of (P/p) mod p
        coeffs.append(r * lam % p)
    # Combine sum(c_i * P/p_i) up the tree: each node tracks (value, product).
    level = [(c, p) for c, p in zip(coeffs, primes)]
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level), 2):
            if i + 1 < len(level):
                (v1, m1), (v2, m2) = level[i], level[i + 1]
                nxt.append((v1 * m2 + v2 * m1, m1 * m2))
            else:
                nxt.append(level[i])
        level = nxt
    T = level[0][0] % P
    return CrtWitness(T=T, P=P)
