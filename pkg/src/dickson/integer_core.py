"""Exact integer services: primality, CRT, sieving, totient, reduced residues.

Construction paths use Python ints throughout. The sieve and the prime
lookup table are numpy-backed; callers that vectorise counts must bound
their values first (see ``INT64_SAFE``) so nothing ever wraps.
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import FactorizationTooHard, NonCoprimeModuli, ValidationError

# Jaeschke / Sorenson-Webster: these twelve bases decide every n < 3.3e24.
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
DETERMINISTIC_LIMIT = 1 << 64
# 64 random rounds: error < 4**-64 = 2**-128.
PROBABLE_ROUNDS = 64
DEFAULT_SEED = 20_090_621

SEGMENT_THRESHOLD = 10**7
SEGMENT_SIZE = 1 << 21
INT64_SAFE = (1 << 62)

FACTOR_BOUND = 10**40
_TRIAL_LIMIT = 10_000

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                 59, 61, 67, 71, 73, 79, 83, 89, 97)


@dataclass(frozen=True)
class NaturalRange:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 1 or self.hi < self.lo:
            raise ValidationError(f"invalid range [{self.lo}, {self.hi}]: need 1 <= lo <= hi")

    def __iter__(self):
        return iter(range(self.lo, self.hi + 1))

    def __len__(self):
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class ResidueConstraint:
    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValidationError(f"modulus must be >= 1, got {self.modulus}")
        if not 0 <= self.residue < self.modulus:
            raise ValidationError(
                f"residue {self.residue} outside [0, {self.modulus})")

    @classmethod
    def of(cls, residue: int, modulus: int) -> ResidueConstraint:
        """Build a constraint, reducing the residue first."""
        return cls(residue % modulus, modulus)

    def admits(self, x: int) -> bool:
        return x % self.modulus == self.residue

    def __str__(self):
        return f"{self.residue} mod {self.modulus}"


def _strong_probable_prime(n: int, d: int, r: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


_seed = DEFAULT_SEED


def set_primality_seed(seed: int) -> None:
    """Seed used by :func:`is_prime` above 2**64 when no explicit seed is given."""
    global _seed
    _seed = int(seed)


def is_prime(n: int, *, seed: int | None = None) -> bool:
    """Primality test, exact below 2**64.

    Above 2**64 this runs PROBABLE_ROUNDS Miller-Rabin rounds with bases drawn
    from a generator seeded by ``(seed, n)``, so repeated runs agree. Use
    :func:`is_certified_prime_range` to tell the two regimes apart.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < 97 * 97:
        return True
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    if n < DETERMINISTIC_LIMIT:
        return all(_strong_probable_prime(n, d, r, a) for a in MR_BASES)
    if not all(_strong_probable_prime(n, d, r, a) for a in MR_BASES):
        return False
    rng = random.Random(f"{_seed if seed is None else seed}:{n}")
    return all(_strong_probable_prime(n, d, r, rng.randrange(2, n - 1))
               for _ in range(PROBABLE_ROUNDS))


def is_certified_prime_range(n: int) -> bool:
    """True when :func:`is_prime` is deterministic for ``n``."""
    return abs(n) < DETERMINISTIC_LIMIT


def crt_combine(constraints: Sequence[ResidueConstraint]) -> ResidueConstraint:
    """Solve a system of congruences with pairwise coprime moduli."""
    moduli = [c.modulus for c in constraints]
    for i in range(len(moduli)):
        for j in range(i + 1, len(moduli)):
            if math.gcd(moduli[i], moduli[j]) != 1:
                raise NonCoprimeModuli(moduli[i], moduli[j])
    x, m = 0, 1
    for c in constraints:
        # x + m*t == c.residue (mod c.modulus)
        t = (c.residue - x) * pow(m, -1, c.modulus) % c.modulus
        x += m * t
        m *= c.modulus
    return ResidueConstraint(x % m, m)


def _simple_sieve(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return flags


def prime_segments(lo: int, hi: int, segment: int = SEGMENT_SIZE) -> Iterator[np.ndarray]:
    """Yield ascending int64 arrays of the primes in [lo, hi], one per segment.

    Memory stays O(sqrt(hi) + segment).
    """
    lo = max(lo, 2)
    if hi < lo:
        return
    root = math.isqrt(hi)
    base = np.flatnonzero(_simple_sieve(root)).astype(np.int64)
    for start in range(lo, hi + 1, segment):
        stop = min(start + segment, hi + 1)
        flags = np.ones(stop - start, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= stop:
                break
            first = max(p * p, -(-start // p) * p)
            flags[first - start::p] = False
        yield np.flatnonzero(flags).astype(np.int64) + start


def primes_up_to(n: int) -> list[int]:
    """Primes <= n in ascending order; segmented above SEGMENT_THRESHOLD."""
    if n < 2:
        return []
    if n <= SEGMENT_THRESHOLD:
        return np.flatnonzero(_simple_sieve(n)).tolist()
    out: list[int] = []
    for seg in prime_segments(2, n):
        out.extend(seg.tolist())
    return out


def prime_count(n: int) -> int:
    if n < 2:
        return 0
    return sum(int(seg.size) for seg in prime_segments(2, n))


@functools.lru_cache(maxsize=4)
def _cached_table(limit: int) -> np.ndarray:
    table = _simple_sieve(limit)
    table.setflags(write=False)
    return table


def prime_table(limit: int) -> np.ndarray:
    """Read-only boolean primality lookup for 0..limit (cached per process).

    Limits are rounded up to a power of two so nearby requests share a table.
    """
    size = 1 << max(10, int(limit).bit_length())
    return _cached_table(size)


def in_Zm_star(x: int, m: int) -> bool:
    """Membership in the reduced residues {x : 1 <= x < m, gcd(x, m) = 1}.

    Note Z_1^* is empty under this definition even though euler_phi(1) == 1.
    """
    return 1 <= x < m and math.gcd(x, m) == 1


def _pollard_brent(n: int, seed: int) -> int | None:
    rng = random.Random(seed)
    for _ in range(32):
        y, c, block = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(block, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += block
            r *= 2
            if r > 1 << 22:
                break
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def factorize(n: int, *, bound: int = FACTOR_BOUND) -> dict[int, int]:
    """Prime factorisation by trial division plus a Pollard-Brent fallback."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    if n > bound:
        raise FactorizationTooHard(f"{n} exceeds the factoring bound {bound}")
    factors: dict[int, int] = {}
    for p in primes_up_to(_TRIAL_LIMIT):
        if p * p > n:
            break
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _pollard_brent(m, seed=m)
        if d is None:
            raise FactorizationTooHard(f"Pollard-Brent failed on cofactor {m}")
        stack += [d, m // d]
    return dict(sorted(factors.items()))


def prime_factors(n: int, *, bound: int = FACTOR_BOUND) -> list[int]:
    return list(factorize(n, bound=bound))


def euler_phi(n: int, *, bound: int = FACTOR_BOUND) -> int:
    """|Z_n^*| computed from the factorisation; euler_phi(1) == 1."""
    result = n
    for p in factorize(n, bound=bound):
        result -= result // p
    return result
