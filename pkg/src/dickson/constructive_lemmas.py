"""CRT constructions for single-variable systems a_i + b_i x, plus the
coprime-column pigeonhole step and the product-of-unit-groups isomorphism.

The astronomically large exponents of the iterated-power construction are
not built; bounded witness searches stand in for them (see
``residue_witness``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import NonCoprime, NotAdmissible, PreconditionViolated, ResidueSearchFailed, ValidationError
from .integer_core import (FACTOR_BOUND, ResidueConstraint, crt_combine, euler_phi, factorize,
                           in_Zm_star, primes_up_to)
from .linear_forms import LinearSystem, is_admissible

LEMMA1_PRIME_BUDGET = 200
SCOPE_NOTE = ("iterated-power constants are not constructed literally; their "
              "conclusions are covered by bounded witness certificates")


@dataclass(frozen=True)
class CoprimalityWitness:
    x: int
    shielded_primes: tuple[int, ...]
    product_value: int
    modulus: int
    residues: tuple[ResidueConstraint, ...] = field(repr=False, default=())


def _pairs(system: LinearSystem) -> list[tuple[int, int]]:
    """(constant, coefficient) for each form, validating the lemma hypotheses."""
    if system.arity != 1:
        raise ValidationError("lemma constructions need a single-variable system")
    out = []
    for f in system.forms:
        a, b = f.constant, f.coefficients[0]
        if a == 0:
            raise ValidationError(f"form {f} has zero constant term")
        if b < 1:
            raise ValidationError(f"form {f} needs a positive coefficient")
        if math.gcd(a, b) != 1:
            raise ValidationError(f"form {f} has gcd(constant, coefficient) > 1")
        out.append((a, b))
    return out


def _product(pairs, x: int, r: int = 1) -> int:
    return math.prod(a + r * b * x for a, b in pairs)


def lemma1_construct(system: LinearSystem, C: int, *,
                     prime_budget: int = LEMMA1_PRIME_BUDGET) -> CoprimalityWitness:
    """Find x whose form product has no prime factor <= C.

    For each prime p <= C pick the least residue in 1..p keeping p off the
    product, then glue the residues with CRT modulo the primorial of C (the
    radical of C!, which has the same prime set).
    """
    pairs = _pairs(system)
    if C > prime_budget:
        raise ValidationError(f"C = {C} exceeds the prime-set budget {prime_budget}")
    report = is_admissible(system)
    if not report.admissible:
        raise NotAdmissible(report)
    primes = primes_up_to(C)
    constraints = []
    for p in primes:
        good = next((r for r in range(1, p + 1) if _product(pairs, r) % p), None)
        if good is None:
            raise ResidueSearchFailed(p)
        constraints.append(ResidueConstraint.of(good, p))
    combined = crt_combine(constraints)
    x = combined.residue or combined.modulus
    return CoprimalityWitness(x, tuple(primes), _product(pairs, x), combined.modulus,
                              tuple(constraints))


@dataclass(frozen=True)
class Lemma2Result:
    x: int
    crt_x: int
    good_residues: dict[int, tuple[int, ...]]


def lemma2_residues(system: LinearSystem, r: int, m: int, *,
                    bound: int = FACTOR_BOUND) -> Lemma2Result:
    """Least x with gcd(prod(a_i + r*b_i*x), m) = 1, with the per-prime detail.

    The good residues are found one prime factor of m at a time; ``crt_x``
    glues the least good residue of each prime, ``x`` is the overall least
    positive solution.
    """
    pairs = _pairs(system)
    if r < 1 or math.gcd(r, math.prod(a for a, _ in pairs)) != 1:
        raise ValidationError("r must be positive and coprime to every constant term")
    report = is_admissible(system)
    if not report.admissible:
        raise NotAdmissible(report)
    if m == 1:
        return Lemma2Result(1, 1, {})
    primes = list(factorize(m, bound=bound))
    good: dict[int, tuple[int, ...]] = {}
    for p in primes:
        residues = tuple(t for t in range(p) if _product(pairs, t, r) % p)
        if not residues:
            raise ResidueSearchFailed(p)
        good[p] = residues
    combined = crt_combine([ResidueConstraint(g[0], p) for p, g in good.items()])
    crt_x = combined.residue or combined.modulus
    sets = {p: set(g) for p, g in good.items()}
    x = 1
    while not all(x % p in s for p, s in sets.items()):
        x += 1
    return Lemma2Result(x, crt_x, good)


def lemma2_construct(system: LinearSystem, r: int, m: int) -> int:
    return lemma2_residues(system, r, m).x


def select_coprime_column(values: Sequence[Sequence[int]], q: int) -> int:
    """Least column with no entry divisible by q.

    With s rows, s+1 columns and at most one multiple of q per row, at least
    one column is clean.
    """
    for i, row in enumerate(values):
        hits = sum(1 for v in row if v % q == 0)
        if hits >= 2:
            raise PreconditionViolated(f"row {i} has {hits} entries divisible by {q}", row=i)
    n_cols = len(values[0])
    for j in range(n_cols):
        if all(row[j] % q for row in values):
            return j
    raise PreconditionViolated(f"every column has a multiple of {q}; need more columns than rows")


@dataclass
class IsomorphismReport:
    a: int
    b: int
    size_a: int
    size_b: int
    size_ab: int
    bijective: bool
    multiplicative: bool
    degenerate: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.bijective and self.multiplicative and (
            self.degenerate or self.size_a * self.size_b == self.size_ab)


def _units(n: int) -> list[int]:
    return [x for x in range(1, n) if in_Zm_star(x, n)]


def _generators(n: int, units: list[int]) -> list[int]:
    """Greedy generating set of the unit group mod n."""
    gens: list[int] = []
    subgroup = {1 % n}
    for u in units:
        if u in subgroup:
            continue
        gens.append(u)
        frontier = list(subgroup)
        while frontier:
            nxt = []
            for h in frontier:
                for g in gens:
                    w = h * g % n
                    if w not in subgroup:
                        subgroup.add(w)
                        nxt.append(w)
            frontier = nxt
    return gens


def crt_isomorphism_check(a: int, b: int) -> IsomorphismReport:
    """Check that (u, v) -> CRT(u mod a, v mod b) maps Z_a^* x Z_b^* onto Z_ab^*.

    Multiplicativity is verified as phi(1) = 1 and phi(x*g) = phi(x)*phi(g)
    for every x and every g in a generating set; by induction on word length
    that forces phi(x*y) = phi(x)*phi(y) everywhere.
    """
    if a < 1 or b < 1:
        raise ValidationError("a and b must be positive")
    if math.gcd(a, b) != 1:
        raise NonCoprime(f"gcd({a}, {b}) = {math.gcd(a, b)}")
    if a == 1 or b == 1:
        n = b if a == 1 else a
        units = _units(n)
        note = ("Z_1^* is empty under the 1 <= x < m convention; checked the "
                f"identity map on Z_{n}^* alone")
        consistent = n == 1 or len(units) == euler_phi(n)
        return IsomorphismReport(a, b, len(_units(a)), len(_units(b)), len(units),
                                 bijective=consistent, multiplicative=True,
                                 degenerate=True, notes=[note])
    n = a * b
    ua, ub = _units(a), _units(b)
    # w = u + a * ((v - u) * a^{-1} mod b)
    inv = pow(a, -1, b)

    def phi(u: int, v: int) -> int:
        return u + a * ((v - u) * inv % b)

    table = {(u, v): phi(u, v) for u in ua for v in ub}
    image = set(table.values())
    target = set(_units(n))
    bijective = len(image) == len(table) and image == target
    mult = phi(1, 1) == 1
    gens = [(g, 1) for g in _generators(a, ua)] + [(1, h) for h in _generators(b, ub)]
    if mult:
        for (u, v), w in table.items():
            for gu, gv in gens:
                if table[(u * gu % a, v * gv % b)] != w * table[(gu, gv)] % n:
                    mult = False
                    break
            if not mult:
                break
    return IsomorphismReport(a, b, len(ua), len(ub), len(target), bijective, mult)
