"""Affine-linear systems, single-variable polynomial systems, admissibility.

A system is admissible when no prime divides the product of its forms at
every point. For s affine-linear forms only primes p <= s (plus primes that
divide the full content of a single form) can be fixed divisors: a form that
is non-constant mod p vanishes on p**(k-1) residue points, so s of them
cover at most s*p**(k-1) < p**k points once p > s.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ArityMismatch, DomainViolation, ParseError, ValidationError
from .integer_core import is_prime, prime_factors, primes_up_to

ENUMERATION_BUDGET = 10**6


class Domain(enum.Enum):
    POSITIVE = "N"   # points with every coordinate >= 1
    INTEGER = "Z"    # all integer points

    @classmethod
    def parse(cls, token: str) -> Domain:
        aliases = {"n": cls.POSITIVE, "positive": cls.POSITIVE, "1": cls.POSITIVE,
                   "z": cls.INTEGER, "all": cls.INTEGER, "integer": cls.INTEGER, "0": cls.INTEGER}
        try:
            return aliases[token.lower()]
        except KeyError:
            raise ValidationError(f"unknown domain flag {token!r} (use N or Z)") from None


@dataclass(frozen=True)
class AffineForm:
    coefficients: tuple[int, ...]
    constant: int

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(int(a) for a in self.coefficients))
        object.__setattr__(self, "constant", int(self.constant))
        if not self.coefficients:
            raise ValidationError("a form needs at least one variable")
        if not any(self.coefficients):
            raise ValidationError(f"constant form {self.constant} is not allowed")

    @property
    def arity(self) -> int:
        return len(self.coefficients)

    @property
    def content(self) -> int:
        return math.gcd(*self.coefficients, self.constant)

    def __call__(self, point: Sequence[int]) -> int:
        return sum(a * x for a, x in zip(self.coefficients, point)) + self.constant

    def __str__(self):
        names = ["x"] if self.arity == 1 else [f"x{j + 1}" for j in range(self.arity)]
        terms = []
        for a, name in zip(self.coefficients, names):
            if a == 0:
                continue
            mag = "" if abs(a) == 1 else str(abs(a))
            terms.append(("-" if a < 0 else "+", mag + name))
        if self.constant:
            terms.append(("-" if self.constant < 0 else "+", str(abs(self.constant))))
        sign, body = terms[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


@dataclass(frozen=True)
class LinearSystem:
    forms: tuple[AffineForm, ...]
    domain: Domain = Domain.POSITIVE
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "forms", tuple(self.forms))
        if not self.forms:
            raise ValidationError("a system needs at least one form")
        arities = {f.arity for f in self.forms}
        if len(arities) != 1:
            raise ValidationError(f"forms disagree on arity: {sorted(arities)}")
        if len(set(self.forms)) != len(self.forms):
            raise ValidationError("duplicate forms in system")
        if not self.warnings:
            object.__setattr__(self, "warnings", tuple(_proportional_warnings(self.forms)))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], domain: Domain = Domain.POSITIVE) -> LinearSystem:
        """Rows are ``coefficients..., constant``."""
        return cls(tuple(AffineForm(tuple(r[:-1]), r[-1]) for r in rows), domain)

    @classmethod
    def univariate(cls, pairs: Sequence[tuple[int, int]], domain: Domain = Domain.POSITIVE) -> LinearSystem:
        """Build from ``(coefficient, constant)`` pairs, i.e. forms b*x + a."""
        return cls(tuple(AffineForm((b,), a) for b, a in pairs), domain)

    @property
    def arity(self) -> int:
        return self.forms[0].arity

    @property
    def size(self) -> int:
        return len(self.forms)

    @property
    def matrix(self) -> list[list[int]]:
        return [list(f.coefficients) for f in self.forms]

    def nonnegative(self) -> bool:
        return all(a >= 0 for f in self.forms for a in f.coefficients)

    def evaluate(self, point: Sequence[int]) -> tuple[int, ...]:
        return evaluate(self, point)

    def __str__(self):
        return "{" + ", ".join(str(f) for f in self.forms) + "}"


@dataclass(frozen=True)
class UniPolySystem:
    """Single-variable polynomials, coefficients stored highest degree first."""

    polys: tuple[tuple[int, ...], ...]
    irreducibility_assumed: bool = True

    def __post_init__(self):
        cleaned = []
        for coeffs in self.polys:
            coeffs = tuple(int(c) for c in coeffs)
            while coeffs and coeffs[0] == 0:
                coeffs = coeffs[1:]
            if len(coeffs) < 2:
                raise ValidationError(f"polynomial {coeffs or (0,)} is constant")
            if coeffs[0] <= 0:
                raise ValidationError(f"leading coefficient must be positive, got {coeffs[0]}")
            cleaned.append(coeffs)
        if not cleaned:
            raise ValidationError("a system needs at least one polynomial")
        if len(set(cleaned)) != len(cleaned):
            raise ValidationError("duplicate polynomials in system")
        object.__setattr__(self, "polys", tuple(cleaned))

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(c) - 1 for c in self.polys)

    @property
    def size(self) -> int:
        return len(self.polys)

    @property
    def arity(self) -> int:
        return 1

    domain = Domain.POSITIVE

    def evaluate(self, point: Sequence[int]) -> tuple[int, ...]:
        return evaluate(self, point)

    def __str__(self):
        return "{" + ", ".join(_poly_str(c) for c in self.polys) + "}"


def _poly_str(coeffs: Sequence[int]) -> str:
    deg = len(coeffs) - 1
    parts = []
    for i, c in enumerate(coeffs):
        e = deg - i
        if c == 0:
            continue
        mono = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
        mag = str(abs(c)) if (abs(c) != 1 or e == 0) else ""
        parts.append(("-" if c < 0 else "+", mag + mono))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return text + "".join(f" {s} {b}" for s, b in parts[1:])


def _horner(coeffs: Sequence[int], x: int) -> int:
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _proportional_warnings(forms: Sequence[AffineForm]) -> list[str]:
    out = []
    for (i, f), (j, g) in itertools.combinations(enumerate(forms), 2):
        u = f.coefficients + (f.constant,)
        v = g.coefficients + (g.constant,)
        pivot = next(t for t, a in enumerate(u) if a)
        if v[pivot] == 0:
            continue
        ratio = Fraction(v[pivot], u[pivot])
        if all(Fraction(b) == ratio * a for a, b in zip(u, v)):
            out.append(f"forms {i + 1} and {j + 1} are rational multiples of each other")
    return out


System = LinearSystem | UniPolySystem


def evaluate(system: System, point: Sequence[int]) -> tuple[int, ...]:
    point = tuple(int(x) for x in point)
    if len(point) != system.arity:
        raise ArityMismatch(f"point has {len(point)} coordinates, system arity is {system.arity}")
    if system.domain is Domain.POSITIVE and any(x < 1 for x in point):
        raise DomainViolation(f"point {point} leaves the positive orthant")
    if isinstance(system, UniPolySystem):
        return tuple(_horner(c, point[0]) for c in system.polys)
    return tuple(f(point) for f in system.forms)


# -- local counts ------------------------------------------------------------

def _enumerate_count(system: LinearSystem, p: int) -> int:
    k = system.arity
    grids = np.meshgrid(*([np.arange(p, dtype=np.int64)] * k), indexing="ij")
    product = np.ones(grids[0].shape, dtype=np.int64)
    for f in system.forms:
        val = np.full(grids[0].shape, f.constant % p, dtype=np.int64)
        for a, g in zip(f.coefficients, grids):
            val = (val + (a % p) * g) % p
        product = product * val % p
    return int(np.count_nonzero(product == 0))


def _affine_solution_count(rows: list[list[int]], p: int, k: int) -> int:
    """Number of solutions in F_p^k of rows [a_1..a_k | -b] (all mod p)."""
    mat = [r[:] for r in rows]
    rank, col = 0, 0
    n_rows = len(mat)
    while rank < n_rows and col < k:
        pivot = next((r for r in range(rank, n_rows) if mat[r][col] % p), None)
        if pivot is None:
            col += 1
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        inv = pow(mat[rank][col], -1, p)
        mat[rank] = [v * inv % p for v in mat[rank]]
        for r in range(n_rows):
            if r != rank and mat[r][col] % p:
                factor = mat[r][col]
                mat[r] = [(v - factor * w) % p for v, w in zip(mat[r], mat[rank])]
        rank += 1
        col += 1
    for r in range(rank, n_rows):
        if mat[r][k] % p:
            return 0
    return p ** (k - rank)


def _inclusion_exclusion_count(system: LinearSystem, p: int) -> int:
    k = system.arity
    rows = [[a % p for a in f.coefficients] + [(-f.constant) % p] for f in system.forms]
    total = 0
    for size in range(1, len(rows) + 1):
        sign = 1 if size % 2 else -1
        for subset in itertools.combinations(rows, size):
            total += sign * _affine_solution_count(list(subset), p, k)
    return total


def _univariate_count(system: LinearSystem, p: int) -> int:
    roots: set[int] = set()
    for f in system.forms:
        a, b = f.coefficients[0] % p, f.constant % p
        if a == 0:
            if b == 0:
                return p
            continue
        roots.add(-b * pow(a, -1, p) % p)
    return len(roots)


def local_count(system: LinearSystem, p: int, *, strategy: str = "auto",
                budget: int = ENUMERATION_BUDGET) -> int:
    """v(p): residue points mod p where the product of all forms vanishes.

    ``strategy`` is ``"auto"``, ``"enumerate"`` or ``"algebraic"``; the
    algebraic route is exact inclusion-exclusion over intersections of the
    zero hyperplanes.
    """
    if strategy == "enumerate" or (strategy == "auto" and p ** system.arity <= budget):
        return _enumerate_count(system, p)
    if system.arity == 1:
        return _univariate_count(system, p)
    return _inclusion_exclusion_count(system, p)


def poly_local_count(system: UniPolySystem, p: int) -> int:
    """Residues r mod p with p dividing the product of all polynomials at r."""
    r = np.arange(p, dtype=np.int64)
    product = np.ones(p, dtype=np.int64)
    for coeffs in system.polys:
        acc = np.zeros(p, dtype=np.int64)
        for c in coeffs:
            acc = (acc * r + c % p) % p
        product = product * acc % p
    return int(np.count_nonzero(product == 0))


# -- admissibility -----------------------------------------------------------

class Verdict(enum.Enum):
    ADMISSIBLE = "Admissible"
    FIXED_DIVISOR = "FixedDivisor"


@dataclass
class AdmissibilityReport:
    verdict: Verdict
    obstruction_prime: int | None
    local_counts: dict[int, int]
    checked_primes: list[int]
    arity: int = 1
    justification: str = ""
    # Stricter notion that also demands every value > 1 at the witness point.
    positive_values_admissible: bool | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        return self.verdict is Verdict.ADMISSIBLE

    def summary_lines(self) -> list[str]:
        lines = [f"verdict: {self.verdict.value}"]
        if self.obstruction_prime is not None:
            lines.append(f"obstruction_prime: {self.obstruction_prime}")
        lines.append("checked_primes: " + " ".join(map(str, self.checked_primes)))
        lines.append("local_counts: " + " ".join(
            f"v({p})={v}/{p ** self.arity}" for p, v in sorted(self.local_counts.items())))
        lines.append(f"definition: no prime divides the product at every point")
        if self.positive_values_admissible is not None:
            lines.append("strict (all values > 1) admissible: "
                         + ("yes" if self.positive_values_admissible else "no"))
        lines.append(f"justification: {self.justification}")
        lines.extend(f"note: {n}" for n in self.notes)
        return lines


def _positive_cone_open(system: LinearSystem) -> bool:
    """Whether the region where every form exceeds 1 contains arbitrarily large boxes.

    True iff some direction d (d > 0 componentwise on the positive domain)
    makes every form strictly increasing. Decided as a small LP.
    """
    from scipy.optimize import linprog

    A = np.array(system.matrix, dtype=float)
    s, k = A.shape
    # variables (d_1..d_k, t); maximise t
    rows = [np.append(-A[i], 1.0) for i in range(s)]
    if system.domain is Domain.POSITIVE:
        rows += [np.append(-np.eye(k)[j], 1.0) for j in range(k)]
        bounds = [(0, 1)] * k + [(None, 1)]
    else:
        bounds = [(-1, 1)] * k + [(None, 1)]
    c = np.zeros(k + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.array(rows), b_ub=np.zeros(len(rows)), bounds=bounds, method="highs")
    return bool(res.status == 0 and -res.fun > 1e-9)


def is_admissible(system: LinearSystem) -> AdmissibilityReport:
    s, k = system.size, system.arity
    candidates = set(primes_up_to(s))
    content_primes: set[int] = set()
    for f in system.forms:
        if f.content > 1:
            content_primes.update(prime_factors(f.content))
    candidates |= content_primes
    checked = sorted(candidates)
    counts = {p: local_count(system, p) for p in checked}
    bad = [p for p in checked if counts[p] == p ** k]
    justification = (
        f"only primes p <= s = {s} can be fixed divisors (s non-constant forms "
        "vanish on at most s*p^(k-1) < p^k residue points when p > s); primes "
        "dividing a whole form's content were added")
    notes = [f"form content > 1 forces fixed divisors {sorted(content_primes)}"] if content_primes else []
    notes.extend(system.warnings)
    report = AdmissibilityReport(
        verdict=Verdict.FIXED_DIVISOR if bad else Verdict.ADMISSIBLE,
        obstruction_prime=bad[0] if bad else None,
        local_counts=counts, checked_primes=checked, arity=k,
        justification=justification, notes=notes)
    report.positive_values_admissible = report.admissible and _positive_cone_open(system)
    return report


def poly_is_admissible(system: UniPolySystem, prime_bound: int = 2) -> AdmissibilityReport:
    if prime_bound < 2:
        raise ValidationError("prime_bound must be >= 2")
    degree_sum = sum(system.degrees)
    bound = max(degree_sum, prime_bound)
    candidates = set(primes_up_to(bound))
    for coeffs in system.polys:
        g = math.gcd(*coeffs)
        if g > 1:
            candidates.update(prime_factors(g))
    checked = sorted(candidates)
    counts = {p: poly_local_count(system, p) for p in checked}
    bad = [p for p in checked if counts[p] == p]
    notes = []
    if system.irreducibility_assumed:
        notes.append("irreducibility of each polynomial is assumed, not checked")
    return AdmissibilityReport(
        verdict=Verdict.FIXED_DIVISOR if bad else Verdict.ADMISSIBLE,
        obstruction_prime=bad[0] if bad else None,
        local_counts=counts, checked_primes=checked, arity=1,
        justification=(f"checked all primes <= max(sum of degrees = {degree_sum}, "
                       f"prime_bound = {prime_bound}) plus content primes; a product "
                       "of degree D has at most D roots mod p unless p divides a "
                       "polynomial's content"),
        positive_values_admissible=None if bad else True,
        notes=notes)


def check(system: System, prime_bound: int = 2) -> AdmissibilityReport:
    if isinstance(system, UniPolySystem):
        return poly_is_admissible(system, prime_bound)
    return is_admissible(system)


# -- text format ---------------------------------------------------------------

def _logical_lines(text: str):
    lineno = 0
    for physical in text.splitlines():
        lineno += 1
        for piece in physical.split(";"):
            body = piece.split("#", 1)[0].strip()
            if body:
                yield lineno, body


def parse_system(text: str) -> System:
    """Parse the line-oriented system description.

    First logical line is ``linear [N|Z]`` or ``poly``. Linear rows are the k
    coefficients followed by the constant; poly rows list coefficients from
    the highest degree down. ``#`` starts a comment and ``;`` may separate
    rows on one physical line.
    """
    lines = list(_logical_lines(text))
    if not lines:
        raise ParseError("empty system description", 1)
    head_no, head = lines[0]
    tokens = head.split()
    kind = tokens[0].lower()
    rows = []
    for lineno, body in lines[1:]:
        try:
            rows.append((lineno, [int(t) for t in body.split()]))
        except ValueError:
            raise ParseError(f"non-integer token in {body!r}", lineno) from None
    if not rows:
        raise ParseError("system has no rows", head_no)
    if kind == "linear":
        if len(tokens) > 2:
            raise ParseError(f"unexpected header {head!r}", head_no)
        domain = Domain.parse(tokens[1]) if len(tokens) == 2 else Domain.POSITIVE
        width = len(rows[0][1])
        for lineno, row in rows:
            if len(row) != width:
                raise ParseError(f"row has {len(row)} entries, expected {width}", lineno)
            if width < 2:
                raise ParseError("a linear row needs at least one coefficient and a constant", lineno)
        return LinearSystem.from_rows([r for _, r in rows], domain)
    if kind == "poly":
        if len(tokens) != 1:
            raise ParseError(f"unexpected header {head!r}", head_no)
        return UniPolySystem(tuple(tuple(r) for _, r in rows))
    raise ParseError(f"unknown system kind {tokens[0]!r} (expected linear or poly)", head_no)


def serialize_system(system: System) -> str:
    if isinstance(system, UniPolySystem):
        body = "\n".join(" ".join(map(str, c)) for c in system.polys)
        return f"poly\n{body}\n"
    body = "\n".join(" ".join(map(str, f.coefficients + (f.constant,))) for f in system.forms)
    return f"linear {system.domain.value}\n{body}\n"


def system_hash(system: System) -> str:
    return hashlib.sha256(serialize_system(system).encode()).hexdigest()[:16]


def all_values_prime(values: Sequence[int]) -> bool:
    return all(is_prime(v) for v in values)
