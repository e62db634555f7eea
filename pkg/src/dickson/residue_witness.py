"""Witnesses in Z_m^*, strong-admissibility certificates and the constant L.

A witness for modulus m is a point y whose form values all satisfy
1 < f_i(y) < m and gcd(f_i(y), m) = 1. A system is strongly admissible when
every m >= L has a witness; the least such L is what the certificates
estimate, over a finite horizon only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, CounterexampleFound, Inconclusive, NotAdmissible, ValidationError
from .integer_core import NaturalRange, ResidueConstraint, in_Zm_star, is_prime
from .linear_forms import AffineForm, Domain, LinearSystem, is_admissible, system_hash
from .parallel import chunk_ranges, ordered_map

CAP_FACTOR = 10
FACTORIAL_BUDGET = 12


@dataclass(frozen=True)
class WitnessCertificate:
    modulus: int
    point: tuple[int, ...]
    values: tuple[int, ...]
    congruence: ResidueConstraint | None = None


def _lex_positive_nonneg(system: LinearSystem, m: int, congruence) -> tuple[int, ...] | None:
    """Pruned lexicographic scan; complete because values only grow with x."""
    A = system.matrix
    b = [f.constant for f in system.forms]
    s, k = system.size, system.arity
    # rest[j][i]: smallest contribution of coordinates j.. to form i
    rest = [[sum(A[i][l] for l in range(j, k)) for i in range(s)] for j in range(k + 1)]
    # forms whose value is fixed once coordinate j is chosen
    last_nonzero = [max(l for l in range(k) if A[i][l]) for i in range(s)]
    settled = [[i for i in range(s) if last_nonzero[i] == j] for j in range(k)]
    point = [0] * k

    def first_value(j: int) -> int:
        if j == 0 and congruence is not None:
            return congruence.residue or congruence.modulus
        return 1

    step0 = congruence.modulus if congruence is not None else 1

    def search(j: int, partial: list[int]) -> bool:
        step = step0 if j == 0 else 1
        column = [A[i][j] for i in range(s)]
        x = first_value(j)
        while True:
            if any(partial[i] + column[i] * x + rest[j + 1][i] >= m for i in range(s)):
                return False
            point[j] = x
            nxt = [partial[i] + column[i] * x for i in range(s)]
            if all(nxt[i] > 1 and math.gcd(nxt[i], m) == 1 for i in settled[j]):
                if j + 1 == k or search(j + 1, nxt):
                    return True
            if not any(column):
                return False
            x += step

    if search(0, b):
        return tuple(point)
    return None


def _scan_univariate(system: LinearSystem, m: int, congruence) -> tuple[int, ...] | None:
    pairs = [(f.coefficients[0], f.constant) for f in system.forms]
    step = 1
    y = 1
    if congruence is not None:
        step = congruence.modulus
        y = congruence.residue or congruence.modulus
    gcd = math.gcd
    while True:
        ok = True
        for a, c in pairs:
            v = a * y + c
            if v >= m:
                return None
            if v <= 1 or gcd(v, m) != 1:
                ok = False
        if ok:
            return (y,)
        y += step


def _region_upper_bounds(system: LinearSystem, m: int) -> list[int] | None:
    """Per-coordinate bounds of {x >= 1, 2 <= f_i(x) <= m-1}, or None if unbounded."""
    from scipy.optimize import linprog

    A = np.array(system.matrix, dtype=float)
    b = np.array([f.constant for f in system.forms], dtype=float)
    k = system.arity
    A_ub = np.vstack([-A, A])
    b_ub = np.concatenate([b - 2, (m - 1) - b])
    bounds = []
    for j in range(k):
        c = np.zeros(k)
        c[j] = -1.0
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(1, None)] * k, method="highs")
        if res.status == 2:      # infeasible: region empty
            return [0] * k
        if res.status != 0:
            return None
        bounds.append(int(math.floor(-res.fun + 1e-6)))
    return bounds


def _check_point(system: LinearSystem, point, m: int) -> bool:
    for f in system.forms:
        v = f(point)
        if not (1 < v < m) or math.gcd(v, m) != 1:
            return False
    return True


def _shell(r: int, k: int) -> Iterator[tuple[int, ...]]:
    """Integer points with max-norm exactly r, in lexicographic order."""
    if r == 0:
        yield (0,) * k
        return

    def rec(j: int, prefix: tuple[int, ...], hit: bool):
        if j == k - 1:
            for x in range(-r, r + 1):
                if hit or abs(x) == r:
                    yield prefix + (x,)
            return
        for x in range(-r, r + 1):
            yield from rec(j + 1, prefix + (x,), hit or abs(x) == r)

    yield from rec(0, (), False)


def find_witness(system: LinearSystem, m: int, congruence: ResidueConstraint | None = None,
                 *, cap: int | None = None) -> WitnessCertificate | None:
    """Lexicographically least witness for modulus m, or None when none exists.

    Positive-domain systems with nonnegative coefficients are searched
    exhaustively over the finite region where every value stays below m.
    Other positive-domain systems use an LP bound on that region when it is
    bounded, else the cube {1..cap}^k. Integer-domain systems scan max-norm
    shells up to cap. Running out of cap raises Inconclusive.
    """
    if m < 2:
        raise ValidationError("witness search needs m >= 2")
    cap = CAP_FACTOR * m if cap is None else cap
    point = None
    if system.domain is Domain.POSITIVE and system.nonnegative():
        if system.arity == 1:
            point = _scan_univariate(system, m, congruence)
        else:
            point = _lex_positive_nonneg(system, m, congruence)
    elif system.domain is Domain.POSITIVE:
        bounds = _region_upper_bounds(system, m)
        exhaustive = bounds is not None and all(u <= cap for u in bounds)
        box = bounds if exhaustive else [cap] * system.arity
        ranges = [range(1, u + 1) for u in box]
        for cand in itertools.product(*ranges):
            if congruence is not None and not congruence.admits(cand[0]):
                continue
            if _check_point(system, cand, m):
                point = cand
                break
        if point is None and not exhaustive:
            raise Inconclusive(m, cap)
    else:
        for r in range(cap + 1):
            for cand in _shell(r, system.arity):
                if congruence is not None and not congruence.admits(cand[0]):
                    continue
                if _check_point(system, cand, m):
                    point = cand
                    break
            if point is not None:
                break
        if point is None:
            raise Inconclusive(m, cap)
    if point is None:
        return None
    return WitnessCertificate(m, tuple(point), system.evaluate(point), congruence)


@dataclass
class StrongAdmissibilityCertificate:
    system: LinearSystem
    horizon: int
    witnesses: dict[int, WitnessCertificate]
    failing: list[int]
    candidate_L: int
    scope: str = ""

    def __post_init__(self):
        if not self.scope:
            self.scope = (f"verified for 2 <= m <= {self.horizon} only; "
                          "not a proof for larger moduli")

    def to_text(self) -> str:
        lines = [
            "# strong-admissibility certificate",
            f"system_hash {system_hash(self.system)}",
            f"horizon {self.horizon}",
            f"candidate_L {self.candidate_L}",
            f"# {self.scope}",
        ]
        for m in range(2, self.horizon + 1):
            w = self.witnesses.get(m)
            lines.append(f"{m} FAIL" if w is None else f"{m} " + " ".join(map(str, w.point)))
        return "\n".join(lines) + "\n"


def parse_certificate_lines(text: str) -> tuple[dict[str, str], dict[int, tuple[int, ...] | None]]:
    header: dict[str, str] = {}
    rows: dict[int, tuple[int, ...] | None] = {}
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        head, *rest = line.split()
        if not head.isdigit():
            header[head] = " ".join(rest)
            continue
        rows[int(head)] = None if rest == ["FAIL"] else tuple(int(t) for t in rest)
    return header, rows


def _witness_chunk(args) -> list[tuple[int, tuple[int, ...] | None]]:
    system, lo, hi, congruence, cap_factor = args
    out = []
    for m in range(lo, hi + 1):
        w = find_witness(system, m, congruence, cap=cap_factor * m)
        out.append((m, None if w is None else w.point))
    return out


def _scan_moduli(system, lo, hi, congruence=None, *, workers=1, cap_factor=CAP_FACTOR):
    chunks = chunk_ranges(lo, hi)
    tasks = [(system, a, b, congruence, cap_factor) for a, b in chunks]
    for block in ordered_map(_witness_chunk, tasks, workers):
        yield from block


def certify_strong_admissibility(system: LinearSystem, horizon: int, *, workers: int = 1,
                                 cap_factor: int = CAP_FACTOR) -> StrongAdmissibilityCertificate:
    if horizon < 2:
        raise ValidationError("horizon must be >= 2")
    report = is_admissible(system)
    if not report.admissible:
        raise NotAdmissible(report)
    witnesses: dict[int, WitnessCertificate] = {}
    failing: list[int] = []
    for m, point in _scan_moduli(system, 2, horizon, workers=workers, cap_factor=cap_factor):
        if point is None:
            failing.append(m)
        else:
            witnesses[m] = WitnessCertificate(m, point, system.evaluate(point))
    candidate = failing[-1] + 1 if failing else 2
    return StrongAdmissibilityCertificate(system, horizon, witnesses, failing, candidate)


@dataclass
class BandReport:
    band_lo: int
    horizon: int
    congruence: ResidueConstraint
    checked: int
    witnesses: dict[int, tuple[int, ...]] = field(repr=False, default_factory=dict)


def verify_corollary_band(system: LinearSystem, band_lo: int, horizon: int,
                          congruence: ResidueConstraint, *, workers: int = 1) -> BandReport:
    """Every m in (band_lo, horizon] must have a witness obeying the congruence."""
    if band_lo >= horizon:
        raise ValidationError("band_lo must be below the horizon")
    found: dict[int, tuple[int, ...]] = {}
    for m, point in _scan_moduli(system, band_lo + 1, horizon, congruence, workers=workers):
        if point is None:
            raise CounterexampleFound(m, find_witness(system, m))
        found[m] = point
    return BandReport(band_lo, horizon, congruence, len(found), found)


def homogeneous_system(matrix: Sequence[Sequence[int]]) -> LinearSystem:
    rows = [tuple(int(a) for a in row) for row in matrix]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValidationError("matrix must be square and non-empty")
    for i, r in enumerate(rows):
        if not any(r):
            raise ValidationError(f"row {i + 1} of the matrix is all zero")
    return LinearSystem(tuple(AffineForm(r, 0) for r in rows))


def good_property_check(matrix: Sequence[Sequence[int]], horizon: int, *,
                        workers: int = 1) -> StrongAdmissibilityCertificate:
    """Bounded check that A.X^T is strongly admissible."""
    return certify_strong_admissibility(homogeneous_system(matrix), horizon, workers=workers)


@dataclass
class FrameRow:
    n: int
    modulus: int
    least_x: int | None
    least_value: int | None
    least_is_prime: bool | None
    prime_x: int | None
    prime_value: int | None

    @property
    def has_prime(self) -> bool:
        return self.prime_value is not None


def factorial_frame_scan(a: int, b: int, n_range: NaturalRange, *,
                         max_n: int = FACTORIAL_BUDGET) -> list[FrameRow]:
    """Least value a+bx (x >= 1) inside Z_{n!}^* and the first prime there, per n."""
    if a == 0 or b < 1 or math.gcd(a, b) != 1:
        raise ValidationError("need a != 0, b >= 1 and gcd(a, b) = 1")
    if n_range.hi > max_n:
        raise BudgetExceeded(f"n = {n_range.hi} exceeds the factorial budget {max_n}")
    rows = []
    for n in n_range:
        N = math.factorial(n)
        least = prime = None
        x = 1
        while a + b * x < N:
            v = a + b * x
            if in_Zm_star(v, N) and v > 1:
                if least is None:
                    least = (x, v)
                if is_prime(v):
                    prime = (x, v)
                    break
            x += 1
        rows.append(FrameRow(
            n, N,
            least[0] if least else None, least[1] if least else None,
            (least == prime) if least else None,
            prime[0] if prime else None, prime[1] if prime else None))
    return rows
