"""Prime points, the counting functions Psi and Omega, and least-seed search.

Boxes are flattened to a linear index space and cut into fixed chunks. Each
chunk is evaluated with int64 numpy arithmetic when the exact value bound
allows it (checked up front with Python ints, so nothing wraps) and with
Python integers otherwise. Chunks merge in index order, which is the
lexicographic order of the points.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, DomainViolation, UnderivableBox, ValidationError
from .integer_core import INT64_SAFE, is_certified_prime_range, is_prime, prime_table
from .linear_forms import AffineForm, Domain, LinearSystem, System, UniPolySystem
from .parallel import ordered_map

ENUMERATION_BUDGET = 10**9
CHUNK = 1 << 18
LOOKUP_LIMIT = 1 << 26
CHAIN_MAX = 6
_FILTER_PRIMES = (2, 3, 5, 7, 11, 13)


class CountKind(enum.Enum):
    PSI = "Psi"
    OMEGA = "Omega"


@dataclass(frozen=True)
class PrimePoint:
    point: tuple[int, ...]
    values: tuple[int, ...]
    certified: bool = True   # False when some value is only a probable prime

    def to_line(self) -> str:
        line = " ".join(map(str, self.point)) + " : " + " ".join(map(str, self.values))
        return line if self.certified else line + " (probable prime)"


@dataclass
class CountReport:
    kind: CountKind
    bounds: tuple
    count: int
    points_sampled: int
    exhaustive: bool
    lattice_count: int | None = None
    certified: bool = True
    notes: list[str] = field(default_factory=list)

    def summary_lines(self) -> list[str]:
        lines = [f"kind: {self.kind.value}",
                 "bounds: " + " ".join(map(str, self.bounds)),
                 f"count: {self.count}",
                 f"points_sampled: {self.points_sampled}",
                 f"exhaustive: {str(self.exhaustive).lower()}"]
        if self.lattice_count is not None:
            lines.append(f"lattice_points_mapping_to_prime_points: {self.lattice_count}")
        if not self.certified:
            lines.append("note: some values exceed 2^64; primality there is probabilistic")
        lines.extend(f"note: {n}" for n in self.notes)
        return lines


# -- box enumeration -----------------------------------------------------------

def _value_bound(system: System, box: Sequence[tuple[int, int]]) -> int:
    reach = [max(abs(lo), abs(hi)) for lo, hi in box]
    if isinstance(system, UniPolySystem):
        X = reach[0]
        return max(sum(abs(c) * X ** (len(cs) - 1 - i) for i, c in enumerate(cs))
                   for cs in system.polys)
    return max(sum(abs(a) * r for a, r in zip(f.coefficients, reach)) + abs(f.constant)
               for f in system.forms)


def _prime_mask(vals: np.ndarray, vmax: int) -> np.ndarray:
    out = np.zeros(vals.shape, dtype=bool)
    pos = vals >= 2
    if vmax <= LOOKUP_LIMIT:
        table = prime_table(vmax)
        out[pos] = table[vals[pos]]
        return out
    cand = pos.copy()
    for p in _FILTER_PRIMES:
        cand &= (vals % p != 0) | (vals == p)
    for i in np.flatnonzero(cand):
        out[i] = is_prime(int(vals[i]))
    return out


def _eval_numpy(system: System, coords: list[np.ndarray], i: int) -> np.ndarray:
    if isinstance(system, UniPolySystem):
        x = coords[0]
        acc = np.zeros(x.shape, dtype=np.int64)
        for c in system.polys[i]:
            acc = acc * x + c
        return acc
    f = system.forms[i]
    acc = np.full(coords[0].shape, f.constant, dtype=np.int64)
    for a, c in zip(f.coefficients, coords):
        if a:
            acc += a * c
    return acc


def _chunk_hits(args) -> np.ndarray:
    """Flat indices in [start, stop) whose point maps to an all-prime tuple."""
    system, box, start, stop, vbound = args
    shape = tuple(hi - lo + 1 for lo, hi in box)
    idx = np.arange(start, stop, dtype=np.int64)
    if vbound < INT64_SAFE:
        coords = [c.astype(np.int64) + lo for c, (lo, _) in
                  zip(np.unravel_index(idx, shape), box)]
        alive = np.ones(idx.shape, dtype=bool)
        for i in range(system.size):
            sel = np.flatnonzero(alive)
            if sel.size == 0:
                break
            vals = _eval_numpy(system, [c[sel] for c in coords], i)
            alive[sel] = _prime_mask(vals, vbound)
        return idx[alive]
    hits = []
    for flat in range(start, stop):
        point = _unflatten(flat, box)
        if all(is_prime(v) for v in system.evaluate(point)):
            hits.append(flat)
    return np.array(hits, dtype=np.int64)


def _unflatten(flat: int, box) -> tuple[int, ...]:
    coords = []
    for lo, hi in reversed(box):
        flat, r = divmod(flat, hi - lo + 1)
        coords.append(lo + r)
    return tuple(reversed(coords))


def _scan_box(system: System, box, *, budget: int, workers: int, limit: int | None = None):
    """Flat indices of hits in ascending order, as (hits, sampled, complete).

    With ``limit`` set the scan runs sequentially and stops at the first
    chunk that reaches the limit.
    """
    total = math.prod(hi - lo + 1 for lo, hi in box) if box else 0
    if total <= 0:
        return np.zeros(0, dtype=np.int64), 0, True
    stop_at = min(total, budget)
    vbound = _value_bound(system, box)
    tasks = [(system, box, a, min(a + CHUNK, stop_at), vbound)
             for a in range(0, stop_at, CHUNK)]
    found = []
    n_found = 0
    sampled = 0
    if limit is not None:
        # Sequential so the scan can stop at the first chunk that fills the limit.
        for task in tasks:
            hits = _chunk_hits(task)
            sampled = task[3]
            found.append(hits)
            n_found += hits.size
            if n_found >= limit:
                return np.concatenate(found)[:limit], sampled, True
    else:
        for task, hits in zip(tasks, ordered_map(_chunk_hits, tasks, workers)):
            found.append(hits)
            sampled = task[3]
    hits = np.concatenate(found) if found else np.zeros(0, dtype=np.int64)
    return hits, sampled, stop_at == total


def _normalise_bounds(values, n: int, name: str) -> tuple:
    if isinstance(values, (int, float)):
        values = (values,) * n
    values = tuple(values)
    if len(values) != n:
        raise ValidationError(f"{name} needs {n} entries, got {len(values)}")
    if any(v < 0 for v in values):
        raise ValidationError(f"{name} entries must be nonnegative")
    return values


def _psi_box(system: System, betas) -> list[tuple[int, int]]:
    if system.domain is Domain.POSITIVE:
        return [(1, int(math.floor(b))) for b in betas]
    return [(-int(math.floor(b)), int(math.floor(b))) for b in betas]


def psi_count(system: System, beta, *, budget: int = ENUMERATION_BUDGET,
              workers: int = 1) -> CountReport:
    """Lattice points with |x_i| <= beta_i (x_i >= 1 on N^k) mapping to primes."""
    betas = _normalise_bounds(beta, system.arity, "beta")
    box = _psi_box(system, betas)
    hits, sampled, complete = _scan_box(system, box, budget=budget, workers=workers)
    report = CountReport(CountKind.PSI, betas, int(hits.size), sampled, complete,
                         certified=_value_bound(system, box) < (1 << 64))
    if not complete:
        raise BudgetExceeded(f"box has more than {budget} points; partial count {report.count}",
                             partial=report)
    return report


def enumerate_prime_points(system: System, region: Sequence[tuple[int, int]],
                           limit: int | None = None, *, budget: int = ENUMERATION_BUDGET,
                           workers: int = 1) -> list[PrimePoint]:
    """Prime points in the inclusive box ``region``, ascending lexicographically."""
    box = [(int(lo), int(hi)) for lo, hi in region]
    if len(box) != system.arity:
        raise ValidationError(f"region needs {system.arity} coordinate ranges")
    if system.domain is Domain.POSITIVE and any(lo < 1 for lo, hi in box if hi >= lo):
        raise DomainViolation("region leaves the positive orthant")
    total = math.prod(max(0, hi - lo + 1) for lo, hi in box)
    if total > budget:
        raise BudgetExceeded(f"region has {total} points, budget {budget}")
    hits, _, _ = _scan_box(system, box, budget=budget, workers=workers, limit=limit)
    out = []
    for flat in hits.tolist():
        point = _unflatten(flat, box)
        values = system.evaluate(point)
        if not all(is_prime(v) for v in values):
            raise AssertionError(f"re-validation failed at {point}")
        out.append(PrimePoint(point, values, all(is_certified_prime_range(v) for v in values)))
    return out


def _max_x_below(coeffs: Sequence[int], alpha: float) -> int:
    """Largest x >= 0 with poly(x) <= alpha, for nonnegative coefficients."""
    def val(x):
        acc = 0
        for c in coeffs:
            acc = acc * x + c
        return acc
    if val(1) > alpha:
        return 0
    hi = 1
    while val(hi) <= alpha:
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if val(mid) <= alpha:
            lo = mid
        else:
            hi = mid
    return lo


def derive_omega_box(system: System, alphas) -> list[tuple[int, int]]:
    if isinstance(system, UniPolySystem):
        if any(c < 0 for cs in system.polys for c in cs):
            raise UnderivableBox("negative polynomial coefficients: pass search_box")
        return [(1, min(_max_x_below(cs, a) for cs, a in zip(system.polys, alphas)))]
    if system.domain is not Domain.POSITIVE or not system.nonnegative():
        raise UnderivableBox("box derivation needs nonnegative coefficients on N^k")
    box = []
    for j in range(system.arity):
        caps = []
        for f, alpha in zip(system.forms, alphas):
            a = f.coefficients[j]
            if a > 0:
                others = sum(f.coefficients) - a
                caps.append(math.floor((alpha - f.constant - others) / a))
        if not caps:
            raise UnderivableBox(f"variable x{j + 1} appears in no form; pass search_box")
        box.append((1, min(caps)))
    return box


def omega_count(system: System, alpha, search_box: Sequence[tuple[int, int]] | None = None,
                *, budget: int = ENUMERATION_BUDGET, workers: int = 1) -> CountReport:
    """Distinct all-prime value tuples with every value <= its alpha bound."""
    alphas = _normalise_bounds(alpha, system.size, "alpha")
    if search_box is None:
        box = derive_omega_box(system, alphas)
        exhaustive = True
    else:
        box = [(int(lo), int(hi)) for lo, hi in search_box]
        exhaustive = False
    if any(hi < lo for lo, hi in box):
        return CountReport(CountKind.OMEGA, alphas, 0, 0, exhaustive, lattice_count=0)
    points = enumerate_prime_points(system, box, budget=budget, workers=workers)
    inside = [pp for pp in points if all(v <= a for v, a in zip(pp.values, alphas))]
    tuples = {pp.values for pp in inside}
    notes = [] if exhaustive else ["search box supplied by caller; completeness not proven"]
    return CountReport(CountKind.OMEGA, alphas, len(tuples),
                       math.prod(hi - lo + 1 for lo, hi in box), exhaustive,
                       lattice_count=len(inside),
                       certified=all(pp.certified for pp in inside), notes=notes)


def chain_system(n: int) -> LinearSystem:
    """Forms 1 + 2^(2^j) x for j = 0..n."""
    if not 0 <= n <= CHAIN_MAX:
        raise ValidationError(f"chain index must be in 0..{CHAIN_MAX}")
    return LinearSystem(tuple(AffineForm((2 ** (2 ** j),), 1) for j in range(n + 1)))


def least_seed(system: System, cap: int, *, workers: int = 1) -> int | None:
    """Least x in 1..cap at which every value is prime, or None."""
    if system.arity != 1:
        raise ValidationError("least_seed needs a single-variable system")
    if cap < 1:
        raise ValidationError("cap must be >= 1")
    found = enumerate_prime_points(system, [(1, cap)], limit=1, workers=workers)
    return found[0].point[0] if found else None
