"""Truncated singular series and Hardy-Littlewood / Bateman-Horn predictions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import ValidationError
from .integer_core import primes_up_to
from .linear_forms import LinearSystem, UniPolySystem, check, local_count, poly_local_count
from .prime_search import psi_count

POLY_PRIME_BUDGET = 10**6
CAVEAT = ("Bateman-Horn type predictions are heuristic: Friedlander and Granville "
          "exhibited cases where the asymptotic fails, so a ratio near 1 is "
          "evidence, not proof.")


class Normalization(enum.Enum):
    POWER_OF_LOG = "PowerOfLog"
    LOG_INTEGRAL = "LogIntegral"


@dataclass(frozen=True)
class SeriesResult:
    value: float
    truncation: int
    primes_used: int
    last_factor: float
    admissible: bool
    obstruction_prime: int | None = None
    # max of p^2 |factor(p) - 1| over the upper tail of primes
    tail_constant: float = 0.0

    def __float__(self):
        return self.value


def _local_counts(system, primes: Sequence[int]) -> list[int]:
    if isinstance(system, UniPolySystem):
        if primes and primes[-1] > POLY_PRIME_BUDGET:
            raise ValidationError(f"polynomial residue scans are capped at p <= {POLY_PRIME_BUDGET}")
        return [poly_local_count(system, p) for p in primes]
    if system.arity != 1:
        raise ValidationError("singular series is only defined here for single-variable systems")
    return [local_count(system, p, strategy="algebraic") for p in primes]


def singular_series(system: LinearSystem | UniPolySystem, P: int) -> SeriesResult:
    """prod_{p <= P} (1 - v(p)/p) (1 - 1/p)^(-s).

    Each factor is formed exactly as (p - v) p^(s-1) / (p-1)^s, rounded once
    to a double, and multiplied in ascending p. Inadmissible systems give 0.
    """
    if P < 2:
        raise ValidationError("truncation prime must be >= 2")
    report = check(system)
    primes = primes_up_to(P)
    if not report.admissible:
        return SeriesResult(0.0, P, len(primes), 0.0, False, report.obstruction_prime)
    s = system.size
    value = 1.0
    last = 1.0
    tail = 0.0
    tail_start = math.isqrt(P)
    for p, v in zip(primes, _local_counts(system, primes)):
        last = float(Fraction((p - v) * p ** (s - 1), (p - 1) ** s))
        value *= last
        if p > tail_start:
            tail = max(tail, p * p * abs(last - 1.0))
    return SeriesResult(value, P, len(primes), last, True, tail_constant=tail)


def log_power_integral(beta: float, m: int) -> float:
    """Integral of dt / (ln t)^m over [2, beta], to relative error < 1e-10."""
    if beta <= 2:
        return 0.0
    # substitute t = e^u to keep the integrand smooth
    val, err = integrate.quad(lambda u: math.exp(u) / u ** m, math.log(2), math.log(beta),
                              epsrel=1e-12, limit=200)
    if err > 1e-8 * abs(val):
        raise ArithmeticError(f"quadrature error {err:g} too large for {val:g}")
    return val


@dataclass
class DensityEstimate:
    truncation_prime: int
    series_value: float
    normalization: Normalization
    predicted_count: float
    beta: float
    degree_factor: int = 1
    admissible: bool = True


def _degree_product(system) -> int:
    return math.prod(system.degrees) if isinstance(system, UniPolySystem) else 1


def predicted_count(system, beta: float, normalization: Normalization = Normalization.LOG_INTEGRAL,
                    *, P: int = 10**5, series: SeriesResult | None = None) -> DensityEstimate:
    if beta < 2:
        raise ValidationError("beta must be >= 2")
    series = series or singular_series(system, P)
    s = system.size
    d = _degree_product(system)
    if normalization is Normalization.POWER_OF_LOG:
        main = beta / math.log(beta) ** s
    else:
        main = log_power_integral(beta, s)
    return DensityEstimate(series.truncation, series.value, normalization,
                           series.value * main / d, beta, d, series.admissible)


@dataclass
class ComparisonRow:
    beta: float
    exact: int
    predicted: float
    ratio: float | None
    predicted_power_of_log: float
    predicted_log_integral: float

    @property
    def normalization_order_ok(self) -> bool:
        return self.beta < 10 or self.predicted_power_of_log <= self.predicted_log_integral


@dataclass
class ComparisonReport:
    normalization: Normalization
    series: SeriesResult
    rows: list[ComparisonRow]
    notes: list[str] = field(default_factory=lambda: [CAVEAT])

    def to_text(self) -> str:
        s = self.series
        lines = [f"series_value: {s.value:.10f}",
                 f"truncation_prime: {s.truncation}",
                 f"primes_used: {s.primes_used}",
                 f"last_factor: {s.last_factor:.12f}",
                 f"tail_constant: {s.tail_constant:.6f}",
                 f"normalization: {self.normalization.value}",
                 ""]
        header = ("beta", "exact", "predicted", "ratio", "power_of_log", "log_integral")
        body = [header] + [self._cells(r) for r in self.rows]
        widths = [max(len(row[i]) for row in body) for i in range(len(header))]
        for row in body:
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        for r in self.rows:
            if not r.normalization_order_ok:
                lines.append(f"flag: power-of-log exceeds log-integral at beta={r.beta:g}")
        lines += ["", *(f"note: {n}" for n in self.notes)]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        out = ["beta,exact,predicted,ratio,power_of_log,log_integral"]
        out += [",".join(self._cells(r)) for r in self.rows]
        return "\n".join(out) + "\n"

    @staticmethod
    def _cells(r: ComparisonRow) -> tuple[str, ...]:
        ratio = "nan" if r.ratio is None else f"{r.ratio:.6f}"
        return (f"{r.beta:g}", str(r.exact), f"{r.predicted:.3f}", ratio,
                f"{r.predicted_power_of_log:.3f}", f"{r.predicted_log_integral:.3f}")


def compare(system, beta, P: int = 10**5,
            normalization: Normalization = Normalization.LOG_INTEGRAL,
            *, workers: int = 1) -> ComparisonReport:
    """Exact Psi counts against predictions at one or more beta values.

    ``ratio`` is predicted / exact (None when the exact count is 0).
    """
    if system.arity != 1:
        raise ValidationError("comparisons need a single-variable system")
    betas = [beta] if isinstance(beta, (int, float)) else list(beta)
    series = singular_series(system, P)
    rows = []
    for b in betas:
        exact = psi_count(system, b, workers=workers).count
        pol = predicted_count(system, b, Normalization.POWER_OF_LOG, series=series).predicted_count
        li = predicted_count(system, b, Normalization.LOG_INTEGRAL, series=series).predicted_count
        chosen = li if normalization is Normalization.LOG_INTEGRAL else pol
        rows.append(ComparisonRow(b, exact, chosen, chosen / exact if exact else None, pol, li))
    return ComparisonReport(normalization, series, rows)


def factor_table(system, P: int) -> np.ndarray:
    """Per-prime factors (p, v(p), factor) for diagnostics."""
    primes = primes_up_to(P)
    s = system.size
    rows = [(p, v, float(Fraction((p - v) * p ** (s - 1), (p - 1) ** s)))
            for p, v in zip(primes, _local_counts(system, primes))]
    return np.array(rows, dtype=float)
