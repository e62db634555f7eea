"""Command-line front end.

Exit status: 0 success / positive verdict, 1 negative verdict, 2 usage or
input error, 3 budget exhausted or search inconclusive. Errors print a
single ``ERROR <code>: message`` line on stderr.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import __version__
from .constructive_lemmas import SCOPE_NOTE, crt_isomorphism_check, lemma1_construct, lemma2_residues
from .density import Normalization, compare, predicted_count, singular_series
from .errors import (BudgetExceeded, CounterexampleFound, DicksonError, FactorizationTooHard,
                     Inconclusive, NotAdmissible, ParseError, ValidationError)
from .integer_core import DEFAULT_SEED, NaturalRange, ResidueConstraint, set_primality_seed
from .linear_forms import LinearSystem, check, parse_system, serialize_system
from .parallel import default_workers
from .prime_search import (chain_system, enumerate_prime_points, least_seed, omega_count,
                           psi_count)
from .residue_witness import (certify_strong_admissibility, factorial_frame_scan, find_witness,
                              good_property_check, verify_corollary_band)

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    system_path: str | None = None
    horizon: int = 10**4
    beta: list[float] = field(default_factory=lambda: [10**5])
    truncation: int = 10**5
    cap: int | None = None
    congruence: ResidueConstraint | None = None
    output_path: str | None = None
    csv: bool = False
    parallelism: int = 1
    seed: int = DEFAULT_SEED
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("horizon", "truncation", "parallelism"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be positive")
        if self.cap is not None and self.cap < 1:
            raise ValidationError("cap must be positive")
        if any(b <= 0 for b in self.beta):
            raise ValidationError("beta must be positive")

    def parameter_line(self) -> str:
        # parallelism is an execution hint and never changes results, so it is left out
        params = {"horizon": self.horizon, "beta": ",".join(f"{b:g}" for b in self.beta),
                  "truncation": self.truncation, "cap": self.cap, "seed": self.seed}
        if self.congruence is not None:
            params["congruence"] = str(self.congruence)
        for k, v in self.extra.items():
            params[k] = ",".join(f"{x:g}" for x in v) if isinstance(v, list) else v
        return " ".join(f"{k}={v}" for k, v in params.items())


def _read_system(cfg: RunConfig):
    if cfg.system_path is None:
        raise UsageError("this command needs a system file")
    try:
        text = Path(cfg.system_path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {cfg.system_path}: {exc.strerror}") from None
    return parse_system(text)


def _need_linear(system):
    if not isinstance(system, LinearSystem):
        raise UsageError("this command needs a linear system")
    return system


def _read_matrix(path: str) -> list[list[int]]:
    rows = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    for lineno, physical in enumerate(text.splitlines(), 1):
        for piece in physical.split(";"):
            body = piece.split("#", 1)[0].strip()
            if body:
                try:
                    rows.append([int(t) for t in body.split()])
                except ValueError:
                    raise ParseError(f"non-integer token in {body!r}", lineno) from None
    return rows


# -- command handlers: each returns (exit status, body lines) ------------------

def _cmd_check(cfg, system):
    report = check(system, cfg.extra.get("prime_bound", 2))
    return (EXIT_OK if report.admissible else EXIT_NEGATIVE), report.summary_lines()


def _cmd_witness(cfg, system):
    m = cfg.extra["m"]
    w = find_witness(_need_linear(system), m, cfg.congruence, cap=cfg.cap)
    if w is None:
        return EXIT_NEGATIVE, [f"m = {m}: no witness (exhaustive)"]
    return EXIT_OK, [f"m = {m}",
                     "point: " + " ".join(map(str, w.point)),
                     "values: " + " ".join(map(str, w.values))]


def _cmd_certify(cfg, system):
    cert = certify_strong_admissibility(_need_linear(system), cfg.horizon,
                                        workers=cfg.parallelism)
    lines = [f"candidate_L = {cert.candidate_L}",
             "failing: " + " ".join(map(str, cert.failing)),
             f"scope: {cert.scope}", ""]
    return EXIT_OK, lines + cert.to_text().splitlines()


def _cmd_corollary(cfg, system):
    if cfg.congruence is None:
        raise UsageError("corollary needs --congruence")
    band = verify_corollary_band(_need_linear(system), cfg.extra["band_lo"], cfg.horizon,
                                 cfg.congruence, workers=cfg.parallelism)
    return EXIT_OK, [f"success: all {band.checked} moduli in ({band.band_lo}, {band.horizon}] "
                     f"have a witness with first coordinate = {band.congruence}",
                     f"scope: verified for m <= {band.horizon} only"]


def _cmd_good_property(cfg, _system):
    matrix = _read_matrix(cfg.system_path)
    cert = good_property_check(matrix, cfg.horizon, workers=cfg.parallelism)
    return EXIT_OK, [f"candidate_L = {cert.candidate_L}",
                     "failing: " + " ".join(map(str, cert.failing)),
                     f"scope: {cert.scope}", ""] + cert.to_text().splitlines()


def _cmd_lemma1(cfg, system):
    w = lemma1_construct(_need_linear(system), cfg.extra["C"])
    return EXIT_OK, [f"x = {w.x}",
                     f"crt_modulus = {w.modulus}",
                     "residues: " + " ".join(str(c) for c in w.residues),
                     f"product = {w.product_value}",
                     "shielded_primes: " + " ".join(map(str, w.shielded_primes)),
                     f"scope: {SCOPE_NOTE}"]


def _cmd_lemma2(cfg, system):
    res = lemma2_residues(_need_linear(system), cfg.extra["r"], cfg.extra["m"])
    lines = [f"x = {res.x}", f"crt_x = {res.crt_x}"]
    lines += [f"good residues mod {p}: " + " ".join(map(str, g)) for p, g in res.good_residues.items()]
    return EXIT_OK, lines


def _cmd_crt_iso(cfg, _system):
    rep = crt_isomorphism_check(cfg.extra["a"], cfg.extra["b"])
    lines = [f"|Z_{rep.a}^*| = {rep.size_a}", f"|Z_{rep.b}^*| = {rep.size_b}",
             f"|Z_{rep.a * rep.b}^*| = {rep.size_ab}",
             f"bijective: {str(rep.bijective).lower()}",
             f"multiplicative: {str(rep.multiplicative).lower()}"]
    lines += [f"note: {n}" for n in rep.notes]
    return (EXIT_OK if rep.ok else EXIT_NEGATIVE), lines


def _cmd_psi(cfg, system):
    beta = cfg.beta[0] if len(cfg.beta) == 1 else cfg.beta
    return EXIT_OK, psi_count(system, beta, workers=cfg.parallelism).summary_lines()


def _parse_box(text: str) -> list[tuple[int, int]]:
    box = []
    for part in text.split(","):
        lo, sep, hi = part.partition(":")
        if not sep:
            raise UsageError(f"box entries look like lo:hi, got {part!r}")
        box.append((int(lo), int(hi)))
    return box


def _cmd_omega(cfg, system):
    box = _parse_box(cfg.extra["box"]) if cfg.extra.get("box") else None
    alpha = cfg.extra["alpha"]
    rep = omega_count(system, alpha[0] if len(alpha) == 1 else alpha, box,
                      workers=cfg.parallelism)
    return EXIT_OK, rep.summary_lines()


def _cmd_enumerate(cfg, system):
    pts = enumerate_prime_points(system, _parse_box(cfg.extra["box"]), cfg.extra.get("limit"),
                                 workers=cfg.parallelism)
    return EXIT_OK, [f"prime_points: {len(pts)}"] + [pp.to_line() for pp in pts]


def _cmd_least_seed(cfg, system):
    cap = cfg.cap or 10**5
    x = least_seed(system, cap, workers=cfg.parallelism)
    if x is None:
        return EXIT_NEGATIVE, [f"not found for x <= {cap}"]
    return EXIT_OK, [f"x = {x}", "values: " + " ".join(map(str, system.evaluate((x,))))]


def _cmd_chain(cfg, _system):
    return EXIT_OK, serialize_system(chain_system(cfg.extra["n"])).splitlines()


def _cmd_density(cfg, system):
    norm = Normalization(cfg.extra["normalization"])
    series = singular_series(system, cfg.truncation)
    lines = [f"series_value: {series.value:.10f}",
             f"truncation_prime: {series.truncation}",
             f"last_factor: {series.last_factor:.12f}",
             f"admissible: {str(series.admissible).lower()}"]
    for b in cfg.beta:
        est = predicted_count(system, b, norm, series=series)
        lines.append(f"predicted({b:g}, {norm.value}) = {est.predicted_count:.3f}")
    return EXIT_OK, lines


def _cmd_compare(cfg, system):
    rep = compare(system, cfg.beta, cfg.truncation, Normalization(cfg.extra["normalization"]),
                  workers=cfg.parallelism)
    text = rep.to_csv() if cfg.csv else rep.to_text()
    return EXIT_OK, text.splitlines()


def _cmd_factorial_scan(cfg, _system):
    rows = factorial_frame_scan(cfg.extra["a"], cfg.extra["b"],
                                NaturalRange(cfg.extra["n_lo"], cfg.extra["n_hi"]))
    sep = "," if cfg.csv else " "
    lines = [sep.join(("n", "least_x", "least_value", "least_is_prime", "prime_x", "prime_value"))]
    for r in rows:
        cells = [r.n, r.least_x, r.least_value, r.least_is_prime, r.prime_x, r.prime_value]
        lines.append(sep.join("absent" if c is None else str(c).lower() if isinstance(c, bool)
                              else str(c) for c in cells))
    lines.append("note: empirical scan only; not a proof")
    return EXIT_OK, lines


COMMANDS: dict[str, tuple[Callable, bool]] = {
    # name: (handler, reads a system file)
    "check": (_cmd_check, True),
    "witness": (_cmd_witness, True),
    "certify": (_cmd_certify, True),
    "corollary": (_cmd_corollary, True),
    "good-property": (_cmd_good_property, False),
    "lemma1": (_cmd_lemma1, True),
    "lemma2": (_cmd_lemma2, True),
    "crt-iso": (_cmd_crt_iso, False),
    "psi": (_cmd_psi, True),
    "omega": (_cmd_omega, True),
    "enumerate": (_cmd_enumerate, True),
    "least-seed": (_cmd_least_seed, True),
    "chain": (_cmd_chain, False),
    "density": (_cmd_density, True),
    "compare": (_cmd_compare, True),
    "factorial-scan": (_cmd_factorial_scan, False),
}


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns (exit status, report text)."""
    handler, needs_system = COMMANDS[cfg.command]
    set_primality_seed(cfg.seed)
    system = _read_system(cfg) if needs_system else None
    status, body = handler(cfg, system)
    # header lines are comments, so `chain` output is itself a valid system file
    head = [f"# dickson {__version__}", f"# command: {cfg.command}",
            f"# parameters: {cfg.parameter_line()}"]
    if system is not None:
        head.append("# system:")
        head += ["#   " + line for line in serialize_system(system).splitlines()]
    return status, "\n".join(head + ["# ---"] + body) + "\n"


def _congruence(text: str) -> ResidueConstraint:
    r, sep, mod = text.partition(":")
    if not sep:
        r, sep, mod = text.partition("mod")
    try:
        return ResidueConstraint.of(int(r), int(mod))
    except ValueError:
        raise argparse.ArgumentTypeError(f"congruence looks like 5:6, got {text!r}") from None


def _number(text: str) -> int:
    """Integers, also written as 1e5 or 10^5."""
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base) ** int(exp)
    if "e" in text.lower():
        value = float(text)
        if value != int(value):
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
        return int(value)
    return int(text)


def _float_list(text: str) -> list[float]:
    out = []
    for token in text.split(","):
        try:
            out.append(float(_number(token)))
        except (ValueError, argparse.ArgumentTypeError):
            out.append(float(token))
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"ERROR {EXIT_USAGE}: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", dest="output_path")
    common.add_argument("--csv", action="store_true")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: $DICKSON_WORKERS or cpu count)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="seed for probabilistic primality above 2^64")

    parser = _Parser(prog="dickson", description="Admissibility, witnesses and prime-point "
                     "counts for systems of affine-linear forms.")
    parser.add_argument("--version", action="version", version=f"dickson {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text, system=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if system:
            p.add_argument("system", help="system description file")
        return p

    p = add("check", "decide admissibility")
    p.add_argument("--prime-bound", type=_number, default=2)
    p = add("witness", "witness in Z_m^* for one modulus")
    p.add_argument("--m", type=_number, required=True)
    p.add_argument("--congruence", type=_congruence)
    p.add_argument("--cap", type=_number)
    p = add("certify", "strong-admissibility certificate over a horizon")
    p.add_argument("--horizon", type=_number, default=10**4)
    p = add("corollary", "band verification with a congruence on x_1")
    p.add_argument("--band-lo", type=_number, required=True)
    p.add_argument("--horizon", type=_number, default=10**4)
    p.add_argument("--congruence", type=_congruence, required=True)
    p = add("good-property", "certify the homogeneous system of a square matrix", system=False)
    p.add_argument("matrix", help="file with one integer matrix row per line")
    p.add_argument("--horizon", type=_number, default=10**4)
    p = add("lemma1", "CRT construction keeping small primes off the product")
    p.add_argument("--C", dest="C", type=_number, required=True)
    p = add("lemma2", "least x with the scaled product coprime to m")
    p.add_argument("--r", type=_number, required=True)
    p.add_argument("--m", type=_number, required=True)
    p = add("crt-iso", "check Z_a^* x Z_b^* ~ Z_ab^*", system=False)
    p.add_argument("a", type=_number)
    p.add_argument("b", type=_number)
    p = add("psi", "count lattice points mapping to prime points")
    p.add_argument("--beta", type=_float_list, default=[10**5])
    p = add("omega", "count distinct prime points below alpha")
    p.add_argument("--alpha", type=_float_list, required=True)
    p.add_argument("--box", help="explicit search box lo:hi,lo:hi,...")
    p = add("enumerate", "list prime points in a box")
    p.add_argument("--box", required=True, help="lo:hi,lo:hi,...")
    p.add_argument("--limit", type=_number)
    p = add("least-seed", "least x with every value prime")
    p.add_argument("--cap", type=_number, default=10**5)
    p = add("chain", "print the system 1+2x, 1+4x, ..., 1+2^(2^n) x", system=False)
    p.add_argument("n", type=_number)
    for name, text in (("density", "singular series and predicted counts"),
                       ("compare", "exact counts against predictions")):
        p = add(name, text)
        p.add_argument("--beta", type=_float_list, default=[10**5])
        p.add_argument("--truncation", type=_number, default=10**5)
        p.add_argument("--normalization", choices=[n.value for n in Normalization],
                       default=Normalization.LOG_INTEGRAL.value)
    p = add("factorial-scan", "least a+bx inside Z_{n!}^* for each n", system=False)
    p.add_argument("a", type=_number)
    p.add_argument("b", type=_number)
    p.add_argument("--n-lo", type=_number, default=2)
    p.add_argument("--n-hi", type=_number, default=8)
    return parser


_EXTRA_KEYS = ("prime_bound", "m", "band_lo", "C", "r", "a", "b", "alpha", "box", "limit",
               "n", "normalization", "n_lo", "n_hi")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    extra = {k: getattr(ns, k) for k in _EXTRA_KEYS if getattr(ns, k, None) is not None}
    path = getattr(ns, "system", None) or getattr(ns, "matrix", None)
    cfg = RunConfig(command=ns.command, system_path=path,
                    output_path=ns.output_path, csv=ns.csv,
                    parallelism=ns.workers or default_workers(), seed=ns.seed, extra=extra)
    for name in ("horizon", "truncation", "cap", "congruence", "beta"):
        value = getattr(ns, name, None)
        if value is not None:
            setattr(cfg, name, value)
    cfg.__post_init__()
    return cfg


_EXIT_FOR = [
    ((NotAdmissible, CounterexampleFound), EXIT_NEGATIVE),
    ((BudgetExceeded, Inconclusive, FactorizationTooHard), EXIT_BUDGET),
    ((UsageError, ParseError, ValidationError, ValueError), EXIT_USAGE),
]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        status, text = run(cfg)
    except (DicksonError, UsageError, ValueError) as exc:
        status = next((code for types, code in _EXIT_FOR if isinstance(exc, types)), EXIT_USAGE)
        print(f"ERROR {status}: {exc}", file=sys.stderr)
        return status
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            sys.stderr.close()
    return status


if __name__ == "__main__":
    sys.exit(main())
