"""Re-validation of emitted artefacts.

Deliberately shares no code with the search paths: values are recomputed
from the raw coefficient rows here and primality goes through sympy.
"""

from __future__ import annotations

import math

import sympy


def _values(system, point):
    if hasattr(system, "polys"):
        (x,) = point
        out = []
        for coeffs in system.polys:
            deg = len(coeffs) - 1
            out.append(sum(c * x ** (deg - i) for i, c in enumerate(coeffs)))
        return tuple(out)
    return tuple(sum(a * x for a, x in zip(f.coefficients, point)) + f.constant
                 for f in system.forms)


def check_witness(system, cert) -> bool:
    """Point reproduces the stored values, each value in (1, m) and coprime to m."""
    m = cert.modulus
    values = _values(system, cert.point)
    if values != tuple(cert.values):
        return False
    if any(not (1 < v < m) or math.gcd(v, m) != 1 for v in values):
        return False
    if cert.congruence is not None:
        c = cert.congruence
        if cert.point[0] % c.modulus != c.residue:
            return False
    return True


def check_prime_point(system, pp) -> bool:
    values = _values(system, pp.point)
    return values == tuple(pp.values) and all(sympy.isprime(v) for v in values)


def check_coprimality(system, witness) -> bool:
    """Trial-divide the product by every prime in the shielded set."""
    product = math.prod(_values(system, (witness.x,)))
    if product != witness.product_value:
        return False
    return all(product % p != 0 for p in witness.shielded_primes)


def trial_division_factor_free(n: int, bound: int) -> bool:
    """True when no integer 2..bound divides n."""
    return all(n % d != 0 for d in range(2, bound + 1))
