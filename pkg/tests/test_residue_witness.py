import math
import random

import pytest

from dickson.errors import CounterexampleFound, Inconclusive, NotAdmissible, ValidationError
from dickson.integer_core import NaturalRange, ResidueConstraint
from dickson.linear_forms import Domain, LinearSystem
from dickson.residue_witness import (certify_strong_admissibility, factorial_frame_scan,
                                     find_witness, good_property_check, homogeneous_system,
                                     parse_certificate_lines, verify_corollary_band)
from dickson.validate import check_witness

import oracles

TWINS = LinearSystem.univariate([(1, 0), (1, 2)])
SG = LinearSystem.univariate([(1, 0), (2, 1)])
L1 = LinearSystem.from_rows([[1, 2, 0], [2, 1, 0]])
L2 = LinearSystem.from_rows([[1, 1, 1], [3, 1, 3]])


def test_witness_examples():
    w = find_witness(TWINS, 7)
    # y = 2 already gives (2, 4), both units mod 7
    assert w.point == (2,) and w.values == (2, 4)
    assert find_witness(TWINS, 6) is None
    w = find_witness(TWINS, 12, ResidueConstraint(5, 6))
    assert w.point == (5,) and w.values == (5, 7)


@pytest.mark.parametrize("system, rows", [
    (TWINS, [[1, 0], [1, 2]]), (SG, [[1, 0], [2, 1]]),
    (L1, [[1, 2, 0], [2, 1, 0]]), (L2, [[1, 1, 1], [3, 1, 3]]),
])
def test_witness_matches_brute_force(system, rows):
    for m in range(2, 120):
        w = find_witness(system, m)
        expected = oracles.brute_witness(rows, m)
        if expected is None:
            assert w is None
        else:
            assert w.point == expected and check_witness(system, w)


def test_witness_with_congruence_matches_brute_force():
    for m in range(2, 150):
        w = find_witness(SG, m, ResidueConstraint(5, 6))
        expected = oracles.brute_witness([[1, 0], [2, 1]], m, (5, 6))
        assert (w.point if w else None) == expected


def test_mixed_sign_region_is_bounded_by_lp():
    # x1 - x2 + 3 and x1 + x2: bounded region for each m, so NoWitness is exact
    system = LinearSystem.from_rows([[1, -1, 3], [1, 1, 0]])
    for m in range(2, 40):
        w = find_witness(system, m)
        if w is not None:
            assert check_witness(system, w)


def test_unbounded_region_is_inconclusive():
    # v = x1 - x2 in {2, 3} keeps both values in (1, 6) but never coprime to 6,
    # and each line x1 - x2 = v is unbounded
    system = LinearSystem.from_rows([[1, -1, 0], [1, -1, 2]])
    with pytest.raises(Inconclusive):
        find_witness(system, 6, cap=30)
    assert find_witness(system, 4, cap=30) is None   # empty region: exact


def test_integer_domain_shell_search():
    system = LinearSystem.from_rows([[1, 0, 0], [0, 1, 0]], Domain.INTEGER)
    w = find_witness(system, 5)
    assert check_witness(system, w) and max(map(abs, w.point)) == 2


def test_certify_values():
    cert = certify_strong_admissibility(TWINS, 10**4)
    assert cert.candidate_L == 7 and 6 in cert.failing
    assert certify_strong_admissibility(SG, 10**4).candidate_L == 16
    assert certify_strong_admissibility(L1, 10**3).candidate_L <= 7


def test_certificate_text_round_trip():
    cert = certify_strong_admissibility(TWINS, 200)
    header, rows = parse_certificate_lines(cert.to_text())
    assert header["candidate_L"] == "7" and header["horizon"] == "200"
    assert [m for m, p in rows.items() if p is None] == cert.failing
    for m, point in rows.items():
        if point is not None:
            assert check_witness(TWINS, find_witness(TWINS, m)) and point == find_witness(TWINS, m).point


def test_certificate_monotone_in_horizon():
    small = certify_strong_admissibility(SG, 500)
    big = certify_strong_admissibility(SG, 2000)
    assert big.failing[:len(small.failing)] == small.failing
    assert big.candidate_L >= small.candidate_L


def test_certificate_independent_of_workers():
    a = certify_strong_admissibility(L2, 3000, workers=1)
    b = certify_strong_admissibility(L2, 3000, workers=2)
    assert a.to_text() == b.to_text()


def test_certify_rejects_inadmissible():
    with pytest.raises(NotAdmissible):
        certify_strong_admissibility(LinearSystem.univariate([(1, 0), (1, 1)]), 100)


def test_congruence_bands():
    c = ResidueConstraint(5, 6)
    assert verify_corollary_band(TWINS, 10, 10**4, c).checked == 10**4 - 10
    assert verify_corollary_band(SG, 45, 10**4, c).checked == 10**4 - 45
    with pytest.raises(CounterexampleFound) as info:
        verify_corollary_band(TWINS, 5, 6, c)
    assert info.value.m == 6


def test_good_property():
    assert good_property_check([[1, 0], [0, 1]], 10**3).candidate_L == 3
    assert good_property_check([[1, 2], [2, 1]], 10**3).candidate_L <= 7
    with pytest.raises(NotAdmissible):
        good_property_check([[2, 0], [0, 2]], 10**3)
    with pytest.raises(ValidationError):
        homogeneous_system([[1, 0], [0, 0]])


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_identity_matrix_good_property(k):
    eye = [[int(i == j) for j in range(k)] for i in range(k)]
    assert good_property_check(eye, 60).candidate_L == 3


def test_random_nonneg_matrices_never_falsely_admissible():
    rng = random.Random(3)
    for _ in range(15):
        k = rng.randint(1, 3)
        mat = [[rng.randint(0, 3) for _ in range(k)] for _ in range(k)]
        if any(not any(r) for r in mat) or len({tuple(r) for r in mat}) < k:
            continue
        try:
            cert = good_property_check(mat, 40)
        except NotAdmissible:
            rows = [r + [0] for r in mat]
            assert not oracles.brute_admissible(rows, 12)
            continue
        for m, w in cert.witnesses.items():
            assert check_witness(homogeneous_system(mat), w)


def test_factorial_frame_examples():
    (row,) = factorial_frame_scan(1, 2, NaturalRange(3, 3))
    assert row.least_value == 5 and row.least_is_prime
    (row,) = factorial_frame_scan(1, 1, NaturalRange(2, 2))
    assert row.least_value is None
    rows = factorial_frame_scan(3, 4, NaturalRange(3, 5))
    # 7 = 3 + 4 is the least value coprime to 3! but it is not below 3! = 6
    assert rows[0].least_value is None and rows[1].least_value == 7


def test_factorial_frame_against_brute_force():
    for a, b in [(1, 2), (3, 4), (5, 6), (-1, 6), (7, 10), (-5, 6)]:
        for row in factorial_frame_scan(a, b, NaturalRange(2, 7)):
            f = math.factorial(row.n)
            vals = [a + b * x for x in range(1, f) if 1 < a + b * x < f and math.gcd(a + b * x, f) == 1]
            assert row.least_value == (vals[0] if vals else None)
            primes = [v for v in vals if oracles.trial_prime(v)]
            assert row.prime_value == (primes[0] if primes else None)
