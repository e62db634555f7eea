import pytest

from dickson.errors import BudgetExceeded, DomainViolation, UnderivableBox, ValidationError
from dickson.linear_forms import Domain, LinearSystem, UniPolySystem, is_admissible, parse_system
from dickson.prime_search import (chain_system, enumerate_prime_points, least_seed,
                                  omega_count, psi_count)
from dickson.validate import check_prime_point

import oracles

TWINS = LinearSystem.univariate([(1, 0), (1, 2)])
L1 = LinearSystem.from_rows([[1, 2, 0], [2, 1, 0]])
L2 = LinearSystem.from_rows([[1, 1, 1], [3, 1, 3]])


def test_psi_examples():
    assert psi_count(TWINS, 50).count == 6
    assert psi_count(TWINS, 1).count == 0
    rep = psi_count(L1, (3, 3))
    assert rep.count == 3 and rep.exhaustive and rep.points_sampled == 9


def test_psi_twins_matches_sieve():
    table = oracles.sieve(10**5 + 2)
    for beta in (10, 100, 1000, 12_345, 10**5):
        assert psi_count(TWINS, beta).count == oracles.prime_tuple_count([(0, 1), (2, 1)], beta, table)


def test_psi_integer_domain_counts_negative_primes_as_non_prime():
    system = LinearSystem.from_rows([[1, 0]], Domain.INTEGER)
    assert psi_count(system, 30).count == 10


def test_psi_workers_agree():
    assert psi_count(L2, (300, 300), workers=2).count == psi_count(L2, (300, 300)).count


def test_psi_budget():
    with pytest.raises(BudgetExceeded) as info:
        psi_count(L1, (1000, 1000), budget=10_000)
    assert info.value.partial.points_sampled == 10_000


def test_psi_large_values_use_python_ints():
    system = LinearSystem.univariate([(2**62, 1)])
    rep = psi_count(system, 20)
    expected = sum(oracles.trial_prime(2**62 * x + 1) if x < 3 else 0 for x in range(1, 3))
    assert rep.count >= expected and not rep.certified


def test_omega_examples():
    assert omega_count(TWINS, 20).count == 4
    assert omega_count(TWINS, 2).count == 0
    with pytest.raises(ValidationError):
        parse_system("linear\n2 1\n2 1")


def test_omega_coincident_values():
    # L1 at (1,1) and the symmetric pair both give distinct tuples; (3,3) counted once
    rep = omega_count(L1, 7)
    pts = enumerate_prime_points(L1, [(1, 7), (1, 7)])
    tuples = {pp.values for pp in pts if max(pp.values) <= 7}
    assert rep.count == len(tuples)


def test_omega_needs_box_for_mixed_signs():
    system = LinearSystem.from_rows([[1, -1, 5]])
    with pytest.raises(UnderivableBox):
        omega_count(system, 10)
    rep = omega_count(system, 10, search_box=[(1, 10), (1, 10)])
    assert not rep.exhaustive and rep.notes


def test_enumerate_examples():
    pts = {pp.point: pp.values for pp in enumerate_prime_points(L2, [(1, 4), (1, 4)])}
    assert pts[(1, 1)] == (3, 7) and pts[(2, 2)] == (5, 11)
    poly = UniPolySystem(((1, 0, 1),))
    pts = enumerate_prime_points(poly, [(1, 10)])
    assert [pp.point[0] for pp in pts] == [1, 2, 4, 6, 10]
    assert [pp.values[0] for pp in pts] == [2, 5, 17, 37, 101]
    succ = LinearSystem.univariate([(1, 0), (1, 1)])
    assert [pp.point for pp in enumerate_prime_points(succ, [(1, 1000)])] == [(2,)]


def test_enumerate_order_limit_and_validation():
    pts = enumerate_prime_points(L2, [(1, 40), (1, 40)])
    assert [pp.point for pp in pts] == sorted(pp.point for pp in pts)
    assert all(check_prime_point(L2, pp) for pp in pts)
    assert enumerate_prime_points(L2, [(1, 40), (1, 40)], limit=5) == pts[:5]
    with pytest.raises(DomainViolation):
        enumerate_prime_points(L2, [(0, 3), (1, 3)])


def test_chain_system():
    assert chain_system(0) == LinearSystem.univariate([(2, 1)])
    assert chain_system(2) == LinearSystem.univariate([(2, 1), (4, 1), (16, 1)])
    c4 = chain_system(4)
    assert c4.size == 5 and c4.forms[-1].coefficients == (65536,)
    with pytest.raises(ValidationError):
        chain_system(7)


def test_least_seed_examples():
    assert least_seed(chain_system(4), 10) == 1
    assert chain_system(4).evaluate((1,)) == (3, 5, 17, 257, 65537)
    assert least_seed(TWINS, 10) == 3
    trip = LinearSystem.univariate([(1, 0), (1, 2), (1, 4)])
    assert least_seed(trip, 10**3) == 3
    assert [pp.point for pp in enumerate_prime_points(trip, [(1, 10**3)])] == [(3,)]
    assert is_admissible(trip).obstruction_prime == 3


def test_least_seed_against_scan():
    for n in range(4):
        system = chain_system(n)
        expected = next((x for x in range(1, 2000)
                         if all(oracles.trial_prime(v) for v in system.evaluate((x,)))), None)
        assert least_seed(system, 1999) == expected
