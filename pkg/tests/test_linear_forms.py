import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from dickson.errors import ArityMismatch, DomainViolation, ParseError, ValidationError
from dickson.linear_forms import (AffineForm, Domain, LinearSystem, UniPolySystem, Verdict,
                                  check, evaluate, is_admissible, local_count, parse_system,
                                  poly_is_admissible, poly_local_count, serialize_system,
                                  system_hash)

import oracles
from strategies import form_rows

TWINS = LinearSystem.univariate([(1, 0), (1, 2)])
L1 = LinearSystem.from_rows([[1, 2, 0], [2, 1, 0]])
L2 = LinearSystem.from_rows([[1, 1, 1], [3, 1, 3]])


def test_evaluate_examples():
    assert evaluate(L1, (1, 1)) == (3, 3)
    assert evaluate(TWINS, (3,)) == (3, 5)
    assert evaluate(L2, (2, 2)) == (5, 11)


def test_evaluate_errors():
    with pytest.raises(ArityMismatch):
        evaluate(L1, (1,))
    with pytest.raises(DomainViolation):
        evaluate(L1, (0, 1))
    zsys = LinearSystem.from_rows([[1, 2, 0], [2, 1, 0]], Domain.INTEGER)
    assert evaluate(zsys, (-1, 0)) == (-1, -2)


def test_form_invariants():
    with pytest.raises(ValidationError):
        AffineForm((0, 0), 5)
    with pytest.raises(ValidationError):
        LinearSystem.univariate([(2, 1), (2, 1)])
    with pytest.raises(ValidationError):
        LinearSystem((AffineForm((1,), 0), AffineForm((1, 1), 0)))
    w = LinearSystem.univariate([(1, 1), (2, 2)]).warnings
    assert w


@pytest.mark.parametrize("pairs, p, expected", [([(1, 0), (1, 2)], 2, 1),
                                                ([(1, 0), (1, 2)], 3, 2),
                                                ([(1, 0), (1, 1)], 2, 2)])
def test_local_count_examples(pairs, p, expected):
    system = LinearSystem.univariate(pairs)
    for strategy in ("enumerate", "algebraic"):
        assert local_count(system, p, strategy=strategy) == expected


def random_rows(rng, s, k, c=9):
    while True:
        rows = [[rng.randint(-c, c) for _ in range(k + 1)] for _ in range(s)]
        if all(any(r[:-1]) for r in rows) and len({tuple(r) for r in rows}) == s:
            return rows


def test_local_count_strategies_agree():
    rng = random.Random(11)
    for _ in range(200):
        s, k = rng.randint(1, 4), rng.randint(1, 3)
        rows = random_rows(rng, s, k)
        system = LinearSystem.from_rows(rows, Domain.INTEGER)
        for p in (2, 3, 5, 7):
            expected = oracles.brute_local_count(rows, p)
            assert local_count(system, p, strategy="algebraic") == expected
            assert local_count(system, p, strategy="enumerate") == expected


def test_admissibility_examples():
    rep = is_admissible(TWINS)
    assert rep.verdict is Verdict.ADMISSIBLE and rep.local_counts == {2: 1}
    rep = is_admissible(LinearSystem.univariate([(1, 0), (1, 1)]))
    assert rep.verdict is Verdict.FIXED_DIVISOR and rep.obstruction_prime == 2
    assert is_admissible(L1).admissible
    rep = check(LinearSystem.univariate([(1, 0), (1, 2), (1, 4)]))
    assert rep.obstruction_prime == 3


def test_content_prime_is_checked():
    # 7x + 14 has fixed divisor 7 although s = 1 < 7
    rep = is_admissible(LinearSystem.univariate([(7, 14)]))
    assert not rep.admissible and rep.obstruction_prime == 7


def test_strict_positive_flag():
    assert is_admissible(TWINS).positive_values_admissible
    neg = LinearSystem.from_rows([[1, 0, 0], [-1, 0, 0]], Domain.INTEGER)
    rep = is_admissible(neg)
    assert rep.admissible and not rep.positive_values_admissible


@settings(max_examples=40, deadline=None)
@given(form_rows(), st.randoms(use_true_random=False))
def test_admissibility_permutation_invariant(rows, rng):
    k = len(rows[0]) - 1
    base = is_admissible(LinearSystem.from_rows(rows, Domain.INTEGER)).verdict
    shuffled = rows[:]
    rng.shuffle(shuffled)
    perm = list(range(k))
    rng.shuffle(perm)
    permuted = [[r[j] for j in perm] + [r[-1]] for r in shuffled]
    assert is_admissible(LinearSystem.from_rows(permuted, Domain.INTEGER)).verdict is base


@pytest.mark.parametrize("coeffs, p, expected", [((1, 0, 1), 2, 1), ((1, 0, 1), 3, 0),
                                                 ((1, 1, 2), 2, 2)])
def test_poly_local_count(coeffs, p, expected):
    assert poly_local_count(UniPolySystem((coeffs,)), p) == expected


def test_poly_admissibility():
    assert poly_is_admissible(UniPolySystem(((1, 0, 1),))).admissible
    rep = poly_is_admissible(UniPolySystem(((1, 1, 2),)))
    assert rep.obstruction_prime == 2
    # x^3 - x + 3 is always divisible by 3
    rep = poly_is_admissible(UniPolySystem(((1, 0, -1, 3),)))
    assert rep.obstruction_prime == 3
    with pytest.raises(ValidationError):
        UniPolySystem(((-1, 0, 1),))
    with pytest.raises(ValidationError):
        UniPolySystem(((0, 0, 5),))


def test_parse_examples():
    sys2 = parse_system("linear N; 1 2 0\n2 1 0")
    assert sys2 == L1
    assert parse_system("linear 1; 1 2 0; 2 1 0") == L1
    assert parse_system("poly; 1 0 1") == UniPolySystem(((1, 0, 1),))
    with pytest.raises(ValidationError):
        parse_system("linear 1; 0 0 5")
    with pytest.raises(ValidationError):
        parse_system("linear; 2 1; 2 1")


def test_parse_errors_carry_line():
    with pytest.raises(ParseError) as info:
        parse_system("linear\n1 0\n1 x\n")
    assert info.value.line == 3
    with pytest.raises(ParseError):
        parse_system("cubic\n1 0")
    with pytest.raises(ParseError):
        parse_system("# nothing\n")


def test_comments_and_blank_lines():
    text = "# twins\nlinear N  # positive\n\n1 0\n1 2 # x + 2\n"
    assert parse_system(text) == TWINS


@settings(max_examples=60, deadline=None)
@given(form_rows(), st.sampled_from(list(Domain)))
def test_serialize_round_trip(rows, domain):
    system = LinearSystem.from_rows(rows, domain)
    text = serialize_system(system)
    again = parse_system(text)
    assert again == system and serialize_system(again) == text
    assert system_hash(again) == system_hash(system)


def test_poly_round_trip():
    system = UniPolySystem(((1, 0, 1), (2, 3)))
    assert parse_system(serialize_system(system)) == system


def test_local_count_algebraic_large_prime():
    # 3 forms in 3 variables at p = 101: enumeration would be 10^6 points
    system = LinearSystem.from_rows([[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 1, 1]])
    p = 101
    # |union of 3 hyperplanes in general position| = p^3 - (p-1)^3 when independent
    assert local_count(system, p, strategy="algebraic") == p**3 - (p - 1) ** 3
    assert local_count(system, 11, strategy="algebraic") == oracles.brute_local_count(
        [[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 1, 1]], 11)
