import random
from fractions import Fraction

import pytest

from treecount.cfrac import (
    AlternatingCF,
    CFExpansion,
    Mat2,
    NotRepresentable,
    alternating_eval,
    alternating_matrix,
    alternating_vector,
    cf_eval,
    cf_expand,
    commutation_identity_check,
    convergents,
    format_alternating,
    format_cf,
    generator_matrix,
    iter_compositions,
    matrix_of_quotients,
    parse_bs,
    parse_cf,
    parse_rational,
    to_alternating,
)
from treecount.errors import DomainError, ParseError


def test_expand_four_elevenths():
    cf = cf_expand(Fraction(4, 11))
    assert cf == CFExpansion(0, (2, 1, 3))
    assert cf.is_canonical
    assert format_cf(cf) == "[0;2,1,3]"


@pytest.mark.parametrize(
    "x, bs",
    [
        (Fraction(4, 11), (2, 2)),
        (Fraction(1, 2), (1,)),
        (Fraction(1, 3), (2,)),
        (Fraction(3, 5), (1, 1)),
        (Fraction(15, 26), (1, 2, 2)),
    ],
)
def test_to_alternating(x, bs):
    form = to_alternating(x)
    assert isinstance(form, AlternatingCF)
    assert form.bs == bs
    assert alternating_eval(form) == x


def test_two_fifths_not_representable():
    form = to_alternating(Fraction(2, 5))
    assert isinstance(form, NotRepresentable)
    assert form.value == Fraction(2, 5)


@pytest.mark.parametrize("x", [Fraction(0), Fraction(1), Fraction(3, 2)])
def test_to_alternating_domain(x):
    with pytest.raises(DomainError):
        to_alternating(x)


def test_alternating_vector_matches_matrix_product():
    assert alternating_vector([2, 2]) == (4, 11)
    assert alternating_vector([1, 1, 1]) == (8, 13)
    assert alternating_matrix([2, 2]) == Mat2(3, 8, 4, 11)
    assert alternating_matrix([2, 2]).bottom_row == alternating_vector([2, 2])


def test_alternating_quotients_interleave_ones():
    acf = AlternatingCF((4, 2, 1, 3))
    assert acf.quotients == (4, 1, 2, 1, 1, 1, 3, 1)
    assert format_alternating(acf) == "[4,1,2,1,1,1,3,1]"
    assert cf_eval(CFExpansion(0, acf.quotients)) == acf.value


def test_random_rationals_alternating_consistency():
    rng = random.Random(7)
    for _ in range(500):
        u = rng.randint(2, 400)
        t = rng.randint(1, u - 1)
        x = Fraction(t, u)
        form = to_alternating(x)
        if isinstance(form, AlternatingCF):
            assert alternating_eval(form) == x
        assert cf_expand(x).value == x


def test_two_expansions_share_value():
    cf = cf_expand(Fraction(7, 19))
    assert cf.with_trailing_one().value == cf.value
    assert not cf.with_trailing_one().is_canonical
    assert cf.with_trailing_one().canonical() == cf


@pytest.mark.parametrize("b", [1, 2, 3, 10])
def test_generator_matrix(b):
    m = generator_matrix(b)
    assert m == Mat2(1, b, 1, b + 1)
    assert m.det == 1
    assert m.is_nonnegative()


def test_generator_matrix_rejects_zero():
    with pytest.raises(DomainError):
        generator_matrix(0)


@pytest.mark.parametrize("k", range(1, 6))
def test_commutation_identity(k):
    assert commutation_identity_check(k)


def test_matrix_of_quotients_bottom_row():
    assert matrix_of_quotients((2, 1, 3)).bottom_row == (4, 11)
    assert Mat2(1, 1, 1, 2).frobenius_sq == 7


def test_convergents():
    assert convergents(cf_expand(Fraction(4, 11))) == [
        Fraction(0), Fraction(1, 2), Fraction(1, 3), Fraction(4, 11),
    ]


def test_parse_and_eval():
    assert parse_cf("[0;2,1,2,1]").value == Fraction(4, 11)
    assert parse_cf("[2,1,2,1]").value == Fraction(4, 11)
    assert parse_cf(" [1;2] ").value == Fraction(3, 2)
    assert parse_rational("4/11") == Fraction(4, 11)
    assert parse_rational(" 7 ") == Fraction(7)
    assert parse_bs("2, 2").bs == (2, 2)


@pytest.mark.parametrize(
    "text, position",
    [
        ("[0;2,a]", 5),
        ("0;2]", 0),
        ("[0;2", 4),
    ],
)
def test_parse_cf_errors(text, position):
    with pytest.raises(ParseError) as err:
        parse_cf(text)
    assert err.value.position == position


def test_parse_rational_errors():
    with pytest.raises(ParseError) as err:
        parse_rational("4/x")
    assert err.value.position == 2
    with pytest.raises(ParseError):
        parse_rational("4/0")
    with pytest.raises(ParseError):
        parse_bs("2,0")


def test_iter_compositions():
    assert len(list(iter_compositions(4))) == 8
    assert len(list(iter_compositions(4, max_part=2))) == 5
    assert all(sum(c) == 6 for c in iter_compositions(6))
