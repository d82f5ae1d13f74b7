import pytest

from corpus import expression_grammar
from qcfl.errors import DomainMismatchError
from qcfl.series import (
    Monome,
    Series,
    characteristic,
    compare_up_to,
    fibers_up_to,
    image_support_up_to,
    scalar,
    sum_all,
    sum_series,
    zero_series,
)
from qcfl.weights import boolean, nat, tropical

AB = ("a", "b")


def a_star(d):
    return characteristic(d, lambda w: all(s == "a" for s in w))


def test_zero_series_is_neutral():
    d = nat()
    s = a_star(d)
    assert compare_up_to(sum_series(zero_series(d), s), s, AB, 4)


def test_sum_over_nat():
    d = nat()
    assert sum_series(a_star(d), a_star(d))("aa") == 2
    assert sum_series(a_star(d), a_star(d))("ab") == 0


def test_sum_over_tropical():
    d = tropical()
    all_words = characteristic(d, lambda w: True)
    s = sum_series(scalar(d, 3, all_words), scalar(d, 5, all_words))
    assert {s(w) for w in ["", "a", "abba"]} == {3}


def test_characteristic():
    assert characteristic(boolean(), lambda w: len(w) % 2 == 0)("aa") is True
    ab = characteristic(nat(), lambda w: w == ("a", "b"))
    assert ab("ab") == 1 and ab("ba") == 0


def test_compare_reports_shortlex_first_mismatch():
    d = boolean()
    assert compare_up_to(a_star(d), a_star(d), AB, 5).equal
    r = compare_up_to(a_star(d), characteristic(d, lambda w: True), AB, 2)
    assert not r.equal and r.counterexample == ("b",)
    assert r.left is False and r.right is True


def test_compare_rejects_mixed_domains():
    with pytest.raises(DomainMismatchError):
        compare_up_to(a_star(nat()), a_star(boolean()), AB, 2)


def test_image_and_support():
    d = nat()
    image, support = image_support_up_to(a_star(d), AB, 3)
    assert image <= {0, 1}
    assert support == {(), ("a",), ("a", "a"), ("a", "a", "a")}
    assert image_support_up_to(zero_series(d), AB, 3)[1] == set()


def test_expression_grammar_image_contains_five():
    g = expression_grammar()
    image, _ = image_support_up_to(g.series(), "x+*()", 7)
    assert 5 in image


def test_fibers_partition_the_probe():
    d = nat()
    s = sum_series(a_star(d), characteristic(d, lambda w: len(w) == 1))
    fibers = fibers_up_to(s, AB, 3)
    assert fibers[2] == [("a",)]
    assert sum(len(v) for v in fibers.values()) == 15


def test_sum_is_commutative_and_associative():
    d = nat()
    x, y = a_star(d), characteristic(d, lambda w: len(w) < 2)
    z = characteristic(d, lambda w: "b" in w)
    assert compare_up_to(sum_series(x, y), sum_series(y, x), AB, 4)
    assert compare_up_to(sum_series(sum_series(x, y), z), sum_series(x, sum_series(y, z)), AB, 4)
    assert compare_up_to(sum_all(d, [x, y, z]), sum_series(x, sum_series(y, z)), AB, 4)


def test_table_and_evaluator_agree():
    g = expression_grammar()
    s = g.series()
    plain = Series(s.domain, s.evaluator)
    assert compare_up_to(s, plain, "x+*", 4)


def test_monome_unpacks():
    w, word = Monome(3, ("a",))
    assert (w, word) == (3, ("a",))
