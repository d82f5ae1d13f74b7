import pytest

from corpus import DOMAINS, pda_fixtures
from oracles import pda_computations, pda_value, words
from qcfl.bridge import grammar_to_pda
from qcfl.errors import DivergenceError, DomainMismatchError, PreconditionError, ValidationError
from qcfl.grammar import make_grammar
from qcfl.pushdown import (
    computations_up_to,
    computation_weight,
    count_computations,
    empty_pda,
    enumerate_computations,
    evaluate,
    evaluate_up_to,
    is_proper,
    is_state_normalized,
    make_pda,
    pda_step,
    replay,
    split_computation,
    state_normalize,
    sum_wpda,
    to_one_state,
    unambiguity_probe,
)
from qcfl.series import compare_up_to, sum_series
from qcfl.weights import boolean, nat

FIXTURES = [(dn, name) for dn in DOMAINS for name in ("anbn", "balance", "shrink")]


def machine(dn, name):
    return pda_fixtures(dn)[name]


def one_state_anbn():
    return make_pda(
        [("*", "a", "S", "*", "S B"), ("*", "a", "S", "*", "B"), ("*", "b", "B", "*", "")],
        initial="*", initial_stack="S", finals=["*"], alphabet="ab",
    )


def test_pda_step():
    m = machine("boolean", "anbn")
    assert pda_step(m, ("q", "ab", ("Z",)), "t1") == ("q", ("b",), ("A", "Z"))
    assert pda_step(m, ("p", (), ("Z",)), "t5") == ("f", (), ())
    assert pda_step(m, ("q", ("b",), ("A",)), "t3") == ("p", (), ())
    with pytest.raises(ValidationError):
        pda_step(m, ("p", "ab", ("Z",)), "t1")
    with pytest.raises(ValidationError):
        pda_step(m, ("q", "b", ("Z",)), "t1")
    with pytest.raises(ValidationError):
        pda_step(m, ("q", "a", ()), "t1")


def test_one_state_anbn_computations():
    m = one_state_anbn()
    assert len(enumerate_computations(m, "aabb")) == 1
    assert enumerate_computations(m, "ba") == []
    assert enumerate_computations(m, "aab") == []


def test_catalan_via_bridge():
    g = make_grammar([("S", "S S", 1), ("S", "a", 1)], domain=nat())
    assert count_computations(grammar_to_pda(g), "aaaa") == 5


def test_boolean_value_is_membership():
    m = machine("boolean", "anbn")
    for w in words("ab", 6):
        n = len(w) // 2
        assert evaluate(m, w) == (w == ("a",) * n + ("b",) * n)


def test_empty_and_weights():
    m = machine("nat", "anbn")
    assert evaluate(m, "ba") == 0
    (c,) = enumerate_computations(m, "ab")
    assert c.transitions == ("t1", "t3", "t5") and c.final_state == "f"
    assert computation_weight(m, c) == 1 * 3 * 2


def test_is_proper():
    assert is_proper(make_pda([("q", None, "Z", "q", "A Z")], initial="q", initial_stack="Z", finals=["q"]))
    assert not is_proper(make_pda([("q", None, "Z", "q", "")], initial="q", initial_stack="Z", finals=["q"]))
    assert is_proper(one_state_anbn())


@pytest.mark.parametrize("dn, name", FIXTURES)
def test_enumeration_matches_brute_force(dn, name):
    m = machine(dn, name)
    table = evaluate_up_to(m, 5)
    for w in words("ab", 5):
        expected = pda_value(m, w, 4 * len(w) + 6, len(w) + 3)
        assert evaluate(m, w) == expected
        assert table.get(w, m.domain.zero) == expected


@pytest.mark.parametrize("dn, name", FIXTURES)
def test_replay_and_split(dn, name):
    m = machine(dn, name)
    batch = computations_up_to(m, 4)
    for w in words("ab", 4):
        cs = enumerate_computations(m, w)
        assert len(cs) == len(batch.get(w, []))
        assert sorted(c.transitions for c in cs) == sorted(
            tuple(m.transitions[i].id for i in c) for c in batch.get(w, [])
        )
        for c in cs:
            assert replay(m, w, c.transitions) == (c.final_state, (), ())
            # the first transition leaves one stack symbol per pushed letter;
            # the rest splits into shortest pieces, one per symbol
            first = m.transition(c.transitions[0])
            if not first.push:
                continue
            pieces = split_computation(m, first.target, first.push, c.transitions[1:])
            assert len(pieces) == len(first.push)
            assert sum(len(p) for p, _ in pieces) == len(c.transitions) - 1
            assert pieces[-1][1] == c.final_state


def test_state_normalize_counts():
    m = machine("nat", "balance")
    n = state_normalize(m)
    assert len(n.states) == len(m.states) + 2
    assert len(n.transitions) == len(m.transitions) + 1 + len(set(m.finals))
    assert is_state_normalized(n) and not is_state_normalized(m)
    (qf,) = n.finals
    assert all(t.target != n.initial and t.source != qf for t in n.transitions)
    # not idempotent: normalizing again adds fresh states again
    assert len(state_normalize(n).states) == len(n.states) + 2


@pytest.mark.parametrize("dn, name", FIXTURES)
def test_normalize_and_one_state_preserve_series(dn, name):
    m = machine(dn, name)
    n = state_normalize(m)
    one = to_one_state(n)
    assert one.states == ("*",) or list(one.states) == ["*"]
    assert compare_up_to(m.series(), n.series(), "ab", 6)
    assert compare_up_to(m.series(), one.series(), "ab", 6)


def test_one_state_transition_counts():
    m = state_normalize(machine("nat", "anbn"))
    q = len(m.states)
    full = to_one_state(m, prune=False)
    by_origin = {}
    for t in full.transitions:
        by_origin.setdefault(t.id.split("<")[0], []).append(t)
    for t in m.transitions:
        assert len(by_origin[t.id]) == q ** len(t.push)
    assert len(by_origin["t3"]) == 1  # a pop transition
    assert full.initial_stack == f"{m.initial}^{m.initial_stack}^{m.finals[0]}"


def test_one_state_requires_normalized_input():
    with pytest.raises(PreconditionError):
        to_one_state(machine("nat", "balance"))


def test_one_state_preserves_unambiguity():
    m = machine("nat", "anbn")
    assert unambiguity_probe(m, 6) is None
    assert unambiguity_probe(to_one_state(state_normalize(m)), 6) is None
    b = machine("nat", "balance")
    assert unambiguity_probe(b, 4) == unambiguity_probe(to_one_state(state_normalize(b)), 4) == ()


def test_sum_wpda():
    m = state_normalize(machine("nat", "balance"))
    z = empty_pda(nat(), m.alphabet)
    assert compare_up_to(sum_wpda(m, z).series(), m.series(), "ab", 5)
    doubled = sum_wpda(m, m)
    for w in words("ab", 5):
        assert evaluate(doubled, w) == 2 * evaluate(m, w)
    k = state_normalize(machine("nat", "shrink"))
    assert compare_up_to(sum_wpda(m, k).series(), sum_series(m.series(), k.series()), "ab", 5)
    s = sum_wpda(m, k)
    assert set(s.states) & {f"1:{q}" for q in m.states} and s.initial == "q0"


def test_sum_wpda_errors():
    m = state_normalize(machine("nat", "anbn"))
    with pytest.raises(DomainMismatchError):
        sum_wpda(m, state_normalize(machine("boolean", "anbn")))
    with pytest.raises(PreconditionError):
        sum_wpda(m, machine("nat", "anbn"))
    with pytest.raises(ValidationError):
        sum_wpda(m, empty_pda(nat(), ("c",)))


def test_divergence_on_epsilon_loop():
    m = make_pda(
        [("q", None, "Z", "q", "Z"), ("q", None, "Z", "f", "")],
        initial="q", initial_stack="Z", finals=["f"], domain=nat(),
    )
    with pytest.raises(DivergenceError):
        evaluate(m, "")
    assert len(pda_computations(m, "", 5, 2)) == 5  # one per loop count: infinitely many overall


def test_budget_error():
    g = make_grammar([("S", "S S", 1), ("S", "a", 1)], domain=nat())
    with pytest.raises(DivergenceError):
        enumerate_computations(grammar_to_pda(g), "a" * 9, cap=20)


def test_machine_validation():
    with pytest.raises(ValidationError):
        make_pda([("q", "a", "Z", "q", "", 5)], initial="q", initial_stack="Z", finals=["q"], domain=boolean())
