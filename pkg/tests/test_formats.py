import pytest

from corpus import chain_machines, corpus, expression_grammar, pda_fixtures
from qcfl.chomsky import decompose
from qcfl.errors import ParseError, ValidationError
from qcfl.formats import (
    dump_decomposition,
    dump_grammar,
    dump_pda,
    dump_stepfn,
    load_any,
    load_grammar,
    load_stepfn,
    parse_decomposition,
    parse_grammar,
    parse_pda,
)
from qcfl.grammar import WeightedGrammar, make_grammar
from qcfl.pushdown import make_pda
from qcfl.series import compare_up_to
from qcfl.stepfn import StepFunction, extract_stepfn
from qcfl.weights import nat, tropical

FIX = "tests/fixtures/"


def same_grammar(a, b):
    return (
        a.domain == b.domain
        and a.nonterminals == b.nonterminals
        and a.terminals == b.terminals
        and a.start == b.start
        and a.productions == b.productions
        and dict(a.weights) == dict(b.weights)
    )


def same_pda(a, b):
    return (
        a.domain == b.domain
        and (a.states, a.stack, a.initial, a.initial_stack, tuple(a.finals)) == (b.states, b.stack, b.initial, b.initial_stack, tuple(b.finals))
        and a.transitions == b.transitions
        and dict(a.weights) == dict(b.weights)
        and tuple(a.alphabet) == tuple(b.alphabet)
    )


@pytest.mark.parametrize("name, g, sigma", list(corpus()), ids=[c[0] for c in corpus()])
def test_grammar_round_trip(name, g, sigma):
    assert same_grammar(parse_grammar(dump_grammar(g)), g)


@pytest.mark.parametrize("dn", ["boolean", "nat", "tropical", "avgsup"])
def test_pda_round_trip(dn):
    for m in pda_fixtures(dn).values():
        assert same_pda(parse_pda(dump_pda(m)), m)


def test_decomposition_round_trip():
    for g in (expression_grammar(), make_grammar([("S", "a S b", 2), ("S", "", 3)], domain=nat(), terminals="ab")):
        dec = decompose(g)
        back = parse_decomposition(dump_decomposition(dec))
        assert back.brackets == dec.brackets
        assert dict(back.control.delta) == dict(dec.control.delta)
        assert back.control.initial == dec.control.initial and back.control.accepting == dec.control.accepting
        assert dict(back.morphism.images) == dict(dec.morphism.images)
        assert dump_decomposition(back) == dump_decomposition(dec)


def test_stepfn_round_trip(tmp_path):
    sf = extract_stepfn(chain_machines()["halves"])
    path = dump_stepfn(sf, str(tmp_path), "halves")
    back = load_stepfn(path)
    assert back.domain == sf.domain and back.strong == sf.strong
    assert [a for a, _ in back.steps] == [a for a, _ in sf.steps]
    for (_, g1), (_, g2) in zip(back.steps, sf.steps):
        assert same_grammar(g1, g2)


def test_fixture_files_load():
    g = load_grammar(FIX + "expr.wcfg")
    assert isinstance(g, WeightedGrammar) and g.weights["p1"] == 3
    sf = load_any(FIX + "overlap.stepfn")
    assert isinstance(sf, StepFunction) and sf.value("abc") == 3
    assert load_any(FIX + "anbn-nat.pda").domain == nat()


def test_empty_rhs_and_eps_keyword():
    text = "grammar\ndomain nat\nterminals a\nnonterminals S\nstart S\nprod p1: S -> @ 2\nprod p2: S -> eps @ 3\nprod p3: S -> a\n"
    g = parse_grammar(text)
    assert g.production("p1").rhs == () == g.production("p2").rhs
    assert g.weights["p3"] == 1  # default weight is the unit


def test_ids_may_contain_colons():
    m = make_pda([("q", "a", "Z", "q", "")], initial="q", initial_stack="Z", finals=["q"])
    text = dump_pda(m).replace("trans t1:", "trans t1:x:")
    assert parse_pda(text).transitions[0].id == "t1:x"


def test_lattice_domain_relative_to_file(tmp_path):
    import shutil

    shutil.copy(FIX + "diamond.lattice", tmp_path / "d.lattice")
    (tmp_path / "g.wcfg").write_text(
        "grammar\ndomain lattice d.lattice\nterminals x\nnonterminals S\nstart S\nprod p1: S -> x @ a\n"
    )
    g = load_grammar(str(tmp_path / "g.wcfg"))
    assert g.weights["p1"] == "a"
    assert same_grammar(parse_grammar(dump_grammar(g)), g)


@pytest.mark.parametrize(
    "text, line, col, fragment",
    [
        ("gramar\n", 1, 1, "expected header"),
        ("grammar\ndomain nat\nterminals a\nnonterminals S\nstart S\nprod p1 S -> a\n", 6, 6, "expected 'prod"),
        ("grammar\ndomain nat\nterminals a\nnonterminals S\nstart S\nprod p1: S a @ 1\n", 6, None, "->"),
        ("grammar\ndomain nat\nterminals a\nnonterminals S\nstart S\nprod p1: S -> a @ x\n", 6, 19, "bad weight"),
        ("grammar\ndomain natural\n", 2, None, "bad domain"),
        ("grammar\ndomain nat\nterminals a\nnonterminals S\nstart S\n  prod p1: S -> a @ -3\n", 6, 21, "bad weight"),
    ],
)
def test_grammar_parse_errors(text, line, col, fragment):
    with pytest.raises(ParseError) as e:
        parse_grammar(text, "g.wcfg")
    err = e.value
    assert err.line == line and fragment in str(err)
    if col is not None:
        assert err.column == col
    assert str(err).startswith(f"g.wcfg:{line}:")


def test_pda_parse_errors():
    base = "pda\ndomain nat\nalphabet a\nstates q\nstack Z\ninitial q Z\nfinal q\n"
    with pytest.raises(ParseError) as e:
        parse_pda(base + "trans t1: q, a -> q, [] @ 1\n", "m.pda")
    assert e.value.line == 8
    with pytest.raises(ParseError):
        parse_pda(base + "trans t1: q, a, Z -> q, Z @ 1\n")
    with pytest.raises(ValidationError):
        parse_pda(base + "trans t1: q, a, Y -> q, [] @ 1\n")


def test_unwritable_names_are_rejected():
    m = make_pda([("q,1", "a", "Z", "q,1", "")], initial="q,1", initial_stack="Z", finals=["q,1"])
    with pytest.raises(ValidationError, match="cannot be written"):
        dump_pda(m)
    g = make_grammar([("S", "eps")], terminals=["eps"])
    with pytest.raises(ValidationError, match="cannot be written"):
        dump_grammar(g)


def test_decomposition_parse_errors():
    text = dump_decomposition(decompose(make_grammar([("S", "a")])))
    with pytest.raises(ParseError):
        parse_decomposition(text.replace("morph ~p1/1", "morph ~p9/1"))
    with pytest.raises(ParseError):
        parse_decomposition(text.replace("decomposition", "decomp", 1))


def test_load_any_rejects_unknown_header(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("automaton\n")
    with pytest.raises(ParseError):
        load_any(str(p))


def test_tropical_infinity_weights_round_trip():
    g = make_grammar([("S", "a", tropical().parse("inf")), ("S", "b", 4)], domain=tropical())
    back = parse_grammar(dump_grammar(g))
    assert compare_up_to(g.series(), back.series(), "ab", 3)
