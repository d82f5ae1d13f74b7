"""Shared fixture corpus: grammars and machines reused across test modules."""

from fractions import Fraction

from qcfl.grammar import make_grammar, reweight
from qcfl.pushdown import make_pda
from qcfl.weights import INF, avgsup, boolean, chain, nat, tropical

DOMAINS = {"boolean": boolean, "nat": nat, "tropical": tropical, "avgsup": avgsup}

# shapes only; weights are assigned per domain below
SHAPES = {
    "anbn": ([("S", "a S b"), ("S", "")], "ab"),
    "catalan": ([("S", "S S"), ("S", "a")], "a"),
    "expr": ([("E", "E + E"), ("E", "E * E"), ("E", "( E )"), ("E", "x")], "x+*()"),
    "dyck": ([("S", "a S b S"), ("S", "")], "ab"),
    "palindromes": ([("S", "a S a"), ("S", "b S b"), ("S", "a"), ("S", "b"), ("S", "")], "ab"),
    "chains": ([("S", "A"), ("S", "A B"), ("A", "a A"), ("A", ""), ("B", "b B"), ("B", "b")], "ab"),
}


def _weight(domain_name, k):
    """Deterministic, non-trivial weight for the k-th production."""
    if domain_name == "boolean":
        return True
    if domain_name == "nat":
        return k % 3 + 1
    if domain_name == "tropical":
        return k % 4
    return [Fraction(3), Fraction(6), INF, Fraction(1, 2), Fraction(-2), Fraction(5, 3)][k % 6]


def grammar(shape, domain_name):
    rules, sigma = SHAPES[shape]
    d = DOMAINS[domain_name]()
    g = make_grammar(rules, terminals=list(sigma), domain=d)
    return reweight(g, d, {p.id: _weight(domain_name, k) for k, p in enumerate(g.productions)})


def corpus():
    """Every (name, grammar, alphabet) pair: 6 shapes times 4 domains."""
    for shape, (_, sigma) in SHAPES.items():
        for dn in DOMAINS:
            yield f"{shape}-{dn}", grammar(shape, dn), tuple(sigma)


def expression_grammar(n=3, m=6):
    return make_grammar(
        [("E", "E + E", Fraction(n)), ("E", "E * E", Fraction(m)), ("E", "( E )", INF), ("E", "x", INF)],
        domain=avgsup(),
    )


def pda_fixtures(domain_name):
    """Multi-state machines, weighted in the given domain."""
    w = lambda k: _weight(domain_name, k)
    d = DOMAINS[domain_name]()
    anbn = make_pda(
        [
            ("q", "a", "Z", "q", "A Z", w(0)),
            ("q", "a", "A", "q", "A A", w(1)),
            ("q", "b", "A", "p", "", w(2)),
            ("p", "b", "A", "p", "", w(3)),
            ("p", None, "Z", "f", "", w(4)),
            ("q", None, "Z", "f", "", w(5)),
        ],
        initial="q", initial_stack="Z", finals=["f"], domain=d, alphabet="ab",
    )
    # equal numbers of a and b in any order, two ways to close
    balance = make_pda(
        [
            ("s", "a", "Z", "s", "A Z", w(0)),
            ("s", "a", "A", "s", "A A", w(1)),
            ("s", "b", "A", "s", "", w(2)),
            ("s", "b", "Z", "s", "B Z", w(3)),
            ("s", "b", "B", "s", "B B", w(4)),
            ("s", "a", "B", "s", "", w(5)),
            ("s", None, "Z", "f", "", w(1)),
            ("s", None, "Z", "g", "", w(2)),
        ],
        initial="s", initial_stack="Z", finals=["f", "g"], domain=d, alphabet="ab",
    )
    # a^i b^j with j <= i, epsilon moves that pop
    shrink = make_pda(
        [
            ("q", "a", "Z", "q", "A Z", w(0)),
            ("q", "a", "A", "q", "A A", w(1)),
            ("q", None, "A", "r", "A", w(2)),
            ("q", None, "Z", "f", "", w(3)),
            ("r", "b", "A", "r", "", w(4)),
            ("r", None, "A", "r", "", w(5)),
            ("r", None, "Z", "f", "", w(0)),
        ],
        initial="q", initial_stack="Z", finals=["f"], domain=d, alphabet="ab",
    )
    return {"anbn": anbn, "balance": balance, "shrink": shrink}


def chain_machines():
    """Machines over chain(3) used for step-function extraction."""
    d = chain(3)
    h = Fraction(1, 2)
    m1 = make_pda(
        [("q", "a", "Z", "q", "A Z", h), ("q", "a", "A", "q", "A A", 1), ("q", "b", "A", "p", "", 1),
         ("p", "b", "A", "p", "", h), ("p", None, "Z", "f", "", 1)],
        initial="q", initial_stack="Z", finals=["f"], domain=d, alphabet="ab",
    )
    m2 = make_pda(
        [("s", "a", "Z", "s", "A Z", h), ("s", "a", "A", "s", "A A", h), ("s", "b", "A", "s", "", h),
         ("s", None, "Z", "f", "", h)],
        initial="s", initial_stack="Z", finals=["f"], domain=d, alphabet="ab",
    )
    m3 = make_pda(
        [("s", "a", "Z", "s", "Z", 0), ("s", "a", "Z", "t", "Z", 1), ("t", "b", "Z", "t", "Z", h),
         ("s", None, "Z", "f", "", 1), ("t", None, "Z", "f", "", 1)],
        initial="s", initial_stack="Z", finals=["f"], domain=d, alphabet="ab",
    )
    return {"halves": m1, "all-half": m2, "regular": m3}
