"""Quantitative context-free languages over unital valuation monoids.

Weighted grammars and pushdown automata, conversions between them, bracket
decompositions ``s = h(D_Y n R)`` and context-free step functions, each
cross-checkable against brute-force enumeration on short words.
"""

from .bridge import grammar_to_pda, pda_to_grammar, related_check
from .chomsky import (
    AlphabeticMorphism,
    BracketAlphabet,
    CSDecomposition,
    DFA,
    compose,
    decompose,
    dyck_grammar,
    dyck_grammar_unambiguous,
    morphism_pda,
)
from .errors import (
    BudgetError,
    DivergenceError,
    DomainMismatchError,
    ParseError,
    PreconditionError,
    QcflError,
    ValidationError,
)
from .grammar import WeightedGrammar, make_grammar
from .pushdown import WeightedPushdown, make_pda
from .series import Monome, Series, compare_up_to
from .stepfn import StepFunction, extract_stepfn, stepfn_to_series
from .weights import WeightDomain, make_domain

__version__ = "0.1.0"

__all__ = [
    "AlphabeticMorphism",
    "BracketAlphabet",
    "BudgetError",
    "CSDecomposition",
    "DFA",
    "DivergenceError",
    "DomainMismatchError",
    "Monome",
    "ParseError",
    "PreconditionError",
    "QcflError",
    "Series",
    "StepFunction",
    "ValidationError",
    "WeightDomain",
    "WeightedGrammar",
    "WeightedPushdown",
    "compare_up_to",
    "compose",
    "decompose",
    "dyck_grammar",
    "dyck_grammar_unambiguous",
    "extract_stepfn",
    "grammar_to_pda",
    "make_domain",
    "make_grammar",
    "make_pda",
    "morphism_pda",
    "pda_to_grammar",
    "related_check",
    "stepfn_to_series",
]
