"""Context-free step functions ``sum_i a_i * 1_{L_i}``.

Each step language is carried by a grammar read with boolean semantics.
Step functions become pushdown machines through a marker letter whose image
carries the step weight; the converse extraction splits a machine by the
running value of its computations, which is exact when the valuation is a
left fold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from ._util import fresh, words_up_to
from .bridge import grammar_to_pda, pda_to_grammar
from .chomsky import AlphabeticMorphism, morphism_pda
from .errors import PreconditionError, ValidationError
from .grammar import Production, WeightedGrammar, evaluate_up_to, recognizes, unambiguity_probe
from .pushdown import (
    Transition,
    WeightedPushdown,
    empty_pda,
    is_state_normalized,
    state_normalize,
    sum_wpda,
)
from .series import Monome, Series
from .weights import WeightDomain, boolean, valuation_closure

DEFAULT_CLOSURE_CAP = 10_000


@dataclass(frozen=True, eq=False)
class StepFunction:
    domain: WeightDomain
    steps: tuple = ()  # (weight, grammar) pairs
    strong: bool = False
    alphabet: tuple = field(default=None)

    def __post_init__(self):
        steps = tuple((a, g) for a, g in self.steps)
        object.__setattr__(self, "steps", steps)
        for a, g in steps:
            self.domain.check(a)
            if not isinstance(g, WeightedGrammar):
                raise ValidationError("every step needs a grammar")
        if self.alphabet is None:
            letters = dict.fromkeys(t for _, g in steps for t in g.terminals)
            object.__setattr__(self, "alphabet", tuple(letters))
        else:
            object.__setattr__(self, "alphabet", tuple(self.alphabet))

    def value(self, w):
        d = self.domain
        total = d.zero
        for a, g in self.steps:
            if _member(g, w):
                total = d.add(total, a)
        return total

    def languages_up_to(self, n):
        return [_language_table(g, n) for _, g in self.steps]

    def series(self) -> Series:
        d = self.domain

        def table(n):
            out = {}
            for (a, _), lang in zip(self.steps, self.languages_up_to(n)):
                for w in lang:
                    out[w] = d.add(out.get(w, d.zero), a)
            return out

        return Series(d, self.value, "sum", table)


def _member(g: WeightedGrammar, w) -> bool:
    w = tuple(w)
    if any(s not in g.terminals for s in w):
        return False
    return recognizes(g, w)


def _language_table(g: WeightedGrammar, n: int) -> set:
    b = boolean()
    lang = WeightedGrammar(g.nonterminals, g.terminals, g.start, g.productions, {p.id: b.one for p in g.productions}, b)
    return set(evaluate_up_to(lang, n))


def scalar_step_series(
    a,
    g: WeightedGrammar,
    domain: WeightDomain,
    unambiguous: bool = True,
    *,
    alphabet=None,
    probe_len: int = 6,
) -> WeightedPushdown:
    """Machine for ``a * 1_{L(g)}``: the language ``# L(g)`` pushed through
    ``# -> a.eps`` and ``s -> 1.s``.

    When the domain is not complete and completely idempotent the grammar must
    be unambiguous; that claim is probed on words up to ``probe_len``.
    """
    domain.check(a)
    if domain.one is None:
        raise PreconditionError("the domain needs a unit")
    sigma = list(dict.fromkeys([*(alphabet or ()), *g.terminals]))
    needs_unambiguous = not (domain.complete and domain.completely_idempotent)
    if needs_unambiguous:
        if not unambiguous:
            raise PreconditionError(
                f"{domain.name} is not complete and completely idempotent; the step grammar must be unambiguous"
            )
        witness = unambiguity_probe(g, probe_len)
        if witness is not None:
            raise PreconditionError(f"the step grammar is ambiguous on {''.join(witness)!r}")
    mark = fresh("#", set(sigma) | set(g.nonterminals))
    start = fresh(f"{g.start}#", set(sigma) | set(g.nonterminals) | {mark})
    pid = fresh("mark", {p.id for p in g.productions})
    b = boolean()
    marked = WeightedGrammar(
        [start, *g.nonterminals],
        [mark, *sigma],
        start,
        [Production(pid, start, (mark, g.start)), *g.productions],
        {p: b.one for p in [pid, *(q.id for q in g.productions)]},
        b,
    )
    base = grammar_to_pda(marked)
    base = WeightedPushdown(
        base.states, base.stack, base.initial, base.initial_stack, base.finals,
        base.transitions, base.weights, base.domain, [mark, *sigma],
    )
    images = {mark: Monome(a, ())}
    images.update({s: Monome(domain.one, (s,)) for s in sigma})
    h = AlphabeticMorphism([mark, *sigma], sigma, domain, images)
    return morphism_pda(base, h, base_unambiguous=unambiguous)


def stepfn_to_series(sf: StepFunction, unambiguous: bool = True) -> WeightedPushdown:
    """Sum of the scalar machines of all steps."""
    total = empty_pda(sf.domain, sf.alphabet)
    for a, g in sf.steps:
        m = scalar_step_series(a, g, sf.domain, unambiguous, alphabet=sf.alphabet)
        total = sum_wpda(total, state_normalize(m))
        # keep the sum state-normalized for the next round
        if not is_state_normalized(total):
            total = state_normalize(total)
    return total


def _eligible(d: WeightDomain):
    problems = []
    if not d.additively_idempotent:
        problems.append("not additively idempotent")
    if not d.locally_finite:
        problems.append("not locally finite")
    if not d.fold_presentable:
        problems.append("valuation is not a left fold")
    if d.complete and not d.completely_idempotent:
        problems.append("complete but not completely idempotent")
    if problems:
        raise PreconditionError(f"{d.name} does not support step-function extraction: {', '.join(problems)}")


def extract_stepfn(m: WeightedPushdown, cap: int = DEFAULT_CLOSURE_CAP) -> StepFunction:
    """Split ``m`` by computation value: one boolean machine per reachable value
    ``a``, whose states carry the running fold of the weights so far."""
    d = m.domain
    _eligible(d)
    ys = sorted(valuation_closure(d, [m.weights[t.id] for t in m.transitions], cap), key=repr)
    step = d.fold_step
    one = d.one
    names, taken = {}, set()

    def st(q, y):
        if (q, y) not in names:
            names[(q, y)] = fresh(f"{q}|{d.format(y)}", taken)
            taken.add(names[(q, y)])
        return names[(q, y)]

    # only accumulator values reachable from (q0, 1) matter
    reach = {(m.initial, one)}
    todo = [(m.initial, one)]
    by_source = {}
    for t in m.transitions:
        by_source.setdefault(t.source, []).append(t)
    while todo:
        q, y = todo.pop()
        for t in by_source.get(q, ()):
            nxt = (t.target, step(y, m.weights[t.id]))
            if nxt not in reach:
                reach.add(nxt)
                todo.append(nxt)
    if not {y for _, y in reach} <= set(ys):
        raise ValidationError("running values escape the valuation closure")
    ordered = sorted(reach, key=lambda qy: (m.states.index(qy[0]), repr(qy[1])))
    b = boolean()
    ts = []
    for q, y in ordered:
        for t in by_source.get(q, ()):
            y2 = step(y, m.weights[t.id])
            ts.append(Transition(f"{t.id}|{d.format(y)}", st(q, y), t.label, t.pop, st(t.target, y2), t.push))
    states = [st(q, y) for q in m.states for y in ys]
    steps = []
    for a in ys:
        if a == d.zero:
            continue
        finals = [st(f, a) for f in m.finals if (f, a) in reach]
        if not finals:
            continue
        ma = WeightedPushdown(
            states, m.stack, st(m.initial, one), m.initial_stack, finals, ts,
            {t.id: b.one for t in ts}, b, m.alphabet,
        )
        g = pda_to_grammar(ma)
        if g.productions:
            steps.append((a, g))
    return StepFunction(d, tuple(steps), strong=False, alphabet=m.alphabet)


@dataclass(frozen=True)
class StrongnessReport:
    max_len: int
    overlaps: tuple = ()  # (word, indices of the steps containing it)
    gaps: tuple = ()
    image: frozenset = frozenset()
    fibers: dict = field(default_factory=dict)

    @property
    def strong(self):
        return not self.overlaps and not self.gaps

    @property
    def witness(self) -> Optional[tuple]:
        words = [w for w, _ in self.overlaps] + list(self.gaps)
        return min(words, key=lambda w: (len(w), w)) if words else None

    def __bool__(self):
        return self.strong


def strongness_probe(sf: StepFunction, alphabet=None, n: int = 6) -> StrongnessReport:
    """Check that the step languages partition all words up to length ``n``,
    and report the image and fibers seen there."""
    alphabet = tuple(alphabet) if alphabet is not None else sf.alphabet
    langs = sf.languages_up_to(n)
    d = sf.domain
    overlaps, gaps, fibers = [], [], {}
    for w in words_up_to(alphabet, n):
        hits = [i for i, lang in enumerate(langs) if w in lang]
        if len(hits) > 1:
            overlaps.append((w, tuple(hits)))
        elif not hits:
            gaps.append(w)
        v = d.zero
        for i in hits:
            v = d.add(v, sf.steps[i][0])
        fibers.setdefault(v, []).append(w)
    return StrongnessReport(
        n, tuple(overlaps), tuple(gaps), frozenset(fibers), {v: tuple(ws) for v, ws in fibers.items()}
    )
