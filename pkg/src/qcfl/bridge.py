"""Translations between head-normal-form grammars and one-state pushdown machines.

A one-state machine and a head-normal-form grammar are *related* when the
stack alphabet is the nonterminal set, the initial stack symbol is the start
symbol, and transitions ``(*, x, A, *, B1..Bn)`` correspond one to one, with
equal weights, to productions ``A -> x B1..Bn``.  Related pairs have the same
series and the same ambiguity.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ._util import fresh
from .grammar import Production, WeightedGrammar, is_head_normal_form, to_head_normal_form
from .pushdown import Transition, WeightedPushdown, is_state_normalized, state_normalize, to_one_state

STATE = "*"


@dataclass(frozen=True)
class RelatedPair:
    pda: WeightedPushdown
    grammar: WeightedGrammar
    bijection: dict = field(default_factory=dict)  # transition id -> production id


def _split_rhs(g: WeightedGrammar, p: Production):
    if p.rhs and p.rhs[0] not in g._nts:
        return p.rhs[0], p.rhs[1:]
    return None, p.rhs


def related_pair(g: WeightedGrammar) -> RelatedPair:
    h = g if is_head_normal_form(g) else to_head_normal_form(g)
    ts, weights = [], {}
    for p in h.productions:
        x, push = _split_rhs(h, p)
        ts.append(Transition(p.id, STATE, x, p.lhs, STATE, tuple(push)))
        weights[p.id] = h.weights[p.id]
    m = WeightedPushdown([STATE], h.nonterminals, STATE, h.start, [STATE], ts, weights, h.domain, h.terminals)
    return RelatedPair(m, h, {t.id: t.id for t in ts})


def grammar_to_pda(g: WeightedGrammar) -> WeightedPushdown:
    """One-state machine related to the head normal form of ``g``."""
    return related_pair(g).pda


def _is_one_state(m: WeightedPushdown) -> bool:
    return len(m.states) == 1 and tuple(m.finals) == tuple(m.states)


def pda_to_grammar(m: WeightedPushdown) -> WeightedGrammar:
    """Head-normal-form grammar related to the one-state form of ``m``."""
    if not _is_one_state(m):
        if not is_state_normalized(m):
            m = state_normalize(m)
        m = to_one_state(m)
    terminals = set(m.alphabet)
    rename, taken = {}, set(m.stack) | terminals
    for g in m.stack:
        if g in terminals:
            rename[g] = fresh(g, taken)
            taken.add(rename[g])

    def nt(g):
        return rename.get(g, g)

    prods, weights = [], {}
    for t in m.transitions:
        rhs = ((t.label,) if t.label is not None else ()) + tuple(nt(g) for g in t.push)
        prods.append(Production(t.id, nt(t.pop), rhs))
        weights[t.id] = m.weights[t.id]
    return WeightedGrammar([nt(g) for g in m.stack], m.alphabet, nt(m.initial_stack), prods, weights, m.domain)


@dataclass(frozen=True)
class RelatedReport:
    violations: tuple = ()

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


def related_check(m: WeightedPushdown, g: WeightedGrammar) -> RelatedReport:
    """Check every clause of relatedness and list all violations."""
    bad = []
    if not _is_one_state(m):
        bad.append(f"machine is not one-state with that state final (states {list(m.states)}, finals {list(m.finals)})")
    if not is_head_normal_form(g):
        bad.append("grammar is not in head normal form")
    if set(m.stack) != set(g.nonterminals):
        bad.append(f"stack alphabet {sorted(m.stack)} differs from nonterminals {sorted(g.nonterminals)}")
    if m.initial_stack != g.start:
        bad.append(f"initial stack symbol {m.initial_stack!r} differs from start symbol {g.start!r}")
    if m.domain != g.domain:
        bad.append(f"domains differ ({m.domain.name} vs {g.domain.name})")
        return RelatedReport(tuple(bad))

    def shape_t(t):
        return (t.pop, t.label, tuple(t.push))

    def shape_p(p):
        x, rest = _split_rhs(g, p)
        return (p.lhs, x, tuple(rest))

    ts = {}
    for t in m.transitions:
        ts.setdefault(shape_t(t), []).append(t)
    ps = {}
    for p in g.productions:
        ps.setdefault(shape_p(p), []).append(p)
    for shape in sorted(set(ts) | set(ps), key=repr):
        tl, pl = ts.get(shape, []), ps.get(shape, [])
        if len(tl) != len(pl):
            bad.append(
                f"{shape[0]} -> {shape[1] or ''} {' '.join(shape[2])}: "
                f"{len(tl)} transition(s) but {len(pl)} production(s)"
            )
            continue
        wt = Counter(repr(m.weights[t.id]) for t in tl)
        wp = Counter(repr(g.weights[p.id]) for p in pl)
        if wt != wp:
            pairs = ", ".join(
                f"{t.id}={m.domain.format(m.weights[t.id])}/{p.id}={g.domain.format(g.weights[p.id])}"
                for t, p in zip(tl, pl)
            )
            bad.append(f"weights disagree: {pairs}")
    return RelatedReport(tuple(bad))
