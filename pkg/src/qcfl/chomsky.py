"""Dyck languages, alphabetic morphisms and the decomposition ``s = h(D_Y n R)``.

Decomposition goes grammar -> production language -> bracket encoding.
Composition goes back: an unambiguous Dyck grammar is made epsilon-free,
intersected with the control automaton, turned into a one-state pushdown
machine and pushed through the morphism by coding the pending input letter
into the state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from types import MappingProxyType
from typing import Any, Mapping, Optional

from ._util import as_word, fresh
from .bridge import grammar_to_pda
from .errors import PreconditionError, ValidationError
from .grammar import (
    Production,
    WeightedGrammar,
    derivation_tree,
    is_head_normal_form,
    nullable,
    to_head_normal_form,
    trim,
)
from .pushdown import Transition, WeightedPushdown, prune_dead_transitions
from .series import Monome
from .weights import WeightDomain, boolean

BAR = "~"


# -- brackets and Dyck words -------------------------------------------------------


@dataclass(frozen=True)
class BracketAlphabet:
    """Base letters ``Y`` and their barred copies, spelled ``~y``."""

    base: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        if not self.base:
            raise ValidationError("a bracket alphabet needs at least one letter")
        if len(set(self.base)) != len(self.base):
            raise ValidationError("duplicate bracket letters")
        for y in self.base:
            if y.startswith(BAR) or not y or any(c.isspace() for c in y):
                raise ValidationError(f"bad bracket letter {y!r}")

    def bar(self, y):
        if y not in self.base:
            raise ValidationError(f"{y!r} is not an opening bracket")
        return BAR + y

    def is_closer(self, s):
        return s.startswith(BAR) and s[len(BAR) :] in self.base

    def opener_of(self, s):
        return s[len(BAR) :] if self.is_closer(s) else s

    @property
    def barred(self):
        return tuple(BAR + y for y in self.base)

    @property
    def letters(self):
        return self.base + self.barred

    def __len__(self):
        return len(self.base)


def _brackets(y) -> BracketAlphabet:
    return y if isinstance(y, BracketAlphabet) else BracketAlphabet(tuple(y))


def is_dyck(word, brackets) -> bool:
    """Stack check for well-nested bracket words."""
    b = _brackets(brackets)
    base = set(b.base)
    stack = []
    for s in as_word(word):
        if s in base:
            stack.append(s)
        elif b.is_closer(s):
            if not stack or stack.pop() != b.opener_of(s):
                return False
        else:
            raise ValidationError(f"{s!r} is not a bracket letter")
    return not stack


def dyck_grammar(brackets, domain: Optional[WeightDomain] = None) -> WeightedGrammar:
    """``Z -> y Z ~y | Z Z | eps`` (ambiguous)."""
    b = _brackets(brackets)
    z = fresh("Z", set(b.letters))
    rules = [Production(f"y{k}", z, (y, z, b.bar(y))) for k, y in enumerate(b.base, 1)]
    rules += [Production("cat", z, (z, z)), Production("eps", z, ())]
    domain = domain or boolean()
    return WeightedGrammar([z], b.letters, z, rules, {p.id: domain.one for p in rules}, domain)


def dyck_grammar_unambiguous(brackets, domain: Optional[WeightDomain] = None) -> WeightedGrammar:
    """``Z -> A Z | eps`` and ``A -> y Z ~y``."""
    b = _brackets(brackets)
    taken = set(b.letters)
    z = fresh("Z", taken)
    a = fresh("A", taken | {z})
    rules = [Production("cons", z, (a, z)), Production("eps", z, ())]
    rules += [Production(f"y{k}", a, (y, z, b.bar(y))) for k, y in enumerate(b.base, 1)]
    domain = domain or boolean()
    return WeightedGrammar([z, a], b.letters, z, rules, {p.id: domain.one for p in rules}, domain)


# -- alphabetic morphisms ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AlphabeticMorphism:
    """Letter-to-monome map ``delta -> a.y`` with ``|y| <= 1``."""

    source: tuple
    target: tuple
    domain: WeightDomain
    images: Mapping[str, Monome] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        images = {}
        for k, v in dict(self.images).items():
            if not isinstance(v, Monome):
                v = Monome(*v)
            images[k] = Monome(v.weight, as_word(v.word))
        object.__setattr__(self, "images", MappingProxyType(images))
        missing = [d for d in self.source if d not in images]
        if missing:
            raise ValidationError(f"morphism undefined on {missing}")
        extra = set(images) - set(self.source)
        if extra:
            raise ValidationError(f"morphism defined outside its source alphabet: {sorted(extra)}")
        sigma = set(self.target)
        for d, m in images.items():
            self.domain.check(m.weight)
            if len(m.word) > 1:
                raise ValidationError(f"image of {d!r} is longer than one letter")
            if m.word and m.word[0] not in sigma:
                raise ValidationError(f"image of {d!r} uses {m.word[0]!r}, which is not in the target alphabet")

    def __call__(self, v) -> Monome:
        return apply_morphism_word(self, v)


def apply_morphism_word(h: AlphabeticMorphism, v) -> Monome:
    weights, word = [], ()
    for d in as_word(v):
        if d not in h.images:
            raise ValidationError(f"{d!r} is not in the source alphabet of the morphism")
        m = h.images[d]
        weights.append(m.weight)
        word += m.word
    return Monome(h.domain.val_op(tuple(weights)), word)


# -- finite automata -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DFA:
    states: tuple
    alphabet: tuple
    initial: str
    accepting: frozenset
    delta: Mapping[tuple, str]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "delta", MappingProxyType(dict(self.delta)))
        qs = set(self.states)
        if self.initial not in qs:
            raise ValidationError(f"initial state {self.initial!r} is not declared")
        if not self.accepting <= qs:
            raise ValidationError(f"undeclared accepting states {sorted(self.accepting - qs)}")
        for (q, a), p in self.delta.items():
            if q not in qs or p not in qs:
                raise ValidationError(f"edge {q} -{a}-> {p} uses an undeclared state")
            if a not in self.alphabet:
                raise ValidationError(f"edge {q} -{a}-> {p} uses an unknown letter")
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in self.delta:
                    raise ValidationError(f"automaton is not complete: no edge from {q} on {a}")

    def run(self, word):
        q = self.initial
        for a in as_word(word):
            q = self.delta[(q, a)]
        return q

    def accepts(self, word) -> bool:
        return self.run(word) in self.accepting

    def edges(self):
        return [(q, a, p) for (q, a), p in self.delta.items()]


def make_dfa(states, alphabet, initial, accepting, edges, *, sink="sink") -> DFA:
    """Build a complete DFA from an edge list; missing edges go to a fresh sink.

    Two edges leaving the same state on the same letter to different targets
    make the automaton nondeterministic, which is rejected.
    """
    states = list(dict.fromkeys(states))
    delta = {}
    for q, a, p in edges:
        if (q, a) in delta and delta[(q, a)] != p:
            raise ValidationError(f"nondeterministic automaton: {q} has two edges on {a!r}")
        delta[(q, a)] = p
    missing = [(q, a) for q in states for a in alphabet if (q, a) not in delta]
    if missing:
        s = fresh(sink, set(states))
        states.append(s)
        for a in alphabet:
            delta[(s, a)] = s
        for key in missing:
            delta[key] = s
    return DFA(states, alphabet, initial, accepting, delta)


# -- grammar to production language ------------------------------------------------------


def production_grammar(g: WeightedGrammar):
    """Return ``(G', h)``: ``G'`` derives the production words of the head
    normal form of ``g`` (one letter per production, so it is unambiguous) and
    ``h(rho) = wt(rho).x`` maps them back."""
    if g.domain.one is None:
        raise PreconditionError("the domain needs a unit")
    hnf = g if is_head_normal_form(g) else to_head_normal_form(g)
    nts = hnf._nts
    # production ids become terminals; keep them apart from nonterminals
    taken = set(hnf.nonterminals)
    letter = {}
    for p in hnf.productions:
        letter[p.id] = fresh(p.id, taken)
        taken.add(letter[p.id])
    prods, images = [], {}
    for p in hnf.productions:
        rest = p.rhs[1:] if p.rhs and p.rhs[0] not in nts else p.rhs
        x = p.rhs[:1] if p.rhs and p.rhs[0] not in nts else ()
        prods.append(Production(p.id, p.lhs, (letter[p.id], *rest)))
        images[letter[p.id]] = Monome(hnf.weights[p.id], x)
    delta = [letter[p.id] for p in hnf.productions]
    b = boolean()
    gp = WeightedGrammar(hnf.nonterminals, delta, hnf.start, prods, {p.id: b.one for p in prods}, b)
    h = AlphabeticMorphism(delta, hnf.terminals, g.domain, images)
    return gp, h


# -- classical encoding ----------------------------------------------------------------


def _slots(g: WeightedGrammar, p: Production):
    return [s for s in p.rhs if s in g._nts]


def _bracket(pid, i):
    return f"{pid}/{i}"


def cs_encode_classical(g: WeightedGrammar):
    """Slot-bracket encoding of a head-normal-form grammar.

    Returns ``(brackets, dfa, letter_map)`` with ``letter_map`` sending each
    bracket letter to a terminal of ``g`` or ``None``.
    """
    if not is_head_normal_form(g):
        raise PreconditionError("cs_encode_classical expects a head-normal-form grammar")
    nts = g._nts
    base, info = [], {}
    for p in g.productions:
        k = len(_slots(g, p))
        for i in range(1, max(k, 1) + 1):
            y = _bracket(p.id, i)
            base.append(y)
            info[y] = (p, i, k)
    b = BracketAlphabet(tuple(base))
    letters = b.letters
    start = fresh("start", set(letters))
    edges = []
    firsts = {a: [_bracket(p.id, 1) for p in g.productions if p.lhs == a] for a in g.nonterminals}
    for y in firsts[g.start]:
        edges.append((start, y, y))
    closers = b.barred
    for y, (p, i, k) in info.items():
        if k >= 1:
            child = _slots(g, p)[i - 1]
            edges += [(y, z, z) for z in firsts[child]]
        else:
            edges.append((y, b.bar(y), b.bar(y)))
        c = b.bar(y)
        if i < max(k, 1):
            nxt = _bracket(p.id, i + 1)
            edges.append((c, nxt, nxt))
        else:
            edges += [(c, z, z) for z in closers]
    accepting = {b.bar(_bracket(p.id, max(len(_slots(g, p)), 1))) for p in g.productions if p.lhs == g.start}
    dfa = make_dfa([start, *letters], letters, start, accepting, edges, sink=fresh("sink", set(letters) | {start}))
    letter_map = {}
    for y, (p, i, k) in info.items():
        head = p.rhs[0] if i == 1 and p.rhs and p.rhs[0] not in nts else None
        letter_map[y] = head
        letter_map[b.bar(y)] = None
    return b, dfa, letter_map


def encode_derivation(g: WeightedGrammar, d) -> tuple:
    """Bracket word of a derivation of the head-normal-form grammar ``g``."""
    root = derivation_tree(g, d)
    out = []

    def enc(node):
        p = g.production(node.production)
        if not node.children:
            y = _bracket(p.id, 1)
            out.extend((y, BAR + y))
            return
        for i, child in enumerate(node.children, 1):
            y = _bracket(p.id, i)
            out.append(y)
            enc(child)
            out.append(BAR + y)

    enc(root)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class CSDecomposition:
    brackets: BracketAlphabet
    control: DFA
    morphism: AlphabeticMorphism

    def __post_init__(self):
        if set(self.control.alphabet) != set(self.brackets.letters):
            raise ValidationError("control automaton alphabet differs from the bracket letters")
        if set(self.morphism.source) != set(self.brackets.letters):
            raise ValidationError("morphism source differs from the bracket letters")


def decompose(g: WeightedGrammar) -> CSDecomposition:
    """Brackets, control language and morphism with ``||g|| = h(D_Y n R)``."""
    gp, h = production_grammar(g)
    b, dfa, gmap = cs_encode_classical(gp)
    one = g.domain.one
    images = {}
    for s in b.letters:
        rho = gmap[s]
        images[s] = h.images[rho] if rho is not None else Monome(one, ())
    return CSDecomposition(b, dfa, AlphabeticMorphism(b.letters, h.target, g.domain, images))


def _live_states(dfa: DFA) -> set:
    """States from which an accepting state is reachable."""
    live = set(dfa.accepting)
    grew = True
    while grew:
        grew = False
        for (src, _), dst in dfa.delta.items():
            if dst in live and src not in live:
                live.add(src)
                grew = True
    return live


def count_preimages(dec: CSDecomposition, w, max_len: int, memo: Optional[dict] = None) -> int:
    """Number of words of ``D_Y n R`` with length <= max_len whose morphic image
    word is ``w``.

    Counts Dyck words as sequences of blocks ``y u ~y`` with a table indexed by
    automaton state, remaining input and length, so long runs of letters with
    empty images cost nothing extra.  Passing the same ``memo`` dict to calls on
    one decomposition shares work between words with common suffixes.
    """
    w = as_word(w)
    b, dfa, h = dec.brackets, dec.control, dec.morphism
    if memo is None:
        memo = {}
    dyck_memo = memo.setdefault("dyck", {})
    block_memo = memo.setdefault("block", {})
    live = _live_states(dfa)
    openers = {p: [y for y in b.base if dfa.delta[(p, y)] in live] for p in live}

    def consume(s, rest):
        y = h.images[s].word
        if not y:
            return 0
        if rest and rest[0] == y[0]:
            return 1
        return None

    def dyck(p, rest, length):
        # Counter of (q, letters consumed) over Dyck words of exactly this length
        key = (p, rest, length)
        if key in dyck_memo:
            return dyck_memo[key]
        out = {}
        if length == 0:
            out[(p, 0)] = 1
        for first in range(2, length + 1, 2):
            for (r, k), c in block(p, rest, first).items():
                for (q, j), c2 in dyck(r, rest[k:], length - first).items():
                    out[(q, k + j)] = out.get((q, k + j), 0) + c * c2
        dyck_memo[key] = out
        return out

    def block(p, rest, length):
        key = (p, rest, length)
        if key in block_memo:
            return block_memo[key]
        out = {}
        for y in openers.get(p, ()):
            i1 = consume(y, rest)
            if i1 is None:
                continue
            p1 = dfa.delta[(p, y)]
            closer = b.bar(y)
            for (q1, j1), c in dyck(p1, rest[i1:], length - 2).items():
                j = consume(closer, rest[i1 + j1 :])
                if j is None:
                    continue
                q = dfa.delta[(q1, closer)]
                if q not in live:
                    continue
                key2 = (q, i1 + j1 + j)
                out[key2] = out.get(key2, 0) + c
        block_memo[key] = out
        return out

    total = 0
    for length in range(0, max_len + 1, 2):
        for (q, j), c in dyck(dfa.initial, w, length).items():
            if j == len(w) and q in dfa.accepting:
                total += c
    return total


def preimages_up_to(dec: CSDecomposition, w, max_len: int) -> list:
    """The words counted by :func:`count_preimages`, by direct search.

    Exponential in ``max_len``; meant for small cases.
    """
    w = as_word(w)
    b, dfa, h = dec.brackets, dec.control, dec.morphism
    base = set(b.base)
    live = _live_states(dfa)
    out = []
    acc = []

    def go(q, stack, produced):
        if q not in live:
            return
        if not stack and produced == len(w) and q in dfa.accepting:
            out.append(tuple(acc))
        for s in b.letters:
            if s in base:
                if len(acc) + len(stack) + 2 > max_len:
                    continue
                new_stack = stack + (s,)
            else:
                if not stack or stack[-1] != s[len(BAR) :]:
                    continue
                new_stack = stack[:-1]
            y = h.images[s].word
            if y and (produced >= len(w) or w[produced] != y[0]):
                continue
            acc.append(s)
            go(dfa.delta[(q, s)], new_stack, produced + len(y))
            acc.pop()

    go(dfa.initial, (), 0)
    return sorted(out, key=lambda v: (len(v), v))


# -- composition -----------------------------------------------------------------------------


def eps_eliminate_unambiguous(g: WeightedGrammar) -> WeightedGrammar:
    """Grammar for ``L(g) \\ {eps}`` without epsilon productions.

    Every production is copied once per way of dropping nullable occurrences;
    for an unambiguous input each nullable nonterminal has a single empty
    derivation, so no word gains a second derivation.  The result is a
    language-level grammar over the boolean domain.
    """
    g = trim(g)
    null = nullable(g)
    b = boolean()
    prods = []
    ids = {p.id for p in g.productions}
    for p in g.productions:
        spots = [k for k, s in enumerate(p.rhs) if s in null]
        variant = 0
        for drop in product((False, True), repeat=len(spots)):
            gone = {k for k, d in zip(spots, drop) if d}
            rhs = tuple(s for k, s in enumerate(p.rhs) if k not in gone)
            if not rhs or rhs == (p.lhs,):
                continue
            if variant == 0:
                pid = p.id
            else:
                pid = fresh(f"{p.id}:{variant}", ids)
                ids.add(pid)
            variant += 1
            prods.append(Production(pid, p.lhs, rhs))
    out = WeightedGrammar(g.nonterminals, g.terminals, g.start, prods, {p.id: b.one for p in prods}, b)
    return trim(out)


def regular_intersect_unambiguous(g: WeightedGrammar, dfa: DFA, contains_empty: bool = False) -> WeightedGrammar:
    """Triple construction for ``L(g) n L(dfa)``; ``g`` must be epsilon-free.

    ``contains_empty`` says whether the empty word belonged to the language
    before epsilon elimination; it is re-added through a fresh start symbol when
    the automaton accepts it too.
    """
    if any(not p.rhs for p in g.productions):
        raise PreconditionError("regular_intersect_unambiguous expects an epsilon-free grammar")
    missing = set(g.terminals) - set(dfa.alphabet)
    if missing:
        raise ValidationError(f"automaton alphabet lacks {sorted(missing)}")
    nts = g._nts
    index = {}  # (p0, A) -> {q} with A deriving a word that leads p0 to q
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            for p0 in dfa.states:
                cur = {p0}
                for s in p.rhs:
                    if s in nts:
                        cur = {q for r in cur for q in index.get((r, s), ())}
                    else:
                        cur = {dfa.delta[(r, s)] for r in cur}
                    if not cur:
                        break
                have = index.setdefault((p0, p.lhs), set())
                if not cur <= have:
                    have |= cur
                    changed = True
    live = {(p0, a, q) for (p0, a), qs in index.items() for q in qs}
    taken = set(g.terminals)
    names = {}

    def nt(triple):
        if triple not in names:
            names[triple] = fresh("(" + ";".join(triple) + ")", taken)
            taken.add(names[triple])
        return names[triple]

    prods, ids = [], set()
    for p0, a, qk in sorted(live):
        for p in g.by_lhs(a):
            for path in _paths(p.rhs, p0, qk, nts, dfa, index):
                syms = []
                for k, s in enumerate(p.rhs):
                    syms.append(nt((path[k], s, path[k + 1])) if s in nts else s)
                pid = fresh(f"{p.id}[{';'.join(path)}]", ids)
                ids.add(pid)
                prods.append(Production(pid, nt((p0, a, qk)), tuple(syms)))
    start = fresh("S", taken | set(names.values()))
    for f in sorted(dfa.accepting):
        t = (dfa.initial, g.start, f)
        if t in live:
            prods.append(Production(fresh(f"start[{f}]", ids), start, (nt(t),)))
            ids.add(prods[-1].id)
    if contains_empty and dfa.initial in dfa.accepting:
        prods.append(Production(fresh("start[eps]", ids), start, ()))
    b = boolean()
    out = WeightedGrammar(
        [start, *names.values()], g.terminals, start, prods, {p.id: b.one for p in prods}, b
    )
    return trim(out)


def _paths(rhs, p0, qk, nts, dfa, index):
    out = []

    def go(k, q, acc):
        if k == len(rhs):
            if q == qk:
                out.append(tuple(acc))
            return
        s = rhs[k]
        nexts = sorted(index.get((q, s), ())) if s in nts else [dfa.delta[(q, s)]]
        for r in nexts:
            acc.append(r)
            go(k + 1, r, acc)
            acc.pop()

    go(0, p0, [p0])
    return out


def morphism_pda(base: WeightedPushdown, h: AlphabeticMorphism, base_unambiguous: bool) -> WeightedPushdown:
    """Machine over the target alphabet with series ``h(L(base))``.

    States ``(q, x)`` record the letter ``x`` (or eps) that the next base
    transition reads; acceptance ends in ``(f, d)`` for a fixed letter ``d``.
    """
    d = h.domain
    if not (d.complete and d.completely_idempotent) and not base_unambiguous:
        raise PreconditionError(
            f"{d.name} is not complete and completely idempotent, so the base machine must be unambiguous"
        )
    if set(base.alphabet) - set(h.source):
        raise ValidationError("the morphism is undefined on part of the machine's alphabet")
    if not h.source:
        raise ValidationError("the morphism has an empty source alphabet")
    letters = list(h.source)
    choices = [*letters, None]
    fixed = min(letters)
    taken = set()
    names = {}

    def st(q, x):
        key = (q, x)
        if key not in names:
            names[key] = fresh(f"{q}/{'eps' if x is None else x}", taken)
            taken.add(names[key])
        return names[key]

    for q in base.states:
        for x in choices:
            st(q, x)
    q0 = fresh(f"{base.initial}'", taken)
    one = d.one
    ts, weights = [], {}
    for x in choices:
        tid = f"init/{'eps' if x is None else x}"
        ts.append(Transition(tid, q0, None, base.initial_stack, st(base.initial, x), (base.initial_stack,)))
        weights[tid] = one
    for t in base.transitions:
        if t.label is None:
            y, a = None, one
        else:
            img = h.images[t.label]
            y, a = (img.word[0] if img.word else None), img.weight
        for x in choices:
            tid = f"{t.id}/{'eps' if x is None else x}"
            ts.append(Transition(tid, st(t.source, t.label), y, t.pop, st(t.target, x), t.push))
            weights[tid] = a
    states = [q0, *names.values()]
    finals = [st(f, fixed) for f in base.finals]
    return WeightedPushdown(states, base.stack, q0, base.initial_stack, finals, ts, weights, d, h.target)


def compose(dec: CSDecomposition) -> WeightedPushdown:
    """Machine for ``h(D_Y n R)``."""
    dyck = dyck_grammar_unambiguous(dec.brackets)
    free = eps_eliminate_unambiguous(dyck)
    inter = regular_intersect_unambiguous(free, dec.control, contains_empty=True)
    base = grammar_to_pda(inter)
    base = WeightedPushdown(
        base.states, base.stack, base.initial, base.initial_stack, base.finals, base.transitions,
        base.weights, base.domain, dec.brackets.letters,
    )
    return prune_dead_transitions(morphism_pda(base, dec.morphism, base_unambiguous=True))
