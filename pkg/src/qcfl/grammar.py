"""Weighted context-free grammars with leftmost-derivation semantics.

The weight of a derivation is the valuation of its production weights, in
leftmost order; the value of a word sums the weights of all its derivations.

Derivations are enumerated exactly.  A span table records which symbols
derive which factors of the word, so the search only follows realizable
choices.  Because every followed choice is realizable, revisiting a
``(nonterminal, span)`` pair that is still being expanded proves that the word
has infinitely many derivations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from types import MappingProxyType
from typing import Any, Mapping, Optional

from ._util import as_word, fresh, words_up_to
from .errors import BudgetError, DivergenceError, PreconditionError, ValidationError
from .series import Series
from .weights import WeightDomain, boolean

DEFAULT_CAP = 100_000


@dataclass(frozen=True)
class Production:
    id: str
    lhs: str
    rhs: tuple = ()

    def __str__(self):
        return f"{self.id}: {self.lhs} -> {' '.join(self.rhs)}".rstrip()


@dataclass(frozen=True, eq=False)
class WeightedGrammar:
    nonterminals: tuple
    terminals: tuple
    start: str
    productions: tuple
    weights: Mapping[str, Any]
    domain: WeightDomain = field(default_factory=boolean)

    def __post_init__(self):
        object.__setattr__(self, "nonterminals", tuple(self.nonterminals))
        object.__setattr__(self, "terminals", tuple(self.terminals))
        object.__setattr__(self, "productions", tuple(self.productions))
        object.__setattr__(self, "weights", MappingProxyType(dict(self.weights)))
        nts, ts = set(self.nonterminals), set(self.terminals)
        if nts & ts:
            raise ValidationError(f"symbols are both terminal and nonterminal: {sorted(nts & ts)}")
        if self.start not in nts:
            raise ValidationError(f"start symbol {self.start!r} is not a nonterminal")
        seen = set()
        for p in self.productions:
            if p.id in seen:
                raise ValidationError(f"duplicate production id {p.id!r}")
            seen.add(p.id)
            if p.lhs not in nts:
                raise ValidationError(f"production {p.id}: lhs {p.lhs!r} is not a nonterminal")
            for s in p.rhs:
                if s not in nts and s not in ts:
                    raise ValidationError(f"production {p.id}: unknown symbol {s!r}")
            if p.id not in self.weights:
                raise ValidationError(f"production {p.id} has no weight")
            self.domain.check(self.weights[p.id])
        extra = set(self.weights) - seen
        if extra:
            raise ValidationError(f"weights for unknown productions: {sorted(extra)}")
        object.__setattr__(self, "_index", {p.id: i for i, p in enumerate(self.productions)})

    def production(self, pid) -> Production:
        try:
            return self.productions[self._index[pid]]
        except KeyError:
            raise ValidationError(f"unknown production {pid!r}") from None

    def weight(self, pid):
        return self.weights[pid]

    def by_lhs(self, a):
        return [p for p in self.productions if p.lhs == a]

    def is_nonterminal(self, s):
        return s in self._nts

    @property
    def _nts(self):
        return frozenset(self.nonterminals)

    def series(self, cap=DEFAULT_CAP) -> Series:
        return Series(
            self.domain,
            lambda w: evaluate(self, w, cap),
            "grammar",
            lambda n: evaluate_up_to(self, n, cap),
        )

    def __repr__(self):
        return (
            f"WeightedGrammar(start={self.start!r}, |N|={len(self.nonterminals)}, "
            f"|P|={len(self.productions)}, domain={self.domain.name})"
        )


@dataclass(frozen=True)
class Derivation:
    productions: tuple
    word: tuple

    def __len__(self):
        return len(self.productions)


def make_grammar(rules, start=None, *, domain=None, terminals=None, nonterminals=None) -> WeightedGrammar:
    """Build a grammar from ``(lhs, rhs)`` or ``(lhs, rhs, weight)`` triples.

    ``rhs`` may be a sequence of symbols or a whitespace-separated string.
    Production ids are ``p1, p2, ...`` in rule order; missing weights default
    to the domain's unit.  Symbols never used as a left-hand side are terminals
    unless listed in ``nonterminals``.
    """
    domain = domain or boolean()
    prods, weights = [], {}
    for k, rule in enumerate(rules, 1):
        lhs, rhs = rule[0], rule[1]
        if isinstance(rhs, str):
            rhs = rhs.split()
        pid = f"p{k}"
        prods.append(Production(pid, lhs, tuple(rhs)))
        weights[pid] = rule[2] if len(rule) > 2 else domain.one
    nts = list(dict.fromkeys([*(nonterminals or ()), *(p.lhs for p in prods)]))
    if terminals is None:
        terminals = [s for p in prods for s in p.rhs if s not in nts]
    terminals = list(dict.fromkeys(terminals))
    return WeightedGrammar(nts, terminals, start or prods[0].lhs, prods, weights, domain)


def reweight(g: WeightedGrammar, domain: WeightDomain, weights) -> WeightedGrammar:
    """Copy ``g`` into another domain; ``weights`` maps ids (or is a callable on productions)."""
    if callable(weights):
        weights = {p.id: weights(p) for p in g.productions}
    return WeightedGrammar(g.nonterminals, g.terminals, g.start, g.productions, weights, domain)


# -- static analyses -----------------------------------------------------------


def nullable(g: WeightedGrammar) -> set:
    out = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs not in out and all(s in out for s in p.rhs):
                out.add(p.lhs)
                changed = True
    return out


def productive(g: WeightedGrammar) -> set:
    ts = set(g.terminals)
    out = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs not in out and all(s in out or s in ts for s in p.rhs):
                out.add(p.lhs)
                changed = True
    return out


def useful(g: WeightedGrammar) -> set:
    """Nonterminals that are reachable from the start through productive productions."""
    prod = productive(g)
    ts = set(g.terminals)
    if g.start not in prod:
        return set()
    seen = {g.start}
    stack = [g.start]
    while stack:
        a = stack.pop()
        for p in g.by_lhs(a):
            if all(s in prod or s in ts for s in p.rhs):
                for s in p.rhs:
                    if s in prod and s not in seen:
                        seen.add(s)
                        stack.append(s)
    return seen


def is_empty(g: WeightedGrammar) -> bool:
    return g.start not in productive(g)


def is_proper(g: WeightedGrammar) -> bool:
    nts = set(g.nonterminals)
    return all(p.rhs and not (len(p.rhs) == 1 and p.rhs[0] in nts) for p in g.productions)


def finite_derivations_check(g: WeightedGrammar) -> Optional[list]:
    """Return ``None`` if every word has finitely many derivations, else a cycle
    ``[A, B, ..., A]`` with ``A`` deriving a sentential form ``alpha B beta``
    whose ``alpha`` and ``beta`` are nullable, around to ``A`` again."""
    null = nullable(g)
    live = useful(g)
    prod = productive(g)
    ts = set(g.terminals)
    edges = {a: [] for a in live}
    for p in g.productions:
        if p.lhs not in live or not all(s in prod or s in ts for s in p.rhs):
            continue
        for k, s in enumerate(p.rhs):
            if s in live and all(x in null for x in p.rhs[:k]) and all(x in null for x in p.rhs[k + 1 :]):
                if s not in edges[p.lhs]:
                    edges[p.lhs].append(s)
    color = {}
    path = []

    def visit(a):
        color[a] = 1
        path.append(a)
        for b in edges[a]:
            if color.get(b) == 1:
                return path[path.index(b) :] + [b]
            if b not in color:
                found = visit(b)
                if found:
                    return found
        path.pop()
        color[a] = 2
        return None

    for a in [n for n in g.nonterminals if n in live]:
        if a not in color:
            cycle = visit(a)
            if cycle:
                return cycle
    return None


# -- derivation relation --------------------------------------------------------


def leftmost_step(g: WeightedGrammar, form, pid) -> tuple:
    form = tuple(form)
    p = g.production(pid)
    nts = g._nts
    for k, s in enumerate(form):
        if s in nts:
            if s != p.lhs:
                raise ValidationError(f"production {pid} rewrites {p.lhs}, but the leftmost nonterminal is {s}")
            return form[:k] + p.rhs + form[k + 1 :]
    raise ValidationError("the sentential form contains no nonterminal")


def replay(g: WeightedGrammar, productions, start=None) -> tuple:
    form = (start or g.start,)
    for pid in productions:
        form = leftmost_step(g, form, pid)
    if any(s in g._nts for s in form):
        raise ValidationError("derivation is incomplete")
    return form


def derivation_weight(g: WeightedGrammar, d) -> Any:
    pids = d.productions if isinstance(d, Derivation) else tuple(d)
    for pid in pids:
        g.production(pid)
    return g.domain.val_op(tuple(g.weights[pid] for pid in pids))


@dataclass
class DerivationNode:
    production: str
    children: list
    start: int = 0
    end: int = 0


def derivation_tree(g: WeightedGrammar, d) -> DerivationNode:
    """Rebuild the tree of a leftmost derivation.  ``start``/``end`` are the
    node's positions in the production sequence, so every subtree owns the
    contiguous slice ``d[start:end]``."""
    pids = d.productions if isinstance(d, Derivation) else tuple(d)
    nts = g._nts
    pos = 0

    def build(expected):
        nonlocal pos
        if pos >= len(pids):
            raise ValidationError("derivation ends too early")
        p = g.production(pids[pos])
        if p.lhs != expected:
            raise ValidationError(f"production {p.id} does not rewrite {expected}")
        node = DerivationNode(p.id, [], pos)
        pos += 1
        for s in p.rhs:
            if s in nts:
                node.children.append(build(s))
        node.end = pos
        return node

    root = build(g.start)
    if pos != len(pids):
        raise ValidationError("derivation has trailing productions")
    return root


# -- enumeration ---------------------------------------------------------------


class _Chart:
    """Span table for one word: ``ends[(A, i)]`` is the set of ``j`` with
    ``A =>* w[i:j]``."""

    def __init__(self, g: WeightedGrammar, w: tuple):
        self.g = g
        self.w = w
        self.n = len(w)
        self.nts = g._nts
        self.ends = {(a, i): set() for a in g.nonterminals for i in range(self.n + 1)}
        changed = True
        while changed:
            changed = False
            for p in g.productions:
                for i in range(self.n + 1):
                    new = self.seq_ends(p.rhs, i) - self.ends[(p.lhs, i)]
                    if new:
                        self.ends[(p.lhs, i)] |= new
                        changed = True
        self._suffix = {}

    def seq_ends(self, symbols, i):
        cur = {i}
        for s in symbols:
            nxt = set()
            if s in self.nts:
                for j in cur:
                    nxt |= self.ends[(s, j)]
            else:
                for j in cur:
                    if j < self.n and self.w[j] == s:
                        nxt.add(j + 1)
            cur = nxt
            if not cur:
                break
        return cur

    def can_finish(self, symbols, k, i, j):
        key = (symbols, k, i, j)
        hit = self._suffix.get(key)
        if hit is None:
            hit = j in self.seq_ends(symbols[k:], i)
            self._suffix[key] = hit
        return hit

    def splits(self, rhs, i, j):
        """Yield the spans ``[(B, a, b), ...]`` of the nonterminals of ``rhs``
        for every way ``rhs`` derives ``w[i:j]``."""
        out = []

        def go(k, pos, acc):
            if k == len(rhs):
                if pos == j:
                    out.append(list(acc))
                return
            s = rhs[k]
            if s in self.nts:
                for e in sorted(self.ends[(s, pos)]):
                    if e <= j and self.can_finish(rhs, k + 1, e, j):
                        acc.append((s, pos, e))
                        go(k + 1, e, acc)
                        acc.pop()
            elif pos < self.n and self.w[pos] == s:
                go(k + 1, pos + 1, acc)

        go(0, i, [])
        return out


def _combine(parts, cap, head):
    out = []
    for combo in product(*parts):
        seq = head
        for c in combo:
            seq = seq + c
        out.append(seq)
        if len(out) > cap:
            raise BudgetError(f"more than {cap} derivations")
    return out


def _derivation_indices(g: WeightedGrammar, w: tuple, cap: int):
    chart = _Chart(g, w)
    if chart.n not in chart.ends[(g.start, 0)]:
        return []
    index = g._index
    memo = {}
    active = []

    def derive(a, i, j):
        key = (a, i, j)
        if key in memo:
            return memo[key]
        if key in active:
            cycle = [k[0] for k in active[active.index(key) :]] + [a]
            raise DivergenceError(
                f"{''.join(w) if all(len(s) == 1 for s in w) else w!r} has infinitely many derivations "
                f"(cycle {' > '.join(cycle)})",
                cycle,
            )
        active.append(key)
        out = []
        for p in g.by_lhs(a):
            for spans in chart.splits(p.rhs, i, j):
                parts = [derive(b, s, e) for b, s, e in spans]
                out.extend(_combine(parts, cap, (index[p.id],)))
                if len(out) > cap:
                    raise BudgetError(f"more than {cap} derivations", finite_derivations_check(g))
        active.pop()
        memo[key] = out
        return out

    return sorted(derive(g.start, 0, chart.n))


def enumerate_derivations(g: WeightedGrammar, w, cap: int = DEFAULT_CAP) -> list:
    """All leftmost derivations of ``w`` in leftmost depth-first order
    (productions tried in declaration order).

    Raises :class:`DivergenceError` when ``w`` has infinitely many derivations
    and :class:`BudgetError` when it has more than ``cap``.
    """
    w = as_word(w)
    prods = g.productions
    return [Derivation(tuple(prods[k].id for k in seq), w) for seq in _derivation_indices(g, w, cap)]


def count_derivations(g: WeightedGrammar, w, cap: int = DEFAULT_CAP) -> int:
    return len(_derivation_indices(g, as_word(w), cap))


def evaluate(g: WeightedGrammar, w, cap: int = DEFAULT_CAP) -> Any:
    d = g.domain
    weights = [g.weights[p.id] for p in g.productions]
    total = d.zero
    for seq in _derivation_indices(g, as_word(w), cap):
        total = d.add_op(total, d.val_op(tuple(weights[k] for k in seq)))
    return total


def recognizes(g: WeightedGrammar, w) -> bool:
    """Plain membership ``w in L(G)``; also fine for grammars with infinitely
    many derivations."""
    w = as_word(w)
    chart = _Chart(g, w)
    return chart.n in chart.ends[(g.start, 0)]


def derivations_up_to(g: WeightedGrammar, n: int, cap: int = DEFAULT_CAP) -> dict:
    """Map every word of length <= n in ``L(G)`` to its derivations (as tuples
    of production indices, unsorted)."""
    nts = g._nts
    # lengths[A] = lengths <= n of words derivable from A
    lengths = {a: set() for a in g.nonterminals}

    def seq_lengths(symbols, start=0):
        cur = {start}
        for s in symbols:
            if s in nts:
                cur = {x + y for x in cur for y in lengths[s] if x + y <= n}
            else:
                cur = {x + 1 for x in cur if x + 1 <= n}
            if not cur:
                break
        return cur

    changed = True
    while changed:
        changed = False
        for p in g.productions:
            new = seq_lengths(p.rhs) - lengths[p.lhs]
            if new:
                lengths[p.lhs] |= new
                changed = True

    index = g._index
    memo = {}
    active = []
    suffix = {}

    def fits(rhs, k, rest):
        key = (rhs, k, rest)
        if key not in suffix:
            suffix[key] = rest in seq_lengths(rhs[k:])
        return suffix[key]

    def gen(a, length):
        key = (a, length)
        if key in memo:
            return memo[key]
        if key in active:
            cycle = [k[0] for k in active[active.index(key) :]] + [a]
            raise DivergenceError(f"infinitely many derivations (cycle {' > '.join(cycle)})", cycle)
        active.append(key)
        out = []
        for p in g.by_lhs(a):
            rhs = p.rhs
            plans = []

            def plan(k, used, acc):
                if k == len(rhs):
                    if used == length:
                        plans.append(list(acc))
                    return
                s = rhs[k]
                if s in nts:
                    for ell in sorted(lengths[s]):
                        if used + ell <= length and fits(rhs, k + 1, length - used - ell):
                            acc.append((s, ell))
                            plan(k + 1, used + ell, acc)
                            acc.pop()
                elif used + 1 <= length:
                    acc.append((s, None))
                    plan(k + 1, used + 1, acc)
                    acc.pop()

            plan(0, 0, [])
            for steps in plans:
                parts = []
                for s, ell in steps:
                    if ell is None:
                        parts.append([((s,), ())])
                    else:
                        parts.append(gen(s, ell))
                for combo in product(*parts):
                    word = ()
                    seq = (index[p.id],)
                    for cw, cs in combo:
                        word += cw
                        seq += cs
                    out.append((word, seq))
                if len(out) > cap:
                    raise BudgetError(f"more than {cap} derivations", finite_derivations_check(g))
        active.pop()
        memo[key] = out
        return out

    table = {}
    for length in sorted(lengths[g.start]):
        for word, seq in gen(g.start, length):
            table.setdefault(word, []).append(seq)
    return table


def evaluate_up_to(g: WeightedGrammar, n: int, cap: int = DEFAULT_CAP) -> dict:
    d = g.domain
    weights = [g.weights[p.id] for p in g.productions]
    out = {}
    for word, seqs in derivations_up_to(g, n, cap).items():
        total = d.zero
        for seq in seqs:
            total = d.add_op(total, d.val_op(tuple(weights[k] for k in seq)))
        out[word] = total
    return out


def unambiguity_probe(g: WeightedGrammar, n: int, cap: int = DEFAULT_CAP) -> Optional[tuple]:
    """Return the shortlex-first word of length <= n with two or more
    derivations, or ``None`` if there is none."""
    table = derivations_up_to(g, n, cap)
    witnesses = [w for w, seqs in table.items() if len(seqs) >= 2]
    if not witnesses:
        return None
    return min(witnesses, key=lambda w: (len(w), w))


# -- head normal form -----------------------------------------------------------


def is_head_normal_form(g: WeightedGrammar) -> bool:
    nts = g._nts
    return all(all(s in nts for s in p.rhs[1:]) for p in g.productions)


def to_head_normal_form(g: WeightedGrammar) -> WeightedGrammar:
    """Every production becomes ``A -> x B1 ... Bk`` with ``x`` a terminal or empty.

    Terminals after the first rhs position are replaced by fresh nonterminals
    ``A@s`` with unit-weight productions ``A@s -> s``.  Only the helpers that
    are needed are added.
    """
    if g.domain.one is None:
        raise PreconditionError("head normal form needs a domain with a unit")
    nts = g._nts
    taken = set(g.nonterminals) | set(g.terminals)
    helper = {}
    new_prods, weights = [], {}
    for p in g.productions:
        rhs = list(p.rhs[:1])
        for s in p.rhs[1:]:
            if s in nts:
                rhs.append(s)
            else:
                if s not in helper:
                    helper[s] = fresh(f"A@{s}", taken)
                    taken.add(helper[s])
                rhs.append(helper[s])
        new_prods.append(Production(p.id, p.lhs, tuple(rhs)))
        weights[p.id] = g.weights[p.id]
    ids = {p.id for p in g.productions}
    for s, a in helper.items():
        pid = fresh(a, ids)
        ids.add(pid)
        new_prods.append(Production(pid, a, (s,)))
        weights[pid] = g.domain.one
    return WeightedGrammar(
        [*g.nonterminals, *helper.values()], g.terminals, g.start, new_prods, weights, g.domain
    )


def trim(g: WeightedGrammar) -> WeightedGrammar:
    """Drop productions that cannot occur in any complete derivation from the start."""
    live = useful(g)
    if not live:
        return WeightedGrammar([g.start], g.terminals, g.start, [], {}, g.domain)
    ts = set(g.terminals)
    prods = [p for p in g.productions if p.lhs in live and all(s in live or s in ts for s in p.rhs)]
    nts = [a for a in g.nonterminals if a in live]
    return WeightedGrammar(nts, g.terminals, g.start, prods, {p.id: g.weights[p.id] for p in prods}, g.domain)


def language_up_to(g: WeightedGrammar, n: int) -> set:
    """Words of length <= n in ``L(G)`` (membership only)."""
    return {w for w in words_up_to(g.terminals, n) if recognizes(g, w)}
