"""Weighted pushdown automata accepting by final state and empty pushdown.

Computations are enumerated through pop summaries: a computation that starts
in state ``q`` with ``gamma`` on top and ends when that ``gamma`` is popped
splits into the first transition followed by one sub-computation per pushed
symbol.  A fixpoint first records which ``(state, position)`` pairs each
summary can end in, so the enumeration only follows realizable choices and
detects infinite families exactly (a summary that is re-entered while it is
still being expanded can be pumped).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from types import MappingProxyType
from typing import Any, Mapping, Optional

from ._util import as_word, fresh
from .errors import BudgetError, DivergenceError, DomainMismatchError, PreconditionError, ValidationError
from .series import Series
from .weights import WeightDomain, boolean

DEFAULT_CAP = 100_000


@dataclass(frozen=True)
class Transition:
    id: str
    source: str
    label: Optional[str]  # None is the empty word
    pop: str
    target: str
    push: tuple = ()

    def __str__(self):
        x = "eps" if self.label is None else self.label
        return f"{self.id}: {self.source}, {x}, {self.pop} -> {self.target}, [{' '.join(self.push)}]"


@dataclass(frozen=True, eq=False)
class WeightedPushdown:
    states: tuple
    stack: tuple
    initial: str
    initial_stack: str
    finals: tuple
    transitions: tuple
    weights: Mapping[str, Any]
    domain: WeightDomain = field(default_factory=boolean)
    alphabet: tuple = ()

    def __post_init__(self):
        for name in ("states", "stack", "finals", "transitions", "alphabet"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "weights", MappingProxyType(dict(self.weights)))
        qs, gs = set(self.states), set(self.stack)
        if self.initial not in qs:
            raise ValidationError(f"initial state {self.initial!r} is not declared")
        if self.initial_stack not in gs:
            raise ValidationError(f"initial stack symbol {self.initial_stack!r} is not declared")
        for f in self.finals:
            if f not in qs:
                raise ValidationError(f"final state {f!r} is not declared")
        sigma = set(self.alphabet)
        seen = set()
        for t in self.transitions:
            if t.id in seen:
                raise ValidationError(f"duplicate transition id {t.id!r}")
            seen.add(t.id)
            for q in (t.source, t.target):
                if q not in qs:
                    raise ValidationError(f"transition {t.id}: unknown state {q!r}")
            for g in (t.pop, *t.push):
                if g not in gs:
                    raise ValidationError(f"transition {t.id}: unknown stack symbol {g!r}")
            if t.label is not None and t.label not in sigma:
                raise ValidationError(f"transition {t.id}: label {t.label!r} is not in the alphabet")
            if t.id not in self.weights:
                raise ValidationError(f"transition {t.id} has no weight")
            self.domain.check(self.weights[t.id])
        extra = set(self.weights) - seen
        if extra:
            raise ValidationError(f"weights for unknown transitions: {sorted(extra)}")
        object.__setattr__(self, "_index", {t.id: i for i, t in enumerate(self.transitions)})
        by_src = {}
        for k, t in enumerate(self.transitions):
            by_src.setdefault((t.source, t.pop), []).append(k)
        object.__setattr__(self, "_by_src", by_src)

    def transition(self, tid) -> Transition:
        try:
            return self.transitions[self._index[tid]]
        except KeyError:
            raise ValidationError(f"unknown transition {tid!r}") from None

    def series(self, cap=DEFAULT_CAP) -> Series:
        return Series(
            self.domain,
            lambda w: evaluate(self, w, cap),
            "automaton",
            lambda n: evaluate_up_to(self, n, cap),
        )

    def __repr__(self):
        return (
            f"WeightedPushdown(|Q|={len(self.states)}, |Gamma|={len(self.stack)}, "
            f"|T|={len(self.transitions)}, domain={self.domain.name})"
        )


@dataclass(frozen=True)
class Computation:
    transitions: tuple
    word: tuple
    final_state: str

    def __len__(self):
        return len(self.transitions)


def make_pda(
    transitions,
    *,
    initial,
    initial_stack,
    finals,
    domain=None,
    alphabet=None,
    states=None,
    stack=None,
) -> WeightedPushdown:
    """Build a machine from ``(q, x, gamma, p, push)`` or ``(q, x, gamma, p, push, weight)``
    tuples; ``x`` is a letter or ``None`` and ``push`` a sequence or a
    whitespace-separated string.  Ids are ``t1, t2, ...``."""
    domain = domain or boolean()
    ts, weights = [], {}
    for k, row in enumerate(transitions, 1):
        q, x, g, p, push = row[:5]
        if isinstance(push, str):
            push = push.split()
        tid = f"t{k}"
        ts.append(Transition(tid, q, x, g, p, tuple(push)))
        weights[tid] = row[5] if len(row) > 5 else domain.one
    states = list(dict.fromkeys([*(states or ()), initial, *finals, *(s for t in ts for s in (t.source, t.target))]))
    stack = list(dict.fromkeys([*(stack or ()), initial_stack, *(s for t in ts for s in (t.pop, *t.push))]))
    if alphabet is None:
        alphabet = [t.label for t in ts if t.label is not None]
    alphabet = list(dict.fromkeys(alphabet))
    return WeightedPushdown(states, stack, initial, initial_stack, finals, ts, weights, domain, alphabet)


def empty_pda(domain: WeightDomain, alphabet=()) -> WeightedPushdown:
    """A state-normalized machine with no transitions (the zero series)."""
    return WeightedPushdown(("q0", "qf"), ("Z",), "q0", "Z", ("qf",), (), {}, domain, alphabet)


# -- configurations ---------------------------------------------------------------


def pda_step(m: WeightedPushdown, config, tid):
    """Apply one transition to ``(state, remaining word, stack)``; the stack top
    is the first element."""
    q, w, stack = config
    w, stack = as_word(w), tuple(stack)
    t = m.transition(tid)
    if q != t.source:
        raise ValidationError(f"transition {tid} leaves {t.source}, not {q}")
    if not stack:
        raise ValidationError("the pushdown is empty")
    if stack[0] != t.pop:
        raise ValidationError(f"transition {tid} pops {t.pop}, but the top is {stack[0]}")
    if t.label is not None:
        if not w or w[0] != t.label:
            raise ValidationError(f"transition {tid} reads {t.label!r}")
        w = w[1:]
    return (t.target, w, t.push + stack[1:])


def replay(m: WeightedPushdown, word, tids):
    config = (m.initial, as_word(word), (m.initial_stack,))
    for tid in tids:
        config = pda_step(m, config, tid)
    return config


def split_computation(m: WeightedPushdown, state, stack, tids):
    """Cut a computation that empties ``stack`` from ``state`` into the shortest
    pieces popping one original symbol each.  Returns ``[(piece, end_state)]``."""
    pieces = []
    height = len(stack)
    current = []
    q = state
    h = height
    for tid in tids:
        t = m.transition(tid)
        if t.source != q:
            raise ValidationError(f"{tid} does not continue from {q}")
        current.append(tid)
        h += len(t.push) - 1
        q = t.target
        if h < height - len(pieces):
            pieces.append((tuple(current), q))
            current = []
    if current or len(pieces) != height:
        raise ValidationError("computation does not empty the pushdown")
    return pieces


def computation_weight(m: WeightedPushdown, theta) -> Any:
    tids = theta.transitions if isinstance(theta, Computation) else tuple(theta)
    for tid in tids:
        m.transition(tid)
    return m.domain.val_op(tuple(m.weights[t] for t in tids))


def is_proper(m: WeightedPushdown) -> bool:
    return all(t.label is not None or len(t.push) >= 2 for t in m.transitions)


# -- enumeration --------------------------------------------------------------------


class _Summaries:
    """``ends[(q, gamma, i)]``: ``(p, j)`` such that popping ``gamma`` from state
    ``q`` at position ``i`` of ``w`` can end in state ``p`` at position ``j``."""

    def __init__(self, m: WeightedPushdown, w: tuple):
        self.m = m
        self.w = w
        self.n = len(w)
        self.ends = {}
        changed = True
        while changed:
            changed = False
            for t in m.transitions:
                for i in range(self.n + 1):
                    after = self.read(t, i)
                    if after is None:
                        continue
                    got = self.chain(t.push, {(t.target, after)})
                    key = (t.source, t.pop, i)
                    have = self.ends.setdefault(key, set())
                    if not got <= have:
                        have |= got
                        changed = True
        self._fits = {}

    def read(self, t, i):
        if t.label is None:
            return i
        if i < self.n and self.w[i] == t.label:
            return i + 1
        return None

    def chain(self, push, cur):
        for g in push:
            nxt = set()
            for q, i in cur:
                nxt |= self.ends.get((q, g, i), set())
            cur = nxt
            if not cur:
                break
        return cur

    def fits(self, push, k, q, i, p, j):
        key = (push, k, q, i, p, j)
        hit = self._fits.get(key)
        if hit is None:
            hit = (p, j) in self.chain(push[k:], {(q, i)})
            self._fits[key] = hit
        return hit


def _plans(push, start, goal, ends, fits):
    """Every way to pop ``push`` symbol by symbol from ``start`` to ``goal``."""
    out = []

    def go(k, cur, acc):
        if k == len(push):
            if cur == goal:
                out.append(list(acc))
            return
        q, i = cur
        for p, j in sorted(ends.get((q, push[k], i), ())):
            if fits(push, k + 1, p, j, *goal):
                acc.append((q, push[k], i, p, j))
                go(k + 1, (p, j), acc)
                acc.pop()

    go(0, start, [])
    return out


def _computation_indices(m: WeightedPushdown, w: tuple, cap: int):
    s = _Summaries(m, w)
    memo = {}
    active = []

    def seg(q, g, i, p, j):
        key = (q, g, i, p, j)
        if key in memo:
            return memo[key]
        if key in active:
            raise DivergenceError(f"{w!r} has infinitely many computations (popping {g} from {q} recurs)", [k[1] for k in active])
        active.append(key)
        out = []
        for k in m._by_src.get((q, g), ()):
            t = m.transitions[k]
            after = s.read(t, i)
            if after is None:
                continue
            for plan in _plans(t.push, (t.target, after), (p, j), s.ends, s.fits):
                parts = [seg(*step) for step in plan]
                for combo in product(*parts):
                    seq = (k,)
                    for c in combo:
                        seq += c
                    out.append(seq)
                if len(out) > cap:
                    raise BudgetError(f"more than {cap} computations")
        active.pop()
        memo[key] = out
        return out

    found = []
    reachable = s.ends.get((m.initial, m.initial_stack, 0), set())
    for f in dict.fromkeys(m.finals):
        if (f, s.n) in reachable:
            found.extend((seq, f) for seq in seg(m.initial, m.initial_stack, 0, f, s.n))
            if len(found) > cap:
                raise BudgetError(f"more than {cap} computations")
    found.sort()
    return found


def enumerate_computations(m: WeightedPushdown, w, cap: int = DEFAULT_CAP) -> list:
    """All accepting computations on ``w``, ordered lexicographically by
    transition declaration order."""
    w = as_word(w)
    ts = m.transitions
    return [Computation(tuple(ts[k].id for k in seq), w, f) for seq, f in _computation_indices(m, w, cap)]


def count_computations(m: WeightedPushdown, w, cap: int = DEFAULT_CAP) -> int:
    return len(_computation_indices(m, as_word(w), cap))


def evaluate(m: WeightedPushdown, w, cap: int = DEFAULT_CAP) -> Any:
    d = m.domain
    weights = [m.weights[t.id] for t in m.transitions]
    total = d.zero
    for seq, _ in _computation_indices(m, as_word(w), cap):
        total = d.add_op(total, d.val_op(tuple(weights[k] for k in seq)))
    return total


def accepts(m: WeightedPushdown, w) -> bool:
    s = _Summaries(m, as_word(w))
    reachable = s.ends.get((m.initial, m.initial_stack, 0), set())
    return any((f, s.n) in reachable for f in m.finals)


def computations_up_to(m: WeightedPushdown, n: int, cap: int = DEFAULT_CAP) -> dict:
    """Map every word of length <= n accepted by ``m`` to its computations (as
    tuples of transition indices)."""
    # ends[(q, g)] = {(p, length)} with length <= n
    ends = {}

    def chain(push, cur):
        for g in push:
            nxt = set()
            for q, used in cur:
                for p, ell in ends.get((q, g), ()):
                    if used + ell <= n:
                        nxt.add((p, used + ell))
            cur = nxt
            if not cur:
                break
        return cur

    changed = True
    while changed:
        changed = False
        for t in m.transitions:
            c = 0 if t.label is None else 1
            if c > n:
                continue
            got = {(p, ell) for p, ell in chain(t.push, {(t.target, c)})}
            have = ends.setdefault((t.source, t.pop), set())
            if not got <= have:
                have |= got
                changed = True

    # rel_ends[(q, g, used)] restates ends as absolute offsets for _plans
    def rel(q, g, used):
        return {(p, used + ell) for p, ell in ends.get((q, g), ()) if used + ell <= n}

    class _View(dict):
        def get(self, key, default=()):
            q, g, used = key
            return rel(q, g, used)

    view = _View()
    fitmemo = {}

    def fits(push, k, q, i, p, j):
        key = (push, k, q, i, p, j)
        if key not in fitmemo:
            fitmemo[key] = (p, j) in chain(push[k:], {(q, i)})
        return fitmemo[key]

    memo = {}
    active = []
    ts = m.transitions

    def gen(q, g, p, length):
        key = (q, g, p, length)
        if key in memo:
            return memo[key]
        if key in active:
            raise DivergenceError(f"infinitely many computations (popping {g} from {q} recurs)", [k[1] for k in active])
        active.append(key)
        out = []
        for k in m._by_src.get((q, g), ()):
            t = ts[k]
            c = 0 if t.label is None else 1
            if c > length:
                continue
            head = () if t.label is None else (t.label,)
            for plan in _plans(t.push, (t.target, c), (p, length), view, fits):
                parts = [gen(a, b, e, j - i) for a, b, i, e, j in plan]
                for combo in product(*parts):
                    word, seq = head, (k,)
                    for cw, cs in combo:
                        word += cw
                        seq += cs
                    out.append((word, seq))
                if len(out) > cap:
                    raise BudgetError(f"more than {cap} computations")
        active.pop()
        memo[key] = out
        return out

    table = {}
    finals = set(m.finals)
    for p, length in sorted(ends.get((m.initial, m.initial_stack), ())):
        if p in finals:
            for word, seq in gen(m.initial, m.initial_stack, p, length):
                table.setdefault(word, []).append(seq)
    return table


def evaluate_up_to(m: WeightedPushdown, n: int, cap: int = DEFAULT_CAP) -> dict:
    d = m.domain
    weights = [m.weights[t.id] for t in m.transitions]
    out = {}
    for word, seqs in computations_up_to(m, n, cap).items():
        total = d.zero
        for seq in seqs:
            total = d.add_op(total, d.val_op(tuple(weights[k] for k in seq)))
        out[word] = total
    return out


def unambiguity_probe(m: WeightedPushdown, n: int, cap: int = DEFAULT_CAP) -> Optional[tuple]:
    table = computations_up_to(m, n, cap)
    witnesses = [w for w, seqs in table.items() if len(seqs) >= 2]
    return min(witnesses, key=lambda w: (len(w), w)) if witnesses else None


# -- constructions --------------------------------------------------------------------


def is_state_normalized(m: WeightedPushdown) -> bool:
    if len(set(m.finals)) != 1:
        return False
    (qf,) = set(m.finals)
    return all(t.target != m.initial and t.source != qf for t in m.transitions)


def state_normalize(m: WeightedPushdown) -> WeightedPushdown:
    """Add a fresh initial state, a fresh single final state and a fresh bottom
    symbol, linked by unit-weight transitions."""
    one = m.domain.one
    q0 = fresh(f"{m.initial}'", set(m.states))
    qf = fresh("qf", set(m.states) | {q0})
    g0 = fresh(f"{m.initial_stack}'", set(m.stack))
    ids = {t.id for t in m.transitions}
    t_in = Transition(fresh("in", ids), q0, None, g0, m.initial, (m.initial_stack, g0))
    ids.add(t_in.id)
    ts = list(m.transitions) + [t_in]
    weights = dict(m.weights)
    weights[t_in.id] = one
    for p in dict.fromkeys(m.finals):
        t = Transition(fresh(f"out@{p}", ids), p, None, g0, qf, ())
        ids.add(t.id)
        ts.append(t)
        weights[t.id] = one
    return WeightedPushdown(
        [*m.states, q0, qf], [*m.stack, g0], q0, g0, [qf], ts, weights, m.domain, m.alphabet
    )


def to_one_state(m: WeightedPushdown, prune: bool = True) -> WeightedPushdown:
    """Triple construction: stack symbols ``p^gamma^q`` remember the state in
    which they are pushed and the state reached once they are popped."""
    if not is_state_normalized(m):
        raise PreconditionError("to_one_state expects a state-normalized machine")
    (qf,) = set(m.finals)
    taken = set(m.alphabet)
    names = {}

    def triple(p, g, q):
        key = (p, g, q)
        if key not in names:
            name = fresh(f"{p}^{g}^{q}", taken)
            taken.add(name)
            names[key] = name
        return names[key]

    for p in m.states:
        for g in m.stack:
            for q in m.states:
                triple(p, g, q)
    ts, weights = [], {}
    for t in m.transitions:
        k = len(t.push)
        for ps in product(m.states, repeat=k):
            states = (t.target, *ps)
            push = tuple(triple(states[i], t.push[i], states[i + 1]) for i in range(k))
            pop = triple(t.source, t.pop, states[-1])
            tid = t.id if k == 0 else f"{t.id}<{';'.join(ps)}>"
            ts.append(Transition(tid, "*", t.label, pop, "*", push))
            weights[tid] = m.weights[t.id]
    start = triple(m.initial, m.initial_stack, qf)
    stack = [names[key] for key in names]
    if prune:
        ts, stack = _prune_one_state(ts, start)
        weights = {t.id: weights[t.id] for t in ts}
    return WeightedPushdown(["*"], stack, "*", start, ["*"], ts, weights, m.domain, m.alphabet)


def _prune_one_state(ts, start):
    # productive: symbols some transition pops while pushing only productive ones
    productive = set()
    changed = True
    while changed:
        changed = False
        for t in ts:
            if t.pop not in productive and all(g in productive for g in t.push):
                productive.add(t.pop)
                changed = True
    live = [t for t in ts if t.pop in productive and all(g in productive for g in t.push)]
    seen = {start}
    stack = [start]
    by_pop = {}
    for t in live:
        by_pop.setdefault(t.pop, []).append(t)
    while stack:
        g = stack.pop()
        for t in by_pop.get(g, ()):
            for h in t.push:
                if h not in seen:
                    seen.add(h)
                    stack.append(h)
    kept = [t for t in live if t.pop in seen]
    symbols = list(dict.fromkeys([start, *(g for t in kept for g in (t.pop, *t.push))]))
    return kept, symbols


def sum_wpda(m1: WeightedPushdown, m2: WeightedPushdown) -> WeightedPushdown:
    """Machine for the pointwise sum: both parts share the initial state and the
    initial stack symbol and are otherwise disjoint."""
    if m1.domain != m2.domain:
        raise DomainMismatchError("machines over different domains")
    if set(m1.alphabet) != set(m2.alphabet):
        raise ValidationError("machines over different alphabets")
    for m in (m1, m2):
        if not is_state_normalized(m):
            raise PreconditionError("sum_wpda expects state-normalized machines")
    q0, g0 = "q0", "Z0"
    states, stack, ts, weights, finals = [q0], [g0], [], {}, []
    for tag, m in (("1", m1), ("2", m2)):

        def st(q, m=m, tag=tag):
            return q0 if q == m.initial else f"{tag}:{q}"

        def sy(g, m=m, tag=tag):
            return g0 if g == m.initial_stack else f"{tag}:{g}"

        states += [st(q) for q in m.states if q != m.initial]
        stack += [sy(g) for g in m.stack if g != m.initial_stack]
        finals += [st(q) for q in m.finals]
        for t in m.transitions:
            tid = f"{tag}:{t.id}"
            ts.append(Transition(tid, st(t.source), t.label, sy(t.pop), st(t.target), tuple(sy(g) for g in t.push)))
            weights[tid] = m.weights[t.id]
    alphabet = list(dict.fromkeys([*m1.alphabet, *m2.alphabet]))
    return WeightedPushdown(states, stack, q0, g0, finals, ts, weights, m1.domain, alphabet)


def reweight(m: WeightedPushdown, domain: WeightDomain, weights) -> WeightedPushdown:
    if callable(weights):
        weights = {t.id: weights(t) for t in m.transitions}
    return WeightedPushdown(
        m.states, m.stack, m.initial, m.initial_stack, m.finals, m.transitions, weights, domain, m.alphabet
    )


def prune_dead_transitions(m: WeightedPushdown) -> WeightedPushdown:
    """Drop transitions into non-final states that have no outgoing transitions.

    Such transitions can never occur in an accepting computation, so the series
    is unchanged.  All states stay declared.
    """
    ts = list(m.transitions)
    finals = set(m.finals)
    while True:
        sources = {t.source for t in ts}
        kept = [t for t in ts if t.target in finals or t.target in sources]
        if len(kept) == len(ts):
            break
        ts = kept
    return WeightedPushdown(
        m.states, m.stack, m.initial, m.initial_stack, m.finals, ts,
        {t.id: m.weights[t.id] for t in ts}, m.domain, m.alphabet,
    )
