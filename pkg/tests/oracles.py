"""Brute-force reference implementations used to cross-check the library.

They share nothing with the package except the data classes, and favour
obviousness over speed: sentential-form search for grammars, configuration
search for machines, a counter for Dyck words.
"""

from itertools import product


def words(alphabet, n):
    for k in range(n + 1):
        for w in product(sorted(alphabet), repeat=k):
            yield w


def leftmost_derivations(g, w, max_steps):
    """All leftmost derivations of ``w`` with at most ``max_steps`` steps, as
    tuples of production ids, found by depth-first search over sentential
    forms.  The terminal prefix before the leftmost nonterminal must match
    ``w`` and the form may never hold more terminals than ``w``."""
    w = tuple(w)
    nts = set(g.nonterminals)
    by_lhs = {}
    for p in g.productions:
        by_lhs.setdefault(p.lhs, []).append(p)
    out = []

    def go(form, used):
        k = 0
        while k < len(form) and form[k] not in nts:
            k += 1
        if form[:k] != w[:k]:
            return
        if sum(1 for s in form if s not in nts) > len(w):
            return
        if k == len(form):
            if form == w:
                out.append(tuple(used))
            return
        if len(used) == max_steps:
            return
        for p in by_lhs.get(form[k], ()):
            go(form[:k] + tuple(p.rhs) + form[k + 1 :], used + [p.id])

    go((g.start,), [])
    return out


def grammar_value(g, w, max_steps):
    d = g.domain
    total = d.zero
    for ds in leftmost_derivations(g, w, max_steps):
        total = d.add(total, d.val([g.weights[p] for p in ds]))
    return total


def pda_computations(m, w, max_steps, max_stack):
    """Accepting computations of ``m`` on ``w`` (final state, empty stack) by
    plain configuration search with step and stack-height bounds."""
    w = tuple(w)
    out = []

    def go(q, i, stack, used):
        if i == len(w) and not stack and q in m.finals:
            out.append(tuple(used))
        if not stack or len(used) == max_steps:
            return
        top, rest = stack[0], stack[1:]
        for t in m.transitions:
            if t.source != q or t.pop != top:
                continue
            if t.label is None:
                j = i
            elif i < len(w) and w[i] == t.label:
                j = i + 1
            else:
                continue
            new = tuple(t.push) + rest
            if len(new) > max_stack:
                continue
            go(t.target, j, new, used + [t.id])

    go(m.initial, 0, (m.initial_stack,), [])
    return out


def pda_value(m, w, max_steps, max_stack):
    d = m.domain
    total = d.zero
    for c in pda_computations(m, w, max_steps, max_stack):
        total = d.add(total, d.val([m.weights[t] for t in c]))
    return total


def is_balanced(word, openers):
    """Counter-style check: each closer must match the innermost open bracket."""
    depth = []
    for s in word:
        if s in openers:
            depth.append(s)
        elif not depth or "~" + depth.pop() != s:
            return False
    return not depth


def catalan(n):
    c = 1
    for k in range(n):
        c = c * 2 * (2 * k + 1) // (k + 2)
    return c
