"""Quantitative languages as evaluators, plus length-bounded probes.

A :class:`Series` never materializes its support; set-level questions
(equality, image, support) are answered for words up to a given length.
Sources that can enumerate all of their nonzero words at once (grammars and
pushdown automata) expose a ``table`` callable that the probes use instead of
evaluating word by word.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ._util import as_word, words_up_to
from .errors import DomainMismatchError
from .weights import WeightDomain


@dataclass(frozen=True)
class Monome:
    """A series whose support is at most the single word ``word``."""

    weight: Any
    word: tuple = ()

    def __iter__(self):
        yield self.weight
        yield self.word


@dataclass(frozen=True, eq=False)
class Series:
    domain: WeightDomain
    evaluator: Callable[[tuple], Any] = field(repr=False)
    tag: str = "series"
    # max_len -> {word: value} holding every word of length <= max_len whose
    # value may be nonzero; other words are zero.
    table: Optional[Callable[[int], dict]] = field(default=None, repr=False)

    def __call__(self, word):
        return self.evaluator(as_word(word))

    def values_up_to(self, alphabet, n):
        """Map every word of length <= n to its value, in shortlex order."""
        if self.table is not None:
            known = self.table(n)
            zero = self.domain.zero
            return {w: known.get(w, zero) for w in words_up_to(alphabet, n)}
        return {w: self(w) for w in words_up_to(alphabet, n)}


def _same_domain(a: Series, b: Series):
    if a.domain != b.domain:
        raise DomainMismatchError(f"series over {a.domain.name} and {b.domain.name} cannot be combined")


def sum_series(a: Series, b: Series) -> Series:
    _same_domain(a, b)
    d = a.domain
    table = None
    if a.table is not None and b.table is not None:

        def table(n):
            ta, tb = a.table(n), b.table(n)
            return {w: d.add(ta.get(w, d.zero), tb.get(w, d.zero)) for w in {**ta, **tb}}

    return Series(d, lambda w: d.add(a(w), b(w)), "sum", table)


def sum_all(domain: WeightDomain, series) -> Series:
    """Finite sum of a family of series (the empty family gives the zero series)."""
    total = zero_series(domain)
    for s in series:
        total = sum_series(total, s)
    return total


def zero_series(domain: WeightDomain) -> Series:
    return Series(domain, lambda w: domain.zero, "characteristic", lambda n: {})


def characteristic(domain: WeightDomain, membership: Callable[[tuple], bool]) -> Series:
    return Series(
        domain,
        lambda w: domain.one if membership(w) else domain.zero,
        "characteristic",
    )


def scalar(domain: WeightDomain, a, s: Series) -> Series:
    """``a`` on the support of ``s`` (a characteristic series) and zero elsewhere."""
    domain.check(a)
    return Series(domain, lambda w: a if s(w) != domain.zero else domain.zero, "characteristic")


@dataclass(frozen=True)
class Comparison:
    equal: bool
    counterexample: Optional[tuple] = None
    left: Any = None
    right: Any = None
    checked: int = 0

    def __bool__(self):
        return self.equal


def compare_up_to(a: Series, b: Series, alphabet, n: int) -> Comparison:
    """Compare two series on every word of length <= n.

    Returns the shortlex-first word on which they differ, if any.
    """
    _same_domain(a, b)
    va = a.values_up_to(alphabet, n)
    vb = b.values_up_to(alphabet, n)
    for w, x in va.items():
        y = vb[w]
        if x != y:
            return Comparison(False, w, x, y, len(va))
    return Comparison(True, checked=len(va))


def image_support_up_to(s: Series, alphabet, n: int):
    """Return ``(image, support)`` restricted to words of length <= n."""
    image, support = set(), set()
    for w, v in s.values_up_to(alphabet, n).items():
        image.add(v)
        if v != s.domain.zero:
            support.add(w)
    return image, support


def fibers_up_to(s: Series, alphabet, n: int) -> dict:
    """Group the words of length <= n by their value."""
    out = {}
    for w, v in s.values_up_to(alphabet, n).items():
        out.setdefault(v, []).append(w)
    return out
