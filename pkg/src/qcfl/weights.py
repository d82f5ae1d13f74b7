"""Unital valuation monoids and the concrete weight domains built on them.

A domain is a commutative monoid ``(K, +, 0)`` together with a valuation
``val`` that maps finite sequences over ``K`` to ``K``.  ``val`` must return a
singleton's element unchanged, map the empty sequence to the unit ``1``,
collapse to ``0`` as soon as ``0`` occurs, and ignore occurrences of ``1``.

All arithmetic is exact: averages use :class:`fractions.Fraction` and the two
infinities are the singletons :data:`INF` and :data:`NEG_INF`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations_with_replacement, product
from typing import Any, Callable, Optional

from .errors import DomainMismatchError, ParseError, ValidationError

__all__ = [
    "INF",
    "NEG_INF",
    "UNIT",
    "WeightDomain",
    "AxiomReport",
    "make_domain",
    "val_sequence",
    "combine",
    "adjoin_unit",
    "fold_adapter",
    "axioms_probe",
    "valuation_closure",
    "boolean",
    "nat",
    "tropical",
    "supavg",
    "avgsup",
    "truncavg",
    "chain",
    "lattice",
    "magma_fold",
    "nat_product",
    "avg2",
    "matrix_magma",
    "BUILTIN_SPECS",
]


class _Infinity:
    __slots__ = ("sign",)

    def __init__(self, sign):
        self.sign = sign

    def __repr__(self):
        return "inf" if self.sign > 0 else "-inf"

    def __eq__(self, other):
        return isinstance(other, _Infinity) and other.sign == self.sign

    def __hash__(self):
        return hash(("_Infinity", self.sign))

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __le__(self, other):
        return self == other or self < other

    def __ge__(self, other):
        return self == other or self > other

    def __neg__(self):
        return NEG_INF if self.sign > 0 else INF

    def __reduce__(self):
        return ("INF" if self.sign > 0 else "NEG_INF")


class _Unit:
    """The fresh unit adjoined by :func:`adjoin_unit`."""

    __slots__ = ()

    def __repr__(self):
        return "unit"

    def __eq__(self, other):
        return isinstance(other, _Unit)

    def __hash__(self):
        return hash("_Unit")

    def __reduce__(self):
        return "UNIT"


INF = _Infinity(1)
NEG_INF = _Infinity(-1)
UNIT = _Unit()


def _format_rational(x):
    if isinstance(x, _Infinity):
        return repr(x)
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _parse_rational(text):
    text = text.strip()
    if text == "inf":
        return INF
    if text == "-inf":
        return NEG_INF
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational literal: {text!r}") from None


@dataclass(frozen=True, eq=False)
class WeightDomain:
    """A unital valuation monoid with capability flags.

    ``one`` is ``None`` for a valuation monoid without unit; such a domain is
    only useful as the input of :func:`adjoin_unit`.
    """

    name: str
    zero: Any
    one: Any
    add_op: Callable[[Any, Any], Any] = field(repr=False)
    val_op: Callable[[tuple], Any] = field(repr=False)
    contains: Callable[[Any], bool] = field(repr=False)
    parse_literal: Callable[[str], Any] = field(repr=False)
    format_literal: Callable[[Any], str] = field(repr=False)
    additively_idempotent: bool = False
    completely_idempotent: bool = False
    complete: bool = False
    locally_finite: bool = False
    fold_step: Optional[Callable[[Any, Any], Any]] = field(default=None, repr=False)
    spec: Optional[str] = None
    samples: tuple = field(default=(), repr=False)

    @property
    def fold_presentable(self):
        return self.fold_step is not None

    @property
    def key(self):
        return self.spec if self.spec is not None else id(self)

    def __eq__(self, other):
        return isinstance(other, WeightDomain) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def check(self, x):
        if not self.contains(x):
            raise DomainMismatchError(f"{x!r} is not an element of {self.name}")
        return x

    def add(self, a, b):
        return self.add_op(self.check(a), self.check(b))

    def sum(self, values):
        total = self.zero
        for v in values:
            total = self.add(total, v)
        return total

    def val(self, ws):
        ws = tuple(ws)
        for w in ws:
            self.check(w)
        return self.val_op(ws)

    def parse(self, text):
        value = self.parse_literal(text.strip())
        if not self.contains(value):
            raise ParseError(f"{text!r} is not an element of {self.name}")
        return value

    def format(self, x):
        return self.format_literal(self.check(x))


def val_sequence(d: WeightDomain, ws) -> Any:
    return d.val(ws)


def combine(d: WeightDomain, a, b) -> Any:
    return d.add(a, b)


def _fold_val(one, step):
    def val(ws):
        if not ws:
            if one is None:
                raise ValidationError("valuation of the empty sequence is undefined without a unit")
            return one
        if one is None:
            return reduce(step, ws[1:], ws[0])
        return reduce(step, ws, one)

    return val


def fold_adapter(
    zero,
    one,
    add: Callable,
    step: Callable,
    *,
    contains: Callable[[Any], bool],
    parse: Callable[[str], Any],
    format: Callable[[Any], str] = str,
    samples=(),
    name="fold",
    spec=None,
    **flags,
) -> WeightDomain:
    """Build a domain whose valuation is the left fold of a binary step.

    The step must be annihilated by ``zero`` and have ``one`` as a two-sided
    unit; both laws are checked on ``samples`` (plus zero and one).
    """
    probe = list(dict.fromkeys([*samples, zero, one]))
    for a in probe:
        for law, lhs, rhs in (
            ("a*0 = 0", step(a, zero), zero),
            ("0*a = 0", step(zero, a), zero),
            ("a*1 = a", step(a, one), a),
            ("1*a = a", step(one, a), a),
        ):
            if lhs != rhs:
                raise ValidationError(f"{name}: law {law!r} fails for a = {a!r}")
    return WeightDomain(
        name=name,
        zero=zero,
        one=one,
        add_op=add,
        val_op=_fold_val(one, step),
        contains=contains,
        parse_literal=parse,
        format_literal=format,
        fold_step=step,
        spec=spec,
        samples=tuple(samples),
        **flags,
    )


# -- builtin domains ---------------------------------------------------------


def _parse_bool(text):
    if text in ("true", "1"):
        return True
    if text in ("false", "0"):
        return False
    raise ParseError(f"not a boolean literal: {text!r}")


def boolean() -> WeightDomain:
    return fold_adapter(
        False,
        True,
        lambda a, b: a or b,
        lambda a, b: a and b,
        contains=lambda x: isinstance(x, bool),
        parse=_parse_bool,
        format=lambda x: "true" if x else "false",
        samples=(False, True),
        name="boolean",
        spec="boolean",
        additively_idempotent=True,
        completely_idempotent=True,
        complete=True,
        locally_finite=True,
    )


def _parse_int(text):
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"not an integer literal: {text!r}") from None


def nat() -> WeightDomain:
    return fold_adapter(
        0,
        1,
        lambda a, b: a + b,
        lambda a, b: a * b,
        contains=lambda x: type(x) is int and x >= 0,
        parse=_parse_int,
        format=str,
        samples=(0, 1, 2, 3),
        name="nat",
        spec="nat",
    )


def _tropical_times(a, b):
    if a == INF or b == INF:
        return INF
    return a + b


def tropical() -> WeightDomain:
    return fold_adapter(
        INF,
        0,
        min,
        _tropical_times,
        contains=lambda x: x == INF or (type(x) is int and x >= 0),
        parse=lambda t: INF if t == "inf" else _parse_int(t),
        format=str,
        samples=(INF, 0, 1, 3),
        name="tropical",
        spec="tropical",
        additively_idempotent=True,
        completely_idempotent=True,
        complete=True,
    )


def _in_extended_rationals(x, allow_pos_inf):
    if x == NEG_INF:
        return True
    if x == INF:
        return allow_pos_inf
    return isinstance(x, Fraction) or (isinstance(x, int) and not isinstance(x, bool))


def _mean(ws):
    if any(w == NEG_INF for w in ws):
        return NEG_INF
    return Fraction(sum(ws, Fraction(0)), len(ws))


def supavg() -> WeightDomain:
    """``(Q u {-inf}, sup, avg, -inf)``: a valuation monoid with no unit."""

    def val(ws):
        if not ws:
            raise ValidationError("supavg has no unit; the empty sequence has no value")
        return _mean(ws)

    return WeightDomain(
        name="supavg",
        zero=NEG_INF,
        one=None,
        add_op=max,
        val_op=val,
        contains=lambda x: _in_extended_rationals(x, False),
        parse_literal=_parse_rational,
        format_literal=_format_rational,
        additively_idempotent=True,
        completely_idempotent=True,
        complete=True,
        spec="supavg",
        samples=(NEG_INF, Fraction(0), Fraction(1), Fraction(5, 2)),
    )


def adjoin_unit(inner: WeightDomain, unit=UNIT, *, name=None, spec=None, **flags) -> WeightDomain:
    """Adjoin a fresh unit that absorbs under ``+`` and is skipped by ``val``."""
    if inner.contains(unit):
        raise ValidationError(f"{unit!r} already belongs to {inner.name}")

    def contains(x):
        return x == unit or inner.contains(x)

    def add(a, b):
        if a == unit or b == unit:
            return unit
        return inner.add_op(a, b)

    def val(ws):
        rest = tuple(w for w in ws if w != unit)
        if not rest:
            return unit
        return inner.val_op(rest)

    step = None
    if inner.fold_step is not None:

        def step(a, b):
            if a == unit:
                return b
            if b == unit:
                return a
            return inner.fold_step(a, b)

    unit_text = "unit" if unit == UNIT else _format_rational(unit) if isinstance(unit, _Infinity) else str(unit)

    def parse(text):
        if text == unit_text:
            return unit
        return inner.parse_literal(text)

    def fmt(x):
        return unit_text if x == unit else inner.format_literal(x)

    base_flags = dict(
        additively_idempotent=inner.additively_idempotent,
        completely_idempotent=inner.completely_idempotent,
        complete=inner.complete,
        locally_finite=inner.locally_finite,
    )
    base_flags.update(flags)
    samples = tuple(s for s in inner.samples if s != inner.zero)[:2]
    return WeightDomain(
        name=name or f"adjoin-unit({inner.name})",
        zero=inner.zero,
        one=unit,
        add_op=add,
        val_op=val,
        contains=contains,
        parse_literal=parse,
        format_literal=fmt,
        fold_step=step,
        spec=spec if spec is not None else (f"adjoin-unit {inner.spec}" if inner.spec else None),
        samples=(inner.zero, unit, *samples),
        **base_flags,
    )


def avgsup() -> WeightDomain:
    """``(Q u {-inf, inf}, sup, avg, -inf, inf)``; ``inf`` is skipped by averages."""
    return adjoin_unit(supavg(), INF, name="avgsup", spec="avgsup")


def truncavg(digits: int) -> WeightDomain:
    """Like :func:`avgsup` but every average is truncated toward zero to
    ``digits`` decimal places.  The carrier only holds values with at most that
    many decimals, which keeps ``val`` the identity on singletons."""
    if type(digits) is not int or digits < 0:
        raise ValidationError("truncavg needs a digit count >= 0")
    scale = 10**digits

    def contains(x):
        if x == INF or x == NEG_INF:
            return True
        return isinstance(x, Fraction) and (x * scale).denominator == 1

    def val(ws):
        rest = tuple(w for w in ws if w != INF)
        if not rest:
            return INF
        m = _mean(rest)
        if m == NEG_INF:
            return m
        return Fraction(math.trunc(m * scale), scale)

    return WeightDomain(
        name=f"truncavg({digits})",
        zero=NEG_INF,
        one=INF,
        add_op=max,
        val_op=val,
        contains=contains,
        parse_literal=_parse_rational,
        format_literal=_format_rational,
        additively_idempotent=True,
        completely_idempotent=True,
        complete=True,
        locally_finite=True,
        spec=f"truncavg {digits}",
        samples=(NEG_INF, INF, Fraction(0), Fraction(1)),
    )


def avg2() -> WeightDomain:
    """``(Q u {-inf, inf}, sup, avg2, -inf, inf)``, a unital monoid-magma that is
    not associative: ``avg2(a, b) = (a + b) / 2`` with ``inf`` as unit."""

    def step(a, b):
        if a == INF:
            return b
        if b == INF:
            return a
        if a == NEG_INF or b == NEG_INF:
            return NEG_INF
        return (a + b) / 2

    return fold_adapter(
        NEG_INF,
        INF,
        max,
        step,
        contains=lambda x: _in_extended_rationals(x, True),
        parse=_parse_rational,
        format=_format_rational,
        samples=(NEG_INF, INF, Fraction(2), Fraction(4)),
        name="avg2",
        spec="avg2",
        additively_idempotent=True,
        completely_idempotent=True,
        complete=True,
    )


def _finite_flags(additively_idempotent):
    # A finite idempotent commutative monoid is complete and completely
    # idempotent: infinite sums are joins of finitely many distinct values.
    return dict(
        additively_idempotent=additively_idempotent,
        completely_idempotent=additively_idempotent,
        complete=additively_idempotent,
        locally_finite=True,
    )


def chain(n: int) -> WeightDomain:
    """The bounded chain ``{0, 1/(n-1), ..., 1}`` with max as sum and min as product."""
    if type(n) is not int or n < 2:
        raise ValidationError("a chain needs at least two elements")
    elements = tuple(Fraction(i, n - 1) for i in range(n))
    members = frozenset(elements)
    return fold_adapter(
        elements[0],
        elements[-1],
        max,
        min,
        contains=lambda x: isinstance(x, (Fraction, int)) and not isinstance(x, bool) and x in members,
        parse=lambda t: _parse_rational(t),
        format=_format_rational,
        samples=elements[:4] if n <= 4 else (elements[0], elements[1], elements[-2], elements[-1]),
        name=f"chain({n})",
        spec=f"chain {n}",
        **_finite_flags(True),
    )


def _complete_table(elements, table, what, *, fill):
    full = {}
    for (x, y), z in table.items():
        for a in (x, y, z):
            if a not in elements:
                raise ValidationError(f"{what} table mentions unknown element {a!r}")
        full[(x, y)] = z
    for x in elements:
        for y in elements:
            guess = fill(x, y)
            if guess is None:
                continue
            if (x, y) in full and full[(x, y)] != guess:
                raise ValidationError(
                    f"{what} table: entry {x} {y} = {full[(x, y)]} contradicts the required value {guess}"
                )
            full[(x, y)] = guess
    for x in elements:
        for y in elements:
            if (x, y) not in full:
                raise ValidationError(f"{what} table is not total: no entry for ({x}, {y})")
    return full


def _check_semigroup(elements, op, what, commutative):
    for x in elements:
        for y in elements:
            if commutative and op[(x, y)] != op[(y, x)]:
                raise ValidationError(f"{what} is not commutative: ({x}, {y})")
            for z in elements:
                if op[(op[(x, y)], z)] != op[(x, op[(y, z)])]:
                    raise ValidationError(f"{what} is not associative: ({x}, {y}, {z})")


def _symmetric(table):
    out = dict(table)
    for (x, y), z in table.items():
        out.setdefault((y, x), z)
    return out


def lattice(elements, join, meet, bottom, top, *, name="lattice", spec=None) -> WeightDomain:
    """A finite bounded lattice given by (partial) join and meet tables.

    Entries are symmetric; idempotence and the bottom/top identities are filled
    in.  The completed tables are checked against the lattice laws.
    """
    elements = tuple(elements)
    members = frozenset(elements)
    if bottom not in members or top not in members:
        raise ValidationError("bottom and top must be elements")

    def join_fill(x, y):
        if x == y:
            return x
        if x == bottom:
            return y
        if y == bottom:
            return x
        if x == top or y == top:
            return top
        return None

    def meet_fill(x, y):
        if x == y:
            return x
        if x == top:
            return y
        if y == top:
            return x
        if x == bottom or y == bottom:
            return bottom
        return None

    j = _complete_table(members, _symmetric(join), "join", fill=join_fill)
    m = _complete_table(members, _symmetric(meet), "meet", fill=meet_fill)
    _check_semigroup(elements, j, "join", True)
    _check_semigroup(elements, m, "meet", True)
    for x in elements:
        for y in elements:
            if j[(x, m[(x, y)])] != x or m[(x, j[(x, y)])] != x:
                raise ValidationError(f"absorption law fails for ({x}, {y})")

    def parse(text):
        if text not in members:
            raise ParseError(f"unknown lattice element {text!r}")
        return text

    samples = [bottom, top] + [e for e in elements if e not in (bottom, top)][:2]
    return fold_adapter(
        bottom,
        top,
        lambda a, b: j[(a, b)],
        lambda a, b: m[(a, b)],
        contains=lambda x: x in members,
        parse=parse,
        format=str,
        samples=tuple(samples),
        name=name,
        spec=spec,
        **_finite_flags(True),
    )


def magma_fold(elements, zero, one, add, mul, *, name="magma", spec=None) -> WeightDomain:
    """A finite unital monoid-magma given by tables; ``val`` is the left fold of ``mul``."""
    elements = tuple(elements)
    members = frozenset(elements)
    if zero not in members or one not in members:
        raise ValidationError("zero and one must be elements")

    def add_fill(x, y):
        if x == zero:
            return y
        if y == zero:
            return x
        return None

    def mul_fill(x, y):
        if x == zero or y == zero:
            return zero
        if x == one:
            return y
        if y == one:
            return x
        return None

    a = _complete_table(members, _symmetric(add), "add", fill=add_fill)
    m = _complete_table(members, dict(mul), "mul", fill=mul_fill)
    _check_semigroup(elements, a, "add", True)
    idempotent = all(a[(x, x)] == x for x in elements)

    def parse(text):
        if text not in members:
            raise ParseError(f"unknown element {text!r}")
        return text

    samples = [zero, one] + [e for e in elements if e not in (zero, one)][:2]
    return fold_adapter(
        zero,
        one,
        lambda x, y: a[(x, y)],
        lambda x, y: m[(x, y)],
        contains=lambda x: x in members,
        parse=parse,
        format=str,
        samples=tuple(samples),
        name=name,
        spec=spec,
        **_finite_flags(idempotent),
    )


def nat_product(inner: WeightDomain) -> WeightDomain:
    """``N x K`` with componentwise sum, zero ``(0, 0)`` and unit ``(1, 0)``.

    For two or more non-unit arguments the valuation repeats each ``x`` of a
    pair ``(m, x)`` ``m`` times (pairs with ``m = 0`` or ``x = 0`` are left out),
    applies the inner valuation and returns ``(1, v)``.  Singletons are
    returned unchanged, ``(0, 0)`` annihilates and ``(1, 0)`` is skipped.
    """
    zero = (0, inner.zero)
    one = (1, inner.zero)

    def contains(x):
        return (
            isinstance(x, tuple)
            and len(x) == 2
            and type(x[0]) is int
            and x[0] >= 0
            and inner.contains(x[1])
        )

    def add(p, q):
        return (p[0] + q[0], inner.add_op(p[1], q[1]))

    def val(ws):
        if len(ws) == 1:
            return ws[0]
        if zero in ws:
            return zero
        rest = [w for w in ws if w != one]
        if not rest:
            return one
        if len(rest) == 1:
            return rest[0]
        expanded = tuple(x for m, x in rest if m != 0 and x != inner.zero for _ in range(m))
        if not expanded:
            return one
        v = inner.val_op(expanded)
        return zero if v == inner.zero else (1, v)

    def parse(text):
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")")) or "," not in text:
            raise ParseError(f"expected a pair '(m,x)', got {text!r}")
        m, x = text[1:-1].split(",", 1)
        return (_parse_int(m.strip()), inner.parse_literal(x.strip()))

    nonzero = [s for s in inner.samples if s != inner.zero]
    samples = (zero, one, (2, nonzero[0]) if nonzero else (2, inner.zero), (1, nonzero[-1]) if nonzero else (3, inner.zero))
    return WeightDomain(
        name=f"nat-product({inner.name})",
        zero=zero,
        one=one,
        add_op=add,
        val_op=val,
        contains=contains,
        parse_literal=parse,
        format_literal=lambda p: f"({p[0]},{inner.format_literal(p[1])})",
        spec=f"nat-product {inner.spec}" if inner.spec else None,
        samples=samples,
    )


def matrix_magma(inner: WeightDomain, n: int) -> WeightDomain:
    """``n x n`` matrices over a fold-presentable ``inner`` domain with pointwise
    sum and matrix product as fold step."""
    if not inner.fold_presentable:
        raise ValidationError("matrix entries need a fold-presentable domain")
    if n < 1:
        raise ValidationError("matrix dimension must be positive")
    mul = inner.fold_step
    zero = tuple(tuple(inner.zero for _ in range(n)) for _ in range(n))
    one = tuple(tuple(inner.one if i == j else inner.zero for j in range(n)) for i in range(n))

    def contains(x):
        return (
            isinstance(x, tuple)
            and len(x) == n
            and all(isinstance(r, tuple) and len(r) == n and all(inner.contains(e) for e in r) for r in x)
        )

    def add(a, b):
        return tuple(tuple(inner.add_op(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))

    def times(a, b):
        return tuple(
            tuple(
                reduce(inner.add_op, (mul(a[i][k], b[k][j]) for k in range(n)), inner.zero)
                for j in range(n)
            )
            for i in range(n)
        )

    def parse(text):
        rows = [r for r in text.strip().strip("[]").split("],")]
        try:
            return tuple(tuple(inner.parse_literal(e.strip()) for e in r.strip(" []").split(",")) for r in rows)
        except ParseError:
            raise
        except Exception:
            raise ParseError(f"not a matrix literal: {text!r}") from None

    def fmt(x):
        return "[" + ",".join("[" + ",".join(inner.format_literal(e) for e in r) + "]" for r in x) + "]"

    return fold_adapter(
        zero,
        one,
        add,
        times,
        contains=contains,
        parse=parse,
        format=fmt,
        samples=(zero, one),
        name=f"matrix({inner.name},{n})",
        locally_finite=False,
    )


# -- domain spec text ---------------------------------------------------------

BUILTIN_SPECS = (
    "boolean",
    "nat",
    "tropical",
    "avgsup",
    "truncavg",
    "chain",
    "lattice",
    "magma-fold",
    "adjoin-unit",
    "nat-product",
)


def _read_table(path):
    with open(path) as fh:
        lines = []
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                lines.append((lineno, line.split()))
    return lines


def _load_lattice(path, spec):
    elements, bottom, top = None, None, None
    join, meet = {}, {}
    lines = _read_table(path)
    if not lines or lines[0][1] != ["lattice"]:
        raise ParseError("lattice table must start with 'lattice'", 1, 1, path)
    for lineno, toks in lines[1:]:
        head = toks[0]
        if head == "elements":
            elements = toks[1:]
        elif head in ("bottom", "top") and len(toks) == 2:
            if head == "bottom":
                bottom = toks[1]
            else:
                top = toks[1]
        elif head in ("join", "meet") and len(toks) == 4:
            (join if head == "join" else meet)[(toks[1], toks[2])] = toks[3]
        else:
            raise ParseError(f"unexpected line {' '.join(toks)!r}", lineno, 1, path)
    if elements is None or bottom is None or top is None:
        raise ParseError("lattice table needs 'elements', 'bottom' and 'top'", None, None, path)
    return lattice(elements, join, meet, bottom, top, name=f"lattice({os.path.basename(path)})", spec=spec)


def _load_magma(path, spec):
    elements, zero, one = None, None, None
    add, mul = {}, {}
    lines = _read_table(path)
    if not lines or lines[0][1] != ["magma"]:
        raise ParseError("magma table must start with 'magma'", 1, 1, path)
    for lineno, toks in lines[1:]:
        head = toks[0]
        if head == "elements":
            elements = toks[1:]
        elif head in ("zero", "one") and len(toks) == 2:
            if head == "zero":
                zero = toks[1]
            else:
                one = toks[1]
        elif head in ("add", "mul") and len(toks) == 4:
            (add if head == "add" else mul)[(toks[1], toks[2])] = toks[3]
        else:
            raise ParseError(f"unexpected line {' '.join(toks)!r}", lineno, 1, path)
    if elements is None or zero is None or one is None:
        raise ParseError("magma table needs 'elements', 'zero' and 'one'", None, None, path)
    return magma_fold(elements, zero, one, add, mul, name=f"magma({os.path.basename(path)})", spec=spec)


def make_domain(spec: str, base_dir: Optional[str] = None) -> WeightDomain:
    """Construct a domain from its text spec, e.g. ``"truncavg 2"`` or
    ``"adjoin-unit supavg"``.  Table paths are resolved against ``base_dir``."""
    toks = spec.split()
    if not toks:
        raise ParseError("empty domain spec")
    head, args = toks[0], toks[1:]
    simple = {"boolean": boolean, "nat": nat, "tropical": tropical, "avgsup": avgsup, "supavg": supavg, "avg2": avg2}
    if head in simple:
        if args:
            raise ParseError(f"{head} takes no arguments")
        return simple[head]()
    if head in ("truncavg", "chain"):
        if len(args) != 1:
            raise ParseError(f"{head} takes exactly one integer argument")
        n = _parse_int(args[0])
        return truncavg(n) if head == "truncavg" else chain(n)
    if head in ("lattice", "magma-fold"):
        if len(args) != 1:
            raise ParseError(f"{head} takes a table path")
        path = args[0]
        if base_dir and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        canonical = f"{head} {os.path.normpath(path)}"
        return _load_lattice(path, canonical) if head == "lattice" else _load_magma(path, canonical)
    if head in ("adjoin-unit", "nat-product"):
        if not args:
            raise ParseError(f"{head} needs an inner domain spec")
        inner = make_domain(" ".join(args), base_dir)
        return adjoin_unit(inner) if head == "adjoin-unit" else nat_product(inner)
    raise ParseError(f"unknown domain {head!r}")


# -- probes --------------------------------------------------------------------


@dataclass
class AxiomResult:
    law: str
    passed: bool
    witness: Optional[tuple] = None
    skipped: bool = False


@dataclass
class AxiomReport:
    domain: str
    results: list

    @property
    def ok(self):
        return all(r.passed for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.passed]

    def __getitem__(self, law):
        for r in self.results:
            if r.law == law:
                return r
        raise KeyError(law)


def _sequences(samples, max_len):
    for n in range(max_len + 1):
        yield from product(samples, repeat=n)


def axioms_probe(d: WeightDomain, samples=None, max_seq_len: int = 4) -> AxiomReport:
    """Exhaustively check the monoid and valuation laws on ``samples``.

    Failures are reported as data with the first counterexample found.
    """
    samples = tuple(dict.fromkeys(samples if samples is not None else d.samples))
    results = []

    def record(law, check):
        witness = None
        try:
            witness = check()
        except Exception as exc:  # a crash is a failure, not a probe error
            witness = ("error", repr(exc))
        results.append(AxiomResult(law, witness is None, witness))

    def assoc():
        for a, b, c in product(samples, repeat=3):
            if d.add_op(d.add_op(a, b), c) != d.add_op(a, d.add_op(b, c)):
                return (a, b, c)

    def comm():
        for a, b in product(samples, repeat=2):
            if d.add_op(a, b) != d.add_op(b, a):
                return (a, b)

    def neutral():
        for a in samples:
            if d.add_op(a, d.zero) != a or d.add_op(d.zero, a) != a:
                return (a,)

    def singleton():
        for a in samples:
            if d.val_op((a,)) != a:
                return (a,)

    def empty():
        if d.val_op(()) != d.one:
            return ()

    def annihilation():
        for s in _sequences(samples, max_seq_len - 1):
            for i in range(len(s) + 1):
                t = s[:i] + (d.zero,) + s[i:]
                if d.val_op(t) != d.zero:
                    return t

    def unit_deletion():
        for s in _sequences(samples, max_seq_len - 1):
            base = d.val_op(s)
            for i in range(len(s) + 1):
                t = s[:i] + (d.one,) + s[i:]
                if d.val_op(t) != base:
                    return t

    def fold():
        for s in _sequences(samples, max_seq_len):
            if d.val_op(s) != reduce(d.fold_step, s, d.one):
                return s

    record("add-associative", assoc)
    record("add-commutative", comm)
    record("zero-neutral", neutral)
    record("val-singleton", singleton)
    if d.one is None:
        results.append(AxiomResult("val-empty", True, skipped=True))
        nonempty = samples

        def annihilation_nounit():
            for n in range(1, max_seq_len + 1):
                for s in product(nonempty, repeat=n - 1):
                    for i in range(n):
                        t = s[:i] + (d.zero,) + s[i:]
                        if d.val_op(t) != d.zero:
                            return t

        record("zero-annihilates", annihilation_nounit)
        results.append(AxiomResult("unit-deletable", True, skipped=True))
    else:
        record("val-empty", empty)
        record("zero-annihilates", annihilation)
        record("unit-deletable", unit_deletion)
    if d.fold_presentable and d.one is not None:
        record("fold-consistent", fold)
    return AxiomReport(d.name, results)


def valuation_closure(d: WeightDomain, generators, cap: int = 10_000) -> set:
    """Compute ``val(F*)`` for a finite set ``F``.

    Exact for fold-presentable domains (breadth-first search over prefix
    values).  Otherwise multisets of generators are explored by size until two
    consecutive sizes contribute nothing new; that assumes ``val`` ignores the
    order of its arguments and is a probe rather than a proof.
    Raises :class:`ValidationError` once more than ``cap`` values appear.
    """
    gens = tuple(dict.fromkeys(d.check(g) for g in generators))
    if d.fold_presentable:
        seen = {d.one}
        frontier = [d.one]
        while frontier:
            nxt = []
            for y in frontier:
                for a in gens:
                    z = d.fold_step(y, a)
                    if z not in seen:
                        seen.add(z)
                        nxt.append(z)
                        if len(seen) > cap:
                            raise ValidationError(f"valuation closure exceeds {cap} elements")
            frontier = nxt
        return seen
    seen = {d.val_op(())}
    quiet = 0
    length = 0
    while quiet < 2:
        length += 1
        new = False
        for s in combinations_with_replacement(gens, length):
            v = d.val_op(s)
            if v not in seen:
                seen.add(v)
                new = True
                if len(seen) > cap:
                    raise ValidationError(f"valuation closure exceeds {cap} elements")
        quiet = 0 if new else quiet + 1
    return seen
