"""Line-oriented text formats for grammars, machines, decompositions and step
functions.  Lines starting with ``#`` are comments; blank lines are ignored.

Grammar::

    grammar
    domain avgsup
    terminals x + * ( )
    nonterminals E
    start E
    prod p1: E -> E + E @ 3

Machine::

    pda
    domain nat
    alphabet a b
    states q f
    stack Z A
    initial q Z
    final f
    trans t1: q, a, Z -> q, [A Z] @ 1

Decomposition::

    decomposition
    domain boolean
    brackets y1 y2
    target a b
    dfa
    states s t
    initial s
    accepting t
    edge s y1 t
    morph y1 -> 1 . a
    morph ~y1 -> 1 . eps

Step function::

    stepfn
    domain nat
    step 1 first.wcfg
    strong
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

from .chomsky import AlphabeticMorphism, BracketAlphabet, CSDecomposition, make_dfa
from .errors import ParseError, ValidationError
from .grammar import Production, WeightedGrammar
from .pushdown import Transition, WeightedPushdown
from .series import Monome
from .stepfn import StepFunction
from .weights import WeightDomain, make_domain

EPS = "eps"
# an id runs up to the first colon followed by whitespace or end of line
_ID = re.compile(r"\s*(\S*?):(?=\s|$)")


@dataclass
class _Line:
    number: int
    text: str
    source: str
    indent: int = 0

    @property
    def head(self):
        return self.text.split(None, 1)[0]

    @property
    def rest(self):
        parts = self.text.split(None, 1)
        return parts[1] if len(parts) > 1 else ""

    def error(self, message, fragment=None):
        col = self.indent + 1
        if fragment:
            k = self.text.find(fragment)
            if k >= 0:
                col += k
        return ParseError(message, self.number, col, self.source)


def _lines(text, source):
    out = []
    for k, raw in enumerate(text.splitlines(), 1):
        body = raw.strip()
        if body and not body.startswith("#"):
            out.append(_Line(k, body, source, len(raw) - len(raw.lstrip())))
    return out


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _expect_header(lines, word, source):
    if not lines:
        raise ParseError(f"empty input, expected '{word}'", 1, 1, source)
    if lines[0].text != word:
        raise lines[0].error(f"expected header '{word}'", lines[0].text)
    return lines[1:]


def _domain(line: _Line, base_dir):
    try:
        return make_domain(line.rest, base_dir)
    except ParseError as e:
        raise line.error(f"bad domain: {e}", line.rest) from None
    except (ValidationError, OSError) as e:
        raise line.error(f"bad domain: {e}", line.rest) from None


def _weight(d: WeightDomain, line: _Line, text):
    try:
        return d.parse(text.strip())
    except ValidationError as e:
        raise line.error(f"bad weight {text.strip()!r}: {e}", text.strip()) from None


def _spec_of(d: WeightDomain):
    if not d.spec:
        raise ValidationError(f"domain {d.name} has no text spec and cannot be written out")
    return d.spec


def _once(seen, line, key):
    if key in seen:
        raise line.error(f"duplicate '{key}' line", key)
    seen.add(key)


def _split_id(line, body, usage):
    m = _ID.match(body)
    if not m or not m.group(1):
        raise line.error(f"expected '{usage}'", body)
    return m.group(1), body[m.end() :]


def _split_weight(line, text):
    """``body @ weight`` -> (body, weight text or None)."""
    k = text.rfind(" @ ")
    if k < 0:
        if text.endswith(" @"):
            raise line.error("missing weight after '@'", "@")
        return text, None
    return text[:k], text[k + 3 :]


# -- grammars ----------------------------------------------------------------------------


def parse_grammar(text: str, source: str = "<grammar>", base_dir=None) -> WeightedGrammar:
    lines = _expect_header(_lines(text, source), "grammar", source)
    domain = None
    terminals = nonterminals = start = None
    prods, weights = [], {}
    seen = set()
    pending = []
    for line in lines:
        h = line.head
        if h == "domain":
            _once(seen, line, h)
            domain = _domain(line, base_dir)
        elif h == "terminals":
            _once(seen, line, h)
            terminals = line.rest.split()
        elif h == "nonterminals":
            _once(seen, line, h)
            nonterminals = line.rest.split()
        elif h == "start":
            _once(seen, line, h)
            start = line.rest.strip()
        elif h == "prod":
            pending.append(line)
        else:
            raise line.error(f"unknown directive {h!r}", h)
    if domain is None:
        raise ParseError("missing 'domain' line", None, None, source)
    for what, v in (("terminals", terminals), ("nonterminals", nonterminals), ("start", start)):
        if v is None:
            raise ParseError(f"missing '{what}' line", None, None, source)
    for line in pending:
        body = line.rest
        pid, rule = _split_id(line, body, "prod <id>: <lhs> -> <rhs> @ <weight>")
        rule, wtext = _split_weight(line, rule.strip())
        parts = rule.split("->", 1)
        if len(parts) != 2:
            raise line.error("missing '->'", rule)
        lhs = parts[0].strip()
        rhs = tuple(parts[1].split())
        if rhs == (EPS,) and EPS not in terminals and EPS not in nonterminals:
            rhs = ()
        prods.append(Production(pid, lhs, rhs))
        weights[pid] = _weight(domain, line, wtext) if wtext is not None else domain.one
    try:
        return WeightedGrammar(nonterminals, terminals, start, prods, weights, domain)
    except ParseError:
        raise
    except ValidationError as e:
        raise ParseError(str(e), None, None, source) from None


def load_grammar(path: str) -> WeightedGrammar:
    return parse_grammar(_read(path), path, os.path.dirname(os.path.abspath(path)))


def _check_names(names, what, reserved="", tokens=()):
    for n in names:
        if not n or n in tokens or any(c.isspace() for c in n) or any(c in n for c in reserved):
            raise ValidationError(f"{what} {n!r} cannot be written in the text format")


def dump_grammar(g: WeightedGrammar) -> str:
    d = g.domain
    _check_names([*g.terminals, *g.nonterminals], "symbol", tokens=("->", "@", EPS))
    _check_names([p.id for p in g.productions], "production id")
    out = [
        "grammar",
        f"domain {_spec_of(d)}",
        "terminals " + " ".join(g.terminals),
        "nonterminals " + " ".join(g.nonterminals),
        f"start {g.start}",
    ]
    for p in g.productions:
        rhs = " ".join(p.rhs)
        out.append(f"prod {p.id}: {p.lhs} -> {rhs + ' ' if rhs else ''}@ {d.format(g.weights[p.id])}")
    return "\n".join(out) + "\n"


# -- machines -------------------------------------------------------------------------------


def parse_pda(text: str, source: str = "<pda>", base_dir=None) -> WeightedPushdown:
    lines = _expect_header(_lines(text, source), "pda", source)
    domain = None
    states = stack = alphabet = None
    initial = finals = None
    pending = []
    seen = set()
    for line in lines:
        h = line.head
        if h == "domain":
            _once(seen, line, h)
            domain = _domain(line, base_dir)
        elif h == "alphabet":
            _once(seen, line, h)
            alphabet = line.rest.split()
        elif h == "states":
            _once(seen, line, h)
            states = line.rest.split()
        elif h == "stack":
            _once(seen, line, h)
            stack = line.rest.split()
        elif h == "initial":
            _once(seen, line, h)
            parts = line.rest.split()
            if len(parts) != 2:
                raise line.error("expected 'initial <state> <stack symbol>'", line.rest)
            initial = parts
        elif h == "final":
            _once(seen, line, h)
            finals = line.rest.split()
        elif h == "trans":
            pending.append(line)
        else:
            raise line.error(f"unknown directive {h!r}", h)
    if domain is None:
        raise ParseError("missing 'domain' line", None, None, source)
    for what, v in (("states", states), ("stack", stack), ("initial", initial), ("final", finals)):
        if v is None:
            raise ParseError(f"missing '{what}' line", None, None, source)
    ts, weights = [], {}
    for line in pending:
        body = line.rest
        tid, rule = _split_id(line, body, "trans <id>: <q>, <x>, <g> -> <p>, [<push>] @ <w>")
        rule, wtext = _split_weight(line, rule.strip())
        parts = rule.split("->", 1)
        if len(parts) != 2:
            raise line.error("missing '->'", rule)
        left = [s.strip() for s in parts[0].split(",")]
        if len(left) != 3:
            raise line.error("left side must be '<q>, <x|eps>, <stack symbol>'", parts[0].strip())
        right = parts[1].strip()
        if "," not in right or "[" not in right or not right.endswith("]"):
            raise line.error("right side must be '<p>, [<push>]'", right)
        target, push = right.split(",", 1)
        push = push.strip()
        if not (push.startswith("[") and push.endswith("]")):
            raise line.error("pushed word must be bracketed", push)
        label = None if left[1] == EPS else left[1]
        ts.append(Transition(tid, left[0], label, left[2], target.strip(), tuple(push[1:-1].split())))
        weights[tid] = _weight(domain, line, wtext) if wtext is not None else domain.one
    if alphabet is None:
        alphabet = list(dict.fromkeys(t.label for t in ts if t.label is not None))
    try:
        return WeightedPushdown(states, stack, initial[0], initial[1], finals, ts, weights, domain, alphabet)
    except ParseError:
        raise
    except ValidationError as e:
        raise ParseError(str(e), None, None, source) from None


def load_pda(path: str) -> WeightedPushdown:
    return parse_pda(_read(path), path, os.path.dirname(os.path.abspath(path)))


def dump_pda(m: WeightedPushdown) -> str:
    d = m.domain
    _check_names([*m.states, *m.alphabet, *m.stack], "symbol", ",[]", tokens=("->", "@", EPS))
    _check_names([t.id for t in m.transitions], "transition id")
    out = [
        "pda",
        f"domain {_spec_of(d)}",
        "alphabet " + " ".join(m.alphabet),
        "states " + " ".join(m.states),
        "stack " + " ".join(m.stack),
        f"initial {m.initial} {m.initial_stack}",
        "final " + " ".join(m.finals),
    ]
    for t in m.transitions:
        x = EPS if t.label is None else t.label
        out.append(f"trans {t.id}: {t.source}, {x}, {t.pop} -> {t.target}, [{' '.join(t.push)}] @ {d.format(m.weights[t.id])}")
    return "\n".join(out) + "\n"


# -- decompositions --------------------------------------------------------------------------


def parse_decomposition(text: str, source: str = "<decomposition>", base_dir=None) -> CSDecomposition:
    lines = _expect_header(_lines(text, source), "decomposition", source)
    domain = brackets = target = None
    states = initial = accepting = None
    edges, morph = [], []
    seen = set()
    in_dfa = False
    for line in lines:
        h = line.head
        if h == "dfa":
            _once(seen, line, h)
            in_dfa = True
        elif h == "domain":
            _once(seen, line, h)
            domain = _domain(line, base_dir)
        elif h == "brackets":
            _once(seen, line, h)
            brackets = line.rest.split()
        elif h == "target":
            _once(seen, line, h)
            target = line.rest.split()
        elif h in ("states", "initial", "accepting") and in_dfa:
            _once(seen, line, h)
            if h == "states":
                states = line.rest.split()
            elif h == "initial":
                initial = line.rest.strip()
            else:
                accepting = line.rest.split()
        elif h == "edge":
            parts = line.rest.split()
            if len(parts) != 3:
                raise line.error("expected 'edge <p> <letter> <q>'", line.rest)
            edges.append((line, parts))
        elif h == "morph":
            morph.append(line)
        else:
            raise line.error(f"unknown directive {h!r}", h)
    for what, v in (
        ("domain", domain), ("brackets", brackets), ("target", target), ("dfa", in_dfa or None),
        ("states", states), ("initial", initial), ("accepting", accepting),
    ):
        if v is None:
            raise ParseError(f"missing '{what}' line", None, None, source)
    try:
        b = BracketAlphabet(tuple(brackets))
        images = {}
        for line in morph:
            body = line.rest
            if "->" not in body:
                raise line.error("expected 'morph <letter> -> <weight> . <symbol|eps>'", body)
            letter, img = body.split("->", 1)
            letter = letter.strip()
            if " . " not in img:
                raise line.error("image must be '<weight> . <symbol|eps>'", img.strip())
            wtext, sym = img.rsplit(" . ", 1)
            sym = sym.strip()
            if letter in images:
                raise line.error(f"letter {letter!r} mapped twice", letter)
            images[letter] = Monome(_weight(domain, line, wtext), () if sym == EPS else (sym,))
        dfa = make_dfa(states, b.letters, initial, accepting, [tuple(p) for _, p in edges])
        h = AlphabeticMorphism(b.letters, target, domain, images)
        return CSDecomposition(b, dfa, h)
    except ParseError:
        raise
    except ValidationError as e:
        raise ParseError(str(e), None, None, source) from None


def load_decomposition(path: str) -> CSDecomposition:
    return parse_decomposition(_read(path), path, os.path.dirname(os.path.abspath(path)))


def dump_decomposition(dec: CSDecomposition) -> str:
    d = dec.morphism.domain
    dfa = dec.control
    out = [
        "decomposition",
        f"domain {_spec_of(d)}",
        "brackets " + " ".join(dec.brackets.base),
        "target " + " ".join(dec.morphism.target),
        "dfa",
        "states " + " ".join(dfa.states),
        f"initial {dfa.initial}",
        "accepting " + " ".join(s for s in dfa.states if s in dfa.accepting),
    ]
    for q in dfa.states:
        for a in dfa.alphabet:
            out.append(f"edge {q} {a} {dfa.delta[(q, a)]}")
    for s in dec.brackets.letters:
        m = dec.morphism.images[s]
        out.append(f"morph {s} -> {d.format(m.weight)} . {m.word[0] if m.word else EPS}")
    return "\n".join(out) + "\n"


# -- step functions ----------------------------------------------------------------------------


def parse_stepfn(text: str, source: str = "<stepfn>", base_dir=None) -> StepFunction:
    lines = _expect_header(_lines(text, source), "stepfn", source)
    domain = None
    alphabet = None
    strong = False
    steps = []
    seen = set()
    for line in lines:
        h = line.head
        if h == "domain":
            _once(seen, line, h)
            domain = _domain(line, base_dir)
        elif h == "alphabet":
            _once(seen, line, h)
            alphabet = line.rest.split()
        elif h == "strong":
            strong = True
        elif h == "step":
            if domain is None:
                raise line.error("'domain' must come before the steps", h)
            parts = line.rest.rsplit(None, 1)
            if len(parts) != 2:
                raise line.error("expected 'step <weight> <grammar-file>'", line.rest)
            a = _weight(domain, line, parts[0])
            path = parts[1]
            if base_dir and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            try:
                g = load_grammar(path)
            except OSError as e:
                raise line.error(f"cannot read {parts[1]}: {e.strerror}", parts[1]) from None
            steps.append((a, g))
        else:
            raise line.error(f"unknown directive {h!r}", h)
    if domain is None:
        raise ParseError("missing 'domain' line", None, None, source)
    try:
        return StepFunction(domain, tuple(steps), strong, alphabet)
    except ParseError:
        raise
    except ValidationError as e:
        raise ParseError(str(e), None, None, source) from None


def load_stepfn(path: str) -> StepFunction:
    return parse_stepfn(_read(path), path, os.path.dirname(os.path.abspath(path)))


def dump_stepfn(sf: StepFunction, directory: str, name: str = "stepfn") -> str:
    """Write the step grammars next to ``<name>.stepfn`` in ``directory`` and
    return the path of the step-function file."""
    os.makedirs(directory, exist_ok=True)
    d = sf.domain
    out = ["stepfn", f"domain {_spec_of(d)}", "alphabet " + " ".join(sf.alphabet)]
    for k, (a, g) in enumerate(sf.steps, 1):
        fname = f"{name}.step{k}.wcfg"
        with open(os.path.join(directory, fname), "w", encoding="utf-8") as fh:
            fh.write(dump_grammar(g))
        out.append(f"step {d.format(a)} {fname}")
    if sf.strong:
        out.append("strong")
    path = os.path.join(directory, f"{name}.stepfn")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
    return path


def load_any(path: str):
    """Load a grammar, machine, decomposition or step function by its header."""
    text = _read(path)
    lines = _lines(text, path)
    if not lines:
        raise ParseError("empty file", 1, 1, path)
    base = os.path.dirname(os.path.abspath(path))
    kinds = {
        "grammar": parse_grammar,
        "pda": parse_pda,
        "decomposition": parse_decomposition,
        "stepfn": parse_stepfn,
    }
    head = lines[0].text
    if head not in kinds:
        raise lines[0].error(f"unknown file kind {head!r}", head)
    return kinds[head](text, path, base)
