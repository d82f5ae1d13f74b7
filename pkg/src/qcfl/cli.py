"""Command-line front end.

Every command prints JSON (or a serialized artifact) on stdout.  Exit
statuses: 0 success, 1 validation or parse error, 2 divergence or exhausted
budget, 3 precondition violation, 4 a check that ran but found a
counterexample.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bridge, chomsky, formats, grammar, pushdown, stepfn, weights
from .errors import DivergenceError, PreconditionError, ValidationError
from .series import compare_up_to

DEFAULT_MAX_LEN = 6
DEFAULT_CAP = 100_000
CHECK_FAILED = 4


class _Fail(Exception):
    """A check completed and found a counterexample."""

    def __init__(self, payload):
        self.payload = payload


def _emit(obj, out):
    if isinstance(obj, str):
        out.write(obj if obj.endswith("\n") else obj + "\n")
    else:
        out.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _alphabet(obj):
    if isinstance(obj, grammar.WeightedGrammar):
        return tuple(obj.terminals)
    if isinstance(obj, pushdown.WeightedPushdown):
        return tuple(obj.alphabet)
    if isinstance(obj, stepfn.StepFunction):
        return tuple(obj.alphabet)
    if isinstance(obj, chomsky.CSDecomposition):
        return tuple(obj.morphism.target)
    raise ValidationError("unsupported artifact")


def parse_word(text, alphabet):
    """Split a word: characters when every symbol is one character long and the
    text has no spaces, whitespace-separated symbols otherwise."""
    if text is None:
        return ()
    if " " in text.strip() or any(len(s) != 1 for s in alphabet):
        return tuple(text.split())
    return tuple(text)


def _word_str(w, alphabet):
    if all(len(s) == 1 for s in alphabet):
        return "".join(w)
    return " ".join(w)


def _load(path, kind=None):
    obj = formats.load_any(path)
    expected = {
        "grammar": grammar.WeightedGrammar,
        "pda": pushdown.WeightedPushdown,
        "decomposition": chomsky.CSDecomposition,
        "stepfn": stepfn.StepFunction,
    }
    if kind and not isinstance(obj, expected[kind]):
        raise ValidationError(f"{path} is not a {kind} file")
    return obj


def _series(obj, cap):
    if isinstance(obj, chomsky.CSDecomposition):
        return chomsky.compose(obj).series(cap)
    if isinstance(obj, stepfn.StepFunction):
        return obj.series()
    return obj.series(cap)


def _domain_of(obj):
    if isinstance(obj, chomsky.CSDecomposition):
        return obj.morphism.domain
    return obj.domain


def _artifact_path(args):
    for name in ("grammar", "pda", "stepfn", "decomposition"):
        p = getattr(args, name, None)
        if p:
            return p, name
    raise ValidationError("no input file given")


# -- commands --------------------------------------------------------------------------


def cmd_validate(args):
    obj = formats.load_any(args.file)
    info = {"file": args.file, "valid": True}
    if isinstance(obj, grammar.WeightedGrammar):
        cycle = grammar.finite_derivations_check(obj)
        info.update(
            kind="grammar",
            domain=obj.domain.name,
            productions=len(obj.productions),
            proper=grammar.is_proper(obj),
            head_normal_form=grammar.is_head_normal_form(obj),
            finite_derivations=cycle is None,
        )
        if cycle:
            info["cycle"] = cycle
    elif isinstance(obj, pushdown.WeightedPushdown):
        info.update(
            kind="pda",
            domain=obj.domain.name,
            states=len(obj.states),
            transitions=len(obj.transitions),
            proper=pushdown.is_proper(obj),
            state_normalized=pushdown.is_state_normalized(obj),
        )
    elif isinstance(obj, chomsky.CSDecomposition):
        info.update(kind="decomposition", domain=obj.morphism.domain.name, brackets=len(obj.brackets))
    else:
        info.update(kind="stepfn", domain=obj.domain.name, steps=len(obj.steps), strong=obj.strong)
    return info


def cmd_eval(args):
    path, kind = _artifact_path(args)
    obj = _load(path, kind)
    alphabet = _alphabet(obj)
    d = _domain_of(obj)
    results = []
    machine = chomsky.compose(obj) if isinstance(obj, chomsky.CSDecomposition) else None
    for text in args.word or [""]:
        w = parse_word(text, alphabet)
        row = {"word": _word_str(w, alphabet)}
        if isinstance(obj, grammar.WeightedGrammar):
            ds = grammar.enumerate_derivations(obj, w, args.cap)
            value = d.zero
            for x in ds:
                value = d.add(value, grammar.derivation_weight(obj, x))
            row.update(value=d.format(value), derivation_count=len(ds))
        elif isinstance(obj, stepfn.StepFunction):
            row.update(value=d.format(obj.value(w)))
        else:
            m = machine or obj
            cs = pushdown.enumerate_computations(m, w, args.cap)
            value = d.zero
            for c in cs:
                value = d.add(value, pushdown.computation_weight(m, c))
            row.update(value=d.format(value), computation_count=len(cs))
        results.append(row)
    return results[0] if len(results) == 1 else results


def cmd_derivations(args):
    path, kind = _artifact_path(args)
    obj = _load(path, kind)
    alphabet = _alphabet(obj)
    w = parse_word(args.word, alphabet)
    d = obj.domain
    if isinstance(obj, grammar.WeightedGrammar):
        ds = grammar.enumerate_derivations(obj, w, args.cap)
        listed = [{"productions": list(x.productions), "weight": d.format(grammar.derivation_weight(obj, x))} for x in ds]
        return {"word": _word_str(w, alphabet), "count": len(ds), "derivations": listed}
    if isinstance(obj, pushdown.WeightedPushdown):
        cs = pushdown.enumerate_computations(obj, w, args.cap)
        listed = [
            {"transitions": list(c.transitions), "final_state": c.final_state, "weight": d.format(pushdown.computation_weight(obj, c))}
            for c in cs
        ]
        return {"word": _word_str(w, alphabet), "count": len(cs), "computations": listed}
    raise ValidationError("derivations needs a grammar or pda file")


CONVERSIONS = {
    "hnf": ("grammar", lambda g: formats.dump_grammar(grammar.to_head_normal_form(g))),
    "pda": ("grammar", lambda g: formats.dump_pda(bridge.grammar_to_pda(g))),
    "grammar": ("pda", lambda m: formats.dump_grammar(bridge.pda_to_grammar(m))),
    "normalize": ("pda", lambda m: formats.dump_pda(pushdown.state_normalize(m))),
    "one-state": (
        "pda",
        lambda m: formats.dump_pda(
            pushdown.to_one_state(m if pushdown.is_state_normalized(m) else pushdown.state_normalize(m))
        ),
    ),
}


def _write_or_return(text, output):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
        return {"written": output}
    return text


def cmd_convert(args):
    kind, fn = CONVERSIONS[args.target]
    return _write_or_return(fn(_load(args.input, kind)), args.output)


def cmd_decompose(args):
    g = _load(args.grammar, "grammar")
    return _write_or_return(formats.dump_decomposition(chomsky.decompose(g)), args.output)


def cmd_compose(args):
    dec = _load(args.decomposition, "decomposition")
    return _write_or_return(formats.dump_pda(chomsky.compose(dec)), args.output)


def cmd_stepfn_extract(args):
    m = _load(args.pda, "pda")
    sf = stepfn.extract_stepfn(m)
    path = formats.dump_stepfn(sf, args.out_dir, args.name)
    return {
        "stepfn": path,
        "steps": [{"weight": sf.domain.format(a), "productions": len(g.productions)} for a, g in sf.steps],
    }


def cmd_stepfn_eval(args):
    sf = _load(args.stepfn, "stepfn")
    alphabet = sf.alphabet
    d = sf.domain
    rows = []
    for text in args.word or [""]:
        w = parse_word(text, alphabet)
        steps = [k for k, (_, g) in enumerate(sf.steps, 1) if stepfn._member(g, w)]
        rows.append({"word": _word_str(w, alphabet), "value": d.format(sf.value(w)), "steps": steps})
    out = rows[0] if len(rows) == 1 else rows
    if args.strongness is not None:
        report = stepfn.strongness_probe(sf, alphabet, args.strongness)
        info = {
            "strong": report.strong,
            "max_len": report.max_len,
            "image": sorted(d.format(v) for v in report.image),
        }
        if report.witness is not None:
            info["witness"] = _word_str(report.witness, alphabet)
            info["overlaps"] = [_word_str(w, alphabet) for w, _ in report.overlaps]
            info["gaps"] = [_word_str(w, alphabet) for w in report.gaps]
        out = {"values": rows, "strongness": info}
    return out


def cmd_check_equiv(args):
    a = formats.load_any(args.a)
    b = formats.load_any(args.b)
    alphabet = tuple(dict.fromkeys(_alphabet(a) + _alphabet(b)))
    result = compare_up_to(_series(a, args.cap), _series(b, args.cap), alphabet, args.max_len)
    d = _domain_of(a)
    if result.equal:
        return {"equal": True, "max_len": args.max_len, "words_checked": result.checked}
    raise _Fail(
        {
            "equal": False,
            "max_len": args.max_len,
            "counterexample": _word_str(result.counterexample, alphabet),
            "left": d.format(result.left),
            "right": d.format(result.right),
        }
    )


def cmd_check_unambiguous(args):
    path, kind = _artifact_path(args)
    obj = _load(path, kind)
    if isinstance(obj, grammar.WeightedGrammar):
        w = grammar.unambiguity_probe(obj, args.max_len, args.cap)
    elif isinstance(obj, pushdown.WeightedPushdown):
        w = pushdown.unambiguity_probe(obj, args.max_len, args.cap)
    else:
        raise ValidationError("check-unambiguous needs a grammar or pda file")
    if w is None:
        return {"unambiguous": True, "max_len": args.max_len}
    raise _Fail({"unambiguous": False, "max_len": args.max_len, "witness": _word_str(w, _alphabet(obj))})


def cmd_probe_axioms(args):
    d = weights.make_domain(args.domain, os.getcwd())
    report = weights.axioms_probe(d, max_seq_len=args.max_seq_len)
    laws = []
    for r in report.results:
        row = {"law": r.law, "passed": r.passed}
        if r.skipped:
            row["skipped"] = True
        if r.witness is not None:
            row["witness"] = [d.format(x) if d.contains(x) else repr(x) for x in r.witness]
        laws.append(row)
    payload = {"domain": d.name, "ok": report.ok, "laws": laws}
    if not report.ok:
        raise _Fail(payload)
    return payload


# -- parser ----------------------------------------------------------------------------------


def _limits(p, max_len=False):
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration budget (default %(default)s)")
    if max_len:
        p.add_argument("--max-len", type=int, default=DEFAULT_MAX_LEN, help="probe length (default %(default)s)")


def _inputs(p, kinds):
    g = p.add_mutually_exclusive_group(required=True)
    for k in kinds:
        g.add_argument(f"--{k}", metavar="FILE")


def build_parser():
    parser = argparse.ArgumentParser(prog="qcfl", description="Quantitative context-free languages toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse a file and report its properties")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eval", help="evaluate the series of an artifact on words")
    _inputs(p, ("grammar", "pda", "stepfn", "decomposition"))
    p.add_argument("--word", action="append", help="word to evaluate (repeatable; empty string for eps)")
    _limits(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("derivations", help="list derivations or computations of a word")
    _inputs(p, ("grammar", "pda"))
    p.add_argument("--word", default="")
    _limits(p)
    p.set_defaults(func=cmd_derivations)

    p = sub.add_parser("convert", help="normal forms and grammar/automaton conversions")
    p.add_argument("target", choices=sorted(CONVERSIONS))
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("decompose", help="bracket decomposition of a grammar")
    p.add_argument("--grammar", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("compose", help="pushdown machine for a decomposition")
    p.add_argument("--decomposition", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("stepfn-extract", help="split a machine into a step function")
    p.add_argument("--pda", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--name", default="stepfn")
    p.set_defaults(func=cmd_stepfn_extract)

    p = sub.add_parser("stepfn-eval", help="evaluate a step function")
    p.add_argument("--stepfn", required=True)
    p.add_argument("--word", action="append")
    p.add_argument("--strongness", type=int, metavar="N", help="also probe the partition property up to length N")
    p.set_defaults(func=cmd_stepfn_eval)

    p = sub.add_parser("check-equiv", help="compare two series on all short words")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _limits(p, max_len=True)
    p.set_defaults(func=cmd_check_equiv)

    p = sub.add_parser("check-unambiguous", help="look for a word with two derivations")
    _inputs(p, ("grammar", "pda"))
    _limits(p, max_len=True)
    p.set_defaults(func=cmd_check_unambiguous)

    p = sub.add_parser("probe-axioms", help="check the valuation monoid laws of a domain")
    p.add_argument("--domain", required=True, help="domain spec, e.g. 'chain 3'")
    p.add_argument("--max-seq-len", type=int, default=5)
    p.set_defaults(func=cmd_probe_axioms)
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except _Fail as f:
        _emit(f.payload, out)
        return CHECK_FAILED
    except (ValidationError, OSError) as e:
        err.write(f"error: {e}\n")
        return 1
    except DivergenceError as e:
        err.write(f"divergence: {e}\n")
        return 2
    except PreconditionError as e:
        err.write(f"precondition: {e}\n")
        return 3
    _emit(result, out)
    return 0


def main_entry():
    sys.exit(main())
