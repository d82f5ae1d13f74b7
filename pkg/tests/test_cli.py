import json
from io import StringIO
from pathlib import Path

import pytest

from corpus import corpus
from qcfl.cli import main
from qcfl.formats import dump_grammar

FIX = Path(__file__).parent / "fixtures"


def run(*argv):
    out, err = StringIO(), StringIO()
    code = main([str(a) for a in argv], out=out, err=err)
    text = out.getvalue()
    return code, (json.loads(text) if text.strip() else None), err.getvalue()


def test_eval_expression_grammar():
    code, res, _ = run("eval", "--grammar", FIX / "expr.wcfg", "--word", "x*x+x*x", "--word", "x")
    assert code == 0
    assert res[0]["value"] == "5" and res[0]["derivation_count"] == 5
    assert res[1] == {"word": "x", "value": "inf", "derivation_count": 1}


def test_eval_pda_fixture():
    code, res, _ = run("eval", "--pda", FIX / "anbn-nat.pda", "--word", "ab", "--word", "ba")
    assert code == 0 and [r["computation_count"] for r in res] == [1, 0]


def test_derivations_catalan():
    code, res, _ = run("derivations", "--grammar", FIX / "catalan-nat.wcfg", "--word", "aaaa")
    assert code == 0 and res["count"] == 5 and len(res["derivations"]) == 5


@pytest.mark.parametrize("target", ["hnf", "normalize", "pda"])
def test_convert_preserves_series(tmp_path, target):
    src = FIX / "expr.wcfg"
    if target == "normalize":
        src = FIX / "anbn-nat.pda"
    dst = tmp_path / "out"
    assert run("convert", target, src, "-o", dst)[0] == 0
    code, res, _ = run("check-equiv", "--a", src, "--b", dst, "--max-len", 4)
    assert code == 0 and res["equal"]


@pytest.mark.parametrize("name, g, sigma", list(corpus()), ids=[c[0] for c in corpus()])
def test_decompose_compose_round_trip(tmp_path, name, g, sigma):
    gp, dp, mp = tmp_path / "g.wcfg", tmp_path / "g.dec", tmp_path / "g.pda"
    gp.write_text(dump_grammar(g))
    assert run("decompose", "--grammar", gp, "-o", dp)[0] == 0
    assert run("compose", "--decomposition", dp, "-o", mp)[0] == 0
    code, res, _ = run("check-equiv", "--a", gp, "--b", mp, "--max-len", 4)
    assert code == 0 and res["equal"], res


def test_check_equiv_mismatch_exit_code():
    code, res, _ = run("check-equiv", "--a", FIX / "catalan-nat.wcfg", "--b", FIX / "anbn-nat.pda", "--max-len", 3)
    assert code == 4 and res["equal"] is False


def test_check_unambiguous_witness():
    code, res, _ = run("check-unambiguous", "--grammar", FIX / "expr.wcfg", "--max-len", 5)
    assert code == 4 and res["witness"] == "x*x*x"


def test_parse_error_exit_code(tmp_path):
    p = tmp_path / "bad.wcfg"
    p.write_text("grammar\ndomain nat\nterminals a\nnonterminals S\nstart S\nprod p1 S -> a\n")
    code, _, err = run("validate", p)
    assert code == 1 and "bad.wcfg:6:" in err


def test_missing_file_exit_code(tmp_path):
    assert run("validate", tmp_path / "nope.wcfg")[0] == 1


def test_divergence_exit_code(tmp_path):
    p = tmp_path / "ss.wcfg"
    p.write_text("grammar\ndomain nat\nterminals a\nnonterminals S\nstart S\nprod p1: S -> S S\nprod p2: S -> eps\n")
    code, res, _ = run("validate", p)
    assert code == 0 and json.dumps(res).count("S") > 0
    code, _, err = run("eval", "--grammar", p, "--word", "")
    assert code == 2 and err.startswith("divergence")


def test_precondition_exit_code(tmp_path):
    code, _, err = run("stepfn-extract", "--pda", FIX / "anbn-nat.pda", "--out-dir", tmp_path)
    assert code == 3 and err.startswith("precondition")


def test_stepfn_extract_and_eval(tmp_path):
    code, res, _ = run("stepfn-extract", "--pda", FIX / "halves-chain.pda", "--out-dir", tmp_path, "--name", "h")
    assert code == 0 and Path(res["stepfn"]).exists()
    code, ev, _ = run("stepfn-eval", "--stepfn", res["stepfn"], "--word", "")
    assert code == 0


def test_stepfn_eval_overlap():
    code, res, _ = run("stepfn-eval", "--stepfn", FIX / "overlap.stepfn", "--word", "abc", "--strongness", 4)
    assert code == 0
    assert res["values"][0]["value"] == "3"
    assert res["strongness"]["strong"] is False and "abc" in res["strongness"]["overlaps"]


def test_probe_axioms():
    code, res, _ = run("probe-axioms", "--domain", "chain 3")
    assert code == 0 and res["ok"] and all(r["passed"] for r in res["laws"])
    code, res, _ = run("probe-axioms", "--domain", f"magma-fold {FIX / 'maxmin.magma'}")
    assert code in (0, 4) and res["laws"]


def test_output_is_deterministic(tmp_path):
    for argv in (["decompose", "--grammar"], ["convert", "hnf"], ["convert", "pda"]):
        outs = []
        for _ in range(2):
            o = StringIO()
            assert main(argv + [str(FIX / "expr.wcfg")], out=o) == 0
            outs.append(o.getvalue())
        assert outs[0] == outs[1] and outs[0]
