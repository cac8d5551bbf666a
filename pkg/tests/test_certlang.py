import random
from pathlib import Path

import pytest

from mcgwb.certlang import CertError, CertSyntaxError, load, parse, replay
from mcgwb.certlang.mutate import mutants

CERTS = Path(__file__).resolve().parents[1] / "certs"


def cert(name):
    return load(CERTS / f"{name}.cert")


def test_syntax_errors_carry_position():
    with pytest.raises(CertSyntaxError) as e:
        parse("cert t genus >= 2 replay 2\nmember X = t_a1 ^ \nconclude humphries\n")
    assert (e.value.line, e.value.col) == (2, 18)
    with pytest.raises(CertSyntaxError) as e:
        parse("cert t genus >= 2 replay 2\n  frobnicate\nconclude humphries\n")
    assert (e.value.line, e.value.col) == (2, 3)
    with pytest.raises(CertSyntaxError):
        parse("member X = t_a1\n")
    with pytest.raises(CertSyntaxError):
        parse("cert t genus >= 2 replay 2\nfor i in 1..2\nconclude humphries\n")
    with pytest.raises(CertSyntaxError):
        parse("cert t genus >= 2 replay 2\nconclude humphries\nassume X = t_a1\n")
    with pytest.raises(CertSyntaxError):
        parse("cert t genus >= 2 replay 2\ncurve-eq t_a1 ( a1, b1 ) == a1\nconclude humphries\n")


def test_minimal_cert_fails_at_conclusion():
    c = parse("cert t genus >= 2 replay 2\nassume H = t_alpha1\nconclude humphries\n")
    rep = replay(c, 2)
    assert rep.steps == [] and rep.verdict == "fail" and not rep.conclusion_ok


def test_unknown_name_fails_its_step():
    c = parse("cert t genus >= 2 replay 2\nassume H = t_alpha1\nmember X = H * foo\n"
              "conclude humphries\n")
    rep = replay(c, 2)
    assert rep.verdict == "fail" and "foo" in rep.steps[0].evidence
    assert rep.steps[0].line == 3


def test_genus_constraint():
    with pytest.raises(CertError):
        replay(cert("thm3-6"), 2)
    with pytest.raises(CertError):
        replay(cert("lem4-5"), 3, params={"nope": 1})


def test_thm3_5_g2_derives_alpha_chain():
    rep = replay(cert("thm3-5"), 2)
    assert rep.verdict == "pass"
    alphas = [f"alpha{j}" for j in range(1, 6)]
    from mcgwb.mapclass import engine
    eng = engine(2)
    assert {eng.atlas.resolve(a) for a in alphas} <= set(rep.derived)
    assert len(rep.required) == 5


def test_thm3_6_g3():
    rep = replay(cert("thm3-6"), 3)
    assert rep.verdict == "pass" and rep.undecided == 0
    assert rep.conclusion == "humphries"


def test_thm3_6_wrong_curve_target():
    c = cert("thm3-6")
    base = replay(c, 3)
    idx = next(i for i, (_, kind, f, _) in enumerate(base.sites)
               if kind == "curve-eq" and f.get("dst") == "gamma5")
    fields = dict(base.sites[idx][2])
    fields["dst"] = "gamma4"
    rep = replay(c, 3, override={idx: fields})
    assert rep.verdict == "fail"
    bad = next(s for s in rep.steps if s.status != "pass")
    assert bad.kind == "curve-eq" and rep.halted_at


def test_lemma_hypothesis_is_checked():
    text = ("cert t genus >= 3 replay 3\n"
            "assume f1 = t_alpha1\nassume f2 = t_alpha2\n"
            "use lem3-7 f1=f1 f2=f2\nconclude humphries\n")
    c = parse(text)
    c.path = CERTS / "t.cert"
    rep = replay(c, 3)
    assert rep.verdict == "fail"
    assert any("hypothesis" in s.label for s in rep.steps)


def test_loops_and_conditions():
    text = ("cert t genus >= 2 replay 2\n"
            "assume A = t_alpha1\n"
            "assume B = t_alpha2\n"
            "member t_alpha1 = A\n"
            "member t_alpha2 = B\n"
            "for i in 1..2\n"
            "  if i == 1\n"
            "    curve d{i} = t_alpha1 ( alpha{i+1} )\n"
            "    twist-of t_alpha1 ( alpha{i+1} ) as d{i}\n"
            "  else\n"
            "    member X{i} = A\n"
            "  end\n"
            "end\n"
            "conclude humphries\n")
    rep = replay(parse(text), 2)
    assert [s.kind for s in rep.steps] == ["member", "member", "twist-of", "member"]
    assert all(s.status == "pass" for s in rep.steps)


def test_mutants_fail():
    c = cert("thm3-5")
    base = replay(c, 2)
    for mut, rep in mutants(c, 2, count=5, seed=1, base=base):
        assert rep.verdict != "pass", mut.describe()


def test_labels_present():
    rep = replay(cert("lem4-7"), 7)
    assert rep.verdict == "pass"
    assert {f"({i})" for i in range(1, 9)} <= set(rep.labels())
