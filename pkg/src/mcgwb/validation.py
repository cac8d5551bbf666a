"""The atlas acceptance gate: every declared contract, checked by the engine."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional

from . import homology as H
from .mapclass import MappingClassEngine, normalize, power
from .words import abelianize, dehn_reduce, is_trivial, relator


@dataclass
class Check:
    id: str
    paper_label: str
    status: str  # pass | fail | undecided | skip
    evidence: str = ""

    def to_json(self) -> dict:
        return {"id": self.id, "paper_label": self.paper_label, "status": self.status,
                "evidence": self.evidence}


@dataclass
class Report:
    command: str
    config: dict
    checks: List[Check] = field(default_factory=list)

    def add(self, id, label, ok: Optional[bool], evidence=""):
        status = "undecided" if ok is None else ("pass" if ok else "fail")
        self.checks.append(Check(id, label, status, str(evidence)))

    def skip(self, id, label, why):
        self.checks.append(Check(id, label, "skip", why))

    @property
    def verdict(self) -> str:
        st = {c.status for c in self.checks}
        if "fail" in st:
            return "fail"
        if "undecided" in st:
            return "undecided"
        return "pass"

    def exit_code(self) -> int:
        return {"pass": 0, "fail": 1, "undecided": 2}[self.verdict]

    def to_json(self) -> dict:
        return {"schema": 1, "command": self.command, "config": self.config,
                "verdict": self.verdict, "checks": [c.to_json() for c in self.checks]}


def _out(eng, e1, e2):
    v = eng.equal_in_out(e1, e2)
    return (True if v.verdict == "Equal" else None if v.verdict == "Undecided" else False), v.evidence


def t(name, k=1):
    return (("t_" + name, k),)


def check_data(eng: MappingClassEngine, rep: Report):
    g = eng.genus
    atlas = eng.atlas
    for name in atlas.curve_names():
        c = atlas.curves[name]
        ok = abelianize(c.word, g) == c.homology and any(c.homology) and c.poly.is_simple()
        rep.add(f"data:{name}", "atlas data", ok, f"homology {c.homology}")
    for p, q in itertools.combinations(atlas.curve_names(), 2):
        cp, cq = atlas.curves[p], atlas.curves[q]
        want = 1 if q in cp.declared_one_intersection else 0
        got = cp.poly.meets(cq.poly)
        if got != want or want:
            rep.add(f"intersections:{p},{q}", "atlas data", got == want, f"declared {want}, drawn {got}")
    for alias, target in sorted(atlas.aliases.items()):
        rep.add(f"identify:{alias}={target}", "alpha_1 = a_1, beta = a_2, alpha_2i = b_i, alpha_2i+1 = c_i",
                True, "resolved by name")
    R = relator(g)
    for name in atlas.curve_names():
        tw = atlas.twist(name)
        fwd, inv = tw.automorphism, tw.inverse
        rel_ok = is_trivial(fwd(R), g) and is_trivial(inv(R), g)
        both = fwd.compose(inv)
        inv_ok = all(both.images[a] == (a + 1,) for a in range(2 * g)) if g >= 2 else \
            both.homology() == H.identity(2 * g)
        hom_ok = fwd.homology() == H.transvection(atlas.curves[name].homology)
        rep.add(f"twist:{name}", "t_c right-handed Dehn twist", rel_ok and inv_ok and hom_ok,
                f"relator {'ok' if rel_ok else 'broken'}, inverse {'ok' if inv_ok else 'broken'}, "
                f"transvection {'ok' if hom_ok else 'mismatch'}")


def check_commute(eng, rep):
    atlas = eng.atlas
    for p, q in itertools.combinations(atlas.curve_names(), 2):
        if q in atlas.curves[p].declared_one_intersection:
            continue
        ok, ev = _out(eng, t(p) + t(q), t(q) + t(p))
        rep.add(f"commute:{p},{q}", "disjoint curves give commuting twists", ok, ev)


def check_braid(eng, rep):
    atlas = eng.atlas
    for p, q in itertools.combinations(atlas.curve_names(), 2):
        if q not in atlas.curves[p].declared_one_intersection:
            continue
        ok, ev = _out(eng, t(p) + t(q) + t(p), t(q) + t(p) + t(q))
        rep.add(f"braid:{p},{q}", "braid relation t_a t_b t_a = t_b t_a t_b", ok, ev)
        for a, b in ((p, q), (q, p)):
            ok2 = eng.curve_eq(t(b) + t(a), b, a)
            rep.add(f"tbta:{a},{b}", "t_b t_a(b) = a", ok2)


def chain_relation(eng):
    g = eng.genus
    base = [("t_alpha1", 2)] + [(f"t_alpha{j}", 1) for j in range(2, 2 * g)]
    return normalize(power(base, 2 * g - 1)), ((f"t_alpha{2 * g + 1}", 2),)


def check_chain(eng, rep):
    lhs, rhs = chain_relation(eng)
    ok, ev = _out(eng, lhs, rhs)
    rep.add("chain", "chain relation (t_alpha1^2 t_alpha2 ... t_alpha2g-1)^(2g-1) = t_alpha2g+1^2", ok, ev)


def check_gamma(eng, rep):
    g = eng.genus
    for i in range(1, 2 * g + 1):
        a, b = f"alpha{i}", f"alpha{i + 1}"
        lhs = eng.apply(t(b, -1), a)
        rhs = eng.apply(t(a), b)
        rep.add(f"gamma:{i}", "t_alpha_i+1^-1(alpha_i) = t_alpha_i(alpha_i+1)", eng.same_curve(lhs, rhs))


def check_symmetries(eng, rep):
    g = eng.genus
    atlas = eng.atlas
    ident = eng.evaluate(())
    rg = eng.evaluate((("r", g),))
    rep.add("order:r", "r^g = id", rg == ident, "exact on generators")
    for name in atlas.curve_names():
        m = name[0] + str(int(name[1:]) % g + 1)
        if m in atlas.curves:
            rep.add(f"shift:{name}", "r(a_i, b_i, c_i) = (a_i+1, b_i+1, c_i+1)",
                    eng.curve_eq((("r", 1),), name, m))
            ok, ev = _out(eng, eng.conjugate_twist((("r", 1),), name), t(m))
            rep.add(f"equivariant:{name}", "r t_c r^-1 = t_r(c)", ok, ev)
    ok, ev = _out(eng, (("r_pi", 2),), ())
    rep.add("order:r_pi", "r_pi is an involution", ok, ev)
    n = 2 * g + 1
    for j in range(1, n + 1):
        rep.add(f"r_pi:alpha{j}", "r_pi(alpha_j) = alpha_2g+2-j",
                eng.curve_eq((("r_pi", 1),), f"alpha{j}", f"alpha{n + 1 - j}"))
    ok, ev = _out(eng, (("iota", 2),), ())
    rep.add("order:iota", "iota is an involution", ok, ev)
    for j in range(1, n + 1):
        ok, ev = _out(eng, (("iota", 1),) + t(f"alpha{j}"), t(f"alpha{j}") + (("iota", 1),))
        rep.add(f"iota-commutes:alpha{j}", "iota t_alpha_j = t_alpha_j iota", ok, ev)
    hi = H.homology_image((("iota", 1),), eng)
    rep.add("iota:homology", "iota acts by -1 on homology",
            hi == H.neg(H.identity(2 * g)) and eng.evaluate((("iota", 1),)).homology() == hi)


def lantern_instance(eng, k):
    """Both sides of t_ak t_ck t_ck+1 t_ak+2 = t_ak+1 t_d1 t_d2."""
    a = lambda i: f"a{(i - 1) % eng.genus + 1}"
    b = lambda i: f"b{(i - 1) % eng.genus + 1}"
    c = lambda i: f"c{(i - 1) % eng.genus + 1}"
    P = eng.parse
    phi1 = P(f"t_{b(k+1)} t_{a(k)}^-1 t_{c(k)} t_{a(k)}^-1 t_{a(k)} t_{a(k+1)}^-1 t_{c(k+1)} t_{a(k)}^-1")
    phi2 = P(f"t_{b(k+2)} t_{a(k)}^-1 t_{c(k+1)} t_{a(k)}^-1 t_{a(k+2)} t_{a(k)}^-1 t_{b(k+2)} t_{a(k)}^-1")
    td1 = eng.conjugate_twist(phi1, b(k + 1))
    td2 = normalize(list(phi2) + list(td1) + [(n, -e) for n, e in reversed(phi2)])
    lhs = P(f"t_{a(k)} t_{c(k)} t_{c(k+1)} t_{a(k+2)}")
    rhs = normalize(list(P(f"t_{a(k+1)}")) + list(td1) + list(td2))
    return lhs, rhs, phi1, phi2


def check_lantern(eng, rep):
    g = eng.genus
    if g < 3:
        rep.skip("lantern", "lantern relation t_d t_c t_b t_a = t_x t_y t_z", "needs g >= 3")
        return
    for k in range(1, g - 1):
        lhs, rhs, phi1, phi2 = lantern_instance(eng, k)
        ok, ev = _out(eng, lhs, rhs)
        rep.add(f"lantern:k={k}", "t_ak t_ck t_ck+1 t_ak+2 = t_ak+1 t_d1 t_d2", ok, ev)
        ak = f"a{k}"
        rep.add(f"lantern:phi-fix:k={k}", "phi_1(a_k) = a_k, phi_2(a_k) = a_k",
                eng.curve_eq(phi1, ak, ak) and eng.curve_eq(phi2, ak, ak))


def validate_atlas(genus: int, eng: Optional[MappingClassEngine] = None) -> Report:
    if eng is None:
        eng = MappingClassEngine(genus)
    rep = Report("validate-atlas", {"genus": genus})
    check_data(eng, rep)
    check_commute(eng, rep)
    check_braid(eng, rep)
    check_chain(eng, rep)
    check_gamma(eng, rep)
    check_symmetries(eng, rep)
    check_lantern(eng, rep)
    return rep


def relation_suite(genus: int, eng: Optional[MappingClassEngine] = None) -> Report:
    """The toolbox relations: conjugation, braid, commutation, lantern, chain."""
    if eng is None:
        eng = MappingClassEngine(genus)
    rep = Report("relations", {"genus": genus})
    check_commute(eng, rep)
    check_braid(eng, rep)
    check_chain(eng, rep)
    check_lantern(eng, rep)
    # t_f(a) = f t_a f^-1 for the symmetric generators and a few twists
    for f in ("r", "r_pi", "iota", "t_a1", "t_b1"):
        fe = eng.parse(f)
        for name in eng.atlas.curve_names():
            img = eng.apply(fe, name)
            tgt = next((m for m in eng.atlas.curve_names() if eng.same_curve(img, m)), None)
            if tgt is None:
                continue
            ok, ev = _out(eng, eng.conjugate_twist(fe, name), t(tgt))
            rep.add(f"conjugation:{f}:{name}", "t_f(a) = f t_a f^-1", ok, ev)
    return rep
