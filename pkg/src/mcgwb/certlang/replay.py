"""Replay: walk a certificate, discharging each step with one engine call."""
from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .. import indexexpr
from ..atlas import AtlasError
from ..mapclass import (Expr, ExprError, MappingClassEngine, engine, expand_braces, format_expr,
                        invert, normalize, parse_expr, power)
from ..words import Word
from .parser import (NAME, Certificate, CertSyntaxError, Cond, Loop, Stmt, compare, curve_tuple,
                     load, split_application, split_top)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TWIST_ATOM = re.compile(r"t_([A-Za-z][A-Za-z0-9_]*)(?:\^(-?\d+))?$")

# required twist sets of the three terminal axioms
CONCLUSIONS = {
    "humphries": lambda g: [f"alpha{j}" for j in range(1, 2 * g + 1)] + ["beta"],
    "lickorish": lambda g: ([f"a{i}" for i in range(1, g + 1)] + [f"b{i}" for i in range(1, g + 1)]
                            + [f"c{i}" for i in range(1, g)]),
    "alpha-chain": lambda g: [f"alpha{j}" for j in range(1, 2 * g + 2)],
}


class CertError(ValueError):
    """Usage-level problems: bad genus, missing lemma file."""


class StepError(ValueError):
    pass


@dataclass
class StepResult:
    id: str
    kind: str
    label: str
    status: str  # pass | fail | undecided
    evidence: str
    line: int
    col: int
    text: str = ""

    def to_json(self) -> dict:
        return {"id": self.id, "paper_label": self.label or self.kind, "status": self.status,
                "evidence": self.evidence, "line": self.line, "col": self.col}


@dataclass
class ReplayReport:
    cert: str
    genus: int
    params: Dict[str, int]
    steps: List[StepResult] = field(default_factory=list)
    derived: List[str] = field(default_factory=list)
    required: List[str] = field(default_factory=list)
    conclusion: str = ""
    conclusion_ok: bool = False
    halted_at: Optional[str] = None
    seconds: float = 0.0
    sites: list = field(default_factory=list, repr=False)

    @property
    def verdict(self) -> str:
        st = {s.status for s in self.steps}
        if "fail" in st:
            return "fail"
        if "undecided" in st:
            return "undecided"
        return "pass" if self.conclusion_ok else "fail"

    @property
    def undecided(self) -> int:
        return sum(s.status == "undecided" for s in self.steps)

    def exit_code(self) -> int:
        return {"pass": 0, "fail": 1, "undecided": 2}[self.verdict]

    def labels(self) -> Dict[str, str]:
        """Paper labels like ``(A7)`` mapped to their step status."""
        out = {}
        for s in self.steps:
            if re.fullmatch(r"\([A-Z]?\d+\)", s.label):
                out[s.label] = s.status
        return out

    def checks(self) -> List[dict]:
        rows = [s.to_json() for s in self.steps]
        rows.append({"id": f"{self.cert}:conclude", "paper_label": self.conclusion,
                     "status": "pass" if self.conclusion_ok else "fail",
                     "evidence": f"derived {len(self.derived)} twists; missing "
                                 f"{sorted(set(self.required) - set(self.derived)) or 'none'}"})
        return rows


# -- replay state ----------------------------------------------------------------

@dataclass
class _Shared:
    eng: MappingClassEngine
    curves: Dict[str, Tuple[Expr, str, Word, str]]  # name -> (expr, base, word, source text)
    derived: Set[str]
    results: List[StepResult]
    sites: list
    override: Dict[int, Dict[str, str]]
    counter: int = 0
    halted: bool = False


class _Scope:
    def __init__(self, shared: _Shared, env: Dict[str, int], prefix: str, base_dir: Optional[Path]):
        self.sh = shared
        self.env = env
        self.prefix = prefix
        self.base_dir = base_dir
        self.values: Dict[str, Expr] = {}
        self.lets: Dict[str, FrozenSet[str]] = {}
        self.known: Set[str] = set()
        self.twistwords: Dict[str, Tuple[Tuple[str, int], ...]] = {}
        self.exports: List[str] = []
        self.bindings: Optional[Dict[str, tuple]] = None  # set when run through 'use'

    @property
    def eng(self) -> MappingClassEngine:
        return self.sh.eng

    @property
    def genus(self) -> int:
        return self.sh.eng.genus

    # names
    def expand(self, text: str) -> str:
        return expand_braces(text, self.env, self.genus)

    def curve_name(self, name: str) -> str:
        """Canonical curve: atlas name, or a declared curve."""
        if name in self.sh.curves:
            return name
        try:
            return self.eng.atlas.resolve(name)
        except AtlasError:
            raise StepError(f"unknown curve {name!r}") from None

    def is_curve(self, name: str) -> bool:
        try:
            self.curve_name(name)
            return True
        except StepError:
            return False

    def elem_key(self, name: str) -> str:
        if name.startswith("t_") and self.is_curve(name[2:]):
            return "t_" + self.curve_name(name[2:])
        return name

    def twist_value(self, curve: str) -> Expr:
        c = self.curve_name(curve)
        if c in self.sh.curves:
            e, base, _, _ = self.sh.curves[c]
            return normalize(list(e) + list(self.twist_value(base)) + list(invert(e)))
        return (("t_" + c, 1),)

    def resolve(self, name: str) -> Optional[Expr]:
        if name in self.values:
            return self.values[name]
        if name.startswith("t_") and name[2:] in self.sh.curves:
            return self.twist_value(name[2:])
        return None

    def expr(self, text: str) -> Expr:
        try:
            return self.eng.canonical(parse_expr(text, self.resolve))
        except (ExprError, AtlasError) as e:
            raise StepError(f"cannot evaluate {text!r}: {e}") from None

    def leaves(self, text: str) -> Set[str]:
        out: Set[str] = set()
        for m in _IDENT.finditer(text):
            n = m.group(0)
            if n == "id":
                continue
            if n in self.lets:
                out |= self.lets[n]
            else:
                out.add(self.elem_key(n))
        return out

    def require_known(self, text: str):
        missing = sorted(n for n in self.leaves(text) if n not in self.known)
        if missing:
            raise StepError(f"not known to lie in the subgroup: {', '.join(missing)}")

    def curve_word(self, text: str) -> Word:
        s = text.strip()
        if re.fullmatch(r"\w+", s):
            c = self.curve_name(s)
            return self.sh.curves[c][2] if c in self.sh.curves else self.eng.atlas.curve(c).word
        try:
            head, inner = split_application(s)
        except ValueError as e:
            raise StepError(str(e)) from None
        return self.eng.apply(self.expr(head or "id"), self.curve_word(inner))

    def twist_word(self, text: str) -> Optional[Tuple[Tuple[str, int], ...]]:
        atoms = [a for a in re.split(r"[\s*]+", text.strip()) if a]
        out = []
        for a in atoms:
            m = _TWIST_ATOM.match(a)
            if not m or not self.is_curve(m.group(1)):
                return None
            out.append((self.curve_name(m.group(1)), int(m.group(2) or 1)))
        return tuple(out) if out else None

    def twistword_value(self, tw) -> Expr:
        e: List[Tuple[str, int]] = []
        for c, k in tw:
            e += power(self.twist_value(c), k)
        return normalize(e)

    def define(self, name: str, value: Expr, tw=None):
        key = self.elem_key(name)
        self.values[key] = value
        self.known.add(key)
        self.lets.pop(key, None)
        if tw is not None:
            self.twistwords[key] = tw
        elif key.startswith("t_") and self.is_curve(key[2:]):
            self.twistwords[key] = ((key[2:], 1),)
        return key


# -- checks ------------------------------------------------------------------------

def _out_eq(sc: _Scope, e1: Expr, e2: Expr) -> Tuple[Optional[bool], str]:
    v = sc.eng.equal_in_out(e1, e2)
    ok = True if v.verdict == "Equal" else (None if v.verdict == "Undecided" else False)
    return ok, f"{v.verdict}: {v.evidence}"


def _same(sc: _Scope, w1: Word, w2: Word) -> Optional[bool]:
    return sc.eng.same_curve(w1, w2)


def _curves_map(sc: _Scope, h: Expr, src: List[str], dst: List[str]) -> Tuple[Optional[bool], str]:
    """One multicurve image check: h(src_i) = dst_i for all i."""
    verdict: Optional[bool] = True
    bad = []
    for s, d in zip(src, dst):
        r = _same(sc, sc.eng.apply(h, sc.curve_word(s)), sc.curve_word(d))
        if r is False:
            verdict = False
            bad.append(f"{s} -/-> {d}")
        elif r is None and verdict:
            verdict = None
            bad.append(f"{s} -> {d} undecided")
    return verdict, ("image matches" if verdict else "; ".join(bad))


def _step_member(sc, f):
    sc.require_known(f["expr"])
    value = sc.expr(f["expr"])
    name = sc.elem_key(f["name"])
    tw = None
    if "claim" in f:
        claim = sc.expr(f["claim"])
        tw = sc.twist_word(f["claim"])
        ok, ev = _out_eq(sc, value, claim)
        value = claim
    elif name.startswith("t_") and sc.is_curve(name[2:]):
        claim = sc.twist_value(name[2:])
        ok, ev = _out_eq(sc, value, claim)
        value = claim
    else:
        ok, ev = True, "product of known elements"
    if ok:
        sc.define(name, value, tw)
        _note_twist(sc, name)
    return ok, ev


def _note_twist(sc, key):
    tw = sc.twistwords.get(key)
    if tw and len(tw) == 1 and tw[0][1] in (1, -1) and key == "t_" + tw[0][0]:
        sc.sh.derived.add(tw[0][0])


def _step_twist_of(sc, f):
    sc.require_known(f["expr"])
    h = sc.expr(f["expr"])
    src, dst = f["src"].strip(), f["dst"].strip()
    if sc.is_curve(src):
        if "claim" in f:
            raise StepError("a curve source takes no '= <twist word>' target")
        key = "t_" + sc.curve_name(src)
        if key not in sc.known:
            raise StepError(f"{key} is not known to lie in the subgroup")
        target = sc.curve_name(dst)
        ok, ev = _curves_map(sc, h, [src], [dst])
        if ok:
            k = sc.define("t_" + target, sc.twist_value(target))
            _note_twist(sc, k)
        return ok, ev
    skey = sc.elem_key(src)
    if skey not in sc.known:
        raise StepError(f"{src} is not known to lie in the subgroup")
    stw = sc.twistwords.get(skey)
    if stw is None:
        raise StepError(f"{src} is not recorded as a product of twists")
    if "claim" not in f:
        raise StepError("twist-word source needs '= <twist word>' target")
    ttw = sc.twist_word(f["claim"])
    if ttw is None:
        raise StepError(f"target {f['claim']!r} is not a twist word")
    if [k for _, k in stw] != [k for _, k in ttw]:
        raise StepError("source and target exponents differ")
    ok, ev = _curves_map(sc, h, [c for c, _ in stw], [c for c, _ in ttw])
    if ok:
        k = sc.define(dst, sc.twistword_value(ttw), ttw)
        _note_twist(sc, k)
    return ok, ev


def _step_curve_eq(sc, f):
    h = sc.expr(f["expr"])
    src = split_top(f["src"])
    dst = curve_tuple(f["dst"])
    if len(src) != len(dst):
        raise StepError("source and target tuples differ in length")
    return _curves_map(sc, h, src, dst)


def _step_relation(sc, f):
    rel, inst = f["rel"], f["instance"]
    if rel == "braid":
        names = inst.split()
        if len(names) != 2:
            raise StepError("braid takes two curves")
        p, q = (sc.twist_value(n) for n in names)
        return _out_eq(sc, p + q + p, q + p + q)
    lhs, sep, rhs = inst.partition("=")
    if not sep:
        raise StepError(f"{rel} instance needs '='")
    L, R = lhs.split(), rhs.split()
    if rel == "lantern":
        if len(L) != 4 or len(R) != 3:
            raise StepError("lantern takes four boundary curves = three interior curves")
        e1 = normalize([x for n in L for x in sc.twist_value(n)])
        e2 = normalize([x for n in R for x in sc.twist_value(n)])
        return _out_eq(sc, e1, e2)
    # chain: (t_c1^2 t_c2 ... t_ck)^k = t_d t_e for an odd chain c1..ck
    k = len(L)
    if k % 2 == 0 or len(R) != 2:
        raise StepError("chain takes an odd chain = two boundary curves")
    base = power(sc.twist_value(L[0]), 2) + [x for n in L[1:] for x in sc.twist_value(n)]
    e1 = normalize(power(base, k))
    e2 = normalize([x for n in R for x in sc.twist_value(n)])
    return _out_eq(sc, e1, e2)


def _step_out_eq(sc, f):
    return _out_eq(sc, sc.expr(f["lhs"]), sc.expr(f["rhs"]))


_STEPS = {"member": _step_member, "twist-of": _step_twist_of, "curve-eq": _step_curve_eq,
          "relation": _step_relation, "out-eq": _step_out_eq}


# -- interpreter ---------------------------------------------------------------------

def _cond(sc, text: str) -> bool:
    m = re.fullmatch(r"\s*(.+?)\s*(>=|<=|==|!=|>|<)\s*(.+?)\s*", text)
    if not m:
        raise StepError(f"bad condition {text!r}")
    ev = lambda s: indexexpr.evaluate(s.strip("{} "), sc.env)
    return compare(ev(m.group(1)), m.group(2), ev(m.group(3)))


def _envtag(env: Dict[str, int]) -> str:
    loops = {k: v for k, v in env.items() if k not in ("g",)}
    return "[" + ",".join(f"{k}={v}" for k, v in sorted(loops.items())) + "]" if loops else ""


def _record(sc: _Scope, st: Stmt, status: str, evidence: str, text: str):
    sid = f"{sc.prefix}L{st.line}{_envtag(sc.env)}"
    sc.sh.results.append(StepResult(sid, st.kind, st.label, status, evidence, st.line, st.col, text))
    if status != "pass":
        sc.sh.halted = True


def _run(nodes, sc: _Scope):
    for node in nodes:
        if sc.sh.halted:
            return
        if isinstance(node, Loop):
            lo = indexexpr.evaluate(node.lo.strip("{} "), sc.env)
            hi = indexexpr.evaluate(node.hi.strip("{} "), sc.env)
            saved = sc.env.get(node.var)
            for v in range(lo, hi + 1):
                sc.env[node.var] = v
                _run(node.body, sc)
            if saved is None:
                sc.env.pop(node.var, None)
            else:
                sc.env[node.var] = saved
        elif isinstance(node, Cond):
            _run(node.body if _cond(sc, node.cond) else node.orelse, sc)
        else:
            _stmt(node, sc)


def _stmt(st: Stmt, sc: _Scope):
    if st.checkable:
        _step(st, sc)
        return
    try:
        _declaration(st, sc)
    except (StepError, ExprError, AtlasError, ValueError, KeyError) as e:
        _record(sc, st, "fail", f"error: {e}", st.kind)


def _declaration(st: Stmt, sc: _Scope):
    f = {k: sc.expand(v) for k, v in st.fields.items()}
    if st.kind in ("assume", "let"):
        name = f["name"]
        if sc.elem_key(name) in sc.known and st.kind == "let":
            raise StepError(f"cannot rebind known element {name}")
        if st.kind == "assume":
            sc.define(name, sc.expr(f["expr"]))
        else:
            leaves = frozenset(sc.leaves(f["expr"]))
            sc.values[name] = sc.expr(f["expr"])
            sc.lets[name] = leaves
        return
    if st.kind == "require":
        if sc.bindings is None:
            # standalone: the default value is assumed
            if sc.elem_key(f["name"]) not in sc.known:
                sc.define(f["name"], sc.expr(f["expr"]),
                          sc.twist_word(f["expr"]) if f["mode"] == "=" else None)
        else:
            _hypothesis(st, f, sc)
        return
    if st.kind == "curve":
        _declare_curve(sc, st, f)
        return
    if st.kind == "export":
        for n in (x.strip() for x in f["names"].split(",")):
            key = sc.elem_key(n)
            if key not in sc.known:
                _record(sc, st, "fail", f"cannot export {n}: not derived", f["names"])
                return
            sc.exports.append(key)
        return
    if st.kind == "use":
        _use(st, f, sc)
        return


def _step(st: Stmt, sc: _Scope):
    try:
        f = {k: sc.expand(v) for k, v in st.fields.items()}
    except (ValueError, KeyError) as e:
        _record(sc, st, "fail", f"error: {e}", st.kind)
        return
    idx = sc.sh.counter
    sc.sh.counter += 1
    if idx in sc.sh.override:
        f = dict(sc.sh.override[idx])
    sc.sh.sites.append((idx, st.kind, dict(f), sc.genus))
    text = " ".join(f"{k}={v}" for k, v in f.items())
    try:
        ok, ev = _STEPS[st.kind](sc, f)
    except (StepError, ExprError, AtlasError, ValueError, KeyError) as e:
        ok, ev = False, f"error: {e}"
    status = "pass" if ok else ("undecided" if ok is None else "fail")
    _record(sc, st, status, ev, text)


def _declare_curve(sc, st, f):
    name, src = f["name"], f["curve"]
    norm = " ".join(src.split())
    if name in sc.sh.curves:
        if sc.sh.curves[name][3] != norm:
            raise StepError(f"curve {name} redeclared differently")
        return
    if sc.is_curve(name):
        raise StepError(f"{name} already names an atlas curve")
    # E1 ( E2 ( c ) ) flattens to E1 E2 applied to c
    heads, s = [], src.strip()
    while not re.fullmatch(r"\w+", s):
        head, s = split_application(s)
        heads.append(sc.expr(head or "id"))
    expr = normalize([x for h in heads for x in h])
    word = sc.curve_word(src)
    sc.sh.curves[name] = (expr, sc.curve_name(s), word, norm)


def _hypothesis(st: Stmt, f, child: _Scope):
    """A lemma's 'require' checked against the caller's bound element."""
    name = f["name"]
    lemma = getattr(child, "lemma", "lemma")
    if name not in child.bindings:
        _record(child, st, "fail", f"{lemma}: hypothesis {name} not bound", name)
        return
    mine, value, tw = child.bindings.pop(name)
    if f["mode"] == "=":
        want = child.twist_word(f["expr"])
        if tw is not None and want is not None and tw == want:
            ok, ev = True, "same twist word"
        else:
            ok, ev = _out_eq(child, value, child.expr(f["expr"]))
        idx = child.sh.counter
        child.sh.counter += 1
        child.sh.sites.append((idx, "hypothesis", {}, child.genus))
        hyp = Stmt("hypothesis", {}, st.line, st.col, f"{lemma} hypothesis {name}")
        _record(child, hyp, "pass" if ok else ("undecided" if ok is None else "fail"),
                f"{mine}: {ev}", name)
        if not ok:
            return
    child.define(name, value, tw)


def _use(st: Stmt, f, sc: _Scope):
    lemma = f["lemma"]
    path = (sc.base_dir or Path(".")) / f"{lemma}.cert"
    if not path.exists():
        raise CertError(f"lemma certificate {path} not found")
    sub = load(path)
    binds = dict(re.findall(r"(\w+)\s*=\s*(\S+)", f.get("bindings", "")))
    env = {"g": sc.genus}
    env.update(sub.params)
    for k, v in list(binds.items()):
        if k in sub.params:
            env[k] = indexexpr.evaluate(v, sc.env)
            del binds[k]
    if not sub.admits(sc.genus):
        _record(sc, st, "fail", f"{lemma} needs genus {sub.constraint[0]} {sub.constraint[1]}", lemma)
        return
    tag = ",".join(f"{k}={env[k]}" for k in sub.params)
    child = _Scope(sc.sh, env, f"{sc.prefix}{lemma}[{tag}]/", path.parent)
    child.lemma = lemma
    child.bindings = {}
    for name, mine_text in binds.items():
        name = child.expand(name)
        mine = sc.elem_key(mine_text)
        if mine not in sc.known:
            _record(sc, st, "fail", f"{lemma}: {mine} is not known", lemma)
            return
        child.bindings[name] = (mine, sc.values[mine], sc.twistwords.get(mine))
    _run(sub.body, child)
    if sc.sh.halted:
        return
    if child.bindings:
        _record(sc, st, "fail", f"{lemma}: unknown bindings {sorted(child.bindings)}", lemma)
        return
    for key in child.exports:
        mine = sc.define(key, child.values[key], child.twistwords.get(key))
        _note_twist(sc, mine)


# -- entry points ------------------------------------------------------------------------

def replay(cert: Certificate, genus: int, params: Optional[Dict[str, int]] = None,
           eng: Optional[MappingClassEngine] = None,
           override: Optional[Dict[int, Dict[str, str]]] = None) -> ReplayReport:
    if not cert.admits(genus):
        raise CertError(f"{cert.name} needs genus {cert.constraint[0]} {cert.constraint[1]}, got {genus}")
    t0 = time.perf_counter()
    env = {"g": genus}
    env.update(cert.params)
    if params:
        unknown = set(params) - set(cert.params)
        if unknown:
            raise CertError(f"unknown parameters {sorted(unknown)}")
        env.update(params)
    eng = eng or engine(genus)
    shared = _Shared(eng, {}, set(), [], [], dict(override or {}))
    base = cert.path.parent if cert.path else None
    sc = _Scope(shared, env, f"{cert.name}:", base)
    _run(cert.body, sc)
    rep = ReplayReport(cert.name, genus, {k: env[k] for k in cert.params}, shared.results,
                       sorted(shared.derived), sites=shared.sites)
    what = cert.conclusion or ""
    rep.conclusion = what
    if shared.halted:
        bad = next(s for s in shared.results if s.status != "pass")
        rep.halted_at = f"{bad.id} {bad.label}".strip()
        rep.conclusion_ok = False
    elif what == "exports":
        rep.required = sorted(k[2:] for k in sc.exports if k.startswith("t_"))
        rep.conclusion_ok = bool(sc.exports)
    else:
        need = [eng.atlas.resolve(n) for n in CONCLUSIONS[what](genus)]
        rep.required = sorted(set(need))
        rep.conclusion_ok = set(need) <= shared.derived
    rep.seconds = time.perf_counter() - t0
    return rep
