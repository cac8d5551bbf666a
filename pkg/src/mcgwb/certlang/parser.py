"""Line-oriented certificate grammar.

Every statement keeps the line and column it came from so replay failures
can point back at the source.  Brace index expressions (``a{k+2}``) are kept
verbatim here and expanded at replay time, once loop variables are bound.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from ..mapclass import ExprError, parse_expr

NAME = r"(?:\w|\{[^{}]*\})+"
_OPS = (">=", "<=", "==", "!=", ">", "<")


class CertSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int, path: str = "<cert>"):
        super().__init__(f"{path}:{line}:{col}: {msg}")
        self.line, self.col, self.path = line, col, path


@dataclass
class Stmt:
    kind: str
    fields: Dict[str, str]
    line: int
    col: int
    label: str = ""

    @property
    def checkable(self) -> bool:
        return self.kind in STEP_KINDS


@dataclass
class Loop:
    var: str
    lo: str
    hi: str
    body: list
    line: int
    col: int


@dataclass
class Cond:
    cond: str
    body: list
    orelse: list
    line: int
    col: int


Node = Union[Stmt, Loop, Cond]

STEP_KINDS = ("member", "twist-of", "curve-eq", "relation", "out-eq")


@dataclass
class Certificate:
    name: str
    constraint: Tuple[str, int]
    replay: List[int]
    params: Dict[str, int] = field(default_factory=dict)
    body: List[Node] = field(default_factory=list)
    path: Optional[Path] = None

    def admits(self, genus: int) -> bool:
        return compare(genus, *self.constraint)

    @property
    def conclusion(self) -> Optional[str]:
        last = self.body[-1] if self.body else None
        return last.fields["what"] if isinstance(last, Stmt) and last.kind == "conclude" else None

    def steps(self) -> List[Stmt]:
        """Checkable statements in source order (loops not unrolled)."""
        out: List[Stmt] = []

        def walk(nodes):
            for n in nodes:
                if isinstance(n, Stmt):
                    if n.checkable:
                        out.append(n)
                elif isinstance(n, Loop):
                    walk(n.body)
                else:
                    walk(n.body)
                    walk(n.orelse)
        walk(self.body)
        return out


def compare(a: int, op: str, b: int) -> bool:
    return {">=": a >= b, "<=": a <= b, "==": a == b, "!=": a != b, ">": a > b, "<": a < b}[op]


# -- helpers shared with replay ------------------------------------------------

def split_application(text: str) -> Tuple[str, str]:
    """``E ( x, y )`` -> (``E``, ``x, y``); the argument is the trailing group."""
    s = text.rstrip()
    if not s.endswith(")"):
        raise ValueError("expected a parenthesised curve argument")
    depth = 0
    for i in range(len(s) - 1, -1, -1):
        if s[i] == ")":
            depth += 1
        elif s[i] == "(":
            depth -= 1
            if depth == 0:
                return s[:i].strip(), s[i + 1:-1].strip()
    raise ValueError("unbalanced parentheses")


def split_top(text: str, sep: str = ",") -> List[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    return parts


def curve_tuple(text: str) -> List[str]:
    """Either ``( c1, c2 )`` or one curve expression."""
    s = text.strip()
    if s.startswith("("):
        try:
            head, inner = split_application(s)
        except ValueError:
            head, inner = "x", ""
        if head == "":
            return split_top(inner)
    return [s]


_BRACES = re.compile(r"\{[^{}]*\}")


def _dummy(text: str) -> str:
    return _BRACES.sub("1", text)


def _check_expr(text: str, line: int, col: int, path: str):
    try:
        parse_expr(_dummy(text))
    except ExprError as e:
        raise CertSyntaxError(f"bad expression: {e}", line, col + (e.pos or 0), path) from None


def _check_curve(text: str, line: int, col: int, path: str):
    s = text.strip()
    if re.fullmatch(NAME, s):
        return
    try:
        head, inner = split_application(s)
    except ValueError as e:
        raise CertSyntaxError(f"bad curve expression {s!r}: {e}", line, col, path) from None
    _check_expr(head or "id", line, col, path)
    _check_curve(inner, line, col, path)


# -- statement table -------------------------------------------------------------

_PATTERNS = [
    ("param", rf"param\s+(?P<name>\w+)\s*=\s*(?P<value>-?\d+)"),
    ("assume", rf"assume\s+(?P<name>{NAME})\s*=\s*(?P<expr>.+)"),
    ("require", rf"require\s+(?P<name>{NAME})\s*(?P<mode>=|like)\s*(?P<expr>.+)"),
    ("let", rf"let\s+(?P<name>{NAME})\s*=\s*(?P<expr>.+)"),
    ("curve-eq", r"curve-eq\s+(?P<lhs>.+?)==(?P<dst>.+)"),
    ("curve", rf"curve\s+(?P<name>{NAME})\s*=\s*(?P<curve>.+)"),
    ("twist-of", rf"twist-of\s+(?P<lhs>.+?)\s+as\s+(?P<dst>{NAME})(?:\s*=\s*(?P<claim>.+))?"),
    ("member", rf"member\s+(?P<name>{NAME})\s*=\s*(?P<expr>.+?)(?:==(?P<claim>.+))?"),
    ("relation", r"relation\s+(?P<rel>braid|lantern|chain)\s+(?P<instance>.+)"),
    ("out-eq", r"out-eq\s+(?P<lhs>.+?)==(?P<rhs>.+)"),
    ("use", r"use\s+(?P<lemma>[\w\-]+)(?P<bindings>(?:\s+[\w{}+\-*%]+\s*=\s*\S+)*)"),
    ("export", r"export\s+(?P<names>.+)"),
    ("conclude", r"conclude\s+(?P<what>humphries|lickorish|alpha-chain|exports)"),
]
_COMPILED = [(k, re.compile(p + r"\s*$")) for k, p in _PATTERNS]
_HEADER = re.compile(r"cert\s+(?P<name>[\w\-]+)\s+genus\s*(?P<op>>=|<=|==|>|<)\s*(?P<g>\d+)"
                     r"\s+replay\s+(?P<list>\d+(?:\s*,\s*\d+)*)\s*$")
_FOR = re.compile(r"for\s+(?P<var>[a-z]\w*)\s+in\s+(?P<lo>.+?)\.\.(?P<hi>.+?)\s*$")
_IF = re.compile(r"if\s+(?P<cond>.+?)\s*$")
_LABEL = re.compile(r"\((?:[A-Z]?\d+)\)")


def _label(comment: str) -> str:
    m = _LABEL.search(comment)
    return m.group(0) if m else comment.strip()


def parse(text: str, path: str = "<cert>") -> Certificate:
    cert: Optional[Certificate] = None
    stack: List[list] = []
    frames: List[Union[Loop, Cond]] = []
    in_else: List[bool] = []
    body: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        code, _, comment = raw.partition("#")
        stripped = code.strip()
        if not stripped:
            continue
        col = len(code) - len(code.lstrip()) + 1
        if cert is None:
            m = _HEADER.match(stripped)
            if not m:
                raise CertSyntaxError("expected 'cert <name> genus <op> <g> replay <list>'",
                                      lineno, col, path)
            cert = Certificate(m["name"], (m["op"], int(m["g"])),
                               [int(x) for x in m["list"].split(",")], path=None)
            continue
        target = frames[-1].orelse if frames and in_else[-1] else (frames[-1].body if frames else body)
        m = _FOR.match(stripped)
        if m:
            loop = Loop(m["var"], m["lo"].strip(), m["hi"].strip(), [], lineno, col)
            target.append(loop)
            frames.append(loop)
            in_else.append(False)
            continue
        if stripped == "end":
            if not frames:
                raise CertSyntaxError("'end' without an open block", lineno, col, path)
            frames.pop()
            in_else.pop()
            continue
        if stripped == "else":
            if not frames or not isinstance(frames[-1], Cond) or in_else[-1]:
                raise CertSyntaxError("'else' outside an if block", lineno, col, path)
            in_else[-1] = True
            continue
        m = _IF.match(stripped)
        if m and stripped.startswith("if "):
            cond = m["cond"]
            if not any(op in cond for op in _OPS):
                raise CertSyntaxError("condition needs a comparison", lineno, col + 3, path)
            node = Cond(cond, [], [], lineno, col)
            target.append(node)
            frames.append(node)
            in_else.append(False)
            continue
        for kind, rx in _COMPILED:
            m = rx.match(stripped)
            if m:
                break
        else:
            word = stripped.split()[0]
            raise CertSyntaxError(f"unknown statement {word!r}", lineno, col, path)
        fields = {k: v.strip() for k, v in m.groupdict().items() if v is not None}
        _validate(kind, fields, lineno, col, path, m)
        stmt = Stmt(kind, fields, lineno, col, _label(comment))
        if kind == "param":
            if frames:
                raise CertSyntaxError("param must be at top level", lineno, col, path)
            cert.params[fields["name"]] = int(fields["value"])
            continue
        target.append(stmt)
    if cert is None:
        raise CertSyntaxError("empty certificate", 1, 1, path)
    if frames:
        f = frames[-1]
        raise CertSyntaxError("block not closed with 'end'", f.line, f.col, path)
    concl = [i for i, n in enumerate(body) if isinstance(n, Stmt) and n.kind == "conclude"]
    if not concl:
        raise CertSyntaxError("missing 'conclude'", len(text.splitlines()), 1, path)
    if concl != [len(body) - 1]:
        n = body[concl[0]]
        raise CertSyntaxError("'conclude' must be the last statement", n.line, n.col, path)
    cert.body = body
    return cert


def _validate(kind, fields, line, col, path, m):
    def at(group):
        return col + m.start(group)

    if kind in ("assume", "let", "member", "require"):
        _check_expr(fields["expr"], line, at("expr"), path)
    if kind == "member" and "claim" in fields:
        _check_expr(fields["claim"], line, at("claim"), path)
    if kind == "out-eq":
        _check_expr(fields["lhs"], line, at("lhs"), path)
        _check_expr(fields["rhs"], line, at("rhs"), path)
    if kind == "curve":
        _check_curve(fields["curve"], line, at("curve"), path)
    if kind in ("curve-eq", "twist-of"):
        try:
            head, inner = split_application(fields["lhs"])
        except ValueError as e:
            raise CertSyntaxError(str(e), line, at("lhs"), path) from None
        _check_expr(head or "id", line, at("lhs"), path)
        fields["expr"], fields["src"] = head or "id", inner
        del fields["lhs"]
        if kind == "curve-eq":
            src, dst = split_top(inner), curve_tuple(fields["dst"])
            if len(src) != len(dst):
                raise CertSyntaxError(f"{len(src)} source curves but {len(dst)} targets",
                                      line, at("dst"), path)
            for c in src + dst:
                _check_curve(c, line, at("dst"), path)
        elif "claim" in fields:
            _check_expr(fields["claim"], line, at("claim"), path)


def load(path) -> Certificate:
    p = Path(path)
    cert = parse(p.read_text(encoding="utf-8"), str(p))
    cert.path = p
    return cert
