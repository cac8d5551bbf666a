"""Mapping-class expressions: evaluation, action on curves, equality in Out."""
from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import indexexpr
from .atlas import Atlas, AtlasError, load_atlas
from .automorphism import Automorphism
from .words import (Word, are_conjugate, canonical_cyclic, dehn_reduce, format_word,
                    inverse, same_curve_class, words_equal)

Expr = Tuple[Tuple[str, int], ...]

DEFAULT_OUT_BOUND = 64


class ExprError(ValueError):
    def __init__(self, msg, pos=None):
        super().__init__(msg)
        self.pos = pos


# -- expressions ------------------------------------------------------------

_WRAPPED = re.compile(r"(?:^|[^A-Za-z0-9_])(?:t_)?[abc]$")


def expand_braces(text: str, env: dict, genus: int) -> str:
    """Evaluate ``{...}`` index expressions; curve indices of a, b, c wrap
    into 1..g, other indices are left as computed."""
    out = []
    last = 0
    for m in re.finditer(r"\{([^{}]*)\}", text):
        out.append(text[last:m.start()])
        v = indexexpr.evaluate(m.group(1), env)
        if _WRAPPED.search(text[:m.start()]):
            v = (v - 1) % genus + 1
        out.append(str(v))
        last = m.end()
    out.append(text[last:])
    return "".join(out)


_TOK = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>-?\d+)|(?P<op>[()*^]))")


def parse_expr(text: str, resolve: Optional[Callable[[str], Optional[Expr]]] = None) -> Expr:
    """Parse ``r * t_c1 * t_b1^-3 * (t_a1 t_b1)^2``.

    Names that ``resolve`` maps to an expression are substituted; every
    other name is kept as a generator factor.
    """
    toks: List[Tuple[str, str, int]] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOK.match(text, pos)
        if not m or m.end() == pos:
            raise ExprError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    i = 0

    def peek():
        return toks[i] if i < len(toks) else (None, None, len(text))

    def parse_seq(stop):
        nonlocal i
        out: List[Tuple[str, int]] = []
        while True:
            kind, val, p = peek()
            if kind is None or (kind == "op" and val == stop):
                return out
            if kind == "op" and val == "*":
                i += 1
                continue
            if kind == "name":
                i += 1
                if val in ("id", "1"):
                    atom = []
                else:
                    sub = resolve(val) if resolve else None
                    atom = list(sub) if sub is not None else [(val, 1)]
            elif kind == "num" and val == "1":
                i += 1
                atom = []
            elif kind == "op" and val == "(":
                i += 1
                atom = parse_seq(")")
                if peek()[1] != ")":
                    raise ExprError("expected ')'", peek()[2])
                i += 1
            else:
                raise ExprError(f"unexpected token {val!r}", p)
            if peek()[1] == "^":
                i += 1
                kind, val, p = peek()
                if kind != "num":
                    raise ExprError("expected integer exponent", p)
                i += 1
                atom = power(atom, int(val))
            out.extend(atom)

    body = parse_seq(None)
    if i != len(toks):
        raise ExprError(f"unexpected token {toks[i][1]!r}", toks[i][2])
    return normalize(body)


def invert(e: Sequence[Tuple[str, int]]) -> Expr:
    return tuple((n, -k) for n, k in reversed(e))


def power(e: Sequence[Tuple[str, int]], k: int) -> List[Tuple[str, int]]:
    base = list(e) if k >= 0 else list(invert(e))
    return base * abs(k)


def normalize(e: Sequence[Tuple[str, int]]) -> Expr:
    out: List[List] = []
    for n, k in e:
        if k == 0:
            continue
        if out and out[-1][0] == n:
            out[-1][1] += k
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([n, k])
    return tuple((n, k) for n, k in out)


def format_expr(e: Expr) -> str:
    if not e:
        return "id"
    return " * ".join(n if k == 1 else f"{n}^{k}" for n, k in e)


# -- verdicts ---------------------------------------------------------------

@dataclass(frozen=True)
class OutVerdict:
    verdict: str  # "Equal" | "NotEqual" | "Undecided"
    conjugator: Optional[Word] = None
    evidence: str = ""

    def __bool__(self):
        return self.verdict == "Equal"


# -- engine -----------------------------------------------------------------

class MappingClassEngine:
    """Evaluates expressions over one genus' atlas, with a prefix memo."""

    def __init__(self, genus: int, atlas: Optional[Atlas] = None, conj_bound: Optional[int] = None):
        self.genus = genus
        self.atlas = atlas if atlas is not None else load_atlas(genus)
        self.conj_bound = conj_bound
        self._memo: Dict[Expr, Automorphism] = {(): Automorphism.identity(genus)}
        self._lock = threading.Lock()
        self._sym: Dict[Tuple[str, int], Automorphism] = {}

    # names
    def canonical_name(self, name: str) -> str:
        if name in ("r", "r_pi", "iota"):
            return name
        base = self.atlas.twist_curve(name)
        if base is None:
            raise AtlasError(f"unknown generator {name!r} at genus {self.genus}")
        return "t_" + base

    def canonical(self, e: Sequence[Tuple[str, int]]) -> Expr:
        return normalize([(self.canonical_name(n), k) for n, k in e])

    def parse(self, text: str, resolve=None) -> Expr:
        return self.canonical(parse_expr(text, resolve))

    # symmetric generators expressed through the alpha chain
    def chain_reversal(self) -> Expr:
        """Half-turn of the alpha chain, as the braid Garside element."""
        n = 2 * self.genus + 1
        e = []
        for j in range(1, n + 1):
            e += [(f"t_alpha{k}", 1) for k in range(j, 0, -1)]
        return self.canonical(e)

    def hyperelliptic(self) -> Expr:
        n = 2 * self.genus + 1
        e = [(f"t_alpha{k}", 1) for k in range(1, n + 1)]
        e += [(f"t_alpha{k}", 1) for k in range(n, 0, -1)]
        return self.canonical(e)

    def _factor(self, name: str, k: int) -> Automorphism:
        key = (name, k)
        if key in self._sym:
            return self._sym[key]
        if name == "r":
            aut = self.atlas.shift(k)
        elif name in ("r_pi", "iota"):
            base = self.chain_reversal() if name == "r_pi" else self.hyperelliptic()
            aut = self.evaluate(power(base, k))
        else:
            tw = self.atlas.twist(name[2:])
            one = tw.automorphism if k > 0 else tw.inverse
            aut = one
            for _ in range(abs(k) - 1):
                aut = aut.compose(one)
        self._sym[key] = aut
        return aut

    def evaluate(self, e: Sequence[Tuple[str, int]]) -> Automorphism:
        """Composite automorphism; the rightmost factor acts first."""
        e = self.canonical(e)
        memo = self._memo
        if e in memo:
            return memo[e]
        j = len(e)
        while e[:j] not in memo:
            j -= 1
        aut = memo[e[:j]]
        for t in range(j, len(e)):
            n, k = e[t]
            aut = aut.compose(self._factor(n, k))
            memo.setdefault(e[:t + 1], aut)
        return aut

    # curves
    def curve_word(self, c) -> Word:
        if isinstance(c, str):
            return self.atlas.curve(c).word
        return tuple(c)

    def apply(self, e: Sequence[Tuple[str, int]], c) -> Word:
        w = self.evaluate(e)(self.curve_word(c))
        return canonical_cyclic(w, self.genus) if self.genus >= 2 else w

    def same_curve(self, c1, c2) -> Optional[bool]:
        return same_curve_class(self.curve_word(c1), self.curve_word(c2), self.genus,
                                self.conj_bound)

    def curve_eq(self, e, c1, c2) -> Optional[bool]:
        """Does ``e`` carry curve c1 to curve c2?"""
        return self.same_curve(self.apply(e, c1), c2)

    def conjugate_twist(self, f: Sequence[Tuple[str, int]], c: str) -> Expr:
        return normalize(list(f) + [(self.canonical_name("t_" + c), 1)] + list(invert(f)))

    # equality in Out
    def equal_in_out(self, e1, e2, bound: int = DEFAULT_OUT_BOUND) -> OutVerdict:
        g = self.genus
        e1, e2 = self.canonical(e1), self.canonical(e2)
        phi, psi = self.evaluate(e1), self.evaluate(e2)
        if phi.homology() != psi.homology():
            return OutVerdict("NotEqual", evidence="homology mismatch")
        if g == 1:
            # the torus mapping class group acts faithfully on homology
            return OutVerdict("Equal", conjugator=(), evidence="homology (faithful at genus 1)")
        theta = self.evaluate(normalize(list(invert(e2)) + list(e1)))
        x1, y1 = (1,), (2,)
        res = are_conjugate(theta(x1), x1, g, self.conj_bound)
        if res.verdict == "NotConjugate":
            return OutVerdict("NotEqual", evidence="curve-action mismatch(x1)")
        if res.verdict == "Conjugate":
            u0 = res.witness
            t1 = theta.conjugate_by(u0)
            for k in _spiral(bound):
                u = dehn_reduce((1,) * k + u0 if k >= 0 else (-1,) * (-k) + u0, g)
                uy = dehn_reduce((1,) * k if k >= 0 else (-1,) * (-k), g)
                uyi = inverse(uy)
                if not words_equal(uy + t1.images[1] + uyi, y1, g):
                    continue
                if all(words_equal(uy + t1.images[a] + uyi, (a + 1,), g) for a in range(2 * g)):
                    v = psi(u)
                    vi = inverse(v)
                    ok = all(words_equal(v + phi.images[a] + vi, psi.images[a], g)
                             for a in range(2 * g))
                    if ok:
                        return OutVerdict("Equal", conjugator=v,
                                          evidence=f"conjugator {format_word(v)}")
        for name in self.atlas.curve_names():
            w = self.atlas.curves[name].word
            if self.same_curve(theta(w), w) is False:
                return OutVerdict("NotEqual", evidence=f"curve-action mismatch({name})")
        return OutVerdict("Undecided", evidence="conjugator search exhausted")


def _spiral(bound: int):
    yield 0
    for k in range(1, bound + 1):
        yield k
        yield -k


_ENGINES: Dict[int, MappingClassEngine] = {}


def engine(genus: int) -> MappingClassEngine:
    if genus not in _ENGINES:
        _ENGINES[genus] = MappingClassEngine(genus)
    return _ENGINES[genus]
