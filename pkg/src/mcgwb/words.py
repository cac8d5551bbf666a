"""Words in the closed surface group and conjugacy of curve words.

A word is a tuple of nonzero ints: ``2i-1`` is x_i, ``2i`` is y_i and a
negative entry is the inverse letter.  The defining relator is
x1 y1 X1 Y1 ... xg yg Xg Yg.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Tuple

from . import _kernels

Word = Tuple[int, ...]

_TOKEN = re.compile(r"([xXyY])(\d+)(?:\^(-?\d+))?$")


def letter_name(a: int) -> str:
    i = (abs(a) + 1) // 2
    base = "x" if abs(a) % 2 else "y"
    return (base if a > 0 else base.upper()) + str(i)


def format_word(w: Sequence[int]) -> str:
    if not w:
        return "1"
    return " ".join(letter_name(a) for a in w)


def parse_word(text: str, genus: Optional[int] = None) -> Word:
    """Parse ``"x1 Y2 x3^2"``; ``1`` or the empty string is the identity."""
    out = []
    for tok in text.replace("*", " ").split():
        if tok in ("1", "e"):
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad letter {tok!r}")
        kind, idx, exp = m.group(1), int(m.group(2)), m.group(3)
        if idx < 1 or (genus is not None and idx > genus):
            raise ValueError(f"letter {tok!r} out of range for genus {genus}")
        a = 2 * idx - 1 if kind in "xX" else 2 * idx
        if kind.isupper():
            a = -a
        k = int(exp) if exp is not None else 1
        out.extend([a if k > 0 else -a] * abs(k))
    return tuple(out)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-a for a in reversed(w))


def free_reduce(w: Sequence[int]) -> Word:
    return tuple(_kernels.free_reduce(w))


def abelianize(w: Sequence[int], genus: int) -> Tuple[int, ...]:
    """Exponent sums, ordered (x1, y1, x2, y2, ...)."""
    v = [0] * (2 * genus)
    for a in w:
        v[abs(a) - 1] += 1 if a > 0 else -1
    return tuple(v)


def relator(genus: int) -> Word:
    return tuple(_kernels.relator_tables(genus)[0])


def _key(a: int) -> int:
    # shortlex letter order x1 < X1 < y1 < Y1 < x2 ...
    return 2 * abs(a) - (1 if a > 0 else 0)


def _shortlex_less(u: Sequence[int], v: Sequence[int]) -> bool:
    if len(u) != len(v):
        return len(u) < len(v)
    return [_key(a) for a in u] < [_key(a) for a in v]


@lru_cache(maxsize=None)
def _cycles(genus: int):
    rel, inv, succ, succ_inv, pos, pos_inv = _kernels.relator_tables(genus)
    return (tuple(rel), tuple(pos)), (tuple(inv), tuple(pos_inv)), 2 * genus


def _complement_inverse(seg: Sequence[int], genus: int, which: int) -> Word:
    """For a run ``seg`` along the relator (0) or its inverse (1), the word
    of length 4g - len(seg) equal to it in the group."""
    cyc, pos = _cycles(genus)[which]
    off = 2 * genus
    n = 4 * genus
    k0 = pos[seg[0] + off]
    comp = [cyc[(k0 + len(seg) + j) % n] for j in range(n - len(seg))]
    return inverse(comp)


def _runs_at(w: Sequence[int], genus: int, cyclic: bool):
    """Yield (start, length, which, closed) for maximal runs along R or R^-1.

    ``closed`` marks a cyclic word that is entirely one run."""
    rel, inv, succ, succ_inv, _, _ = _kernels.relator_tables(genus)
    off = 2 * genus
    m = len(w)
    for which, table in ((0, succ), (1, succ_inv)):
        if m == 0:
            continue
        if cyclic:
            cont = [table[w[i] + off] == w[(i + 1) % m] for i in range(m)]
            if all(cont):
                yield 0, m, which, True
                continue
            b = cont.index(False)
            i = (b + 1) % m
            start, length = i, 1
            for step in range(m):
                j = (i + step) % m
                if cont[j]:
                    length += 1
                else:
                    yield start, length, which, False
                    start, length = (j + 1) % m, 1
        else:
            start = 0
            for i in range(1, m + 1):
                if i == m or table[w[i - 1] + off] != w[i]:
                    yield start, i - start, which, False
                    start = i


def dehn_reduce(w: Sequence[int], genus: int) -> Word:
    """Dehn reduction with shortlex tie-breaking on exact halves."""
    if genus < 2:
        return free_reduce(w)
    cur = tuple(_kernels.dehn_reduce_linear(w, genus))
    half = 2 * genus
    while True:
        changed = False
        for start, length, which, _ in _runs_at(cur, genus, cyclic=False):
            if length < half:
                continue
            for s in range(start, start + length - half + 1):
                seg = cur[s:s + half]
                rep = _complement_inverse(seg, genus, which)
                cand = cur[:s] + rep + cur[s + half:]
                if _shortlex_less(cand, cur):
                    cur = tuple(_kernels.dehn_reduce_linear(cand, genus))
                    changed = True
                    break
            if changed:
                break
        if not changed:
            return cur


def is_trivial(w: Sequence[int], genus: int) -> bool:
    if genus == 1:
        return not any(abelianize(w, 1))
    return len(dehn_reduce(w, genus)) == 0


def words_equal(u: Sequence[int], v: Sequence[int], genus: int) -> bool:
    return is_trivial(tuple(u) + inverse(v), genus)


# -- conjugacy -------------------------------------------------------------

@dataclass(frozen=True)
class ConjugacyResult:
    verdict: str  # "Conjugate" | "NotConjugate" | "Undecided"
    witness: Optional[Word] = None
    evidence: str = ""

    def __bool__(self):
        return self.verdict == "Conjugate"


def _least_rotation(c: Word) -> Tuple[Word, int]:
    if not c:
        return c, 0
    keys = tuple(_key(a) for a in c)
    best = min(range(len(c)), key=lambda i: keys[i:] + keys[:i])
    return c[best:] + c[:best], best


def cyclic_reduce(w: Sequence[int], genus: int) -> Tuple[Word, Word]:
    """Return ``(c, u)`` with ``w = u c u^-1`` and ``c`` cyclically
    Dehn-reduced (no cyclic run longer than half the relator)."""
    c = dehn_reduce(w, genus)
    u: list = []
    while True:
        k = 0
        while 2 * k + 1 < len(c) and c[k] == -c[-1 - k]:
            k += 1
        if k:
            u.extend(c[:k])
            c = c[k:len(c) - k]
        if genus < 2 or not c:
            break
        length, start, _ = _kernels.cyclic_runs(c, genus)
        if length <= 2 * genus:
            break
        u.extend(c[:start])
        c = dehn_reduce(c[start:] + c[:start], genus)
    return tuple(c), free_reduce(u)


def _rotate(c: Word, i: int) -> Word:
    return c[i:] + c[:i]


def _cyc_free(c: Word) -> Tuple[Word, Word]:
    k = 0
    while 2 * k + 1 < len(c) and c[k] == -c[-1 - k]:
        k += 1
    return c[k:len(c) - k], c[:k]


@dataclass
class _Closure:
    """States reached from one cyclic word, each with its conjugator."""
    genus: int
    length: int
    states: dict = field(default_factory=dict)
    complete: bool = False
    shorter: Optional[Tuple[Word, Word]] = None


def _explore(c: Word, u: Word, genus: int, budget: int, target=None) -> _Closure:
    """Breadth-first search over cyclic words conjugate to ``c`` of length
    |c| and |c|+2, moving by replacement of relator runs of length 2g-1,
    2g or 2g+1 with their complements.  ``u`` is the conjugator carried
    by ``c``."""
    L = len(c)
    half = 2 * genus
    out = _Closure(genus, L)
    canon, r = _least_rotation(c)
    u0 = free_reduce(u + c[:r])
    out.states[canon] = u0
    queue = deque([(canon, u0)])
    side = {}  # length L+2 states
    while queue:
        s, us = queue.popleft()
        m = len(s)
        for start, length, which, closed in _runs_at(s, genus, cyclic=True):
            for k in (half - 1, half, half + 1):
                if k > length:
                    continue
                span = m if closed else length - k + 1
                for d in range(span):
                    i = (start + d) % m
                    rot = _rotate(s, i)
                    seg = rot[:k]
                    new = _complement_inverse(seg, genus, which) + rot[k:]
                    new, e = _cyc_free(new)
                    un = free_reduce(us + s[:i] + e) if i or e else us
                    if len(new) > L + 2:
                        continue
                    if len(new) < L:
                        out.shorter = (new, un)
                        return out
                    nc, r = _least_rotation(new)
                    un = free_reduce(un + new[:r]) if r else un
                    book = out.states if len(nc) == L else side
                    if nc in book:
                        continue
                    book[nc] = un
                    if target is not None and nc == target:
                        return out
                    if len(out.states) + len(side) > budget:
                        return out
                    queue.append((nc, un))
    out.complete = True
    return out


def _minimal_closure(w: Word, genus: int, budget: int, target=None) -> _Closure:
    c, u = cyclic_reduce(w, genus)
    while True:
        cl = _explore(c, u, genus, budget, target)
        if cl.shorter is None:
            return cl
        c2, u2 = cl.shorter
        c, v = cyclic_reduce(c2, genus)
        u = free_reduce(u2 + v)


def default_bound(w1: Sequence[int], w2: Sequence[int], genus: int) -> int:
    return 2 * (len(w1) + len(w2)) + 4 * genus


# each unit of the search bound buys this many explored cyclic words
STATES_PER_BOUND = 256


def are_conjugate(w1: Sequence[int], w2: Sequence[int], genus: int,
                  bound: Optional[int] = None) -> ConjugacyResult:
    w1, w2 = tuple(w1), tuple(w2)
    if abelianize(w1, genus) != abelianize(w2, genus):
        return ConjugacyResult("NotConjugate", evidence="abelianization mismatch")
    if genus == 1:
        return ConjugacyResult("Conjugate", witness=())
    if bound is None:
        bound = default_bound(w1, w2, genus)
    budget = max(1, bound) * STATES_PER_BOUND
    c1, v1 = cyclic_reduce(w1, genus)
    c2, v2 = cyclic_reduce(w2, genus)
    n1, r1 = _least_rotation(c1)
    n2, r2 = _least_rotation(c2)
    if n1 == n2:
        return _finish(w1, w2, free_reduce(v1 + c1[:r1]), free_reduce(v2 + c2[:r2]), genus)
    cl1 = _minimal_closure(w1, genus, budget)
    cl2 = _minimal_closure(w2, genus, budget)
    common = cl1.states.keys() & cl2.states.keys()
    if common:
        k = min(common)
        return _finish(w1, w2, cl1.states[k], cl2.states[k], genus)
    if cl1.complete and cl2.complete:
        return ConjugacyResult("NotConjugate", evidence="normal-form mismatch")
    return ConjugacyResult("Undecided", evidence="bound exhausted")


def _finish(w1: Word, w2: Word, u1: Word, u2: Word, genus: int) -> ConjugacyResult:
    # w1 = u1 c u1^-1 and w2 = u2 c u2^-1, so w2 = (u2 u1^-1) w1 (u2 u1^-1)^-1
    u = dehn_reduce(u2 + inverse(u1), genus)
    if not words_equal(u + w1 + inverse(u), w2, genus):
        raise AssertionError("conjugator failed verification")
    return ConjugacyResult("Conjugate", witness=u)


def same_curve_class(w1: Sequence[int], w2: Sequence[int], genus: int,
                     bound: Optional[int] = None) -> Optional[bool]:
    """True/False, or None when the search bound runs out."""
    if genus == 1:
        a, b = abelianize(w1, 1), abelianize(w2, 1)
        return a == b or a == tuple(-x for x in b)
    undecided = False
    for cand in (tuple(w1), inverse(w1)):
        res = are_conjugate(cand, w2, genus, bound)
        if res.verdict == "Conjugate":
            return True
        if res.verdict == "Undecided":
            undecided = True
    return None if undecided else False


def canonical_cyclic(w: Sequence[int], genus: int) -> Word:
    """Cyclically reduced least rotation (not a full conjugacy invariant)."""
    c, _ = cyclic_reduce(w, genus)
    return _least_rotation(c)[0]
