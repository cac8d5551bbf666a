"""Curves drawn on the one-vertex 4g-gon and the twists they induce on pi_1.

The polygon's sides, counterclockwise, are x1 y1 X1 Y1 x2 ...: side
``4j`` is the + copy of x_{j+1}, ``4j+1`` the + copy of y_{j+1}, ``4j+2``
and ``4j+3`` the - copies.  The basepoint is the single vertex, and
rotating by four sides shifts every index by one.

A curve is a cyclic sequence of crossings ``(letter, u, s)``: it crosses the
edge of generator ``letter`` at parameter ``u`` in (0, 1), going from the
left of the edge to its right when ``s = +1``.  Between consecutive
crossings it runs along a straight chord of the polygon.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .words import Word, dehn_reduce, free_reduce, inverse


@dataclass(frozen=True)
class Crossing:
    letter: int  # positive generator index 1..2g
    u: Fraction
    s: int


def _sides(letter: int) -> Tuple[int, int]:
    j, isy = (letter - 1) // 2, (letter - 1) % 2
    return 4 * j + isy, 4 * j + 2 + isy


def side_letter(k: int) -> int:
    j, r = divmod(k, 4)
    return (2 * j + 1 + (r % 2)) * (1 if r < 2 else -1)


def plus_point(c: Crossing) -> Fraction:
    return _sides(c.letter)[0] + c.u


def minus_point(c: Crossing) -> Fraction:
    return _sides(c.letter)[1] + (1 - c.u)


def exit_point(c: Crossing) -> Fraction:
    return plus_point(c) if c.s > 0 else minus_point(c)


def entry_point(c: Crossing) -> Fraction:
    return minus_point(c) if c.s > 0 else plus_point(c)


def between(p: Fraction, q: Fraction, n: int) -> List[int]:
    """Letters of the full sides met going counterclockwise from p to q."""
    fp, fq = int(p), int(q)
    if fp == fq and q > p:
        return []
    out = []
    k = (fp + 1) % n
    while k != fq:
        out.append(side_letter(k))
        k = (k + 1) % n
    return out


def _interleave(a: Tuple[Fraction, Fraction], b: Tuple[Fraction, Fraction]) -> bool:
    lo, hi = min(a), max(a)
    return (lo < b[0] < hi) != (lo < b[1] < hi)


@dataclass(frozen=True)
class PolyCurve:
    crossings: Tuple[Crossing, ...]
    genus: int

    @property
    def n(self) -> int:
        return 4 * self.genus

    def chords(self) -> List[Tuple[Fraction, Fraction]]:
        cs = self.crossings
        m = len(cs)
        return [(entry_point(cs[j]), exit_point(cs[(j + 1) % m])) for j in range(m)]

    def reversed(self) -> "PolyCurve":
        return PolyCurve(tuple(Crossing(c.letter, c.u, -c.s) for c in reversed(self.crossings)),
                         self.genus)

    def rotated(self, k: int) -> "PolyCurve":
        """Image under the rotation by 4k sides (the index shift by k)."""
        g = self.genus

        def shift(a):
            j, r = divmod(a - 1, 2)
            return 2 * ((j + k) % g) + r + 1
        return PolyCurve(tuple(Crossing(shift(c.letter), c.u, c.s) for c in self.crossings), g)

    def word(self, start: int = 0) -> Word:
        """Free homotopy word, read from the entry of crossing ``start``."""
        cs = self.crossings
        m = len(cs)
        out: List[int] = []
        for d in range(m):
            j = (start + d) % m
            out += between(entry_point(cs[j]), exit_point(cs[(j + 1) % m]), self.n)
        return free_reduce(out)

    def is_simple(self) -> bool:
        ch = self.chords()
        return not any(_interleave(ch[i], ch[j])
                       for i in range(len(ch)) for j in range(i + 1, len(ch)))

    def meets(self, other: "PolyCurve") -> int:
        """Number of chord crossings with ``other`` (an upper bound for the
        geometric intersection number)."""
        return sum(_interleave(a, b) for a in self.chords() for b in other.chords())

    def twist_images(self, inverse_twist: bool = False) -> Dict[int, Word]:
        """Images of x1, y1, ... under the twist about this curve."""
        g = self.genus
        rev = self.reversed()
        images = {}
        for e in range(1, 2 * g + 1):
            hits = sorted((c.u, i) for i, c in enumerate(self.crossings) if c.letter == e)
            out: List[int] = []
            for u, i in hits:
                c = self.crossings[i]
                # the right turn leaves through the - copy; the left turn
                # through the + copy, which costs a conjugation by e
                forward = (c.s > 0) != inverse_twist
                if forward:
                    loop = self.word(i)
                else:
                    loop = rev.word(len(self.crossings) - 1 - i)
                if inverse_twist:
                    loop = (e,) + loop + (-e,)
                out += loop
            out.append(e)
            images[e] = dehn_reduce(out, g) if g >= 2 else free_reduce(out)
        return images


def curve(spec: Sequence[Tuple[int, object, int]], genus: int) -> PolyCurve:
    return PolyCurve(tuple(Crossing(a, Fraction(u), s) for a, u, s in spec), genus)
