"""Automorphisms of the surface group, stored as images of x1, y1, ..."""
from __future__ import annotations

from typing import Dict, Iterable, List, Sequence, Tuple

from .words import Word, abelianize, dehn_reduce, inverse


class Automorphism:
    __slots__ = ("genus", "images")

    def __init__(self, genus: int, images: Sequence[Sequence[int]]):
        self.genus = genus
        self.images: Tuple[Word, ...] = tuple(tuple(w) for w in images)

    @classmethod
    def identity(cls, genus: int) -> "Automorphism":
        return cls(genus, [(a,) for a in range(1, 2 * genus + 1)])

    @classmethod
    def from_dict(cls, genus: int, d: Dict[int, Word]) -> "Automorphism":
        return cls(genus, [d[a] for a in range(1, 2 * genus + 1)])

    def __call__(self, w: Iterable[int]) -> Word:
        out: List[int] = []
        ims = self.images
        for a in w:
            if a > 0:
                out.extend(ims[a - 1])
            else:
                out.extend(inverse(ims[-a - 1]))
        return dehn_reduce(out, self.genus)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``self o other``: apply ``other`` first."""
        return Automorphism(self.genus, [self(w) for w in other.images])

    def conjugate_by(self, u: Sequence[int]) -> "Automorphism":
        """Post-compose with the inner automorphism w -> u w u^-1."""
        ui = inverse(u)
        return Automorphism(self.genus, [dehn_reduce(tuple(u) + w + ui, self.genus)
                                         for w in self.images])

    def homology(self) -> Tuple[Tuple[int, ...], ...]:
        """Integer matrix of the induced map; column j is the image of
        generator j in the basis (x1, y1, x2, y2, ...)."""
        cols = [abelianize(w, self.genus) for w in self.images]
        n = 2 * self.genus
        return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    def __eq__(self, other):
        return isinstance(other, Automorphism) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        from .words import format_word, letter_name
        parts = [f"{letter_name(a + 1)}->{format_word(w)}" for a, w in enumerate(self.images)]
        return f"Automorphism(g={self.genus}; " + ", ".join(parts) + ")"
