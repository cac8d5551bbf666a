"""Named curves and named mapping classes, loaded from the atlas file."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Dict, FrozenSet, List, Optional, Tuple

from . import indexexpr
from .automorphism import Automorphism
from .polygon import PolyCurve, curve as poly_curve
from .words import Word, abelianize, canonical_cyclic, parse_word

ATLAS_FILE = "atlas_v1.txt"


class AtlasError(KeyError):
    pass


@dataclass(frozen=True)
class NamedCurve:
    name: str
    genus: int
    word: Word
    homology: Tuple[int, ...]
    poly: PolyCurve
    declared_one_intersection: FrozenSet[str] = frozenset()
    declared_disjoint: FrozenSet[str] = frozenset()


@dataclass(frozen=True)
class NamedMappingClass:
    name: str
    kind: str  # "twist" or "symmetry"
    curve: Optional[str]
    automorphism: Automorphism
    inverse: Automorphism


@dataclass
class _Records:
    curves: List[Tuple[str, int, List[str]]] = field(default_factory=list)
    meets: List[Tuple[str, str]] = field(default_factory=list)
    aliases: List[Tuple[str, str, str, str]] = field(default_factory=list)
    symmetries: Dict[str, str] = field(default_factory=dict)
    version: int = 0


def _read_records(text: str) -> _Records:
    rec = _Records()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "format":
            rec.version = int(rest[0])
        elif head == "curve":
            rec.curves.append((rest[0], int(rest[1]), rest[2:]))
        elif head == "meets":
            rec.meets.append((rest[0], rest[1]))
        elif head == "alias":
            lo, hi = rest[2].split("..")
            rec.aliases.append((rest[0], rest[1], lo, hi))
        elif head == "symmetry":
            rec.symmetries[rest[0]] = rest[1]
        else:
            raise ValueError(f"atlas line {lineno}: unknown record {head!r}")
    if rec.version != 1:
        raise ValueError(f"unsupported atlas format {rec.version}")
    return rec


_CROSS = re.compile(r"([xy])(\d+):([0-9/]+):([+-])$")


class Atlas:
    """Curves a_i, b_i, c_i, the alpha chain and beta, and their twists."""

    def __init__(self, genus: int, text: Optional[str] = None):
        if genus < 1:
            raise ValueError("genus must be positive")
        self.genus = g = genus
        if text is None:
            text = resources.files("mcgwb").joinpath("data", ATLAS_FILE).read_text()
        rec = _read_records(text)
        self.curves: Dict[str, NamedCurve] = {}
        self.aliases: Dict[str, str] = {}
        polys: Dict[str, PolyCurve] = {}
        for pattern, gmin, crossings in rec.curves:
            if g < gmin:
                continue
            for i in range(1, g + 1):
                env = {"i": i, "g": g}
                name = indexexpr.expand(pattern, env, wrap=g)
                spec = []
                for cr in crossings:
                    m = _CROSS.match(indexexpr.expand(cr, env, wrap=g))
                    kind, idx, u, s = m.groups()
                    letter = 2 * int(idx) - (1 if kind == "x" else 0)
                    spec.append((letter, Fraction(u), 1 if s == "+" else -1))
                polys[name] = poly_curve(spec, g)
        meets = set()
        for p, q in rec.meets:
            for i in range(1, g + 1):
                env = {"i": i, "g": g}
                a, b = indexexpr.expand(p, env, wrap=g), indexexpr.expand(q, env, wrap=g)
                if a in polys and b in polys and a != b:
                    meets.add(frozenset((a, b)))
        for name, poly in polys.items():
            one = frozenset(n for n in polys if frozenset((name, n)) in meets)
            dis = frozenset(n for n in polys if n != name and n not in one)
            w = canonical_cyclic(poly.word(), g) if g >= 2 else poly.word()
            self.curves[name] = NamedCurve(name, g, w, abelianize(w, g), poly, one, dis)
        for pattern, target, lo, hi in rec.aliases:
            env = {"g": g}
            for i in range(indexexpr.evaluate(lo, env), indexexpr.evaluate(hi, env) + 1):
                env = {"i": i, "g": g}
                name = indexexpr.expand(pattern, env)
                tgt = indexexpr.expand(target, env, wrap=g)
                if tgt in polys and name not in self.aliases:
                    self.aliases[name] = tgt
        self.symmetry_kinds = dict(rec.symmetries)
        self._twists: Dict[str, NamedMappingClass] = {}

    # -- curves -----------------------------------------------------------

    def resolve(self, name: str) -> str:
        base = self.aliases.get(name, name)
        if base not in self.curves:
            raise AtlasError(f"no curve {name!r} at genus {self.genus}")
        return base

    def curve(self, name: str) -> NamedCurve:
        return self.curves[self.resolve(name)]

    def curve_names(self) -> List[str]:
        return sorted(self.curves, key=_name_key)

    def alpha_names(self) -> List[str]:
        return [f"alpha{j}" for j in range(1, 2 * self.genus + 2)]

    # -- generators -------------------------------------------------------

    def twist(self, curve_name: str) -> NamedMappingClass:
        base = self.resolve(curve_name)
        if base not in self._twists:
            poly = self.curves[base].poly
            fwd = Automorphism.from_dict(self.genus, poly.twist_images())
            inv = Automorphism.from_dict(self.genus, poly.twist_images(inverse_twist=True))
            self._twists[base] = NamedMappingClass("t_" + base, "twist", base, fwd, inv)
        return self._twists[base]

    def shift(self, k: int) -> Automorphism:
        g = self.genus

        def sh(a):
            j, r = divmod(a - 1, 2)
            return 2 * ((j + k) % g) + r + 1
        return Automorphism(g, [(sh(a),) for a in range(1, 2 * g + 1)])

    def generator_names(self) -> List[str]:
        names = ["t_" + n for n in self.curve_names()]
        names += ["t_" + a for a in sorted(self.aliases, key=_name_key)]
        return names + sorted(self.symmetry_kinds)

    def twist_curve(self, gen_name: str) -> Optional[str]:
        """Curve of a twist generator name like ``t_alpha3``, else None."""
        if not gen_name.startswith("t_"):
            return None
        try:
            return self.resolve(gen_name[2:])
        except AtlasError:
            return None


def _name_key(name: str):
    m = re.match(r"([A-Za-z_]+?)(\d*)$", name)
    return (m.group(1), int(m.group(2) or 0)) if m else (name, 0)


@lru_cache(maxsize=None)
def load_atlas(genus: int) -> Atlas:
    return Atlas(genus)
