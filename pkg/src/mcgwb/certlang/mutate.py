"""Single-step mutations of a replayed certificate.

A mutation edits one executed step: it either swaps one curve name for a
non-isotopic curve or flips the sign of one exponent.  A sound checker must
reject every mutant.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from ..atlas import load_atlas
from ..mapclass import engine
from .parser import Certificate
from .replay import ReplayReport, replay

_TOKEN = re.compile(r"(?<![\w^])([A-Za-z_][A-Za-z0-9_]*)(\^-?\d+)?")
_CURVE = re.compile(r"(t_)?(alpha\d+|beta|[abc]\d+)$")
_INVOLUTIONS = {"r_pi", "iota", "id"}
_EXPR_FIELDS = {"expr", "claim", "lhs", "rhs", "dst", "src", "name", "instance"}


@dataclass
class Mutation:
    index: int
    field: str
    before: str
    after: str
    op: str

    def describe(self) -> str:
        return f"step #{self.index} {self.field}: {self.op} {self.before!r} -> {self.after!r}"


@lru_cache(maxsize=None)
def _isotopy_classes(genus: int) -> Dict[str, int]:
    """Atlas curve -> class index; distinct names can be isotopic (c1, c2 at g = 2)."""
    eng = engine(genus)
    reps: List[str] = []
    out: Dict[str, int] = {}
    for name in eng.atlas.curve_names():
        w = eng.atlas.curve(name).word
        for i, r in enumerate(reps):
            if eng.same_curve(w, eng.atlas.curve(r).word):
                out[name] = i
                break
        else:
            out[name] = len(reps)
            reps.append(name)
    return out


def _candidates(kind: str, fields: Dict[str, str], genus: int):
    atlas = load_atlas(genus)
    cls = _isotopy_classes(genus)
    out = []
    for fname, text in fields.items():
        if fname not in _EXPR_FIELDS:
            continue
        for m in _TOKEN.finditer(text):
            name, exp = m.group(1), m.group(2)
            cm = _CURVE.fullmatch(name)
            if cm:
                try:
                    canon = atlas.resolve(cm.group(2))
                except KeyError:
                    canon = None
                if canon is not None:
                    others = [c for c in atlas.curve_names() if cls[c] != cls[canon]]
                    out.append(("swap", fname, m, others, cm.group(1) or ""))
            if name in _INVOLUTIONS or fname in ("name", "instance"):
                continue
            if fname in ("src", "dst") and not (name.startswith("t_") or exp):
                continue  # bare curve arguments carry no exponent
            if exp == "^0":
                continue
            out.append(("flip", fname, m, None, None))
    return out


def propose(report: ReplayReport, rng: random.Random) -> Optional[Mutation]:
    sites = [s for s in report.sites if s[1] != "hypothesis"]
    rng.shuffle(sites)
    for idx, kind, fields, genus in sites:
        cands = _candidates(kind, fields, genus)
        if not cands:
            continue
        op, fname, m, others, prefix = rng.choice(cands)
        text = fields[fname]
        if op == "swap":
            new_tok = prefix + rng.choice(others)
            after = text[:m.start(1)] + new_tok + text[m.end(1):]
        else:
            exp = m.group(2)
            if exp:
                k = -int(exp[1:])
                after = text[:m.start(2)] + f"^{k}" + text[m.end(2):]
            else:
                after = text[:m.end(1)] + "^-1" + text[m.end(1):]
        new_fields = dict(fields)
        new_fields[fname] = after
        return Mutation(idx, fname, text, after, op), new_fields
    return None


def mutants(cert: Certificate, genus: int, count: int = 10, seed: int = 0,
            params=None, base: Optional[ReplayReport] = None) -> List[Tuple[Mutation, ReplayReport]]:
    """Replay ``count`` random single-step mutants; returns (mutation, report) pairs."""
    base = base or replay(cert, genus, params)
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        got = propose(base, rng)
        if got is None:
            break
        mut, fields = got
        rep = replay(cert, genus, params, override={mut.index: fields})
        out.append((mut, rep))
    return out
