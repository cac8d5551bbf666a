"""Penner's criterion, branch matrices on the a/b/c train track, and
certified Perron-Frobenius bounds.

Measure coordinates are mu_1 ... mu_3g with mu_{3j-2} on b_j, mu_{3j-1}
on a_j and mu_{3j} on c_j.  Matrices are lists of integer rows and the
matrix of a composite is the product in the same order as the factors.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import homology as H
from .mapclass import Expr, MappingClassEngine, normalize

IntMatrix = List[List[int]]


# -- Penner's criterion -----------------------------------------------------

@dataclass(frozen=True)
class MulticurvePair:
    C: FrozenSet[str]
    D: FrozenSet[str]
    fills: bool = True  # declared from the pictures, not computed

    @classmethod
    def of(cls, eng: MappingClassEngine, C: Iterable[str], D: Iterable[str], fills=True):
        res = eng.atlas.resolve
        return cls(frozenset(res(c) for c in C), frozenset(res(d) for d in D), fills)

    def problems(self, eng: MappingClassEngine) -> List[str]:
        """Violations of the pair invariants, from the declared intersections."""
        out = []
        curves = eng.atlas.curves
        for fam, other in ((self.C, self.D), (self.D, self.C)):
            for p in fam:
                if curves[p].declared_one_intersection & fam:
                    out.append(f"{p} meets its own family")
                if not curves[p].declared_one_intersection & other:
                    out.append(f"{p} misses the opposite family")
        if self.C & self.D:
            out.append("families overlap")
        if not self.fills:
            out.append("not declared filling")
        return out


@dataclass(frozen=True)
class PennerVerdict:
    verdict: str  # "Certified" | "Rejected"
    reason: str = ""

    def __bool__(self):
        return self.verdict == "Certified"


def penner_check(e: Sequence[Tuple[str, int]], pair: MulticurvePair,
                 eng: MappingClassEngine) -> PennerVerdict:
    probs = pair.problems(eng)
    if probs:
        return PennerVerdict("Rejected", probs[0])
    seen = set()
    for name, k in eng.canonical(e):
        if not name.startswith("t_"):
            return PennerVerdict("Rejected", f"symmetry factor {name}")
        c = name[2:]
        if c in pair.C and k > 0 or c in pair.D and k < 0:
            seen.add(c)
        else:
            return PennerVerdict("Rejected", f"factor {name}^{k} has the wrong sign or curve")
    missing = sorted((pair.C | pair.D) - seen)
    if missing:
        return PennerVerdict("Rejected", f"missing curve {missing[0]}")
    return PennerVerdict("Certified", f"{len(pair.C)}+{len(pair.D)} curves, all used")


# -- the named elements -----------------------------------------------------

def h_expr(j: int, g: int) -> Expr:
    """h_j for 1 <= j <= 2g+1."""
    out: List[Tuple[str, int]] = []
    if j % 2 == 0:
        out.append((f"t_alpha{j}", -1))
        start = j + 1
    else:
        start = j
    for m in range(start, 2 * g, 2):
        out += [(f"t_alpha{m}", 1), (f"t_alpha{m + 1}", -1)]
    out.append((f"t_alpha{2 * g + 1}", 1))
    return normalize(out)


def f_expr(j: int, g: int) -> Expr:
    out: List[Tuple[str, int]] = [("t_beta", 1)]
    if j % 2 == 0:
        out.append((f"t_alpha{j}", -1))
        start = j + 1
    else:
        start = j
    for m in range(start, 2 * g, 2):
        out += [(f"t_alpha{m}", 1), (f"t_alpha{m + 1}", -1)]
    return normalize(out)


def rho_n_expr(n: int) -> Expr:
    return (("r", 1), ("t_c1", 1), ("t_b1", -n), ("t_a1", 1))


def rho_expr() -> Expr:
    return (("r", 1), ("t_a1", 1))


def rho_prime_expr() -> Expr:
    return (("r", 1), ("t_c1", 1))


def R_expr(g: int) -> Expr:
    base = [("t_alpha1", 2)] + [(f"t_alpha{j}", 1) for j in range(2, 2 * g)]
    return normalize(base * (g - 1) + [(f"t_alpha{2 * g + 1}", -1)])


def penner_pairs(eng: MappingClassEngine) -> Dict[str, Tuple[Expr, MulticurvePair]]:
    g = eng.genus
    odd = [f"alpha{j}" for j in range(1, 2 * g + 2, 2)]
    even = [f"alpha{j}" for j in range(2, 2 * g + 1, 2)]
    odd_f = [f"alpha{j}" for j in range(1, 2 * g, 2)] + ["beta"]
    return {
        "h1": (h_expr(1, g), MulticurvePair.of(eng, odd, even)),
        "h2": (h_expr(2, g), MulticurvePair.of(eng, odd[1:], even)),
        "f1": (f_expr(1, g), MulticurvePair.of(eng, odd_f, even)),
        "f2": (f_expr(2, g), MulticurvePair.of(eng, odd_f[1:], even)),
    }


def rho_pair(eng: MappingClassEngine) -> MulticurvePair:
    g = eng.genus
    C = [f"a{i}" for i in range(1, g + 1)] + [f"c{i}" for i in range(1, g + 1)]
    D = [f"b{i}" for i in range(1, g + 1)]
    return MulticurvePair.of(eng, C, D)


# -- pushing symmetries through ---------------------------------------------

class ExpandError(ValueError):
    pass


def symmetry_order(name: str, g: int) -> int:
    return {"r": g, "r_pi": 2, "iota": 2}[name]


def curve_permutation(eng: MappingClassEngine, sym: str) -> Dict[str, str]:
    out = {}
    names = eng.atlas.curve_names()
    for c in names:
        img = eng.apply(((sym, 1),), c)
        match = [m for m in names if eng.same_curve(img, m)]
        if match:
            out[c] = match[0]
    return out


def conjugate_expand(e: Sequence[Tuple[str, int]], power: int,
                     eng: MappingClassEngine) -> Expr:
    """Rewrite (s W)^power as a product of twists, s a symmetry of order
    dividing ``power`` and W a twist word: (sW)^p = prod_i s^i W s^-i."""
    e = eng.canonical(e)
    if not e or e[0][1] != 1 or e[0][0] not in ("r", "r_pi", "iota"):
        raise ExpandError("expression must start with a symmetry to the first power")
    sym = e[0][0]
    order = symmetry_order(sym, eng.genus)
    if power % order:
        raise ExpandError(f"order of {sym} ({order}) does not divide {power}")
    word = e[1:]
    if any(not n.startswith("t_") for n, _ in word):
        raise ExpandError("only one symmetry factor is supported")
    perm = curve_permutation(eng, sym)
    out: List[Tuple[str, int]] = []
    cur = {c: c for c in perm}
    for _ in range(power):
        cur = {c: perm[cur[c]] for c in cur}
        for n, k in word:
            out.append(("t_" + cur[n[2:]], k))
    return normalize(out)


# -- branch matrices --------------------------------------------------------

def _unit(g: int) -> IntMatrix:
    return [[int(i == j) for j in range(3 * g)] for i in range(3 * g)]


def _b(j: int, g: int) -> int:
    return 3 * ((j - 1) % g)  # 0-based index of mu_{3j-2}


def branch_matrix(kind: str, i: int, g: int, n: int = 1) -> IntMatrix:
    """Matrix of t_{a_i}, t_{b_i}^-n (kind "b") or t_{c_i} on mu_1..mu_3g."""
    m = _unit(g)
    bi = _b(i, g)
    if kind == "a":
        m[bi + 1][bi] += 1
    elif kind == "b":
        m[bi][bi + 1] += n
        m[bi][bi + 2] += n
        m[bi][_b(i - 1, g) + 2] += n
    elif kind == "c":
        m[bi + 2][bi] += 1
        m[bi + 2][_b(i + 1, g)] += 1
    else:
        raise ValueError(f"unsupported twist label {kind!r}")
    return m


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def factor_matrix(name: str, k: int, g: int) -> IntMatrix:
    m = re.fullmatch(r"t_([abc])(\d+)", name)
    if not m:
        raise ValueError(f"no branch matrix for {name}")
    kind, i = m.group(1), int(m.group(2))
    if kind == "b":
        if k >= 0:
            raise ValueError("only negative powers of t_b act on this track")
        return branch_matrix("b", i, g, -k)
    if k <= 0:
        raise ValueError(f"only positive powers of t_{kind} act on this track")
    base = branch_matrix(kind, i, g)
    out = base
    for _ in range(k - 1):
        out = mat_mul(out, base)
    return out


def transition_matrix(word: Sequence[Tuple[str, int]], g: int) -> IntMatrix:
    if not word:
        raise ValueError("empty word")
    out = None
    for name, k in word:
        f = factor_matrix(name, k, g)
        out = f if out is None else mat_mul(out, f)
    return out


def is_irreducible(m: IntMatrix) -> bool:
    n = len(m)
    p = np.eye(n, dtype=object) + np.array(m, dtype=object)
    acc = np.eye(n, dtype=object)
    for _ in range(n):
        acc = acc.dot(p)
    return bool(all(x > 0 for x in acc.ravel()))


def entrywise_ge(m: IntMatrix, n: IntMatrix) -> bool:
    return all(x >= y for r, s in zip(m, n) for x, y in zip(r, s))


# -- Perron-Frobenius -------------------------------------------------------

class ConvergenceError(RuntimeError):
    pass


def _pf_vector(m: IntMatrix, tol: float, cap: int):
    a = np.array(m, dtype=float)
    n = a.shape[0]
    # shift by I so that irreducible but periodic matrices still converge
    s = a + np.eye(n)
    v = np.ones(n)
    for _ in range(cap):
        w = s @ v
        w = w / w.max()
        aw = a @ w
        pos = w > 1e-300
        r = aw[pos] / w[pos]
        lo, hi = r.min(), r.max()
        # Collatz-Wielandt: lo <= PF <= hi once w is positive
        if pos.all() and hi - lo <= tol * max(1.0, abs(hi)):
            return 0.5 * (lo + hi), w
        if np.abs(w - v).max() <= 1e-15:
            return 0.5 * (lo + hi), w
        v = w
    raise ConvergenceError("power iteration did not converge")


def pf_eigenvalue(m: IntMatrix, tol: float = 1e-10, cap: int = 100_000) -> float:
    return _pf_vector(m, tol, cap)[0]


@dataclass(frozen=True)
class PFBound:
    holds: bool
    lower: Fraction
    upper: Fraction
    vector: Tuple[Fraction, ...] = field(default=())


def pf_enclosure(m: IntMatrix, tol: float = 1e-13) -> PFBound:
    """Collatz-Wielandt enclosure min (Mv)_i/v_i <= PF <= max (Mv)_i/v_i
    for a positive rational v taken from power iteration."""
    try:
        _, v = _pf_vector(m, tol, 100_000)
    except ConvergenceError:
        v = np.ones(len(m))
    vec = [Fraction(float(x)) if x > 0 else Fraction(1, 10 ** 12) for x in v]
    mv = [sum(a * b for a, b in zip(row, vec)) for row in m]
    ratios = [x / y for x, y in zip(mv, vec)]
    return PFBound(True, min(ratios), max(ratios), tuple(vec))


def certified_pf_lower_bound(m: IntMatrix, c) -> bool:
    """True when a non-negative nonzero rational v with Mv >= cv is found."""
    c = Fraction(c)
    n = len(m)
    candidates = [pf_enclosure(m).vector]
    candidates += [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    for vec in candidates:
        if not any(vec):
            continue
        mv = [sum(a * b for a, b in zip(row, vec)) for row in m]
        if all(x >= c * y for x, y in zip(mv, vec)):
            return True
    return False


# -- reducibility -----------------------------------------------------------

@dataclass(frozen=True)
class ReducibilityVerdict:
    verdict: str  # "Witnessed" | "Failed" | "Undecided"
    name: str = ""

    def __bool__(self):
        return self.verdict == "Witnessed"


def reducibility_witness(e: Sequence[Tuple[str, int]], curves: Iterable[str],
                         eng: MappingClassEngine) -> ReducibilityVerdict:
    curves = list(curves)
    for c in curves:
        img = eng.apply(e, c)
        hits = [eng.same_curve(img, d) for d in curves]
        if True in hits:
            continue
        if None in hits:
            return ReducibilityVerdict("Undecided", c)
        return ReducibilityVerdict("Failed", c)
    return ReducibilityVerdict("Witnessed")


def not_periodic(e: Sequence[Tuple[str, int]], power: int, eng: MappingClassEngine):
    """Infinite-order witness for the homology image of e^power."""
    m = H.mat_pow(H.homology_image(e, eng), power)
    return H.infinite_order_witness(m)
