"""Action on first homology: transvections, mod-p closures, order witnesses.

Matrices are tuples of integer rows acting on column vectors in the basis
(x1, y1, x2, y2, ...), where x_i is the class of a_i and y_i that of b_i.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import _kernels

Matrix = Tuple[Tuple[int, ...], ...]

DEFAULT_BUDGET = 5_000_000


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(b[0])
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, cols[j])) for j in range(n)) for row in a)


def mat_pow(a: Matrix, k: int) -> Matrix:
    if k < 0:
        a, k = inverse_symplectic(a), -k
    out = identity(len(a))
    base = a
    while k:
        if k & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        k >>= 1
    return out


def neg(a: Matrix) -> Matrix:
    return tuple(tuple(-x for x in row) for row in a)


def form(genus: int) -> Matrix:
    """The intersection form J, with <y_i, x_i> = 1."""
    n = 2 * genus
    rows = [[0] * n for _ in range(n)]
    for i in range(genus):
        rows[2 * i][2 * i + 1] = -1
        rows[2 * i + 1][2 * i] = 1
    return tuple(tuple(r) for r in rows)


def pairing(u: Sequence[int], v: Sequence[int]) -> int:
    """<u, v> for the form above."""
    return sum(v[2 * i] * u[2 * i + 1] - u[2 * i] * v[2 * i + 1] for i in range(len(u) // 2))


def transvection(h: Sequence[int]) -> Matrix:
    """x -> x + <x, h> h, the homology action of the right-handed twist."""
    n = len(h)
    basis = identity(n)
    cols = []
    for j in range(n):
        e = basis[j]
        c = pairing(e, h)
        cols.append([e[i] + c * h[i] for i in range(n)])
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def is_symplectic(m: Matrix) -> bool:
    J = form(len(m) // 2)
    return mat_mul(mat_mul(transpose(m), J), m) == J


def inverse_symplectic(m: Matrix) -> Matrix:
    # M^-1 = J^-1 M^T J and J^-1 = -J
    J = form(len(m) // 2)
    return neg(mat_mul(mat_mul(J, transpose(m)), J))


def homology_image(expr, eng) -> Matrix:
    """Product of factor images for an expression over the atlas."""
    g = eng.genus
    out = identity(2 * g)
    for name, k in eng.canonical(expr):
        out = mat_mul(out, factor_image(eng, name, k))
    return out


def factor_image(eng, name: str, k: int) -> Matrix:
    g = eng.genus
    if name == "r":
        return eng.atlas.shift(k).homology()
    if name == "iota":
        return identity(2 * g) if k % 2 == 0 else neg(identity(2 * g))
    if name == "r_pi":
        base = homology_image(eng.chain_reversal(), eng)
        return mat_pow(base, k)
    h = eng.atlas.curve(name[2:]).homology
    return mat_pow(transvection(h), k)


# -- finite quotients -------------------------------------------------------

def sp_order(genus: int, p: int) -> int:
    out = p ** (genus * genus)
    for i in range(1, genus + 1):
        out *= p ** (2 * i) - 1
    return out


@dataclass(frozen=True)
class ClosureReport:
    set_name: str
    p: int
    genus: int
    size: int
    target: int
    complete: bool

    @property
    def verdict(self) -> str:
        if not self.complete:
            return "budget-exceeded"
        return "full" if self.size == self.target else "proper"

    def to_json(self) -> dict:
        return {"set": self.set_name, "p": self.p, "genus": self.genus, "size": self.size,
                "target_order": self.target, "verdict": self.verdict}


def closure_budget(default: int = DEFAULT_BUDGET) -> int:
    env = os.environ.get("MCGWB_BUDGET")
    return int(env) if env else default


def mod_p_closure(mats: Sequence[Matrix], p: int, set_name: str = "",
                  budget: Optional[int] = None) -> ClosureReport:
    if budget is None:
        budget = closure_budget()
    n = len(mats[0])
    g = n // 2
    flat = [tuple(x % p for row in m for x in row) for m in mats]
    if p == 2 and n * n <= 64:
        gens = [_kernels.gf2_pack(f, n) for f in flat]
        size, complete = _kernels.gf2_closure(gens, n, budget)
    else:
        size, complete = _closure_tuples(flat, n, p, budget)
    return ClosureReport(set_name, p, g, size, sp_order(g, p), complete)


def _closure_tuples(gens: List[tuple], n: int, p: int, budget: int):
    ident = tuple(int(i == j) for i in range(n) for j in range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            for s in gens:
                q = _kernels.mat_mul_mod(m, s, n, p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
                    if len(seen) >= budget:
                        return len(seen), False
        frontier = nxt
    return len(seen), True


# -- order witnesses --------------------------------------------------------

@dataclass(frozen=True)
class OrderWitness:
    verdict: str  # "InfiniteOrder" | "Inconclusive"
    reason: str = ""

    def __bool__(self):
        return self.verdict == "InfiniteOrder"


def infinite_order_witness(m: Matrix) -> OrderWitness:
    n = len(m)
    ident = identity(n)
    if m == ident:
        return OrderWitness("Inconclusive", "identity")
    d = tuple(tuple(m[i][j] - ident[i][j] for j in range(n)) for i in range(n))
    p = d
    for _ in range(n - 1):
        p = mat_mul(p, d)
    if all(x == 0 for row in p for x in row):
        return OrderWitness("InfiniteOrder", "unipotent and not the identity")
    tr = sum(m[i][i] for i in range(n))
    if abs(tr) > n:
        # a finite-order matrix has root-of-unity eigenvalues, so |tr| <= n
        return OrderWitness("InfiniteOrder", f"|trace| = {abs(tr)} > {n}")
    return OrderWitness("Inconclusive", "no certificate")
