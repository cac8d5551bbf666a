import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mcgwb.mapclass import engine, power
from mcgwb.penner import (ExpandError, MulticurvePair, R_expr, branch_matrix,
                          certified_pf_lower_bound, conjugate_expand, entrywise_ge, is_irreducible,
                          mat_mul, penner_check, penner_pairs, pf_eigenvalue, reducibility_witness,
                          rho_expr, rho_n_expr, rho_pair, rho_prime_expr, transition_matrix)

PF_TOL = 1e-9


def ident(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def permute(m, perm):
    n = len(m)
    out = [[0] * n for _ in range(n)]
    for i, j in itertools.product(range(n), repeat=2):
        out[perm[i]][perm[j]] = m[i][j]
    return out


@pytest.mark.parametrize("g", [3, 4])
def test_penner_named(g):
    eng = engine(g)
    for name, (e, pair) in penner_pairs(eng).items():
        assert penner_check(e, pair, eng), name


def test_penner_rejections():
    eng = engine(3)
    e, pair = penner_pairs(eng)["h1"]
    dropped = tuple(f for f in e if f[0] != "t_alpha2")
    v = penner_check(dropped, pair, eng)
    assert not v and "missing" in v.reason
    v = penner_check(((f, -k) for f, k in e), pair, eng)
    assert not v and "sign" in v.reason
    v = penner_check(rho_n_expr(2), rho_pair(eng), eng)
    assert not v and "symmetry" in v.reason
    bad = MulticurvePair(pair.C, pair.D, fills=False)
    assert not penner_check(e, bad, eng)


def test_expand_examples():
    eng = engine(3)
    assert conjugate_expand(rho_expr(), 3, eng) == (("t_a2", 1), ("t_a3", 1), ("t_a1", 1))
    assert {n for n, _ in conjugate_expand(rho_prime_expr(), 3, eng)} == {"t_c1", "t_c2", "t_c3"}
    w = conjugate_expand(rho_n_expr(2), 3, eng)
    assert len(w) == 9
    assert sorted(n for n, _ in w) == sorted(f"t_{k}{i}" for k in "abc" for i in (1, 2, 3))
    assert all(k == (-2 if n.startswith("t_b") else 1) for n, k in w)
    with pytest.raises(ExpandError):
        conjugate_expand(rho_expr(), 2, eng)


@pytest.mark.parametrize("g", [2, 3])
def test_expand_is_out_equal(g):
    eng = engine(g)
    for e in (rho_expr(), rho_prime_expr(), rho_n_expr(1)):
        assert eng.equal_in_out(conjugate_expand(e, g, eng), power(e, g)).verdict == "Equal"


def test_branch_matrix_shape():
    g = 3
    m = branch_matrix("a", 1, g)
    assert all(m[i][j] - int(i == j) >= 0 for i in range(9) for j in range(9))
    shift = [(i + 3) % 9 for i in range(9)]
    for kind in "abc":
        assert branch_matrix(kind, 2, g) == permute(branch_matrix(kind, 1, g), shift)
    with pytest.raises(ValueError):
        branch_matrix("d", 1, g)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_transition_dominates_printed_product(n):
    eng = engine(3)
    w = conjugate_expand(rho_n_expr(n), 3, eng)
    P = mat_mul(branch_matrix("b", 1, 3, n), branch_matrix("c", 1, 3))
    # the expansion lists t_c1 before t_b1^-n; the cyclic rotation starting at
    # t_b1^-n is a conjugate with the same nonzero spectrum and contains the pair in order
    i = next(k for k, (name, _) in enumerate(w) if name == "t_b1")
    rot = w[i:] + w[:i]
    M, Mrot = transition_matrix(w, 3), transition_matrix(rot, 3)
    assert entrywise_ge(Mrot, P)
    assert not entrywise_ge(M, P)
    assert is_irreducible(M) and is_irreducible(Mrot)
    assert abs(pf_eigenvalue(M) - pf_eigenvalue(Mrot)) <= PF_TOL * pf_eigenvalue(M)
    assert transition_matrix([("t_a1", 1)], 3) == branch_matrix("a", 1, 3)


def test_pf_examples():
    assert abs(pf_eigenvalue(ident(4)) - 1) < PF_TOL
    assert abs(pf_eigenvalue([[2, 1], [1, 1]]) - (3 + math.sqrt(5)) / 2) < PF_TOL
    eng = engine(3)
    M = transition_matrix(conjugate_expand(rho_n_expr(1), 3, eng), 3)
    assert pf_eigenvalue(M) >= 2
    assert certified_pf_lower_bound(ident(3), 1)
    assert not certified_pf_lower_bound(ident(3), 2)


def nonneg(n):
    return st.lists(st.lists(st.integers(0, 4), min_size=n, max_size=n), min_size=n, max_size=n)


def positive_part(m):
    return [[x + 1 for x in row] for row in m]  # strictly positive, hence irreducible


@given(nonneg(4), st.permutations(range(4)))
def test_pf_permutation_invariant(m, perm):
    m = positive_part(m)
    a, b = pf_eigenvalue(m), pf_eigenvalue(permute(m, perm))
    assert abs(a - b) <= PF_TOL * max(1, a)


@given(nonneg(4), nonneg(4))
def test_pf_monotone(n, noise):
    N = positive_part(n)
    M = [[x + y for x, y in zip(r, s)] for r, s in zip(N, noise)]
    assert pf_eigenvalue(M) >= pf_eigenvalue(N) - PF_TOL * pf_eigenvalue(M)


@given(nonneg(4), st.fractions(min_value=0, max_value=20, max_denominator=7))
def test_certificate_is_sound(m, c):
    m = positive_part(m)
    if certified_pf_lower_bound(m, c):
        assert pf_eigenvalue(m) >= float(c) - PF_TOL * float(c)


@pytest.mark.parametrize("g", [2, 3])
def test_reducibility(g):
    eng = engine(g)
    assert reducibility_witness(rho_expr(), [f"a{i}" for i in range(1, g + 1)], eng)
    assert reducibility_witness(rho_prime_expr(), [f"c{i}" for i in range(1, g + 1)], eng)
    assert reducibility_witness(R_expr(g), [f"alpha{2 * g + 1}"], eng)
    v = reducibility_witness(rho_n_expr(1), ["a1"], eng)
    assert v.verdict == "Failed" and v.name == "a1"


def test_pf_exact_small():
    # the golden 2x2 example certified with rationals just below the root
    m = [[2, 1], [1, 1]]
    assert certified_pf_lower_bound(m, Fraction(2617, 1000))
    assert not certified_pf_lower_bound(m, Fraction(2619, 1000))
