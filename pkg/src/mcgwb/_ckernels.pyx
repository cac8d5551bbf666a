# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the kernels in ``_pykernels``."""
from libc.stdint cimport uint64_t

from ._pykernels import relator_tables

BACKEND = "cython"


def free_reduce(word):
    cdef list out = []
    cdef long a
    for a in word:
        if out and out[len(out) - 1] == -a:
            out.pop()
        else:
            out.append(a)
    return out


def dehn_reduce_linear(word, int g):
    if g < 2:
        return free_reduce(word)
    rel, inv, succ_l, succ_inv_l, pos_l, pos_inv_l = relator_tables(g)
    cdef int off = 2 * g
    cdef int n = 4 * g
    cdef int half = 2 * g
    cdef int[:] succ = _arr(succ_l)
    cdef int[:] succ_inv = _arr(succ_inv_l)
    cdef int[:] pos = _arr(pos_l)
    cdef int[:] pos_inv = _arr(pos_inv_l)
    cdef int[:] crel = _arr(rel)
    cdef int[:] cinv = _arr(inv)
    cdef Py_ssize_t m = len(word)
    cdef Py_ssize_t cap = m + n + 8
    cdef int[:] stack = _zeros(cap)
    cdef int[:] run_r = _zeros(cap)
    cdef int[:] run_i = _zeros(cap)
    cdef list pending = []
    cdef Py_ssize_t top = 0, idx = 0, j
    cdef int a, t, rr, ri, start, k0, which
    cdef int[:] cyc
    while True:
        if pending:
            a = pending.pop()
        elif idx < m:
            a = word[idx]
            idx += 1
        else:
            break
        if top and stack[top - 1] == -a:
            top -= 1
            continue
        if top:
            t = stack[top - 1]
            rr = run_r[top - 1] + 1 if succ[t + off] == a else 1
            ri = run_i[top - 1] + 1 if succ_inv[t + off] == a else 1
        else:
            rr = 1
            ri = 1
        if top >= cap:
            cap *= 2
            stack = _grow(stack, cap)
            run_r = _grow(run_r, cap)
            run_i = _grow(run_i, cap)
        stack[top] = a
        run_r[top] = rr
        run_i[top] = ri
        top += 1
        if rr > half:
            cyc = crel
            k0 = pos[stack[top - half - 1] + off]
        elif ri > half:
            cyc = cinv
            k0 = pos_inv[stack[top - half - 1] + off]
        else:
            continue
        top -= half + 1
        # pending pops from the end: append T^-1 reversed, i.e. T in order negated
        for j in range(half - 1):
            pending.append(-cyc[(k0 + half + 1 + j) % n])
    return [stack[j] for j in range(top)]


def cyclic_runs(word, int g):
    rel, inv, succ_l, succ_inv_l, pos_l, pos_inv_l = relator_tables(g)
    cdef int off = 2 * g
    cdef Py_ssize_t m = len(word)
    cdef Py_ssize_t i, j, b, step, length, start
    cdef int which
    best = (0, 0, 0)
    if m == 0:
        return best
    cdef int[:] w = _arr(word)
    cdef int[:] table
    cdef int[:] cont = _zeros(m)
    for which in range(2):
        table = _arr(succ_l if which == 0 else succ_inv_l)
        b = -1
        for i in range(m):
            cont[i] = table[w[i] + off] == w[(i + 1) % m]
            if not cont[i] and b < 0:
                b = i
        if b < 0:
            return (10 ** 9, 0, which)
        i = (b + 1) % m
        length = 1
        start = i
        for step in range(m):
            j = (i + step) % m
            if cont[j]:
                length += 1
            else:
                if length > best[0]:
                    best = (length, start, which)
                start = (j + 1) % m
                length = 1
    return best


def mat_mul_mod(a, b, int n, long p):
    cdef long[:] ca = _larr(a)
    cdef long[:] cb = _larr(b)
    cdef long[:] out = _lzeros(n * n)
    cdef int i, j, k
    cdef long aik
    for i in range(n):
        for k in range(n):
            aik = ca[i * n + k]
            if aik:
                for j in range(n):
                    out[i * n + j] += aik * cb[k * n + j]
    return tuple([out[i] % p for i in range(n * n)])


cdef inline uint64_t _gf2_mul(uint64_t a, uint64_t b, int n) nogil:
    cdef uint64_t mask = (<uint64_t>1 << n) - 1
    cdef uint64_t out = 0, ra, acc
    cdef int i, k
    for i in range(n):
        ra = (a >> (i * n)) & mask
        acc = 0
        k = 0
        while ra:
            if ra & 1:
                acc ^= (b >> (k * n)) & mask
            ra >>= 1
            k += 1
        out |= acc << (i * n)
    return out


def gf2_mul(a, b, int n):
    if n * n > 64:
        from ._pykernels import gf2_mul as slow
        return slow(a, b, n)
    return _gf2_mul(a, b, n)


def gf2_closure(gens, int n, long budget):
    if n * n > 64:
        from ._pykernels import gf2_closure as slow
        return slow(gens, n, budget)
    cdef uint64_t ident = 0, q, m
    cdef int i
    for i in range(n):
        ident |= (<uint64_t>1) << (i * n + i)
    cdef list cg = [int(s) for s in gens]
    cdef uint64_t s
    seen = {ident}
    cdef list frontier = [ident]
    cdef list nxt
    while frontier:
        nxt = []
        for mm in frontier:
            m = mm
            for ss in cg:
                s = ss
                q = _gf2_mul(m, s, n)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
                    if len(seen) >= budget:
                        return len(seen), False
        frontier = nxt
    return len(seen), True


cdef int[:] _arr(seq):
    import array
    return array.array("i", seq)


cdef int[:] _zeros(Py_ssize_t k):
    import array
    return array.array("i", bytes(4 * max(k, 1)))


cdef int[:] _grow(int[:] old, Py_ssize_t cap):
    import array
    new = array.array("i", bytes(4 * cap))
    cdef int[:] v = new
    v[:old.shape[0]] = old
    return v


cdef long[:] _larr(seq):
    import array
    return array.array("l", seq)


cdef long[:] _lzeros(Py_ssize_t k):
    import array
    return array.array("l", bytes(8 * max(k, 1)))
