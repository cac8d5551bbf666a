"""Pure-Python implementations of the hot word and matrix kernels.

These mirror ``_ckernels.pyx`` function for function; ``mcgwb._kernels``
picks the compiled module when it imports and falls back to this one.

Letters are nonzero ints: ``2i-1`` is x_i, ``2i`` is y_i, negatives are
inverses.  The relator is x1 y1 X1 Y1 x2 y2 X2 Y2 ...
"""

BACKEND = "python"


def relator_tables(g):
    """Successor tables of the relator and its inverse, indexed by letter + 2g."""
    rel = []
    for i in range(1, g + 1):
        x, y = 2 * i - 1, 2 * i
        rel += [x, y, -x, -y]
    n = len(rel)
    off = 2 * g
    succ = [0] * (4 * g + 1)
    succ_inv = [0] * (4 * g + 1)
    pos = [0] * (4 * g + 1)
    pos_inv = [0] * (4 * g + 1)
    inv = [-a for a in reversed(rel)]
    for k in range(n):
        succ[rel[k] + off] = rel[(k + 1) % n]
        pos[rel[k] + off] = k
        succ_inv[inv[k] + off] = inv[(k + 1) % n]
        pos_inv[inv[k] + off] = k
    return rel, inv, succ, succ_inv, pos, pos_inv


def free_reduce(word):
    out = []
    for a in word:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return out


def dehn_reduce_linear(word, g):
    """Stack form of Dehn's algorithm.

    Any run of more than half of a cyclic relator (or its inverse) is
    replaced by the inverse of the complementary piece.  Exact halves are
    left alone.
    """
    if g < 2:
        return free_reduce(word)
    rel, inv, succ, succ_inv, pos, pos_inv = relator_tables(g)
    off = 2 * g
    n = 4 * g
    half = 2 * g
    stack = []
    run_r = []
    run_i = []
    pending = []
    it = iter(word)
    while True:
        if pending:
            a = pending.pop()
        else:
            a = next(it, 0)
            if a == 0:
                break
        if stack and stack[-1] == -a:
            stack.pop()
            run_r.pop()
            run_i.pop()
            continue
        if stack:
            top = stack[-1]
            rr = run_r[-1] + 1 if succ[top + off] == a else 1
            ri = run_i[-1] + 1 if succ_inv[top + off] == a else 1
        else:
            rr = ri = 1
        stack.append(a)
        run_r.append(rr)
        run_i.append(ri)
        if rr > half:
            cyc, p = rel, pos
        elif ri > half:
            cyc, p = inv, pos_inv
        else:
            continue
        start = stack[-(half + 1)]
        k0 = p[start + off]
        del stack[-(half + 1):]
        del run_r[-(half + 1):]
        del run_i[-(half + 1):]
        # complement T of length half-1 follows the run; push T^-1 in order,
        # pending is popped from the end so store it reversed
        comp = [cyc[(k0 + half + 1 + j) % n] for j in range(half - 1)]
        repl = [-c for c in reversed(comp)]
        pending.extend(reversed(repl))
    return stack


def cyclic_runs(word, g):
    """Longest cyclic run along the relator or its inverse, with its start.

    Returns ``(length, start, which)`` where ``which`` is 0 for the relator
    and 1 for its inverse.  A word made entirely of one run reports its own
    length when it closes up.
    """
    rel, inv, succ, succ_inv, pos, pos_inv = relator_tables(g)
    off = 2 * g
    m = len(word)
    best = (0, 0, 0)
    if m == 0:
        return best
    for which, table in ((0, succ), (1, succ_inv)):
        cont = [table[word[i] + off] == word[(i + 1) % m] for i in range(m)]
        if all(cont):
            return (10 ** 9, 0, which)
        # start from a break so runs do not straddle the scan origin
        b = cont.index(False)
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


def mat_mul_mod(a, b, n, p):
    """Product of two n x n matrices stored as flat tuples, entries mod p."""
    out = [0] * (n * n)
    for i in range(n):
        row = i * n
        for k in range(n):
            aik = a[row + k]
            if aik:
                col = k * n
                for j in range(n):
                    out[row + j] += aik * b[col + j]
    return tuple(x % p for x in out)


def gf2_pack(mat, n):
    """Pack an n x n 0/1 matrix (flat sequence) into an int, row-major."""
    v = 0
    for i in range(n):
        for j in range(n):
            if mat[i * n + j] & 1:
                v |= 1 << (i * n + j)
    return v


def gf2_mul(a, b, n):
    mask = (1 << n) - 1
    out = 0
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


def gf2_closure(gens, n, budget):
    """BFS closure of packed GF(2) matrices under right multiplication.

    Returns ``(size, complete)``; stops once ``budget`` elements are seen.
    """
    ident = 0
    for i in range(n):
        ident |= 1 << (i * n + i)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            for s in gens:
                q = gf2_mul(m, s, n)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
                    if len(seen) >= budget:
                        return len(seen), False
        frontier = nxt
    return len(seen), True
