"""Independent oracles for the word engine.

The surface group acts faithfully on the hyperbolic plane by the side
pairings of a regular 4g-gon, so a word is trivial exactly when its matrix
is +-I.  Nothing here touches Dehn's algorithm.
"""
import itertools
import math

import numpy as np


def _rot(theta):
    return np.array([[np.exp(0.5j * theta), 0], [0, np.exp(-0.5j * theta)]])


def _trans(d):
    c, s = math.cosh(d / 2), math.sinh(d / 2)
    return np.array([[c, s], [s, c]], dtype=complex)


def _relator(g):
    rel = []
    for i in range(1, g + 1):
        rel += [2 * i - 1, 2 * i, -(2 * i - 1), -2 * i]
    return rel


def _evaluate(mats, w):
    m = np.eye(2, dtype=complex)
    for a in w:
        m = m @ (mats[a])
    return m


def fuchsian_generators(g):
    """Matrices in SU(1,1) for x1, y1, ..., keyed by signed letter."""
    n = 4 * g
    rho = math.acosh(1 / math.tan(math.pi / n))
    theta = [2 * math.pi * j / n for j in range(n)]
    pair = {}
    for blk in range(g):
        for off in (0, 1):
            j = 4 * blk + off
            k = j + 2
            pair[2 * blk + off + 1] = _rot(theta[k]) @ _trans(2 * rho) @ _rot(math.pi - theta[j])
    rel = _relator(g)
    for signs in itertools.product((1, -1), repeat=2 * g):
        mats = {}
        for a in range(1, 2 * g + 1):
            m = pair[a] if signs[a - 1] > 0 else np.linalg.inv(pair[a])
            mats[a] = m
            mats[-a] = np.linalg.inv(m)
        r = _evaluate(mats, rel)
        if min(np.abs(r - np.eye(2)).max(), np.abs(r + np.eye(2)).max()) < 1e-9:
            return mats
    raise RuntimeError("no consistent side pairing found")


class FuchsianOracle:
    def __init__(self, g):
        self.g = g
        self.mats = fuchsian_generators(g)

    def matrix(self, w):
        return _evaluate(self.mats, w)

    def is_trivial(self, w):
        m = self.matrix(w)
        scale = max(1.0, np.abs(m).max())
        tol = 1e-9 * scale
        return bool(min(np.abs(m - np.eye(2)).max(), np.abs(m + np.eye(2)).max()) < tol)

    def key(self, w, digits=6):
        """Hashable key of the element, up to the sign ambiguity of PSU."""
        m = self.matrix(w)
        if m[0, 0].real < 0 or (abs(m[0, 0].real) < 1e-9 and m[0, 0].imag < 0):
            m = -m
        return tuple(np.round(np.concatenate([m.real.ravel(), m.imag.ravel()]), digits) + 0.0)

    def same_element(self, u, v, tol=1e-8):
        """Compare two words without forming u v^-1, whose product loses
        precision when the factors are long."""
        a, b = self.matrix(u), self.matrix(v)
        scale = max(np.abs(a).max(), np.abs(b).max())
        return bool(min(np.abs(a - b).max(), np.abs(a + b).max()) <= tol * scale)

    def abs_trace(self, w):
        return abs(np.trace(self.matrix(w)).real)


def reduced_words(g, max_len):
    """All freely reduced words of length <= max_len."""
    letters = [a for i in range(1, 2 * g + 1) for a in (i, -i)]
    level = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in level:
            for a in letters:
                if w and w[-1] == -a:
                    continue
                nxt.append(w + (a,))
        for w in nxt:
            yield w
        level = nxt


def stack_free_reduce(w):
    out = []
    for a in w:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)
