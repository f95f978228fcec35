"""Independent reference implementations used only by the tests.

Everything here is computed with mpmath at 50 significant digits so the
package's float64 results can be judged against a source that shares none
of its code paths.
"""

from __future__ import annotations

import mpmath

mpmath.mp.dps = 50


def softmax_reference(point, vectors) -> list[float]:
    """High-precision softmax of the scores vectors @ point."""
    scores = [
        mpmath.fsum(mpmath.mpf(repr(float(p))) * mpmath.mpf(repr(float(v)))
                    for p, v in zip(point, row))
        for row in vectors
    ]
    exps = [mpmath.e ** s for s in scores]
    total = mpmath.fsum(exps)
    return [float(e / total) for e in exps]


def cosine_reference(a, b) -> float:
    """High-precision cosine of the angle between two vectors."""
    av = [mpmath.mpf(repr(float(x))) for x in a]
    bv = [mpmath.mpf(repr(float(x))) for x in b]
    num = mpmath.fsum(x * y for x, y in zip(av, bv))
    na = mpmath.sqrt(mpmath.fsum(x * x for x in av))
    nb = mpmath.sqrt(mpmath.fsum(x * x for x in bv))
    return float(num / (na * nb))


def coargmax_bruteforce(vectors, i, j, samples=720, radii=(0.25, 1.0, 4.0)):
    """Search for a point where labels i and j strictly beat all others
    while tying each other, scanning ray directions on the tie line.

    The tie set {f : (g_i - g_j) . f = 0} is a hyperplane through the
    origin; in 2D it is spanned by one vector w, so scanning t * w and
    t * (-w) over a few magnitudes either finds a witness or (for the
    well-separated instances the tests use) correctly reports none.
    Only valid in 2D.
    """
    gi = [mpmath.mpf(repr(float(x))) for x in vectors[i]]
    gj = [mpmath.mpf(repr(float(x))) for x in vectors[j]]
    diff = [a - b for a, b in zip(gi, gj)]
    w = [-diff[1], diff[0]]
    norm = mpmath.sqrt(w[0] * w[0] + w[1] * w[1])
    if norm == 0:
        raise ValueError("identical unembeddings have no tie direction")
    w = [w[0] / norm, w[1] / norm]
    for sign in (1, -1):
        for r in radii:
            f = [sign * r * w[0], sign * r * w[1]]
            score_ij = gi[0] * f[0] + gi[1] * f[1]
            ok = True
            for k, row in enumerate(vectors):
                if k in (i, j):
                    continue
                gk = [mpmath.mpf(repr(float(x))) for x in row]
                if gk[0] * f[0] + gk[1] * f[1] >= score_ij:
                    ok = False
                    break
            if ok:
                return [float(f[0]), float(f[1])]
    return None
