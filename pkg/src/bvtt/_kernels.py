"""Modular row reduction kernels.

Reduced row echelon form over F_p on dense int64 arrays.  The numba
version is used when numba imports cleanly and ``BVTT_NUMBA`` is not set
to ``0``; otherwise the vectorised numpy version runs.  Both produce the
same (unique) reduced form.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("BVTT_NUMBA", "1") != "0"


def np_rref_mod_p(a, p):
    """Row-reduce ``a`` in place modulo ``p``; return (a, pivot columns)."""
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            a[rows] = (a[rows] - np.outer(col[rows], a[r])) % p
        pivots.append(c)
        r += 1
    return a, np.array(pivots, dtype=np.int64)


def _nb_inverse(x, p):
    # Fermat inverse; p is prime
    result = 1
    base = x % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


def _nb_rref(a, p):
    nrows, ncols = a.shape
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        k = -1
        for i in range(r, nrows):
            if a[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(ncols):
                t = a[r, j]
                a[r, j] = a[k, j]
                a[k, j] = t
        inv = _nb_inverse(a[r, c], p)
        for j in range(ncols):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(nrows):
            if i == r:
                continue
            f = a[i, c]
            if f == 0:
                continue
            for j in range(ncols):
                a[i, j] = (a[i, j] - f * a[r, j]) % p
        pivots[r] = c
        r += 1
    return a, pivots[:r]


nb_rref_mod_p = None
if USE_NUMBA:
    try:
        import numba

        _nb_inverse = numba.njit(cache=True)(_nb_inverse)
        nb_rref_mod_p = numba.njit(cache=True)(_nb_rref)
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def rref_mod_p(a, p):
    """Dispatch to the compiled kernel when enabled."""
    a = np.ascontiguousarray(a, dtype=np.int64) % p
    if USE_NUMBA and nb_rref_mod_p is not None:
        return nb_rref_mod_p(a, p)
    return np_rref_mod_p(a, p)
