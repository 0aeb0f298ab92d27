"""Pure numpy fallback for the rank kernel."""

from __future__ import annotations

import numpy as np

# products of two residues must fit in int64
INT64_SAFE_PRIME = 2**31


def rank_mod_p(A: np.ndarray, p: int) -> int:
    """Rank over F_p by row reduction; entries must already lie in [0, p)."""
    if p < INT64_SAFE_PRIME:
        M = np.array(A, dtype=np.int64, copy=True)
    else:
        M = np.array(A, dtype=object, copy=True)
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        inv = pow(int(M[r, c]), p - 2, p)
        M[r, c:] = (M[r, c:] * inv) % p
        below = r + 1 + np.flatnonzero(M[r + 1 :, c])
        if below.size:
            f = M[below, c]
            M[np.ix_(below, np.arange(c, cols))] = (
                M[below, c:] - (f[:, None] * M[r, c:]) % p
            ) % p
        r += 1
    return r
