"""Hot loops: U-statistic sums over batches of sample blocks, chaos enumeration.

Each kernel exists twice: a numba version (``*_nb``) and a numpy version
(``*_np``) that accumulates in the same order, so integer results agree
exactly and float results agree bit-for-bit in practice.  ``USE_NUMBA`` picks
one at call time through the public wrappers at the bottom.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

# point-kernel codes, mirrored by the kernel classes in ``model``
CONSTANT, PRODUCT, DISTANCE, POLYNOMIAL = 0, 1, 2, 3


def _tuple_bases(tuples, n, m, k):
    # row offset of each index tuple inside a flattened (n^k m^k, d) table
    acc = np.zeros(tuples.shape[0], dtype=np.int64)
    for s in range(k):
        acc = acc * n + tuples[:, s]
    return acc * (m**k)


def _weight_index(tuples, n, k):
    acc = np.zeros(tuples.shape[0], dtype=np.int64)
    for s in range(k):
        acc = acc * n + tuples[:, s]
    return acc


# ---------------------------------------------------------------------------
# lookup-table kernels on atom labels
# ---------------------------------------------------------------------------

@njit
def _table_stat_nb(table, m, k, bases, tuples, maps, blocks):
    n_blocks = blocks.shape[0]
    d = table.shape[1]
    n_tuples = tuples.shape[0]
    out = np.zeros((n_blocks, d), dtype=table.dtype)
    for b in range(n_blocks):
        for sm in range(maps.shape[0]):
            for p in range(n_tuples):
                a = 0
                for s in range(k):
                    a = a * m + blocks[b, maps[sm, s], tuples[p, s]]
                row = bases[p] + a
                for c in range(d):
                    out[b, c] += table[row, c]
    return out


def _table_stat_np(table, m, k, bases, tuples, maps, blocks):
    n_blocks = blocks.shape[0]
    out = np.zeros((n_blocks, table.shape[1]), dtype=table.dtype)
    for sm in range(maps.shape[0]):
        for p in range(tuples.shape[0]):
            a = np.zeros(n_blocks, dtype=np.int64)
            for s in range(k):
                a = a * m + blocks[:, maps[sm, s], tuples[p, s]]
            out += table[bases[p] + a]
    return out


# ---------------------------------------------------------------------------
# builtin kernels on real points
# ---------------------------------------------------------------------------

@njit
def _point_stat_nb(code, weights, coef, k, widx, tuples, maps, blocks):
    n_blocks = blocks.shape[0]
    dim = blocks.shape[3]
    if code == PRODUCT:
        d = dim
    elif code == CONSTANT:
        d = coef.shape[1]
    else:
        d = 1
    out = np.zeros((n_blocks, d), dtype=np.float64)
    for b in range(n_blocks):
        for sm in range(maps.shape[0]):
            r0 = maps[sm, 0]
            for p in range(tuples.shape[0]):
                w = weights[widx[p]]
                if code == CONSTANT:
                    for c in range(d):
                        out[b, c] += w * coef[0, c]
                elif code == PRODUCT:
                    for c in range(d):
                        v = blocks[b, r0, tuples[p, 0], c]
                        for s in range(1, k):
                            v = v * blocks[b, maps[sm, s], tuples[p, s], c]
                        out[b, c] += w * v
                elif code == DISTANCE:
                    r1 = maps[sm, 1]
                    i = tuples[p, 0]
                    j = tuples[p, 1]
                    acc = 0.0
                    for c in range(dim):
                        diff = blocks[b, r0, i, c] - blocks[b, r1, j, c]
                        acc += diff * diff
                    out[b, 0] += w * np.sqrt(acc)
                else:
                    x = blocks[b, r0, tuples[p, 0], 0]
                    y = blocks[b, maps[sm, 1], tuples[p, 1], 0]
                    acc = 0.0
                    xp = 1.0
                    for pp in range(coef.shape[0]):
                        yq = 1.0
                        for qq in range(coef.shape[1]):
                            acc += coef[pp, qq] * xp * yq
                            yq = yq * y
                        xp = xp * x
                    out[b, 0] += w * acc
    return out


def _point_stat_np(code, weights, coef, k, widx, tuples, maps, blocks):
    n_blocks, _, _, dim = blocks.shape
    if code == PRODUCT:
        d = dim
    elif code == CONSTANT:
        d = coef.shape[1]
    else:
        d = 1
    out = np.zeros((n_blocks, d), dtype=np.float64)
    for sm in range(maps.shape[0]):
        r0 = maps[sm, 0]
        for p in range(tuples.shape[0]):
            w = weights[widx[p]]
            if code == CONSTANT:
                out += w * coef[0][None, :]
            elif code == PRODUCT:
                v = blocks[:, r0, tuples[p, 0], :].copy()
                for s in range(1, k):
                    v = v * blocks[:, maps[sm, s], tuples[p, s], :]
                out += w * v
            elif code == DISTANCE:
                x = blocks[:, r0, tuples[p, 0], :]
                y = blocks[:, maps[sm, 1], tuples[p, 1], :]
                acc = np.zeros(n_blocks)
                for c in range(dim):
                    diff = x[:, c] - y[:, c]
                    acc += diff * diff
                out[:, 0] += w * np.sqrt(acc)
            else:
                x = blocks[:, r0, tuples[p, 0], 0]
                y = blocks[:, maps[sm, 1], tuples[p, 1], 0]
                acc = np.zeros(n_blocks)
                xp = np.ones(n_blocks)
                for pp in range(coef.shape[0]):
                    yq = np.ones(n_blocks)
                    for qq in range(coef.shape[1]):
                        acc += coef[pp, qq] * xp * yq
                        yq = yq * y
                    xp = xp * x
                out[:, 0] += w * acc
    return out


# ---------------------------------------------------------------------------
# degree-2 Rademacher chaos over all sign patterns
# ---------------------------------------------------------------------------

@njit
def _chaos_values_nb(x, a, b):
    n = a.shape[0]
    d = x.shape[0]
    n_pat = 1 << n
    out = np.empty((n_pat, d), dtype=x.dtype)
    eps = np.empty(n, dtype=np.int64)
    for pat in range(n_pat):
        for i in range(n):
            eps[i] = 1 - 2 * ((pat >> i) & 1)
        for c in range(d):
            v = x[c]
            for i in range(n):
                v += a[i, c] * eps[i]
            for i in range(n):
                for j in range(n):
                    if i != j:
                        v += b[i, j, c] * (eps[i] * eps[j])
            out[pat, c] = v
    return out


def _chaos_values_np(x, a, b):
    n = a.shape[0]
    idx = np.arange(1 << n, dtype=np.int64)[:, None]
    eps = (1 - 2 * ((idx >> np.arange(n, dtype=np.int64)[None, :]) & 1)).astype(x.dtype)
    out = np.repeat(x[None, :], 1 << n, axis=0)
    for i in range(n):
        out += a[i][None, :] * eps[:, i:i + 1]
    for i in range(n):
        for j in range(n):
            if i != j:
                out += b[i, j][None, :] * (eps[:, i:i + 1] * eps[:, j:j + 1])
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def table_stat(table, n, m, k, tuples, maps, blocks, backend=None):
    """Sum of table lookups over tuples and slot maps for each block.

    ``table``: (n^k m^k, d); ``tuples``: (P, k) distinct index tuples;
    ``maps``: (S, k) row used by each argument slot; ``blocks``: (B, R, n)
    atom labels.  Returns (B, d) in the table's dtype.
    """
    bases = _tuple_bases(tuples, n, m, k)
    fn = _select(_table_stat_nb, _table_stat_np, backend)
    return fn(table, np.int64(m), np.int64(k), bases, tuples, maps, blocks)


def point_stat(code, weights, coef, k, n, tuples, maps, blocks, backend=None):
    """Builtin point kernels; ``blocks`` has shape (B, R, n, dim)."""
    widx = _weight_index(tuples, n, k)
    fn = _select(_point_stat_nb, _point_stat_np, backend)
    return fn(np.int64(code), weights, coef, np.int64(k), widx, tuples, maps, blocks)


def chaos_values(x, a, b, backend=None):
    """Values of ``x + sum a_i e_i + sum_{i!=j} b_ij e_i e_j`` on all 2^n patterns."""
    fn = _select(_chaos_values_nb, _chaos_values_np, backend)
    return fn(x, a, b)


def _select(nb_fn, np_fn, backend):
    if backend is None:
        backend = "numba" if USE_NUMBA else "numpy"
    if backend == "numba":
        return nb_fn
    if backend == "numpy":
        return getattr(np_fn, "py_func", np_fn)
    raise ValueError(f"unknown backend {backend!r}")
